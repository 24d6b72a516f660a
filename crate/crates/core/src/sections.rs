//! Exact calculus of finitely represented sections.
//!
//! A section is a finite combination of elementary terms: a value placed on
//! the cone `{anchor - sum_{i in S} k_i e_i : k_i >= 0}` for a ray set `S` of
//! acting directions (`S` empty is a point mass). Internally every section is
//! expanded into full cones (`S` = all acting directions), the *corner*
//! expansion
//!
//! ```text
//! f(x) = sum_{a >= x} c_a        (same label and lattice part, a >= x coordinatewise)
//! ```
//!
//! whose coefficients `c` are unique. Equality, shifts, the telescoping
//! operators and orbit sums are all closed-form on `c`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ring::{format_scalar, CoefficientRing, Scalar};
use crate::space::{DiscreteSpace, FiniteIndexRestriction, GroupVector, Point};
use crate::supports::{CoordinateSet, ShapeDescriptor, SupportFamily};

/// Stalk rank per label (constant along orbits).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StalkProfile {
    ranks: Vec<usize>,
}

impl StalkProfile {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        if ranks.contains(&0) {
            return Err(Error::MalformedDescriptor("stalk ranks must be positive".into()));
        }
        Ok(StalkProfile { ranks })
    }

    pub fn constant(labels: usize, rank: usize) -> Self {
        StalkProfile::new(vec![rank; labels]).expect("rank is positive")
    }

    pub fn rank(&self, label: usize) -> usize {
        self.ranks[label]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }
}

/// A Z^d-equivariant sheaf on a discrete space with constant stalks
/// `R^{rank(label)}` along each orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sheaf {
    space: DiscreteSpace,
    stalks: StalkProfile,
}

impl Sheaf {
    pub fn new(space: DiscreteSpace, stalks: StalkProfile) -> Result<Arc<Self>> {
        if stalks.ranks.len() != space.label_count() {
            return Err(Error::RankMismatch {
                expected: space.label_count(),
                found: stalks.ranks.len(),
            });
        }
        Ok(Arc::new(Sheaf { space, stalks }))
    }

    /// The sheaf of ring-valued functions (rank one everywhere).
    pub fn functions(space: DiscreteSpace) -> Arc<Self> {
        let stalks = StalkProfile::constant(space.label_count(), 1);
        Arc::new(Sheaf { space, stalks })
    }

    pub fn space(&self) -> &DiscreteSpace {
        &self.space
    }

    pub fn stalks(&self) -> &StalkProfile {
        &self.stalks
    }

    pub fn ring(&self) -> CoefficientRing {
        self.space.ring()
    }

    pub fn acting_rank(&self) -> usize {
        self.space.acting_rank()
    }

    /// The descended sheaf `F / Z e_i` on `X / Z e_i`.
    pub fn quotient_one_generator(&self, i: usize) -> Result<Arc<Sheaf>> {
        Ok(Arc::new(Sheaf {
            space: self.space.quotient_one_generator(i)?,
            stalks: self.stalks.clone(),
        }))
    }

    pub fn full_quotient(&self) -> Arc<Sheaf> {
        Arc::new(Sheaf {
            space: self.space.full_quotient(),
            stalks: self.stalks.clone(),
        })
    }

    /// The same sheaf regarded as an `nZ^d`-sheaf on the re-encoded space.
    pub fn restricted(&self, r: &FiniteIndexRestriction) -> Result<Arc<Sheaf>> {
        if r.original() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        let per_label = r.restricted().label_count() / self.space.label_count();
        let ranks = self
            .stalks
            .ranks
            .iter()
            .flat_map(|&k| std::iter::repeat_n(k, per_label))
            .collect();
        Sheaf::new(r.restricted().clone(), StalkProfile::new(ranks)?)
    }

    fn check_value(&self, label: usize, value: &[Scalar]) -> Result<()> {
        let expected = self.stalks.rank(label);
        if value.len() != expected {
            return Err(Error::RankMismatch {
                expected,
                found: value.len(),
            });
        }
        Ok(())
    }
}

/// A value on a cone `{anchor - sum_{i in rays} k_i e_i}`; `rays` are 0-based
/// acting directions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ElementaryTerm {
    pub anchor: Point,
    pub rays: BTreeSet<usize>,
    pub value: Vec<Scalar>,
}

impl ElementaryTerm {
    pub fn new(anchor: Point, rays: BTreeSet<usize>, value: Vec<Scalar>) -> Self {
        ElementaryTerm { anchor, rays, value }
    }

    pub fn covers(&self, p: &Point) -> bool {
        p.label == self.anchor.label
            && p.lattice == self.anchor.lattice
            && p.position
                .iter()
                .zip(&self.anchor.position)
                .enumerate()
                .all(|(i, (x, a))| if self.rays.contains(&i) { x <= a } else { x == a })
    }
}

/// A finitely represented section, stored by its corner expansion.
#[derive(Clone)]
pub struct Section {
    sheaf: Arc<Sheaf>,
    corners: BTreeMap<Point, Vec<Scalar>>,
}

impl PartialEq for Section {
    fn eq(&self, other: &Self) -> bool {
        same_sheaf(&self.sheaf, &other.sheaf) && self.corners == other.corners
    }
}

impl Eq for Section {}

fn same_sheaf(a: &Arc<Sheaf>, b: &Arc<Sheaf>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl fmt::Debug for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let vals: Vec<String> = t.value.iter().map(format_scalar).collect();
            write!(
                f,
                "[{}]{}({:?};{:?};{:?})",
                vals.join(","),
                if t.rays.is_empty() {
                    "pt".to_string()
                } else {
                    format!("ray{:?}", t.rays)
                },
                t.anchor.label,
                t.anchor.lattice,
                t.anchor.position
            )?;
        }
        Ok(())
    }
}

/// Adds `coeff * value` into the map entry at `key`, dropping it if it vanishes.
fn accumulate(
    map: &mut BTreeMap<Point, Vec<Scalar>>,
    ring: CoefficientRing,
    key: Point,
    value: &[Scalar],
    coeff: &Scalar,
) {
    let scaled: Vec<Scalar> = value.iter().map(|v| ring.mul(v, coeff)).collect();
    if scaled.iter().all(Zero::is_zero) {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(scaled);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let slot = e.get_mut();
            for (s, v) in slot.iter_mut().zip(&scaled) {
                *s = ring.add(s, v);
            }
            if slot.iter().all(Zero::is_zero) {
                e.remove();
            }
        }
    }
}

fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn add_vec(ring: CoefficientRing, a: &mut [Scalar], b: &[Scalar]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x = ring.add(x, y);
    }
}

/// Corners grouped into lines along one acting axis: key is the corner with
/// the axis deleted, entries are `(coordinate, value)` sorted by coordinate.
type Lines<'a> = BTreeMap<Point, Vec<(i64, &'a Vec<Scalar>)>>;
type Fibres<'a> = BTreeMap<(usize, Vec<i64>), Vec<(&'a Point, &'a Vec<Scalar>)>>;
type RayGroups = BTreeMap<(Point, Vec<bool>), Vec<(i64, Vec<Scalar>)>>;

impl Section {
    pub fn zero(sheaf: &Arc<Sheaf>) -> Self {
        Section {
            sheaf: Arc::clone(sheaf),
            corners: BTreeMap::new(),
        }
    }

    pub fn from_terms(sheaf: &Arc<Sheaf>, terms: &[ElementaryTerm]) -> Result<Self> {
        let mut out = Section::zero(sheaf);
        let ring = sheaf.ring();
        let d = sheaf.acting_rank();
        let one = ring.one();
        for t in terms {
            sheaf.space.check_point(&t.anchor)?;
            sheaf.check_value(t.anchor.label, &t.value)?;
            if let Some(&i) = t.rays.iter().find(|&&i| i >= d) {
                return Err(Error::GeneratorOutOfRange { index: i, rank: d });
            }
            let value: Vec<Scalar> = t.value.iter().map(|v| ring.reduce(v.clone())).collect();
            // Each non-ray direction contributes the factor cone(a_i) - cone(a_i - 1).
            let free: Vec<usize> = (0..d).filter(|i| !t.rays.contains(i)).collect();
            for mask in 0u64..(1u64 << free.len()) {
                let mut corner = t.anchor.clone();
                let mut negative = false;
                for (bit, &i) in free.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        corner.position[i] -= 1;
                        negative = !negative;
                    }
                }
                let coeff = if negative { ring.neg(&one) } else { one.clone() };
                accumulate(&mut out.corners, ring, corner, &value, &coeff);
            }
        }
        Ok(out)
    }

    pub fn point_mass(sheaf: &Arc<Sheaf>, anchor: Point, value: Vec<Scalar>) -> Result<Self> {
        Self::from_terms(sheaf, &[ElementaryTerm::new(anchor, BTreeSet::new(), value)])
    }

    /// The point mass with every stalk component equal to one.
    pub fn delta(sheaf: &Arc<Sheaf>, anchor: Point) -> Result<Self> {
        sheaf.space.check_point(&anchor)?;
        let value = vec![sheaf.ring().one(); sheaf.stalks.rank(anchor.label)];
        Self::point_mass(sheaf, anchor, value)
    }

    pub fn ray(sheaf: &Arc<Sheaf>, anchor: Point, rays: BTreeSet<usize>, value: Vec<Scalar>) -> Result<Self> {
        Self::from_terms(sheaf, &[ElementaryTerm::new(anchor, rays, value)])
    }

    pub fn sheaf(&self) -> &Arc<Sheaf> {
        &self.sheaf
    }

    pub fn space(&self) -> &DiscreteSpace {
        &self.sheaf.space
    }

    pub fn ring(&self) -> CoefficientRing {
        self.sheaf.ring()
    }

    pub fn is_zero(&self) -> bool {
        self.corners.is_empty()
    }

    /// Number of full-cone corners in the canonical expansion.
    pub fn corner_count(&self) -> usize {
        self.corners.len()
    }

    /// The canonical full-cone terms, anchors in lexicographic order.
    pub fn canonical_terms(&self) -> Vec<ElementaryTerm> {
        let rays: BTreeSet<usize> = (0..self.sheaf.acting_rank()).collect();
        self.corners
            .iter()
            .map(|(a, v)| ElementaryTerm::new(a.clone(), rays.clone(), v.clone()))
            .collect()
    }

    fn check_same(&self, other: &Section) -> Result<()> {
        if same_sheaf(&self.sheaf, &other.sheaf) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn checked_add(&self, other: &Section) -> Result<Section> {
        self.check_same(other)?;
        Ok(self.combine(other, &self.ring().one()))
    }

    pub fn checked_sub(&self, other: &Section) -> Result<Section> {
        self.check_same(other)?;
        Ok(self.combine(other, &self.ring().neg(&self.ring().one())))
    }

    fn combine(&self, other: &Section, coeff: &Scalar) -> Section {
        let ring = self.ring();
        let mut corners = self.corners.clone();
        for (k, v) in &other.corners {
            accumulate(&mut corners, ring, k.clone(), v, coeff);
        }
        Section {
            sheaf: Arc::clone(&self.sheaf),
            corners,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Section {
        let ring = self.ring();
        let c = ring.reduce(c.clone());
        let mut corners = BTreeMap::new();
        for (k, v) in &self.corners {
            accumulate(&mut corners, ring, k.clone(), v, &c);
        }
        Section {
            sheaf: Arc::clone(&self.sheaf),
            corners,
        }
    }

    /// Exact value at `p`: the sum of the corners dominating it.
    pub fn evaluate(&self, p: &Point) -> Result<Vec<Scalar>> {
        self.sheaf.space.check_point(p)?;
        let ring = self.ring();
        let mut acc = vec![Scalar::zero(); self.sheaf.stalks.rank(p.label)];
        let lo = Point::new(p.label, p.lattice.clone(), vec![i64::MIN; p.position.len()]);
        let hi = Point::new(p.label, p.lattice.clone(), vec![i64::MAX; p.position.len()]);
        for (a, v) in self.corners.range(lo..=hi) {
            if a.position.iter().zip(&p.position).all(|(ai, xi)| ai >= xi) {
                add_vec(ring, &mut acc, v);
            }
        }
        Ok(acc)
    }

    /// `g |> s`, i.e. `x -> s(x - g)`.
    pub fn shift(&self, g: &GroupVector) -> Result<Section> {
        if g.rank() != self.sheaf.acting_rank() {
            return Err(Error::RankMismatch {
                expected: self.sheaf.acting_rank(),
                found: g.rank(),
            });
        }
        Ok(Section {
            sheaf: Arc::clone(&self.sheaf),
            corners: self
                .corners
                .iter()
                .map(|(a, v)| (a.translated(&g.0), v.clone()))
                .collect(),
        })
    }

    fn shift_axis(&self, i: usize, k: i64) -> Section {
        Section {
            sheaf: Arc::clone(&self.sheaf),
            corners: self
                .corners
                .iter()
                .map(|(a, v)| {
                    let mut a = a.clone();
                    a.position[i] += k;
                    (a, v.clone())
                })
                .collect(),
        }
    }

    /// `(sigma_i - 1) s = e_i |> s - s`.
    pub fn sigma_minus_one(&self, i: usize) -> Result<Section> {
        self.sheaf.space.check_generator(i)?;
        Ok(&self.shift_axis(i, 1) - self)
    }

    fn lines(&self, i: usize) -> Lines<'_> {
        let mut lines: Lines<'_> = BTreeMap::new();
        for (a, v) in &self.corners {
            lines
                .entry(a.delete_coordinate(i))
                .or_default()
                .push((a.position[i], v));
        }
        for line in lines.values_mut() {
            line.sort_by_key(|(x, _)| *x);
        }
        lines
    }

    fn line_sum(&self, line: &[(i64, &Vec<Scalar>)], rank: usize) -> Vec<Scalar> {
        let ring = self.ring();
        let mut total = vec![Scalar::zero(); rank];
        for (_, v) in line {
            add_vec(ring, &mut total, v);
        }
        total
    }

    /// Whether every line along `e_i` meets the support in a finite set.
    pub fn finite_along(&self, i: usize) -> bool {
        self.lines(i)
            .iter()
            .all(|(key, line)| is_zero_vec(&self.line_sum(line, self.sheaf.stalks.rank(key.label))))
    }

    pub fn is_finitely_supported(&self) -> bool {
        (0..self.sheaf.acting_rank()).all(|i| self.finite_along(i))
    }

    fn require_finite_along(&self, i: usize) -> Result<Lines<'_>> {
        self.sheaf.space.check_generator(i)?;
        let lines = self.lines(i);
        for (key, line) in &lines {
            if !is_zero_vec(&self.line_sum(line, self.sheaf.stalks.rank(key.label))) {
                return Err(Error::InfiniteSupport { generator: i });
            }
        }
        Ok(lines)
    }

    /// `s~ = sum_{k >= 1} (-k e_i) |> s`, the unique primitive vanishing far
    /// out in the `+e_i` direction: `sigma_minus_one(s~, i) = s`.
    ///
    /// On corners `s~` has coefficient `sum_{a_i > b} c_a` at `b`, which is
    /// constant between consecutive corners of a line.
    pub fn ray_primitive(&self, i: usize) -> Result<Section> {
        let lines = self.require_finite_along(i)?;
        let ring = self.ring();
        let one = ring.one();
        let mut corners = BTreeMap::new();
        for (key, line) in lines {
            let rank = self.sheaf.stalks.rank(key.label);
            let mut tail = vec![Scalar::zero(); rank];
            for w in (0..line.len()).rev() {
                let (x, v) = line[w];
                add_vec(ring, &mut tail, v);
                if w == 0 || is_zero_vec(&tail) {
                    continue;
                }
                // tail = sum of corners strictly above b for b in [x_{w-1}, x_w)
                let prev = line[w - 1].0;
                for b in prev..x {
                    accumulate(&mut corners, ring, key.insert_coordinate(i, b), &tail, &one);
                }
            }
        }
        Ok(Section {
            sheaf: Arc::clone(&self.sheaf),
            corners,
        })
    }

    /// Periodization along `e_i`: the section on `X / Z e_i` with value
    /// `sum_k s(x + k e_i)` at the orbit of `x`.
    ///
    /// A line of corners with vanishing sum contributes `sum_a c_a a_i`.
    pub fn orbit_sum(&self, i: usize) -> Result<Section> {
        let lines = self.require_finite_along(i)?;
        let sheaf = self.sheaf.quotient_one_generator(i)?;
        let ring = self.ring();
        let mut corners = BTreeMap::new();
        for (key, line) in lines {
            for (x, v) in line {
                accumulate(&mut corners, ring, key.clone(), v, &ring.from_i64(x));
            }
        }
        Ok(Section { sheaf, corners })
    }

    /// Places a section of `X / Z e_i` on the slice `x_i = 0` of `X`; a
    /// right inverse of [`Section::orbit_sum`].
    pub fn lift_from_quotient(&self, target: &Arc<Sheaf>, i: usize) -> Result<Section> {
        target.space.check_generator(i)?;
        if !same_sheaf(&target.quotient_one_generator(i)?, &self.sheaf) {
            return Err(Error::SpaceMismatch);
        }
        let ring = self.ring();
        let minus = ring.neg(&ring.one());
        let mut corners = BTreeMap::new();
        for (a, v) in &self.corners {
            accumulate(&mut corners, ring, a.insert_coordinate(i, 0), v, &ring.one());
            accumulate(&mut corners, ring, a.insert_coordinate(i, -1), v, &minus);
        }
        Ok(Section {
            sheaf: Arc::clone(target),
            corners,
        })
    }

    /// Multiplies by the indicator of a product shape.
    pub fn restrict_to_shape(&self, shape: &ShapeDescriptor) -> Result<Section> {
        shape.check(&self.sheaf.space)?;
        let mut current = Section {
            sheaf: Arc::clone(&self.sheaf),
            corners: self
                .corners
                .iter()
                .filter(|(a, _)| {
                    shape.labels.contains(&a.label) && shape.lattice.iter().zip(&a.lattice).all(|(c, &u)| c.contains(u))
                })
                .map(|(a, v)| (a.clone(), v.clone()))
                .collect(),
        };
        for (i, c) in shape.position.iter().enumerate() {
            if let CoordinateSet::Values(vals) = c {
                current = current.restrict_axis(i, vals);
            }
        }
        Ok(current)
    }

    fn restrict_axis(&self, i: usize, vals: &BTreeSet<i64>) -> Section {
        let ring = self.ring();
        let one = ring.one();
        let minus = ring.neg(&one);
        let mut corners = BTreeMap::new();
        for (key, line) in self.lines(i) {
            let rank = self.sheaf.stalks.rank(key.label);
            for &v in vals {
                // value of the line at coordinate v
                let mut g = vec![Scalar::zero(); rank];
                for (x, c) in line.iter().rev() {
                    if *x < v {
                        break;
                    }
                    add_vec(ring, &mut g, c);
                }
                if is_zero_vec(&g) {
                    continue;
                }
                accumulate(&mut corners, ring, key.insert_coordinate(i, v), &g, &one);
                accumulate(&mut corners, ring, key.insert_coordinate(i, v - 1), &g, &minus);
            }
        }
        Section {
            sheaf: Arc::clone(&self.sheaf),
            corners,
        }
    }

    /// The section is piecewise constant on the grid spanned by its corner
    /// coordinates; returns each fibre's nonzero cells.
    fn nonzero_cells(&self) -> Vec<Cell> {
        let d = self.sheaf.acting_rank();
        let ring = self.ring();
        let mut fibres: Fibres<'_> = BTreeMap::new();
        for (a, v) in &self.corners {
            fibres.entry((a.label, a.lattice.clone())).or_default().push((a, v));
        }
        let mut cells = Vec::new();
        for ((label, lattice), corners) in fibres {
            let rank = self.sheaf.stalks.rank(label);
            let axes: Vec<Vec<i64>> = (0..d)
                .map(|i| {
                    let set: BTreeSet<i64> = corners.iter().map(|(a, _)| a.position[i]).collect();
                    set.into_iter().collect()
                })
                .collect();
            let dims: Vec<usize> = axes.iter().map(Vec::len).collect();
            let total: usize = dims.iter().product();
            let mut grid = vec![vec![Scalar::zero(); rank]; total];
            let flat = |idx: &[usize]| idx.iter().zip(&dims).fold(0usize, |acc, (&x, &n)| acc * n + x);
            for (a, v) in &corners {
                let idx: Vec<usize> = (0..d)
                    .map(|i| {
                        axes[i]
                            .binary_search(&a.position[i])
                            .expect("corner coordinate is on the grid")
                    })
                    .collect();
                add_vec(ring, &mut grid[flat(&idx)], v);
            }
            // suffix sums along every axis turn corner weights into cell values
            let mut stride = 1usize;
            for i in (0..d).rev() {
                let n = dims[i];
                for base in 0..total {
                    let pos = (base / stride) % n;
                    if pos + 1 < n {
                        continue;
                    }
                    for k in (0..n - 1).rev() {
                        let (lo, hi) = (base - (n - 1 - k) * stride, base - (n - 2 - k) * stride);
                        let upper = grid[hi].clone();
                        add_vec(ring, &mut grid[lo], &upper);
                    }
                }
                stride *= n;
            }
            for (offset, value) in grid.into_iter().enumerate() {
                if is_zero_vec(&value) {
                    continue;
                }
                let mut rem = offset;
                let mut idx = vec![0usize; d];
                for i in (0..d).rev() {
                    idx[i] = rem % dims[i];
                    rem /= dims[i];
                }
                let extent = idx
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| {
                        if k == 0 {
                            None
                        } else {
                            Some((axes[i][k - 1] + 1, axes[i][k]))
                        }
                    })
                    .collect();
                cells.push(Cell {
                    label,
                    lattice: lattice.clone(),
                    extent,
                });
            }
        }
        cells
    }

    /// The exact support as a finite union of product shapes; half-lines
    /// are widened to all of Z (which does not change membership in any
    /// family of product shapes).
    pub fn support(&self) -> Vec<ShapeDescriptor> {
        self.nonzero_cells()
            .into_iter()
            .map(|c| ShapeDescriptor {
                labels: [c.label].into(),
                lattice: c.lattice.iter().map(|&u| CoordinateSet::values([u])).collect(),
                position: c
                    .extent
                    .iter()
                    .map(|e| match e {
                        None => CoordinateSet::All,
                        Some((lo, hi)) => CoordinateSet::values(*lo..=*hi),
                    })
                    .collect(),
            })
            .collect()
    }

    /// Membership `s in Gamma_Phi`.
    pub fn in_family(&self, family: &SupportFamily) -> bool {
        match family {
            SupportFamily::All | SupportFamily::Cocompact => true,
            SupportFamily::Finite => self.is_finitely_supported(),
            SupportFamily::GeneratedBy(_) => self.nonzero_cells().iter().all(|cell| {
                let unbounded: BTreeSet<usize> = cell
                    .extent
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.is_none())
                    .map(|(i, _)| i)
                    .collect();
                family
                    .acting_patterns(&self.sheaf.space, cell.label, &cell.lattice)
                    .iter()
                    .any(|p| unbounded.is_subset(p))
            }),
        }
    }

    /// A compact mixed point/ray form of the section, deterministic in the
    /// section. Used for display and serialisation.
    pub fn terms(&self) -> Vec<ElementaryTerm> {
        let d = self.sheaf.acting_rank();
        let ring = self.ring();
        // (anchor, ray flags of processed axes) -> value
        let mut current: BTreeMap<(Point, Vec<bool>), Vec<Scalar>> = self
            .corners
            .iter()
            .map(|(a, v)| ((a.clone(), vec![true; d]), v.clone()))
            .collect();
        for i in 0..d {
            let mut groups: RayGroups = BTreeMap::new();
            for ((a, kinds), v) in current {
                let mut k = kinds.clone();
                k[i] = true;
                groups
                    .entry((a.delete_coordinate(i), k))
                    .or_default()
                    .push((a.position[i], v));
            }
            current = BTreeMap::new();
            for ((key, kinds), mut line) in groups {
                line.sort_by_key(|(x, _)| *x);
                let rank = line[0].1.len();
                let mut emit = |x: i64, ray: bool, value: &[Scalar], negate: bool| {
                    let mut k = kinds.clone();
                    k[i] = ray;
                    let coeff = if negate { ring.neg(&ring.one()) } else { ring.one() };
                    let entry = current
                        .entry((key.insert_coordinate(i, x), k))
                        .or_insert_with(|| vec![Scalar::zero(); rank]);
                    for (e, v) in entry.iter_mut().zip(value) {
                        *e = ring.add(e, &ring.mul(v, &coeff));
                    }
                };
                let mut total = vec![Scalar::zero(); rank];
                for (_, v) in &line {
                    add_vec(ring, &mut total, v);
                }
                if !is_zero_vec(&total) {
                    emit(line[0].0, true, &total, false);
                }
                let mut tail = total;
                for w in 0..line.len() - 1 {
                    let (lo, v) = (&line[w].0, &line[w].1);
                    for (t, c) in tail.iter_mut().zip(v) {
                        *t = ring.sub(t, c);
                    }
                    if is_zero_vec(&tail) {
                        continue;
                    }
                    let hi = line[w + 1].0;
                    if hi - lo <= 4 {
                        for x in lo + 1..=hi {
                            emit(x, false, &tail, false);
                        }
                    } else {
                        emit(hi, true, &tail, false);
                        emit(*lo, true, &tail, true);
                    }
                }
            }
            current.retain(|_, v| !is_zero_vec(v));
        }
        current
            .into_iter()
            .map(|((anchor, kinds), value)| {
                let rays = kinds.iter().enumerate().filter(|(_, &r)| r).map(|(i, _)| i).collect();
                ElementaryTerm::new(anchor, rays, value)
            })
            .collect()
    }

    /// Re-encodes the section for the restriction to `nZ^d`.
    pub fn restrict_to_subgroup(&self, r: &FiniteIndexRestriction, target: &Arc<Sheaf>) -> Result<Section> {
        if !same_sheaf(&self.sheaf.restricted(r)?, target) {
            return Err(Error::SpaceMismatch);
        }
        let ring = self.ring();
        let one = ring.one();
        let mut corners = BTreeMap::new();
        for (a, v) in &self.corners {
            for c in r.split_cone_corner(a) {
                accumulate(&mut corners, ring, c, v, &one);
            }
        }
        Ok(Section {
            sheaf: Arc::clone(target),
            corners,
        })
    }
}

struct Cell {
    label: usize,
    lattice: Vec<i64>,
    /// `None` for the cell unbounded below along that axis.
    extent: Vec<Option<(i64, i64)>>,
}

impl Add for &Section {
    type Output = Section;

    /// Panics if the sections live on different sheaves; see [`Section::checked_add`].
    fn add(self, rhs: &Section) -> Section {
        self.checked_add(rhs).expect("sections on the same sheaf")
    }
}

impl Sub for &Section {
    type Output = Section;

    fn sub(self, rhs: &Section) -> Section {
        self.checked_sub(rhs).expect("sections on the same sheaf")
    }
}

impl Neg for &Section {
    type Output = Section;

    fn neg(self) -> Section {
        self.scale(&self.ring().neg(&self.ring().one()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::CoefficientRing;
    use proptest::prelude::*;

    fn z() -> Arc<Sheaf> {
        Sheaf::functions(DiscreteSpace::lattice(1, 0))
    }

    fn z2() -> Arc<Sheaf> {
        Sheaf::functions(DiscreteSpace::lattice(2, 0))
    }

    fn int(v: i64) -> Scalar {
        Scalar::from_integer(v.into())
    }

    fn pt(pos: &[i64]) -> Point {
        Point::new(0, vec![], pos.to_vec())
    }

    fn delta(sheaf: &Arc<Sheaf>, pos: &[i64]) -> Section {
        Section::delta(sheaf, pt(pos)).unwrap()
    }

    fn ray(sheaf: &Arc<Sheaf>, pos: &[i64], rays: &[usize], v: i64) -> Section {
        Section::ray(sheaf, pt(pos), rays.iter().copied().collect(), vec![int(v)]).unwrap()
    }

    fn at(s: &Section, pos: &[i64]) -> Scalar {
        s.evaluate(&pt(pos)).unwrap()[0].clone()
    }

    /// Pointwise value straight from the term list, independent of corners.
    fn naive(terms: &[ElementaryTerm], p: &Point) -> Scalar {
        terms.iter().filter(|t| t.covers(p)).map(|t| t.value[0].clone()).sum()
    }

    #[test]
    fn evaluation_examples() {
        let s = z();
        assert_eq!(at(&Section::zero(&s), &[3]), int(0));
        assert_eq!(at(&delta(&s, &[0]), &[0]), int(1));
        assert_eq!(at(&delta(&s, &[0]), &[1]), int(0));
        assert_eq!(at(&ray(&s, &[0], &[0], 1), &[-7]), int(1));
        assert_eq!(at(&ray(&s, &[0], &[0], 1), &[1]), int(0));
    }

    #[test]
    fn shift_moves_point_masses() {
        let s = z();
        let g = GroupVector(vec![1]);
        assert_eq!(delta(&s, &[0]).shift(&g).unwrap(), delta(&s, &[1]));
        assert_eq!(delta(&s, &[0]).shift(&GroupVector::zero(1)).unwrap(), delta(&s, &[0]));
    }

    #[test]
    fn telescoping_examples() {
        let s = z();
        assert_eq!(
            delta(&s, &[0]).sigma_minus_one(0).unwrap(),
            &delta(&s, &[1]) - &delta(&s, &[0])
        );
        assert_eq!(ray(&s, &[0], &[0], 1).sigma_minus_one(0).unwrap(), delta(&s, &[1]));
        assert!(Section::zero(&s).sigma_minus_one(0).unwrap().is_zero());
    }

    #[test]
    fn ray_primitive_examples() {
        let s = z();
        assert_eq!(delta(&s, &[0]).ray_primitive(0).unwrap(), ray(&s, &[-1], &[0], 1));
        assert_eq!(
            (&delta(&s, &[0]) - &delta(&s, &[1])).ray_primitive(0).unwrap(),
            -&delta(&s, &[0])
        );
        assert!(matches!(
            ray(&s, &[0], &[0], 1).ray_primitive(0),
            Err(Error::InfiniteSupport { generator: 0 })
        ));
    }

    #[test]
    fn orbit_sum_examples() {
        let s = z();
        let q = s.quotient_one_generator(0).unwrap();
        let one = Section::delta(&q, Point::new(0, vec![], vec![])).unwrap();
        assert_eq!(delta(&s, &[0]).orbit_sum(0).unwrap(), one);
        assert_eq!(
            (&delta(&s, &[0]) + &delta(&s, &[5])).orbit_sum(0).unwrap(),
            one.scale(&int(2))
        );
        assert!(delta(&s, &[3])
            .sigma_minus_one(0)
            .unwrap()
            .orbit_sum(0)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn terms_are_compact_for_displays() {
        let s = z();
        let t = ray(&s, &[-1], &[0], 2).terms();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].rays, [0].into());
        let far = &delta(&s, &[0]) + &delta(&s, &[40]);
        assert_eq!(far.terms().len(), 2);
        let box_ = (0..30).fold(Section::zero(&s), |acc, k| &acc + &delta(&s, &[k]));
        assert_eq!(box_.terms().len(), 2);
        assert_eq!(Section::from_terms(&s, &box_.terms()).unwrap(), box_);
    }

    #[test]
    fn families() {
        let s = z2();
        assert!(delta(&s, &[0, 0]).in_family(&SupportFamily::Finite));
        let r = ray(&s, &[0, 0], &[0], 1);
        assert!(!r.in_family(&SupportFamily::Finite));
        assert!(r.in_family(&SupportFamily::Finite.saturate(s.space())));
        let horizontal = SupportFamily::GeneratedBy(vec![ShapeDescriptor::new(
            vec![0],
            vec![],
            vec![CoordinateSet::All, CoordinateSet::values([0])],
        )]);
        assert!(r.in_family(&horizontal));
        assert!(!ray(&s, &[0, 0], &[1], 1).in_family(&horizontal));
        assert!(!ray(&s, &[0, 0], &[0, 1], 1).in_family(&horizontal));
        // a ray minus its shift is finite even though both terms are rays
        let cancel = &ray(&s, &[0, 0], &[0], 1) - &ray(&s, &[-3, 0], &[0], 1);
        assert!(cancel.in_family(&SupportFamily::Finite));
    }

    #[test]
    fn support_shapes_cover_exactly_the_nonzero_points() {
        let s = z2();
        let sec = &ray(&s, &[1, 1], &[0], 1) + &delta(&s, &[-2, 0]);
        let shapes = sec.support();
        for x in -5..=5 {
            for y in -5..=5 {
                let nonzero = at(&sec, &[x, y]) != int(0);
                let covered = shapes
                    .iter()
                    .any(|sh| sh.position[0].contains(x) && sh.position[1].contains(y));
                assert!(!nonzero || covered, "({x},{y})");
                if shapes.iter().all(|sh| sh.position[0].is_finite()) {
                    assert_eq!(nonzero, covered);
                }
            }
        }
    }

    #[test]
    fn restriction_to_subgroup_preserves_values() {
        let space = DiscreteSpace::with_labels(2, 0, 2, CoefficientRing::Integers);
        let sheaf = Sheaf::functions(space.clone());
        let r = space.restrict_finite_index(&[2, 3]).unwrap();
        let target = sheaf.restricted(&r).unwrap();
        let sec = Section::from_terms(
            &sheaf,
            &[
                ElementaryTerm::new(Point::new(1, vec![], vec![1, -2]), [0].into(), vec![int(3)]),
                ElementaryTerm::new(Point::new(0, vec![], vec![0, 4]), [].into(), vec![int(-1)]),
            ],
        )
        .unwrap();
        let enc = sec.restrict_to_subgroup(&r, &target).unwrap();
        for p in crate::space::FiniteWindow::new([0, 1].into(), vec![], vec![(-6, 6), (-6, 6)]).points() {
            assert_eq!(sec.evaluate(&p).unwrap(), enc.evaluate(&r.encode_point(&p)).unwrap());
        }
    }

    fn arb_terms(d: usize, rays: bool) -> impl Strategy<Value = Vec<ElementaryTerm>> {
        let term = (
            proptest::collection::vec(-3i64..=3, d),
            proptest::collection::btree_set(0..d.max(1), 0..=d),
            -4i64..=4,
        )
            .prop_map(move |(pos, rs, v)| {
                let rs = if rays {
                    rs.into_iter().filter(|&i| i < d).collect()
                } else {
                    BTreeSet::new()
                };
                ElementaryTerm::new(Point::new(0, vec![], pos), rs, vec![int(v)])
            });
        proptest::collection::vec(term, 0..5)
    }

    fn window(d: usize) -> Vec<Point> {
        crate::space::FiniteWindow::cube(&DiscreteSpace::lattice(d, 0), -6, 6).points()
    }

    proptest! {
        #[test]
        fn canonical_form_matches_naive_evaluation(terms in arb_terms(2, true)) {
            let s = Section::from_terms(&z2(), &terms).unwrap();
            for p in window(2) {
                prop_assert_eq!(s.evaluate(&p).unwrap()[0].clone(), naive(&terms, &p));
            }
            let back = Section::from_terms(&z2(), &s.terms()).unwrap();
            prop_assert_eq!(back, s);
        }

        #[test]
        fn shift_is_an_action(terms in arb_terms(2, true), g in proptest::collection::vec(-3i64..=3, 2), h in proptest::collection::vec(-3i64..=3, 2)) {
            let s = Section::from_terms(&z2(), &terms).unwrap();
            let (g, h) = (GroupVector(g), GroupVector(h));
            prop_assert_eq!(s.shift(&g).unwrap().shift(&h).unwrap(), s.shift(&g.add(&h)).unwrap());
            for p in window(2) {
                prop_assert_eq!(s.shift(&g).unwrap().evaluate(&p).unwrap(), s.evaluate(&p.translated(&g.neg().0)).unwrap());
            }
        }

        #[test]
        fn ray_primitive_telescopes(terms in arb_terms(2, false), i in 0usize..2) {
            let s = Section::from_terms(&z2(), &terms).unwrap();
            let r = s.ray_primitive(i).unwrap();
            prop_assert_eq!(r.sigma_minus_one(i).unwrap(), s.clone());
            prop_assert!(s.sigma_minus_one(i).unwrap().orbit_sum(i).unwrap().is_zero());
            let moved = s.shift(&GroupVector::unit(2, i).scaled(5)).unwrap();
            prop_assert_eq!(moved.orbit_sum(i).unwrap(), s.orbit_sum(i).unwrap());
        }

        #[test]
        fn orbit_sums_commute(terms in arb_terms(2, false)) {
            let s = Section::from_terms(&z2(), &terms).unwrap();
            let a = s.orbit_sum(0).unwrap().orbit_sum(0).unwrap();
            let b = s.orbit_sum(1).unwrap().orbit_sum(0).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn orbit_sum_is_a_pointwise_sum(terms in arb_terms(2, false), i in 0usize..2, y in -3i64..=3) {
            let s = Section::from_terms(&z2(), &terms).unwrap();
            let total: Scalar = (-10..=10)
                .map(|k| {
                    let mut pos = vec![y; 2];
                    pos[i] = k;
                    s.evaluate(&pt(&pos)).unwrap()[0].clone()
                })
                .sum();
            prop_assert_eq!(s.orbit_sum(i).unwrap().evaluate(&pt(&[y])).unwrap()[0].clone(), total);
        }

        #[test]
        fn finiteness_matches_cells(terms in arb_terms(2, true)) {
            let s = Section::from_terms(&z2(), &terms).unwrap();
            let finite_cells = s.support().iter().all(|sh| sh.position.iter().all(CoordinateSet::is_finite));
            prop_assert_eq!(s.is_finitely_supported(), finite_cells);
        }
    }
}
