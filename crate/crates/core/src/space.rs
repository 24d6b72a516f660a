//! Free Z^d-spaces `Q x Z^m x Z^d`, the translation action, transporter
//! sets and properness certificates.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::CoefficientRing;
use crate::supports::{CoordinateSet, ShapeDescriptor};

/// An element of the acting group Z^d.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupVector(pub Vec<i64>);

impl GroupVector {
    pub fn zero(d: usize) -> Self {
        GroupVector(vec![0; d])
    }

    /// The standard generator `e_i` (0-based).
    pub fn unit(d: usize, i: usize) -> Self {
        let mut v = vec![0; d];
        v[i] = 1;
        GroupVector(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn neg(&self) -> Self {
        GroupVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &GroupVector) -> Self {
        GroupVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scaled(&self, k: i64) -> Self {
        GroupVector(self.0.iter().map(|x| k * x).collect())
    }
}

impl From<Vec<i64>> for GroupVector {
    fn from(v: Vec<i64>) -> Self {
        GroupVector(v)
    }
}

/// A point `(q, u, v)` with `q` an index into the label set, `u` the
/// non-acting lattice part and `v` the acting part.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub label: usize,
    pub lattice: Vec<i64>,
    pub position: Vec<i64>,
}

impl Point {
    pub fn new(label: usize, lattice: Vec<i64>, position: Vec<i64>) -> Self {
        Point {
            label,
            lattice,
            position,
        }
    }

    pub(crate) fn translated(&self, g: &[i64]) -> Point {
        Point {
            label: self.label,
            lattice: self.lattice.clone(),
            position: self.position.iter().zip(g).map(|(a, b)| a + b).collect(),
        }
    }

    /// The point with acting coordinate `i` deleted.
    pub fn delete_coordinate(&self, i: usize) -> Point {
        let mut position = self.position.clone();
        position.remove(i);
        Point {
            label: self.label,
            lattice: self.lattice.clone(),
            position,
        }
    }

    /// Inverse of [`Point::delete_coordinate`]: inserts `value` at acting coordinate `i`.
    pub fn insert_coordinate(&self, i: usize, value: i64) -> Point {
        let mut position = self.position.clone();
        position.insert(i, value);
        Point {
            label: self.label,
            lattice: self.lattice.clone(),
            position,
        }
    }
}

/// A free Z^d-space `Q x Z^m x Z^d` acted on by translation in the last `d`
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiscreteSpace {
    d: usize,
    m: usize,
    labels: Vec<String>,
    ring: CoefficientRing,
}

impl DiscreteSpace {
    pub fn new(d: usize, m: usize, labels: Vec<String>, ring: CoefficientRing) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::MalformedDescriptor("label set must be nonempty".into()));
        }
        let unique: BTreeSet<&String> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(Error::MalformedDescriptor("labels must be distinct".into()));
        }
        ring.validate()?;
        Ok(DiscreteSpace { d, m, labels, ring })
    }

    /// `{"q"} x Z^m x Z^d` over the integers.
    pub fn lattice(d: usize, m: usize) -> Self {
        Self::with_labels(d, m, 1, CoefficientRing::Integers)
    }

    /// Labels `q1, ..., qn`.
    pub fn with_labels(d: usize, m: usize, n_labels: usize, ring: CoefficientRing) -> Self {
        let labels = if n_labels == 1 {
            vec!["q".to_string()]
        } else {
            (1..=n_labels).map(|k| format!("q{k}")).collect()
        };
        Self::new(d, m, labels, ring).expect("generated labels are valid")
    }

    pub fn acting_rank(&self) -> usize {
        self.d
    }

    pub fn lattice_rank(&self) -> usize {
        self.m
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    pub fn with_ring(&self, ring: CoefficientRing) -> Result<Self> {
        Self::new(self.d, self.m, self.labels.clone(), ring)
    }

    pub fn label_index(&self, name: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if p.label >= self.labels.len() {
            return Err(Error::LabelOutOfRange(p.label));
        }
        check_len(self.m, p.lattice.len())?;
        check_len(self.d, p.position.len())
    }

    pub fn check_generator(&self, i: usize) -> Result<()> {
        if i >= self.d {
            return Err(Error::GeneratorOutOfRange { index: i, rank: self.d });
        }
        Ok(())
    }

    /// The translation action `(q, u, v) . g = (q, u, v + g)`.
    pub fn act(&self, p: &Point, g: &GroupVector) -> Result<Point> {
        self.check_point(p)?;
        check_len(self.d, g.rank())?;
        Ok(p.translated(&g.0))
    }

    /// `X / Z e_i`: the free Z^{d-1}-space obtained by deleting acting coordinate `i`.
    pub fn quotient_one_generator(&self, i: usize) -> Result<DiscreteSpace> {
        self.check_generator(i)?;
        Ok(DiscreteSpace {
            d: self.d - 1,
            ..self.clone()
        })
    }

    /// The orbit space `X / Z^d` as a (trivially acted on) space of rank 0.
    pub fn full_quotient(&self) -> DiscreteSpace {
        DiscreteSpace { d: 0, ..self.clone() }
    }

    /// Re-encodes `X` as a free space for the subgroup `n_1 Z x ... x n_d Z`.
    pub fn restrict_finite_index(&self, n: &[i64]) -> Result<FiniteIndexRestriction> {
        FiniteIndexRestriction::new(self, n)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::RankMismatch { expected, found });
    }
    Ok(())
}

/// A finite box: a label subset and an inclusive interval per lattice and
/// acting coordinate. An interval with `lo > hi` is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteWindow {
    pub labels: BTreeSet<usize>,
    pub lattice: Vec<(i64, i64)>,
    pub position: Vec<(i64, i64)>,
}

impl FiniteWindow {
    pub fn new(labels: BTreeSet<usize>, lattice: Vec<(i64, i64)>, position: Vec<(i64, i64)>) -> Self {
        FiniteWindow {
            labels,
            lattice,
            position,
        }
    }

    /// All labels, every coordinate in `[lo, hi]`.
    pub fn cube(space: &DiscreteSpace, lo: i64, hi: i64) -> Self {
        FiniteWindow {
            labels: (0..space.label_count()).collect(),
            lattice: vec![(lo, hi); space.lattice_rank()],
            position: vec![(lo, hi); space.acting_rank()],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty() || self.lattice.iter().chain(&self.position).any(|(lo, hi)| lo > hi)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.labels.contains(&p.label) && inside(&self.lattice, &p.lattice) && inside(&self.position, &p.position)
    }

    /// Enumerates the points of the window in lexicographic order.
    pub fn points(&self) -> Vec<Point> {
        if self.is_empty() {
            return Vec::new();
        }
        let lattice = box_points(&self.lattice);
        let position = box_points(&self.position);
        let mut out = Vec::with_capacity(self.labels.len() * lattice.len() * position.len());
        for &q in &self.labels {
            for u in &lattice {
                for v in &position {
                    out.push(Point::new(q, u.clone(), v.clone()));
                }
            }
        }
        out
    }

    fn check(&self, space: &DiscreteSpace) -> Result<()> {
        check_len(space.lattice_rank(), self.lattice.len())?;
        check_len(space.acting_rank(), self.position.len())?;
        match self.labels.iter().find(|&&q| q >= space.label_count()) {
            Some(&q) => Err(Error::LabelOutOfRange(q)),
            None => Ok(()),
        }
    }
}

fn inside(intervals: &[(i64, i64)], xs: &[i64]) -> bool {
    intervals.len() == xs.len() && intervals.iter().zip(xs).all(|((lo, hi), x)| lo <= x && x <= hi)
}

/// Lattice points of a product of inclusive intervals.
pub(crate) fn box_points(intervals: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in intervals {
        let mut next = Vec::new();
        for prefix in &out {
            for x in lo..=hi {
                let mut v = prefix.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// The transporter `<A:B> = {g : Bg meets A}`.
///
/// Both windows are boxes, so the transporter is the union over matching
/// label/lattice fibres of the difference box `[A.lo - B.hi, A.hi - B.lo]`.
pub fn transporter(space: &DiscreteSpace, a: &FiniteWindow, b: &FiniteWindow) -> Result<BTreeSet<GroupVector>> {
    a.check(space)?;
    b.check(space)?;
    if a.is_empty() || b.is_empty() || a.labels.is_disjoint(&b.labels) {
        return Ok(BTreeSet::new());
    }
    let fibres_meet = a
        .lattice
        .iter()
        .zip(&b.lattice)
        .all(|(&(alo, ahi), &(blo, bhi))| alo.max(blo) <= ahi.min(bhi));
    if !fibres_meet {
        return Ok(BTreeSet::new());
    }
    let diff: Vec<(i64, i64)> = a
        .position
        .iter()
        .zip(&b.position)
        .map(|(&(alo, ahi), &(blo, bhi))| (alo - bhi, ahi - blo))
        .collect();
    Ok(box_points(&diff).into_iter().map(GroupVector).collect())
}

/// Point-properness on a window: the certificate is the (finite) transporter
/// of the window against itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperCertificate {
    pub proper: bool,
    pub transporter: BTreeSet<GroupVector>,
}

pub fn check_bourbaki_proper(space: &DiscreteSpace, window: &FiniteWindow) -> Result<ProperCertificate> {
    let transporter = transporter(space, window, window)?;
    // Translation actions are free, and for discrete Z^d free means proper.
    Ok(ProperCertificate {
        proper: true,
        transporter,
    })
}

/// `F`-properness: in the discrete topology `<F:{x}>` is finite for every
/// `x` iff the projection of `F` to the acting coordinates is finite.
pub fn check_f_proper(space: &DiscreteSpace, shape: &ShapeDescriptor) -> Result<bool> {
    shape.check(space)?;
    if shape.is_empty() {
        return Ok(true);
    }
    Ok(shape.position.iter().all(|c| matches!(c, CoordinateSet::Values(_))))
}

/// The re-encoding of `X` as a free space for `nZ^d = n_1 Z x ... x n_d Z`:
/// `(q, u, v) <-> ((q, v mod n), u, v div n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteIndexRestriction {
    original: DiscreteSpace,
    index: Vec<i64>,
    restricted: DiscreteSpace,
}

impl FiniteIndexRestriction {
    fn new(space: &DiscreteSpace, n: &[i64]) -> Result<Self> {
        check_len(space.acting_rank(), n.len())?;
        if let Some(&bad) = n.iter().find(|&&k| k <= 0) {
            return Err(Error::NonPositiveIndex(bad));
        }
        let residues = box_points(&n.iter().map(|&k| (0, k - 1)).collect::<Vec<_>>());
        let mut labels = Vec::with_capacity(space.label_count() * residues.len());
        for q in space.labels() {
            for r in &residues {
                if r.iter().all(|&x| x == 0) && n.iter().all(|&k| k == 1) {
                    labels.push(q.clone());
                } else {
                    let r: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                    labels.push(format!("{q}@{}", r.join(",")));
                }
            }
        }
        let restricted = DiscreteSpace::new(space.acting_rank(), space.lattice_rank(), labels, space.ring())?;
        Ok(FiniteIndexRestriction {
            original: space.clone(),
            index: n.to_vec(),
            restricted,
        })
    }

    pub fn original(&self) -> &DiscreteSpace {
        &self.original
    }

    pub fn restricted(&self) -> &DiscreteSpace {
        &self.restricted
    }

    pub fn index(&self) -> &[i64] {
        &self.index
    }

    fn residue_count(&self) -> usize {
        self.index.iter().map(|&k| k as usize).product()
    }

    fn residue_offset(&self, residues: &[i64]) -> usize {
        residues
            .iter()
            .zip(&self.index)
            .fold(0usize, |acc, (&r, &k)| acc * k as usize + r as usize)
    }

    pub fn encode_point(&self, p: &Point) -> Point {
        let (quot, rem): (Vec<i64>, Vec<i64>) = p
            .position
            .iter()
            .zip(&self.index)
            .map(|(&v, &k)| (v.div_euclid(k), v.rem_euclid(k)))
            .unzip();
        Point::new(
            p.label * self.residue_count() + self.residue_offset(&rem),
            p.lattice.clone(),
            quot,
        )
    }

    pub fn decode_point(&self, p: &Point) -> Point {
        let count = self.residue_count();
        let mut offset = p.label % count;
        let mut rem = vec![0; self.index.len()];
        for (slot, &k) in rem.iter_mut().zip(&self.index).rev() {
            *slot = (offset % k as usize) as i64;
            offset /= k as usize;
        }
        let position = p
            .position
            .iter()
            .zip(&self.index)
            .zip(&rem)
            .map(|((&w, &k), &r)| w * k + r)
            .collect();
        Point::new(p.label / count, p.lattice.clone(), position)
    }

    /// Splits a coordinate condition `v <= a` across residues: for residue
    /// `r` it reads `w <= floor((a - r) / n)`.
    pub(crate) fn split_cone_corner(&self, p: &Point) -> Vec<Point> {
        let residues = box_points(&self.index.iter().map(|&k| (0, k - 1)).collect::<Vec<_>>());
        residues
            .into_iter()
            .map(|rem| {
                let position = p
                    .position
                    .iter()
                    .zip(&self.index)
                    .zip(&rem)
                    .map(|((&a, &k), &r)| (a - r).div_euclid(k))
                    .collect();
                Point::new(
                    p.label * self.residue_count() + self.residue_offset(&rem),
                    p.lattice.clone(),
                    position,
                )
            })
            .collect()
    }
}

/// Orbit count of `nZ^d` on a window of `X` enumerated directly: two window
/// points are identified when they share label and lattice part and their
/// acting parts differ by an element of `nZ^d`.
pub fn count_orbits_on_window(window: &FiniteWindow, n: &[i64]) -> BTreeMap<(usize, Vec<i64>), usize> {
    let mut classes: BTreeMap<(usize, Vec<i64>), BTreeSet<Vec<i64>>> = BTreeMap::new();
    for p in window.points() {
        let rem: Vec<i64> = p.position.iter().zip(n).map(|(&v, &k)| v.rem_euclid(k)).collect();
        classes.entry((p.label, p.lattice.clone())).or_default().insert(rem);
    }
    classes.into_iter().map(|(k, v)| (k, v.len())).collect()
}
