//! Support families: finite, all, orbit-saturated, and the Z^d-invariant
//! families generated by product-shaped sets, with saturation and
//! push-forward along quotient maps.
//!
//! Families are infinite, so they are never materialised; membership is
//! decided coordinatewise on product shapes.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::space::{check_f_proper, DiscreteSpace};

/// A per-coordinate constraint: a finite set of integers or all of Z.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoordinateSet {
    Values(BTreeSet<i64>),
    All,
}

impl CoordinateSet {
    pub fn values<I: IntoIterator<Item = i64>>(vals: I) -> Self {
        CoordinateSet::Values(vals.into_iter().collect())
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, CoordinateSet::Values(v) if v.is_empty())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, CoordinateSet::Values(_))
    }

    pub fn contains(&self, x: i64) -> bool {
        match self {
            CoordinateSet::Values(v) => v.contains(&x),
            CoordinateSet::All => true,
        }
    }

    pub fn is_subset(&self, other: &CoordinateSet) -> bool {
        match (self, other) {
            (_, CoordinateSet::All) => true,
            (CoordinateSet::All, CoordinateSet::Values(_)) => false,
            (CoordinateSet::Values(a), CoordinateSet::Values(b)) => a.is_subset(b),
        }
    }
}

/// A product-shaped subset `L x C_1 x ... x C_m x D_1 x ... x D_d`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShapeDescriptor {
    pub labels: BTreeSet<usize>,
    pub lattice: Vec<CoordinateSet>,
    pub position: Vec<CoordinateSet>,
}

impl ShapeDescriptor {
    pub fn new(labels: Vec<usize>, lattice: Vec<CoordinateSet>, position: Vec<CoordinateSet>) -> Self {
        ShapeDescriptor {
            labels: labels.into_iter().collect(),
            lattice,
            position,
        }
    }

    pub fn everything(space: &DiscreteSpace) -> Self {
        ShapeDescriptor {
            labels: (0..space.label_count()).collect(),
            lattice: vec![CoordinateSet::All; space.lattice_rank()],
            position: vec![CoordinateSet::All; space.acting_rank()],
        }
    }

    pub fn check(&self, space: &DiscreteSpace) -> Result<()> {
        if self.lattice.len() != space.lattice_rank() || self.position.len() != space.acting_rank() {
            return Err(Error::MalformedDescriptor(format!(
                "shape has {}+{} coordinates, space has {}+{}",
                self.lattice.len(),
                self.position.len(),
                space.lattice_rank(),
                space.acting_rank()
            )));
        }
        if let Some(&q) = self.labels.iter().find(|&&q| q >= space.label_count()) {
            return Err(Error::LabelOutOfRange(q));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty() || self.lattice.iter().chain(&self.position).any(CoordinateSet::is_empty)
    }

    pub fn is_subset(&self, other: &ShapeDescriptor) -> bool {
        self.is_empty()
            || (self.labels.is_subset(&other.labels)
                && self.lattice.iter().zip(&other.lattice).all(|(a, b)| a.is_subset(b))
                && self.position.iter().zip(&other.position).all(|(a, b)| a.is_subset(b)))
    }

    /// Orbit saturation `S . Z^d`: acting coordinates become all of Z.
    pub fn saturated(&self) -> Self {
        if self.is_empty() {
            return self.clone();
        }
        ShapeDescriptor {
            labels: self.labels.clone(),
            lattice: self.lattice.clone(),
            position: vec![CoordinateSet::All; self.position.len()],
        }
    }

    /// Image under deletion of acting coordinates. The image of the empty
    /// set stays empty even when the empty coordinate is deleted.
    fn delete_acting(&self, deleted: &[usize]) -> Self {
        ShapeDescriptor {
            labels: if self.is_empty() {
                BTreeSet::new()
            } else {
                self.labels.clone()
            },
            lattice: self.lattice.clone(),
            position: self
                .position
                .iter()
                .enumerate()
                .filter(|(i, _)| !deleted.contains(i))
                .map(|(_, c)| c.clone())
                .collect(),
        }
    }

    /// Acting coordinates along which the shape is unbounded.
    pub fn acting_pattern(&self) -> BTreeSet<usize> {
        self.position
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_finite())
            .map(|(i, _)| i)
            .collect()
    }
}

/// A support family. `GeneratedBy` denotes the smallest Z^d-invariant family
/// containing the generators: subsets of finite unions of translates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupportFamily {
    /// Finite (compact) subsets.
    Finite,
    /// All subsets.
    All,
    /// Sets with finite image in the orbit space: `Finite . Z^d`.
    Cocompact,
    GeneratedBy(Vec<ShapeDescriptor>),
}

/// A quotient map `X -> X / Z^S` deleting the acting coordinates in `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientMap {
    source_rank: usize,
    deleted: Vec<usize>,
}

impl QuotientMap {
    pub fn identity(space: &DiscreteSpace) -> Self {
        QuotientMap {
            source_rank: space.acting_rank(),
            deleted: Vec::new(),
        }
    }

    pub fn one_generator(space: &DiscreteSpace, i: usize) -> Result<Self> {
        space.check_generator(i)?;
        Ok(QuotientMap {
            source_rank: space.acting_rank(),
            deleted: vec![i],
        })
    }

    pub fn full(space: &DiscreteSpace) -> Self {
        QuotientMap {
            source_rank: space.acting_rank(),
            deleted: (0..space.acting_rank()).collect(),
        }
    }

    pub fn deleting(space: &DiscreteSpace, generators: &[usize]) -> Result<Self> {
        let mut deleted = generators.to_vec();
        deleted.sort_unstable();
        deleted.dedup();
        for &i in &deleted {
            space.check_generator(i)?;
        }
        Ok(QuotientMap {
            source_rank: space.acting_rank(),
            deleted,
        })
    }

    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    pub fn target_rank(&self) -> usize {
        self.source_rank - self.deleted.len()
    }

    pub fn deleted(&self) -> &[usize] {
        &self.deleted
    }

    pub fn target(&self, space: &DiscreteSpace) -> Result<DiscreteSpace> {
        if space.acting_rank() != self.source_rank {
            return Err(Error::QuotientMismatch);
        }
        let mut out = space.clone();
        for &i in self.deleted.iter().rev() {
            out = out.quotient_one_generator(i)?;
        }
        Ok(out)
    }

    /// `then . self`, where `then` starts at the target of `self`.
    pub fn then(&self, then: &QuotientMap) -> Result<QuotientMap> {
        if then.source_rank != self.target_rank() {
            return Err(Error::QuotientMismatch);
        }
        let surviving: Vec<usize> = (0..self.source_rank).filter(|i| !self.deleted.contains(i)).collect();
        let mut deleted = self.deleted.clone();
        deleted.extend(then.deleted.iter().map(|&j| surviving[j]));
        deleted.sort_unstable();
        Ok(QuotientMap {
            source_rank: self.source_rank,
            deleted,
        })
    }
}

impl SupportFamily {
    pub fn check(&self, space: &DiscreteSpace) -> Result<()> {
        if let SupportFamily::GeneratedBy(gens) = self {
            for g in gens {
                g.check(space)?;
            }
        }
        Ok(())
    }

    /// Orbit saturation `Phi . Z^d`.
    pub fn saturate(&self, space: &DiscreteSpace) -> SupportFamily {
        match self {
            SupportFamily::All => SupportFamily::All,
            SupportFamily::Finite | SupportFamily::Cocompact if space.acting_rank() == 0 => SupportFamily::Finite,
            SupportFamily::Finite | SupportFamily::Cocompact => SupportFamily::Cocompact,
            SupportFamily::GeneratedBy(gens) => {
                SupportFamily::GeneratedBy(gens.iter().map(ShapeDescriptor::saturated).collect()).normalized(space)
            }
        }
    }

    /// Push-forward along a quotient map: generated by coordinate-deleted images.
    pub fn pushforward(&self, space: &DiscreteSpace, map: &QuotientMap) -> Result<SupportFamily> {
        let target = map.target(space)?;
        self.check(space)?;
        Ok(match self {
            SupportFamily::All => SupportFamily::All,
            SupportFamily::Finite => SupportFamily::Finite,
            SupportFamily::Cocompact if target.acting_rank() == 0 => SupportFamily::Finite,
            SupportFamily::Cocompact => SupportFamily::Cocompact,
            SupportFamily::GeneratedBy(gens) => {
                SupportFamily::GeneratedBy(gens.iter().map(|g| g.delete_acting(map.deleted())).collect())
                    .normalized(&target)
            }
        })
    }

    /// Collapses a generated family that covers the whole space to `All`.
    fn normalized(self, space: &DiscreteSpace) -> SupportFamily {
        match &self {
            SupportFamily::GeneratedBy(gens) => {
                if self.contains(&ShapeDescriptor::everything(space)) {
                    SupportFamily::All
                } else {
                    SupportFamily::GeneratedBy(gens.iter().filter(|g| !g.is_empty()).cloned().collect())
                }
            }
            _ => self,
        }
    }

    /// Membership of a product shape.
    pub fn contains(&self, shape: &ShapeDescriptor) -> bool {
        if shape.is_empty() {
            return true;
        }
        match self {
            SupportFamily::All => true,
            SupportFamily::Finite => shape
                .lattice
                .iter()
                .chain(&shape.position)
                .all(CoordinateSet::is_finite),
            SupportFamily::Cocompact => shape.lattice.iter().all(CoordinateSet::is_finite),
            SupportFamily::GeneratedBy(gens) => shape.labels.iter().all(|&q| {
                lattice_choices(&shape.lattice)
                    .iter()
                    .all(|choice| gens.iter().any(|g| generator_covers(g, q, choice, &shape.position)))
            }),
        }
    }

    /// Acting-coordinate patterns available over the fibre `(label, lattice)`:
    /// a set `S` of a member is allowed to be unbounded exactly along some
    /// returned pattern.
    pub fn acting_patterns(&self, space: &DiscreteSpace, label: usize, lattice: &[i64]) -> Vec<BTreeSet<usize>> {
        match self {
            SupportFamily::Finite => vec![BTreeSet::new()],
            SupportFamily::All | SupportFamily::Cocompact => vec![(0..space.acting_rank()).collect()],
            SupportFamily::GeneratedBy(gens) => gens
                .iter()
                .filter(|g| {
                    !g.is_empty()
                        && g.labels.contains(&label)
                        && g.lattice.iter().zip(lattice).all(|(c, &u)| c.contains(u))
                })
                .map(ShapeDescriptor::acting_pattern)
                .collect(),
        }
    }

    /// `Phi`-properness: every member is `F`-proper.
    pub fn check_phi_proper(&self, space: &DiscreteSpace) -> Result<bool> {
        self.check(space)?;
        Ok(match self {
            SupportFamily::Finite => true,
            SupportFamily::All | SupportFamily::Cocompact => space.acting_rank() == 0,
            SupportFamily::GeneratedBy(gens) => {
                for g in gens {
                    if !check_f_proper(space, g)? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }

    /// Whether the family is stable under orbit saturation (it then contains
    /// invariant members, so it cannot be proper unless d = 0).
    pub fn is_saturated(&self, space: &DiscreteSpace) -> bool {
        match self {
            SupportFamily::All | SupportFamily::Cocompact => true,
            SupportFamily::Finite => space.acting_rank() == 0,
            SupportFamily::GeneratedBy(gens) => gens
                .iter()
                .all(|g| g.is_empty() || g.position.iter().all(|c| !c.is_finite())),
        }
    }
}

#[derive(Clone, Copy)]
enum LatticeChoice {
    Value(i64),
    Unbounded,
}

/// Splits the finite lattice coordinates of a shape into single values.
fn lattice_choices(lattice: &[CoordinateSet]) -> Vec<Vec<LatticeChoice>> {
    let mut out: Vec<Vec<LatticeChoice>> = vec![Vec::new()];
    for c in lattice {
        let mut next = Vec::new();
        for prefix in out {
            match c {
                CoordinateSet::All => {
                    let mut p = prefix;
                    p.push(LatticeChoice::Unbounded);
                    next.push(p);
                }
                CoordinateSet::Values(vals) => {
                    for &v in vals {
                        let mut p = prefix.clone();
                        p.push(LatticeChoice::Value(v));
                        next.push(p);
                    }
                }
            }
        }
        out = next;
    }
    out
}

/// Whether finitely many translates of `g` cover `{q} x choice x position`.
/// Unbounded coordinates need an unbounded generator coordinate (a finite
/// union of products cannot cover a full lattice otherwise); finite acting
/// coordinates only need a nonempty generator coordinate, since translates
/// reach every point.
fn generator_covers(g: &ShapeDescriptor, q: usize, choice: &[LatticeChoice], position: &[CoordinateSet]) -> bool {
    if g.is_empty() || !g.labels.contains(&q) {
        return false;
    }
    let lattice_ok = g.lattice.iter().zip(choice).all(|(c, ch)| match ch {
        LatticeChoice::Value(v) => c.contains(*v),
        LatticeChoice::Unbounded => !c.is_finite(),
    });
    let acting_ok = g
        .position
        .iter()
        .zip(position)
        .all(|(c, s)| s.is_finite() || !c.is_finite());
    lattice_ok && acting_ok
}
