//! Seeded random inputs for property suites and the CLI suite runner.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::Result;
use crate::flows::PiecewiseLinearFn;
use crate::koszul::{subsets, Cochain};
use crate::ring::{CoefficientRing, Scalar};
use crate::sections::{ElementaryTerm, Section, Sheaf};
use crate::space::{DiscreteSpace, FiniteWindow, Point};
use crate::supports::{CoordinateSet, ShapeDescriptor};

/// Sizes for random sections.
#[derive(Debug, Clone, Copy)]
pub struct SampleShape {
    /// Maximal number of elementary terms.
    pub terms: usize,
    /// Coordinates are drawn from `-radius..=radius`.
    pub radius: i64,
    /// Values are drawn from `-magnitude..=magnitude`.
    pub magnitude: i64,
}

impl Default for SampleShape {
    fn default() -> Self {
        SampleShape {
            terms: 3,
            radius: 2,
            magnitude: 3,
        }
    }
}

pub fn random_point<R: Rng>(rng: &mut R, space: &DiscreteSpace, radius: i64) -> Point {
    let mut coord = |n: usize| (0..n).map(|_| rng.random_range(-radius..=radius)).collect::<Vec<_>>();
    let lattice = coord(space.lattice_rank());
    let position = coord(space.acting_rank());
    Point::new(rng.random_range(0..space.label_count()), lattice, position)
}

/// A nonzero element of the coefficient ring (within the magnitude bound).
pub fn random_unit_scalar<R: Rng>(rng: &mut R, ring: CoefficientRing, magnitude: i64) -> Scalar {
    loop {
        let v = match ring {
            CoefficientRing::Rationals if rng.random_bool(0.3) => Scalar::new(
                rng.random_range(-magnitude..=magnitude).into(),
                rng.random_range(1..=3i64).into(),
            ),
            _ => ring.from_i64(rng.random_range(-magnitude..=magnitude)),
        };
        let v = ring.reduce(v);
        if v != Scalar::from_integer(0.into()) {
            return v;
        }
    }
}

fn random_value<R: Rng>(rng: &mut R, ring: CoefficientRing, rank: usize, magnitude: i64) -> Vec<Scalar> {
    (0..rank).map(|_| random_unit_scalar(rng, ring, magnitude)).collect()
}

/// A finitely supported section built from point masses.
pub fn random_finite_section<R: Rng>(rng: &mut R, sheaf: &Arc<Sheaf>, shape: SampleShape) -> Result<Section> {
    let n = rng.random_range(1..=shape.terms.max(1));
    let terms: Vec<ElementaryTerm> = (0..n)
        .map(|_| {
            let p = random_point(rng, sheaf.space(), shape.radius);
            let value = random_value(rng, sheaf.ring(), sheaf.stalks().rank(p.label), shape.magnitude);
            ElementaryTerm::new(p, BTreeSet::new(), value)
        })
        .collect();
    Section::from_terms(sheaf, &terms)
}

/// A nonzero finitely supported section.
pub fn random_nonzero_finite_section<R: Rng>(rng: &mut R, sheaf: &Arc<Sheaf>, shape: SampleShape) -> Result<Section> {
    loop {
        let s = random_finite_section(rng, sheaf, shape)?;
        if !s.is_zero() {
            return Ok(s);
        }
    }
}

/// A section mixing point masses and rays in random directions.
pub fn random_section<R: Rng>(rng: &mut R, sheaf: &Arc<Sheaf>, shape: SampleShape) -> Result<Section> {
    let d = sheaf.acting_rank();
    let n = rng.random_range(1..=shape.terms.max(1));
    let terms: Vec<ElementaryTerm> = (0..n)
        .map(|_| {
            let p = random_point(rng, sheaf.space(), shape.radius);
            let rays = (0..d).filter(|_| rng.random_bool(0.4)).collect();
            let value = random_value(rng, sheaf.ring(), sheaf.stalks().rank(p.label), shape.magnitude);
            ElementaryTerm::new(p, rays, value)
        })
        .collect();
    Section::from_terms(sheaf, &terms)
}

/// A section finite along acting direction `i`: point masses plus rays in
/// the other directions.
pub fn random_section_finite_along<R: Rng>(
    rng: &mut R,
    sheaf: &Arc<Sheaf>,
    i: usize,
    shape: SampleShape,
) -> Result<Section> {
    let d = sheaf.acting_rank();
    let n = rng.random_range(1..=shape.terms.max(1));
    let terms: Vec<ElementaryTerm> = (0..n)
        .map(|_| {
            let p = random_point(rng, sheaf.space(), shape.radius);
            let rays = (0..d).filter(|&k| k != i && rng.random_bool(0.4)).collect();
            let value = random_value(rng, sheaf.ring(), sheaf.stalks().rank(p.label), shape.magnitude);
            ElementaryTerm::new(p, rays, value)
        })
        .collect();
    Section::from_terms(sheaf, &terms)
}

fn random_cochain_with<R: Rng>(
    rng: &mut R,
    sheaf: &Arc<Sheaf>,
    degree: usize,
    mut section: impl FnMut(&mut R) -> Result<Section>,
) -> Result<Cochain> {
    let mut c = Cochain::zero(sheaf, degree)?;
    for t in subsets(sheaf.acting_rank(), degree) {
        if rng.random_bool(0.7) {
            c.set(t, section(rng)?)?;
        }
    }
    Ok(c)
}

pub fn random_finite_cochain<R: Rng>(
    rng: &mut R,
    sheaf: &Arc<Sheaf>,
    degree: usize,
    shape: SampleShape,
) -> Result<Cochain> {
    random_cochain_with(rng, sheaf, degree, |rng| random_finite_section(rng, sheaf, shape))
}

pub fn random_cochain<R: Rng>(rng: &mut R, sheaf: &Arc<Sheaf>, degree: usize, shape: SampleShape) -> Result<Cochain> {
    random_cochain_with(rng, sheaf, degree, |rng| random_section(rng, sheaf, shape))
}

/// `d eta` for a random finite `eta` of degree `p - 1`; nonzero when possible.
pub fn random_finite_coboundary<R: Rng>(
    rng: &mut R,
    sheaf: &Arc<Sheaf>,
    p: usize,
    shape: SampleShape,
) -> Result<Cochain> {
    for _ in 0..16 {
        let c = random_finite_cochain(rng, sheaf, p - 1, shape)?.differential()?;
        if !c.is_zero() {
            return Ok(c);
        }
    }
    random_finite_cochain(rng, sheaf, p - 1, shape)?.differential()
}

/// A top-degree finite cochain with nonzero class.
pub fn random_top_cocycle_with_class<R: Rng>(rng: &mut R, sheaf: &Arc<Sheaf>, shape: SampleShape) -> Result<Cochain> {
    let d = sheaf.acting_rank();
    loop {
        let s = random_nonzero_finite_section(rng, sheaf, shape)?;
        let c = Cochain::from_components(sheaf, d, [((0..d).collect(), s)])?;
        if !crate::cohomology::top_class(&c)?.is_zero() {
            return Ok(c);
        }
    }
}

/// A random finitely supported section of the full quotient.
pub fn random_quotient_section<R: Rng>(rng: &mut R, sheaf: &Arc<Sheaf>, shape: SampleShape) -> Result<Section> {
    random_finite_section(rng, &sheaf.full_quotient(), shape)
}

fn random_coordinate_set<R: Rng>(rng: &mut R, radius: i64) -> CoordinateSet {
    if rng.random_bool(0.35) {
        CoordinateSet::All
    } else {
        let n = rng.random_range(0..=2);
        CoordinateSet::values((0..n).map(|_| rng.random_range(-radius..=radius)))
    }
}

pub fn random_shape<R: Rng>(rng: &mut R, space: &DiscreteSpace, radius: i64) -> ShapeDescriptor {
    let labels: Vec<usize> = (0..space.label_count()).filter(|_| rng.random_bool(0.6)).collect();
    let labels = if labels.is_empty() {
        vec![*(0..space.label_count())
            .collect::<Vec<_>>()
            .choose(rng)
            .expect("labels exist")]
    } else {
        labels
    };
    ShapeDescriptor::new(
        labels,
        (0..space.lattice_rank())
            .map(|_| random_coordinate_set(rng, radius))
            .collect(),
        (0..space.acting_rank())
            .map(|_| random_coordinate_set(rng, radius))
            .collect(),
    )
}

pub fn random_window<R: Rng>(rng: &mut R, space: &DiscreteSpace, radius: i64) -> FiniteWindow {
    let mut interval = || {
        let a = rng.random_range(-radius..=radius);
        let b = rng.random_range(-radius..=radius);
        (a.min(b), a.max(b))
    };
    let lattice = (0..space.lattice_rank()).map(|_| interval()).collect();
    let position = (0..space.acting_rank()).map(|_| interval()).collect();
    let labels = (0..space.label_count())
        .filter(|_| rng.random_bool(0.7))
        .collect::<BTreeSet<_>>();
    let labels = if labels.is_empty() { [0].into() } else { labels };
    FiniteWindow::new(labels, lattice, position)
}

fn small_rational<R: Rng>(rng: &mut R, magnitude: i64) -> Scalar {
    Scalar::new(
        rng.random_range(-magnitude..=magnitude).into(),
        rng.random_range(1..=4i64).into(),
    )
}

/// A random compactly supported piecewise-linear function.
pub fn random_pl<R: Rng>(rng: &mut R, max_pieces: usize, span: i64) -> Result<PiecewiseLinearFn> {
    let n = rng.random_range(1..=max_pieces.max(1));
    let mut xs: Vec<Scalar> = (0..n + 2)
        .map(|_| Scalar::new(rng.random_range(-4 * span..=4 * span).into(), 4.into()))
        .collect();
    xs.sort();
    xs.dedup();
    let k = xs.len();
    let values = (0..k)
        .map(|j| {
            if j == 0 || j + 1 == k {
                Scalar::from_integer(0.into())
            } else {
                small_rational(rng, 3)
            }
        })
        .collect();
    PiecewiseLinearFn::new(xs, values)
}

/// `g(. + s) - g` for a random compactly supported `g`.
pub fn random_pl_coboundary<R: Rng>(
    rng: &mut R,
    s: &Scalar,
    max_pieces: usize,
    span: i64,
) -> Result<(PiecewiseLinearFn, PiecewiseLinearFn)> {
    let g = random_pl(rng, max_pieces, span)?;
    Ok((g.translate(&-s).sub(&g), g))
}

/// A coboundary plus a nonzero multiple of a bump narrower than `s`, whose
/// periodization is therefore nonzero.
pub fn random_pl_non_coboundary<R: Rng>(
    rng: &mut R,
    s: &Scalar,
    max_pieces: usize,
    span: i64,
) -> Result<PiecewiseLinearFn> {
    let (f, _) = random_pl_coboundary(rng, s, max_pieces, span)?;
    let left = Scalar::from_integer(rng.random_range(-span..=span).into());
    let right = &left + s / Scalar::from_integer(2.into());
    let mut c = small_rational(rng, 3);
    while c == Scalar::from_integer(0.into()) {
        c = small_rational(rng, 3);
    }
    Ok(f.add(&PiecewiseLinearFn::hat(left, right, c)?))
}
