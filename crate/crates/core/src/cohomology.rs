//! Constructive cohomology of `Z^d` with coefficients in `Gamma_Phi(F)`.
//!
//! For finitely supported cocycles the solver descends one generator at a
//! time: with `j` the last generator, a cochain splits as `w = a + b ^ e_j`,
//! the orbit sum along `j` turns `b` into a cocycle on `X / Z e_j`, a
//! primitive found there is lifted to the slice `x_j = 0`, and what remains is
//! killed by the ray primitive along `j`.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::koszul::{subsets, Cochain, Subset};
use crate::sections::{Section, Sheaf};
use crate::space::{DiscreteSpace, GroupVector, Point};
use crate::supports::{CoordinateSet, QuotientMap, ShapeDescriptor, SupportFamily};

/// Result of deciding whether a finite cocycle bounds a finite cochain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution {
    /// A finitely supported primitive.
    Primitive(Cochain),
    /// The cocycle is not a coboundary; its class on the full quotient.
    Class(Section),
}

enum Descent {
    /// `None` when the cocycle has degree 0 and vanishes.
    Bounds(Option<Cochain>),
    Class(Section),
}

fn require_finite(omega: &Cochain) -> Result<()> {
    for (_, s) in omega.components() {
        if let Some(i) = (0..omega.acting_rank()).find(|&i| !s.finite_along(i)) {
            return Err(Error::InfiniteSupport { generator: i });
        }
    }
    Ok(())
}

fn require_cocycle(omega: &Cochain) -> Result<()> {
    if omega.is_cocycle()? {
        Ok(())
    } else {
        Err(Error::NotCocycle)
    }
}

/// Applies `f` to every component, keeping index sets.
fn map_components(
    omega: &Cochain,
    sheaf: &Arc<Sheaf>,
    degree: usize,
    mut f: impl FnMut(&Subset, &Section) -> Result<(Subset, Section)>,
) -> Result<Cochain> {
    let mut out = Cochain::zero(sheaf, degree)?;
    for (t, s) in omega.components() {
        let (t, s) = f(t, s)?;
        out.set(t, s)?;
    }
    Ok(out)
}

fn signed(s: Section, negative: bool) -> Section {
    if negative {
        -&s
    } else {
        s
    }
}

fn descend(omega: &Cochain) -> Result<Descent> {
    let d = omega.acting_rank();
    let p = omega.degree();
    if d == 0 {
        let top = omega.component(&[]);
        return Ok(if top.is_zero() {
            Descent::Bounds(None)
        } else {
            Descent::Class(top)
        });
    }
    if p == 0 {
        return if omega.is_zero() {
            Ok(Descent::Bounds(None))
        } else {
            Err(Error::NotCocycle)
        };
    }
    let sheaf = omega.sheaf();
    let j = d - 1;
    let quotient = sheaf.quotient_one_generator(j)?;

    // b-part: components containing j, with j removed.
    let beta: Vec<(Subset, Section)> = omega
        .components()
        .filter(|(t, _)| t.last() == Some(&j))
        .map(|(t, s)| (t[..t.len() - 1].to_vec(), s.clone()))
        .collect();
    let mut beta_bar = Cochain::zero(&quotient, p - 1)?;
    for (t, s) in &beta {
        beta_bar.set(t.clone(), s.orbit_sum(j)?)?;
    }

    let zeta = match descend(&beta_bar)? {
        Descent::Class(c) => return Ok(Descent::Class(c)),
        Descent::Bounds(None) => None,
        Descent::Bounds(Some(xi)) => Some(map_components(&xi, sheaf, p - 2, |t, s| {
            Ok((t.clone(), s.lift_from_quotient(sheaf, j)?))
        })?),
    };

    let d_zeta = match &zeta {
        Some(z) => Some(z.differential()?),
        None => None,
    };
    let mut eta = Cochain::zero(sheaf, p - 1)?;
    for t in subsets(j, p - 1) {
        let mut r = omega.component(&[t.as_slice(), &[j]].concat());
        if let Some(dz) = &d_zeta {
            r = r.checked_sub(&dz.component(&t))?;
        }
        if r.is_zero() {
            continue;
        }
        eta.set(t, signed(r.ray_primitive(j)?, (p - 1) % 2 == 1))?;
    }
    if let Some(z) = zeta {
        for (t, s) in z.components() {
            let mut t = t.clone();
            t.push(j);
            eta.set(t, s.clone())?;
        }
    }
    Ok(Descent::Bounds(Some(eta)))
}

/// Finite primitive of a finite cocycle of degree `1 <= p <= d` when one exists.
pub fn resolve(omega: &Cochain) -> Result<Resolution> {
    let d = omega.acting_rank();
    let p = omega.degree();
    if p == 0 {
        return Err(Error::DegreeOutOfRange { degree: p, rank: d });
    }
    require_finite(omega)?;
    require_cocycle(omega)?;
    Ok(match descend(omega)? {
        Descent::Bounds(eta) => Resolution::Primitive(match eta {
            Some(eta) => eta,
            None => Cochain::zero(omega.sheaf(), p - 1)?,
        }),
        Descent::Class(c) => Resolution::Class(c),
    })
}

fn check_member(omega: &Cochain, family: &SupportFamily) -> Result<()> {
    let space = omega.sheaf().space();
    if !family.check_phi_proper(space)? {
        return Err(Error::HypothesesFail(
            "the support family is not proper for the action".into(),
        ));
    }
    if !omega.in_family(family) {
        return Err(Error::Unrepresentable("cochain support is outside the family".into()));
    }
    Ok(())
}

/// A primitive of a cocycle of degree `1 <= p < d` with supports in a proper
/// family. The primitive is finitely supported and lies in the same family.
pub fn solve_primitive(omega: &Cochain, family: &SupportFamily) -> Result<Cochain> {
    let d = omega.acting_rank();
    if omega.degree() == 0 || omega.degree() >= d {
        return Err(Error::DegreeOutOfRange {
            degree: omega.degree(),
            rank: d,
        });
    }
    check_member(omega, family)?;
    match resolve(omega)? {
        Resolution::Primitive(eta) => Ok(eta),
        Resolution::Class(_) => unreachable!("cohomology vanishes below the top degree"),
    }
}

fn require_top(omega: &Cochain) -> Result<Section> {
    let d = omega.acting_rank();
    if omega.degree() != d {
        return Err(Error::DegreeOutOfRange {
            degree: omega.degree(),
            rank: d,
        });
    }
    require_finite(omega)?;
    Ok(omega.component(&(0..d).collect::<Vec<_>>()))
}

/// The class of a top-degree cochain: its iterated orbit sum on the full quotient.
pub fn top_class(omega: &Cochain) -> Result<Section> {
    let d = omega.acting_rank();
    staged_descent(omega, &(0..d).rev().collect::<Vec<_>>())
}

/// Orbit sums one generator at a time in the given order (0-based).
pub fn staged_descent(omega: &Cochain, order: &[usize]) -> Result<Section> {
    let d = omega.acting_rank();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..d).collect::<Vec<_>>() {
        return Err(Error::MalformedDescriptor(format!(
            "{order:?} is not an order of the generators"
        )));
    }
    let mut s = require_top(omega)?;
    let mut remaining: Vec<usize> = (0..d).collect();
    for &g in order {
        let axis = remaining.iter().position(|&x| x == g).expect("order is a permutation");
        s = s.orbit_sum(axis)?;
        remaining.remove(axis);
    }
    Ok(s)
}

/// Decides a top-degree cocycle in the given family: a finite primitive or
/// the nonzero class.
pub fn decide_top(omega: &Cochain, family: &SupportFamily) -> Result<Resolution> {
    require_top(omega)?;
    check_member(omega, family)?;
    resolve(omega)
}

/// The invariant partition of unity `phi_g = 1_{D + g}` for the fundamental
/// domain `D = Q x Z^m x {0}^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionOfUnity {
    space: DiscreteSpace,
    domain: ShapeDescriptor,
}

pub fn build_partition(space: &DiscreteSpace) -> PartitionOfUnity {
    let domain = ShapeDescriptor {
        labels: (0..space.label_count()).collect(),
        lattice: vec![CoordinateSet::All; space.lattice_rank()],
        position: vec![CoordinateSet::values([0]); space.acting_rank()],
    };
    PartitionOfUnity {
        space: space.clone(),
        domain,
    }
}

impl PartitionOfUnity {
    pub fn domain(&self) -> &ShapeDescriptor {
        &self.domain
    }

    /// `phi_g(p)`, either 0 or 1.
    pub fn weight(&self, g: &GroupVector, p: &Point) -> Result<u8> {
        self.space.check_point(p)?;
        if g.rank() != self.space.acting_rank() {
            return Err(Error::RankMismatch {
                expected: self.space.acting_rank(),
                found: g.rank(),
            });
        }
        Ok(u8::from(p.position == g.0))
    }

    /// The unique `g` with `phi_g(p) = 1`.
    pub fn chart(&self, p: &Point) -> GroupVector {
        GroupVector(p.position.clone())
    }

    /// `phi_0 * pi^* t` for a section `t` of the full quotient.
    pub fn localize(&self, sheaf: &Arc<Sheaf>, t: &Section) -> Result<Section> {
        if sheaf.space() != &self.space || !t.sheaf().as_ref().eq(sheaf.full_quotient().as_ref()) {
            return Err(Error::QuotientMismatch);
        }
        let d = self.space.acting_rank();
        let terms: Vec<_> = t
            .canonical_terms()
            .into_iter()
            .map(|term| {
                crate::sections::ElementaryTerm::new(
                    Point::new(term.anchor.label, term.anchor.lattice, vec![0; d]),
                    BTreeSet::new(),
                    term.value,
                )
            })
            .collect();
        Section::from_terms(sheaf, &terms)
    }
}

/// A top-degree cocycle whose class is `t`.
pub fn lift_class(sheaf: &Arc<Sheaf>, t: &Section) -> Result<Cochain> {
    let d = sheaf.acting_rank();
    let s = build_partition(sheaf.space()).localize(sheaf, t)?;
    Cochain::from_components(sheaf, d, [((0..d).collect(), s)])
}

/// A primitive of a finite cocycle of degree `p >= 1` allowed to have full
/// (ray) support: `eta_T = (-1)^{p-1} R_j w_{T + j}` for the last generator `j`.
pub fn full_support_primitive(omega: &Cochain) -> Result<Cochain> {
    let d = omega.acting_rank();
    let p = omega.degree();
    if p == 0 || p > d {
        return Err(Error::DegreeOutOfRange { degree: p, rank: d });
    }
    require_finite(omega)?;
    require_cocycle(omega)?;
    let j = d - 1;
    let mut eta = Cochain::zero(omega.sheaf(), p - 1)?;
    for (t, s) in omega.components() {
        if t.last() == Some(&j) {
            let r = s.ray_primitive(j)?;
            eta.set(t[..t.len() - 1].to_vec(), signed(r, (p - 1) % 2 == 1))?;
        }
    }
    Ok(eta)
}

/// Per-degree verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegreeVerdict {
    Zero,
    /// Sections on the quotient space with supports in the pushed-forward family.
    Quotient {
        space: DiscreteSpace,
        family: SupportFamily,
    },
    /// Invariant sections, i.e. sections on the quotient (non-proper, saturated families).
    Invariants {
        space: DiscreteSpace,
        family: SupportFamily,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportMode {
    /// Proper family: cohomology concentrated in the top degree.
    Concentrated,
    /// Orbit-saturated family: acyclic in positive degrees.
    Acyclic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessOutcome {
    Primitive(Cochain),
    Class(Section),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub cocycle: Cochain,
    pub outcome: WitnessOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyReport {
    pub mode: ReportMode,
    pub family: SupportFamily,
    pub degrees: Vec<DegreeVerdict>,
    pub witnesses: Vec<Witness>,
}

/// The point used by default probes: a point of the first generator when
/// the family is generated, otherwise the origin of the first label.
fn probe_point(space: &DiscreteSpace, family: &SupportFamily) -> Point {
    let first = |c: &CoordinateSet| match c {
        CoordinateSet::All => 0,
        CoordinateSet::Values(v) => *v.iter().next().expect("nonempty coordinate set"),
    };
    match family {
        SupportFamily::GeneratedBy(gens) => match gens.iter().find(|g| !g.is_empty()) {
            Some(g) => Point::new(
                *g.labels.iter().next().expect("nonempty labels"),
                g.lattice.iter().map(first).collect(),
                g.position.iter().map(first).collect(),
            ),
            None => Point::new(0, vec![0; space.lattice_rank()], vec![0; space.acting_rank()]),
        },
        _ => Point::new(0, vec![0; space.lattice_rank()], vec![0; space.acting_rank()]),
    }
}

/// One probe per positive degree: the coboundary of a point mass below the
/// top and a point mass in the top degree. Empty when the family is empty.
pub fn default_probes(sheaf: &Arc<Sheaf>, family: &SupportFamily) -> Result<Vec<Cochain>> {
    let space = sheaf.space();
    let d = space.acting_rank();
    if matches!(family, SupportFamily::GeneratedBy(g) if g.iter().all(ShapeDescriptor::is_empty)) {
        return Ok(Vec::new());
    }
    let delta = Section::delta(sheaf, probe_point(space, family))?;
    let mut probes = Vec::new();
    for p in 1..=d {
        let c = Cochain::from_components(sheaf, p - 1, [((0..p - 1).collect(), delta.clone())])?;
        probes.push(if p < d {
            c.differential()?
        } else {
            Cochain::from_components(sheaf, d, [((0..d).collect(), delta.clone())])?
        });
    }
    Ok(probes)
}

/// The cohomology of `Z^d` with coefficients in `Gamma_Phi(F)`, with a
/// constructive witness for every probe cocycle.
pub fn cohomology_report(sheaf: &Arc<Sheaf>, family: &SupportFamily, probes: &[Cochain]) -> Result<CohomologyReport> {
    let space = sheaf.space();
    let d = space.acting_rank();
    family.check(space)?;
    let quotient = space.full_quotient();
    let pushed = family.pushforward(space, &QuotientMap::full(space))?;
    let mode = if family.check_phi_proper(space)? {
        ReportMode::Concentrated
    } else if family.is_saturated(space) {
        ReportMode::Acyclic
    } else {
        return Err(Error::HypothesesFail(
            "the support family is neither proper nor orbit-saturated; concentration does not apply".into(),
        ));
    };
    let degrees = (0..=d)
        .map(|p| match mode {
            ReportMode::Concentrated if p == d => DegreeVerdict::Quotient {
                space: quotient.clone(),
                family: pushed.clone(),
            },
            ReportMode::Acyclic if p == 0 => DegreeVerdict::Invariants {
                space: quotient.clone(),
                family: pushed.clone(),
            },
            _ => DegreeVerdict::Zero,
        })
        .collect();
    let mut witnesses = Vec::with_capacity(probes.len());
    for omega in probes {
        if omega.sheaf() != sheaf {
            return Err(Error::SpaceMismatch);
        }
        if !omega.in_family(family) {
            return Err(Error::Unrepresentable("probe support is outside the family".into()));
        }
        let outcome = match mode {
            ReportMode::Concentrated => match resolve(omega)? {
                Resolution::Primitive(eta) => WitnessOutcome::Primitive(eta),
                Resolution::Class(c) => WitnessOutcome::Class(c),
            },
            ReportMode::Acyclic => WitnessOutcome::Primitive(full_support_primitive(omega)?),
        };
        witnesses.push(Witness {
            cocycle: omega.clone(),
            outcome,
        });
    }
    Ok(CohomologyReport {
        mode,
        family: family.clone(),
        degrees,
        witnesses,
    })
}
