//! Seeded randomized checks. Every case draws from one ChaCha stream, so the
//! summary is a function of the seed, the case count and the ring.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use zdcoh::sample::{
    random_cochain, random_finite_coboundary, random_finite_cochain, random_pl_coboundary, random_pl_non_coboundary,
    random_quotient_section, random_section_finite_along, random_top_cocycle_with_class, SampleShape,
};
use zdcoh::{
    compact_primitive, decide_top, full_support_primitive, lift_class, solve_primitive, staged_descent, top_class,
    verify_compact_identity, CoefficientRing, CompactSolution, DiscreteSpace, Resolution, Scalar, Sheaf, SupportFamily,
};

use crate::Outcome;

#[derive(Default)]
struct Tally {
    passed: usize,
    failed: usize,
}

fn record(tallies: &mut BTreeMap<&'static str, Tally>, name: &'static str, result: zdcoh::Result<bool>) {
    let t = tallies.entry(name).or_default();
    match result {
        Ok(true) => t.passed += 1,
        _ => t.failed += 1,
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn space_checks(rng: &mut ChaCha8Rng, sheaf: &Arc<Sheaf>, cases: usize, tallies: &mut BTreeMap<&'static str, Tally>) {
    let d = sheaf.acting_rank();
    let shape = SampleShape::default();
    for _ in 0..cases {
        for p in 1..d {
            record(
                tallies,
                "concentration",
                (|| {
                    let w = random_finite_coboundary(rng, sheaf, p, shape)?;
                    Ok(solve_primitive(&w, &SupportFamily::Finite)?.differential()? == w)
                })(),
            );
        }
        record(
            tallies,
            "top_class_kills_coboundaries",
            (|| {
                let eta = random_finite_cochain(rng, sheaf, d - 1, shape)?;
                Ok(top_class(&eta.differential()?)?.is_zero())
            })(),
        );
        record(
            tallies,
            "lift_roundtrip",
            (|| {
                let t = random_quotient_section(rng, sheaf, shape)?;
                Ok(top_class(&lift_class(sheaf, &t)?)? == t)
            })(),
        );
        record(
            tallies,
            "support_contrast",
            (|| {
                let w = random_top_cocycle_with_class(rng, sheaf, shape)?;
                let class = matches!(decide_top(&w, &SupportFamily::Finite)?, Resolution::Class(c) if !c.is_zero());
                Ok(class && full_support_primitive(&w)?.differential()? == w)
            })(),
        );
        record(
            tallies,
            "staging",
            (|| {
                let w = random_finite_cochain(rng, sheaf, d, shape)?;
                let expected = top_class(&w)?;
                for order in permutations(d) {
                    if staged_descent(&w, &order)? != expected {
                        return Ok(false);
                    }
                }
                Ok(true)
            })(),
        );
        if d >= 2 {
            record(
                tallies,
                "koszul_square",
                (|| {
                    let w = random_cochain(rng, sheaf, d - 2, shape)?;
                    Ok(w.differential()?.differential()?.is_zero())
                })(),
            );
        }
        record(
            tallies,
            "telescoping",
            (|| {
                let i = d - 1;
                let s = random_section_finite_along(rng, sheaf, i, shape)?;
                Ok(s.ray_primitive(i)?.sigma_minus_one(i)? == s)
            })(),
        );
    }
}

fn flow_checks(rng: &mut ChaCha8Rng, cases: usize, tallies: &mut BTreeMap<&'static str, Tally>) {
    for k in 0..cases {
        let s = Scalar::new((1 + (k % 3) as i64).into(), (1 + (k % 2) as i64).into());
        record(
            tallies,
            "flow_coboundary",
            (|| {
                let (f, _) = random_pl_coboundary(rng, &s, 4, 3)?;
                Ok(match compact_primitive(&f, &s)? {
                    CompactSolution::Primitive(g) => verify_compact_identity(&f, &s, &g)?,
                    CompactSolution::Obstruction(_) => false,
                })
            })(),
        );
        record(
            tallies,
            "flow_obstruction",
            (|| {
                let f = random_pl_non_coboundary(rng, &s, 4, 3)?;
                Ok(matches!(compact_primitive(&f, &s)?, CompactSolution::Obstruction(p) if !p.is_zero()))
            })(),
        );
    }
}

pub fn run(seed: u64, cases: usize, ring: CoefficientRing) -> Outcome<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tallies = BTreeMap::new();
    for d in 1..=3 {
        let sheaf = Sheaf::functions(DiscreteSpace::with_labels(d, 1, 2, ring));
        space_checks(&mut rng, &sheaf, cases, &mut tallies);
    }
    flow_checks(&mut rng, cases, &mut tallies);
    let failures: usize = tallies.values().map(|t| t.failed).sum();
    let checks: serde_json::Map<String, Value> = tallies
        .iter()
        .map(|(k, t)| (k.to_string(), json!({ "passed": t.passed, "failed": t.failed })))
        .collect();
    Ok(json!({
        "seed": seed,
        "cases": cases,
        "ring": ring.to_string(),
        "checks": checks,
        "failures": failures,
    }))
}
