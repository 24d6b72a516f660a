//! Witness re-verification. Only evaluation, the Koszul differential and
//! orbit sums are used here; none of the solvers is consulted.

use std::sync::Arc;

use serde_json::{json, Map, Value};
use zdcoh::io::{
    cochain_from_json, family_from_json, flow_from_json, pl_from_json, profile_from_json, section_from_json,
    sheaf_from_json, witness_from_json,
};
use zdcoh::ring::parse_rational;
use zdcoh::{
    periodization, verify_compact_identity, verify_flow_identity, Cochain, CoefficientRing, Section, Sheaf,
    StalkProfile, SupportFamily, WitnessOutcome,
};

use crate::{Failure, Outcome};

fn field(obj: &Map<String, Value>, key: &str) -> Outcome<Value> {
    obj.get(key)
        .cloned()
        .ok_or_else(|| Failure::Parse(format!("missing field {key:?}")))
}

fn reject(what: &str) -> Failure {
    Failure::Rejected(format!("witness rejected: {what}"))
}

fn sheaf_of(obj: &Map<String, Value>, ring: Option<CoefficientRing>) -> Outcome<Arc<Sheaf>> {
    let sheaf = sheaf_from_json(field(obj, "space")?)?;
    Ok(match ring {
        Some(r) => Sheaf::new(
            sheaf.space().with_ring(r)?,
            StalkProfile::new(sheaf.stalks().ranks().to_vec())?,
        )?,
        None => sheaf,
    })
}

fn check_primitive(cocycle: &Cochain, primitive: &Cochain) -> Outcome<()> {
    if primitive.degree() + 1 != cocycle.degree() {
        return Err(reject("primitive has the wrong degree"));
    }
    if primitive.differential()? != *cocycle {
        return Err(reject("the differential of the primitive differs from the cocycle"));
    }
    Ok(())
}

/// Orbit sums over the last remaining generator until none is left.
fn iterated_orbit_sum(top: &Section) -> Outcome<Section> {
    let mut s = top.clone();
    while s.sheaf().acting_rank() > 0 {
        let last = s.sheaf().acting_rank() - 1;
        s = s.orbit_sum(last)?;
    }
    Ok(s)
}

fn check_class(cocycle: &Cochain, class: &Section) -> Outcome<()> {
    let d = cocycle.acting_rank();
    if cocycle.degree() != d {
        return Err(reject("a class witness needs a top-degree cocycle"));
    }
    if class.is_zero() {
        return Err(reject("the class is zero"));
    }
    let top = cocycle.component(&(0..d).collect::<Vec<_>>());
    if iterated_orbit_sum(&top)? != *class {
        return Err(reject("the class is not the orbit sum of the cocycle"));
    }
    Ok(())
}

fn check_family(obj: &Map<String, Value>, sheaf: &Arc<Sheaf>, chains: &[&Cochain]) -> Outcome<()> {
    let family = match obj.get("family") {
        Some(f) => family_from_json(f.clone(), sheaf.space())?,
        None => SupportFamily::Finite,
    };
    if chains.iter().any(|c| !c.in_family(&family)) {
        return Err(reject("a cochain leaves the support family"));
    }
    Ok(())
}

fn verify_cochain_witness(obj: &Map<String, Value>, ring: Option<CoefficientRing>) -> Outcome<usize> {
    let sheaf = sheaf_of(obj, ring)?;
    let cocycle = cochain_from_json(field(obj, "cocycle")?, &sheaf)?;
    if !cocycle.is_cocycle()? {
        return Err(reject("the cocycle is not closed"));
    }
    let full = obj.get("mode").and_then(Value::as_str) == Some("full");
    match obj.get("kind").and_then(Value::as_str) {
        Some("primitive") => {
            let primitive = cochain_from_json(field(obj, "primitive")?, &sheaf)?;
            check_primitive(&cocycle, &primitive)?;
            if !full {
                check_family(obj, &sheaf, &[&cocycle, &primitive])?;
            }
        }
        Some("class") => {
            let class = section_from_json(field(obj, "class")?, &sheaf.full_quotient())?;
            check_class(&cocycle, &class)?;
            check_family(obj, &sheaf, &[&cocycle])?;
        }
        _ => return Err(Failure::Parse("unknown witness kind".into())),
    }
    Ok(1)
}

fn verify_report(obj: &Map<String, Value>, ring: Option<CoefficientRing>) -> Outcome<usize> {
    let sheaf = sheaf_of(obj, ring)?;
    let acyclic = obj.get("mode").and_then(Value::as_str) == Some("acyclic");
    let Some(Value::Array(witnesses)) = obj.get("witnesses") else {
        return Err(Failure::Parse("report lacks a witness list".into()));
    };
    for w in witnesses {
        let w = witness_from_json(w.clone(), &sheaf)?;
        if !w.cocycle.is_cocycle()? {
            return Err(reject("a probe is not closed"));
        }
        match &w.outcome {
            WitnessOutcome::Primitive(eta) => {
                check_primitive(&w.cocycle, eta)?;
                if !acyclic {
                    check_family(obj, &sheaf, &[&w.cocycle, eta])?;
                }
            }
            WitnessOutcome::Class(c) => check_class(&w.cocycle, c)?,
        }
    }
    Ok(witnesses.len())
}

fn verify_flow(obj: &Map<String, Value>, kind: &str) -> Outcome<usize> {
    let f = pl_from_json(field(obj, "f")?)?;
    let s = parse_rational(
        field(obj, "s")?
            .as_str()
            .ok_or_else(|| Failure::Parse("s must be a string".into()))?,
    )?;
    let ok = match kind {
        "flow" => verify_flow_identity(&f, &s, &flow_from_json(field(obj, "primitive")?)?)?,
        "flow_compact" => verify_compact_identity(&f, &s, &pl_from_json(field(obj, "primitive")?)?)?,
        _ => {
            let profile = profile_from_json(field(obj, "profile")?)?;
            !profile.is_zero() && profile == periodization(&f, &s)?
        }
    };
    if ok {
        Ok(1)
    } else {
        Err(reject("the flow identity does not hold"))
    }
}

pub fn verify_file(v: &Value, ring: Option<CoefficientRing>) -> Outcome<Value> {
    let Value::Object(obj) = v else {
        return Err(Failure::Parse("expected a JSON object".into()));
    };
    let checked = if obj.contains_key("degrees") {
        verify_report(obj, ring)?
    } else {
        match obj.get("kind").and_then(Value::as_str) {
            Some(k @ ("flow" | "flow_compact" | "flow_obstruction")) => verify_flow(obj, k)?,
            Some(_) => verify_cochain_witness(obj, ring)?,
            None => return Err(Failure::Parse("unrecognized witness file".into())),
        }
    };
    Ok(json!({ "verified": true, "checked": checked }))
}
