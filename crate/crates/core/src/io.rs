//! JSON file formats. Generator indices are 1-based on disk; labels are
//! referred to by name; scalars are strings `"p"` or `"p/q"`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cohomology::{CohomologyReport, DegreeVerdict, ReportMode, Witness, WitnessOutcome};
use crate::error::{Error, Result};
use crate::flows::{EventuallyPeriodicFn, PeriodicProfile, PiecewiseLinearFn};
use crate::koszul::Cochain;
use crate::ring::{format_scalar, parse_rational, CoefficientRing, Scalar};
use crate::sections::{ElementaryTerm, Section, Sheaf, StalkProfile};
use crate::space::{DiscreteSpace, Point};
use crate::supports::{CoordinateSet, ShapeDescriptor, SupportFamily};

fn from_value<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceFile {
    d: usize,
    #[serde(default)]
    m: usize,
    labels: Vec<String>,
    #[serde(default = "default_ring")]
    ring: CoefficientRing,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    ranks: BTreeMap<String, usize>,
}

fn default_ring() -> CoefficientRing {
    CoefficientRing::Integers
}

pub fn sheaf_from_json(v: Value) -> Result<Arc<Sheaf>> {
    let f: SpaceFile = from_value(v, "space")?;
    let space = DiscreteSpace::new(f.d, f.m, f.labels, f.ring)?;
    let mut ranks = vec![1; space.label_count()];
    for (name, r) in f.ranks {
        ranks[space.label_index(&name)?] = r;
    }
    Sheaf::new(space, StalkProfile::new(ranks)?)
}

pub fn sheaf_to_json(sheaf: &Sheaf) -> Value {
    let space = sheaf.space();
    let ranks = space
        .labels()
        .iter()
        .zip(sheaf.stalks().ranks())
        .filter(|(_, &r)| r != 1)
        .map(|(l, &r)| (l.clone(), r))
        .collect();
    serde_json::to_value(SpaceFile {
        d: space.acting_rank(),
        m: space.lattice_rank(),
        labels: space.labels().to_vec(),
        ring: space.ring(),
        ranks,
    })
    .expect("space serializes")
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoordFile {
    Word(String),
    Values(Vec<i64>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorFile {
    labels: Vec<String>,
    coords: Vec<CoordFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FamilyFile {
    Named(String),
    Generated { generators: Vec<GeneratorFile> },
}

pub fn shape_from_json(v: Value, space: &DiscreteSpace) -> Result<ShapeDescriptor> {
    shape_from_file(from_value(v, "shape")?, space)
}

fn shape_from_file(g: GeneratorFile, space: &DiscreteSpace) -> Result<ShapeDescriptor> {
    let labels = g
        .labels
        .iter()
        .map(|l| space.label_index(l))
        .collect::<Result<BTreeSet<_>>>()?;
    let m = space.lattice_rank();
    if g.coords.len() != m + space.acting_rank() {
        return Err(Error::RankMismatch {
            expected: m + space.acting_rank(),
            found: g.coords.len(),
        });
    }
    let coords = g
        .coords
        .into_iter()
        .map(|c| match c {
            CoordFile::Word(w) if w == "all" => Ok(CoordinateSet::All),
            CoordFile::Word(w) => Err(Error::Parse(format!("unknown coordinate set {w:?}"))),
            CoordFile::Values(v) => Ok(CoordinateSet::values(v)),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut lattice = coords;
    let position = lattice.split_off(m);
    let shape = ShapeDescriptor {
        labels,
        lattice,
        position,
    };
    shape.check(space)?;
    Ok(shape)
}

pub fn shape_to_json(shape: &ShapeDescriptor, space: &DiscreteSpace) -> Value {
    let coords: Vec<Value> = shape
        .lattice
        .iter()
        .chain(&shape.position)
        .map(|c| match c {
            CoordinateSet::All => json!("all"),
            CoordinateSet::Values(v) => json!(v),
        })
        .collect();
    let labels: Vec<&str> = shape.labels.iter().map(|&q| space.labels()[q].as_str()).collect();
    json!({ "labels": labels, "coords": coords })
}

pub fn family_from_json(v: Value, space: &DiscreteSpace) -> Result<SupportFamily> {
    let family = match from_value::<FamilyFile>(v, "family")? {
        FamilyFile::Named(n) => match n.as_str() {
            "finite" => SupportFamily::Finite,
            "all" => SupportFamily::All,
            "cocompact" => SupportFamily::Cocompact,
            _ => return Err(Error::Parse(format!("unknown family {n:?}"))),
        },
        FamilyFile::Generated { generators } => SupportFamily::GeneratedBy(
            generators
                .into_iter()
                .map(|g| shape_from_file(g, space))
                .collect::<Result<_>>()?,
        ),
    };
    family.check(space)?;
    Ok(family)
}

pub fn family_to_json(family: &SupportFamily, space: &DiscreteSpace) -> Value {
    match family {
        SupportFamily::Finite => json!("finite"),
        SupportFamily::All => json!("all"),
        SupportFamily::Cocompact => json!("cocompact"),
        SupportFamily::GeneratedBy(gens) => {
            json!({ "generators": gens.iter().map(|g| shape_to_json(g, space)).collect::<Vec<_>>() })
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointFile {
    label: String,
    #[serde(default)]
    lattice: Vec<i64>,
    position: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValueFile {
    One(String),
    Many(Vec<String>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    anchor: PointFile,
    #[serde(default)]
    rays: Vec<usize>,
    value: ValueFile,
}

pub fn point_from_json(v: Value, space: &DiscreteSpace) -> Result<Point> {
    point_from_file(from_value(v, "point")?, space)
}

fn point_from_file(p: PointFile, space: &DiscreteSpace) -> Result<Point> {
    let point = Point::new(space.label_index(&p.label)?, p.lattice, p.position);
    space.check_point(&point)?;
    Ok(point)
}

pub fn point_to_json(p: &Point, space: &DiscreteSpace) -> Value {
    serde_json::to_value(point_file(p, space)).expect("point serializes")
}

fn point_file(p: &Point, space: &DiscreteSpace) -> PointFile {
    PointFile {
        label: space.labels()[p.label].clone(),
        lattice: p.lattice.clone(),
        position: p.position.clone(),
    }
}

fn parse_ray(r: usize, d: usize) -> Result<usize> {
    if r == 0 || r > d {
        return Err(Error::GeneratorOutOfRange { index: r, rank: d });
    }
    Ok(r - 1)
}

pub fn section_from_json(v: Value, sheaf: &Arc<Sheaf>) -> Result<Section> {
    let terms: Vec<TermFile> = from_value(v, "section")?;
    section_from_terms(terms, sheaf)
}

fn section_from_terms(terms: Vec<TermFile>, sheaf: &Arc<Sheaf>) -> Result<Section> {
    let space = sheaf.space();
    let ring = space.ring();
    let d = space.acting_rank();
    let terms = terms
        .into_iter()
        .map(|t| {
            let anchor = point_from_file(t.anchor, space)?;
            let rays = t.rays.into_iter().map(|r| parse_ray(r, d)).collect::<Result<_>>()?;
            let value = match t.value {
                ValueFile::One(s) => vec![ring.parse(&s)?],
                ValueFile::Many(v) => v.iter().map(|s| ring.parse(s)).collect::<Result<_>>()?,
            };
            Ok(ElementaryTerm::new(anchor, rays, value))
        })
        .collect::<Result<Vec<_>>>()?;
    Section::from_terms(sheaf, &terms)
}

fn terms_to_files(s: &Section) -> Vec<TermFile> {
    let space = s.space();
    s.terms()
        .into_iter()
        .map(|t| TermFile {
            anchor: point_file(&t.anchor, space),
            rays: t.rays.iter().map(|r| r + 1).collect(),
            value: ValueFile::Many(t.value.iter().map(format_scalar).collect()),
        })
        .collect()
}

pub fn section_to_json(s: &Section) -> Value {
    serde_json::to_value(terms_to_files(s)).expect("section serializes")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CochainFile {
    degree: usize,
    #[serde(default)]
    components: BTreeMap<String, Vec<TermFile>>,
}

fn parse_subset(key: &str, d: usize) -> Result<Vec<usize>> {
    if key.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut t = key
        .split(',')
        .map(|k| {
            let r: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad component key {key:?}")))?;
            parse_ray(r, d)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = t.len();
    t.sort_unstable();
    t.dedup();
    if t.len() != n {
        return Err(Error::Parse(format!("repeated generator in component key {key:?}")));
    }
    Ok(t)
}

fn subset_key(t: &[usize]) -> String {
    t.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

pub fn cochain_from_json(v: Value, sheaf: &Arc<Sheaf>) -> Result<Cochain> {
    let f: CochainFile = from_value(v, "cochain")?;
    let d = sheaf.acting_rank();
    let mut c = Cochain::zero(sheaf, f.degree)?;
    for (key, terms) in f.components {
        let t = parse_subset(&key, d)?;
        let s = section_from_terms(terms, sheaf)?;
        let s = c.component(&t).checked_add(&s)?;
        c.set(t, s)?;
    }
    Ok(c)
}

pub fn cochain_to_json(c: &Cochain) -> Value {
    let components: BTreeMap<String, Vec<TermFile>> = c
        .components()
        .map(|(t, s)| (subset_key(t), terms_to_files(s)))
        .collect();
    serde_json::to_value(CochainFile {
        degree: c.degree(),
        components,
    })
    .expect("cochain serializes")
}

fn scalars_from(v: &[String]) -> Result<Vec<Scalar>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

fn scalars_to(v: &[Scalar]) -> Vec<String> {
    v.iter().map(format_scalar).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlFile {
    breakpoints: Vec<String>,
    values: Vec<String>,
}

pub fn pl_from_json(v: Value) -> Result<PiecewiseLinearFn> {
    let f: PlFile = from_value(v, "piecewise-linear function")?;
    PiecewiseLinearFn::new(scalars_from(&f.breakpoints)?, scalars_from(&f.values)?)
}

pub fn pl_to_json(f: &PiecewiseLinearFn) -> Value {
    json!({ "breakpoints": scalars_to(f.breakpoints()), "values": scalars_to(f.values()) })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    period: String,
    breakpoints: Vec<String>,
    values: Vec<String>,
}

pub fn profile_from_json(v: Value) -> Result<PeriodicProfile> {
    let f: ProfileFile = from_value(v, "periodic profile")?;
    PeriodicProfile::new(
        parse_rational(&f.period)?,
        scalars_from(&f.breakpoints)?,
        scalars_from(&f.values)?,
    )
}

pub fn profile_to_json(p: &PeriodicProfile) -> Value {
    json!({
        "period": format_scalar(p.period()),
        "breakpoints": scalars_to(p.breakpoints()),
        "values": scalars_to(p.values()),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowFile {
    zero_below: String,
    periodic_above: String,
    compact: PlFile,
    profile: Value,
}

pub fn flow_from_json(v: Value) -> Result<EventuallyPeriodicFn> {
    let f: FlowFile = from_value(v, "eventually periodic function")?;
    let xs = scalars_from(&f.compact.breakpoints)?;
    let ys = scalars_from(&f.compact.values)?;
    if xs.len() != ys.len() {
        return Err(Error::InvalidPiecewiseLinear(
            "breakpoints and values differ in length".into(),
        ));
    }
    EventuallyPeriodicFn::new(
        parse_rational(&f.zero_below)?,
        parse_rational(&f.periodic_above)?,
        xs.into_iter().zip(ys).collect(),
        profile_from_json(f.profile)?,
    )
}

pub fn flow_to_json(f: &EventuallyPeriodicFn) -> Value {
    let (xs, ys): (Vec<Scalar>, Vec<Scalar>) = f.compact().iter().cloned().unzip();
    json!({
        "zero_below": format_scalar(f.lower()),
        "periodic_above": format_scalar(f.upper()),
        "compact": { "breakpoints": scalars_to(&xs), "values": scalars_to(&ys) },
        "profile": profile_to_json(f.profile()),
    })
}

pub fn witness_to_json(w: &Witness) -> Value {
    match &w.outcome {
        WitnessOutcome::Primitive(eta) => json!({
            "cocycle": cochain_to_json(&w.cocycle),
            "primitive": cochain_to_json(eta),
        }),
        WitnessOutcome::Class(c) => json!({
            "cocycle": cochain_to_json(&w.cocycle),
            "class": section_to_json(c),
        }),
    }
}

/// Reads a witness entry; the class lives on the full quotient of `sheaf`.
pub fn witness_from_json(v: Value, sheaf: &Arc<Sheaf>) -> Result<Witness> {
    let Value::Object(mut map) = v else {
        return Err(Error::Parse("witness must be an object".into()));
    };
    let cocycle = cochain_from_json(
        map.remove("cocycle")
            .ok_or_else(|| Error::Parse("witness lacks cocycle".into()))?,
        sheaf,
    )?;
    let outcome = match (map.remove("primitive"), map.remove("class")) {
        (Some(p), None) => WitnessOutcome::Primitive(cochain_from_json(p, sheaf)?),
        (None, Some(c)) => WitnessOutcome::Class(section_from_json(c, &sheaf.full_quotient())?),
        _ => return Err(Error::Parse("witness needs exactly one of primitive or class".into())),
    };
    Ok(Witness { cocycle, outcome })
}

pub fn report_to_json(report: &CohomologyReport, sheaf: &Sheaf) -> Value {
    let space = sheaf.space();
    let degrees: serde_json::Map<String, Value> = report
        .degrees
        .iter()
        .enumerate()
        .map(|(p, v)| {
            let entry = match v {
                DegreeVerdict::Zero => json!("zero"),
                DegreeVerdict::Quotient { space: q, family } => json!({
                    "quotient": sheaf_to_json(&Sheaf::new(q.clone(), sheaf.stalks().clone()).expect("same labels")),
                    "family": family_to_json(family, q),
                }),
                DegreeVerdict::Invariants { space: q, family } => json!({
                    "invariants": {
                        "quotient": sheaf_to_json(&Sheaf::new(q.clone(), sheaf.stalks().clone()).expect("same labels")),
                        "family": family_to_json(family, q),
                    }
                }),
            };
            (p.to_string(), entry)
        })
        .collect();
    json!({
        "mode": match report.mode {
            ReportMode::Concentrated => "concentrated",
            ReportMode::Acyclic => "acyclic",
        },
        "space": sheaf_to_json(sheaf),
        "family": family_to_json(&report.family, space),
        "degrees": degrees,
        "witnesses": report.witnesses.iter().map(witness_to_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Arc<Sheaf> {
        sheaf_from_json(json!({"d": 1, "m": 0, "labels": ["q"], "ring": "Z"})).unwrap()
    }

    #[test]
    fn section_roundtrip_keeps_rays_one_based() {
        let sheaf = line();
        let v = json!([{"anchor": {"label": "q", "position": [-1]}, "rays": [1], "value": ["2"]}]);
        let s = section_from_json(v.clone(), &sheaf).unwrap();
        assert_eq!(
            section_to_json(&s),
            json!([{"anchor": {"label": "q", "lattice": [], "position": [-1]}, "rays": [1], "value": ["2"]}])
        );
        assert_eq!(section_from_json(section_to_json(&s), &sheaf).unwrap(), s);
    }

    #[test]
    fn ray_index_zero_is_rejected() {
        let v = json!([{"anchor": {"label": "q", "position": [0]}, "rays": [0], "value": "1"}]);
        assert!(section_from_json(v, &line()).is_err());
    }

    #[test]
    fn family_parsing() {
        let space = DiscreteSpace::lattice(1, 1);
        let f = family_from_json(
            json!({"generators": [{"labels": ["q"], "coords": ["all", [0]]}]}),
            &space,
        )
        .unwrap();
        assert!(f.check_phi_proper(&space).unwrap());
        assert_eq!(family_from_json(family_to_json(&f, &space), &space).unwrap(), f);
        assert!(family_from_json(json!("everything"), &space).is_err());
    }

    #[test]
    fn ranks_and_ring_roundtrip() {
        let v = json!({"d": 2, "m": 1, "labels": ["a", "b"], "ring": {"Zmod": 5}, "ranks": {"b": 2}});
        let sheaf = sheaf_from_json(v.clone()).unwrap();
        assert_eq!(sheaf.stalks().ranks(), &[1, 2]);
        assert_eq!(sheaf_to_json(&sheaf), v);
    }

    #[test]
    fn non_integral_value_rejected_over_z() {
        let v = json!([{"anchor": {"label": "q", "position": [0]}, "value": "1/2"}]);
        assert!(section_from_json(v, &line()).is_err());
    }
}
