//! Properness certificates: per-generator `F`-properness with the transporter
//! `<F : {x}>` computed on a probe window, plus the Bourbaki certificate of
//! the window against itself.

use serde_json::{json, Value};
use zdcoh::io::{family_to_json, point_to_json, shape_to_json};
use zdcoh::{
    check_bourbaki_proper, check_f_proper, transporter, CoordinateSet, DiscreteSpace, FiniteWindow, Point,
    ShapeDescriptor, SupportFamily,
};

use crate::Outcome;

fn first(c: &CoordinateSet) -> i64 {
    match c {
        CoordinateSet::All => 0,
        CoordinateSet::Values(v) => v.iter().next().copied().unwrap_or(0),
    }
}

/// `{g : x + g in F}` with unbounded coordinates of `F` cut to `x +- radius`.
fn truncated_transporter(shape: &ShapeDescriptor, x: &Point, radius: i64) -> Vec<Vec<i64>> {
    let in_fibre = shape.labels.contains(&x.label) && shape.lattice.iter().zip(&x.lattice).all(|(c, &u)| c.contains(u));
    if !in_fibre {
        return Vec::new();
    }
    let mut out = vec![Vec::new()];
    for (c, &xi) in shape.position.iter().zip(&x.position) {
        let values: Vec<i64> = match c {
            CoordinateSet::All => (xi - radius..=xi + radius).collect(),
            CoordinateSet::Values(v) => v.iter().copied().collect(),
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut g = prefix.clone();
                    g.push(v - xi);
                    g
                })
            })
            .collect();
    }
    out
}

fn generator_entry(
    space: &DiscreteSpace,
    index: usize,
    shape: &ShapeDescriptor,
    radius: i64,
) -> Outcome<(bool, Value)> {
    let proper = check_f_proper(space, shape)?;
    let mut entry = json!({
        "index": index,
        "shape": shape_to_json(shape, space),
        "f_proper": proper,
    });
    if let Some(&label) = shape.labels.iter().next() {
        let x = Point::new(
            label,
            shape.lattice.iter().map(first).collect(),
            shape.position.iter().map(first).collect(),
        );
        let near = truncated_transporter(shape, &x, radius);
        let far = truncated_transporter(shape, &x, 2 * radius);
        let unbounded: Vec<usize> = shape
            .position
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_finite())
            .map(|(i, _)| i + 1)
            .collect();
        entry["witness"] = json!({
            "point": point_to_json(&x, space),
            "radius": radius,
            "transporter": near,
            "transporter_size_at_double_radius": far.len(),
            "unbounded_along": unbounded,
        });
    }
    Ok((proper, entry))
}

pub fn certificate(space: &DiscreteSpace, family: &SupportFamily, radius: i64) -> Outcome<Value> {
    let shapes: Vec<ShapeDescriptor> = match family {
        SupportFamily::Finite => Vec::new(),
        SupportFamily::All => vec![ShapeDescriptor::everything(space)],
        SupportFamily::Cocompact => {
            let mut s = ShapeDescriptor::everything(space);
            s.lattice = vec![CoordinateSet::values([0]); space.lattice_rank()];
            vec![s]
        }
        SupportFamily::GeneratedBy(gens) => gens.clone(),
    };
    let mut verdicts = Vec::new();
    let mut all_proper = true;
    for (k, shape) in shapes.iter().enumerate() {
        let (proper, entry) = generator_entry(space, k + 1, shape, radius)?;
        all_proper &= proper;
        verdicts.push(entry);
    }
    let window = FiniteWindow::cube(space, -radius, radius);
    let cert = check_bourbaki_proper(space, &window)?;
    let self_transporter = transporter(space, &window, &window)?;
    Ok(json!({
        "family": family_to_json(family, space),
        "phi_proper": all_proper && family.check_phi_proper(space)?,
        "generators": verdicts,
        "bourbaki": {
            "window_radius": radius,
            "proper": cert.proper,
            "transporter_size": self_transporter.len(),
        },
    }))
}
