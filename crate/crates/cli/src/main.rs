//! `zdcoh`: command-line front end for the cohomology workbench.
//!
//! Exit codes: 0 success, 1 unreadable or malformed input, 2 hypotheses of
//! the concentration theorem fail (or the input lies outside them), 3 the
//! input cochain is not a cocycle, 4 a witness was rejected or a suite check
//! failed.

mod properness;
mod suite;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use zdcoh::io::{
    cochain_from_json, cochain_to_json, family_from_json, family_to_json, flow_to_json, parse_json, pl_from_json,
    pl_to_json, profile_to_json, report_to_json, section_to_json, sheaf_from_json, sheaf_to_json,
};
use zdcoh::ring::parse_rational;
use zdcoh::{
    cohomology_report, compact_primitive, decide_top, default_probes, flow_primitive, full_support_primitive,
    solve_primitive, CoefficientRing, CompactSolution, QuotientMap, ReportMode, Resolution, Sheaf, StalkProfile,
    SupportFamily,
};

#[derive(Parser)]
#[command(name = "zdcoh", version, about = "Exact cohomology of Z^d acting on section modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the coefficient ring of the space file: Z, Q or Z/n.
    #[arg(long, global = true, value_parser = parse_ring)]
    ring: Option<CoefficientRing>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Supports in the given (proper) family.
    Supported,
    /// Arbitrary supports; cochains may contain rays.
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Cohomology report for a space, support family and optional probe cocycles.
    Cohomology {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        family: PathBuf,
        /// JSON list of cocycles; defaults to one probe per positive degree.
        #[arg(long)]
        probes: Option<PathBuf>,
    },
    /// Primitive or nonzero class of a cocycle.
    Coboundary {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        cochain: PathBuf,
        /// Support family file; the finite family when omitted.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "supported")]
        mode: Mode,
    },
    /// Properness verdicts and transporter certificates.
    Properness {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        family: PathBuf,
        /// Half-width of the probe window.
        #[arg(long, default_value_t = 3)]
        radius: i64,
    },
    /// Push a family forward along a quotient map.
    Pushforward {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        family: PathBuf,
        /// 1-based generators to divide out, comma separated; all when omitted.
        #[arg(long, value_delimiter = ',')]
        delete: Option<Vec<usize>>,
    },
    /// Solve f = F(. + s) - F for a piecewise-linear f.
    Flow {
        #[arg(long)]
        pl: PathBuf,
        /// Positive rational shift.
        #[arg(long)]
        s: String,
        #[arg(long, value_enum, default_value = "supported")]
        mode: Mode,
    },
    /// Re-check a witness, report or flow solution file.
    Verify { file: PathBuf },
    /// Seeded randomized checks across d <= 3.
    Suite {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

fn parse_ring(s: &str) -> Result<CoefficientRing, String> {
    let ring = match s {
        "Z" => CoefficientRing::Integers,
        "Q" => CoefficientRing::Rationals,
        _ => {
            let n = s
                .strip_prefix("Z/")
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| format!("expected Z, Q or Z/n, got {s:?}"))?;
            CoefficientRing::Zmod(n)
        }
    };
    ring.validate().map_err(|e| e.to_string())?;
    Ok(ring)
}

/// A failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    Parse(String),
    Hypothesis(String),
    NotCocycle(String),
    Rejected(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 1,
            Failure::Hypothesis(_) => 2,
            Failure::NotCocycle(_) => 3,
            Failure::Rejected(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Hypothesis(m) | Failure::NotCocycle(m) | Failure::Rejected(m) => m,
        }
    }
}

impl From<zdcoh::Error> for Failure {
    fn from(e: zdcoh::Error) -> Self {
        use zdcoh::Error as E;
        let msg = e.to_string();
        match e {
            E::NotCocycle => Failure::NotCocycle(msg),
            E::HypothesesFail(_) | E::Unrepresentable(_) | E::InfiniteSupport { .. } => Failure::Hypothesis(msg),
            _ => Failure::Parse(msg),
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;

fn read_json(path: &Path) -> Outcome<Value> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    parse_json(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn load_sheaf(path: &Path, ring: Option<CoefficientRing>) -> Outcome<Arc<Sheaf>> {
    let sheaf = sheaf_from_json(read_json(path)?)?;
    Ok(match ring {
        Some(r) => Sheaf::new(
            sheaf.space().with_ring(r)?,
            StalkProfile::new(sheaf.stalks().ranks().to_vec())?,
        )?,
        None => sheaf,
    })
}

fn write_output(out: Option<&Path>, v: &Value) -> Outcome<()> {
    let text = serde_json::to_string_pretty(v).expect("json values serialize") + "\n";
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_cohomology(cli: &Cli, space: &Path, family: &Path, probes: Option<&Path>) -> Outcome<()> {
    let sheaf = load_sheaf(space, cli.ring)?;
    let family = family_from_json(read_json(family)?, sheaf.space())?;
    let probes = match probes {
        Some(p) => match read_json(p)? {
            Value::Array(items) => items
                .into_iter()
                .map(|c| cochain_from_json(c, &sheaf))
                .collect::<Result<Vec<_>, _>>()?,
            _ => return Err(Failure::Parse("probe file must hold a list of cochains".into())),
        },
        None => default_probes(&sheaf, &family)?,
    };
    for c in &probes {
        if !c.is_cocycle()? {
            return Err(Failure::NotCocycle("a probe is not a cocycle".into()));
        }
    }
    let report = cohomology_report(&sheaf, &family, &probes)?;
    write_output(cli.out.as_deref(), &report_to_json(&report, &sheaf))?;
    match report.mode {
        ReportMode::Concentrated => Ok(()),
        ReportMode::Acyclic => Err(Failure::Hypothesis(
            "family is not proper (the group is not compact): acyclic in positive degrees, H^0 = invariants".into(),
        )),
    }
}

fn cmd_coboundary(cli: &Cli, space: &Path, cochain: &Path, family: Option<&Path>, mode: Mode) -> Outcome<()> {
    let sheaf = load_sheaf(space, cli.ring)?;
    let family = match family {
        Some(f) => family_from_json(read_json(f)?, sheaf.space())?,
        None => SupportFamily::Finite,
    };
    let omega = cochain_from_json(read_json(cochain)?, &sheaf)?;
    if !omega.is_cocycle()? {
        return Err(Failure::NotCocycle("the cochain is not a cocycle".into()));
    }
    let d = sheaf.acting_rank();
    let p = omega.degree();
    if p == 0 {
        return Err(Failure::Hypothesis(
            "degree 0 cocycles have no primitives to look for".into(),
        ));
    }
    let mut witness = json!({
        "space": sheaf_to_json(&sheaf),
        "family": family_to_json(&family, sheaf.space()),
        "cocycle": cochain_to_json(&omega),
    });
    let fields = witness.as_object_mut().expect("object literal");
    match mode {
        Mode::Full => {
            fields.insert("kind".into(), json!("primitive"));
            fields.insert("mode".into(), json!("full"));
            fields.insert("primitive".into(), cochain_to_json(&full_support_primitive(&omega)?));
        }
        Mode::Supported => {
            fields.insert("mode".into(), json!("supported"));
            let resolution = if p < d {
                Resolution::Primitive(solve_primitive(&omega, &family)?)
            } else {
                decide_top(&omega, &family)?
            };
            match resolution {
                Resolution::Primitive(eta) => {
                    fields.insert("kind".into(), json!("primitive"));
                    fields.insert("primitive".into(), cochain_to_json(&eta));
                }
                Resolution::Class(c) => {
                    fields.insert("kind".into(), json!("class"));
                    fields.insert("class".into(), section_to_json(&c));
                }
            }
        }
    }
    write_output(cli.out.as_deref(), &witness)
}

fn cmd_pushforward(cli: &Cli, space: &Path, family: &Path, delete: Option<&[usize]>) -> Outcome<()> {
    let sheaf = load_sheaf(space, cli.ring)?;
    let space = sheaf.space();
    let family = family_from_json(read_json(family)?, space)?;
    let map = match delete {
        None => QuotientMap::full(space),
        Some(gens) => {
            let gens = gens
                .iter()
                .map(|&g| {
                    g.checked_sub(1).filter(|&i| i < space.acting_rank()).ok_or_else(|| {
                        Failure::Parse(format!("generator {g} out of range 1..={}", space.acting_rank()))
                    })
                })
                .collect::<Outcome<Vec<_>>>()?;
            QuotientMap::deleting(space, &gens)?
        }
    };
    let target = map.target(space)?;
    let pushed = family.pushforward(space, &map)?;
    let target_sheaf = Sheaf::new(target.clone(), sheaf.stalks().clone())?;
    write_output(
        cli.out.as_deref(),
        &json!({
            "space": sheaf_to_json(&target_sheaf),
            "family": family_to_json(&pushed, &target),
        }),
    )
}

fn cmd_flow(cli: &Cli, pl: &Path, s: &str, mode: Mode) -> Outcome<()> {
    let f = pl_from_json(read_json(pl)?)?;
    let s_val = parse_rational(s)?;
    let mut out = json!({ "s": s, "f": pl_to_json(&f) });
    let fields = out.as_object_mut().expect("object literal");
    match mode {
        Mode::Full => {
            fields.insert("kind".into(), json!("flow"));
            fields.insert("primitive".into(), flow_to_json(&flow_primitive(&f, &s_val)?));
        }
        Mode::Supported => match compact_primitive(&f, &s_val)? {
            CompactSolution::Primitive(g) => {
                fields.insert("kind".into(), json!("flow_compact"));
                fields.insert("primitive".into(), pl_to_json(&g));
            }
            CompactSolution::Obstruction(p) => {
                fields.insert("kind".into(), json!("flow_obstruction"));
                fields.insert("profile".into(), profile_to_json(&p));
            }
        },
    }
    write_output(cli.out.as_deref(), &out)
}

fn run(cli: &Cli) -> Outcome<()> {
    match &cli.command {
        Command::Cohomology { space, family, probes } => cmd_cohomology(cli, space, family, probes.as_deref()),
        Command::Coboundary {
            space,
            cochain,
            family,
            mode,
        } => cmd_coboundary(cli, space, cochain, family.as_deref(), *mode),
        Command::Properness { space, family, radius } => {
            let sheaf = load_sheaf(space, cli.ring)?;
            let family = family_from_json(read_json(family)?, sheaf.space())?;
            let cert = properness::certificate(sheaf.space(), &family, *radius)?;
            write_output(cli.out.as_deref(), &cert)
        }
        Command::Pushforward { space, family, delete } => cmd_pushforward(cli, space, family, delete.as_deref()),
        Command::Flow { pl, s, mode } => cmd_flow(cli, pl, s, *mode),
        Command::Verify { file } => {
            let summary = verify::verify_file(&read_json(file)?, cli.ring)?;
            write_output(cli.out.as_deref(), &summary)
        }
        Command::Suite { seed, cases } => {
            let ring = cli.ring.unwrap_or(CoefficientRing::Integers);
            let summary = suite::run(*seed, *cases, ring)?;
            let failures = summary["failures"].as_u64().unwrap_or(0);
            write_output(cli.out.as_deref(), &summary)?;
            if failures > 0 {
                return Err(Failure::Rejected(format!("{failures} suite checks failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("zdcoh: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
