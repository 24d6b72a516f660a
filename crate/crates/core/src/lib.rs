//! Exact group cohomology `H^p(Z^d, Gamma_Phi(F))` for free translation
//! actions of `Z^d` on discrete spaces `Q x Z^m x Z^d`.
//!
//! Sections are finite combinations of point masses and cones, cochains live
//! in the Koszul complex of the operators `sigma_i - 1`, and every solver
//! answer comes with a witness that can be checked exactly.

pub mod cohomology;
pub mod error;
pub mod flows;
pub mod io;
pub mod koszul;
pub mod ring;
pub mod sample;
pub mod sections;
pub mod space;
pub mod supports;

pub use cohomology::{
    build_partition, cohomology_report, decide_top, default_probes, full_support_primitive, lift_class, resolve,
    solve_primitive, staged_descent, top_class, CohomologyReport, DegreeVerdict, PartitionOfUnity, ReportMode,
    Resolution, Witness, WitnessOutcome,
};
pub use error::{Error, Result};
pub use flows::{
    compact_primitive, flow_primitive, periodization, verify_compact_identity, verify_flow_identity, CompactSolution,
    EventuallyPeriodicFn, PeriodicProfile, PiecewiseLinearFn,
};
pub use koszul::{subsets, Cochain, Subset};
pub use ring::{CoefficientRing, Scalar};
pub use sections::{ElementaryTerm, Section, Sheaf, StalkProfile};
pub use space::{
    check_bourbaki_proper, check_f_proper, count_orbits_on_window, transporter, DiscreteSpace, FiniteIndexRestriction,
    FiniteWindow, GroupVector, Point, ProperCertificate,
};
pub use supports::{CoordinateSet, QuotientMap, ShapeDescriptor, SupportFamily};
