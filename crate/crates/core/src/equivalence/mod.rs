//! Deciding equivalence of two families by matching natural charts built
//! from invariants and comparing invariant signatures at matched points.

mod chart;
mod decide;
mod matching;

pub use chart::{battery_values, build_chart, invariant_signature, natural_chart, parse_q, Chart, Domain, Signature, SignatureRow};
pub use decide::{atlas_test, chart_values, equivalence_test, AtlasChart, AtlasReport, EquivConfig, EquivReport, MatchRow, Verdict, Witness};
pub use matching::{match_point, newton, NewtonResult, MAX_NEWTON_ITERATIONS};
