//! Program-size complexity and its relatives, computed as budgeted searches.
//!
//! Nothing here is uncomputable because everything is capped: results are
//! upper bounds on program size (lower bounds on probability) unless a
//! record says it is exact.

mod complexity;
mod lisp;
mod theory;

pub use complexity::{
    h_upper, info_measures, p_lower, pair_prefix, pair_program, ComplexityRecord, InfoReport, NotFound, PairMachine,
    Witness,
};
pub use lisp::{elegant_search, expressions_of_size, lisp_complexity_upper, lisp_value, Elegant, Vocabulary};
pub use theory::{
    berry_searcher, berry_source, run_theory, searcher_constant, BerryOutcome, TheoryHandle, TheoryRun,
    REFERENCE_CONSTANT,
};
