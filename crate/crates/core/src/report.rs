//! Plain-text renderings shared by the command line and the tests.

use crate::dyadic::Dyadic;
use crate::interpreter::TryOutcome;
use crate::universal::RunResult;

/// `halted (a b c)`, `failure out-of-time`, `invalid out-of-data`.
pub fn run_result(r: &RunResult) -> String {
    r.to_string()
}

/// `(success v (captures...))` or `(failure reason (captures...))`.
pub fn try_outcome(o: &TryOutcome) -> String {
    o.to_sexpr().to_string()
}

/// A measure: `3/4 = 0.11`.
pub fn measure(d: &Dyadic) -> String {
    format!("{d} = {}", d.binary_expansion())
}

/// A probability estimate: `0.01111 (dyadic 15/32)`.
pub fn estimate(d: &Dyadic) -> String {
    format!("{} (dyadic {d})", d.binary_expansion())
}
