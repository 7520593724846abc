//! A small LISP whose programs can be fed raw bits on the side, the
//! self-delimiting universal machine built from it, and tools for measuring
//! program-size complexity and halting probabilities at desk scale.

pub mod ait;
pub mod bits;
pub mod dyadic;
pub mod encoders;
pub mod interpreter;
pub mod kraft;
pub mod omega;
pub mod report;
pub mod sexpr;
pub mod universal;

pub use bits::{BitStream, BitString};
pub use dyadic::Dyadic;
pub use interpreter::{Abort, Budget, Interpreter, TopLevel, TryOutcome};
pub use sexpr::{parse_full, parse_implicit, ArityTable, SExpr};
