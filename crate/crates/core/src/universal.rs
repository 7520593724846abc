//! Self-delimiting machines over bit-string programs.
//!
//! A machine halts on a program only if the computation converges *and*
//! has read every bit of the program. A run that converges early leaves
//! `PartialConsumption`; one that wants more bits than exist stops with
//! `OutOfData`. Together these make every machine's domain prefix-free.

use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::bits::{BitStream, BitString};
use crate::dyadic::Dyadic;
use crate::interpreter::{self, Abort, Budget};
use crate::sexpr::SExpr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvalidReason {
    OutOfData,
    ParseError,
    PartialConsumption,
}

impl InvalidReason {
    pub fn atom_name(self) -> &'static str {
        match self {
            InvalidReason::OutOfData => "out-of-data",
            InvalidReason::ParseError => "parse-error",
            InvalidReason::PartialConsumption => "partial-consumption",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunResult {
    Halted {
        output: SExpr,
        consumed: usize,
    },
    /// The budget ran out first.
    StillRunning,
    Invalid(InvalidReason),
}

impl RunResult {
    pub fn output(&self) -> Option<&SExpr> {
        match self {
            RunResult::Halted { output, .. } => Some(output),
            _ => None,
        }
    }

    pub fn is_halted(&self) -> bool {
        matches!(self, RunResult::Halted { .. })
    }

    /// Only a run that wanted more bits can behave differently on an
    /// extension of its program.
    pub fn extensions_may_halt(&self) -> bool {
        matches!(self, RunResult::Invalid(InvalidReason::OutOfData))
    }
}

impl fmt::Display for RunResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunResult::Halted { output, .. } => write!(f, "halted {output}"),
            RunResult::StillRunning => f.write_str("failure out-of-time"),
            RunResult::Invalid(r) => write!(f, "invalid {}", r.atom_name()),
        }
    }
}

/// A self-delimiting computer: a deterministic partial map from programs to
/// outputs with a step-budgeted runner.
///
/// Implementations read their program front to back and must report
/// [`InvalidReason::OutOfData`] exactly when they tried to read past its end.
/// Searches rely on this to prune every other outcome's extensions.
/// Runs must also be budget-monotone: a halt at budget `t` is the same halt
/// at every larger budget.
pub trait Machine: Send + Sync {
    fn run(&self, program: &BitString, budget: Budget) -> RunResult;

    /// True when every run ends within a budget proportional to the program
    /// length, so that exhausting a search space decides halting.
    fn decides_halting(&self) -> bool {
        false
    }

    /// The machine's halting probability, when it is known in closed form.
    fn exact_omega(&self) -> Option<Dyadic> {
        None
    }

    fn name(&self) -> String;
}

impl<M: Machine + ?Sized> Machine for &M {
    fn run(&self, program: &BitString, budget: Budget) -> RunResult {
        (**self).run(program, budget)
    }

    fn decides_halting(&self) -> bool {
        (**self).decides_halting()
    }

    fn exact_omega(&self) -> Option<Dyadic> {
        (**self).exact_omega()
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

impl<M: Machine + ?Sized> Machine for Arc<M> {
    fn run(&self, program: &BitString, budget: Budget) -> RunResult {
        (**self).run(program, budget)
    }

    fn decides_halting(&self) -> bool {
        (**self).decides_halting()
    }

    fn exact_omega(&self) -> Option<Dyadic> {
        (**self).exact_omega()
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

/// The universal machine: the program is an expression in 8-bit characters
/// terminated by a newline, followed by raw data the expression may read.
#[derive(Debug, Clone, Copy, Default)]
pub struct LispU;

impl Machine for LispU {
    fn run(&self, program: &BitString, budget: Budget) -> RunResult {
        run_u(program, budget)
    }

    fn name(&self) -> String {
        "lispu".into()
    }
}

/// Runs `p` on the universal machine: `cadr try budget 'eval read-exp p`,
/// plus the exact-consumption rule.
pub fn run_u(p: &BitString, budget: Budget) -> RunResult {
    let outcome = interpreter::try_fresh(budget, &interpreter::universal_body(), p.clone());
    match outcome.result {
        Ok(output) if outcome.bits_read == p.len() => RunResult::Halted { output, consumed: p.len() },
        Ok(_) => RunResult::Invalid(InvalidReason::PartialConsumption),
        Err(Abort::OutOfTime) => RunResult::StillRunning,
        Err(Abort::OutOfData) => RunResult::Invalid(InvalidReason::OutOfData),
        Err(Abort::ParseError) => RunResult::Invalid(InvalidReason::ParseError),
    }
}

/// A program for [`LispU`]: the expression's bits followed by `data`.
pub fn u_program(prefix: &SExpr, data: &BitString) -> BitString {
    prefix.to_bits().concat(data)
}

/// Reads twin pairs until the `01` terminator, one step per pair. Returns the
/// decoded bits, or the run result that ended decoding early.
fn read_doubled(program: &BitString, budget: Budget) -> Result<BitString, RunResult> {
    let mut stream = BitStream::new(program.clone());
    let mut out = BitString::new();
    let mut remaining = budget;
    loop {
        match &mut remaining {
            Budget::Limited(0) => return Err(RunResult::StillRunning),
            Budget::Limited(n) => *n -= 1,
            Budget::Unlimited => {}
        }
        let pair = stream.read_bits(2).map_err(|_| RunResult::Invalid(InvalidReason::OutOfData))?;
        match (pair.as_slice()[0], pair.as_slice()[1]) {
            (a, b) if a == b => out.push(a),
            (0, _) if stream.is_exhausted() => return Ok(out),
            (0, _) => return Err(RunResult::Invalid(InvalidReason::PartialConsumption)),
            _ => return Err(RunResult::Invalid(InvalidReason::ParseError)),
        }
    }
}

/// Halts exactly on the bit-doubling codewords `x1x1 x2x2 ... 01`, outputting
/// `x` as a list of bits. Its halting probability is exactly 1/2.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToyMachine;

impl Machine for ToyMachine {
    fn run(&self, program: &BitString, budget: Budget) -> RunResult {
        match read_doubled(program, budget) {
            Ok(x) => RunResult::Halted { output: SExpr::from_bits(&x), consumed: program.len() },
            Err(r) => r,
        }
    }

    fn decides_halting(&self) -> bool {
        true
    }

    fn exact_omega(&self) -> Option<Dyadic> {
        Some(Dyadic::pow2_neg(1))
    }

    fn name(&self) -> String {
        "toy".into()
    }
}

pub fn toy_machine() -> ToyMachine {
    ToyMachine
}

/// Like [`ToyMachine`] but reads the decoded bits as a base-two numeral and
/// outputs that natural number.
#[derive(Debug, Clone, Copy, Default)]
pub struct NumeralMachine;

impl Machine for NumeralMachine {
    fn run(&self, program: &BitString, budget: Budget) -> RunResult {
        match read_doubled(program, budget) {
            Ok(x) => {
                let value = x.iter().fold(BigUint::default(), |acc, b| (acc << 1u32) + BigUint::from(b));
                RunResult::Halted { output: SExpr::natural(value), consumed: program.len() }
            }
            Err(r) => r,
        }
    }

    fn decides_halting(&self) -> bool {
        true
    }

    fn exact_omega(&self) -> Option<Dyadic> {
        Some(Dyadic::pow2_neg(1))
    }

    fn name(&self) -> String {
        "numeral".into()
    }
}

/// Runs `machines[k]` on `q` for the program `0^k 1 q`.
#[derive(Clone)]
pub struct ComposedMachine {
    machines: Vec<Arc<dyn Machine>>,
}

impl ComposedMachine {
    pub fn machines(&self) -> &[Arc<dyn Machine>] {
        &self.machines
    }

    /// The program that makes this machine simulate `machines[k]` on `q`.
    pub fn program_for(k: usize, q: &BitString) -> BitString {
        let mut p: BitString = std::iter::repeat_n(0, k).collect();
        p.push(1);
        p.extend_from(q);
        p
    }
}

pub fn compose_universal(machines: Vec<Arc<dyn Machine>>) -> ComposedMachine {
    ComposedMachine { machines }
}

impl Machine for ComposedMachine {
    fn run(&self, program: &BitString, budget: Budget) -> RunResult {
        let Some(k) = program.iter().position(|b| b == 1) else {
            return RunResult::Invalid(InvalidReason::OutOfData);
        };
        let Some(machine) = self.machines.get(k) else {
            return RunResult::Invalid(InvalidReason::ParseError);
        };
        let q = program.slice(k + 1, program.len());
        match machine.run(&q, budget) {
            RunResult::Halted { output, consumed } => RunResult::Halted { output, consumed: consumed + k + 1 },
            other => other,
        }
    }

    fn decides_halting(&self) -> bool {
        self.machines.iter().all(|m| m.decides_halting())
    }

    fn name(&self) -> String {
        let names: Vec<String> = self.machines.iter().map(|m| m.name()).collect();
        format!("compose[{}]", names.join(","))
    }
}

/// Visits the programs of length at most `max_len` in length-then-lexicographic
/// order, skipping every program that extends one whose run did not end in
/// `OutOfData` (at a fixed budget, such extensions cannot halt).
///
/// Each length is run as one batch, across the rayon pool when `parallel`
/// is set; visiting order is the same either way.
pub fn explore<F>(machine: &dyn Machine, max_len: usize, budget: Budget, parallel: bool, mut visit: F)
where
    F: FnMut(&BitString, &RunResult) -> ControlFlow<()>,
{
    let mut level = vec![BitString::new()];
    for len in 0..=max_len {
        let results: Vec<RunResult> = if parallel {
            level.par_iter().map(|p| machine.run(p, budget)).collect()
        } else {
            level.iter().map(|p| machine.run(p, budget)).collect()
        };
        let mut next = Vec::new();
        for (p, r) in level.iter().zip(&results) {
            if visit(p, r).is_break() {
                return;
            }
            if len < max_len && r.extensions_may_halt() {
                next.push(p.child(0));
                next.push(p.child(1));
            }
        }
        if next.is_empty() {
            return;
        }
        level = next;
    }
}
