use std::fmt;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::interpreter::Budget;
use crate::sexpr::{parse_full, SExpr};
use crate::universal::{explore, Machine, RunResult};

/// A program found for a target: bits for a machine, an expression for
/// LISP character complexity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Bits(BitString),
    Expr(SExpr),
}

impl Witness {
    pub fn bits(&self) -> Option<&BitString> {
        match self {
            Witness::Bits(b) => Some(b),
            Witness::Expr(_) => None,
        }
    }

    pub fn expr(&self) -> Option<&SExpr> {
        match self {
            Witness::Expr(e) => Some(e),
            Witness::Bits(_) => None,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Bits(b) => write!(f, "{b}"),
            Witness::Expr(e) => write!(f, "{e}"),
        }
    }
}

/// The smallest program found for `target`. `size` is in bits for machine
/// searches and characters for LISP searches. Unless `exact`, it is only an
/// upper bound on the true minimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityRecord {
    pub target: SExpr,
    pub witness: Witness,
    pub size: usize,
    pub search_cap: usize,
    pub budget: u64,
    pub exact: bool,
}

impl fmt::Display for ComplexityRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "target: {}", self.target)?;
        writeln!(f, "witness: {}", self.witness)?;
        writeln!(f, "size: {}", self.size)?;
        writeln!(f, "search-cap: {}", self.search_cap)?;
        writeln!(f, "budget: {}", self.budget)?;
        write!(f, "exact: {}", self.exact)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not found: no program for {target} within {cap} at budget {budget}")]
pub struct NotFound {
    pub target: SExpr,
    pub cap: usize,
    pub budget: u64,
}

/// Shortest program (then lexicographically first) of at most `size_cap`
/// bits on which `m` halts with output `x` within `budget` steps.
///
/// The record is exact when `m` decides halting and no shorter program ran
/// out of budget.
pub fn h_upper(x: &SExpr, m: &dyn Machine, size_cap: usize, budget: u64) -> Result<ComplexityRecord, NotFound> {
    let mut found = None;
    let mut timed_out_below: Option<usize> = None;
    explore(m, size_cap, Budget::Limited(budget), false, |p, r| match r {
        RunResult::Halted { output, .. } if output == x => {
            found = Some(p.clone());
            ControlFlow::Break(())
        }
        RunResult::StillRunning => {
            timed_out_below.get_or_insert(p.len());
            ControlFlow::Continue(())
        }
        _ => ControlFlow::Continue(()),
    });
    let p = found.ok_or_else(|| NotFound { target: x.clone(), cap: size_cap, budget })?;
    let exact = m.decides_halting() && timed_out_below.is_none_or(|len| len >= p.len());
    Ok(ComplexityRecord {
        target: x.clone(),
        size: p.len(),
        witness: Witness::Bits(p),
        search_cap: size_cap,
        budget,
        exact,
    })
}

/// `Σ 2^-|p|` over programs of at most `max_len` bits that output `x`
/// within `budget` steps.
pub fn p_lower(x: &SExpr, m: &dyn Machine, max_len: usize, budget: u64) -> Dyadic {
    let mut sum = Dyadic::zero();
    explore(m, max_len, Budget::Limited(budget), false, |p, r| {
        if r.output() == Some(x) {
            sum += &Dyadic::pow2_neg(p.len() as u32);
        }
        ControlFlow::Continue(())
    });
    sum
}

/// `(cons (eval (read-exp)) (cons (eval (read-exp)) nil))`: reads two
/// programs from the data and pairs their values.
pub fn pair_prefix() -> SExpr {
    parse_full("(cons (eval (read-exp)) (cons (eval (read-exp)) nil))").expect("pair prefix parses")
}

/// A universal-machine program whose output is the pair of the outputs of
/// the two universal-machine programs `xstar` and `ystar`.
pub fn pair_program(xstar: &BitString, ystar: &BitString) -> BitString {
    pair_prefix().to_bits().concat(xstar).concat(ystar)
}

/// Runs `m` on the shortest prefix of the program it halts on, then on the
/// rest, and outputs the two results as a list. Its programs are exactly
/// concatenations of two programs of `m`.
pub struct PairMachine<M>(pub M);

impl<M: Machine> Machine for PairMachine<M> {
    fn run(&self, program: &BitString, budget: Budget) -> RunResult {
        let mut first = None;
        for i in 0..=program.len() {
            match self.0.run(&program.slice(0, i), budget) {
                RunResult::Halted { output, .. } => {
                    first = Some((output, i));
                    break;
                }
                r if r.extensions_may_halt() => continue,
                r => return r,
            }
        }
        let Some((x, split)) = first else {
            return RunResult::Invalid(crate::universal::InvalidReason::OutOfData);
        };
        match self.0.run(&program.slice(split, program.len()), budget) {
            RunResult::Halted { output, .. } => {
                RunResult::Halted { output: SExpr::list(vec![x, output]), consumed: program.len() }
            }
            r => r,
        }
    }

    fn decides_halting(&self) -> bool {
        self.0.decides_halting()
    }

    fn name(&self) -> String {
        format!("pair[{}]", self.0.name())
    }
}

/// `H(x)`, `H(y)`, `H(x, y)` and the mutual information derived from them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoReport {
    pub hx: ComplexityRecord,
    pub hy: ComplexityRecord,
    pub hxy: ComplexityRecord,
}

impl InfoReport {
    /// `H(x) + H(y) - H(x, y)`.
    pub fn mutual(&self) -> i64 {
        self.hx.size as i64 + self.hy.size as i64 - self.hxy.size as i64
    }

    pub fn exact(&self) -> bool {
        self.hx.exact && self.hy.exact && self.hxy.exact
    }
}

impl fmt::Display for InfoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "H(x): {}", self.hx.size)?;
        writeln!(f, "H(y): {}", self.hy.size)?;
        writeln!(f, "H(x,y): {}", self.hxy.size)?;
        writeln!(f, "H(x:y): {}", self.mutual())?;
        if self.exact() {
            write!(f, "status: exact")
        } else {
            write!(f, "status: estimate, not a bound")
        }
    }
}

/// Joint complexity is measured on [`PairMachine`] over `m`, with twice the
/// single-target cap.
pub fn info_measures(
    x: &SExpr,
    y: &SExpr,
    m: &dyn Machine,
    size_cap: usize,
    budget: u64,
) -> Result<InfoReport, NotFound> {
    let hx = h_upper(x, m, size_cap, budget)?;
    let hy = h_upper(y, m, size_cap, budget)?;
    let pair = SExpr::list(vec![x.clone(), y.clone()]);
    let hxy = h_upper(&pair, &PairMachine(m), 2 * size_cap, budget)?;
    Ok(InfoReport { hx, hy, hxy })
}
