//! Building a self-delimiting computer from a stream of requirements
//! `(size, output)`: each request gets the leftmost free codeword of that
//! size. Every request succeeds as long as the sizes so far satisfy
//! `Σ 2^-size ≤ 1`.
//!
//! Codeword `c` stands for the interval `[0.c, 0.c + 2^-|c|)` of the unit
//! interval. Free space is a binary tree of such intervals, so a request
//! costs time proportional to its size.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::interpreter::Budget;
use crate::sexpr::{parse_full, ParseError, SExpr};
use crate::universal::{InvalidReason, Machine, RunResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub size: usize,
    pub output: SExpr,
}

impl Requirement {
    pub fn new(size: usize, output: SExpr) -> Self {
        Requirement { size, output }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RequirementParseError {
    #[error("expected `size expression`")]
    Shape,
    #[error("bad size `{0}`")]
    Size(String),
    #[error(transparent)]
    Expr(#[from] ParseError),
}

/// `size expression`, e.g. `3 (a b)`.
impl FromStr for Requirement {
    type Err = RequirementParseError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let line = line.trim();
        let (size, rest) = line.split_once(char::is_whitespace).ok_or(RequirementParseError::Shape)?;
        let size = size.parse().map_err(|_| RequirementParseError::Size(size.to_string()))?;
        Ok(Requirement { size, output: parse_full(rest.trim())? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("exhausted: no free codeword of {size} bits")]
pub struct Exhausted {
    pub size: usize,
}

const NONE_FREE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
enum State {
    Free,
    Used,
    Split(usize, usize),
}

#[derive(Debug, Clone, Copy)]
struct Node {
    state: State,
    /// Depth below this node of the shallowest free interval, or `NONE_FREE`.
    best: u32,
}

/// First-fit codeword allocator.
#[derive(Debug, Clone)]
pub struct Allocator {
    nodes: Vec<Node>,
    assigned: Vec<(BitString, SExpr)>,
    used: Dyadic,
}

impl Default for Allocator {
    fn default() -> Self {
        Self::new()
    }
}

impl Allocator {
    pub fn new() -> Self {
        Allocator { nodes: vec![Node { state: State::Free, best: 0 }], assigned: Vec::new(), used: Dyadic::zero() }
    }

    /// Assigns the lexicographically least `r.size`-bit codeword that is
    /// neither a prefix nor an extension of one already assigned.
    pub fn request(&mut self, r: Requirement) -> Result<BitString, Exhausted> {
        let size = r.size;
        if u64::from(self.nodes[0].best) > size as u64 {
            return Err(Exhausted { size });
        }
        let mut path = vec![0];
        let mut code = BitString::new();
        let mut at = 0;
        while code.len() < size {
            let depth = code.len() as u64;
            let (left, right) = match self.nodes[at].state {
                State::Split(l, r) => (l, r),
                State::Free => {
                    let l = self.push_free();
                    let r = self.push_free();
                    self.nodes[at].state = State::Split(l, r);
                    (l, r)
                }
                State::Used => unreachable!("the walk only enters nodes with room"),
            };
            let fits = |n: &Node| n.best != NONE_FREE && depth + 1 + u64::from(n.best) <= size as u64;
            if fits(&self.nodes[left]) {
                code.push(0);
                at = left;
            } else {
                code.push(1);
                at = right;
            }
            path.push(at);
        }
        debug_assert!(matches!(self.nodes[at].state, State::Free));
        self.nodes[at] = Node { state: State::Used, best: NONE_FREE };
        for &n in path.iter().rev().skip(1) {
            if let State::Split(l, r) = self.nodes[n].state {
                let b = self.nodes[l].best.min(self.nodes[r].best);
                self.nodes[n].best = b.saturating_add(1);
            }
        }
        self.used += &Dyadic::pow2_neg(size as u32);
        self.assigned.push((code.clone(), r.output));
        Ok(code)
    }

    fn push_free(&mut self) -> usize {
        self.nodes.push(Node { state: State::Free, best: 0 });
        self.nodes.len() - 1
    }

    /// `Σ 2^-|c|` over assigned codewords.
    pub fn measure_used(&self) -> &Dyadic {
        &self.used
    }

    /// Assignments in request order.
    pub fn assigned(&self) -> &[(BitString, SExpr)] {
        &self.assigned
    }

    /// `(start, length)` of each assigned codeword's interval.
    pub fn intervals(&self) -> Vec<(Dyadic, Dyadic)> {
        self.assigned.iter().map(|(c, _)| interval(c)).collect()
    }
}

/// The subinterval `[0.c, 0.c + 2^-|c|)` of the unit interval.
pub fn interval(c: &BitString) -> (Dyadic, Dyadic) {
    let start = c.iter().enumerate().filter(|&(_, b)| b == 1).map(|(i, _)| Dyadic::pow2_neg(i as u32 + 1)).sum();
    (start, Dyadic::pow2_neg(c.len() as u32))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("requirement {index} ({size} bits) could not be met: measure already {used}")]
pub struct BuildError {
    pub index: usize,
    pub size: usize,
    pub used: Dyadic,
}

/// Allocates every requirement in order and returns the resulting
/// computer, or the index of the first request that found no room.
pub fn build_computer(reqs: impl IntoIterator<Item = Requirement>) -> Result<KraftMachine, BuildError> {
    let mut alloc = Allocator::new();
    for (index, r) in reqs.into_iter().enumerate() {
        let size = r.size;
        alloc.request(r).map_err(|_| BuildError { index, size, used: alloc.used.clone() })?;
    }
    Ok(KraftMachine::from_allocator(&alloc))
}

/// The computer a stream of requirements describes: each assigned codeword
/// outputs its requirement's expression.
#[derive(Debug, Clone, Default)]
pub struct KraftMachine {
    codes: BTreeMap<BitString, SExpr>,
    measure: Dyadic,
}

impl KraftMachine {
    pub fn from_allocator(alloc: &Allocator) -> Self {
        KraftMachine { codes: alloc.assigned.iter().cloned().collect(), measure: alloc.used.clone() }
    }

    pub fn programs(&self) -> impl Iterator<Item = (&BitString, &SExpr)> {
        self.codes.iter()
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

impl Machine for KraftMachine {
    /// Looking a program up takes one step.
    fn run(&self, program: &BitString, budget: Budget) -> RunResult {
        if budget == Budget::Limited(0) {
            return RunResult::StillRunning;
        }
        if let Some(output) = self.codes.get(program) {
            return RunResult::Halted { output: output.clone(), consumed: program.len() };
        }
        if let Some((c, _)) = self.codes.range(program.clone()..).next() {
            if program.is_prefix_of(c) {
                return RunResult::Invalid(InvalidReason::OutOfData);
            }
        }
        if (0..program.len()).any(|i| self.codes.contains_key(&program.slice(0, i))) {
            return RunResult::Invalid(InvalidReason::PartialConsumption);
        }
        RunResult::Invalid(InvalidReason::ParseError)
    }

    fn decides_halting(&self) -> bool {
        true
    }

    fn exact_omega(&self) -> Option<Dyadic> {
        Some(self.measure.clone())
    }

    fn name(&self) -> String {
        "kraft".into()
    }
}

impl fmt::Display for KraftMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, o) in &self.codes {
            writeln!(f, "{c} -> {o}")?;
        }
        write!(f, "measure: {}", self.measure)
    }
}
