use std::fmt;
use std::time::{Duration, Instant};

use crate::bits::BitString;
use crate::interpreter::{try_fresh, Abort, Budget};
use crate::sexpr::{parse_full, SExpr};

/// The constant quoted for the original dialect's searcher. Ours is
/// measured by [`searcher_constant`].
pub const REFERENCE_CONSTANT: usize = 410;

/// A formal theory as a program: an expression that never finishes and
/// displays its theorems one by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryHandle {
    pub source: SExpr,
    pub size_chars: usize,
}

impl TheoryHandle {
    pub fn new(source: SExpr) -> Self {
        let size_chars = source.size_chars();
        TheoryHandle { source, size_chars }
    }

    pub fn parse(text: &str) -> Result<Self, crate::sexpr::ParseError> {
        parse_full(text).map(Self::new)
    }

    /// Asserts `(elegant 0)`, ..., `(elegant 9)` over and over. Every
    /// theorem is true: nothing is shorter than a one-digit numeral.
    pub fn sound_mock() -> Self {
        Self::parse(
            "(let (emit k) (let d (display (cons elegant (cons k nil))) \
             (emit (if (= k 9) 0 (+ k 1)))) (emit 0))",
        )
        .expect("sound mock parses")
    }

    /// Asserts `(elegant 0)`, `(elegant (+ 1 0))`, `(elegant (+ 1 (+ 1 0)))`,
    /// ...: all false past the first, since each sum has a shorter numeral.
    pub fn unsound_mock() -> Self {
        Self::parse(
            "(let (emit e) (let d (display (cons elegant (cons e nil))) \
             (emit (cons + (cons 1 (cons e nil))))) (emit 0))",
        )
        .expect("unsound mock parses")
    }

    /// Proves nothing and stops at once.
    pub fn empty() -> Self {
        Self::new(SExpr::nil())
    }
}

/// What a theory displayed within a budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryRun {
    pub theorems: Vec<SExpr>,
    /// The value, if the theory finished. Legal, but a theory is expected to
    /// run forever.
    pub finished: Option<SExpr>,
}

impl TheoryRun {
    /// Theorems not of the shape `(elegant e)`.
    pub fn malformed(&self) -> impl Iterator<Item = &SExpr> {
        self.theorems.iter().filter(|t| elegance_claim(t).is_none())
    }
}

/// The expression claimed elegant by a theorem `(elegant e)`.
pub(crate) fn elegance_claim(theorem: &SExpr) -> Option<&SExpr> {
    match theorem.as_list()? {
        [head, e] if head.is_symbol("elegant") => Some(e),
        _ => None,
    }
}

pub fn run_theory(th: &TheoryHandle, budget: u64) -> TheoryRun {
    let outcome = try_fresh(Budget::Limited(budget), &th.source, BitString::new());
    TheoryRun { theorems: outcome.captures, finished: outcome.result.ok() }
}

/// Written in the dialect itself. It measures its theory, then runs it
/// under doubling time limits until some theorem claims an expression
/// longer than the searcher is elegant, and evaluates that expression.
const SEARCHER: &str = "((lambda (theory) \
(let bound (+ (size theory) CONSTANT) \
(let (scan ths) (if (atom ths) false \
(if (= elegant (car (car ths))) \
(if (< bound (size (cadr (car ths)))) (car ths) (scan (cdr ths))) \
(scan (cdr ths)))) \
(let (loop t) (let found (scan (car (cdr (cdr (try t theory nil))))) \
(if (atom found) (loop (* 2 t)) (eval (display (cadr found))))) \
(loop 1))))) \
(' THEORY))";

fn searcher_with(theory: &SExpr, constant: usize) -> SExpr {
    let text = SEARCHER.replace("CONSTANT", &constant.to_string());
    let template = parse_full(&text).expect("searcher parses");
    substitute(&template, theory)
}

fn substitute(e: &SExpr, theory: &SExpr) -> SExpr {
    match e {
        _ if e.is_symbol("THEORY") => theory.clone(),
        SExpr::List(l) if !e.is_nil() => SExpr::list(l.items().iter().map(|x| substitute(x, theory)).collect()),
        _ => e.clone(),
    }
}

/// `c` such that the searcher for any theory of `N` characters is exactly
/// `N + c` characters long. The searcher embeds `c` as a numeral, so this
/// is a fixed point.
pub fn searcher_constant() -> usize {
    let probe = SExpr::atom("x");
    let mut c = 0;
    loop {
        let next = searcher_with(&probe, c).size_chars() - probe.size_chars();
        if next == c {
            return c;
        }
        c = next;
    }
}

/// The searcher for `th`, with its own size built in.
pub fn berry_source(th: &TheoryHandle) -> SExpr {
    searcher_with(&th.source, searcher_constant())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BerryOutcome {
    /// The theory claimed `expr` elegant though it is longer than the
    /// searcher, and the searcher produced the same `value`.
    Found {
        n: usize,
        c_searcher: usize,
        expr: SExpr,
        value: SExpr,
        budget: u64,
    },
    NotFound {
        n: usize,
        c_searcher: usize,
        last_budget: u64,
        skipped: usize,
    },
}

impl fmt::Display for BerryOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BerryOutcome::Found { n, c_searcher, expr, value, budget } => {
                writeln!(f, "theory-size: {n}")?;
                writeln!(f, "searcher-constant: {c_searcher} (reference {REFERENCE_CONSTANT})")?;
                writeln!(f, "searcher-size: {}", n + c_searcher)?;
                writeln!(f, "budget: {budget}")?;
                writeln!(f, "found: {expr}")?;
                writeln!(f, "found-size: {}", expr.size_chars())?;
                writeln!(f, "value: {value}")?;
                write!(
                    f,
                    "contradiction: {} + {} = {} < {}, yet the searcher outputs the same value",
                    n,
                    c_searcher,
                    n + c_searcher,
                    expr.size_chars()
                )
            }
            BerryOutcome::NotFound { n, c_searcher, last_budget, skipped } => {
                writeln!(f, "theory-size: {n}")?;
                writeln!(f, "searcher-constant: {c_searcher} (reference {REFERENCE_CONSTANT})")?;
                writeln!(f, "searcher-size: {}", n + c_searcher)?;
                writeln!(f, "budget: {last_budget}")?;
                if *skipped > 0 {
                    writeln!(f, "skipped-malformed: {skipped}")?;
                }
                write!(f, "not-found")
            }
        }
    }
}

/// Runs the searcher for `th` once per budget in `schedule`, stopping at
/// the first budget where it finishes or when `wall_cap` has passed.
pub fn berry_searcher(th: &TheoryHandle, schedule: &[u64], wall_cap: Duration) -> BerryOutcome {
    let c_searcher = searcher_constant();
    let source = berry_source(th);
    debug_assert_eq!(source.size_chars(), th.size_chars + c_searcher);
    let start = Instant::now();
    let mut last_budget = 0;
    for &budget in schedule {
        if start.elapsed() > wall_cap {
            break;
        }
        last_budget = budget;
        let outcome = try_fresh(Budget::Limited(budget), &source, BitString::new());
        match outcome.result {
            Ok(value) => {
                let expr = outcome.captures.last().cloned().expect("the searcher displays what it found");
                return BerryOutcome::Found { n: th.size_chars, c_searcher, expr, value, budget };
            }
            Err(Abort::OutOfTime | Abort::OutOfData | Abort::ParseError) => {}
        }
    }
    let skipped = run_theory(th, last_budget).malformed().count();
    BerryOutcome::NotFound { n: th.size_chars, c_searcher, last_budget, skipped }
}
