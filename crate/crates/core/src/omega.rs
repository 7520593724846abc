//! Halting probabilities from below, and the two ways a little side
//! information settles halting: a count of halting programs, or the leading
//! bits of Ω.

use std::ops::ControlFlow;

use rayon::prelude::*;
use thiserror::Error;

use crate::ait::h_upper;
use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::interpreter::Budget;
use crate::sexpr::SExpr;
use crate::universal::{explore, Machine};

/// The halting programs found up to `max_len` bits at `budget` steps each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaEstimate {
    pub value: Dyadic,
    pub max_len: usize,
    pub budget: u64,
    /// In length-then-lexicographic order.
    pub halted: Vec<BitString>,
}

pub fn omega_lower_bound(m: &dyn Machine, max_len: usize, budget: u64) -> OmegaEstimate {
    omega_lower_bound_with(m, max_len, budget, false)
}

/// As [`omega_lower_bound`], optionally spreading each program length over
/// the rayon pool. The result does not depend on `parallel`.
pub fn omega_lower_bound_with(m: &dyn Machine, max_len: usize, budget: u64, parallel: bool) -> OmegaEstimate {
    let mut halted = Vec::new();
    let mut value = Dyadic::zero();
    explore(m, max_len, Budget::Limited(budget), parallel, |p, r| {
        if r.is_halted() {
            value += &Dyadic::pow2_neg(p.len() as u32);
            halted.push(p.clone());
        }
        ControlFlow::Continue(())
    });
    OmegaEstimate { value, max_len, budget, halted }
}

/// The first `n` bits of the machine's known Ω, provided `lower` is close
/// enough (within `2^-n`) that those bits settle halting for every program
/// of at most `n` bits. Bits are never reported for unknown Ω.
pub fn certified_bits(m: &dyn Machine, lower: &Dyadic, n: u32) -> Option<String> {
    let exact = m.exact_omega()?;
    (&lower.clone() + &Dyadic::pow2_neg(n) > exact).then(|| exact.binary_digits(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HaltStatus {
    Halts,
    NeverHalts,
}

impl HaltStatus {
    pub fn name(self) -> &'static str {
        match self {
            HaltStatus::Halts => "halts",
            HaltStatus::NeverHalts => "never",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("inconclusive: gave up at budget {budget} with {halted} halted")]
pub struct Inconclusive {
    pub budget: u64,
    pub halted: usize,
}

/// Runs all programs with doubling budgets until exactly `k` have halted;
/// the rest then never halt, provided `k` really is the number that do.
/// Gives up once the budget would exceed `max_budget`.
pub fn solve_halting_by_count(
    programs: &[BitString],
    k: usize,
    m: &dyn Machine,
    max_budget: u64,
) -> Result<Vec<HaltStatus>, Inconclusive> {
    let mut halted = vec![false; programs.len()];
    let mut count = 0;
    let mut budget = 1u64;
    while count < k {
        if budget > max_budget {
            return Err(Inconclusive { budget: max_budget, halted: count });
        }
        let newly: Vec<bool> = programs
            .par_iter()
            .zip(&halted)
            .map(|(p, &done)| !done && m.run(p, Budget::Limited(budget)).is_halted())
            .collect();
        for (h, n) in halted.iter_mut().zip(newly) {
            if n {
                *h = true;
                count += 1;
            }
        }
        budget = budget.saturating_mul(2);
    }
    Ok(halted.into_iter().map(|h| if h { HaltStatus::Halts } else { HaltStatus::NeverHalts }).collect())
}

/// Decides halting for every program of at most `n` bits from the first `n`
/// bits of Ω: dovetail until the lower bound comes within `2^-n` of `omega`.
/// Any short program still missing would then push the sum past Ω.
///
/// Round `r` looks at lengths up to `n + r` with `2^r (n + r + 1)` steps;
/// after `max_rounds` rounds the answer is inconclusive, as it always is
/// when `omega` overstates the true value.
pub fn halting_oracle_from_omega(
    m: &dyn Machine,
    omega: &Dyadic,
    n: usize,
    max_rounds: u32,
) -> Result<Vec<(BitString, HaltStatus)>, Inconclusive> {
    let margin = Dyadic::pow2_neg(n as u32);
    let mut last = (0, 0);
    for r in 0..max_rounds {
        let len = n + r as usize;
        let budget = (len as u64 + 1).saturating_mul(1u64 << r.min(40));
        let est = omega_lower_bound_with(m, len, budget, true);
        if &est.value + &margin > *omega {
            let statuses = BitString::all_up_to(n)
                .map(|p| {
                    let s = if est.halted.binary_search_by(|h| cmp_len_lex(h, &p)).is_ok() {
                        HaltStatus::Halts
                    } else {
                        HaltStatus::NeverHalts
                    };
                    (p, s)
                })
                .collect();
            return Ok(statuses);
        }
        last = (budget, est.halted.len());
    }
    Err(Inconclusive { budget: last.0, halted: last.1 })
}

fn cmp_len_lex(a: &BitString, b: &BitString) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// `Σ 2^-H(N)` over `N ≤ n_max`, using the budgeted upper bounds on each
/// `H(N)`: a lower bound on a lower bound.
pub fn omega_prime_lower(m: &dyn Machine, n_max: u64, size_cap: usize, budget: u64) -> Dyadic {
    (0..=n_max)
        .filter_map(|n| h_upper(&SExpr::nat(n), m, size_cap, budget).ok())
        .map(|rec| Dyadic::pow2_neg(rec.size as u32))
        .sum()
}
