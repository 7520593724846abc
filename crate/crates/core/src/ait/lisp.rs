use std::collections::BTreeSet;
use std::collections::HashMap;

use rayon::prelude::*;

use super::complexity::{ComplexityRecord, NotFound, Witness};
use crate::bits::BitString;
use crate::interpreter::{try_fresh, Budget};
use crate::sexpr::SExpr;

/// The atoms an expression search may use. Searches are only as strong as
/// their vocabulary: a record found over a small vocabulary is still an
/// upper bound, but elegance claims hold relative to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    atoms: Vec<SExpr>,
}

impl Vocabulary {
    pub fn new(atoms: impl IntoIterator<Item = SExpr>) -> Self {
        let set: BTreeSet<String> = atoms.into_iter().filter(SExpr::is_atom).map(|a| a.to_string()).collect();
        Vocabulary { atoms: set.iter().map(|t| SExpr::atom(t)).collect() }
    }

    /// `0 1 2 a + * ' = car cdr`.
    pub fn small() -> Self {
        Self::from_tokens("0 1 2 a + * ' = car cdr")
    }

    /// Digits, a few letters, `nil`, and the pure list and arithmetic
    /// primitives.
    pub fn standard() -> Self {
        Self::from_tokens("0 1 2 3 4 5 6 7 8 9 a b c nil ' if lambda let car cdr cadr cons append atom = + - * < size")
    }

    /// The atoms of `x` plus quoting and the list primitives: enough to
    /// spell out `x` and to look for something shorter.
    pub fn for_target(x: &SExpr) -> Self {
        let mut atoms = x.atoms();
        atoms.extend(Self::from_tokens("0 1 nil ' car cdr cons").atoms);
        Self::new(atoms)
    }

    pub fn from_tokens(text: &str) -> Self {
        Self::new(text.split_whitespace().map(SExpr::atom))
    }

    pub fn atoms(&self) -> &[SExpr] {
        &self.atoms
    }

    pub fn contains(&self, atom: &SExpr) -> bool {
        self.atoms.contains(atom)
    }
}

/// Canonical expressions over a vocabulary, generated by printed size.
struct Enumerator<'v> {
    vocab: &'v Vocabulary,
    /// `by_size[n]`: expressions of `n` characters, atoms first, then lists,
    /// each group in text order.
    by_size: Vec<Vec<SExpr>>,
    /// `seqs[m]`: nonempty item sequences whose blank-separated text has `m`
    /// characters.
    seqs: Vec<Vec<Vec<SExpr>>>,
}

impl<'v> Enumerator<'v> {
    fn new(vocab: &'v Vocabulary) -> Self {
        Enumerator { vocab, by_size: Vec::new(), seqs: Vec::new() }
    }

    fn size(&mut self, n: usize) -> &[SExpr] {
        while self.by_size.len() <= n {
            let k = self.by_size.len();
            let mut atoms: Vec<SExpr> = self.vocab.atoms.iter().filter(|a| a.size_chars() == k).cloned().collect();
            let mut lists: Vec<SExpr> = if k >= 3 {
                self.seq(k - 2).iter().map(|items| SExpr::list(items.clone())).collect()
            } else {
                Vec::new()
            };
            atoms.sort_by_cached_key(|e| e.to_string());
            lists.sort_by_cached_key(|e| e.to_string());
            atoms.append(&mut lists);
            self.by_size.push(atoms);
        }
        &self.by_size[n]
    }

    fn seq(&mut self, m: usize) -> &[Vec<SExpr>] {
        while self.seqs.len() <= m {
            let k = self.seqs.len();
            let mut out: Vec<Vec<SExpr>> = Vec::new();
            if k > 0 {
                out.extend(self.size(k).iter().map(|e| vec![e.clone()]));
                for first in 1..k.saturating_sub(1) {
                    let heads = self.size(first).to_vec();
                    let tails = self.seq(k - first - 1).to_vec();
                    for h in &heads {
                        for t in &tails {
                            let mut items = Vec::with_capacity(t.len() + 1);
                            items.push(h.clone());
                            items.extend_from_slice(t);
                            out.push(items);
                        }
                    }
                }
            }
            self.seqs.push(out);
        }
        &self.seqs[m]
    }
}

/// Every canonical expression of exactly `n` characters over `vocab`, atoms
/// first and then lists, each in text order. The empty list is never
/// generated as a list; it appears only if `nil` is in the vocabulary.
pub fn expressions_of_size(n: usize, vocab: &Vocabulary) -> Vec<SExpr> {
    Enumerator::new(vocab).size(n).to_vec()
}

/// The value of `e` in a fresh environment with no binary data, if it has
/// one within `budget` steps.
pub fn lisp_value(e: &SExpr, budget: u64) -> Option<SExpr> {
    try_fresh(Budget::Limited(budget), e, BitString::new()).result.ok()
}

/// The first expression in size order whose value is `x`.
pub fn lisp_complexity_upper(
    x: &SExpr,
    vocab: &Vocabulary,
    char_cap: usize,
    budget: u64,
) -> Result<ComplexityRecord, NotFound> {
    let mut en = Enumerator::new(vocab);
    for n in 1..=char_cap {
        let candidates = en.size(n);
        let hit = candidates.par_iter().position_first(|e| lisp_value(e, budget).as_ref() == Some(x));
        if let Some(i) = hit {
            return Ok(ComplexityRecord {
                target: x.clone(),
                witness: Witness::Expr(candidates[i].clone()),
                size: n,
                search_cap: char_cap,
                budget,
                exact: false,
            });
        }
    }
    Err(NotFound { target: x.clone(), cap: char_cap, budget })
}

/// An expression no smaller enumerated expression matches in value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Elegant {
    pub expr: SExpr,
    pub value: SExpr,
}

/// The budget-elegant expressions of at most `char_cap` characters over
/// `vocab`, in size order: each has a value within `budget` steps, and no
/// strictly smaller expression has the same value within `budget`.
/// Expressions of equal size with equal values are all elegant.
///
/// This is elegance relative to the vocabulary and the budget; a larger
/// budget can only reveal more collisions, never undo one.
// Naturals cache their printed length in a cell; hashing ignores it.
#[allow(clippy::mutable_key_type)]
pub fn elegant_search(vocab: &Vocabulary, char_cap: usize, budget: u64) -> Vec<Elegant> {
    let mut en = Enumerator::new(vocab);
    let mut smallest: HashMap<SExpr, usize> = HashMap::new();
    let mut out = Vec::new();
    for n in 1..=char_cap {
        let candidates = en.size(n);
        let values: Vec<Option<SExpr>> = candidates.par_iter().map(|e| lisp_value(e, budget)).collect();
        for (e, v) in candidates.iter().zip(values) {
            let Some(v) = v else { continue };
            let first = *smallest.entry(v.clone()).or_insert(n);
            if first == n {
                out.push(Elegant { expr: e.clone(), value: v });
            }
        }
    }
    out
}
