//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use aitlisp::ait::lisp_value;
use aitlisp::{parse_full, BitString, Dyadic, SExpr};
use rand::Rng;

pub fn bits(s: &str) -> BitString {
    s.parse().unwrap()
}

/// Toy-machine membership, decided directly from the definition: an even
/// number of bits made of twin pairs, ending in the pair `01`.
pub fn toy_member(p: &BitString) -> bool {
    let b = p.as_slice();
    if b.len() < 2 || !b.len().is_multiple_of(2) {
        return false;
    }
    let (body, end) = b.split_at(b.len() - 2);
    end == [0, 1] && body.chunks(2).all(|c| c[0] == c[1])
}

/// Σ over toy codewords of at most `max_len` bits: `2^n` strings of length
/// `n` each take `2n + 2` bits.
pub fn toy_partial_sum(max_len: usize) -> Dyadic {
    let mut sum = Dyadic::zero();
    let mut n = 0;
    while 2 * n + 2 <= max_len {
        sum += &Dyadic::pow2_neg(n as u32 + 2);
        n += 1;
    }
    sum
}

/// Random expressions over most of the dialect, including displays, nested
/// `try`, `eval`, and the occasional infinite loop.
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32) -> SExpr {
    let a = |s: &str| SExpr::atom(s);
    let l = |v: Vec<SExpr>| SExpr::list(v);
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0..=3 => SExpr::nat(rng.gen_range(0..6)),
            4 => a(["a", "b", "x", "y"][rng.gen_range(0..4)]),
            5 => a(["true", "false", "nil"][rng.gen_range(0..3)]),
            _ => SExpr::quote(random_data(rng, 2)),
        };
    }
    let sub = |rng: &mut R| random_expr(rng, depth - 1);
    match rng.gen_range(0..22) {
        0 => l(vec![a("+"), sub(rng), sub(rng)]),
        1 => l(vec![a("-"), sub(rng), sub(rng)]),
        2 => l(vec![a("*"), sub(rng), sub(rng)]),
        3 => l(vec![a("<"), sub(rng), sub(rng)]),
        4 => l(vec![a("="), sub(rng), sub(rng)]),
        5 => l(vec![a("cons"), sub(rng), sub(rng)]),
        6 => l(vec![a("car"), sub(rng)]),
        7 => l(vec![a("cdr"), sub(rng)]),
        8 => l(vec![a("cadr"), sub(rng)]),
        9 => l(vec![a("append"), sub(rng), sub(rng)]),
        10 => l(vec![a("atom"), sub(rng)]),
        11 => l(vec![a("size"), sub(rng)]),
        12 | 13 => l(vec![a("if"), sub(rng), sub(rng), sub(rng)]),
        14 | 15 => l(vec![a("display"), sub(rng)]),
        16 => l(vec![a("let"), a(["x", "y"][rng.gen_range(0..2)]), sub(rng), sub(rng)]),
        17 => l(vec![l(vec![a("lambda"), l(vec![a("x")]), sub(rng)]), sub(rng)]),
        18 => l(vec![a("eval"), SExpr::quote(sub(rng))]),
        19 => {
            let limit = if rng.gen_bool(0.3) { a("no-time-limit") } else { SExpr::nat(rng.gen_range(0..30)) };
            let data = SExpr::quote(SExpr::from_bits(&(0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..2)).collect()));
            l(vec![a("try"), limit, SExpr::quote(sub(rng)), data])
        }
        20 => l(vec![a("read-bit")]),
        _ => {
            if rng.gen_bool(0.2) {
                parse_full("((lambda (f) (f f)) (lambda (f) (f f)))").unwrap()
            } else {
                l(vec![a("bits"), sub(rng)])
            }
        }
    }
}

pub fn random_data<R: Rng>(rng: &mut R, depth: u32) -> SExpr {
    if depth == 0 || rng.gen_bool(0.5) {
        return match rng.gen_range(0..3) {
            0 => SExpr::nat(rng.gen_range(0..10)),
            1 => SExpr::atom(["a", "b", "c", "nil"][rng.gen_range(0..4)]),
            _ => SExpr::nil(),
        };
    }
    SExpr::list((0..rng.gen_range(1..4)).map(|_| random_data(rng, depth - 1)).collect())
}

/// Budget-elegant expressions found by brute force over character strings:
/// every string of at most `cap` characters over the vocabulary's letters,
/// parentheses and blank that reads back as itself and uses only vocabulary
/// atoms. Returns `(text, value text)` pairs.
pub fn brute_force_elegant(vocab: &[&str], cap: usize, budget: u64) -> Vec<(String, String)> {
    let mut alphabet: Vec<char> = vocab.iter().flat_map(|t| t.chars()).collect();
    alphabet.extend(['(', ')', ' ']);
    alphabet.sort_unstable();
    alphabet.dedup();
    let mut canonical = Vec::new();
    let mut buf = String::new();
    extend_strings(&alphabet, cap, 0, &mut buf, &mut |s| {
        let Ok(e) = parse_full(s) else { return };
        if e.to_string() != s || !uses_only(&e, vocab) {
            return;
        }
        canonical.push((s.to_string(), e));
    });
    let valued: Vec<(String, String)> =
        canonical.into_iter().filter_map(|(s, e)| lisp_value(&e, budget).map(|v| (s, v.to_string()))).collect();
    let mut smallest: HashMap<&str, usize> = HashMap::new();
    for (s, v) in &valued {
        let m = smallest.entry(v.as_str()).or_insert(s.len());
        *m = (*m).min(s.len());
    }
    let mut out: Vec<(String, String)> =
        valued.iter().filter(|(s, v)| smallest[v.as_str()] == s.len()).cloned().collect();
    out.sort();
    out
}

fn extend_strings(alphabet: &[char], cap: usize, open: usize, buf: &mut String, visit: &mut impl FnMut(&str)) {
    if !buf.is_empty() {
        visit(buf);
    }
    if buf.len() == cap {
        return;
    }
    for &c in alphabet {
        let open = match c {
            '(' => open + 1,
            ')' if open == 0 => continue,
            ')' => open - 1,
            _ => open,
        };
        buf.push(c);
        extend_strings(alphabet, cap, open, buf, visit);
        buf.pop();
    }
}

fn uses_only(e: &SExpr, vocab: &[&str]) -> bool {
    match e.as_list() {
        Some(items) if !items.is_empty() => items.iter().all(|x| uses_only(x, vocab)),
        _ => vocab.contains(&e.to_string().as_str()),
    }
}
