//! The acceptance suite: one PASS/FAIL line per criterion, each timed
//! against its limit. Exits non-zero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use aitlisp::ait::{
    berry_searcher, elegant_search, h_upper, pair_prefix, pair_program, searcher_constant, BerryOutcome, TheoryHandle,
    Vocabulary, REFERENCE_CONSTANT,
};
use aitlisp::encoders::{Codec, Doubling, HeaderNumeral, TwoHeader};
use aitlisp::interpreter::try_fresh;
use aitlisp::kraft::{build_computer, Allocator, Requirement};
use aitlisp::omega::{
    certified_bits, halting_oracle_from_omega, omega_lower_bound, solve_halting_by_count, HaltStatus,
};
use aitlisp::universal::{run_u, toy_machine, u_program, LispU, RunResult};
use aitlisp::{parse_full, BitStream, BitString, Budget, Dyadic, Interpreter, SExpr, TopLevel};
use common::{bits, brute_force_elegant, random_expr, toy_member, toy_partial_sum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    check: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "worked examples", limit: secs(1), check: worked_examples },
        Criterion { name: "pair-prefix constant", limit: secs(1), check: pair_prefix_constant },
        Criterion { name: "subadditivity witnesses", limit: secs(10), check: subadditivity },
        Criterion { name: "codec suite", limit: secs(30), check: codec_suite },
        Criterion { name: "kraft allocator", limit: secs(60), check: kraft_allocator },
        Criterion { name: "omega at desk scale", limit: secs(120), check: omega_desk_scale },
        Criterion { name: "halting from a count", limit: secs(30), check: halting_by_count },
        Criterion { name: "omega as oracle", limit: secs(30), check: omega_as_oracle },
        Criterion { name: "elegance oracle equivalence", limit: secs(60), check: elegance_equivalence },
        Criterion { name: "counting property", limit: secs(30), check: counting_property },
        Criterion { name: "berry mechanism", limit: secs(60), check: berry_mechanism },
        Criterion { name: "interpreter properties", limit: secs(120), check: interpreter_properties },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > c.limit => Err(format!("{detail}; over the time limit")),
            r => r,
        };
        let timing = format!("{:.2}s of {}s", elapsed.as_secs_f64(), c.limit.as_secs());
        match result {
            Ok(detail) => println!("PASS {:>2}. {} [{timing}] {detail}", i + 1, c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2}. {} [{timing}] {why}", i + 1, c.name);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn secs(n: u64) -> Duration {
    Duration::from_secs(n)
}

fn halted_text(r: &RunResult) -> Option<String> {
    r.output().map(|o| o.to_string())
}

fn worked_examples() -> Outcome {
    let mut it = Interpreter::new();
    let out = it
        .run_source("define (f n)\nif = n 0  1\n   * n (f - n 1)\n(f 4)\n", Budget::Unlimited)
        .map_err(|e| e.to_string())?;
    ensure!(out.len() == 2, "factorial produced {} results", out.len());
    ensure!(out[1] == TopLevel::Value { value: SExpr::nat(24), displays: vec![] }, "(f 4) gave {}", out[1]);

    let quote = parse_full("(' (a b c))").unwrap().to_bits();
    let read_bit = parse_full("(read-bit)").unwrap();
    let runs = [(quote, "(a b c)"), (u_program(&read_bit, &bits("0")), "0"), (u_program(&read_bit, &bits("1")), "1")];
    for (p, want) in &runs {
        let got = halted_text(&run_u(p, Budget::Unlimited));
        ensure!(got.as_deref() == Some(*want), "U gave {got:?}, expected {want}");
    }

    let decoded = Doubling.decode(&mut BitStream::new(bits("00001101"))).map_err(|e| e.to_string())?;
    ensure!(decoded == bits("001"), "00 00 11 01 decoded to {decoded}");
    Ok("(f 4) = 24; U gives (a b c), 0, 1; 00 00 11 01 decodes to 001".into())
}

fn pair_prefix_constant() -> Outcome {
    let n = pair_prefix().to_bits().len();
    ensure!(n == 432, "pair prefix is {n} bits");
    Ok(format!("{n} bits"))
}

fn subadditivity() -> Outcome {
    let read_bit = parse_full("(read-bit)").unwrap();
    let two_bits = parse_full("(cons (read-bit) (cons (read-bit) nil))").unwrap();
    let read_exp = parse_full("(read-exp)").unwrap();
    let library = [
        parse_full("(' (a b c))").unwrap().to_bits(),
        parse_full("(' nil)").unwrap().to_bits(),
        parse_full("(+ 2 3)").unwrap().to_bits(),
        parse_full("(append (' (x y)) (' (z)))").unwrap().to_bits(),
        u_program(&read_bit, &bits("0")),
        u_program(&read_bit, &bits("1")),
        u_program(&two_bits, &bits("10")),
        u_program(&read_exp, &parse_full("(* 6 7)").unwrap().to_bits()),
    ];
    let mut pairs = 0;
    for x in &library {
        let ox = run_u(x, Budget::Unlimited).output().cloned().ok_or_else(|| format!("{x} does not halt"))?;
        for y in &library {
            let oy = run_u(y, Budget::Unlimited).output().cloned().ok_or_else(|| format!("{y} does not halt"))?;
            let p = pair_program(x, y);
            ensure!(p.len() == x.len() + y.len() + 432, "pair program has {} bits", p.len());
            let want = SExpr::list(vec![ox.clone(), oy.clone()]);
            let got = run_u(&p, Budget::Unlimited);
            ensure!(got.output() == Some(&want), "pair of {ox} and {oy} gave {got}");
            pairs += 1;
        }
    }
    ensure!(pairs >= 20, "only {pairs} pairs");
    Ok(format!("{pairs} pairs halt with both outputs at |x*| + |y*| + 432 bits"))
}

/// Length of the base-two numeral of `n`, empty for zero.
fn numeral_len(n: usize) -> usize {
    (usize::BITS - n.leading_zeros()) as usize
}

fn codec_suite() -> Outcome {
    type LengthLaw = fn(usize) -> usize;
    let codecs: [(&dyn Codec, LengthLaw); 3] = [
        (&Doubling, |n| 2 * n + 2),
        (&HeaderNumeral, |n| 2 * numeral_len(n) + 2 + n),
        (&TwoHeader, |n| 2 * numeral_len(numeral_len(n)) + 2 + numeral_len(n) + n),
    ];
    let strings: Vec<BitString> = (0..=10).flat_map(BitString::all_of_len).collect();
    ensure!(strings.len() == 2047, "{} strings", strings.len());
    let junk = [bits(""), bits("0"), bits("1"), bits("0110100111")];
    for (codec, law) in codecs {
        let mut words = Vec::with_capacity(strings.len());
        for x in &strings {
            let code = codec.encode(x).map_err(|e| e.to_string())?;
            ensure!(code.len() == law(x.len()), "{}: {x} encodes to {} bits", codec.name(), code.len());
            for j in &junk {
                let mut s = BitStream::new(code.concat(j));
                let back = codec.decode(&mut s).map_err(|e| e.to_string())?;
                ensure!(&back == x && s.position() == code.len(), "{}: {x} did not round-trip", codec.name());
            }
            words.push(code);
        }
        // Sorted lexicographically, a prefix sits right before some string
        // it prefixes, so neighbours are enough.
        words.sort();
        for w in words.windows(2) {
            ensure!(!w[0].is_prefix_of(&w[1]), "{}: {} prefixes {}", codec.name(), w[0], w[1]);
        }
    }
    Ok("2047 strings x 3 codecs: round trip, length laws, prefix-free".into())
}

/// Sizes are kept at most `MAX_SIZE` so sums are whole multiples of
/// `2^-MAX_SIZE` and can be tracked in integers.
const MAX_SIZE: usize = 16;
const UNIT: u64 = 1 << MAX_SIZE;

fn fitting_stream(rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut used = 0u64;
    for _ in 0..rng.gen_range(0..40) {
        let s = rng.gen_range(1..=MAX_SIZE);
        if used + (UNIT >> s) <= UNIT {
            used += UNIT >> s;
            sizes.push(s);
        }
    }
    if rng.gen_bool(0.5) {
        // Fill the rest exactly, in random order: the sum becomes 1.
        let mut rest = UNIT - used;
        for s in (1..=MAX_SIZE).rev() {
            if rest & (UNIT >> s) != 0 {
                rest -= UNIT >> s;
                let at = rng.gen_range(0..=sizes.len());
                sizes.insert(at, s);
            }
        }
    }
    sizes
}

fn check_incrementally(sizes: &[usize]) -> Result<(), String> {
    let mut alloc = Allocator::new();
    let mut codes: Vec<BitString> = Vec::new();
    for (i, &s) in sizes.iter().enumerate() {
        let code = alloc
            .request(Requirement::new(s, SExpr::nat(i as u64)))
            .map_err(|e| format!("request {i} of {sizes:?}: {e}"))?;
        ensure!(code.len() == s, "asked for {s} bits, got {code}");
        for c in &codes {
            ensure!(!c.is_prefix_of(&code) && !code.is_prefix_of(c), "{c} and {code} after request {i}");
        }
        codes.push(code);
    }
    Ok(())
}

fn kraft_allocator() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b72_6166);
    let mut full = 0;
    for _ in 0..10_000 {
        let sizes = fitting_stream(&mut rng);
        check_incrementally(&sizes)?;
        if sizes.iter().map(|&s| UNIT >> s).sum::<u64>() == UNIT {
            full += 1;
        }
    }
    for _ in 0..1_000 {
        let mut sizes = fitting_stream(&mut rng);
        let mut used: u64 = sizes.iter().map(|&s| UNIT >> s).sum();
        // Random pieces until one pushes the sum past 1, then a few extras.
        let overflow_at = loop {
            let s = rng.gen_range(1..=MAX_SIZE);
            sizes.push(s);
            used += UNIT >> s;
            if used > UNIT {
                break sizes.len() - 1;
            }
        };
        sizes.extend((0..rng.gen_range(0..5)).map(|_| rng.gen_range(1..=MAX_SIZE)));
        check_incrementally(&sizes[..overflow_at])?;
        let reqs = sizes.iter().enumerate().map(|(i, &s)| Requirement::new(s, SExpr::nat(i as u64)));
        match build_computer(reqs) {
            Ok(_) => return Err(format!("{sizes:?} overflows but allocated")),
            Err(e) => ensure!(e.index <= overflow_at, "{sizes:?} failed at {} after {overflow_at}", e.index),
        }
    }
    Ok(format!("10000 fitting streams ({full} summing to exactly 1), 1000 overflowing streams"))
}

fn omega_desk_scale() -> Outcome {
    let toy = toy_machine();
    for len in 0..=16 {
        let v = omega_lower_bound(&toy, len, 1000).value;
        ensure!(v == toy_partial_sum(len), "L = {len}: {v} vs {}", toy_partial_sum(len));
    }
    let at8 = omega_lower_bound(&toy, 8, 1000).value;
    ensure!(at8 == Dyadic::new(15u32, 5), "L = 8 gave {at8}");

    let budgets = [0, 1, 2, 3, 5, 8, 1000];
    let grid: Vec<Vec<Dyadic>> =
        (0..=16).map(|l| budgets.iter().map(|&t| omega_lower_bound(&toy, l, t).value).collect()).collect();
    for l in 0..=16 {
        for j in 0..budgets.len() {
            ensure!(l == 16 || grid[l][j] <= grid[l + 1][j], "not monotone in L at L = {l}");
            ensure!(j + 1 == budgets.len() || grid[l][j] <= grid[l][j + 1], "not monotone in t at L = {l}");
        }
    }

    let lb = omega_lower_bound(&toy, 16, 1000).value;
    let certified = certified_bits(&toy, &lb, 4);
    ensure!(certified.as_deref() == Some("0.1000"), "certified bits {certified:?}");
    for len in 10..=16 {
        let v = omega_lower_bound(&toy, len, 1000).value;
        let rounded = (&v + &Dyadic::pow2_neg(5)).truncate_bits(4);
        ensure!(rounded == Dyadic::pow2_neg(1), "L = {len} rounds to {rounded}");
    }

    let mut prev = Dyadic::zero();
    let mut report = Vec::new();
    for len in [8, 16, 24] {
        let est = omega_lower_bound(&LispU, len, 100);
        ensure!(est.value >= prev && est.value <= Dyadic::one(), "LISP U at L = {len}: {}", est.value);
        let tighter = omega_lower_bound(&LispU, len.min(16), 10).value;
        ensure!(tighter <= omega_lower_bound(&LispU, len.min(16), 100).value, "LISP U not monotone in t");
        report.push(format!("L={len}: {} halting", est.halted.len()));
        prev = est.value;
    }
    Ok(format!("toy sums exact for L <= 16, digits 0.1000; LISP U {}", report.join(", ")))
}

fn random_toy_program(rng: &mut ChaCha8Rng) -> BitString {
    if rng.gen_bool(0.5) {
        let mut p = BitString::new();
        for _ in 0..rng.gen_range(0..5) {
            let b = rng.gen_range(0..2);
            p.push(b);
            p.push(b);
        }
        p.push(0);
        p.push(1);
        p
    } else {
        (0..rng.gen_range(0..11)).map(|_| rng.gen_range(0..2)).collect()
    }
}

fn halting_by_count() -> Outcome {
    let toy = toy_machine();
    let mut rng = ChaCha8Rng::seed_from_u64(0x636f_756e);
    let mut total = 0;
    for _ in 0..100 {
        let programs: Vec<BitString> = (0..rng.gen_range(1..16)).map(|_| random_toy_program(&mut rng)).collect();
        let truth: Vec<HaltStatus> =
            programs.iter().map(|p| if toy_member(p) { HaltStatus::Halts } else { HaltStatus::NeverHalts }).collect();
        let k = truth.iter().filter(|s| **s == HaltStatus::Halts).count();
        let got = solve_halting_by_count(&programs, k, &toy, 1 << 20).map_err(|e| e.to_string())?;
        ensure!(got == truth, "{programs:?}: {got:?}");
        total += programs.len();
    }
    Ok(format!("100 sets, {total} programs, all match membership"))
}

fn omega_as_oracle() -> Outcome {
    let toy = toy_machine();
    let report = halting_oracle_from_omega(&toy, &Dyadic::pow2_neg(1), 6, 24).map_err(|e| e.to_string())?;
    ensure!(report.len() == 127, "{} programs classified", report.len());
    for (p, status) in &report {
        ensure!((*status == HaltStatus::Halts) == toy_member(p), "{p} classified {}", status.name());
    }
    let halting = report.iter().filter(|(_, s)| *s == HaltStatus::Halts).count();
    Ok(format!("127 programs of length <= 6, {halting} halt"))
}

fn elegance_equivalence() -> Outcome {
    let budget = 1000;
    let tokens = ["0", "1", "2", "a", "+", "*", "'", "=", "car", "cdr"];
    let vocab = Vocabulary::small();
    ensure!(
        vocab.atoms().iter().map(|a| a.to_string()).collect::<Vec<_>>().len() == tokens.len()
            && tokens.iter().all(|t| vocab.contains(&SExpr::atom(t))),
        "small vocabulary is not {tokens:?}"
    );
    let mut found: Vec<(String, String)> =
        elegant_search(&vocab, 6, budget).into_iter().map(|e| (e.expr.to_string(), e.value.to_string())).collect();
    found.sort();
    let brute = brute_force_elegant(&tokens, 6, budget);
    if found != brute {
        let extra: Vec<_> = found.iter().filter(|x| !brute.contains(x)).take(5).collect();
        let missing: Vec<_> = brute.iter().filter(|x| !found.contains(x)).take(5).collect();
        return Err(format!("search has extra {extra:?}, misses {missing:?}"));
    }
    Ok(format!("{} elegant expressions agree", found.len()))
}

fn counting_property() -> Outcome {
    let toy = toy_machine();
    let mut sizes = Vec::new();
    // A toy program for x takes 2|x| + 2 bits, so every x with H(x) <= 12
    // has at most 5 bits; 6-bit strings confirm nothing is missed.
    for x in (0..=6).flat_map(BitString::all_of_len) {
        match h_upper(&SExpr::from_bits(&x), &toy, 12, 1000) {
            Ok(rec) => {
                ensure!(rec.exact, "H({x}) not exact");
                ensure!(rec.size == 2 * x.len() + 2, "H({x}) = {}", rec.size);
                sizes.push(rec.size);
            }
            Err(_) => ensure!(2 * x.len() + 2 > 12, "no program found for {x}"),
        }
    }
    for k in 0..=12 {
        let count = sizes.iter().filter(|&&s| s <= k).count();
        ensure!(count < 1 << k, "{count} strings with H <= {k}");
    }
    let at12 = sizes.iter().filter(|&&s| s <= 12).count();
    Ok(format!("|{{x : H(x) <= k}}| < 2^k for k <= 12 ({at12} at k = 12)"))
}

fn berry_mechanism() -> Outcome {
    let schedule = [1_000, 10_000, 100_000, 1_000_000];
    let cap = Duration::from_secs(25);
    let c1 = searcher_constant();
    let c2 = searcher_constant();
    ensure!(c1 == c2, "constant changed between runs: {c1} then {c2}");

    let sound = berry_searcher(&TheoryHandle::sound_mock(), &schedule, cap);
    match &sound {
        BerryOutcome::NotFound { last_budget, c_searcher, .. } => {
            ensure!(*last_budget == 1_000_000, "sound run stopped at budget {last_budget}");
            ensure!(*c_searcher == c1, "sound run used constant {c_searcher}");
        }
        other => return Err(format!("sound theory gave {other:?}")),
    }

    let mut line = String::new();
    for _ in 0..2 {
        match berry_searcher(&TheoryHandle::unsound_mock(), &schedule, cap) {
            BerryOutcome::Found { n, c_searcher, expr, value, .. } => {
                ensure!(c_searcher == c1, "unsound run used constant {c_searcher}");
                let size = expr.size_chars();
                ensure!(n + c_searcher < size, "{n} + {c_searcher} >= {size}");
                let direct = try_fresh(Budget::Limited(1_000_000), &expr, BitString::new());
                ensure!(direct.result.as_ref() == Ok(&value), "found expression evaluates to {direct:?}");
                let next = format!("{n} + {c_searcher} = {} < {size}, value {value}", n + c_searcher);
                ensure!(line.is_empty() || line == next, "runs differ: {line} then {next}");
                line = next;
            }
            other => return Err(format!("unsound theory gave {other:?}")),
        }
    }
    println!("     berry: sound theory not found up to 1000000 steps");
    println!("     berry: unsound theory {line}");
    println!("     berry: searcher constant {c1} (reference {REFERENCE_CONSTANT})");
    Ok(format!("c_searcher = {c1} (reference {REFERENCE_CONSTANT}), stable"))
}

const PROPERTY_BUDGET: u64 = 5_000;

fn interpreter_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6576_616c);
    let (mut succeeded, mut timed_out) = (0, 0);
    for i in 0..10_000 {
        let e = random_expr(&mut rng, 4);
        let run = |t: u64| try_fresh(Budget::Limited(t), &e, BitString::new());
        let first = run(PROPERTY_BUDGET);
        ensure!(first == run(PROPERTY_BUDGET), "#{i} {e}: not deterministic");

        match &first.result {
            Ok(_) => {
                succeeded += 1;
                let s = first.steps;
                ensure!(run(s) == first, "#{i} {e}: differs at exactly {s} steps");
                ensure!(run(2 * PROPERTY_BUDGET) == first, "#{i} {e}: differs with a larger budget");
                if s > 0 {
                    let short = run(s - 1);
                    ensure!(short.result == Err(aitlisp::Abort::OutOfTime), "#{i} {e}: {s} - 1 steps gave {short:?}");
                }
            }
            Err(aitlisp::Abort::OutOfTime) => {
                timed_out += 1;
                let less = run(PROPERTY_BUDGET / 2);
                ensure!(less.result == Err(aitlisp::Abort::OutOfTime), "#{i} {e}: halted on a smaller budget");
            }
            Err(_) => {
                ensure!(run(2 * PROPERTY_BUDGET).result == first.result, "#{i} {e}: failure changed with budget");
            }
        }

        // A try inside a try: the inner displays stay inside.
        let nested =
            SExpr::list(vec![SExpr::atom("try"), SExpr::nat(PROPERTY_BUDGET), SExpr::quote(e.clone()), SExpr::nil()]);
        let outer = try_fresh(Budget::Unlimited, &nested, BitString::new());
        ensure!(outer.captures.is_empty(), "#{i} {e}: inner displays leaked: {:?}", outer.captures);
        ensure!(outer.result == Ok(first.to_sexpr()), "#{i} {e}: nested try gave {:?}", outer.result);

        // Untaken branches are never evaluated.
        let marker = SExpr::list(vec![SExpr::atom("display"), SExpr::quote(SExpr::atom("untaken-branch"))]);
        let yes = SExpr::list(vec![SExpr::atom("="), SExpr::nat(0), SExpr::nat(0)]);
        let no = SExpr::list(vec![SExpr::atom("="), SExpr::nat(0), SExpr::nat(1)]);
        for form in [
            SExpr::list(vec![SExpr::atom("if"), yes, e.clone(), marker.clone()]),
            SExpr::list(vec![SExpr::atom("if"), no, marker, e.clone()]),
        ] {
            let got = try_fresh(Budget::Limited(PROPERTY_BUDGET + 2), &form, BitString::new());
            ensure!(got.result == first.result, "#{i} {form}: value {:?}", got.result);
            ensure!(got.captures == first.captures, "#{i} {form}: captures {:?}", got.captures);
            if first.result.is_ok() {
                ensure!(got.steps == first.steps + 2, "#{i} {form}: {} steps vs {}", got.steps, first.steps);
            }
        }
    }
    Ok(format!("10000 expressions ({succeeded} values, {timed_out} out of time)"))
}
