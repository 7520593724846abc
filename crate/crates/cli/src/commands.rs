use std::fmt::{self, Write as _};
use std::fs;
use std::io::{self, BufRead};
use std::path::Path;
use std::time::Duration;

use aitlisp::ait::{
    berry_searcher, elegant_search, h_upper, info_measures, lisp_complexity_upper, p_lower, pair_prefix, pair_program,
    BerryOutcome, ComplexityRecord, TheoryHandle, Vocabulary,
};
use aitlisp::encoders::{Codec, Doubling, ElegantHeader, HeaderNumeral, TwoHeader};
use aitlisp::kraft::{Allocator, Requirement};
use aitlisp::omega::{
    certified_bits, halting_oracle_from_omega, omega_lower_bound_with, omega_prime_lower, solve_halting_by_count,
};
use aitlisp::report;
use aitlisp::sexpr::{FormReader, ParseError, ParseErrorKind};
use aitlisp::universal::{run_u, toy_machine, u_program, LispU, Machine, NumeralMachine};
use aitlisp::{parse_full, ArityTable, BitStream, BitString, Budget, Dyadic, Interpreter, SExpr, TopLevel};

use crate::{CodecArgs, ComplexityArgs, ComplexityMachine, MachineArg, OmegaArgs, Scheme, Verb};

/// Universal-machine Ω is only attempted for programs this short.
const LISPU_MAX_LEN: usize = 24;

/// Rounds of dovetailing before the Ω oracle gives up.
const ORACLE_ROUNDS: u32 = 24;

/// Budget ceiling for the counting solver.
const COUNT_MAX_BUDGET: u64 = 1 << 24;

#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit code 2.
    Usage(String),
    /// The computation ran but found nothing or gave up: exit code 1.
    Domain(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Domain(m) => write!(f, "error: {m}"),
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(e: impl fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn domain(e: impl fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn budget_of(b: Option<u64>) -> Budget {
    b.map_or(Budget::Unlimited, Budget::Limited)
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_bits(text: &str) -> Result<BitString, Failure> {
    let text = text.trim();
    let cleaned: String =
        if text.starts_with('(') { text.to_string() } else { text.chars().filter(|c| !c.is_whitespace()).collect() };
    cleaned.parse().map_err(|e| usage(format!("bad bit string: {e}")))
}

fn parse_expr(text: &str) -> Result<SExpr, Failure> {
    parse_full(text).map_err(usage)
}

pub fn dispatch(verb: Verb, out: &mut String) -> Outcome {
    match verb {
        Verb::Run { file, budget } => run_file(&read_file(&file)?, budget_of(budget), out),
        Verb::Repl { budget } => repl(budget_of(budget), out),
        Verb::U { file, budget } => {
            let p = parse_bits(&read_file(&file)?)?;
            let r = run_u(&p, budget_of(budget));
            writeln!(out, "{}", report::run_result(&r)).unwrap();
            if r.is_halted() {
                Ok(())
            } else {
                Err(domain("the program did not halt"))
            }
        }
        Verb::Bits { expr, count, data } => {
            let e = parse_expr(&expr)?;
            let data = data.as_deref().map(parse_bits).transpose()?.unwrap_or_default();
            let bits = u_program(&e, &data);
            if count {
                writeln!(out, "{}", bits.len()).unwrap();
            } else {
                writeln!(out, "{bits}").unwrap();
            }
            Ok(())
        }
        Verb::Encode { bits, codec } => {
            let x = parse_bits(&bits)?;
            with_codec(&codec, |c| {
                let code = c.encode(&x).map_err(domain)?;
                writeln!(out, "{code}").unwrap();
                writeln!(out, "length: {}", code.len()).unwrap();
                Ok(())
            })
        }
        Verb::Decode { bits, codec } => {
            let mut s = BitStream::new(parse_bits(&bits)?);
            with_codec(&codec, |c| {
                let x = c.decode(&mut s).map_err(domain)?;
                writeln!(out, "{x}").unwrap();
                writeln!(out, "consumed: {}", s.position()).unwrap();
                Ok(())
            })
        }
        Verb::Kraft { file } => {
            let text = match file {
                Some(f) => read_file(&f)?,
                None => io::read_to_string(io::stdin()).map_err(usage)?,
            };
            kraft(&text, out)
        }
        Verb::Omega(args) => omega(&args, out),
        Verb::Elegant { cap, budget, vocab } => {
            let vocab = vocab.map_or_else(Vocabulary::small, |v| Vocabulary::from_tokens(&v));
            let found = elegant_search(&vocab, cap, budget);
            for el in &found {
                writeln!(out, "{} => {}", el.expr, el.value).unwrap();
            }
            writeln!(out, "elegant: {}", found.len()).unwrap();
            Ok(())
        }
        Verb::Complexity(args) => complexity(&args, out),
        Verb::Pair { xstar, ystar, budget } => pair(xstar.as_deref(), ystar.as_deref(), budget_of(budget), out),
        Verb::Paradox { theory, schedule, wall_secs } => paradox(&theory, &schedule, wall_secs, out),
    }
}

fn write_top_level(t: &TopLevel, out: &mut String) {
    let displays = match t {
        TopLevel::Value { displays, .. } | TopLevel::Aborted { displays, .. } => displays.as_slice(),
        TopLevel::Defined { .. } => &[],
    };
    for d in displays {
        writeln!(out, "display {d}").unwrap();
    }
    writeln!(out, "{t}").unwrap();
}

fn run_file(text: &str, budget: Budget, out: &mut String) -> Outcome {
    let mut it = Interpreter::new();
    let mut reader = FormReader::new(text).map_err(usage)?;
    while let Some(form) = reader.next_form(it.arity_table()) {
        let (form, _) = form.map_err(usage)?;
        write_top_level(&it.run_form(&form, budget), out);
    }
    Ok(())
}

fn incomplete(e: &ParseError) -> bool {
    matches!(e.kind, ParseErrorKind::MissingClose | ParseErrorKind::MissingArguments { .. })
}

/// Parses every form of `text`, following the definitions it makes, without
/// evaluating anything.
fn check_forms(text: &str, table: &ArityTable) -> Result<(), ParseError> {
    let mut table = table.clone();
    let mut reader = FormReader::new(text)?;
    while let Some(form) = reader.next_form(&table) {
        let (form, _) = form?;
        if let Some([head, target, ..]) = form.as_list() {
            if let (true, Some([name, params @ ..])) = (head.is_symbol("define"), target.as_list()) {
                if let Some(n) = name.as_symbol() {
                    table.define(n, params.len());
                }
            }
        }
    }
    Ok(())
}

/// Lines accumulate until they hold complete forms, which are then
/// evaluated in order.
fn repl(budget: Budget, out: &mut String) -> Outcome {
    let mut it = Interpreter::new();
    let mut buffer = String::new();
    for line in io::stdin().lock().lines() {
        buffer.push_str(&line.map_err(usage)?);
        buffer.push('\n');
        if buffer.trim().is_empty() {
            buffer.clear();
            continue;
        }
        match check_forms(&buffer, it.arity_table()) {
            Err(e) if incomplete(&e) => continue,
            Err(e) => {
                writeln!(out, "error: {e}").unwrap();
            }
            Ok(()) => {
                let mut reader = FormReader::new(&buffer).map_err(usage)?;
                while let Some(Ok((form, _))) = reader.next_form(it.arity_table()) {
                    write_top_level(&it.run_form(&form, budget), out);
                }
            }
        }
        buffer.clear();
    }
    if buffer.trim().is_empty() {
        Ok(())
    } else {
        Err(usage("incomplete form at end of input"))
    }
}

fn with_codec(args: &CodecArgs, f: impl FnOnce(&dyn Codec) -> Outcome) -> Outcome {
    match args.scheme {
        Scheme::Doubling => f(&Doubling),
        Scheme::Header => f(&HeaderNumeral),
        Scheme::TwoHeader => f(&TwoHeader),
        Scheme::Elegant => f(&ElegantHeader { machine: &NumeralMachine, size_cap: args.cap, budget: args.budget }),
    }
}

fn kraft(text: &str, out: &mut String) -> Outcome {
    let mut alloc = Allocator::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r: Requirement = line.parse().map_err(|e| usage(format!("line {}: {e}", i + 1)))?;
        let output = r.output.clone();
        match alloc.request(r) {
            Ok(code) => writeln!(out, "{code} -> {output}").unwrap(),
            Err(e) => {
                writeln!(out, "measure: {}", report::measure(alloc.measure_used())).unwrap();
                return Err(domain(format!("line {}: {e}", i + 1)));
            }
        }
    }
    writeln!(out, "measure: {}", report::measure(alloc.measure_used())).unwrap();
    Ok(())
}

fn machine(arg: MachineArg) -> Box<dyn Machine> {
    match arg {
        MachineArg::Toy => Box::new(toy_machine()),
        MachineArg::Numeral => Box::new(NumeralMachine),
        MachineArg::Lispu => Box::new(LispU),
    }
}

fn parse_dyadic(text: &str) -> Result<Dyadic, Failure> {
    let bad = || usage(format!("bad dyadic `{text}`: expected n/2^k such as 3/4"));
    let (n, d) = text.split_once('/').unwrap_or((text, "1"));
    let n: u64 = n.trim().parse().map_err(|_| bad())?;
    let d: u64 = d.trim().parse().map_err(|_| bad())?;
    if !d.is_power_of_two() {
        return Err(bad());
    }
    Ok(Dyadic::new(n, d.trailing_zeros()))
}

fn omega(args: &OmegaArgs, out: &mut String) -> Outcome {
    let m = machine(args.machine);
    writeln!(out, "machine: {}", m.name()).unwrap();
    if let Some(k) = args.count {
        let programs = args.programs.iter().map(|p| parse_bits(p)).collect::<Result<Vec<_>, _>>()?;
        let statuses = solve_halting_by_count(&programs, k, m.as_ref(), COUNT_MAX_BUDGET).map_err(domain)?;
        for (p, s) in programs.iter().zip(statuses) {
            writeln!(out, "{p} {}", s.name()).unwrap();
        }
        return Ok(());
    }
    if let Some(n) = args.oracle {
        let omega = match &args.omega {
            Some(text) => parse_dyadic(text)?,
            None => m.exact_omega().ok_or_else(|| usage("this machine's Ω is unknown; pass --omega"))?,
        };
        writeln!(out, "omega: {}", report::estimate(&omega)).unwrap();
        let statuses = halting_oracle_from_omega(m.as_ref(), &omega, n, ORACLE_ROUNDS).map_err(domain)?;
        for (p, s) in statuses {
            let shown = if p.is_empty() { "-".to_string() } else { p.to_string() };
            writeln!(out, "{shown} {}", s.name()).unwrap();
        }
        return Ok(());
    }
    if let Some(n_max) = args.prime {
        let v = omega_prime_lower(m.as_ref(), n_max, args.max_len, args.budget);
        writeln!(out, "omega-prime: {}", report::estimate(&v)).unwrap();
        writeln!(out, "status: lower bound only").unwrap();
        return Ok(());
    }
    if args.machine == MachineArg::Lispu && args.max_len > LISPU_MAX_LEN {
        return Err(usage(format!("--max-len above {LISPU_MAX_LEN} is out of reach on the universal machine")));
    }
    let est = omega_lower_bound_with(m.as_ref(), args.max_len, args.budget, true);
    writeln!(out, "max-len: {}", est.max_len).unwrap();
    writeln!(out, "budget: {}", est.budget).unwrap();
    writeln!(out, "halted: {}", est.halted.len()).unwrap();
    writeln!(out, "omega: {}", report::estimate(&est.value)).unwrap();
    if m.exact_omega().is_none() {
        writeln!(out, "status: lower bound only").unwrap();
    }
    if let Some(n) = args.bits {
        match certified_bits(m.as_ref(), &est.value, n) {
            Some(bits) => writeln!(out, "bits: {bits}").unwrap(),
            None if m.exact_omega().is_none() => writeln!(out, "bits: none certified (lower bound only)").unwrap(),
            None => writeln!(out, "bits: none certified yet").unwrap(),
        }
    }
    Ok(())
}

fn write_record(rec: &ComplexityRecord, out: &mut String) {
    writeln!(out, "{rec}").unwrap();
}

fn complexity(args: &ComplexityArgs, out: &mut String) -> Outcome {
    let x = parse_expr(&args.target)?;
    let m: Box<dyn Machine> = match args.machine {
        ComplexityMachine::Lisp => {
            let vocab = args.vocab.as_deref().map_or_else(|| Vocabulary::for_target(&x), Vocabulary::from_tokens);
            let rec = lisp_complexity_upper(&x, &vocab, args.cap, args.budget).map_err(domain)?;
            write_record(&rec, out);
            return Ok(());
        }
        ComplexityMachine::Toy => Box::new(toy_machine()),
        ComplexityMachine::Numeral => Box::new(NumeralMachine),
        ComplexityMachine::Lispu => Box::new(LispU),
    };
    if let Some(y) = &args.with {
        let y = parse_expr(y)?;
        let rep = info_measures(&x, &y, m.as_ref(), args.cap, args.budget).map_err(domain)?;
        writeln!(out, "{rep}").unwrap();
        return Ok(());
    }
    let found = h_upper(&x, m.as_ref(), args.cap, args.budget);
    if let Ok(rec) = &found {
        write_record(rec, out);
    }
    if args.probability {
        let p = p_lower(&x, m.as_ref(), args.cap, args.budget);
        writeln!(out, "probability: {}", report::estimate(&p)).unwrap();
    }
    found.map(|_| ()).map_err(domain)
}

fn program_arg(arg: &str) -> Result<BitString, Failure> {
    match arg.strip_prefix('@') {
        Some(path) => parse_bits(&read_file(Path::new(path))?),
        None => parse_bits(arg),
    }
}

fn pair(xstar: Option<&str>, ystar: Option<&str>, budget: Budget, out: &mut String) -> Outcome {
    let prefix = pair_prefix();
    let prefix_bits = prefix.to_bits().len();
    writeln!(out, "prefix: {prefix}").unwrap();
    writeln!(out, "prefix-bits: {prefix_bits}").unwrap();
    let (Some(xs), Some(ys)) = (xstar, ystar) else {
        return match (xstar, ystar) {
            (None, None) => Ok(()),
            _ => Err(usage("give both programs or neither")),
        };
    };
    let (xs, ys) = (program_arg(xs)?, program_arg(ys)?);
    let program = pair_program(&xs, &ys);
    let r = run_u(&program, budget);
    writeln!(out, "program: {program}").unwrap();
    writeln!(out, "result: {}", report::run_result(&r)).unwrap();
    if !r.is_halted() {
        return Err(domain("the pair program did not halt"));
    }
    writeln!(out, "bound: H(x,y) <= {} + {} + {prefix_bits} = {}", xs.len(), ys.len(), program.len()).unwrap();
    Ok(())
}

fn paradox(theory: &str, schedule: &str, wall_secs: u64, out: &mut String) -> Outcome {
    let th = match theory {
        "sound" => TheoryHandle::sound_mock(),
        "unsound" => TheoryHandle::unsound_mock(),
        "empty" => TheoryHandle::empty(),
        path => {
            let text = read_file(Path::new(path))?;
            TheoryHandle::new(parse_full(text.trim()).map_err(usage)?)
        }
    };
    let schedule = schedule
        .split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| usage(format!("bad budget `{s}` in schedule"))))
        .collect::<Result<Vec<_>, _>>()?;
    let outcome = berry_searcher(&th, &schedule, Duration::from_secs(wall_secs));
    writeln!(out, "{outcome}").unwrap();
    match outcome {
        BerryOutcome::Found { .. } => Ok(()),
        BerryOutcome::NotFound { .. } => Err(domain("no theorem exceeded the searcher's size")),
    }
}
