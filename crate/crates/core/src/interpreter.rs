//! The evaluator: strict, pure, step-budgeted.
//!
//! Every evaluation of a non-empty list costs one step. Atoms are free:
//! naturals and unbound symbols evaluate to themselves, bound symbols to the
//! innermost binding. Functions are ordinary values of the form
//! `(lambda (params...) body)`; a call binds the parameters in a new frame on
//! top of the caller's environment.
//!
//! `try` runs an expression in a fresh global environment with its own bit
//! stream and capture list, under the smaller of its own limit and the
//! caller's remaining budget. Steps spent inside are charged to the caller.
//! When the caller's budget was the binding constraint, running out of time
//! inside the `try` also ends the caller.
//!
//! Besides the step budget, three resource caps (recursion depth, list
//! nesting, and value size) keep runaway programs from exhausting the host.
//! Hitting a cap is reported as running out of time.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::bits::{BitStream, BitString};
use crate::sexpr::{read_exp_from_stream, ArityTable, FormReader, ParseError, ReadExpError, SExpr, MAX_NESTING};

/// Deepest evaluation recursion before the run is cut off.
pub const MAX_DEPTH: usize = 100_000;
/// Largest canonical text length of any value the evaluator will build.
pub const MAX_VALUE_CHARS: usize = 1 << 22;
/// Largest natural, in bits, the evaluator will build.
pub const MAX_NATURAL_BITS: u64 = 1 << 20;

const RED_ZONE: usize = 128 * 1024;
const STACK_SEGMENT: usize = 4 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prim {
    Quote,
    If,
    Define,
    Lambda,
    Let,
    Car,
    Cdr,
    Cadr,
    Cons,
    Append,
    Atom,
    Eq,
    Add,
    Sub,
    Mul,
    Less,
    Size,
    Bits,
    Display,
    Eval,
    ReadBit,
    ReadExp,
    Try,
    RunUtmOn,
}

#[derive(Debug, Clone, Copy)]
pub struct Primitive {
    pub name: &'static str,
    pub arity: usize,
    pub op: Prim,
}

const fn prim(name: &'static str, arity: usize, op: Prim) -> Primitive {
    Primitive { name, arity, op }
}

/// The primitive table with fixed arities.
pub static PRIMITIVES: &[Primitive] = &[
    prim("'", 1, Prim::Quote),
    prim("if", 3, Prim::If),
    prim("define", 2, Prim::Define),
    prim("lambda", 2, Prim::Lambda),
    prim("let", 3, Prim::Let),
    prim("car", 1, Prim::Car),
    prim("cdr", 1, Prim::Cdr),
    prim("cadr", 1, Prim::Cadr),
    prim("cons", 2, Prim::Cons),
    prim("append", 2, Prim::Append),
    prim("atom", 1, Prim::Atom),
    prim("=", 2, Prim::Eq),
    prim("+", 2, Prim::Add),
    prim("-", 2, Prim::Sub),
    prim("*", 2, Prim::Mul),
    prim("<", 2, Prim::Less),
    prim("size", 1, Prim::Size),
    prim("bits", 1, Prim::Bits),
    prim("display", 1, Prim::Display),
    prim("eval", 1, Prim::Eval),
    prim("read-bit", 0, Prim::ReadBit),
    prim("read-exp", 0, Prim::ReadExp),
    prim("try", 3, Prim::Try),
    prim("run-utm-on", 1, Prim::RunUtmOn),
];

pub fn primitive(name: &str) -> Option<Primitive> {
    PRIMITIVES.iter().find(|p| p.name == name).copied()
}

/// Remaining evaluation steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Limited(u64),
    Unlimited,
}

impl Budget {
    pub fn min(self, other: Budget) -> Budget {
        match (self, other) {
            (Budget::Limited(a), Budget::Limited(b)) => Budget::Limited(a.min(b)),
            (Budget::Limited(a), Budget::Unlimited) | (Budget::Unlimited, Budget::Limited(a)) => Budget::Limited(a),
            (Budget::Unlimited, Budget::Unlimited) => Budget::Unlimited,
        }
    }

    fn charge(&mut self, steps: u64) {
        if let Budget::Limited(n) = self {
            *n = n.saturating_sub(steps);
        }
    }
}

impl From<u64> for Budget {
    fn from(n: u64) -> Self {
        Budget::Limited(n)
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Limited(n) => write!(f, "{n}"),
            Budget::Unlimited => f.write_str("no-time-limit"),
        }
    }
}

/// Why an evaluation stopped without a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Abort {
    OutOfTime,
    OutOfData,
    /// `read-exp` met text that does not parse.
    ParseError,
}

impl Abort {
    pub fn atom_name(self) -> &'static str {
        match self {
            Abort::OutOfTime => "out-of-time",
            Abort::OutOfData => "out-of-data",
            Abort::ParseError => "parse-error",
        }
    }
}

impl fmt::Display for Abort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.atom_name())
    }
}

/// Result of a `try`: the value or the reason for failure, the displays
/// captured inside it, and accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TryOutcome {
    pub result: Result<SExpr, Abort>,
    pub captures: Vec<SExpr>,
    /// Steps spent.
    pub steps: u64,
    /// Bits read from the supplied data.
    pub bits_read: usize,
}

impl TryOutcome {
    pub fn is_success(&self) -> bool {
        self.result.is_ok()
    }

    /// `(success value (captures...))` or `(failure reason (captures...))`.
    pub fn to_sexpr(&self) -> SExpr {
        let (status, payload) = match &self.result {
            Ok(v) => ("success", v.clone()),
            Err(a) => ("failure", SExpr::atom(a.atom_name())),
        };
        SExpr::list(vec![SExpr::atom(status), payload, SExpr::list(self.captures.clone())])
    }
}

/// Local bindings, the innermost for each name. Persistent, so deep recursion
/// keeps lookups logarithmic.
#[derive(Clone, Default)]
struct Env(im::HashMap<SExpr, SExpr>);

impl Env {
    fn bind(&self, name: SExpr, value: SExpr) -> Env {
        Env(self.0.update(name, value))
    }

    fn lookup(&self, name: &SExpr) -> Option<&SExpr> {
        self.0.get(name)
    }
}

type Globals = HashMap<String, SExpr>;

struct Evaluator<'g> {
    globals: &'g Globals,
    remaining: Budget,
    steps: u64,
    depth: usize,
    data: Option<BitStream>,
    captures: Vec<SExpr>,
}

fn nat_of(e: &SExpr) -> BigUint {
    e.as_natural().cloned().unwrap_or_default()
}

fn items(e: &SExpr) -> &[SExpr] {
    e.as_list().unwrap_or(&[])
}

fn lambda_parts(f: &SExpr) -> Option<(&SExpr, &SExpr)> {
    match f.as_list()? {
        [head, params, body] if head.is_symbol("lambda") => Some((params, body)),
        _ => None,
    }
}

fn make_lambda(params: SExpr, body: SExpr) -> SExpr {
    SExpr::list(vec![SExpr::atom("lambda"), params, body])
}

fn data_bits(e: &SExpr) -> BitString {
    items(e).iter().map(|b| u8::from(b.as_u64() != Some(0))).collect()
}

/// `(eval (read-exp))`, the body every universal run evaluates.
pub fn universal_body() -> SExpr {
    SExpr::list(vec![SExpr::atom("eval"), SExpr::list(vec![SExpr::atom("read-exp")])])
}

impl<'g> Evaluator<'g> {
    fn new(globals: &'g Globals, budget: Budget, depth: usize, data: Option<BitString>) -> Self {
        Evaluator { globals, remaining: budget, steps: 0, depth, data: data.map(BitStream::new), captures: Vec::new() }
    }

    fn tick(&mut self) -> Result<(), Abort> {
        match &mut self.remaining {
            Budget::Limited(0) => return Err(Abort::OutOfTime),
            Budget::Limited(n) => *n -= 1,
            Budget::Unlimited => {}
        }
        self.steps += 1;
        Ok(())
    }

    fn checked(&self, v: SExpr) -> Result<SExpr, Abort> {
        if v.depth() > MAX_NESTING || v.size_chars() > MAX_VALUE_CHARS {
            Err(Abort::OutOfTime)
        } else {
            Ok(v)
        }
    }

    fn eval(&mut self, e: &SExpr, env: &Env) -> Result<SExpr, Abort> {
        match e {
            SExpr::Natural(_) => Ok(e.clone()),
            SExpr::Symbol(s) => {
                Ok(env.lookup(e).or_else(|| self.globals.get(s.as_str())).cloned().unwrap_or_else(|| e.clone()))
            }
            SExpr::List(l) if l.items().is_empty() => Ok(e.clone()),
            SExpr::List(l) => {
                self.tick()?;
                if self.depth >= MAX_DEPTH {
                    return Err(Abort::OutOfTime);
                }
                self.depth += 1;
                let r = stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || self.eval_list(l.items(), env));
                self.depth -= 1;
                r
            }
        }
    }

    fn eval_list(&mut self, list: &[SExpr], env: &Env) -> Result<SExpr, Abort> {
        let (head, args) = (&list[0], &list[1..]);
        if let Some(p) = head.as_symbol().and_then(primitive) {
            return self.apply_primitive(p, args, env);
        }
        let f = self.eval(head, env)?;
        let mut values = Vec::with_capacity(args.len());
        for a in args {
            values.push(self.eval(a, env)?);
        }
        match lambda_parts(&f) {
            Some((params, body)) => {
                let mut inner = env.clone();
                for (i, p) in items(params).iter().enumerate() {
                    inner = inner.bind(p.clone(), values.get(i).cloned().unwrap_or_else(SExpr::nil));
                }
                self.eval(body, &inner)
            }
            None => Ok(SExpr::nil()),
        }
    }

    fn arg(args: &[SExpr], i: usize) -> SExpr {
        args.get(i).cloned().unwrap_or_else(SExpr::nil)
    }

    fn eval_arg(&mut self, args: &[SExpr], i: usize, env: &Env) -> Result<SExpr, Abort> {
        match args.get(i) {
            Some(a) => self.eval(a, env),
            None => Ok(SExpr::nil()),
        }
    }

    fn apply_primitive(&mut self, p: Primitive, args: &[SExpr], env: &Env) -> Result<SExpr, Abort> {
        match p.op {
            Prim::Quote => Ok(Self::arg(args, 0)),
            Prim::If => {
                let c = self.eval_arg(args, 0, env)?;
                let branch = if c.is_symbol("false") { 2 } else { 1 };
                self.eval_arg(args, branch, env)
            }
            // Definitions only take effect at top level.
            Prim::Define => {
                let target = Self::arg(args, 0);
                Ok(match target.as_list() {
                    Some([name, ..]) => name.clone(),
                    _ => target,
                })
            }
            Prim::Lambda => Ok(make_lambda(Self::arg(args, 0), Self::arg(args, 1))),
            Prim::Let => {
                let target = Self::arg(args, 0);
                let inner = match target.as_list() {
                    Some([name, params @ ..]) => {
                        env.bind(name.clone(), make_lambda(SExpr::list(params.to_vec()), Self::arg(args, 1)))
                    }
                    _ => {
                        let value = self.eval_arg(args, 1, env)?;
                        if target.is_atom() && !target.is_nil() {
                            env.bind(target, value)
                        } else {
                            env.clone()
                        }
                    }
                };
                self.eval_arg(args, 2, &inner)
            }
            Prim::Try => {
                let limit = self.eval_arg(args, 0, env)?;
                let expr = self.eval_arg(args, 1, env)?;
                let data = self.eval_arg(args, 2, env)?;
                let limit = match limit.as_natural() {
                    Some(n) => Budget::Limited(n.to_u64().unwrap_or(u64::MAX)),
                    None => Budget::Unlimited,
                };
                let outcome = self.nested_try(limit, &expr, data_bits(&data))?;
                self.checked(outcome.to_sexpr())
            }
            Prim::RunUtmOn => {
                let program = self.eval_arg(args, 0, env)?;
                let outcome = self.nested_try(Budget::Unlimited, &universal_body(), data_bits(&program))?;
                Ok(match outcome.result {
                    Ok(v) => v,
                    Err(a) => SExpr::atom(a.atom_name()),
                })
            }
            _ => {
                let mut vals = Vec::with_capacity(p.arity);
                for i in 0..p.arity {
                    vals.push(self.eval_arg(args, i, env)?);
                }
                self.apply_strict(p.op, vals)
            }
        }
    }

    fn apply_strict(&mut self, op: Prim, v: Vec<SExpr>) -> Result<SExpr, Abort> {
        let mut v = v.into_iter();
        let x = v.next().unwrap_or_else(SExpr::nil);
        let y = v.next().unwrap_or_else(SExpr::nil);
        match op {
            Prim::Car => Ok(match x.as_list() {
                Some([first, ..]) => first.clone(),
                _ => x,
            }),
            Prim::Cdr => Ok(cdr(&x)),
            Prim::Cadr => Ok(match cdr(&x).as_list() {
                Some([first, ..]) => first.clone(),
                _ => cdr(&x),
            }),
            Prim::Cons => {
                let mut out = Vec::with_capacity(items(&y).len() + 1);
                out.push(x);
                out.extend_from_slice(items(&y));
                self.checked(SExpr::list(out))
            }
            Prim::Append => {
                let mut out = items(&x).to_vec();
                out.extend_from_slice(items(&y));
                self.checked(SExpr::list(out))
            }
            Prim::Atom => Ok(SExpr::boolean(x.is_atom())),
            Prim::Eq => Ok(SExpr::boolean(x == y)),
            Prim::Add => {
                let (a, b) = (nat_of(&x), nat_of(&y));
                if a.bits().max(b.bits()) >= MAX_NATURAL_BITS {
                    return Err(Abort::OutOfTime);
                }
                Ok(SExpr::natural(a + b))
            }
            Prim::Sub => {
                let (a, b) = (nat_of(&x), nat_of(&y));
                Ok(SExpr::natural(if a > b { a - b } else { BigUint::zero() }))
            }
            Prim::Mul => {
                let (a, b) = (nat_of(&x), nat_of(&y));
                if a.bits() + b.bits() > MAX_NATURAL_BITS {
                    return Err(Abort::OutOfTime);
                }
                Ok(SExpr::natural(a * b))
            }
            Prim::Less => Ok(SExpr::boolean(nat_of(&x) < nat_of(&y))),
            Prim::Size => Ok(SExpr::nat(x.size_chars() as u64)),
            Prim::Bits => {
                if x.size_chars().saturating_add(1) * 16 > MAX_VALUE_CHARS {
                    return Err(Abort::OutOfTime);
                }
                Ok(SExpr::from_bits(&x.to_bits()))
            }
            Prim::Display => {
                self.captures.push(x.clone());
                Ok(x)
            }
            Prim::Eval => self.eval(&x, &Env::default()),
            Prim::ReadBit => {
                let stream = self.data.as_mut().ok_or(Abort::OutOfData)?;
                let b = stream.read_bit().map_err(|_| Abort::OutOfData)?;
                Ok(SExpr::nat(u64::from(b)))
            }
            Prim::ReadExp => {
                let stream = self.data.as_mut().ok_or(Abort::OutOfData)?;
                match read_exp_from_stream(stream) {
                    Ok(e) => Ok(e),
                    Err(ReadExpError::OutOfData) => Err(Abort::OutOfData),
                    Err(ReadExpError::Parse(_)) => Err(Abort::ParseError),
                }
            }
            Prim::Quote | Prim::If | Prim::Define | Prim::Lambda | Prim::Let | Prim::Try | Prim::RunUtmOn => {
                unreachable!("special forms are handled before argument evaluation")
            }
        }
    }

    /// Runs a `try` nested in this evaluation and charges its steps here.
    fn nested_try(&mut self, limit: Budget, expr: &SExpr, data: BitString) -> Result<TryOutcome, Abort> {
        let inner_budget = limit.min(self.remaining);
        let outer_binds = match (limit, self.remaining) {
            (_, Budget::Unlimited) => false,
            (Budget::Unlimited, Budget::Limited(_)) => true,
            (Budget::Limited(l), Budget::Limited(r)) => r < l,
        };
        let outcome = run_try(self.globals, inner_budget, self.depth, expr, data);
        self.remaining.charge(outcome.steps);
        self.steps += outcome.steps;
        if outer_binds && outcome.result == Err(Abort::OutOfTime) {
            return Err(Abort::OutOfTime);
        }
        Ok(outcome)
    }
}

fn cdr(x: &SExpr) -> SExpr {
    match x {
        SExpr::List(l) if !l.items().is_empty() => SExpr::List(l.tail()),
        _ => x.clone(),
    }
}

static NO_GLOBALS: LazyLock<Globals> = LazyLock::new(HashMap::new);

/// `try` in an empty global environment, as the universal machine runs it.
pub fn try_fresh(limit: Budget, e: &SExpr, data: BitString) -> TryOutcome {
    run_try(&NO_GLOBALS, limit, 0, e, data)
}

fn run_try(globals: &Globals, budget: Budget, depth: usize, expr: &SExpr, data: BitString) -> TryOutcome {
    let mut ev = Evaluator::new(globals, budget, depth, Some(data));
    let result = ev.eval(expr, &Env::default());
    TryOutcome {
        result,
        captures: ev.captures,
        steps: ev.steps,
        bits_read: ev.data.as_ref().map_or(0, BitStream::position),
    }
}

/// Outcome of one top-level form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopLevel {
    Defined { name: String, value: SExpr },
    Value { value: SExpr, displays: Vec<SExpr> },
    Aborted { reason: Abort, displays: Vec<SExpr> },
}

impl fmt::Display for TopLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopLevel::Defined { name, value } => write!(f, "define {name} {value}"),
            TopLevel::Value { value, .. } => write!(f, "{value}"),
            TopLevel::Aborted { reason, .. } => write!(f, "failure {reason}"),
        }
    }
}

/// An interpreter session: the global environment and the arity table the
/// implicit reader uses for it.
#[derive(Clone)]
pub struct Interpreter {
    globals: Arc<Globals>,
    table: ArityTable,
}

impl Default for Interpreter {
    fn default() -> Self {
        Self::new()
    }
}

impl Interpreter {
    pub fn new() -> Self {
        Self { globals: Arc::new(HashMap::new()), table: ArityTable::primitives().clone() }
    }

    pub fn arity_table(&self) -> &ArityTable {
        &self.table
    }

    pub fn global(&self, name: &str) -> Option<&SExpr> {
        self.globals.get(name)
    }

    /// Evaluates `e` in the global environment. Displays are returned with
    /// the result.
    pub fn evaluate(&self, e: &SExpr, budget: Budget, data: Option<BitString>) -> TryOutcome {
        let mut ev = Evaluator::new(&self.globals, budget, 0, data);
        let result = ev.eval(e, &Env::default());
        TryOutcome {
            result,
            captures: ev.captures,
            steps: ev.steps,
            bits_read: ev.data.as_ref().map_or(0, BitStream::position),
        }
    }

    /// `try limit e data` called from an unlimited context.
    pub fn try_eval(&self, limit: Budget, e: &SExpr, data: BitString) -> TryOutcome {
        run_try(&self.globals, limit, 0, e, data)
    }

    /// Evaluates one top-level form; `define` forms extend the session.
    pub fn run_form(&mut self, form: &SExpr, budget: Budget) -> TopLevel {
        if let Some([head, target, rest @ ..]) = form.as_list() {
            if head.is_symbol("define") {
                let body = rest.first().cloned().unwrap_or_else(SExpr::nil);
                return self.define(target, body, budget);
            }
        }
        let outcome = self.evaluate(form, budget, None);
        match outcome.result {
            Ok(value) => TopLevel::Value { value, displays: outcome.captures },
            Err(reason) => TopLevel::Aborted { reason, displays: outcome.captures },
        }
    }

    fn define(&mut self, target: &SExpr, body: SExpr, budget: Budget) -> TopLevel {
        let (name, value) = match target.as_list() {
            Some([name, params @ ..]) => {
                let value = make_lambda(SExpr::list(params.to_vec()), body);
                if let Some(n) = name.as_symbol() {
                    self.table.define(n, params.len());
                }
                (name.clone(), value)
            }
            _ => {
                let outcome = self.evaluate(&body, budget, None);
                match outcome.result {
                    Ok(v) => (target.clone(), v),
                    Err(reason) => return TopLevel::Aborted { reason, displays: outcome.captures },
                }
            }
        };
        let key = name.to_string();
        Arc::make_mut(&mut self.globals).insert(key.clone(), value.clone());
        TopLevel::Defined { name: key, value }
    }

    /// Reads and evaluates every form in `text` in order.
    pub fn run_source(&mut self, text: &str, budget: Budget) -> Result<Vec<TopLevel>, ParseError> {
        let mut reader = FormReader::new(text)?;
        let mut out = Vec::new();
        while let Some(form) = reader.next_form(&self.table) {
            let (form, _line) = form?;
            out.push(self.run_form(&form, budget));
        }
        Ok(out)
    }
}
