//! Purely functional tree-walking evaluator.
//!
//! Evaluation is strict and left to right. Nothing is ever mutated after it is
//! bound: [`Interp::eval_expr`] takes `&self`, and the only way to grow the
//! global frame is loading a program.

mod primitives;
mod program;
mod value;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

pub use program::{eval_program, load_program, LoadedProgram};
pub use value::{Closure, Env, Object, Pair, Value};

use crate::error::{Error, Position, Result};
use crate::objects::ClassTable;
use crate::reader::LanguageLevel;
use crate::syntax::{Expr, Name};

/// Nesting limit for function applications and message sends.
pub const MAX_DEPTH: usize = 100_000;

const STACK_RED_ZONE: usize = 256 * 1024;
const STACK_SEGMENT: usize = 8 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Exactly(usize),
    AtLeast(usize),
}

impl Arity {
    pub fn accepts(self, n: usize) -> bool {
        match self {
            Arity::Exactly(k) => n == k,
            Arity::AtLeast(k) => n >= k,
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let plural = |k: usize| if k == 1 { "" } else { "s" };
        match *self {
            Arity::Exactly(k) => write!(f, "{k} argument{}", plural(k)),
            Arity::AtLeast(k) => write!(f, "at least {k} argument{}", plural(k)),
        }
    }
}

/// A built-in function.
pub struct Primitive {
    pub name: &'static str,
    pub arity: Arity,
    run: fn(&Interp, Vec<Value>, usize) -> Result<Value>,
}

impl fmt::Debug for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#<primitive:{}>", self.name)
    }
}

/// Per-call evaluation state.
#[derive(Clone, Copy)]
pub(crate) struct Ctx<'a> {
    pub env: &'a Env,
    pub this: Option<&'a Arc<Object>>,
    pub depth: usize,
}

/// The interpreter: global definitions and the class table for one program.
#[derive(Debug, Clone)]
pub struct Interp {
    level: LanguageLevel,
    globals: BTreeMap<Name, Value>,
    user_defined: BTreeSet<Name>,
    pub(crate) classes: ClassTable,
    warnings: Vec<String>,
}

impl Interp {
    /// An interpreter with only the built-in functions defined.
    pub fn new(level: LanguageLevel) -> Self {
        let mut globals = BTreeMap::new();
        for p in primitives::PRIMITIVES {
            globals.insert(Name::from(p.name), Value::Primitive(p));
        }
        globals.insert(Name::from("empty"), Value::Empty);
        Interp { level, globals, user_defined: BTreeSet::new(), classes: ClassTable::default(), warnings: Vec::new() }
    }

    pub fn level(&self) -> LanguageLevel {
        self.level
    }

    pub fn classes(&self) -> &ClassTable {
        &self.classes
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn global(&self, name: &str) -> Option<&Value> {
        self.globals.get(name)
    }

    /// Names defined by the program (not the built-ins).
    pub fn user_globals(&self) -> impl Iterator<Item = (&Name, &Value)> {
        self.user_defined.iter().map(|n| (n, &self.globals[n]))
    }

    pub(crate) fn define_global(&mut self, name: Name, value: Value, pos: Position) -> Result<()> {
        if self.user_defined.contains(&name) {
            return Err(Error::definition(Some(pos), format!("{name}: this name was defined previously")));
        }
        if self.globals.contains_key(&name) {
            self.warnings.push(format!("{pos}: warning: definition of `{name}` shadows a built-in"));
        }
        self.user_defined.insert(name.clone());
        self.globals.insert(name, value);
        Ok(())
    }

    /// A hash of every global binding's structure. Equal before and after any
    /// evaluation, since evaluation never changes bindings.
    pub fn fingerprint(&self) -> u64 {
        let mut text = String::new();
        for (name, value) in &self.globals {
            text.push_str(name);
            text.push('=');
            value.write_fingerprint(&mut text);
            text.push('\n');
        }
        text.push_str(&format!("{:?}", self.classes.names()));
        let mut h = DefaultHasher::new();
        text.hash(&mut h);
        h.finish()
    }

    /// Evaluates `e` with local bindings `env` on top of the globals.
    pub fn eval_expr(&self, env: &Env, e: &Expr) -> Result<Value> {
        self.eval(e, Ctx { env, this: None, depth: 0 })
    }

    /// Applies a function value to arguments.
    pub fn apply(&self, f: &Value, args: Vec<Value>) -> Result<Value> {
        self.apply_at(f, args, 0)
    }

    pub(crate) fn eval(&self, e: &Expr, cx: Ctx<'_>) -> Result<Value> {
        stacker::maybe_grow(STACK_RED_ZONE, STACK_SEGMENT, || self.eval_inner(e, cx))
    }

    fn eval_inner(&self, e: &Expr, cx: Ctx<'_>) -> Result<Value> {
        match e {
            Expr::Number(n) => Ok(Value::Number(n.clone())),
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::Str(s) => Ok(Value::Str(s.clone())),
            Expr::Var(name) => cx
                .env
                .lookup(name)
                .or_else(|| self.globals.get(name))
                .cloned()
                .ok_or_else(|| Error::runtime(format!("{name}: this variable is not defined"))),
            Expr::This => cx
                .this
                .map(|o| Value::Object(o.clone()))
                .ok_or_else(|| Error::runtime("this: can only be used inside a method")),
            Expr::Lambda { params, body } => Ok(Value::Closure(Arc::new(Closure {
                name: None,
                params: params.clone(),
                body: body.clone(),
                env: cx.env.clone(),
                this: cx.this.cloned(),
            }))),
            Expr::App { func, args } => {
                let f = self.eval(func, cx)?;
                let args = self.eval_all(args, cx)?;
                self.apply_at(&f, args, cx.depth)
            }
            Expr::If { test, then, otherwise } => {
                if self.truth("if", test, cx)? {
                    self.eval(then, cx)
                } else {
                    self.eval(otherwise, cx)
                }
            }
            Expr::Cond { clauses, otherwise } => {
                for clause in clauses {
                    if self.truth("cond", &clause.test, cx)? {
                        return self.eval(&clause.body, cx);
                    }
                }
                match otherwise {
                    Some(e) => self.eval(e, cx),
                    None => Err(Error::runtime("cond: all question results were false")),
                }
            }
            Expr::And(es) => {
                for e in es {
                    if !self.truth("and", e, cx)? {
                        return Ok(Value::Bool(false));
                    }
                }
                Ok(Value::Bool(true))
            }
            Expr::Or(es) => {
                for e in es {
                    if self.truth("or", e, cx)? {
                        return Ok(Value::Bool(true));
                    }
                }
                Ok(Value::Bool(false))
            }
            Expr::New { class, args } => {
                let args = self.eval_all(args, cx)?;
                self.instantiate_at(class, args, cx.depth)
            }
            Expr::Send { receiver, message, args } => {
                let receiver = self.eval(receiver, cx)?;
                let args = self.eval_all(args, cx)?;
                self.dispatch_at(&receiver, message, args, cx.depth)
            }
        }
    }

    fn eval_all(&self, es: &[Expr], cx: Ctx<'_>) -> Result<Vec<Value>> {
        es.iter().map(|e| self.eval(e, cx)).collect()
    }

    fn truth(&self, form: &str, e: &Expr, cx: Ctx<'_>) -> Result<bool> {
        match self.eval(e, cx)? {
            Value::Bool(b) => Ok(b),
            other => Err(Error::runtime(format!("{form}: question result is not true or false: {other}"))),
        }
    }

    pub(crate) fn enter(depth: usize) -> Result<usize> {
        if depth >= MAX_DEPTH {
            Err(Error::runtime(format!("recursion too deep (more than {MAX_DEPTH} nested calls)")))
        } else {
            Ok(depth + 1)
        }
    }

    pub(crate) fn apply_at(&self, f: &Value, args: Vec<Value>, depth: usize) -> Result<Value> {
        match f {
            Value::Closure(c) => {
                if args.len() != c.params.len() {
                    let name = c.name.as_deref().unwrap_or("lambda");
                    return Err(Error::runtime(format!(
                        "{name}: expects {}, but found {}",
                        Arity::Exactly(c.params.len()),
                        args.len()
                    )));
                }
                let depth = Self::enter(depth)?;
                let env = c.env.extend(c.params.clone(), args);
                self.eval(&c.body, Ctx { env: &env, this: c.this.as_ref(), depth })
            }
            Value::Primitive(p) => {
                if !p.arity.accepts(args.len()) {
                    return Err(Error::runtime(format!("{}: expects {}, but found {}", p.name, p.arity, args.len())));
                }
                (p.run)(self, args, depth)
            }
            other => Err(Error::runtime(format!(
                "function call: expected a function after the open parenthesis, but received {other}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reader::{parse_program, tokenize};
    use crate::syntax::Defn;
    use crate::Number;

    fn eval_str(src: &str) -> Result<Value> {
        let defs = parse_program(&tokenize(src).unwrap(), LanguageLevel::MAX).unwrap();
        let Defn::Expr { expr, .. } = &defs[0] else { panic!("not an expression") };
        Interp::new(LanguageLevel::MAX).eval_expr(&Env::empty(), expr)
    }

    fn num(n: i64) -> Number {
        Number::integer(n)
    }

    fn assert_num(src: &str, expected: Number) {
        match eval_str(src) {
            Ok(Value::Number(n)) => assert_eq!(n, expected, "{src}"),
            other => panic!("{src}: {other:?}"),
        }
    }

    #[test]
    fn dist_arithmetic() {
        assert_num("(+ (sqr 3) (sqr 4))", num(25));
        assert_num("(sqrt (+ (sqr 3) (sqr 4)))", num(5));
    }

    #[test]
    fn conditionals() {
        assert_num("(if true 1 2)", num(1));
        assert_num("(if false 1 2)", num(2));
        assert_num("(cond [(zero? 1) 1] [(zero? 0) 2] [else 3])", num(2));
        assert_eq!(eval_str("(cond [false 1])").unwrap_err().to_string(), "cond: all question results were false");
        assert!(eval_str("(if 0 1 2)").unwrap_err().to_string().contains("not true or false"));
        assert!(matches!(eval_str("(and true false (/ 1 0))"), Ok(Value::Bool(false))));
        assert!(matches!(eval_str("(or false true (/ 1 0))"), Ok(Value::Bool(true))));
    }

    #[test]
    fn higher_order_application() {
        // (f (f x)) with f = add1, x = 0
        assert_num("((lambda (f x) (f (f x))) add1 0)", num(2));
        assert_num("(((lambda (x) (lambda (y) (- x y))) 10) 3)", num(7));
    }

    #[test]
    fn application_errors() {
        assert!(eval_str("(nope 1)").unwrap_err().to_string().contains("nope: this variable is not defined"));
        assert!(eval_str("(5 1)").unwrap_err().to_string().contains("expected a function"));
        assert_eq!(
            eval_str("((lambda (x) x) 1 2)").unwrap_err().to_string(),
            "lambda: expects 1 argument, but found 2"
        );
        assert_eq!(eval_str("(add1 1 2)").unwrap_err().to_string(), "add1: expects 1 argument, but found 2");
    }

    #[test]
    fn evaluation_is_repeatable() {
        let src = "(map (lambda (x) (* x x)) (list 1 2 3))";
        let a = eval_str(src).unwrap();
        let b = eval_str(src).unwrap();
        assert_eq!(a.to_string(), b.to_string());
    }

    #[test]
    fn this_outside_method() {
        assert!(eval_str("this").is_err());
    }
}
