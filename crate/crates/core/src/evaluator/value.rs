use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::evaluator::Primitive;
use crate::images::Scene;
use crate::syntax::{write_string_literal, Expr, Name};
use crate::Number;

/// A runtime value. Cheap to clone; all compound data is shared and immutable.
#[derive(Debug, Clone)]
pub enum Value {
    Number(Number),
    Bool(bool),
    Str(Arc<str>),
    Empty,
    Cons(Arc<Pair>),
    Closure(Arc<Closure>),
    Primitive(&'static Primitive),
    Object(Arc<Object>),
    Scene(Arc<Scene>),
}

/// A cons cell. `rest` is always `Empty` or another `Cons`.
#[derive(Debug)]
pub struct Pair {
    pub first: Value,
    pub rest: Value,
}

#[derive(Debug)]
pub struct Closure {
    /// Set for named function definitions; used in messages.
    pub name: Option<Name>,
    pub params: Arc<[Name]>,
    pub body: Arc<Expr>,
    pub env: Env,
    /// The receiver when the lambda was created inside a method.
    pub this: Option<Arc<Object>>,
}

/// An instance: its class name and one value per field of the full
/// inherited field list (inherited fields first).
#[derive(Debug, Clone)]
pub struct Object {
    pub class: Name,
    pub fields: Vec<Value>,
}

/// Local variable frames. The global frame lives in the interpreter.
#[derive(Debug, Clone, Default)]
pub struct Env(Option<Arc<Frame>>);

#[derive(Debug)]
struct Frame {
    names: Arc<[Name]>,
    values: Vec<Value>,
    parent: Env,
}

impl Env {
    pub fn empty() -> Env {
        Env(None)
    }

    /// A new frame binding `names` to `values` on top of this one.
    pub fn extend(&self, names: Arc<[Name]>, values: Vec<Value>) -> Env {
        debug_assert_eq!(names.len(), values.len());
        Env(Some(Arc::new(Frame { names, values, parent: self.clone() })))
    }

    /// Innermost binding for `name`.
    pub fn lookup(&self, name: &str) -> Option<&Value> {
        let mut env = self;
        while let Some(frame) = &env.0 {
            if let Some(i) = frame.names.iter().position(|n| n.as_ref() == name) {
                return Some(&frame.values[i]);
            }
            env = &frame.parent;
        }
        None
    }
}

impl Value {
    pub fn string(s: &str) -> Value {
        Value::Str(s.into())
    }

    pub fn cons(first: Value, rest: Value) -> Value {
        Value::Cons(Arc::new(Pair { first, rest }))
    }

    pub fn list(items: impl IntoIterator<Item = Value, IntoIter: DoubleEndedIterator>) -> Value {
        items.into_iter().rev().fold(Value::Empty, |rest, first| Value::cons(first, rest))
    }

    pub fn object(class: &str, fields: Vec<Value>) -> Value {
        Value::Object(Arc::new(Object { class: class.into(), fields }))
    }

    pub fn is_list(&self) -> bool {
        matches!(self, Value::Empty | Value::Cons(_))
    }

    /// Elements of a proper list; `None` for non-lists.
    pub fn list_items(&self) -> Option<Vec<Value>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Value::Empty => return Some(out),
                Value::Cons(p) => {
                    out.push(p.first.clone());
                    cur = &p.rest;
                }
                _ => return None,
            }
        }
    }

    pub fn as_number(&self) -> Option<&Number> {
        match self {
            Value::Number(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_object(&self) -> Option<&Arc<Object>> {
        match self {
            Value::Object(o) => Some(o),
            _ => None,
        }
    }

    pub fn is_procedure(&self) -> bool {
        matches!(self, Value::Closure(_) | Value::Primitive(_))
    }

    /// A short description used in type errors, e.g. `a string`.
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Number(_) => "a number",
            Value::Bool(_) => "a boolean",
            Value::Str(_) => "a string",
            Value::Empty | Value::Cons(_) => "a list",
            Value::Closure(_) | Value::Primitive(_) => "a function",
            Value::Object(_) => "an object",
            Value::Scene(_) => "an image",
        }
    }

    /// A rendering that covers closure bodies too, for purity snapshots.
    pub(crate) fn write_fingerprint(&self, out: &mut String) {
        match self {
            Value::Closure(c) => {
                let _ = write!(out, "(closure {:?} (", c.name.as_deref());
                for p in c.params.iter() {
                    let _ = write!(out, "{p} ");
                }
                let _ = write!(out, ") {})", c.body);
            }
            other => {
                let _ = write!(out, "{other}");
            }
        }
    }
}

impl From<Number> for Value {
    fn from(n: Number) -> Self {
        Value::Number(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<Scene> for Value {
    fn from(s: Scene) -> Self {
        Value::Scene(Arc::new(s))
    }
}

/// Values print in the syntax that would construct them: `(new posn 3 4)`,
/// `(list 1 2)`, `"text"`.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(n) => write!(f, "{n}"),
            Value::Bool(b) => f.write_str(if *b { "true" } else { "false" }),
            Value::Str(s) => write_string_literal(f, s),
            Value::Empty => f.write_str("empty"),
            Value::Cons(_) => {
                f.write_str("(list")?;
                for item in self.list_items().unwrap_or_default() {
                    write!(f, " {item}")?;
                }
                f.write_char(')')
            }
            Value::Closure(c) => match &c.name {
                Some(n) => write!(f, "#<procedure:{n}>"),
                None => f.write_str("#<procedure>"),
            },
            Value::Primitive(p) => write!(f, "#<procedure:{}>", p.name),
            Value::Object(o) => {
                write!(f, "(new {}", o.class)?;
                for v in &o.fields {
                    write!(f, " {v}")?;
                }
                f.write_char(')')
            }
            Value::Scene(s) => write!(f, "{s}"),
        }
    }
}
