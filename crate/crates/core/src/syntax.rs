//! Desugared abstract syntax, and a printer that renders it back to source.
//!
//! The printer always emits explicit `send` forms, so printed programs parse
//! at every language level.

use std::fmt::{self, Display, Write as _};
use std::sync::Arc;

use crate::error::Position;
use crate::Number;

pub type Name = Arc<str>;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(Number),
    Bool(bool),
    Str(Arc<str>),
    Var(Name),
    Lambda {
        params: Arc<[Name]>,
        body: Arc<Expr>,
    },
    App {
        func: Box<Expr>,
        args: Vec<Expr>,
    },
    Cond {
        clauses: Vec<CondClause>,
        otherwise: Option<Box<Expr>>,
    },
    If {
        test: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    And(Vec<Expr>),
    Or(Vec<Expr>),
    New {
        class: Name,
        args: Vec<Expr>,
    },
    Send {
        receiver: Box<Expr>,
        message: Name,
        args: Vec<Expr>,
    },
    This,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondClause {
    pub test: Expr,
    pub body: Expr,
}

impl Expr {
    pub fn send(receiver: Expr, message: &str, args: Vec<Expr>) -> Expr {
        Expr::Send { receiver: Box::new(receiver), message: message.into(), args }
    }

    /// Pre-order walk over this expression and all subexpressions.
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a Expr)) {
        visit(self);
        match self {
            Expr::Number(_) | Expr::Bool(_) | Expr::Str(_) | Expr::Var(_) | Expr::This => {}
            Expr::Lambda { body, .. } => body.walk(visit),
            Expr::App { func, args } => {
                func.walk(visit);
                args.iter().for_each(|a| a.walk(visit));
            }
            Expr::Cond { clauses, otherwise } => {
                for c in clauses {
                    c.test.walk(visit);
                    c.body.walk(visit);
                }
                if let Some(e) = otherwise {
                    e.walk(visit);
                }
            }
            Expr::If { test, then, otherwise } => {
                test.walk(visit);
                then.walk(visit);
                otherwise.walk(visit);
            }
            Expr::And(es) | Expr::Or(es) => es.iter().for_each(|e| e.walk(visit)),
            Expr::New { args, .. } => args.iter().for_each(|a| a.walk(visit)),
            Expr::Send { receiver, args, .. } => {
                receiver.walk(visit);
                args.iter().for_each(|a| a.walk(visit));
            }
        }
    }

    pub fn any(&self, pred: impl Fn(&Expr) -> bool) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= pred(e));
        found
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckForm {
    pub actual: Expr,
    pub expected: Expr,
    /// Present for `check-within`.
    pub tolerance: Option<Expr>,
    pub pos: Position,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodForm {
    pub name: Name,
    pub params: Vec<Name>,
    pub body: Expr,
    pub pos: Position,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructorForm {
    pub params: Vec<Name>,
    /// One initializer per field of the full inherited field list.
    pub inits: Vec<Expr>,
    pub pos: Position,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassMember {
    Method(MethodForm),
    Check(CheckForm),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassForm {
    pub name: Name,
    pub super_name: Option<Name>,
    pub fields: Vec<Name>,
    pub constructor: Option<ConstructorForm>,
    pub members: Vec<ClassMember>,
    pub pos: Position,
}

impl ClassForm {
    pub fn methods(&self) -> impl Iterator<Item = &MethodForm> {
        self.members.iter().filter_map(|m| match m {
            ClassMember::Method(m) => Some(m),
            ClassMember::Check(_) => None,
        })
    }
}

/// A top-level form.
#[derive(Debug, Clone, PartialEq)]
pub enum Defn {
    Function {
        name: Name,
        params: Vec<Name>,
        body: Expr,
        pos: Position,
    },
    Constant {
        name: Name,
        value: Expr,
        pos: Position,
    },
    Class(ClassForm),
    Check(CheckForm),
    /// A bare expression whose value is printed when the program runs.
    Expr { expr: Expr, pos: Position },
    BigBang { world: Expr, pos: Position },
    /// Library requires are accepted and ignored; everything is built in.
    Require { specs: Vec<String>, pos: Position },
}

impl Defn {
    pub fn pos(&self) -> Position {
        match self {
            Defn::Function { pos, .. }
            | Defn::Constant { pos, .. }
            | Defn::Expr { pos, .. }
            | Defn::BigBang { pos, .. }
            | Defn::Require { pos, .. } => *pos,
            Defn::Class(c) => c.pos,
            Defn::Check(c) => c.pos,
        }
    }

    /// The same form with every position reset, for structural comparison of
    /// programs parsed from different text.
    pub fn without_positions(&self) -> Defn {
        let p = Position::default();
        let check = |c: &CheckForm| CheckForm { pos: p, ..c.clone() };
        match self.clone() {
            Defn::Function { name, params, body, .. } => Defn::Function { name, params, body, pos: p },
            Defn::Constant { name, value, .. } => Defn::Constant { name, value, pos: p },
            Defn::Expr { expr, .. } => Defn::Expr { expr, pos: p },
            Defn::BigBang { world, .. } => Defn::BigBang { world, pos: p },
            Defn::Require { specs, .. } => Defn::Require { specs, pos: p },
            Defn::Check(c) => Defn::Check(check(&c)),
            Defn::Class(c) => Defn::Class(ClassForm {
                pos: p,
                constructor: c.constructor.map(|k| ConstructorForm { pos: p, ..k }),
                members: c
                    .members
                    .iter()
                    .map(|m| match m {
                        ClassMember::Method(m) => ClassMember::Method(MethodForm { pos: p, ..m.clone() }),
                        ClassMember::Check(c) => ClassMember::Check(check(c)),
                    })
                    .collect(),
                ..c
            }),
        }
    }
}

pub(crate) fn write_string_literal(out: &mut impl fmt::Write, s: &str) -> fmt::Result {
    out.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => out.write_str("\\\"")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\t' => out.write_str("\\t")?,
            c => out.write_char(c)?,
        }
    }
    out.write_char('"')
}

fn write_names(f: &mut fmt::Formatter<'_>, names: &[Name]) -> fmt::Result {
    f.write_char('(')?;
    for (i, n) in names.iter().enumerate() {
        if i > 0 {
            f.write_char(' ')?;
        }
        f.write_str(n)?;
    }
    f.write_char(')')
}

fn write_spaced(f: &mut fmt::Formatter<'_>, items: &[Expr]) -> fmt::Result {
    items.iter().try_for_each(|e| write!(f, " {e}"))
}

impl Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(n) => write!(f, "{n}"),
            Expr::Bool(b) => f.write_str(if *b { "true" } else { "false" }),
            Expr::Str(s) => write_string_literal(f, s),
            Expr::Var(v) => f.write_str(v),
            Expr::This => f.write_str("this"),
            Expr::Lambda { params, body } => {
                f.write_str("(lambda ")?;
                write_names(f, params)?;
                write!(f, " {body})")
            }
            Expr::App { func, args } => {
                write!(f, "({func}")?;
                write_spaced(f, args)?;
                f.write_char(')')
            }
            Expr::Cond { clauses, otherwise } => {
                f.write_str("(cond")?;
                for c in clauses {
                    write!(f, " [{} {}]", c.test, c.body)?;
                }
                if let Some(e) = otherwise {
                    write!(f, " [else {e}]")?;
                }
                f.write_char(')')
            }
            Expr::If { test, then, otherwise } => write!(f, "(if {test} {then} {otherwise})"),
            Expr::And(es) => {
                f.write_str("(and")?;
                write_spaced(f, es)?;
                f.write_char(')')
            }
            Expr::Or(es) => {
                f.write_str("(or")?;
                write_spaced(f, es)?;
                f.write_char(')')
            }
            Expr::New { class, args } => {
                write!(f, "(new {class}")?;
                write_spaced(f, args)?;
                f.write_char(')')
            }
            Expr::Send { receiver, message, args } => {
                write!(f, "(send {receiver} {message}")?;
                write_spaced(f, args)?;
                f.write_char(')')
            }
        }
    }
}

fn write_check(f: &mut fmt::Formatter<'_>, c: &CheckForm) -> fmt::Result {
    match &c.tolerance {
        None => write!(f, "(check-expect {} {})", c.actual, c.expected),
        Some(t) => write!(f, "(check-within {} {} {t})", c.actual, c.expected),
    }
}

impl Display for Defn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defn::Function { name, params, body, .. } => {
                write!(f, "(define ({name}")?;
                params.iter().try_for_each(|p| write!(f, " {p}"))?;
                write!(f, ") {body})")
            }
            Defn::Constant { name, value, .. } => write!(f, "(define {name} {value})"),
            Defn::Check(c) => write_check(f, c),
            Defn::Expr { expr, .. } => write!(f, "{expr}"),
            Defn::BigBang { world, .. } => write!(f, "(big-bang {world})"),
            Defn::Require { specs, .. } => write!(f, "(require {})", specs.join(" ")),
            Defn::Class(c) => {
                write!(f, "(define-class {}", c.name)?;
                if let Some(s) = &c.super_name {
                    write!(f, "\n  (super {s})")?;
                }
                if !c.fields.is_empty() {
                    f.write_str("\n  (fields")?;
                    c.fields.iter().try_for_each(|n| write!(f, " {n}"))?;
                    f.write_char(')')?;
                }
                if let Some(k) = &c.constructor {
                    f.write_str("\n  (constructor ")?;
                    write_names(f, &k.params)?;
                    f.write_str(" (fields")?;
                    write_spaced(f, &k.inits)?;
                    f.write_str("))")?;
                }
                for m in &c.members {
                    f.write_str("\n  ")?;
                    match m {
                        ClassMember::Method(m) => {
                            write!(f, "(define ({}", m.name)?;
                            m.params.iter().try_for_each(|p| write!(f, " {p}"))?;
                            write!(f, ") {})", m.body)?;
                        }
                        ClassMember::Check(c) => write_check(f, c)?,
                    }
                }
                f.write_char(')')
            }
        }
    }
}

/// Renders a whole program, one top-level form per line.
pub fn print_program(defns: &[Defn]) -> String {
    let mut out = String::new();
    for d in defns {
        let _ = writeln!(out, "{d}");
    }
    out
}
