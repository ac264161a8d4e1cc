use std::sync::Arc;

use crate::error::{Error, Position, Result};
use crate::reader::{Feature, LanguageLevel, Token, TokenKind};
use crate::syntax::{
    CheckForm, ClassForm, ClassMember, CondClause, ConstructorForm, Defn, Expr, MethodForm, Name,
};

const KEYWORDS: &[&str] = &[
    "define",
    "define-class",
    "lambda",
    "λ",
    "cond",
    "else",
    "if",
    "and",
    "or",
    "new",
    "send",
    "check-expect",
    "check-within",
    "require",
    "big-bang",
    "fields",
    "super",
    "constructor",
];

fn is_keyword(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

/// S-expression tree over tokens.
#[derive(Debug)]
enum Datum<'t> {
    Atom(&'t Token),
    Dot(&'t Token),
    List { open: &'t Token, items: Vec<Datum<'t>> },
}

impl<'t> Datum<'t> {
    fn pos(&self) -> Position {
        match self {
            Datum::Atom(t) | Datum::Dot(t) => t.pos,
            Datum::List { open, .. } => open.pos,
        }
    }

    fn ident(&self) -> Option<&'t str> {
        match self {
            Datum::Atom(t) if t.kind == TokenKind::Identifier => Some(&t.text),
            _ => None,
        }
    }

    /// The head identifier of a list, if any.
    fn head(&self) -> Option<&'t str> {
        match self {
            Datum::List { items, .. } => items.first().and_then(Datum::ident),
            _ => None,
        }
    }
}

fn closer_for(open: &str) -> &'static str {
    if open == "[" {
        "]"
    } else {
        ")"
    }
}

fn read_data(tokens: &[Token]) -> Result<Vec<Datum<'_>>> {
    let mut stack: Vec<(&Token, Vec<Datum<'_>>)> = Vec::new();
    let mut top = Vec::new();
    for tok in tokens {
        match tok.kind {
            TokenKind::LParen => stack.push((tok, Vec::new())),
            TokenKind::RParen => {
                let Some((open, items)) = stack.pop() else {
                    return Err(Error::parse(tok.pos, format!("unexpected `{}`", tok.text)));
                };
                let want = closer_for(&open.text);
                if tok.text != want {
                    return Err(Error::parse(
                        tok.pos,
                        format!("expected `{want}` to close `{}` at {}, found `{}`", open.text, open.pos, tok.text),
                    ));
                }
                let list = Datum::List { open, items };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(list),
                    None => top.push(list),
                }
            }
            _ => {
                let d = if tok.kind == TokenKind::Dot { Datum::Dot(tok) } else { Datum::Atom(tok) };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(d),
                    None => top.push(d),
                }
            }
        }
    }
    if let Some((open, _)) = stack.last() {
        return Err(Error::parse(open.pos, format!("missing `{}` to close this `{}`", closer_for(&open.text), open.text)));
    }
    Ok(top)
}

struct Parser {
    level: LanguageLevel,
}

impl Parser {
    fn name(&self, d: &Datum<'_>, what: &str) -> Result<Name> {
        match d.ident() {
            Some(id) if !is_keyword(id) && id != "this" => Ok(id.into()),
            Some(id) => Err(Error::parse(d.pos(), format!("{what}: `{id}` is a keyword and cannot be used as a name"))),
            None => Err(Error::parse(d.pos(), format!("{what}: expected a name"))),
        }
    }

    fn params(&self, d: &Datum<'_>, what: &str) -> Result<Vec<Name>> {
        let Datum::List { items, .. } = d else {
            return Err(Error::parse(d.pos(), format!("{what}: expected a parenthesized list of parameters")));
        };
        let mut out: Vec<Name> = Vec::with_capacity(items.len());
        for item in items {
            let n = self.name(item, what)?;
            if out.contains(&n) {
                return Err(Error::parse(item.pos(), format!("{what}: duplicate parameter `{n}`")));
            }
            out.push(n);
        }
        Ok(out)
    }

    fn arity(&self, pos: Position, form: &str, items: &[Datum<'_>], expected: usize, shape: &str) -> Result<()> {
        if items.len() != expected + 1 {
            return Err(Error::parse(pos, format!("{form}: expected {shape}")));
        }
        Ok(())
    }

    fn defn(&self, d: &Datum<'_>) -> Result<Defn> {
        let pos = d.pos();
        let Datum::List { items, .. } = d else {
            return Ok(Defn::Expr { expr: self.expr(d)?, pos });
        };
        if items.iter().any(|i| matches!(i, Datum::Dot(_))) {
            return Ok(Defn::Expr { expr: self.expr(d)?, pos });
        }
        match d.head() {
            Some("define") => {
                self.arity(pos, "define", items, 2, "a name (or header) and one body expression")?;
                match &items[1] {
                    Datum::List { items: header, .. } => {
                        let Some(first) = header.first() else {
                            return Err(Error::parse(items[1].pos(), "define: expected a function name"));
                        };
                        let name = self.name(first, "define")?;
                        let params = self.params_tail(&header[1..], "define")?;
                        Ok(Defn::Function { name, params, body: self.expr(&items[2])?, pos })
                    }
                    other => {
                        let name = self.name(other, "define")?;
                        Ok(Defn::Constant { name, value: self.expr(&items[2])?, pos })
                    }
                }
            }
            Some("define-class") => Ok(Defn::Class(self.class(pos, items)?)),
            Some("check-expect") | Some("check-within") => Ok(Defn::Check(self.check(pos, items)?)),
            Some("require") => {
                let specs = items[1..]
                    .iter()
                    .map(|i| match i {
                        Datum::Atom(t) => match &t.kind {
                            TokenKind::Identifier => Ok(t.text.clone()),
                            TokenKind::Str(s) => Ok(s.clone()),
                            _ => Err(Error::parse(t.pos, "require: expected a library name")),
                        },
                        _ => Err(Error::parse(i.pos(), "require: expected a library name")),
                    })
                    .collect::<Result<_>>()?;
                Ok(Defn::Require { specs, pos })
            }
            Some("big-bang") => {
                self.arity(pos, "big-bang", items, 1, "a single argument, the initial world")?;
                Ok(Defn::BigBang { world: self.expr(&items[1])?, pos })
            }
            _ => Ok(Defn::Expr { expr: self.expr(d)?, pos }),
        }
    }

    fn params_tail(&self, items: &[Datum<'_>], what: &str) -> Result<Vec<Name>> {
        let mut out: Vec<Name> = Vec::with_capacity(items.len());
        for item in items {
            let n = self.name(item, what)?;
            if out.contains(&n) {
                return Err(Error::parse(item.pos(), format!("{what}: duplicate parameter `{n}`")));
            }
            out.push(n);
        }
        Ok(out)
    }

    fn check(&self, pos: Position, items: &[Datum<'_>]) -> Result<CheckForm> {
        let form = items[0].ident().unwrap_or_default();
        if form == "check-within" {
            self.arity(pos, form, items, 3, "an actual expression, an expected value, and a tolerance")?;
            Ok(CheckForm {
                actual: self.expr(&items[1])?,
                expected: self.expr(&items[2])?,
                tolerance: Some(self.expr(&items[3])?),
                pos,
            })
        } else {
            self.arity(pos, form, items, 2, "an actual expression and an expected value")?;
            Ok(CheckForm { actual: self.expr(&items[1])?, expected: self.expr(&items[2])?, tolerance: None, pos })
        }
    }

    fn class(&self, pos: Position, items: &[Datum<'_>]) -> Result<ClassForm> {
        self.level.require(Feature::Classes, Some(pos))?;
        let Some(name_datum) = items.get(1) else {
            return Err(Error::parse(pos, "define-class: expected a class name"));
        };
        let mut class = ClassForm {
            name: self.name(name_datum, "define-class")?,
            super_name: None,
            fields: Vec::new(),
            constructor: None,
            members: Vec::new(),
            pos,
        };
        let mut seen_fields = false;
        for clause in &items[2..] {
            let cpos = clause.pos();
            let Datum::List { items: parts, .. } = clause else {
                return Err(Error::parse(cpos, "define-class: expected a clause such as (fields ...) or (define ...)"));
            };
            match clause.head() {
                Some("fields") => {
                    if seen_fields {
                        return Err(Error::parse(cpos, "define-class: duplicate fields clause"));
                    }
                    seen_fields = true;
                    class.fields = parts[1..].iter().map(|f| self.name(f, "fields")).collect::<Result<_>>()?;
                }
                Some("super") => {
                    self.level.require(Feature::SuperClasses, Some(cpos))?;
                    if class.super_name.is_some() {
                        return Err(Error::parse(cpos, "define-class: only one super class is allowed"));
                    }
                    self.arity(cpos, "super", parts, 1, "exactly one super class name")?;
                    class.super_name = Some(self.name(&parts[1], "super")?);
                }
                Some("constructor") => {
                    self.level.require(Feature::Constructors, Some(cpos))?;
                    if class.constructor.is_some() {
                        return Err(Error::parse(cpos, "define-class: duplicate constructor"));
                    }
                    self.arity(cpos, "constructor", parts, 2, "a parameter list and a (fields expr ...) clause")?;
                    let params = self.params(&parts[1], "constructor")?;
                    let inits = match &parts[2] {
                        d @ Datum::List { items: init, .. } if d.head() == Some("fields") => {
                            init[1..].iter().map(|e| self.expr(e)).collect::<Result<_>>()?
                        }
                        other => {
                            return Err(Error::parse(other.pos(), "constructor: expected (fields expr ...)"));
                        }
                    };
                    class.constructor = Some(ConstructorForm { params, inits, pos: cpos });
                }
                Some("define") => {
                    self.arity(cpos, "define", parts, 2, "a method header and one body expression")?;
                    let Datum::List { items: header, .. } = &parts[1] else {
                        return Err(Error::parse(
                            parts[1].pos(),
                            "define-class: expected a method definition (define (name arg ...) body)",
                        ));
                    };
                    let Some(first) = header.first() else {
                        return Err(Error::parse(parts[1].pos(), "define: expected a method name"));
                    };
                    class.members.push(ClassMember::Method(MethodForm {
                        name: self.name(first, "define")?,
                        params: self.params_tail(&header[1..], "define")?,
                        body: self.expr(&parts[2])?,
                        pos: cpos,
                    }));
                }
                Some("check-expect") | Some("check-within") => {
                    class.members.push(ClassMember::Check(self.check(cpos, parts)?));
                }
                _ => {
                    return Err(Error::parse(
                        cpos,
                        "define-class: expected (fields ...), (super ...), (constructor ...), (define ...), or a check",
                    ))
                }
            }
        }
        Ok(class)
    }

    fn expr(&self, d: &Datum<'_>) -> Result<Expr> {
        match d {
            Datum::Dot(t) => Err(Error::parse(t.pos, "unexpected `.`")),
            Datum::Atom(t) => match &t.kind {
                TokenKind::Number(n) => Ok(Expr::Number(n.clone())),
                TokenKind::Str(s) => Ok(Expr::Str(s.as_str().into())),
                TokenKind::Bool(b) => Ok(Expr::Bool(*b)),
                TokenKind::Identifier if t.text == "this" => Ok(Expr::This),
                TokenKind::Identifier if is_keyword(&t.text) => Err(Error::parse(
                    t.pos,
                    format!("{}: expected an open parenthesis before `{}`", t.text, t.text),
                )),
                TokenKind::Identifier => Ok(Expr::Var(t.text.as_str().into())),
                _ => Err(Error::parse(t.pos, format!("unexpected `{}`", t.text))),
            },
            Datum::List { open, items } => {
                if items.iter().any(|i| matches!(i, Datum::Dot(_))) {
                    self.level.require(Feature::DotNotation, Some(open.pos))?;
                    return self.dotted(open.pos, items);
                }
                let Some(head) = items.first() else {
                    return Err(Error::parse(open.pos, "(): missing function name"));
                };
                let pos = open.pos;
                match head.ident() {
                    Some("lambda") | Some("λ") => {
                        self.arity(pos, "lambda", items, 2, "a parameter list and one body expression")?;
                        Ok(Expr::Lambda {
                            params: self.params(&items[1], "lambda")?.into(),
                            body: Arc::new(self.expr(&items[2])?),
                        })
                    }
                    Some("if") => {
                        self.arity(pos, "if", items, 3, "a question and two answers")?;
                        Ok(Expr::If {
                            test: Box::new(self.expr(&items[1])?),
                            then: Box::new(self.expr(&items[2])?),
                            otherwise: Box::new(self.expr(&items[3])?),
                        })
                    }
                    Some(op @ ("and" | "or")) => {
                        if items.len() < 3 {
                            return Err(Error::parse(pos, format!("{op}: expects at least 2 arguments")));
                        }
                        let es = items[1..].iter().map(|e| self.expr(e)).collect::<Result<_>>()?;
                        Ok(if op == "and" { Expr::And(es) } else { Expr::Or(es) })
                    }
                    Some("cond") => self.cond(pos, &items[1..]),
                    Some("new") => {
                        let Some(class) = items.get(1) else {
                            return Err(Error::parse(pos, "new: expected a class name"));
                        };
                        Ok(Expr::New {
                            class: self.name(class, "new")?,
                            args: items[2..].iter().map(|e| self.expr(e)).collect::<Result<_>>()?,
                        })
                    }
                    Some("send") => {
                        if items.len() < 3 {
                            return Err(Error::parse(pos, "send: expected an object and a message name"));
                        }
                        Ok(Expr::Send {
                            receiver: Box::new(self.expr(&items[1])?),
                            message: self.name(&items[2], "send")?,
                            args: items[3..].iter().map(|e| self.expr(e)).collect::<Result<_>>()?,
                        })
                    }
                    Some(kw @ ("define" | "define-class" | "require" | "big-bang")) => {
                        Err(Error::parse(pos, format!("{kw}: found a form that is only allowed at the top level")))
                    }
                    Some(kw @ ("check-expect" | "check-within")) => Err(Error::parse(
                        pos,
                        format!("{kw}: only allowed at the top level or directly in a class body"),
                    )),
                    Some(kw @ ("else" | "fields" | "super" | "constructor")) => {
                        Err(Error::parse(pos, format!("{kw}: not allowed here")))
                    }
                    _ => Ok(Expr::App {
                        func: Box::new(self.expr(head)?),
                        args: items[1..].iter().map(|e| self.expr(e)).collect::<Result<_>>()?,
                    }),
                }
            }
        }
    }

    fn cond(&self, pos: Position, clauses: &[Datum<'_>]) -> Result<Expr> {
        if clauses.is_empty() {
            return Err(Error::parse(pos, "cond: expected at least one clause"));
        }
        let mut out = Vec::new();
        let mut otherwise = None;
        for (i, clause) in clauses.iter().enumerate() {
            let Datum::List { items, .. } = clause else {
                return Err(Error::parse(clause.pos(), "cond: expected a clause with a question and an answer"));
            };
            if items.len() != 2 {
                return Err(Error::parse(clause.pos(), "cond: expected a clause with a question and an answer"));
            }
            if items[0].ident() == Some("else") {
                if i + 1 != clauses.len() {
                    return Err(Error::parse(clause.pos(), "cond: found an else clause that isn't the last clause"));
                }
                otherwise = Some(Box::new(self.expr(&items[1])?));
            } else {
                out.push(CondClause { test: self.expr(&items[0])?, body: self.expr(&items[1])? });
            }
        }
        Ok(Expr::Cond { clauses: out, otherwise })
    }

    /// `(e . m a ... . n b ...)` becomes `(send (send e m a ...) n b ...)`.
    fn dotted(&self, pos: Position, items: &[Datum<'_>]) -> Result<Expr> {
        let mut segments: Vec<(Option<&Datum<'_>>, Vec<&Datum<'_>>)> = vec![(None, Vec::new())];
        for item in items {
            match item {
                Datum::Dot(_) => segments.push((Some(item), Vec::new())),
                other => segments.last_mut().expect("nonempty").1.push(other),
            }
        }
        let receiver = match segments[0].1.as_slice() {
            [] => return Err(Error::parse(pos, "dot notation: missing receiver before `.`")),
            [single] => self.expr(single)?,
            [_, extra, ..] => {
                return Err(Error::parse(
                    extra.pos(),
                    "dot notation: expected a single expression before the first `.`",
                ))
            }
        };
        segments[1..].iter().try_fold(receiver, |acc, (dot, seg)| {
            let dot_pos = dot.map(Datum::pos).unwrap_or(pos);
            let Some((message, args)) = seg.split_first() else {
                return Err(Error::parse(dot_pos, "dot notation: expected a message name after `.`"));
            };
            if message.ident().is_none() {
                return Err(Error::parse(message.pos(), "dot notation: expected a message name after `.`"));
            }
            Ok(Expr::Send {
                receiver: Box::new(acc),
                message: self.name(message, "dot notation")?,
                args: args.iter().map(|a| self.expr(a)).collect::<Result<_>>()?,
            })
        })
    }
}

/// Parses tokens into level-checked top-level forms. Constructs beyond
/// `level` are rejected with a level error naming the level they need.
pub fn parse_program(tokens: &[Token], level: LanguageLevel) -> Result<Vec<Defn>> {
    let parser = Parser { level };
    read_data(tokens)?.iter().map(|d| parser.defn(d)).collect()
}

/// Desugars one parenthesized dot form, given as its tokens including the
/// outer parentheses.
pub fn desugar_dot(form: &[Token]) -> Result<Expr> {
    let data = read_data(form)?;
    let pos = form.first().map(|t| t.pos).unwrap_or_default();
    match data.as_slice() {
        [Datum::List { open, items }] if items.iter().any(|i| matches!(i, Datum::Dot(_))) => {
            Parser { level: LanguageLevel::MAX }.dotted(open.pos, items)
        }
        _ => Err(Error::parse(pos, "expected one parenthesized form containing `.`")),
    }
}
