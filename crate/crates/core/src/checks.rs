//! `check-expect` / `check-within`: collection, equality, and reporting.

use std::fmt;

use crate::error::{Error, Position, Result};
use crate::evaluator::{Env, Interp, Value};
use crate::syntax::{CheckForm, ClassMember, Defn, Expr, Name};

/// Where a check was written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    TopLevel,
    /// Written inside a class body. `method` is the method the check sits
    /// with: the next one defined after it, else the previous one.
    Lifted { class: Name, method: Option<Name> },
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::TopLevel => f.write_str("top level"),
            Origin::Lifted { class, method: Some(m) } => write!(f, "class {class}, method {m}"),
            Origin::Lifted { class, method: None } => write!(f, "class {class}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestCase {
    pub actual: Expr,
    pub expected: Expr,
    pub tolerance: Option<Expr>,
    pub pos: Position,
    pub origin: Origin,
}

impl TestCase {
    fn from_form(c: &CheckForm, origin: Origin) -> Self {
        TestCase {
            actual: c.actual.clone(),
            expected: c.expected.clone(),
            tolerance: c.tolerance.clone(),
            pos: c.pos,
            origin,
        }
    }

    pub fn form_name(&self) -> &'static str {
        if self.tolerance.is_some() {
            "check-within"
        } else {
            "check-expect"
        }
    }
}

/// Every check in the program, class-body checks included, in source order.
pub fn lift_tests(program: &[Defn]) -> Vec<TestCase> {
    let mut out = Vec::new();
    for d in program {
        match d {
            Defn::Check(c) => out.push(TestCase::from_form(c, Origin::TopLevel)),
            Defn::Class(class) => {
                for (i, m) in class.members.iter().enumerate() {
                    let ClassMember::Check(c) = m else { continue };
                    let method_name = |m: &ClassMember| match m {
                        ClassMember::Method(m) => Some(m.name.clone()),
                        ClassMember::Check(_) => None,
                    };
                    let method = class.members[i + 1..]
                        .iter()
                        .find_map(method_name)
                        .or_else(|| class.members[..i].iter().rev().find_map(method_name));
                    out.push(TestCase::from_form(c, Origin::Lifted { class: class.name.clone(), method }));
                }
            }
            _ => {}
        }
    }
    out.sort_by_key(|t| t.pos);
    out
}

/// Structural equality used by checks. Numbers compare across exactness,
/// objects by class and fields, lists elementwise, images structurally.
/// Functions cannot be compared.
pub fn value_equal(a: &Value, b: &Value) -> Result<bool> {
    let (mut a, mut b) = (a, b);
    loop {
        return Ok(match (a, b) {
            (x, y) if x.is_procedure() || y.is_procedure() => {
                return Err(Error::runtime("equality: cannot compare functions"));
            }
            (Value::Number(x), Value::Number(y)) => x.num_eq(y),
            (Value::Bool(x), Value::Bool(y)) => x == y,
            (Value::Str(x), Value::Str(y)) => x == y,
            (Value::Empty, Value::Empty) => true,
            (Value::Cons(x), Value::Cons(y)) => {
                if !value_equal(&x.first, &y.first)? {
                    return Ok(false);
                }
                a = &x.rest;
                b = &y.rest;
                continue;
            }
            (Value::Object(x), Value::Object(y)) => {
                if x.class != y.class || x.fields.len() != y.fields.len() {
                    return Ok(false);
                }
                for (fx, fy) in x.fields.iter().zip(&y.fields) {
                    if !value_equal(fx, fy)? {
                        return Ok(false);
                    }
                }
                true
            }
            (Value::Scene(x), Value::Scene(y)) => x.same_as(y),
            _ => false,
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FailureKind {
    Mismatch { actual: String, expected: String },
    OutOfTolerance { actual: String, expected: String, tolerance: String },
    /// Evaluating the check raised an error.
    Error(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub pos: Position,
    pub form: &'static str,
    pub origin: Origin,
    pub kind: FailureKind,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TestReport {
    pub total: usize,
    pub passed: usize,
    pub failures: Vec<Failure>,
}

impl TestReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn plural(n: usize) -> &'static str {
    if n == 1 {
        ""
    } else {
        "s"
    }
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.total == 0 {
            return writeln!(f, "0 tests");
        }
        if self.failures.is_empty() {
            return writeln!(f, "{} test{} passed", self.total, plural(self.total));
        }
        writeln!(f, "{} of {} test{} failed.", self.failures.len(), self.total, plural(self.total))?;
        for fail in &self.failures {
            writeln!(f)?;
            let origin = match fail.origin {
                Origin::TopLevel => String::new(),
                ref o => format!(" ({o})"),
            };
            match &fail.kind {
                FailureKind::Mismatch { actual, expected } => {
                    writeln!(f, "{} failed at {}{origin}", fail.form, fail.pos)?;
                    writeln!(f, "  actual:   {actual}")?;
                    writeln!(f, "  expected: {expected}")?;
                }
                FailureKind::OutOfTolerance { actual, expected, tolerance } => {
                    writeln!(f, "{} failed at {}{origin}", fail.form, fail.pos)?;
                    writeln!(f, "  actual:    {actual}")?;
                    writeln!(f, "  expected:  {expected}")?;
                    writeln!(f, "  tolerance: {tolerance}")?;
                }
                FailureKind::Error(msg) => {
                    writeln!(f, "{} raised an error at {}{origin}", fail.form, fail.pos)?;
                    writeln!(f, "  {msg}")?;
                }
            }
        }
        Ok(())
    }
}

fn run_one(case: &TestCase, interp: &Interp) -> Result<Option<FailureKind>> {
    let env = Env::empty();
    let actual = interp.eval_expr(&env, &case.actual)?;
    let expected = interp.eval_expr(&env, &case.expected)?;
    match &case.tolerance {
        None => Ok((!value_equal(&actual, &expected)?)
            .then(|| FailureKind::Mismatch { actual: actual.to_string(), expected: expected.to_string() })),
        Some(tol_expr) => {
            let tolerance = interp.eval_expr(&env, tol_expr)?;
            let (Some(a), Some(e), Some(t)) = (actual.as_number(), expected.as_number(), tolerance.as_number()) else {
                return Err(Error::runtime(format!(
                    "check-within: expects numbers, given {actual}, {expected}, and {tolerance}"
                )));
            };
            if t.is_negative() {
                return Err(Error::runtime(format!("check-within: tolerance must be non-negative, given {t}")));
            }
            let diff = (a.clone() - e.clone()).abs();
            let within = diff.num_cmp(t).is_some_and(|o| o != std::cmp::Ordering::Greater);
            Ok((!within).then(|| FailureKind::OutOfTolerance {
                actual: actual.to_string(),
                expected: expected.to_string(),
                tolerance: tolerance.to_string(),
            }))
        }
    }
}

/// Runs checks in order. An error inside one check is recorded as that
/// check's failure; the rest still run.
pub fn run_tests(cases: &[TestCase], interp: &Interp) -> TestReport {
    let mut report = TestReport { total: cases.len(), ..TestReport::default() };
    for case in cases {
        let kind = match run_one(case, interp) {
            Ok(None) => {
                report.passed += 1;
                continue;
            }
            Ok(Some(kind)) => kind,
            Err(e) => FailureKind::Error(e.to_string()),
        };
        report.failures.push(Failure { pos: case.pos, form: case.form_name(), origin: case.origin.clone(), kind });
    }
    report
}
