use std::sync::Arc;

use crate::checks::{lift_tests, run_tests, TestCase, TestReport};
use crate::error::{Error, Result};
use crate::evaluator::{Closure, Env, Interp, Value};
use crate::objects::{check_this_placement, ClassDef};
use crate::reader::LanguageLevel;
use crate::syntax::Defn;

/// A program with all definitions processed but its tests not yet run.
#[derive(Debug, Clone)]
pub struct LoadedProgram {
    pub interp: Interp,
    pub tests: Vec<TestCase>,
    /// The initial world, when the program ends in `big-bang`.
    pub big_bang: Option<Value>,
}

/// Processes definitions in order. `on_value` receives the value of each
/// top-level expression as it is evaluated.
pub fn load_program(defns: &[Defn], level: LanguageLevel, mut on_value: impl FnMut(&Value)) -> Result<LoadedProgram> {
    check_this_placement(defns)?;
    if let Some(i) = defns.iter().position(|d| matches!(d, Defn::BigBang { .. })) {
        if i + 1 != defns.len() {
            return Err(Error::definition(Some(defns[i].pos()), "big-bang: must be the last form in the program"));
        }
    }

    let mut interp = Interp::new(level);
    let mut big_bang = None;
    let env = Env::empty();
    let at = |pos| move |e| match e {
        e @ (Error::Runtime(_) | Error::Numeric(_)) => Error::At { pos, source: Box::new(e) },
        e => e,
    };
    for d in defns {
        match d {
            Defn::Function { name, params, body, pos } => {
                let closure = Closure {
                    name: Some(name.clone()),
                    params: params.clone().into(),
                    body: Arc::new(body.clone()),
                    env: Env::empty(),
                    this: None,
                };
                interp.define_global(name.clone(), Value::Closure(Arc::new(closure)), *pos)?;
            }
            Defn::Constant { name, value, pos } => {
                let v = interp.eval_expr(&env, value).map_err(at(*pos))?;
                interp.define_global(name.clone(), v, *pos)?;
            }
            Defn::Class(form) => {
                let mut classes = interp.classes.clone();
                classes.register(ClassDef::from_form(form), level)?;
                interp.classes = classes;
            }
            Defn::Expr { expr, pos } => on_value(&interp.eval_expr(&env, expr).map_err(at(*pos))?),
            Defn::BigBang { world, pos } => big_bang = Some(interp.eval_expr(&env, world).map_err(at(*pos))?),
            Defn::Check(_) | Defn::Require { .. } => {}
        }
    }
    Ok(LoadedProgram { interp, tests: lift_tests(defns), big_bang })
}

/// Loads a program and runs its tests. Top-level expression values are
/// discarded; the initial world of a `big-bang` is computed but not run.
pub fn eval_program(defns: &[Defn], level: LanguageLevel) -> Result<(Interp, TestReport)> {
    let loaded = load_program(defns, level, |_| {})?;
    let report = run_tests(&loaded.tests, &loaded.interp);
    Ok((loaded.interp, report))
}
