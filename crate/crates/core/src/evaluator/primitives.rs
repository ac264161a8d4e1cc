use std::cmp::Ordering;
use std::sync::Arc;

use super::{Arity, Primitive, Value};
use crate::checks::value_equal;
use crate::error::{Error, Result};
use crate::images;
use crate::Number;

macro_rules! prim {
    ($name:expr, $arity:expr, $run:expr) => {
        Primitive { name: $name, arity: $arity, run: $run }
    };
}

pub(super) static PRIMITIVES: &[Primitive] = &[
    // numbers
    prim!("+", Arity::AtLeast(1), |_, a, _| fold_numbers("+", a, |x, y| Ok(x + y))),
    prim!("*", Arity::AtLeast(1), |_, a, _| fold_numbers("*", a, |x, y| Ok(x * y))),
    prim!("-", Arity::AtLeast(1), |_, a, _| {
        if a.len() == 1 {
            Ok(Value::Number(-number("-", &a[0])?.clone()))
        } else {
            fold_numbers("-", a, |x, y| Ok(x - y))
        }
    }),
    prim!("/", Arity::AtLeast(1), |_, a, _| {
        if a.len() == 1 {
            Ok(Value::Number(Number::integer(1).checked_div(number("/", &a[0])?.clone())?))
        } else {
            fold_numbers("/", a, |x, y| Ok(x.checked_div(y)?))
        }
    }),
    prim!("=", Arity::AtLeast(1), |_, a, _| compare("=", a, |o| o == Ordering::Equal)),
    prim!("<", Arity::AtLeast(1), |_, a, _| compare("<", a, |o| o == Ordering::Less)),
    prim!(">", Arity::AtLeast(1), |_, a, _| compare(">", a, |o| o == Ordering::Greater)),
    prim!("<=", Arity::AtLeast(1), |_, a, _| compare("<=", a, |o| o != Ordering::Greater)),
    prim!(">=", Arity::AtLeast(1), |_, a, _| compare(">=", a, |o| o != Ordering::Less)),
    prim!("max", Arity::AtLeast(1), |_, a, _| extremum("max", a, Ordering::Greater)),
    prim!("min", Arity::AtLeast(1), |_, a, _| extremum("min", a, Ordering::Less)),
    prim!("sqr", Arity::Exactly(1), |_, a, _| Ok(number("sqr", &a[0])?.sqr().into())),
    prim!("sqrt", Arity::Exactly(1), |_, a, _| Ok(number("sqrt", &a[0])?.sqrt()?.into())),
    prim!("add1", Arity::Exactly(1), |_, a, _| Ok(number("add1", &a[0])?.add1().into())),
    prim!("sub1", Arity::Exactly(1), |_, a, _| Ok(number("sub1", &a[0])?.sub1().into())),
    prim!("abs", Arity::Exactly(1), |_, a, _| Ok(number("abs", &a[0])?.abs().into())),
    prim!("zero?", Arity::Exactly(1), |_, a, _| Ok(number("zero?", &a[0])?.is_zero().into())),
    prim!("positive?", Arity::Exactly(1), |_, a, _| Ok(number("positive?", &a[0])?.is_positive().into())),
    prim!("negative?", Arity::Exactly(1), |_, a, _| Ok(number("negative?", &a[0])?.is_negative().into())),
    prim!("exact->inexact", Arity::Exactly(1), |_, a, _| {
        Ok(Number::Inexact(number("exact->inexact", &a[0])?.to_float()).into())
    }),
    prim!("number?", Arity::Exactly(1), |_, a, _| Ok(matches!(a[0], Value::Number(_)).into())),
    prim!("integer?", Arity::Exactly(1), |_, a, _| {
        Ok(match &a[0] {
            Value::Number(Number::Exact(r)) => r.is_integer(),
            Value::Number(Number::Inexact(x)) => x.fract() == 0.0,
            _ => false,
        }
        .into())
    }),
    // booleans and equality
    prim!("not", Arity::Exactly(1), |_, a, _| match a[0] {
        Value::Bool(b) => Ok((!b).into()),
        ref other => Err(type_error("not", "a boolean", other)),
    }),
    prim!("boolean?", Arity::Exactly(1), |_, a, _| Ok(matches!(a[0], Value::Bool(_)).into())),
    prim!("equal?", Arity::Exactly(2), |_, a, _| Ok(value_equal(&a[0], &a[1])?.into())),
    // strings
    prim!("string?", Arity::Exactly(1), |_, a, _| Ok(matches!(a[0], Value::Str(_)).into())),
    prim!("string-append", Arity::AtLeast(0), |_, a, _| {
        let mut out = String::new();
        for v in &a {
            out.push_str(string("string-append", v)?);
        }
        Ok(Value::string(&out))
    }),
    prim!("string=?", Arity::AtLeast(2), |_, a, _| {
        let first = string("string=?", &a[0])?;
        let mut all = true;
        for v in &a[1..] {
            all &= string("string=?", v)? == first;
        }
        Ok(all.into())
    }),
    // lists
    prim!("cons", Arity::Exactly(2), |_, mut a, _| {
        let rest = a.pop().expect("arity");
        let first = a.pop().expect("arity");
        if !rest.is_list() {
            return Err(Error::runtime(format!("cons: second argument must be a list, but received {first} and {rest}")));
        }
        Ok(Value::cons(first, rest))
    }),
    prim!("list", Arity::AtLeast(0), |_, a, _| Ok(Value::list(a))),
    prim!("first", Arity::Exactly(1), |_, a, _| match &a[0] {
        Value::Cons(p) => Ok(p.first.clone()),
        other => Err(type_error("first", "a non-empty list", other)),
    }),
    prim!("rest", Arity::Exactly(1), |_, a, _| match &a[0] {
        Value::Cons(p) => Ok(p.rest.clone()),
        other => Err(type_error("rest", "a non-empty list", other)),
    }),
    prim!("empty?", Arity::Exactly(1), |_, a, _| Ok(matches!(a[0], Value::Empty).into())),
    prim!("cons?", Arity::Exactly(1), |_, a, _| Ok(matches!(a[0], Value::Cons(_)).into())),
    prim!("list?", Arity::Exactly(1), |_, a, _| Ok(a[0].is_list().into())),
    prim!("length", Arity::Exactly(1), |_, a, _| {
        let n = list("length", &a[0])?.len();
        Ok(Number::integer(n as i64).into())
    }),
    prim!("map", Arity::Exactly(2), |interp, a, depth| {
        let f = procedure("map", &a[0])?;
        let items = list("map", &a[1])?;
        let mapped = items.into_iter().map(|x| interp.apply_at(f, vec![x], depth)).collect::<Result<Vec<_>>>()?;
        Ok(Value::list(mapped))
    }),
    prim!("filter", Arity::Exactly(2), |interp, a, depth| {
        let f = procedure("filter", &a[0])?;
        let mut kept = Vec::new();
        for x in list("filter", &a[1])? {
            match interp.apply_at(f, vec![x.clone()], depth)? {
                Value::Bool(true) => kept.push(x),
                Value::Bool(false) => {}
                other => return Err(type_error("filter", "a predicate returning a boolean, which returned", &other)),
            }
        }
        Ok(Value::list(kept))
    }),
    prim!("foldr", Arity::Exactly(3), |interp, a, depth| {
        let f = procedure("foldr", &a[0])?;
        list("foldr", &a[2])?
            .into_iter()
            .rev()
            .try_fold(a[1].clone(), |acc, x| interp.apply_at(f, vec![x, acc], depth))
    }),
    prim!("foldl", Arity::Exactly(3), |interp, a, depth| {
        let f = procedure("foldl", &a[0])?;
        list("foldl", &a[2])?
            .into_iter()
            .try_fold(a[1].clone(), |acc, x| interp.apply_at(f, vec![x, acc], depth))
    }),
    // images
    prim!("circle", Arity::Exactly(3), |_, a, _| {
        let scene = images::circle(number("circle", &a[0])?.clone(), string("circle", &a[1])?, string("circle", &a[2])?)?;
        Ok(scene.into())
    }),
    prim!("empty-scene", Arity::Exactly(2), |_, a, _| {
        let scene = images::empty_scene(number("empty-scene", &a[0])?.clone(), number("empty-scene", &a[1])?.clone())?;
        Ok(scene.into())
    }),
    prim!("place-image", Arity::Exactly(4), |_, a, _| {
        let image = scene("place-image", &a[0])?;
        let x = number("place-image", &a[1])?.clone();
        let y = number("place-image", &a[2])?.clone();
        let base = scene("place-image", &a[3])?;
        Ok(images::place_image(image, x, y, base)?.into())
    }),
    prim!("image?", Arity::Exactly(1), |_, a, _| Ok(matches!(a[0], Value::Scene(_)).into())),
];

fn type_error(name: &str, expected: &str, given: &Value) -> Error {
    Error::runtime(format!("{name}: expects {expected}, given {given}"))
}

fn number<'a>(name: &str, v: &'a Value) -> Result<&'a Number> {
    v.as_number().ok_or_else(|| type_error(name, "a number", v))
}

fn string<'a>(name: &str, v: &'a Value) -> Result<&'a str> {
    match v {
        Value::Str(s) => Ok(s),
        other => Err(type_error(name, "a string", other)),
    }
}

fn list(name: &str, v: &Value) -> Result<Vec<Value>> {
    v.list_items().ok_or_else(|| type_error(name, "a list", v))
}

fn procedure<'a>(name: &str, v: &'a Value) -> Result<&'a Value> {
    if v.is_procedure() {
        Ok(v)
    } else {
        Err(type_error(name, "a function", v))
    }
}

fn scene(name: &str, v: &Value) -> Result<Arc<images::Scene>> {
    match v {
        Value::Scene(s) => Ok(s.clone()),
        other => Err(type_error(name, "an image", other)),
    }
}

fn fold_numbers(name: &str, args: Vec<Value>, op: impl Fn(Number, Number) -> Result<Number>) -> Result<Value> {
    let mut iter = args.iter();
    let first = number(name, iter.next().expect("arity"))?.clone();
    iter.try_fold(first, |acc, v| op(acc, number(name, v)?.clone())).map(Value::Number)
}

fn compare(name: &str, args: Vec<Value>, accept: impl Fn(Ordering) -> bool) -> Result<Value> {
    let nums = args.iter().map(|v| number(name, v)).collect::<Result<Vec<_>>>()?;
    Ok(nums.windows(2).all(|w| w[0].num_cmp(w[1]).is_some_and(&accept)).into())
}

fn extremum(name: &str, args: Vec<Value>, keep: Ordering) -> Result<Value> {
    let nums = args.iter().map(|v| number(name, v)).collect::<Result<Vec<_>>>()?;
    let inexact = nums.iter().any(|n| !n.is_exact());
    let mut best = nums[0];
    for n in &nums[1..] {
        if n.num_cmp(best) == Some(keep) {
            best = n;
        }
    }
    Ok(if inexact { Number::Inexact(best.to_float()) } else { best.clone() }.into())
}

#[cfg(test)]
mod tests {
    use crate::evaluator::{Env, Interp, Value};
    use crate::reader::{parse_program, tokenize};
    use crate::syntax::Defn;
    use crate::LanguageLevel;

    fn run(src: &str) -> Result<Value, String> {
        let defs = parse_program(&tokenize(src).unwrap(), LanguageLevel::MAX).unwrap();
        let Defn::Expr { expr, .. } = &defs[0] else { panic!() };
        Interp::new(LanguageLevel::MAX).eval_expr(&Env::empty(), expr).map_err(|e| e.to_string())
    }

    fn show(src: &str) -> String {
        run(src).unwrap().to_string()
    }

    #[test]
    fn list_primitives() {
        assert_eq!(show("(map add1 (cons 1 (cons 2 empty)))"), "(list 2 3)");
        assert_eq!(show("(length empty)"), "0");
        assert_eq!(show("(foldr + 0 (cons 1 (cons 5 (cons 10 empty))))"), "16");
        assert_eq!(show("(foldr cons empty (list 1 2 3))"), "(list 1 2 3)");
        assert_eq!(show("(foldl cons empty (list 1 2 3))"), "(list 3 2 1)");
        assert_eq!(show("(filter zero? (list 0 1 0 2))"), "(list 0 0)");
        assert_eq!(show("(first (rest (list 1 2)))"), "2");
        assert_eq!(show("(empty? empty)"), "true");
        assert_eq!(show("(cons? (list 1))"), "true");
    }

    #[test]
    fn list_errors() {
        assert!(run("(first empty)").unwrap_err().contains("non-empty list"));
        assert!(run("(rest empty)").is_err());
        assert!(run("(cons 1 2)").unwrap_err().contains("must be a list"));
        assert!(run("(filter add1 (list 1))").is_err());
        assert!(run("(map 3 (list 1))").is_err());
    }

    #[test]
    fn numeric_primitives() {
        assert_eq!(show("(/ 1 3)"), "1/3");
        assert_eq!(show("(- 5)"), "-5");
        assert_eq!(show("(/ 4)"), "1/4");
        assert_eq!(show("(- 10 1 2)"), "7");
        assert_eq!(show("(< 1 2 3)"), "true");
        assert_eq!(show("(< 1 3 2)"), "false");
        assert_eq!(show("(= 5 (sqrt 25))"), "true");
        assert_eq!(show("(max 1 5/2 2)"), "5/2");
        assert_eq!(show("(sqrt 2)"), "1.4142135623730951");
        assert_eq!(run("(/ 1 0)").unwrap_err(), "division by zero");
        assert!(run("(sqrt -1)").is_err());
        assert_eq!(run("(add1 \"a\")").unwrap_err(), "add1: expects a number, given \"a\"");
    }

    #[test]
    fn strings_and_equality() {
        assert_eq!(show("(string-append \"a\" \"b\")"), "\"ab\"");
        assert_eq!(show("(string=? \"a\" \"a\")"), "true");
        assert_eq!(show("(equal? (list 1 2) (list 1 2))"), "true");
        assert!(run("(equal? add1 add1)").unwrap_err().contains("cannot compare functions"));
        assert_eq!(show("(not false)"), "true");
    }

    #[test]
    fn image_primitives() {
        assert_eq!(
            show("(place-image (circle 10 \"solid\" \"red\") 10 200 (empty-scene 400 400))"),
            "(place-image (circle 10 \"solid\" \"red\") 10 200 (empty-scene 400 400))"
        );
        assert!(run("(circle 0 \"solid\" \"red\")").is_err());
        assert!(run("(place-image 1 2 3 (empty-scene 1 1))").is_err());
    }
}
