//! Acceptance suite. Prints one PASS/FAIL line per criterion; exits
//! nonzero if any fails. All comparisons are exact unless stated.

mod common;

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use classlang_core::evaluator::{load_program, Env, Value};
use classlang_core::images::render_svg;
use classlang_core::reader::{read_program, Feature};
use classlang_core::universe::{draw, run_headless, Event, EventTrace};
use classlang_core::wire::{encode, ServerMessage};
use classlang_core::{eval_program, run_tests, Error, ExactRational, LanguageLevel, LoadedProgram, Number};
use common::{corpus, start_server, wait_for_file, Client};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const GOLDEN_TIME_LIMIT: Duration = Duration::from_secs(1);
const NUMERIC_CASES: u32 = 10_000;
const SQRT_CASES: u32 = 1_000;
const DISPATCH_CASES: u32 = 500;

fn source(name: &str) -> String {
    std::fs::read_to_string(corpus(name)).unwrap()
}

fn load(name: &str) -> Result<LoadedProgram, String> {
    let (lv, defns) = read_program(&source(name), None, LanguageLevel::DEFAULT).map_err(|e| e.to_string())?;
    load_program(&defns, lv, |_| {}).map_err(|e| e.to_string())
}

fn golden_corpus() -> Outcome {
    let started = Instant::now();
    let mut detail = Vec::new();
    for (file, expected) in [("posn.rkt", 3), ("fig1.rkt", 2)] {
        let (lv, defns) = read_program(&source(file), None, LanguageLevel::DEFAULT).map_err(|e| e.to_string())?;
        let (_, report) = eval_program(&defns, lv).map_err(|e| e.to_string())?;
        ensure!(report.total == expected && report.passed == expected, "{file}: {report}");
        detail.push(format!("{file} {}/{}", report.passed, report.total));
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < GOLDEN_TIME_LIMIT, "took {elapsed:?}");
    Ok(format!("{} in {elapsed:?}", detail.join(", ")))
}

fn level_gating() -> Outcome {
    let fixtures = [
        ("levels/dot-at-0.rkt", Feature::DotNotation, 1u8),
        ("levels/super-at-1.rkt", Feature::SuperClasses, 2),
        ("levels/override-at-2.rkt", Feature::Overriding, 3),
        ("levels/constructor-at-3.rkt", Feature::Constructors, 4),
    ];
    let mut assertions = 0;
    for (file, feature, needed) in fixtures {
        let src = source(file);
        let below = read_program(&src, None, LanguageLevel::DEFAULT)
            .and_then(|(lv, defns)| eval_program(&defns, lv).map(|_| ()));
        match below {
            Err(e @ Error::Level { feature: f, .. }) if f == feature && e.to_string().contains(&format!("class/{needed}")) => {}
            other => return Err(format!("{file}: expected a class/{needed} level error, got {other:?}")),
        }
        assertions += 1;
        let at = LanguageLevel::new(needed).unwrap();
        let (lv, defns) = read_program(&src, Some(at), LanguageLevel::DEFAULT).map_err(|e| format!("{file}: {e}"))?;
        let (_, report) = eval_program(&defns, lv).map_err(|e| format!("{file}: {e}"))?;
        ensure!(report.total > 0 && report.all_passed(), "{file} at class/{needed}: {report}");
        assertions += 1;
    }
    Ok(format!("{assertions} assertions"))
}

fn world_semantics() -> Outcome {
    let p = load("fig2.rkt")?;
    let initial = p.big_bang.clone().ok_or("fig2 has no big-bang")?;
    let (last, log) = run_headless(&p.interp, &initial, &EventTrace::ticks(5)).map_err(|e| e.to_string())?;
    ensure!(last.to_string() == "(new world 15)", "5 ticks gave {last}");
    ensure!(log.len() == 6, "frame count {}", log.len());
    let mut traces = 1;
    for k in 0..=5 {
        let mut events = vec![Event::Tick; 5];
        events.insert(k, Event::Key("a".into()));
        let (last, log) = run_headless(&p.interp, &initial, &EventTrace::new(events)).map_err(|e| e.to_string())?;
        ensure!(log.frames[k + 1].world == "(new world 10)", "key at {k}: frame shows {}", log.frames[k + 1].world);
        let expected = format!("(new world {})", 10 + (5 - k));
        ensure!(last.to_string() == expected, "key at {k}: ended at {last}, expected {expected}");
        ensure!(log.len() == 7, "key at {k}: frame count {}", log.len());
        traces += 1;
    }

    let p = load("appendix.rkt")?;
    let initial = p.big_bang.clone().ok_or("appendix.rkt has no big-bang")?;
    let (landed, log) = run_headless(&p.interp, &initial, &EventTrace::ticks(401)).map_err(|e| e.to_string())?;
    ensure!(landed.to_string() == "(new landed-world)", "401 ticks gave {landed}");
    ensure!(log.len() == 402, "frame count {}", log.len());
    let still = draw(&p.interp, &landed).map_err(|e| e.to_string())?;
    let (still_json, still_svg) = (still.to_json_string(), render_svg(&still));
    let (_, after) = run_headless(&p.interp, &landed, &EventTrace::ticks(100)).map_err(|e| e.to_string())?;
    ensure!(after.len() == 101, "frame count {}", after.len());
    for f in &after.frames {
        ensure!(f.scene.to_json_string() == still_json && render_svg(&f.scene) == still_svg, "landed frame {} moved", f.step);
    }
    traces += 2;
    Ok(format!("{traces} traces; landed draw fixed over 100 ticks"))
}

fn rational() -> impl Strategy<Value = ExactRational> {
    let small = (-1000i64..1000, 1i64..1000);
    let wide = (any::<i64>(), 1..=i64::MAX);
    prop_oneof![small, wide].prop_map(|(n, d)| ExactRational::new(n.into(), d.into()).unwrap())
}

fn in_lowest_terms(r: &ExactRational) -> bool {
    r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
}

/// `r` equals `n/d` (d nonzero), checked by cross multiplication.
fn same_ratio(r: &ExactRational, n: &BigInt, d: &BigInt) -> bool {
    r.numer() * d == n * r.denom()
}

fn numeric_tower() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: NUMERIC_CASES, failure_persistence: None, ..Config::default() });
    runner
        .run(&(rational(), rational()), |(a, b)| {
            let (p, q, r, s) = (a.numer(), a.denom(), b.numer(), b.denom());
            let (x, y): (Number, Number) = (a.clone().into(), b.clone().into());
            let mut results = vec![
                (x.clone() + y.clone(), p * s + r * q, q * s),
                (x.clone() - y.clone(), p * s - r * q, q * s),
                (x.clone() * y.clone(), p * r, q * s),
            ];
            if !b.is_zero() {
                results.push((x.checked_div(y).unwrap(), p * s, q * r));
            }
            for (result, n, d) in &results {
                let exact = result.as_exact();
                prop_assert!(exact.is_some(), "{} became inexact", result);
                let exact = exact.unwrap();
                prop_assert!(in_lowest_terms(exact), "{} not in lowest terms", exact);
                prop_assert!(same_ratio(exact, n, d), "{} != {}/{}", exact, n, d);
            }
            Ok(())
        })
        .map_err(|e| format!("closure: {e}"))?;

    let mut runner = TestRunner::new(Config { cases: SQRT_CASES, failure_persistence: None, ..Config::default() });
    runner
        .run(&rational(), |a| {
            let r: Number = a.abs().into();
            let back = r.sqr().sqrt().unwrap();
            prop_assert!(back.is_exact() && back == r, "sqrt({}^2) = {}", r, back);
            Ok(())
        })
        .map_err(|e| format!("sqrt: {e}"))?;

    let third: Number = "1/3".parse().map_err(|e| format!("{e:?}"))?;
    ensure!(third.to_string() == "1/3", "1/3 printed as {third}");
    ensure!(third.to_string().parse::<Number>().ok() == Some(third.clone()), "1/3 did not parse back");
    let (lv, defns) = read_program("(/ 1 3)", None, LanguageLevel::DEFAULT).map_err(|e| e.to_string())?;
    let mut printed = String::new();
    load_program(&defns, lv, |v| printed = v.to_string()).map_err(|e| e.to_string())?;
    ensure!(printed == "1/3", "(/ 1 3) printed as {printed}");
    Ok(format!("{NUMERIC_CASES} pairs closed and reduced, {SQRT_CASES} square roots, 1/3 round-trips"))
}

/// A single-inheritance chain `c0 <- c1 <- ...`. Class i declares
/// `fields[i]` own fields and defines method `m{j}` for each j in
/// `defines[i]`; every method returns the name of its defining class.
#[derive(Debug, Clone)]
struct Table {
    fields: Vec<usize>,
    defines: Vec<Vec<usize>>,
}

const METHODS: usize = 4;

fn table() -> impl Strategy<Value = Table> {
    (1usize..5).prop_flat_map(|depth| {
        (
            prop::collection::vec(0usize..3, depth),
            prop::collection::vec(prop::collection::btree_set(0..METHODS, 0..=METHODS), depth),
        )
            .prop_map(|(fields, defines)| Table { fields, defines: defines.into_iter().map(|s| s.into_iter().collect()).collect() })
    })
}

impl Table {
    fn source(&self) -> String {
        let mut src = String::new();
        let mut next_field = 0;
        for (i, (n, methods)) in self.fields.iter().zip(&self.defines).enumerate() {
            let fields: Vec<String> = (next_field..next_field + n).map(|k| format!("f{k}")).collect();
            next_field += n;
            let sup = if i == 0 { String::new() } else { format!(" (super c{})", i - 1) };
            let _ = write!(src, "(define-class c{i}{sup} (fields {})", fields.join(" "));
            for j in methods {
                let _ = write!(src, " (define (m{j}) \"c{i}\")");
            }
            src.push_str(")\n");
        }
        src
    }

    fn expected(&self, class: usize, method: usize) -> Option<String> {
        (0..=class).rev().find(|&c| self.defines[c].contains(&method)).map(|c| format!("\"c{c}\""))
    }
}

fn dispatch_laws() -> Outcome {
    let level = LanguageLevel::new(3).unwrap();
    let mut runner = TestRunner::new(Config { cases: DISPATCH_CASES, failure_persistence: None, ..Config::default() });
    runner
        .run(&(table(), prop::collection::vec(-100i64..100, 12)), |(t, seed)| {
            let src = t.source();
            let (_, defns) = read_program(&src, Some(level), level).unwrap();
            let interp = load_program(&defns, level, |_| {}).unwrap().interp;
            for class in 0..t.fields.len() {
                let arity = t.fields[..=class].iter().sum::<usize>();
                let args: Vec<Value> = seed[..arity].iter().map(|&n| Number::integer(n).into()).collect();
                let obj = interp.instantiate(&format!("c{class}"), args.clone()).unwrap();
                let before = obj.to_string();
                for (k, arg) in args.iter().enumerate() {
                    let got = interp.dispatch(&obj, &format!("f{k}"), vec![]).unwrap();
                    prop_assert_eq!(got.to_string(), arg.to_string(), "field f{} of c{}\n{}", k, class, src);
                }
                for m in 0..METHODS {
                    let got = interp.dispatch(&obj, &format!("m{m}"), vec![]);
                    match t.expected(class, m) {
                        Some(want) => prop_assert_eq!(got.unwrap().to_string(), want, "m{} on c{}\n{}", m, class, src),
                        None => prop_assert!(got.is_err(), "m{} on c{} should not be understood\n{}", m, class, src),
                    }
                }
                prop_assert_eq!(obj.to_string(), before);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{DISPATCH_CASES} random class tables"))
}

fn purity() -> Outcome {
    let files = ["posn.rkt", "fig1.rkt", "fig2.rkt", "appendix.rkt"];
    let mut evaluations = 0;
    for file in files {
        let p = load(file)?;
        let before = p.interp.fingerprint();
        let first = run_tests(&p.tests, &p.interp).to_string();
        for case in &p.tests {
            for e in [&case.actual, &case.expected] {
                let a = p.interp.eval_expr(&Env::empty(), e).map_err(|e| e.to_string())?;
                let b = p.interp.eval_expr(&Env::empty(), e).map_err(|e| e.to_string())?;
                ensure!(a.to_string() == b.to_string(), "{file}: {e} gave {a} then {b}");
                evaluations += 2;
            }
        }
        if let Some(world) = &p.big_bang {
            run_headless(&p.interp, world, &EventTrace::ticks(10)).map_err(|e| e.to_string())?;
            evaluations += 1;
        }
        ensure!(run_tests(&p.tests, &p.interp).to_string() == first, "{file}: report changed between runs");
        ensure!(p.interp.fingerprint() == before, "{file}: global environment changed");
    }
    Ok(format!("{} programs, {evaluations} evaluations, environment hash unchanged", files.len()))
}

fn purity_and_dispatch() -> Outcome {
    let a = purity()?;
    let b = dispatch_laws()?;
    Ok(format!("{a}; {b}"))
}

async fn live_session(record: &Path) -> Result<(Vec<String>, String), String> {
    let addr = start_server(&corpus("fig2.rkt"), 200.0, Some(record.to_path_buf())).await;
    let mut client = Client::connect(addr).await;
    let mut raw_frames = Vec::new();
    let key_after = [2u64, 5, 6, 11];
    loop {
        let text = client.recv_raw().await.ok_or("socket closed early")?;
        match classlang_core::wire::decode_server(&text).map_err(|e| e.to_string())? {
            ServerMessage::Hello { .. } => {}
            ServerMessage::Frame { seq, .. } => {
                raw_frames.push(text);
                if key_after.contains(&seq) {
                    client.send(&format!(r#"{{"type":"key","key":"{}"}}"#, ["left", "a", "right", " "][seq as usize % 4])).await;
                }
                if seq == 20 {
                    client.send(r#"{"type":"bye"}"#).await;
                }
            }
            ServerMessage::Halt { reason } => {
                ensure!(reason == "stopped", "halted: {reason}");
                break;
            }
        }
    }
    let log = wait_for_file(&record.join("session-0.jsonl")).await;
    Ok((raw_frames, log))
}

fn replay_equivalence() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    let (raw_frames, log) = runtime.block_on(live_session(dir.path()))?;
    let trace = EventTrace::parse_jsonl(&log).map_err(|e| e.to_string())?;
    let keys = trace.events.iter().filter(|e| matches!(e, Event::Key(_))).count();
    ensure!(keys == 4, "recorded {keys} key events");

    let p = load("fig2.rkt")?;
    let initial = p.big_bang.clone().unwrap();
    let (_, headless) = run_headless(&p.interp, &initial, &trace).map_err(|e| e.to_string())?;
    ensure!(raw_frames.len() <= headless.len(), "{} live frames, {} replayed", raw_frames.len(), headless.len());
    for text in &raw_frames {
        let ServerMessage::Frame { seq, .. } = classlang_core::wire::decode_server(text).unwrap() else { unreachable!() };
        let f = &headless.frames[seq as usize];
        let replayed = encode(&ServerMessage::Frame { seq, scene: (*f.scene).clone(), world: f.world.clone() });
        ensure!(*text == replayed, "frame {seq} differs:\n live   {text}\n replay {replayed}");
    }
    Ok(format!("{} live frames over {} events ({keys} keys) identical on replay", raw_frames.len(), trace.events.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("golden corpus fidelity", golden_corpus),
        ("level gating", level_gating),
        ("world semantics", world_semantics),
        ("numeric tower properties", numeric_tower),
        ("purity and dispatch properties", purity_and_dispatch),
        ("replay equivalence", replay_equivalence),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
