use std::path::PathBuf;

use classlang_core::evaluator::load_program;
use classlang_core::reader::{read_program, Feature};
use classlang_core::syntax::{ClassMember, Defn, Expr};
use classlang_core::universe::{draw, run_headless, step, Event, EventTrace};
use classlang_core::{eval_program, run_tests, Error, LanguageLevel, LoadedProgram};

fn corpus(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn level(n: u8) -> LanguageLevel {
    LanguageLevel::new(n).unwrap()
}

fn load(name: &str) -> LoadedProgram {
    let (lv, defns) = read_program(&corpus(name), None, LanguageLevel::DEFAULT).unwrap();
    load_program(&defns, lv, |_| {}).unwrap()
}

#[test]
fn posn_program_passes_its_three_checks() {
    let (lv, defns) = read_program(&corpus("posn.rkt"), None, LanguageLevel::DEFAULT).unwrap();
    assert_eq!(lv, level(1));
    let (_, report) = eval_program(&defns, lv).unwrap();
    assert_eq!((report.total, report.passed), (3, 3));
    assert_eq!(report.to_string(), "3 tests passed\n");
}

#[test]
fn tree_sum_passes_both_checks() {
    let (lv, defns) = read_program(&corpus("fig1.rkt"), None, LanguageLevel::DEFAULT).unwrap();
    let (_, report) = eval_program(&defns, lv).unwrap();
    assert_eq!((report.total, report.passed), (2, 2));
}

#[test]
fn tree_sum_has_no_case_analysis() {
    let (_, defns) = read_program(&corpus("fig1.rkt"), None, LanguageLevel::DEFAULT).unwrap();
    let mut methods = 0;
    for d in &defns {
        let Defn::Class(c) = d else { continue };
        for m in &c.members {
            let ClassMember::Method(m) = m else { continue };
            methods += 1;
            assert!(!m.body.any(|e| matches!(e, Expr::Cond { .. } | Expr::If { .. })), "{}", m.name);
        }
    }
    assert_eq!(methods, 2);
}

#[test]
fn empty_program_loads() {
    let (lv, defns) = read_program(&corpus("empty.rkt"), None, LanguageLevel::DEFAULT).unwrap();
    assert!(defns.is_empty());
    let (_, report) = eval_program(&defns, lv).unwrap();
    assert_eq!(report.total, 0);
}

#[test]
fn world_program_steps() {
    let p = load("fig2.rkt");
    let initial = p.big_bang.clone().unwrap();
    assert_eq!(initial.to_string(), "(new world 10)");
    let (last, log) = run_headless(&p.interp, &initial, &EventTrace::ticks(5)).unwrap();
    assert_eq!(last.to_string(), "(new world 15)");
    assert_eq!(log.len(), 6);
    assert_eq!(
        log.frames[0].scene.to_json_string(),
        r#"{"type":"place-image","image":{"type":"circle","radius":10,"mode":"solid","color":"red"},"x":10,"y":200,"scene":{"type":"empty-scene","width":400,"height":400}}"#
    );
    let after_key = step(&p.interp, &last, &Event::Key("a".into())).unwrap();
    assert_eq!(after_key.to_string(), "(new world 10)");
}

#[test]
fn appendix_rocket_lands_and_stays() {
    let p = load("appendix.rkt");
    let initial = p.big_bang.clone().unwrap();
    let first = draw(&p.interp, &initial).unwrap();
    assert!(first.to_json_string().contains(r#""x":400"#));
    let (last, log) = run_headless(&p.interp, &initial, &EventTrace::ticks(401)).unwrap();
    assert_eq!(last.to_string(), "(new landed-world)");
    assert_eq!(log.len(), 402);
    assert_eq!(log.frames[400].world, "(new downworld 0)");
    let landed = draw(&p.interp, &last).unwrap();
    assert!(landed.to_json_string().contains(r#""x":390"#));
    let (_, more) = run_headless(&p.interp, &last, &EventTrace::ticks(100)).unwrap();
    assert!(more.frames.iter().all(|f| f.scene == landed));
}

#[test]
fn world_program_has_no_checks() {
    assert!(load("fig2.rkt").tests.is_empty());
}

#[test]
fn gated_fixtures_fail_below_and_load_at_their_level() {
    let cases = [
        ("levels/dot-at-0.rkt", Feature::DotNotation, 1),
        ("levels/super-at-1.rkt", Feature::SuperClasses, 2),
        ("levels/override-at-2.rkt", Feature::Overriding, 3),
        ("levels/constructor-at-3.rkt", Feature::Constructors, 4),
    ];
    for (file, feature, needed) in cases {
        let src = corpus(file);
        let err = read_program(&src, None, LanguageLevel::DEFAULT)
            .and_then(|(lv, defns)| eval_program(&defns, lv).map(|_| ()))
            .unwrap_err();
        assert!(matches!(err, Error::Level { feature: f, .. } if f == feature), "{file}: {err}");
        assert_eq!(err.required_level(), Some(needed), "{file}");
        assert!(err.to_string().contains(&format!("class/{needed}")), "{file}: {err}");

        let (lv, defns) = read_program(&src, Some(level(needed)), LanguageLevel::DEFAULT).unwrap();
        let loaded = load_program(&defns, lv, |_| {}).unwrap();
        let report = run_tests(&loaded.tests, &loaded.interp);
        assert!(report.all_passed() && report.total > 0, "{file}: {report}");
    }
}

#[test]
fn corpus_reports_are_deterministic() {
    for file in ["posn.rkt", "fig1.rkt", "fig2.rkt", "appendix.rkt"] {
        let run = || {
            let (lv, defns) = read_program(&corpus(file), None, LanguageLevel::DEFAULT).unwrap();
            eval_program(&defns, lv).unwrap().1.to_string()
        };
        assert_eq!(run(), run(), "{file}");
    }
}

#[test]
fn running_tests_leaves_globals_unchanged() {
    for file in ["posn.rkt", "fig1.rkt", "fig2.rkt", "appendix.rkt"] {
        let p = load(file);
        let before = p.interp.fingerprint();
        run_tests(&p.tests, &p.interp);
        run_tests(&p.tests, &p.interp);
        assert_eq!(before, p.interp.fingerprint(), "{file}");
    }
}
