//! `run`, `test`, and `world`. Each writes program output to `out`,
//! diagnostics to `err`, and returns a process exit code.

use std::fs;
use std::io::Write;
use std::path::Path;

use classlang_core::evaluator::load_program;
use classlang_core::reader::read_program;
use classlang_core::universe::{run_headless, EventTrace};
use classlang_core::{run_tests, Interp, LanguageLevel, LoadedProgram, Value};

use crate::{exit, WorldArgs};

/// Where a command writes.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// How to pick the language level.
#[derive(Debug, Clone, Copy)]
pub struct Levels {
    pub flag: Option<LanguageLevel>,
    pub fallback: LanguageLevel,
}

fn load(path: &Path, levels: Levels, io: &mut Io<'_>, on_value: impl FnMut(&Value)) -> Result<LoadedProgram, u8> {
    let source = fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(io.err, "error: cannot read {}: {e}", path.display());
        exit::USAGE
    })?;
    let loaded = read_program(&source, levels.flag, levels.fallback)
        .and_then(|(level, defns)| load_program(&defns, level, on_value))
        .map_err(|e| {
            let _ = writeln!(io.err, "error: {}: {e}", path.display());
            exit::FAILURE
        })?;
    for w in loaded.interp.warnings() {
        let _ = writeln!(io.err, "{}: {w}", path.display());
    }
    Ok(loaded)
}

fn run_or_test(path: &Path, levels: Levels, io: &mut Io<'_>, print_values: bool) -> u8 {
    let mut values = Vec::new();
    let loaded = match load(path, levels, io, |v| values.push(v.to_string())) {
        Ok(p) => p,
        Err(code) => return code,
    };
    if print_values {
        values.extend(loaded.big_bang.as_ref().map(Value::to_string));
        for v in values {
            let _ = writeln!(io.out, "{v}");
        }
    }
    let report = run_tests(&loaded.tests, &loaded.interp);
    if report.total > 0 || !print_values {
        let _ = write!(io.out, "{report}");
    }
    if report.all_passed() {
        exit::OK
    } else {
        exit::FAILURE
    }
}

/// Prints each top-level expression's value (and a big-bang's initial
/// world), then the test report if there are tests.
pub fn run(path: &Path, levels: Levels, io: &mut Io<'_>) -> u8 {
    run_or_test(path, levels, io, true)
}

/// Prints only the test report.
pub fn test(path: &Path, levels: Levels, io: &mut Io<'_>) -> u8 {
    run_or_test(path, levels, io, false)
}

/// Loads a program for `world` or `serve`: its interpreter and the
/// initial world of its big-bang.
pub fn load_world(path: &Path, levels: Levels, io: &mut Io<'_>) -> Result<(Interp, Value), u8> {
    let loaded = load(path, levels, io, |_| {})?;
    match loaded.big_bang {
        Some(initial) => Ok((loaded.interp, initial)),
        None => {
            let _ = writeln!(io.err, "error: {}: the program has no big-bang form", path.display());
            Err(exit::USAGE)
        }
    }
}

/// Runs the program's big-bang over a trace and prints the final world.
pub fn world(args: &WorldArgs, levels: Levels, io: &mut Io<'_>) -> u8 {
    let (interp, initial) = match load_world(&args.file, levels, io) {
        Ok(w) => w,
        Err(code) => return code,
    };
    let trace = fs::read_to_string(&args.trace)
        .map_err(|e| format!("cannot read {}: {e}", args.trace.display()))
        .and_then(|text| EventTrace::parse_jsonl(&text).map_err(|e| format!("{}: {e}", args.trace.display())));
    let mut trace = match trace {
        Ok(t) => t,
        Err(msg) => {
            let _ = writeln!(io.err, "error: {msg}");
            return exit::USAGE;
        }
    };
    trace.max_frames = args.max_frames;
    let (last, log) = match run_headless(&interp, &initial, &trace) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(io.err, "error: {}: {e}", args.file.display());
            return exit::FAILURE;
        }
    };
    if let Some(dir) = &args.out {
        if let Err(e) = log.export(dir) {
            let _ = writeln!(io.err, "error: cannot write frames to {}: {e}", dir.display());
            return exit::FAILURE;
        }
    }
    let _ = writeln!(io.out, "{last}");
    exit::OK
}
