//! Command-line front end: batch commands and the live world server.

pub mod commands;
pub mod server;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use classlang_core::LanguageLevel;

/// Environment variable naming the default language level.
pub const LANG_ENV: &str = "CLASSLANG_LANG";

#[derive(Debug, Parser)]
#[command(name = "classlang", version, about = "Run class/N programs, their tests, and their worlds")]
pub struct Cli {
    /// Language level, 0-4 or class/0-class/4; overrides the #lang line.
    #[arg(long = "lang", value_name = "N", global = true)]
    pub lang: Option<LanguageLevel>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a program, print its top-level values, then run its tests.
    Run(Source),
    /// Run a program's tests only.
    Test(Source),
    /// Run a big-bang program headlessly over an event trace.
    World(WorldArgs),
    /// Serve a big-bang program to browser clients.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct Source {
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct WorldArgs {
    pub file: PathBuf,
    /// JSON Lines event trace.
    #[arg(long, value_name = "PATH")]
    pub trace: PathBuf,
    /// Directory for frame-NNNN.svg files and frames.jsonl.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Stop after this many frames, the initial one included.
    #[arg(long, value_name = "N")]
    pub max_frames: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Ticks per second.
    #[arg(long, value_name = "HZ", default_value_t = 30.0, value_parser = positive_rate)]
    pub tick_rate: f64,
    /// Write each session's event log to DIR/session-N.jsonl.
    #[arg(long, value_name = "DIR")]
    pub record: Option<PathBuf>,
}

fn positive_rate(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(r) if r.is_finite() && r > 0.0 => Ok(r),
        _ => Err(format!("`{s}` is not a positive number of ticks per second")),
    }
}

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    /// Load errors, failing tests, runtime errors.
    pub const FAILURE: u8 = 1;
    /// Bad invocation: unreadable files, bad flags, no big-bang to run.
    pub const USAGE: u8 = 2;
}

/// The level used when neither `--lang` nor a `#lang` line gives one.
pub fn fallback_level(env_value: Option<&str>) -> Result<LanguageLevel, String> {
    match env_value {
        None => Ok(LanguageLevel::DEFAULT),
        Some(v) => v.parse().map_err(|e| format!("{LANG_ENV}: {e}")),
    }
}
