use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use classlang::commands::{self, Io, Levels};
use classlang::server::{self, AppState};
use classlang::{exit, fallback_level, Cli, Command, ServeArgs, LANG_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    let fallback = match fallback_level(std::env::var(LANG_ENV).ok().as_deref()) {
        Ok(level) => level,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return ExitCode::from(exit::USAGE);
        }
    };
    let levels = Levels { flag: cli.lang, fallback };
    let mut io = Io { out: &mut out, err: &mut err };
    let code = match &cli.command {
        Command::Run(src) => commands::run(&src.file, levels, &mut io),
        Command::Test(src) => commands::test(&src.file, levels, &mut io),
        Command::World(args) => commands::world(args, levels, &mut io),
        Command::Serve(args) => serve(args, levels, &mut io),
    };
    let _ = out.flush();
    ExitCode::from(code)
}

fn serve(args: &ServeArgs, levels: Levels, io: &mut Io<'_>) -> u8 {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(io::stderr)
        .init();
    let (interp, initial) = match commands::load_world(&args.file, levels, io) {
        Ok(w) => w,
        Err(code) => return code,
    };
    let state = AppState::new(interp, initial, args.tick_rate, args.record.clone());
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            let _ = writeln!(io.err, "error: cannot start runtime: {e}");
            return exit::FAILURE;
        }
    };
    let result = runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(("0.0.0.0", args.port)).await?;
        tracing::info!("serving {} on http://{}", args.file.display(), listener.local_addr()?);
        server::serve(listener, state).await
    });
    match result {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            exit::FAILURE
        }
    }
}
