use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::Parser;

use localexpert_cli::commands::{
    run_bench, run_evaluate, run_ingest, run_recommend, run_synth, Cli, Command, ServeArgs,
};
use localexpert_cli::service::{serve, AppState, ServiceConfig};
use localexpert_cli::{exit_code, EXIT_DATA, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE};

fn run_serve(args: &ServeArgs) -> i32 {
    let config = ServiceConfig {
        default_method: args.method.into(),
        default_k: args.k,
        fixed_seed: args.seed,
    };
    let state = match AppState::load(&args.data, config) {
        Ok(state) => Arc::new(state),
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_DATA;
        }
    };
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_INTERNAL;
        }
    };
    runtime.block_on(async {
        let listener = match tokio::net::TcpListener::bind(&args.bind).await {
            Ok(l) => l,
            Err(err) => {
                eprintln!("error: cannot bind {}: {err}", args.bind);
                return EXIT_USAGE;
            }
        };
        if let Ok(addr) = listener.local_addr() {
            eprintln!("listening on http://{addr}");
        }
        match serve(listener, state).await {
            Ok(()) => EXIT_OK,
            Err(err) => {
                eprintln!("error: {err}");
                EXIT_INTERNAL
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE as u8);
        }
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_INTERNAL as u8);
        }
    }

    let result = match &cli.command {
        Command::Ingest(args) => run_ingest(args),
        Command::Recommend(args) => run_recommend(args),
        Command::Evaluate(args) => run_evaluate(args),
        Command::Synth(args) => run_synth(args),
        Command::Bench(args) => run_bench(args).map_err(|err| {
            // bench only fails on internal problems
            eprintln!("error: {err}");
            std::process::exit(EXIT_INTERNAL);
        }),
        Command::Serve(args) => return ExitCode::from(run_serve(args) as u8),
    };
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_INTERNAL as u8);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
