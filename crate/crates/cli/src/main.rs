mod jobs;
mod options;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use coevo::experiments::{execute, verify, ExecOptions, Verification, MANIFEST_FILE};
use log::{error, info, LevelFilter};

use jobs::Kind;
use options::{Cli, Command, Options};

const EXIT_RUNTIME: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Logs completed trials roughly every 5% of the way.
fn progress(label: &'static str) -> impl Fn(usize, usize) + Sync {
    move |done, total| {
        let step = (total / 20).max(1);
        if done % step == 0 || done == total {
            info!("{label}: {done}/{total} trials");
        }
    }
}

fn fail(e: coevo::Error) -> ExitCode {
    error!("{e}");
    ExitCode::from(if e.is_usage() {
        EXIT_USAGE
    } else {
        EXIT_RUNTIME
    })
}

fn produce(kind: Kind, label: &'static str, opts: Options) -> ExitCode {
    let opts = match opts.resolve() {
        Ok(o) => o,
        Err(msg) => {
            error!("{msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let job = match jobs::build(kind, &opts) {
        Ok(j) => j,
        Err(msg) => {
            error!("{msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let out = opts
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(jobs::DEFAULT_OUT));
    let report = progress(label);
    let exec = ExecOptions {
        jobs: opts.jobs.unwrap_or(1),
        progress: Some(&report),
    };
    let artifacts = match execute(&job, &exec) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    if let Err(e) = artifacts.write_to(&out) {
        return fail(e);
    }
    print!("{}", artifacts.report);
    if !artifacts.report.ends_with('\n') {
        println!();
    }
    for f in &artifacts.manifest.outputs {
        println!("{}", out.join(&f.name).display());
    }
    println!("{}", out.join(MANIFEST_FILE).display());
    ExitCode::SUCCESS
}

fn run_verify(manifest: &Path, jobs: usize) -> ExitCode {
    let path = if manifest.is_dir() {
        manifest.join(MANIFEST_FILE)
    } else {
        manifest.to_path_buf()
    };
    let report = progress("verify");
    let exec = ExecOptions {
        jobs,
        progress: Some(&report),
    };
    match verify(&path, &exec) {
        Ok(Verification::Identical) => {
            println!("identical: {}", path.display());
            ExitCode::SUCCESS
        }
        Ok(Verification::Mismatch { file, reason }) => {
            error!("mismatch in {file}: {reason}");
            println!("mismatch: {file}");
            ExitCode::from(EXIT_RUNTIME)
        }
        Err(e) => fail(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.quiet {
            LevelFilter::Warn
        } else {
            LevelFilter::Info
        })
        .format_timestamp(None)
        .format_target(false)
        .init();
    match cli.command {
        Command::Run(o) => produce(Kind::Run, "run", o),
        Command::Sweep(o) => produce(Kind::Sweep, "sweep", o),
        Command::Month(o) => produce(Kind::Month, "month", o),
        Command::Threshold(o) => produce(Kind::Threshold, "threshold", o),
        Command::Verify(v) => run_verify(&v.manifest, v.jobs),
    }
}
