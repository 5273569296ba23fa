//! Command-line driver: runs a config, writes the artifacts and the
//! verification report, or re-verifies a directory of artifacts.

use clap::{Parser, Subcommand};
use sonic_patch::config::RunConfig;
use sonic_patch::error::{Error, EXIT_MONITOR, EXIT_NUMERICAL, EXIT_OK};
use sonic_patch::output::{patch_bytes, run_artifacts, to_json, write_files, RunManifest, PATCH_REFINED_CSV, REPORT_JSON, RUN_JSON};
use sonic_patch::verify::report::VerificationReport;
use sonic_patch::verify::suite::{verify_artifacts, verify_run};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sonic-patch", version, about = "Supersonic-sonic patch solver and verifier")]
struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Re-verify the artifacts in this directory instead of running.
    #[arg(long, value_name = "ARTIFACTS")]
    verify_only: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config and write artifacts.
    Run {
        config: PathBuf,
        /// Output directory; overrides the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dump_boundary: bool,
        #[arg(long)]
        dump_field: bool,
        #[arg(long)]
        dump_patch: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_NUMERICAL as u8);
        }
    }
    let code = match (cli.verify_only, cli.command) {
        (Some(_), Some(_)) => {
            eprintln!("error: --verify-only cannot be combined with `run`");
            2
        }
        (Some(dir), None) => verify_only(&dir),
        (None, Some(Command::Run { config, out, dump_boundary, dump_field, dump_patch })) => {
            run(&config, out, [dump_boundary, dump_field, dump_patch])
        }
        (None, None) => {
            eprintln!("error: nothing to do; use `run <config>` or `--verify-only <dir>`");
            2
        }
    };
    ExitCode::from(code as u8)
}

fn fail(e: Error) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}

fn run(path: &Path, out: Option<PathBuf>, dumps: [bool; 3]) -> i32 {
    let mut cfg = match RunConfig::load(path) {
        Ok(c) => c,
        Err(e) => return fail(e.into()),
    };
    if let Some(dir) = out {
        cfg.outputs.directory = dir;
    }
    let o = &mut cfg.outputs;
    o.dump_boundary |= dumps[0];
    o.dump_field |= dumps[1];
    o.dump_patch |= dumps[2];
    let vr = match verify_run(&cfg) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let o = &cfg.outputs;
    let mut files = run_artifacts(&vr.base, o.dump_boundary, o.dump_field, o.dump_patch);
    if o.dump_patch {
        files.push((PATCH_REFINED_CSV, patch_bytes(&vr.refined.patch)));
    }
    files.push((RUN_JSON, to_json(&RunManifest::new(&cfg, &vr.setup, &vr.base, &vr.refined))));
    files.push((REPORT_JSON, to_json(&vr.report)));
    if let Err(e) = write_files(&o.directory, &files) {
        return fail(e);
    }
    summarize(&vr.report)
}

fn verify_only(dir: &Path) -> i32 {
    match verify_artifacts(dir) {
        Ok(r) => {
            println!("{}", String::from_utf8_lossy(&to_json(&r)).trim_end());
            summarize(&r)
        }
        Err(e) => fail(e),
    }
}

fn summarize(r: &VerificationReport) -> i32 {
    for c in &r.checks {
        let tag = if c.pass { "PASS" } else if c.mandatory { "FAIL" } else { "warn" };
        eprintln!("{tag} {:<28} value {:.4e}", c.name, c.value);
    }
    if r.passed() {
        EXIT_OK
    } else {
        eprintln!("failed: {}", r.failed_checks().join(", "));
        EXIT_MONITOR
    }
}
