use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use finsler_gbc::config::ExperimentConfig;
use finsler_gbc::report::write_pair;
use finsler_gbc::run::{run_lemma_suite, run_verify};
use finsler_gbc::Result;

/// Numerical Gauss–Bonnet–Chern checks for Finsler surfaces.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the Euler integral and compare it with χ(M)/vol(S¹).
    Verify(Common),
    /// Evaluate the pointwise identities at random sphere-bundle points.
    Lemmas(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; defaults apply to missing keys.
    #[arg(long, env = "FGBC_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory (overrides `[output] dir`).
    #[arg(long, env = "FGBC_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "FGBC_THREADS")]
    threads: Option<usize>,
    #[arg(long, env = "FGBC_SEED")]
    seed: Option<u64>,
    /// Pass threshold (verify: estimate error; lemmas: residual).
    #[arg(long, env = "FGBC_TOLERANCE")]
    tolerance: Option<f64>,
}

impl Common {
    fn load(&self, lemmas: bool) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(o) = &self.out {
            c.output.dir = o.clone();
        }
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(t) = self.tolerance {
            if lemmas {
                c.lemmas.tolerance = t;
            } else {
                c.tolerance = t;
            }
        }
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify(args) => {
            let c = args.load(false)?;
            let out = run_verify(&c)?;
            for r in &out.runs {
                println!(
                    "{} {} {}: estimate {:.10} target {:.10} error {:.3e} order {:.2}",
                    r.metric, r.flavor, r.field, r.extrapolated, r.target, r.abs_error, r.observed_order
                );
            }
            if let Some(d) = out.field_agreement {
                println!("field agreement {d:.3e}");
            }
            if let Some(e) = &out.error {
                eprintln!("run stopped: {e}");
            }
            let (j, t) = write_pair(&c.output.dir, &c.output.stem, &out, &out.csv())?;
            println!("{} {} -> {}, {}", if out.pass { "PASS" } else { "FAIL" }, "verify", j.display(), t.display());
            Ok(out.pass)
        }
        Command::Lemmas(args) => {
            let c = args.load(true)?;
            let out = run_lemma_suite(&c)?;
            for r in out.report.rows.iter().filter(|r| !r.pass) {
                println!("failed: {} {} residual {:.3e}", r.metric, r.check, r.max_residual);
            }
            for f in &out.report.fd_orders {
                println!("{} (n = {}): difference-oracle order {:.2}", f.metric, f.dim, f.order);
            }
            if let Some(e) = &out.error {
                eprintln!("run stopped: {e}");
            }
            let stem = format!("{}_lemmas", c.output.stem);
            let (j, t) = write_pair(&c.output.dir, &stem, &out, &out.csv())?;
            println!("{} {} -> {}, {}", if out.pass { "PASS" } else { "FAIL" }, "lemmas", j.display(), t.display());
            Ok(out.pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
