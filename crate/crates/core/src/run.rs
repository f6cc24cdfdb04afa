//! Config-driven runs: resolve names, size the thread pool, collect reports.

use crate::config::ExperimentConfig;
use crate::error::{GbcError, Result};
use crate::lemmas::{run_lemmas, LemmaReport};
use crate::report::{LemmaOutput, VerifyOutput};
use crate::verify::euler_estimate;

/// Run `f` on a pool of `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t);
    }
    let pool = b.build().map_err(|e| GbcError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Estimate the Euler integral for each configured field. Config errors are
/// returned; failures during the run end it early with a partial report.
pub fn run_verify(config: &ExperimentConfig) -> Result<VerifyOutput> {
    let r = config.resolve()?;
    with_threads(config.threads, || {
        let mut runs = Vec::new();
        for field in &r.fields {
            match euler_estimate(&r.metric, config.connection, field, &config.quadrature) {
                Ok(rep) => runs.push(rep),
                Err(e) => return VerifyOutput::new(config, runs, Some(e.to_string())),
            }
        }
        VerifyOutput::new(config, runs, None)
    })
}

pub fn run_lemma_suite(config: &ExperimentConfig) -> Result<LemmaOutput> {
    let r = config.resolve()?;
    with_threads(config.threads, || match run_lemmas(&r.lemma_metrics, &r.lemma_settings) {
        Ok(rep) => LemmaOutput::new(config, rep, None),
        Err(e) => LemmaOutput::new(config, LemmaReport::default(), Some(e.to_string())),
    })
}
