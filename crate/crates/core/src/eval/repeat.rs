use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub accuracy: f64,
}

/// Aggregate of independently seeded runs on a fixed split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepetitionSummary {
    pub runs: usize,
    pub mean_accuracy: f64,
    pub min_accuracy: f64,
    pub max_accuracy: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std_accuracy: f64,
    pub per_run: Vec<RunResult>,
}

impl RepetitionSummary {
    pub fn from_runs(per_run: Vec<RunResult>) -> Result<Self> {
        if per_run.is_empty() {
            return Err(Error::Config("no runs to summarize".into()));
        }
        let n = per_run.len() as f64;
        let accs = per_run.iter().map(|r| r.accuracy);
        let mean = accs.clone().sum::<f64>() / n;
        let min = accs.clone().fold(f64::INFINITY, f64::min);
        let max = accs.clone().fold(f64::NEG_INFINITY, f64::max);
        let std = if per_run.len() > 1 {
            (accs.map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(RepetitionSummary {
            runs: per_run.len(),
            // summation rounding must not push the mean outside [min, max]
            mean_accuracy: mean.clamp(min, max),
            min_accuracy: min,
            max_accuracy: max,
            std_accuracy: std,
            per_run,
        })
    }
}

/// Runs `run(seed)` for seeds `base_seed .. base_seed + n` and summarizes the
/// returned accuracies in seed order. Runs execute on up to `threads` worker
/// threads (all available when `None`). The first failing run, by index,
/// aborts the whole repetition.
pub fn repeat_training<F>(
    n: usize,
    base_seed: u64,
    threads: Option<usize>,
    run: F,
) -> Result<RepetitionSummary>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    if n == 0 {
        return Err(Error::Config("at least one run is required".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let seeds: Vec<u64> = (0..n as u64).map(|i| base_seed + i).collect();
    let results: Vec<Result<f64>> = pool.install(|| seeds.par_iter().map(|&s| run(s)).collect());
    let mut per_run = Vec::with_capacity(n);
    for (idx, (seed, res)) in seeds.into_iter().zip(results).enumerate() {
        match res {
            Ok(accuracy) => per_run.push(RunResult { seed, accuracy }),
            Err(e) => {
                return Err(Error::Run {
                    run: idx,
                    source: Box::new(e),
                })
            }
        }
    }
    RepetitionSummary::from_runs(per_run)
}
