//! Deterministic execution of many realizations of one configuration.
//!
//! Realization `i` always uses `derive(base_seed, i)`, results are folded in
//! index order, and each worker owns its stepping buffers, so the aggregate
//! is a pure function of `(base_seed, configuration)` — bit-identical for
//! any worker count. With the `parallel` feature (default) realizations run
//! on a rayon pool; without it the same loop runs sequentially.

use crate::error::CoreError;
use crate::fields::FieldSchedule;
use crate::observables::{ensemble_stats, EnsembleResult};
use crate::propagator::{run_realization, RealizationResult, RunOptions, Stepper};
use crate::qsystem::Wavefunction;
use crate::rng;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleConfig {
    pub n_realizations: usize,
    pub base_seed: u64,
    /// Worker count: 0 = all available (current rayon pool), 1 = in-place
    /// sequential, k = dedicated pool of k threads.
    pub parallelism: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self { n_realizations: 16, base_seed: 0x5eed_0001, parallelism: 0 }
    }
}

/// Seed for realization `index` of an ensemble rooted at `base_seed`.
pub fn derive(base_seed: u64, index: u64) -> u64 {
    rng::derive_seed(base_seed, index)
}

/// Ordered parallel map over `0..n`: results come back in index order, so
/// the output is identical for any worker count (1 = sequential in place,
/// 0 = the current rayon pool, k = a dedicated pool of k threads). Without
/// the `parallel` feature this is always the sequential loop.
#[cfg(feature = "parallel")]
pub fn parallel_map<T, F>(parallelism: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match parallelism {
        1 => (0..n).map(f).collect(),
        0 => (0..n).into_par_iter().map(f).collect(),
        k => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .expect("failed to build worker pool");
            pool.install(|| (0..n).into_par_iter().map(f).collect())
        }
    }
}

/// Sequential fallback of [`parallel_map`].
#[cfg(not(feature = "parallel"))]
pub fn parallel_map<T, F>(_parallelism: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Run `n_realizations` trajectories of `schedule` and aggregate them.
///
/// Any failing realization aborts the ensemble with its seed recorded.
pub fn run_ensemble(
    psi0: &Wavefunction,
    schedule: &FieldSchedule,
    stepper: &Stepper,
    opts: &RunOptions,
    ens: &EnsembleConfig,
) -> Result<EnsembleResult> {
    if ens.n_realizations == 0 {
        return Err(CoreError::Config("ensemble needs at least one realization".into()));
    }
    let raw: Vec<Result<RealizationResult>> =
        parallel_map(ens.parallelism, ens.n_realizations, |i| {
            let seed = derive(ens.base_seed, i as u64);
            run_realization(psi0, schedule, stepper, seed, opts)
        });
    let mut results = Vec::with_capacity(raw.len());
    for (i, r) in raw.into_iter().enumerate() {
        match r {
            Ok(v) => results.push(v),
            Err(e) => {
                return Err(CoreError::Realization {
                    seed: derive(ens.base_seed, i as u64),
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(ensemble_stats(&results))
}

/// Enhancement with its spread over noise realizations.
///
/// Per realization `eta_i = (P_ln_i - P0) / P0` with the common reference
/// `P0 = P_l + mean(P_n)`: the laser-only probability is deterministic and
/// the noise-only baseline comes from a paired ensemble run with the same
/// seeds, so the per-realization scatter isolates the interaction term.
/// Returns `(mean eta, population std of eta)`.
pub fn paired_eta(p_ln_values: &[f64], p_l: f64, p_n_mean: f64) -> Result<(f64, f64)> {
    let p0 = p_l + p_n_mean;
    if p0 <= 0.0 {
        return Err(CoreError::UndefinedEnhancement);
    }
    let etas: Vec<f64> = p_ln_values.iter().map(|p| (p - p0) / p0).collect();
    Ok(crate::observables::mean_std(&etas))
}

/// Fill the `eta`/`eta_std` fields of a laser+noise ensemble from its paired
/// references.
pub fn attach_eta(result: &mut EnsembleResult, p_l: f64, p_n_mean: f64) -> Result<()> {
    let (eta, eta_std) = paired_eta(&result.p_values, p_l, p_n_mean)?;
    result.eta = Some(eta);
    result.eta_std = Some(eta_std);
    Ok(())
}
