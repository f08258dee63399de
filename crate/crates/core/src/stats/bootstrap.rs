use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ols::{solve, Design, RegressionSpec};
use super::table::TimeSeriesTable;
use super::StatsError;
use crate::par::{self, Execution};

/// Linear-interpolation percentile of sorted data, `q` in [0, 1].
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapCi {
    pub coefficient: String,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_boot: usize,
    /// Replicates skipped for a rank-deficient resample.
    pub n_failed: usize,
}

/// Case-resampling bootstrap of one coefficient: rows of the aligned design
/// are drawn with replacement, the model is refit, and the 2.5/97.5
/// percentiles of the replicate coefficients form the interval. Replicate
/// `r` draws from stream `mix_seed(seed, r)`.
pub fn bootstrap_coef(
    spec: &RegressionSpec,
    table: &TimeSeriesTable,
    coef: &str,
    n_boot: usize,
    seed: u64,
    exec: Execution,
) -> Result<BootstrapCi, StatsError> {
    bootstrap_design(&Design::from_spec(spec, table)?, coef, n_boot, seed, exec)
}

pub fn bootstrap_design(
    design: &Design,
    coef: &str,
    n_boot: usize,
    seed: u64,
    exec: Execution,
) -> Result<BootstrapCi, StatsError> {
    let j = design
        .names
        .iter()
        .position(|n| n == coef)
        .ok_or_else(|| StatsError::UnknownCoefficient(coef.to_string()))?;
    if n_boot == 0 {
        return Err(StatsError::InsufficientData { needed: 1, got: 0 });
    }
    let (beta, _) = solve(design)?;
    let n = design.n_obs();
    let draws = par::map_range(exec, n_boot, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(par::mix_seed(seed, r as u64));
        let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        solve(&design.select_rows(&idx)).ok().map(|(b, _)| b[j])
    });
    let mut values: Vec<f64> = draws.iter().flatten().copied().collect();
    let n_failed = n_boot - values.len();
    // more than 1% degenerate resamples
    if n_failed * 100 > n_boot {
        return Err(StatsError::BootstrapDegenerate {
            failed: n_failed,
            total: n_boot,
        });
    }
    values.sort_by(f64::total_cmp);
    Ok(BootstrapCi {
        coefficient: coef.to_string(),
        estimate: beta[j],
        ci_low: percentile_sorted(&values, 0.025),
        ci_high: percentile_sorted(&values, 0.975),
        n_boot,
        n_failed,
    })
}
