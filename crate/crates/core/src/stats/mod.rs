//! Econometrics and validation toolkit for the session-level series.

mod bootstrap;
mod correlation;
mod hac;
mod normality;
mod ols;
mod rank;
mod suite;
mod table;
mod unit_root;
mod vif;

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use thiserror::Error;

pub use bootstrap::{bootstrap_coef, bootstrap_design, percentile_sorted, BootstrapCi};
pub use correlation::{lagged_crosscorr, pearson, pearson_ci, CrossCorrLag, CrossCorrTable, PearsonCi};
pub use hac::{default_bandwidth, hac_covariance, hac_se, HacResult};
pub use normality::{jarque_bera, JarqueBera};
pub use ols::{ols_fit, ols_xy, Design, RegressionFit, RegressionSpec, Term, Var, INTERCEPT};
pub use rank::{mann_whitney, roc_auc, MannWhitney, PValueMethod};
pub use suite::{
    build_model_suite, diagnose, fit_suite, Diagnostics, InteractionDecision, InteractionPolicy, ModelSpec,
    SuiteOptions, SuiteResult, SuiteTable, VIF_THRESHOLD,
};
pub use table::{SampleWindow, TimeSeriesTable};
pub use unit_root::{adf_default_max_lag, adf_test, kpss_test, AdfResult, KpssBand, KpssResult, UnitRootTables};
pub use vif::{vif, VifEntry};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("need at least {needed} observations, have {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("singular design: {} collinear with earlier columns", .columns.join(", "))]
    SingularDesign { columns: Vec<String> },
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("duplicate term {0}")]
    DuplicateTerm(String),
    #[error("bandwidth {bandwidth} must be below the sample size {n}")]
    BandwidthTooLarge { bandwidth: usize, n: usize },
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
    #[error("labels contain a single class")]
    SingleClass,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("{failed} of {total} bootstrap replicates were rank deficient")]
    BootstrapDegenerate { failed: usize, total: usize },
    #[error("unknown coefficient {0:?}")]
    UnknownCoefficient(String),
    #[error("table error: {0}")]
    Table(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Two-sided p-value of a t statistic.
pub fn t_two_sided(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return if t.is_nan() { f64::NAN } else { 0.0 };
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

pub fn normal_cdf(z: f64) -> f64 {
    Normal::standard().cdf(z)
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
