//! Augmented Dickey-Fuller and KPSS (level) tests.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::hac::default_bandwidth;
use super::ols::{solve, Design};
use super::{normal_cdf, StatsError};
use crate::data::{DataDir, UNIT_ROOT_FILE};

/// Response-surface coefficients and critical values read from the shipped
/// table file.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitRootTables {
    pub adf_tau_star: f64,
    pub adf_tau_min: f64,
    pub adf_tau_max: f64,
    pub adf_smallp: Vec<f64>,
    pub adf_largep: Vec<f64>,
    /// (level, b0..b3) with `crit = b0 + b1/T + b2/T² + b3/T³`.
    pub adf_crit: Vec<(f64, [f64; 4])>,
    /// (upper-tail level, critical value), ascending in value.
    pub kpss_level: Vec<(f64, f64)>,
}

impl UnitRootTables {
    pub fn parse(text: &str) -> Result<Self, StatsError> {
        let mut star = None;
        let mut min = None;
        let mut max = None;
        let mut smallp = None;
        let mut largep = None;
        let mut crit = Vec::new();
        let mut kpss = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let nums: Vec<f64> = parts
                .map(|p| p.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| StatsError::Table(format!("unit-root tables line {}: bad number", i + 1)))?;
            let want = |n: usize| -> Result<(), StatsError> {
                if nums.len() == n {
                    Ok(())
                } else {
                    Err(StatsError::Table(format!(
                        "unit-root tables line {}: {key} expects {n} values",
                        i + 1
                    )))
                }
            };
            match key {
                "adf_c_tau_star" => {
                    want(1)?;
                    star = Some(nums[0]);
                }
                "adf_c_tau_min" => {
                    want(1)?;
                    min = Some(nums[0]);
                }
                "adf_c_tau_max" => {
                    want(1)?;
                    max = Some(nums[0]);
                }
                "adf_c_smallp" => smallp = Some(nums),
                "adf_c_largep" => largep = Some(nums),
                "adf_c_crit" => {
                    want(5)?;
                    crit.push((nums[0], [nums[1], nums[2], nums[3], nums[4]]));
                }
                "kpss_level" => {
                    want(2)?;
                    kpss.push((nums[0], nums[1]));
                }
                other => {
                    return Err(StatsError::Table(format!(
                        "unit-root tables line {}: unknown key {other:?}",
                        i + 1
                    )))
                }
            }
        }
        let missing = |k: &str| StatsError::Table(format!("unit-root tables: missing {k}"));
        kpss.sort_by(|a, b| a.1.total_cmp(&b.1));
        if kpss.is_empty() {
            return Err(missing("kpss_level"));
        }
        Ok(UnitRootTables {
            adf_tau_star: star.ok_or_else(|| missing("adf_c_tau_star"))?,
            adf_tau_min: min.ok_or_else(|| missing("adf_c_tau_min"))?,
            adf_tau_max: max.ok_or_else(|| missing("adf_c_tau_max"))?,
            adf_smallp: smallp.ok_or_else(|| missing("adf_c_smallp"))?,
            adf_largep: largep.ok_or_else(|| missing("adf_c_largep"))?,
            adf_crit: crit,
            kpss_level: kpss,
        })
    }

    pub fn shipped() -> Self {
        Self::parse(crate::data::UNIT_ROOT_TXT).expect("shipped unit-root tables parse")
    }

    pub fn load(dir: &DataDir) -> Result<Self, StatsError> {
        Self::parse(&dir.read(UNIT_ROOT_FILE)?)
    }

    /// Approximate asymptotic p-value of an ADF statistic.
    pub fn adf_pvalue(&self, stat: f64) -> f64 {
        if stat > self.adf_tau_max {
            return 1.0;
        }
        if stat < self.adf_tau_min {
            return 0.0;
        }
        let coef = if stat <= self.adf_tau_star {
            &self.adf_smallp
        } else {
            &self.adf_largep
        };
        let z = coef.iter().rev().fold(0.0, |acc, c| acc * stat + c);
        normal_cdf(z)
    }

    pub fn adf_critical(&self, nobs: usize) -> Vec<(f64, f64)> {
        let t = nobs as f64;
        self.adf_crit
            .iter()
            .map(|(lvl, b)| (*lvl, b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t)))
            .collect()
    }

    pub fn kpss_band(&self, stat: f64) -> KpssBand {
        let exceeded = self.kpss_level.iter().filter(|(_, cv)| stat >= *cv).count();
        let levels: Vec<f64> = self.kpss_level.iter().map(|l| l.0).collect();
        KpssBand {
            p_low: levels.get(exceeded).copied(),
            p_high: exceeded.checked_sub(1).map(|j| levels[j]),
        }
    }
}

/// Open interval `(p_low, p_high)` bracketing the KPSS p-value, read off
/// the tabulated critical values. `None` stands for 0 and 1 respectively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KpssBand {
    pub p_low: Option<f64>,
    pub p_high: Option<f64>,
}

impl KpssBand {
    /// The p-value is known to exceed `level`.
    pub fn p_above(&self, level: f64) -> bool {
        self.p_low.is_some_and(|p| p >= level)
    }

    /// The p-value is known to be below `level`.
    pub fn p_below(&self, level: f64) -> bool {
        self.p_high.is_some_and(|p| p <= level)
    }
}

impl fmt::Display for KpssBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.p_low, self.p_high) {
            (Some(a), None) => write!(f, "p>{a}"),
            (None, Some(b)) => write!(f, "p<{b}"),
            (Some(a), Some(b)) => write!(f, "{a}<p<{b}"),
            (None, None) => write!(f, "p=?"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdfResult {
    pub stat: f64,
    pub p: f64,
    pub used_lag: usize,
    pub nobs: usize,
    /// (level, critical value) at `nobs`.
    pub critical: Vec<(f64, f64)>,
    pub aic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KpssResult {
    pub stat: f64,
    pub band: KpssBand,
    pub bandwidth: usize,
}

const MIN_LEN: usize = 10;

fn check_len(n: usize) -> Result<(), StatsError> {
    if n < MIN_LEN {
        return Err(StatsError::InsufficientData {
            needed: MIN_LEN,
            got: n,
        });
    }
    Ok(())
}

struct AdfFit {
    stat: f64,
    aic: f64,
}

/// Regresses Δy_t on y_{t−1}, `lags` lagged differences and a constant over
/// the last `nobs` differences.
fn adf_regression(y: &[f64], lags: usize, nobs: usize) -> Result<AdfFit, StatsError> {
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let start = dy.len() - nobs;
    let k = lags + 2;
    let x = DMatrix::from_fn(nobs, k, |r, c| {
        let t = start + r;
        match c {
            0 => y[t],
            c if c <= lags => dy[t - c],
            _ => 1.0,
        }
    });
    let mut names = vec!["y(t-1)".to_string()];
    names.extend((1..=lags).map(|l| format!("dy(t-{l})")));
    names.push("const".into());
    let design = Design {
        names,
        x,
        y: DVector::from_column_slice(&dy[start..]),
        sessions: Vec::new(),
        has_intercept: true,
    };
    let (beta, xtx_inv) = solve(&design)?;
    let resid = &design.y - &design.x * &beta;
    let ssr = resid.norm_squared();
    let n = nobs as f64;
    let s2 = ssr / (nobs - k) as f64;
    let llf = -n / 2.0 * ((2.0 * std::f64::consts::PI).ln() + (ssr / n).ln() + 1.0);
    Ok(AdfFit {
        stat: beta[0] / (s2 * xtx_inv[(0, 0)]).sqrt(),
        aic: -2.0 * llf + 2.0 * k as f64,
    })
}

/// Default maximum ADF lag: `floor(12 · (T/100)^(1/4))`, capped so the
/// largest regression keeps enough rows.
pub fn adf_default_max_lag(n: usize) -> usize {
    let rule = (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize;
    rule.min((n / 2).saturating_sub(2))
}

/// ADF test with a constant. The lag order is chosen by AIC over
/// `0..=max_lag` on a common sample, then the chosen model is refit on all
/// available rows. Ties go to the shorter lag.
pub fn adf_test(series: &[f64], max_lag: Option<usize>, tables: &UnitRootTables) -> Result<AdfResult, StatsError> {
    check_len(series.len())?;
    let n = series.len();
    let max_lag = max_lag
        .unwrap_or_else(|| adf_default_max_lag(n))
        .min((n / 2).saturating_sub(2));
    let common = n - 1 - max_lag;
    let mut best: Option<(f64, usize)> = None;
    for lag in 0..=max_lag {
        let fit = adf_regression(series, lag, common)?;
        if best.is_none_or(|(aic, _)| fit.aic < aic) {
            best = Some((fit.aic, lag));
        }
    }
    let (_, used_lag) = best.expect("at least one lag");
    let nobs = n - 1 - used_lag;
    let fit = adf_regression(series, used_lag, nobs)?;
    Ok(AdfResult {
        stat: fit.stat,
        p: tables.adf_pvalue(fit.stat),
        used_lag,
        nobs,
        critical: tables.adf_critical(nobs),
        aic: fit.aic,
    })
}

/// KPSS level-stationarity test with a Bartlett long-run variance. `None`
/// selects the HAC default bandwidth.
pub fn kpss_test(series: &[f64], bandwidth: Option<usize>, tables: &UnitRootTables) -> Result<KpssResult, StatsError> {
    check_len(series.len())?;
    let n = series.len();
    let bandwidth = bandwidth.unwrap_or_else(|| default_bandwidth(n));
    if bandwidth >= n {
        return Err(StatsError::BandwidthTooLarge { bandwidth, n });
    }
    let m = super::mean(series);
    let e: Vec<f64> = series.iter().map(|x| x - m).collect();
    let mut s = 0.0;
    let mut eta = 0.0;
    for v in &e {
        s += v;
        eta += s * s;
    }
    let nf = n as f64;
    eta /= nf * nf;
    let mut lrv: f64 = e.iter().map(|v| v * v).sum();
    for l in 1..=bandwidth {
        let w = 1.0 - l as f64 / (bandwidth as f64 + 1.0);
        let g: f64 = e[l..].iter().zip(&e[..n - l]).map(|(a, b)| a * b).sum();
        lrv += 2.0 * w * g;
    }
    lrv /= nf;
    if !(lrv > 0.0) {
        return Err(StatsError::ZeroVariance("KPSS long-run variance"));
    }
    let stat = eta / lrv;
    Ok(KpssResult {
        stat,
        band: tables.kpss_band(stat),
        bandwidth,
    })
}
