use serde::Serialize;

use super::{normal_quantile, t_two_sided, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PearsonCi {
    pub r: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p: f64,
    pub n: usize,
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::InsufficientData { needed: 2, got: x.len() });
    }
    let mx = super::mean(x);
    let my = super::mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance("correlation input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson r with a Fisher-z confidence interval and a two-sided t-test
/// p-value (n − 2 dof).
pub fn pearson_ci(x: &[f64], y: &[f64], level: f64) -> Result<PearsonCi, StatsError> {
    let n = x.len();
    if n < 4 {
        return Err(StatsError::InsufficientData { needed: 4, got: n });
    }
    let r = pearson(x, y)?;
    let nf = n as f64;
    let (ci_low, ci_high, p) = if r.abs() == 1.0 {
        (r, r, 0.0)
    } else {
        let z = r.atanh();
        let half = normal_quantile(0.5 + level / 2.0) / (nf - 3.0).sqrt();
        let t = r * ((nf - 2.0) / (1.0 - r * r)).sqrt();
        ((z - half).tanh(), (z + half).tanh(), t_two_sided(t, nf - 2.0))
    };
    Ok(PearsonCi {
        r,
        ci_low,
        ci_high,
        p,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCorrLag {
    pub lag: i64,
    pub r: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCorrTable {
    pub lags: Vec<CrossCorrLag>,
    /// Lags dropped for fewer than four overlapping points or a constant
    /// window.
    pub omitted: Vec<i64>,
}

impl CrossCorrTable {
    /// Lag with the largest |r|; the first one wins ties.
    pub fn peak(&self) -> Option<&CrossCorrLag> {
        self.lags
            .iter()
            .fold(None, |best: Option<&CrossCorrLag>, l| match best {
                Some(b) if b.r.abs() >= l.r.abs() => Some(b),
                _ => Some(l),
            })
    }

    pub fn at(&self, lag: i64) -> Option<&CrossCorrLag> {
        self.lags.iter().find(|l| l.lag == lag)
    }
}

const MIN_OVERLAP: usize = 4;

/// For each lag ℓ in `−max_lag..=max_lag`, correlates `x_t` with `y_{t+ℓ}`
/// over the pairs where both are finite. Non-finite entries mark missing
/// values.
pub fn lagged_crosscorr(x: &[f64], y: &[f64], max_lag: usize, level: f64) -> Result<CrossCorrTable, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len() as i64;
    let mut lags = Vec::new();
    let mut omitted = Vec::new();
    for lag in -(max_lag as i64)..=max_lag as i64 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = (0..n)
            .filter_map(|t| {
                let s = t + lag;
                if s < 0 || s >= n {
                    return None;
                }
                let (a, b) = (x[t as usize], y[s as usize]);
                (a.is_finite() && b.is_finite()).then_some((a, b))
            })
            .unzip();
        if xs.len() < MIN_OVERLAP {
            log::warn!("cross-correlation lag {lag}: only {} overlapping points, omitted", xs.len());
            omitted.push(lag);
            continue;
        }
        match pearson_ci(&xs, &ys, level) {
            Ok(c) => lags.push(CrossCorrLag {
                lag,
                r: c.r,
                ci_low: c.ci_low,
                ci_high: c.ci_high,
                n: c.n,
            }),
            Err(StatsError::ZeroVariance(_)) => {
                log::warn!("cross-correlation lag {lag}: constant window, omitted");
                omitted.push(lag);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(CrossCorrTable { lags, omitted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_correlations() {
        let x = [1.0, 2.0, 4.0, 3.0, 7.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(pearson_ci(&x, &x, 0.95).unwrap().r, 1.0);
        let c = pearson_ci(&x, &neg, 0.95).unwrap();
        assert_eq!(c.r, -1.0);
        assert_eq!((c.ci_low, c.ci_high, c.p), (-1.0, -1.0, 0.0));
    }

    #[test]
    fn constant_input_is_error() {
        assert!(pearson_ci(&[1.0; 5], &[1.0, 2.0, 3.0, 4.0, 5.0], 0.95).is_err());
    }

    #[test]
    fn shifted_series_peaks_at_shift() {
        let base: Vec<f64> = (0..30).map(|i| ((i * 37 % 11) as f64).sin() + (i % 3) as f64).collect();
        // y_{t+2} = x_t
        let mut y = vec![f64::NAN; 30];
        for t in 0..28 {
            y[t + 2] = base[t];
        }
        let tab = lagged_crosscorr(&base, &y, 4, 0.95).unwrap();
        let peak = tab.peak().unwrap();
        assert_eq!(peak.lag, 2);
        assert!((peak.r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn short_overlap_is_omitted() {
        let x = [1.0, 3.0, 2.0, 5.0, 4.0, 6.0];
        let y = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0];
        let tab = lagged_crosscorr(&x, &y, 3, 0.95).unwrap();
        assert_eq!(tab.omitted, [-3, 3]);
        assert_eq!(tab.lags.len(), 5);
    }
}
