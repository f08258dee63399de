//! Newey-West (Bartlett kernel) covariance for OLS coefficients.
//!
//! ```text
//! S = Σ_t e_t² x_t x_tᵀ + Σ_{l=1}^{L} (1 − l/(L+1)) Σ_{t>l} e_t e_{t−l} (x_t x_{t−l}ᵀ + x_{t−l} x_tᵀ)
//! V = (XᵀX)⁻¹ S (XᵀX)⁻¹
//! ```
//!
//! No finite-sample scaling is applied, so `L = 0` is the White (HC0)
//! estimator.

use nalgebra::DMatrix;

use super::ols::RegressionFit;
use super::{t_two_sided, StatsError};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HacResult {
    pub bandwidth: usize,
    pub se: Vec<f64>,
    pub p: Vec<f64>,
}

/// `floor(4 · (T/100)^(2/9))`.
pub fn default_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

pub fn hac_covariance(
    x: &DMatrix<f64>,
    resid: &[f64],
    xtx_inv: &DMatrix<f64>,
    bandwidth: usize,
) -> Result<DMatrix<f64>, StatsError> {
    let (n, k) = x.shape();
    if bandwidth >= n {
        return Err(StatsError::BandwidthTooLarge { bandwidth, n });
    }
    // scores u_t = x_t e_t, one row per observation
    let u = DMatrix::from_fn(n, k, |t, j| x[(t, j)] * resid[t]);
    let mut meat = u.transpose() * &u;
    for l in 1..=bandwidth {
        let w = 1.0 - l as f64 / (bandwidth as f64 + 1.0);
        let lead = u.rows(l, n - l);
        let lagged = u.rows(0, n - l);
        let gamma = lead.transpose() * lagged;
        meat += (&gamma + gamma.transpose()) * w;
    }
    Ok(xtx_inv * meat * xtx_inv)
}

/// HAC standard errors and t-distribution p-values (n − k dof). `None`
/// selects [`default_bandwidth`].
pub fn hac_se(fit: &RegressionFit, bandwidth: Option<usize>) -> Result<HacResult, StatsError> {
    let n = fit.n_obs;
    let bandwidth = bandwidth.unwrap_or_else(|| default_bandwidth(n));
    let cov = hac_covariance(&fit.design.x, &fit.residuals, &fit.xtx_inv, bandwidth)?;
    let se: Vec<f64> = (0..cov.ncols()).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    let p = fit
        .coefficients
        .iter()
        .zip(&se)
        .map(|(b, s)| t_two_sided(b / s, fit.df_resid as f64))
        .collect();
    Ok(HacResult { bandwidth, se, p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::ols_xy;

    #[test]
    fn default_bandwidth_rule() {
        assert_eq!(default_bandwidth(100), 4);
        assert_eq!(default_bandwidth(71), 3);
        assert_eq!(default_bandwidth(38), 3);
        assert_eq!(default_bandwidth(5), 2);
    }

    #[test]
    fn bandwidth_at_sample_size_is_an_error() {
        let x = [1.0, 2.0, 4.0, 3.0];
        let f = ols_xy(&[1.0, 2.0, 2.5, 4.0], &[("x", &x)], true).unwrap();
        assert!(matches!(hac_se(&f, Some(4)), Err(StatsError::BandwidthTooLarge { .. })));
        assert!(hac_se(&f, Some(3)).is_ok());
    }

    #[test]
    fn zero_bandwidth_is_white() {
        let x = [0.3, 1.2, 2.2, 2.9, 4.4, 5.1, 6.0];
        let y = [1.0, 2.1, 2.2, 4.5, 4.0, 7.2, 6.1];
        let f = ols_xy(&y, &[("x", &x)], true).unwrap();
        let h = hac_se(&f, Some(0)).unwrap();
        // White: (X'X)^-1 X' diag(e²) X (X'X)^-1
        let e2 = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(7, f.residuals.iter().map(|e| e * e)));
        let white = &f.xtx_inv * f.design.x.transpose() * e2 * &f.design.x * &f.xtx_inv;
        for j in 0..2 {
            assert!((h.se[j] - white[(j, j)].sqrt()).abs() < 1e-14);
        }
    }
}
