use serde::Serialize;

use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JarqueBera {
    pub stat: f64,
    pub p: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// `JB = n/6 · (S² + (K − 3)²/4)` with population (1/n) moments; p from
/// χ²(2), whose survival function is `exp(−x/2)`.
pub fn jarque_bera(x: &[f64]) -> Result<JarqueBera, StatsError> {
    let n = x.len();
    if n < 8 {
        return Err(StatsError::InsufficientData { needed: 8, got: n });
    }
    let nf = n as f64;
    let m = super::mean(x);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    if m2 <= 0.0 {
        return Err(StatsError::ZeroVariance("Jarque-Bera sample"));
    }
    let skewness = m3 / m2.powf(1.5);
    let kurtosis = m4 / (m2 * m2);
    let stat = nf / 6.0 * (skewness * skewness + (kurtosis - 3.0).powi(2) / 4.0);
    Ok(JarqueBera {
        stat,
        p: (-stat / 2.0).exp(),
        skewness,
        kurtosis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_sample_closed_form() {
        let x: Vec<f64> = (0..12).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect();
        let jb = jarque_bera(&x).unwrap();
        assert_eq!(jb.skewness, 0.0);
        assert_eq!(jb.kurtosis, 1.0);
        assert_eq!(jb.stat, 2.0);
        assert_eq!(jb.p, (-1.0f64).exp());
    }

    #[test]
    fn constant_is_error() {
        assert!(matches!(jarque_bera(&[2.0; 9]), Err(StatsError::ZeroVariance(_))));
        assert!(jarque_bera(&[1.0, 2.0]).is_err());
    }
}
