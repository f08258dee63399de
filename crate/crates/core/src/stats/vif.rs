use serde::Serialize;

use super::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VifEntry {
    pub name: String,
    /// `f64::INFINITY` under perfect collinearity.
    pub vif: f64,
}

impl VifEntry {
    pub fn is_infinite(&self) -> bool {
        self.vif.is_infinite()
    }
}

const COLLINEAR_TOL: f64 = 1e-10;

/// Residual of `target` after projection on the span of `basis` plus a
/// constant, by modified Gram-Schmidt. Basis columns that are themselves
/// (numerically) dependent are skipped.
fn residual_after_projection(target: &[f64], basis: &[&[f64]]) -> Vec<f64> {
    let n = target.len();
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    let ones = vec![1.0; n];
    for col in std::iter::once(ones.as_slice()).chain(basis.iter().copied()) {
        let mut v = col.to_vec();
        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for q in &ortho {
            let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if scale > 0.0 && norm > COLLINEAR_TOL * scale {
            v.iter_mut().for_each(|x| *x /= norm);
            ortho.push(v);
        }
    }
    let mut r = target.to_vec();
    for q in &ortho {
        let d: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
        r.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
    }
    r
}

/// `VIF_j = 1 / (1 − R²_j)`, with `R²_j` from regressing column `j` on the
/// other columns and an intercept.
pub fn vif(columns: &[(&str, &[f64])]) -> Result<Vec<VifEntry>, StatsError> {
    if columns.len() < 2 {
        return Err(StatsError::InsufficientData {
            needed: 2,
            got: columns.len(),
        });
    }
    let n = columns[0].1.len();
    for (_, c) in columns {
        if c.len() != n {
            return Err(StatsError::LengthMismatch(c.len(), n));
        }
    }
    if n < columns.len() + 1 {
        return Err(StatsError::InsufficientData {
            needed: columns.len() + 1,
            got: n,
        });
    }
    Ok(columns
        .iter()
        .enumerate()
        .map(|(j, (name, col))| {
            let others: Vec<&[f64]> = columns
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, c)| c.1)
                .collect();
            let m = super::mean(col);
            let sst: f64 = col.iter().map(|x| (x - m).powi(2)).sum();
            let ssr: f64 = residual_after_projection(col, &others).iter().map(|x| x * x).sum();
            let one_minus_r2 = if sst > 0.0 { ssr / sst } else { 0.0 };
            let vif = if one_minus_r2 <= COLLINEAR_TOL {
                f64::INFINITY
            } else {
                1.0 / one_minus_r2
            };
            VifEntry {
                name: name.to_string(),
                vif,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_centered_columns() {
        let a = [1.0, -1.0, 1.0, -1.0];
        let b = [1.0, 1.0, -1.0, -1.0];
        let v = vif(&[("a", &a), ("b", &b)]).unwrap();
        assert_eq!(v[0].vif, 1.0);
        assert_eq!(v[1].vif, 1.0);
    }

    #[test]
    fn near_and_perfect_collinearity() {
        let x1: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin() + i as f64 * 0.1).collect();
        let x2: Vec<f64> = x1
            .iter()
            .enumerate()
            .map(|(i, x)| 2.0 * x + 1e-3 * ((i * 7919) % 13) as f64)
            .collect();
        let v = vif(&[("x1", &x1), ("x2", &x2)]).unwrap();
        assert!(v.iter().all(|e| e.vif > 100.0));

        let x3: Vec<f64> = x1.iter().map(|x| 3.0 * x - 2.0).collect();
        let x4: Vec<f64> = (0..30).map(|i| ((i * i) % 7) as f64).collect();
        let v = vif(&[("x1", &x1), ("x3", &x3), ("x4", &x4)]).unwrap();
        assert!(v[0].is_infinite() && v[1].is_infinite());
        assert!(v[2].vif.is_finite() && v[2].vif >= 1.0);
    }

    #[test]
    fn needs_two_columns() {
        assert!(vif(&[("a", &[1.0, 2.0, 3.0])]).is_err());
    }
}
