use serde::Serialize;

use super::{normal_cdf, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PValueMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MannWhitney {
    /// U statistic of the first sample: pairs where `a` beats `b`, ties ½.
    pub u: f64,
    /// Two-sided.
    pub p: f64,
    pub method: PValueMethod,
    pub median_a: f64,
    pub median_b: f64,
    pub n_a: usize,
    pub n_b: usize,
}

const EXACT_MAX: usize = 20;

/// Midranks of the pooled sample and the tie-group sizes.
fn midranks(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        if j > i {
            ties.push(j - i + 1);
        }
        i = j + 1;
    }
    (ranks, ties)
}

fn u_statistic(a: &[f64], b: &[f64]) -> (f64, Vec<usize>) {
    let (ranks, ties) = midranks(a, b);
    let na = a.len() as f64;
    let ra: f64 = ranks[..a.len()].iter().sum();
    (ra - na * (na + 1.0) / 2.0, ties)
}

/// Null distribution counts of U for sample sizes (m, n) without ties.
fn u_counts(m: usize, n: usize) -> Vec<f64> {
    // f[j][u]: arrangements of j first-sample items among the first i pooled
    // positions, rolled over i.
    let max_u = m * n;
    let mut f = vec![vec![0.0; max_u + 1]; m + 1];
    f[0][0] = 1.0;
    for i in 1..=m + n {
        for j in (1..=m.min(i)).rev() {
            let k = i - j; // second-sample items placed so far
            if k > n {
                continue;
            }
            // placing a first-sample item at position i beats the k items before it
            for u in (k..=max_u).rev() {
                f[j][u] += f[j - 1][u - k];
            }
        }
    }
    f.swap_remove(m)
}

fn median(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Two-sided Mann-Whitney U test. Exact null distribution when the smaller
/// sample has at most 20 values and there are no ties; otherwise the normal
/// approximation with tie correction and a 0.5 continuity correction.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<MannWhitney, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::InsufficientData {
            needed: 1,
            got: 0,
        });
    }
    let (u, ties) = u_statistic(a, b);
    let (m, n) = (a.len(), b.len());
    let mu = (m * n) as f64 / 2.0;
    let u_hi = u.max((m * n) as f64 - u);
    let (p, method) = if m.min(n) <= EXACT_MAX && ties.is_empty() {
        let counts = u_counts(m, n);
        let total: f64 = counts.iter().sum();
        let upper: f64 = counts[u_hi as usize..].iter().sum();
        ((2.0 * upper / total).min(1.0), PValueMethod::Exact)
    } else {
        let nn = (m + n) as f64;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (nn * (nn - 1.0));
        let sd = ((m * n) as f64 / 12.0 * (nn + 1.0 - tie_term)).sqrt();
        let p = if sd > 0.0 {
            let z = (u_hi - mu - 0.5).max(0.0) / sd;
            (2.0 * (1.0 - normal_cdf(z))).min(1.0)
        } else {
            1.0
        };
        (p, PValueMethod::Normal)
    };
    Ok(MannWhitney {
        u,
        p,
        method,
        median_a: median(a),
        median_b: median(b),
        n_a: m,
        n_b: n,
    })
}

/// ROC AUC as the normalized U statistic of the positive scores against
/// the negative ones.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64, StatsError> {
    if scores.len() != labels.len() {
        return Err(StatsError::LengthMismatch(scores.len(), labels.len()));
    }
    let pos: Vec<f64> = scores.iter().zip(labels).filter(|(_, &l)| l).map(|(s, _)| *s).collect();
    let neg: Vec<f64> = scores.iter().zip(labels).filter(|(_, &l)| !l).map(|(s, _)| *s).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(StatsError::SingleClass);
    }
    let (u, _) = u_statistic(&pos, &neg);
    Ok(u / (pos.len() as f64 * neg.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_u(a: &[f64], b: &[f64]) -> f64 {
        let mut u = 0.0;
        for x in a {
            for y in b {
                if x > y {
                    u += 1.0;
                } else if x == y {
                    u += 0.5;
                }
            }
        }
        u
    }

    #[test]
    fn u_matches_pair_count() {
        let a = [0.3, 1.7, 2.2, 2.2, 5.0, -1.0, 0.9, 3.3];
        let b = [2.2, 0.1, 4.4, 1.7, 1.1, 0.0, 6.1, 2.5];
        assert_eq!(mann_whitney(&a, &b).unwrap().u, brute_u(&a, &b));
    }

    #[test]
    fn identical_samples() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = mann_whitney(&a, &a).unwrap();
        assert_eq!(r.u, 12.5);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn separated_samples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [5.0, 6.0, 7.0, 8.0];
        let r = mann_whitney(&a, &b).unwrap();
        assert_eq!(r.u, 0.0);
        assert_eq!(r.method, PValueMethod::Exact);
        // 2 / C(8,4)
        assert!((r.p - 2.0 / 70.0).abs() < 1e-15);
        assert_eq!(roc_auc(&[1.0, 2.0, 3.0, 4.0], &[false, false, true, true]).unwrap(), 1.0);
    }

    #[test]
    fn exact_counts_sum_to_binomial() {
        let c = u_counts(5, 7);
        assert_eq!(c.iter().sum::<f64>(), 792.0);
        assert_eq!(c.len(), 36);
        // symmetric
        for u in 0..=35 {
            assert_eq!(c[u], c[35 - u]);
        }
    }

    #[test]
    fn single_class_is_error() {
        assert!(matches!(roc_auc(&[1.0, 2.0], &[true, true]), Err(StatsError::SingleClass)));
    }
}
