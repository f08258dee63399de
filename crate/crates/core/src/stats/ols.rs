use std::collections::HashSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::hac::{hac_se, HacResult};
use super::table::{SampleWindow, TimeSeriesTable};
use super::{t_two_sided, StatsError};

/// A column at a lag: `column(t − lag)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Var {
    pub column: String,
    pub lag: usize,
}

impl Var {
    pub fn new(column: &str, lag: usize) -> Self {
        Var {
            column: column.to_string(),
            lag,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lag == 0 {
            write!(f, "{}(t)", self.column)
        } else {
            write!(f, "{}(t-{})", self.column, self.lag)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(Var),
    Interaction(Var, Var),
}

impl Term {
    pub fn var(column: &str, lag: usize) -> Self {
        Term::Var(Var::new(column, lag))
    }

    pub fn interaction(a: Var, b: Var) -> Self {
        Term::Interaction(a, b)
    }

    fn vars(&self) -> Vec<&Var> {
        match self {
            Term::Var(v) => vec![v],
            Term::Interaction(a, b) => vec![a, b],
        }
    }

    fn value(&self, table: &TimeSeriesTable, row: usize) -> Result<Option<f64>, StatsError> {
        let mut out = 1.0;
        for v in self.vars() {
            match table.lagged(&v.column, row, v.lag)? {
                Some(x) => out *= x,
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Interaction(a, b) => write!(f, "{a}*{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSpec {
    pub dependent: String,
    pub terms: Vec<Term>,
    pub include_intercept: bool,
    /// Sessions kept before lags are built.
    pub window: Option<SampleWindow>,
}

impl RegressionSpec {
    pub fn new(dependent: &str, terms: Vec<Term>) -> Self {
        RegressionSpec {
            dependent: dependent.to_string(),
            terms,
            include_intercept: true,
            window: None,
        }
    }

    pub fn with_window(mut self, window: SampleWindow) -> Self {
        self.window = Some(window);
        self
    }

    pub fn validate(&self) -> Result<(), StatsError> {
        let mut seen = HashSet::new();
        for t in &self.terms {
            let key = match t {
                Term::Interaction(a, b) if b.to_string() < a.to_string() => Term::Interaction(b.clone(), a.clone()),
                other => other.clone(),
            };
            if !seen.insert(key) {
                return Err(StatsError::DuplicateTerm(t.to_string()));
            }
        }
        Ok(())
    }

    pub fn columns(&self) -> Vec<&str> {
        let mut cols = vec![self.dependent.as_str()];
        for t in &self.terms {
            for v in t.vars() {
                if !cols.contains(&v.column.as_str()) {
                    cols.push(&v.column);
                }
            }
        }
        cols
    }

    pub fn term_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        if self.include_intercept {
            names.push(INTERCEPT.to_string());
        }
        names.extend(self.terms.iter().map(Term::to_string));
        names
    }
}

impl fmt::Display for RegressionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(t) ~ ", self.dependent)?;
        let mut parts: Vec<String> = Vec::new();
        if self.include_intercept {
            parts.push("1".into());
        }
        parts.extend(self.terms.iter().map(Term::to_string));
        write!(f, "{}", parts.join(" + "))
    }
}

pub const INTERCEPT: &str = "Intercept";

/// Aligned regression data after lag construction and listwise deletion.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub names: Vec<String>,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    /// Session of each row.
    pub sessions: Vec<i64>,
    pub has_intercept: bool,
}

impl Design {
    pub fn from_spec(spec: &RegressionSpec, table: &TimeSeriesTable) -> Result<Self, StatsError> {
        spec.validate()?;
        for c in spec.columns() {
            table.column(c)?;
        }
        let table = match &spec.window {
            Some(w) => table.restrict(w),
            None => table.clone(),
        };
        let k = spec.terms.len() + usize::from(spec.include_intercept);
        let mut rows: Vec<f64> = Vec::new();
        let mut y = Vec::new();
        let mut sessions = Vec::new();
        'rows: for r in 0..table.len() {
            let Some(yv) = table.lagged(&spec.dependent, r, 0)? else {
                continue;
            };
            let mut row = Vec::with_capacity(k);
            if spec.include_intercept {
                row.push(1.0);
            }
            for t in &spec.terms {
                match t.value(&table, r)? {
                    Some(v) => row.push(v),
                    None => continue 'rows,
                }
            }
            rows.extend(row);
            y.push(yv);
            sessions.push(table.index()[r]);
        }
        let n = y.len();
        Ok(Design {
            names: spec.term_names(),
            x: DMatrix::from_row_slice(n, k, &rows),
            y: DVector::from_vec(y),
            sessions,
            has_intercept: spec.include_intercept,
        })
    }

    pub fn from_columns(y: &[f64], columns: &[(&str, &[f64])], intercept: bool) -> Result<Self, StatsError> {
        let n = y.len();
        for (_, c) in columns {
            if c.len() != n {
                return Err(StatsError::LengthMismatch(c.len(), n));
            }
        }
        let mut names = Vec::new();
        if intercept {
            names.push(INTERCEPT.to_string());
        }
        names.extend(columns.iter().map(|c| c.0.to_string()));
        let k = names.len();
        let x = DMatrix::from_fn(n, k, |i, j| {
            if intercept && j == 0 {
                1.0
            } else {
                columns[j - usize::from(intercept)].1[i]
            }
        });
        Ok(Design {
            names,
            x,
            y: DVector::from_column_slice(y),
            sessions: (0..n as i64).collect(),
            has_intercept: intercept,
        })
    }

    pub fn n_obs(&self) -> usize {
        self.y.len()
    }

    pub fn n_params(&self) -> usize {
        self.x.ncols()
    }

    /// Rows `idx` of this design, in that order.
    pub fn select_rows(&self, idx: &[usize]) -> Design {
        Design {
            names: self.names.clone(),
            x: self.x.select_rows(idx),
            y: DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.y[i])),
            sessions: idx.iter().map(|&i| self.sessions[i]).collect(),
            has_intercept: self.has_intercept,
        }
    }
}

/// Least-squares coefficients and `(X'X)^{-1}` through a thin QR.
pub(crate) fn solve(design: &Design) -> Result<(DVector<f64>, DMatrix<f64>), StatsError> {
    let (n, k) = design.x.shape();
    if n <= k {
        return Err(StatsError::InsufficientData { needed: k + 1, got: n });
    }
    let qr = design.x.clone().qr();
    let r = qr.r();
    let singular: Vec<String> = (0..k)
        .filter(|&j| {
            let norm = design.x.column(j).norm();
            norm == 0.0 || r[(j, j)].abs() <= 1e-10 * norm
        })
        .map(|j| design.names[j].clone())
        .collect();
    if !singular.is_empty() {
        return Err(StatsError::SingularDesign { columns: singular });
    }
    let qty = qr.q().transpose() * &design.y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| StatsError::SingularDesign { columns: design.names.clone() })?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| StatsError::SingularDesign { columns: design.names.clone() })?;
    let xtx_inv = &r_inv * r_inv.transpose();
    Ok((beta, xtx_inv))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub se_ols: Vec<f64>,
    pub p_ols: Vec<f64>,
    /// Newey-West errors at the default bandwidth.
    pub hac: HacResult,
    pub r2: f64,
    pub adj_r2: f64,
    pub f_stat: f64,
    pub f_p: f64,
    /// Residual standard error.
    pub sigma: f64,
    pub residuals: Vec<f64>,
    pub n_obs: usize,
    pub df_resid: usize,
    pub design: Design,
    pub xtx_inv: DMatrix<f64>,
}

impl RegressionFit {
    pub fn coefficient(&self, name: &str) -> Result<f64, StatsError> {
        self.position(name).map(|i| self.coefficients[i])
    }

    pub fn position(&self, name: &str) -> Result<usize, StatsError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| StatsError::UnknownCoefficient(name.to_string()))
    }
}

pub(crate) fn fit_design(design: Design) -> Result<RegressionFit, StatsError> {
    let (beta, xtx_inv) = solve(&design)?;
    let n = design.n_obs();
    let k = design.n_params();
    let resid = &design.y - &design.x * &beta;
    let ssr = resid.norm_squared();
    let df = n - k;
    let s2 = ssr / df as f64;
    let sst = if design.has_intercept {
        let m = design.y.mean();
        design.y.iter().map(|v| (v - m).powi(2)).sum::<f64>()
    } else {
        design.y.norm_squared()
    };
    let r2 = if sst > 0.0 { 1.0 - ssr / sst } else { f64::NAN };
    let model_df = k - usize::from(design.has_intercept);
    let adj_r2 = 1.0 - (1.0 - r2) * (n - usize::from(design.has_intercept)) as f64 / df as f64;
    let (f_stat, f_p) = if model_df > 0 && sst > 0.0 {
        let f = ((sst - ssr) / model_df as f64) / s2;
        let p = if f.is_finite() {
            FisherSnedecor::new(model_df as f64, df as f64)
                .map(|d| d.sf(f))
                .unwrap_or(f64::NAN)
        } else {
            0.0
        };
        (f, p)
    } else {
        (f64::NAN, f64::NAN)
    };
    let se_ols: Vec<f64> = (0..k).map(|j| (s2 * xtx_inv[(j, j)]).sqrt()).collect();
    let p_ols = beta
        .iter()
        .zip(&se_ols)
        .map(|(b, s)| t_two_sided(b / s, df as f64))
        .collect();
    let mut fit = RegressionFit {
        names: design.names.clone(),
        coefficients: beta.iter().copied().collect(),
        se_ols,
        p_ols,
        hac: HacResult::default(),
        r2,
        adj_r2,
        f_stat,
        f_p,
        sigma: s2.sqrt(),
        residuals: resid.iter().copied().collect(),
        n_obs: n,
        df_resid: df,
        design,
        xtx_inv,
    };
    fit.hac = hac_se(&fit, None)?;
    Ok(fit)
}

/// OLS with listwise deletion of rows missing any term.
pub fn ols_fit(spec: &RegressionSpec, table: &TimeSeriesTable) -> Result<RegressionFit, StatsError> {
    fit_design(Design::from_spec(spec, table)?)
}

/// OLS on plain columns.
pub fn ols_xy(y: &[f64], columns: &[(&str, &[f64])], intercept: bool) -> Result<RegressionFit, StatsError> {
    fit_design(Design::from_columns(y, columns, intercept)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 + 2.0 * v).collect();
        let f = ols_xy(&y, &[("x", &x)], true).unwrap();
        assert!((f.coefficients[0] - 3.0).abs() < 1e-12);
        assert!((f.coefficients[1] - 2.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_design_names_columns() {
        let x1 = [1.0, 2.0, 3.0, 4.0, 5.0];
        let x2: Vec<f64> = x1.iter().map(|v| 2.0 * v).collect();
        let y = [1.0, 3.0, 2.0, 5.0, 4.0];
        match ols_xy(&y, &[("a", &x1), ("b", &x2)], true) {
            Err(StatsError::SingularDesign { columns }) => assert_eq!(columns, ["b"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        let x = [1.0, 2.0];
        assert!(matches!(
            ols_xy(&[1.0, 2.0], &[("x", &x)], true),
            Err(StatsError::InsufficientData { .. })
        ));
    }

    #[test]
    fn spec_builds_lagged_design_with_listwise_deletion() {
        let t = TimeSeriesTable::new(vec![1, 2, 3, 4, 5, 6])
            .unwrap()
            .with_column("y", vec![Some(1.0), Some(2.0), Some(4.0), None, Some(3.0), Some(5.0)])
            .unwrap()
            .with_dense("x", &[0.5, 0.1, 0.9, 0.3, 0.7, 0.2])
            .unwrap();
        let spec = RegressionSpec::new(
            "y",
            vec![
                Term::var("y", 1),
                Term::var("x", 0),
                Term::interaction(Var::new("y", 1), Var::new("x", 0)),
            ],
        );
        let d = Design::from_spec(&spec, &t).unwrap();
        // row 0 lacks y(t-1); row 3 lacks y; row 4 lacks y(t-1)
        assert_eq!(d.sessions, [2, 3, 6]);
        assert_eq!(d.names, ["Intercept", "y(t-1)", "x(t)", "y(t-1)*x(t)"]);
        assert_eq!(d.x.row(2).iter().copied().collect::<Vec<_>>(), [1.0, 3.0, 0.2, 0.6000000000000001]);
    }

    #[test]
    fn duplicate_terms_rejected() {
        let spec = RegressionSpec::new(
            "y",
            vec![
                Term::interaction(Var::new("a", 1), Var::new("b", 1)),
                Term::interaction(Var::new("b", 1), Var::new("a", 1)),
            ],
        );
        assert!(matches!(spec.validate(), Err(StatsError::DuplicateTerm(_))));
    }
}
