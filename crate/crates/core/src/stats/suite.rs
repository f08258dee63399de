//! The canned regression program: EMI and polarization dynamics, inequality
//! models with robustness variants, and congressional productivity models.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::normality::{jarque_bera, JarqueBera};
use super::ols::{ols_fit, Design, RegressionFit, RegressionSpec, Term, Var};
use super::table::{SampleWindow, TimeSeriesTable};
use super::unit_root::{adf_test, kpss_test, AdfResult, KpssResult, UnitRootTables};
use super::vif::{vif, VifEntry};
use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteTable {
    /// EMI and polarization, each autoregressive with and without the other.
    EmiPolarization,
    /// Top-1% income share on its lag, polarization and EMI.
    Inequality,
    /// Gini index, the longer inequality record, and an 8-session
    /// polarization lag.
    InequalityRobustness,
    /// MLI, LPI and log law counts with policy mood.
    ProductivityMood,
    /// The same with log patent counts in place of mood.
    ProductivityPatents,
}

impl SuiteTable {
    pub const ALL: [SuiteTable; 5] = [
        SuiteTable::EmiPolarization,
        SuiteTable::Inequality,
        SuiteTable::InequalityRobustness,
        SuiteTable::ProductivityMood,
        SuiteTable::ProductivityPatents,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteTable::EmiPolarization => "emi-pol",
            SuiteTable::Inequality => "inequality",
            SuiteTable::InequalityRobustness => "inequality-robust",
            SuiteTable::ProductivityMood => "productivity-mood",
            SuiteTable::ProductivityPatents => "productivity-patents",
        }
    }

    pub fn required_columns(self) -> &'static [&'static str] {
        match self {
            SuiteTable::EmiPolarization => &["EMI", "Pol"],
            SuiteTable::Inequality => &["Ineq", "EMI", "Pol"],
            SuiteTable::InequalityRobustness => &["Gini", "Ineq", "EMI", "Pol"],
            SuiteTable::ProductivityMood => &[
                "MLI",
                "LPI",
                "nlaw",
                "Mood",
                "PartyControl",
                "PartyControlDif",
                "EMI",
                "Pol",
            ],
            SuiteTable::ProductivityPatents => &[
                "MLI",
                "LPI",
                "nlaw",
                "npatents",
                "PartyControl",
                "PartyControlDif",
                "EMI",
                "Pol",
            ],
        }
    }

    /// First required column absent from `table`, if any.
    pub fn missing_column(self, table: &TimeSeriesTable) -> Option<&'static str> {
        self.required_columns().iter().copied().find(|c| !table.has(c))
    }
}

impl fmt::Display for SuiteTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteTable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SuiteTable::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown model table {s:?}"))
    }
}

/// When to add the EMI × polarization interaction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionPolicy {
    /// Add it when a covariate other than the lagged dependent variable has
    /// VIF strictly above 10.
    #[default]
    Literal,
    Always,
    Never,
}

impl FromStr for InteractionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(InteractionPolicy::Literal),
            "always" => Ok(InteractionPolicy::Always),
            "never" => Ok(InteractionPolicy::Never),
            other => Err(format!("unknown interaction policy {other:?}")),
        }
    }
}

impl fmt::Display for InteractionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InteractionPolicy::Literal => "literal",
            InteractionPolicy::Always => "always",
            InteractionPolicy::Never => "never",
        })
    }
}

pub const VIF_THRESHOLD: f64 = 10.0;
const VIF_WARN_FROM: f64 = 9.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub policy: InteractionPolicy,
    /// First session of the primary inequality window (1943-44).
    pub inequality_from: i64,
    /// First session of the long inequality record (1911-12).
    pub long_record_from: i64,
    /// First session with policy-mood data (1951-52).
    pub mood_from: i64,
    /// First session of the patent-based productivity models (1879-80).
    pub patents_from: i64,
    pub long_pol_lag: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            policy: InteractionPolicy::Literal,
            inequality_from: 78,
            long_record_from: 62,
            mood_from: 82,
            patents_from: 46,
            long_pol_lag: 8,
        }
    }
}

/// Outcome of the VIF rule for one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionDecision {
    pub term: String,
    /// Largest VIF among covariates other than the lagged dependent variable.
    pub vif_max: f64,
    pub added: bool,
    pub policy: InteractionPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub table: SuiteTable,
    /// Column number within the table, from 1.
    pub column: usize,
    pub label: String,
    pub spec: RegressionSpec,
    pub interaction: Option<InteractionDecision>,
}

fn ar1(y: &str) -> Term {
    Term::var(y, 1)
}

/// Applies the interaction rule to a main-effects spec. `lagged_dv` is
/// excluded from the VIF maximum but kept in the auxiliary regressions.
fn with_interaction_rule(
    spec: RegressionSpec,
    a: Var,
    b: Var,
    table: &TimeSeriesTable,
    policy: InteractionPolicy,
) -> Result<(RegressionSpec, InteractionDecision), StatsError> {
    let design = Design::from_spec(&spec, table)?;
    let offset = usize::from(spec.include_intercept);
    let cols: Vec<Vec<f64>> = (offset..design.n_params())
        .map(|j| design.x.column(j).iter().copied().collect())
        .collect();
    let named: Vec<(&str, &[f64])> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| (design.names[i + offset].as_str(), c.as_slice()))
        .collect();
    let lagged_dv = Term::var(&spec.dependent, 1).to_string();
    let vif_max = vif(&named)?
        .into_iter()
        .filter(|e| e.name != lagged_dv)
        .map(|e| e.vif)
        .fold(f64::NEG_INFINITY, f64::max);
    let term = Term::interaction(a, b);
    let label = term.to_string();
    let added = match policy {
        InteractionPolicy::Always => true,
        InteractionPolicy::Never => false,
        InteractionPolicy::Literal => {
            if vif_max > VIF_WARN_FROM && vif_max <= VIF_THRESHOLD {
                log::warn!(
                    "{}: max VIF {vif_max:.2} is just below the threshold {VIF_THRESHOLD}; interaction {label} not added",
                    spec
                );
            }
            vif_max > VIF_THRESHOLD
        }
    };
    let mut spec = spec;
    if added {
        spec.terms.push(term);
    }
    Ok((
        spec,
        InteractionDecision {
            term: label,
            vif_max,
            added,
            policy,
        },
    ))
}

fn plain(table: SuiteTable, column: usize, label: &str, spec: RegressionSpec) -> ModelSpec {
    ModelSpec {
        table,
        column,
        label: label.to_string(),
        spec,
        interaction: None,
    }
}

#[allow(clippy::too_many_arguments)]
fn ruled(
    table: SuiteTable,
    column: usize,
    label: &str,
    spec: RegressionSpec,
    a: Var,
    b: Var,
    data: &TimeSeriesTable,
    policy: InteractionPolicy,
) -> Result<ModelSpec, StatsError> {
    let (spec, decision) = with_interaction_rule(spec, a, b, data, policy)?;
    Ok(ModelSpec {
        table,
        column,
        label: label.to_string(),
        spec,
        interaction: Some(decision),
    })
}

fn table_models(t: SuiteTable, data: &TimeSeriesTable, opt: &SuiteOptions) -> Result<Vec<ModelSpec>, StatsError> {
    if let Some(c) = t.missing_column(data) {
        return Err(StatsError::MissingColumn(c.to_string()));
    }
    let p = opt.policy;
    let ineq_window = SampleWindow::from(opt.inequality_from);
    Ok(match t {
        SuiteTable::EmiPolarization => vec![
            plain(t, 1, "EMI AR(1)", RegressionSpec::new("EMI", vec![ar1("EMI")])),
            plain(
                t,
                2,
                "EMI with Pol",
                RegressionSpec::new("EMI", vec![ar1("EMI"), Term::var("Pol", 1)]),
            ),
            plain(t, 3, "Pol AR(1)", RegressionSpec::new("Pol", vec![ar1("Pol")])),
            plain(
                t,
                4,
                "Pol with EMI",
                RegressionSpec::new("Pol", vec![ar1("Pol"), Term::var("EMI", 1)]),
            ),
        ],
        SuiteTable::Inequality => vec![
            plain(
                t,
                1,
                "Ineq with Pol",
                RegressionSpec::new("Ineq", vec![ar1("Ineq"), Term::var("Pol", 1)]).with_window(ineq_window),
            ),
            ruled(
                t,
                2,
                "Ineq with Pol and EMI",
                RegressionSpec::new("Ineq", vec![ar1("Ineq"), Term::var("EMI", 1), Term::var("Pol", 1)])
                    .with_window(ineq_window),
                Var::new("EMI", 1),
                Var::new("Pol", 1),
                data,
                p,
            )?,
        ],
        SuiteTable::InequalityRobustness => {
            let lag = opt.long_pol_lag;
            vec![
                ruled(
                    t,
                    1,
                    "Gini",
                    RegressionSpec::new("Gini", vec![ar1("Gini"), Term::var("EMI", 1), Term::var("Pol", 1)])
                        .with_window(ineq_window),
                    Var::new("EMI", 1),
                    Var::new("Pol", 1),
                    data,
                    p,
                )?,
                ruled(
                    t,
                    2,
                    "Ineq long record",
                    RegressionSpec::new("Ineq", vec![ar1("Ineq"), Term::var("EMI", 1), Term::var("Pol", 1)])
                        .with_window(SampleWindow::from(opt.long_record_from)),
                    Var::new("EMI", 1),
                    Var::new("Pol", 1),
                    data,
                    p,
                )?,
                ruled(
                    t,
                    3,
                    &format!("Ineq with Pol lag {lag}"),
                    RegressionSpec::new("Ineq", vec![ar1("Ineq"), Term::var("EMI", 1), Term::var("Pol", lag)])
                        .with_window(ineq_window),
                    Var::new("EMI", 1),
                    Var::new("Pol", lag),
                    data,
                    p,
                )?,
            ]
        }
        SuiteTable::ProductivityMood | SuiteTable::ProductivityPatents => {
            let (control, from) = if t == SuiteTable::ProductivityMood {
                ("Mood", opt.mood_from)
            } else {
                ("npatents", opt.patents_from)
            };
            let window = SampleWindow::from(from);
            let mut out = Vec::new();
            for (i, y) in ["MLI", "LPI", "nlaw"].into_iter().enumerate() {
                let base = vec![
                    ar1(y),
                    Term::var("Pol", 0),
                    Term::var(control, 0),
                    Term::var("PartyControl", 0),
                    Term::var("PartyControlDif", 0),
                ];
                out.push(plain(
                    t,
                    2 * i + 1,
                    &format!("{y} base"),
                    RegressionSpec::new(y, base.clone()).with_window(window),
                ));
                let mut ext = base;
                ext.push(Term::var("EMI", 0));
                out.push(ruled(
                    t,
                    2 * i + 2,
                    &format!("{y} with EMI"),
                    RegressionSpec::new(y, ext).with_window(window),
                    Var::new("EMI", 0),
                    Var::new("Pol", 0),
                    data,
                    p,
                )?);
            }
            out
        }
    })
}

/// Model specifications for the requested tables, in table order.
pub fn build_model_suite(
    data: &TimeSeriesTable,
    tables: &[SuiteTable],
    opt: &SuiteOptions,
) -> Result<Vec<ModelSpec>, StatsError> {
    let mut out = Vec::new();
    for &t in tables {
        out.extend(table_models(t, data, opt)?);
    }
    Ok(out)
}

/// Residual diagnostics for one fitted model. Unit-root tests need at
/// least ten residuals and are left empty otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub adf: Option<AdfResult>,
    pub kpss: Option<KpssResult>,
    pub jb: Option<JarqueBera>,
    pub vif: Vec<VifEntry>,
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub model: ModelSpec,
    pub fit: RegressionFit,
    pub diagnostics: Diagnostics,
}

pub fn diagnose(fit: &RegressionFit, tables: &UnitRootTables) -> Diagnostics {
    let r = &fit.residuals;
    let offset = usize::from(fit.design.has_intercept);
    let cols: Vec<Vec<f64>> = (offset..fit.design.n_params())
        .map(|j| fit.design.x.column(j).iter().copied().collect())
        .collect();
    let named: Vec<(&str, &[f64])> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| (fit.names[i + offset].as_str(), c.as_slice()))
        .collect();
    Diagnostics {
        adf: adf_test(r, None, tables).ok(),
        kpss: kpss_test(r, None, tables).ok(),
        jb: jarque_bera(r).ok(),
        vif: vif(&named).unwrap_or_default(),
    }
}

pub fn fit_suite(
    data: &TimeSeriesTable,
    models: &[ModelSpec],
    tables: &UnitRootTables,
) -> Result<Vec<SuiteResult>, StatsError> {
    models
        .iter()
        .map(|m| {
            let fit = ols_fit(&m.spec, data)?;
            let diagnostics = diagnose(&fit, tables);
            Ok(SuiteResult {
                model: m.clone(),
                fit,
                diagnostics,
            })
        })
        .collect()
}
