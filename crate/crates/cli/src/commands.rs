use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use emi_core::corpus::{chunk_corpus, filter_speeches, session_start_year, Chamber, FilterParams, Party};
use emi_core::data::{self, DataDir};
use emi_core::embeddings::{build_vocab, load_model, save_model, train_sgns};
use emi_core::par::{self, Execution};
use emi_core::scoring::{
    aggregate, post_peak, score_corpus, trend_fit, Construct, ConstructDictionary, GroupBy, ScoredChunk,
    SessionAggregate, TrendFit,
};
use emi_core::stats::{
    build_model_suite, fit_suite, hac_se, lagged_crosscorr, mann_whitney, roc_auc, SuiteTable, TimeSeriesTable,
    UnitRootTables,
};
use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::artifacts::Stage;
use crate::config::RunConfig;
use crate::error::{data, usage, Result};
use crate::io::{self, upstream};

pub const DATA_DIR_ENV: &str = "EMI_DATA_DIR";

pub struct Context {
    pub cfg: RunConfig,
    pub workdir: PathBuf,
    pub data_dir: DataDir,
}

impl Context {
    pub fn exec(&self) -> Execution {
        Execution::from_threads(self.cfg.threads)
    }

    /// Reads a data file (override directory first, then the shipped copy)
    /// and records its hash as a stage input.
    fn data_text(&self, stage: &mut Stage, name: &str) -> Result<String> {
        let text = self
            .data_dir
            .read(name)
            .map_err(|e| data(format!("cannot read data file {name}: {e}")))?;
        let label = match self.data_dir.root() {
            Some(root) if root.join(name).exists() => root.join(name).display().to_string(),
            _ => format!("shipped:{name}"),
        };
        stage.input_text(&label, &text);
        Ok(text)
    }

    fn stage(&self, command: &str) -> Result<Stage> {
        Stage::begin(&self.workdir, command)
    }
}

pub fn preprocess(ctx: &Context) -> Result<()> {
    let input = ctx
        .cfg
        .input
        .clone()
        .ok_or_else(|| usage("preprocess needs --input <speeches.jsonl>"))?;
    io::input_file(&input, "input")?;
    let mut stage = ctx.stage("preprocess")?;
    stage.input(&input)?;
    let speeches = io::read_speeches(&input)?;
    for m in &speeches.malformed {
        warn!("{}:{}: {}", input.display(), m.line, m.error);
    }
    let limit = io::malformed_limit(speeches.lines);
    if speeches.malformed.len() > limit {
        return Err(data(format!(
            "{} of {} input lines are malformed (at most {limit} tolerated); see warnings above",
            speeches.malformed.len(),
            speeches.lines
        )));
    }
    let common = data::word_set(&ctx.data_text(&mut stage, data::TOP100_FILE)?);
    let params = FilterParams {
        threshold: ctx.cfg.ratio_threshold,
        min_tokens: ctx.cfg.min_tokens,
        common_words: common,
    };
    let filtered = filter_speeches(&speeches.records, &params, ctx.exec());
    let chunks = chunk_corpus(&filtered.kept, &ctx.cfg.chunk_params()?, ctx.exec());
    stage.write_jsonl(io::CHUNKS, &chunks)?;
    stage.write_csv(io::REJECTIONS, &filtered.rejected)?;
    stage.write_csv(io::MALFORMED, &speeches.malformed)?;
    stage.commit(&ctx.cfg)?;
    println!(
        "preprocess: {} lines, {} malformed, {} kept, {} rejected, {} chunks",
        speeches.lines,
        speeches.malformed.len(),
        filtered.kept.len(),
        filtered.rejected.len(),
        chunks.len()
    );
    Ok(())
}

pub fn train(ctx: &Context) -> Result<()> {
    let chunks_path = upstream(&ctx.workdir, io::CHUNKS, "preprocess")?;
    let mut stage = ctx.stage("train")?;
    stage.input(&chunks_path)?;
    let chunks = io::read_chunks(&chunks_path)?;
    let tokens: Vec<&[String]> = chunks.iter().map(|c| c.tokens.as_slice()).collect();
    let vocab = build_vocab(tokens.iter().copied(), ctx.cfg.min_count)?;
    let sentences: Vec<Vec<&str>> = chunks
        .iter()
        .map(|c| c.tokens.iter().map(String::as_str).collect())
        .collect();
    let mut params = ctx.cfg.sgns_params();
    if params.threads == 0 {
        params.threads = par::available_workers();
    }
    info!("training on {} chunks, vocabulary {}", chunks.len(), vocab.len());
    let model = train_sgns(&sentences, &vocab, &params)?;
    let written = save_model(&model, &stage.output(io::MODEL))?;
    for p in written {
        let name = p.file_name().expect("staged file").to_string_lossy().into_owned();
        stage.output(&name);
    }
    stage.commit(&ctx.cfg)?;
    println!(
        "train: {} chunks, vocabulary {}, dimension {}",
        chunks.len(),
        vocab.len(),
        model.dim()
    );
    Ok(())
}

pub fn score(ctx: &Context) -> Result<()> {
    let chunks_path = upstream(&ctx.workdir, io::CHUNKS, "preprocess")?;
    let model_path = upstream(&ctx.workdir, io::MODEL, "train")?;
    let mut stage = ctx.stage("score")?;
    stage.input(&chunks_path)?;
    stage.input(&model_path)?;
    let chunks = io::read_chunks(&chunks_path)?;
    let model = load_model(&model_path)?;
    let evidence = ConstructDictionary::from_text(Construct::Evidence, &ctx.data_text(&mut stage, data::EVIDENCE_FILE)?)?;
    let intuition =
        ConstructDictionary::from_text(Construct::Intuition, &ctx.data_text(&mut stage, data::INTUITION_FILE)?)?;
    let stopwords = data::word_set(&ctx.data_text(&mut stage, data::STOPWORDS_FILE)?);
    let out = score_corpus(
        &chunks,
        &model,
        &evidence,
        &intuition,
        &stopwords,
        &ctx.cfg.length_bins()?,
        ctx.exec(),
    )?;
    if out.dropped > 0 {
        warn!("{} chunks had no in-vocabulary content words and were dropped", out.dropped);
    }
    stage.write_csv(io::SCORES, &out.scored)?;
    stage.commit(&ctx.cfg)?;
    println!("score: {} chunks scored, {} dropped", out.scored.len(), out.dropped);
    Ok(())
}

/// Long-form rows for plotting EMI by session and group.
#[derive(Serialize)]
struct PlotAggregate {
    session: Option<u32>,
    year: Option<i32>,
    party: Option<Party>,
    chamber: Option<Chamber>,
    mean_emi: f64,
    ci_low: f64,
    ci_high: f64,
    n_chunks: usize,
}

fn plot_rows(aggs: &[SessionAggregate]) -> impl Iterator<Item = PlotAggregate> + '_ {
    aggs.iter().map(|a| PlotAggregate {
        session: a.session,
        year: a.session.map(session_start_year),
        party: a.party,
        chamber: a.chamber,
        mean_emi: a.mean_emi,
        ci_low: a.ci_low,
        ci_high: a.ci_high,
        n_chunks: a.n_chunks,
    })
}

pub fn aggregate_cmd(ctx: &Context) -> Result<()> {
    let scores_path = upstream(&ctx.workdir, io::SCORES, "score")?;
    let mut stage = ctx.stage("aggregate")?;
    stage.input(&scores_path)?;
    let scored = io::read_scores(&scores_path)?;
    let cfg = &ctx.cfg;
    let aggs = aggregate(&scored, cfg.group(), cfg.n_boot, cfg.seed, ctx.exec())?;
    stage.write_csv(io::AGGREGATES, &aggs)?;
    if cfg.emit_plot_data {
        let views = [
            ("plot_emi_session.csv", GroupBy::SESSION),
            (
                "plot_emi_party.csv",
                GroupBy {
                    party: true,
                    ..GroupBy::SESSION
                },
            ),
            (
                "plot_emi_party_chamber.csv",
                GroupBy {
                    party: true,
                    chamber: true,
                    ..GroupBy::SESSION
                },
            ),
        ];
        for (name, by) in views {
            let a = if by == cfg.group() {
                aggs.clone()
            } else {
                aggregate(&scored, by, cfg.n_boot, cfg.seed, ctx.exec())?
            };
            stage.write_csv(name, plot_rows(&a))?;
        }
    }
    stage.commit(cfg)?;
    println!("aggregate: {} groups from {} chunks", aggs.len(), scored.len());
    Ok(())
}

#[derive(Serialize)]
struct TrendRow {
    peak_session: u32,
    peak_year: i32,
    n: usize,
    intercept: f64,
    slope: f64,
    r2: f64,
    p_intercept: f64,
    p_slope: f64,
}

#[derive(Serialize)]
struct TrendPoint {
    session: u32,
    year: i32,
    mean_emi: f64,
    fitted: f64,
}

fn write_trend(stage: &mut Stage, name: &str, plot: Option<&str>, points: &[(u32, f64)]) -> Result<TrendFit> {
    let fit = trend_fit(points)?;
    stage.write_csv(
        name,
        [TrendRow {
            peak_session: fit.first_session,
            peak_year: session_start_year(fit.first_session),
            n: fit.n,
            intercept: fit.intercept,
            slope: fit.slope,
            r2: fit.r2,
            p_intercept: fit.p_intercept,
            p_slope: fit.p_slope,
        }],
    )?;
    if let Some(plot) = plot {
        let f = &fit;
        stage.write_csv(
            plot,
            points.iter().map(|&(s, v)| TrendPoint {
                session: s,
                year: session_start_year(s),
                mean_emi: v,
                fitted: f.intercept + f.slope * (s - f.first_session) as f64,
            }),
        )?;
    }
    Ok(fit)
}

pub fn trend(ctx: &Context) -> Result<()> {
    let agg_path = upstream(&ctx.workdir, io::AGGREGATES, "aggregate")?;
    let mut stage = ctx.stage("trend")?;
    stage.input(&agg_path)?;
    let aggs = io::read_aggregates(&agg_path)?;
    if aggs.iter().any(|a| a.session.is_none() || a.party.is_some() || a.chamber.is_some()) {
        return Err(usage(
            "trend needs session-level aggregates; rerun `emi aggregate --group-by session`",
        ));
    }
    let points = post_peak(&aggs);
    let plot = ctx.cfg.emit_plot_data.then_some("plot_trend.csv");
    let fit = write_trend(&mut stage, io::TREND, plot, &points)?;
    stage.commit(&ctx.cfg)?;
    println!(
        "trend: peak session {}, slope {:.5} per session, R² {:.3} over {} sessions",
        fit.first_session, fit.slope, fit.r2, fit.n
    );
    Ok(())
}

#[derive(Deserialize)]
struct LabelRow {
    chunk_id: String,
    label: String,
}

fn parse_label(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "evidence" => Some(true),
        "0" | "false" | "intuition" => Some(false),
        _ => None,
    }
}

#[derive(Debug, Serialize)]
struct AucRow {
    scope: String,
    n: usize,
    n_evidence: usize,
    n_intuition: usize,
    auc: Option<f64>,
    mw_u: Option<f64>,
    mw_p: Option<f64>,
}

fn auc_row(scope: String, pairs: &[(f64, bool)]) -> Result<AucRow> {
    let pos: Vec<f64> = pairs.iter().filter(|p| p.1).map(|p| p.0).collect();
    let neg: Vec<f64> = pairs.iter().filter(|p| !p.1).map(|p| p.0).collect();
    let mut row = AucRow {
        scope,
        n: pairs.len(),
        n_evidence: pos.len(),
        n_intuition: neg.len(),
        auc: None,
        mw_u: None,
        mw_p: None,
    };
    if pos.is_empty() || neg.is_empty() {
        warn!("{}: a single class, AUC undefined", row.scope);
        return Ok(row);
    }
    let scores: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let labels: Vec<bool> = pairs.iter().map(|p| p.1).collect();
    let mw = mann_whitney(&pos, &neg)?;
    row.auc = Some(roc_auc(&scores, &labels)?);
    row.mw_u = Some(mw.u);
    row.mw_p = Some(mw.p);
    Ok(row)
}

/// Decade label for a session, counting ten-year blocks from `start`.
pub fn decade_of(session: u32, start: i32) -> String {
    let year = session_start_year(session);
    let lo = start + 10 * (year - start).div_euclid(10);
    format!("{lo}-{}", lo + 9)
}

pub fn validate_auc(ctx: &Context) -> Result<()> {
    let scores_path = upstream(&ctx.workdir, io::SCORES, "score")?;
    let labels_path = ctx
        .cfg
        .labels
        .clone()
        .ok_or_else(|| usage("validate-auc needs --labels <chunk_id,label csv>"))?;
    io::input_file(&labels_path, "labels file")?;
    let mut stage = ctx.stage("validate-auc")?;
    stage.input(&scores_path)?;
    stage.input(&labels_path)?;
    let scored = io::read_scores(&scores_path)?;
    let by_id: HashMap<&str, &ScoredChunk> = scored.iter().map(|s| (s.chunk_id.as_str(), s)).collect();
    let labels: Vec<LabelRow> = io::read_csv(&labels_path)?;
    let mut unmatched = 0;
    let mut all = Vec::new();
    let mut decades: BTreeMap<String, Vec<(f64, bool)>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        let label = parse_label(&l.label).ok_or_else(|| {
            data(format!(
                "{}: row {}: label {:?} is not 0/1, true/false or evidence/intuition",
                labels_path.display(),
                i + 2,
                l.label
            ))
        })?;
        let Some(s) = by_id.get(l.chunk_id.as_str()) else {
            unmatched += 1;
            continue;
        };
        all.push((s.emi, label));
        decades
            .entry(decade_of(s.session, ctx.cfg.decade_start))
            .or_default()
            .push((s.emi, label));
    }
    if unmatched > 0 {
        warn!("{unmatched} labelled chunk ids have no score");
    }
    if all.is_empty() {
        return Err(data("no labelled chunk matches a scored chunk"));
    }
    let mut rows = vec![auc_row("overall".into(), &all)?];
    for (d, pairs) in &decades {
        rows.push(auc_row(d.clone(), pairs)?);
    }
    stage.write_csv(io::VALIDATION, &rows)?;
    stage.commit(&ctx.cfg)?;
    match rows[0].auc {
        Some(a) => println!("validate-auc: overall AUC {a:.4} on {} labelled chunks", all.len()),
        None => println!("validate-auc: overall AUC undefined (single class) on {} chunks", all.len()),
    }
    Ok(())
}

/// Adds an EMI column from session-level aggregates when the series lacks one.
fn merge_emi(table: TimeSeriesTable, aggs: &[SessionAggregate]) -> Result<TimeSeriesTable> {
    let by_session: HashMap<i64, f64> = aggs
        .iter()
        .filter(|a| a.party.is_none() && a.chamber.is_none())
        .filter_map(|a| a.session.map(|s| (s as i64, a.mean_emi)))
        .collect();
    if by_session.is_empty() {
        return Err(data("aggregates.csv holds no session-level rows to take EMI from"));
    }
    let col = table.index().iter().map(|s| by_session.get(s).copied()).collect();
    Ok(table.with_column("EMI", col)?)
}

#[derive(Serialize)]
struct CoefRow<'a> {
    table: &'a str,
    column: usize,
    label: &'a str,
    dependent: &'a str,
    term: &'a str,
    estimate: f64,
    se_ols: f64,
    p_ols: f64,
    se_hac: f64,
    p_hac: f64,
    hac_bandwidth: usize,
}

#[derive(Serialize)]
struct ModelRow<'a> {
    table: &'a str,
    column: usize,
    label: &'a str,
    dependent: &'a str,
    n_obs: usize,
    r2: f64,
    adj_r2: f64,
    f_stat: f64,
    f_p: f64,
    sigma: f64,
    interaction: Option<&'a str>,
    interaction_vif: Option<f64>,
    interaction_added: Option<bool>,
    max_vif: Option<f64>,
    resid_adf_stat: Option<f64>,
    resid_adf_p: Option<f64>,
    resid_kpss_stat: Option<f64>,
    resid_kpss_p: Option<String>,
    resid_jb_stat: Option<f64>,
    resid_jb_p: Option<f64>,
}

#[derive(Serialize)]
struct SeriesPoint<'a> {
    session: i64,
    year: i32,
    variable: &'a str,
    value: f64,
    standardized: f64,
}

fn standardized_points<'a>(table: &TimeSeriesTable, names: &[&'a str]) -> Result<Vec<SeriesPoint<'a>>> {
    let mut out = Vec::new();
    for &name in names.iter().filter(|n| table.has(n)) {
        let pts = table.dense(name)?;
        let n = pts.len() as f64;
        let m = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sd = (pts.iter().map(|p| (p.1 - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        out.extend(pts.iter().map(|&(s, v)| SeriesPoint {
            session: s,
            year: session_start_year(s as u32),
            variable: name,
            value: v,
            standardized: (v - m) / sd,
        }));
    }
    Ok(out)
}

pub fn analyze(ctx: &Context) -> Result<()> {
    let cfg = &ctx.cfg;
    let series_path = cfg
        .series
        .clone()
        .ok_or_else(|| usage("analyze needs --series <session series csv>"))?;
    io::input_file(&series_path, "series file")?;
    let mut stage = ctx.stage("analyze")?;
    stage.input(&series_path)?;
    let mut table = io::read_series(&series_path, cfg.log_columns())?;
    if !table.has("EMI") {
        let agg_path = upstream(&ctx.workdir, io::AGGREGATES, "aggregate")
            .map_err(|e| e.context("the series has no EMI column and no aggregates are available"))?;
        stage.input(&agg_path)?;
        table = merge_emi(table, &io::read_aggregates(&agg_path)?)?;
    }
    let unit_root = UnitRootTables::parse(&ctx.data_text(&mut stage, data::UNIT_ROOT_FILE)?)?;

    let (requested, explicit) = cfg.suite_tables()?;
    let mut tables: Vec<SuiteTable> = Vec::new();
    for t in requested {
        match t.missing_column(&table) {
            None => tables.push(t),
            Some(c) if explicit => {
                return Err(data(format!("table {t} needs column {c:?}, absent from {}", series_path.display())))
            }
            Some(c) => warn!("skipping table {t}: no {c:?} column"),
        }
    }
    if tables.is_empty() {
        return Err(data("the series supports none of the model tables"));
    }
    let models = build_model_suite(&table, &tables, &cfg.suite_options())?;
    let results = fit_suite(&table, &models, &unit_root)?;

    let mut coef_rows = Vec::new();
    let mut model_rows = Vec::new();
    let mut hacs = Vec::with_capacity(results.len());
    for r in &results {
        hacs.push(match cfg.hac_bandwidth {
            Some(b) => hac_se(&r.fit, Some(b))?,
            None => r.fit.hac.clone(),
        });
    }
    for (r, hac) in results.iter().zip(&hacs) {
        let m = &r.model;
        let f = &r.fit;
        for (j, term) in f.names.iter().enumerate() {
            coef_rows.push(CoefRow {
                table: m.table.as_str(),
                column: m.column,
                label: &m.label,
                dependent: &m.spec.dependent,
                term,
                estimate: f.coefficients[j],
                se_ols: f.se_ols[j],
                p_ols: f.p_ols[j],
                se_hac: hac.se[j],
                p_hac: hac.p[j],
                hac_bandwidth: hac.bandwidth,
            });
        }
        let d = &r.diagnostics;
        model_rows.push(ModelRow {
            table: m.table.as_str(),
            column: m.column,
            label: &m.label,
            dependent: &m.spec.dependent,
            n_obs: f.n_obs,
            r2: f.r2,
            adj_r2: f.adj_r2,
            f_stat: f.f_stat,
            f_p: f.f_p,
            sigma: f.sigma,
            interaction: m.interaction.as_ref().map(|i| i.term.as_str()),
            interaction_vif: m.interaction.as_ref().map(|i| i.vif_max),
            interaction_added: m.interaction.as_ref().map(|i| i.added),
            max_vif: d.vif.iter().map(|v| v.vif).reduce(f64::max),
            resid_adf_stat: d.adf.as_ref().map(|a| a.stat),
            resid_adf_p: d.adf.as_ref().map(|a| a.p),
            resid_kpss_stat: d.kpss.as_ref().map(|k| k.stat),
            resid_kpss_p: d.kpss.as_ref().map(|k| k.band.to_string()),
            resid_jb_stat: d.jb.as_ref().map(|j| j.stat),
            resid_jb_p: d.jb.as_ref().map(|j| j.p),
        });
    }
    stage.write_csv(io::COEFFICIENTS, &coef_rows)?;
    stage.write_csv(io::MODELS, &model_rows)?;

    let emi: Vec<(u32, f64)> = table.dense("EMI")?.into_iter().map(|(s, v)| (s as u32, v)).collect();
    let peak = emi.iter().max_by(|a, b| a.1.total_cmp(&b.1)).map(|p| p.0);
    let post: Vec<(u32, f64)> = emi.iter().copied().filter(|p| Some(p.0) >= peak).collect();
    let plot = cfg.emit_plot_data.then_some("plot_series_trend.csv");
    let trend = if post.len() >= 3 {
        Some(write_trend(&mut stage, "series_trend.csv", plot, &post)?)
    } else {
        warn!("EMI peaks {} session(s) before the end; no post-peak trend", post.len().saturating_sub(1));
        None
    };

    if cfg.emit_plot_data {
        stage.write_csv("plot_series.csv", standardized_points(&table, &["EMI", "Pol", "Ineq"])?)?;
        stage.write_csv(
            "plot_productivity.csv",
            standardized_points(&table, &["EMI", "MLI", "LPI", "nlaw", "Mood", "Pol"])?,
        )?;
    }
    stage.commit(cfg)?;
    let trend_note = trend.map_or("no post-peak trend".to_string(), |t| {
        format!("post-peak slope {:.5}, R² {:.3}", t.slope, t.r2)
    });
    println!("analyze: {} models over {} tables; {trend_note}", results.len(), tables.len());
    Ok(())
}

#[derive(Serialize)]
struct CrossCorrRow<'a> {
    x: &'a str,
    y: &'a str,
    lag: i64,
    r: f64,
    ci_low: f64,
    ci_high: f64,
    n: usize,
}

pub fn crosscorr(ctx: &Context) -> Result<()> {
    let cfg = &ctx.cfg;
    let series_path = cfg
        .series
        .clone()
        .ok_or_else(|| usage("crosscorr needs --series <session series csv>"))?;
    io::input_file(&series_path, "series file")?;
    let mut stage = ctx.stage("crosscorr")?;
    stage.input(&series_path)?;
    let table = io::read_series(&series_path, cfg.log_columns())?;
    let dense = |name: &str| -> Result<Vec<f64>> {
        Ok(table
            .column(name)
            .map_err(|_| data(format!("{} has no column {name:?}", series_path.display())))?
            .iter()
            .map(|v| v.unwrap_or(f64::NAN))
            .collect())
    };
    let ct = lagged_crosscorr(&dense(&cfg.x)?, &dense(&cfg.y)?, cfg.max_lag, cfg.level)?;
    for l in &ct.omitted {
        warn!("lag {l} omitted: fewer than 4 overlapping sessions");
    }
    stage.write_csv(
        io::CROSSCORR,
        ct.lags.iter().map(|l| CrossCorrRow {
            x: &cfg.x,
            y: &cfg.y,
            lag: l.lag,
            r: l.r,
            ci_low: l.ci_low,
            ci_high: l.ci_high,
            n: l.n,
        }),
    )?;
    stage.commit(cfg)?;
    match ct.peak() {
        Some(p) => println!(
            "crosscorr: {} vs {}, peak |r| at lag {} (r = {:.3})",
            cfg.x, cfg.y, p.lag, p.r
        ),
        None => println!("crosscorr: no lag had enough overlap"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decades_count_from_the_start_year() {
        // session 46 opens in 1879, 51 in 1889, 50 in 1887
        assert_eq!(decade_of(46, 1879), "1879-1888");
        assert_eq!(decade_of(50, 1879), "1879-1888");
        assert_eq!(decade_of(51, 1879), "1889-1898");
        assert_eq!(decade_of(45, 1879), "1869-1878");
    }

    #[test]
    fn labels_accept_common_spellings() {
        assert_eq!(parse_label("1"), Some(true));
        assert_eq!(parse_label(" Evidence "), Some(true));
        assert_eq!(parse_label("false"), Some(false));
        assert_eq!(parse_label("maybe"), None);
    }
}
