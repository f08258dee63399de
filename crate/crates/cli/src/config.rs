//! Flat `key = value` run configuration.
//!
//! Values come from the defaults, then the config file, then command-line
//! flags. The resolved configuration is written next to every stage's
//! outputs and its hash goes into the manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use emi_core::corpus::ChunkParams;
use emi_core::embeddings::SgnsParams;
use emi_core::scoring::{GroupBy, LengthBins};
use emi_core::stats::{InteractionPolicy, SuiteOptions, SuiteTable};
use sha2::{Digest, Sha256};

use crate::error::{usage, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub series: Option<PathBuf>,
    pub labels: Option<PathBuf>,

    pub seed: u64,
    pub threads: usize,

    pub min_tokens: usize,
    pub ratio_threshold: f64,
    pub chunk_target: usize,
    pub chunk_min: usize,

    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub min_count: u64,
    pub subsample: f64,
    pub alpha: f64,

    pub bin_width: usize,
    pub open_bin_from: usize,

    pub n_boot: usize,
    pub group_by: String,

    pub tables: String,
    pub log_columns: String,
    pub interaction: InteractionPolicy,
    pub hac_bandwidth: Option<usize>,
    pub inequality_from: i64,
    pub long_record_from: i64,
    pub mood_from: i64,
    pub patents_from: i64,
    pub long_pol_lag: usize,

    pub x: String,
    pub y: String,
    pub max_lag: usize,
    pub level: f64,

    pub decade_start: i32,
    pub emit_plot_data: bool,
    pub progress: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sgns = SgnsParams::default();
        let suite = SuiteOptions::default();
        RunConfig {
            input: None,
            series: None,
            labels: None,
            seed: 1,
            threads: 1,
            min_tokens: 11,
            ratio_threshold: 0.05,
            chunk_target: 150,
            chunk_min: 50,
            dim: sgns.dim,
            window: sgns.window,
            negatives: sgns.negatives,
            epochs: sgns.epochs,
            min_count: 5,
            subsample: sgns.subsample,
            alpha: sgns.alpha0,
            bin_width: 25,
            open_bin_from: 200,
            n_boot: 1000,
            group_by: "session".into(),
            tables: "all".into(),
            log_columns: "nlaw,npatents".into(),
            interaction: suite.policy,
            hac_bandwidth: None,
            inequality_from: suite.inequality_from,
            long_record_from: suite.long_record_from,
            mood_from: suite.mood_from,
            patents_from: suite.patents_from,
            long_pol_lag: suite.long_pol_lag,
            x: "EMI".into(),
            y: "Ineq".into(),
            max_lag: 5,
            level: 0.95,
            decade_start: 1879,
            emit_plot_data: false,
            progress: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| usage(format!("invalid value {value:?} for {key}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(usage(format!("invalid value {value:?} for {key}: expected true or false"))),
    }
}

fn opt_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

fn show_path(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

impl RunConfig {
    pub const KEYS: &'static [&'static str] = &[
        "alpha",
        "bin_width",
        "chunk_min",
        "chunk_target",
        "decade_start",
        "dim",
        "emit_plot_data",
        "epochs",
        "group_by",
        "hac_bandwidth",
        "inequality_from",
        "input",
        "interaction",
        "labels",
        "level",
        "log_columns",
        "long_pol_lag",
        "long_record_from",
        "max_lag",
        "min_count",
        "min_tokens",
        "mood_from",
        "n_boot",
        "negatives",
        "open_bin_from",
        "patents_from",
        "progress",
        "ratio_threshold",
        "seed",
        "series",
        "subsample",
        "tables",
        "threads",
        "window",
        "x",
        "y",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "input" => self.input = opt_path(v),
            "series" => self.series = opt_path(v),
            "labels" => self.labels = opt_path(v),
            "seed" => self.seed = parse(key, v)?,
            "threads" => self.threads = parse(key, v)?,
            "min_tokens" => self.min_tokens = parse(key, v)?,
            "ratio_threshold" => self.ratio_threshold = parse(key, v)?,
            "chunk_target" => self.chunk_target = parse(key, v)?,
            "chunk_min" => self.chunk_min = parse(key, v)?,
            "dim" => self.dim = parse(key, v)?,
            "window" => self.window = parse(key, v)?,
            "negatives" => self.negatives = parse(key, v)?,
            "epochs" => self.epochs = parse(key, v)?,
            "min_count" => self.min_count = parse(key, v)?,
            "subsample" => self.subsample = parse(key, v)?,
            "alpha" => self.alpha = parse(key, v)?,
            "bin_width" => self.bin_width = parse(key, v)?,
            "open_bin_from" => self.open_bin_from = parse(key, v)?,
            "n_boot" => self.n_boot = parse(key, v)?,
            "group_by" => {
                GroupBy::parse(v).map_err(|e| usage(e.to_string()))?;
                self.group_by = v.to_string()
            }
            "tables" => {
                self.tables = v.to_string();
                self.suite_tables()?;
            }
            "log_columns" => self.log_columns = v.to_string(),
            "interaction" => self.interaction = parse(key, v)?,
            "hac_bandwidth" => {
                self.hac_bandwidth = if v == "auto" { None } else { Some(parse(key, v)?) }
            }
            "inequality_from" => self.inequality_from = parse(key, v)?,
            "long_record_from" => self.long_record_from = parse(key, v)?,
            "mood_from" => self.mood_from = parse(key, v)?,
            "patents_from" => self.patents_from = parse(key, v)?,
            "long_pol_lag" => self.long_pol_lag = parse(key, v)?,
            "x" => self.x = v.to_string(),
            "y" => self.y = v.to_string(),
            "max_lag" => self.max_lag = parse(key, v)?,
            "level" => {
                let l: f64 = parse(key, v)?;
                if !(l > 0.0 && l < 1.0) {
                    return Err(usage(format!("level must lie in (0, 1), got {l}")));
                }
                self.level = l
            }
            "decade_start" => self.decade_start = parse(key, v)?,
            "emit_plot_data" => self.emit_plot_data = parse_bool(key, v)?,
            "progress" => self.progress = parse_bool(key, v)?,
            other => return Err(usage(format!("unknown configuration key {other:?}"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> String {
        match key {
            "input" => show_path(&self.input),
            "series" => show_path(&self.series),
            "labels" => show_path(&self.labels),
            "seed" => self.seed.to_string(),
            "threads" => self.threads.to_string(),
            "min_tokens" => self.min_tokens.to_string(),
            "ratio_threshold" => self.ratio_threshold.to_string(),
            "chunk_target" => self.chunk_target.to_string(),
            "chunk_min" => self.chunk_min.to_string(),
            "dim" => self.dim.to_string(),
            "window" => self.window.to_string(),
            "negatives" => self.negatives.to_string(),
            "epochs" => self.epochs.to_string(),
            "min_count" => self.min_count.to_string(),
            "subsample" => self.subsample.to_string(),
            "alpha" => self.alpha.to_string(),
            "bin_width" => self.bin_width.to_string(),
            "open_bin_from" => self.open_bin_from.to_string(),
            "n_boot" => self.n_boot.to_string(),
            "group_by" => self.group_by.clone(),
            "tables" => self.tables.clone(),
            "log_columns" => self.log_columns.clone(),
            "interaction" => self.interaction.to_string(),
            "hac_bandwidth" => self.hac_bandwidth.map_or("auto".into(), |b| b.to_string()),
            "inequality_from" => self.inequality_from.to_string(),
            "long_record_from" => self.long_record_from.to_string(),
            "mood_from" => self.mood_from.to_string(),
            "patents_from" => self.patents_from.to_string(),
            "long_pol_lag" => self.long_pol_lag.to_string(),
            "x" => self.x.clone(),
            "y" => self.y.clone(),
            "max_lag" => self.max_lag.to_string(),
            "level" => self.level.to_string(),
            "decade_start" => self.decade_start.to_string(),
            "emit_plot_data" => self.emit_plot_data.to_string(),
            "progress" => self.progress.to_string(),
            _ => unreachable!("key list and accessor out of sync: {key}"),
        }
    }

    /// Applies a `key = value` file. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("{origin}:{}: expected key = value", i + 1)))?;
            self.set(k.trim().replace('-', "_").as_str(), v)
                .map_err(|e| e.context(format!("{origin}:{}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text, &path.display().to_string())
    }

    /// Sorted `key = value` lines; parses back to the same configuration.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for k in Self::KEYS {
            writeln!(s, "{k} = {}", self.get(k)).expect("write to string");
        }
        s
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.render().as_bytes()))
    }

    pub fn chunk_params(&self) -> Result<ChunkParams> {
        Ok(ChunkParams::new(self.chunk_target, self.chunk_min)?)
    }

    pub fn sgns_params(&self) -> SgnsParams {
        SgnsParams {
            dim: self.dim,
            window: self.window,
            negatives: self.negatives,
            epochs: self.epochs,
            alpha0: self.alpha,
            subsample: self.subsample,
            seed: self.seed,
            threads: self.threads,
            progress: self.progress,
        }
    }

    pub fn length_bins(&self) -> Result<LengthBins> {
        let mut b = LengthBins::new(self.bin_width)?;
        b.open_from = self.open_bin_from;
        Ok(b)
    }

    pub fn group(&self) -> GroupBy {
        GroupBy::parse(&self.group_by).expect("validated on set")
    }

    /// Requested suite tables, and whether they were named explicitly.
    pub fn suite_tables(&self) -> Result<(Vec<SuiteTable>, bool)> {
        if self.tables == "all" {
            return Ok((SuiteTable::ALL.to_vec(), false));
        }
        let t = self
            .tables
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<SuiteTable>().map_err(|e| usage(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok((t, true))
    }

    /// Series columns to replace by their natural log before analysis.
    pub fn log_columns(&self) -> impl Iterator<Item = &str> {
        self.log_columns.split(',').map(str::trim).filter(|s| !s.is_empty())
    }

    pub fn suite_options(&self) -> SuiteOptions {
        SuiteOptions {
            policy: self.interaction,
            inequality_from: self.inequality_from,
            long_record_from: self.long_record_from,
            mood_from: self.mood_from,
            patents_from: self.patents_from,
            long_pol_lag: self.long_pol_lag,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_round_trips() {
        let mut c = RunConfig::default();
        c.set("dim", "50").unwrap();
        c.set("hac_bandwidth", "3").unwrap();
        c.set("input", "a/b.jsonl").unwrap();
        c.set("interaction", "always").unwrap();
        let mut d = RunConfig::default();
        d.apply_text(&c.render(), "rendered").unwrap();
        assert_eq!(c, d);
        assert_eq!(c.hash(), d.hash());
    }

    #[test]
    fn every_key_is_settable() {
        let c = RunConfig::default();
        for k in RunConfig::KEYS {
            let mut d = RunConfig::default();
            d.set(k, &c.get(k)).unwrap();
            assert_eq!(c, d, "{k}");
        }
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        let mut c = RunConfig::default();
        let e = c.apply_text("# comment\ndim = 10\nwindow = x\n", "run.conf").unwrap_err();
        assert!(e.to_string().contains("run.conf:3"), "{e}");
        assert_eq!(e.exit_code(), 1);
        assert!(c.apply_text("bogus = 1", "f").is_err());
        assert!(c.apply_text("no equals sign", "f").is_err());
    }

    #[test]
    fn dashes_in_file_keys_are_accepted() {
        let mut c = RunConfig::default();
        c.apply_text("n-boot = 20\nemit-plot-data = yes", "f").unwrap();
        assert_eq!(c.n_boot, 20);
        assert!(c.emit_plot_data);
    }

    #[test]
    fn table_list_is_validated() {
        let mut c = RunConfig::default();
        c.set("tables", "emi-pol,inequality").unwrap();
        assert_eq!(c.suite_tables().unwrap().0.len(), 2);
        assert!(c.set("tables", "nonsense").is_err());
    }
}
