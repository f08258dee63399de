//! `emi`: preprocess speeches, train embeddings, score chunks and analyze
//! the session series, one stage per subcommand.

mod artifacts;
mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches, Command};
use emi_core::data::DataDir;

use crate::commands::Context;
use crate::config::RunConfig;
use crate::error::{usage, Result};

const SUBCOMMANDS: &[(&str, &str)] = &[
    ("preprocess", "Filter and chunk a JSONL speech corpus"),
    ("train", "Train skip-gram embeddings on the chunks"),
    ("score", "Score every chunk against the two construct dictionaries"),
    ("aggregate", "Group mean EMI with bootstrap intervals"),
    ("trend", "Linear trend of session EMI from its peak onward"),
    ("validate-auc", "AUC of EMI against human labels, overall and per decade"),
    ("analyze", "Fit the lagged regression suite on a session series"),
    ("crosscorr", "Lagged cross-correlation of two series columns"),
];

fn key_help(key: &str) -> &'static str {
    match key {
        "input" => "Speech corpus JSONL (preprocess)",
        "series" => "Session series CSV with a session column (analyze, crosscorr)",
        "labels" => "CSV of chunk_id,label (validate-auc)",
        "seed" => "Random seed for training and bootstrap",
        "threads" => "Worker threads; 1 is fully deterministic, 0 uses every core",
        "min_tokens" => "Shortest speech kept, in tokens",
        "ratio_threshold" => "Minimum share of common words",
        "chunk_target" => "Chunk length in tokens",
        "chunk_min" => "Shortest trailing chunk before it is merged",
        "dim" => "Embedding dimension",
        "window" => "Maximum context window",
        "negatives" => "Negative samples per positive pair",
        "epochs" => "Training epochs",
        "min_count" => "Minimum word frequency in the vocabulary",
        "subsample" => "Frequent-word subsampling threshold",
        "alpha" => "Initial learning rate",
        "bin_width" => "Length-bin width in tokens",
        "open_bin_from" => "Length from which all chunks share one bin",
        "n_boot" => "Bootstrap replicates",
        "group_by" => "Comma-separated subset of session,party,chamber",
        "tables" => "Model tables to fit, comma-separated, or all",
        "log_columns" => "Series columns analyzed on the log scale, when present",
        "interaction" => "EMI x Pol interaction rule: literal, always or never",
        "hac_bandwidth" => "Newey-West bandwidth, or auto",
        "inequality_from" => "First session of the inequality models",
        "long_record_from" => "First session of the long inequality record",
        "mood_from" => "First session of the mood models",
        "patents_from" => "First session of the patent models",
        "long_pol_lag" => "Polarization lag of the long-lag robustness model",
        "x" => "Leading series column (crosscorr)",
        "y" => "Following series column (crosscorr)",
        "max_lag" => "Largest lag in sessions (crosscorr)",
        "level" => "Confidence level of intervals",
        "decade_start" => "First year of the decade blocks (validate-auc)",
        "emit_plot_data" => "Also write tidy CSVs for the figures",
        "progress" => "Print training progress to stderr",
        _ => "",
    }
}

fn is_flag(key: &str) -> bool {
    matches!(key, "emit_plot_data" | "progress")
}

fn cli() -> Command {
    let mut cmd = Command::new("emi")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Evidence-minus-intuition scoring and analysis pipeline")
        .after_help(
            "Settings come from defaults, then --config, then flags. \
             EMI_DATA_DIR may point at replacement dictionary and word-list files.\n\
             Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.",
        )
        .subcommand_required(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .help("key = value configuration file"),
        )
        .arg(
            Arg::new("workdir")
                .long("workdir")
                .global(true)
                .value_name("DIR")
                .default_value(".")
                .help("Directory holding every stage's inputs and outputs"),
        );
    for key in RunConfig::KEYS {
        let mut a = Arg::new(*key)
            .long(key.replace('_', "-"))
            .global(true)
            .help(key_help(key))
            .help_heading("Settings");
        if is_flag(key) {
            a = a.num_args(0..=1).default_missing_value("true").action(ArgAction::Set);
        }
        cmd = cmd.arg(a);
    }
    for (name, about) in SUBCOMMANDS {
        cmd = cmd.subcommand(Command::new(*name).about(*about));
    }
    cmd
}

fn resolve(m: &ArgMatches) -> Result<(String, Context)> {
    let (name, sub) = m.subcommand().ok_or_else(|| usage("no subcommand given"))?;
    let mut cfg = RunConfig::default();
    if let Some(path) = sub.get_one::<String>("config") {
        cfg.apply_file(path.as_ref())?;
    }
    for key in RunConfig::KEYS {
        if let Some(v) = sub.get_one::<String>(key) {
            cfg.set(key, v).map_err(|e| e.context(format!("--{}", key.replace('_', "-"))))?;
        }
    }
    let workdir = PathBuf::from(sub.get_one::<String>("workdir").expect("has default"));
    let data_dir = match std::env::var_os(commands::DATA_DIR_ENV) {
        Some(d) => DataDir::at(d),
        None => DataDir::embedded(),
    };
    Ok((
        name.to_string(),
        Context {
            cfg,
            workdir,
            data_dir,
        },
    ))
}

fn configure_threads(threads: usize) -> Result<()> {
    #[cfg(feature = "parallel")]
    if threads != 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| usage(format!("cannot start {threads} threads: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    if threads != 1 {
        log::warn!("built without the parallel feature; running single-threaded");
    }
    Ok(())
}

fn run(m: &ArgMatches) -> Result<()> {
    let (name, ctx) = resolve(m)?;
    configure_threads(ctx.cfg.threads)?;
    let result = match name.as_str() {
        "preprocess" => commands::preprocess(&ctx),
        "train" => commands::train(&ctx),
        "score" => commands::score(&ctx),
        "aggregate" => commands::aggregate_cmd(&ctx),
        "trend" => commands::trend(&ctx),
        "validate-auc" => commands::validate_auc(&ctx),
        "analyze" => commands::analyze(&ctx),
        "crosscorr" => commands::crosscorr(&ctx),
        other => Err(usage(format!("unknown subcommand {other}"))),
    };
    result.map_err(|e| e.context(&name))
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(&matches) {
        eprintln!("emi: {e}");
        std::process::exit(e.exit_code());
    }
}
