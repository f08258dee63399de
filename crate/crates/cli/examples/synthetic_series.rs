//! Writes the synthetic session series as CSV to stdout.
//!
//! `cargo run -p emi-cli --example synthetic_series -- 3 > crates/cli/tests/fixtures/series.csv`

use emi_core::synth::session_table;

fn main() {
    let seed: u64 = std::env::args().nth(1).map_or(3, |a| a.parse().expect("seed"));
    let table = session_table(seed).expect("synthetic table");
    table.to_csv(std::io::stdout().lock()).expect("write csv");
}
