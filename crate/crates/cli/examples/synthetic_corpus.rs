//! Writes the synthetic speech corpus as JSONL to stdout.
//!
//! `cargo run -p emi-cli --example synthetic_corpus -- 500 5 > crates/cli/tests/fixtures/speeches.jsonl`

use std::io::{self, BufWriter, Write};

use emi_core::synth::speech_corpus;

fn main() -> io::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(500, |a| a.parse().expect("speech count"));
    let seed: u64 = args.next().map_or(5, |a| a.parse().expect("seed"));
    let mut out = BufWriter::new(io::stdout().lock());
    for r in speech_corpus(n, seed) {
        serde_json::to_writer(&mut out, &r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
