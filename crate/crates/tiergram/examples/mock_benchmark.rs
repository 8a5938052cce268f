//! End-to-end benchmark against a seeded mock endpoint: build 150 sentences
//! (50 per grammar), run trials, and print the acceptance tables.
//!
//! Run with: cargo run --release --example mock_benchmark

use tiergram::bench::{run_bench, ModelSpec, RunOptions, TrialStore};
use tiergram::generator::GenConfig;
use tiergram::grammar::{Grammar, Tier};
use tiergram::selector::batch_select;
use tiergram::stats::{render_report, render_stats_csv, tabulate};

fn main() {
    let mut sentences = Vec::new();
    for tier in [Tier::Cfg, Tier::Ixg, Tier::Csg] {
        let g = Grammar::load_bundled(tier);
        let outcome =
            batch_select(&g, &GenConfig::for_tier(tier, 42), 50, 2_000_000).expect("batch");
        sentences.extend(outcome.sentences);
    }
    println!("built {} benchmark sentences", sentences.len());

    let dir = std::env::temp_dir().join("tiergram-mock-benchmark");
    let _ = std::fs::remove_dir_all(&dir);
    let mut store = TrialStore::open(&dir).expect("store opens");

    let specs = [
        ModelSpec::mock("mock-always-yes", 1.0, 1, 10),
        ModelSpec::mock("mock-p70", 0.7, 2, 10),
        ModelSpec::mock("mock-always-no", 0.0, 3, 10),
    ];
    let models: Vec<_> = specs
        .iter()
        .map(|s| (s.clone(), s.build_provider().expect("mock provider")))
        .collect();

    let summary =
        run_bench(&models, &sentences, &mut store, &RunOptions::default()).expect("run");
    println!(
        "completed {} trials ({} failed, {} unparseable)\n",
        summary.completed, summary.failed, summary.unparseable
    );

    let records = TrialStore::read_all(&dir).expect("records");
    let (rows, _) = tabulate(&records).expect("tabulate");
    print!("{}", render_stats_csv(&rows));
    println!();
    print!("{}", render_report(&rows));
}
