//! Drive generate -> select -> verify until 50 kept sentences per grammar,
//! the batch size used for benchmark sentence sets.
//!
//! Run with: cargo run --release --example select_pipeline

use tiergram::generator::GenConfig;
use tiergram::grammar::{Grammar, Tier};
use tiergram::recognizer::{self, SearchBudget, Verdict};
use tiergram::selector::batch_select;

fn main() {
    for tier in [Tier::Cfg, Tier::Ixg, Tier::Csg] {
        let g = Grammar::load_bundled(tier);
        let cfg = GenConfig::for_tier(tier, 7);
        let outcome = batch_select(&g, &cfg, 50, 2_000_000).expect("batch completes");
        let verified = outcome
            .sentences
            .iter()
            .filter(|s| {
                recognizer::recognize(&g, &s.tokens, SearchBudget::default()).verdict
                    == Verdict::Accept
            })
            .count();
        println!(
            "{}: kept 50 in {} attempts; {}/50 verified by the recognizer",
            g.id, outcome.attempts, verified
        );
        for s in outcome.sentences.iter().take(3) {
            println!("  {}", s.text());
        }
        println!();
    }
}
