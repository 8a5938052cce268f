//! Export the human questionnaire: 75 sentences (25 per grammar) in seeded
//! shuffled order, plus the answer key.
//!
//! Run with: cargo run --release --example questionnaire_export

use tiergram::bench::export_questionnaire;
use tiergram::generator::GenConfig;
use tiergram::grammar::{Grammar, Tier};
use tiergram::selector::batch_select;

fn main() {
    let mut sentences = Vec::new();
    for tier in [Tier::Cfg, Tier::Ixg, Tier::Csg] {
        let g = Grammar::load_bundled(tier);
        let outcome =
            batch_select(&g, &GenConfig::for_tier(tier, 5), 25, 2_000_000).expect("batch");
        sentences.extend(outcome.sentences);
    }
    let (form, key) = export_questionnaire(&sentences, 1).expect("export");

    let head: String = form.lines().take(12).collect::<Vec<_>>().join("\n");
    println!("--- questionnaire (first items) ---\n{head}\n...\n");
    let key_head: String = key.lines().take(6).collect::<Vec<_>>().join("\n");
    println!("--- answer key (first rows) ---\n{key_head}\n...");
}
