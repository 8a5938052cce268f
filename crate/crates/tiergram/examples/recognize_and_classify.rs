//! Membership recognition across the three tiers, including the
//! cross-serial strings only the context-sensitive grammar accepts.
//!
//! Run with: cargo run --example recognize_and_classify

use tiergram::grammar::Grammar;
use tiergram::recognizer::{classify, recognize, tokenize, SearchBudget};

fn main() {
    let grammars = Grammar::bundled_all();
    let budget = SearchBudget::default();

    let samples = [
        "The defective items chase a blueberry and a person or an intricate lion.",
        "The dogs which chase Lagrange who moves Euler who falls find the trees that believe in the fair theorems.",
        "A book the hat conjectures sleep proves inspects.",
        "Kolmogorov to the lion the fair equations quickly wanders fairly write happily see a hat.",
        "the dog chase",
        "chased dog the",
    ];

    for line in samples {
        let tokens = tokenize(line);
        let c = classify(&grammars, &tokens, budget);
        println!("{line}");
        println!(
            "  accepted by: {:?}{}",
            c.accepted,
            if c.unknown.is_empty() {
                String::new()
            } else {
                format!("  (budget-exhausted: {:?})", c.unknown)
            }
        );
        for g in &grammars {
            let r = recognize(g, &tokens, budget);
            println!(
                "  {:>3}: {} ({} nodes, {} ms)",
                g.id,
                r.verdict,
                r.cost.nodes_explored,
                r.cost.elapsed.as_millis()
            );
        }
        println!();
    }
}
