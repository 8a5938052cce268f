//! Competitive categorization plus sequence chaining: categorize a toy
//! word stream (one-hot class embeddings) and learn the class transitions,
//! producing a two-level nested structure over the stream.
//!
//! Run with: cargo run --example thalamo_demo

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use tiergram::thalamo::{nested_demo, render_demo_report, DemoOptions};

fn main() {
    // A toy grammar: S -> NP VP, NP -> (N)|(ADJ N), VP -> (V)|(V ADV).
    let nouns = ["time", "dogs", "ideas"];
    let verbs = ["passed", "jump", "slept"];
    let adjectives = ["happy", "his", "green"];
    let adverbs = ["quickly", "furiously"];

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut stream: Vec<String> = Vec::new();
    for _ in 0..40 {
        if rng.gen_bool(0.5) {
            stream.push(adjectives[rng.gen_range(0..3)].into());
        }
        stream.push(nouns[rng.gen_range(0..3)].into());
        stream.push(verbs[rng.gen_range(0..3)].into());
        if rng.gen_bool(0.5) {
            stream.push(adverbs[rng.gen_range(0..2)].into());
        }
    }

    // Embed each word as the one-hot of its word class.
    let class_of = |w: &str| -> usize {
        if nouns.contains(&w) {
            0
        } else if verbs.contains(&w) {
            1
        } else if adjectives.contains(&w) {
            2
        } else {
            3
        }
    };
    let mut embeddings: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for w in nouns.iter().chain(&verbs).chain(&adjectives).chain(&adverbs) {
        let mut e = vec![0.0; 4];
        e[class_of(w)] = 1.0;
        embeddings.insert(w.to_string(), e);
    }

    let demo = nested_demo(
        &stream,
        &embeddings,
        &DemoOptions {
            prototypes: 4,
            learning_rate: 0.1,
            epochs: 100,
            seed: 0,
            embedding_dim: 4,
        },
    )
    .expect("demo runs");

    println!("{}", render_demo_report(&demo));
    println!(
        "stream prefix as categories: {:?}",
        &demo.category_sequence[..12.min(demo.category_sequence.len())]
    );
}
