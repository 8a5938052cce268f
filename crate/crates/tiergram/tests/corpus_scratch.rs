//! Scratch harness used while transcribing the bundled grammars: parses the
//! published corpus and reports failures per sentence.

use tiergram::grammar::{Grammar, Tier};
use tiergram::recognizer::{self, SearchBudget, Verdict};

fn corpus(name: &str) -> Vec<Vec<String>> {
    let text = match name {
        "cfg_selected" => include_str!("data/cfg_selected.txt"),
        "cfg_generated" => include_str!("data/cfg_generated.txt"),
        "ixg_selected" => include_str!("data/ixg_selected.txt"),
        "ixg_generated" => include_str!("data/ixg_generated.txt"),
        "csg_selected" => include_str!("data/csg_selected.txt"),
        "csg_generated" => include_str!("data/csg_generated.txt"),
        _ => panic!("unknown corpus {name}"),
    };
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(recognizer::tokenize)
        .collect()
}

#[test]
#[ignore]
fn corpus_report() {
    let cfg = Grammar::load_bundled(Tier::Cfg);
    let ixg = Grammar::load_bundled(Tier::Ixg);
    let csg = Grammar::load_bundled(Tier::Csg);
    let budget = SearchBudget::default();
    let mut failures = 0;
    for (corpus_name, g) in [
        ("cfg_selected", &cfg),
        ("cfg_generated", &cfg),
        ("ixg_selected", &ixg),
        ("ixg_generated", &ixg),
        ("csg_selected", &csg),
        ("csg_generated", &csg),
    ] {
        for (i, tokens) in corpus(corpus_name).iter().enumerate() {
            let started = std::time::Instant::now();
            let r = recognizer::recognize(g, tokens, budget);
            let ms = started.elapsed().as_millis();
            if r.verdict != Verdict::Accept {
                failures += 1;
                println!(
                    "FAIL {corpus_name}[{i}] verdict={} note={:?} ({} nodes, {ms} ms): {}",
                    r.verdict,
                    r.note,
                    r.cost.nodes_explored,
                    tokens.join(" ")
                );
            } else if ms > 2000 {
                println!(
                    "SLOW {corpus_name}[{i}] {ms} ms, {} nodes",
                    r.cost.nodes_explored
                );
            }
        }
    }
    println!("total failures: {failures}");
    assert_eq!(failures, 0);
}

#[test]
#[ignore]
fn separation_report() {
    let cfg = Grammar::load_bundled(Tier::Cfg);
    let ixg = Grammar::load_bundled(Tier::Ixg);
    let mut accepts = 0;
    for corpus_name in ["csg_selected", "csg_generated"] {
        for (i, tokens) in corpus(corpus_name).iter().enumerate() {
            for g in [&cfg, &ixg] {
                let r = recognizer::recognize(g, tokens, SearchBudget::default());
                if r.verdict == Verdict::Accept {
                    accepts += 1;
                    println!(
                        "LEAK {corpus_name}[{i}] accepted by {}: {}",
                        g.id,
                        tokens.join(" ")
                    );
                }
            }
        }
    }
    println!("leaks: {accepts}");
    // Published CSG sentences are expected to fall outside both lower tiers.
    assert_eq!(accepts, 0);
}

#[test]
#[ignore]
fn junk_reject_report() {
    let cfg = Grammar::load_bundled(Tier::Cfg);
    let ixg = Grammar::load_bundled(Tier::Ixg);
    let csg = Grammar::load_bundled(Tier::Csg);
    let junk = [
        "",
        "the",
        "dog the",
        gibberish(),
        "The dog the dog chases",
        "chases the dog",
        "the dog chase",  // number mismatch at S for ixg
    ];
    for line in junk {
        let tokens = recognizer::tokenize(line);
        for g in [&cfg, &ixg, &csg] {
            let r = recognizer::recognize(g, &tokens, SearchBudget::default());
            println!("{:>3} [{}] {:?}", r.verdict.to_string(), g.id, line);
        }
    }
}

fn gibberish() -> &'static str {
    "blorp zing quux"
}

#[test]
#[ignore]
fn roundtrip_smoke() {
    use tiergram::generator::{generate, GenConfig};
    for tier in [Tier::Cfg, Tier::Ixg, Tier::Csg] {
        let g = Grammar::load_bundled(tier);
        let mut fails = 0;
        let mut lens = Vec::new();
        for seed in 0..200u64 {
            let s = match generate(&g, &GenConfig::for_tier(tier, seed)) {
                Ok(s) => s,
                Err(e) => {
                    println!("genfail {tier} seed {seed}: {e}");
                    continue;
                }
            };
            lens.push(s.tokens.len());
            let r = recognizer::recognize(&g, &s.tokens, SearchBudget::default());
            if r.verdict != Verdict::Accept {
                fails += 1;
                if fails < 8 {
                    println!("RT-FAIL {tier} seed {seed} ({}): {}", r.verdict, s.text());
                }
            }
        }
        lens.sort_unstable();
        println!(
            "{tier}: fails={fails}/200 len p50={} p95={} max={}",
            lens[lens.len() / 2],
            lens[lens.len() * 95 / 100],
            lens.last().unwrap()
        );
    }
}

#[test]
#[ignore]
fn pipeline_smoke() {
    use tiergram::generator::GenConfig;
    use tiergram::selector::batch_select;
    let cfgg = Grammar::load_bundled(Tier::Cfg);
    let ixg = Grammar::load_bundled(Tier::Ixg);
    let csg = Grammar::load_bundled(Tier::Csg);
    for g in [&cfgg, &ixg, &csg] {
        let started = std::time::Instant::now();
        let cfg = GenConfig::for_tier(g.tier, 7);
        let out = batch_select(g, &cfg, 50, 1_000_000).unwrap();
        println!(
            "{}: 50 kept in {} attempts ({} ms)",
            g.id,
            out.attempts,
            started.elapsed().as_millis()
        );
        if g.tier == Tier::Csg {
            let mut leaks = 0;
            for s in &out.sentences {
                for lower in [&cfgg, &ixg] {
                    let r = recognizer::recognize(lower, &s.tokens, SearchBudget::default());
                    if r.verdict == Verdict::Accept {
                        leaks += 1;
                        println!("LEAK [{}]: {}", lower.id, s.text());
                    }
                }
            }
            println!("csg leaks into lower tiers: {leaks}");
            assert_eq!(leaks, 0);
        }
        for s in out.sentences.iter().take(3) {
            println!("  e.g. {}", s.text());
        }
    }
}

#[test]
#[ignore]
fn oracle_smoke() {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;
    use tiergram::grammar::{Lexicon, BUNDLED_CFG, BUNDLED_CSG, BUNDLED_IXG};
    use tiergram::recognizer::enumerate_language;

    let mini = Arc::new(
        Lexicon::parse(
            "lexicon mini\nDet_sg: the a\nDet_pl: the\nN_sg: dog\nN_pl: dogs\nProperNoun_sg: Euclid\nAdj: quick\nV_sg: sees\nV_pl: see\nAdv: quickly\nP: of\nConj: and\nRelPronoun: who\n",
        )
        .unwrap(),
    );
    let vocab = [
        "the", "a", "an", "dog", "dogs", "Euclid", "quick", "sees", "see", "quickly", "of",
        "and", "who",
    ];
    for text in [BUNDLED_CFG, BUNDLED_IXG, BUNDLED_CSG] {
        let g = Grammar::load(text, mini.clone()).unwrap();
        let started = std::time::Instant::now();
        let table = enumerate_language(&g, 8).unwrap();
        println!(
            "{}: language table {} strings, {} forms, {} ms",
            g.id,
            table.len(),
            table.forms_explored,
            started.elapsed().as_millis()
        );
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut checked = 0u64;
        let mut accepts = 0u64;
        let mut mismatches = 0u64;
        let started = std::time::Instant::now();
        for _ in 0..12_000 {
            let len = rng.gen_range(0..=8usize);
            let tokens: Vec<String> = (0..len)
                .map(|_| vocab[rng.gen_range(0..vocab.len())].to_string())
                .collect();
            let oracle = table.contains_tokens(&g, &tokens);
            let r = recognizer::recognize(&g, &tokens, SearchBudget::default());
            let mine = r.verdict == Verdict::Accept;
            if r.verdict == Verdict::Unknown {
                println!("UNKNOWN on: {:?}", tokens);
            }
            checked += 1;
            if oracle {
                accepts += 1;
            }
            if mine != oracle {
                mismatches += 1;
                if mismatches < 10 {
                    println!("MISMATCH [{}] oracle={} mine={}: {:?}", g.id, oracle, mine, tokens);
                }
            }
        }
        println!(
            "{}: {} checked, {} oracle-accepts, {} mismatches, {} ms",
            g.id,
            checked,
            accepts,
            mismatches,
            started.elapsed().as_millis()
        );
        assert_eq!(mismatches, 0);
    }
}

#[test]
#[ignore]
fn enum_probe() {
    use std::sync::Arc;
    use tiergram::grammar::{Lexicon, BUNDLED_CFG, BUNDLED_CSG, BUNDLED_IXG};
    use tiergram::recognizer::enumerate_language;
    let mini = Arc::new(
        Lexicon::parse(
            "lexicon mini\nDet_sg: the a\nDet_pl: the\nN_sg: dog\nN_pl: dogs\nProperNoun_sg: Euclid\nAdj: quick\nV_sg: sees\nV_pl: see\nAdv: quickly\nP: of\nConj: and\nRelPronoun: who\n",
        )
        .unwrap(),
    );
    for text in [BUNDLED_CFG, BUNDLED_IXG, BUNDLED_CSG] {
        let g = Grammar::load(text, mini.clone()).unwrap();
        for cap in [4usize, 6, 8] {
            let t = std::time::Instant::now();
            match enumerate_language(&g, cap) {
                Ok(tab) => println!(
                    "{} cap {}: {} strings / {} forms / {} ms",
                    g.id,
                    cap,
                    tab.len(),
                    tab.forms_explored,
                    t.elapsed().as_millis()
                ),
                Err(e) => println!("{} cap {}: {e} ({} ms)", g.id, cap, t.elapsed().as_millis()),
            }
        }
    }
}

#[test]
#[ignore]
fn thalamo_cluster_probe() {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use tiergram::thalamo::CategoryBank;

    // Three tight spherical clusters in orthogonal directions; dot-product
    // competition separates these cleanly. Declared radius 1.0 (gaussian
    // noise sigma 0.2, i.e. 5-sigma radius).
    let radius = 1.0;
    let sigma = 0.2;
    let centers = [[5.0f64, 0.0, 0.0], [0.0, 5.0, 0.0], [0.0, 0.0, 5.0]];
    let gauss = |rng: &mut ChaCha8Rng| -> f64 {
        // Box-Muller.
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut passes = Vec::new();
    for seed in 0..40u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC1A5);
        let mut data = Vec::new();
        for c in &centers {
            for _ in 0..100 {
                data.push(vec![
                    c[0] + sigma * gauss(&mut rng),
                    c[1] + sigma * gauss(&mut rng),
                    c[2] + sigma * gauss(&mut rng),
                ]);
            }
        }
        let mut bank = CategoryBank::init_from_bounding_box(&data, 3, 0.1, seed).unwrap();
        for _ in 0..100 {
            for x in &data {
                bank.core_step(x).unwrap();
            }
        }
        let mut centroids = vec![vec![0.0; 3]; 3];
        for (i, x) in data.iter().enumerate() {
            let c = i / 100;
            for d in 0..3 {
                centroids[c][d] += x[d] / 100.0;
            }
        }
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut worst = f64::INFINITY;
        for perm in perms {
            let mut w: f64 = 0.0;
            for (row, &cid) in perm.iter().enumerate() {
                let d: f64 = bank.rows()[row]
                    .iter()
                    .zip(&centroids[cid])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
                    / radius;
                w = w.max(d);
            }
            worst = worst.min(w);
        }
        if worst <= 0.1 {
            passes.push((seed, worst));
        }
        println!("seed {seed}: worst {worst:.4} {}", if worst <= 0.1 { "PASS" } else { "" });
    }
    println!("passing seeds: {passes:?}");
}

#[test]
#[ignore]
fn thalamo_toy_grammar_probe() {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;
    use tiergram::thalamo::{nested_demo, DemoOptions};

    // Toy grammar: S -> NP VP, NP -> (N)|(ADJ N), VP -> (V)|(V ADV).
    let n = ["time", "dogs", "ideas"];
    let v = ["passed", "jump", "slept"];
    let adj = ["happy", "his", "green"];
    let adv = ["quickly", "furiously"];
    let class_of = |w: &str| -> usize {
        if n.contains(&w) { 0 } else if v.contains(&w) { 1 } else if adj.contains(&w) { 2 } else { 3 }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut stream: Vec<String> = Vec::new();
    for _ in 0..60 {
        if rng.gen_bool(0.5) {
            stream.push(adj[rng.gen_range(0..3)].into());
        }
        stream.push(n[rng.gen_range(0..3)].into());
        stream.push(v[rng.gen_range(0..3)].into());
        if rng.gen_bool(0.5) {
            stream.push(adv[rng.gen_range(0..2)].into());
        }
    }
    // One-hot class embeddings.
    let mut embeddings: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for w in n.iter().chain(&v).chain(&adj).chain(&adv) {
        let mut e = vec![0.0; 4];
        e[class_of(w)] = 1.0;
        embeddings.insert(w.to_string(), e);
    }
    for seed in 0..20u64 {
        let demo = nested_demo(
            &stream,
            &embeddings,
            &DemoOptions { prototypes: 4, learning_rate: 0.1, epochs: 100, seed, embedding_dim: 4 },
        )
        .unwrap();
        // Categories must separate the 4 word classes exactly.
        let mut class_to_cat: BTreeMap<usize, std::collections::BTreeSet<u32>> = BTreeMap::new();
        for (tok, cat) in &demo.assignments {
            class_to_cat.entry(class_of(tok)).or_default().insert(*cat);
        }
        let pure = class_to_cat.values().all(|s| s.len() == 1);
        let distinct: std::collections::BTreeSet<u32> =
            class_to_cat.values().flatten().copied().collect();
        let exact = pure && distinct.len() == 4;
        // N -> V transition present?
        let n_cat = demo.assignments.iter().find(|(t, _)| t == "time").map(|(_, c)| *c);
        let v_cat = demo.assignments.iter().find(|(t, _)| t == "passed").map(|(_, c)| *c);
        let nv = match (n_cat, v_cat) {
            (Some(nc), Some(vc)) => demo.memory.weights().contains_key(&(nc, vc)),
            _ => false,
        };
        println!("seed {seed}: exact-classes={exact} n->v={nv}");
    }
}
