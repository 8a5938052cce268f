//! Competitive categorization (core loop) and sequence-code learning
//! (matrix loop), plus a small demonstration that composes them into a
//! two-level structure: categories over tokens, transitions over categories.
//!
//! Core loop, per input x: the responder set C is the argmax of dot(x, w_j)
//! over rows (all ties included); each responder row moves toward x by the
//! learning rate; the responder mean (post-update) is subtracted from x to
//! give the residual passed on to any downstream level.
//!
//! Matrix loop, per adjacent element pair: the transition weight from the
//! previous column to the current one is potentiated by a fixed increment;
//! recall is the argmax successor, ties broken by lowest column id.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ThalamoError {
    #[error("input dimension {input} does not match weight dimension {weights}")]
    DimensionMismatch { input: usize, weights: usize },
    #[error("the category bank has no rows")]
    EmptyBank,
    #[error("token stream is empty")]
    EmptyStream,
    #[error("learning rate must be in (0, 1], got {0}")]
    BadLearningRate(f64),
}

/// Prototype rows with a shared learning rate.
#[derive(Debug, Clone)]
pub struct CategoryBank {
    w: Vec<Vec<f64>>,
    k: f64,
}

#[derive(Debug, Clone)]
pub struct CoreStepOutcome {
    /// Indices of all rows tied at the maximum response.
    pub responders: Vec<usize>,
    /// x minus the post-update responder mean.
    pub residual: Vec<f64>,
}

impl CategoryBank {
    pub fn new(rows: Vec<Vec<f64>>, k: f64) -> Result<CategoryBank, ThalamoError> {
        if rows.is_empty() {
            return Err(ThalamoError::EmptyBank);
        }
        if !(k > 0.0 && k <= 1.0) {
            return Err(ThalamoError::BadLearningRate(k));
        }
        Ok(CategoryBank { w: rows, k })
    }

    /// Rows drawn uniformly from the bounding box of `data`, with a fixed
    /// seed.
    pub fn init_from_bounding_box(
        data: &[Vec<f64>],
        rows: usize,
        k: f64,
        seed: u64,
    ) -> Result<CategoryBank, ThalamoError> {
        let dim = data.first().map(|x| x.len()).unwrap_or(0);
        if dim == 0 || rows == 0 {
            return Err(ThalamoError::EmptyBank);
        }
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for x in data {
            for d in 0..dim {
                lo[d] = lo[d].min(x[d]);
                hi[d] = hi[d].max(x[d]);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = (0..rows)
            .map(|_| {
                (0..dim)
                    .map(|d| {
                        if hi[d] > lo[d] {
                            rng.gen_range(lo[d]..=hi[d])
                        } else {
                            lo[d]
                        }
                    })
                    .collect()
            })
            .collect();
        CategoryBank::new(w, k)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w[0].len()
    }

    fn responders_of(&self, x: &[f64]) -> Vec<usize> {
        let dots: Vec<f64> = self
            .w
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        let max = dots.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        dots.iter()
            .enumerate()
            .filter(|(_, &d)| d == max)
            .map(|(i, _)| i)
            .collect()
    }

    /// Winner without weight updates (frozen inference); lowest index among
    /// ties.
    pub fn winner(&self, x: &[f64]) -> Result<usize, ThalamoError> {
        self.check_dim(x)?;
        Ok(self.responders_of(x)[0])
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), ThalamoError> {
        if x.len() != self.dim() {
            return Err(ThalamoError::DimensionMismatch {
                input: x.len(),
                weights: self.dim(),
            });
        }
        Ok(())
    }

    /// One core-loop step: identify responders, update them toward x, and
    /// return the residual against the post-update responder mean.
    pub fn core_step(&mut self, x: &[f64]) -> Result<CoreStepOutcome, ThalamoError> {
        self.check_dim(x)?;
        let responders = self.responders_of(x);
        for &j in &responders {
            for d in 0..x.len() {
                self.w[j][d] += self.k * (x[d] - self.w[j][d]);
            }
        }
        let mut mean = vec![0.0; x.len()];
        for &j in &responders {
            for d in 0..x.len() {
                mean[d] += self.w[j][d];
            }
        }
        for m in &mut mean {
            *m /= responders.len() as f64;
        }
        let residual: Vec<f64> = x.iter().zip(&mean).map(|(a, b)| a - b).collect();
        Ok(CoreStepOutcome {
            responders,
            residual,
        })
    }
}

/// Transition weights over (previous column, current column) pairs. Only
/// observed pairs carry weight.
#[derive(Debug, Clone, Default)]
pub struct SequenceMemory {
    weights: BTreeMap<(u32, u32), f64>,
    increment: f64,
}

impl SequenceMemory {
    pub fn new() -> SequenceMemory {
        SequenceMemory {
            weights: BTreeMap::new(),
            increment: 1.0,
        }
    }

    /// Potentiate the (prev -> curr) transition.
    pub fn matrix_step(&mut self, col_prev: u32, col_curr: u32) {
        *self.weights.entry((col_prev, col_curr)).or_insert(0.0) += self.increment;
    }

    /// Train on a whole sequence; a single-element sequence has no adjacent
    /// pair and leaves the memory untouched.
    pub fn train_sequence(&mut self, cols: &[u32]) {
        for pair in cols.windows(2) {
            self.matrix_step(pair[0], pair[1]);
        }
    }

    /// Argmax successor of `col_prev`; ties broken by lowest column id.
    /// None when the column has no outgoing transitions.
    pub fn recall(&self, col_prev: u32) -> Option<u32> {
        let mut best: Option<(u32, f64)> = None;
        for (&(p, c), &w) in &self.weights {
            if p != col_prev {
                continue;
            }
            match best {
                None => best = Some((c, w)),
                Some((bc, bw)) => {
                    if w > bw || (w == bw && c < bc) {
                        best = Some((c, w));
                    }
                }
            }
        }
        best.map(|(c, _)| c)
    }

    pub fn weights(&self) -> &BTreeMap<(u32, u32), f64> {
        &self.weights
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Demo output: token-level category assignments plus the learned
/// category-transition table — a right-regular approximation of the stream.
#[derive(Debug)]
pub struct NestedDemo {
    pub assignments: Vec<(String, u32)>,
    pub category_sequence: Vec<u32>,
    pub memory: SequenceMemory,
    pub bank: CategoryBank,
}

#[derive(Debug, Clone)]
pub struct DemoOptions {
    pub prototypes: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Dimension of the fixed random embedding per distinct token.
    pub embedding_dim: usize,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions {
            prototypes: 4,
            learning_rate: 0.1,
            epochs: 100,
            seed: 1,
            embedding_dim: 16,
        }
    }
}

/// Fixed random unit-ish embedding per distinct token.
pub fn random_embeddings(
    tokens: &[String],
    dim: usize,
    seed: u64,
) -> BTreeMap<String, Vec<f64>> {
    let mut distinct: Vec<&String> = tokens.iter().collect();
    distinct.sort_unstable();
    distinct.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BTreeMap::new();
    for tok in distinct {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
        out.insert(tok.clone(), v.into_iter().map(|a| a / norm).collect());
    }
    out
}

/// Two-level demo: train the core loop on (embedded) tokens, freeze it,
/// assign each token its winning category, then chain category transitions
/// with the matrix loop.
pub fn nested_demo(
    tokens: &[String],
    embeddings: &BTreeMap<String, Vec<f64>>,
    opts: &DemoOptions,
) -> Result<NestedDemo, ThalamoError> {
    if tokens.is_empty() {
        return Err(ThalamoError::EmptyStream);
    }
    let data: Vec<Vec<f64>> = tokens
        .iter()
        .map(|t| embeddings.get(t).cloned().unwrap_or_default())
        .collect();
    if data.iter().any(|v| v.is_empty()) {
        return Err(ThalamoError::EmptyBank);
    }
    let mut bank = CategoryBank::init_from_bounding_box(
        &data,
        opts.prototypes,
        opts.learning_rate,
        opts.seed,
    )?;
    for _ in 0..opts.epochs {
        for x in &data {
            bank.core_step(x)?;
        }
    }
    // Frozen level-1 assignments.
    let mut assignments = Vec::with_capacity(tokens.len());
    let mut category_sequence = Vec::with_capacity(tokens.len());
    for (tok, x) in tokens.iter().zip(&data) {
        let c = bank.winner(x)? as u32;
        assignments.push((tok.clone(), c));
        category_sequence.push(c);
    }
    // Level-2 transitions over the category sequence.
    let mut memory = SequenceMemory::new();
    memory.train_sequence(&category_sequence);
    Ok(NestedDemo {
        assignments,
        category_sequence,
        memory,
        bank,
    })
}

/// Plain-text report for the demo CLI.
pub fn render_demo_report(demo: &NestedDemo) -> String {
    let mut out = String::new();
    out.push_str("token -> category\n");
    let mut seen = std::collections::BTreeMap::new();
    for (tok, cat) in &demo.assignments {
        seen.entry(tok.clone()).or_insert(*cat);
    }
    for (tok, cat) in &seen {
        let _ = writeln!(out, "  {tok} -> C{cat}");
    }
    out.push_str("\ncategory transitions (prev -> next: weight)\n");
    for (&(p, c), &w) in demo.memory.weights() {
        let _ = writeln!(out, "  C{p} -> C{c}: {w}");
    }
    out.push_str("\nrecall table\n");
    let cats: std::collections::BTreeSet<u32> =
        demo.category_sequence.iter().copied().collect();
    for p in cats {
        match demo.memory.recall(p) {
            Some(c) => {
                let _ = writeln!(out, "  recall(C{p}) = C{c}");
            }
            None => {
                let _ = writeln!(out, "  recall(C{p}) = -");
            }
        }
    }
    out
}
