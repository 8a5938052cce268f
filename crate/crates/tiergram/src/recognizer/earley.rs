//! Earley chart parser for the single-lhs rule skeleton, with derivation
//! extraction. Complete (never "unknown") and cubic in sentence length,
//! which is ample at benchmark scale.

use crate::grammar::Grammar;
use crate::symbol::SymbolId;
use crate::trace::{DerivationTrace, TraceStep};
use std::collections::{HashMap, HashSet};

/// One compiled alternative: `lhs -> rhs` (alt = index within the production).
#[derive(Debug, Clone)]
struct Alt {
    lhs: SymbolId,
    alt: usize,
    rhs: Vec<SymbolId>,
}

pub struct Earley<'g> {
    g: &'g Grammar,
    alts: Vec<Alt>,
    alts_of: HashMap<SymbolId, Vec<usize>>,
    nullable: HashSet<SymbolId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Item {
    alt: u32,
    dot: u32,
    origin: u32,
}

#[derive(Debug, Default)]
pub struct ChartCost {
    pub items: u64,
    pub max_set: u64,
}

pub struct Recognition {
    pub accepted: bool,
    pub cost: ChartCost,
    /// completed[(sym, i)] -> sorted end positions j with sym =>* tokens[i..j]
    completed: HashMap<(SymbolId, u32), Vec<u32>>,
    n: usize,
}

impl<'g> Earley<'g> {
    /// Compile a grammar's single-symbol rules. Context (multi-lhs) rules are
    /// outside this parser's scope and are simply skipped.
    pub fn new(g: &'g Grammar) -> Earley<'g> {
        let mut alts = Vec::new();
        let mut alts_of: HashMap<SymbolId, Vec<usize>> = HashMap::new();
        for rule in g.rules() {
            if rule.lhs.len() != 1 {
                continue;
            }
            let lhs = rule.lhs[0];
            for (i, rhs) in rule.alternatives.iter().enumerate() {
                alts_of.entry(lhs).or_default().push(alts.len());
                alts.push(Alt {
                    lhs,
                    alt: i,
                    rhs: rhs.clone(),
                });
            }
        }
        // Nullable fixed point.
        let mut nullable: HashSet<SymbolId> = HashSet::new();
        loop {
            let mut changed = false;
            for a in &alts {
                if !nullable.contains(&a.lhs) && a.rhs.iter().all(|s| nullable.contains(s)) {
                    nullable.insert(a.lhs);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Earley {
            g,
            alts,
            alts_of,
            nullable,
        }
    }

    fn matches_class(&self, word: &str, class: SymbolId) -> bool {
        self.g
            .lexicon
            .word_in_class(word, self.g.symbol_name(class))
    }

    /// Run recognition over `tokens`, producing the completion table used by
    /// derivation extraction.
    pub fn recognize(&self, tokens: &[String]) -> Recognition {
        let n = tokens.len();
        let mut sets: Vec<Vec<Item>> = vec![Vec::new(); n + 1];
        let mut seen: Vec<HashSet<Item>> = vec![HashSet::new(); n + 1];
        let mut completed: HashMap<(SymbolId, u32), Vec<u32>> = HashMap::new();
        let mut cost = ChartCost::default();

        let push = |sets: &mut Vec<Vec<Item>>,
                        seen: &mut Vec<HashSet<Item>>,
                        cost: &mut ChartCost,
                        at: usize,
                        item: Item| {
            if seen[at].insert(item) {
                sets[at].push(item);
                cost.items += 1;
            }
        };

        for &alt_idx in self.alts_of.get(&self.g.start).into_iter().flatten() {
            push(
                &mut sets,
                &mut seen,
                &mut cost,
                0,
                Item {
                    alt: alt_idx as u32,
                    dot: 0,
                    origin: 0,
                },
            );
        }

        for pos in 0..=n {
            let mut cursor = 0;
            while cursor < sets[pos].len() {
                let item = sets[pos][cursor];
                cursor += 1;
                let alt = &self.alts[item.alt as usize];
                if (item.dot as usize) == alt.rhs.len() {
                    // Complete.
                    let key = (alt.lhs, item.origin);
                    let ends = completed.entry(key).or_default();
                    if !ends.contains(&(pos as u32)) {
                        ends.push(pos as u32);
                    }
                    let parents: Vec<Item> = sets[item.origin as usize]
                        .iter()
                        .filter(|p| {
                            let pa = &self.alts[p.alt as usize];
                            pa.rhs.get(p.dot as usize) == Some(&alt.lhs)
                        })
                        .copied()
                        .collect();
                    for p in parents {
                        push(
                            &mut sets,
                            &mut seen,
                            &mut cost,
                            pos,
                            Item {
                                alt: p.alt,
                                dot: p.dot + 1,
                                origin: p.origin,
                            },
                        );
                    }
                    continue;
                }
                let next = alt.rhs[item.dot as usize];
                if self.g.is_lexical(next) {
                    // Scan.
                    if pos < n && self.matches_class(&tokens[pos], next) {
                        push(
                            &mut sets,
                            &mut seen,
                            &mut cost,
                            pos + 1,
                            Item {
                                alt: item.alt,
                                dot: item.dot + 1,
                                origin: item.origin,
                            },
                        );
                    }
                } else {
                    // Predict; nullable prediction also advances the parent.
                    for &ai in self.alts_of.get(&next).into_iter().flatten() {
                        push(
                            &mut sets,
                            &mut seen,
                            &mut cost,
                            pos,
                            Item {
                                alt: ai as u32,
                                dot: 0,
                                origin: pos as u32,
                            },
                        );
                    }
                    if self.nullable.contains(&next) {
                        push(
                            &mut sets,
                            &mut seen,
                            &mut cost,
                            pos,
                            Item {
                                alt: item.alt,
                                dot: item.dot + 1,
                                origin: item.origin,
                            },
                        );
                    }
                }
            }
            cost.max_set = cost.max_set.max(sets[pos].len() as u64);
        }

        for ends in completed.values_mut() {
            ends.sort_unstable();
        }
        let accepted = completed
            .get(&(self.g.start, 0))
            .map(|ends| ends.contains(&(n as u32)))
            .unwrap_or(false);
        Recognition {
            accepted,
            cost,
            completed,
            n,
        }
    }

    /// Extract one derivation tree (first alternative, leftmost split) for
    /// the accepted input, as a leftmost derivation trace.
    pub fn derivation(&self, rec: &Recognition, tokens: &[String]) -> Option<DerivationTrace> {
        if !rec.accepted {
            return None;
        }
        let mut memo: HashMap<(SymbolId, u32, u32), Option<Tree>> = HashMap::new();
        let mut in_progress: HashSet<(SymbolId, u32, u32)> = HashSet::new();
        let tree = self.derive_sym(
            self.g.start,
            0,
            rec.n as u32,
            rec,
            tokens,
            &mut memo,
            &mut in_progress,
        )?;
        let mut steps = Vec::new();
        let mut emitted = 0usize;
        emit_steps(self.g, &tree, &mut steps, &mut emitted);
        Some(DerivationTrace { steps })
    }

    fn derive_sym(
        &self,
        sym: SymbolId,
        i: u32,
        j: u32,
        rec: &Recognition,
        tokens: &[String],
        memo: &mut HashMap<(SymbolId, u32, u32), Option<Tree>>,
        in_progress: &mut HashSet<(SymbolId, u32, u32)>,
    ) -> Option<Tree> {
        if self.g.is_lexical(sym) {
            if j == i + 1 && self.matches_class(&tokens[i as usize], sym) {
                return Some(Tree::Leaf(sym));
            }
            return None;
        }
        let key = (sym, i, j);
        if let Some(hit) = memo.get(&key) {
            return hit.clone();
        }
        if !in_progress.insert(key) {
            return None; // cycle guard: some non-cyclic derivation exists if any does
        }
        // Must be a completed constituent in the chart.
        let spans_ok = rec
            .completed
            .get(&(sym, i))
            .map(|ends| ends.contains(&j))
            .unwrap_or(false);
        let mut found = None;
        if spans_ok {
            let alt_ids = self.alts_of.get(&sym).cloned().unwrap_or_default();
            'alts: for ai in alt_ids {
                let alt = self.alts[ai].clone();
                if let Some(children) =
                    self.match_seq(&alt.rhs, 0, i, j, rec, tokens, memo, in_progress)
                {
                    found = Some(Tree::Node {
                        sym,
                        alt: alt.alt,
                        children,
                    });
                    break 'alts;
                }
            }
        }
        in_progress.remove(&key);
        memo.insert(key, found.clone());
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn match_seq(
        &self,
        rhs: &[SymbolId],
        idx: usize,
        i: u32,
        j: u32,
        rec: &Recognition,
        tokens: &[String],
        memo: &mut HashMap<(SymbolId, u32, u32), Option<Tree>>,
        in_progress: &mut HashSet<(SymbolId, u32, u32)>,
    ) -> Option<Vec<Tree>> {
        if idx == rhs.len() {
            return if i == j { Some(Vec::new()) } else { None };
        }
        let sym = rhs[idx];
        if self.g.is_lexical(sym) {
            if i < j && self.matches_class(&tokens[i as usize], sym) {
                let mut rest = self.match_seq(rhs, idx + 1, i + 1, j, rec, tokens, memo, in_progress)?;
                rest.insert(0, Tree::Leaf(sym));
                return Some(rest);
            }
            return None;
        }
        // Candidate split points: ends of completed `sym` constituents at i.
        let ends: Vec<u32> = rec
            .completed
            .get(&(sym, i))
            .map(|v| v.iter().copied().filter(|&k| k <= j).collect())
            .unwrap_or_default();
        for k in ends {
            if idx + 1 == rhs.len() && k != j {
                continue;
            }
            if let Some(tree) = self.derive_sym(sym, i, k, rec, tokens, memo, in_progress) {
                if let Some(mut rest) =
                    self.match_seq(rhs, idx + 1, k, j, rec, tokens, memo, in_progress)
                {
                    rest.insert(0, tree);
                    return Some(rest);
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone)]
enum Tree {
    Leaf(SymbolId),
    Node {
        sym: SymbolId,
        alt: usize,
        children: Vec<Tree>,
    },
}

/// Preorder walk emitting leftmost-derivation steps. `emitted` counts the
/// terminals already fixed, which is exactly the position of the leftmost
/// nonterminal in the evolving form.
fn emit_steps(g: &Grammar, tree: &Tree, steps: &mut Vec<TraceStep>, emitted: &mut usize) {
    match tree {
        Tree::Leaf(_) => {
            *emitted += 1;
        }
        Tree::Node {
            sym,
            alt,
            children,
        } => {
            let rhs: Vec<SymbolId> = children
                .iter()
                .map(|c| match c {
                    Tree::Leaf(s) => *s,
                    Tree::Node { sym, .. } => *sym,
                })
                .collect();
            steps.push(TraceStep {
                position: *emitted,
                lhs: vec![*sym],
                rhs,
                alternative: Some(*alt),
                forced: false,
            });
            for c in children {
                emit_steps(g, c, steps, emitted);
            }
        }
    }
}
