//! Membership search for the context-sensitive grammar: memoized
//! breadth-first derivation search over sentential forms.
//!
//! States are leftmost-normalized: a form is (matched prefix length k,
//! remaining symbol suffix). Terminals at the suffix head are consumed
//! against the tokens immediately, so a state's terminal prefix always
//! matches the input. Rules apply at the leftmost nonterminal; the context
//! rule applies when its two-symbol lhs heads the suffix, which is complete
//! for this grammar because single-symbol expansions at disjoint positions
//! commute. Pruning is by per-symbol minimum terminal length and by an
//! LBA-style cap on the form length derived from the erasable whitelist.

use crate::grammar::Grammar;
use crate::symbol::SymbolId;
use crate::trace::{DerivationTrace, TraceStep};
use std::collections::{HashMap, VecDeque};

/// Bounds for the derivation search.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_nodes: u64,
    /// Slack added to the form-length bound; computed from the erasable
    /// whitelist and capped at 8.
    pub max_erasures: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 5_000_000,
            max_erasures: 8,
        }
    }
}

/// Static bound on how many erasable symbols a reachable sentential form can
/// carry at once, capped at `cap`. Recursion through rules that re-introduce
/// erasable symbols makes the true bound unbounded, so the cap binds there.
pub fn max_erasures(g: &Grammar, cap: usize) -> usize {
    let erasable: Vec<SymbolId> = g
        .symbols()
        .map(|(id, _)| id)
        .filter(|&s| g.is_erasable(s))
        .collect();
    if erasable.is_empty() {
        return 0;
    }
    // A symbol's derivations can stack erasables without bound iff some rule
    // reachable from it introduces an erasable alongside recursion; detecting
    // that precisely buys little, so anything recursive gets the cap.
    let recursive = g.rules().iter().any(|r| {
        r.alternatives
            .iter()
            .any(|alt| alt.iter().any(|s| r.lhs.contains(s)))
    });
    if recursive {
        cap
    } else {
        erasable.len().min(cap)
    }
}

/// Per-symbol minimum achievable terminal length (lexical classes = 1,
/// erasable paths = 0), by fixed point over single-lhs rules.
pub fn min_terminal_lengths(g: &Grammar) -> Vec<usize> {
    const INF: usize = usize::MAX / 4;
    let mut min_len = vec![INF; g.symbol_count()];
    for (id, _) in g.symbols() {
        if g.is_lexical(id) {
            min_len[id.index()] = 1;
        }
    }
    loop {
        let mut changed = false;
        for rule in g.rules() {
            if rule.lhs.len() != 1 {
                continue;
            }
            let lhs = rule.lhs[0];
            let best = rule
                .alternatives
                .iter()
                .map(|alt| alt.iter().map(|s| min_len[s.index()]).sum::<usize>())
                .min()
                .unwrap_or(INF);
            if best < min_len[lhs.index()] {
                min_len[lhs.index()] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    min_len
}

pub enum SearchOutcome {
    Accept(DerivationTrace),
    Reject,
    Unknown,
}

pub struct SearchStats {
    pub nodes: u64,
    pub max_frontier: u64,
}

struct StateInfo {
    parent: usize,
    /// Rule applied to reach this state from parent, as a trace step.
    step: Option<TraceStep>,
}

/// Breadth-first derivation search. Sound always; complete within budget.
pub fn search(
    g: &Grammar,
    tokens: &[String],
    budget: SearchBudget,
) -> (SearchOutcome, SearchStats) {
    let n = tokens.len();
    let min_len = min_terminal_lengths(g);
    let mut stats = SearchStats {
        nodes: 0,
        max_frontier: 0,
    };

    // Token -> matching lexical classes, precomputed.
    let token_classes: Vec<Vec<SymbolId>> =
        tokens.iter().map(|t| g.classes_of_word(t)).collect();

    type StateKey = (usize, Vec<SymbolId>);
    let mut infos: Vec<StateInfo> = Vec::new();
    let mut index_of: HashMap<StateKey, usize> = HashMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut keys: Vec<StateKey> = Vec::new();

    let root = (0usize, vec![g.start]);
    index_of.insert(root.clone(), 0);
    keys.push(root);
    infos.push(StateInfo {
        parent: usize::MAX,
        step: None,
    });
    queue.push_back(0);

    // Consume lexical symbols at the suffix head against the tokens.
    // Returns None if a class fails to match (dead branch) or the form
    // overruns the input.
    let consume = |mut k: usize, suffix: &mut Vec<SymbolId>| -> Option<usize> {
        while let Some(&head) = suffix.first() {
            if !g.is_lexical(head) {
                break;
            }
            if k >= n || !token_classes[k].contains(&head) {
                return None;
            }
            suffix.remove(0);
            k += 1;
        }
        Some(k)
    };

    let viable = |k: usize, suffix: &[SymbolId]| -> bool {
        let rest = n.saturating_sub(k);
        if suffix.len() > rest + budget.max_erasures {
            return false;
        }
        let need: usize = suffix.iter().map(|s| min_len[s.index()]).sum();
        need <= rest
    };

    while let Some(state) = queue.pop_front() {
        stats.nodes += 1;
        if stats.nodes > budget.max_nodes {
            return (SearchOutcome::Unknown, stats);
        }
        stats.max_frontier = stats.max_frontier.max(queue.len() as u64);
        let (k, suffix) = keys[state].clone();

        if suffix.is_empty() {
            if k == n {
                let trace = rebuild_trace(&infos, state);
                return (SearchOutcome::Accept(trace), stats);
            }
            continue;
        }

        let mut successors: Vec<(TraceStep, Vec<SymbolId>)> = Vec::new();
        let head = suffix[0];

        // Context rule at the suffix head.
        if suffix.len() >= 2 {
            let pair = &suffix[0..2];
            if let Some(prod) = g.production_for(pair) {
                for (ai, alt) in prod.alternatives.iter().enumerate() {
                    let mut next = alt.clone();
                    next.extend_from_slice(&suffix[2..]);
                    successors.push((
                        TraceStep {
                            position: k,
                            lhs: pair.to_vec(),
                            rhs: alt.clone(),
                            alternative: Some(ai),
                            forced: false,
                        },
                        next,
                    ));
                }
            }
        }

        // Single-symbol expansion of the leftmost nonterminal.
        if let Some(prod) = g.production_for(&[head]) {
            for (ai, alt) in prod.alternatives.iter().enumerate() {
                let mut next = alt.clone();
                next.extend_from_slice(&suffix[1..]);
                successors.push((
                    TraceStep {
                        position: k,
                        lhs: vec![head],
                        rhs: alt.clone(),
                        alternative: Some(ai),
                        forced: false,
                    },
                    next,
                ));
            }
        }

        for (step, mut next_suffix) in successors {
            let next_k = match consume(k, &mut next_suffix) {
                Some(v) => v,
                None => continue,
            };
            if next_k == n && next_suffix.is_empty() {
                // Accepting state; record and finish.
                let idx = infos.len();
                infos.push(StateInfo {
                    parent: state,
                    step: Some(step),
                });
                let trace = rebuild_trace(&infos, idx);
                return (SearchOutcome::Accept(trace), stats);
            }
            if !viable(next_k, &next_suffix) {
                continue;
            }
            let key = (next_k, next_suffix);
            if index_of.contains_key(&key) {
                continue;
            }
            let idx = infos.len();
            index_of.insert(key.clone(), idx);
            keys.push(key);
            infos.push(StateInfo {
                parent: state,
                step: Some(step),
            });
            queue.push_back(idx);
        }
    }
    (SearchOutcome::Reject, stats)
}

fn rebuild_trace(infos: &[StateInfo], mut state: usize) -> DerivationTrace {
    let mut steps = Vec::new();
    while state != 0 && state != usize::MAX {
        if let Some(step) = &infos[state].step {
            steps.push(step.clone());
        }
        state = infos[state].parent;
    }
    steps.reverse();
    DerivationTrace { steps }
}
