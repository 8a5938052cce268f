//! Forced terminal expansion: the per-tier branch tables that rewrite every
//! remaining symbol along the most direct agreement-preserving path to
//! lexical classes once the expansion or depth caps are hit.
//!
//! Branch shapes and probability thresholds (the 0.75/0.5 noun-phrase split,
//! the 0.67 adjective split) follow the production tables. Two guards:
//!
//! - `(*)` (IXG): when a forced noun-phrase draw would insert a determiner
//!   directly after an existing determiner, the insertion is skipped and the
//!   symbol is re-drawn on the next sweep.
//! - `(**)` (IXG and CSG): when the symbol directly after the one being
//!   rewritten is a verb phrase, that verb phrase is rewritten first so that
//!   number agreement is fixed before further rewrites lose track of it.

use crate::grammar::{Grammar, Tier};
use crate::symbol::SymbolId;
use crate::trace::TraceStep;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ForcedError {
    #[error("symbol `{0}` has no forced-expansion mapping for tier {1}")]
    UnknownSymbol(String, Tier),
    #[error("forced expansion did not converge (guard kept skipping)")]
    NoConvergence,
}

/// Symbol names resolved once per grammar.
struct Names {
    det_sg: Option<SymbolId>,
    det_pl: Option<SymbolId>,
    n_sg: Option<SymbolId>,
    n_pl: Option<SymbolId>,
    pn_sg: Option<SymbolId>,
    adj: Option<SymbolId>,
    v_sg: Option<SymbolId>,
    v_pl: Option<SymbolId>,
    adv: Option<SymbolId>,
    p: Option<SymbolId>,
    conj: Option<SymbolId>,
    rel: Option<SymbolId>,
}

impl Names {
    fn of(g: &Grammar) -> Names {
        Names {
            det_sg: g.symbol_named("Det_sg"),
            det_pl: g.symbol_named("Det_pl"),
            n_sg: g.symbol_named("N_sg"),
            n_pl: g.symbol_named("N_pl"),
            pn_sg: g.symbol_named("ProperNoun_sg"),
            adj: g.symbol_named("Adj"),
            v_sg: g.symbol_named("V_sg"),
            v_pl: g.symbol_named("V_pl"),
            adv: g.symbol_named("Adv"),
            p: g.symbol_named("P"),
            conj: g.symbol_named("Conj"),
            rel: g.symbol_named("RelPronoun"),
        }
    }
}

fn req(s: Option<SymbolId>) -> SymbolId {
    s.expect("forced table references a lexical class missing from the grammar")
}

/// Rewrite `tail` (the remaining symbols of the current frame) to lexical
/// classes only. `base_position` is the global form position of `tail[0]`;
/// `prev` is the symbol immediately before `tail` in the global form, used
/// by the `(*)` determiner guard. Steps are recorded with `forced = true`.
pub fn forced_expand(
    g: &Grammar,
    tier: Tier,
    tail: Vec<SymbolId>,
    prev: Option<SymbolId>,
    rng: &mut ChaCha8Rng,
    steps: &mut Vec<TraceStep>,
    base_position: usize,
) -> Result<Vec<SymbolId>, ForcedError> {
    let names = Names::of(g);
    let mut symbols = tail;
    let mut sweeps = 0usize;
    loop {
        let pending = symbols.iter().position(|&s| !g.is_lexical(s));
        let idx = match pending {
            None => return Ok(symbols),
            Some(i) => i,
        };
        sweeps += 1;
        if sweeps > 4096 {
            return Err(ForcedError::NoConvergence);
        }
        rewrite_at(
            g,
            tier,
            &names,
            &mut symbols,
            idx,
            prev,
            rng,
            steps,
            base_position,
        )?;
    }
}

#[allow(clippy::too_many_arguments)]
fn rewrite_at(
    g: &Grammar,
    tier: Tier,
    names: &Names,
    symbols: &mut Vec<SymbolId>,
    idx: usize,
    global_prev: Option<SymbolId>,
    rng: &mut ChaCha8Rng,
    steps: &mut Vec<TraceStep>,
    base_position: usize,
) -> Result<(), ForcedError> {
    let sym = symbols[idx];
    let name = g.symbol_name(sym).to_string();

    // CSG context pair left unresolved: rewrite the whole pair to a
    // number-matched chain.
    if tier == Tier::Csg
        && name == "NP_sequence"
        && symbols.get(idx + 1).map(|&s| g.symbol_name(s)) == Some("VP_placeholder")
    {
        let eps: f64 = rng.gen();
        let eps2: f64 = rng.gen();
        let rhs = if eps < 0.5 {
            if eps2 < 0.5 {
                vec![named(g, "NP_sg"), named(g, "NP_sg"), named(g, "VP_sg")]
            } else {
                vec![named(g, "NP_sg"), named(g, "NP_pl"), named(g, "VP_sg")]
            }
        } else if eps2 < 0.5 {
            vec![named(g, "NP_pl"), named(g, "NP_sg"), named(g, "VP_pl")]
        } else {
            vec![named(g, "NP_pl"), named(g, "NP_pl"), named(g, "VP_pl")]
        };
        record(steps, base_position + idx, &symbols[idx..idx + 2], &rhs);
        symbols.splice(idx..idx + 2, rhs);
        return Ok(());
    }

    // (**) look-ahead for IXG noun phrases and CSG sequences: fix the number
    // of a directly following verb phrase first (one adverb may intervene).
    let is_np_like = matches!(name.as_str(), "NP_sg" | "NP_conj_sg" | "NP_pl" | "NP_conj_pl");
    if (tier == Tier::Ixg && is_np_like) || (tier == Tier::Csg && name == "NP_sequence") {
        let mut look = idx + 1;
        if symbols.get(look).copied() == names.adv {
            look += 1;
        }
        if let Some(&next) = symbols.get(look) {
            let next_name = g.symbol_name(next);
            if next_name == "VP_sg" || next_name == "VP" {
                let rhs = vec![req(names.v_sg)];
                record(steps, base_position + look, &symbols[look..=look], &rhs);
                symbols.splice(look..=look, rhs);
            } else if next_name == "VP_pl" {
                let rhs = vec![req(names.v_pl)];
                record(steps, base_position + look, &symbols[look..=look], &rhs);
                symbols.splice(look..=look, rhs);
            }
        }
    }

    let prev_sym: Option<SymbolId> = if idx == 0 {
        global_prev
    } else {
        Some(symbols[idx - 1])
    };
    let prev_is_det =
        prev_sym.is_some() && (prev_sym == names.det_sg || prev_sym == names.det_pl);

    let rhs: Vec<SymbolId> = match name.as_str() {
        // Bare NP / VP: number drawn here.
        "NP" => {
            let eps: f64 = rng.gen();
            if eps < 0.75 {
                let eps2: f64 = rng.gen();
                if eps2 < 0.5 {
                    vec![req(names.det_sg), req(names.n_sg)]
                } else {
                    vec![req(names.det_pl), req(names.n_pl)]
                }
            } else {
                vec![req(names.pn_sg)]
            }
        }
        "VP" => {
            let eps: f64 = rng.gen();
            if eps < 0.5 {
                vec![req(names.v_sg)]
            } else {
                vec![req(names.v_pl)]
            }
        }
        // Conjunction continuations keep their leading conjunction (like the
        // VP_conj mappings below); the drawn noun phrase follows it.
        "NP_sg" | "NP_conj_sg" => {
            let eps: f64 = rng.gen();
            let mut out = if name == "NP_conj_sg" {
                vec![req(names.conj)]
            } else {
                Vec::new()
            };
            if eps < 0.67 {
                let eps2: f64 = rng.gen();
                if eps2 < 0.5 {
                    out.extend([req(names.det_sg), req(names.adj), req(names.n_sg)]);
                } else {
                    out.extend([req(names.det_sg), req(names.n_sg)]);
                }
            } else {
                out.push(req(names.pn_sg));
            }
            out
        }
        "NP_pl" | "NP_conj_pl" => {
            let eps: f64 = rng.gen();
            let mut out = if name == "NP_conj_pl" {
                vec![req(names.conj)]
            } else {
                Vec::new()
            };
            if eps < 0.5 {
                out.extend([req(names.det_pl), req(names.adj), req(names.n_pl)]);
            } else {
                out.extend([req(names.det_pl), req(names.n_pl)]);
            }
            out
        }
        "NP_sequence" => {
            let eps: f64 = rng.gen();
            if eps <= 0.5 {
                let eps2: f64 = rng.gen();
                if eps2 < 0.67 {
                    let eps3: f64 = rng.gen();
                    if eps3 < 0.5 {
                        vec![req(names.det_sg), req(names.adj), req(names.n_sg)]
                    } else {
                        vec![req(names.det_sg), req(names.n_sg)]
                    }
                } else {
                    vec![req(names.pn_sg)]
                }
            } else if prev_sym == names.n_pl {
                vec![req(names.det_pl), req(names.n_pl)]
            } else {
                vec![req(names.det_sg), req(names.n_sg)]
            }
        }
        "VP_sg" | "VP_sequence" => vec![req(names.v_sg)],
        "VP_pl" => {
            if tier == Tier::Csg {
                let eps: f64 = rng.gen();
                if eps < 0.5 {
                    vec![req(names.adv), req(names.v_pl)]
                } else {
                    vec![req(names.v_pl)]
                }
            } else {
                vec![req(names.v_pl)]
            }
        }
        "VP_conj_sg" => vec![req(names.conj), req(names.v_sg)],
        "VP_conj_pl" => vec![req(names.conj), req(names.v_pl)],
        "VP_placeholder" => Vec::new(),
        "PP" => {
            if tier == Tier::Csg {
                let eps: f64 = rng.gen();
                if eps < 0.5 {
                    vec![req(names.p), req(names.det_pl), req(names.n_pl)]
                } else {
                    vec![req(names.p), req(names.det_sg), req(names.n_sg)]
                }
            } else {
                vec![req(names.p), req(names.det_sg), req(names.n_sg)]
            }
        }
        "PP_conj" => {
            if tier == Tier::Csg {
                let eps: f64 = rng.gen();
                if eps < 0.5 {
                    vec![req(names.conj), req(names.p), req(names.det_pl), req(names.n_pl)]
                } else {
                    vec![req(names.conj), req(names.p), req(names.det_sg), req(names.n_sg)]
                }
            } else {
                vec![req(names.conj), req(names.p), req(names.det_sg), req(names.n_sg)]
            }
        }
        "RC_sg" => vec![req(names.rel), req(names.v_sg)],
        "RC_pl" => vec![req(names.rel), req(names.v_pl)],
        _ => return Err(ForcedError::UnknownSymbol(name, tier)),
    };

    // (*) guard: skip a determiner-initial insertion right after a
    // determiner. The symbol stays unexpanded and is re-drawn next sweep.
    if tier == Tier::Ixg
        && prev_is_det
        && rhs
            .first()
            .map(|&s| Some(s) == names.det_sg || Some(s) == names.det_pl)
            .unwrap_or(false)
    {
        return Ok(());
    }

    record(steps, base_position + idx, &symbols[idx..=idx], &rhs);
    symbols.splice(idx..=idx, rhs);
    Ok(())
}

fn named(g: &Grammar, name: &str) -> SymbolId {
    g.symbol_named(name)
        .expect("forced table references a symbol missing from the grammar")
}

fn record(steps: &mut Vec<TraceStep>, position: usize, lhs: &[SymbolId], rhs: &[SymbolId]) {
    steps.push(TraceStep {
        position,
        lhs: lhs.to_vec(),
        rhs: rhs.to_vec(),
        alternative: None,
        forced: true,
    });
}
