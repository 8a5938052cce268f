//! Grammar-tier toolkit: three bundled formal grammars (context-free,
//! indexed, context-sensitive) over a shared English lexicon, with
//! stochastic sentence generation, selection filters, language-membership
//! recognition, an LM acceptability benchmark harness, acceptance
//! statistics, and a small competitive-learning / sequence-chaining demo.
//!
//! Start with the runnable examples under `examples/`; the `tiergram` binary
//! exposes the same capabilities as subcommands.

pub mod bench;
pub mod cli;
pub mod config;
pub mod generator;
pub mod grammar;
pub mod recognizer;
pub mod selector;
pub mod stats;
pub mod symbol;
pub mod thalamo;
pub mod trace;
