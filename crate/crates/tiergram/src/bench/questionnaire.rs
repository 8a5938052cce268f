//! Human questionnaire export: 75 sentences (25 per grammar) in seeded
//! shuffled order with a Yes/No choice each, plus a separate answer key
//! mapping positions back to grammars.

use crate::generator::Sentence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const HUMAN_INSTRUCTION: &str = "Disregarding any lack of punctuation or sensicality, please answer the following: Is the sentence grammatically complete?";

#[derive(Debug, Error)]
pub enum QuestionnaireError {
    #[error("expected exactly 25 sentences per grammar, found {found} for `{grammar}`")]
    CountMismatch { grammar: String, found: usize },
    #[error("expected exactly 3 grammars, found {0}")]
    GrammarCount(usize),
}

/// Build the printable form and its answer key. Deterministic in
/// (sentences, seed): same inputs give byte-identical output.
pub fn export_questionnaire(
    sentences: &[Sentence],
    seed: u64,
) -> Result<(String, String), QuestionnaireError> {
    let mut by_grammar: std::collections::BTreeMap<&str, usize> = Default::default();
    for s in sentences {
        *by_grammar.entry(&s.provenance.grammar_id).or_insert(0) += 1;
    }
    if by_grammar.len() != 3 {
        return Err(QuestionnaireError::GrammarCount(by_grammar.len()));
    }
    for (grammar, count) in &by_grammar {
        if *count != 25 {
            return Err(QuestionnaireError::CountMismatch {
                grammar: grammar.to_string(),
                found: *count,
            });
        }
    }

    let mut order: Vec<usize> = (0..sentences.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Fisher-Yates.
    for i in (1..order.len()).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }

    let mut form = String::new();
    form.push_str(HUMAN_INSTRUCTION);
    form.push_str("\n\n");
    let mut key = String::from("position,grammar,sentence\n");
    for (pos, &idx) in order.iter().enumerate() {
        let s = &sentences[idx];
        form.push_str(&format!("{}. {}\n   Yes / No\n\n", pos + 1, s.text()));
        key.push_str(&format!(
            "{},{},{}\n",
            pos + 1,
            s.provenance.grammar_id,
            s.text()
        ));
    }
    Ok((form, key))
}
