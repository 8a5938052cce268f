//! Acceptance statistics: per-sentence rates from trial records, aggregated
//! means with standard errors per (model, grammar) and per question, and the
//! CSV / markdown exports.
//!
//! Standard error is computed across per-sentence (or per-participant)
//! rates: sample standard deviation (n-1 denominator) divided by sqrt(n).
//! Unparseable and failed trials never enter rates; their counts are
//! first-class columns.

use crate::bench::TrialRecord;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("no parseable records in group `{0}`")]
    NoParseableRecords(String),
    #[error("empty group `{0}`")]
    EmptyGroup(String),
    #[error("store is empty")]
    EmptyStore,
    #[error("io error at {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("malformed csv at line {0}")]
    MalformedCsv(usize),
}

/// Mean acceptance and its standard error for one group.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceStat {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Fraction of accepted among parseable trials for one (model, sentence).
pub fn per_sentence_rate(records: &[&TrialRecord]) -> Result<f64, StatsError> {
    let parseable: Vec<bool> = records.iter().filter_map(|r| r.accepted).collect();
    if parseable.is_empty() {
        let label = records
            .first()
            .map(|r| format!("{}/{}", r.model_id, r.sentence_id))
            .unwrap_or_default();
        return Err(StatsError::NoParseableRecords(label));
    }
    let yes = parseable.iter().filter(|&&b| b).count();
    Ok(yes as f64 / parseable.len() as f64)
}

/// Arithmetic mean of the rates with sample-standard-deviation / sqrt(n).
pub fn aggregate(label: &str, rates: &[f64]) -> Result<AcceptanceStat, StatsError> {
    if rates.is_empty() {
        return Err(StatsError::EmptyGroup(label.to_string()));
    }
    let n = rates.len();
    let mean = rates.iter().sum::<f64>() / n as f64;
    let stderr = if n < 2 {
        0.0
    } else {
        let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        (var / n as f64).sqrt()
    };
    Ok(AcceptanceStat { mean, stderr, n })
}

/// One stats.csv row.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGrammarRow {
    pub model: String,
    pub grammar: String,
    pub mean: f64,
    pub stderr: f64,
    pub n_sentences: usize,
    pub n_trials: usize,
    pub n_unparseable: usize,
}

/// One stats_per_question.csv row.
#[derive(Debug, Clone, PartialEq)]
pub struct PerQuestionRow {
    pub model: String,
    pub sentence_id: String,
    pub grammar: String,
    pub mean: f64,
    pub stderr: f64,
    pub n_trials: usize,
}

fn grammar_order(g: &str) -> (u8, &str) {
    match g {
        "cfg" => (0, g),
        "ixg" => (1, g),
        "csg" => (2, g),
        other => (3, other),
    }
}

/// Aggregate a record store into the two table shapes.
pub fn tabulate(
    records: &[TrialRecord],
) -> Result<(Vec<ModelGrammarRow>, Vec<PerQuestionRow>), StatsError> {
    if records.is_empty() {
        return Err(StatsError::EmptyStore);
    }
    // (model, grammar, sentence) -> records
    let mut by_sentence: BTreeMap<(String, String, String), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        by_sentence
            .entry((
                r.model_id.clone(),
                r.grammar_id.clone(),
                r.sentence_id.clone(),
            ))
            .or_default()
            .push(r);
    }

    let mut per_question = Vec::new();
    // (model, grammar) -> per-sentence rates + counters
    let mut groups: BTreeMap<(String, String), (Vec<f64>, usize, usize)> = BTreeMap::new();
    for ((model, grammar, sentence), recs) in &by_sentence {
        let rate = per_sentence_rate(recs)?;
        let usable: Vec<f64> = recs
            .iter()
            .filter_map(|r| r.accepted)
            .map(|b| if b { 1.0 } else { 0.0 })
            .collect();
        let stat = aggregate(&format!("{model}/{sentence}"), &usable)?;
        per_question.push(PerQuestionRow {
            model: model.clone(),
            sentence_id: sentence.clone(),
            grammar: grammar.clone(),
            mean: rate,
            stderr: stat.stderr,
            n_trials: usable.len(),
        });
        let entry = groups
            .entry((model.clone(), grammar.clone()))
            .or_insert((Vec::new(), 0, 0));
        entry.0.push(rate);
        entry.1 += recs.len();
        entry.2 += recs.iter().filter(|r| r.accepted.is_none()).count();
    }

    let mut rows = Vec::new();
    for ((model, grammar), (rates, n_trials, n_unparseable)) in &groups {
        let stat = aggregate(&format!("{model}/{grammar}"), rates)?;
        rows.push(ModelGrammarRow {
            model: model.clone(),
            grammar: grammar.clone(),
            mean: stat.mean,
            stderr: stat.stderr,
            n_sentences: rates.len(),
            n_trials: *n_trials,
            n_unparseable: *n_unparseable,
        });
    }
    rows.sort_by(|a, b| {
        (a.model.as_str(), grammar_order(&a.grammar))
            .cmp(&(b.model.as_str(), grammar_order(&b.grammar)))
    });
    per_question.sort_by(|a, b| {
        (
            a.model.as_str(),
            grammar_order(&a.grammar),
            a.sentence_id.as_str(),
        )
            .cmp(&(
                b.model.as_str(),
                grammar_order(&b.grammar),
                b.sentence_id.as_str(),
            ))
    });
    Ok((rows, per_question))
}

pub fn render_stats_csv(rows: &[ModelGrammarRow]) -> String {
    let mut out = String::from("model,grammar,mean,stderr,n_sentences,n_trials,n_unparseable\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.3},{:.3},{},{},{}",
            r.model, r.grammar, r.mean, r.stderr, r.n_sentences, r.n_trials, r.n_unparseable
        );
    }
    out
}

pub fn render_per_question_csv(rows: &[PerQuestionRow]) -> String {
    let mut out = String::from("model,sentence_id,grammar,mean,stderr,n_trials\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.3},{:.3},{}",
            r.model, r.sentence_id, r.grammar, r.mean, r.stderr, r.n_trials
        );
    }
    out
}

/// Markdown report: grammar tiers as rows, models as columns.
pub fn render_report(rows: &[ModelGrammarRow]) -> String {
    let mut models: Vec<&str> = rows.iter().map(|r| r.model.as_str()).collect();
    models.sort_unstable();
    models.dedup();
    let mut grammars: Vec<&str> = rows.iter().map(|r| r.grammar.as_str()).collect();
    grammars.sort_by_key(|g| grammar_order(g));
    grammars.dedup();

    let lookup: BTreeMap<(&str, &str), &ModelGrammarRow> = rows
        .iter()
        .map(|r| ((r.model.as_str(), r.grammar.as_str()), r))
        .collect();

    let mut out = String::new();
    out.push_str("# Acceptance by grammar tier\n\n");
    out.push_str(
        "Mean acceptance per (model, grammar): each cell averages per-sentence\n\
         acceptance rates; the ± value is the standard error across sentences\n\
         (sample standard deviation, n−1, divided by sqrt(n)). Unparseable and\n\
         failed trials are excluded from rates and counted separately in\n\
         stats.csv. Published tables of this shape sometimes print wider ±\n\
         envelopes (e.g. a standard deviation); comparisons should mind the\n\
         convention difference.\n\n",
    );
    fn tier_label(g: &str) -> &str {
        match g {
            "cfg" => "CFG/PDA",
            "ixg" => "IXG/HOPDA",
            "csg" => "CSG/LBA",
            other => other,
        }
    }
    out.push_str("| Grammar |");
    for m in &models {
        let _ = write!(out, " {m} |");
    }
    out.push('\n');
    out.push_str("|---|");
    for _ in &models {
        out.push_str("---|");
    }
    out.push('\n');
    for g in &grammars {
        let _ = write!(out, "| {} |", tier_label(g));
        for m in &models {
            match lookup.get(&(*m, *g)) {
                Some(r) => {
                    let _ = write!(out, " {:.3} ± {:.3} |", r.mean, r.stderr);
                }
                None => out.push_str(" — |"),
            }
        }
        out.push('\n');
    }
    out
}

/// Emit stats.csv, stats_per_question.csv, and report.md into `out_dir`.
pub fn emit_tables(records: &[TrialRecord], out_dir: &Path) -> Result<(), StatsError> {
    let (rows, per_question) = tabulate(records)?;
    fs::create_dir_all(out_dir).map_err(|e| StatsError::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let write = |name: &str, content: String| -> Result<(), StatsError> {
        let path = out_dir.join(name);
        fs::write(&path, content).map_err(|e| StatsError::Io { path, source: e })
    };
    write("stats.csv", render_stats_csv(&rows))?;
    write(
        "stats_per_question.csv",
        render_per_question_csv(&per_question),
    )?;
    write("report.md", render_report(&rows))?;
    Ok(())
}

/// Parse a stats_per_question.csv back into rows (round-trip checks).
pub fn parse_per_question_csv(text: &str) -> Result<Vec<PerQuestionRow>, StatsError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 6 {
            return Err(StatsError::MalformedCsv(i + 1));
        }
        rows.push(PerQuestionRow {
            model: parts[0].to_string(),
            sentence_id: parts[1].to_string(),
            grammar: parts[2].to_string(),
            mean: parts[3].parse().map_err(|_| StatsError::MalformedCsv(i + 1))?,
            stderr: parts[4].parse().map_err(|_| StatsError::MalformedCsv(i + 1))?,
            n_trials: parts[5].parse().map_err(|_| StatsError::MalformedCsv(i + 1))?,
        });
    }
    Ok(rows)
}

/// Parse a stats.csv back into rows (round-trip checks).
pub fn parse_stats_csv(text: &str) -> Result<Vec<ModelGrammarRow>, StatsError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 7 {
            return Err(StatsError::MalformedCsv(i + 1));
        }
        let f = |s: &str| s.parse::<f64>().map_err(|_| StatsError::MalformedCsv(i + 1));
        let u = |s: &str| s.parse::<usize>().map_err(|_| StatsError::MalformedCsv(i + 1));
        rows.push(ModelGrammarRow {
            model: parts[0].to_string(),
            grammar: parts[1].to_string(),
            mean: f(parts[2])?,
            stderr: f(parts[3])?,
            n_sentences: u(parts[4])?,
            n_trials: u(parts[5])?,
            n_unparseable: u(parts[6])?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(model: &str, sentence: &str, grammar: &str, trial: u32, accepted: Option<bool>) -> TrialRecord {
        TrialRecord {
            model_id: model.into(),
            sentence_id: sentence.into(),
            grammar_id: grammar.into(),
            trial_index: trial,
            raw_response: String::new(),
            accepted,
            failed: accepted.is_none(),
            timestamp_ms: 0,
            latency_ms: 0,
            retries: 0,
        }
    }

    #[test]
    fn rate_is_fraction_of_accepted_parseable() {
        let recs: Vec<TrialRecord> = (0..10)
            .map(|i| record("m", "s", "cfg", i, Some(i < 8)))
            .collect();
        let refs: Vec<&TrialRecord> = recs.iter().collect();
        assert_eq!(per_sentence_rate(&refs).unwrap(), 0.8);
    }

    #[test]
    fn rate_zero_of_hundred() {
        let recs: Vec<TrialRecord> = (0..100)
            .map(|i| record("m", "s", "cfg", i, Some(false)))
            .collect();
        let refs: Vec<&TrialRecord> = recs.iter().collect();
        assert_eq!(per_sentence_rate(&refs).unwrap(), 0.0);
    }

    #[test]
    fn no_parseable_records_is_an_error() {
        let recs = vec![record("m", "s", "cfg", 0, None)];
        let refs: Vec<&TrialRecord> = recs.iter().collect();
        assert!(matches!(
            per_sentence_rate(&refs),
            Err(StatsError::NoParseableRecords(_))
        ));
    }

    // Per-participant CFG acceptance rates from a published human
    // questionnaire; the final-row mean rounds to 0.95.
    const CFG_COLUMN: [f64; 10] = [0.96, 1.00, 1.00, 1.00, 1.00, 1.00, 0.96, 0.64, 0.96, 1.00];
    const CSG_COLUMN: [f64; 10] = [0.04, 0.0, 0.0, 0.0, 0.04, 0.04, 0.16, 0.32, 0.0, 0.0];

    #[test]
    fn aggregate_reproduces_published_participant_means() {
        let cfg = aggregate("cfg", &CFG_COLUMN).unwrap();
        assert!((cfg.mean - 0.952).abs() < 1e-12);
        let csg = aggregate("csg", &CSG_COLUMN).unwrap();
        assert!((csg.mean - 0.060).abs() < 1e-12);
    }

    #[test]
    fn identical_rates_have_zero_stderr() {
        let s = aggregate("g", &[0.5; 10]).unwrap();
        assert_eq!(s.mean, 0.5);
        assert_eq!(s.stderr, 0.0);
    }

    #[test]
    fn aggregate_is_permutation_invariant() {
        let mut rates = vec![0.1, 0.7, 0.3, 0.9, 0.5];
        let a = aggregate("g", &rates).unwrap();
        rates.reverse();
        let b = aggregate("g", &rates).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_group_is_an_error() {
        assert!(matches!(
            aggregate("g", &[]),
            Err(StatsError::EmptyGroup(_))
        ));
        assert!(matches!(tabulate(&[]), Err(StatsError::EmptyStore)));
    }

    #[test]
    fn constant_yes_store_gives_all_ones() {
        let mut records = Vec::new();
        for grammar in ["cfg", "ixg", "csg"] {
            for s in 0..5 {
                for t in 0..10 {
                    records.push(record(
                        "m",
                        &format!("{grammar}-{s}"),
                        grammar,
                        t,
                        Some(true),
                    ));
                }
            }
        }
        let (rows, per_q) = tabulate(&records).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_eq!(r.mean, 1.0);
            assert_eq!(r.stderr, 0.0);
            assert_eq!(r.n_sentences, 5);
            assert_eq!(r.n_trials, 50);
            assert_eq!(r.n_unparseable, 0);
        }
        assert_eq!(per_q.len(), 15);
        // Grammar tier ordering in the csv.
        let csv = render_stats_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[1].contains(",cfg,"));
        assert!(lines[2].contains(",ixg,"));
        assert!(lines[3].contains(",csg,"));
    }

    #[test]
    fn csv_round_trip_reaggregates_identically() {
        let mut records = Vec::new();
        for s in 0..4 {
            for t in 0..8 {
                // Rates in eighths render exactly at 3 decimals.
                let accepted = t < 2 * (s + 1);
                records.push(record("m", &format!("s{s}"), "cfg", t, Some(accepted)));
            }
        }
        let (rows, per_q) = tabulate(&records).unwrap();
        let parsed = parse_per_question_csv(&render_per_question_csv(&per_q)).unwrap();
        let remean =
            aggregate("m/cfg", &parsed.iter().map(|r| r.mean).collect::<Vec<_>>()).unwrap();
        assert!((remean.mean - rows[0].mean).abs() < 1e-9);
        let re_rows = parse_stats_csv(&render_stats_csv(&rows)).unwrap();
        assert_eq!(re_rows.len(), rows.len());
        assert!((re_rows[0].mean - rows[0].mean).abs() < 5e-4);
        assert_eq!(re_rows[0].n_trials, rows[0].n_trials);
    }

    #[test]
    fn report_renders_tiers_as_rows() {
        let rows = vec![
            ModelGrammarRow {
                model: "m1".into(),
                grammar: "cfg".into(),
                mean: 0.9,
                stderr: 0.01,
                n_sentences: 50,
                n_trials: 5000,
                n_unparseable: 0,
            },
            ModelGrammarRow {
                model: "m1".into(),
                grammar: "csg".into(),
                mean: 0.1,
                stderr: 0.02,
                n_sentences: 50,
                n_trials: 5000,
                n_unparseable: 0,
            },
        ];
        let md = render_report(&rows);
        assert!(md.contains("| CFG/PDA | 0.900 ± 0.010 |"));
        assert!(md.contains("| CSG/LBA | 0.100 ± 0.020 |"));
    }
}
