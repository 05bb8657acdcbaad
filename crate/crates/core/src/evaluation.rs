//! Precision, recall and F-measure against ground truth, and timed comparisons
//! of the measures.

use std::collections::HashSet;
use std::path::Path;

use serde::Serialize;

use crate::corpus::Corpus;
use crate::distances::Measure;
use crate::embeddings::EmbeddingTable;
use crate::pipeline::{detect_prepared, PipelineConfig, PipelineError, PreparedCorpus, StageTimings};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scores {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Compares directed `(original, revision)` pairs; a reversed pair does not
/// count as a match. Duplicates are ignored.
pub fn evaluate<A, B>(detected: &[(A, B)], truth: &[(A, B)]) -> Scores
where
    A: AsRef<str>,
    B: AsRef<str>,
{
    let set = |pairs: &[(A, B)]| -> HashSet<(String, String)> {
        pairs.iter().map(|(a, b)| (a.as_ref().to_string(), b.as_ref().to_string())).collect()
    };
    let (d, t) = (set(detected), set(truth));
    let tp = d.intersection(&t).count();
    let fp = d.len() - tp;
    let fn_ = t.len() - tp;
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    Scores { tp, fp, fn_, precision, recall, f1 }
}

/// Reads `(original_id, revision_id)` from a CSV with those header columns;
/// other columns are ignored.
pub fn read_pairs_csv(path: &Path) -> Result<Vec<(String, String)>, csv::Error> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| {
            csv::Error::from(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("{}: missing column {name:?}", path.display()),
            ))
        })
    };
    let (o, v) = (col("original_id")?, col("revision_id")?);
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok((rec[o].to_string(), rec[v].to_string()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub measure: Measure,
    pub scores: Scores,
    pub tau: Option<f64>,
    pub timings: StageTimings,
}

/// Runs detection once per measure on the same prepared corpus.
pub fn benchmark(
    corpus: &Corpus,
    table: &EmbeddingTable,
    truth: &[(String, String)],
    measures: &[Measure],
    config: &PipelineConfig,
) -> Result<Vec<BenchRow>, PipelineError> {
    let prepared = PreparedCorpus::new(corpus, table);
    measures
        .iter()
        .map(|&measure| {
            let cfg = PipelineConfig { measure, ..config.clone() };
            let det = detect_prepared(&prepared, &cfg)?;
            let found: Vec<(&str, &str)> =
                det.pairs.iter().map(|p| (p.original.as_str(), p.revision.as_str())).collect();
            let truth: Vec<(&str, &str)> = truth.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            Ok(BenchRow { measure, scores: evaluate(&found, &truth), tau: det.report.tau, timings: det.report.timings })
        })
        .collect()
}

/// `measure,precision,recall,f1,tp,fp,fn,tau,distance_seconds,total_seconds`.
pub fn comparison_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "measure",
        "precision",
        "recall",
        "f1",
        "tp",
        "fp",
        "fn",
        "tau",
        "distance_seconds",
        "total_seconds",
    ])
    .expect("in-memory write");
    for r in rows {
        let s = &r.scores;
        w.write_record([
            r.measure.as_str().to_string(),
            s.precision.to_string(),
            s.recall.to_string(),
            s.f1.to_string(),
            s.tp.to_string(),
            s.fp.to_string(),
            s.fn_.to_string(),
            r.tau.map_or(String::new(), |t| t.to_string()),
            r.timings.distance.to_string(),
            r.timings.total.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}
