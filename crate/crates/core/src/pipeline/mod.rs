//! Revision detection: candidate pairs, two filters, a revision network and
//! its minimum branching.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::corpus::{flatten_paragraphs, Corpus};
use crate::distances::{build_doc_tree, wdtw, wted, DistanceError, DocTree, Measure, TfIdfModel, IDF_CONVENTION};
use crate::embeddings::{EmbeddingTable, VectorSequence};

mod calibrate;
mod network;

pub use calibrate::{calibrate_tau, local_maxima, smooth, Calibration, CalibrationMethod, HistogramBin};
pub use network::{build_network, min_branching, Arc, RevisionNetwork};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error("not enough data: got {got} scores, need at least {needed}")]
    InsufficientData { got: usize, needed: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("revision network contains a cycle")]
    CyclicNetwork,
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
}

/// Strong-filter cut-off: fixed, or estimated from the score histogram.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Threshold {
    #[default]
    Auto,
    Fixed(f64),
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Auto => f.write_str("auto"),
            Threshold::Fixed(t) => write!(f, "{t}"),
        }
    }
}

impl FromStr for Threshold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Threshold::Auto);
        }
        match s.parse::<f64>() {
            Ok(t) if t.is_finite() => Ok(Threshold::Fixed(t)),
            _ => Err(format!("threshold must be a finite number or \"auto\", got {s:?}")),
        }
    }
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Threshold::Auto => s.serialize_str("auto"),
            Threshold::Fixed(t) => s.serialize_f64(*t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    /// Minimum VSM similarity for a pair to reach the strong filter.
    pub weak_threshold: f64,
    pub strong_threshold: Threshold,
    pub measure: Measure,
    pub bins: usize,
    pub window: usize,
    /// Size of the initial pair set scored for threshold calibration; 0 uses
    /// every candidate pair.
    pub calibration_pairs: usize,
    pub workers: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            weak_threshold: 0.5,
            strong_threshold: Threshold::Auto,
            measure: Measure::Wdtw,
            bins: 100,
            window: 5,
            calibration_pairs: 3000,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::InvalidConfig(m));
        if !(0.0..=1.0).contains(&self.weak_threshold) {
            return bad(format!("weak threshold must be in [0, 1], got {}", self.weak_threshold));
        }
        if let Threshold::Fixed(t) = self.strong_threshold {
            if !t.is_finite() {
                return bad(format!("strong threshold must be finite, got {t}"));
            }
        }
        if self.bins < 10 {
            return bad(format!("bins must be at least 10, got {}", self.bins));
        }
        if self.window == 0 || self.window.is_multiple_of(2) {
            return bad(format!("smoothing window must be odd, got {}", self.window));
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        Ok(())
    }
}

pub fn worker_pool(workers: usize) -> Result<rayon::ThreadPool, PipelineError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| PipelineError::WorkerPool(e.to_string()))
}

/// Every `(earlier, later)` id pair with a strictly earlier timestamp, in
/// corpus order.
pub fn candidate_pairs(corpus: &Corpus) -> Vec<(String, String)> {
    let ts: Vec<i64> = corpus.documents().iter().map(|d| d.timestamp).collect();
    let docs = corpus.documents();
    candidate_indices(&ts)
        .into_iter()
        .map(|(i, j)| (docs[i as usize].id.clone(), docs[j as usize].id.clone()))
        .collect()
}

/// `ts` must be sorted ascending.
fn candidate_indices(ts: &[i64]) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut later_start = 0;
    for i in 0..ts.len() {
        while later_start < ts.len() && ts[later_start] <= ts[i] {
            later_start += 1;
        }
        out.extend((later_start..ts.len()).map(|j| (i as u32, j as u32)));
    }
    out
}

/// A corpus with everything the measures need computed once.
pub struct PreparedCorpus {
    ids: Vec<String>,
    timestamps: Vec<i64>,
    tfidf: TfIdfModel,
    units: Vec<Vec<VectorSequence>>,
    trees: Vec<DocTree>,
    skipped: Vec<String>,
}

impl PreparedCorpus {
    /// Embeds every document. Documents without any text are set aside and
    /// listed in [`skipped`](Self::skipped).
    pub fn new(corpus: &Corpus, table: &EmbeddingTable) -> Self {
        let mut ids = Vec::new();
        let mut timestamps = Vec::new();
        let mut units = Vec::new();
        let mut trees = Vec::new();
        let mut skipped = Vec::new();
        let mut kept = Vec::new();
        for doc in corpus.documents() {
            let flat = flatten_paragraphs(doc);
            if flat.is_empty() {
                log::warn!("document {} has no text; skipped", doc.id);
                skipped.push(doc.id.clone());
                continue;
            }
            ids.push(doc.id.clone());
            timestamps.push(doc.timestamp);
            units.push(flat.iter().map(|p| table.embed(p)).collect());
            trees.push(build_doc_tree(doc, table));
            kept.push(doc);
        }
        let tfidf = TfIdfModel::fit(kept.iter().map(|d| (d.id.clone(), d.tokens())));
        PreparedCorpus { ids, timestamps, tfidf, units, trees, skipped }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn skipped(&self) -> &[String] {
        &self.skipped
    }

    pub fn tfidf(&self) -> &TfIdfModel {
        &self.tfidf
    }

    pub fn candidates(&self) -> Vec<(u32, u32)> {
        candidate_indices(&self.timestamps)
    }

    /// Candidate pairs among the earliest documents: documents are added in
    /// time order, each with all its pairs to earlier ones, until `limit`
    /// pairs are collected (0 means no limit).
    pub fn initial_pairs(&self, limit: usize) -> Vec<(u32, u32)> {
        let ts = &self.timestamps;
        let mut out = Vec::new();
        let mut earlier_end = 0;
        for j in 0..ts.len() {
            while ts[earlier_end] < ts[j] {
                earlier_end += 1;
            }
            for i in 0..earlier_end {
                if limit > 0 && out.len() == limit {
                    return out;
                }
                out.push((i as u32, j as u32));
            }
        }
        out
    }

    /// Score of the pair of documents at positions `i` and `j`.
    pub fn score(&self, measure: Measure, i: usize, j: usize) -> Result<f64, DistanceError> {
        match measure {
            Measure::Vsm => Ok(self.tfidf.similarity_at(i, j)),
            Measure::Wdtw => wdtw(&self.units[i], &self.units[j], None),
            Measure::Wted => wted(&self.trees[i], &self.trees[j]),
        }
    }

    /// Weak filter: keeps pairs whose VSM similarity reaches `threshold`.
    ///
    /// Pairs where both tf-idf vectors are zero (every term occurs in every
    /// document) carry no VSM evidence and are passed on to the strong filter.
    pub fn weak_filter(&self, pairs: &[(u32, u32)], threshold: f64, pool: &rayon::ThreadPool) -> Vec<(u32, u32)> {
        let keep = |&(i, j): &(u32, u32)| {
            let (i, j) = (i as usize, j as usize);
            let blind = !self.tfidf.is_informative_at(i) && !self.tfidf.is_informative_at(j);
            blind || self.tfidf.similarity_at(i, j) >= threshold
        };
        pool.install(|| pairs.par_iter().copied().filter(|p| keep(p)).collect())
    }

    /// Scores every pair with `measure`; output order follows `pairs`.
    pub fn score_pairs(
        &self,
        pairs: &[(u32, u32)],
        measure: Measure,
        pool: &rayon::ThreadPool,
    ) -> Result<Vec<f64>, PipelineError> {
        pool.install(|| {
            pairs
                .par_iter()
                .map(|&(i, j)| self.score(measure, i as usize, j as usize).map_err(PipelineError::from))
                .collect()
        })
    }
}

/// Whether `score` passes the strong filter at `tau`.
pub fn passes_strong(measure: Measure, score: f64, tau: f64) -> bool {
    if measure.is_similarity() {
        score >= tau
    } else {
        score <= tau
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectedPair {
    pub original: String,
    pub revision: String,
    pub score: f64,
    pub measure: Measure,
}

/// Wall-clock seconds per stage, from a monotonic clock.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub prepare: f64,
    pub candidates: f64,
    pub weak_filter: f64,
    /// Strong-filter scoring only.
    pub distance: f64,
    pub calibration: f64,
    pub network: f64,
    pub branching: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StageCounts {
    pub documents: usize,
    pub skipped_documents: usize,
    pub candidate_pairs: usize,
    pub weak_kept: usize,
    pub strong_kept: usize,
    pub network_vertices: usize,
    pub network_arcs: usize,
    pub detected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: PipelineConfig,
    pub measure: Measure,
    pub tau: Option<f64>,
    pub tau_method: Option<&'static str>,
    pub idf_convention: &'static str,
    pub counts: StageCounts,
    pub timings: StageTimings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub pairs: Vec<DetectedPair>,
    pub calibration: Option<Calibration>,
    pub report: RunReport,
}

impl Detection {
    /// `original_id,revision_id,score,measure` rows with a header.
    pub fn pairs_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["original_id", "revision_id", "score", "measure"]).expect("in-memory write");
        for p in &self.pairs {
            w.write_record([&p.original, &p.revision, &p.score.to_string(), p.measure.as_str()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    pub fn report_json(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("report serializes")
    }
}

/// Histogram calibration of the strong threshold.
///
/// Scores every candidate pair of an initial document set (see
/// [`PreparedCorpus::initial_pairs`]) without the weak filter, so that the
/// histogram shows both the related and the unrelated pairs.
pub fn calibrate_prepared(prepared: &PreparedCorpus, config: &PipelineConfig) -> Result<Calibration, PipelineError> {
    config.validate()?;
    let pool = worker_pool(config.workers)?;
    calibrate_in(prepared, config, &pool)
}

fn calibrate_in(
    prepared: &PreparedCorpus,
    config: &PipelineConfig,
    pool: &rayon::ThreadPool,
) -> Result<Calibration, PipelineError> {
    let pairs = prepared.initial_pairs(config.calibration_pairs);
    let scores = prepared.score_pairs(&pairs, config.measure, pool)?;
    calibrate_tau(&scores, config.bins, config.window)
}

/// Runs the full pipeline on `corpus`.
pub fn detect(corpus: &Corpus, table: &EmbeddingTable, config: &PipelineConfig) -> Result<Detection, PipelineError> {
    config.validate()?;
    let start = Instant::now();
    let prepared = PreparedCorpus::new(corpus, table);
    let prepare = start.elapsed().as_secs_f64();
    let mut det = detect_prepared(&prepared, config)?;
    det.report.timings.prepare = prepare;
    det.report.timings.total += prepare;
    Ok(det)
}

/// [`detect`] on an already prepared corpus.
pub fn detect_prepared(prepared: &PreparedCorpus, config: &PipelineConfig) -> Result<Detection, PipelineError> {
    config.validate()?;
    let pool = worker_pool(config.workers)?;
    let measure = config.measure;
    let mut timings = StageTimings::default();
    let mut counts =
        StageCounts { documents: prepared.len(), skipped_documents: prepared.skipped().len(), ..Default::default() };
    let run_start = Instant::now();

    let t = Instant::now();
    let candidates = prepared.candidates();
    timings.candidates = t.elapsed().as_secs_f64();
    counts.candidate_pairs = candidates.len();

    let t = Instant::now();
    let weak = prepared.weak_filter(&candidates, config.weak_threshold, &pool);
    timings.weak_filter = t.elapsed().as_secs_f64();
    counts.weak_kept = weak.len();
    drop(candidates);

    let t = Instant::now();
    let scores = prepared.score_pairs(&weak, measure, &pool)?;
    timings.distance = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (tau, calibration) = match config.strong_threshold {
        Threshold::Fixed(tau) => (Some(tau), None),
        Threshold::Auto => match calibrate_in(prepared, config, &pool) {
            Ok(c) => (Some(c.tau), Some(c)),
            Err(PipelineError::InsufficientData { got, .. }) => {
                // Too few scores to histogram: keep whatever survived the weak filter.
                log::warn!("only {got} calibration pairs; threshold calibration skipped");
                (None, None)
            }
            Err(e) => return Err(e),
        },
    };
    timings.calibration = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let ids = prepared.ids();
    let strong = weak
        .iter()
        .zip(&scores)
        .filter(|&(_, &s)| tau.is_none_or(|tau| passes_strong(measure, s, tau)))
        .map(|(&(i, j), &s)| (ids[i as usize].as_str(), ids[j as usize].as_str(), s));
    let net = build_network(strong, measure);
    timings.network = t.elapsed().as_secs_f64();
    counts.strong_kept = net.arcs.len();
    counts.network_vertices = net.vertices.len();
    counts.network_arcs = net.arcs.len();

    let t = Instant::now();
    let branching = min_branching(&net)?;
    timings.branching = t.elapsed().as_secs_f64();
    counts.detected = branching.len();
    timings.total = run_start.elapsed().as_secs_f64();

    let pairs = branching
        .into_iter()
        .map(|a| DetectedPair { original: a.original, revision: a.revision, score: a.score, measure })
        .collect();
    let tau_method = match (&config.strong_threshold, &calibration) {
        (Threshold::Fixed(_), _) => Some("fixed"),
        (Threshold::Auto, Some(c)) => Some(c.method.as_str()),
        (Threshold::Auto, None) => None,
    };
    Ok(Detection {
        pairs,
        calibration,
        report: RunReport {
            config: config.clone(),
            measure,
            tau,
            tau_method,
            idf_convention: IDF_CONVENTION,
            counts,
            timings,
        },
    })
}
