//! Synthetic revision corpora with known ground truth.
//!
//! An initial corpus of `round(lambda)` documents is generated at time 0. Each
//! following period adds `Poisson(lambda)` new documents and
//! `Poisson(revision_rate * lambda)` revisions, interleaved in random order.
//! Each revision edits a document drawn uniformly from all documents existing
//! at that moment, so revisions of revisions form branching chains.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{tokenize, Corpus, CorpusError, DocNode, Document, NodeKind};

mod edits;

pub use edits::{revise_document, ActionWeights, EditAction, EditOp, EditUnit, OpWeights};

/// Timestamp distance between consecutive periods.
pub const PERIOD: i64 = 1_000_000;

const BUNDLED_POOL: &str = include_str!("../../data/pool.txt");

#[derive(Error, Debug)]
pub enum SimulatorError {
    #[error("sentence pool has no usable sentences")]
    EmptyPool,
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SimulatorError + '_ {
    move |source| SimulatorError::Io { path: path.to_path_buf(), source }
}

/// Tokenized sentences that documents are assembled from.
#[derive(Debug, Clone)]
pub struct TextPool {
    sentences: Vec<Vec<String>>,
    words: Vec<String>,
}

impl TextPool {
    /// One sentence per line; lines without tokens are ignored.
    pub fn from_text(text: &str) -> Result<Self, SimulatorError> {
        let sentences: Vec<Vec<String>> = text.lines().map(tokenize).filter(|s| !s.is_empty()).collect();
        if sentences.is_empty() {
            return Err(SimulatorError::EmptyPool);
        }
        let words = sentences.iter().flatten().cloned().collect();
        Ok(TextPool { sentences, words })
    }

    pub fn load(path: &Path) -> Result<Self, SimulatorError> {
        TextPool::from_text(&fs::read_to_string(path).map_err(io_err(path))?)
    }

    /// The pool shipped with the crate.
    pub fn bundled() -> Self {
        TextPool::from_text(BUNDLED_POOL).expect("bundled pool is non-empty")
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn sentence<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<String> {
        self.sentences.choose(rng).expect("non-empty pool").clone()
    }

    /// A word drawn by corpus frequency.
    pub fn word<R: Rng + ?Sized>(&self, rng: &mut R) -> String {
        self.words.choose(rng).expect("non-empty pool").clone()
    }

    pub fn phrase<R: Rng + ?Sized>(&self, rng: &mut R, min: usize, max: usize) -> Vec<String> {
        let n = rng.random_range(min..=max);
        (0..n).map(|_| self.word(rng)).collect()
    }
}

pub type Sentence = Vec<String>;
pub type Paragraph = Vec<Sentence>;

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: Vec<String>,
    pub paragraphs: Vec<Paragraph>,
}

/// Editable document model that keeps sentence boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct SimDocument {
    pub title: Vec<String>,
    pub sections: Vec<Section>,
}

impl SimDocument {
    pub fn paragraph_count(&self) -> usize {
        self.sections.iter().map(|s| s.paragraphs.len()).sum()
    }

    pub fn word_count(&self) -> usize {
        let body: usize = self.sections.iter().flat_map(|s| &s.paragraphs).flatten().map(Vec::len).sum();
        let names: usize = self.sections.iter().map(|s| s.name.len()).sum();
        self.title.len() + names + body
    }

    pub fn to_document(&self, id: &str, timestamp: i64) -> Result<Document, CorpusError> {
        let sections = self
            .sections
            .iter()
            .map(|s| {
                let paras = s.paragraphs.iter().map(|p| DocNode::paragraph(p.concat())).collect();
                DocNode::new(NodeKind::Section, s.name.clone()).with_children(paras)
            })
            .collect();
        let root = DocNode::new(NodeKind::Title, self.title.clone()).with_children(sections);
        Document::new(id, timestamp, root)
    }
}

pub const MIN_SECTIONS: usize = 2;
pub const MAX_SECTIONS: usize = 6;
pub const MAX_PARAGRAPHS_PER_SECTION: usize = 5;
pub const MAX_SENTENCES_PER_PARAGRAPH: usize = 4;
const GEN_MIN_PARAGRAPHS: usize = 3;
const GEN_MIN_WORDS: usize = 300;

fn new_paragraph<R: Rng + ?Sized>(rng: &mut R, pool: &TextPool) -> Paragraph {
    let n = rng.random_range(1..=MAX_SENTENCES_PER_PARAGRAPH);
    (0..n).map(|_| pool.sentence(rng)).collect()
}

fn new_section<R: Rng + ?Sized>(rng: &mut R, pool: &TextPool, paragraphs: usize) -> Section {
    Section { name: pool.phrase(rng, 1, 3), paragraphs: (0..paragraphs).map(|_| new_paragraph(rng, pool)).collect() }
}

/// A fresh document: 2-6 sections of 1-5 paragraphs of 1-4 pool sentences,
/// grown until it has at least 3 paragraphs and 300 words.
pub fn generate_document<R: Rng + ?Sized>(rng: &mut R, pool: &TextPool) -> SimDocument {
    let n_sections = rng.random_range(MIN_SECTIONS..=MAX_SECTIONS);
    let mut doc = SimDocument {
        title: pool.phrase(rng, 1, 4),
        sections: (0..n_sections)
            .map(|_| {
                let n = rng.random_range(1..=MAX_PARAGRAPHS_PER_SECTION);
                new_section(rng, pool, n)
            })
            .collect(),
    };
    while doc.paragraph_count() < GEN_MIN_PARAGRAPHS || doc.word_count() < GEN_MIN_WORDS {
        let need_paragraph = doc.paragraph_count() < GEN_MIN_PARAGRAPHS;
        let open_paras: Vec<(usize, usize)> = doc
            .sections
            .iter()
            .enumerate()
            .flat_map(|(s, sec)| {
                sec.paragraphs
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.len() < MAX_SENTENCES_PER_PARAGRAPH)
                    .map(move |(p, _)| (s, p))
            })
            .collect();
        let open_sections: Vec<usize> = (0..doc.sections.len())
            .filter(|&s| doc.sections[s].paragraphs.len() < MAX_PARAGRAPHS_PER_SECTION)
            .collect();
        if !need_paragraph && !open_paras.is_empty() {
            let &(s, p) = open_paras.choose(rng).expect("non-empty");
            let sentence = pool.sentence(rng);
            doc.sections[s].paragraphs[p].push(sentence);
        } else if let Some(&s) = open_sections.choose(rng) {
            let para = new_paragraph(rng, pool);
            doc.sections[s].paragraphs.push(para);
        } else {
            let sec = new_section(rng, pool, 1);
            doc.sections.push(sec);
        }
    }
    doc
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub lambda: f64,
    /// Expected revisions per period as a fraction of `lambda`.
    pub revision_rate: f64,
    pub periods: usize,
    pub seed: u64,
    pub weights: OpWeights,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { lambda: 550.0, revision_rate: 0.5, periods: 5, seed: 0, weights: OpWeights::default() }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimulatorError> {
        let bad = |m: String| Err(SimulatorError::InvalidConfig(m));
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.revision_rate.is_finite() && self.revision_rate > 0.0) {
            return bad(format!("revision rate must be positive, got {}", self.revision_rate));
        }
        if self.periods == 0 {
            return bad("periods must be at least 1".into());
        }
        self.weights.validate().map_err(SimulatorError::InvalidConfig)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundTruthPair {
    pub original_id: String,
    pub revision_id: String,
    pub period: usize,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: SimConfig,
    pub corpus: Corpus,
    pub ground_truth: Vec<GroundTruthPair>,
    /// Edits applied to produce each revision, keyed like `ground_truth`.
    pub edit_logs: Vec<Vec<EditOp>>,
}

impl Simulation {
    /// Corpus as it stood at the end of `period` (0 is the initial corpus).
    pub fn snapshot(&self, period: usize) -> Corpus {
        self.corpus.before((period as i64 + 1) * PERIOD)
    }

    /// Ground-truth pairs as `(original, revision)` ids.
    pub fn truth_pairs(&self) -> Vec<(String, String)> {
        self.ground_truth.iter().map(|g| (g.original_id.clone(), g.revision_id.clone())).collect()
    }

    pub fn ground_truth_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["original_id", "revision_id", "period"]).expect("in-memory write");
        for g in &self.ground_truth {
            w.write_record([g.original_id.as_str(), g.revision_id.as_str(), &g.period.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    /// Writes the corpus, `ground_truth.csv` and `simulation.json`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), SimulatorError> {
        self.corpus.write_dir(dir)?;
        let gt = dir.join("ground_truth.csv");
        fs::write(&gt, self.ground_truth_csv()).map_err(io_err(&gt))?;
        let cfg = dir.join("simulation.json");
        let json = serde_json::to_string_pretty(&self.config).expect("config serializes");
        fs::write(&cfg, json + "\n").map_err(io_err(&cfg))
    }
}

/// Reads a `ground_truth.csv` as `(original, revision)` pairs.
pub fn load_ground_truth(path: &Path) -> Result<Vec<GroundTruthPair>, SimulatorError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| SimulatorError::Io { path: path.to_path_buf(), source: std::io::Error::other(e) })?;
    r.deserialize()
        .map(|row| row.map_err(|e| SimulatorError::Io { path: path.to_path_buf(), source: std::io::Error::other(e) }))
        .collect()
}

fn doc_id(n: usize) -> String {
    format!("d{n:05}")
}

/// Runs the simulation. The same config and pool always give the same corpus.
pub fn simulate(config: &SimConfig, pool: &TextPool) -> Result<Simulation, SimulatorError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let new_dist = Poisson::new(config.lambda).expect("validated lambda");
    let rev_dist = Poisson::new(config.revision_rate * config.lambda).expect("validated rate");

    let mut docs: Vec<(String, i64, SimDocument)> = Vec::new();
    let mut ground_truth = Vec::new();
    let mut edit_logs = Vec::new();

    for _ in 0..config.lambda.round() as usize {
        let d = generate_document(&mut rng, pool);
        docs.push((doc_id(docs.len()), 0, d));
    }

    for period in 1..=config.periods {
        let n_new = new_dist.sample(&mut rng) as usize;
        let n_rev = rev_dist.sample(&mut rng) as usize;
        // true = revision, false = new document
        let mut events: Vec<bool> = std::iter::repeat_n(false, n_new).chain(std::iter::repeat_n(true, n_rev)).collect();
        events.shuffle(&mut rng);
        let start = period as i64 * PERIOD;
        for (k, is_revision) in events.into_iter().enumerate() {
            let ts = start + k as i64 + 1;
            let id = doc_id(docs.len());
            if is_revision {
                if docs.is_empty() {
                    continue;
                }
                let src = rng.random_range(0..docs.len());
                let (revised, log) = revise_document(&mut rng, pool, &docs[src].2, &config.weights);
                ground_truth.push(GroundTruthPair {
                    original_id: docs[src].0.clone(),
                    revision_id: id.clone(),
                    period,
                });
                edit_logs.push(log);
                docs.push((id, ts, revised));
            } else {
                let d = generate_document(&mut rng, pool);
                docs.push((id, ts, d));
            }
        }
    }

    let documents = docs.iter().map(|(id, ts, d)| d.to_document(id, *ts)).collect::<Result<Vec<_>, _>>()?;
    Ok(Simulation { config: config.clone(), corpus: Corpus::new(documents)?, ground_truth, edit_logs })
}
