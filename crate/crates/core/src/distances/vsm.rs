use std::collections::HashMap;

use super::DistanceError;

/// Weighting recorded in run reports so VSM scores can be reproduced.
pub const IDF_CONVENTION: &str = "tf = raw count; idf = ln(N / df); cosine of tf*idf vectors";

#[derive(Debug, Clone)]
struct SparseVec {
    /// Sorted by term id; zero weights are dropped.
    entries: Vec<(u32, f64)>,
    sq_norm: f64,
}

impl SparseVec {
    fn new(mut entries: Vec<(u32, f64)>) -> Self {
        entries.retain(|&(_, w)| w > 0.0);
        entries.sort_unstable_by_key(|&(t, _)| t);
        let sq_norm = entries.iter().map(|&(_, w)| w * w).sum();
        SparseVec { entries, sq_norm }
    }

    fn cosine(&self, other: &SparseVec) -> f64 {
        if self.sq_norm == 0.0 || other.sq_norm == 0.0 {
            return 0.0;
        }
        let mut dot = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (ta, wa) = self.entries[i];
            let (tb, wb) = other.entries[j];
            match ta.cmp(&tb) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    dot += wa * wb;
                    i += 1;
                    j += 1;
                }
            }
        }
        // sqrt(x * x) == x exactly, so identical vectors score exactly 1.
        (dot / (self.sq_norm * other.sq_norm).sqrt()).clamp(0.0, 1.0)
    }
}

/// tf-idf vectors for a fixed set of documents.
#[derive(Debug, Clone)]
pub struct TfIdfModel {
    ids: HashMap<String, usize>,
    idf: Vec<f64>,
    vocab: HashMap<String, u32>,
    vectors: Vec<SparseVec>,
    /// Raw counts, kept only for documents whose weighted vector is zero.
    raw: Vec<Option<SparseVec>>,
}

impl TfIdfModel {
    /// Fits idf on exactly the given documents and weighs each of them.
    pub fn fit<I, D, T, S>(docs: I) -> Self
    where
        I: IntoIterator<Item = (D, T)>,
        D: Into<String>,
        T: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut vocab: HashMap<String, u32> = HashMap::new();
        let mut ids = HashMap::new();
        let mut counts: Vec<HashMap<u32, u32>> = Vec::new();
        let mut df: Vec<u32> = Vec::new();
        for (id, tokens) in docs {
            let mut tf: HashMap<u32, u32> = HashMap::new();
            for t in tokens {
                let t = t.as_ref();
                let term = match vocab.get(t) {
                    Some(&term) => term,
                    None => {
                        let term = vocab.len() as u32;
                        vocab.insert(t.to_string(), term);
                        df.push(0);
                        term
                    }
                };
                *tf.entry(term).or_default() += 1;
            }
            for &term in tf.keys() {
                df[term as usize] += 1;
            }
            ids.insert(id.into(), counts.len());
            counts.push(tf);
        }
        let n = counts.len() as f64;
        let idf: Vec<f64> = df.iter().map(|&d| (n / f64::from(d)).ln()).collect();
        let mut vectors = Vec::with_capacity(counts.len());
        let mut raw = Vec::with_capacity(counts.len());
        for tf in counts {
            let weighted = SparseVec::new(tf.iter().map(|(&t, &c)| (t, f64::from(c) * idf[t as usize])).collect());
            raw.push(
                (weighted.sq_norm == 0.0)
                    .then(|| SparseVec::new(tf.iter().map(|(&t, &c)| (t, f64::from(c))).collect())),
            );
            vectors.push(weighted);
        }
        TfIdfModel { ids, idf, vocab, vectors, raw }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn idf(&self, token: &str) -> Option<f64> {
        self.vocab.get(token).map(|&t| self.idf[t as usize])
    }

    pub fn index_of(&self, id: &str) -> Result<usize, DistanceError> {
        self.ids.get(id).copied().ok_or_else(|| DistanceError::UnknownDocument(id.to_string()))
    }

    /// Cosine similarity of two documents' tf-idf vectors, in `[0, 1]`.
    pub fn similarity(&self, a: &str, b: &str) -> Result<f64, DistanceError> {
        Ok(self.similarity_at(self.index_of(a)?, self.index_of(b)?))
    }

    /// [`similarity`](Self::similarity) by fit order. When both weighted
    /// vectors are all-zero (every term occurs in every document) the raw
    /// counts are compared instead; when only one is, the score is 0.
    pub fn similarity_at(&self, a: usize, b: usize) -> f64 {
        match (&self.raw[a], &self.raw[b]) {
            (Some(ra), Some(rb)) => ra.cosine(rb),
            _ => self.vectors[a].cosine(&self.vectors[b]),
        }
    }

    /// Whether the document has any term with non-zero weight, i.e. some term
    /// that does not occur in every document.
    pub fn is_informative_at(&self, a: usize) -> bool {
        self.vectors[a].sq_norm > 0.0
    }
}
