//! Word vectors: loading the `V D` text format, deterministic pseudo vectors,
//! and mapping token sequences to [`VectorSequence`]s.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum EmbeddingError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn format_err(line: usize, msg: impl Into<String>) -> EmbeddingError {
    EmbeddingError::Format { line, msg: msg.into() }
}

/// Ordered run of `dim`-dimensional vectors stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSequence {
    dim: usize,
    data: Vec<f64>,
}

impl VectorSequence {
    pub fn empty(dim: usize) -> Self {
        VectorSequence { dim, data: Vec::new() }
    }

    /// Panics if any row length differs from `dim`.
    pub fn from_rows<R: AsRef<[f64]>>(dim: usize, rows: &[R]) -> Self {
        let mut data = Vec::with_capacity(dim * rows.len());
        for r in rows {
            assert_eq!(r.as_ref().len(), dim, "row length must equal dim");
            data.extend_from_slice(r.as_ref());
        }
        VectorSequence { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    fn push(&mut self, v: &[f64]) {
        self.data.extend_from_slice(v);
    }

    /// Sum of the L2 norms of the vectors; the insertion/deletion cost of the sequence.
    pub fn norm_sum(&self) -> f64 {
        self.iter().map(l2_norm).sum()
    }
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Immutable token to vector map with a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    index: HashMap<String, usize>,
    data: Vec<f64>,
}

impl EmbeddingTable {
    fn with_dim(dim: usize) -> Self {
        EmbeddingTable { dim, index: HashMap::new(), data: Vec::new() }
    }

    /// Inserts or overwrites `token`.
    fn set(&mut self, token: &str, vector: &[f64]) {
        debug_assert_eq!(vector.len(), self.dim);
        match self.index.get(token) {
            Some(&row) => self.data[row * self.dim..(row + 1) * self.dim].copy_from_slice(vector),
            None => {
                self.index.insert(token.to_string(), self.index.len());
                self.data.extend_from_slice(vector);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&row| &self.data[row * self.dim..(row + 1) * self.dim])
    }

    /// Tokens in sorted order.
    pub fn tokens(&self) -> Vec<&str> {
        let mut t: Vec<&str> = self.index.keys().map(String::as_str).collect();
        t.sort_unstable();
        t
    }

    /// Reads the text interchange format: a `V D` header then `token c1 .. cD` per line.
    /// Later duplicates of a token replace earlier ones.
    pub fn load(path: &Path) -> Result<Self, EmbeddingError> {
        let file = File::open(path).map_err(|source| EmbeddingError::Io { path: path.to_path_buf(), source })?;
        Self::read(BufReader::new(file)).map_err(|e| match e {
            EmbeddingError::Io { source, .. } => EmbeddingError::Io { path: path.to_path_buf(), source },
            other => other,
        })
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self, EmbeddingError> {
        let io = |source| EmbeddingError::Io { path: PathBuf::new(), source };
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| format_err(1, "missing header"))?.map_err(io)?;
        let mut fields = header.split_whitespace();
        let parse_usize = |s: Option<&str>, what: &str| -> Result<usize, EmbeddingError> {
            s.ok_or_else(|| format_err(1, format!("header missing {what}")))?
                .parse::<usize>()
                .map_err(|_| format_err(1, format!("header {what} is not a non-negative integer")))
        };
        let vocab = parse_usize(fields.next(), "vocabulary size")?;
        let dim = parse_usize(fields.next(), "dimension")?;
        if fields.next().is_some() {
            return Err(format_err(1, "header has more than two fields"));
        }
        if dim == 0 {
            return Err(format_err(1, "dimension must be positive"));
        }

        let mut table = EmbeddingTable::with_dim(dim);
        let mut rows = 0usize;
        let mut buf = vec![0.0; dim];
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line.map_err(io)?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let token = parts.next().expect("non-blank line has a field");
            let mut n = 0;
            for part in parts {
                if n == dim {
                    return Err(format_err(lineno, format!("more than {dim} components")));
                }
                let x: f64 = part.parse().map_err(|_| format_err(lineno, format!("non-numeric component {part:?}")))?;
                if !x.is_finite() {
                    return Err(format_err(lineno, format!("non-finite component {part:?}")));
                }
                buf[n] = x;
                n += 1;
            }
            if n != dim {
                return Err(format_err(lineno, format!("expected {dim} components, found {n}")));
            }
            table.set(token, &buf);
            rows += 1;
        }
        if rows != vocab {
            return Err(format_err(1, format!("header declares {vocab} vectors, found {rows}")));
        }
        Ok(table)
    }

    /// Writes the text format with 9 significant digits per component.
    pub fn write<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut w = BufWriter::new(w);
        writeln!(w, "{} {}", self.len(), self.dim)?;
        for token in self.tokens() {
            write!(w, "{token}")?;
            for x in self.get(token).expect("token from index") {
                write!(w, " {x:.8e}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    }

    pub fn save(&self, path: &Path) -> Result<(), EmbeddingError> {
        let file = File::create(path).map_err(|source| EmbeddingError::Io { path: path.to_path_buf(), source })?;
        self.write(file).map_err(|source| EmbeddingError::Io { path: path.to_path_buf(), source })
    }

    /// Deterministic unit vectors: each token's vector depends only on `(token, seed)`.
    ///
    /// Components are drawn uniformly from `[-1, 1]` by a ChaCha stream keyed on an
    /// FNV-1a hash of the token bytes mixed with `seed`, then L2-normalized.
    pub fn pseudo<I, S>(vocab: I, dim: usize, seed: u64) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        assert!(dim >= 1, "pseudo embeddings need dim >= 1");
        let mut table = EmbeddingTable::with_dim(dim);
        let mut v = vec![0.0; dim];
        for token in vocab {
            let token = token.as_ref();
            if table.index.contains_key(token) {
                continue;
            }
            pseudo_vector(token, seed, &mut v);
            table.set(token, &v);
        }
        table
    }

    /// Replaces each in-vocabulary token with its vector; unknown tokens are skipped.
    pub fn embed<S: AsRef<str>>(&self, tokens: &[S]) -> VectorSequence {
        let mut seq = VectorSequence::empty(self.dim);
        for t in tokens {
            if let Some(v) = self.get(t.as_ref()) {
                seq.push(v);
            }
        }
        seq
    }
}

fn fnv1a(bytes: &[u8], seed: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn pseudo_vector(token: &str, seed: u64, out: &mut [f64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(token.as_bytes(), seed));
    loop {
        for x in out.iter_mut() {
            *x = rng.random_range(-1.0..=1.0);
        }
        let norm = l2_norm(out);
        if norm > 1e-6 {
            out.iter_mut().for_each(|x| *x /= norm);
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(text: &str) -> Result<EmbeddingTable, EmbeddingError> {
        EmbeddingTable::read(text.as_bytes())
    }

    #[test]
    fn load_small_table() {
        let t = table("2 3\na 1 0 0\nb 0 1 0").unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.get("a"), Some(&[1.0, 0.0, 0.0][..]));
        assert_eq!(t.get("b"), Some(&[0.0, 1.0, 0.0][..]));
        assert_eq!(t.get("c"), None);
    }

    #[test]
    fn load_empty_table() {
        let t = table("0 5\n").unwrap();
        assert_eq!(t.dim(), 5);
        assert!(t.is_empty());
    }

    #[test]
    fn load_errors() {
        assert!(matches!(table("1 3\na 1 0"), Err(EmbeddingError::Format { line: 2, .. })));
        assert!(matches!(table("1 2\na 1 x"), Err(EmbeddingError::Format { line: 2, .. })));
        assert!(matches!(table("1 2\na 1 2 3"), Err(EmbeddingError::Format { .. })));
        assert!(matches!(table("x 2\n"), Err(EmbeddingError::Format { line: 1, .. })));
        assert!(matches!(table(""), Err(EmbeddingError::Format { line: 1, .. })));
        assert!(matches!(table("2 2\na 1 1"), Err(EmbeddingError::Format { .. })));
    }

    #[test]
    fn duplicate_token_last_wins() {
        let t = table("2 2\na 1 0\na 0 1\n").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get("a"), Some(&[0.0, 1.0][..]));
    }

    #[test]
    fn scientific_notation() {
        let t = table("1 2\nq 1e-3 -2.5E+1\n").unwrap();
        assert_eq!(t.get("q"), Some(&[0.001, -25.0][..]));
    }

    #[test]
    fn embed_skips_oov_and_keeps_order() {
        let t = table("2 3\na 1 0 0\nb 0 1 0").unwrap();
        let s = t.embed(&["a", "b"]);
        assert_eq!(s, VectorSequence::from_rows(3, &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]));
        assert!(t.embed(&["zzz"]).is_empty());
        let s = t.embed(&["a", "zzz", "a"]);
        assert_eq!(s, VectorSequence::from_rows(3, &[[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]));
    }

    #[test]
    fn pseudo_is_deterministic_and_unit() {
        let vocab = ["alpha", "beta", "gamma", "x"];
        let a = EmbeddingTable::pseudo(vocab, 16, 9);
        let b = EmbeddingTable::pseudo(vocab, 16, 9);
        assert_eq!(a, b);
        for tok in vocab {
            let v = a.get(tok).unwrap();
            assert!((l2_norm(v) - 1.0).abs() < 1e-9);
            assert!(v.iter().all(|x| (-1.0..=1.0).contains(x)));
        }
        // Vector depends only on (token, seed), not on the rest of the vocabulary.
        let single = EmbeddingTable::pseudo(["gamma"], 16, 9);
        assert_eq!(single.get("gamma"), a.get("gamma"));
    }

    #[test]
    fn pseudo_seed_changes_vectors() {
        let s1 = EmbeddingTable::pseudo(["x"], 4, 1);
        let s2 = EmbeddingTable::pseudo(["x"], 4, 2);
        assert_ne!(s1.get("x"), s2.get("x"));
    }

    #[test]
    fn save_load_round_trip() {
        let t = EmbeddingTable::pseudo(["one", "two", "three"], 5, 3);
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        let back = EmbeddingTable::read(&buf[..]).unwrap();
        assert_eq!(back.dim(), t.dim());
        assert_eq!(back.tokens(), t.tokens());
        for tok in t.tokens() {
            for (x, y) in t.get(tok).unwrap().iter().zip(back.get(tok).unwrap()) {
                assert!((x - y).abs() <= 1e-8 * x.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn norm_sum_of_unit_vectors_is_length() {
        let t = EmbeddingTable::pseudo(["a", "b"], 8, 0);
        assert!((t.embed(&["a", "b", "a"]).norm_sum() - 3.0).abs() < 1e-9);
    }
}
