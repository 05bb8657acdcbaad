//! Timestamped documents, their section tree, and the corpus container.
//!
//! Source documents use a small heading markup:
//!
//! ```text
//! # Title
//!
//! Paragraph text, possibly
//! wrapped over several lines.
//!
//! ## Section
//!
//! ### Subsection
//! ```
//!
//! Paragraphs are separated by blank lines (or by a heading line) and attach to
//! the innermost open heading.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// File name of the corpus manifest inside a corpus directory.
pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Error, Debug)]
pub enum CorpusError {
    #[error("document id must be non-empty")]
    EmptyId,
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("manifest line {line}: {source}")]
    Manifest {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CorpusError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io { path: path.to_path_buf(), source }
    }
}

/// Lowercases `text` and splits it on every run of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(str::to_lowercase).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Title,
    Section,
    Subsection,
    Paragraph,
}

impl NodeKind {
    fn depth(self) -> usize {
        match self {
            NodeKind::Title => 0,
            NodeKind::Section => 1,
            NodeKind::Subsection => 2,
            NodeKind::Paragraph => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocNode {
    pub kind: NodeKind,
    /// Heading tokens, or the paragraph text for leaves.
    pub label: Vec<String>,
    pub children: Vec<DocNode>,
}

impl DocNode {
    pub fn new(kind: NodeKind, label: Vec<String>) -> Self {
        DocNode { kind, label, children: Vec::new() }
    }

    pub fn paragraph(label: Vec<String>) -> Self {
        DocNode::new(NodeKind::Paragraph, label)
    }

    pub fn with_children(mut self, children: Vec<DocNode>) -> Self {
        self.children = children;
        self
    }

    /// Number of nodes in this subtree, including `self`.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(DocNode::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.children.iter().map(DocNode::height).max().unwrap_or(0)
    }

    /// Pre-order walk.
    pub fn preorder(&self) -> Vec<&DocNode> {
        let mut out = Vec::with_capacity(self.size());
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(node);
            stack.extend(node.children.iter().rev());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// A `###` heading appeared with no open `##` section; it was promoted to a section.
    MalformedHeading { line: usize },
    /// A second `#` heading, or one after content started; it was demoted to a section.
    RepeatedTitle { line: usize },
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseWarning::MalformedHeading { line } => {
                write!(f, "line {line}: subsection heading without an enclosing section")
            }
            ParseWarning::RepeatedTitle { line } => {
                write!(f, "line {line}: title heading after document content, treated as a section")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub timestamp: i64,
    /// Tree root; its label is the title (possibly empty).
    pub root: DocNode,
    pub source: Option<PathBuf>,
}

impl Document {
    pub fn new(id: impl Into<String>, timestamp: i64, root: DocNode) -> Result<Self, CorpusError> {
        let id = id.into();
        if id.is_empty() {
            return Err(CorpusError::EmptyId);
        }
        Ok(Document { id, timestamp, root, source: None })
    }

    pub fn title(&self) -> &[String] {
        &self.root.label
    }

    pub fn paragraph_count(&self) -> usize {
        self.root.preorder().iter().filter(|n| n.kind == NodeKind::Paragraph).count()
    }

    /// Total number of tokens over all labels, headings included.
    pub fn token_count(&self) -> usize {
        self.root.preorder().iter().map(|n| n.label.len()).sum()
    }

    /// Every token of the document in reading order.
    pub fn tokens(&self) -> impl Iterator<Item = &String> {
        self.root.preorder().into_iter().flat_map(|n| n.label.iter())
    }

    /// Renders the tree back to markup. Parsing the result yields the same tree.
    pub fn to_markup(&self) -> String {
        let mut blocks: Vec<String> = Vec::new();
        if !self.root.label.is_empty() {
            blocks.push(format!("# {}", self.root.label.join(" ")));
        }
        fn walk(node: &DocNode, blocks: &mut Vec<String>) {
            for child in &node.children {
                let text = child.label.join(" ");
                let line = match child.kind {
                    NodeKind::Paragraph => text,
                    NodeKind::Section | NodeKind::Title => heading("##", &text),
                    NodeKind::Subsection => heading("###", &text),
                };
                blocks.push(line);
                walk(child, blocks);
            }
        }
        walk(&self.root, &mut blocks);
        let mut out = blocks.join("\n\n");
        out.push('\n');
        out
    }

    fn cmp_key(&self, other: &Document) -> Ordering {
        self.timestamp.cmp(&other.timestamp).then_with(|| self.id.cmp(&other.id))
    }
}

fn heading(marker: &str, text: &str) -> String {
    if text.is_empty() {
        marker.to_string()
    } else {
        format!("{marker} {text}")
    }
}

fn heading_level(line: &str) -> Option<(usize, &str)> {
    let hashes = line.bytes().take_while(|&b| b == b'#').count();
    if hashes == 0 || hashes > 3 {
        return None;
    }
    let rest = &line[hashes..];
    if rest.is_empty() {
        Some((hashes, ""))
    } else if rest.starts_with(char::is_whitespace) {
        Some((hashes, rest.trim()))
    } else {
        None
    }
}

/// Parses markup into a [`Document`]. Nesting problems are repaired and logged.
pub fn parse_document(text: &str, id: &str, timestamp: i64) -> Result<Document, CorpusError> {
    let (doc, warnings) = parse_document_with_warnings(text, id, timestamp)?;
    for w in &warnings {
        log::warn!("{id}: {w}");
    }
    Ok(doc)
}

/// Same as [`parse_document`] but returns the repairs instead of logging them.
pub fn parse_document_with_warnings(
    text: &str,
    id: &str,
    timestamp: i64,
) -> Result<(Document, Vec<ParseWarning>), CorpusError> {
    // Open headings are kept as a path of child indices below the root.
    let mut root = DocNode::new(NodeKind::Title, Vec::new());
    let mut path: Vec<usize> = Vec::new();
    let mut warnings = Vec::new();
    let mut title_seen = false;
    let mut content_seen = false;
    let mut pending: Vec<&str> = Vec::new();

    fn open_mut<'a>(root: &'a mut DocNode, path: &[usize]) -> &'a mut DocNode {
        let mut node = root;
        for &i in path {
            node = &mut node.children[i];
        }
        node
    }

    fn flush(root: &mut DocNode, path: &[usize], pending: &mut Vec<&str>) {
        if pending.is_empty() {
            return;
        }
        let tokens = tokenize(&pending.join(" "));
        pending.clear();
        if !tokens.is_empty() {
            open_mut(root, path).children.push(DocNode::paragraph(tokens));
        }
    }

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.trim().is_empty() {
            flush(&mut root, &path, &mut pending);
            continue;
        }
        let Some((level, heading_text)) = heading_level(line.trim_start()) else {
            pending.push(line);
            continue;
        };
        flush(&mut root, &path, &mut pending);
        let label = tokenize(heading_text);
        let lineno = lineno + 1;
        let kind = match level {
            1 if !title_seen && !content_seen => {
                root.label = label;
                title_seen = true;
                continue;
            }
            1 => {
                warnings.push(ParseWarning::RepeatedTitle { line: lineno });
                NodeKind::Section
            }
            2 => NodeKind::Section,
            _ if path.is_empty() => {
                warnings.push(ParseWarning::MalformedHeading { line: lineno });
                NodeKind::Section
            }
            _ => NodeKind::Subsection,
        };
        content_seen = true;
        path.truncate(kind.depth() - 1);
        let parent = open_mut(&mut root, &path);
        parent.children.push(DocNode::new(kind, label));
        path.push(parent.children.len() - 1);
    }
    flush(&mut root, &path, &mut pending);

    let doc = Document::new(id, timestamp, root)?;
    Ok((doc, warnings))
}

/// Pre-order list of the non-empty node labels: title, then each heading
/// followed by its content.
pub fn flatten_paragraphs(doc: &Document) -> Vec<Vec<String>> {
    doc.root.preorder().into_iter().filter(|n| !n.label.is_empty()).map(|n| n.label.clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub path: String,
    pub timestamp: i64,
}

/// Documents ordered by `(timestamp, id)`.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new(mut documents: Vec<Document>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(documents.len());
        for d in &documents {
            if d.id.is_empty() {
                return Err(CorpusError::EmptyId);
            }
            if !seen.insert(d.id.as_str()) {
                return Err(CorpusError::DuplicateId(d.id.clone()));
            }
        }
        documents.sort_by(Document::cmp_key);
        Ok(Corpus { documents })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    /// Documents created strictly before `timestamp`.
    pub fn before(&self, timestamp: i64) -> Corpus {
        Corpus { documents: self.documents.iter().filter(|d| d.timestamp < timestamp).cloned().collect() }
    }

    /// Reads `manifest.jsonl` from `dir`; manifest paths are relative to `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self, CorpusError> {
        let manifest = dir.join(MANIFEST_FILE);
        let file = File::open(&manifest).map_err(|e| CorpusError::io(&manifest, e))?;
        let mut documents = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| CorpusError::io(&manifest, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: ManifestEntry =
                serde_json::from_str(&line).map_err(|source| CorpusError::Manifest { line: i + 1, source })?;
            let path = dir.join(&entry.path);
            let text = fs::read_to_string(&path).map_err(|e| CorpusError::io(&path, e))?;
            let mut doc = parse_document(&text, &entry.id, entry.timestamp)?;
            doc.source = Some(path);
            documents.push(doc);
        }
        Corpus::new(documents)
    }

    /// Writes one `docs/<id>.txt` file per document plus the manifest.
    pub fn write_dir(&self, dir: &Path) -> Result<(), CorpusError> {
        let docs_dir = dir.join("docs");
        fs::create_dir_all(&docs_dir).map_err(|e| CorpusError::io(&docs_dir, e))?;
        let manifest = dir.join(MANIFEST_FILE);
        let file = File::create(&manifest).map_err(|e| CorpusError::io(&manifest, e))?;
        let mut out = BufWriter::new(file);
        for doc in &self.documents {
            let rel = format!("docs/{}.txt", doc.id);
            let path = dir.join(&rel);
            fs::write(&path, doc.to_markup()).map_err(|e| CorpusError::io(&path, e))?;
            let entry = ManifestEntry { id: doc.id.clone(), path: rel, timestamp: doc.timestamp };
            let line = serde_json::to_string(&entry).expect("manifest entry serializes");
            writeln!(out, "{line}").map_err(|e| CorpusError::io(&manifest, e))?;
        }
        out.flush().map_err(|e| CorpusError::io(&manifest, e))
    }
}

/// Drops documents with fewer than `min_paragraphs` paragraphs or fewer than
/// `min_words` tokens.
pub fn corpus_filter(corpus: &Corpus, min_paragraphs: usize, min_words: usize) -> Corpus {
    Corpus {
        documents: corpus
            .documents
            .iter()
            .filter(|d| d.paragraph_count() >= min_paragraphs && d.token_count() >= min_words)
            .cloned()
            .collect(),
    }
}

pub const DEFAULT_MIN_PARAGRAPHS: usize = 3;
pub const DEFAULT_MIN_WORDS: usize = 300;
