//! Document distance and similarity measures.
//!
//! * [`dist_para`]: DTW between two paragraphs with Euclidean word cost.
//! * [`wdtw`]: DTW over paragraphs using `dist_para` as the cell cost.
//! * [`wted`]: ordered tree edit distance over the document tree, relabel cost
//!   `dist_para`, insert/delete cost the label's summed vector norms.
//! * [`TfIdfModel`]: tf-idf cosine similarity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod dtw;
mod ted;
mod vsm;

pub use dtw::{dist_para, dtw_grid, para_dist_matrix, para_dist_matrix_in, wdtw, ParaDistMatrix};
pub use ted::{build_doc_tree, ordered_ted, wted, wted_with_matrix, DocTree, LabeledTree, TreeNode};
pub use vsm::{TfIdfModel, IDF_CONVENTION};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum DistanceError {
    #[error("vector dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("document has no paragraphs")]
    EmptyDocument,
    #[error("tree has no nodes")]
    EmptyTree,
    #[error("precomputed matrix is {got:?}, expected {expected:?}")]
    ShapeMismatch { got: (usize, usize), expected: (usize, usize) },
    #[error("unknown document {0:?}")]
    UnknownDocument(String),
}

/// The measure used by the strong filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Wdtw,
    Wted,
    Vsm,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Vsm, Measure::Wted, Measure::Wdtw];

    /// VSM scores are similarities (higher is closer); the others are distances.
    pub fn is_similarity(self) -> bool {
        matches!(self, Measure::Vsm)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Wdtw => "wdtw",
            Measure::Wted => "wted",
            Measure::Vsm => "vsm",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "wdtw" => Ok(Measure::Wdtw),
            "wted" => Ok(Measure::Wted),
            "vsm" => Ok(Measure::Vsm),
            other => Err(format!("unknown measure {other:?} (expected wdtw, wted or vsm)")),
        }
    }
}

/// A score tagged with the measure that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceScore {
    pub value: f64,
    pub measure: Measure,
}

impl DistanceScore {
    /// Cost used for branching: distances as-is, similarities as `1 - s`.
    pub fn cost(&self) -> f64 {
        if self.measure.is_similarity() {
            1.0 - self.value
        } else {
            self.value
        }
    }
}
