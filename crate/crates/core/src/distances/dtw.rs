use rayon::prelude::*;

use super::DistanceError;
use crate::embeddings::VectorSequence;

/// DTW over an `m x n` grid of cell costs.
///
/// `D(0,0) = 0`, the rest of row 0 and column 0 is `+inf`, and
/// `D(i,j) = cost(i-1,j-1) + min(D(i-1,j), D(i,j-1), D(i-1,j-1))`.
/// Returns `D(m,n)`, which is `+inf` when either side is empty.
pub fn dtw_grid(m: usize, n: usize, mut cost: impl FnMut(usize, usize) -> f64) -> f64 {
    if m == 0 || n == 0 {
        return if m == n { 0.0 } else { f64::INFINITY };
    }
    let mut prev = vec![f64::INFINITY; n + 1];
    let mut cur = vec![f64::INFINITY; n + 1];
    prev[0] = 0.0;
    for i in 1..=m {
        cur[0] = f64::INFINITY;
        for j in 1..=n {
            let best = prev[j].min(cur[j - 1]).min(prev[j - 1]);
            cur[j] = cost(i - 1, j - 1) + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[n]
}

#[inline]
fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Paragraph distance: DTW over word vectors with Euclidean word cost.
///
/// When exactly one side is empty the result is the other side's summed vector
/// norms (its insertion cost); two empty sequences are at distance 0.
pub fn dist_para(p: &VectorSequence, q: &VectorSequence) -> Result<f64, DistanceError> {
    match (p.is_empty(), q.is_empty()) {
        (true, true) => return Ok(0.0),
        (true, false) => return Ok(q.norm_sum()),
        (false, true) => return Ok(p.norm_sum()),
        (false, false) => {}
    }
    if p.dim() != q.dim() {
        return Err(DistanceError::DimensionMismatch(p.dim(), q.dim()));
    }
    // Identical sequences align on the diagonal at zero cost.
    if p == q {
        return Ok(0.0);
    }
    Ok(dtw_grid(p.len(), q.len(), |i, j| euclidean(p.get(i), q.get(j))))
}

/// All pairwise `dist_para` values between the units of two documents, plus
/// each unit's empty-cost.
#[derive(Debug, Clone, PartialEq)]
pub struct ParaDistMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    row_costs: Vec<f64>,
    col_costs: Vec<f64>,
}

impl ParaDistMatrix {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    /// Empty-cost (summed norms) of unit `i` of the first document.
    pub fn row_cost(&self, i: usize) -> f64 {
        self.row_costs[i]
    }

    pub fn col_cost(&self, j: usize) -> f64 {
        self.col_costs[j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn check_dims<'a>(units: impl IntoIterator<Item = &'a VectorSequence>) -> Result<Option<usize>, DistanceError> {
    let mut dim = None;
    for u in units {
        if u.is_empty() {
            continue;
        }
        match dim {
            None => dim = Some(u.dim()),
            Some(d) if d != u.dim() => return Err(DistanceError::DimensionMismatch(d, u.dim())),
            _ => {}
        }
    }
    Ok(dim)
}

fn matrix_row(p: &VectorSequence, d2: &[VectorSequence], out: &mut [f64]) {
    for (cell, q) in out.iter_mut().zip(d2) {
        *cell = dist_para(p, q).expect("dimensions checked");
    }
}

fn matrix_frame(d1: &[VectorSequence], d2: &[VectorSequence]) -> Result<ParaDistMatrix, DistanceError> {
    if d1.is_empty() || d2.is_empty() {
        return Err(DistanceError::EmptyDocument);
    }
    check_dims(d1.iter().chain(d2))?;
    Ok(ParaDistMatrix {
        rows: d1.len(),
        cols: d2.len(),
        values: vec![0.0; d1.len() * d2.len()],
        row_costs: d1.iter().map(VectorSequence::norm_sum).collect(),
        col_costs: d2.iter().map(VectorSequence::norm_sum).collect(),
    })
}

pub fn para_dist_matrix(d1: &[VectorSequence], d2: &[VectorSequence]) -> Result<ParaDistMatrix, DistanceError> {
    let mut m = matrix_frame(d1, d2)?;
    for (p, row) in d1.iter().zip(m.values.chunks_mut(d2.len())) {
        matrix_row(p, d2, row);
    }
    Ok(m)
}

/// Same as [`para_dist_matrix`], rows distributed over `pool`. Each cell is
/// written once by a pure computation, so the result does not depend on the
/// number of workers.
pub fn para_dist_matrix_in(
    pool: &rayon::ThreadPool,
    d1: &[VectorSequence],
    d2: &[VectorSequence],
) -> Result<ParaDistMatrix, DistanceError> {
    let mut m = matrix_frame(d1, d2)?;
    pool.install(|| {
        m.values.par_chunks_mut(d2.len()).zip(d1.par_iter()).for_each(|(row, p)| matrix_row(p, d2, row));
    });
    Ok(m)
}

/// Document distance: DTW over paragraphs with `dist_para` as the cell cost.
///
/// `pre`, when given, must be the matrix of `(d1, d2)` and is used in place of
/// recomputing cell costs; the result is identical either way.
pub fn wdtw(d1: &[VectorSequence], d2: &[VectorSequence], pre: Option<&ParaDistMatrix>) -> Result<f64, DistanceError> {
    if d1.is_empty() || d2.is_empty() {
        return Err(DistanceError::EmptyDocument);
    }
    match pre {
        Some(m) => {
            if m.shape() != (d1.len(), d2.len()) {
                return Err(DistanceError::ShapeMismatch { got: m.shape(), expected: (d1.len(), d2.len()) });
            }
            Ok(dtw_grid(d1.len(), d2.len(), |i, j| m.get(i, j)))
        }
        None => {
            check_dims(d1.iter().chain(d2))?;
            Ok(dtw_grid(d1.len(), d2.len(), |i, j| dist_para(&d1[i], &d2[j]).expect("dimensions checked")))
        }
    }
}
