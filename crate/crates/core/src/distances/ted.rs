//! Ordered tree edit distance (Zhang-Shasha keyroot decomposition) and the
//! document-tree distance built on it.

use super::dtw::{dist_para, ParaDistMatrix};
use super::DistanceError;
use crate::corpus::{DocNode, Document};
use crate::embeddings::{EmbeddingTable, VectorSequence};

/// Nested tree used to build a [`LabeledTree`].
#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode<L> {
    pub label: L,
    pub children: Vec<TreeNode<L>>,
}

impl<L> TreeNode<L> {
    pub fn leaf(label: L) -> Self {
        TreeNode { label, children: Vec::new() }
    }

    pub fn new(label: L, children: Vec<TreeNode<L>>) -> Self {
        TreeNode { label, children }
    }
}

/// Ordered labeled tree in post-order layout.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTree<L> {
    labels: Vec<L>,
    /// Post-order index of the leftmost leaf below each node.
    lml: Vec<usize>,
    /// Nodes with no later node sharing their leftmost leaf, ascending.
    keyroots: Vec<usize>,
    /// Pre-order rank of each post-order node.
    preorder: Vec<usize>,
}

impl<L: Clone> LabeledTree<L> {
    pub fn new(root: &TreeNode<L>) -> Self {
        Self::from_nested(root, |n| n.label.clone(), |n| &n.children)
    }
}

impl<L> LabeledTree<L> {
    /// Builds from any nested structure given label and children accessors.
    pub fn from_nested<N>(root: &N, label: impl Fn(&N) -> L, children: impl Fn(&N) -> &[N]) -> Self {
        let mut tree = LabeledTree { labels: Vec::new(), lml: Vec::new(), keyroots: Vec::new(), preorder: Vec::new() };
        let mut next_pre = 0;
        fn visit<N, L>(
            node: &N,
            label: &impl Fn(&N) -> L,
            children: &impl Fn(&N) -> &[N],
            tree: &mut LabeledTree<L>,
            next_pre: &mut usize,
        ) -> usize {
            let pre = *next_pre;
            *next_pre += 1;
            let mut leftmost = None;
            for c in children(node) {
                let idx = visit(c, label, children, tree, next_pre);
                leftmost.get_or_insert(tree.lml[idx]);
            }
            let idx = tree.labels.len();
            tree.labels.push(label(node));
            tree.lml.push(leftmost.unwrap_or(idx));
            tree.preorder.push(pre);
            idx
        }
        visit(root, &label, &children, &mut tree, &mut next_pre);

        let n = tree.labels.len();
        let mut highest = vec![usize::MAX; n];
        for i in 0..n {
            highest[tree.lml[i]] = i;
        }
        tree.keyroots = (0..n).filter(|&i| highest[tree.lml[i]] == i).collect();
        tree
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Labels in post-order.
    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    /// Labels in pre-order (document reading order).
    pub fn preorder_labels(&self) -> Vec<&L> {
        let mut out: Vec<(usize, &L)> = self.preorder.iter().copied().zip(&self.labels).collect();
        out.sort_unstable_by_key(|&(p, _)| p);
        out.into_iter().map(|(_, l)| l).collect()
    }

    pub fn map<M>(&self, f: impl Fn(&L) -> M) -> LabeledTree<M> {
        LabeledTree {
            labels: self.labels.iter().map(f).collect(),
            lml: self.lml.clone(),
            keyroots: self.keyroots.clone(),
            preorder: self.preorder.clone(),
        }
    }
}

const DEL: u8 = 0;
const INS: u8 = 1;
const REL: u8 = 2;
const SUB: u8 = 3;

/// Zhang-Shasha forest-distance DP over node indices. With `trace`, also returns
/// the relabeled pairs `(i, j)` of one optimal mapping.
fn zhang_shasha<A, B>(
    t1: &LabeledTree<A>,
    t2: &LabeledTree<B>,
    del: &[f64],
    ins: &[f64],
    relabel: &mut impl FnMut(usize, usize) -> f64,
    trace: bool,
) -> (f64, Vec<(usize, usize)>) {
    let (n1, n2) = (t1.len(), t2.len());
    let (l1, l2) = (&t1.lml, &t2.lml);
    let mut td = vec![0.0; n1 * n2];
    let mut td_pairs: Vec<Vec<(usize, usize)>> = if trace { vec![Vec::new(); n1 * n2] } else { Vec::new() };
    let mut fd = vec![0.0; (n1 + 1) * (n2 + 1)];
    let mut op = vec![DEL; if trace { (n1 + 1) * (n2 + 1) } else { 0 }];

    for &k1 in &t1.keyroots {
        for &k2 in &t2.keyroots {
            let (i0, j0) = (l1[k1], l2[k2]);
            let rows = k1 - i0 + 2;
            let cols = k2 - j0 + 2;
            let at = |x: usize, y: usize| x * cols + y;

            fd[0] = 0.0;
            for x in 1..rows {
                fd[at(x, 0)] = fd[at(x - 1, 0)] + del[i0 + x - 1];
                if trace {
                    op[at(x, 0)] = DEL;
                }
            }
            for y in 1..cols {
                fd[at(0, y)] = fd[at(0, y - 1)] + ins[j0 + y - 1];
                if trace {
                    op[at(0, y)] = INS;
                }
            }
            for x in 1..rows {
                let i = i0 + x - 1;
                for y in 1..cols {
                    let j = j0 + y - 1;
                    let mut best = fd[at(x - 1, y)] + del[i];
                    let mut how = DEL;
                    let insert = fd[at(x, y - 1)] + ins[j];
                    if insert < best {
                        best = insert;
                        how = INS;
                    }
                    let both_on_path = l1[i] == i0 && l2[j] == j0;
                    let (diag, kind) = if both_on_path {
                        (fd[at(x - 1, y - 1)] + relabel(i, j), REL)
                    } else {
                        (fd[at(l1[i] - i0, l2[j] - j0)] + td[i * n2 + j], SUB)
                    };
                    if diag < best {
                        best = diag;
                        how = kind;
                    }
                    fd[at(x, y)] = best;
                    if trace {
                        op[at(x, y)] = how;
                    }
                    if both_on_path {
                        td[i * n2 + j] = best;
                        if trace {
                            let mut pairs = Vec::new();
                            let (mut cx, mut cy) = (x, y);
                            while cx > 0 || cy > 0 {
                                match op[at(cx, cy)] {
                                    DEL => cx -= 1,
                                    INS => cy -= 1,
                                    REL => {
                                        pairs.push((i0 + cx - 1, j0 + cy - 1));
                                        cx -= 1;
                                        cy -= 1;
                                    }
                                    _ => {
                                        let (ii, jj) = (i0 + cx - 1, j0 + cy - 1);
                                        pairs.extend_from_slice(&td_pairs[ii * n2 + jj]);
                                        cx = l1[ii] - i0;
                                        cy = l2[jj] - j0;
                                    }
                                }
                            }
                            td_pairs[i * n2 + j] = pairs;
                        }
                    }
                }
            }
        }
    }
    let root = (n1 - 1) * n2 + (n2 - 1);
    let pairs = if trace { std::mem::take(&mut td_pairs[root]) } else { Vec::new() };
    (td[root], pairs)
}

/// Minimal cost of an ordered edit mapping between two trees.
///
/// An unmapped node of `t1` costs `del(label)`, an unmapped node of `t2` costs
/// `ins(label)` and a mapped pair costs `relabel(a, b)`.
pub fn ordered_ted<A, B>(
    t1: &LabeledTree<A>,
    t2: &LabeledTree<B>,
    del: impl Fn(&A) -> f64,
    ins: impl Fn(&B) -> f64,
    mut relabel: impl FnMut(&A, &B) -> f64,
) -> Result<f64, DistanceError> {
    if t1.is_empty() || t2.is_empty() {
        return Err(DistanceError::EmptyTree);
    }
    let del: Vec<f64> = t1.labels.iter().map(del).collect();
    let ins: Vec<f64> = t2.labels.iter().map(ins).collect();
    let mut cost = |i: usize, j: usize| relabel(&t1.labels[i], &t2.labels[j]);
    Ok(zhang_shasha(t1, t2, &del, &ins, &mut cost, false).0)
}

/// Document tree whose labels are embedded token sequences.
pub type DocTree = LabeledTree<VectorSequence>;

/// Mirrors the document's section tree, embedding every label.
pub fn build_doc_tree(doc: &Document, table: &EmbeddingTable) -> DocTree {
    LabeledTree::from_nested(&doc.root, |n: &DocNode| table.embed(&n.label), |n| &n.children)
}

fn check_tree_dims(t1: &DocTree, t2: &DocTree) -> Result<(), DistanceError> {
    let mut dim = None;
    for l in t1.labels.iter().chain(&t2.labels).filter(|l| !l.is_empty()) {
        match dim {
            None => dim = Some(l.dim()),
            Some(d) if d != l.dim() => return Err(DistanceError::DimensionMismatch(d, l.dim())),
            _ => {}
        }
    }
    Ok(())
}

/// Tree edit distance between document trees: relabel costs `dist_para`,
/// insert and delete cost the label's summed vector norms.
///
/// Relabel costs are evaluated lazily. The DP first runs with every unknown
/// relabel cost at its lower bound 0; the paragraph distances used by the
/// resulting optimal mapping are then computed and the DP repeated, until the
/// optimal mapping only uses known costs. At that point its cost is exact.
pub fn wted(t1: &DocTree, t2: &DocTree) -> Result<f64, DistanceError> {
    if t1.is_empty() || t2.is_empty() {
        return Err(DistanceError::EmptyTree);
    }
    check_tree_dims(t1, t2)?;
    let del: Vec<f64> = t1.labels.iter().map(VectorSequence::norm_sum).collect();
    let ins: Vec<f64> = t2.labels.iter().map(VectorSequence::norm_sum).collect();
    let n2 = t2.len();
    let mut known: Vec<Option<f64>> = vec![None; t1.len() * n2];
    loop {
        let (cost, pairs) = {
            let mut lower = |i: usize, j: usize| known[i * n2 + j].unwrap_or(0.0);
            zhang_shasha(t1, t2, &del, &ins, &mut lower, true)
        };
        let mut resolved_any = false;
        for (i, j) in pairs {
            let slot = &mut known[i * n2 + j];
            if slot.is_none() {
                *slot = Some(dist_para(&t1.labels[i], &t2.labels[j])?);
                resolved_any = true;
            }
        }
        if !resolved_any {
            return Ok(cost);
        }
    }
}

/// [`wted`] with every relabel cost read from a precomputed matrix whose rows and
/// columns are the trees' nodes in pre-order (empty labels included).
pub fn wted_with_matrix(t1: &DocTree, t2: &DocTree, m: &ParaDistMatrix) -> Result<f64, DistanceError> {
    if t1.is_empty() || t2.is_empty() {
        return Err(DistanceError::EmptyTree);
    }
    if m.shape() != (t1.len(), t2.len()) {
        return Err(DistanceError::ShapeMismatch { got: m.shape(), expected: (t1.len(), t2.len()) });
    }
    let del: Vec<f64> = t1.preorder.iter().map(|&p| m.row_cost(p)).collect();
    let ins: Vec<f64> = t2.preorder.iter().map(|&p| m.col_cost(p)).collect();
    let mut cost = |i: usize, j: usize| m.get(t1.preorder[i], t2.preorder[j]);
    Ok(zhang_shasha(t1, t2, &del, &ins, &mut cost, false).0)
}
