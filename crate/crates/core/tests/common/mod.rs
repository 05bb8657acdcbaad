#![allow(dead_code)]

use rand::Rng;
use revdet::distances::TreeNode;
use revdet::embeddings::VectorSequence;

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Minimum over every monotone warping path from (0,0) to (m-1,n-1), by
/// explicit path enumeration.
pub fn brute_dtw(p: &[Vec<f64>], q: &[Vec<f64>]) -> f64 {
    if p.is_empty() && q.is_empty() {
        return 0.0;
    }
    if p.is_empty() {
        return q.iter().map(|v| norm(v)).sum();
    }
    if q.is_empty() {
        return p.iter().map(|v| norm(v)).sum();
    }
    fn walk(p: &[Vec<f64>], q: &[Vec<f64>], i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + euclid(&p[i], &q[j]);
        if i + 1 == p.len() && j + 1 == q.len() {
            *best = best.min(acc);
            return;
        }
        if i + 1 < p.len() {
            walk(p, q, i + 1, j, acc, best);
        }
        if j + 1 < q.len() {
            walk(p, q, i, j + 1, acc, best);
        }
        if i + 1 < p.len() && j + 1 < q.len() {
            walk(p, q, i + 1, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(p, q, 0, 0, 0.0, &mut best);
    best
}

pub fn random_vectors<R: Rng>(rng: &mut R, len: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..len).map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()).collect()
}

pub fn seq(rows: &[Vec<f64>], dim: usize) -> VectorSequence {
    VectorSequence::from_rows(dim, rows)
}

/// Flat pre-order view of a nested tree: labels, parents, subtree ends.
pub struct FlatTree {
    pub labels: Vec<Vec<f64>>,
    /// Pre-order index one past the node's last descendant.
    pub end: Vec<usize>,
}

impl FlatTree {
    pub fn new(root: &TreeNode<Vec<f64>>) -> Self {
        fn visit(n: &TreeNode<Vec<f64>>, t: &mut FlatTree) {
            let me = t.labels.len();
            t.labels.push(n.label.clone());
            t.end.push(0);
            for c in &n.children {
                visit(c, t);
            }
            t.end[me] = t.labels.len();
        }
        let mut t = FlatTree { labels: Vec::new(), end: Vec::new() };
        visit(root, &mut t);
        t
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        a < b && b < self.end[a]
    }
}

/// Ordered tree edit distance by enumerating every valid edit mapping: a
/// one-to-one node matching that preserves ancestry and left-to-right order.
/// Mapped pairs cost the Euclidean distance of their labels, unmapped nodes
/// the label norm.
pub fn brute_ted(t1: &FlatTree, t2: &FlatTree) -> f64 {
    fn compatible(t1: &FlatTree, t2: &FlatTree, a: (usize, usize), b: (usize, usize)) -> bool {
        let (i1, j1) = a;
        let (i2, j2) = b;
        if i1 == i2 || j1 == j2 {
            return false;
        }
        // Pre-order ranks encode left-to-right order for non-ancestral pairs.
        (t1.is_ancestor(i1, i2) == t2.is_ancestor(j1, j2))
            && (t1.is_ancestor(i2, i1) == t2.is_ancestor(j2, j1))
            && ((i1 < i2) == (j1 < j2))
    }
    fn go(
        t1: &FlatTree,
        t2: &FlatTree,
        i: usize,
        mapping: &mut Vec<(usize, usize)>,
        used: &mut Vec<bool>,
        best: &mut f64,
    ) {
        if i == t1.len() {
            let mut cost = 0.0;
            for &(a, b) in mapping.iter() {
                cost += euclid(&t1.labels[a], &t2.labels[b]);
            }
            let mapped1: Vec<usize> = mapping.iter().map(|p| p.0).collect();
            for a in 0..t1.len() {
                if !mapped1.contains(&a) {
                    cost += norm(&t1.labels[a]);
                }
            }
            for (label, &u) in t2.labels.iter().zip(used.iter()) {
                if !u {
                    cost += norm(label);
                }
            }
            *best = best.min(cost);
            return;
        }
        go(t1, t2, i + 1, mapping, used, best);
        for j in 0..t2.len() {
            if used[j] || !mapping.iter().all(|&m| compatible(t1, t2, m, (i, j))) {
                continue;
            }
            used[j] = true;
            mapping.push((i, j));
            go(t1, t2, i + 1, mapping, used, best);
            mapping.pop();
            used[j] = false;
        }
    }
    let mut best = f64::INFINITY;
    go(t1, t2, 0, &mut Vec::new(), &mut vec![false; t2.len()], &mut best);
    best
}

/// Random ordered tree with `n` nodes and single-vector labels.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, dim: usize) -> TreeNode<Vec<f64>> {
    // Attach node k to a uniformly chosen earlier node, appended as last child.
    let mut parent = vec![usize::MAX; n];
    for (k, p) in parent.iter_mut().enumerate().skip(1) {
        *p = rng.random_range(0..k);
    }
    let labels: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    fn build(k: usize, parent: &[usize], labels: &[Vec<f64>]) -> TreeNode<Vec<f64>> {
        let children = (0..parent.len()).filter(|&c| parent[c] == k).map(|c| build(c, parent, labels)).collect();
        TreeNode::new(labels[k].clone(), children)
    }
    build(0, &parent, &labels)
}

pub fn to_seq_tree(t: &TreeNode<Vec<f64>>, dim: usize) -> TreeNode<VectorSequence> {
    TreeNode::new(
        VectorSequence::from_rows(dim, std::slice::from_ref(&t.label)),
        t.children.iter().map(|c| to_seq_tree(c, dim)).collect(),
    )
}

/// Random DAG over `n` vertices: arcs only go from lower to higher index.
pub fn random_dag<R: Rng>(rng: &mut R, n: usize) -> Vec<(usize, usize, f64)> {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.4) {
                // Coarse weights so ties actually occur.
                arcs.push((u, v, f64::from(rng.random_range(0..8u8)) / 4.0));
            }
        }
    }
    arcs
}

/// Minimum total weight over every way of keeping exactly one incoming arc
/// per vertex that has any.
pub fn brute_branching(n: usize, arcs: &[(usize, usize, f64)]) -> f64 {
    let incoming: Vec<Vec<f64>> = (0..n).map(|v| arcs.iter().filter(|a| a.1 == v).map(|a| a.2).collect()).collect();
    let heads: Vec<&Vec<f64>> = incoming.iter().filter(|w| !w.is_empty()).collect();
    fn go(heads: &[&Vec<f64>], k: usize, acc: f64, best: &mut f64) {
        if k == heads.len() {
            *best = best.min(acc);
            return;
        }
        for &w in heads[k].iter() {
            go(heads, k + 1, acc + w, best);
        }
    }
    let mut best = f64::INFINITY;
    go(&heads, 0, 0.0, &mut best);
    if heads.is_empty() {
        0.0
    } else {
        best
    }
}

pub fn vertex_id(v: usize) -> String {
    format!("v{v}")
}
