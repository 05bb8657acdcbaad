use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::PipelineError;
use crate::distances::{DistanceScore, Measure};

/// A candidate revision arc `original -> revision`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Arc {
    pub original: String,
    pub revision: String,
    /// Raw measure output (distance or similarity).
    pub score: f64,
    /// Branching cost: the distance, or `1 - similarity`.
    pub weight: f64,
}

/// Directed graph of surviving pairs. Documents in no pair are left out.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RevisionNetwork {
    pub vertices: BTreeSet<String>,
    pub arcs: Vec<Arc>,
}

impl RevisionNetwork {
    pub fn in_degree(&self, id: &str) -> usize {
        self.arcs.iter().filter(|a| a.revision == id).count()
    }

    /// Kahn's algorithm; `true` when every vertex can be removed.
    pub fn is_acyclic(&self) -> bool {
        let mut indeg: HashMap<&str, usize> = self.vertices.iter().map(|v| (v.as_str(), 0)).collect();
        let mut out: HashMap<&str, Vec<&str>> = HashMap::new();
        for a in &self.arcs {
            *indeg.entry(&a.revision).or_default() += 1;
            indeg.entry(&a.original).or_default();
            out.entry(&a.original).or_default().push(&a.revision);
        }
        let mut ready: Vec<&str> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
        let mut removed = 0;
        while let Some(v) = ready.pop() {
            removed += 1;
            for &w in out.get(v).map(Vec::as_slice).unwrap_or(&[]) {
                let d = indeg.get_mut(w).expect("vertex registered");
                *d -= 1;
                if *d == 0 {
                    ready.push(w);
                }
            }
        }
        removed == indeg.len()
    }
}

/// Builds the network from `(original, revision, score)` triples.
pub fn build_network<'a, I>(pairs: I, measure: Measure) -> RevisionNetwork
where
    I: IntoIterator<Item = (&'a str, &'a str, f64)>,
{
    let mut net = RevisionNetwork::default();
    for (original, revision, score) in pairs {
        net.vertices.insert(original.to_string());
        net.vertices.insert(revision.to_string());
        net.arcs.push(Arc {
            original: original.to_string(),
            revision: revision.to_string(),
            score,
            weight: DistanceScore { value: score, measure }.cost(),
        });
    }
    net
}

/// Minimum-cost branching of an acyclic network.
///
/// In a DAG every choice of at most one incoming arc per vertex is a branching,
/// so the optimum keeps each vertex's cheapest incoming arc. Ties go to the
/// lexicographically smallest original id. Arcs come back sorted by revision id.
pub fn min_branching(net: &RevisionNetwork) -> Result<Vec<Arc>, PipelineError> {
    if !net.is_acyclic() {
        return Err(PipelineError::CyclicNetwork);
    }
    let mut best: BTreeMap<&str, &Arc> = BTreeMap::new();
    for a in &net.arcs {
        match best.get(a.revision.as_str()) {
            Some(b) if (b.weight, &b.original) <= (a.weight, &a.original) => {}
            _ => {
                best.insert(&a.revision, a);
            }
        }
    }
    Ok(best.into_values().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(arcs: &[(&'static str, &'static str, f64)]) -> RevisionNetwork {
        build_network(arcs.iter().copied(), Measure::Wdtw)
    }

    fn chosen(b: &[Arc]) -> Vec<(&str, &str)> {
        b.iter().map(|a| (a.original.as_str(), a.revision.as_str())).collect()
    }

    #[test]
    fn keeps_cheapest_incoming() {
        let n = net(&[("a", "c", 0.4), ("b", "c", 0.2)]);
        assert_eq!(chosen(&min_branching(&n).unwrap()), vec![("b", "c")]);
    }

    #[test]
    fn tie_breaks_to_smallest_original() {
        let n = net(&[("b", "c", 0.2), ("a", "c", 0.2)]);
        assert_eq!(chosen(&min_branching(&n).unwrap()), vec![("a", "c")]);
    }

    #[test]
    fn chain_and_isolated() {
        let n = net(&[("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 5.0)]);
        assert_eq!(chosen(&min_branching(&n).unwrap()), vec![("a", "b"), ("b", "c")]);
        assert_eq!(n.vertices.len(), 3);
        assert!(min_branching(&RevisionNetwork::default()).unwrap().is_empty());
    }

    #[test]
    fn cycle_rejected() {
        let n = net(&[("a", "b", 1.0), ("b", "a", 1.0)]);
        assert_eq!(min_branching(&n), Err(PipelineError::CyclicNetwork));
        assert!(!net(&[("a", "a", 1.0)]).is_acyclic());
    }

    #[test]
    fn similarity_weights() {
        let n = build_network([("a", "b", 0.9), ("c", "b", 0.7)], Measure::Vsm);
        let b = min_branching(&n).unwrap();
        assert_eq!(chosen(&b), vec![("a", "b")]);
        assert_eq!(b[0].score, 0.9);
        assert!((b[0].weight - 0.1).abs() < 1e-15);
    }
}
