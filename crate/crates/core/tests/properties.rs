mod common;

use std::collections::{BTreeSet, HashMap};

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use revdet::corpus::Corpus;
use revdet::distances::{dist_para, Measure, TfIdfModel};
use revdet::embeddings::EmbeddingTable;
use revdet::evaluation::evaluate;
use revdet::pipeline::{build_network, calibrate_tau, detect, passes_strong, PipelineConfig, Threshold};
use revdet::simulator::{simulate, SimConfig, TextPool};

fn small_corpus(seed: u64) -> (Corpus, EmbeddingTable) {
    let cfg = SimConfig { lambda: 4.0, periods: 2, seed, ..Default::default() };
    let sim = simulate(&cfg, &TextPool::bundled()).unwrap();
    let table = EmbeddingTable::pseudo(sim.corpus.documents().iter().flat_map(|d| d.tokens()), 8, seed);
    (sim.corpus, table)
}

fn pair_set() -> impl Strategy<Value = Vec<(u8, u8)>> {
    prop::collection::vec((0u8..6, 0u8..6), 0..12)
}

proptest! {
    #[test]
    fn dist_para_symmetric_nonnegative(seed in any::<u64>(), m in 0usize..6, n in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_vectors(&mut rng, m, 3);
        let q = random_vectors(&mut rng, n, 3);
        let (a, b) = (seq(&p, 3), seq(&q, 3));
        let ab = dist_para(&a, &b).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, dist_para(&b, &a).unwrap());
        prop_assert_eq!(dist_para(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn vsm_bounded_and_symmetric(docs in prop::collection::vec(prop::collection::vec("[a-e]", 0..8), 1..6)) {
        let model = TfIdfModel::fit(docs.iter().enumerate().map(|(k, d)| (k.to_string(), d)));
        for i in 0..docs.len() {
            for j in 0..docs.len() {
                let s = model.similarity_at(i, j);
                prop_assert!((0.0..=1.0).contains(&s));
                prop_assert_eq!(s, model.similarity_at(j, i));
            }
        }
    }

    #[test]
    fn evaluate_invariants(found in pair_set(), truth in pair_set(), shift in 1u8..50) {
        let name = |(a, b): &(u8, u8)| (a.to_string(), b.to_string());
        let f: Vec<_> = found.iter().map(name).collect();
        let t: Vec<_> = truth.iter().map(name).collect();
        let s = evaluate(&f, &t);
        let distinct: BTreeSet<_> = f.iter().collect();
        prop_assert_eq!(s.tp + s.fp, distinct.len());
        prop_assert!(s.f1 <= s.precision.max(s.recall) + 1e-12);
        prop_assert!(s.f1 + 1e-12 >= s.precision.min(s.recall));
        // Renaming ids with a bijection changes nothing.
        let rename = |(a, b): &(u8, u8)| (format!("x{}", a + shift), format!("x{}", b + shift));
        let f2: Vec<_> = found.iter().map(rename).collect();
        let t2: Vec<_> = truth.iter().map(rename).collect();
        prop_assert_eq!(evaluate(&f2, &t2), s);
    }

    #[test]
    fn calibrated_tau_within_score_range(scores in prop::collection::vec(-5.0..5.0f64, 2..300)) {
        let c = calibrate_tau(&scores, 50, 5).unwrap();
        let lo = scores.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(c.tau >= lo && c.tau <= hi);
    }

    #[test]
    fn strong_filter_is_monotone_in_tau(score in 0.0..10.0f64, t1 in 0.0..10.0f64, t2 in 0.0..10.0f64) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        // Distances: a looser (larger) threshold keeps at least as much.
        prop_assert!(!passes_strong(Measure::Wdtw, score, lo) || passes_strong(Measure::Wdtw, score, hi));
        // Similarities: a looser (smaller) threshold keeps at least as much.
        prop_assert!(!passes_strong(Measure::Vsm, score, hi) || passes_strong(Measure::Vsm, score, lo));
    }

    #[test]
    fn branching_keeps_at_most_one_parent(seed in any::<u64>(), n in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arcs = random_dag(&mut rng, n);
        let ids: Vec<String> = (0..n).map(vertex_id).collect();
        let net = build_network(arcs.iter().map(|&(u, v, w)| (ids[u].as_str(), ids[v].as_str(), w)), Measure::Wdtw);
        let b = revdet::pipeline::min_branching(&net).unwrap();
        let mut parents: HashMap<&str, usize> = HashMap::new();
        for a in &b {
            *parents.entry(a.revision.as_str()).or_default() += 1;
            prop_assert!(net.arcs.iter().any(|x| x.original == a.original && x.revision == a.revision));
        }
        prop_assert!(parents.values().all(|&c| c == 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn detection_ignores_input_order(seed in 0u64..1000, shuffle in any::<u64>(), m in 0usize..3) {
        let (corpus, table) = small_corpus(seed);
        let mut docs = corpus.documents().to_vec();
        docs.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        let shuffled = Corpus::new(docs).unwrap();
        let cfg = PipelineConfig { measure: Measure::ALL[m], workers: 1, ..Default::default() };
        let a = detect(&corpus, &table, &cfg).unwrap();
        let b = detect(&shuffled, &table, &cfg).unwrap();
        prop_assert_eq!(a.pairs_csv(), b.pairs_csv());
    }

    #[test]
    fn strong_survivors_grow_with_looser_tau(seed in 0u64..1000, t1 in 0.0..40.0f64, t2 in 0.0..40.0f64) {
        let (corpus, table) = small_corpus(seed);
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let kept = |tau: f64| {
            let cfg = PipelineConfig { measure: Measure::Wdtw, strong_threshold: Threshold::Fixed(tau), workers: 1, ..Default::default() };
            detect(&corpus, &table, &cfg).unwrap().report.counts.strong_kept
        };
        prop_assert!(kept(lo) <= kept(hi));
    }
}
