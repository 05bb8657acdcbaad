use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use revdet::simulator::{
    generate_document, revise_document, simulate, EditAction, EditUnit, OpWeights, SimConfig, SimDocument, TextPool,
    PERIOD,
};

fn paragraphs(d: &SimDocument) -> Vec<&Vec<Vec<String>>> {
    d.sections.iter().flat_map(|s| &s.paragraphs).collect()
}

#[test]
fn new_documents_follow_poisson_mean() {
    let lambda = 20.0;
    let pool = TextPool::bundled();
    let (mut new, mut revised) = (0usize, 0usize);
    for seed in 0..200 {
        let sim = simulate(&SimConfig { lambda, periods: 1, seed, ..Default::default() }, &pool).unwrap();
        let added = sim.corpus.documents().iter().filter(|d| d.timestamp >= PERIOD).count();
        new += added - sim.ground_truth.len();
        revised += sim.ground_truth.len();
    }
    let (new, revised) = (new as f64 / 200.0, revised as f64 / 200.0);
    assert!((new - lambda).abs() <= 0.1 * lambda, "mean new documents {new}");
    assert!((revised - 0.5 * lambda).abs() <= 0.1 * 0.5 * lambda, "mean revisions {revised}");
}

#[test]
fn pinned_small_run() {
    let sim =
        simulate(&SimConfig { lambda: 2.0, periods: 1, seed: 7, ..Default::default() }, &TextPool::bundled()).unwrap();
    let ids: Vec<&str> = sim.corpus.documents().iter().map(|d| d.id.as_str()).collect();
    assert_eq!(ids, ["d00000", "d00001", "d00002", "d00003"]);
    assert_eq!(sim.truth_pairs(), [("d00001".to_string(), "d00002".to_string())]);
}

#[test]
fn title_replacement_touches_only_the_title() {
    let pool = TextPool::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let weights = OpWeights::only(EditUnit::Title, EditAction::Replace);
    for _ in 0..30 {
        let doc = generate_document(&mut rng, &pool);
        let (rev, log) = revise_document(&mut rng, &pool, &doc, &weights);
        assert!(log.iter().all(|op| op.unit == EditUnit::Title && op.action == EditAction::Replace));
        assert_eq!(rev.sections, doc.sections);
        assert_ne!(rev.title, doc.title);
    }
}

#[test]
fn few_edits_change_few_paragraphs() {
    let pool = TextPool::bundled();
    let sim = simulate(&SimConfig { lambda: 30.0, periods: 3, seed: 5, ..Default::default() }, &pool).unwrap();
    let mut checked = 0;
    for (g, log) in sim.ground_truth.iter().zip(&sim.edit_logs) {
        if log.len() > 3 {
            continue;
        }
        let text = |id: &str| {
            let d = sim.corpus.get(id).unwrap();
            revdet::corpus::flatten_paragraphs(d)
        };
        let mut before: HashMap<Vec<String>, usize> = HashMap::new();
        for p in text(&g.original_id) {
            *before.entry(p).or_default() += 1;
        }
        let mut fresh = 0;
        for p in text(&g.revision_id) {
            match before.get_mut(&p) {
                Some(n) if *n > 0 => *n -= 1,
                _ => fresh += 1,
            }
        }
        assert!(fresh <= log.len(), "{}: {fresh} new paragraphs from {} edits", g.revision_id, log.len());
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn single_sentence_pool() {
    let pool = TextPool::from_text("The mill stood by the river.\n").unwrap();
    let sentence = vec!["the", "mill", "stood", "by", "the", "river"];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let d = generate_document(&mut rng, &pool);
        assert!(d.word_count() >= 300);
        for p in paragraphs(&d) {
            assert!(!p.is_empty());
            assert!(p.iter().all(|s| *s == sentence));
        }
    }
}

#[test]
fn revision_relation_is_a_forest() {
    let sim =
        simulate(&SimConfig { lambda: 25.0, periods: 4, seed: 8, ..Default::default() }, &TextPool::bundled()).unwrap();
    let mut parent = HashMap::new();
    for g in &sim.ground_truth {
        assert!(parent.insert(g.revision_id.as_str(), g.original_id.as_str()).is_none());
        let (o, r) = (sim.corpus.get(&g.original_id).unwrap(), sim.corpus.get(&g.revision_id).unwrap());
        assert!(o.timestamp < r.timestamp);
    }
    // Parents are strictly older, so walking up always terminates at a root.
    for &start in parent.keys() {
        let mut seen = HashSet::new();
        let mut v = start;
        while let Some(&p) = parent.get(v) {
            assert!(seen.insert(v));
            v = p;
        }
    }
}

fn collect(root: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
    for e in std::fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.is_dir() {
            collect(root, &path, out);
        } else {
            out.push((path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap()));
        }
    }
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SimConfig { lambda: 8.0, periods: 3, seed: 21, ..Default::default() };
    let mut listings = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(run.to_string());
        simulate(&cfg, &TextPool::bundled()).unwrap().write_dir(&out).unwrap();
        let mut files = Vec::new();
        collect(&out, &out, &mut files);
        files.sort();
        listings.push(files);
    }
    assert!(listings[0].len() > 3);
    assert_eq!(listings[0], listings[1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn revisions_keep_structure_valid(seed in any::<u64>()) {
        let pool = TextPool::bundled();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let doc = generate_document(&mut rng, &pool);
        let (rev, log) = revise_document(&mut rng, &pool, &doc, &OpWeights::default());
        prop_assert!((1..=10).contains(&log.len()));
        prop_assert!(rev.paragraph_count() >= 1);
        prop_assert!(!rev.sections.is_empty());
        prop_assert!(paragraphs(&rev).iter().all(|p| !p.is_empty() && p.iter().all(|s| !s.is_empty())));
        prop_assert!(rev.to_document("r", 1).is_ok());
    }
}
