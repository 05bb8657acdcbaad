use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use revdet::corpus::{corpus_filter, parse_document, Corpus, DEFAULT_MIN_PARAGRAPHS, DEFAULT_MIN_WORDS};
use revdet::distances::{build_doc_tree, wdtw, wted, Measure, TfIdfModel};
use revdet::embeddings::EmbeddingTable;
use revdet::evaluation::{benchmark, comparison_csv, evaluate, read_pairs_csv};
use revdet::pipeline::{calibrate_prepared, detect_prepared, PipelineConfig, PreparedCorpus, Threshold};
use revdet::simulator::{simulate, SimConfig, TextPool};

#[derive(Parser)]
#[command(name = "revdet", version, about = "Detect document revisions in a corpus")]
struct Cli {
    /// Worker threads for pair scoring (defaults to available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Use deterministic pseudo embeddings instead of an embedding file.
    #[arg(long, global = true, value_name = "DIM,SEED", value_parser = parse_pseudo)]
    pseudo_embeddings: Option<(usize, u64)>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus with ground truth.
    Simulate(SimulateArgs),
    /// Detect revision pairs in a corpus.
    Detect(DetectArgs),
    /// Estimate the strong-filter threshold and export the score histogram.
    Calibrate(CalibrateArgs),
    /// Score predicted pairs against ground truth.
    Eval(EvalArgs),
    /// Print the score between two documents.
    Dist(DistArgs),
    /// Run detection with several measures and compare them.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 550.0)]
    lambda: f64,
    #[arg(long, default_value_t = 5)]
    periods: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    revision_rate: f64,
    /// Sentence pool, one sentence per line (defaults to the bundled pool).
    #[arg(long)]
    pool: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EmbeddingArgs {
    /// Embedding file: a `VOCAB DIM` header, then `token v1 .. vDIM` per line.
    #[arg(long)]
    embeddings: Option<PathBuf>,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long, default_value = "wdtw")]
    measure: Measure,
    /// VSM similarity a pair needs to pass the weak filter.
    #[arg(long, default_value_t = 0.5)]
    weak_tau: f64,
    #[arg(long, default_value_t = 100)]
    bins: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    /// Pairs of the earliest documents scored for `--tau auto` (0 = all pairs).
    #[arg(long, default_value_t = 3000)]
    calibration_pairs: usize,
    /// Drop documents with fewer than 3 paragraphs or 300 words first.
    #[arg(long)]
    filter: bool,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    embeddings: EmbeddingArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Strong-filter threshold, or `auto` to calibrate from the scores.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    tau: Threshold,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    embeddings: EmbeddingArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    predicted: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long)]
    doc_a: PathBuf,
    #[arg(long)]
    doc_b: PathBuf,
    #[command(flatten)]
    embeddings: EmbeddingArgs,
    #[arg(long, default_value = "wdtw")]
    measure: Measure,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[command(flatten)]
    embeddings: EmbeddingArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    tau: Threshold,
    /// Comma-separated measures to compare.
    #[arg(long, value_delimiter = ',', default_value = "vsm,wted,wdtw")]
    measures: Vec<Measure>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_pseudo(s: &str) -> Result<(usize, u64), String> {
    let (dim, seed) = s.split_once(',').ok_or("expected DIM,SEED")?;
    let dim: usize = dim.trim().parse().map_err(|e| format!("bad DIM: {e}"))?;
    let seed: u64 = seed.trim().parse().map_err(|e| format!("bad SEED: {e}"))?;
    if dim == 0 {
        return Err("DIM must be at least 1".into());
    }
    Ok((dim, seed))
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let ctx = Globals { workers: cli.workers, pseudo: cli.pseudo_embeddings };
    match cli.command {
        Command::Simulate(a) => run_simulate(a),
        Command::Detect(a) => run_detect(&ctx, a),
        Command::Calibrate(a) => run_calibrate(&ctx, a),
        Command::Eval(a) => run_eval(a),
        Command::Dist(a) => run_dist(&ctx, a),
        Command::Bench(a) => run_bench(&ctx, a),
    }
}

struct Globals {
    workers: Option<usize>,
    pseudo: Option<(usize, u64)>,
}

impl Globals {
    fn table<'a, I>(&self, args: &EmbeddingArgs, vocab: I) -> Result<EmbeddingTable>
    where
        I: IntoIterator<Item = &'a String>,
    {
        match (&args.embeddings, self.pseudo) {
            (Some(_), Some(_)) => bail!("--embeddings and --pseudo-embeddings are mutually exclusive"),
            (Some(path), None) => {
                EmbeddingTable::load(path).with_context(|| format!("loading embeddings from {}", path.display()))
            }
            (None, Some((dim, seed))) => Ok(EmbeddingTable::pseudo(vocab, dim, seed)),
            (None, None) => bail!("either --embeddings or --pseudo-embeddings is required"),
        }
    }

    fn config(&self, m: &MeasureArgs, tau: Threshold) -> PipelineConfig {
        let mut cfg = PipelineConfig {
            weak_threshold: m.weak_tau,
            strong_threshold: tau,
            measure: m.measure,
            bins: m.bins,
            window: m.window,
            calibration_pairs: m.calibration_pairs,
            ..PipelineConfig::default()
        };
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        cfg
    }
}

fn load_corpus(dir: &Path, filter: bool) -> Result<Corpus> {
    let corpus = Corpus::load_dir(dir).with_context(|| format!("loading corpus from {}", dir.display()))?;
    Ok(if filter { corpus_filter(&corpus, DEFAULT_MIN_PARAGRAPHS, DEFAULT_MIN_WORDS) } else { corpus })
}

fn prepare(ctx: &Globals, corpus: &Corpus, args: &EmbeddingArgs) -> Result<PreparedCorpus> {
    let table = ctx.table(args, corpus.documents().iter().flat_map(|d| d.tokens()))?;
    Ok(PreparedCorpus::new(corpus, &table))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn run_simulate(a: SimulateArgs) -> Result<()> {
    let pool = match &a.pool {
        Some(p) => TextPool::load(p)?,
        None => TextPool::bundled(),
    };
    let cfg = SimConfig {
        lambda: a.lambda,
        periods: a.periods,
        seed: a.seed,
        revision_rate: a.revision_rate,
        ..Default::default()
    };
    let sim = simulate(&cfg, &pool)?;
    sim.write_dir(&a.out)?;
    println!("{} documents, {} revisions written to {}", sim.corpus.len(), sim.ground_truth.len(), a.out.display());
    Ok(())
}

fn run_detect(ctx: &Globals, a: DetectArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus, a.measure.filter)?;
    let prepared = prepare(ctx, &corpus, &a.embeddings)?;
    let det = detect_prepared(&prepared, &ctx.config(&a.measure, a.tau))?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write(&a.out.join("pairs.csv"), det.pairs_csv())?;
    write(&a.out.join("report.json"), det.report_json() + "\n")?;
    if let Some(c) = &det.calibration {
        write(&a.out.join("histogram.csv"), c.histogram_csv())?;
    }
    println!("{} revision pairs detected", det.pairs.len());
    Ok(())
}

fn run_calibrate(ctx: &Globals, a: CalibrateArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus, a.measure.filter)?;
    let prepared = prepare(ctx, &corpus, &a.embeddings)?;
    let cal = calibrate_prepared(&prepared, &ctx.config(&a.measure, Threshold::Auto))?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write(&a.out.join("histogram.csv"), cal.histogram_csv())?;
    let summary = serde_json::json!({
        "measure": a.measure.measure,
        "tau": cal.tau,
        "method": cal.method,
        "modes": cal.modes,
        "bins": a.measure.bins,
        "window": a.measure.window,
    });
    write(&a.out.join("calibration.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    println!("{}", cal.tau);
    Ok(())
}

fn run_eval(a: EvalArgs) -> Result<()> {
    let predicted = read_pairs_csv(&a.predicted).with_context(|| format!("reading {}", a.predicted.display()))?;
    let truth = read_pairs_csv(&a.truth).with_context(|| format!("reading {}", a.truth.display()))?;
    let json = serde_json::to_string_pretty(&evaluate(&predicted, &truth))? + "\n";
    match &a.out {
        Some(path) => write(path, json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn run_dist(ctx: &Globals, a: DistArgs) -> Result<()> {
    let read = |p: &Path, id: &str| -> Result<_> {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        Ok(parse_document(&text, id, 0)?)
    };
    let (da, db) = (read(&a.doc_a, "a")?, read(&a.doc_b, "b")?);
    let score = if a.measure == Measure::Vsm {
        TfIdfModel::fit([("a", da.tokens()), ("b", db.tokens())]).similarity("a", "b")?
    } else {
        let table = ctx.table(&a.embeddings, da.tokens().chain(db.tokens()))?;
        if a.measure == Measure::Wted {
            wted(&build_doc_tree(&da, &table), &build_doc_tree(&db, &table))?
        } else {
            let units = |d: &revdet::Document| {
                revdet::corpus::flatten_paragraphs(d).iter().map(|p| table.embed(p)).collect::<Vec<_>>()
            };
            wdtw(&units(&da), &units(&db), None)?
        }
    };
    println!("{score}");
    Ok(())
}

fn run_bench(ctx: &Globals, a: BenchArgs) -> Result<()> {
    if a.measures.is_empty() {
        bail!("at least one measure is required");
    }
    let corpus = load_corpus(&a.corpus, a.measure.filter)?;
    let table = ctx.table(&a.embeddings, corpus.documents().iter().flat_map(|d| d.tokens()))?;
    let truth = read_pairs_csv(&a.truth).with_context(|| format!("reading {}", a.truth.display()))?;
    let rows = benchmark(&corpus, &table, &truth, &a.measures, &ctx.config(&a.measure, a.tau))?;
    let csv = comparison_csv(&rows);
    match &a.out {
        Some(path) => write(path, csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}
