mod manifest;

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use manifest::Stage;
use wsd_core::corpus::{
    extract_from_reader, extract_windows, load_labeled_dataset, run_filter_pipeline,
    segment_and_tokenize, stratified_split, write_dataset, write_windows, HomonymSpec,
    LabeledExample, Split, SplitSpec,
};
use wsd_core::embeddings::{load_embeddings, save_embeddings, train_embeddings, EmbeddingConfig};
use wsd_core::eval::{write_document, LstmExperiment, MetricsDocument};
use wsd_core::lstm::{load_model, predict, save_model, ClassifierTrainConfig, OptimizerKind};
use wsd_core::synthetic::{corrupt_labels, generate, SyntheticConfig};
use wsd_core::EmbeddingMatrix;

const STDIO: &str = "-";

#[derive(Parser)]
#[command(
    name = "wsd",
    version,
    about = "Homonym sense disambiguation with word vectors and an LSTM"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Keep Georgian-only lines of raw text.
    Filter(FilterArgs),
    /// Cut context windows around the homonym's surface forms.
    Extract(ExtractArgs),
    /// Train skip-gram word vectors with negative sampling.
    TrainEmbeddings(EmbedArgs),
    /// Split a labeled dataset and train the LSTM classifier.
    Train(TrainCmd),
    /// Score a saved model, or retrain and score over several seeds.
    Evaluate(EvaluateArgs),
    /// Accuracy as a function of training-set size.
    Ablate(AblateArgs),
    /// Predict the sense of every homonym occurrence in a text.
    Predict(PredictArgs),
    /// Nearest neighbours of a word in an embedding file.
    Neighbors(NeighborsArgs),
    /// Write a generated labeled dataset, embedding corpus and homonym config.
    Synth(SynthArgs),
}

#[derive(Args)]
struct FilterArgs {
    /// Input files; reads stdin when none are given or for `-`.
    inputs: Vec<PathBuf>,
    /// Output file, `-` for stdout.
    #[arg(long, default_value = STDIO)]
    out: PathBuf,
    /// Write one tokenized sentence per line instead of the cleaned lines.
    #[arg(long)]
    sentences: bool,
}

#[derive(Args)]
struct ExtractArgs {
    /// Input files; reads stdin when none are given or for `-`.
    inputs: Vec<PathBuf>,
    /// Homonym config.
    #[arg(long)]
    spec: PathBuf,
    /// Output dataset file, `-` for stdout.
    #[arg(long, default_value = STDIO)]
    out: PathBuf,
}

#[derive(Args)]
struct EmbedArgs {
    /// Tokenized corpus, one sentence per line.
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 128)]
    dim: usize,
    #[arg(long, default_value_t = 10)]
    window: usize,
    #[arg(long, default_value_t = 10)]
    min_count: u64,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    #[arg(long, default_value_t = 5)]
    negative: usize,
    #[arg(long, default_value_t = 0.025)]
    lr: f64,
    /// Frequent-word subsampling threshold (off when absent).
    #[arg(long)]
    subsample: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Keep only the input vectors in the output file.
    #[arg(long)]
    no_context_vectors: bool,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OptimizerArg {
    Adam,
    Sgd,
}

#[derive(Args, Clone, Serialize)]
struct DataArgs {
    /// Labeled dataset file.
    #[arg(long)]
    data: PathBuf,
    /// Homonym config.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    test_frac: f64,
    /// Share of the non-test part held out for validation.
    #[arg(long, default_value_t = 0.2)]
    val_frac: f64,
    /// Split seed; defaults to --seed.
    #[arg(long)]
    split_seed: Option<u64>,
}

#[derive(Args, Clone, Serialize)]
struct ClassifierArgs {
    #[arg(long, default_value_t = 40)]
    epochs: usize,
    #[arg(long, default_value_t = 16)]
    batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    #[arg(long, default_value_t = 5)]
    patience: usize,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    optimizer: OptimizerArg,
    /// Global gradient-norm clip; 0 disables clipping.
    #[arg(long, default_value_t = 5.0)]
    clip: f64,
    #[arg(long, default_value_t = 64)]
    hidden: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl ClassifierArgs {
    fn config(&self) -> ClassifierTrainConfig {
        ClassifierTrainConfig {
            max_epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.lr,
            optimizer: match self.optimizer {
                OptimizerArg::Adam => OptimizerKind::default(),
                OptimizerArg::Sgd => OptimizerKind::Sgd,
            },
            patience: self.patience,
            gradient_clip_norm: (self.clip > 0.0).then_some(self.clip),
            hidden: self.hidden,
            seed: self.seed,
            ..ClassifierTrainConfig::default()
        }
    }
}

#[derive(Args)]
struct TrainCmd {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    embeddings: PathBuf,
    /// Output model file.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    embeddings: PathBuf,
    /// Saved model to score; required when --runs is 1.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Number of fresh trainings (seeds --seed, --seed+1, ...) to average.
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Metrics JSON, `-` for stdout.
    #[arg(long, default_value = STDIO)]
    out: PathBuf,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Args)]
struct AblateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    embeddings: PathBuf,
    /// Strictly increasing training fractions in (0, 1].
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.5,1.0")]
    fractions: Vec<f64>,
    /// Metrics JSON, `-` for stdout.
    #[arg(long, default_value = STDIO)]
    out: PathBuf,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long)]
    spec: PathBuf,
    /// Text to classify; read from stdin when absent.
    text: Option<String>,
}

#[derive(Args)]
struct NeighborsArgs {
    #[arg(long)]
    embeddings: PathBuf,
    word: String,
    #[arg(short, long, default_value_t = 10)]
    k: usize,
}

#[derive(Args, Serialize)]
struct SynthArgs {
    /// Directory receiving data.tsv, corpus.txt and homonym.conf.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 5000)]
    windows: usize,
    #[arg(long, default_value_t = 3000)]
    sentences: usize,
    /// Probability that a context word is drawn from its class's pool.
    #[arg(long, default_value_t = 0.45)]
    signal: f64,
    /// Share of labels replaced by a wrong class.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn main() {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Filter(a) => cmd_filter(a),
        Command::Extract(a) => cmd_extract(a),
        Command::TrainEmbeddings(a) => cmd_train_embeddings(a),
        Command::Train(a) => cmd_train(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Ablate(a) => cmd_ablate(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Neighbors(a) => cmd_neighbors(a),
        Command::Synth(a) => cmd_synth(a),
    };
    if let Err(e) = res {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn is_stdio(p: &Path) -> bool {
    p.as_os_str() == STDIO
}

fn open_inputs(paths: &[PathBuf]) -> Result<Vec<(String, Box<dyn BufRead + Send>)>> {
    if paths.is_empty() {
        return Ok(vec![(
            "<stdin>".into(),
            Box::new(BufReader::new(io::stdin())),
        )]);
    }
    paths
        .iter()
        .map(|p| -> Result<(String, Box<dyn BufRead + Send>)> {
            if is_stdio(p) {
                return Ok(("<stdin>".into(), Box::new(BufReader::new(io::stdin()))));
            }
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            Ok((p.display().to_string(), Box::new(BufReader::new(f))))
        })
        .collect()
}

/// Runs `body` against the output file (or stdout) and flushes it.
fn with_output<T>(out: &Path, body: impl FnOnce(&mut dyn Write) -> Result<T>) -> Result<T> {
    if is_stdio(out) {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        let v = body(&mut lock)?;
        lock.flush()?;
        return Ok(v);
    }
    let file = File::create(out).with_context(|| format!("creating {}", out.display()))?;
    let mut w = BufWriter::new(file);
    let v = body(&mut w)?;
    w.flush()
        .with_context(|| format!("writing {}", out.display()))?;
    Ok(v)
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("WSD_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .map(Some)
            .map_err(|_| anyhow!("WSD_THREADS={v:?} is not a thread count")),
        Err(_) => Ok(None),
    }
}

fn cmd_filter(a: FilterArgs) -> Result<()> {
    let stage = Stage::start("filter");
    let readers = open_inputs(&a.inputs)?;
    let lines = with_output(&a.out, |w| {
        Ok(run_filter_pipeline(readers, w, a.sentences)?)
    })?;
    eprintln!("{lines} lines written");
    if !is_stdio(&a.out) {
        stage.finish(
            &a.out,
            json!({ "sentences": a.sentences }),
            a.inputs.clone(),
            vec![],
            json!({ "lines": lines }),
        )?;
    }
    Ok(())
}

fn cmd_extract(a: ExtractArgs) -> Result<()> {
    let stage = Stage::start("extract");
    let spec = HomonymSpec::load(&a.spec)?;
    let readers = open_inputs(&a.inputs)?;
    let mut windows = Vec::new();
    for (name, reader) in readers {
        windows.extend(extract_from_reader(reader, &name, &spec)?);
    }
    with_output(&a.out, |w| Ok(write_windows(&mut { w }, &windows)?))?;
    eprintln!("{} windows extracted", windows.len());
    if !is_stdio(&a.out) {
        let mut inputs = a.inputs.clone();
        inputs.push(a.spec.clone());
        stage.finish(
            &a.out,
            json!({}),
            inputs,
            vec![],
            json!({ "windows": windows.len() }),
        )?;
    }
    Ok(())
}

fn cmd_train_embeddings(a: EmbedArgs) -> Result<()> {
    let stage = Stage::start("train-embeddings");
    let config = EmbeddingConfig {
        dimension: a.dim,
        window: a.window,
        min_count: a.min_count,
        epochs: a.epochs,
        negative_samples: a.negative,
        learning_rate: a.lr,
        subsample: a.subsample,
        seed: a.seed,
        ..EmbeddingConfig::default()
    };
    let matrix = train_embeddings(&a.corpus, &config)?;
    save_embeddings(&matrix, &a.out, !a.no_context_vectors)?;
    eprintln!("{} words x {} dims", matrix.vocab().len(), matrix.dim());
    stage.finish(
        &a.out,
        json!({
            "dim": config.dimension,
            "window": config.window,
            "min_count": config.min_count,
            "epochs": config.epochs,
            "negative": config.negative_samples,
            "lr": config.learning_rate,
            "min_lr": config.min_learning_rate,
            "subsample": config.subsample,
            "table_size": config.table_size,
            "context_vectors": !a.no_context_vectors,
        }),
        vec![a.corpus.clone()],
        vec![a.seed],
        json!({ "vocabulary": matrix.vocab().len() }),
    )
}

/// Labeled examples of `data` with OTHER records removed, and their split.
fn load_split(data: &DataArgs, seed: u64) -> Result<(HomonymSpec, Split, SplitSpec)> {
    let spec = HomonymSpec::load(&data.spec)?;
    let all = load_labeled_dataset(&data.data, &spec)?;
    let labeled: Vec<LabeledExample> = all
        .iter()
        .filter(|e| e.label.sense().is_some())
        .cloned()
        .collect();
    if labeled.len() < all.len() {
        eprintln!(
            "{} unlabeled or OTHER records skipped",
            all.len() - labeled.len()
        );
    }
    let split_spec = SplitSpec {
        seed: data.split_seed.unwrap_or(seed),
        test_fraction: data.test_frac,
        validation_fraction: data.val_frac,
        stratified: true,
    };
    let split = stratified_split(&labeled, &split_spec, spec.num_senses())?;
    eprintln!(
        "split: {} train, {} validation, {} test",
        split.train.len(),
        split.validation.len(),
        split.test.len()
    );
    Ok((spec, split, split_spec))
}

fn load_matrix(path: &Path) -> Result<EmbeddingMatrix> {
    load_embeddings(path).with_context(|| format!("loading embeddings {}", path.display()))
}

fn data_inputs(data: &DataArgs, embeddings: &Path) -> Vec<PathBuf> {
    vec![
        data.data.clone(),
        data.spec.clone(),
        embeddings.to_path_buf(),
    ]
}

fn cmd_train(a: TrainCmd) -> Result<()> {
    let stage = Stage::start("train");
    let matrix = load_matrix(&a.embeddings)?;
    let (spec, split, split_spec) = load_split(&a.data, a.classifier.seed)?;
    let exp = LstmExperiment {
        split: &split,
        embeddings: &matrix,
        num_classes: spec.num_senses(),
        config: a.classifier.config(),
    };
    let (model, history, metrics) = exp.run(a.classifier.seed)?;
    for e in &history.epochs {
        eprintln!(
            "epoch {:>3}  train_loss {:.4}  val_loss {:.4}  val_acc {:.4}",
            e.epoch + 1,
            e.train_loss,
            e.validation_loss,
            e.validation_accuracy
        );
    }
    let best = history.best().ok_or_else(|| anyhow!("no epochs ran"))?;
    println!(
        "best epoch {}  val_loss {:.4}  val_acc {:.4}  test_acc {:.4}",
        best.epoch + 1,
        best.validation_loss,
        best.validation_accuracy,
        metrics.accuracy
    );
    save_model(&model, &a.out)?;
    stage.finish(
        &a.out,
        json!({ "data": a.data, "classifier": a.classifier }),
        data_inputs(&a.data, &a.embeddings),
        vec![split_spec.seed, a.classifier.seed],
        json!({ "history": history, "test_accuracy": metrics.accuracy }),
    )
}

fn emit_document(doc: &MetricsDocument, out: &Path) -> Result<()> {
    if is_stdio(out) {
        print!("{}", doc.to_json());
        return Ok(());
    }
    write_document(doc, out)?;
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let stage = Stage::start("evaluate");
    if a.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let matrix = load_matrix(&a.embeddings)?;
    let (spec, split, split_spec) = load_split(&a.data, a.classifier.seed)?;
    let exp = LstmExperiment {
        split: &split,
        embeddings: &matrix,
        num_classes: spec.num_senses(),
        config: a.classifier.config(),
    };
    let mut inputs = data_inputs(&a.data, &a.embeddings);
    let mut seeds = vec![split_spec.seed];
    let doc = if a.runs == 1 {
        let path = a
            .model
            .as_ref()
            .ok_or_else(|| anyhow!("--model is required unless --runs is greater than 1"))?;
        let model =
            load_model(path).with_context(|| format!("loading model {}", path.display()))?;
        if model.arch.input_dim != matrix.dim() || model.arch.classes != spec.num_senses() {
            bail!(
                "model expects {}-dim vectors and {} classes; got {} and {}",
                model.arch.input_dim,
                model.arch.classes,
                matrix.dim(),
                spec.num_senses()
            );
        }
        inputs.push(path.clone());
        let metrics = exp.score(&model, &split.test)?;
        eprintln!(
            "accuracy {:.4} on {} examples",
            metrics.accuracy,
            split.test.len()
        );
        MetricsDocument::Metrics {
            model: "lstm".into(),
            test_size: split.test.len(),
            split_seed: Some(split_spec.seed),
            metrics,
        }
    } else {
        let summary = exp.repeat(a.runs, a.classifier.seed, threads_from_env()?)?;
        seeds.extend(summary.per_run.iter().map(|r| r.seed));
        eprintln!(
            "{} runs: mean {:.4}  min {:.4}  max {:.4}  std {:.4}",
            summary.runs,
            summary.mean_accuracy,
            summary.min_accuracy,
            summary.max_accuracy,
            summary.std_accuracy
        );
        MetricsDocument::Repetition {
            model: "lstm".into(),
            test_size: split.test.len(),
            split_seed: Some(split_spec.seed),
            summary,
        }
    };
    emit_document(&doc, &a.out)?;
    if !is_stdio(&a.out) {
        stage.finish(
            &a.out,
            json!({ "data": a.data, "classifier": a.classifier, "runs": a.runs }),
            inputs,
            seeds,
            serde_json::Value::Null,
        )?;
    }
    Ok(())
}

fn cmd_ablate(a: AblateArgs) -> Result<()> {
    let stage = Stage::start("ablate");
    let matrix = load_matrix(&a.embeddings)?;
    let (spec, split, split_spec) = load_split(&a.data, a.classifier.seed)?;
    let exp = LstmExperiment {
        split: &split,
        embeddings: &matrix,
        num_classes: spec.num_senses(),
        config: a.classifier.config(),
    };
    let curve = exp.ablate(&a.fractions, a.classifier.epochs, a.classifier.seed)?;
    for p in &curve.points {
        eprintln!(
            "fraction {:<5} train {:>6}  accuracy {:.4}",
            p.fraction, p.train_size, p.accuracy
        );
    }
    let doc = MetricsDocument::Ablation {
        model: "lstm".into(),
        test_size: split.test.len(),
        split_seed: Some(split_spec.seed),
        curve,
    };
    emit_document(&doc, &a.out)?;
    if !is_stdio(&a.out) {
        stage.finish(
            &a.out,
            json!({ "data": a.data, "classifier": a.classifier, "fractions": a.fractions }),
            data_inputs(&a.data, &a.embeddings),
            vec![split_spec.seed, a.classifier.seed],
            serde_json::Value::Null,
        )?;
    }
    Ok(())
}

fn cmd_predict(a: PredictArgs) -> Result<()> {
    let spec = HomonymSpec::load(&a.spec)?;
    let matrix = load_matrix(&a.embeddings)?;
    let model =
        load_model(&a.model).with_context(|| format!("loading model {}", a.model.display()))?;
    if model.arch.input_dim != matrix.dim() {
        bail!(
            "model expects {}-dim vectors, embeddings have {}",
            model.arch.input_dim,
            matrix.dim()
        );
    }
    if model.arch.classes != spec.num_senses() {
        bail!(
            "model has {} classes, {} defines {}",
            model.arch.classes,
            a.spec.display(),
            spec.num_senses()
        );
    }
    let text = match a.text {
        Some(t) => t,
        None => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    let mut found = 0;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for sentence in segment_and_tokenize(&text) {
        for window in extract_windows(&sentence, &spec, "input") {
            let (label, probs) = predict(&model, &window, &matrix)?;
            let probs: Vec<String> = probs.iter().map(|p| format!("{p:.6}")).collect();
            writeln!(
                out,
                "{}\t{}\t{}\t{}",
                window.target().as_str(),
                label,
                spec.senses()[label].gloss,
                probs.join(" ")
            )?;
            found += 1;
        }
    }
    if found == 0 {
        bail!("no form of {} found in the input", spec.lemma());
    }
    Ok(())
}

fn cmd_neighbors(a: NeighborsArgs) -> Result<()> {
    let matrix = load_matrix(&a.embeddings)?;
    for (word, sim) in matrix.nearest_neighbors(&a.word, a.k)? {
        println!("{word}\t{sim:.4}");
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let stage = Stage::start("synth");
    let cfg = SyntheticConfig {
        windows: a.windows,
        corpus_sentences: a.sentences,
        indicative_prob: a.signal,
        seed: a.seed,
        ..SyntheticConfig::default()
    };
    let mut task = generate(&cfg)?;
    if a.noise > 0.0 {
        let k = task.spec.num_senses();
        let flipped = corrupt_labels(&mut task.examples, a.noise, k, a.seed.wrapping_add(1));
        eprintln!("{flipped} labels corrupted");
    }
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let data = a.out.join("data.tsv");
    with_output(&data, |w| Ok(write_dataset(&mut { w }, &task.examples)?))?;
    with_output(&a.out.join("corpus.txt"), |w| {
        for s in &task.corpus {
            writeln!(w, "{}", s.join(" "))?;
        }
        Ok(())
    })?;
    std::fs::write(a.out.join("homonym.conf"), task.spec.to_config_string())?;
    eprintln!(
        "{} windows, {} corpus sentences",
        task.examples.len(),
        task.corpus.len()
    );
    stage.finish(&data, &a, vec![], vec![a.seed], serde_json::Value::Null)
}
