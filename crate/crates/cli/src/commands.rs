use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use log::{info, warn};
use normconflict_core::classifier::{load_model, predict, save_model, train_with_report, Loss, TrainConfig};
use normconflict_core::corpus::{dataset_stats, load_dataset, save_dataset, Contract, Dataset};
use normconflict_core::embedding::{
    embed_sentence_with, pair_feature, EmbedOptions, FeatureMode, UnknownPolicy, WordVectorStore,
};
use normconflict_core::evaluation::synthetic::{generate_corpus, vectors_for_dataset, SyntheticConfig};
use normconflict_core::evaluation::{
    evaluate_model, featurize, run_experiment_grid, split_train_test, Averaging, ExperimentConfig, NegativeSampling,
    Split, Task, SPLIT_STREAM,
};
use normconflict_core::extract::{extract_norms, generate_pairs, ModalLexicon, PairScope};
use normconflict_core::rng::derive_seed;
use normconflict_core::{ConflictLabel, Norm};
use normconflict_service::{bind, load_norms, serve as serve_http, shutdown_signal, AnnotationStore, AppState};
use serde::{Deserialize, Serialize};

use crate::config::Overlay;
use crate::error::{CliError, CliResult};
use crate::{ClassifyArgs, EvaluateArgs, ExperimentArgs, ExtractArgs, ServeArgs, StatsArgs, SynthArgs, TrainArgs};

pub struct Context {
    pub timestamps: bool,
}

impl Context {
    /// Seed line, preceded by a timestamp line unless timestamps are off.
    fn preamble(&self, seed: u64) {
        if self.timestamps {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            println!("timestamp: {secs}");
        }
        println!("seed: {seed}");
    }
}

fn require_exists(path: &Path) -> CliResult {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::input(format!("{}: no such file or directory", path.display())))
    }
}

fn read_dataset(path: &Path) -> CliResult<Dataset> {
    require_exists(path)?;
    load_dataset(path).map_err(|e| CliError::corpus(path, e))
}

fn read_vectors(path: &Path) -> CliResult<WordVectorStore> {
    require_exists(path)?;
    let store = WordVectorStore::load(path).map_err(|e| CliError::vectors(path, e))?;
    info!("{}: {} vectors of dimension {}", path.display(), store.len(), store.dim());
    Ok(store)
}

fn read_lexicon(path: Option<&Path>) -> CliResult<ModalLexicon> {
    match path {
        None => Ok(ModalLexicon::default()),
        Some(p) => {
            require_exists(p)?;
            ModalLexicon::load(p).map_err(|e| CliError::lexicon(p, e))
        }
    }
}

fn create_parent(path: &Path) -> CliResult {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e)),
        _ => Ok(()),
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult {
    create_parent(path)?;
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Parses a string flag, attributing failures to the flag name.
fn parse_flag<T>(value: Option<&str>, flag: &str) -> CliResult<Option<T>>
where
    T: std::str::FromStr<Err = String>,
{
    value.map(|v| v.parse().map_err(|e: String| CliError::input(format!("--{flag}: {e}")))).transpose()
}

fn load_overlay(path: Option<&Path>) -> CliResult<Overlay> {
    match path {
        None => Ok(Overlay::default()),
        Some(p) => {
            require_exists(p)?;
            Overlay::load(p)
        }
    }
}

/// Settings common to `train` and `evaluate`.
struct Settings {
    seed: u64,
    test_fraction: f64,
    train: TrainConfig,
    embed: EmbedOptions,
}

fn settings(args: &ExperimentArgs, overlay: &Overlay) -> CliResult<Settings> {
    let defaults = TrainConfig::default();
    let seed = overlay.resolve(args.seed, "seed", 42)?;
    let loss = overlay.resolve(parse_flag::<Loss>(args.loss.as_deref(), "loss")?, "loss", defaults.loss)?;
    let train = TrainConfig {
        c: overlay.resolve(args.c, "c", defaults.c)?,
        loss,
        max_epochs: overlay.resolve(args.max_epochs, "max_epochs", defaults.max_epochs)?,
        tolerance: overlay.resolve(None, "tolerance", defaults.tolerance)?,
        eta0: overlay.resolve(None, "eta0", defaults.eta0)?,
        decay: overlay.resolve(None, "decay", defaults.decay)?,
        seed,
        classes: None,
    };
    train.validate().map_err(|e| CliError::input(e.to_string()))?;
    let unknown = overlay.resolve(
        parse_flag::<UnknownPolicy>(args.unknown_tokens.as_deref(), "unknown-tokens")?,
        "unknown_tokens",
        UnknownPolicy::Skip,
    )?;
    let subsample_prob = overlay.resolve(None, "subsample", 0.0)?;
    if !(0.0..1.0).contains(&subsample_prob) {
        return Err(CliError::input(format!("subsample {subsample_prob} outside [0, 1)")));
    }
    let test_fraction = overlay.resolve(args.test_fraction, "test_fraction", 0.2)?;
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(CliError::input(format!("test fraction {test_fraction} outside (0, 1)")));
    }
    Ok(Settings { seed, test_fraction, train, embed: EmbedOptions { unknown, subsample_prob, seed } })
}

fn contract_files(inputs: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        require_exists(input)?;
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)
                .map_err(|e| CliError::io(input, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "txt"))
                .collect();
            found.sort();
            if found.is_empty() {
                warn!("{}: no .txt contracts", input.display());
            }
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

pub fn extract(_ctx: &Context, args: ExtractArgs) -> CliResult {
    let lexicon = read_lexicon(args.lexicon.as_deref())?;
    let files = contract_files(&args.contracts)?;
    let mut norms: Vec<Norm> = Vec::new();
    for path in &files {
        let contract = Contract::from_file(path).map_err(|e| CliError::corpus(path, e))?;
        let found = extract_norms(&contract, &lexicon);
        info!("{}: {} norms", path.display(), found.len());
        norms.extend(found);
    }

    let mut out = String::new();
    for norm in &norms {
        out.push_str(&serde_json::to_string(norm).expect("norm serializes"));
        out.push('\n');
    }
    write_file(&args.out, &out)?;
    println!("{} norms from {} contracts -> {}", norms.len(), files.len(), args.out.display());

    if let Some(pairs_path) = &args.pairs {
        let scope = if args.cross_contract { PairScope::AllPairs } else { PairScope::SameContract };
        let pairs = generate_pairs(&norms, scope)
            .into_iter()
            .map(|c| c.labeled(ConflictLabel::NonConflict))
            .collect();
        let name = pairs_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let dataset = Dataset::new(name, pairs).map_err(|e| CliError::Pipeline(e.to_string()))?;
        create_parent(pairs_path)?;
        save_dataset(&dataset, pairs_path).map_err(|e| CliError::corpus(pairs_path, e))?;
        println!("{} candidate pairs -> {}", dataset.len(), pairs_path.display());
    }
    Ok(())
}

pub fn stats(_ctx: &Context, args: StatsArgs) -> CliResult {
    let dataset = read_dataset(&args.dataset)?;
    let stats = dataset_stats(&dataset);
    if args.json {
        println!("{}", stats.to_json());
    } else {
        print!("{stats}");
    }
    Ok(())
}

pub fn synth(_ctx: &Context, args: SynthArgs) -> CliResult {
    let mut config = SyntheticConfig { seed: args.seed, ..SyntheticConfig::default() };
    if let Some(counts) = &args.counts {
        if counts.len() != config.counts.len() {
            return Err(CliError::input(format!("--counts needs 5 values, got {}", counts.len())));
        }
        config.counts.copy_from_slice(counts);
    }
    if args.dim == 0 {
        return Err(CliError::input("--dim must be at least 1"));
    }
    let dataset = generate_corpus(&config);
    create_parent(&args.out)?;
    save_dataset(&dataset, &args.out).map_err(|e| CliError::corpus(&args.out, e))?;
    println!("seed: {}", args.seed);
    println!("{} pairs -> {}", dataset.len(), args.out.display());
    if let Some(path) = &args.vectors_out {
        let store = vectors_for_dataset(&dataset, args.dim, args.seed)?;
        create_parent(path)?;
        store.save(path).map_err(|e| CliError::io(path, e))?;
        println!("{} vectors of dimension {} -> {}", store.len(), store.dim(), path.display());
    }
    Ok(())
}

pub fn train(ctx: &Context, args: TrainArgs) -> CliResult {
    let overlay = load_overlay(args.experiment.config.as_deref())?;
    let s = settings(&args.experiment, &overlay)?;
    let task = overlay.resolve(parse_flag::<Task>(args.task.as_deref(), "task")?, "task", Task::TypeCPlusNon)?;
    let mode = overlay.resolve(parse_flag::<FeatureMode>(args.mode.as_deref(), "mode")?, "mode", FeatureMode::Concat)?;
    let averaging: Averaging = overlay.resolve(None, "averaging", Averaging::Macro)?;

    let dataset = read_dataset(&args.experiment.dataset)?;
    let store = read_vectors(&args.experiment.vectors)?;
    let featurized = featurize(&dataset, &store, mode, &s.embed)?;
    let selected: Vec<_> = featurized.examples.into_iter().filter(|e| task.includes(e.label)).collect();
    if selected.is_empty() {
        return Err(CliError::Pipeline(format!("no {task} pairs to train on")));
    }
    let split = split_train_test(&selected, s.test_fraction, derive_seed(s.seed, SPLIT_STREAM))?;
    let train_set = Split::select(&selected, &split.train);
    let test_set = Split::select(&selected, &split.test);

    let config = TrainConfig { classes: Some(task.classes().to_vec()), ..s.train.clone() };
    let features: Vec<_> = train_set.iter().map(|e| e.feature.clone()).collect();
    let labels: Vec<_> = train_set.iter().map(|e| e.label).collect();
    let (model, report) = train_with_report(&features, &labels, &config)?;
    create_parent(&args.out)?;
    save_model(&model, &args.out).map_err(|e| CliError::model(&args.out, e))?;

    let log_path = args.log.clone().unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".log");
        PathBuf::from(p)
    });
    let mut log = format!(
        "# seed {} task {} mode {} loss {} C {} train {} test {}\n# epoch objective\n",
        s.seed,
        task,
        mode,
        config.loss,
        config.c,
        train_set.len(),
        test_set.len()
    );
    for (epoch, j) in report.objective_history.iter().enumerate() {
        log.push_str(&format!("{epoch} {j:.10}\n"));
    }
    write_file(&log_path, &log)?;

    ctx.preamble(s.seed);
    println!("task: {task}  mode: {mode}  classes: {}", model.num_classes());
    println!(
        "train pairs: {}  test pairs: {}  skipped pairs: {}",
        train_set.len(),
        test_set.len(),
        featurized.skipped.len()
    );
    let first = report.objective_history.first().copied().unwrap_or(0.0);
    let last = report.objective_history.last().copied().unwrap_or(0.0);
    println!(
        "epochs: {} (rejected {}, converged {})  objective: {first:.4} -> {last:.4}",
        report.epochs, report.rejected_epochs, report.converged
    );
    if !test_set.is_empty() {
        let (m, _) = evaluate_model(&model, &test_set, averaging)?;
        println!("test: A {:.3}  P {:.3}  R {:.3}  F {:.3}", m.accuracy, m.precision, m.recall, m.f1);
    }
    println!("model -> {}", args.out.display());
    println!("log -> {}", log_path.display());
    Ok(())
}

pub fn evaluate(ctx: &Context, args: EvaluateArgs) -> CliResult {
    let overlay = load_overlay(args.experiment.config.as_deref())?;
    let s = settings(&args.experiment, &overlay)?;
    let tasks: Vec<Task> = match args.task.as_deref() {
        None | Some("all") => match overlay.get::<Task>("task")? {
            Some(t) => vec![t],
            None => Task::ALL.to_vec(),
        },
        Some(t) => vec![t.parse().map_err(|e: String| CliError::input(format!("--task: {e}")))?],
    };
    let config = ExperimentConfig {
        k: overlay.resolve(args.k, "k", 10)?,
        test_fraction: s.test_fraction,
        seed: s.seed,
        negatives: overlay.resolve(
            parse_flag::<NegativeSampling>(args.negatives.as_deref(), "negatives")?,
            "negatives",
            NegativeSampling::MatchConflicts,
        )?,
        averaging: overlay.resolve(
            parse_flag::<Averaging>(args.averaging.as_deref(), "averaging")?,
            "averaging",
            Averaging::Macro,
        )?,
        train: s.train.clone(),
        ..ExperimentConfig::default()
    };
    config.validate().map_err(|e| CliError::input(e.to_string()))?;

    let dataset = read_dataset(&args.experiment.dataset)?;
    let store = read_vectors(&args.experiment.vectors)?;
    let report = run_experiment_grid(&dataset, &store, &config, &tasks, &s.embed)?;

    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let text_path = args.out.join("report.txt");
    let json_path = args.out.join("report.json");
    write_file(&text_path, &report.render_text())?;
    write_file(&json_path, &(report.to_json() + "\n"))?;

    ctx.preamble(s.seed);
    println!("dataset: {} ({} pairs, {} skipped)", report.dataset, report.pairs, report.skipped_pairs.len());
    println!();
    print!("{}", report.render_table());
    println!();
    println!("report -> {}, {}", text_path.display(), json_path.display());
    Ok(())
}

#[derive(Deserialize)]
struct PairInput {
    #[serde(default)]
    id: Option<String>,
    norm1: String,
    norm2: String,
}

#[derive(Serialize)]
struct PairOutput {
    id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<ConflictLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    confidence: Option<BTreeMap<&'static str, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn classify(_ctx: &Context, args: ClassifyArgs) -> CliResult {
    require_exists(&args.model)?;
    let model = load_model(&args.model).map_err(|e| CliError::model(&args.model, e))?;
    let store = read_vectors(&args.vectors)?;
    let options = EmbedOptions::default();
    let classify_pair = |a: &str, b: &str| -> Result<_, CliError> {
        let e1 = embed_sentence_with(&store, a, &options)?;
        let e2 = embed_sentence_with(&store, b, &options)?;
        let feature = pair_feature(&e1, &e2, model.feature_mode)?;
        Ok(predict(&model, &feature)?)
    };

    match (&args.norm1, &args.norm2, &args.pairs) {
        (Some(a), Some(b), None) => {
            let p = classify_pair(a, b)?;
            println!("label: {}", p.label);
            for (class, c) in model.classes.iter().zip(&p.confidence) {
                println!("  {:<20} {c:.4}", class.as_str());
            }
            Ok(())
        }
        (None, None, Some(path)) => {
            let out_path = args.out.as_ref().ok_or_else(|| CliError::input("--pairs needs --out"))?;
            require_exists(path)?;
            let reader = BufReader::new(File::open(path).map_err(|e| CliError::io(path, e))?);
            create_parent(out_path)?;
            let file = File::create(out_path).map_err(|e| CliError::io(out_path, e))?;
            let mut writer = BufWriter::new(file);
            let (mut done, mut failed) = (0usize, 0usize);
            for (i, line) in reader.lines().enumerate() {
                let line = line.map_err(|e| CliError::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let input: PairInput = serde_json::from_str(&line)
                    .map_err(|e| CliError::input(format!("{}:{}: {e}", path.display(), i + 1)))?;
                let id = input.id.unwrap_or_else(|| format!("line-{}", i + 1));
                let record = match classify_pair(&input.norm1, &input.norm2) {
                    Ok(p) => PairOutput {
                        id,
                        label: Some(p.label),
                        confidence: Some(model.classes.iter().map(|c| c.as_str()).zip(p.confidence).collect()),
                        error: None,
                    },
                    Err(CliError::Pipeline(msg)) => {
                        failed += 1;
                        PairOutput { id, label: None, confidence: None, error: Some(msg) }
                    }
                    Err(e) => return Err(e),
                };
                done += 1;
                let json = serde_json::to_string(&record).expect("prediction serializes");
                writeln!(writer, "{json}").map_err(|e| CliError::io(out_path, e))?;
            }
            writer.flush().map_err(|e| CliError::io(out_path, e))?;
            println!("{done} pairs ({failed} not classifiable) -> {}", out_path.display());
            Ok(())
        }
        _ => Err(CliError::input("give --norm1 and --norm2, or --pairs with --out")),
    }
}

pub fn serve(_ctx: &Context, args: ServeArgs) -> CliResult {
    let lexicon = read_lexicon(args.lexicon.as_deref())?;
    require_exists(&args.contracts)?;
    let norms = load_norms(&args.contracts, &lexicon)?;
    if norms.is_empty() {
        warn!("{}: no norms found; random draws will return 503", args.contracts.display());
    }
    create_parent(&args.dataset)?;
    let store = AnnotationStore::open(&args.dataset)?;
    let listener = bind(&args.bind)?;
    let addr = listener.local_addr().map_err(|e| CliError::Service(e.to_string()))?;
    let state = Arc::new(AppState::new(norms, store, args.seed));
    println!("listening on http://{addr} ({} norms, seed {})", state.norms().len(), args.seed);

    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Service(e.to_string()))?;
    runtime.block_on(serve_http(listener, state, shutdown_signal()))?;
    println!("stopped");
    Ok(())
}
