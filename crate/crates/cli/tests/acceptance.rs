//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use normconflict_core::classifier::{gradient, objective, predict, train, train_with_report, Loss, TrainConfig};
use normconflict_core::corpus::{dataset_stats, load_dataset, save_dataset, Contract, Dataset, NormPair, Provenance};
use normconflict_core::embedding::{
    conflict_offset, embed_sentence, pair_concat, pair_offset, EmbedOptions, FeatureMode, PairFeature,
    SentenceEmbedding, WordVectorStore,
};
use normconflict_core::evaluation::synthetic::{generate_corpus, vectors_for_dataset, SyntheticConfig, REFERENCE_COUNTS};
use normconflict_core::evaluation::{
    best_index, compute_metrics, confusion, cross_validate, make_folds, run_experiment_grid, Averaging, Example,
    ExperimentConfig, NegativeSampling, Task,
};
use normconflict_core::extract::{extract_norms, ModalLexicon};
use normconflict_core::{ConflictLabel, LinearModel, Norm, SplitMix64};
use normconflict_service::{bind, serve, AnnotationStore, AppState};
use serde_json::{json, Value};

type Outcome = Result<String, String>;

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "embedding algebra", limit: Duration::from_secs(5), run: embedding_algebra },
        Criterion { name: "svm oracles", limit: Duration::from_secs(30), run: svm_oracles },
        Criterion { name: "metrics oracles", limit: Duration::MAX, run: metrics_oracles },
        Criterion { name: "protocol", limit: Duration::MAX, run: protocol },
        Criterion { name: "concat-vs-offset ordering", limit: Duration::from_secs(600), run: concat_vs_offset_ordering },
        Criterion { name: "dataset round trip and stats", limit: Duration::MAX, run: dataset_round_trip },
        Criterion { name: "service", limit: Duration::MAX, run: service },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => {
                Err(format!("{detail}; took {:.1}s, limit {}s", elapsed.as_secs_f64(), c.limit.as_secs()))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {:<30} {:>7.2}s  {detail}", c.name, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:<30} {:>7.2}s  {why}", c.name, elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn uniform(rng: &mut SplitMix64, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * (2.0 * rng.next_f64() - 1.0)).collect()
}

fn emb(vector: Vec<f64>) -> SentenceEmbedding {
    SentenceEmbedding { vector, token_count: 1 }
}

fn embedding_algebra() -> Outcome {
    let mut rng = SplitMix64::new(1);
    let trials = 200;
    for t in 0..trials {
        let dim = 1 + rng.next_below(16);

        // A sentence of one repeated word embeds to that word's vector.
        let c = uniform(&mut rng, dim, 5.0);
        let store = WordVectorStore::from_entries(dim, true, [("w".to_string(), c.clone())]).unwrap();
        let n = 1 + rng.next_below(12);
        let e = embed_sentence(&store, &vec!["w"; n].join(" "), 0.0, 0).unwrap();
        check!(e.vector.iter().zip(&c).all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs().max(1.0)), "trial {t}: constant vector");

        // Word order does not matter without subsampling.
        let words: Vec<String> = (0..6).map(|i| format!("t{i}")).collect();
        let store = WordVectorStore::from_entries(
            dim,
            true,
            words.iter().map(|w| (w.clone(), uniform(&mut rng, dim, 1.0))),
        )
        .unwrap();
        let mut tokens: Vec<&str> = (0..1 + rng.next_below(10)).map(|_| words[rng.next_below(6)].as_str()).collect();
        let a = embed_sentence(&store, &tokens.join(" "), 0.0, 0).unwrap();
        rng.shuffle(&mut tokens);
        let b = embed_sentence(&store, &tokens.join(" "), 0.0, 0).unwrap();
        check!(a.vector.iter().zip(&b.vector).all(|(x, y)| (x - y).abs() < 1e-12), "trial {t}: permutation");

        let e1 = emb(uniform(&mut rng, dim, 3.0));
        let e2 = emb(uniform(&mut rng, dim, 3.0));
        let o12 = pair_offset(&e1, &e2).unwrap();
        let o21 = pair_offset(&e2, &e1).unwrap();
        check!(o12.vector.iter().zip(&o21.vector).all(|(x, y)| *x == -*y), "trial {t}: antisymmetry");
        let cat = pair_concat(&e1, &e2).unwrap();
        check!(cat.len() == 2 * dim && o12.len() == dim, "trial {t}: feature lengths");
        check!(cat.vector[..dim] == e1.vector[..] && cat.vector[dim..] == e2.vector[..], "trial {t}: concat layout");
        let single = conflict_offset(&[(e1.clone(), e2.clone())]).unwrap();
        check!(single == o12.vector, "trial {t}: single-pair conflict offset");
    }
    Ok(format!("{trials} random trials per property"))
}

fn offset(v: Vec<f64>) -> PairFeature {
    PairFeature { vector: v, mode: FeatureMode::Offset }
}

fn blobs() -> (Vec<PairFeature>, Vec<ConflictLabel>, f64) {
    let centers = [(5.0, 5.0), (-5.0, 5.0), (-5.0, -5.0), (5.0, -5.0)];
    let mut rng = SplitMix64::new(77);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, &(cx, cy)) in centers.iter().enumerate() {
        for _ in 0..50 {
            let j = uniform(&mut rng, 2, 1.4);
            xs.push(offset(vec![cx + j[0], cy + j[1]]));
            ys.push(ConflictLabel::CONFLICTS[k]);
        }
    }
    let mut margin = f64::INFINITY;
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            if ys[i] != ys[j] {
                let d = xs[i].vector.iter().zip(&xs[j].vector).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                margin = margin.min(d);
            }
        }
    }
    (xs, ys, margin)
}

fn svm_oracles() -> Outcome {
    // (a) finite differences at 10 random points.
    let classes = ConflictLabel::ALL.to_vec();
    let dim = 6;
    let mut rng = SplitMix64::new(3);
    let xs: Vec<PairFeature> = (0..30).map(|_| offset(uniform(&mut rng, dim, 1.0))).collect();
    let ys: Vec<ConflictLabel> = (0..30).map(|i| classes[i % classes.len()]).collect();
    let mut worst = 0.0f64;
    for loss in [Loss::SquaredHinge, Loss::Hinge] {
        let config = TrainConfig { c: 0.7, loss, ..TrainConfig::default() };
        for point in 0..10 {
            let mut model = LinearModel::zeros(classes.clone(), dim, FeatureMode::Offset);
            model.weights = uniform(&mut rng, classes.len() * dim, 0.8);
            model.biases = uniform(&mut rng, classes.len(), 0.3);
            let g = gradient(&model, &xs, &ys, &config).unwrap();
            let h = 1e-6;
            let (mut diff, mut norm) = (0.0, 0.0);
            let params = model.weights.len() + model.biases.len();
            for j in 0..params {
                let bump = |m: &mut LinearModel, d: f64| {
                    if j < m.weights.len() {
                        m.weights[j] += d;
                    } else {
                        m.biases[j - m.weights.len()] += d;
                    }
                };
                let (mut plus, mut minus) = (model.clone(), model.clone());
                bump(&mut plus, h);
                bump(&mut minus, -h);
                let numeric =
                    (objective(&plus, &xs, &ys, &config).unwrap() - objective(&minus, &xs, &ys, &config).unwrap()) / (2.0 * h);
                let analytic = if j < g.weights.len() { g.weights[j] } else { g.biases[j - g.weights.len()] };
                diff += (numeric - analytic).powi(2);
                norm += analytic * analytic;
            }
            let rel = diff.sqrt() / norm.sqrt().max(1e-12);
            check!(rel < 1e-4, "{loss} point {point}: relative gradient error {rel:.2e}");
            worst = worst.max(rel);
        }
    }

    // (b) separable blobs.
    let (bx, by, margin) = blobs();
    check!(margin >= 4.0, "blob margin {margin:.2} below 4");
    let (model, report) = train_with_report(&bx, &by, &TrainConfig::default()).unwrap();
    check!(report.epochs <= 1000, "{} epochs", report.epochs);
    let correct = bx.iter().zip(&by).filter(|(x, y)| predict(&model, x).unwrap().label == **y).count();
    check!(correct == bx.len(), "training accuracy {correct}/{}", bx.len());

    // (c) J(0) = C n.
    for c in [0.5, 1.0, 4.0] {
        for loss in [Loss::SquaredHinge, Loss::Hinge] {
            let zero = LinearModel::zeros(ConflictLabel::CONFLICTS.to_vec(), 2, FeatureMode::Offset);
            let config = TrainConfig { c, loss, ..TrainConfig::default() };
            let j = objective(&zero, &bx, &by, &config).unwrap();
            check!(j == c * bx.len() as f64, "J(0) = {j} for C = {c}");
        }
    }

    // (d) bit-identical retraining.
    let config = TrainConfig { seed: 11, ..TrainConfig::default() };
    let a = train(&bx, &by, &config).unwrap();
    let b = train(&bx, &by, &config).unwrap();
    let same = a.weights.iter().chain(&a.biases).zip(b.weights.iter().chain(&b.biases)).all(|(x, y)| x.to_bits() == y.to_bits());
    check!(same, "retrained weights differ");

    Ok(format!(
        "max gradient error {worst:.1e}; blobs margin {margin:.2}, 200/200 in {} epochs",
        report.epochs
    ))
}

fn metrics_oracles() -> Outcome {
    use ConflictLabel::*;
    let classes = [DeonticModality, DeonticStructure];
    let truth = [DeonticModality, DeonticModality, DeonticStructure, DeonticStructure];
    let pred = [DeonticModality, DeonticStructure, DeonticStructure, DeonticStructure];
    let cm = confusion(&truth, &pred, &classes).unwrap();
    check!(cm.counts == vec![vec![1, 1], vec![0, 2]], "2-class confusion {:?}", cm.counts);
    let m = compute_metrics(&truth, &pred, &classes, Averaging::Macro).unwrap();
    check!(m.accuracy == 0.75, "2-class accuracy {}", m.accuracy);
    check!(m.per_class[0].precision == 1.0 && m.per_class[0].recall == 0.5, "2-class DM P/R");
    check!(m.per_class[1].precision == 2.0 / 3.0 && m.per_class[1].recall == 1.0, "2-class DS P/R");
    check!(m.precision == (1.0 + 2.0 / 3.0) / 2.0, "2-class macro P {}", m.precision);
    check!(m.recall == 0.75, "2-class macro R {}", m.recall);
    check!(m.f1 == (2.0 / 3.0 + 0.8) / 2.0, "2-class macro F {}", m.f1);

    let truth: Vec<ConflictLabel> = ConflictLabel::CONFLICTS.iter().flat_map(|&c| [c; 5]).collect();
    let pred = vec![DeonticObject; truth.len()];
    let m = compute_metrics(&truth, &pred, &ConflictLabel::CONFLICTS, Averaging::Macro).unwrap();
    check!(m.accuracy == 0.25 && m.recall == 0.25, "4-class A {} R {}", m.accuracy, m.recall);
    check!(m.precision == 0.0625, "4-class P {}", m.precision);
    check!(m.f1 == 0.1, "4-class F {}", m.f1);

    let mut rng = SplitMix64::new(5);
    for t in 0..100 {
        let n = 1 + rng.next_below(200);
        let truth: Vec<ConflictLabel> = (0..n).map(|_| ConflictLabel::ALL[rng.next_below(5)]).collect();
        let pred: Vec<ConflictLabel> = (0..n).map(|_| ConflictLabel::ALL[rng.next_below(5)]).collect();
        let cm = confusion(&truth, &pred, &ConflictLabel::ALL).unwrap();
        let m = compute_metrics(&truth, &pred, &ConflictLabel::ALL, Averaging::Macro).unwrap();
        check!(cm.total() == n, "vector {t}: total {}", cm.total());
        check!(m.accuracy == cm.trace() as f64 / n as f64, "vector {t}: accuracy");
    }
    Ok("hand-counted examples exact; 100 random vectors".into())
}

fn protocol() -> Outcome {
    let mut labels: Vec<ConflictLabel> = ConflictLabel::CONFLICTS.iter().flat_map(|&c| [c; 25]).collect();
    labels.extend([ConflictLabel::NonConflict; 11_329]);
    let folds = make_folds(&labels, Task::TypeCPlusNon, 10, NegativeSampling::MatchConflicts, 42).unwrap();
    check!(folds.k() == 10, "{} folds", folds.k());
    let mut seen = HashSet::new();
    for (i, fold) in folds.folds.iter().enumerate() {
        let c = fold.iter().filter(|&&j| labels[j].is_conflict()).count();
        check!(c == fold.len() - c && c > 0, "fold {i}: {c} conflicts, {} non-conflicts", fold.len() - c);
        for &j in fold {
            check!(seen.insert(j), "index {j} in two folds");
        }
    }

    check!(best_index(&[0.4, 0.9, 0.9, 0.1]) == 1, "tie-break");
    check!(best_index(&[0.2, 0.1, 0.3]) == 2, "argmax");
    let examples: Vec<Example> = (0..40)
        .map(|i| {
            let (label, x) = if i % 2 == 0 { (ConflictLabel::DeonticModality, 3.0) } else { (ConflictLabel::DeonticObject, -3.0) };
            Example { id: format!("e{i}"), feature: offset(vec![x, 0.1 * (i % 7) as f64]), label }
        })
        .collect();
    let sep_folds = make_folds(&examples, Task::TypeC, 4, NegativeSampling::MatchConflicts, 9).unwrap();
    let classes = [ConflictLabel::DeonticModality, ConflictLabel::DeonticObject];
    let cv = cross_validate(&examples, &sep_folds, &classes, &TrainConfig::default(), Averaging::Macro).unwrap();
    let scores: Vec<f64> = cv.fold_metrics.iter().map(|m| m.f1).collect();
    check!(scores.iter().all(|&f| f == 1.0) && cv.best_fold == 0, "perfect folds {scores:?}, best {}", cv.best_fold);

    let dataset = generate_corpus(&SyntheticConfig { counts: [400, 40, 30, 20, 20], seed: 3, swap_sides: true });
    let store = vectors_for_dataset(&dataset, 16, 3).unwrap();
    let config = ExperimentConfig { seed: 3, ..ExperimentConfig::default() };
    let a = run_experiment_grid(&dataset, &store, &config, &Task::ALL, &EmbedOptions::default()).unwrap();
    let b = run_experiment_grid(&dataset, &store, &config, &Task::ALL, &EmbedOptions::default()).unwrap();
    check!(a.to_json() == b.to_json() && a.render_text() == b.render_text(), "reports differ between runs");
    for cell in &a.cells {
        let fs: Vec<f64> = cell.fold_metrics.iter().map(|m| m.f1).collect();
        check!(cell.best_fold == best_index(&fs), "{}: best fold is not argmax F", cell.title());
    }
    Ok(format!("{} unused non-conflicts; reports byte-identical", folds.unused.len()))
}

fn concat_vs_offset_ordering() -> Outcome {
    let mut rows = Vec::new();
    for seed in 42..47u64 {
        let dataset = generate_corpus(&SyntheticConfig { seed, ..SyntheticConfig::default() });
        let store = vectors_for_dataset(&dataset, 50, seed).unwrap();
        let config = ExperimentConfig { seed, ..ExperimentConfig::default() };
        let report = run_experiment_grid(&dataset, &store, &config, &Task::ALL, &EmbedOptions::default()).unwrap();
        let f = |task, mode| report.cell(task, mode).unwrap().test.f1;
        let (nc, no) = (f(Task::TypeCPlusNon, FeatureMode::Concat), f(Task::TypeCPlusNon, FeatureMode::Offset));
        let (tc, to) = (f(Task::TypeC, FeatureMode::Concat), f(Task::TypeC, FeatureMode::Offset));
        check!(tc >= to, "seed {seed}: TypeC Concat {tc:.3} < Offset {to:.3}");
        check!(nc >= no, "seed {seed}: TypeC+Non Concat {nc:.3} < Offset {no:.3}");
        rows.push(format!("{seed}: {to:.2}/{tc:.2} {no:.2}/{nc:.2}"));
    }
    Ok(format!("F offset/concat, TypeC then TypeC+Non: {}", rows.join(", ")))
}

fn random_text(rng: &mut SplitMix64) -> String {
    const PIECES: &[&str] = &[
        "shall", "may", "not", "the Supplier", "\"quoted\"", "Käufer", "müssen", "30 days", "\\", "契約", "tab\there",
        "line\nbreak", "€100", "🙂", " ",
    ];
    let n = 1 + rng.next_below(12);
    let mut s: String = (0..n).map(|_| PIECES[rng.next_below(PIECES.len())]).collect::<Vec<_>>().join(" ");
    if s.trim().is_empty() {
        s.push('x');
    }
    s
}

fn dataset_round_trip() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.jsonl");
    let mut rng = SplitMix64::new(8);
    for t in 0..1000 {
        let n = rng.next_below(30);
        let pairs: Vec<NormPair> = (0..n)
            .map(|i| {
                let mut p = NormPair::new(
                    format!("p{t}-{i}"),
                    random_text(&mut rng),
                    random_text(&mut rng),
                    ConflictLabel::ALL[rng.next_below(5)],
                    [Provenance::Original, Provenance::Authored, Provenance::Generated][rng.next_below(3)],
                );
                if rng.next_below(2) == 0 {
                    p.annotator = Some(random_text(&mut rng));
                }
                p
            })
            .collect();
        let d = Dataset::new("d", pairs).unwrap();
        save_dataset(&d, &path).unwrap();
        let back = load_dataset(&path).unwrap();
        check!(back == d, "dataset {t} changed in the round trip");
        check!(dataset_stats(&back) == dataset_stats(&d), "dataset {t}: stats differ");
    }

    let manifest = dir.path().join("reference.jsonl");
    save_dataset(&generate_corpus(&SyntheticConfig::default()), &manifest).unwrap();
    let stats = dataset_stats(&load_dataset(&manifest).unwrap());
    let counts: Vec<usize> = ConflictLabel::ALL.iter().map(|&l| stats.count(l)).collect();
    check!(counts == REFERENCE_COUNTS, "manifest counts {counts:?}");
    check!(
        [97, 61, 30, 40, 11_329] == [counts[1], counts[2], counts[3], counts[4], counts[0]],
        "manifest counts {counts:?}"
    );
    Ok(format!("1000 datasets; manifest counts {counts:?}"))
}

struct Server {
    addr: SocketAddr,
    stop: Option<tokio::sync::oneshot::Sender<()>>,
    handle: Option<std::thread::JoinHandle<()>>,
}

impl Server {
    fn start(norms: Vec<Norm>, store: &Path, seed: u64) -> Self {
        let state = Arc::new(AppState::new(norms, AnnotationStore::open(store).unwrap(), seed));
        let listener = bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let (tx, rx) = tokio::sync::oneshot::channel::<()>();
        let handle = std::thread::spawn(move || {
            let rt = tokio::runtime::Runtime::new().unwrap();
            rt.block_on(serve(listener, state, async {
                let _ = rx.await;
            }))
            .unwrap();
        });
        Self { addr, stop: Some(tx), handle: Some(handle) }
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        if let Some(tx) = self.stop.take() {
            let _ = tx.send(());
        }
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn request(addr: SocketAddr, method: &str, path: &str, body: &str) -> (u16, String) {
    let mut stream = TcpStream::connect(addr).unwrap();
    write!(
        stream,
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut raw = String::new();
    stream.read_to_string(&mut raw).unwrap();
    let (head, body) = raw.split_once("\r\n\r\n").unwrap();
    (head.split_whitespace().nth(1).unwrap().parse().unwrap(), body.to_string())
}

fn submission(norm: &Norm, edited: &str, label: &str) -> String {
    json!({
        "original_norm_id": norm.id,
        "original_text": norm.text,
        "edited_text": edited,
        "conflict_type": label,
    })
    .to_string()
}

fn service() -> Outcome {
    let body: String = (0..5).map(|i| format!("Party {i} shall deliver item {i} on time. ")).collect();
    let corpus = extract_norms(&Contract::new("c1", "Supply", body).unwrap(), &ModalLexicon::default());
    check!(corpus.len() == 5, "{} norms extracted", corpus.len());
    let dir = tempfile::tempdir().unwrap();

    let path = dir.path().join("coverage.jsonl");
    let server = Server::start(corpus.clone(), &path, 7);
    let mut seen = HashSet::new();
    for _ in 0..200 {
        let (status, body) = request(server.addr, "GET", "/api/norm/random", "");
        check!(status == 200, "random norm: {status}");
        let v: Value = serde_json::from_str(&body).unwrap();
        seen.insert(v["norm_id"].as_str().unwrap().to_string());
    }
    check!(seen.len() == 5, "saw {} of 5 norms in 200 draws", seen.len());

    let (status, record) =
        request(server.addr, "POST", "/api/conflict", &submission(&corpus[2], "Party 2 may not deliver item 2.", "deontic-modality"));
    check!(status == 201, "submission: {status} {record}");
    let fresh = load_dataset(&path).unwrap();
    check!(fresh.len() == 1 && fresh.pairs[0].norm2_text == "Party 2 may not deliver item 2.", "201 not durable");

    for (body, what) in [
        (submission(&corpus[0], &corpus[0].text, "deontic-object"), "unedited text"),
        (submission(&corpus[0], "Party 0 may deliver item 0.", "non-conflict"), "non-conflict label"),
    ] {
        let (status, _) = request(server.addr, "POST", "/api/conflict", &body);
        check!(status == 422, "{what}: {status}");
    }
    check!(load_dataset(&path).unwrap().len() == 1, "rejected submissions were stored");
    drop(server);

    let path = dir.path().join("concurrent.jsonl");
    let server = Server::start(corpus.clone(), &path, 7);
    let addr = server.addr;
    let clients: Vec<_> = (0..2)
        .map(|c| {
            let corpus = corpus.clone();
            std::thread::spawn(move || {
                (0..100)
                    .filter(|i| {
                        let n = &corpus[i % corpus.len()];
                        let edit = format!("Client {c} edit {i}: {} may not apply.", n.id);
                        request(addr, "POST", "/api/conflict", &submission(n, &edit, "deontic-structure")).0 == 201
                    })
                    .count()
            })
        })
        .collect();
    let accepted: usize = clients.into_iter().map(|c| c.join().unwrap()).sum();
    drop(server);
    check!(accepted == 200, "{accepted} of 200 accepted");
    let text = std::fs::read_to_string(&path).unwrap();
    check!(text.lines().count() == 200, "{} lines on disk", text.lines().count());
    let stored = load_dataset(&path).unwrap();
    let distinct: HashSet<&str> = stored.pairs.iter().map(|p| p.norm2_text.as_str()).collect();
    check!(stored.len() == 200 && distinct.len() == 200, "{} records, {} distinct", stored.len(), distinct.len());
    Ok("coverage 5/5 in 200 draws; durable 201; 422 on invalid; 200/200 concurrent records".into())
}
