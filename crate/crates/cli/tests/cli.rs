use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use serde_json::{json, Value};
use tempfile::TempDir;

const GENRES: [&str; 3] = ["journalistic", "encyclopedic", "novel"];
const MODES: [&str; 4] = ["labeled", "behavioral", "displayed", "suggested"];
const CATEGORIES: [&str; 12] = [
    "anger",
    "disgust",
    "joy",
    "fear",
    "surprise",
    "sadness",
    "admiration",
    "guilt",
    "embarrassment",
    "pride",
    "jealousy",
    "other",
];

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_emomodes"));
    c.env_remove("RUST_LOG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Twelve documents of three sentences. The first and last sentence of each
/// carry one segment, so every mode and every category has support and
/// every middle sentence is non-emotional.
fn corpus_lines() -> Vec<String> {
    (0..12)
        .map(|i| {
            let s0 = format!("Le témoin numéro {i} pleure en silence.");
            let s1 = format!("La réunion {i} commence à huit heures.");
            let s2 = format!("Il ressent une grande colère {i} contre eux.");
            let (a, b) = (s0.chars().count(), s1.chars().count());
            let start2 = a + 1 + b + 1;
            let end2 = start2 + s2.chars().count();
            json!({
                "doc_id": format!("doc{i:02}"),
                "genre": GENRES[i % 3],
                "sentences": [s0, s1, s2],
                "segments": [
                    {"start": 0, "end": a, "mode": MODES[i % 4], "category": CATEGORIES[i], "annotator": "e1"},
                    {"start": start2, "end": end2, "mode": MODES[(i + 1) % 4], "category": CATEGORIES[(i + 5) % 12], "annotator": "e2"}
                ]
            })
            .to_string()
        })
        .collect()
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        let w = Work { dir: TempDir::new().unwrap() };
        fs::write(w.path("corpus.jsonl"), corpus_lines().join("\n") + "\n").unwrap();
        w
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }

    fn ok(&self, args: &[&str]) -> Output {
        let o = run(args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
        o
    }

    fn gold(&self) -> PathBuf {
        let gold = self.path("gold.jsonl");
        if !gold.exists() {
            self.ok(&["prepare", "--corpus", &self.s("corpus.jsonl"), "--out", p(&gold)]);
        }
        gold
    }

    fn split(&self) -> PathBuf {
        let split = self.path("split.json");
        if !split.exists() {
            self.ok(&["split", "--corpus", &self.s("corpus.jsonl"), "--seed", "7", "--out", p(&split)]);
        }
        split
    }
}

fn jsonl(path: &Path) -> Vec<Value> {
    BufReader::new(fs::File::open(path).unwrap())
        .lines()
        .map(|l| serde_json::from_str(&l.unwrap()).unwrap())
        .collect()
}

/// Prediction JSONL whose scores are exactly the gold bits.
fn predictions_from_gold(gold: &Path, out: &Path) {
    let lines: Vec<String> = jsonl(gold)
        .iter()
        .map(|r| json!({"sent_id": r["sent_id"], "scores": r["gold"], "annotator": "oracle"}).to_string())
        .collect();
    fs::write(out, lines.join("\n") + "\n").unwrap();
}

#[test]
fn prepare_writes_one_gold_line_per_sentence() {
    let w = Work::new();
    let rows = jsonl(&w.gold());
    assert_eq!(rows.len(), 36);
    assert_eq!(rows[0]["sent_id"], "doc00:0");
    // labeled + anger: emotional, labeled, basic, anger
    let bits: Vec<u64> = rows[0]["gold"].as_array().unwrap().iter().map(|b| b.as_u64().unwrap()).collect();
    let on: Vec<usize> = bits.iter().enumerate().filter(|(_, b)| **b == 1).map(|(i, _)| i).collect();
    assert_eq!(on, vec![0, 2, 5, 9]);
    assert!(rows[1]["gold"].as_array().unwrap().iter().all(|b| b == 0));
}

#[test]
fn evaluate_identical_predictions_scores_one_everywhere() {
    let w = Work::new();
    let gold = w.gold();
    let pred = w.path("pred.jsonl");
    predictions_from_gold(&gold, &pred);
    let report = w.path("report.json");
    let o = w.ok(&["evaluate", "--gold", p(&gold), "--pred", p(&pred), "--out", p(&report)]);
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("joy"), "{table}");
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let labels = r["labels"].as_array().unwrap();
    assert_eq!(labels.len(), 19);
    for m in labels {
        assert!(m["support"].as_u64().unwrap() > 0, "{m}");
        assert_eq!(m["f1"], 1.0, "{m}");
    }
    assert_eq!(r["meta"]["annotator"], "oracle");
}

#[test]
fn evaluate_conditional_and_subset() {
    let w = Work::new();
    let gold = w.gold();
    let split = w.split();
    let pred = w.path("pred.jsonl");
    predictions_from_gold(&gold, &pred);
    // Predictions cover every sentence, gold only the train subset: misaligned.
    let o = run(&["evaluate", "--gold", p(&gold), "--pred", p(&pred), "--split", p(&split), "--subset", "train"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("unknown sentence"), "{}", stderr(&o));

    let report = w.path("cond.json");
    w.ok(&[
        "evaluate", "--gold", p(&gold), "--pred", p(&pred), "--condition", "labeled", "--task", "D", "--out", p(&report),
    ]);
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["meta"]["condition"], "labeled");
    assert_eq!(r["labels"].as_array().unwrap().len(), 12);
}

#[test]
fn evaluate_strict_rejects_inconsistent_predictions() {
    let w = Work::new();
    let gold = w.gold();
    let pred = w.path("pred.jsonl");
    let lines: Vec<String> = jsonl(&gold)
        .iter()
        .map(|r| {
            let mut scores: Vec<f64> = r["gold"].as_array().unwrap().iter().map(|b| b.as_f64().unwrap()).collect();
            scores[0] = 1.0;
            json!({"sent_id": r["sent_id"], "scores": scores, "annotator": "x"}).to_string()
        })
        .collect();
    fs::write(&pred, lines.join("\n")).unwrap();
    w.ok(&["evaluate", "--gold", p(&gold), "--pred", p(&pred)]);
    let o = run(&["evaluate", "--gold", p(&gold), "--pred", p(&pred), "--strict"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("derivation rules"), "{}", stderr(&o));
}

#[test]
fn split_is_deterministic_per_seed() {
    let w = Work::new();
    let corpus = w.s("corpus.jsonl");
    let (a, b, c) = (w.path("a.json"), w.path("b.json"), w.path("c.json"));
    w.ok(&["split", "--corpus", &corpus, "--seed", "7", "--out", p(&a)]);
    w.ok(&["split", "--corpus", &corpus, "--seed", "7", "--out", p(&b)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    w.ok(&["split", "--corpus", &corpus, "--seed", "7", "--fractions", "0.5,0.25,0.25", "--out", p(&c)]);
    let v: Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(v["assignment"].as_object().unwrap().len(), 12);
    let o = run(&["split", "--corpus", &corpus, "--seed", "1", "--fractions", "0.5,0.5,0", "--out", p(&c)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn malformed_corpus_reports_line_and_exits_one() {
    let w = Work::new();
    let mut lines = corpus_lines();
    lines[2] = "{\"doc_id\": \"broken\", ".into();
    fs::write(w.path("bad.jsonl"), lines.join("\n")).unwrap();
    let o = run(&["prepare", "--corpus", &w.s("bad.jsonl"), "--out", &w.s("g.jsonl")]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn missing_input_exits_two() {
    let w = Work::new();
    let o = run(&["prepare", "--corpus", &w.s("absent.jsonl"), "--out", &w.s("g.jsonl")]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&run(&["split", "--no-such-flag"])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["evaluate", "--gold", "g.jsonl", "--pred", "p.jsonl", "--condition", "nope", "--task", "B"])), 64);
    // the credential has no flag
    assert_eq!(code(&run(&["annotate-llm", "--api-key", "k", "--corpus", "c", "--out", "o"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn config_with_unknown_key_is_rejected() {
    let w = Work::new();
    let cfg = w.path("cfg.json");
    fs::write(&cfg, r#"{"train": {"epochs": 3, "learnig_rate": 0.2}}"#).unwrap();
    let o = run(&["--config", p(&cfg), "stats", "--corpus", &w.s("corpus.jsonl")]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("learnig_rate"), "{}", stderr(&o));

    fs::write(&cfg, r#"{"threshold": 1.5}"#).unwrap();
    let gold = w.gold();
    let pred = w.path("pred.jsonl");
    predictions_from_gold(&gold, &pred);
    let o = run(&["--config", p(&cfg), "evaluate", "--gold", p(&gold), "--pred", p(&pred)]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn stats_table_json_and_class_weights() {
    let w = Work::new();
    let split = w.split();
    let corpus = w.s("corpus.jsonl");
    let o = w.ok(&["stats", "--corpus", &corpus, "--split", p(&split)]);
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("train") && table.contains("test"), "{table}");

    let js = w.path("stats.json");
    let weights = w.path("weights.json");
    w.ok(&[
        "stats", "--corpus", &corpus, "--json", "--out", p(&js), "--class-weights", p(&weights),
    ]);
    let v: Value = serde_json::from_str(&fs::read_to_string(&js).unwrap()).unwrap();
    assert!(v["subsets"].is_array());

    let cw: Value = serde_json::from_str(&fs::read_to_string(&weights).unwrap()).unwrap();
    let labels: Vec<&str> = cw["labels"].as_array().unwrap().iter().map(|l| l.as_str().unwrap()).collect();
    assert_eq!(labels[0], "emotional");
    assert_eq!(labels.len(), 19);
    let ws: Vec<f64> = cw["weights"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    // 24 emotional of 36 sentences: negatives / positives
    assert!((ws[0] - 12.0 / 24.0).abs() < 1e-12, "{}", ws[0]);
    // every category has 2 positives
    assert!((ws[15] - 34.0 / 2.0).abs() < 1e-12, "{}", ws[15]);
}

#[test]
fn train_predict_evaluate_round_trip() {
    let w = Work::new();
    let corpus = w.s("corpus.jsonl");
    let gold = w.gold();
    for kind in ["linear", "boosted"] {
        let model = w.path(&format!("{kind}.json"));
        let pred = w.path(&format!("{kind}.jsonl"));
        w.ok(&["--jobs", "2", "train", "--corpus", &corpus, "--annotator", kind, "--seed", "3", "--out", p(&model)]);
        w.ok(&[
            "predict", "--corpus", &corpus, "--subset", "all", "--annotator", kind, "--model", p(&model), "--out", p(&pred),
        ]);
        let rows = jsonl(&pred);
        assert_eq!(rows.len(), 36);
        assert_eq!(rows[0]["annotator"], kind);
        assert!(rows[0]["config_hash"].is_string());
        w.ok(&["evaluate", "--gold", p(&gold), "--pred", p(&pred)]);

        let wrong = if kind == "linear" { "boosted" } else { "linear" };
        let o = run(&[
            "predict", "--corpus", &corpus, "--subset", "all", "--annotator", wrong, "--model", p(&model), "--out", p(&pred),
        ]);
        assert_eq!(code(&o), 1);
    }
    // same seed, same model
    let again = w.path("again.json");
    w.ok(&["train", "--corpus", &corpus, "--annotator", "linear", "--seed", "3", "--out", p(&again)]);
    assert_eq!(fs::read(w.path("linear.json")).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn train_on_embeddings() {
    let w = Work::new();
    let corpus = w.s("corpus.jsonl");
    let emb = w.path("emb.tsv");
    let rows: Vec<String> = (0..12)
        .flat_map(|d| (0..3).map(move |s| format!("doc{d:02}:{s}\t{}\t{}\t{}", d % 3, s, (d + s) % 2)))
        .collect();
    fs::write(&emb, rows.join("\n") + "\n").unwrap();
    let model = w.path("m.json");
    let pred = w.path("p.jsonl");
    w.ok(&["train", "--corpus", &corpus, "--annotator", "linear", "--embeddings", p(&emb), "--out", p(&model)]);
    let o = run(&["predict", "--corpus", &corpus, "--subset", "all", "--annotator", "linear", "--model", p(&model), "--out", p(&pred)]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    w.ok(&[
        "predict", "--corpus", &corpus, "--subset", "all", "--annotator", "linear", "--model", p(&model), "--embeddings", p(&emb),
        "--out", p(&pred),
    ]);
    assert_eq!(jsonl(&pred).len(), 36);
}

#[test]
fn external_predictions_must_cover_the_selection() {
    let w = Work::new();
    let corpus = w.s("corpus.jsonl");
    let gold = w.gold();
    let full = w.path("full.jsonl");
    predictions_from_gold(&gold, &full);
    let out = w.path("out.jsonl");
    w.ok(&["predict", "--corpus", &corpus, "--subset", "all", "--annotator", "external", "--external", p(&full), "--out", p(&out)]);
    let (a, b) = (jsonl(&full), jsonl(&out));
    assert_eq!(a.len(), b.len());
    assert_eq!(a[5]["sent_id"], b[5]["sent_id"]);
    assert_eq!(b[5]["annotator"], "oracle");

    let text = fs::read_to_string(&full).unwrap();
    let partial: Vec<&str> = text.lines().skip(1).collect();
    fs::write(&full, partial.join("\n")).unwrap();
    let o = run(&["predict", "--corpus", &corpus, "--subset", "all", "--annotator", "external", "--external", p(&full), "--out", p(&out)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("doc00:0"), "{}", stderr(&o));
}

#[test]
fn lexicon_annotate_and_polarity_evaluation() {
    let w = Work::new();
    let corpus = w.s("corpus.jsonl");
    let lex = w.path("lex.tsv");
    fs::write(&lex, "# emotions\ncolère\tlabeled\tanger\npleure\tbehavioral\n").unwrap();
    let pol = w.path("pol.tsv");
    fs::write(&pol, "colère\t0.8\t0.0\npleure\t0.5\t0.1\n").unwrap();
    let (pred, polout) = (w.path("lex.jsonl"), w.path("pol.jsonl"));
    w.ok(&[
        "lexicon-annotate", "--corpus", &corpus, "--subset", "all", "--lexicon", p(&lex), "--out", p(&pred),
        "--polarity-lexicon", p(&pol), "--polarity-out", p(&polout),
    ]);
    let rows = jsonl(&pred);
    assert_eq!(rows.len(), 36);
    assert_eq!(rows[0]["annotator"], "lexicon");
    let bits = |r: &Value| -> Vec<f64> { r["scores"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect() };
    // "pleure": behavioral; "colère": labeled anger
    assert_eq!(bits(&rows[0])[1], 1.0);
    assert_eq!(bits(&rows[2])[2], 1.0);
    assert_eq!(bits(&rows[2])[9], 1.0);
    assert!(bits(&rows[1]).iter().all(|x| *x == 0.0));

    let pols = jsonl(&polout);
    assert_eq!(pols[0]["polarity"], "negative");
    assert_eq!(pols[1]["polarity"], "neutral");

    let report = w.path("r.json");
    w.ok(&["evaluate", "--gold", p(&w.gold()), "--pred", p(&pred), "--polarity", p(&polout), "--out", p(&report)]);
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let names: Vec<&str> = r["polarity"]["labels"].as_array().unwrap().iter().map(|m| m["label"].as_str().unwrap()).collect();
    assert_eq!(names, vec!["positive", "negative"]);
}

#[test]
fn analyze_writes_tables() {
    let w = Work::new();
    let gold = w.gold();
    let pred = w.path("pred.jsonl");
    predictions_from_gold(&gold, &pred);
    let judgments = w.path("j.jsonl");
    fs::write(
        &judgments,
        "{\"source\": \"human\", \"agree\": true}\n{\"source\": \"model\", \"agree\": false}\n{\"source\": \"both\", \"agree\": true}\n",
    )
    .unwrap();
    let out = w.path("analysis");
    w.ok(&["analyze", "--gold", p(&gold), "--pred", p(&pred), "--judgments", p(&judgments), "--out", p(&out)]);
    for f in [
        "cooccurrence.txt",
        "confusion_a.csv",
        "confusion_b.csv",
        "confusion_c.csv",
        "confusion_d.csv",
        "mode_given_category.txt",
        "category_given_mode.txt",
        "agreement.txt",
        "analysis.json",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let v: Value = serde_json::from_str(&fs::read_to_string(out.join("analysis.json")).unwrap()).unwrap();
    for (label, k) in v["kappa"].as_object().unwrap() {
        assert_eq!(k.as_f64().unwrap(), 1.0, "{label}");
    }
    let csv = fs::read_to_string(out.join("confusion_d.csv")).unwrap();
    assert!(csv.lines().next().unwrap().contains("joy"), "{csv}");
}

/// Minimal chat-completion server: answers every request with `reply`,
/// recording the Authorization headers it sees.
fn serve(reply: &'static str, calls: Arc<AtomicUsize>, auth: Arc<std::sync::Mutex<Vec<String>>>) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0usize;
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap_or(0) == 0 {
                    break;
                }
                let lower = line.to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                if lower.starts_with("authorization:") {
                    auth.lock().unwrap().push(line.trim().to_string());
                }
                if line == "\r\n" {
                    break;
                }
            }
            let mut body = vec![0; len];
            let _ = reader.read_exact(&mut body);
            calls.fetch_add(1, Ordering::SeqCst);
            let payload = json!({"choices": [{"message": {"role": "assistant", "content": reply}}]}).to_string();
            let _ = write!(
                stream,
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
                payload.len()
            );
        }
    });
    format!("http://{addr}/v1/chat/completions")
}

#[test]
fn annotate_llm_against_local_backend() {
    let w = Work::new();
    let calls = Arc::new(AtomicUsize::new(0));
    let auth = Arc::new(std::sync::Mutex::new(Vec::new()));
    let endpoint = serve("non", calls.clone(), auth.clone());
    let cfg = w.path("cfg.json");
    fs::write(
        &cfg,
        json!({"annotator": {"endpoint": endpoint, "credential_env": "EMOMODES_TEST_TOKEN", "cache_dir": "cache", "backoff_ms": 1}})
            .to_string(),
    )
    .unwrap();
    let corpus = w.s("corpus.jsonl");
    let out = w.path("llm.jsonl");
    let transcripts = w.path("t.txt");
    let args = [
        "--config", p(&cfg), "--jobs", "2", "annotate-llm", "--corpus", &corpus, "--subset", "all", "--limit", "2",
        "--transcripts", p(&transcripts), "--out", p(&out),
    ];

    let o = bin().args(args).env_remove("EMOMODES_TEST_TOKEN").output().unwrap();
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("EMOMODES_TEST_TOKEN"), "{}", stderr(&o));
    assert_eq!(calls.load(Ordering::SeqCst), 0);

    let o = bin().args(args).env("EMOMODES_TEST_TOKEN", "sk-test").output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(calls.load(Ordering::SeqCst), 38);
    assert!(auth.lock().unwrap().iter().all(|h| h == "Authorization: Bearer sk-test" || h == "authorization: Bearer sk-test"));
    let rows = jsonl(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["annotator"], "llm");
    assert!(rows[0]["scores"].as_array().unwrap().iter().all(|x| x == 0.0));
    let t = fs::read_to_string(&transcripts).unwrap();
    assert_eq!(t.matches("Assistant:\nnon").count(), 38);

    // second run is served from the cache
    let o = bin().args(args).env("EMOMODES_TEST_TOKEN", "sk-test").output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(calls.load(Ordering::SeqCst), 38);
    assert!(stderr(&o).contains("0 backend calls, 38 cache hits"), "{}", stderr(&o));
    assert!(w.path("cache").is_dir());
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn committed_external_predictions_evaluate_end_to_end() {
    let w = Work::new();
    let corpus = fixture("external_corpus.jsonl");
    let ext = fixture("external_predictions.jsonl");
    let gold = w.path("gold.jsonl");
    let checked = w.path("checked.jsonl");
    let report = w.path("report.json");
    w.ok(&["prepare", "--corpus", p(&corpus), "--out", p(&gold), "--strict"]);
    w.ok(&[
        "predict", "--corpus", p(&corpus), "--subset", "all", "--annotator", "external", "--external", p(&ext), "--out",
        p(&checked),
    ]);
    w.ok(&["evaluate", "--gold", p(&gold), "--pred", p(&checked), "--out", p(&report)]);
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["meta"]["annotator"], "finetuned");
    assert_eq!(r["meta"]["config_hash"], "3f1c0a9e");
    let get = |name: &str| r["labels"].as_array().unwrap().iter().find(|m| m["label"] == name).unwrap().clone();
    // ext2:1 is predicted emotional (sadness) but has no gold annotation
    let emo = get("emotional");
    assert_eq!(emo["precision"], 0.75);
    assert_eq!(emo["recall"], 1.0);
    assert!((emo["f1"].as_f64().unwrap() - 6.0 / 7.0).abs() < 1e-12);
    assert_eq!(get("joy")["f1"], 1.0);
    assert_eq!(get("sadness")["support"], 0);
    assert_eq!(get("sadness")["counts"]["fp"], 1);
}
