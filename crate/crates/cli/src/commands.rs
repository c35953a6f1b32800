use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Duration;

use emomodes::classifiers::{
    compute_class_weights, predict, threshold_predictions, train_boosted_ovr, train_linear_ovr, ClassWeightsFile, Model,
    ModelFile, PredictionSet,
};
use emomodes::corpus::{corpus_stats, grouped_split, ingest_corpus, load_split, Corpus, CorpusError, Document, SplitAssignment, SplitFractions, Subset};
use emomodes::eval::{
    align, conditional_metrics, confusion_matrix, cooccurrence, cross_f1, expert_agreement_rate, kappa_per_label,
    polarity_metrics, prf1, read_judgments, CrossDirection,
};
use emomodes::features::{
    build_vocabulary, load_embedding_table, vectorize, SparseVector, TokenWeighting, TokenizerSpec, Vocabulary,
};
use emomodes::labels::violations;
use emomodes::lexicons::{lexicon_annotate, polarity_score, project_polarity, EmotionLexicon, Polarity, PolarityLexicon, PolarityMap};
use emomodes::llm::{run_batch, HttpBackend, PromptSet};
use emomodes::{Label, LabelVector, Task};
use serde::{Deserialize, Serialize};

use crate::args::*;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::gold::{self, GoldRecord};

pub fn subset_of(s: SubsetArg) -> Option<Subset> {
    match s {
        SubsetArg::Train => Some(Subset::Train),
        SubsetArg::Dev => Some(Subset::Dev),
        SubsetArg::Test => Some(Subset::Test),
        SubsetArg::All => None,
    }
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    ingest_corpus(path).map_err(|e| CliError::from(e).context(path.display()))
}

fn load_split_for(path: Option<&Path>, corpus: Option<&Corpus>) -> Result<Option<SplitAssignment>> {
    let Some(path) = path else { return Ok(None) };
    let split = load_split(path).map_err(|e| CliError::from(e).context(path.display()))?;
    if let Some(c) = corpus {
        split.check_covers(c).map_err(|e| CliError::from(e).context(path.display()))?;
    }
    Ok(Some(split))
}

/// Documents of the requested subset; all of them without a split.
fn select<'a>(corpus: &'a Corpus, split: Option<&'a SplitAssignment>, subset: SubsetArg) -> Vec<&'a Document> {
    match (split, subset_of(subset)) {
        (Some(split), Some(s)) => corpus.subset(split, s).collect(),
        (None, Some(_)) => {
            log::info!("no split given; using every document");
            corpus.documents.iter().collect()
        }
        (_, None) => corpus.documents.iter().collect(),
    }
}

fn selected(sel: &CorpusSelection) -> Result<(Corpus, Option<SplitAssignment>)> {
    let corpus = load_corpus(&sel.corpus)?;
    let split = load_split_for(sel.split.as_deref(), Some(&corpus))?;
    Ok((corpus, split))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::from(e).context(path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::from(e).context(path.display()))
}

fn gold_of(docs: &[&Document]) -> Result<Vec<LabelVector>> {
    docs.iter()
        .flat_map(|d| &d.sentences)
        .map(|s| s.gold.ok_or_else(|| CorpusError::MissingGold(s.sent_id.clone()).into()))
        .collect()
}

pub fn prepare(a: &PrepareArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let records = gold::records(&corpus)?;
    let bad: Vec<&GoldRecord> = records.iter().filter(|r| !violations(&r.gold).is_empty()).collect();
    if !bad.is_empty() {
        let first = bad[0];
        let msg = format!(
            "{} sentences break derivation rules, first `{}`: {:?}",
            bad.len(),
            first.sent_id,
            violations(&first.gold)
        );
        if a.strict {
            return Err(CliError::validation(msg));
        }
        log::warn!("{msg}");
    }
    let mut w = create(&a.out)?;
    gold::write(&records, &mut w)?;
    w.flush()?;
    eprintln!(
        "{} documents, {} sentences, {} with rule violations",
        corpus.documents.len(),
        records.len(),
        bad.len()
    );
    Ok(())
}

pub fn split(a: &SplitArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let [train, dev, test] = a.fractions[..] else {
        return Err(CliError::validation("--fractions takes three values"));
    };
    let fractions = SplitFractions::new(train, dev, test)?;
    let split = grouped_split(&corpus, fractions, a.seed)?;
    write_text(&a.out, &split.to_json())
}

pub fn stats(a: &StatsArgs, cfg: &RunConfig) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let split = load_split_for(a.split.as_deref(), Some(&corpus))?;
    let stats = corpus_stats(&corpus, split.as_ref())?;
    let text = if a.json {
        serde_json::to_string_pretty(&stats)? + "\n"
    } else {
        stats.to_table()
    };
    match &a.out {
        Some(p) => write_text(p, &text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &a.class_weights {
        let docs = select(&corpus, split.as_ref(), if split.is_some() { SubsetArg::Train } else { SubsetArg::All });
        let gold = gold_of(&docs)?;
        let cap = cfg.train.class_weight_cap;
        let file = ClassWeightsFile::new(compute_class_weights(&gold, cap), cap);
        write_text(path, &(serde_json::to_string_pretty(&file)? + "\n"))?;
    }
    Ok(())
}

/// How a model's inputs were built; stored in the model file.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FeatureSpec {
    Tokens { tokenizer: TokenizerSpec, weighting: TokenWeighting },
    Embeddings { dim: usize },
}

fn featurize(
    spec: &FeatureSpec,
    vocab: Option<&Vocabulary>,
    embeddings: Option<&Path>,
    docs: &[&Document],
) -> Result<Vec<SparseVector>> {
    let sentences = docs.iter().flat_map(|d| &d.sentences);
    match spec {
        FeatureSpec::Tokens { tokenizer, weighting } => {
            let tok = tokenizer.build()?;
            let vocab = vocab.ok_or_else(|| CliError::validation("model file has no vocabulary"))?;
            Ok(sentences.map(|s| vectorize(&s.text, vocab, tok.as_ref(), *weighting)).collect())
        }
        FeatureSpec::Embeddings { dim } => {
            let path = embeddings.ok_or_else(|| CliError::validation("embedding model needs --embeddings"))?;
            let table = load_embedding_table(path).map_err(|e| CliError::from(e).context(path.display()))?;
            if table.dim() != *dim {
                return Err(CliError::validation(format!(
                    "{}: embeddings have {} dimensions, model expects {dim}",
                    path.display(),
                    table.dim()
                )));
            }
            Ok(sentences.map(|s| table.vector(&s.sent_id)).collect::<Result<_, _>>()?)
        }
    }
}

pub fn train(a: &TrainArgs, cfg: &RunConfig) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let split = load_split_for(a.split.as_deref(), Some(&corpus))?;
    let docs = select(&corpus, split.as_ref(), if split.is_some() { SubsetArg::Train } else { SubsetArg::All });
    let y = gold_of(&docs)?;
    let mut tc = cfg.train.clone();
    if let Some(seed) = a.seed {
        tc.seed = seed;
    }
    tc.check()?;

    let embeddings = a.embeddings.as_deref().or(cfg.features.embeddings.as_deref());
    let (spec, vocab) = match embeddings {
        Some(path) => {
            let table = load_embedding_table(path).map_err(|e| CliError::from(e).context(path.display()))?;
            (FeatureSpec::Embeddings { dim: table.dim() }, None)
        }
        None => {
            let tok = cfg.features.tokenizer.build()?;
            let texts = docs.iter().flat_map(|d| &d.sentences).map(|s| s.text.as_str());
            let vocab = build_vocabulary(texts, tok.as_ref())?;
            let spec = FeatureSpec::Tokens {
                tokenizer: cfg.features.tokenizer.clone(),
                weighting: cfg.features.weighting,
            };
            (spec, Some(vocab))
        }
    };
    let x = featurize(&spec, vocab.as_ref(), embeddings, &docs)?;
    let model: Model = match a.annotator {
        AnnotatorKind::Linear => train_linear_ovr(&x, &y, &tc)?.into(),
        AnnotatorKind::Boosted => train_boosted_ovr(&x, &y, &tc)?.into(),
        other => {
            return Err(CliError::validation(format!(
                "train supports linear and boosted annotators, not {other:?}"
            )))
        }
    };
    log::info!("trained {} model on {} sentences, {} features", model.name(), x.len(), model.dim());
    let file = ModelFile::new(model, tc, vocab, serde_json::to_value(&spec)?);
    file.save(&a.out).map_err(|e| CliError::from(e).context(a.out.display()))
}

pub fn predict_cmd(a: &PredictArgs, cfg: &RunConfig) -> Result<()> {
    let (corpus, split) = selected(&a.data)?;
    let docs = select(&corpus, split.as_ref(), a.data.subset);
    let ids: Vec<&str> = docs.iter().flat_map(|d| &d.sentences).map(|s| s.sent_id.as_str()).collect();
    let set = match a.annotator {
        AnnotatorKind::Linear | AnnotatorKind::Boosted => {
            let path = a.model.as_deref().ok_or_else(|| CliError::validation("--model is required"))?;
            let file = ModelFile::load(path).map_err(|e| CliError::from(e).context(path.display()))?;
            let want = if a.annotator == AnnotatorKind::Linear { "linear" } else { "boosted" };
            if file.model.name() != want {
                return Err(CliError::validation(format!(
                    "{}: holds a {} model, not {want}",
                    path.display(),
                    file.model.name()
                )));
            }
            let spec: FeatureSpec = serde_json::from_value(file.features.clone())
                .map_err(|e| CliError::validation(format!("{}: features: {e}", path.display())))?;
            let embeddings = a.embeddings.as_deref().or(cfg.features.embeddings.as_deref());
            let x = featurize(&spec, file.vocabulary.as_ref(), embeddings, &docs)?;
            predict(&file.model, &ids, &x, want)?.with_config_hash(file.config_hash.clone())
        }
        AnnotatorKind::External => {
            let path = a.external.as_deref().ok_or_else(|| CliError::validation("--external is required"))?;
            let set = PredictionSet::load(path).map_err(|e| CliError::from(e).context(path.display()))?;
            let want: HashSet<&str> = ids.iter().copied().collect();
            if let Some(missing) = ids.iter().find(|id| set.get(id).is_none()) {
                return Err(CliError::validation(format!("{}: no prediction for `{missing}`", path.display())));
            }
            if let Some(extra) = set.iter().find(|p| !want.contains(p.sent_id.as_str())) {
                return Err(CliError::validation(format!(
                    "{}: prediction for `{}` outside the selected sentences",
                    path.display(),
                    extra.sent_id
                )));
            }
            set
        }
        AnnotatorKind::Lexicon => return Err(CliError::validation("use `lexicon-annotate` for the lexicon annotator")),
        AnnotatorKind::Llm => return Err(CliError::validation("use `annotate-llm` for the LLM annotator")),
    };
    set.save(&a.out).map_err(|e| CliError::from(e).context(a.out.display()))
}

pub fn annotate_llm(a: &AnnotateLlmArgs, cfg: &RunConfig) -> Result<()> {
    let (corpus, split) = selected(&a.data)?;
    let docs = select(&corpus, split.as_ref(), a.data.subset);
    let mut contexts = Corpus::contexts(docs);
    if let Some(n) = a.limit {
        contexts.truncate(n);
    }
    let prompts = match &a.prompts {
        Some(p) => PromptSet::load(p).map_err(|e| CliError::from(e).context(p.display()))?,
        None => PromptSet::builtin(),
    };
    let ac = &cfg.annotator;
    let backend = HttpBackend::new(&ac.endpoint, &ac.credential_env, Duration::from_secs(ac.timeout_secs))
        .map_err(|e| CliError::Io(e.to_string()))?;
    let cache = ac.open_cache()?;
    let outcome = run_batch(&contexts, &prompts, a.variant, &backend, ac, &cache)?;
    outcome
        .predictions
        .save(&a.out)
        .map_err(|e| CliError::from(e).context(a.out.display()))?;
    if let Some(path) = &a.transcripts {
        let mut w = create(path)?;
        for (i, conv) in outcome.transcripts.iter().enumerate() {
            if i > 0 {
                w.write_all(b"\n")?;
            }
            w.write_all(conv.render().as_bytes())?;
        }
        w.flush()?;
    }
    eprintln!("{}", outcome.summary());
    if !outcome.failures.is_empty() {
        let ids: Vec<&str> = outcome.failures.iter().map(|f| f.sent_id.as_str()).collect();
        return Err(CliError::Io(format!(
            "{} sentences failed and were left out of {}: {}",
            ids.len(),
            a.out.display(),
            ids.join(", ")
        )));
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolarityRecord {
    sent_id: String,
    polarity: Polarity,
}

pub fn lexicon_annotate_cmd(a: &LexiconArgs) -> Result<()> {
    let (corpus, split) = selected(&a.data)?;
    let docs = select(&corpus, split.as_ref(), a.data.subset);
    let lex = EmotionLexicon::load(&a.lexicon).map_err(|e| CliError::from(e).context(a.lexicon.display()))?;
    let mut set = PredictionSet::new("lexicon");
    for s in docs.iter().flat_map(|d| &d.sentences) {
        set.push_vector(s.sent_id.clone(), lexicon_annotate(&s.text, &lex))?;
    }
    set.save(&a.out).map_err(|e| CliError::from(e).context(a.out.display()))?;

    if let (Some(lp), Some(out)) = (&a.polarity_lexicon, &a.polarity_out) {
        let pol = PolarityLexicon::load(lp).map_err(|e| CliError::from(e).context(lp.display()))?;
        let mut w = create(out)?;
        for s in docs.iter().flat_map(|d| &d.sentences) {
            let rec = PolarityRecord {
                sent_id: s.sent_id.clone(),
                polarity: polarity_score(&s.text, &pol),
            };
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
    }
    Ok(())
}

fn read_polarity(path: &Path) -> Result<BTreeMap<String, Polarity>> {
    let file = File::open(path).map_err(|e| CliError::from(e).context(path.display()))?;
    let mut out = BTreeMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: PolarityRecord = serde_json::from_str(&line)
            .map_err(|e| CliError::validation(format!("{}: line {}: {e}", path.display(), i + 1)))?;
        if out.insert(r.sent_id.clone(), r.polarity).is_some() {
            return Err(CliError::validation(format!(
                "{}: line {}: duplicate sentence `{}`",
                path.display(),
                i + 1,
                r.sent_id
            )));
        }
    }
    Ok(out)
}

fn load_gold(path: &Path, split: Option<&Path>, subset: Option<SubsetArg>) -> Result<(Vec<GoldRecord>, Option<String>)> {
    let records = gold::load(path)?;
    let Some(split) = load_split_for(split, None)? else {
        return Ok((records, None));
    };
    let subset = subset.unwrap_or(SubsetArg::Test);
    let name = subset_of(subset).map_or("all", Subset::name).to_string();
    Ok((gold::restrict(records, &split, subset)?, Some(name)))
}

/// `(ids, gold, pred, set)`.
type Aligned = (Vec<String>, Vec<LabelVector>, Vec<LabelVector>, PredictionSet);

/// Thresholded predictions aligned to gold.
fn aligned(records: &[GoldRecord], pred: &Path, threshold: f64) -> Result<Aligned> {
    let set = PredictionSet::load(pred).map_err(|e| CliError::from(e).context(pred.display()))?;
    let bits = threshold_predictions(&set, threshold);
    let (ids, g, p) = align(records.iter().map(|r| (r.sent_id.as_str(), r.gold)), &bits)
        .map_err(|e| CliError::from(e).context(pred.display()))?;
    Ok((ids, g, p, set))
}

pub fn evaluate(a: &EvaluateArgs, cfg: &RunConfig) -> Result<()> {
    let (records, split_name) = load_gold(&a.gold, a.split.as_deref(), a.subset)?;
    let threshold = cfg.threshold(a.threshold)?;
    let (ids, g, p, set) = aligned(&records, &a.pred, threshold)?;

    let bad: Vec<&String> = ids.iter().zip(&p).filter(|(_, v)| !violations(v).is_empty()).map(|(id, _)| id).collect();
    if !bad.is_empty() {
        let msg = format!("{} predicted vectors break derivation rules, first `{}`", bad.len(), bad[0]);
        if a.strict || cfg.strict {
            return Err(CliError::validation(msg));
        }
        log::warn!("{msg}");
    }

    let report = match (a.condition, a.task) {
        (Some(label), Some(task)) => conditional_metrics(&g, &p, label, task)?,
        _ => prf1(&g, &p)?,
    };
    let report = report.with_meta(Some(&set.annotator), split_name.as_deref(), set.config_hash.as_deref());
    print!("{}", report.to_table());

    let mut json = serde_json::from_str::<serde_json::Value>(&report.to_json())?;
    if let Some(path) = &a.polarity {
        let map = match &a.polarity_map {
            Some(m) => PolarityMap::load(m).map_err(|e| CliError::from(e).context(m.display()))?,
            None => PolarityMap::default(),
        };
        let pred = read_polarity(path)?;
        let mut gp = Vec::with_capacity(ids.len());
        let mut pp = Vec::with_capacity(ids.len());
        for (id, gv) in ids.iter().zip(&g) {
            let v = pred
                .get(id)
                .ok_or_else(|| CliError::validation(format!("{}: no polarity for `{id}`", path.display())))?;
            gp.push(project_polarity(gv, &map));
            pp.push(*v);
        }
        let pr = polarity_metrics(&gp, &pp)?;
        print!("\n{}", pr.to_table());
        json["polarity"] = serde_json::from_str(&pr.to_json())?;
    }
    if let Some(out) = &a.out {
        write_text(out, &(serde_json::to_string_pretty(&json)? + "\n"))?;
    }
    Ok(())
}

pub fn analyze(a: &AnalyzeArgs, cfg: &RunConfig) -> Result<()> {
    let (records, _) = load_gold(&a.gold, a.split.as_deref(), a.subset)?;
    fs::create_dir_all(&a.out).map_err(|e| CliError::from(e).context(a.out.display()))?;
    let out = |name: &str| a.out.join(name);
    let mut summary = serde_json::Map::new();

    let gold: Vec<LabelVector> = records.iter().map(|r| r.gold).collect();
    let co = cooccurrence(&gold);
    write_text(&out("cooccurrence.txt"), &co.to_table())?;
    summary.insert("cooccurrence".into(), serde_json::to_value(&co)?);

    if let Some(pred) = &a.pred {
        let threshold = cfg.threshold(a.threshold)?;
        let (_, g, p, _) = aligned(&records, pred, threshold)?;
        let mut matrices = Vec::new();
        for task in Task::ALL {
            let m = confusion_matrix(task, &g, &p)?;
            let stem = format!("confusion_{}", task.name().to_lowercase());
            write_text(&out(&format!("{stem}.csv")), &m.to_csv())?;
            write_text(&out(&format!("{stem}.txt")), &m.to_table())?;
            matrices.push(m);
        }
        summary.insert("confusion".into(), serde_json::to_value(&matrices)?);

        for (dir, name) in [
            (CrossDirection::ModeGivenCategory, "mode_given_category"),
            (CrossDirection::CategoryGivenMode, "category_given_mode"),
        ] {
            let t = cross_f1(&g, &p, dir)?;
            write_text(&out(&format!("{name}.txt")), &t.to_table())?;
            summary.insert(name.into(), serde_json::to_value(&t)?);
        }

        let kappa = kappa_per_label(&g, &p)?;
        let by_label: BTreeMap<&str, f64> = Label::ALL.iter().map(|l| (l.name(), kappa[l.index()])).collect();
        summary.insert("kappa".into(), serde_json::to_value(&by_label)?);
    }

    if let Some(path) = &a.judgments {
        let file = File::open(path).map_err(|e| CliError::from(e).context(path.display()))?;
        let judgments = read_judgments(BufReader::new(file)).map_err(|e| CliError::from(e).context(path.display()))?;
        let table = expert_agreement_rate(&judgments)?;
        write_text(&out("agreement.txt"), &table.to_table())?;
        summary.insert("agreement".into(), serde_json::to_value(&table)?);
    }

    write_text(
        &out("analysis.json"),
        &(serde_json::to_string_pretty(&serde_json::Value::Object(summary))? + "\n"),
    )
}
