use hvkg_core::adjudicator::{self, AdjudicateError, ClientContract, HttpClient, LlmClient, MockClient};
use hvkg_core::bench::{self, Table};
use hvkg_core::kg::{load_questions, load_triples, Graph, IdfTable, Question, SchemaGraph};
use hvkg_core::retriever::{self, RetrievalConfig, RetrievalResult};
use hvkg_core::synth::{self, SynthConfig};
use hvkg_core::{Codebook, Operator};
use serde::{Deserialize, Serialize};
use std::fs::{File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::config::{resolve_hdc, resolve_retrieval, resolve_seed, Cli, Command, FileConfig, HdcFlags, Inputs, LlmFlags, ValidateFlags};
use crate::CliError;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let seed = resolve_seed(cli.seed, &file);
    match &cli.command {
        Command::Codebook { triples, out, hdc } => cmd_codebook(triples, out, hdc, &file, seed),
        Command::Retrieve { inputs, retrieval } => {
            let cfg = resolve_retrieval(retrieval, &file, Default::default())?;
            cmd_retrieve(inputs, cfg)
        }
        Command::Answer { inputs, retrieval, llm } => {
            let cfg = resolve_retrieval(retrieval, &file, Default::default())?;
            let client = make_client(llm, &file)?;
            cmd_answer(inputs, cfg, client.as_ref())
        }
        Command::Synth { entities, relations, num_triples, num_questions, max_len, types, out_dir } => {
            let cfg = SynthConfig {
                entities: *entities,
                relations: *relations,
                triples: *num_triples,
                questions: *num_questions,
                max_len: *max_len,
                types: *types,
                seed,
            };
            cmd_synth(&cfg, out_dir)
        }
        Command::Validate(flags) => cmd_validate(flags, seed),
    }
}

fn open_read(path: &Path) -> Result<BufReader<File>, CliError> {
    Ok(BufReader::new(File::open(path).map_err(CliError::io(path))?))
}

fn open_append(path: &Path) -> Result<BufWriter<File>, CliError> {
    let f = OpenOptions::new().create(true).append(true).open(path).map_err(CliError::io(path))?;
    Ok(BufWriter::new(f))
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let (g, report) = load_triples(open_read(path)?).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    log::info!("{}: {} triples ({} duplicates) over {} relations", path.display(), report.triples, report.duplicates, g.num_relations());
    Ok(g)
}

fn cmd_codebook(triples: &Path, out: &Path, flags: &HdcFlags, file: &FileConfig, seed: u64) -> Result<(), CliError> {
    let hdc = resolve_hdc(flags, file, seed)?;
    let g = load_graph(triples)?;
    let mut vocab: Vec<String> = g.relations().to_vec();
    vocab.sort();
    let cb = Codebook::build(hdc, &vocab).map_err(CliError::invalid)?;
    let dir = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(CliError::io(dir))?;
    cb.write_to(BufWriter::new(tmp.as_file_mut()))
        .map_err(|e| CliError::Io { path: out.to_path_buf(), source: std::io::Error::other(e.to_string()) })?;
    tmp.persist(out).map_err(|e| CliError::Io { path: out.to_path_buf(), source: e.error })?;
    println!(
        "codebook: {} relations, d={} ({} x {}x{} {}), written to {}",
        cb.len(),
        hdc.dim(),
        hdc.num_blocks,
        hdc.block_size,
        hdc.block_size,
        hdc.operator,
        out.display()
    );
    Ok(())
}

/// Graph, questions and codebook, checked against each other.
pub struct Loaded {
    pub graph: Graph,
    pub schema_graph: SchemaGraph,
    pub questions: Vec<Question>,
    pub codebook: Codebook,
}

pub fn load_inputs(inputs: &Inputs) -> Result<Loaded, CliError> {
    let graph = load_graph(&inputs.triples)?;
    let questions = load_questions(open_read(&inputs.questions)?, Some(&graph))
        .map_err(|e| CliError::Validation(format!("{}: {e}", inputs.questions.display())))?;
    let codebook = Codebook::read_from(open_read(&inputs.codebook)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", inputs.codebook.display())))?;
    if let Some(missing) = graph.relations().iter().find(|r| !codebook.contains(r)) {
        return Err(CliError::Validation(format!(
            "vocabulary mismatch: relation `{missing}` of {} is not in {}",
            inputs.triples.display(),
            inputs.codebook.display()
        )));
    }
    let schema_graph = SchemaGraph::build(&graph);
    Ok(Loaded { graph, schema_graph, questions, codebook })
}

fn with_codebook(mut cfg: RetrievalConfig, cb: &Codebook) -> RetrievalConfig {
    cfg.hdc = *cb.config();
    cfg
}

fn write_json_line<T: Serialize>(w: &mut impl Write, value: &T, path: &Path) -> Result<(), CliError> {
    serde_json::to_writer(&mut *w, value).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e.into() })?;
    w.write_all(b"\n").map_err(CliError::io(path))
}

fn retrieve_one(l: &Loaded, idf: &IdfTable, q: &Question, cfg: &RetrievalConfig) -> Result<RetrievalResult, CliError> {
    retriever::retrieve(&l.graph, &l.schema_graph, &l.codebook, idf, q, cfg).map_err(CliError::invalid)
}

fn cmd_retrieve(inputs: &Inputs, cfg: RetrievalConfig) -> Result<(), CliError> {
    let l = load_inputs(inputs)?;
    let cfg = with_codebook(cfg, &l.codebook);
    let idf = retriever::build_idf(&l.graph, &l.schema_graph, &l.questions, &cfg).map_err(CliError::invalid)?;
    let mut out = open_append(&inputs.out)?;
    let (mut cands, mut hits, mut labelled, mut empty) = (0usize, 0usize, 0usize, 0usize);
    let mut times = [0u64; 4];
    for q in &l.questions {
        let res = retrieve_one(&l, &idf, q, &cfg)?;
        cands += res.candidates.len();
        empty += res.is_empty() as usize;
        let t = res.timings;
        for (acc, v) in times.iter_mut().zip([t.plan, t.encode, t.score, t.select]) {
            *acc += v;
        }
        if q.gold_schema.is_some() {
            labelled += 1;
            hits += res.hit_at_k(q) as usize;
        }
        write_json_line(&mut out, &res.to_record(), &inputs.out)?;
    }
    out.flush().map_err(CliError::io(&inputs.out))?;
    let n = l.questions.len().max(1) as f64;
    let mut summary = format!(
        "questions={} k={} mean_candidates={:.1} empty={} mean_us plan={:.0} encode={:.0} score={:.0} select={:.0}",
        l.questions.len(),
        cfg.k,
        cands as f64 / n,
        empty,
        times[0] as f64 / n,
        times[1] as f64 / n,
        times[2] as f64 / n,
        times[3] as f64 / n,
    );
    if labelled > 0 {
        summary.push_str(&format!(" hit@k={:.4}", hits as f64 / labelled as f64));
    }
    println!("{summary}");
    Ok(())
}

fn make_client(flags: &LlmFlags, file: &FileConfig) -> Result<Box<dyn LlmClient>, CliError> {
    if flags.source.mock_llm {
        return Ok(Box::new(MockClient::new()));
    }
    let endpoint = flags.source.llm_endpoint.clone().or_else(|| file.llm_endpoint.clone());
    let Some(endpoint) = endpoint else {
        return Err(CliError::Validation("one of --llm-endpoint or --mock-llm is required".into()));
    };
    let mut contract = ClientContract::new(endpoint);
    if let Some(t) = flags.timeout.or(file.timeout) {
        contract.timeout_secs = t;
    }
    if let Some(r) = flags.retries.or(file.retries) {
        contract.max_retries = r;
    }
    if let Some(m) = flags.max_tokens.or(file.max_tokens) {
        contract.max_tokens = m;
    }
    contract.token_env = flags.token_env.clone().or_else(|| file.token_env.clone());
    Ok(Box::new(HttpClient::new(contract).map_err(CliError::invalid)?))
}

/// One line of `answer` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerRecord {
    pub question_id: String,
    pub answer: Option<String>,
    /// 1-based indices into the prompt's path list.
    pub supporting_indices: Vec<usize>,
    pub supporting_paths: Vec<String>,
    pub rationale: Option<String>,
    /// Model responses received for this question.
    pub call_count: u32,
    pub attempts: u32,
    pub prompt_bytes: usize,
    /// `transport`, `parse` or `no_candidates`.
    pub error_kind: Option<String>,
    pub error: Option<String>,
    /// Whether the answer is a gold answer, when gold answers are known.
    pub correct: Option<bool>,
}

impl AnswerRecord {
    fn failed(q: &Question, kind: &str, error: String) -> Self {
        AnswerRecord {
            question_id: q.id.clone(),
            answer: None,
            supporting_indices: Vec::new(),
            supporting_paths: Vec::new(),
            rationale: None,
            call_count: 0,
            attempts: 0,
            prompt_bytes: 0,
            error_kind: Some(kind.into()),
            error: Some(error),
            correct: q.gold_answers.as_ref().map(|_| false),
        }
    }
}

/// Retrieve, render, adjudicate and score one question. Transport and parse
/// failures become records; a successful call count other than one is a
/// hard error.
pub fn answer_question(
    l: &Loaded,
    idf: &IdfTable,
    q: &Question,
    cfg: &RetrievalConfig,
    client: &dyn LlmClient,
) -> Result<AnswerRecord, CliError> {
    let res = retrieve_one(l, idf, q, cfg)?;
    if res.is_empty() {
        return Ok(AnswerRecord::failed(q, "no_candidates", "no candidate paths".into()));
    }
    let bundle = adjudicator::prompt_for(&q.text, res.top_k()).map_err(CliError::invalid)?;
    match adjudicator::adjudicate(client, &bundle) {
        Ok(outcome) => {
            if outcome.calls != 1 {
                return Err(CliError::Validation(format!("question {}: {} model calls, expected 1", q.id, outcome.calls)));
            }
            let a = outcome.adjudication;
            Ok(AnswerRecord {
                question_id: q.id.clone(),
                correct: q.gold_answers.as_ref().map(|g| g.contains(&a.answer)),
                supporting_paths: a.supporting_indices.iter().map(|&i| bundle.paths[i - 1].clone()).collect(),
                supporting_indices: a.supporting_indices,
                answer: Some(a.answer),
                rationale: Some(a.rationale),
                call_count: outcome.calls,
                attempts: outcome.attempts,
                prompt_bytes: bundle.prompt.len(),
                error_kind: None,
                error: None,
            })
        }
        Err(e @ AdjudicateError::Transport { attempts, .. }) => {
            let mut r = AnswerRecord::failed(q, "transport", e.to_string());
            r.attempts = attempts;
            r.prompt_bytes = bundle.prompt.len();
            Ok(r)
        }
        Err(e @ AdjudicateError::Parse { .. }) => {
            let mut r = AnswerRecord::failed(q, "parse", e.to_string());
            r.call_count = 1;
            r.attempts = 1;
            r.prompt_bytes = bundle.prompt.len();
            Ok(r)
        }
        Err(e) => Err(CliError::invalid(e)),
    }
}

/// Load inputs and answer every question; records are returned in input
/// order.
pub fn answer_all(inputs: &Inputs, cfg: RetrievalConfig, client: &dyn LlmClient) -> Result<Vec<AnswerRecord>, CliError> {
    let l = load_inputs(inputs)?;
    let cfg = with_codebook(cfg, &l.codebook);
    let idf = retriever::build_idf(&l.graph, &l.schema_graph, &l.questions, &cfg).map_err(CliError::invalid)?;
    let mut out = open_append(&inputs.out)?;
    let mut records = Vec::with_capacity(l.questions.len());
    for q in &l.questions {
        let rec = answer_question(&l, &idf, q, &cfg, client)?;
        write_json_line(&mut out, &rec, &inputs.out)?;
        records.push(rec);
    }
    out.flush().map_err(CliError::io(&inputs.out))?;
    Ok(records)
}

fn cmd_answer(inputs: &Inputs, cfg: RetrievalConfig, client: &dyn LlmClient) -> Result<(), CliError> {
    let records = answer_all(inputs, cfg, client)?;
    let count = |kind: &str| records.iter().filter(|r| r.error_kind.as_deref() == Some(kind)).count();
    let graded: Vec<bool> = records.iter().filter_map(|r| r.correct).collect();
    let mut summary = format!(
        "questions={} k={} answered={} transport_errors={} parse_errors={} no_candidates={} calls={}",
        records.len(),
        cfg.k,
        records.iter().filter(|r| r.answer.is_some()).count(),
        count("transport"),
        count("parse"),
        count("no_candidates"),
        records.iter().map(|r| r.call_count as u64).sum::<u64>(),
    );
    if !graded.is_empty() {
        let acc = graded.iter().filter(|&&c| c).count() as f64 / graded.len() as f64;
        summary.push_str(&format!(" accuracy={acc:.4}"));
    }
    println!("{summary}");
    match count("transport") {
        0 => Ok(()),
        n => Err(CliError::Transport(format!("{n} question(s) failed to reach the model"))),
    }
}

fn cmd_synth(cfg: &SynthConfig, out_dir: &Path) -> Result<(), CliError> {
    let b = synth::generate(cfg).map_err(CliError::invalid)?;
    std::fs::create_dir_all(out_dir).map_err(CliError::io(out_dir))?;
    let create = |name: &str| -> Result<(BufWriter<File>, std::path::PathBuf), CliError> {
        let path = out_dir.join(name);
        let f = File::create_new(&path).map_err(CliError::io(&path))?;
        Ok((BufWriter::new(f), path))
    };
    let (mut w, p) = create("triples.tsv")?;
    b.write_triples(&mut w).and_then(|_| w.flush()).map_err(CliError::io(&p))?;
    let (mut w, p) = create("questions.jsonl")?;
    b.write_questions(&mut w).and_then(|_| w.flush()).map_err(CliError::io(&p))?;
    let (mut w, p) = create("types.tsv")?;
    b.write_types(&mut w).and_then(|_| w.flush()).map_err(CliError::io(&p))?;
    println!(
        "synth: {} triples, {} questions, {} entities, {} relations in {}",
        b.graph.num_triples(),
        b.questions.len(),
        b.graph.num_entities(),
        b.graph.num_relations(),
        out_dir.display()
    );
    Ok(())
}

pub const EXPERIMENTS: [&str; 5] = ["tail", "capacity", "separation", "order", "scaling"];

struct Check {
    experiment: &'static str,
    name: String,
    value: f64,
    threshold: String,
    pass: bool,
}

fn cmd_validate(flags: &ValidateFlags, seed: u64) -> Result<(), CliError> {
    let selected: Vec<&str> =
        if flags.experiments.is_empty() { EXPERIMENTS.to_vec() } else { flags.experiments.iter().map(String::as_str).collect() };
    if let Some(bad) = selected.iter().find(|e| !EXPERIMENTS.contains(e)) {
        return Err(CliError::Validation(format!("unknown experiment `{bad}` (expected one of {})", EXPERIMENTS.join(","))));
    }
    let mut tail = bench::TailConfig { seed, ..Default::default() };
    if let Some(eps) = flags.epsilon {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(CliError::Validation(format!("--epsilon must lie in (0, 1), got {eps}")));
        }
        tail.epsilon = eps;
    }
    let mut capacity = bench::CapacityConfig { seed, ..Default::default() };
    let mut separation = bench::SeparationConfig { seed, ..Default::default() };
    let mut order = bench::OrderConfig { seed, ..Default::default() };
    let mut scaling = bench::ScalingConfig { seed, ..Default::default() };
    if flags.quick {
        tail.trials = 10_000;
        capacity.m = 100;
        separation.trials = 100;
        order.trials = 50;
        scaling.ns = vec![500, 1000, 2000, 4000];
        scaling.dims = vec![256, 512, 1024, 2048];
        scaling.repetitions = 3;
    }
    if let Some(t) = flags.tail_trials {
        tail.trials = t;
    }
    tail.validate().map_err(CliError::invalid)?;
    capacity.validate().map_err(CliError::invalid)?;
    separation.validate().map_err(CliError::invalid)?;
    order.validate().map_err(CliError::invalid)?;
    scaling.validate().map_err(CliError::invalid)?;

    let save = |t: &Table, config: serde_json::Value| -> Result<(), CliError> {
        let path = t
            .save(&flags.out_dir, &config)
            .map_err(|e| CliError::Io { path: flags.out_dir.clone(), source: std::io::Error::other(e.to_string()) })?;
        println!("wrote {}", path.display());
        Ok(())
    };
    let mut checks = Vec::new();
    let mut fitted_c = None;

    if selected.contains(&"tail") {
        let exp = bench::run_tail_experiment(&tail).map_err(CliError::invalid)?;
        save(&exp.table(), json(&tail))?;
        checks.push(Check {
            experiment: "tail",
            name: "rates non-increasing in d".into(),
            value: exp.monotone() as u8 as f64,
            threshold: "1".into(),
            pass: exp.monotone(),
        });
        if let Some(p) = exp.point(2048) {
            checks.push(Check {
                experiment: "tail",
                name: "rate at d=2048".into(),
                value: p.rate,
                threshold: format!("<= {:.3e}", 10.0 * p.bound),
                pass: p.rate <= 10.0 * p.bound,
            });
        }
        fitted_c = exp.c;
    }
    if selected.contains(&"capacity") {
        if let Some(c) = fitted_c {
            capacity.c = c;
        }
        let exp = bench::run_capacity_experiment(&capacity).map_err(CliError::invalid)?;
        save(&exp.table(), json(&capacity))?;
        checks.push(Check {
            experiment: "capacity",
            name: "measured minimal d".into(),
            value: exp.measured_dim as f64,
            threshold: format!("<= {:.1}", exp.theorem_dim),
            pass: exp.measured_dim as f64 <= exp.theorem_dim,
        });
    }
    if selected.contains(&"separation") {
        let exp = bench::run_separation_check(&separation).map_err(CliError::invalid)?;
        save(&exp.table(), json(&separation))?;
        checks.push(Check {
            experiment: "separation",
            name: format!("success rate at d={}", exp.d),
            value: exp.success_rate,
            threshold: format!(">= {}", 1.0 - separation.delta),
            pass: exp.passed(),
        });
    }
    if selected.contains(&"order") {
        let exp = bench::run_order_sensitivity(&order).map_err(CliError::invalid)?;
        save(&exp.table(), json(&order))?;
        for row in &exp.rows {
            let (threshold, pass) = if row.family.is_commutative() {
                ("= 1 +- 1e-9".to_string(), (row.mean_sim - 1.0).abs() <= 1e-9)
            } else if row.family == Operator::Ghrr {
                ("<= 0.1".to_string(), row.mean_sim <= 0.1)
            } else {
                continue;
            };
            checks.push(Check {
                experiment: "order",
                name: format!("{} length {} mean sim", row.family, row.length),
                value: row.mean_sim,
                threshold,
                pass,
            });
        }
    }
    if selected.contains(&"scaling") {
        let exp = bench::run_scaling_benchmark(&scaling).map_err(CliError::invalid)?;
        save(&exp.table(), json(&scaling))?;
        checks.push(Check {
            experiment: "scaling",
            name: "R^2 of a*N*d + b".into(),
            value: exp.r_squared,
            threshold: ">= 0.98".into(),
            pass: exp.r_squared >= 0.98,
        });
        checks.push(Check {
            experiment: "scaling",
            name: "max relative deviation".into(),
            value: exp.max_rel_deviation,
            threshold: "<= 0.2".into(),
            pass: exp.max_rel_deviation <= 0.2,
        });
    }

    let mut failures = Vec::new();
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!("{status}  {:<10}  {:<34}  {:>12.6e}  {}", c.experiment, c.name, c.value, c.threshold);
        if !c.pass {
            failures.push(format!("{}: {} = {} (want {})", c.experiment, c.name, c.value, c.threshold));
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Threshold(failures))
    }
}

fn json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).unwrap_or(serde_json::Value::Null)
}
