//! Command-line front end for the `darkcorpus` binary.
//!
//! Every subcommand reads and writes the JSONL page format, so stages can be
//! chained through files or pipes. Exit codes: 0 success, 1 usage, 2 input
//! error, 3 stage failure.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::balance::{self, Category, CategoryDistribution, ClassifierSpec};
use crate::density::{derive_thresholds, DensityThresholds, DensityVerdict};
use crate::emit::{write_manifest, CaseVariant, CorpusManifest, CorpusWriter, StageRecord, TextVariant};
use crate::folds::{repeated_kfold, FoldAssignment};
use crate::ingest::{language_gate, load_pages, LanguageMode, PageReader, PageRecord};
use crate::minhash::{sign_pages, Deduper, MinHasher};
use crate::pipeline::{mask_pages, run_pipeline, PipelineConfig};
use crate::stats::{char_quartiles, reduction_report, word_length_histogram, CharCountQuartiles, ReductionReport};
use crate::rng;

const CHUNK_PAGES: usize = 2048;

#[derive(Debug, Parser)]
#[command(name = "darkcorpus", version, about = "Curate crawled web pages into a pretraining text corpus")]
pub struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Input JSONL file, or `-` for stdin.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file (`-` for stdout); for `run`, the output directory.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// JSON config file, or a manifest from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for per-page stages.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the whole pipeline and write corpus, manifest and stats.
    Run(RunArgs),
    /// Corpus statistics as JSON.
    Stats(StatsArgs),
    /// Ingest, language gate and density filter.
    Filter(FilterArgs),
    /// Mask identifiers and clean up characters.
    Mask(MaskArgs),
    /// Drop pages whose MinHash signature was already seen.
    Dedup(DedupArgs),
    /// Classify pages and down-sample categories above the cap.
    Balance(BalanceArgs),
    /// Join pages into the corpus text.
    Emit(EmitArgs),
    /// Stratified (repeated) k-fold assignments for labeled records.
    Folds(FoldsArgs),
}

#[derive(Debug, Args, Default)]
struct FilterFlags {
    /// trust_label, heuristic or accept_all.
    #[arg(long)]
    language_mode: Option<LanguageMode>,
    #[arg(long)]
    accept_language: Option<String>,
    #[arg(long)]
    heuristic_threshold: Option<f64>,
    #[arg(long)]
    min_chars: Option<u64>,
    #[arg(long)]
    max_chars: Option<u64>,
    /// Use half of q1 and double q3 of the input instead of fixed thresholds.
    #[arg(long)]
    derive_thresholds: bool,
}

#[derive(Debug, Args, Default)]
struct MaskFlags {
    /// Comma-separated rule names, e.g. `email,onion_url,whitespace`.
    #[arg(long, value_delimiter = ',')]
    rules: Option<Vec<String>>,
}

#[derive(Debug, Args, Default)]
struct DedupFlags {
    #[arg(long)]
    shingle_n: Option<usize>,
    #[arg(long)]
    num_perms: Option<usize>,
    #[arg(long)]
    minhash_seed: Option<u64>,
    /// Also drop pages at least this similar to a kept page.
    #[arg(long)]
    near_dup_threshold: Option<f64>,
}

#[derive(Debug, Args, Default)]
struct BalanceFlags {
    #[arg(long)]
    cap_bytes: Option<u64>,
    #[arg(long)]
    balance_seed: Option<u64>,
    /// label, keyword or exec:<command>.
    #[arg(long)]
    classifier: Option<ClassifierSpec>,
    /// JSON map of category to word list for the keyword classifier.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Category for pages that give no signal.
    #[arg(long)]
    fallback: Option<Category>,
}

#[derive(Debug, Args, Default)]
struct EmitFlags {
    #[arg(long)]
    variant: Option<TextVariant>,
    #[arg(long)]
    case: Option<CaseVariant>,
    #[arg(long)]
    separator: Option<String>,
    #[arg(long)]
    shuffle_seed: Option<u64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    filter: FilterFlags,
    #[command(flatten)]
    mask: MaskFlags,
    #[command(flatten)]
    dedup: DedupFlags,
    #[command(flatten)]
    balance: BalanceFlags,
    #[command(flatten)]
    emit: EmitFlags,
    /// Write pages.jsonl with per-page provenance.
    #[arg(long)]
    sidecar: bool,
    #[arg(long)]
    no_language_gate: bool,
    #[arg(long)]
    no_density_filter: bool,
    #[arg(long)]
    no_dedup: bool,
    #[arg(long)]
    no_balance: bool,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Pages after deduplication, for the reduction report.
    #[arg(long, requires = "final_pages")]
    after_dedup: Option<PathBuf>,
    /// Final pages, for the reduction report.
    #[arg(long = "final", requires = "after_dedup")]
    final_pages: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[command(flatten)]
    filter: FilterFlags,
    #[arg(long)]
    no_language_gate: bool,
}

#[derive(Debug, Args)]
struct MaskArgs {
    #[command(flatten)]
    mask: MaskFlags,
}

#[derive(Debug, Args)]
struct DedupArgs {
    #[command(flatten)]
    dedup: DedupFlags,
}

#[derive(Debug, Args)]
struct BalanceArgs {
    #[command(flatten)]
    balance: BalanceFlags,
}

#[derive(Debug, Args)]
struct EmitArgs {
    #[command(flatten)]
    emit: EmitFlags,
    /// Also write a manifest with the emit stage record.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FoldsArgs {
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    /// Record field holding the class label.
    #[arg(long, default_value = "label")]
    label_field: String,
}

/// A failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Input(anyhow::Error),
    Stage(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Stage(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Input(e) | Failure::Stage(e) => e,
        }
    }
}

trait Classify<T> {
    fn usage(self) -> Result<T, Failure>;
    fn input(self) -> Result<T, Failure>;
    fn stage(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Usage(e.into()))
    }
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into()))
    }
    fn stage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Stage(e.into()))
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("DARKCORPUS_LOG", "warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", describe(f.error()));
            f.code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let g = cli.global;
    let mut cfg = match &g.config {
        Some(path) => PipelineConfig::from_json_file(path).input()?,
        None => PipelineConfig::default(),
    };
    if let Some(w) = g.workers {
        cfg.workers = w;
    }
    if cfg.workers == 0 {
        return Err(Failure::Usage(anyhow!("--workers must be at least 1")));
    }
    if let Some(input) = &g.input {
        cfg.input = input.clone();
    }
    let output = g.output.clone().unwrap_or_else(|| PathBuf::from("-"));

    let pool = if cfg.workers > 1 {
        Some(rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().stage()?)
    } else {
        None
    };
    let parallel = pool.is_some();
    let work = move || -> Result<(), Failure> {
        match cli.command {
            Command::Run(a) => cmd_run(cfg, g.output, a),
            Command::Stats(a) => cmd_stats(&cfg, &output, a),
            Command::Filter(a) => cmd_filter(cfg, &output, a),
            Command::Mask(a) => cmd_mask(cfg, &output, a, parallel),
            Command::Dedup(a) => cmd_dedup(cfg, &output, a, parallel),
            Command::Balance(a) => cmd_balance(cfg, &output, a),
            Command::Emit(a) => cmd_emit(cfg, &output, a),
            Command::Folds(a) => cmd_folds(&cfg, &output, a),
        }
    };
    match pool {
        Some(p) => p.install(work),
        None => work(),
    }
}

fn apply_filter(cfg: &mut PipelineConfig, f: &FilterFlags) {
    if let Some(m) = f.language_mode {
        cfg.language.mode = m;
    }
    if let Some(l) = &f.accept_language {
        cfg.language.accept_language = l.clone();
    }
    if let Some(t) = f.heuristic_threshold {
        cfg.language.heuristic_threshold = t;
    }
    if let Some(v) = f.min_chars {
        cfg.density.min_chars = v;
    }
    if let Some(v) = f.max_chars {
        cfg.density.max_chars = v;
    }
    if f.derive_thresholds {
        cfg.density.derive_thresholds = true;
    }
}

fn apply_mask(cfg: &mut PipelineConfig, f: &MaskFlags) {
    if let Some(r) = &f.rules {
        cfg.mask.rules = r.clone();
    }
}

fn apply_dedup(cfg: &mut PipelineConfig, f: &DedupFlags) {
    if let Some(v) = f.shingle_n {
        cfg.dedup.shingle_n = v;
    }
    if let Some(v) = f.num_perms {
        cfg.dedup.num_perms = v;
    }
    if let Some(v) = f.minhash_seed {
        cfg.dedup.seed = v;
    }
    if f.near_dup_threshold.is_some() {
        cfg.dedup.near_dup_threshold = f.near_dup_threshold;
    }
}

fn apply_balance(cfg: &mut PipelineConfig, f: &BalanceFlags) {
    if let Some(v) = f.cap_bytes {
        cfg.balance.cap_bytes = v;
    }
    if let Some(v) = f.balance_seed {
        cfg.balance.seed = v;
    }
    if let Some(v) = &f.classifier {
        cfg.balance.classifier = v.clone();
    }
    if let Some(v) = &f.lexicon {
        cfg.balance.lexicon = Some(v.clone());
    }
    if let Some(v) = f.fallback {
        cfg.balance.fallback = v;
    }
}

fn apply_emit(cfg: &mut PipelineConfig, f: &EmitFlags) {
    if let Some(v) = f.variant {
        cfg.variant.text = v;
    }
    if let Some(v) = f.case {
        cfg.variant.case = v;
    }
    if let Some(v) = &f.separator {
        cfg.emit.separator = v.clone();
    }
    if f.shuffle_seed.is_some() {
        cfg.emit.shuffle_seed = f.shuffle_seed;
    }
}

fn cmd_run(mut cfg: PipelineConfig, output: Option<PathBuf>, a: RunArgs) -> Result<(), Failure> {
    apply_filter(&mut cfg, &a.filter);
    apply_mask(&mut cfg, &a.mask);
    apply_dedup(&mut cfg, &a.dedup);
    apply_balance(&mut cfg, &a.balance);
    apply_emit(&mut cfg, &a.emit);
    if a.sidecar {
        cfg.emit.sidecar = true;
    }
    cfg.stages.language_gate &= !a.no_language_gate;
    cfg.stages.density_filter &= !a.no_density_filter;
    cfg.stages.dedup &= !a.no_dedup;
    cfg.stages.balance &= !a.no_balance;
    if let Some(out) = output {
        if out.as_os_str() == "-" {
            return Err(Failure::Usage(anyhow!("run writes several files; --output must be a directory")));
        }
        cfg.output_dir = out;
    }
    cfg.validate().usage()?;
    let outcome = run_pipeline(&cfg).map_err(|e| {
        if e.is_input_error() {
            Failure::Input(e.into())
        } else {
            Failure::Stage(e.into())
        }
    })?;
    let m = &outcome.manifest;
    let last = m.stages.last().map_or(0, |s| s.pages_out);
    log::info!("wrote {} pages to {}", last, cfg.output_dir.display());
    Ok(())
}

fn open_output(path: &Path) -> Result<Box<dyn Write>, Failure> {
    if path.as_os_str() == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        let f = File::create(path).with_context(|| format!("cannot create {}", path.display())).stage()?;
        Ok(Box::new(BufWriter::with_capacity(1 << 20, f)))
    }
}

fn open_pages(cfg: &PipelineConfig) -> Result<PageReader<Box<dyn BufRead>>, Failure> {
    load_pages(&cfg.input).input()
}

/// Ends a read: logs skipped lines and turns a read failure into an input error.
fn finish_reader<R: BufRead>(reader: &mut PageReader<R>) -> Result<(), Failure> {
    for w in reader.warnings() {
        log::debug!("skipped {w}");
    }
    match reader.take_error() {
        Some(e) => Err(Failure::Input(e.into())),
        None => Ok(()),
    }
}

fn write_pages(out: &mut dyn Write, pages: &[PageRecord]) -> Result<(), Failure> {
    for p in pages {
        serde_json::to_writer(&mut *out, p).stage()?;
        out.write_all(b"\n").stage()?;
    }
    Ok(())
}

fn next_chunk<R: BufRead>(reader: &mut PageReader<R>) -> Vec<PageRecord> {
    reader.by_ref().take(CHUNK_PAGES).collect()
}

#[derive(Serialize)]
struct StatsDocument {
    pages: u64,
    char_quartiles: CharCountQuartiles,
    word_length_histogram: BTreeMap<u64, u64>,
    category_distribution: Option<CategoryDistribution>,
    reduction_report: Option<ReductionReport>,
}

fn read_all(path: &Path) -> Result<Vec<PageRecord>, Failure> {
    let mut reader = load_pages(path).input()?;
    let pages: Vec<PageRecord> = reader.by_ref().collect();
    finish_reader(&mut reader)?;
    Ok(pages)
}

fn distribution(pages: &[PageRecord]) -> Result<CategoryDistribution, Failure> {
    CategoryDistribution::of_pages(pages).input()
}

fn cmd_stats(cfg: &PipelineConfig, output: &Path, a: StatsArgs) -> Result<(), Failure> {
    let pages = read_all(&cfg.input)?;
    let quartiles = char_quartiles(&pages).stage()?;
    let categorized = pages.iter().all(|p| p.category.is_some());
    let category_distribution = if categorized { Some(distribution(&pages)?) } else { None };
    let reduction = match (&a.after_dedup, &a.final_pages) {
        (Some(d), Some(f)) => {
            let initial = distribution(&pages)?;
            let after = distribution(&read_all(d)?)?;
            let fin = distribution(&read_all(f)?)?;
            Some(reduction_report(&initial, &after, &fin).stage()?)
        }
        _ => None,
    };
    let doc = StatsDocument {
        pages: pages.len() as u64,
        char_quartiles: quartiles,
        word_length_histogram: word_length_histogram(&pages),
        category_distribution,
        reduction_report: reduction,
    };
    let mut out = open_output(output)?;
    serde_json::to_writer_pretty(&mut out, &doc).stage()?;
    out.write_all(b"\n").stage()?;
    out.flush().stage()
}

fn cmd_filter(mut cfg: PipelineConfig, output: &Path, a: FilterArgs) -> Result<(), Failure> {
    apply_filter(&mut cfg, &a.filter);
    cfg.language.validate().usage()?;
    let gate_on = !a.no_language_gate && cfg.stages.language_gate;
    let density_on = cfg.stages.density_filter;
    let mut reader = open_pages(&cfg)?;
    let mut out = open_output(output)?;
    let gate = |p: &PageRecord| !gate_on || language_gate(p, &cfg.language).keeps();

    if density_on && cfg.density.derive_thresholds {
        let pages: Vec<PageRecord> = reader.by_ref().filter(gate).collect();
        finish_reader(&mut reader)?;
        let q = char_quartiles(&pages).stage()?;
        let t = derive_thresholds(&q).stage()?;
        log::info!("derived thresholds {}..{}", t.min_chars, t.max_chars);
        let kept: Vec<PageRecord> = pages.into_iter().filter(|p| t.keeps(p)).collect();
        write_pages(&mut out, &kept)?;
        return out.flush().stage();
    }

    let t = if density_on {
        DensityThresholds::new(cfg.density.min_chars, cfg.density.max_chars).usage()?
    } else {
        DensityThresholds { min_chars: 0, max_chars: u64::MAX }
    };
    loop {
        let chunk = next_chunk(&mut reader);
        if chunk.is_empty() {
            break;
        }
        let kept: Vec<PageRecord> =
            chunk.into_iter().filter(|p| gate(p) && t.classify(p.char_count) == DensityVerdict::Keep).collect();
        write_pages(&mut out, &kept)?;
    }
    finish_reader(&mut reader)?;
    out.flush().stage()
}

fn cmd_mask(mut cfg: PipelineConfig, output: &Path, a: MaskArgs, parallel: bool) -> Result<(), Failure> {
    apply_mask(&mut cfg, &a.mask);
    let rules = cfg.mask_rules().usage()?;
    let mut reader = open_pages(&cfg)?;
    let mut out = open_output(output)?;
    loop {
        let mut chunk = next_chunk(&mut reader);
        if chunk.is_empty() {
            break;
        }
        mask_pages(&mut chunk, &rules, parallel);
        write_pages(&mut out, &chunk)?;
    }
    finish_reader(&mut reader)?;
    out.flush().stage()
}

fn cmd_dedup(mut cfg: PipelineConfig, output: &Path, a: DedupArgs, parallel: bool) -> Result<(), Failure> {
    apply_dedup(&mut cfg, &a.dedup);
    let hasher = MinHasher::new(cfg.dedup.num_perms, cfg.dedup.seed, cfg.dedup.shingle_n).usage()?;
    let mut deduper = Deduper::new(cfg.dedup.near_dup_threshold).usage()?;
    let mut reader = open_pages(&cfg)?;
    let mut out = open_output(output)?;
    loop {
        let mut chunk = next_chunk(&mut reader);
        if chunk.is_empty() {
            break;
        }
        let sigs = sign_pages(&hasher, &chunk, parallel).stage()?;
        let mut keep = sigs.into_iter().map(|s| deduper.offer(s));
        chunk.retain(|_| keep.next().unwrap_or(false));
        write_pages(&mut out, &chunk)?;
    }
    finish_reader(&mut reader)?;
    log::info!("dedup removed {} pages", deduper.removed());
    out.flush().stage()
}

fn cmd_balance(mut cfg: PipelineConfig, output: &Path, a: BalanceArgs) -> Result<(), Failure> {
    apply_balance(&mut cfg, &a.balance);
    if cfg.balance.cap_bytes == 0 {
        return Err(Failure::Usage(anyhow!("--cap-bytes must be positive")));
    }
    let mut classifier =
        cfg.balance.classifier.build(cfg.balance.lexicon.as_deref(), cfg.balance.fallback).usage()?;
    let mut pages = read_all(&cfg.input)?;
    classifier.classify_all(&mut pages).stage()?;
    let outcome = balance::balance(pages, cfg.balance.cap_bytes, cfg.balance.seed).stage()?;
    let mut out = open_output(output)?;
    write_pages(&mut out, &outcome.kept)?;
    out.flush().stage()
}

fn cmd_emit(mut cfg: PipelineConfig, output: &Path, a: EmitArgs) -> Result<(), Failure> {
    apply_emit(&mut cfg, &a.emit);
    let mut reader = open_pages(&cfg)?;
    let out = open_output(output)?;
    let mut writer = CorpusWriter::new(out, &cfg.emit.separator, cfg.variant.case).usage()?;
    let mut pages_in = 0u64;
    if let Some(seed) = cfg.emit.shuffle_seed {
        let mut pages: Vec<PageRecord> = reader.by_ref().collect();
        finish_reader(&mut reader)?;
        pages.shuffle(&mut rng::seeded(seed));
        for p in &pages {
            writer.push(&p.id, &p.text).stage()?;
        }
        pages_in = pages.len() as u64;
    } else {
        for p in reader.by_ref() {
            writer.push(&p.id, &p.text).stage()?;
            pages_in += 1;
        }
        finish_reader(&mut reader)?;
    }
    let (_, stats) = writer.finish().stage()?;
    if let Some(path) = &a.manifest {
        let mut manifest = CorpusManifest::new(cfg.variant, cfg.to_json(), &cfg.emit.separator);
        let mut rec = StageRecord::new("emit", pages_in, stats.pages, stats.bytes_in, stats.bytes_out)
            .with_allowance(stats.overhead_bytes);
        if let Some(seed) = cfg.emit.shuffle_seed {
            rec = rec.with_seed(seed);
        }
        manifest.stages.push(rec);
        manifest.separator_escapes = stats.separator_escapes;
        write_manifest(&manifest, path).stage()?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FoldsDocument {
    k: usize,
    seed: u64,
    repetitions: usize,
    ids: Vec<String>,
    labels: Vec<String>,
    assignments: Vec<FoldAssignment>,
}

fn label_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn cmd_folds(cfg: &PipelineConfig, output: &Path, a: FoldsArgs) -> Result<(), Failure> {
    let reader: Box<dyn BufRead> = if cfg.input.as_os_str() == "-" {
        Box::new(BufReader::new(io::stdin()))
    } else {
        let f = File::open(&cfg.input).with_context(|| format!("cannot read {}", cfg.input.display())).input()?;
        Box::new(BufReader::new(f))
    };
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.input()?;
        if line.trim().is_empty() {
            continue;
        }
        let v: serde_json::Value =
            serde_json::from_str(&line).with_context(|| format!("line {}: malformed record", i + 1)).input()?;
        let label = v
            .get(&a.label_field)
            .filter(|l| !l.is_null())
            .ok_or_else(|| anyhow!("line {}: missing {:?}", i + 1, a.label_field))
            .input()?;
        labels.push(label_string(label));
        ids.push(v.get("id").map_or_else(|| (ids.len()).to_string(), label_string));
    }
    let assignments = repeated_kfold(&labels, a.k, a.repetitions, a.seed).usage()?;
    let doc = FoldsDocument { k: a.k, seed: a.seed, repetitions: a.repetitions, ids, labels, assignments };
    let mut out = open_output(output)?;
    serde_json::to_writer(&mut out, &doc).stage()?;
    out.write_all(b"\n").stage()?;
    out.flush().stage()
}

/// The error chain on one line, skipping causes already quoted by the
/// message above them.
fn describe(err: &anyhow::Error) -> String {
    let mut out = err.to_string();
    for cause in err.chain().skip(1) {
        let text = cause.to_string();
        if !out.contains(&text) {
            out.push_str(": ");
            out.push_str(&text);
        }
    }
    out
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    run_cli(std::env::args_os())
}
