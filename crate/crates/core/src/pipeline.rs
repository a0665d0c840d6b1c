//! End-to-end orchestration: ingest, language gate, density filter, masking,
//! deduplication, balancing and emission, plus the manifest and stats files.
//!
//! Pages stream through the early stages in chunks. Everything surviving
//! deduplication is held in memory because balancing needs per-category
//! totals before it can decide anything.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balance::{
    self, page_category, BalanceError, Category, CategoryDistribution, ClassifierSpec, ClassifyError,
    DEFAULT_CAP_BYTES,
};
use crate::density::{derive_thresholds, DensityError, DensityTally, DensityThresholds};
use crate::emit::{
    write_manifest, CorpusManifest, CorpusWriter, EmitError, StageRecord, TextVariant, Variant, DEFAULT_SEPARATOR,
};
use crate::ingest::{language_gate, load_pages, GateTally, IngestError, LanguagePolicy, PageRecord};
use crate::mask::{apply_masks, MaskReport, MaskRuleSet, UnknownRule};
use crate::minhash::{sign_pages, DedupParams, Deduper, MinHashError, MinHasher};
use crate::rng;
use crate::stats::{
    reduction_report, CharCountQuartiles, QuartileAccumulator, ReductionReport, StatsError, WordLengthAccumulator,
    WordLengthHistogram,
};

pub const DEFAULT_BALANCE_SEED: u64 = 0xBA1A_2CE5;
const CHUNK_PAGES: usize = 2048;

pub const CORPUS_FILE: &str = "corpus.txt";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const STATS_FILE: &str = "stats.json";
pub const SIDECAR_FILE: &str = "pages.jsonl";
pub const STAMP_FILE: &str = "STAMP";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityConfig {
    pub min_chars: u64,
    pub max_chars: u64,
    /// Use half of q1 and double q3 of the gated corpus instead.
    pub derive_thresholds: bool,
}

impl Default for DensityConfig {
    fn default() -> Self {
        let t = DensityThresholds::default();
        Self { min_chars: t.min_chars, max_chars: t.max_chars, derive_thresholds: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaskConfig {
    pub rules: Vec<String>,
}

impl Default for MaskConfig {
    fn default() -> Self {
        Self { rules: MaskRuleSet::full().names().into_iter().map(String::from).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BalanceConfig {
    pub cap_bytes: u64,
    pub seed: u64,
    pub classifier: ClassifierSpec,
    pub lexicon: Option<PathBuf>,
    pub fallback: Category,
}

impl Default for BalanceConfig {
    fn default() -> Self {
        Self {
            cap_bytes: DEFAULT_CAP_BYTES,
            seed: DEFAULT_BALANCE_SEED,
            classifier: ClassifierSpec::Label,
            lexicon: None,
            fallback: balance::DEFAULT_FALLBACK,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitConfig {
    pub separator: String,
    pub shuffle_seed: Option<u64>,
    /// Also write `pages.jsonl` with one provenance record per emitted page.
    pub sidecar: bool,
}

impl Default for EmitConfig {
    fn default() -> Self {
        Self { separator: DEFAULT_SEPARATOR.to_string(), shuffle_seed: None, sidecar: false }
    }
}

/// Optional stages. Ingest and emit always run; masking runs exactly for
/// the preprocessed variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StageToggles {
    pub language_gate: bool,
    pub density_filter: bool,
    pub dedup: bool,
    pub balance: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        Self { language_gate: true, density_filter: true, dedup: true, balance: true }
    }
}

/// Every parameter of a run. Serializes to a single JSON document; a run's
/// manifest embeds it under `config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: PathBuf,
    /// Not part of the embedded config: results never depend on it.
    #[serde(skip_serializing)]
    pub output_dir: PathBuf,
    /// Worker threads for the per-page stages; output does not depend on it.
    #[serde(skip_serializing)]
    pub workers: usize,
    pub variant: Variant,
    pub language: LanguagePolicy,
    pub density: DensityConfig,
    pub mask: MaskConfig,
    pub dedup: DedupParams,
    pub balance: BalanceConfig,
    pub emit: EmitConfig,
    pub stages: StageToggles,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::from("-"),
            output_dir: PathBuf::from("out"),
            workers: 1,
            variant: Variant::default(),
            language: LanguagePolicy::default(),
            density: DensityConfig::default(),
            mask: MaskConfig::default(),
            dedup: DedupParams::default(),
            balance: BalanceConfig::default(),
            emit: EmitConfig::default(),
            stages: StageToggles::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("config {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
}

impl PipelineConfig {
    /// Reads a config file. A run manifest is accepted too; its embedded
    /// config is used.
    pub fn from_json_file(path: &Path) -> Result<Self, ConfigError> {
        let data =
            fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json_str(&data).map_err(|source| ConfigError::Parse { path: path.display().to_string(), source })
    }

    pub fn from_json_str(data: &str) -> Result<Self, serde_json::Error> {
        let mut value: serde_json::Value = serde_json::from_str(data)?;
        if let Some(obj) = value.as_object_mut() {
            if obj.contains_key("stages") && obj.contains_key("tool_version") {
                value = obj.remove("config").unwrap_or_default();
            }
        }
        serde_json::from_value(value)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn mask_rules(&self) -> Result<MaskRuleSet, ConfigError> {
        MaskRuleSet::from_names(&self.mask.rules).map_err(|e: UnknownRule| ConfigError::Invalid(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.workers == 0 {
            return invalid("workers must be at least 1".into());
        }
        self.language.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !self.density.derive_thresholds {
            DensityThresholds::new(self.density.min_chars, self.density.max_chars)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        self.mask_rules()?;
        MinHasher::new(self.dedup.num_perms, self.dedup.seed, self.dedup.shingle_n)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Deduper::new(self.dedup.near_dup_threshold).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.balance.cap_bytes == 0 {
            return invalid("cap_bytes must be positive".into());
        }
        CorpusWriter::new(io::sink(), &self.emit.separator, self.variant.case)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Input(#[from] IngestError),
    #[error("density filter: {0}")]
    Density(#[from] DensityError),
    #[error("dedup: {0}")]
    MinHash(#[from] MinHashError),
    #[error("classification: {0}")]
    Classify(#[from] ClassifyError),
    #[error("balance: {0}")]
    Balance(#[from] BalanceError),
    #[error("stats: {0}")]
    Stats(#[from] StatsError),
    #[error("emit: {0}")]
    Emit(#[from] EmitError),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: io::Error },
}

impl PipelineError {
    /// Input problems (unreadable input or config) as opposed to failures
    /// inside a stage.
    pub fn is_input_error(&self) -> bool {
        matches!(self, PipelineError::Input(_) | PipelineError::Config(ConfigError::Io { .. } | ConfigError::Parse { .. }))
    }
}

/// Contents of `stats.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineStats {
    /// Character counts of the pages entering the density filter.
    pub char_quartiles: Option<CharCountQuartiles>,
    /// Character counts of the emitted pages.
    pub final_char_quartiles: Option<CharCountQuartiles>,
    pub word_length_histogram: WordLengthHistogram,
    pub density_thresholds: DensityThresholds,
    pub gate: GateTally,
    pub density: DensityTally,
    pub mask_totals: Option<MaskReport>,
    pub dedup_removed: u64,
    pub dist_before_balance: CategoryDistribution,
    pub dist_after_balance: CategoryDistribution,
    pub reduction: ReductionReport,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub manifest: CorpusManifest,
    pub stats: PipelineStats,
}

/// Provenance line written to `pages.jsonl`.
#[derive(Debug, Serialize)]
struct SidecarRecord<'a> {
    id: &'a str,
    url: &'a str,
    category: Option<&'a str>,
    lang: Option<&'a str>,
    char_count: u64,
    corpus_offset: u64,
    corpus_len: u64,
    separator_escapes: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mask_report: Option<&'a MaskReport>,
}

fn write_stamp(dir: &Path, state: &str) -> Result<(), PipelineError> {
    let path = dir.join(STAMP_FILE);
    fs::write(&path, format!("{state}\n")).map_err(|source| PipelineError::Output { path: path.display().to_string(), source })
}

/// Byte and page totals flowing through one stage.
#[derive(Debug, Default, Clone, Copy)]
struct Flow {
    pages_in: u64,
    pages_out: u64,
    bytes_in: u64,
    bytes_out: u64,
}

impl Flow {
    fn record(&self, stage: &str) -> StageRecord {
        StageRecord::new(stage, self.pages_in, self.pages_out, self.bytes_in, self.bytes_out)
    }
}

fn bytes_of(pages: &[PageRecord]) -> u64 {
    pages.iter().map(PageRecord::byte_len).sum()
}

/// Runs `f` over every page, in parallel when `parallel` is set, keeping order.
fn map_pages<F>(pages: &mut [PageRecord], parallel: bool, f: F)
where
    F: Fn(&mut PageRecord) + Sync + Send,
{
    if parallel {
        pages.par_iter_mut().for_each(f);
    } else {
        pages.iter_mut().for_each(f);
    }
}

/// Masks every page, attaching (or extending) its mask report.
pub fn mask_pages(pages: &mut [PageRecord], rules: &MaskRuleSet, parallel: bool) -> MaskReport {
    map_pages(pages, parallel, |p| {
        let (masked, report) = apply_masks(&p.text, rules);
        p.set_text(masked);
        match &mut p.mask_report {
            Some(existing) => existing.merge(&report),
            None => p.mask_report = Some(report),
        }
    });
    let mut total = MaskReport::default();
    for p in pages.iter() {
        if let Some(r) = &p.mask_report {
            total.merge(r);
        }
    }
    total
}

struct Runner<'a> {
    cfg: &'a PipelineConfig,
    parallel: bool,
    rules: MaskRuleSet,
    hasher: MinHasher,
    deduper: Deduper,
    classifier: Box<dyn balance::PageClassifier>,
    thresholds: DensityThresholds,
    density: DensityTally,
    density_flow: Flow,
    quartiles: QuartileAccumulator,
    mask_flow: Flow,
    mask_totals: MaskReport,
    dedup_flow: Flow,
    dist_initial: CategoryDistribution,
    dist_after_dedup: CategoryDistribution,
    kept: Vec<PageRecord>,
}

impl Runner<'_> {
    /// Density filter onwards for one chunk of gated pages.
    fn process(&mut self, mut chunk: Vec<PageRecord>) -> Result<(), PipelineError> {
        for p in &chunk {
            self.quartiles.push(p.char_count);
        }
        if self.cfg.stages.density_filter {
            self.density_flow.pages_in += chunk.len() as u64;
            self.density_flow.bytes_in += bytes_of(&chunk);
            let t = self.thresholds;
            let density = &mut self.density;
            chunk.retain(|p| {
                let v = t.classify(p.char_count);
                density.record(v);
                v == crate::density::DensityVerdict::Keep
            });
            self.density_flow.pages_out += chunk.len() as u64;
            self.density_flow.bytes_out += bytes_of(&chunk);
        }
        if self.cfg.variant.text == TextVariant::Preprocessed {
            self.mask_flow.pages_in += chunk.len() as u64;
            self.mask_flow.bytes_in += bytes_of(&chunk);
            let totals = mask_pages(&mut chunk, &self.rules, self.parallel);
            self.mask_totals.merge(&totals);
            self.mask_flow.pages_out += chunk.len() as u64;
            self.mask_flow.bytes_out += bytes_of(&chunk);
        }
        self.classifier.classify_all(&mut chunk)?;
        for p in &chunk {
            self.dist_initial.add(page_category(p)?, p.byte_len());
        }
        if self.cfg.stages.dedup {
            self.dedup_flow.pages_in += chunk.len() as u64;
            self.dedup_flow.bytes_in += bytes_of(&chunk);
            let sigs = sign_pages(&self.hasher, &chunk, self.parallel)?;
            let mut keep = sigs.into_iter().map(|s| self.deduper.offer(s));
            chunk.retain(|_| keep.next().unwrap_or(false));
            self.dedup_flow.pages_out += chunk.len() as u64;
            self.dedup_flow.bytes_out += bytes_of(&chunk);
        }
        for p in &chunk {
            self.dist_after_dedup.add(page_category(p)?, p.byte_len());
        }
        self.kept.extend(chunk);
        Ok(())
    }
}

/// Runs the whole pipeline, writing `corpus.txt`, `manifest.json`,
/// `stats.json`, optionally `pages.jsonl`, and a `STAMP` file that reads
/// `incomplete` until everything else has been written.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome, PipelineError> {
    cfg.validate()?;
    let out_dir = &cfg.output_dir;
    fs::create_dir_all(out_dir)
        .map_err(|source| PipelineError::Output { path: out_dir.display().to_string(), source })?;
    write_stamp(out_dir, "incomplete")?;
    let outcome = if cfg.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| ConfigError::Invalid(format!("cannot start {} workers: {e}", cfg.workers)))?;
        pool.install(|| run_stages(cfg, true))?
    } else {
        run_stages(cfg, false)?
    };
    write_stamp(out_dir, "complete")?;
    Ok(outcome)
}

fn run_stages(cfg: &PipelineConfig, parallel: bool) -> Result<PipelineOutcome, PipelineError> {
    let out_dir = &cfg.output_dir;
    let mut reader = load_pages(&cfg.input)?;
    let mut ingest = Flow::default();
    let mut gate_flow = Flow::default();
    let mut gate = GateTally::default();

    let mut runner = Runner {
        cfg,
        parallel,
        rules: cfg.mask_rules()?,
        hasher: MinHasher::new(cfg.dedup.num_perms, cfg.dedup.seed, cfg.dedup.shingle_n)?,
        deduper: Deduper::new(cfg.dedup.near_dup_threshold)?,
        classifier: cfg.balance.classifier.build(cfg.balance.lexicon.as_deref(), cfg.balance.fallback)?,
        thresholds: DensityThresholds { min_chars: cfg.density.min_chars, max_chars: cfg.density.max_chars },
        density: DensityTally::default(),
        density_flow: Flow::default(),
        quartiles: QuartileAccumulator::default(),
        mask_flow: Flow::default(),
        mask_totals: MaskReport::default(),
        dedup_flow: Flow::default(),
        dist_initial: CategoryDistribution::default(),
        dist_after_dedup: CategoryDistribution::default(),
        kept: Vec::new(),
    };

    // Threshold derivation needs the whole gated corpus before filtering.
    let derive = cfg.stages.density_filter && cfg.density.derive_thresholds;
    let mut held: Vec<PageRecord> = Vec::new();

    loop {
        let mut chunk: Vec<PageRecord> = reader.by_ref().take(CHUNK_PAGES).collect();
        if chunk.is_empty() {
            break;
        }
        ingest.pages_out += chunk.len() as u64;
        ingest.bytes_out += bytes_of(&chunk);
        if cfg.stages.language_gate {
            gate_flow.pages_in += chunk.len() as u64;
            gate_flow.bytes_in += bytes_of(&chunk);
            chunk.retain(|p| {
                let outcome = language_gate(p, &cfg.language);
                gate.record(outcome);
                outcome.keeps()
            });
            gate_flow.pages_out += chunk.len() as u64;
            gate_flow.bytes_out += bytes_of(&chunk);
        }
        if derive {
            held.extend(chunk);
        } else {
            runner.process(chunk)?;
        }
    }
    if let Some(e) = reader.take_error() {
        return Err(e.into());
    }
    ingest.pages_in = reader.lines_read();
    ingest.bytes_in = reader.bytes_read();
    if !reader.warnings().is_empty() {
        log::warn!("{} input lines skipped", reader.warnings().len());
    }
    if gate.unlabeled > 0 {
        log::warn!("{} pages had no language label and were dropped", gate.unlabeled);
    }

    if derive {
        let mut acc = QuartileAccumulator::default();
        for p in &held {
            acc.push(p.char_count);
        }
        runner.thresholds = derive_thresholds(&acc.finish()?)?;
        log::info!("derived density thresholds {:?}", runner.thresholds);
        let mut rest = held.into_iter().peekable();
        while rest.peek().is_some() {
            let chunk: Vec<PageRecord> = rest.by_ref().take(CHUNK_PAGES).collect();
            runner.process(chunk)?;
        }
    }

    let Runner {
        thresholds,
        density,
        density_flow,
        quartiles,
        mask_flow,
        mask_totals,
        dedup_flow,
        dist_initial,
        dist_after_dedup,
        kept,
        deduper,
        classifier,
        ..
    } = runner;
    let dedup_removed = deduper.removed();
    drop(deduper);

    let balance_in = Flow {
        pages_in: kept.len() as u64,
        bytes_in: bytes_of(&kept),
        ..Flow::default()
    };
    let (mut kept, dist_before_balance, dist_final) = if cfg.stages.balance {
        let out = balance::balance(kept, cfg.balance.cap_bytes, cfg.balance.seed)?;
        (out.kept, out.dist_before, out.dist_after)
    } else {
        (kept, dist_after_dedup.clone(), dist_after_dedup.clone())
    };
    let balance_flow = Flow { pages_out: kept.len() as u64, bytes_out: bytes_of(&kept), ..balance_in };

    if let Some(seed) = cfg.emit.shuffle_seed {
        kept.shuffle(&mut rng::seeded(seed));
    }

    // Emission.
    let corpus_path = out_dir.join(CORPUS_FILE);
    let out_err = |path: &Path| {
        let path = path.display().to_string();
        move |source| PipelineError::Output { path, source }
    };
    let file = File::create(&corpus_path).map_err(out_err(&corpus_path))?;
    let mut writer = CorpusWriter::new(BufWriter::with_capacity(1 << 20, file), &cfg.emit.separator, cfg.variant.case)?;
    let sidecar_path = out_dir.join(SIDECAR_FILE);
    let mut sidecar = if cfg.emit.sidecar {
        Some(BufWriter::new(File::create(&sidecar_path).map_err(out_err(&sidecar_path))?))
    } else {
        None
    };
    let mut final_quartiles = QuartileAccumulator::default();
    let mut words = WordLengthAccumulator::default();
    for p in &kept {
        let placement = writer.push(&p.id, &p.text)?;
        final_quartiles.push(p.char_count);
        words.add_text(&p.text);
        if let Some(w) = sidecar.as_mut() {
            let rec = SidecarRecord {
                id: &p.id,
                url: &p.url,
                category: p.category.as_deref(),
                lang: p.lang_label.as_deref(),
                char_count: p.char_count,
                corpus_offset: placement.offset,
                corpus_len: placement.len,
                separator_escapes: placement.escapes,
                mask_report: p.mask_report.as_ref(),
            };
            serde_json::to_writer(&mut *w, &rec).map_err(|e| PipelineError::Output {
                path: sidecar_path.display().to_string(),
                source: e.into(),
            })?;
            w.write_all(b"\n").map_err(out_err(&sidecar_path))?;
        }
    }
    let (mut corpus_out, emit_stats) = writer.finish()?;
    corpus_out.flush().map_err(out_err(&corpus_path))?;
    if let Some(mut w) = sidecar {
        w.flush().map_err(out_err(&sidecar_path))?;
    }

    let reduction = reduction_report(&dist_initial, &dist_after_dedup, &dist_final)?;

    // Manifest.
    let mut config = cfg.to_json();
    if let Some(obj) = config.as_object_mut() {
        obj.remove("output_dir");
        obj.remove("workers");
    }
    let mut manifest = CorpusManifest::new(cfg.variant, config, &cfg.emit.separator);
    manifest.stages.push(ingest.record("ingest"));
    if cfg.stages.language_gate {
        manifest.stages.push(gate_flow.record("language_gate").with_parameters(serde_json::json!({
            "mode": cfg.language.mode,
            "accept_language": cfg.language.accept_language,
            "heuristic_threshold": cfg.language.heuristic_threshold,
            "rejected": gate.rejected,
            "unlabeled": gate.unlabeled,
        })));
    }
    if cfg.stages.density_filter {
        manifest.stages.push(density_flow.record("density_filter").with_parameters(serde_json::json!({
            "min_chars": thresholds.min_chars,
            "max_chars": thresholds.max_chars,
            "derived": cfg.density.derive_thresholds,
            "dropped_low": density.dropped_low,
            "dropped_high": density.dropped_high,
        })));
    }
    if cfg.variant.text == TextVariant::Preprocessed {
        manifest.stages.push(
            mask_flow
                .record("mask")
                .with_allowance(mask_totals.inflation_bytes)
                .with_parameters(serde_json::json!({ "rules": runner_rule_names(cfg) })),
        );
        manifest.mask_totals = Some(mask_totals.clone());
    }
    if cfg.stages.dedup {
        let rates: serde_json::Map<String, serde_json::Value> = reduction
            .categories
            .iter()
            .map(|(c, r)| (c.name().to_string(), serde_json::json!(r.dedup_rate_pct)))
            .collect();
        manifest.stages.push(
            dedup_flow
                .record("dedup")
                .with_seed(cfg.dedup.seed)
                .with_parameters(serde_json::json!({
                    "shingle_n": cfg.dedup.shingle_n,
                    "num_perms": cfg.dedup.num_perms,
                    "near_dup_threshold": cfg.dedup.near_dup_threshold,
                    "removed": dedup_removed,
                    "dedup_rate_pct": rates,
                })),
        );
    }
    if cfg.stages.balance {
        manifest.stages.push(
            balance_flow
                .record("balance")
                .with_seed(cfg.balance.seed)
                .with_parameters(serde_json::json!({
                    "cap_bytes": cfg.balance.cap_bytes,
                    "classifier": classifier.describe(),
                })),
        );
    }
    let mut emit_record = StageRecord::new(
        "emit",
        kept.len() as u64,
        emit_stats.pages,
        emit_stats.bytes_in,
        emit_stats.bytes_out,
    )
    .with_allowance(emit_stats.overhead_bytes)
    .with_parameters(serde_json::json!({
        "separator": cfg.emit.separator,
        "case": cfg.variant.case,
        "separator_escapes": emit_stats.separator_escapes,
    }));
    if let Some(seed) = cfg.emit.shuffle_seed {
        emit_record = emit_record.with_seed(seed);
    }
    manifest.stages.push(emit_record);
    manifest.reduction = Some(reduction.clone());
    manifest.dedup_removed = dedup_removed;
    manifest.separator_escapes = emit_stats.separator_escapes;
    write_manifest(&manifest, &out_dir.join(MANIFEST_FILE))?;

    let stats = PipelineStats {
        char_quartiles: quartiles.finish().ok(),
        final_char_quartiles: final_quartiles.finish().ok(),
        word_length_histogram: words.finish(),
        density_thresholds: thresholds,
        gate,
        density,
        mask_totals: (cfg.variant.text == TextVariant::Preprocessed).then_some(mask_totals),
        dedup_removed,
        dist_before_balance,
        dist_after_balance: dist_final,
        reduction,
    };
    let stats_path = out_dir.join(STATS_FILE);
    let mut json = serde_json::to_string_pretty(&stats).expect("stats serialize");
    json.push('\n');
    fs::write(&stats_path, json).map_err(out_err(&stats_path))?;

    Ok(PipelineOutcome { manifest, stats })
}

fn runner_rule_names(cfg: &PipelineConfig) -> Vec<&'static str> {
    cfg.mask_rules().map(|r| r.names()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_input(dir: &Path, lines: &[serde_json::Value]) -> PathBuf {
        let path = dir.join("in.jsonl");
        let body: String = lines.iter().map(|l| format!("{l}\n")).collect();
        fs::write(&path, body).unwrap();
        path
    }

    fn sample(dir: &Path) -> PathBuf {
        let mut lines = Vec::new();
        let cats = ["Drugs", "Gambling", "Hacking"];
        for i in 0..10 {
            let body = format!("page number {i} talks about things. ").repeat(30 + i);
            lines.push(serde_json::json!({
                "id": format!("p{i}"),
                "url": format!("http://site{i}.onion/"),
                "text": format!("{body} contact admin{i}@example.com"),
                "lang": "en",
                "category": cats[i % 3],
            }));
        }
        lines.push(lines[0].clone());
        lines.last_mut().unwrap()["id"] = "dup".into();
        lines.push(serde_json::json!({"url": "x", "text": "bonjour", "lang": "fr"}));
        write_input(dir, &lines)
    }

    fn config(dir: &Path, input: PathBuf, out: &str) -> PipelineConfig {
        PipelineConfig { input, output_dir: dir.join(out), ..PipelineConfig::default() }
    }

    #[test]
    fn full_run_writes_everything() {
        let dir = tempfile::tempdir().unwrap();
        let input = sample(dir.path());
        let cfg = config(dir.path(), input, "out");
        let outcome = run_pipeline(&cfg).unwrap();
        let m = &outcome.manifest;
        assert_eq!(
            m.stage_names(),
            ["ingest", "language_gate", "density_filter", "mask", "dedup", "balance", "emit"]
        );
        assert_eq!(m.stage("ingest").unwrap().pages_out, 12);
        assert_eq!(m.stage("language_gate").unwrap().pages_out, 11);
        assert_eq!(m.dedup_removed, 1);
        let corpus = fs::read_to_string(cfg.output_dir.join(CORPUS_FILE)).unwrap();
        assert_eq!(corpus.split(DEFAULT_SEPARATOR).count(), 10);
        assert!(corpus.contains("ID_EMAIL"));
        assert_eq!(fs::read_to_string(cfg.output_dir.join(STAMP_FILE)).unwrap(), "complete\n");
        assert!(cfg.output_dir.join(STATS_FILE).exists());
    }

    #[test]
    fn raw_variant_skips_mask() {
        let dir = tempfile::tempdir().unwrap();
        let input = sample(dir.path());
        let mut cfg = config(dir.path(), input, "out");
        cfg.variant.text = TextVariant::Raw;
        let m = run_pipeline(&cfg).unwrap().manifest;
        assert!(m.stage("mask").is_none());
        assert!(m.mask_totals.is_none());
    }

    #[test]
    fn identical_runs_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let input = sample(dir.path());
        let a = config(dir.path(), input.clone(), "a");
        let mut b = config(dir.path(), input, "b");
        b.workers = 3;
        run_pipeline(&a).unwrap();
        run_pipeline(&b).unwrap();
        for f in [CORPUS_FILE, MANIFEST_FILE, STATS_FILE] {
            assert_eq!(fs::read(a.output_dir.join(f)).unwrap(), fs::read(b.output_dir.join(f)).unwrap(), "{f}");
        }
    }

    #[test]
    fn manifest_reproduces_run() {
        let dir = tempfile::tempdir().unwrap();
        let input = sample(dir.path());
        let mut a = config(dir.path(), input, "a");
        a.balance.cap_bytes = 1500;
        a.emit.shuffle_seed = Some(4);
        run_pipeline(&a).unwrap();
        let mut b = PipelineConfig::from_json_file(&a.output_dir.join(MANIFEST_FILE)).unwrap();
        b.output_dir = dir.path().join("b");
        assert_eq!(b.balance, a.balance);
        run_pipeline(&b).unwrap();
        for f in [CORPUS_FILE, MANIFEST_FILE] {
            assert_eq!(fs::read(a.output_dir.join(f)).unwrap(), fs::read(b.output_dir.join(f)).unwrap(), "{f}");
        }
    }

    #[test]
    fn disabled_balance_gives_equal_rates() {
        let dir = tempfile::tempdir().unwrap();
        let input = sample(dir.path());
        let mut cfg = config(dir.path(), input, "out");
        cfg.stages.balance = false;
        let m = run_pipeline(&cfg).unwrap().manifest;
        assert!(m.stage("balance").is_none());
        let r = m.reduction.unwrap();
        for c in r.categories.values() {
            assert_eq!(c.dedup_rate, c.total_reduction_rate);
        }
    }

    #[test]
    fn missing_input_is_input_error_and_stamp_stays_incomplete() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path(), dir.path().join("missing.jsonl"), "out");
        let err = run_pipeline(&cfg).unwrap_err();
        assert!(err.is_input_error());
        assert_eq!(fs::read_to_string(cfg.output_dir.join(STAMP_FILE)).unwrap(), "incomplete\n");
    }

    #[test]
    fn config_round_trips_and_rejects_unknown_fields() {
        let cfg = PipelineConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back = PipelineConfig::from_json_str(&json).unwrap();
        assert_eq!(back.balance, cfg.balance);
        assert!(PipelineConfig::from_json_str(r#"{"bogus": 1}"#).is_err());
        let partial = PipelineConfig::from_json_str(r#"{"density": {"min_chars": 10}}"#).unwrap();
        assert_eq!(partial.density.min_chars, 10);
        assert_eq!(partial.density.max_chars, 10_000);
    }

    #[test]
    fn derived_thresholds_are_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let input = sample(dir.path());
        let mut cfg = config(dir.path(), input, "out");
        cfg.density.derive_thresholds = true;
        let out = run_pipeline(&cfg).unwrap();
        let q = out.stats.char_quartiles.unwrap();
        assert_eq!(out.stats.density_thresholds.min_chars, q.q1 / 2);
        assert_eq!(out.stats.density_thresholds.max_chars, q.q3 * 2);
    }
}
