//! corsim: corpus similarity measures for choosing pretraining data.
//!
//! Given a target task corpus and candidate source corpora, computes
//! vocabulary coverage (TVC/TVcC), Kneser-Ney 5-gram perplexity and word
//! vector variance, ranks the sources, and runs agreement and
//! predictiveness analyses over measurement tables.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use config::{OutputFormat, RunConfig};
use corsim_core::analysis::{
    self, enumerate_comparisons, fleiss_kappa, parse_fixture, predictiveness_report, FixtureRow,
    MeasurementRow, TiePolicy,
};
use corsim_core::corpus::{Corpus, IngestMode, Vocabulary};
use corsim_core::measures::{
    generate_report, rank_sources, target_vocab_covered, ArtifactCache, Measure, SimilarityScores,
};
use corsim_core::ngram::{arpa, count_ngrams_pruned, estimate_discounts, estimate_model, perplexity};
use corsim_core::rng::derive_seed;
use corsim_core::sgns::{continue_training, train, word_vector_variance, EmbeddingMatrix};

#[derive(Parser)]
#[command(
    name = "corsim",
    version,
    about = "Corpus similarity measures for pretraining source selection"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// JSON config file; flags override individual fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Artifact cache directory.
    #[arg(long, global = true, env = "CORSIM_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Master seed for all random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    lowercase: Option<bool>,
    #[arg(long, global = true)]
    split_punct: Option<bool>,
    /// Segment raw text instead of reading one sentence per line.
    #[arg(long, global = true)]
    raw: bool,
    #[arg(long, global = true)]
    lm_order: Option<usize>,
    #[arg(long, global = true)]
    prune_min_count: Option<u64>,
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    window: Option<usize>,
    #[arg(long, global = true)]
    negatives: Option<usize>,
    #[arg(long, global = true)]
    subsample: Option<f64>,
    #[arg(long, global = true)]
    min_count: Option<u64>,
    #[arg(long, global = true)]
    lr: Option<f64>,
    #[arg(long, global = true)]
    epochs: Option<usize>,
    #[arg(long, global = true)]
    continue_epochs: Option<usize>,
    #[arg(long, global = true)]
    token_cap: Option<u64>,
    /// Comma-separated subset of ppl,wvv,tvc,tvcc.
    #[arg(long, global = true)]
    measures: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize a text file and emit its corpus manifest.
    Ingest {
        file: PathBuf,
        /// Corpus id; defaults to the file stem.
        #[arg(long)]
        id: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Train a Kneser-Ney n-gram model on a source corpus and write ARPA.
    LmTrain {
        source: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Evaluate an ARPA model's perplexity on a target corpus.
    Ppl {
        #[arg(short, long)]
        model: PathBuf,
        target: PathBuf,
        /// Include the per-sentence breakdown in the output.
        #[arg(long)]
        per_sentence: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Train skip-gram embeddings on a source corpus.
    WvTrain {
        source: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Continue training existing embeddings on a target corpus with the
    /// vocabulary frozen.
    WvContinue {
        #[arg(short, long)]
        input: PathBuf,
        target: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Word vector variance between two embedding files.
    Wvv {
        #[arg(short = 'a', long)]
        first: PathBuf,
        #[arg(short = 'b', long)]
        second: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Target vocabulary coverage of a source corpus.
    Tvc {
        source: PathBuf,
        target: PathBuf,
        /// Restrict both vocabularies to content words.
        #[arg(long)]
        content_words: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Compute all selected measures for every source against one target.
    Report {
        #[arg(short, long)]
        target: PathBuf,
        #[arg(short, long, required = true)]
        source: Vec<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also write the CSV form.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Re-rank the sources of an existing report under one measure.
    Rank {
        #[arg(short, long)]
        report: PathBuf,
        #[arg(short, long)]
        measure: Measure,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Inter-measure agreement (Fleiss's kappa) over binary comparisons.
    Agree {
        /// Fixture CSV; the bundled fixture when neither input is given.
        #[arg(long, conflicts_with = "report")]
        fixture: Option<PathBuf>,
        /// Use the scores of a previously written report instead.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Comma-separated raters.
        #[arg(long, default_value = "ppl,wvv,tvc")]
        raters: String,
        /// Drop tied comparisons instead of aborting.
        #[arg(long)]
        allow_ties: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Pearson correlations between measures and downstream improvements.
    Correlate {
        /// Fixture CSV; the bundled fixture when omitted.
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Skip the comparison against the bundled reference coefficients.
        #[arg(long)]
        no_reference: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Write the bundled fixture CSV.
    Fixtures {
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

/// Common metadata on every emitted document.
#[derive(Serialize)]
struct Envelope<T: Serialize> {
    tool: &'static str,
    version: &'static str,
    mode: &'static str,
    seed: u64,
    config_digest: String,
    timestamp_unix: u64,
    #[serde(flatten)]
    payload: T,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let config = build_config(&cli.global)?;
    run(cli, config)
}

fn build_config(opts: &GlobalOpts) -> anyhow::Result<RunConfig> {
    let mut config = match &opts.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = opts.seed {
        config.seed = v;
        config.sgns.seed = v;
    }
    if let Some(v) = opts.lowercase {
        config.tokenizer.lowercase = v;
    }
    if let Some(v) = opts.split_punct {
        config.tokenizer.split_punctuation = v;
    }
    if opts.raw {
        config.segment_raw = true;
    }
    if let Some(v) = opts.lm_order {
        config.lm_order = v;
    }
    if opts.prune_min_count.is_some() {
        config.prune_min_count = opts.prune_min_count;
    }
    if let Some(v) = opts.dim {
        config.sgns.dim = v;
    }
    if let Some(v) = opts.window {
        config.sgns.window = v;
    }
    if let Some(v) = opts.negatives {
        config.sgns.negatives = v;
    }
    if let Some(v) = opts.subsample {
        config.sgns.subsample_threshold = v;
    }
    if let Some(v) = opts.min_count {
        config.sgns.min_count = v;
    }
    if let Some(v) = opts.lr {
        config.sgns.initial_lr = v;
    }
    if let Some(v) = opts.epochs {
        config.sgns.epochs = v;
    }
    if opts.continue_epochs.is_some() {
        config.continue_epochs = opts.continue_epochs;
    }
    if opts.token_cap.is_some() {
        config.token_cap = opts.token_cap;
    }
    if let Some(list) = &opts.measures {
        let mut selection = corsim_core::measures::MeasureSelection {
            ppl: false,
            wvv: false,
            tvc: false,
            tvcc: false,
        };
        for measure in parse_measures(list)? {
            match measure {
                Measure::Ppl => selection.ppl = true,
                Measure::Wvv => selection.wvv = true,
                Measure::Tvc => selection.tvc = true,
                Measure::Tvcc => selection.tvcc = true,
            }
        }
        config.measures = selection;
    }
    if let Some(v) = opts.format {
        config.output_format = v;
    }
    Ok(config)
}

fn run(cli: Cli, config: RunConfig) -> anyhow::Result<()> {
    let cache = match &cli.global.cache_dir {
        Some(dir) => Some(ArtifactCache::open(dir)?),
        None => None,
    };
    let emit = |payload: serde_json::Value, out: Option<&Path>| -> anyhow::Result<()> {
        let document = Envelope {
            tool: "corsim",
            version: env!("CARGO_PKG_VERSION"),
            mode: "deterministic",
            seed: config.seed,
            config_digest: config.digest(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .expect("clock after epoch")
                .as_secs(),
            payload,
        };
        let text = serde_json::to_string_pretty(&document).expect("document serialize");
        write_output(out, &text)
    };

    match cli.command {
        Command::Ingest { file, id, out } => {
            let corpus = ingest(&file, id.as_deref(), &config)?;
            if corpus.token_count() == 0 {
                eprintln!("warning: {} contains no tokens", file.display());
            }
            emit(json!({ "manifest": corpus.manifest() }), out.as_deref())
        }
        Command::LmTrain { source, out } => {
            let corpus = ingest_capped(&source, &config)?;
            let counts = count_ngrams_pruned(&corpus, config.lm_order, config.prune_min_count)?;
            let model = estimate_model(&counts, &estimate_discounts(&counts))?;
            let mut file =
                fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            arpa::export_arpa(&model, &mut file)?;
            eprintln!(
                "trained order-{} model on {} ({} tokens) -> {}",
                config.lm_order,
                corpus.id(),
                corpus.token_count(),
                out.display()
            );
            Ok(())
        }
        Command::Ppl {
            model,
            target,
            per_sentence,
            out,
        } => {
            let text =
                fs::read_to_string(&model).with_context(|| format!("reading {}", model.display()))?;
            let model = arpa::import_arpa(&text)?;
            let corpus = ingest(&target, None, &config)?;
            let mut result = perplexity(&model, &corpus)?;
            if !per_sentence {
                result.per_sentence.clear();
            }
            emit(
                json!({ "target": corpus.id(), "perplexity": result }),
                out.as_deref(),
            )
        }
        Command::WvTrain { source, out } => {
            let corpus = ingest_capped(&source, &config)?;
            let mut hp = config.sgns.clone();
            hp.seed = derive_seed(config.seed, "wv-train");
            let matrix = train(&corpus, &hp)?;
            let mut file =
                fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            matrix.write_text(&mut file)?;
            eprintln!(
                "trained {}-dim vectors for {} types -> {}",
                matrix.dim(),
                matrix.len(),
                out.display()
            );
            Ok(())
        }
        Command::WvContinue { input, target, out } => {
            let text =
                fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let source = EmbeddingMatrix::read_text(text.as_bytes())?;
            let corpus = ingest(&target, None, &config)?;
            let mut hp = config.sgns.clone();
            hp.epochs = config.continue_epochs.unwrap_or(config.sgns.epochs);
            hp.seed = derive_seed(config.seed, "wv-continue");
            let continued = continue_training(&source, &corpus, &hp)?;
            let mut file =
                fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            continued.write_text(&mut file)?;
            Ok(())
        }
        Command::Wvv { first, second, out } => {
            let load = |path: &Path| -> anyhow::Result<EmbeddingMatrix> {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(EmbeddingMatrix::read_text(text.as_bytes())?)
            };
            let result = word_vector_variance(&load(&first)?, &load(&second)?)?;
            emit(json!({ "wvv": result }), out.as_deref())
        }
        Command::Tvc {
            source,
            target,
            content_words,
            out,
        } => {
            let source = ingest(&source, None, &config)?;
            let target = ingest(&target, None, &config)?;
            let value = if content_words {
                corsim_core::measures::tvcc(
                    &source,
                    &target,
                    &corsim_core::corpus::ContentWordFilter::default(),
                )?
            } else {
                target_vocab_covered(
                    &Vocabulary::build(&source, 1),
                    &Vocabulary::build(&target, 1),
                )?
            };
            let key = if content_words { "tvcc" } else { "tvc" };
            emit(
                json!({ "source": source.id(), "target": target.id(), key: value }),
                out.as_deref(),
            )
        }
        Command::Report {
            target,
            source,
            out,
            csv,
        } => {
            let target = ingest(&target, None, &config)?;
            let mut sources = Vec::with_capacity(source.len());
            for path in &source {
                sources.push(ingest(path, None, &config)?);
            }
            let mut ids: Vec<&str> = sources.iter().map(|c| c.id()).collect();
            ids.sort_unstable();
            if ids.windows(2).any(|w| w[0] == w[1]) {
                bail!("duplicate source ids; pass distinct files or rename them");
            }
            let report =
                generate_report(&target, &sources, &config.measure_config(), cache.as_ref())?;
            if let Some(path) = csv {
                write_output(Some(&path), &report.to_csv())?;
            }
            match config.output_format {
                OutputFormat::Csv => write_output(out.as_deref(), &report.to_csv()),
                OutputFormat::Json => emit(json!({ "report": report }), out.as_deref()),
            }
        }
        Command::Rank {
            report,
            measure,
            out,
        } => {
            let scores = load_report_scores(&report)?;
            let ranking = rank_sources(&scores, measure)?;
            emit(json!({ "ranking": ranking }), out.as_deref())
        }
        Command::Agree {
            fixture,
            report,
            raters,
            allow_ties,
            out,
        } => {
            let rows: Vec<MeasurementRow> = match (&fixture, &report) {
                (_, Some(path)) => load_report_scores(path)?
                    .iter()
                    .map(MeasurementRow::from_scores)
                    .collect(),
                (Some(path), None) => load_fixture(path)?
                    .iter()
                    .map(FixtureRow::measurement)
                    .collect(),
                (None, None) => analysis::bundled_fixture()
                    .iter()
                    .map(FixtureRow::measurement)
                    .collect(),
            };
            let raters = parse_measures(&raters)?;
            let policy = if allow_ties {
                TiePolicy::Exclude
            } else {
                TiePolicy::Error
            };
            let comparisons = enumerate_comparisons(&rows, &raters, policy)?;
            let agreement = fleiss_kappa(&comparisons, &raters)?;
            emit(
                json!({ "agreement": agreement, "comparisons": comparisons.len() }),
                out.as_deref(),
            )
        }
        Command::Correlate {
            fixture,
            no_reference,
            out,
        } => {
            let rows = match &fixture {
                Some(path) => load_fixture(path)?,
                None => analysis::bundled_fixture(),
            };
            if rows.len() != 30 {
                eprintln!(
                    "warning: {} rows instead of the full 30-pair grid; pooled correlations cover the given rows only",
                    rows.len()
                );
            }
            let report = predictiveness_report(&rows, !no_reference)?;
            for note in &report.discrepancies {
                eprintln!("note: {note}");
            }
            emit(json!({ "predictiveness": report }), out.as_deref())
        }
        Command::Fixtures { out } => write_output(out.as_deref(), analysis::FIXTURE_CSV),
    }
}

fn ingest(path: &Path, id: Option<&str>, config: &RunConfig) -> anyhow::Result<Corpus> {
    let fallback;
    let id = match id {
        Some(id) => id,
        None => {
            fallback = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            &fallback
        }
    };
    let mode = if config.segment_raw {
        IngestMode::Raw
    } else {
        IngestMode::LinePerSentence
    };
    Ok(Corpus::from_file(id, path, &config.tokenizer, mode)?)
}

/// Ingest and apply the configured token cap, for commands that train
/// directly on a source corpus.
fn ingest_capped(path: &Path, config: &RunConfig) -> anyhow::Result<Corpus> {
    let corpus = ingest(path, None, config)?;
    match config.token_cap {
        Some(cap) => Ok(corsim_core::corpus::cap_tokens(
            &corpus,
            cap,
            derive_seed(config.seed, "sampling"),
        )?),
        None => Ok(corpus),
    }
}

fn load_fixture(path: &Path) -> anyhow::Result<Vec<FixtureRow>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_fixture(&text)?)
}

fn load_report_scores(path: &Path) -> anyhow::Result<Vec<SimilarityScores>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let document: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let scores = document
        .pointer("/report/scores")
        .cloned()
        .with_context(|| format!("{} has no report.scores field", path.display()))?;
    Ok(serde_json::from_value(scores)?)
}

fn parse_measures(list: &str) -> anyhow::Result<Vec<Measure>> {
    let mut measures = Vec::new();
    for name in list.split(',').filter(|s| !s.is_empty()) {
        measures.push(name.parse::<Measure>().map_err(anyhow::Error::msg)?);
    }
    if measures.is_empty() {
        bail!("no measures given");
    }
    Ok(measures)
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}
