use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use multitok_core::{
    build_and_encode, compression_ratio, count_frequencies, dictionary_stats, encode_inference,
    prune_and_reencode, training_time_with_lookahead, BuildConfig, EncodedSample, LossCurve,
    MultiTokDictionary, PruneConfig, Sample, Window, DEFAULT_LOOKAHEAD,
};

use crate::formats::{
    self, BaseSpec, CompressionSection, CorpusEntry, DictionarySection, Report,
    TrainingTimeSection, REPORT_VERSION,
};
use crate::manifest::{manifest_path, RunManifest};

/// Multi-word tokenization with an LZW-style phrase dictionary.
#[derive(Debug, Parser)]
#[command(name = "multitok", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a dictionary while encoding a training corpus.
    Build(BuildArgs),
    /// Encode a corpus against a frozen dictionary.
    Encode(EncodeArgs),
    /// Prune rarely emitted multi-word tokens and compact ids.
    Prune(PruneArgs),
    /// Compression ratio, dictionary statistics and training time.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Line-delimited corpus records.
    #[arg(long)]
    pub input: PathBuf,
    /// Training window: maximum words per token (`max` for unbounded).
    #[arg(long, default_value = "max")]
    pub w: Window,
    /// Share of samples encoded with multi-word tokens, in (0, 1].
    #[arg(long, default_value_t = 1.0, value_parser = parse_fraction)]
    pub fraction: f64,
    /// Seed for choosing samples under partial application.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Base tokenizer: `word`, `subword:VOCAB` or `pretokenized`.
    #[arg(long, default_value = "word")]
    pub base: BaseSpec,
    #[arg(long)]
    pub out_dict: PathBuf,
    #[arg(long)]
    pub out_encoded: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub dict: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// Testing window: maximum words per emitted token.
    #[arg(long, default_value = "max")]
    pub w_test: Window,
    #[arg(long, default_value = "word")]
    pub base: BaseSpec,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    #[arg(long)]
    pub dict: PathBuf,
    #[arg(long)]
    pub encoded: PathBuf,
    /// Multi-word tokens emitted fewer times than this are pruned.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_count: u64,
    #[arg(long)]
    pub out_dict: PathBuf,
    #[arg(long)]
    pub out_encoded: PathBuf,
    #[arg(long)]
    pub out_remap: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// The corpus the encoding was produced from.
    #[arg(long)]
    pub original: PathBuf,
    #[arg(long)]
    pub encoded: PathBuf,
    #[arg(long)]
    pub dict: PathBuf,
    #[arg(long, default_value = "word")]
    pub base: BaseSpec,
    /// Remap file from `prune`, to report how many entries were removed.
    #[arg(long)]
    pub remap: Option<PathBuf>,
    /// Per-epoch training losses (`{"epoch": i, "loss": x}` lines).
    #[arg(long)]
    pub losses: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_LOOKAHEAD)]
    pub lookahead: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_fraction(s: &str) -> std::result::Result<f64, String> {
    let value: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if value > 0.0 && value <= 1.0 {
        Ok(value)
    } else {
        Err(format!("fraction must be in (0, 1], got {value}"))
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Build(args) => build(args),
        Command::Encode(args) => encode(args),
        Command::Prune(args) => prune(args),
        Command::Stats(args) => stats(args),
    }
}

fn load_corpus(path: &Path, base: &BaseSpec) -> Result<(Vec<Sample>, u64)> {
    let tokenizer = formats::load_base(base)?;
    let entries = formats::read_corpus(path, tokenizer.as_ref())?;
    let words = entries.iter().map(|e| e.words as u64).sum();
    let samples = entries
        .into_iter()
        .map(|CorpusEntry { sample, .. }| sample)
        .collect();
    Ok((samples, words))
}

fn with_base_input(manifest: RunManifest, base: &BaseSpec) -> Result<RunManifest> {
    Ok(match base {
        BaseSpec::Subword(vocab) => manifest.input("vocab", vocab)?,
        _ => manifest,
    })
}

fn make_report(
    original: &[Sample],
    words: u64,
    encoded: &[EncodedSample],
    dict: &MultiTokDictionary,
    pruned: u64,
) -> Result<Report> {
    for (x, y) in original.iter().zip(encoded) {
        let expanded = y
            .token_ids
            .iter()
            .map(|&t| dict.length(t))
            .sum::<multitok_core::Result<usize>>()
            .with_context(|| format!("sample {:?}", y.id))?;
        if expanded != x.tokens.len() {
            bail!(
                "sample {:?}: encoding expands to {expanded} base tokens, original has {}",
                y.id,
                x.tokens.len()
            );
        }
    }
    let compression = compression_ratio(original, encoded)?
        .with_words_reference(words)
        .with_dictionary(dict, pruned);
    let freq = count_frequencies(dict, encoded)?;
    let stats = dictionary_stats(dict, &freq);
    Ok(Report {
        version: REPORT_VERSION,
        compression: CompressionSection::from(&compression),
        dictionary: DictionarySection::new(&compression, &stats),
        training_time: None,
    })
}

fn build(args: &BuildArgs) -> Result<()> {
    let (samples, words) = load_corpus(&args.input, &args.base)?;
    let config = BuildConfig {
        window: args.w,
        apply_fraction: args.fraction,
        seed: args.seed,
    };
    let (dict, encoded) = build_and_encode(&samples, &config)?;
    formats::write_dictionary(&args.out_dict, &dict)?;
    formats::write_encoded(&args.out_encoded, &encoded)?;

    let mut manifest = RunManifest::new("build")
        .parameter("w", args.w)
        .parameter("fraction", args.fraction)
        .parameter("seed", args.seed)
        .parameter("base", &args.base)
        .input("input", &args.input)?;
    manifest = with_base_input(manifest, &args.base)?
        .output("dict", &args.out_dict)?
        .output("encoded", &args.out_encoded)?;
    if let Some(path) = &args.report {
        let report = make_report(&samples, words, &encoded, &dict, 0)?;
        formats::write_report(path, &report)?;
        manifest = manifest.output("report", path)?;
    }
    manifest.write(&manifest_path(&args.out_encoded))?;
    Ok(())
}

fn encode(args: &EncodeArgs) -> Result<()> {
    let dict = formats::read_dictionary(&args.dict)?;
    let (samples, _) = load_corpus(&args.input, &args.base)?;
    let encoded: Vec<EncodedSample> = samples
        .iter()
        .map(|s| encode_inference(&dict, s, args.w_test))
        .collect();
    formats::write_encoded(&args.out, &encoded)?;

    let manifest = RunManifest::new("encode")
        .parameter("w_test", args.w_test)
        .parameter("base", &args.base)
        .input("dict", &args.dict)?
        .input("input", &args.input)?;
    with_base_input(manifest, &args.base)?
        .output("encoded", &args.out)?
        .write(&manifest_path(&args.out))?;
    Ok(())
}

fn prune(args: &PruneArgs) -> Result<()> {
    let dict = formats::read_dictionary(&args.dict)?;
    let encoded = formats::read_encoded(&args.encoded)?;
    let config = PruneConfig {
        min_count: args.min_count,
    };
    let (pruned, reencoded, remap) = prune_and_reencode(&dict, &encoded, &config)?;
    formats::write_dictionary(&args.out_dict, &pruned)?;
    formats::write_encoded(&args.out_encoded, &reencoded)?;
    formats::write_remap(&args.out_remap, &remap)?;

    RunManifest::new("prune")
        .parameter("min_count", args.min_count)
        .input("dict", &args.dict)?
        .input("encoded", &args.encoded)?
        .output("dict", &args.out_dict)?
        .output("encoded", &args.out_encoded)?
        .output("remap", &args.out_remap)?
        .write(&manifest_path(&args.out_encoded))?;
    Ok(())
}

fn stats(args: &StatsArgs) -> Result<()> {
    let (original, words) = load_corpus(&args.original, &args.base)?;
    let encoded = formats::read_encoded(&args.encoded)?;
    let dict = formats::read_dictionary(&args.dict)?;
    let pruned = match &args.remap {
        Some(path) => formats::read_remap(path)?.pruned_count() as u64,
        None => 0,
    };
    let mut report = make_report(&original, words, &encoded, &dict, pruned)?;
    if let Some(path) = &args.losses {
        let losses = formats::read_losses(path)?;
        let epochs = losses.len();
        let curve =
            LossCurve::new(losses, args.epsilon).with_context(|| format!("{}", path.display()))?;
        report.training_time = Some(TrainingTimeSection {
            epsilon: args.epsilon,
            lookahead: args.lookahead,
            epochs,
            converged_at: training_time_with_lookahead(&curve, args.lookahead)?,
        });
    }

    match &args.out {
        Some(path) => {
            formats::write_report(path, &report)?;
            let mut manifest = RunManifest::new("stats")
                .parameter("base", &args.base)
                .parameter("epsilon", args.epsilon)
                .parameter("lookahead", args.lookahead)
                .input("original", &args.original)?
                .input("encoded", &args.encoded)?
                .input("dict", &args.dict)?;
            for (role, input) in [("remap", &args.remap), ("losses", &args.losses)] {
                if let Some(input) = input {
                    manifest = manifest.input(role, input)?;
                }
            }
            with_base_input(manifest, &args.base)?
                .output("report", path)?
                .write(&manifest_path(path))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, &report)?;
            writeln!(stdout)?;
        }
    }
    Ok(())
}
