//! On-disk formats. Every writer produces a canonical byte stream: fixed key
//! order, entries in ascending id order, `\n` line endings and a trailing
//! newline, so identical inputs give identical files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use multitok_core::{
    word_tokenize, BaseTokenizer, CompressionReport, DictionaryStats, EncodedSample, IdRemap,
    MultiTokDictionary, Removal, Sample, SubwordVocab, TokenId, Window,
};
use serde::{Deserialize, Serialize};

pub const DICTIONARY_VERSION: u32 = 1;
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {error}")]
    Io { path: PathBuf, error: io::Error },
    #[error("{path}:{line}: {message}")]
    Record {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Document { path: PathBuf, message: String },
}

impl FormatError {
    fn io(path: &Path, source: io::Error) -> Self {
        FormatError::Io {
            path: path.to_owned(),
            error: source,
        }
    }

    fn record(path: &Path, line: usize, message: impl ToString) -> Self {
        FormatError::Record {
            path: path.to_owned(),
            line,
            message: message.to_string(),
        }
    }

    fn document(path: &Path, message: impl ToString) -> Self {
        FormatError::Document {
            path: path.to_owned(),
            message: message.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| FormatError::io(path, e))
}

/// Writes `contents` through a buffered file, mapping errors to `path`.
fn write_file(path: &Path, contents: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| FormatError::io(path, e))?;
    let mut out = BufWriter::new(file);
    contents(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| FormatError::io(path, e))
}

/// Non-empty lines with their 1-based line numbers.
fn lines(path: &Path) -> Result<impl Iterator<Item = Result<(usize, String)>> + '_> {
    Ok(open(path)?
        .lines()
        .enumerate()
        .map(move |(i, line)| {
            line.map(|l| (i + 1, l))
                .map_err(|e| FormatError::io(path, e))
        })
        .filter(|r| !matches!(r, Ok((_, l)) if l.trim().is_empty())))
}

// ---------------------------------------------------------------------------
// Base tokenizer selection

/// Value of the `--base` flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseSpec {
    Word,
    Subword(PathBuf),
    Pretokenized,
}

impl FromStr for BaseSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "word" => Ok(BaseSpec::Word),
            "pretokenized" => Ok(BaseSpec::Pretokenized),
            _ => match s.strip_prefix("subword:") {
                Some(path) if !path.is_empty() => Ok(BaseSpec::Subword(path.into())),
                _ => Err(format!(
                    "invalid base {s:?}: expected `word`, `subword:VOCAB` or `pretokenized`"
                )),
            },
        }
    }
}

impl std::fmt::Display for BaseSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BaseSpec::Word => f.write_str("word"),
            BaseSpec::Subword(path) => write!(f, "subword:{}", path.display()),
            BaseSpec::Pretokenized => f.write_str("pretokenized"),
        }
    }
}

/// Tokenizer for text records; `None` when only pre-tokenized records are
/// accepted.
pub fn load_base(spec: &BaseSpec) -> Result<Option<BaseTokenizer>> {
    match spec {
        BaseSpec::Word => Ok(Some(BaseTokenizer::Word)),
        BaseSpec::Pretokenized => Ok(None),
        BaseSpec::Subword(path) => Ok(Some(BaseTokenizer::Subword(read_vocab(path)?))),
    }
}

/// Subword vocabulary file: one piece per line in id order.
pub fn read_vocab(path: &Path) -> Result<SubwordVocab> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    SubwordVocab::parse(&text).map_err(|e| FormatError::document(path, e))
}

// ---------------------------------------------------------------------------
// Input corpus

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum RecordId {
    Int(i64),
    Str(String),
}

#[derive(Debug, Deserialize)]
struct CorpusRecord {
    id: Option<RecordId>,
    text: Option<String>,
    tokens: Option<Vec<String>>,
    label: Option<i64>,
}

/// A corpus sample in base-token form plus its word count, which is the
/// reference for cross-tokenizer ratios.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub sample: Sample,
    pub words: usize,
}

/// Reads line-delimited `{id?, text? | tokens?, label?}` records. Samples
/// without an id are named by their line number.
pub fn read_corpus(path: &Path, base: Option<&BaseTokenizer>) -> Result<Vec<CorpusEntry>> {
    let mut corpus = Vec::new();
    for line in lines(path)? {
        let (number, line) = line?;
        let record: CorpusRecord =
            serde_json::from_str(&line).map_err(|e| FormatError::record(path, number, e))?;
        let id = match record.id {
            Some(RecordId::Int(n)) => n.to_string(),
            Some(RecordId::Str(s)) => s,
            None => number.to_string(),
        };
        let (tokens, words) = match (record.text, record.tokens) {
            (Some(_), Some(_)) => {
                return Err(FormatError::record(
                    path,
                    number,
                    "both `text` and `tokens` given",
                ))
            }
            (None, None) => {
                return Err(FormatError::record(
                    path,
                    number,
                    "one of `text` or `tokens` is required",
                ))
            }
            (None, Some(tokens)) => {
                if let Some(i) = tokens.iter().position(|t| t.is_empty()) {
                    return Err(FormatError::record(
                        path,
                        number,
                        format!("token {i} is empty"),
                    ));
                }
                let words = tokens.len();
                (tokens, words)
            }
            (Some(text), None) => match base {
                Some(BaseTokenizer::Word) => {
                    let tokens = word_tokenize(&text);
                    let words = tokens.len();
                    (tokens, words)
                }
                Some(tokenizer) => (tokenizer.tokenize(&text), word_tokenize(&text).len()),
                None => {
                    return Err(FormatError::record(
                        path,
                        number,
                        "`text` record but the base tokenizer is `pretokenized`",
                    ))
                }
            },
        };
        corpus.push(CorpusEntry {
            sample: Sample {
                id,
                tokens,
                label: record.label,
            },
            words,
        });
    }
    Ok(corpus)
}

// ---------------------------------------------------------------------------
// Encoded corpus

#[derive(Debug, Serialize, Deserialize)]
struct EncodedRecord {
    id: String,
    token_ids: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<i64>,
    multitok_applied: bool,
}

pub fn write_encoded(path: &Path, encoded: &[EncodedSample]) -> Result<()> {
    write_file(path, |out| {
        for sample in encoded {
            let record = EncodedRecord {
                id: sample.id.clone(),
                token_ids: sample.token_ids.iter().map(|t| t.0).collect(),
                label: sample.label,
                multitok_applied: sample.multitok_applied,
            };
            serde_json::to_writer(&mut *out, &record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    })
}

pub fn read_encoded(path: &Path) -> Result<Vec<EncodedSample>> {
    lines(path)?
        .map(|line| {
            let (number, line) = line?;
            let record: EncodedRecord =
                serde_json::from_str(&line).map_err(|e| FormatError::record(path, number, e))?;
            Ok(EncodedSample {
                id: record.id,
                token_ids: record.token_ids.into_iter().map(TokenId).collect(),
                label: record.label,
                multitok_applied: record.multitok_applied,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Dictionary

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum WindowField {
    Words(u32),
    Named(String),
}

impl From<Window> for WindowField {
    fn from(w: Window) -> Self {
        match w {
            Window::Max => WindowField::Named("max".into()),
            Window::Words(n) => WindowField::Words(n.get()),
        }
    }
}

impl TryFrom<WindowField> for Window {
    type Error = String;

    fn try_from(field: WindowField) -> std::result::Result<Self, String> {
        match field {
            WindowField::Words(n) => Window::words(n).ok_or_else(|| "window must be >= 1".into()),
            WindowField::Named(s) => s
                .parse()
                .map_err(|e: multitok_core::ParseWindowError| e.to_string()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryRecord {
    id: u32,
    prefix: u32,
    suffix: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpecialIds {
    unk: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DictionaryFile {
    version: u32,
    window: WindowField,
    base_vocab: Vec<String>,
    entries: Vec<EntryRecord>,
    special: SpecialIds,
}

/// Writes the dictionary document. `entries` lists multi-word entries only;
/// base ids follow from the order of `base_vocab`.
pub fn write_dictionary(path: &Path, dict: &MultiTokDictionary) -> Result<()> {
    write_file(path, |out| {
        writeln!(out, "{{")?;
        writeln!(out, "  \"version\": {DICTIONARY_VERSION},")?;
        writeln!(
            out,
            "  \"window\": {},",
            json(&WindowField::from(dict.window()))
        )?;
        write_array(out, "base_vocab", dict.base_vocab().iter().map(json))?;
        writeln!(out, ",")?;
        write_array(
            out,
            "entries",
            dict.multiword_entries().iter().map(|e| {
                json(&EntryRecord {
                    id: e.id.0,
                    prefix: e.prefix.0,
                    suffix: e.suffix.0,
                })
            }),
        )?;
        writeln!(out, ",")?;
        writeln!(
            out,
            "  \"special\": {}",
            json(&SpecialIds {
                unk: TokenId::UNKNOWN.0
            })
        )?;
        writeln!(out, "}}")
    })
}

fn write_array(
    out: &mut dyn Write,
    key: &str,
    items: impl Iterator<Item = String>,
) -> io::Result<()> {
    write!(out, "  \"{key}\": [")?;
    let mut first = true;
    for item in items {
        write!(out, "{}\n    {item}", if first { "" } else { "," })?;
        first = false;
    }
    if first {
        write!(out, "]")
    } else {
        write!(out, "\n  ]")
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("in-memory serialization cannot fail")
}

pub fn read_dictionary(path: &Path) -> Result<MultiTokDictionary> {
    let file: DictionaryFile =
        serde_json::from_reader(open(path)?).map_err(|e| FormatError::document(path, e))?;
    if file.version != DICTIONARY_VERSION {
        return Err(FormatError::document(
            path,
            format!("unsupported dictionary version {}", file.version),
        ));
    }
    if file.special.unk != TokenId::UNKNOWN.0 {
        return Err(FormatError::document(
            path,
            format!("unknown token must have id 0, found {}", file.special.unk),
        ));
    }
    let window = Window::try_from(file.window).map_err(|e| FormatError::document(path, e))?;
    MultiTokDictionary::from_parts(
        file.base_vocab,
        window,
        file.entries
            .into_iter()
            .map(|e| (TokenId(e.id), TokenId(e.prefix), TokenId(e.suffix))),
    )
    .map_err(|e| FormatError::document(path, e))
}

// ---------------------------------------------------------------------------
// Remap

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum RemovalField {
    Count,
    Cascade,
}

#[derive(Debug, Serialize, Deserialize)]
struct RemapRecord {
    old: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    new: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pruned: Option<RemovalField>,
}

/// One line per old id in ascending order: `{"old","new"}` for survivors,
/// `{"old","pruned"}` for removed entries.
pub fn write_remap(path: &Path, remap: &IdRemap) -> Result<()> {
    let mut records: BTreeMap<u32, RemapRecord> = remap
        .mapping()
        .map(|(old, new)| {
            (
                old.0,
                RemapRecord {
                    old: old.0,
                    new: Some(new.0),
                    pruned: None,
                },
            )
        })
        .collect();
    for (old, reason) in remap.removed() {
        let pruned = match reason {
            Removal::Count => RemovalField::Count,
            Removal::Cascade => RemovalField::Cascade,
        };
        records.insert(
            old.0,
            RemapRecord {
                old: old.0,
                new: None,
                pruned: Some(pruned),
            },
        );
    }
    write_file(path, |out| {
        for record in records.values() {
            serde_json::to_writer(&mut *out, record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    })
}

pub fn read_remap(path: &Path) -> Result<IdRemap> {
    let mut mapping = Vec::new();
    let mut removed = Vec::new();
    for line in lines(path)? {
        let (number, line) = line?;
        let record: RemapRecord =
            serde_json::from_str(&line).map_err(|e| FormatError::record(path, number, e))?;
        match (record.new, record.pruned) {
            (Some(new), None) => mapping.push((TokenId(record.old), TokenId(new))),
            (None, Some(reason)) => removed.push((
                TokenId(record.old),
                match reason {
                    RemovalField::Count => Removal::Count,
                    RemovalField::Cascade => Removal::Cascade,
                },
            )),
            _ => {
                return Err(FormatError::record(
                    path,
                    number,
                    "expected exactly one of `new` or `pruned`",
                ))
            }
        }
    }
    Ok(IdRemap::from_parts(mapping, removed))
}

// ---------------------------------------------------------------------------
// Loss curves

#[derive(Debug, Serialize, Deserialize)]
struct LossRecord {
    epoch: usize,
    loss: f64,
}

/// Reads `{"epoch": i, "loss": x}` lines; epochs must run 1, 2, 3, …
pub fn read_losses(path: &Path) -> Result<Vec<f64>> {
    let mut losses = Vec::new();
    for line in lines(path)? {
        let (number, line) = line?;
        let record: LossRecord =
            serde_json::from_str(&line).map_err(|e| FormatError::record(path, number, e))?;
        if record.epoch != losses.len() + 1 {
            return Err(FormatError::record(
                path,
                number,
                format!(
                    "expected epoch {}, found {}",
                    losses.len() + 1,
                    record.epoch
                ),
            ));
        }
        losses.push(record.loss);
    }
    Ok(losses)
}

pub fn write_losses(path: &Path, losses: &[f64]) -> Result<()> {
    write_file(path, |out| {
        for (i, &loss) in losses.iter().enumerate() {
            serde_json::to_writer(&mut *out, &LossRecord { epoch: i + 1, loss })?;
            out.write_all(b"\n")?;
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Reports

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionSection {
    pub tokens_before: u64,
    pub tokens_after: u64,
    pub ratio: f64,
    pub words_reference: u64,
    pub word_ratio: f64,
}

impl From<&CompressionReport> for CompressionSection {
    fn from(r: &CompressionReport) -> Self {
        CompressionSection {
            tokens_before: r.tokens_before,
            tokens_after: r.tokens_after,
            ratio: round4(r.ratio()),
            words_reference: r.words_reference,
            word_ratio: round4(r.word_ratio()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictionarySection {
    pub total: u64,
    pub multiword: u64,
    pub pruned: u64,
    pub never_emitted: u64,
    pub length_histogram: BTreeMap<u32, u64>,
    pub count_histogram: BTreeMap<u64, u64>,
}

impl DictionarySection {
    pub fn new(report: &CompressionReport, stats: &DictionaryStats) -> Self {
        DictionarySection {
            total: report.dict_total,
            multiword: report.dict_multiword,
            pruned: report.dict_pruned,
            never_emitted: stats.never_emitted,
            length_histogram: stats.length_histogram.clone(),
            count_histogram: stats.count_histogram.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTimeSection {
    pub epsilon: f64,
    pub lookahead: usize,
    pub epochs: usize,
    /// `C(ε)`; `null` when the curve never converges.
    pub converged_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub compression: CompressionSection,
    pub dictionary: DictionarySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training_time: Option<TrainingTimeSection>,
}

pub fn write_report(path: &Path, report: &Report) -> Result<()> {
    write_file(path, |out| {
        serde_json::to_writer_pretty(&mut *out, report)?;
        out.write_all(b"\n")
    })
}

pub fn read_report(path: &Path) -> Result<Report> {
    serde_json::from_reader(open(path)?).map_err(|e| FormatError::document(path, e))
}
