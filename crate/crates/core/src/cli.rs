//! Command-line entry point: `fit`, `predict`, `evaluate`, `sweep`, and
//! `noise`.
//!
//! Class labels are conveyed by file: one FASTA per class, class 1 (AFP)
//! first. Every flag has a config-file equivalent (flat `key = value`
//! lines, `#` comments); explicit flags override config values. CSV output
//! uses '.' decimals, ',' separators, LF endings, and always carries a
//! header row, so runs with the same seed and inputs are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::artifact::{self, ArtifactError};
use crate::classifier::{
    Classification, ClassifierError, Dictionary, SolverParams, SrcModel,
};
use crate::encoding::{self, EncodeError, EncodingKind};
use crate::experiments::{
    self, ExperimentError, NoiseSpec, SampleSet, SplitSpec, SweepResult,
};
use crate::metrics::{ConfusionMatrix, MetricsError, MetricsReport};
use crate::pca::{PcaError, PcaModel};
use crate::seqio::{self, AmbiguousPolicy, ClassLabel, ProteinRecord};

const DEFAULT_PCS: usize = 200;
const DEFAULT_TRAIN_PER_CLASS: usize = 300;
const DEFAULT_SIGMA: f64 = 1.0;
const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: not valid UTF-8")]
    NotUtf8 { path: PathBuf },
    #[error("{path}: {source}")]
    Fasta {
        path: PathBuf,
        #[source]
        source: seqio::ParseError,
    },
    #[error("{path}: {source}")]
    Artifact {
        path: PathBuf,
        #[source]
        source: ArtifactError,
    },
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("missing required --{0} (flag or config key '{1}')")]
    Missing(&'static str, &'static str),
    #[error("invalid value for {key}: {message}")]
    Invalid {
        key: &'static str,
        message: String,
    },
    #[error("{count} record(s) failed; see error rows in the CSV and messages on stderr")]
    RecordFailures { count: usize },
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Parser, Debug)]
#[command(
    name = "protsrc",
    version,
    about = "Protein classification by sparse reconstruction over a dictionary of training samples"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a model from one FASTA file per class and write the artifact.
    Fit(FitArgs),
    /// Classify the sequences of a FASTA file with a fitted model.
    Predict(PredictArgs),
    /// Score a fitted model on a labeled FASTA pair.
    Evaluate(EvaluateArgs),
    /// Split the data, fit on the training side, and sweep component
    /// counts on the held-out side.
    Sweep(SweepArgs),
    /// Noisy-dictionary robustness study on the training files.
    Noise(NoiseArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Feature encoding: aac, dpc, or seg2.
    #[arg(long)]
    encoding: Option<String>,
    /// l1 penalty weight relative to ||T^T t||_inf.
    #[arg(long)]
    lambda: Option<f64>,
    /// Solver stopping tolerance (relative change in omega).
    #[arg(long)]
    tol: Option<f64>,
    /// Solver iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Remove residues outside the 20-letter alphabet instead of failing.
    #[arg(long)]
    drop_ambiguous: bool,
    /// Flat key=value config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// FASTA file with class-1 (AFP) training sequences.
    #[arg(long)]
    afp: Option<PathBuf>,
    /// FASTA file with class-2 (non-AFP) training sequences.
    #[arg(long)]
    non_afp: Option<PathBuf>,
    /// Where to write the model artifact.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of principal components to retain.
    #[arg(long)]
    pcs: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct PredictArgs {
    /// Model artifact written by `fit`.
    #[arg(long)]
    model: Option<PathBuf>,
    /// FASTA file with the sequences to classify.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Model artifact written by `fit`.
    #[arg(long)]
    model: Option<PathBuf>,
    /// FASTA file with class-1 (AFP) test sequences.
    #[arg(long)]
    afp: Option<PathBuf>,
    /// FASTA file with class-2 (non-AFP) test sequences.
    #[arg(long)]
    non_afp: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// FASTA file with all class-1 (AFP) sequences.
    #[arg(long)]
    afp: Option<PathBuf>,
    /// FASTA file with all class-2 (non-AFP) sequences.
    #[arg(long)]
    non_afp: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Training samples drawn per class.
    #[arg(long)]
    train_per_class: Option<usize>,
    /// Seed for the split.
    #[arg(long)]
    seed: Option<u64>,
    /// Component counts to evaluate, e.g. 10,20,50.
    #[arg(long, value_delimiter = ',')]
    pc_list: Option<Vec<usize>>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct NoiseArgs {
    /// FASTA file with class-1 (AFP) training sequences.
    #[arg(long)]
    afp: Option<PathBuf>,
    /// FASTA file with class-2 (non-AFP) training sequences.
    #[arg(long)]
    non_afp: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Standard deviation of the additive Gaussian noise.
    #[arg(long)]
    sigma: Option<f64>,
    /// Seed for the noise draws.
    #[arg(long)]
    seed: Option<u64>,
    /// Component counts to evaluate, e.g. 10,20,50.
    #[arg(long, value_delimiter = ',')]
    pc_list: Option<Vec<usize>>,
    /// Perturb raw feature rows before projection instead of the
    /// projected dictionary columns.
    #[arg(long)]
    noise_on_raw: bool,
    #[command(flatten)]
    common: CommonArgs,
}

/// Parses the command line and runs the selected command.
pub fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Noise(args) => cmd_noise(args),
    }
}

// ---------------------------------------------------------------------------
// Config file handling

const CONFIG_KEYS: &[&str] = &[
    "afp",
    "non_afp",
    "input",
    "model",
    "out",
    "encoding",
    "pcs",
    "pc_list",
    "lambda",
    "tol",
    "max_iter",
    "seed",
    "train_per_class",
    "sigma",
    "drop_ambiguous",
    "noise_on_raw",
];

struct Config {
    values: BTreeMap<String, String>,
    path: PathBuf,
}

impl Config {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Config {
                values: BTreeMap::new(),
                path: PathBuf::new(),
            });
        };
        let text = read_text(path)?;
        let mut values = BTreeMap::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config {
                    path: path.to_path_buf(),
                    message: format!("line {}: expected key = value", line_no + 1),
                });
            };
            let key = key.trim().to_string();
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config {
                    path: path.to_path_buf(),
                    message: format!("line {}: unknown key '{key}'", line_no + 1),
                });
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Config {
            values,
            path: path.to_path_buf(),
        })
    }

    fn parsed<T: FromStr>(&self, key: &'static str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| CliError::Config {
                path: self.path.clone(),
                message: format!("key '{key}': {e}"),
            }),
        }
    }

    fn path_value(&self, key: &'static str) -> Option<PathBuf> {
        self.values.get(key).map(PathBuf::from)
    }

    fn flag(&self, key: &'static str) -> Result<bool, CliError> {
        match self.values.get(key).map(String::as_str) {
            None => Ok(false),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(other) => Err(CliError::Config {
                path: self.path.clone(),
                message: format!("key '{key}': expected a boolean, got '{other}'"),
            }),
        }
    }

    fn pc_list(&self) -> Result<Option<Vec<usize>>, CliError> {
        match self.values.get("pc_list") {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|part| part.trim().parse::<usize>())
                .collect::<Result<Vec<usize>, _>>()
                .map(Some)
                .map_err(|e| CliError::Config {
                    path: self.path.clone(),
                    message: format!("key 'pc_list': {e}"),
                }),
        }
    }
}

/// Settings shared by every command, resolved from flags and config.
struct CommonSettings {
    encoding: EncodingKind,
    solver: SolverParams,
    policy: AmbiguousPolicy,
    config: Config,
}

fn resolve_common(common: &CommonArgs) -> Result<CommonSettings, CliError> {
    let config = Config::load(common.config.as_deref())?;
    let encoding = match common
        .encoding
        .clone()
        .or_else(|| config.values.get("encoding").cloned())
    {
        None => EncodingKind::Seg2,
        Some(raw) => raw.parse().map_err(|message| CliError::Invalid {
            key: "encoding",
            message,
        })?,
    };
    let defaults = SolverParams::default();
    let solver = SolverParams {
        lambda: common.lambda.or(config.parsed("lambda")?).unwrap_or(defaults.lambda),
        tol: common.tol.or(config.parsed("tol")?).unwrap_or(defaults.tol),
        max_iter: common
            .max_iter
            .or(config.parsed("max_iter")?)
            .unwrap_or(defaults.max_iter),
    };
    if !(solver.lambda.is_finite() && solver.lambda >= 0.0) {
        return Err(CliError::Invalid {
            key: "lambda",
            message: "must be finite and >= 0".into(),
        });
    }
    if !(solver.tol.is_finite() && solver.tol > 0.0) {
        return Err(CliError::Invalid {
            key: "tol",
            message: "must be finite and > 0".into(),
        });
    }
    if solver.max_iter == 0 {
        return Err(CliError::Invalid {
            key: "max_iter",
            message: "must be >= 1".into(),
        });
    }
    let policy = if common.drop_ambiguous || config.flag("drop_ambiguous")? {
        AmbiguousPolicy::Drop
    } else {
        AmbiguousPolicy::Strict
    };
    Ok(CommonSettings {
        encoding,
        solver,
        policy,
        config,
    })
}

fn required_path(
    flag: Option<PathBuf>,
    config: &Config,
    name: &'static str,
    key: &'static str,
) -> Result<PathBuf, CliError> {
    flag.or_else(|| config.path_value(key))
        .ok_or(CliError::Missing(name, key))
}

// ---------------------------------------------------------------------------
// Shared I/O helpers

fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    String::from_utf8(bytes).map_err(|_| CliError::NotUtf8 {
        path: path.to_path_buf(),
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_fasta(path: &Path, policy: AmbiguousPolicy) -> Result<Vec<ProteinRecord>, CliError> {
    let text = read_text(path)?;
    seqio::parse_fasta(&text, policy).map_err(|source| CliError::Fasta {
        path: path.to_path_buf(),
        source,
    })
}

fn load_model(path: &Path) -> Result<SrcModel, CliError> {
    artifact::load_model(path).map_err(|source| CliError::Artifact {
        path: path.to_path_buf(),
        source,
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

/// Canonical digest of a training set; identifies the model family in
/// experiment CSV headers where no single artifact exists.
fn sample_set_hash(set: &SampleSet, encoding: EncodingKind) -> String {
    let mut hasher = Sha256::new();
    hasher.update((set.len() as u64).to_le_bytes());
    hasher.update((set.dim() as u64).to_le_bytes());
    hasher.update([encoding.code()]);
    for v in set.features.iter() {
        hasher.update(v.to_le_bytes());
    }
    for label in &set.labels {
        hasher.update([label.index()]);
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

fn solver_comments(solver: &SolverParams) -> [String; 3] {
    [
        format!("lambda = {}", solver.lambda),
        format!("tol = {}", solver.tol),
        format!("max_iter = {}", solver.max_iter),
    ]
}

// ---------------------------------------------------------------------------
// fit

fn build_model(
    afp_records: &[ProteinRecord],
    non_afp_records: &[ProteinRecord],
    encoding: EncodingKind,
    pcs: usize,
    solver: SolverParams,
) -> Result<SrcModel, CliError> {
    let afp_features = encoding::encode_batch(afp_records, encoding)?;
    let non_afp_features = encoding::encode_batch(non_afp_records, encoding)?;
    let n = afp_features.nrows() + non_afp_features.nrows();
    let d = encoding.dim();
    let mut features = DMatrix::zeros(n, d);
    features
        .rows_mut(0, afp_features.nrows())
        .copy_from(&afp_features);
    features
        .rows_mut(afp_features.nrows(), non_afp_features.nrows())
        .copy_from(&non_afp_features);

    if pcs == 0 || pcs > d {
        return Err(CliError::Invalid {
            key: "pcs",
            message: format!("{pcs} out of range 1..={d} for encoding {encoding}"),
        });
    }
    let rank_bound = n.saturating_sub(1).min(d);
    if pcs > rank_bound {
        eprintln!(
            "warning: {pcs} components exceed the rank bound {rank_bound} of {n} training samples"
        );
    }

    let pca = PcaModel::fit(&features)?;
    let projected = pca.project_rows(&features, pcs)?;
    let labeled: Vec<(DVector<f64>, ClassLabel)> = (0..n)
        .map(|i| {
            let label = if i < afp_features.nrows() {
                ClassLabel::Afp
            } else {
                ClassLabel::NonAfp
            };
            (projected.row(i).transpose(), label)
        })
        .collect();
    let dictionary = Dictionary::build(&labeled)?;
    Ok(SrcModel::new(pca, dictionary, solver, encoding)?)
}

fn cmd_fit(args: FitArgs) -> Result<(), CliError> {
    let settings = resolve_common(&args.common)?;
    let afp_path = required_path(args.afp, &settings.config, "afp", "afp")?;
    let non_afp_path = required_path(args.non_afp, &settings.config, "non-afp", "non_afp")?;
    let out_path = required_path(args.out, &settings.config, "out", "out")?;
    let pcs = args
        .pcs
        .or(settings.config.parsed("pcs")?)
        .unwrap_or(DEFAULT_PCS);

    let afp_records = read_fasta(&afp_path, settings.policy)?;
    let non_afp_records = read_fasta(&non_afp_path, settings.policy)?;
    let model = build_model(
        &afp_records,
        &non_afp_records,
        settings.encoding,
        pcs,
        settings.solver,
    )?;

    artifact::save_model(&out_path, &model).map_err(|source| match source {
        ArtifactError::Io(source) => CliError::Io {
            path: out_path.clone(),
            source,
        },
        other => CliError::Artifact {
            path: out_path.clone(),
            source: other,
        },
    })?;

    println!(
        "model written to {}: encoding={} dim={} pcs={} dictionary={}x{} (class1={}, class2={})",
        out_path.display(),
        model.encoding(),
        model.pca().dim(),
        model.k(),
        model.dictionary().dim(),
        model.dictionary().len(),
        model.dictionary().class_count(ClassLabel::Afp),
        model.dictionary().class_count(ClassLabel::NonAfp),
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// predict

const PREDICT_HEADER: &str = "id,label,r1,r2,score1,score2,converged";

fn predict_rows(
    model: &SrcModel,
    records: &[ProteinRecord],
) -> (String, usize) {
    let encoded: Vec<Result<DVector<f64>, EncodeError>> = records
        .iter()
        .map(|record| {
            encoding::encode(&record.sequence, model.encoding()).map(|fv| {
                DVector::from_vec(fv.values)
            })
        })
        .collect();
    let classified: Vec<Option<Result<Classification, ClassifierError>>> = encoded
        .par_iter()
        .map(|entry| entry.as_ref().ok().map(|features| model.classify(features)))
        .collect();

    let mut csv = String::from(PREDICT_HEADER);
    csv.push('\n');
    let mut failures = 0;
    for (i, record) in records.iter().enumerate() {
        match (&encoded[i], &classified[i]) {
            (Err(error), _) => {
                failures += 1;
                eprintln!("record '{}': {error}", record.id);
                let _ = writeln!(csv, "{},error,,,,,", record.id);
            }
            (Ok(_), Some(Err(error))) => {
                failures += 1;
                eprintln!("record '{}': {error}", record.id);
                let _ = writeln!(csv, "{},error,,,,,", record.id);
            }
            (Ok(_), Some(Ok(result))) => {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    record.id,
                    result.label,
                    result.residuals[0],
                    result.residuals[1],
                    result.scores[0],
                    result.scores[1],
                    result.converged
                );
            }
            (Ok(_), None) => unreachable!("encoded rows are always classified"),
        }
    }
    (csv, failures)
}

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    let settings = resolve_common(&args.common)?;
    let model_path = required_path(args.model, &settings.config, "model", "model")?;
    let input_path = required_path(args.input, &settings.config, "input", "input")?;
    let out_path = required_path(args.out, &settings.config, "out", "out")?;

    let model = load_model(&model_path)?;
    let records = read_fasta(&input_path, settings.policy)?;
    let (csv, failures) = predict_rows(&model, &records);
    write_text(&out_path, &csv)?;
    if failures > 0 {
        return Err(CliError::RecordFailures { count: failures });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// evaluate

fn classify_labeled(
    model: &SrcModel,
    records: &[(ProteinRecord, ClassLabel)],
) -> Result<(Vec<ClassLabel>, Vec<ClassLabel>), CliError> {
    let set = SampleSet::from_labeled_records(records, model.encoding())?;
    let outcomes = model.classify_rows(&set.features);
    let mut predicted = Vec::with_capacity(outcomes.len());
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(result) => predicted.push(result.label),
            Err(source) => {
                return Err(CliError::Experiment(ExperimentError::ProbeFailed {
                    index: i,
                    source,
                }))
            }
        }
    }
    Ok((set.labels, predicted))
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let settings = resolve_common(&args.common)?;
    let model_path = required_path(args.model, &settings.config, "model", "model")?;
    let afp_path = required_path(args.afp, &settings.config, "afp", "afp")?;
    let non_afp_path = required_path(args.non_afp, &settings.config, "non-afp", "non_afp")?;
    let out_path = required_path(args.out, &settings.config, "out", "out")?;

    let model = load_model(&model_path)?;
    let model_hash = {
        let bytes = fs::read(&model_path).map_err(|source| CliError::Io {
            path: model_path.clone(),
            source,
        })?;
        sha256_hex(&bytes)
    };

    let mut labeled: Vec<(ProteinRecord, ClassLabel)> = Vec::new();
    for record in read_fasta(&afp_path, settings.policy)? {
        labeled.push((record, ClassLabel::Afp));
    }
    for record in read_fasta(&non_afp_path, settings.policy)? {
        labeled.push((record, ClassLabel::NonAfp));
    }

    let (truth, predicted) = classify_labeled(&model, &labeled)?;
    let report = ConfusionMatrix::from_labels(&truth, &predicted)?.metrics();

    let mut csv = String::new();
    let solver = model.solver();
    for comment in [
        "command = evaluate".to_string(),
        format!("encoding = {}", model.encoding()),
        format!("model_sha256 = {model_hash}"),
    ]
    .iter()
    .chain(solver_comments(solver).iter())
    {
        let _ = writeln!(csv, "# {comment}");
    }
    csv.push_str(MetricsReport::csv_header());
    csv.push('\n');
    csv.push_str(&report.csv_row(model.k()));
    csv.push('\n');
    write_text(&out_path, &csv)
}

// ---------------------------------------------------------------------------
// sweep and noise

fn resolve_pc_list(
    flag: Option<Vec<usize>>,
    config: &Config,
) -> Result<Vec<usize>, CliError> {
    Ok(flag
        .or(config.pc_list()?)
        .unwrap_or_else(experiments::default_pc_list))
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let settings = resolve_common(&args.common)?;
    let afp_path = required_path(args.afp, &settings.config, "afp", "afp")?;
    let non_afp_path = required_path(args.non_afp, &settings.config, "non-afp", "non_afp")?;
    let out_path = required_path(args.out, &settings.config, "out", "out")?;
    let train_per_class = args
        .train_per_class
        .or(settings.config.parsed("train_per_class")?)
        .unwrap_or(DEFAULT_TRAIN_PER_CLASS);
    let seed = args
        .seed
        .or(settings.config.parsed("seed")?)
        .unwrap_or(DEFAULT_SEED);
    let pc_list = resolve_pc_list(args.pc_list, &settings.config)?;

    let afp_records = read_fasta(&afp_path, settings.policy)?;
    let non_afp_records = read_fasta(&non_afp_path, settings.policy)?;
    let spec = SplitSpec {
        train_per_class,
        seed,
    };
    let (train_records, test_records) =
        experiments::split_dataset(&afp_records, &non_afp_records, &spec)?;
    let train = SampleSet::from_labeled_records(&train_records, settings.encoding)?;
    let test = SampleSet::from_labeled_records(&test_records, settings.encoding)?;

    let result =
        experiments::pc_sweep(&train, &test, &pc_list, &settings.solver, settings.encoding)?;
    report_warnings(&result);

    let mut comments = vec![
        "command = sweep".to_string(),
        format!("encoding = {}", settings.encoding),
        format!("seed = {seed}"),
        format!("train_per_class = {train_per_class}"),
    ];
    comments.extend(solver_comments(&settings.solver));
    comments.push(format!(
        "train_sha256 = {}",
        sample_set_hash(&train, settings.encoding)
    ));
    write_text(&out_path, &result.to_csv(&comments))
}

fn cmd_noise(args: NoiseArgs) -> Result<(), CliError> {
    let settings = resolve_common(&args.common)?;
    let afp_path = required_path(args.afp, &settings.config, "afp", "afp")?;
    let non_afp_path = required_path(args.non_afp, &settings.config, "non-afp", "non_afp")?;
    let out_path = required_path(args.out, &settings.config, "out", "out")?;
    let sigma = args
        .sigma
        .or(settings.config.parsed("sigma")?)
        .unwrap_or(DEFAULT_SIGMA);
    let seed = args
        .seed
        .or(settings.config.parsed("seed")?)
        .unwrap_or(DEFAULT_SEED);
    let on_raw = args.noise_on_raw || settings.config.flag("noise_on_raw")?;
    let pc_list = resolve_pc_list(args.pc_list, &settings.config)?;

    let mut labeled: Vec<(ProteinRecord, ClassLabel)> = Vec::new();
    for record in read_fasta(&afp_path, settings.policy)? {
        labeled.push((record, ClassLabel::Afp));
    }
    for record in read_fasta(&non_afp_path, settings.policy)? {
        labeled.push((record, ClassLabel::NonAfp));
    }
    let train = SampleSet::from_labeled_records(&labeled, settings.encoding)?;

    let noise = NoiseSpec {
        sigma,
        seed,
        on_raw_features: on_raw,
    };
    let result = experiments::noise_robustness(
        &train,
        &noise,
        &pc_list,
        &settings.solver,
        settings.encoding,
    )?;
    report_warnings(&result);

    let mut comments = vec![
        "command = noise".to_string(),
        format!("encoding = {}", settings.encoding),
        format!("seed = {seed}"),
        format!("sigma = {sigma}"),
        format!("noise_on_raw = {on_raw}"),
    ];
    comments.extend(solver_comments(&settings.solver));
    comments.push(format!(
        "train_sha256 = {}",
        sample_set_hash(&train, settings.encoding)
    ));
    write_text(&out_path, &result.to_csv(&comments))
}

fn report_warnings(result: &SweepResult) {
    for warning in &result.warnings {
        eprintln!("warning: {warning}");
    }
}
