//! Experiment protocols: seeded train/test splitting, sweeps over the
//! number of retained components, and the noisy-dictionary robustness
//! study (self-classification of the training set against a perturbed
//! dictionary).
//!
//! All randomness flows from one user-supplied 64-bit seed through
//! fixed counter-based substreams, so every experiment replays exactly.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::classifier::{ClassifierError, Dictionary, SolverParams, SrcModel};
use crate::encoding::{self, EncodeError, EncodingKind};
use crate::metrics::{ConfusionMatrix, MetricsError, MetricsReport};
use crate::pca::{PcaError, PcaModel};
use crate::seqio::{ClassLabel, ProteinRecord};

/// Substream ids for the one-seed-many-streams scheme.
const STREAM_SPLIT_AFP: u64 = 0;
const STREAM_SPLIT_NON_AFP: u64 = 1;
const STREAM_NOISE_RAW: u64 = 8;
const STREAM_NOISE_PROJECTED_BASE: u64 = 16;

/// Deterministic generator for one purpose-specific substream of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The component counts evaluated in the reference sweep:
/// 10..=100 by tens, 150..=250 by 25s, then 300..=600 by hundreds
/// (19 values).
pub fn default_pc_list() -> Vec<usize> {
    let mut list: Vec<usize> = (1..=10).map(|i| i * 10).collect();
    list.extend([150, 175, 200, 225, 250]);
    list.extend([300, 400, 500, 600]);
    list
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(
        "class {class}: cannot draw {requested} training samples from {available} \
         while keeping at least one test sample"
    )]
    InsufficientSamples {
        class: ClassLabel,
        available: usize,
        requested: usize,
    },
    #[error("invalid pc list: {0}")]
    InvalidPcList(String),
    #[error("sigma must be finite and >= 0, got {0}")]
    InvalidSigma(f64),
    #[error("probe {index} failed: {source}")]
    ProbeFailed {
        index: usize,
        source: ClassifierError,
    },
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Per-class training-set size and the seed for the random split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub train_per_class: usize,
    pub seed: u64,
}

/// Items paired with their class labels.
pub type LabeledSet<T> = Vec<(T, ClassLabel)>;

/// Draws `spec.train_per_class` samples per class uniformly without
/// replacement; the remainder becomes the test side. Both sides keep
/// class-1 items first and preserve the original within-class order.
pub fn split_dataset<T: Clone>(
    afps: &[T],
    non_afps: &[T],
    spec: &SplitSpec,
) -> Result<(LabeledSet<T>, LabeledSet<T>), ExperimentError> {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (items, class, stream) in [
        (afps, ClassLabel::Afp, STREAM_SPLIT_AFP),
        (non_afps, ClassLabel::NonAfp, STREAM_SPLIT_NON_AFP),
    ] {
        if spec.train_per_class == 0 || spec.train_per_class >= items.len() {
            return Err(ExperimentError::InsufficientSamples {
                class,
                available: items.len(),
                requested: spec.train_per_class,
            });
        }
        let mut rng = substream(spec.seed, stream);
        let mut chosen =
            rand::seq::index::sample(&mut rng, items.len(), spec.train_per_class).into_vec();
        chosen.sort_unstable();
        let mut is_train = vec![false; items.len()];
        for &i in &chosen {
            is_train[i] = true;
        }
        for (i, item) in items.iter().enumerate() {
            if is_train[i] {
                train.push((item.clone(), class));
            } else {
                test.push((item.clone(), class));
            }
        }
    }
    Ok((train, test))
}

/// A feature matrix (one sample per row) with per-row class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub features: DMatrix<f64>,
    pub labels: Vec<ClassLabel>,
}

impl SampleSet {
    pub fn new(features: DMatrix<f64>, labels: Vec<ClassLabel>) -> Self {
        assert_eq!(features.nrows(), labels.len(), "one label per row");
        SampleSet { features, labels }
    }

    /// Encodes labeled records into a sample set.
    pub fn from_labeled_records(
        records: &[(ProteinRecord, ClassLabel)],
        kind: EncodingKind,
    ) -> Result<Self, EncodeError> {
        let plain: Vec<ProteinRecord> = records.iter().map(|(r, _)| r.clone()).collect();
        let features = encoding::encode_batch(&plain, kind)?;
        let labels = records.iter().map(|(_, c)| *c).collect();
        Ok(SampleSet { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }
}

/// One sweep row: component count and the resulting statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub pc_count: usize,
    pub report: MetricsReport,
}

/// Sweep output: rows in ascending pc order plus warnings for skipped
/// component counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
}

impl SweepResult {
    /// CSV rendering: `# `-prefixed comment lines (provenance plus any
    /// warnings), the metric header, one row per component count.
    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for comment in comments {
            out.push_str("# ");
            out.push_str(comment);
            out.push('\n');
        }
        for warning in &self.warnings {
            out.push_str("# warning: ");
            out.push_str(warning);
            out.push('\n');
        }
        out.push_str(MetricsReport::csv_header());
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.report.csv_row(row.pc_count));
            out.push('\n');
        }
        out
    }
}

fn validate_pc_list(pc_list: &[usize]) -> Result<(), ExperimentError> {
    if pc_list.is_empty() {
        return Err(ExperimentError::InvalidPcList("empty".into()));
    }
    if pc_list[0] == 0 {
        return Err(ExperimentError::InvalidPcList("contains 0".into()));
    }
    for pair in pc_list.windows(2) {
        if pair[1] <= pair[0] {
            return Err(ExperimentError::InvalidPcList(format!(
                "not strictly increasing at {} -> {}",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

/// Builds a dictionary from (possibly perturbed) projected training rows,
/// classifies every probe, and reduces to one metrics row.
fn evaluate_row(
    pca: &PcaModel,
    dictionary_rows: &DMatrix<f64>,
    dictionary_labels: &[ClassLabel],
    probes: &SampleSet,
    solver: &SolverParams,
    encoding: EncodingKind,
) -> Result<MetricsReport, ExperimentError> {
    let labeled: Vec<(DVector<f64>, ClassLabel)> = (0..dictionary_rows.nrows())
        .map(|i| (dictionary_rows.row(i).transpose(), dictionary_labels[i]))
        .collect();
    let dictionary = Dictionary::build(&labeled)?;
    let model = SrcModel::new(pca.clone(), dictionary, *solver, encoding)?;
    let outcomes = model.classify_rows(&probes.features);
    let mut predicted = Vec::with_capacity(outcomes.len());
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(result) => predicted.push(result.label),
            Err(source) => return Err(ExperimentError::ProbeFailed { index, source }),
        }
    }
    let confusion = ConfusionMatrix::from_labels(&probes.labels, &predicted)?;
    Ok(confusion.metrics())
}

/// Fits one PCA on `train`, then for each component count k rebuilds the
/// dictionary at dimension k and classifies every `test` probe. Counts
/// beyond the rank bound min(n-1, d) are skipped with a warning.
pub fn pc_sweep(
    train: &SampleSet,
    test: &SampleSet,
    pc_list: &[usize],
    solver: &SolverParams,
    encoding: EncodingKind,
) -> Result<SweepResult, ExperimentError> {
    validate_pc_list(pc_list)?;
    let pca = PcaModel::fit(&train.features)?;
    let rank_bound = (train.len() - 1).min(train.dim());

    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &k in pc_list {
        if k > rank_bound {
            warnings.push(format!(
                "pc count {k} exceeds the rank bound {rank_bound}; row skipped"
            ));
            continue;
        }
        let projected = pca.project_rows(&train.features, k)?;
        let report = evaluate_row(&pca, &projected, &train.labels, test, solver, encoding)?;
        rows.push(SweepRow {
            pc_count: k,
            report,
        });
    }
    Ok(SweepResult { rows, warnings })
}

/// Noise settings for [`noise_robustness`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Standard deviation of the additive zero-mean Gaussian noise.
    pub sigma: f64,
    pub seed: u64,
    /// When set, noise perturbs the raw feature rows before projection
    /// instead of the projected dictionary columns.
    pub on_raw_features: bool,
}

/// Dictionary robustness study: perturbs the dictionary with seeded
/// Gaussian noise, then self-classifies the (clean) training samples
/// against it for each component count.
///
/// By default the noise lands on the projected training rows, after
/// projection and before the unit-norm column scaling inside the
/// dictionary build. With sigma = 0 no perturbation is applied at all and
/// the result is identical to `pc_sweep(train, train, ...)`.
pub fn noise_robustness(
    train: &SampleSet,
    noise: &NoiseSpec,
    pc_list: &[usize],
    solver: &SolverParams,
    encoding: EncodingKind,
) -> Result<SweepResult, ExperimentError> {
    validate_pc_list(pc_list)?;
    if !noise.sigma.is_finite() || noise.sigma < 0.0 {
        return Err(ExperimentError::InvalidSigma(noise.sigma));
    }
    let pca = PcaModel::fit(&train.features)?;
    let rank_bound = (train.len() - 1).min(train.dim());

    let raw_source = if noise.on_raw_features && noise.sigma > 0.0 {
        let mut noisy = train.features.clone();
        add_gaussian_noise(
            &mut noisy,
            noise.sigma,
            &mut substream(noise.seed, STREAM_NOISE_RAW),
        );
        Some(noisy)
    } else {
        None
    };

    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &k in pc_list {
        if k > rank_bound {
            warnings.push(format!(
                "pc count {k} exceeds the rank bound {rank_bound}; row skipped"
            ));
            continue;
        }
        let mut projected = match &raw_source {
            Some(noisy) => pca.project_rows(noisy, k)?,
            None => pca.project_rows(&train.features, k)?,
        };
        if !noise.on_raw_features && noise.sigma > 0.0 {
            add_gaussian_noise(
                &mut projected,
                noise.sigma,
                &mut substream(noise.seed, STREAM_NOISE_PROJECTED_BASE + k as u64),
            );
        }
        let report = evaluate_row(&pca, &projected, &train.labels, train, solver, encoding)?;
        rows.push(SweepRow {
            pc_count: k,
            report,
        });
    }
    Ok(SweepResult { rows, warnings })
}

/// Adds i.i.d. N(0, sigma^2) noise, drawing in column-major order so the
/// perturbation is a pure function of (seed, stream, shape).
fn add_gaussian_noise(matrix: &mut DMatrix<f64>, sigma: f64, rng: &mut ChaCha8Rng) {
    for j in 0..matrix.ncols() {
        for i in 0..matrix.nrows() {
            matrix[(i, j)] += sigma * rng.sample::<f64, _>(StandardNormal);
        }
    }
}
