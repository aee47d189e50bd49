//! Binary-classification statistics over a confusion matrix.
//!
//! Class 1 (AFP) is the positive class throughout. Degenerate denominators
//! follow the usual conventions: MCC with an empty marginal is 0, and
//! precision/F1 with a zero denominator are 0.

use thiserror::Error;

use crate::seqio::ClassLabel;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("label lists differ in length ({truth} vs {predicted})")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("label lists are empty")]
    Empty,
}

/// TP/TN/FP/FN counts with class 1 as positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub true_positives: u64,
    pub true_negatives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
}

impl ConfusionMatrix {
    pub fn new(
        true_positives: u64,
        true_negatives: u64,
        false_positives: u64,
        false_negatives: u64,
    ) -> Self {
        ConfusionMatrix {
            true_positives,
            true_negatives,
            false_positives,
            false_negatives,
        }
    }

    /// Tallies the four cells from equal-length truth/prediction lists.
    pub fn from_labels(
        truth: &[ClassLabel],
        predicted: &[ClassLabel],
    ) -> Result<Self, MetricsError> {
        if truth.len() != predicted.len() {
            return Err(MetricsError::LengthMismatch {
                truth: truth.len(),
                predicted: predicted.len(),
            });
        }
        if truth.is_empty() {
            return Err(MetricsError::Empty);
        }
        let mut cm = ConfusionMatrix::default();
        for (&actual, &guess) in truth.iter().zip(predicted) {
            match (actual, guess) {
                (ClassLabel::Afp, ClassLabel::Afp) => cm.true_positives += 1,
                (ClassLabel::NonAfp, ClassLabel::NonAfp) => cm.true_negatives += 1,
                (ClassLabel::NonAfp, ClassLabel::Afp) => cm.false_positives += 1,
                (ClassLabel::Afp, ClassLabel::NonAfp) => cm.false_negatives += 1,
            }
        }
        Ok(cm)
    }

    pub fn total(&self) -> u64 {
        self.true_positives + self.true_negatives + self.false_positives + self.false_negatives
    }

    /// All eight statistics at full precision.
    pub fn metrics(&self) -> MetricsReport {
        let tp = self.true_positives as f64;
        let tn = self.true_negatives as f64;
        let fp = self.false_positives as f64;
        let fn_ = self.false_negatives as f64;

        let sensitivity = ratio(tp, tp + fn_);
        let specificity = ratio(tn, tn + fp);
        let accuracy = ratio(tp + tn, tp + tn + fp + fn_);
        let precision = ratio(tp, tp + fp);
        let f1 = ratio(2.0 * precision * sensitivity, precision + sensitivity);
        let delta = (tp + fp) * (tn + fn_) * (tp + fn_) * (tn + fp);
        let mcc = if delta == 0.0 {
            0.0
        } else {
            (tp * tn - fp * fn_) / delta.sqrt()
        };

        MetricsReport {
            sensitivity,
            specificity,
            accuracy,
            mcc,
            balanced_accuracy: (sensitivity + specificity) / 2.0,
            youden: sensitivity + specificity - 1.0,
            f1,
            precision,
        }
    }
}

fn ratio(numerator: f64, denominator: f64) -> f64 {
    if denominator == 0.0 {
        0.0
    } else {
        numerator / denominator
    }
}

/// Full-precision metric values; rates are fractions in [0, 1], mcc and
/// youden in [-1, 1]. Rendering to the table-style percentages happens only
/// in [`MetricsReport::csv_row`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub sensitivity: f64,
    pub specificity: f64,
    pub accuracy: f64,
    pub mcc: f64,
    pub balanced_accuracy: f64,
    pub youden: f64,
    pub f1: f64,
    pub precision: f64,
}

impl MetricsReport {
    /// Header matching [`MetricsReport::csv_row`].
    pub fn csv_header() -> &'static str {
        "pcs,youden,balanced_accuracy,mcc,sensitivity,specificity,accuracy,f1"
    }

    /// One CSV row in table column order. Youden, MCC, and F1 are printed
    /// as two-decimal fractions; the four rates as two-decimal percentages.
    pub fn csv_row(&self, pc_count: usize) -> String {
        format!(
            "{},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2}",
            pc_count,
            self.youden,
            100.0 * self.balanced_accuracy,
            self.mcc,
            100.0 * self.sensitivity,
            100.0 * self.specificity,
            100.0 * self.accuracy,
            self.f1
        )
    }
}
