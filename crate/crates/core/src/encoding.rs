//! Composition feature encoders.
//!
//! Three fixed-length encodings of a residue-index sequence:
//! amino-acid composition (AAC, 20 relative frequencies), di-peptide
//! composition (DPC, 400 adjacent-pair frequencies), and a two-segment
//! variant (SEG2) that splits the sequence in half and concatenates
//! AAC+DPC of each segment into 840 features, capturing localized
//! composition that whole-sequence AAC/DPC miss.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::seqio::{residue_letter, ProteinRecord, ALPHABET_LEN};

const AAC_DIM: usize = ALPHABET_LEN;
const DPC_DIM: usize = ALPHABET_LEN * ALPHABET_LEN;
const SEG2_DIM: usize = 2 * (AAC_DIM + DPC_DIM);

/// Which composition encoding to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodingKind {
    Aac,
    Dpc,
    Seg2,
}

impl EncodingKind {
    /// Output dimension: 20, 400, or 840.
    pub fn dim(self) -> usize {
        match self {
            EncodingKind::Aac => AAC_DIM,
            EncodingKind::Dpc => DPC_DIM,
            EncodingKind::Seg2 => SEG2_DIM,
        }
    }

    /// Shortest sequence the encoding is defined on. SEG2 needs two
    /// residues per segment so DPC exists on both halves.
    pub fn min_sequence_len(self) -> usize {
        match self {
            EncodingKind::Aac => 1,
            EncodingKind::Dpc => 2,
            EncodingKind::Seg2 => 4,
        }
    }

    /// Index ranges of the normalized blocks (each sums to 1).
    #[allow(clippy::single_range_in_vec_init)] // one-block encodings yield one range
    pub fn block_ranges(self) -> Vec<Range<usize>> {
        match self {
            EncodingKind::Aac => vec![0..AAC_DIM],
            EncodingKind::Dpc => vec![0..DPC_DIM],
            EncodingKind::Seg2 => {
                let seg = AAC_DIM + DPC_DIM;
                vec![
                    0..AAC_DIM,
                    AAC_DIM..seg,
                    seg..seg + AAC_DIM,
                    seg + AAC_DIM..SEG2_DIM,
                ]
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EncodingKind::Aac => "aac",
            EncodingKind::Dpc => "dpc",
            EncodingKind::Seg2 => "seg2",
        }
    }

    /// Numeric tag used in the model artifact.
    pub fn code(self) -> u8 {
        match self {
            EncodingKind::Aac => 0,
            EncodingKind::Dpc => 1,
            EncodingKind::Seg2 => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(EncodingKind::Aac),
            1 => Some(EncodingKind::Dpc),
            2 => Some(EncodingKind::Seg2),
            _ => None,
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EncodingKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aac" => Ok(EncodingKind::Aac),
            "dpc" => Ok(EncodingKind::Dpc),
            "seg2" => Ok(EncodingKind::Seg2),
            other => Err(format!(
                "unknown encoding '{other}' (expected aac, dpc, or seg2)"
            )),
        }
    }
}

/// A fixed-length, block-normalized feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub kind: EncodingKind,
    pub values: Vec<f64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("sequence of length {len} too short for {kind} (minimum {min})")]
    TooShort {
        kind: EncodingKind,
        len: usize,
        min: usize,
    },
    #[error("record '{id}': {source}")]
    Record {
        id: String,
        #[source]
        source: Box<EncodeError>,
    },
}

fn check_len(seq: &[u8], kind: EncodingKind) -> Result<(), EncodeError> {
    let min = kind.min_sequence_len();
    if seq.len() < min {
        return Err(EncodeError::TooShort {
            kind,
            len: seq.len(),
            min,
        });
    }
    Ok(())
}

fn aac_into(seq: &[u8], out: &mut [f64]) {
    debug_assert_eq!(out.len(), AAC_DIM);
    let inv_len = 1.0 / seq.len() as f64;
    for &residue in seq {
        out[residue as usize] += inv_len;
    }
}

fn dpc_into(seq: &[u8], out: &mut [f64]) {
    debug_assert_eq!(out.len(), DPC_DIM);
    let inv_pairs = 1.0 / (seq.len() - 1) as f64;
    for pair in seq.windows(2) {
        out[pair[0] as usize * ALPHABET_LEN + pair[1] as usize] += inv_pairs;
    }
}

/// Amino-acid composition: entry i = count(residue i) / length.
pub fn aac(seq: &[u8]) -> Result<FeatureVector, EncodeError> {
    check_len(seq, EncodingKind::Aac)?;
    let mut values = vec![0.0; AAC_DIM];
    aac_into(seq, &mut values);
    Ok(FeatureVector {
        kind: EncodingKind::Aac,
        values,
    })
}

/// Di-peptide composition: entry (i,j), flattened as 20*i+j, is the count
/// of adjacent pair (i,j) divided by length-1.
pub fn dpc(seq: &[u8]) -> Result<FeatureVector, EncodeError> {
    check_len(seq, EncodingKind::Dpc)?;
    let mut values = vec![0.0; DPC_DIM];
    dpc_into(seq, &mut values);
    Ok(FeatureVector {
        kind: EncodingKind::Dpc,
        values,
    })
}

/// Two-segment encoding: the first ceil(L/2) residues form segment 1, the
/// rest segment 2; the output is [AAC(s1) | DPC(s1) | AAC(s2) | DPC(s2)].
pub fn seg2(seq: &[u8]) -> Result<FeatureVector, EncodeError> {
    check_len(seq, EncodingKind::Seg2)?;
    let split = seq.len().div_ceil(2);
    let (first, second) = seq.split_at(split);
    let mut values = vec![0.0; SEG2_DIM];
    let seg = AAC_DIM + DPC_DIM;
    aac_into(first, &mut values[0..AAC_DIM]);
    dpc_into(first, &mut values[AAC_DIM..seg]);
    aac_into(second, &mut values[seg..seg + AAC_DIM]);
    dpc_into(second, &mut values[seg + AAC_DIM..]);
    Ok(FeatureVector {
        kind: EncodingKind::Seg2,
        values,
    })
}

/// Dispatches on `kind`.
pub fn encode(seq: &[u8], kind: EncodingKind) -> Result<FeatureVector, EncodeError> {
    match kind {
        EncodingKind::Aac => aac(seq),
        EncodingKind::Dpc => dpc(seq),
        EncodingKind::Seg2 => seg2(seq),
    }
}

/// Encodes every record into one row of an n x dim matrix, preserving
/// input order. Per-record failures carry the record id.
pub fn encode_batch(
    records: &[ProteinRecord],
    kind: EncodingKind,
) -> Result<DMatrix<f64>, EncodeError> {
    let mut matrix = DMatrix::zeros(records.len(), kind.dim());
    for (row, record) in records.iter().enumerate() {
        let features = encode(&record.sequence, kind).map_err(|source| EncodeError::Record {
            id: record.id.clone(),
            source: Box::new(source),
        })?;
        for (col, value) in features.values.iter().enumerate() {
            matrix[(row, col)] = *value;
        }
    }
    Ok(matrix)
}

/// Column names for CSV export: `AAC_A`, `DPC_AC`, `S1_AAC_A`, ...
pub fn feature_names(kind: EncodingKind) -> Vec<String> {
    fn aac_names(prefix: &str, out: &mut Vec<String>) {
        for i in 0..ALPHABET_LEN {
            out.push(format!("{prefix}AAC_{}", residue_letter(i as u8)));
        }
    }
    fn dpc_names(prefix: &str, out: &mut Vec<String>) {
        for i in 0..ALPHABET_LEN {
            for j in 0..ALPHABET_LEN {
                out.push(format!(
                    "{prefix}DPC_{}{}",
                    residue_letter(i as u8),
                    residue_letter(j as u8)
                ));
            }
        }
    }
    let mut names = Vec::with_capacity(kind.dim());
    match kind {
        EncodingKind::Aac => aac_names("", &mut names),
        EncodingKind::Dpc => dpc_names("", &mut names),
        EncodingKind::Seg2 => {
            aac_names("S1_", &mut names);
            dpc_names("S1_", &mut names);
            aac_names("S2_", &mut names);
            dpc_names("S2_", &mut names);
        }
    }
    names
}

/// Renders a feature matrix as CSV with an `id` column and a header row
/// naming every feature.
///
/// # Panics
/// Panics if `ids.len()` differs from the number of matrix rows.
pub fn feature_csv(kind: EncodingKind, ids: &[&str], matrix: &DMatrix<f64>) -> String {
    assert_eq!(ids.len(), matrix.nrows(), "one id per matrix row");
    assert_eq!(matrix.ncols(), kind.dim(), "matrix width matches encoding");
    let mut out = String::from("id");
    for name in feature_names(kind) {
        out.push(',');
        out.push_str(&name);
    }
    out.push('\n');
    for (row, id) in ids.iter().enumerate() {
        out.push_str(id);
        for col in 0..matrix.ncols() {
            out.push(',');
            out.push_str(&format!("{}", matrix[(row, col)]));
        }
        out.push('\n');
    }
    out
}
