//! FASTA parsing and validation over the canonical 20-letter amino-acid
//! alphabet.
//!
//! Sequences are stored as residue indices into [`ALPHABET`] rather than
//! letters, so downstream feature encoders can index count arrays directly.

use std::fmt;

use thiserror::Error;

/// Canonical one-letter codes of the 20 amino acids, alphabetical.
///
/// The index of a letter in this array is its residue index everywhere in
/// this crate, and the ordering is part of the model-file format.
pub const ALPHABET: [u8; 20] = *b"ACDEFGHIKLMNPQRSTVWY";

/// Number of residues in the canonical alphabet.
pub const ALPHABET_LEN: usize = 20;

/// Maps an (uppercase or lowercase) letter to its residue index.
pub fn residue_index(letter: u8) -> Option<u8> {
    let upper = letter.to_ascii_uppercase();
    ALPHABET.iter().position(|&a| a == upper).map(|i| i as u8)
}

/// Inverse of [`residue_index`].
///
/// # Panics
/// Panics if `index >= 20`.
pub fn residue_letter(index: u8) -> char {
    ALPHABET[index as usize] as char
}

/// Binary class label: class 1 is the positive class (AFP).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassLabel {
    /// Class 1, antifreeze proteins (positive).
    Afp,
    /// Class 2, non-antifreeze proteins (negative).
    NonAfp,
}

impl ClassLabel {
    /// Class index, 1 for AFP and 2 for non-AFP.
    pub fn index(self) -> u8 {
        match self {
            ClassLabel::Afp => 1,
            ClassLabel::NonAfp => 2,
        }
    }

    pub fn from_index(index: u8) -> Option<Self> {
        match index {
            1 => Some(ClassLabel::Afp),
            2 => Some(ClassLabel::NonAfp),
            _ => None,
        }
    }

    pub const BOTH: [ClassLabel; 2] = [ClassLabel::Afp, ClassLabel::NonAfp];
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// A validated protein record: id, free-form description, and a non-empty
/// sequence of residue indices in `0..20`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProteinRecord {
    pub id: String,
    pub description: String,
    pub sequence: Vec<u8>,
}

impl ProteinRecord {
    /// Sequence rendered back to one-letter codes.
    pub fn sequence_string(&self) -> String {
        self.sequence
            .iter()
            .map(|&r| residue_letter(r))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

/// A record plus its class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledRecord {
    pub record: ProteinRecord,
    pub label: ClassLabel,
}

/// What to do with letters outside the 20-letter alphabet (B, J, O, U, X,
/// Z, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmbiguousPolicy {
    /// Reject the input, naming the record, position, and letter.
    #[default]
    Strict,
    /// Silently remove the offending residues.
    Drop,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: sequence data before any '>' header")]
    SequenceBeforeHeader { line: usize },
    #[error("record '{id}': empty sequence")]
    EmptySequence { id: String },
    #[error("record '{id}': invalid residue '{letter}' at position {position}")]
    InvalidResidue {
        id: String,
        position: usize,
        letter: char,
    },
    #[error("line {line}: non-ASCII byte in input")]
    NonAscii { line: usize },
}

/// Parses FASTA text into validated records.
///
/// Header lines start with '>'; the id is the token up to the first
/// whitespace and the rest of the line is the description. Sequence lines
/// may wrap and are concatenated; letters are uppercased before validation.
/// Blank lines, trailing whitespace, and CRLF line endings are tolerated.
/// `position` in errors counts residues from 1 within the concatenated
/// sequence.
pub fn parse_fasta(input: &str, policy: AmbiguousPolicy) -> Result<Vec<ProteinRecord>, ParseError> {
    let mut records: Vec<ProteinRecord> = Vec::new();
    // (id, description, residues so far, count of non-whitespace chars seen)
    let mut current: Option<(String, String, Vec<u8>, usize)> = None;

    fn finish(
        current: &mut Option<(String, String, Vec<u8>, usize)>,
        records: &mut Vec<ProteinRecord>,
    ) -> Result<(), ParseError> {
        if let Some((id, description, sequence, _)) = current.take() {
            if sequence.is_empty() {
                return Err(ParseError::EmptySequence { id });
            }
            records.push(ProteinRecord {
                id,
                description,
                sequence,
            });
        }
        Ok(())
    }

    for (i, raw_line) in input.lines().enumerate() {
        let line_no = i + 1;
        if !raw_line.is_ascii() {
            return Err(ParseError::NonAscii { line: line_no });
        }
        let line = raw_line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            finish(&mut current, &mut records)?;
            let header = header.trim_start();
            let (id, description) = match header.find(|c: char| c.is_ascii_whitespace()) {
                Some(pos) => (&header[..pos], header[pos..].trim_start()),
                None => (header, ""),
            };
            current = Some((id.to_string(), description.to_string(), Vec::new(), 0));
        } else {
            let Some((id, _, sequence, seen)) = current.as_mut() else {
                return Err(ParseError::SequenceBeforeHeader { line: line_no });
            };
            for ch in line.chars() {
                if ch.is_ascii_whitespace() {
                    continue;
                }
                *seen += 1;
                match residue_index(ch as u8) {
                    Some(idx) => sequence.push(idx),
                    None => match policy {
                        AmbiguousPolicy::Strict => {
                            return Err(ParseError::InvalidResidue {
                                id: id.clone(),
                                position: *seen,
                                letter: ch,
                            });
                        }
                        AmbiguousPolicy::Drop => {}
                    },
                }
            }
        }
    }
    finish(&mut current, &mut records)?;
    Ok(records)
}

/// Serializes records back to FASTA, wrapping sequences at 60 columns.
pub fn write_fasta(records: &[ProteinRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push('>');
        out.push_str(&record.id);
        if !record.description.is_empty() {
            out.push(' ');
            out.push_str(&record.description);
        }
        out.push('\n');
        let letters = record.sequence_string();
        for chunk in letters.as_bytes().chunks(60) {
            out.push_str(std::str::from_utf8(chunk).expect("alphabet is ASCII"));
            out.push('\n');
        }
    }
    out
}
