//! Versioned binary container for a fitted model.
//!
//! Layout (all integers and floats little-endian, floats are IEEE f64):
//!
//! ```text
//! magic            4 bytes  "SRCM"
//! version          u32      currently 1
//! encoding kind    u8       0 = aac, 1 = dpc, 2 = seg2
//! k                u32      retained components = dictionary rows p
//! p                u32      dictionary row count (must equal k)
//! m                u32      dictionary column count
//! alphabet len     u32      followed by that many ASCII bytes
//! d                u32      feature dimension of the PCA block
//! mean             d   f64
//! eigenvalues      d   f64
//! components       d*d f64  column-major
//! dictionary       p*m f64  column-major
//! labels           m   u8   class indices, non-decreasing (1 then 2)
//! lambda           f64      relative penalty weight
//! tol              f64
//! max_iter         u32
//! ```
//!
//! Readers reject unknown magic, unknown versions, inconsistent
//! dimensions, and trailing bytes.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::classifier::{Dictionary, SolverParams, SrcModel};
use crate::encoding::EncodingKind;
use crate::pca::PcaModel;
use crate::seqio::{ClassLabel, ALPHABET};

const MAGIC: &[u8; 4] = b"SRCM";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("not a model file")]
    NotAModelFile,
    #[error("unsupported model file version {0}")]
    UnsupportedVersion(u32),
    #[error("corrupt model file: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn write_model<W: Write>(writer: &mut W, model: &SrcModel) -> io::Result<()> {
    let pca = model.pca();
    let dictionary = model.dictionary();
    let d = pca.dim();
    let (p, m) = (dictionary.dim(), dictionary.len());

    writer.write_all(MAGIC)?;
    write_u32(writer, VERSION)?;
    writer.write_all(&[model.encoding().code()])?;
    write_u32(writer, model.k() as u32)?;
    write_u32(writer, p as u32)?;
    write_u32(writer, m as u32)?;
    write_u32(writer, ALPHABET.len() as u32)?;
    writer.write_all(&ALPHABET)?;
    write_u32(writer, d as u32)?;
    for v in pca.mean().iter() {
        write_f64(writer, *v)?;
    }
    for v in pca.eigenvalues().iter() {
        write_f64(writer, *v)?;
    }
    for v in pca.components().iter() {
        // nalgebra stores column-major; iteration order matches the layout.
        write_f64(writer, *v)?;
    }
    for v in dictionary.columns().iter() {
        write_f64(writer, *v)?;
    }
    for label in dictionary.labels() {
        writer.write_all(&[label.index()])?;
    }
    let solver = model.solver();
    write_f64(writer, solver.lambda)?;
    write_f64(writer, solver.tol)?;
    write_u32(writer, solver.max_iter as u32)?;
    Ok(())
}

pub fn read_model<R: Read>(reader: &mut R) -> Result<SrcModel, ArtifactError> {
    let mut magic = [0u8; 4];
    reader
        .read_exact(&mut magic)
        .map_err(|_| ArtifactError::NotAModelFile)?;
    if &magic != MAGIC {
        return Err(ArtifactError::NotAModelFile);
    }
    let version = read_u32(reader)?;
    if version != VERSION {
        return Err(ArtifactError::UnsupportedVersion(version));
    }

    let encoding = EncodingKind::from_code(read_u8(reader)?)
        .ok_or_else(|| ArtifactError::Corrupt("unknown encoding kind".into()))?;
    let k = read_u32(reader)? as usize;
    let p = read_u32(reader)? as usize;
    let m = read_u32(reader)? as usize;
    if k != p {
        return Err(ArtifactError::Corrupt(format!(
            "retained components {k} disagree with dictionary rows {p}"
        )));
    }

    let alphabet_len = read_u32(reader)? as usize;
    let mut alphabet = vec![0u8; alphabet_len];
    reader.read_exact(&mut alphabet)?;
    if alphabet != ALPHABET {
        return Err(ArtifactError::Corrupt(
            "unsupported amino-acid ordering".into(),
        ));
    }

    let d = read_u32(reader)? as usize;
    if encoding.dim() != d {
        return Err(ArtifactError::Corrupt(format!(
            "encoding {encoding} implies dimension {}, file says {d}",
            encoding.dim()
        )));
    }
    if k == 0 || k > d {
        return Err(ArtifactError::Corrupt(format!(
            "retained components {k} out of range 1..={d}"
        )));
    }
    let mean = DVector::from_vec(read_f64_vec(reader, d)?);
    let eigenvalues = DVector::from_vec(read_f64_vec(reader, d)?);
    let components = DMatrix::from_vec(d, d, read_f64_vec(reader, d * d)?);
    let columns = DMatrix::from_vec(p, m, read_f64_vec(reader, p * m)?);

    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let index = read_u8(reader)?;
        let label = ClassLabel::from_index(index)
            .ok_or_else(|| ArtifactError::Corrupt(format!("invalid class index {index}")))?;
        if labels.last().is_some_and(|&last| label < last) {
            return Err(ArtifactError::Corrupt(
                "class labels are not non-decreasing".into(),
            ));
        }
        labels.push(label);
    }

    let solver = SolverParams {
        lambda: read_f64(reader)?,
        tol: read_f64(reader)?,
        max_iter: read_u32(reader)? as usize,
    };

    let mut trailing = [0u8; 1];
    if reader.read(&mut trailing)? != 0 {
        return Err(ArtifactError::Corrupt("trailing bytes after model".into()));
    }

    let pca = PcaModel::from_parts(mean, components, eigenvalues)
        .map_err(|e| ArtifactError::Corrupt(e.to_string()))?;
    let dictionary = Dictionary::from_parts(columns, labels)
        .map_err(|e| ArtifactError::Corrupt(e.to_string()))?;
    SrcModel::new(pca, dictionary, solver, encoding)
        .map_err(|e| ArtifactError::Corrupt(e.to_string()))
}

pub fn save_model(path: &Path, model: &SrcModel) -> Result<(), ArtifactError> {
    let mut writer = BufWriter::new(File::create(path)?);
    write_model(&mut writer, model)?;
    writer.flush()?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<SrcModel, ArtifactError> {
    let mut reader = BufReader::new(File::open(path)?);
    read_model(&mut reader)
}

/// Serializes a model to bytes; used for hashing and determinism checks.
pub fn model_bytes(model: &SrcModel) -> Vec<u8> {
    let mut bytes = Vec::new();
    write_model(&mut bytes, model).expect("writing to a Vec cannot fail");
    bytes
}

fn write_u32<W: Write>(writer: &mut W, v: u32) -> io::Result<()> {
    writer.write_all(&v.to_le_bytes())
}

fn write_f64<W: Write>(writer: &mut W, v: f64) -> io::Result<()> {
    writer.write_all(&v.to_le_bytes())
}

fn read_u8<R: Read>(reader: &mut R) -> Result<u8, ArtifactError> {
    let mut buf = [0u8; 1];
    reader
        .read_exact(&mut buf)
        .map_err(|_| ArtifactError::Corrupt("unexpected end of file".into()))?;
    Ok(buf[0])
}

fn read_u32<R: Read>(reader: &mut R) -> Result<u32, ArtifactError> {
    let mut buf = [0u8; 4];
    reader
        .read_exact(&mut buf)
        .map_err(|_| ArtifactError::Corrupt("unexpected end of file".into()))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64<R: Read>(reader: &mut R) -> Result<f64, ArtifactError> {
    let mut buf = [0u8; 8];
    reader
        .read_exact(&mut buf)
        .map_err(|_| ArtifactError::Corrupt("unexpected end of file".into()))?;
    Ok(f64::from_le_bytes(buf))
}

fn read_f64_vec<R: Read>(reader: &mut R, len: usize) -> Result<Vec<f64>, ArtifactError> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(read_f64(reader)?);
    }
    Ok(out)
}
