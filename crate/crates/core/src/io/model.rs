//! Binary model checkpoints.
//!
//! Single versioned file: magic string, format version, fit method,
//! dimensions, hyperparameters, then the factor and projection matrices
//! row-major as little-endian f64. Loading validates the magic, the
//! version and that the byte count matches the declared dimensions
//! exactly.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::solver::Hyperparams;
use crate::tensor::FactorSet;
use ndarray::Array2;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"TRTMODEL";
const VERSION: u32 = 1;

/// Which solver produced a checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    CpAls,
    Tdrc,
}

impl ModelKind {
    fn to_byte(self) -> u8 {
        match self {
            ModelKind::CpAls => 0,
            ModelKind::Tdrc => 1,
        }
    }

    fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(ModelKind::CpAls),
            1 => Ok(ModelKind::Tdrc),
            other => Err(Error::Model(format!("unknown model kind {other}"))),
        }
    }
}

/// A loaded checkpoint.
#[derive(Debug, Clone)]
pub struct Model {
    pub kind: ModelKind,
    pub factors: FactorSet,
    pub m1: Matrix,
    pub m2: Matrix,
    pub hyperparams: Hyperparams,
}

fn push_matrix(buf: &mut Vec<u8>, m: &Matrix) {
    for row in m.rows() {
        for v in row {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
}

pub fn save_model<P: AsRef<Path>>(
    fs_: &FactorSet,
    m1: &Matrix,
    m2: &Matrix,
    hp: &Hyperparams,
    kind: ModelKind,
    path: P,
) -> Result<()> {
    let (m, n, t) = fs_.dims();
    let r = fs_.rank();
    if m1.dim() != (r, r) || m2.dim() != (r, r) {
        return Err(Error::Dimension(format!(
            "projections must be {r}x{r}, got {}x{} and {}x{}",
            m1.nrows(),
            m1.ncols(),
            m2.nrows(),
            m2.ncols()
        )));
    }
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(kind.to_byte());
    for d in [m, n, t, r] {
        buf.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for v in [
        hp.alpha, hp.beta, hp.lambda, hp.mu, hp.rho_init, hp.rho_cap, hp.tol, hp.cg_tol,
    ] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for v in [hp.max_iter as u64, hp.cg_max_iter as u64, hp.seed] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    push_matrix(&mut buf, &fs_.mode1);
    push_matrix(&mut buf, &fs_.mode2);
    push_matrix(&mut buf, &fs_.mode3);
    push_matrix(&mut buf, m1);
    push_matrix(&mut buf, m2);
    let mut out = fs::File::create(path)?;
    out.write_all(&buf)?;
    Ok(())
}

struct Reader {
    data: Vec<u8>,
    pos: usize,
}

impl Reader {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::Model("truncated model file".into()));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Result<Matrix> {
        let mut m = Array2::zeros((rows, cols));
        for i in 0..rows {
            for j in 0..cols {
                m[[i, j]] = self.f64()?;
            }
        }
        Ok(m)
    }
}

pub fn load_model<P: AsRef<Path>>(path: P) -> Result<Model> {
    let mut file = fs::File::open(path)?;
    let mut data = Vec::new();
    file.read_to_end(&mut data)?;
    let mut r = Reader { data, pos: 0 };

    if r.take(8)? != MAGIC {
        return Err(Error::Model("bad magic: not a model file".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Model(format!(
            "unsupported model format version {version}, expected {VERSION}"
        )));
    }
    let kind = ModelKind::from_byte(r.take(1)?[0])?;
    let m = r.u64()? as usize;
    let n = r.u64()? as usize;
    let t = r.u64()? as usize;
    let rank = r.u64()? as usize;
    if m == 0 || n == 0 || t == 0 || rank == 0 {
        return Err(Error::Model(format!(
            "inconsistent dimensions {m}x{n}x{t} rank {rank}"
        )));
    }

    let mut hp = Hyperparams {
        rank,
        ..Default::default()
    };
    hp.alpha = r.f64()?;
    hp.beta = r.f64()?;
    hp.lambda = r.f64()?;
    hp.mu = r.f64()?;
    hp.rho_init = r.f64()?;
    hp.rho_cap = r.f64()?;
    hp.tol = r.f64()?;
    hp.cg_tol = r.f64()?;
    hp.max_iter = r.u64()? as usize;
    hp.cg_max_iter = r.u64()? as usize;
    hp.seed = r.u64()?;

    let mode1 = r.matrix(m, rank)?;
    let mode2 = r.matrix(n, rank)?;
    let mode3 = r.matrix(t, rank)?;
    let m1 = r.matrix(rank, rank)?;
    let m2 = r.matrix(rank, rank)?;
    if r.pos != r.data.len() {
        return Err(Error::Model(format!(
            "{} trailing bytes after matrices",
            r.data.len() - r.pos
        )));
    }
    let factors = FactorSet::new_unbounded(mode1, mode2, mode3)
        .map_err(|e| Error::Model(format!("invalid factors: {e}")))?;
    Ok(Model {
        kind,
        factors,
        m1,
        m2,
        hyperparams: hp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn sample() -> (FactorSet, Matrix, Matrix, Hyperparams) {
        let fs = synth::factors((4, 3, 2), 2, 5);
        let m1 = Array2::from_shape_fn((2, 2), |(i, j)| (i + j) as f64 * 0.5);
        let m2 = Array2::from_shape_fn((2, 2), |(i, j)| (i * 2 + j) as f64 * 0.25);
        let hp = Hyperparams {
            rank: 2,
            seed: 99,
            ..Default::default()
        };
        (fs, m1, m2, hp)
    }

    #[test]
    fn round_trip_is_bitwise() {
        let (fs, m1, m2, hp) = sample();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_model(&fs, &m1, &m2, &hp, ModelKind::Tdrc, f.path()).unwrap();
        let model = load_model(f.path()).unwrap();
        assert_eq!(model.kind, ModelKind::Tdrc);
        assert_eq!(model.factors.mode1, fs.mode1);
        assert_eq!(model.factors.mode2, fs.mode2);
        assert_eq!(model.factors.mode3, fs.mode3);
        assert_eq!(model.m1, m1);
        assert_eq!(model.m2, m2);
        assert_eq!(model.hyperparams, hp);
    }

    #[test]
    fn corrupt_magic_rejected() {
        let (fs, m1, m2, hp) = sample();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_model(&fs, &m1, &m2, &hp, ModelKind::CpAls, f.path()).unwrap();
        let mut bytes = std::fs::read(f.path()).unwrap();
        bytes[0] = b'X';
        std::fs::write(f.path(), &bytes).unwrap();
        let err = load_model(f.path()).unwrap_err();
        assert!(err.to_string().contains("magic"), "{err}");
    }

    #[test]
    fn version_mismatch_rejected_with_message() {
        let (fs, m1, m2, hp) = sample();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_model(&fs, &m1, &m2, &hp, ModelKind::CpAls, f.path()).unwrap();
        let mut bytes = std::fs::read(f.path()).unwrap();
        bytes[8] = 9; // version field
        std::fs::write(f.path(), &bytes).unwrap();
        let err = load_model(f.path()).unwrap_err();
        assert!(err.to_string().contains("version 9"), "{err}");
    }

    #[test]
    fn truncated_file_rejected() {
        let (fs, m1, m2, hp) = sample();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_model(&fs, &m1, &m2, &hp, ModelKind::CpAls, f.path()).unwrap();
        let bytes = std::fs::read(f.path()).unwrap();
        std::fs::write(f.path(), &bytes[..bytes.len() - 9]).unwrap();
        let err = load_model(f.path()).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
    }

    #[test]
    fn trailing_garbage_rejected() {
        let (fs, m1, m2, hp) = sample();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_model(&fs, &m1, &m2, &hp, ModelKind::CpAls, f.path()).unwrap();
        let mut bytes = std::fs::read(f.path()).unwrap();
        bytes.extend_from_slice(&[0u8; 4]);
        std::fs::write(f.path(), &bytes).unwrap();
        assert!(load_model(f.path()).is_err());
    }
}
