//! Dense 3-way tensor and the multilinear primitives the solvers consume:
//! mode-n unfolding, Khatri-Rao product, CP reconstruction and Frobenius
//! norms.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * storage is a flat array with `(i, j, k) -> i + m*j + m*n*k`;
//! * the mode-n unfolding puts the mode-n index on rows and enumerates the
//!   remaining two indices on columns with the lower-numbered mode varying
//!   fastest;
//! * `khatri_rao(a, b)` stacks columnwise Kronecker products with the
//!   *second* argument's index varying fastest, so the pairings
//!   `X1 = U1 * khatri_rao(U3, U2)^T`, `X2 = U2 * khatri_rao(U3, U1)^T`,
//!   `X3 = U3 * khatri_rao(U2, U1)^T` all hold exactly.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use ndarray::Array2;
use rand::Rng;

/// Unfolding mode of a 3-way tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    One,
    Two,
    Three,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::One, Mode::Two, Mode::Three];
}

/// Dense real 3-way tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dims: (usize, usize, usize),
    values: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dims: (usize, usize, usize)) -> Self {
        Tensor3 {
            dims,
            values: vec![0.0; dims.0 * dims.1 * dims.2],
        }
    }

    /// Build from a flat value array laid out as `(i, j, k) -> i + m*j + m*n*k`.
    pub fn from_vec(dims: (usize, usize, usize), values: Vec<f64>) -> Result<Self> {
        if values.len() != dims.0 * dims.1 * dims.2 {
            return Err(Error::Dimension(format!(
                "expected {} values for a {}x{}x{} tensor, got {}",
                dims.0 * dims.1 * dims.2,
                dims.0,
                dims.1,
                dims.2,
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParam("tensor values must be finite".into()));
        }
        Ok(Tensor3 { dims, values })
    }

    /// Binary tensor with ones at the given `(i, j, k)` cells.
    pub fn from_indices<I>(dims: (usize, usize, usize), cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize)>,
    {
        let mut t = Tensor3::zeros(dims);
        for (i, j, k) in cells {
            if i >= dims.0 || j >= dims.1 || k >= dims.2 {
                return Err(Error::Dimension(format!(
                    "cell ({i},{j},{k}) out of bounds for {}x{}x{}",
                    dims.0, dims.1, dims.2
                )));
            }
            t.set(i, j, k, 1.0);
        }
        Ok(t)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        let (m, n, _) = self.dims;
        i + m * j + m * n * k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.offset(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let o = self.offset(i, j, k);
        self.values[o] = v;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Mode-n unfolding. Mode 1 yields `m x (n*t)`, mode 2 `n x (m*t)`,
    /// mode 3 `t x (m*n)`; the column index runs over the two remaining
    /// modes with the lower-numbered one fastest.
    pub fn matricize(&self, mode: Mode) -> Matrix {
        let (m, n, t) = self.dims;
        match mode {
            Mode::One => {
                let mut out = Array2::zeros((m, n * t));
                for k in 0..t {
                    for j in 0..n {
                        for i in 0..m {
                            out[[i, j + n * k]] = self.get(i, j, k);
                        }
                    }
                }
                out
            }
            Mode::Two => {
                let mut out = Array2::zeros((n, m * t));
                for k in 0..t {
                    for j in 0..n {
                        for i in 0..m {
                            out[[j, i + m * k]] = self.get(i, j, k);
                        }
                    }
                }
                out
            }
            Mode::Three => {
                let mut out = Array2::zeros((t, m * n));
                for k in 0..t {
                    for j in 0..n {
                        for i in 0..m {
                            out[[k, i + m * j]] = self.get(i, j, k);
                        }
                    }
                }
                out
            }
        }
    }

    /// Inverse of [`Tensor3::matricize`] for the same mode and dims.
    pub fn refold(mat: &Matrix, mode: Mode, dims: (usize, usize, usize)) -> Result<Self> {
        let (m, n, t) = dims;
        let expected = match mode {
            Mode::One => (m, n * t),
            Mode::Two => (n, m * t),
            Mode::Three => (t, m * n),
        };
        if mat.dim() != expected {
            return Err(Error::Dimension(format!(
                "unfolding of a {m}x{n}x{t} tensor along that mode must be {}x{}, got {}x{}",
                expected.0,
                expected.1,
                mat.nrows(),
                mat.ncols()
            )));
        }
        let mut out = Tensor3::zeros(dims);
        for k in 0..t {
            for j in 0..n {
                for i in 0..m {
                    let v = match mode {
                        Mode::One => mat[[i, j + n * k]],
                        Mode::Two => mat[[j, i + m * k]],
                        Mode::Three => mat[[k, i + m * j]],
                    };
                    out.set(i, j, k, v);
                }
            }
        }
        Ok(out)
    }
}

/// Columnwise Kronecker (Khatri-Rao) product.
///
/// Column `l` of the result is `kron(a[:,l], b[:,l])`, with `b`'s row index
/// varying fastest: entry `(i*q + j, l) = a[i,l] * b[j,l]`.
pub fn khatri_rao(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.ncols() != b.ncols() {
        return Err(Error::Dimension(format!(
            "khatri-rao arguments must share column count, got {} and {}",
            a.ncols(),
            b.ncols()
        )));
    }
    let (p, q, r) = (a.nrows(), b.nrows(), a.ncols());
    let mut out = Array2::zeros((p * q, r));
    for l in 0..r {
        for i in 0..p {
            let ail = a[[i, l]];
            for j in 0..q {
                out[[i * q + j, l]] = ail * b[[j, l]];
            }
        }
    }
    Ok(out)
}

/// The three CP factor matrices, one per tensor mode, sharing rank `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSet {
    pub mode1: Matrix,
    pub mode2: Matrix,
    pub mode3: Matrix,
}

impl FactorSet {
    /// Validating constructor; enforces the default bound `r <= min(m, n)`.
    pub fn new(mode1: Matrix, mode2: Matrix, mode3: Matrix) -> Result<Self> {
        let fs = FactorSet::new_unbounded(mode1, mode2, mode3)?;
        let (m, n, _) = fs.dims();
        if fs.rank() > m.min(n) {
            return Err(Error::InvalidParam(format!(
                "rank {} exceeds min(m, n) = {}; use new_unbounded to override",
                fs.rank(),
                m.min(n)
            )));
        }
        Ok(fs)
    }

    /// Same checks as [`FactorSet::new`] minus the rank bound.
    pub fn new_unbounded(mode1: Matrix, mode2: Matrix, mode3: Matrix) -> Result<Self> {
        let r = mode1.ncols();
        if r == 0 {
            return Err(Error::InvalidParam("rank must be at least 1".into()));
        }
        if mode2.ncols() != r || mode3.ncols() != r {
            return Err(Error::Dimension(format!(
                "factor matrices must share column count, got {}, {}, {}",
                r,
                mode2.ncols(),
                mode3.ncols()
            )));
        }
        for m in [&mode1, &mode2, &mode3] {
            if !m.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidParam("factor values must be finite".into()));
            }
        }
        Ok(FactorSet {
            mode1,
            mode2,
            mode3,
        })
    }

    /// Factors drawn uniform `[0, 1)` from the given generator.
    pub fn random<R: Rng>(dims: (usize, usize, usize), r: usize, rng: &mut R) -> Self {
        let mut draw = |rows: usize| {
            Array2::from_shape_fn((rows, r), |_| rng.random::<f64>())
        };
        let mode1 = draw(dims.0);
        let mode2 = draw(dims.1);
        let mode3 = draw(dims.2);
        FactorSet {
            mode1,
            mode2,
            mode3,
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.mode1.nrows(), self.mode2.nrows(), self.mode3.nrows())
    }

    pub fn rank(&self) -> usize {
        self.mode1.ncols()
    }

    pub fn factor(&self, mode: Mode) -> &Matrix {
        match mode {
            Mode::One => &self.mode1,
            Mode::Two => &self.mode2,
            Mode::Three => &self.mode3,
        }
    }

    /// Khatri-Rao product paired with the given unfolding, i.e. the `G`
    /// with `matricize(x, mode) ~= factor(mode) * G^T`.
    pub fn paired_khatri_rao(&self, mode: Mode) -> Matrix {
        let (a, b) = match mode {
            Mode::One => (&self.mode3, &self.mode2),
            Mode::Two => (&self.mode3, &self.mode1),
            Mode::Three => (&self.mode2, &self.mode1),
        };
        khatri_rao(a, b).expect("factors share rank by construction")
    }

    /// Gram of [`FactorSet::paired_khatri_rao`] computed in `r x r` space:
    /// `(A^T A) .* (B^T B)` instead of the tall product.
    pub fn paired_gram(&self, mode: Mode) -> Matrix {
        let (a, b) = match mode {
            Mode::One => (&self.mode3, &self.mode2),
            Mode::Two => (&self.mode3, &self.mode1),
            Mode::Three => (&self.mode2, &self.mode1),
        };
        crate::linalg::hadamard(&crate::linalg::gram(a), &crate::linalg::gram(b))
    }

    /// Dense reconstruction with `(i,j,k) = sum_l u1[i,l] u2[j,l] u3[k,l]`.
    pub fn reconstruct(&self) -> Tensor3 {
        let (m, n, t) = self.dims();
        let r = self.rank();
        let mut out = Tensor3::zeros((m, n, t));
        for k in 0..t {
            for j in 0..n {
                for l in 0..r {
                    let w = self.mode2[[j, l]] * self.mode3[[k, l]];
                    if w == 0.0 {
                        continue;
                    }
                    for i in 0..m {
                        let o = i + m * j + m * n * k;
                        out.values[o] += self.mode1[[i, l]] * w;
                    }
                }
            }
        }
        out
    }
}

/// Unsquared Frobenius norm of `x - reconstruct(fs)`.
pub fn residual_norm(x: &Tensor3, fs: &FactorSet) -> Result<f64> {
    if x.dims() != fs.dims() {
        return Err(Error::Dimension(format!(
            "tensor dims {:?} do not match factor dims {:?}",
            x.dims(),
            fs.dims()
        )));
    }
    let approx = fs.reconstruct();
    let sum: f64 = x
        .values
        .iter()
        .zip(approx.values.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum.sqrt())
}
