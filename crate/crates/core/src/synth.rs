//! Synthetic problem generators for experiments and benchmarks.

use crate::linalg::Matrix;
use crate::rng::{substream, Stream};
use crate::tensor::{FactorSet, Tensor3};
use rand::Rng;

/// Seeded random factors with entries uniform in `[0, 1)`.
pub fn factors(dims: (usize, usize, usize), r: usize, seed: u64) -> FactorSet {
    let mut rng = substream(seed, Stream::Init);
    FactorSet::random(dims, r, &mut rng)
}

/// Exactly low-rank tensor together with its generating factors.
pub fn low_rank_tensor(dims: (usize, usize, usize), r: usize, seed: u64) -> (Tensor3, FactorSet) {
    let fs = factors(dims, r, seed);
    (fs.reconstruct(), fs)
}

/// Similarity matrix induced by a factor matrix: the Gram matrix with
/// both sides normalized by its diagonal (cosine form), which makes it
/// symmetric with unit diagonal and, for nonnegative factors, valued in
/// `[0, 1]`.
pub fn similarity_from_factor(factor: &Matrix) -> Matrix {
    let g = factor.dot(&factor.t());
    let n = g.nrows();
    let mut out = g.clone();
    for i in 0..n {
        for j in 0..n {
            let d = (g[[i, i]] * g[[j, j]]).sqrt();
            out[[i, j]] = if d > 0.0 { (g[[i, j]] / d).min(1.0) } else { 0.0 };
        }
        out[[i, i]] = 1.0;
    }
    out
}

/// Sparse binary tensor with roughly `density * m * n * t` ones.
pub fn random_binary_tensor(dims: (usize, usize, usize), density: f64, seed: u64) -> Tensor3 {
    let mut rng = substream(seed, Stream::Init);
    let mut t = Tensor3::zeros(dims);
    for k in 0..dims.2 {
        for j in 0..dims.1 {
            for i in 0..dims.0 {
                if rng.random::<f64>() < density {
                    t.set(i, j, k, 1.0);
                }
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn similarity_from_factor_is_valid() {
        let fs = factors((10, 4, 3), 3, 8);
        let s = similarity_from_factor(&fs.mode1);
        for i in 0..10 {
            assert_eq!(s[[i, i]], 1.0);
            for j in 0..10 {
                assert!(s[[i, j]] >= 0.0 && s[[i, j]] <= 1.0);
                assert!((s[[i, j]] - s[[j, i]]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn binary_tensor_density_is_near_target() {
        let t = random_binary_tensor((30, 20, 5), 0.1, 4);
        let ones: f64 = t.values().iter().sum();
        let frac = ones / t.len() as f64;
        assert!((frac - 0.1).abs() < 0.03, "density {frac}");
    }
}
