//! Seeded generators for unitaries, states and Hermitian test matrices.
//!
//! Every generator draws from [`QRng`] (ChaCha20 seeded through
//! `seed_from_u64`), so a given seed reproduces across builds and platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::matrix::{ComplexMatrix, C64, MAX_TOTAL_DIMENSION};
use crate::error::{Error, Result};

pub type QRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> QRng {
    QRng::seed_from_u64(seed)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    if dim > MAX_TOTAL_DIMENSION {
        return Err(Error::SizeLimit {
            requested: dim,
            cap: MAX_TOTAL_DIMENSION,
        });
    }
    Ok(())
}

/// Standard complex Gaussian: real and imaginary parts each N(0, 1/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Orthonormalizes the columns of `m` (modified Gram-Schmidt, two passes).
///
/// The implied triangular factor has a positive real diagonal, which makes
/// the map from Ginibre matrices to unitaries Haar-distributed.
pub(crate) fn orthonormalize_columns(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut cols_v: Vec<Vec<C64>> = (0..cols)
        .map(|j| (0..rows).map(|i| m[(i, j)]).collect())
        .collect();
    for j in 0..cols {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: C64 = cols_v[k]
                    .iter()
                    .zip(&cols_v[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let (done, rest) = cols_v.split_at_mut(j);
                for (x, q) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= proj * q;
                }
            }
        }
        let norm = cols_v[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::Numeric("rank-deficient matrix in orthonormalization".into()));
        }
        for x in &mut cols_v[j] {
            *x /= norm;
        }
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| cols_v[j][i]))
}

/// Haar-random unitary from a dedicated seeded generator.
pub fn random_unitary(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    random_unitary_with(dim, &mut rng_from_seed(seed))
}

pub fn random_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    orthonormalize_columns(&ginibre(dim, dim, rng))
}

/// Haar-random isometry with `cols` orthonormal columns in dimension `rows`.
pub fn random_isometry_with<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_dim(rows)?;
    if cols == 0 || cols > rows {
        return Err(Error::Domain(format!("cannot fit {cols} orthonormal columns in dimension {rows}")));
    }
    orthonormalize_columns(&ginibre(rows, cols, rng))
}

pub fn random_pure_state(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    random_pure_state_with(dim, &mut rng_from_seed(seed))
}

/// Uniformly random unit column vector.
pub fn random_pure_state_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    loop {
        let v = ginibre(dim, 1, rng);
        let norm = v.frobenius_norm();
        if norm > 1e-150 {
            return Ok(v.scale_real(1.0 / norm));
        }
    }
}

/// Uniform point on the probability simplex with `n` vertices.
pub fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<ComplexMatrix> {
    random_density_with(dim, rank, &mut rng_from_seed(seed))
}

/// Mixture of `rank` random pure states with uniform-simplex weights.
pub fn random_density_with<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    if rank == 0 || rank > dim {
        return Err(Error::Domain(format!("rank {rank} not in 1..={dim}")));
    }
    let weights = random_simplex(rank, rng);
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for w in weights {
        let psi = random_pure_state_with(dim, rng)?;
        rho = &rho + &psi.outer_self().scale_real(w);
    }
    Ok(rho.hermitian_part())
}

/// Random Hermitian matrix `(G + G†)/2` with Ginibre `G`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(dim, dim, rng).hermitian_part()
}
