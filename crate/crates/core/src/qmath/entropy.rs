use super::eigen::hermitian_eigensystem_with;
use super::matrix::ComplexMatrix;
use super::Tolerances;
use crate::error::{Error, Result};

/// `−Σ λ log₂ λ` over eigenvalues above the floor.
pub fn entropy_of_spectrum(values: &[f64], eig_floor: f64) -> f64 {
    let s: f64 = values
        .iter()
        .filter(|&&x| x > eig_floor)
        .map(|&x| -x * x.log2())
        .sum();
    // -0.0 for pure states
    s.max(0.0)
}

pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    von_neumann_entropy_with(rho, &Tolerances::default())
}

/// Von Neumann entropy in bits, validating positivity and normalization.
pub fn von_neumann_entropy_with(rho: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    let deviation = (rho.trace().re - 1.0).abs();
    if deviation > tol.trace {
        return Err(Error::Normalization { deviation });
    }
    let eig = hermitian_eigensystem_with(rho, tol)?;
    if let Some(&lowest) = eig.values.first() {
        if lowest < -tol.psd {
            return Err(Error::Positivity { eigenvalue: lowest });
        }
    }
    let s = entropy_of_spectrum(&eig.values, tol.eig_floor);
    Ok(s.min((rho.rows() as f64).log2()))
}

/// Binary entropy `h(p)` in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) || p.is_nan() {
        return Err(Error::Domain(format!("binary entropy argument {p} outside [0, 1]")));
    }
    let p = p.clamp(0.0, 1.0);
    Ok(shannon_entropy(&[p, 1.0 - p]))
}

/// Shannon entropy in bits of a probability vector, with `0 log 0 = 0`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}
