use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::{ComplexMatrix, C64};
use super::Tolerances;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 10_000;

/// Eigenvalues in ascending order with eigenvectors as matching columns.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// Eigenvector for `values[i]` as a column.
    pub fn vector(&self, i: usize) -> ComplexMatrix {
        self.vectors.column_vector(i)
    }

    /// Rebuilds `Σ f(λ_i) v_i v_i†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    hermitian_eigensystem_with(m, &Tolerances::default())
}

/// Eigendecomposition of a Hermitian matrix; `m` is symmetrized before solving.
pub fn hermitian_eigensystem_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<Eigensystem> {
    if !m.is_square() {
        return Err(Error::Shape(format!("{}x{} matrix is not square", m.rows(), m.cols())));
    }
    let defect = m.hermiticity_defect();
    if defect > tol.herm {
        return Err(Error::Shape(format!("matrix is not Hermitian (defect {defect:e})")));
    }
    let n = m.rows();
    let h = m.hermitian_part();
    let dm = DMatrix::<C64>::from_row_slice(n, n, h.as_slice());
    let eig = SymmetricEigen::try_new(dm, f64::EPSILON, MAX_SWEEPS)
        .ok_or_else(|| Error::Numeric(format!("eigensolver did not converge for {n}x{n} matrix")))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("non-finite eigenvalue".into()));
    }
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Eigensystem { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigensystem(m)?.values)
}
