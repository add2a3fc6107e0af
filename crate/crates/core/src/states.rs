//! Density operators, pure states, ensembles, purifications and POVMs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::qmath::{
    entropy_of_spectrum, hermitian_eigensystem, hermitian_eigensystem_with, hermitian_eigenvalues,
    random::{ginibre, random_pure_state_with, random_simplex, random_unitary_with},
    ComplexMatrix, DimensionList, Eigensystem, Tolerances, C64,
};

const PURE_NORM_TOL: f64 = 1e-12;
const ENSEMBLE_SUM_TOL: f64 = 1e-9;
const POVM_SUM_TOL: f64 = 1e-9;

/// Hermitian, positive-semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dims: DimensionList,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dims = DimensionList::single(matrix.rows())?;
        Self::new_with(matrix, dims, &Tolerances::default())
    }

    pub fn with_dims(matrix: ComplexMatrix, dims: DimensionList) -> Result<Self> {
        Self::new_with(matrix, dims, &Tolerances::default())
    }

    /// Validates `matrix` against `tol` and stores its Hermitian part.
    pub fn new_with(matrix: ComplexMatrix, dims: DimensionList, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "density operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if dims.total() != matrix.rows() {
            return Err(Error::Dimension(format!(
                "dimensions {:?} do not match side {}",
                dims.dims(),
                matrix.rows()
            )));
        }
        let eig = hermitian_eigensystem_with(&matrix, tol)?;
        if eig.values[0] < -tol.psd {
            return Err(Error::Positivity {
                eigenvalue: eig.values[0],
            });
        }
        let deviation = (matrix.trace().re - 1.0).abs();
        if deviation > tol.trace {
            return Err(Error::Normalization { deviation });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
            dims,
        })
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            matrix: psi.vector.outer_self(),
            dims: psi.dims.clone(),
        }
    }

    /// `|i⟩⟨i|` in dimension `dim`.
    pub fn basis_state(dim: usize, i: usize) -> Result<Self> {
        Ok(Self::from_pure(&PureState::basis(dim, i)?))
    }

    /// Wraps a matrix produced by a trace-preserving map without re-validating.
    pub(crate) fn from_trusted(matrix: ComplexMatrix, dims: DimensionList) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
            dims,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &DimensionList {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn eigensystem(&self) -> Result<Eigensystem> {
        hermitian_eigensystem(&self.matrix)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> Result<f64> {
        let values = hermitian_eigenvalues(&self.matrix)?;
        let s = entropy_of_spectrum(&values, Tolerances::default().eig_floor);
        Ok(s.min((self.dim() as f64).log2()))
    }

    pub fn largest_eigenvalue(&self) -> Result<f64> {
        Ok(*hermitian_eigenvalues(&self.matrix)?.last().expect("non-empty spectrum"))
    }

    /// Number of eigenvalues above `eig_floor`.
    pub fn rank(&self) -> Result<usize> {
        let floor = Tolerances::default().eig_floor;
        Ok(hermitian_eigenvalues(&self.matrix)?
            .iter()
            .filter(|&&x| x > floor)
            .count())
    }

    /// Half the trace norm of the difference.
    pub fn trace_distance(&self, other: &DensityOperator) -> Result<f64> {
        let diff = self.matrix.try_sub(&other.matrix)?;
        Ok(0.5 * hermitian_eigenvalues(&diff)?.iter().map(|x| x.abs()).sum::<f64>())
    }
}

/// Unit vector with subsystem labels.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    vector: ComplexMatrix,
    dims: DimensionList,
}

impl PureState {
    pub fn new(vector: ComplexMatrix) -> Result<Self> {
        let dims = DimensionList::single(vector.rows())?;
        Self::with_dims(vector, dims)
    }

    pub fn with_dims(vector: ComplexMatrix, dims: DimensionList) -> Result<Self> {
        if vector.cols() != 1 {
            return Err(Error::Shape(format!(
                "pure state must be a column vector, got {}x{}",
                vector.rows(),
                vector.cols()
            )));
        }
        if dims.total() != vector.rows() {
            return Err(Error::Dimension(format!(
                "dimensions {:?} do not match vector length {}",
                dims.dims(),
                vector.rows()
            )));
        }
        let deviation = (vector.frobenius_norm() - 1.0).abs();
        if deviation > PURE_NORM_TOL {
            return Err(Error::Normalization { deviation });
        }
        Ok(Self { vector, dims })
    }

    /// Normalizes `vector` first.
    pub fn normalized(vector: ComplexMatrix) -> Result<Self> {
        let norm = vector.frobenius_norm();
        if norm < 1e-150 {
            return Err(Error::Normalization { deviation: 1.0 });
        }
        Self::new(vector.scale_real(1.0 / norm))
    }

    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::Domain(format!("basis index {i} out of range for dimension {dim}")));
        }
        Self::new(ComplexMatrix::basis_vector(dim, i))
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(ComplexMatrix::column(&[C64::new(h, 0.0), C64::new(h, 0.0)])).expect("unit vector")
    }

    /// `(|0⟩ − |1⟩)/√2`.
    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(ComplexMatrix::column(&[C64::new(h, 0.0), C64::new(-h, 0.0)])).expect("unit vector")
    }

    pub fn vector(&self) -> &ComplexMatrix {
        &self.vector
    }

    pub fn dims(&self) -> &DimensionList {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.vector.rows()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }
}

/// One member of an ensemble.
#[derive(Clone, Debug, PartialEq)]
pub enum Signal {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl Signal {
    pub fn dim(&self) -> usize {
        match self {
            Signal::Pure(p) => p.dim(),
            Signal::Mixed(d) => d.dim(),
        }
    }

    pub fn density(&self) -> DensityOperator {
        match self {
            Signal::Pure(p) => p.density(),
            Signal::Mixed(d) => d.clone(),
        }
    }

    /// Given as a vector, or a density operator whose largest eigenvalue is at least `1 − 1e-9`.
    pub fn is_pure(&self) -> Result<bool> {
        match self {
            Signal::Pure(_) => Ok(true),
            Signal::Mixed(d) => Ok(d.largest_eigenvalue()? >= 1.0 - 1e-9),
        }
    }
}

impl From<PureState> for Signal {
    fn from(p: PureState) -> Self {
        Signal::Pure(p)
    }
}

impl From<DensityOperator> for Signal {
    fn from(d: DensityOperator) -> Self {
        Signal::Mixed(d)
    }
}

/// Signal states with prior probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    probs: Vec<f64>,
    signals: Vec<Signal>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, signals: Vec<Signal>) -> Result<Self> {
        if probs.is_empty() || probs.len() != signals.len() {
            return Err(Error::Dimension(format!(
                "ensemble needs matching non-empty lists, got {} probabilities and {} states",
                probs.len(),
                signals.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::Domain(format!("invalid probability {p}")));
        }
        let deviation = (probs.iter().sum::<f64>() - 1.0).abs();
        if deviation > ENSEMBLE_SUM_TOL {
            return Err(Error::Normalization { deviation });
        }
        let dim = signals[0].dim();
        if let Some((k, s)) = signals.iter().enumerate().find(|(_, s)| s.dim() != dim) {
            return Err(Error::Dimension(format!(
                "ensemble member {k} has dimension {}, expected {dim}",
                s.dim()
            )));
        }
        Ok(Self { probs, signals })
    }

    pub fn pure(probs: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        Self::new(probs, states.into_iter().map(Signal::Pure).collect())
    }

    pub fn mixed(probs: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        Self::new(probs, states.into_iter().map(Signal::Mixed).collect())
    }

    /// Equal-weight computational-basis ensemble `{(1/d, |k⟩)}`.
    pub fn computational_basis(dim: usize) -> Result<Self> {
        let states = (0..dim).map(|k| PureState::basis(dim, k)).collect::<Result<Vec<_>>>()?;
        Self::pure(vec![1.0 / dim as f64; dim], states)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.signals[0].dim()
    }

    pub fn densities(&self) -> Vec<DensityOperator> {
        self.signals.iter().map(Signal::density).collect()
    }

    /// Concatenation weighted by `(q, 1 − q)`.
    pub fn mix(&self, other: &Ensemble, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Domain(format!("mixing weight {q} outside [0, 1]")));
        }
        let probs = self
            .probs
            .iter()
            .map(|p| q * p)
            .chain(other.probs.iter().map(|p| (1.0 - q) * p))
            .collect();
        let signals = self.signals.iter().chain(&other.signals).cloned().collect();
        Self::new(probs, signals)
    }
}

/// Positive effects summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new_with(effects, &Tolerances::default())
    }

    pub fn new_with(effects: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        let Some(first) = effects.first() else {
            return Err(Error::Dimension("POVM needs at least one effect".into()));
        };
        let d = first.rows();
        let mut total = ComplexMatrix::zeros(d, d);
        for (j, e) in effects.iter().enumerate() {
            if e.rows() != d || e.cols() != d {
                return Err(Error::Dimension(format!(
                    "effect {j} is {}x{}, expected {d}x{d}",
                    e.rows(),
                    e.cols()
                )));
            }
            let lowest = hermitian_eigensystem_with(e, tol)?.values[0];
            if lowest < -tol.psd {
                return Err(Error::Positivity { eigenvalue: lowest });
            }
            total = &total + e;
        }
        let residual = total.max_abs_diff(&ComplexMatrix::identity(d));
        if residual > POVM_SUM_TOL {
            return Err(Error::Domain(format!("POVM effects sum to identity only within {residual:e}")));
        }
        Ok(Self {
            effects: effects.iter().map(ComplexMatrix::hermitian_part).collect(),
        })
    }

    pub fn computational_basis(dim: usize) -> Result<Self> {
        Self::new(
            (0..dim)
                .map(|k| ComplexMatrix::basis_vector(dim, k).outer_self())
                .collect(),
        )
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn projective(basis: &ComplexMatrix) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::Shape("measurement basis must be square".into()));
        }
        Self::new(
            (0..basis.cols())
                .map(|j| basis.column_vector(j).outer_self())
                .collect(),
        )
    }

    /// Qubit measurement in the `{|+⟩, |−⟩}` basis.
    pub fn x_basis() -> Self {
        Self::new(vec![
            PureState::plus().density().matrix().clone(),
            PureState::minus().density().matrix().clone(),
        ])
        .expect("X-basis projectors form a POVM")
    }

    /// Random `outcomes`-element POVM: `E_j = S^{-1/2} G_j S^{-1/2}` with `S = Σ G_j`.
    pub fn random<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Result<Self> {
        if outcomes == 0 {
            return Err(Error::Domain("POVM needs at least one outcome".into()));
        }
        let grams: Vec<ComplexMatrix> = (0..outcomes)
            .map(|_| {
                let a = ginibre(dim, dim, rng);
                &a * &a.adjoint()
            })
            .collect();
        let mut total = ComplexMatrix::zeros(dim, dim);
        for g in &grams {
            total = &total + g;
        }
        let inv_sqrt = hermitian_eigensystem(&total)?.reconstruct_with(|x| 1.0 / x.sqrt());
        Self::new(
            grams
                .iter()
                .map(|g| (&(&inv_sqrt * g) * &inv_sqrt).hermitian_part())
                .collect(),
        )
    }

    /// Random projective measurement in a Haar-random basis.
    pub fn random_projective<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        Self::projective(&random_unitary_with(dim, rng)?)
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

/// `Σ_k p_k ρ_k`.
pub fn average_state(e: &Ensemble) -> Result<DensityOperator> {
    let d = e.dim();
    let mut avg = ComplexMatrix::zeros(d, d);
    for (p, s) in e.probs.iter().zip(&e.signals) {
        let rho = s.density();
        avg = avg.try_add(&rho.matrix().scale_real(*p))?;
    }
    // Renormalize away the ≤1e-9 slack allowed in the weights.
    let total: f64 = e.probs.iter().sum();
    DensityOperator::with_dims(avg.scale_real(1.0 / total), e.signals[0].density().dims().clone())
}

/// Canonical purification `Σ_i √λ_i |i⟩_R ⊗ |v_i⟩_Q` with the reference sized to the rank.
pub fn purify(rho: &DensityOperator) -> Result<PureState> {
    let eig = rho.eigensystem()?;
    let floor = Tolerances::default().eig_floor;
    let d = rho.dim();
    // Descending eigenvalue order.
    let kept: Vec<usize> = (0..d).rev().filter(|&k| eig.values[k] > floor).collect();
    let r = kept.len();
    let mut psi = vec![C64::new(0.0, 0.0); r * d];
    for (i, &k) in kept.iter().enumerate() {
        let v = canonical_phase(&eig.vector(k));
        let amp = eig.values[k].sqrt();
        for q in 0..d {
            psi[i * d + q] = v[(q, 0)] * amp;
        }
    }
    let vector = ComplexMatrix::from_row_major(r * d, 1, psi)?;
    // Dropped sub-floor eigenvalues leave a norm deficit of at most r·eig_floor.
    let norm = vector.frobenius_norm();
    PureState::with_dims(vector.scale_real(1.0 / norm), DimensionList::new(vec![r, d])?)
}

/// Rotates `v` so its first component with modulus above 1e-12 is real positive.
fn canonical_phase(v: &ComplexMatrix) -> ComplexMatrix {
    match v.as_slice().iter().find(|z| z.norm() > 1e-12) {
        Some(z) => v.scale(z.conj() / z.norm()),
        None => v.clone(),
    }
}

/// Born-rule outcome probabilities `Tr(E_j ρ)`, clipped at zero and renormalized.
pub fn measurement_distribution(rho: &DensityOperator, m: &Povm) -> Result<Vec<f64>> {
    if rho.dim() != m.dim() {
        return Err(Error::Dimension(format!(
            "state dimension {} does not match POVM dimension {}",
            rho.dim(),
            m.dim()
        )));
    }
    let a = rho.matrix();
    let raw: Vec<f64> = m
        .effects()
        .iter()
        .map(|e| {
            // Tr(E ρ) = Σ_ij E_ij ρ_ji
            let mut t = C64::new(0.0, 0.0);
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    t += e[(i, j)] * a[(j, i)];
                }
            }
            t.re.max(0.0)
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numeric("measurement probabilities vanish".into()));
    }
    Ok(raw.into_iter().map(|p| p / total).collect())
}

/// Ensemble of eigenprojectors weighted by eigenvalues (those above `eig_floor`).
pub fn eigendecomposition_ensemble(rho: &DensityOperator) -> Result<Ensemble> {
    let eig = rho.eigensystem()?;
    let floor = Tolerances::default().eig_floor;
    let kept: Vec<usize> = (0..rho.dim()).rev().filter(|&k| eig.values[k] > floor).collect();
    let total: f64 = kept.iter().map(|&k| eig.values[k]).sum();
    let probs = kept.iter().map(|&k| eig.values[k] / total).collect();
    let states = kept
        .iter()
        .map(|&k| PureState::normalized(eig.vector(k)))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::pure(probs, states)
}

/// Random ensemble of `n` Haar-random pure states with uniform-simplex weights.
pub fn random_pure_ensemble<R: Rng + ?Sized>(dim: usize, n: usize, rng: &mut R) -> Result<Ensemble> {
    if n == 0 {
        return Err(Error::Domain("ensemble needs at least one member".into()));
    }
    let probs = random_simplex(n, rng);
    let states = (0..n)
        .map(|_| PureState::new(random_pure_state_with(dim, rng)?))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::pure(probs, states)
}

/// Pure-state ensemble with average `rho`, obtained by measuring the reference
/// of [`purify`]`(rho)` along the rows of `w`.
///
/// `w` is an `n × r` isometry (`w†w = I`) with `r = rank(rho)`; member `k` is
/// `(⟨w_k| ⊗ I)|ψ⟩` normalized. Members with vanishing weight are dropped.
pub fn steered_ensemble(rho: &DensityOperator, w: &ComplexMatrix) -> Result<Ensemble> {
    let psi = purify(rho)?;
    let (r, d) = (psi.dims().dims()[0], psi.dims().dims()[1]);
    if w.cols() != r {
        return Err(Error::Dimension(format!(
            "steering isometry has {} columns, purification reference has dimension {r}",
            w.cols()
        )));
    }
    let defect = (&w.adjoint() * w).max_abs_diff(&ComplexMatrix::identity(r));
    if defect > 1e-10 {
        return Err(Error::Domain(format!("steering matrix is not an isometry (defect {defect:e})")));
    }
    let amps = psi.vector().as_slice();
    let mut probs = Vec::new();
    let mut states = Vec::new();
    for k in 0..w.rows() {
        let branch = ComplexMatrix::from_fn(d, 1, |q, _| (0..r).map(|i| w[(k, i)] * amps[i * d + q]).sum());
        let weight = branch.frobenius_norm().powi(2);
        if weight > 1e-14 {
            probs.push(weight);
            states.push(PureState::normalized(branch)?);
        }
    }
    let total: f64 = probs.iter().sum();
    Ensemble::pure(probs.into_iter().map(|p| p / total).collect(), states)
}


#[cfg(test)]
mod property_tests {
    use proptest::prelude::*;

    use super::*;
    use crate::qmath::{partial_trace, random_density_with, rng_from_seed};

    proptest! {
        #[test]
        fn average_state_is_linear(dim in 1usize..4, n1 in 1usize..4, n2 in 1usize..4, q in 0.0f64..=1.0, seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let e1 = random_pure_ensemble(dim, n1, &mut rng).unwrap();
            let e2 = random_pure_ensemble(dim, n2, &mut rng).unwrap();
            let mixed = average_state(&e1.mix(&e2, q).unwrap()).unwrap();
            let a1 = average_state(&e1).unwrap();
            let a2 = average_state(&e2).unwrap();
            let expected = &a1.matrix().scale_real(q) + &a2.matrix().scale_real(1.0 - q);
            prop_assert!(mixed.matrix().max_abs_diff(&expected) < 1e-12);
        }

        #[test]
        fn measurement_distribution_is_a_distribution(dim in 1usize..5, outcomes in 1usize..6, seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let rank = 1 + (seed as usize) % dim;
            let rho = DensityOperator::new(random_density_with(dim, rank, &mut rng).unwrap()).unwrap();
            let m = Povm::random(dim, outcomes, &mut rng).unwrap();
            let p = measurement_distribution(&rho, &m).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(p.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn purify_round_trip_on_random_densities() {
        let mut rng = rng_from_seed(2024);
        for case in 0..100 {
            let dim = 2 + case % 3;
            let rank = 1 + (case / 3) % dim;
            let rho = DensityOperator::new(random_density_with(dim, rank, &mut rng).unwrap()).unwrap();
            let psi = purify(&rho).unwrap();
            let reduced = partial_trace(&psi.vector().outer_self(), psi.dims(), &[1]).unwrap();
            assert!(reduced.max_abs_diff(rho.matrix()) < 1e-10, "case {case}");
        }
    }
}
