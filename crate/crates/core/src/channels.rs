//! Quantum channels in Kraus form, their Stinespring isometry and the
//! complementary (environment) channel.
//!
//! The isometry is the canonical `V = Σ_k K_k ⊗ |k⟩_E`, so the environment
//! dimension equals the Kraus count and the environment starts in `|0⟩`.
//! Joint output states are ordered `Q' ⊗ E'`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::qmath::{
    hermitian_eigensystem, hermitian_eigenvalues, partial_trace, random_isometry_with, ComplexMatrix, DimensionList,
    Tolerances, C64, MAX_TOTAL_DIMENSION,
};
use crate::states::DensityOperator;

/// Max-norm below which a Kraus operator is dropped.
pub const KRAUS_TRIM_THRESHOLD: f64 = 1e-12;
const TP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<ComplexMatrix>,
    dim_in: usize,
    dim_out: usize,
    name: Option<String>,
}

impl QuantumChannel {
    /// Validates a Kraus list: uniform shapes, trace preservation and complete positivity.
    ///
    /// Operators with max-norm below [`KRAUS_TRIM_THRESHOLD`] are dropped. Lists
    /// longer than `dim_in·dim_out` are replaced by an orthogonal Kraus set for
    /// the same map.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::Dimension("channel needs at least one Kraus operator".into()));
        };
        let (dim_out, dim_in) = (first.rows(), first.cols());
        DimensionList::new(vec![dim_in])?;
        DimensionList::new(vec![dim_out])?;
        if let Some((k, op)) = kraus
            .iter()
            .enumerate()
            .find(|(_, op)| op.rows() != dim_out || op.cols() != dim_in)
        {
            return Err(Error::Dimension(format!(
                "Kraus operator {k} is {}x{}, expected {dim_out}x{dim_in}",
                op.rows(),
                op.cols()
            )));
        }

        let mut kraus: Vec<ComplexMatrix> = kraus
            .into_iter()
            .filter(|op| op.max_norm() >= KRAUS_TRIM_THRESHOLD)
            .collect();
        if kraus.is_empty() {
            return Err(Error::NotTracePreserving { residual: 1.0 });
        }

        let residual = tp_residual(&kraus, dim_in);
        if residual > TP_TOL {
            return Err(Error::NotTracePreserving { residual });
        }

        if kraus.len() > dim_in * dim_out {
            kraus = orthogonal_kraus(&kraus, dim_in)?;
        }

        let ch = Self {
            kraus,
            dim_in,
            dim_out,
            name: None,
        };
        let lowest = hermitian_eigenvalues(&choi_matrix(&ch))?[0];
        if lowest < -Tolerances::default().psd {
            return Err(Error::NotCompletelyPositive { eigenvalue: lowest });
        }
        Ok(ch)
    }

    pub fn named(kraus: Vec<ComplexMatrix>, name: impl Into<String>) -> Result<Self> {
        Ok(Self::new(kraus)?.with_name(name))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Environment dimension of the canonical dilation.
    pub fn dim_env(&self) -> usize {
        self.kraus.len()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// `‖Σ K†K − I‖_max`.
    pub fn trace_preservation_residual(&self) -> f64 {
        tp_residual(&self.kraus, self.dim_in)
    }

    fn check_input(&self, rho: &DensityOperator) -> Result<()> {
        if rho.dim() != self.dim_in {
            return Err(Error::Dimension(format!(
                "input dimension {} does not match channel input {}",
                rho.dim(),
                self.dim_in
            )));
        }
        Ok(())
    }
}

impl fmt::Display for QuantumChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} -> {}, {} Kraus)",
            self.name.as_deref().unwrap_or("channel"),
            self.dim_in,
            self.dim_out,
            self.kraus.len()
        )
    }
}

fn tp_residual(kraus: &[ComplexMatrix], dim_in: usize) -> f64 {
    let mut total = ComplexMatrix::zeros(dim_in, dim_in);
    for k in kraus {
        total = &total + &(&k.adjoint() * k);
    }
    total.max_abs_diff(&ComplexMatrix::identity(dim_in))
}

/// Remixes `kraus` into mutually Hilbert-Schmidt-orthogonal operators, dropping null ones.
fn orthogonal_kraus(kraus: &[ComplexMatrix], dim_in: usize) -> Result<Vec<ComplexMatrix>> {
    let n = kraus.len();
    let gram = ComplexMatrix::from_fn(n, n, |j, k| kraus[j].inner(&kraus[k]));
    let eig = hermitian_eigensystem(&gram)?;
    let cutoff = 1e-14 * dim_in as f64;
    let mut out = Vec::new();
    for i in (0..n).rev() {
        if eig.values[i] <= cutoff {
            continue;
        }
        let mut op = ComplexMatrix::zeros(kraus[0].rows(), kraus[0].cols());
        for (k, kr) in kraus.iter().enumerate() {
            op = &op + &kr.scale(eig.vectors[(k, i)]);
        }
        out.push(op);
    }
    Ok(out)
}

/// Validating constructor for a Kraus list.
pub fn make_channel(kraus: Vec<ComplexMatrix>) -> Result<QuantumChannel> {
    QuantumChannel::new(kraus)
}

/// `Σ_k K_k ρ K_k†`.
pub fn apply(ch: &QuantumChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    ch.check_input(rho)?;
    let mut out = ComplexMatrix::zeros(ch.dim_out, ch.dim_out);
    for k in &ch.kraus {
        out = &out + &(&(k * rho.matrix()) * &k.adjoint());
    }
    Ok(DensityOperator::from_trusted(out, DimensionList::single(ch.dim_out)?))
}

/// Isometry `V: Q → Q' ⊗ E` with `V†V = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct StinespringIsometry {
    matrix: ComplexMatrix,
    dim_out: usize,
    dim_env: usize,
}

impl StinespringIsometry {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim_env(&self) -> usize {
        self.dim_env
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// `‖V†V − I‖_max`.
    pub fn isometry_residual(&self) -> f64 {
        let gram = &self.matrix.adjoint() * &self.matrix;
        gram.max_abs_diff(&ComplexMatrix::identity(self.matrix.cols()))
    }

    /// Output dimensions `[dim_out, dim_env]`.
    pub fn joint_dims(&self) -> DimensionList {
        DimensionList::new(vec![self.dim_out, self.dim_env]).expect("validated channel dimensions")
    }
}

/// Canonical dilation `V = Σ_k K_k ⊗ |k⟩_E`.
pub fn stinespring(ch: &QuantumChannel) -> StinespringIsometry {
    let dim_env = ch.dim_env();
    let matrix = ComplexMatrix::from_fn(ch.dim_out * dim_env, ch.dim_in, |row, col| {
        ch.kraus[row % dim_env][(row / dim_env, col)]
    });
    StinespringIsometry {
        matrix,
        dim_out: ch.dim_out,
        dim_env,
    }
}

/// `VρV†` on `Q' ⊗ E'`.
pub fn joint_output(ch: &QuantumChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    ch.check_input(rho)?;
    let v = stinespring(ch);
    let joint = &(v.matrix() * rho.matrix()) * &v.matrix().adjoint();
    Ok(DensityOperator::from_trusted(joint, v.joint_dims()))
}

/// Environment output `Tr_{Q'}(VρV†)`.
pub fn complementary_apply(ch: &QuantumChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    let joint = joint_output(ch, rho)?;
    let env = partial_trace(joint.matrix(), joint.dims(), &[1])?;
    Ok(DensityOperator::from_trusted(env, DimensionList::single(ch.dim_env())?))
}

/// Environment output from the closed form `W[j,k] = Tr(K_j ρ K_k†)`.
pub fn complementary_closed_form(ch: &QuantumChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    ch.check_input(rho)?;
    let n = ch.dim_env();
    let k_rho: Vec<ComplexMatrix> = ch.kraus.iter().map(|k| k * rho.matrix()).collect();
    // Tr(A B†) = Σ A_ab conj(B_ab)
    let w = ComplexMatrix::from_fn(n, n, |j, k| ch.kraus[k].inner(&k_rho[j]));
    Ok(DensityOperator::from_trusted(w, DimensionList::single(n)?))
}

/// Choi matrix `Σ_ij |i⟩⟨j| ⊗ 𝓔(|i⟩⟨j|)`, ordered reference ⊗ output.
pub fn choi_matrix(ch: &QuantumChannel) -> ComplexMatrix {
    let n = ch.dim_in * ch.dim_out;
    let mut choi = ComplexMatrix::zeros(n, n);
    for k in &ch.kraus {
        let w = ComplexMatrix::from_fn(n, 1, |r, _| k[(r % ch.dim_out, r / ch.dim_out)]);
        choi = &choi + &w.outer_self();
    }
    choi
}

/// `K'_j = Σ_k u[j,k] K_k` for a unitary `u` on the Kraus index.
pub fn remix_kraus(ch: &QuantumChannel, u: &ComplexMatrix) -> Result<QuantumChannel> {
    let n = ch.dim_env();
    if u.rows() != n || u.cols() != n {
        return Err(Error::Domain(format!(
            "remixing matrix is {}x{}, expected {n}x{n}",
            u.rows(),
            u.cols()
        )));
    }
    let defect = (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(n));
    if defect > 1e-10 {
        return Err(Error::Domain(format!("remixing matrix is not unitary (defect {defect:e})")));
    }
    let kraus = (0..n)
        .map(|j| {
            let mut op = ComplexMatrix::zeros(ch.dim_out, ch.dim_in);
            for (k, kr) in ch.kraus.iter().enumerate() {
                op = &op + &kr.scale(u[(j, k)]);
            }
            op
        })
        .collect();
    let out = QuantumChannel::new(kraus)?;
    Ok(match &ch.name {
        Some(name) => out.with_name(name.clone()),
        None => out,
    })
}

/// View of a channel whose environment is factored as `D ⊗ rest`.
#[derive(Clone, Debug)]
pub struct EnvironmentSplit {
    channel: QuantumChannel,
    d_dim: usize,
    rest_dim: usize,
}

impl EnvironmentSplit {
    /// The zero-padded channel; its environment has dimension `d_dim · rest_dim`.
    pub fn channel(&self) -> &QuantumChannel {
        &self.channel
    }

    pub fn d_dim(&self) -> usize {
        self.d_dim
    }

    pub fn rest_dim(&self) -> usize {
        self.rest_dim
    }

    pub fn env_dims(&self) -> DimensionList {
        DimensionList::new(vec![self.d_dim, self.rest_dim]).expect("validated split")
    }

    /// State of the `D` factor of the environment.
    pub fn subsystem_output(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let env = complementary_apply(&self.channel, rho)?;
        let reduced = partial_trace(env.matrix(), &self.env_dims(), &[0])?;
        Ok(DensityOperator::from_trusted(reduced, DimensionList::single(self.d_dim)?))
    }
}

/// Pads the environment with null Kraus operators to a multiple of `d_dim` and factors it as `D ⊗ rest`.
pub fn split_environment(ch: &QuantumChannel, d_dim: usize) -> Result<EnvironmentSplit> {
    if d_dim == 0 {
        return Err(Error::Domain("subsystem dimension must be at least 1".into()));
    }
    let padded = ch.dim_env().div_ceil(d_dim) * d_dim;
    if padded > MAX_TOTAL_DIMENSION {
        return Err(Error::SizeLimit {
            requested: padded,
            cap: MAX_TOTAL_DIMENSION,
        });
    }
    let mut kraus = ch.kraus.clone();
    kraus.resize(padded, ComplexMatrix::zeros(ch.dim_out, ch.dim_in));
    Ok(EnvironmentSplit {
        channel: QuantumChannel {
            kraus,
            dim_in: ch.dim_in,
            dim_out: ch.dim_out,
            name: ch.name.clone(),
        },
        d_dim,
        rest_dim: padded / d_dim,
    })
}

/// Random channel from a Haar isometry `Q → Q' ⊗ E` cut into `n_kraus` blocks.
pub fn random_channel<R: Rng + ?Sized>(dim_in: usize, dim_out: usize, n_kraus: usize, rng: &mut R) -> Result<QuantumChannel> {
    if n_kraus == 0 || dim_out * n_kraus < dim_in {
        return Err(Error::Domain(format!(
            "{n_kraus} Kraus operators cannot form a {dim_in} -> {dim_out} channel"
        )));
    }
    let v = random_isometry_with(dim_out * n_kraus, dim_in, rng)?;
    let kraus = (0..n_kraus)
        .map(|k| ComplexMatrix::from_fn(dim_out, dim_in, |a, b| v[(a * n_kraus + k, b)]))
        .collect();
    Ok(QuantumChannel::new(kraus)?.with_name("random"))
}

fn check_param(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("{name} parameter {p} outside [0, 1]")));
    }
    Ok(())
}

fn pauli(which: char) -> ComplexMatrix {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    let rows = match which {
        'X' => [[z, o], [o, z]],
        'Y' => [[z, -i], [i, z]],
        'Z' => [[o, z], [z, -o]],
        _ => [[o, z], [z, o]],
    };
    ComplexMatrix::from_fn(2, 2, |r, c| rows[r][c])
}

pub fn identity(dim: usize) -> Result<QuantumChannel> {
    if dim == 0 {
        return Err(Error::Domain("identity channel needs dimension ≥ 1".into()));
    }
    QuantumChannel::named(vec![ComplexMatrix::identity(dim)], "identity")
}

/// Qubit depolarizing channel `ρ ↦ (1 − p)ρ + p I/2`.
pub fn depolarizing(p: f64) -> Result<QuantumChannel> {
    check_param("depolarizing", p)?;
    let a = (1.0 - 0.75 * p).sqrt();
    let b = (p / 4.0).sqrt();
    QuantumChannel::named(
        vec![
            pauli('I').scale_real(a),
            pauli('X').scale_real(b),
            pauli('Y').scale_real(b),
            pauli('Z').scale_real(b),
        ],
        "depolarizing",
    )
}

/// Phase flip with probability `p`.
pub fn dephasing(p: f64) -> Result<QuantumChannel> {
    check_param("dephasing", p)?;
    QuantumChannel::named(
        vec![pauli('I').scale_real((1.0 - p).sqrt()), pauli('Z').scale_real(p.sqrt())],
        "dephasing",
    )
}

pub fn amplitude_damping(gamma: f64) -> Result<QuantumChannel> {
    check_param("amplitude damping", gamma)?;
    let k0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - gamma).sqrt()]])?;
    let k1 = ComplexMatrix::from_real_rows(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]])?;
    QuantumChannel::named(vec![k0, k1], "amplitude_damping")
}

/// Qubit erasure into a qutrit: with probability `p` the output is the flag `|2⟩`.
pub fn erasure(p: f64) -> Result<QuantumChannel> {
    check_param("erasure", p)?;
    let embed = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]])?;
    let flag_from = |i: usize| {
        let mut m = ComplexMatrix::zeros(3, 2);
        m[(2, i)] = C64::new(p.sqrt(), 0.0);
        m
    };
    QuantumChannel::named(
        vec![embed.scale_real((1.0 - p).sqrt()), flag_from(0), flag_from(1)],
        "erasure",
    )
}

/// Named channel families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Identity,
    Depolarizing,
    Dephasing,
    AmplitudeDamping,
    Erasure,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Identity,
        Family::Depolarizing,
        Family::Dephasing,
        Family::AmplitudeDamping,
        Family::Erasure,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Identity => "identity",
            Family::Depolarizing => "depolarizing",
            Family::Dephasing => "dephasing",
            Family::AmplitudeDamping => "amplitude_damping",
            Family::Erasure => "erasure",
        }
    }

    /// Builds the family member; `dim` is used only by the identity family.
    pub fn build(self, param: f64, dim: usize) -> Result<QuantumChannel> {
        match self {
            Family::Identity => identity(dim),
            Family::Depolarizing => depolarizing(param),
            Family::Dephasing => dephasing(param),
            Family::AmplitudeDamping => amplitude_damping(param),
            Family::Erasure => erasure(param),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == norm)
            .ok_or_else(|| Error::Domain(format!("unknown channel family '{s}'")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
