//! Information quantities of a channel: entropy exchange, coherent
//! information, Holevo quantities for the receiver and the environment,
//! accessible information for explicit measurements and the privacy bounds
//! built from them. All values are in bits.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{apply, complementary_apply, random_channel, split_environment, QuantumChannel};
use crate::error::{Error, Result};
use crate::qmath::shannon_entropy;
use crate::states::{average_state, measurement_distribution, random_pure_ensemble, DensityOperator, Ensemble, Povm};

/// Entropy acquired by the initially pure environment, `S(ρ^{E'})`.
pub fn entropy_exchange(ch: &QuantumChannel, rho: &DensityOperator) -> Result<f64> {
    complementary_apply(ch, rho)?.entropy()
}

/// `S(𝓔(ρ)) − S_e`.
pub fn coherent_information(ch: &QuantumChannel, rho: &DensityOperator) -> Result<f64> {
    Ok(apply(ch, rho)?.entropy()? - entropy_exchange(ch, rho)?)
}

/// `S(ρ̄) − Σ_k p_k S(ρ_k)` for already-computed states.
pub fn holevo_quantity(probs: &[f64], average: &DensityOperator, members: &[DensityOperator]) -> Result<f64> {
    let mut mean_entropy = 0.0;
    for (p, rho) in probs.iter().zip(members) {
        if *p > 0.0 {
            mean_entropy += p * rho.entropy()?;
        }
    }
    Ok(average.entropy()? - mean_entropy)
}

fn holevo_through(
    e: &Ensemble,
    map: impl Fn(&DensityOperator) -> Result<DensityOperator>,
) -> Result<f64> {
    let average = map(&average_state(e)?)?;
    let members = e
        .signals()
        .iter()
        .map(|s| map(&s.density()))
        .collect::<Result<Vec<_>>>()?;
    holevo_quantity(e.probs(), &average, &members)
}

/// Holevo quantity of the channel outputs, `χ^{Q'}`.
pub fn holevo_output(ch: &QuantumChannel, e: &Ensemble) -> Result<f64> {
    holevo_through(e, |rho| apply(ch, rho))
}

/// Holevo quantity of the environment outputs, `χ^{E'}`.
pub fn holevo_environment(ch: &QuantumChannel, e: &Ensemble) -> Result<f64> {
    holevo_through(e, |rho| complementary_apply(ch, rho))
}

/// Holevo quantity of a `d_dim`-dimensional factor of the environment, `χ^{D'}`.
pub fn holevo_eve_subsystem(ch: &QuantumChannel, e: &Ensemble, d_dim: usize) -> Result<f64> {
    let split = split_environment(ch, d_dim)?;
    holevo_through(e, |rho| split.subsystem_output(rho))
}

/// `Δχ = χ^{Q'} − χ^{E'}`; may be negative.
pub fn privacy_bound(ch: &QuantumChannel, e: &Ensemble) -> Result<f64> {
    Ok(holevo_output(ch, e)? - holevo_environment(ch, e)?)
}

/// Index of the first mixed member, with its largest eigenvalue.
fn first_mixed_member(e: &Ensemble) -> Result<Option<(usize, f64)>> {
    for (index, s) in e.signals().iter().enumerate() {
        if !s.is_pure()? {
            return Ok(Some((index, s.density().largest_eigenvalue()?)));
        }
    }
    Ok(None)
}

/// `|I^Q(ρ̄) − (χ^{Q'} − χ^{E'})|` for an ensemble of pure states.
///
/// For pure signals the joint output on `Q' ⊗ E'` is pure, so each
/// `ρ^{Q'}_k` and `ρ^{E'}_k` share their non-zero spectrum and the two sides
/// agree up to rounding.
pub fn verify_identity(ch: &QuantumChannel, e: &Ensemble) -> Result<f64> {
    if let Some((index, largest)) = first_mixed_member(e)? {
        return Err(Error::Purity { index, largest });
    }
    let coherent = coherent_information(ch, &average_state(e)?)?;
    Ok((coherent - privacy_bound(ch, e)?).abs())
}

/// Draws a random channel and pure-state ensemble for identity checks.
///
/// Input and output dimensions lie in `2..=max_dim`, there are at most five
/// Kraus operators and one to four signals.
pub fn random_identity_case<R: Rng + ?Sized>(max_dim: usize, rng: &mut R) -> Result<(QuantumChannel, Ensemble)> {
    if max_dim < 2 {
        return Err(Error::Domain(format!("max_dim must be at least 2, got {max_dim}")));
    }
    let dim_in = rng.random_range(2..=max_dim);
    let dim_out = rng.random_range(2..=max_dim);
    let min_kraus = dim_in.div_ceil(dim_out);
    let n_kraus = rng.random_range(min_kraus..=5.max(min_kraus));
    let n_signals = rng.random_range(1..=4);
    let ch = random_channel(dim_in, dim_out, n_kraus, rng)?;
    let e = random_pure_ensemble(dim_in, n_signals, rng)?;
    Ok((ch, e))
}

/// Which system a decoding measurement acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Receiver {
    /// The channel output `Q'`.
    Bob,
    /// The whole environment `E'`.
    Eve,
    /// A `d_dim`-dimensional factor `D` of the environment.
    EveSubsystem(usize),
}

/// Classical mutual information `I(K;J)` from a prior and the conditionals `p(j|k)`.
pub fn mutual_information(prior: &[f64], conditional: &[Vec<f64>]) -> f64 {
    let outcomes = conditional.first().map_or(0, Vec::len);
    let marginal: Vec<f64> = (0..outcomes)
        .map(|j| prior.iter().zip(conditional).map(|(p, c)| p * c[j]).sum())
        .collect();
    let noise: f64 = prior
        .iter()
        .zip(conditional)
        .map(|(p, c)| p * shannon_entropy(c))
        .sum();
    shannon_entropy(&marginal) - noise
}

/// Mutual information between the signal index and the outcome of `m` on the receiver's system.
pub fn accessible_information(ch: &QuantumChannel, e: &Ensemble, m: &Povm, receiver: Receiver) -> Result<f64> {
    let conditional = match receiver {
        Receiver::Bob => conditionals(e, m, |rho| apply(ch, rho))?,
        Receiver::Eve => conditionals(e, m, |rho| complementary_apply(ch, rho))?,
        Receiver::EveSubsystem(d_dim) => {
            let split = split_environment(ch, d_dim)?;
            conditionals(e, m, |rho| split.subsystem_output(rho))?
        }
    };
    Ok(mutual_information(e.probs(), &conditional))
}

fn conditionals(
    e: &Ensemble,
    m: &Povm,
    map: impl Fn(&DensityOperator) -> Result<DensityOperator>,
) -> Result<Vec<Vec<f64>>> {
    e.signals()
        .iter()
        .map(|s| measurement_distribution(&map(&s.density())?, m))
        .collect()
}

/// Receiver-minus-eavesdropper information for explicit measurements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrivacyEstimate {
    pub h_bob: f64,
    pub h_eve: f64,
    /// `h_bob − h_eve`.
    pub privacy: f64,
    /// `h_bob − χ^{E'}`; no eavesdropper measurement can push the privacy below this.
    pub guaranteed_floor: f64,
}

/// Privacy of an explicit (Bob, Eve) measurement pair, with the floor set by `χ^{E'}`.
pub fn privacy(
    ch: &QuantumChannel,
    e: &Ensemble,
    bob: &Povm,
    eve: &Povm,
    eve_d_dim: Option<usize>,
) -> Result<PrivacyEstimate> {
    let h_bob = accessible_information(ch, e, bob, Receiver::Bob)?;
    let eve_side = eve_d_dim.map_or(Receiver::Eve, Receiver::EveSubsystem);
    let h_eve = accessible_information(ch, e, eve, eve_side)?;
    let chi_e = holevo_environment(ch, e)?;
    Ok(PrivacyEstimate {
        h_bob,
        h_eve,
        privacy: h_bob - h_eve,
        guaranteed_floor: h_bob - chi_e,
    })
}

/// All quantities for one (channel, ensemble) pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub s_output: f64,
    pub s_exchange: f64,
    pub coherent_info: f64,
    pub chi_q: f64,
    pub chi_e: f64,
    pub delta_chi: f64,
    /// Present only when every ensemble member is pure.
    pub identity_residual: Option<f64>,
}

pub fn analyze(ch: &QuantumChannel, e: &Ensemble) -> Result<AnalysisReport> {
    let avg = average_state(e)?;
    let s_output = apply(ch, &avg)?.entropy()?;
    let s_exchange = entropy_exchange(ch, &avg)?;
    let coherent_info = s_output - s_exchange;
    let chi_q = holevo_output(ch, e)?;
    let chi_e = holevo_environment(ch, e)?;
    let delta_chi = chi_q - chi_e;
    let identity_residual = match first_mixed_member(e)? {
        None => Some((coherent_info - delta_chi).abs()),
        Some(_) => None,
    };
    Ok(AnalysisReport {
        s_output,
        s_exchange,
        coherent_info,
        chi_q,
        chi_e,
        delta_chi,
        identity_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{amplitude_damping, dephasing, depolarizing, identity, random_channel};
    use crate::qmath::{binary_entropy, random_density, rng_from_seed, ComplexMatrix};
    use crate::states::PureState;

    fn ket(i: usize) -> PureState {
        PureState::basis(2, i).unwrap()
    }

    fn orthogonal_pair() -> Ensemble {
        Ensemble::pure(vec![0.5, 0.5], vec![ket(0), ket(1)]).unwrap()
    }

    fn zero_plus() -> Ensemble {
        Ensemble::pure(vec![0.5, 0.5], vec![ket(0), PureState::plus()]).unwrap()
    }

    fn mixed2() -> DensityOperator {
        DensityOperator::maximally_mixed(2).unwrap()
    }

    // Eigenvalues of [[3/4,1/4],[1/4,1/4]] are cos²(π/8) and sin²(π/8).
    fn zero_plus_entropy() -> f64 {
        let c = (std::f64::consts::PI / 8.0).cos().powi(2);
        binary_entropy(c).unwrap()
    }

    #[test]
    fn zero_plus_entropy_oracle() {
        assert!((zero_plus_entropy() - 0.6008760366).abs() < 1e-10);
    }

    #[test]
    fn entropy_exchange_examples() {
        let rho = DensityOperator::new(random_density(2, 2, 3).unwrap()).unwrap();
        assert_eq!(entropy_exchange(&identity(2).unwrap(), &rho).unwrap(), 0.0);
        let se = entropy_exchange(&dephasing(0.3).unwrap(), &mixed2()).unwrap();
        assert!((se - 0.8812908992).abs() < 1e-10);
        assert!((se - binary_entropy(0.3).unwrap()).abs() < 1e-12);
        let se = entropy_exchange(&depolarizing(1.0).unwrap(), &mixed2()).unwrap();
        assert!((se - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_information_examples() {
        assert!((coherent_information(&identity(2).unwrap(), &mixed2()).unwrap() - 1.0).abs() < 1e-12);
        for p in [0.1, 0.25, 0.4] {
            let i = coherent_information(&dephasing(p).unwrap(), &mixed2()).unwrap();
            assert!((i - (1.0 - binary_entropy(p).unwrap())).abs() < 1e-12);
        }
        let i = coherent_information(&depolarizing(1.0).unwrap(), &mixed2()).unwrap();
        assert!((i + 1.0).abs() < 1e-12);
    }

    #[test]
    fn holevo_output_examples() {
        let id = identity(2).unwrap();
        assert!((holevo_output(&id, &orthogonal_pair()).unwrap() - 1.0).abs() < 1e-12);
        let single = Ensemble::pure(vec![1.0], vec![PureState::plus()]).unwrap();
        assert!(holevo_output(&amplitude_damping(0.4).unwrap(), &single).unwrap().abs() < 1e-12);
        assert!((holevo_output(&id, &zero_plus()).unwrap() - zero_plus_entropy()).abs() < 1e-12);
    }

    #[test]
    fn holevo_environment_examples() {
        let mut rng = rng_from_seed(1);
        let e = Ensemble::pure(
            vec![0.3, 0.7],
            vec![
                PureState::new(crate::qmath::random_pure_state_with(2, &mut rng).unwrap()).unwrap(),
                PureState::plus(),
            ],
        )
        .unwrap();
        assert_eq!(holevo_environment(&identity(2).unwrap(), &e).unwrap(), 0.0);

        // Dephasing: |0⟩ and |1⟩ leave the environment in (√(1−p), ±√p) superpositions.
        let p = 0.5;
        let ch = dephasing(p).unwrap();
        let env_state = |sign: f64| {
            let a = (1.0 - p).sqrt();
            let b = sign * p.sqrt();
            DensityOperator::new(ComplexMatrix::from_real_rows(&[&[a * a, a * b], &[a * b, b * b]]).unwrap()).unwrap()
        };
        let avg = DensityOperator::new(ComplexMatrix::diagonal(&[1.0 - p, p])).unwrap();
        let oracle = holevo_quantity(&[0.5, 0.5], &avg, &[env_state(1.0), env_state(-1.0)]).unwrap();
        assert!((oracle - 1.0).abs() < 1e-12);
        assert!((holevo_environment(&ch, &orthogonal_pair()).unwrap() - oracle).abs() < 1e-12);

        let pm = Ensemble::pure(vec![0.5, 0.5], vec![PureState::plus(), PureState::minus()]).unwrap();
        for p in [0.1, 0.3, 0.5] {
            assert!(holevo_environment(&dephasing(p).unwrap(), &pm).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn eve_subsystem_examples() {
        let mut rng = rng_from_seed(4);
        let ch = random_channel(2, 2, 4, &mut rng).unwrap();
        let states = (0..3)
            .map(|_| PureState::new(crate::qmath::random_pure_state_with(2, &mut rng).unwrap()).unwrap())
            .collect();
        let e = Ensemble::pure(vec![0.2, 0.3, 0.5], states).unwrap();
        let chi_e = holevo_environment(&ch, &e).unwrap();
        assert!((holevo_eve_subsystem(&ch, &e, ch.dim_env()).unwrap() - chi_e).abs() < 1e-10);
        assert!(holevo_eve_subsystem(&ch, &e, 1).unwrap().abs() < 1e-12);
        assert!(holevo_eve_subsystem(&ch, &e, 2).unwrap() <= chi_e + 1e-9);
        assert!((holevo_eve_subsystem(&ch, &e, 5).unwrap() - chi_e).abs() < 1e-10);
        assert!(holevo_eve_subsystem(&ch, &e, 0).is_err());
    }

    #[test]
    fn privacy_bound_examples() {
        assert!((privacy_bound(&identity(2).unwrap(), &orthogonal_pair()).unwrap() - 1.0).abs() < 1e-12);
        let single = Ensemble::pure(vec![1.0], vec![ket(1)]).unwrap();
        assert!(privacy_bound(&depolarizing(0.3).unwrap(), &single).unwrap().abs() < 1e-12);
        let ad = amplitude_damping(0.3).unwrap();
        let lhs = privacy_bound(&ad, &orthogonal_pair()).unwrap();
        let rhs = coherent_information(&ad, &mixed2()).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn verify_identity_examples() {
        let mut rng = rng_from_seed(6);
        let states = (0..3)
            .map(|_| PureState::new(crate::qmath::random_pure_state_with(2, &mut rng).unwrap()).unwrap())
            .collect();
        let e = Ensemble::pure(vec![0.5, 0.25, 0.25], states).unwrap();
        assert!(verify_identity(&identity(2).unwrap(), &e).unwrap() < 1e-12);
        assert!(verify_identity(&dephasing(0.25).unwrap(), &zero_plus()).unwrap() < 1e-8);
    }

    #[test]
    fn verify_identity_accepts_rank_one_densities_and_rejects_mixed() {
        let e = Ensemble::mixed(vec![0.5, 0.5], vec![ket(0).density(), PureState::plus().density()]).unwrap();
        assert!(verify_identity(&dephasing(0.25).unwrap(), &e).unwrap() < 1e-8);

        let e = Ensemble::mixed(vec![0.5, 0.5], vec![ket(0).density(), mixed2()]).unwrap();
        match verify_identity(&dephasing(0.25).unwrap(), &e) {
            Err(Error::Purity { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected purity error, got {other:?}"),
        }
    }

    #[test]
    fn accessible_information_examples() {
        let id = identity(2).unwrap();
        let z = Povm::computational_basis(2).unwrap();
        let h = accessible_information(&id, &orthogonal_pair(), &z, Receiver::Bob).unwrap();
        assert!((h - 1.0).abs() < 1e-12);

        // p(j|0) = (1,0), p(j|+) = (1/2,1/2): H(J) = h(1/4), H(J|K) = 1/2.
        let h = accessible_information(&id, &zero_plus(), &z, Receiver::Bob).unwrap();
        assert!((h - (binary_entropy(0.25).unwrap() - 0.5)).abs() < 1e-12);
        assert!((h - 0.3112781245).abs() < 1e-10);
        assert!(h <= holevo_output(&id, &zero_plus()).unwrap() + 1e-9);
    }

    #[test]
    fn accessible_information_checks_povm_dimension() {
        let ch = dephasing(0.2).unwrap();
        let z3 = Povm::computational_basis(3).unwrap();
        assert!(accessible_information(&ch, &orthogonal_pair(), &z3, Receiver::Bob).is_err());
        assert!(accessible_information(&ch, &orthogonal_pair(), &z3, Receiver::Eve).is_err());
        let z2 = Povm::computational_basis(2).unwrap();
        assert!(accessible_information(&ch, &orthogonal_pair(), &z2, Receiver::Eve).is_ok());
    }

    #[test]
    fn privacy_examples() {
        let id = identity(2).unwrap();
        let z = Povm::computational_basis(2).unwrap();
        let trivial = Povm::computational_basis(1).unwrap();
        let est = privacy(&id, &orthogonal_pair(), &z, &trivial, None).unwrap();
        assert!((est.privacy - 1.0).abs() < 1e-12);
        assert!((est.guaranteed_floor - 1.0).abs() < 1e-12);

        let single = Ensemble::pure(vec![1.0], vec![PureState::plus()]).unwrap();
        let est = privacy(&dephasing(0.3).unwrap(), &single, &z, &z, None).unwrap();
        assert_eq!(est.privacy, 0.0);

        // Bob in the X basis sees a binary symmetric channel with flip probability p.
        let p = 0.3;
        let ch = dephasing(p).unwrap();
        let pm = Ensemble::pure(vec![0.5, 0.5], vec![PureState::plus(), PureState::minus()]).unwrap();
        let est = privacy(&ch, &pm, &Povm::x_basis(), &z, None).unwrap();
        assert!((est.h_bob - (1.0 - binary_entropy(p).unwrap())).abs() < 1e-12);
        assert!(est.h_eve.abs() < 1e-12);
        assert!(est.guaranteed_floor <= est.privacy + 1e-9);
        assert!(est.h_bob <= holevo_output(&ch, &pm).unwrap() + 1e-9);
    }

    #[test]
    fn analyze_identity_orthogonal() {
        let r = analyze(&identity(2).unwrap(), &orthogonal_pair()).unwrap();
        assert!((r.s_output - 1.0).abs() < 1e-12);
        assert_eq!(r.s_exchange, 0.0);
        assert!((r.coherent_info - 1.0).abs() < 1e-12);
        assert!((r.chi_q - 1.0).abs() < 1e-12);
        assert_eq!(r.chi_e, 0.0);
        assert!((r.delta_chi - 1.0).abs() < 1e-12);
        assert!(r.identity_residual.unwrap() < 1e-12);
        assert_eq!(r.coherent_info, r.s_output - r.s_exchange);
    }

    #[test]
    fn analyze_matches_standalone_operations() {
        let mut rng = rng_from_seed(31);
        let ch = random_channel(3, 2, 3, &mut rng).unwrap();
        let states = (0..3)
            .map(|_| PureState::new(crate::qmath::random_pure_state_with(3, &mut rng).unwrap()).unwrap())
            .collect();
        let e = Ensemble::pure(vec![0.2, 0.5, 0.3], states).unwrap();
        let r = analyze(&ch, &e).unwrap();
        assert_eq!(r.chi_q, holevo_output(&ch, &e).unwrap());
        assert_eq!(r.chi_e, holevo_environment(&ch, &e).unwrap());
        assert_eq!(r.delta_chi, privacy_bound(&ch, &e).unwrap());
        assert_eq!(r.coherent_info, coherent_information(&ch, &average_state(&e).unwrap()).unwrap());
        assert_eq!(r.identity_residual.unwrap(), verify_identity(&ch, &e).unwrap());
    }

    #[test]
    fn analyze_mixed_members_leave_residual_empty() {
        let e = Ensemble::mixed(vec![0.5, 0.5], vec![mixed2(), ket(0).density()]).unwrap();
        let r = analyze(&dephasing(0.2).unwrap(), &e).unwrap();
        assert!(r.identity_residual.is_none());
    }
}
