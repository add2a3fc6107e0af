use proptest::prelude::*;
use rand::Rng;

use qprivacy::channels::{apply, complementary_apply, random_channel, remix_kraus, QuantumChannel};
use qprivacy::qmath::{random_density_with, random_isometry_with, random_unitary_with, rng_from_seed, QRng};
use qprivacy::quantities::{
    accessible_information, analyze, coherent_information, entropy_exchange, holevo_environment,
    holevo_eve_subsystem, holevo_output, privacy, privacy_bound, random_identity_case, verify_identity, Receiver,
};
use qprivacy::states::{
    average_state, eigendecomposition_ensemble, random_pure_ensemble, steered_ensemble, DensityOperator, Ensemble,
    Povm,
};
use qprivacy::Error;

fn setting(rng: &mut QRng) -> (QuantumChannel, Ensemble) {
    let dim_in: usize = rng.random_range(2..=3);
    let dim_out: usize = rng.random_range(2..=3);
    let n_kraus = rng.random_range(dim_in.div_ceil(dim_out).max(1)..=4);
    let ch = random_channel(dim_in, dim_out, n_kraus, rng).unwrap();
    let n = rng.random_range(1..=4);
    (ch, random_pure_ensemble(dim_in, n, rng).unwrap())
}

fn mixed_ensemble(dim: usize, rng: &mut QRng) -> Ensemble {
    let states = (0..rng.random_range(1..=3))
        .map(|_| DensityOperator::new(random_density_with(dim, dim, rng).unwrap()).unwrap())
        .collect::<Vec<_>>();
    let n = states.len();
    Ensemble::mixed(vec![1.0 / n as f64; n], states).unwrap()
}

#[test]
fn identity_holds_on_fixed_seed_batch() {
    let mut rng = rng_from_seed(2024);
    for _ in 0..200 {
        let (ch, e) = random_identity_case(3, &mut rng).unwrap();
        assert!(verify_identity(&ch, &e).unwrap() < 1e-8);
    }
}

#[test]
fn identity_rejects_mixed_members() {
    let mut rng = rng_from_seed(5);
    let (ch, _) = setting(&mut rng);
    let e = mixed_ensemble(ch.dim_in(), &mut rng);
    assert!(matches!(verify_identity(&ch, &e), Err(Error::Purity { .. })));
    assert!(analyze(&ch, &e).unwrap().identity_residual.is_none());
}

#[test]
fn orthogonal_signals_through_identity() {
    let ch = QuantumChannel::new(vec![qprivacy::qmath::ComplexMatrix::identity(2)]).unwrap();
    let r = analyze(&ch, &Ensemble::computational_basis(2).unwrap()).unwrap();
    assert!((r.chi_q - 1.0).abs() < 1e-12);
    assert!(r.chi_e.abs() < 1e-12);
    assert!(r.identity_residual.unwrap() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn identity_for_pure_ensembles(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (ch, e) = random_identity_case(3, &mut rng).unwrap();
        prop_assert!(verify_identity(&ch, &e).unwrap() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn delta_chi_depends_only_on_average(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (ch, _) = setting(&mut rng);
        let dim = ch.dim_in();
        let rho = DensityOperator::new(random_density_with(dim, rng.random_range(1..=dim), &mut rng).unwrap()).unwrap();
        let rank = rho.rank().unwrap();
        let a = eigendecomposition_ensemble(&rho).unwrap();
        let b = steered_ensemble(&rho, &random_isometry_with(rank + 2, rank, &mut rng).unwrap()).unwrap();
        prop_assert!(average_state(&a).unwrap().matrix().max_abs_diff(average_state(&b).unwrap().matrix()) < 1e-12);
        let gap = (privacy_bound(&ch, &a).unwrap() - privacy_bound(&ch, &b).unwrap()).abs();
        prop_assert!(gap < 1e-8, "gap {}", gap);
    }

    #[test]
    fn accessible_information_below_holevo(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (ch, e) = setting(&mut rng);
        let chi_q = holevo_output(&ch, &e).unwrap();
        let chi_e = holevo_environment(&ch, &e).unwrap();
        for _ in 0..5 {
            let bob = Povm::random(ch.dim_out(), rng.random_range(2..=5), &mut rng).unwrap();
            let eve = Povm::random(ch.dim_env(), rng.random_range(2..=5), &mut rng).unwrap();
            prop_assert!(accessible_information(&ch, &e, &bob, Receiver::Bob).unwrap() <= chi_q + 1e-9);
            prop_assert!(accessible_information(&ch, &e, &eve, Receiver::Eve).unwrap() <= chi_e + 1e-9);
        }
    }

    #[test]
    fn subsystem_sees_no_more(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (ch, e) = setting(&mut rng);
        let chi_e = holevo_environment(&ch, &e).unwrap();
        for d in 1..=ch.dim_env() {
            prop_assert!(holevo_eve_subsystem(&ch, &e, d).unwrap() <= chi_e + 1e-9);
        }
        prop_assert!((holevo_eve_subsystem(&ch, &e, ch.dim_env()).unwrap() - chi_e).abs() < 1e-10);
        prop_assert!(holevo_eve_subsystem(&ch, &e, 1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn quantities_invariant_under_kraus_remixing(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (ch, e) = setting(&mut rng);
        let remixed = remix_kraus(&ch, &random_unitary_with(ch.dim_env(), &mut rng).unwrap()).unwrap();
        let rho = average_state(&e).unwrap();
        prop_assert!((entropy_exchange(&ch, &rho).unwrap() - entropy_exchange(&remixed, &rho).unwrap()).abs() < 1e-8);
        prop_assert!((coherent_information(&ch, &rho).unwrap() - coherent_information(&remixed, &rho).unwrap()).abs() < 1e-8);
        prop_assert!((holevo_output(&ch, &e).unwrap() - holevo_output(&remixed, &e).unwrap()).abs() < 1e-8);
        prop_assert!((holevo_environment(&ch, &e).unwrap() - holevo_environment(&remixed, &e).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn entropies_and_holevo_are_bounded(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (ch, _) = setting(&mut rng);
        let e = mixed_ensemble(ch.dim_in(), &mut rng);
        let rho = average_state(&e).unwrap();
        let s_out = apply(&ch, &rho).unwrap().entropy().unwrap();
        let s_env = complementary_apply(&ch, &rho).unwrap().entropy().unwrap();
        let chi_q = holevo_output(&ch, &e).unwrap();
        let chi_e = holevo_environment(&ch, &e).unwrap();
        prop_assert!(entropy_exchange(&ch, &rho).unwrap() >= 0.0);
        prop_assert!(chi_q >= -1e-12 && chi_q <= s_out + 1e-9);
        prop_assert!(chi_e >= -1e-12 && chi_e <= s_env + 1e-9);
        let ci = coherent_information(&ch, &rho).unwrap();
        prop_assert!(ci <= (ch.dim_in() as f64).log2() + 1e-9);
        prop_assert!(ci >= -(ch.dim_in() as f64).log2() - 1e-9);
    }

    #[test]
    fn privacy_never_below_floor(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (ch, e) = setting(&mut rng);
        let bob = Povm::random(ch.dim_out(), 3, &mut rng).unwrap();
        for _ in 0..5 {
            let eve = Povm::random_projective(ch.dim_env(), &mut rng).unwrap();
            let est = privacy(&ch, &e, &bob, &eve, None).unwrap();
            prop_assert!(est.privacy >= est.guaranteed_floor - 1e-9);
            prop_assert!((est.privacy - (est.h_bob - est.h_eve)).abs() < 1e-15);
        }
    }
}
