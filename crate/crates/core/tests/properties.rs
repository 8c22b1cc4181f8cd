use envarkit_core::derivation::{
    adjacent_swaps, generate_terms, numeric_probabilities, saturate, EqualityStore, Probability, Rule, RuleSet,
};
use envarkit_core::envariance::{
    check_envariance, check_envariance_with, oracle_best_counter, schmidt_swap, EqualityMode, ENVAR_TOL,
};
use envarkit_core::finegrain::{born_via_counting, rationalize, CountingEngine, RationalWeights};
use envarkit_core::gleason::{audit, frame_sum, random_basis, BasisSample, FrameFunction, Verdict};
use envarkit_core::linalg::{hermitian_eigen, CMatrix};
use envarkit_core::random::{haar_local_unitary, random_state, rng, state_with_spectrum, uniform_vec};
use envarkit_core::schmidt::{is_even, reconstruct, schmidt};
use envarkit_core::state::premeasure;
use envarkit_core::{BipartiteState, C64};
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..=6, 1usize..=6, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn local_unitaries_preserve_norm_and_commute((ds, de, seed) in dims()) {
        let mut r = rng(seed);
        let psi = random_state(&mut r, ds, de);
        let us = haar_local_unitary(&mut r, ds);
        let ue = haar_local_unitary(&mut r, de);
        let a = psi.apply_system(&us).unwrap().apply_env(&ue).unwrap();
        let b = psi.apply_env(&ue).unwrap().apply_system(&us).unwrap();
        prop_assert!((a.norm_sqr() - 1.0).abs() <= 1e-10);
        prop_assert!(a.distance(&b).unwrap() <= 1e-12);
    }

    #[test]
    fn global_phase_is_detected((ds, de, seed) in dims(), theta in -3.0f64..3.0) {
        let psi = random_state(&mut rng(seed), ds, de);
        let phase = C64::from_polar(1.0, theta);
        let shifted = BipartiteState::from_amplitudes(psi.amplitudes().scale(phase), false).unwrap();
        let (eq, found) = shifted.equal_up_to_global_phase(&psi, 1e-9).unwrap();
        prop_assert!(eq);
        prop_assert!((C64::from_polar(1.0, found) - phase).norm() <= 1e-9);
    }

    #[test]
    fn schmidt_matches_reduced_spectrum(ds in 1usize..=8, de in 1usize..=8, seed in any::<u64>()) {
        let psi = random_state(&mut rng(seed), ds, de);
        let d = schmidt(&psi);
        let eig = hermitian_eigen(&psi.reduced_density_system()).values;
        for (k, l) in d.coefficients().iter().enumerate() {
            prop_assert!((l * l - eig[k]).abs() <= 1e-10);
        }
        prop_assert!(psi.distance(&reconstruct(&d)).unwrap() <= 1e-10);
    }

    #[test]
    fn schmidt_coefficients_are_local_invariants((ds, de, seed) in dims()) {
        let mut r = rng(seed);
        let psi = random_state(&mut r, ds, de);
        let moved = psi
            .apply_system(&haar_local_unitary(&mut r, ds)).unwrap()
            .apply_env(&haar_local_unitary(&mut r, de)).unwrap();
        let a = schmidt(&psi);
        let b = schmidt(&moved);
        prop_assert_eq!(a.rank(), b.rank());
        for (x, y) in a.coefficients().iter().zip(b.coefficients()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn premeasurement_keeps_system_marginal((ds, de, seed) in dims()) {
        let psi = random_state(&mut rng(seed), ds, de);
        let t = premeasure(&psi, &schmidt(&psi)).unwrap();
        prop_assert!((t.norm_sqr() - 1.0).abs() <= 1e-10);
        prop_assert!(t.reduced_density_system().max_abs_diff(&psi.reduced_density_system()) <= 1e-10);
        let memory = t.reduced_density_memory();
        prop_assert!(memory[(0, 0)].norm() <= 1e-12);
    }

    #[test]
    fn decision_agrees_with_oracle(ds in 2usize..=6, de in 2usize..=6, seed in any::<u64>(), pick in any::<(usize, usize)>()) {
        let mut r = rng(seed);
        let rank = ds.min(de);
        let mut l = uniform_vec(&mut r, rank, 0.2, 1.0);
        if pick.0 % 2 == 0 {
            l[pick.1 % rank] = l[(pick.1 / 7) % rank];
        }
        let psi = state_with_spectrum(&mut r, ds, de, &l);
        let lambda = schmidt(&psi).coefficients().to_vec();
        let i = pick.0 % rank;
        let j = (i + 1 + pick.1 % (rank - 1).max(1)) % rank;
        prop_assume!(i != j);
        let gap = (lambda[i] - lambda[j]).abs();
        prop_assume!(gap <= 1e-12 || gap >= 1e-3);
        let u = schmidt_swap(&psi, i, j).unwrap();
        let v = check_envariance(&psi, &u).unwrap();
        let (_, oracle) = oracle_best_counter(&psi, &u).unwrap();
        prop_assert_eq!(v.envariant, gap <= 1e-12);
        prop_assert_eq!(v.envariant, oracle <= 1e-7);
        let relaxed = check_envariance_with(&psi, &u, EqualityMode::UpToGlobalPhase).unwrap();
        prop_assert_eq!(relaxed.envariant, v.envariant);
    }

    #[test]
    fn counters_compose(d in 2usize..=5, seed in any::<u64>()) {
        // even state: every system unitary is envariant, and counters of a
        // product are products of counters
        let mut r = rng(seed);
        let psi = state_with_spectrum(&mut r, d, d, &vec![1.0; d]);
        let u1 = haar_local_unitary(&mut r, d);
        let u2 = haar_local_unitary(&mut r, d);
        let v1 = check_envariance(&psi, &u1).unwrap();
        let v2 = check_envariance(&psi, &u2).unwrap();
        let v12 = check_envariance(&psi, &u1.compose(&u2).unwrap()).unwrap();
        prop_assert!(v1.envariant && v2.envariant && v12.envariant);
        let product = v1.counter.unwrap().compose(&v2.counter.unwrap()).unwrap();
        prop_assert!(product.matrix().max_abs_diff(v12.counter.unwrap().matrix()) <= 1e-8);
        let inv = check_envariance(&psi, &u1.adjoint()).unwrap();
        prop_assert!(inv.residual <= ENVAR_TOL);
    }

    #[test]
    fn rationalize_recovers_small_fractions(nums in prop::collection::vec(1u64..=8, 1..=4)) {
        let den: u64 = nums.iter().sum();
        let w: Vec<f64> = nums.iter().map(|&m| m as f64 / den as f64).collect();
        let rw = rationalize(&w, 1e-12, 1000).unwrap();
        let back: Vec<Probability> = rw.as_probabilities();
        for (p, &m) in back.iter().zip(&nums) {
            prop_assert_eq!(*p, Probability::new(m, den));
        }
    }

    #[test]
    fn quadratic_frame_functions_are_consistent(dim in 3usize..=6, seed in any::<u64>()) {
        let rho = envarkit_core::gleason::random_density(dim, seed);
        let p = FrameFunction::quadratic(rho).unwrap();
        let b = random_basis(dim, seed ^ 0x5eed);
        prop_assert!((frame_sum(&p, &b).unwrap() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn frame_sum_ignores_order_and_phases(dim in 3usize..=5, seed in any::<u64>(), shift in 1usize..5, phases in prop::collection::vec(-3.0f64..3.0, 5)) {
        let p = FrameFunction::power_of_first_axis(dim, 3.0).unwrap();
        let b = random_basis(dim, seed);
        let moved = CMatrix::from_fn(dim, dim, |i, j| {
            b.vectors[(i, (j + shift) % dim)] * C64::from_polar(1.0, phases[j])
        });
        let b2 = BasisSample::from_vectors(moved).unwrap();
        prop_assert!((frame_sum(&p, &b).unwrap() - frame_sum(&p, &b2).unwrap()).abs() <= 1e-12);
    }
}

fn assert_sound(store: &EqualityStore) {
    let bad = store.soundness_violations(1e-9);
    assert!(bad.is_empty(), "unsound classes: {bad:?}");
}

#[test]
fn full_rules_derive_equal_weights_up_to_eight() {
    for d in 2..=8 {
        for seed in 0..3 {
            let mut r = rng(1000 * d as u64 + seed);
            let psi = state_with_spectrum(&mut r, d, d + 1, &vec![1.0; d]);
            assert!(is_even(&schmidt(&psi), 1e-9));
            let store = saturate(&generate_terms(&psi, &adjacent_swaps(d)).unwrap(), RuleSet::all());
            assert_sound(&store);
            let probs = numeric_probabilities(&store).unwrap();
            assert!(probs.iter().all(|&(_, p)| p == Probability::new(1, d as u64)));
            let replayed = EqualityStore::replay(store.terms().len(), store.trace());
            assert_eq!(replayed, store.classes());
        }
    }
}

#[test]
fn ablated_runs_stay_sound() {
    for d in 2..=5 {
        let psi = BipartiteState::maximally_entangled(d);
        let terms = generate_terms(&psi, &adjacent_swaps(d)).unwrap();
        for rule in Rule::ALL {
            let store = saturate(&terms, RuleSet::all().without(rule));
            assert_sound(&store);
            let replayed = EqualityStore::replay(terms.len(), store.trace());
            assert_eq!(replayed, store.classes());
        }
    }
}

#[test]
fn counting_matches_weights_up_to_sixty_four() {
    let mut engine = CountingEngine::new();
    let mut r = rng(9);
    for m in 1..=64u64 {
        for _ in 0..4 {
            // random composition of m into at most 4 positive parts
            let parts = 1 + (uniform_vec(&mut r, 1, 0.0, 4.0)[0] as u64).min(m - 1).min(3);
            let mut cuts: Vec<u64> = (1..m).collect();
            let mut chosen = Vec::new();
            for _ in 1..parts {
                let idx = (uniform_vec(&mut r, 1, 0.0, cuts.len() as f64)[0] as usize).min(cuts.len() - 1);
                chosen.push(cuts.remove(idx));
            }
            chosen.sort_unstable();
            chosen.push(m);
            let mut prev = 0;
            let nums: Vec<u64> = chosen.iter().map(|&c| { let x = c - prev; prev = c; x }).collect();
            let w = RationalWeights::new(nums.clone(), m).unwrap();
            let res = engine.born(&w).unwrap();
            let expected: Vec<Probability> = nums.iter().map(|&k| Probability::new(k, m)).collect();
            assert_eq!(res.probabilities, expected);
            assert_sound(&res.derivation);
        }
    }
}

#[test]
fn counting_route_for_two_thirds() {
    let w = RationalWeights::new(vec![2, 1], 3).unwrap();
    let res = born_via_counting(&w).unwrap();
    assert_eq!(res.probabilities, vec![Probability::new(2, 3), Probability::new(1, 3)]);
    assert_eq!(res.fine_probabilities, vec![Probability::new(1, 3); 3]);
}

#[test]
fn power_overlaps_fail_the_audit() {
    for dim in 3..=6 {
        for alpha in [1.0, 3.0, 4.0] {
            let p = FrameFunction::power_of_first_axis(dim, alpha).unwrap();
            let rep = audit(&p, dim, 500, 11).unwrap();
            assert_eq!(rep.verdict, Verdict::Violated);
            assert!(rep.max_dev >= 0.1, "dim {dim} alpha {alpha}: {}", rep.max_dev);
        }
    }
}

#[test]
fn haar_first_moment() {
    let mut total = 0.0;
    let n = 10_000;
    for seed in 0..n {
        let b = random_basis(3, seed);
        total += b.vectors[(0, 0)].norm_sqr();
    }
    let mean = total / n as f64;
    assert!((mean - 1.0 / 3.0).abs() <= 0.02, "{mean}");
}
