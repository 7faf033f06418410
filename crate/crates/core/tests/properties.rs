mod common;

use proptest::collection::vec;
use proptest::prelude::*;
use wshift::classify::bounded_orbit_witness;
use wshift::conjugacy::f_identity_defect;
use wshift::shadowing::defect;
use wshift::num_traits::{Signed, Zero};
use wshift::weights::GeomeanDomain;
use wshift::*;

use common::q;

fn rational() -> impl Strategy<Value = Rational> {
    (1i64..=6, 1i64..=6, prop::bool::weighted(0.1)).prop_map(|(p, d, neg)| q(if neg { -p } else { p }, d))
}

fn weights() -> impl Strategy<Value = WeightSequence<Rational>> {
    (vec(rational(), 1..=3), -4i64..=4, vec(rational(), 0..=4), vec(rational(), 1..=3))
        .prop_map(|(l, cs, c, r)| WeightSequence::new(l, cs, c, r).unwrap())
}

fn unilateral() -> impl Strategy<Value = UnilateralWeights<Rational>> {
    (vec(rational(), 0..=4), vec(rational(), 1..=3)).prop_map(|(c, t)| UnilateralWeights::new(c, t).unwrap())
}

fn small_vector() -> impl Strategy<Value = SeqVector<Rational>> {
    (-3i64..=3, vec(-4i64..=4, 1..=4)).prop_map(|(lo, cs)| SeqVector::new(lo, cs.into_iter().map(|c| q(c, 4)).collect()))
}

fn float_vector() -> impl Strategy<Value = SeqVector<f64>> {
    (-3i64..=3, vec(-1.5f64..1.5, 1..=5)).prop_map(|(lo, cs)| SeqVector::new(lo, cs))
}

fn shadowable() -> impl Strategy<Value = WeightSequence<Rational>> {
    weights().prop_filter("class A, B or C", |w| {
        matches!(
            classify_shadowing(w).shadowing_class,
            ShadowingClass::A | ShadowingClass::B | ShadowingClass::C
        )
    })
}

/// `x_{n+1} = B x_n + λ k_n` on `[-5, 5]`.
fn kicked(w: &WeightSequence<Rational>, x0: &SeqVector<Rational>, kicks: &[SeqVector<Rational>], lambda: &Rational) -> PseudoTrajectory<Rational> {
    let mut points = vec![x0.clone()];
    for k in kicks {
        let next = &w.apply(points.last().unwrap()) + &k.scale(lambda);
        points.push(next);
    }
    let traj = PseudoTrajectory::new(-5, points, q(0, 1));
    let delta = defect(w, SpaceSpec::C0, &traj).unwrap();
    PseudoTrajectory { delta, ..traj }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn left_tail_is_periodic(w in weights(), n in -40i64..0) {
        let n = n.min(w.core_start() - 1);
        let l = w.left_tail().len() as i64;
        prop_assert_eq!(w.weight_at(n - l), w.weight_at(n));
    }

    #[test]
    fn right_tail_is_periodic(w in weights(), n in 0i64..40) {
        let n = n.max(w.core_end());
        let r = w.right_tail().len() as i64;
        prop_assert_eq!(w.weight_at(n + r), w.weight_at(n));
    }

    #[test]
    fn products_split(w in weights(), i in -12i64..12, a in 0i64..8, b in 1i64..8) {
        let (j, k) = (i + a, i + a + b);
        let whole = w.partial_product(i, k).unwrap();
        let split = w.partial_product(i, j).unwrap() * w.partial_product(j + 1, k).unwrap();
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn scaling_scales_means_and_rates(w in weights(), lambda in rational(), n in 1usize..6) {
        let scaled = w.scaled(&lambda).unwrap();
        let factor = lambda.abs();
        for domain in [GeomeanDomain::AllZSup, GeomeanDomain::AllZInf, GeomeanDomain::LeftNSup, GeomeanDomain::RightNInf] {
            let base = w.finite_sup_geomean(n, domain).unwrap().to_f64();
            let got = scaled.finite_sup_geomean(n, domain).unwrap().to_f64();
            prop_assert!((got - factor.to_f64() * base).abs() <= 1e-12 * got.abs().max(1.0));
        }
        let (r0, r1) = (w.tail_rates(), scaled.tail_rates());
        prop_assert_eq!(r1.left_product, r0.left_product * powi(&factor, r0.left_period as u64));
        prop_assert_eq!(r1.right_product, r0.right_product * powi(&factor, r0.right_period as u64));
        prop_assert!((r1.g_left.to_f64() - factor.to_f64() * r0.g_left.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn unilateral_decisions_agree(w in unilateral()) {
        let sums = w.unilateral_sums(120).unwrap();
        let first = classify_unilateral(&w, Direction::Backward, 0.0) == UnilateralClass::HyperbolicA;
        prop_assert_eq!(sums.q2 < q(1, 1), first);
        prop_assert_eq!(sums.q3.is_some(), first);
        prop_assert_eq!(sums.q4.is_some(), first);
    }

    #[test]
    fn unilateral_partial_sums_grow_and_tails_dominate(w in unilateral(), h in 1usize..30) {
        let short = w.unilateral_sums(h).unwrap();
        let long = w.unilateral_sums(h + 7).unwrap();
        prop_assert!(short.q3_partial <= long.q3_partial);
        if let (Some(total), Some(tail)) = (&short.q3, &short.q3_tail_bound) {
            prop_assert!(total.clone() - short.q3_partial.clone() <= tail.clone());
        }
    }

    #[test]
    fn shift_norm_bounds(w in weights(), x in small_vector(), p in prop::sample::select(vec![1.0, 2.0, 3.0])) {
        let (m, big_m) = w.bounds();
        for space in [SpaceSpec::C0, SpaceSpec::Lp(p)] {
            let nx = norm(space, &x).to_f64();
            let tol = 1e-12 * nx.max(1.0);
            prop_assert!(norm(space, &w.apply(&x)).to_f64() <= big_m.to_f64() * nx + tol);
            let inv = w.apply_inverse(&x).unwrap();
            prop_assert!(norm(space, &inv).to_f64() <= nx / m.to_f64() + tol);
            let (low, high) = x.split_mn();
            prop_assert!(norm(space, &low).to_f64() <= nx + tol);
            prop_assert!(norm(space, &high).to_f64() <= nx + tol);
        }
    }

    #[test]
    fn splitting_is_invariant(w in weights(), x in small_vector()) {
        let (low, high) = x.split_mn();
        prop_assert!(w.apply(&low).support().is_none_or(|(_, hi)| hi <= 0));
        prop_assert!(w.apply_inverse(&high).unwrap().support().is_none_or(|(lo, _)| lo >= 1));
    }

    #[test]
    fn hyperbolicity_matches_classes(w in weights()) {
        let r = classify_shadowing(&w);
        let in_ab = matches!(r.shadowing_class, ShadowingClass::A | ShadowingClass::B);
        prop_assert_eq!(r.hyperbolic.as_bool(), Some(in_ab));
        if r.shadowing_class == ShadowingClass::C {
            prop_assert!(bounded_orbit_witness(&w, SpaceSpec::C0, 60, &q(4, 1)).is_some());
        }
    }

    #[test]
    fn relabeling_preserves_classification(w in weights(), offset in -20i64..20) {
        let (a, b) = (classify_shadowing(&w), classify_shadowing(&w.shifted(offset)));
        prop_assert_eq!(a.shadowing_class, b.shadowing_class);
        prop_assert_eq!(a.hyperbolic, b.hyperbolic);
        prop_assert_eq!(a.uniform_expansivity, b.uniform_expansivity);
    }

    #[test]
    fn reversal_with_inversion_swaps_a_and_b(w in weights()) {
        let before = classify_shadowing(&w).shadowing_class;
        let after = classify_shadowing(&w.reversed_inverted()).shadowing_class;
        let expected = match before {
            ShadowingClass::A => ShadowingClass::B,
            ShadowingClass::B => ShadowingClass::A,
            other => other,
        };
        prop_assert_eq!(after, expected);
    }

    #[test]
    fn expansivity_c_matches_inverted_class_c(w in weights()) {
        let is_c = uniform_expansivity_class(&w, 0.0) == ExpansivityClass::C;
        prop_assert_eq!(is_c, classify_shadowing(&w.inverted()).shadowing_class == ShadowingClass::C);
        prop_assert_eq!(is_c, classify_shadowing(&w.reversed()).shadowing_class == ShadowingClass::C);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_shadows_are_orbits(w in shadowable(), x0 in small_vector(), kicks in vec(small_vector(), 10)) {
        let traj = kicked(&w, &x0, &kicks, &q(1, 1));
        let r = shadow_bilateral(&w, SpaceSpec::C0, &traj).unwrap();
        let orbit = PseudoTrajectory::orbit(&w, &r.shadow_point, -5, 5).unwrap();
        prop_assert!(defect(&w, SpaceSpec::C0, &orbit).unwrap().is_zero());
        prop_assert!(r.recurrence_defect.is_zero());
        prop_assert!(r.orbit_consistency.is_zero());
        let direct = verify_shadow(&w, SpaceSpec::C0, &traj, &r.shadow_point, &(r.max_error.clone() + q(1, 1_000_000))).unwrap();
        prop_assert!(direct.ok);
        prop_assert_eq!(direct.max_error, r.max_error.clone());
        prop_assert!(r.max_error <= r.error_bound);
    }

    #[test]
    fn errors_are_linear_in_the_kicks(w in shadowable(), x0 in small_vector(), kicks in vec(small_vector(), 10), lambda in rational()) {
        let base = shadow_bilateral(&w, SpaceSpec::C0, &kicked(&w, &x0, &kicks, &q(1, 1))).unwrap();
        let scaled = shadow_bilateral(&w, SpaceSpec::C0, &kicked(&w, &x0, &kicks, &lambda)).unwrap();
        prop_assert_eq!(scaled.max_error, lambda.abs() * base.max_error);
        for (a, b) in base.corrections.iter().zip(&scaled.corrections) {
            prop_assert_eq!(&a.scale(&lambda), b);
        }
    }

    #[test]
    fn oracle_is_sound(seed in any::<u64>(), j in -6i64..6, bump in -0.5f64..0.5) {
        let w = WeightSequence::step(0.5, 2.0).unwrap();
        let traj = random_pseudotrajectory(&w, SpaceSpec::C0, &0.1, (-6, 6), seed, 2).unwrap();
        let r = oracle_best_shadow(&w, SpaceSpec::C0, &traj, (-12, 12)).unwrap();
        let ok = verify_shadow(&w, SpaceSpec::C0, &traj, &r.best_point, &(r.best_error + 1e-12)).unwrap();
        prop_assert!(ok.ok);
        let other = &r.best_point + &SeqVector::scaled_basis(j, bump);
        let worse = verify_shadow(&w, SpaceSpec::C0, &traj, &other, &f64::INFINITY).unwrap();
        prop_assert!(worse.max_error >= r.best_error - 1e-12);
    }
}

fn rank_one(space: SpaceSpec, budget: f64, index: i64, direction: SeqVector<f64>, share: f64) -> PerturbationMap<f64> {
    let raw = PerturbationMap::coordinate_rank_one(space, index, direction.clone(), 1.0);
    let gain = share * budget / 2.0 / raw.size().unwrap();
    PerturbationMap::coordinate_rank_one(space, index, direction, gain)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn conjugacy_invariants(
        x in float_vector(),
        index in -3i64..3,
        direction in float_vector(),
        share in 0.1f64..1.0,
        left in prop::sample::select(vec![0.25, 0.5, 0.8]),
        right in prop::sample::select(vec![1.5, 2.0, 4.0]),
    ) {
        prop_assume!(!direction.is_zero());
        let space = SpaceSpec::C0;
        let w = WeightSequence::step(left, right).unwrap();
        let budget = epsilon_budget(&w, space).unwrap();
        let alpha = rank_one(space, budget, index, direction, share);
        let tol = 1e-9;
        let h = conjugate_forward(&w, space, &alpha, &x, &tol).unwrap();
        let d = &h.constants;
        prop_assert_eq!(h.correction.get(0), 0.0);
        prop_assert!(h.contraction_rate().unwrap_or(0.0) <= 0.5);
        prop_assert!(norm(space, &h.correction) <= 2.0 * d.beta / (1.0 - d.s) * alpha.sup_bound.unwrap());

        let back = conjugate_inverse(&w, space, &alpha, &h.image, &tol).unwrap();
        prop_assert_eq!(back.correction.get(0), 0.0);
        let slack = 2.0 * tol + h.series_tail_bound + back.series_tail_bound;
        prop_assert!(norm(space, &(&back.image - &x)) <= slack);

        let inv = conjugate_inverse(&w, space, &alpha, &x, &tol).unwrap();
        let forth = conjugate_forward(&w, space, &alpha, &inv.image, &tol).unwrap();
        prop_assert!(norm(space, &(&forth.image - &x)) <= 2.0 * tol + inv.series_tail_bound + forth.series_tail_bound);

        let (defect, bound) = f_identity_defect(&w, space, &alpha, &x, &tol).unwrap();
        prop_assert!(defect <= bound);
    }
}
