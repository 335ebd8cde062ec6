//! Randomized invariants: structural facts the closed forms, the solver and
//! the discretizations must satisfy for every admissible parameter set, not
//! just the pinned reference points.

use dormwave_core::harness::fmt_sig;
use dormwave_core::model::{ModelParams, OffspringLaw, Variant};
use dormwave_core::particles::{additive_martingale, Flag, Particle, Population};
use dormwave_core::pde::{
    front_position, front_speed, heaviside_ic, integrate, FieldPair, FrontTrace, Grid1D,
    IntegrateOptions,
};
use dormwave_core::wavespeed::{
    critical_speed, determinant_poly, diagonal_entries, eigen_matrix, perron_eigenvector,
    speed_function, speed_function_via_eigensolve, SweepAxis,
};
use proptest::prelude::*;

fn dormant_variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::SeedBank), Just(Variant::Spore)]
}

fn any_variant() -> impl Strategy<Value = Variant> {
    prop_oneof![
        Just(Variant::Classical),
        Just(Variant::SeedBank),
        Just(Variant::Spore),
    ]
}

fn binary_params(variant: Variant, c: f64, cp: f64, kappa: f64) -> ModelParams {
    match variant {
        Variant::Classical => ModelParams::classical(kappa, OffspringLaw::binary()).unwrap(),
        v => ModelParams::new(v, c, cp, kappa, OffspringLaw::binary()).unwrap(),
    }
}

fn offspring_law() -> impl Strategy<Value = OffspringLaw> {
    proptest::collection::vec(0.0f64..1.0, 1..6)
        .prop_filter("mass must be positive", |w| w.iter().sum::<f64>() > 1e-3)
        .prop_map(|w| {
            let total: f64 = w.iter().sum();
            OffspringLaw::new(w.into_iter().map(|p| p / total).collect()).unwrap()
        })
}

fn matrix_scale(m: [[f64; 2]; 2]) -> f64 {
    1.0 + m.iter().flatten().fold(0f64, |acc, &e| acc.max(e.abs()))
}

proptest! {
    #[test]
    fn selection_is_nonpositive_and_linearizes_at_one(
        law in offspring_law(),
        kappa in 0.1f64..5.0,
        u in 0.0f64..=1.0,
        w in 1e-6f64..1e-3,
    ) {
        let params = ModelParams::new(Variant::SeedBank, 1.0, 1.0, kappa, law).unwrap();
        let s = params.effective_selection();

        prop_assert!(params.selection_term(u).unwrap() <= 1e-12);
        prop_assert!(params.selection_term(0.0).unwrap().abs() <= 1e-12);
        prop_assert!(params.selection_term(1.0).unwrap().abs() <= 1e-11 * kappa.max(1.0));

        // One step below fixation the deficit w = 1 - u grows at rate s, up
        // to the quadratic remainder bounded by the second derivative.
        let growth = -params.selection_term(1.0 - w).unwrap() / w;
        let curvature: f64 = params
            .law
            .probs()
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let k = (i + 1) as f64;
                params.kappa * p * (k + 1.0) * k
            })
            .sum();
        prop_assert!((growth - s).abs() <= curvature * w + 1e-9);
    }

    #[test]
    fn closed_form_and_eigensolve_agree(
        variant in any_variant(),
        c in 0.05f64..5.0,
        cp in 0.05f64..5.0,
        kappa in 0.1f64..5.0,
        mu in -8.0f64..-0.05,
    ) {
        let params = binary_params(variant, c, cp, kappa);
        let a = speed_function(mu, &params).unwrap();
        let b = speed_function_via_eigensolve(mu, &params).unwrap();
        let tol = 1e-10 * (1.0 + a.lambda_plus.abs());
        prop_assert!((a.lambda_plus - b.lambda_plus).abs() <= tol);
        if variant != Variant::Classical {
            // The classical closed form reports its single branch twice,
            // while the 2x2 embedding pads the spectrum with a zero row, so
            // the lower branches only correspond for the dormancy variants.
            prop_assert!((a.lambda_minus - b.lambda_minus).abs() <= tol);
        }
        prop_assert!(a.discriminant >= 0.0);
        prop_assert!(a.lambda_plus >= a.lambda_minus);
        prop_assert!(a.lambda_plus > 0.0);
    }

    #[test]
    fn determinant_vanishes_on_both_branches(
        variant in any_variant(),
        c in 0.05f64..5.0,
        cp in 0.05f64..5.0,
        kappa in 0.1f64..5.0,
        mu in -8.0f64..-0.05,
    ) {
        let params = binary_params(variant, c, cp, kappa);
        let eval = speed_function(mu, &params).unwrap();
        for lambda in [eval.lambda_plus, eval.lambda_minus] {
            let scale = matrix_scale(eigen_matrix(mu, lambda, &params));
            prop_assert!(determinant_poly(mu, lambda, &params).abs() <= 1e-11 * scale * scale);
        }
    }

    #[test]
    fn perron_vector_is_positive_and_in_the_kernel(
        variant in dormant_variant(),
        c in 0.01f64..5.0,
        cp in 0.01f64..5.0,
        kappa in 0.1f64..5.0,
        mu in -8.0f64..-0.05,
    ) {
        let params = binary_params(variant, c, cp, kappa);
        let (d1, d2) = perron_eigenvector(mu, &params).unwrap();
        prop_assert!(d1 > 0.0 && d2 == 1.0);

        let eval = speed_function(mu, &params).unwrap();
        let m = eigen_matrix(mu, eval.lambda_plus, &params);
        let scale = matrix_scale(m) * (1.0 + d1);
        prop_assert!((m[0][0] * d1 + m[0][1] * d2).abs() <= 1e-9 * scale);
        prop_assert!((m[1][0] * d1 + m[1][1] * d2).abs() <= 1e-9 * scale);

        let (fa, fd) = diagonal_entries(mu, &params).unwrap();
        prop_assert!(fa < 0.0 && fd < 0.0);
    }

    #[test]
    fn critical_speed_is_the_global_minimum(
        variant in dormant_variant(),
        c in 0.05f64..4.0,
        cp in 0.05f64..4.0,
        kappa in 0.2f64..4.0,
        probe in -60.0f64..-0.01,
    ) {
        let params = binary_params(variant, c, cp, kappa);
        let crit = critical_speed(&params).unwrap();
        prop_assert!(crit.lambda_star > 0.0);
        prop_assert!(crit.mu_star > -64.0 && crit.mu_star < 0.0);
        prop_assert!(crit.det_residual.abs() <= 1e-9);
        prop_assert!(crit.eigvec.0 > 0.0 && crit.eigvec.1 > 0.0);

        let at_probe = speed_function(probe, &params).unwrap().lambda_plus;
        prop_assert!(at_probe >= crit.lambda_star - 1e-9);
    }

    #[test]
    fn step_fronts_stay_bounded_and_ordered(
        variant in any_variant(),
        c in 0.2f64..2.0,
        cp in 0.2f64..2.0,
        kappa in 0.5f64..2.0,
        t_final in 0.05f64..0.3,
    ) {
        let params = binary_params(variant, c, cp, kappa);
        let grid = Grid1D::from_range(-4.0, 4.0, 0.25).unwrap();
        let run = integrate(
            &params,
            heaviside_ic(grid).unwrap(),
            t_final,
            &IntegrateOptions::default(),
        )
        .unwrap();

        for field in [&run.field.u, &run.field.v] {
            prop_assert!(field.iter().all(|x| x.is_finite() && (0.0..=1.0).contains(x)));
            prop_assert!(field.windows(2).all(|w| w[1] >= w[0] - 1e-10));
        }
        prop_assert_eq!(run.field.u[0], 0.0);
        prop_assert_eq!(*run.field.u.last().unwrap(), 1.0);
    }

    #[test]
    fn front_ops_recover_synthetic_data(
        slope in -2.0f64..2.0,
        intercept in -5.0f64..5.0,
        level in 0.05f64..0.95,
    ) {
        let times: Vec<f64> = (0..=10).map(|i| 0.1 * i as f64).collect();
        let positions: Vec<f64> = times.iter().map(|&t| intercept + slope * t).collect();
        let trace = FrontTrace { level: 0.5, times, positions };
        let (fitted, stderr) = front_speed(&trace, 0.0, 1.0).unwrap();
        prop_assert!((fitted - slope).abs() <= 1e-9);
        prop_assert!(stderr <= 1e-9);

        // A linear ramp from 0 at x = -4 to 1 at x = 4 crosses `level` at
        // exactly 8 * level - 4.
        let grid = Grid1D::from_range(-4.0, 4.0, 0.25).unwrap();
        let ramp = FieldPair::from_fn(grid, |x| (x + 4.0) / 8.0, |x| (x + 4.0) / 8.0);
        let hit = front_position(&ramp, dormwave_core::pde::Component::U, level).unwrap();
        prop_assert!((hit - (8.0 * level - 4.0)).abs() <= 1e-9);
    }

    #[test]
    fn fmt_sig_round_trips(x in any::<f64>()) {
        prop_assume!(x.is_finite() && x != 0.0);
        let exact: f64 = fmt_sig(x, 17).parse().unwrap();
        prop_assert_eq!(exact.to_bits(), x.to_bits());

        let twelve: f64 = fmt_sig(x, 12).parse().unwrap();
        prop_assert!((twelve - x).abs() <= 1e-11 * x.abs());
    }

    #[test]
    fn offspring_samples_stay_in_range(
        law in offspring_law(),
        seed in any::<u64>(),
    ) {
        let len = law.probs().len();
        prop_assert!(law.mean_extra() >= 1.0 - 1e-12);
        prop_assert!(law.mean_extra() <= len as f64 + 1e-12);
        let mut rng = dormwave_core::rng::replicate_rng(seed, 0);
        for _ in 0..100 {
            let k = law.sample_extra(&mut rng);
            prop_assert!((1..=len).contains(&k));
        }
    }

    #[test]
    fn martingale_is_linear_in_the_weights(
        positions in proptest::collection::vec(-5.0f64..5.0, 1..12),
        mu in -3.0f64..-0.1,
        lambda in 0.1f64..2.0,
        d1 in 0.1f64..5.0,
        d2 in 0.1f64..5.0,
        a in 0.5f64..3.0,
    ) {
        let particles: Vec<Particle> = positions
            .iter()
            .enumerate()
            .map(|(i, &position)| Particle {
                position,
                flag: if i % 2 == 0 { Flag::Active } else { Flag::Dormant },
            })
            .collect();
        let pop = Population { t: 1.25, particles };
        let base = additive_martingale(&pop, mu, lambda, (d1, d2));
        let scaled = additive_martingale(&pop, mu, lambda, (a * d1, a * d2));
        prop_assert!((scaled - a * base).abs() <= 1e-12 * scaled.abs().max(1.0));
    }
}

#[test]
fn names_round_trip() {
    for v in Variant::ALL {
        assert_eq!(v.name().parse::<Variant>().unwrap(), v);
    }
    for axis in SweepAxis::ALL {
        assert_eq!(axis.name().parse::<SweepAxis>().unwrap(), axis);
    }
    assert!("krill".parse::<Variant>().is_err());
}
