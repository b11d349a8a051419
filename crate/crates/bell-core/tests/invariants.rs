//! Property tests for the structural invariants of the state machinery and
//! the Bell functionals.

use approx::assert_relative_eq;
use bell_core::dp::{bell_dp, DpGeometry};
use bell_core::gaussian::{
    effective_decomposition, evolve_cov, make_twb_cov, wigner_of_cov, ChannelParams, TwbParams,
};
use bell_core::hd::{bell_hd, HdSettings};
use bell_core::ips::{ips_coefficients, ips_state, IpsParams};
use bell_core::gaussian::TwbWignerForm;
use bell_core::ps::{bell_ps, correlator_generic, e_twb, PsAngles};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Splitting the exposure never changes the endpoint:
    /// evolving by t1 then t2 equals evolving by t1 + t2.
    #[test]
    fn channel_evolution_is_a_semigroup(
        r in 0.0f64..2.0,
        gt1 in 0.0f64..1.0,
        gt2 in 0.0f64..1.0,
        n in 0.0f64..0.5,
    ) {
        let sigma = make_twb_cov(&TwbParams::new(r).unwrap());
        let step1 = ChannelParams::symmetric(gt1, n).unwrap();
        let step2 = ChannelParams::symmetric(gt2, n).unwrap();
        let joint = ChannelParams::symmetric(gt1 + gt2, n).unwrap();
        let two_step = evolve_cov(&evolve_cov(&sigma, &step1), &step2);
        let one_step = evolve_cov(&sigma, &joint);
        let diff = (two_step.matrix() - one_step.matrix()).abs().max();
        prop_assert!(diff < 1e-12, "semigroup violated by {diff}");
    }

    /// The cross block decays monotonically in the exposure and the diagonal
    /// approaches the environment variance.
    #[test]
    fn decoherence_is_monotone(r in 0.1f64..1.5, n in 0.0f64..0.4) {
        let sigma = make_twb_cov(&TwbParams::new(r).unwrap());
        let mut last_b = f64::INFINITY;
        for gt in [0.0, 0.1, 0.5, 1.0, 3.0] {
            let blocks = evolve_cov(&sigma, &ChannelParams::symmetric(gt, n).unwrap())
                .blocks()
                .unwrap();
            prop_assert!(blocks.b < last_b || gt == 0.0);
            last_b = blocks.b;
        }
        let far = evolve_cov(&sigma, &ChannelParams::symmetric(40.0, n).unwrap())
            .blocks()
            .unwrap();
        prop_assert!((far.a1 - (1.0 + 2.0 * n)).abs() < 1e-12);
    }

    /// Squeezed-thermal decomposition reconstructs the covariance it came from.
    #[test]
    fn decomposition_round_trip(
        r in 0.0f64..1.8,
        gt in 0.0f64..0.5,
        n1 in 0.0f64..0.4,
        n2 in 0.0f64..0.4,
    ) {
        let evolved = evolve_cov(
            &make_twb_cov(&TwbParams::new(r).unwrap()),
            &ChannelParams::new(gt, gt, n1, n2).unwrap(),
        );
        let decomp = effective_decomposition(&evolved).unwrap();
        prop_assert!(decomp.is_physical());
        let rebuilt = decomp.reconstruct_cov();
        let diff = (rebuilt.matrix() - evolved.matrix()).abs().max();
        prop_assert!(diff < 1e-9, "round trip off by {diff}");
    }

    /// Normalization survives the subtraction map wherever it is defined, and
    /// the click probability stays a probability.
    #[test]
    fn ips_keeps_normalization_and_probability(
        r in 0.1f64..1.5,
        tau in 0.5f64..0.999,
        gt in 0.0f64..0.2,
        n in 0.0f64..0.3,
    ) {
        let sigma = evolve_cov(
            &make_twb_cov(&TwbParams::new(r).unwrap()),
            &ChannelParams::symmetric(gt, n).unwrap(),
        );
        let (state, p11) = ips_state(
            &wigner_of_cov(&sigma).unwrap(),
            &IpsParams::from_tau(tau).unwrap(),
        )
        .unwrap();
        prop_assert!(p11 > 0.0 && p11 <= 1.0);
        prop_assert!((state.integral() - 1.0).abs() < 1e-9);
    }

    /// The twin-beam correlator is monotone in the squeezing for equatorial
    /// angles and bounded by one in magnitude.
    #[test]
    fn e_twb_is_bounded_and_monotone(r in 0.0f64..3.0, ta in 0.0f64..3.15, tb in -3.15f64..3.15) {
        let params = TwbParams::new(r).unwrap();
        let e = e_twb(&params, ta, tb);
        prop_assert!(e.abs() <= 1.0 + 1e-12);
        let half_pi = std::f64::consts::FRAC_PI_2;
        let bumped = TwbParams::new(r + 0.1).unwrap();
        prop_assert!(e_twb(&bumped, half_pi, half_pi) >= e_twb(&params, half_pi, half_pi));
    }

    /// All three Bell functionals respect the quantum bound on physical
    /// states, and the violation flag matches the local bound.
    #[test]
    fn bell_values_respect_tsirelson(
        r in 0.0f64..2.0,
        gt in 0.0f64..0.1,
        n in 0.0f64..0.2,
        tau in 0.8f64..0.9999,
    ) {
        let tsirelson = 2.0 * std::f64::consts::SQRT_2 + 1e-9;
        let sigma = evolve_cov(
            &make_twb_cov(&TwbParams::new(r).unwrap()),
            &ChannelParams::symmetric(gt, n).unwrap(),
        );
        let gaussian = wigner_of_cov(&sigma).unwrap();

        let dp = bell_dp(&gaussian, &DpGeometry::from_j(1.6e-3).unwrap());
        prop_assert!(dp.value.abs() < tsirelson);
        prop_assert_eq!(dp.violated, dp.value.abs() > 2.0);

        let hd = bell_hd(&gaussian, &HdSettings::default());
        prop_assert!(hd.value.abs() <= 2.0 + 1e-12);

        let ps = bell_ps(|a, b| correlator_generic(&gaussian, a, b), &PsAngles::default());
        prop_assert!(ps.value.abs() < tsirelson);

        if r > 0.05 {
            let (ips, _) = ips_state(&gaussian, &IpsParams::from_tau(tau).unwrap()).unwrap();
            prop_assert!(bell_dp(&ips, &DpGeometry::from_j(1.6e-3).unwrap()).value.abs() < tsirelson);
            prop_assert!(bell_hd(&ips, &HdSettings::default()).value.abs() < tsirelson);
            prop_assert!(
                bell_ps(|a, b| correlator_generic(&ips, a, b), &PsAngles::default())
                    .value
                    .abs()
                    < tsirelson
            );
        }
    }

    /// Correlators of every state stay within [-1, 1].
    #[test]
    fn correlators_are_bounded(
        r in 0.05f64..1.5,
        tau in 0.7f64..0.999,
        ta in -3.15f64..3.15,
        tb in -3.15f64..3.15,
    ) {
        let gaussian = wigner_of_cov(&make_twb_cov(&TwbParams::new(r).unwrap())).unwrap();
        let (ips, _) = ips_state(&gaussian, &IpsParams::from_tau(tau).unwrap()).unwrap();
        for state in [&gaussian, &ips] {
            prop_assert!(correlator_generic(state, ta, tb).abs() <= 1.0 + 1e-9);
        }
    }
}

/// p11 grows as the effective transmissivity falls from one and vanishes in
/// the perfect-transmission limit.
#[test]
fn p11_limit_behavior() {
    let form = TwbWignerForm::from_twb(&TwbParams::new(0.7).unwrap());
    let mut last = 0.0;
    for tau in [0.9999, 0.999, 0.99, 0.9, 0.7, 0.5] {
        let p11 = ips_coefficients(&form, &IpsParams::from_tau(tau).unwrap())
            .unwrap()
            .p11();
        assert!(p11 > last);
        last = p11;
    }
    let near_one = ips_coefficients(&form, &IpsParams::from_tau(1.0 - 1e-9).unwrap())
        .unwrap()
        .p11();
    assert!(near_one < 1e-15);
}

/// Smearing with unit efficiency is the identity on the correlator.
#[test]
fn unit_efficiency_smearing_is_identity() {
    let state = wigner_of_cov(&make_twb_cov(&TwbParams::new(0.9).unwrap())).unwrap();
    let a = bell_core::hd::sign_correlator(&state, 0.3, -0.2, 1.0);
    let b = bell_core::hd::sign_correlator(&state, 0.3, -0.2, 1.0 - 1e-15);
    assert_relative_eq!(a, b, epsilon = 1e-12);
}
