use proptest::prelude::*;
use qpulse_core::envelope::{drag_quadrature, make_gaussian, make_square};
use qpulse_core::hamiltonian::{three_level_rwa, two_level_rwa};
use qpulse_core::propagate::{propagate, propagate_unitary, transition_probability, InitialState};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn norm_is_conserved(a0 in 0.05f64..1.0, anharm in -3.0f64..-0.2, sigma in 2.0f64..8.0) {
        let env = drag_quadrature(&make_gaussian(a0, sigma, 4.0 * sigma, true).unwrap(), anharm).unwrap();
        let model = three_level_rwa(anharm, 2f64.sqrt(), &env.as_complex()).unwrap();
        let r = propagate(&model, env.duration(), None, &InitialState::Basis(0)).unwrap();
        for n in 0..r.times.len() {
            let total: f64 = r.populations.iter().map(|p| p[n]).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn propagators_compose(a0 in 0.05f64..1.0, delta in -0.5f64..0.5, sigma in 2.0f64..8.0, n in 16usize..400) {
        let env = make_gaussian(a0, sigma, 4.0 * sigma, true).unwrap();
        let t = env.duration();
        let model = two_level_rwa(delta, &env).unwrap();
        let whole = propagate_unitary(&model, 0.0, t, Some(2 * n)).unwrap();
        let first = propagate_unitary(&model, 0.0, t / 2.0, Some(n)).unwrap();
        let second = propagate_unitary(&model, t / 2.0, t, Some(n)).unwrap();
        prop_assert!(second.matmul(&first).max_abs_diff(&whole) < 1e-9);
    }

    #[test]
    fn resonant_square_is_exact(a0 in 0.0f64..4.0, t in 0.1f64..20.0) {
        let model = two_level_rwa(0.0, &make_square(a0, t).unwrap()).unwrap();
        let u = propagate_unitary(&model, 0.0, t, None).unwrap();
        let p = transition_probability(&u, 0, 1).unwrap();
        prop_assert!((p - (a0 * t / 2.0).sin().powi(2)).abs() < 1e-12);
    }
}
