use proptest::prelude::*;
use qpulse_core::calibrate::{
    cancellation_objective, cancellation_search, default_grids, effective_tomography,
};
use qpulse_core::hamiltonian::{cr_effective, CrCoefficients};

fn coefficients() -> impl Strategy<Value = CrCoefficients> {
    prop::array::uniform7(-0.1f64..0.1).prop_map(|w| CrCoefficients {
        w_ix: w[0],
        w_iy: w[1],
        w_iz: w[2],
        w_zi: w[3],
        w_zx: w[4],
        w_zy: w[5],
        w_zz: w[6],
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tomography_inverts_the_model(c in coefficients(), frac in 0.05f64..0.99) {
        // ‖H‖ ≤ Σ|w|/2, so τ = frac·(π/2)/‖H‖ keeps ‖H‖τ < π/2
        let norm: f64 = c.terms().iter().map(|(_, _, w)| w.abs() / 2.0).sum();
        let tau = frac * std::f64::consts::FRAC_PI_2 / norm.max(1e-3);
        let t = effective_tomography(&cr_effective(&c, 1).unwrap(), tau).unwrap();
        for ((_, _, got), (_, _, want)) in t.coefficients.terms().iter().zip(c.terms()) {
            prop_assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn search_beats_every_grid_point_and_is_deterministic(c in coefficients()) {
        let (amps, phases) = default_grids(&c);
        let (amps, phases): (Vec<f64>, Vec<f64>) = (amps.into_iter().step_by(4).collect(), phases.into_iter().step_by(3).collect());
        let r = cancellation_search(&c, &amps, &phases, 2).unwrap();
        for &a in &amps {
            for &p in &phases {
                prop_assert!(r.residual <= cancellation_objective(&c, a, p).unwrap());
            }
        }
        prop_assert_eq!(r, cancellation_search(&c, &amps, &phases, 2).unwrap());
    }
}
