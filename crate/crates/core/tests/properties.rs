mod common;

use approx::assert_abs_diff_eq;
use modeweaver::circuit::{
    simulate_counts, CoincidenceConfig, CountSetup, Element, Excitation, PhaseModel, ScanVariable,
};
use modeweaver::coupling::{coupler_unitary, detuned_splitting, splitting_ratio, PhaseConvention};
use modeweaver::experiments::{run_hom_dip, run_noon, HomDipConfig, NoonConfig};
use modeweaver::fock::{
    coalescence_enhancement, evolve, hom_visibility, unitarity_deviation, FockState,
    PhotonPairSource,
};
use modeweaver::wgmodes::{effective_index, grating_period, ModeId, WaveguideGeometry};
use proptest::prelude::*;

proptest! {
    #[test]
    fn splitting_ratio_is_a_probability(kappa in 0.0f64..3.0, n in 0u32..500) {
        let eta = splitting_ratio(kappa, n);
        prop_assert!((0.0..=1.0).contains(&eta));
    }

    #[test]
    fn detuning_caps_transfer(kappa in 1e-4f64..0.1, delta in -0.1f64..0.1, length in 0.0f64..500.0) {
        let eta = detuned_splitting(kappa, delta, length);
        prop_assert!(eta <= kappa * kappa / (kappa * kappa + delta * delta) + 1e-15);
        prop_assert_eq!(detuned_splitting(kappa, 0.0, length), (kappa * length).sin().powi(2));
    }

    #[test]
    fn couplers_are_unitary(eta in 0.0f64..=1.0, real in any::<bool>()) {
        let convention = if real { PhaseConvention::Real } else { PhaseConvention::Symmetric };
        let c = coupler_unitary(eta, convention).unwrap();
        prop_assert!(c.unitarity_error() < 1e-12);
        prop_assert!((c.splitting_ratio() - eta).abs() < 1e-15);
    }

    #[test]
    fn grating_period_inverts_index_difference(lambda in 400.0f64..2000.0, dn in 1e-6f64..1.0) {
        let period = grating_period(lambda, dn).unwrap();
        prop_assert!((period * dn * 1e3 - lambda).abs() <= 1e-12 * lambda);
    }

    #[test]
    fn lateral_orders_are_ordered(width in 900.0f64..2500.0, height in 150.0f64..400.0) {
        let geom = WaveguideGeometry::multimode().with_width(width).with_height(height);
        let (lo, hi) = (geom.stack.n_clad, geom.stack.n_core);
        let mut previous = hi;
        for order in 0..3 {
            if let Ok(n) = effective_index(&geom, ModeId::te(order)) {
                prop_assert!(n > lo && n < hi);
                prop_assert!(n < previous);
                previous = n;
            }
        }
    }

    #[test]
    fn index_grows_with_width(width in 400.0f64..2000.0, step in 1.0f64..200.0) {
        let geom = WaveguideGeometry::multimode();
        for order in 0..3 {
            let a = effective_index(&geom.with_width(width), ModeId::te(order));
            let b = effective_index(&geom.with_width(width + step), ModeId::te(order));
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!(b > a);
            }
        }
    }

    #[test]
    fn visibility_is_symmetric_and_bounded(eta in 0.0f64..=1.0) {
        let v = hom_visibility(eta);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!((v - hom_visibility(1.0 - eta)).abs() < 1e-12);
    }

    #[test]
    fn coalescence_ratio_ignores_coupler(eta in 0.01f64..0.99, x in 0.0f64..=1.0) {
        prop_assert!((coalescence_enhancement(eta, x).unwrap() - (1.0 + x)).abs() < 1e-10);
    }

    #[test]
    fn lossless_circuits_compile_to_unitaries(
        seed in any::<u64>(),
        etas in proptest::collection::vec(0.0f64..=1.0, 1..8),
        phases in proptest::collection::vec(-10.0f64..10.0, 1..8),
    ) {
        let m = 4;
        let mut elements = Vec::new();
        for (k, (eta, phase)) in etas.iter().zip(&phases).enumerate() {
            let a = (seed as usize + k) % m;
            let b = (a + 1 + k % (m - 1)) % m;
            elements.push(Element::BeamSplitter { channels: (a, b), eta: *eta });
            elements.push(Element::PhaseShifter { channels: vec![b], model: PhaseModel::Fixed { phase: *phase } });
        }
        let compiled = modeweaver::circuit::compile(&elements, m, 0.0).unwrap();
        prop_assert!(unitarity_deviation(compiled.unitary.matrix()) < 1e-10);
        let state = evolve(&compiled.unitary, &FockState::from_channels(m, &[0, 1, 1]).unwrap()).unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn poisson_counts_replay_exactly(seed in any::<u64>()) {
        let config = HomDipConfig::default();
        let setup = CountSetup {
            circuit: config.circuit().unwrap(),
            source: PhotonPairSource::default(),
            config: CoincidenceConfig { seed: Some(seed), ..CoincidenceConfig::default() },
            excitation: Excitation::Pair { channels: (0, 2) },
            detectors: (0, 2),
        };
        let scan = ScanVariable::Delay { channel: 2, values: vec![-100.0, 0.0, 100.0] };
        let first = simulate_counts(&setup, &scan).unwrap();
        prop_assert_eq!(&first, &simulate_counts(&setup, &scan).unwrap());
        for (_, record) in &first {
            prop_assert!(record.net >= 0.0 && record.accidentals <= record.raw);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn dip_visibility_follows_closed_form(eta in 0.05f64..0.95, x0 in 0.5f64..=1.0) {
        let config = HomDipConfig {
            eta,
            source: PhotonPairSource { intrinsic_overlap: x0, ..PhotonPairSource::default() },
            ..HomDipConfig::default()
        };
        let run = run_hom_dip(&config).unwrap();
        prop_assert!((run.scan.metric("visibility") - x0 * hom_visibility(eta)).abs() < 1e-3);
        // Symmetric about zero delay.
        let points = &run.scan.points;
        for (a, b) in points.iter().zip(points.iter().rev()) {
            prop_assert!((a.record.net - b.record.net).abs() <= 1e-9 * a.record.net.abs().max(1.0));
        }
    }

    #[test]
    fn noon_period_halves(eta in 0.2f64..0.8) {
        let run = run_noon(&NoonConfig { eta1: eta, eta2: eta, ..NoonConfig::default() }).unwrap();
        prop_assert!((run.period_ratio - 0.5).abs() < 1e-6, "ratio {}", run.period_ratio);
    }
}

#[test]
fn ideal_source_peak_doubles() {
    assert_abs_diff_eq!(
        coalescence_enhancement(0.55, 1.0).unwrap(),
        2.0,
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(
        coalescence_enhancement(0.55, 0.0).unwrap(),
        1.0,
        epsilon = 1e-12
    );
}
