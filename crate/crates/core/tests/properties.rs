use std::sync::Arc;

use proptest::prelude::*;

use ramsey_tg::ramsey::semiclassical_fringe;
use ramsey_tg::scatter::{scattering_amplitudes, wall_well_reflection, FieldGeometry};
use ramsey_tg::specfn::OscillatorBasis;
use ramsey_tg::tgmap::{
    antisymmetric_unit, spinor_bose_amplitude, spinor_slater, HarmonicOrbital, Internal,
    ParticleConfiguration, SpinorOrbital,
};

fn spinors(n: usize) -> Vec<SpinorOrbital> {
    let trap = OscillatorBasis::new(1.0, 0.5, 0.0, 0.0).unwrap();
    let kicked = OscillatorBasis::new(1.0, 0.8, -0.3, 1.4).unwrap();
    (0..n)
        .map(|i| {
            SpinorOrbital::new(
                i,
                Some(Arc::new(HarmonicOrbital { n: i, basis: kicked })),
                Some(Arc::new(HarmonicOrbital { n: i + 1, basis: trap })),
            )
            .unwrap()
        })
        .collect()
}

fn label() -> impl Strategy<Value = Internal> {
    prop_oneof![Just(Internal::Ground), Just(Internal::Excited)]
}

fn configuration() -> impl Strategy<Value = ParticleConfiguration> {
    (2usize..=3).prop_flat_map(|n| {
        (
            prop::collection::vec(-3.0f64..3.0, n),
            prop::collection::vec(label(), n),
        )
            .prop_map(|(x, b)| ParticleConfiguration::new(x, b).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn flux_is_conserved(
        k in 0.5f64..5.0,
        frac in 0.0f64..1.0,
        rabi in 0.0f64..3.0,
        l in 0.1f64..3.0,
        gap in 0.0f64..10.0,
    ) {
        // keep the excited channel open: δ > −k²/2
        let det = -0.45 * k * k + frac * (5.0 + 0.45 * k * k);
        let g = FieldGeometry::new(l, gap, rabi, det).unwrap();
        let a = scattering_amplitudes(k, &g).unwrap();
        prop_assert!(a.channel.excited_open);
        prop_assert!(a.flux_defect < 1e-10, "defect {}", a.flux_defect);
    }
}

proptest! {
    #[test]
    fn closed_channel_flux(k in 0.3f64..2.0, extra in 0.01f64..0.6, rabi in 0.0f64..1.0, l in 0.1f64..2.0, gap in 0.0f64..2.0) {
        let det = -0.5 * k * k - extra;
        let g = FieldGeometry::new(l, gap, rabi, det).unwrap();
        let a = scattering_amplitudes(k, &g).unwrap();
        prop_assert!(!a.channel.excited_open);
        prop_assert!(a.flux_defect < 1e-10, "defect {}", a.flux_defect);
    }

    #[test]
    fn scl_is_even_and_bounded(d in -50.0f64..50.0, rabi in 0.0f64..10.0, tau in 0.01f64..3.0, t in 0.0f64..30.0) {
        let p = semiclassical_fringe(d, rabi, tau, t);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert_eq!(p, semiclassical_fringe(-d, rabi, tau, t));
    }

    #[test]
    fn wall_well_has_unit_modulus(depth in 0.0f64..1e6, width in 1e-4f64..5.0, e in 1e-3f64..10.0) {
        let r = wall_well_reflection(depth, width, e).unwrap();
        prop_assert!((r.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bose_symmetry_and_fermi_antisymmetry(cfg in configuration()) {
        let sp = spinors(cfg.len());
        let bose = spinor_bose_amplitude(&sp, &cfg).unwrap();
        let fermi = spinor_slater(&sp, &cfg).unwrap();
        prop_assert!((bose.norm() - fermi.norm()).abs() < 1e-12 || antisymmetric_unit(&cfg.positions) == 0);
        for i in 0..cfg.len() {
            for j in i + 1..cfg.len() {
                let sw = cfg.swapped(i, j);
                prop_assert!((spinor_bose_amplitude(&sp, &sw).unwrap() - bose).norm() < 1e-12);
                prop_assert!((spinor_slater(&sp, &sw).unwrap() + fermi).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn contact_node_is_linear(x in -2.0f64..2.0, b in label()) {
        let sp = spinors(2);
        let at = |eps: f64| {
            let cfg = ParticleConfiguration::new(vec![x, x + eps], vec![b, b]).unwrap();
            spinor_bose_amplitude(&sp, &cfg).unwrap()
        };
        let (a1, a2) = (at(1e-6), at(2e-6));
        // nonzero slope; halving the distance halves the amplitude
        prop_assert!(a1.norm() / 1e-6 > 1e-3);
        prop_assert!((a2 - 2.0 * a1).norm() <= 1e-4 * a2.norm());
    }
}

#[test]
fn excited_amplitude_is_first_order_in_rabi() {
    let g = FieldGeometry::new(1.5, 4.0, 0.0, 0.3).unwrap();
    let mut prev: Option<f64> = None;
    for rabi in [1e-2, 1e-3, 1e-4, 1e-5] {
        let t = scattering_amplitudes(1.7, &g.with_rabi(rabi)).unwrap().t_ge.norm();
        if let Some(p) = prev {
            assert!((p / t - 10.0).abs() < 1e-2, "ratio {}", p / t);
        }
        prev = Some(t);
    }
}
