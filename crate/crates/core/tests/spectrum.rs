use analog_sqed::analog::{kg_deviation, mass_relation, rabi_for_mass_ratio};
use analog_sqed::bogoliubov::{build_hamiltonian_block, dispersion, symplectic_diagonalize};
use analog_sqed::{Branch, CondensateSpec};
use proptest::prelude::*;

fn stable_spec() -> impl Strategy<Value = CondensateSpec> {
    (0.5..2.0f64, 0.5..2.0f64, 0.5..2.0f64, -0.4..0.9f64, 0.0..0.9f64).prop_map(
        |(m, n, u, ratio, eps)| {
            let up = ratio * u;
            let rabi = rabi_for_mass_ratio(n * (u - up), eps).unwrap();
            CondensateSpec {
                atom_mass: m,
                density: n,
                intra_scattering: u,
                inter_scattering: up,
                rabi,
                dimension: 1,
                system_length: 1000.0,
            }
        },
    )
}

fn momenta(spec: &CondensateSpec, count: usize) -> Vec<f64> {
    let (lo, hi) = (1e-3f64.ln(), 10f64.ln());
    (0..count)
        .map(|i| spec.momentum_scale() * (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diagonalization_matches_closed_form(spec in stable_spec()) {
        for p in momenta(&spec, 40) {
            let sol = symplectic_diagonalize(&build_hamiltonian_block(&spec, p).unwrap()).unwrap();
            prop_assert!(sol.symplectic_residual() < 1e-10);
            let (e0, em) = dispersion(&spec, p).unwrap();
            prop_assert!((sol.energy(Branch::Gapless) - e0).abs() <= 1e-9 * e0);
            prop_assert!((sol.energy(Branch::Massive) - em).abs() <= 1e-9 * em);
        }
    }

    #[test]
    fn gap_is_rest_energy(spec in stable_spec()) {
        let (_, gap) = dispersion(&spec, 0.0).unwrap();
        let rest = mass_relation(&spec).unwrap() * spec.energy_scale();
        prop_assert!((gap - rest).abs() <= 1e-10 * rest.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn kg_deviation_grows_with_momentum(eps in 0.02..0.5f64) {
        let base = CondensateSpec::reference();
        let spec = CondensateSpec { rabi: rabi_for_mass_ratio(base.gap_coupling(), eps).unwrap(), ..base };
        let mcs = spec.momentum_scale();
        let mut last = 0.0;
        for i in 0..60 {
            let p = mcs * 0.1 * 100f64.powf(i as f64 / 59.0);
            let d = kg_deviation(&spec, p).unwrap();
            prop_assert!(d >= last, "eps {eps}: deviation fell at p = {p}");
            last = d;
        }
    }
}

#[test]
fn spectrum_pairs_and_low_momentum_agreement() {
    let base = CondensateSpec::reference();
    let spec = CondensateSpec { rabi: rabi_for_mass_ratio(base.gap_coupling(), 0.1).unwrap(), ..base };
    let mcs = spec.momentum_scale();
    for p in [0.01, 0.05, 0.1] {
        assert!(kg_deviation(&spec, p * mcs).unwrap() < 0.01);
    }
    assert!(kg_deviation(&spec, 10.0 * mcs).unwrap() > 0.1);
}
