use analog_sqed::analog::rabi_for_mass_ratio;
use analog_sqed::calibrate::{
    electric_linear, electric_quadratic, regime_report, AncillaSpec, GaugeTarget, Status,
};
use analog_sqed::CondensateSpec;
use proptest::prelude::*;

#[derive(Debug, Clone, Copy)]
struct Scenario {
    spec: CondensateSpec,
    ancilla: AncillaSpec,
    target: GaugeTarget,
}

fn scenario() -> impl Strategy<Value = Scenario> {
    (
        0.02..0.6f64,
        1.0..1e4f64,
        0.0..0.2f64,
        -1.2..1.2f64,
        prop::array::uniform3(-0.1..0.1f64),
        0.0..1.0f64,
    )
        .prop_map(|(eps, length, temperature, a0, a, k)| {
            let base = CondensateSpec::reference();
            let spec = CondensateSpec {
                rabi: rabi_for_mass_ratio(base.gap_coupling(), eps).unwrap(),
                system_length: length,
                ..base
            };
            Scenario {
                spec,
                ancilla: AncillaSpec {
                    condensate: base,
                    alpha: 0.1,
                    detuning: 0.1,
                    temperature,
                },
                target: GaugeTarget {
                    electric_potential: a0 * spec.energy_scale().sqrt() * 0.3,
                    vector_potential: a,
                    harmonic_wavevector: k,
                },
            }
        })
}

fn statuses(s: &Scenario) -> Vec<(String, Status)> {
    regime_report(&s.spec, &s.ancilla, &s.target)
        .checks
        .into_iter()
        .map(|c| (c.name, c.status))
        .collect()
}

/// Variants moved towards the safe side of one parameter each.
fn tightened(s: &Scenario, shrink: f64) -> Vec<Scenario> {
    let mut out = Vec::new();
    let mut t = *s;
    t.ancilla.temperature *= shrink;
    out.push(t);
    let mut t = *s;
    t.target.electric_potential *= shrink;
    out.push(t);
    for i in 0..3 {
        let mut t = *s;
        t.target.vector_potential[i] *= shrink;
        out.push(t);
    }
    let mut t = *s;
    t.target.harmonic_wavevector *= shrink;
    out.push(t);
    let mut t = *s;
    t.spec.system_length /= shrink;
    out.push(t);
    out
}

proptest! {
    #[test]
    fn tightening_never_flips_pass_to_fail(s in scenario(), shrink in 0.0..1.0f64) {
        let before = statuses(&s);
        for t in tightened(&s, shrink) {
            for ((name, a), (_, b)) in before.iter().zip(statuses(&t)) {
                prop_assert!(
                    !(*a != Status::Fail && b == Status::Fail),
                    "{name} flipped to fail"
                );
            }
        }
    }

    #[test]
    fn electric_ratio_invariant(a0 in -0.5..0.5f64) {
        prop_assume!(a0 != 0.0);
        let spec = CondensateSpec::reference();
        let target = GaugeTarget { electric_potential: a0, vector_potential: [0.0; 3], harmonic_wavevector: 0.0 };
        let ratio = electric_quadratic(&target, &spec).unwrap().omega2 / electric_linear(&target);
        let expected = a0 / (2.0 * spec.energy_scale());
        prop_assert!((ratio - expected).abs() <= 1e-15 * expected.abs());
    }
}
