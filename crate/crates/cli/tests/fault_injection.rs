use analog_sqed::calibrate::Status;
use analog_sqed_cli::config::ScenarioConfig;
use analog_sqed_cli::validate;

type Mutation = (&'static str, &'static str, fn(&mut ScenarioConfig));

/// Each mutation pushes one field past its bound; the named section must fail.
const FAULTS: &[Mutation] = &[
    ("condensate.atom_mass", "condensate", |c| c.condensate.atom_mass = 0.0),
    ("condensate.density", "condensate", |c| c.condensate.density = -1.0),
    ("condensate.intra_scattering", "condensate.stability", |c| c.condensate.intra_scattering = 0.4),
    ("condensate.inter_scattering", "condensate.stability", |c| c.condensate.inter_scattering = -1.5),
    ("condensate.rabi", "condensate.stability", |c| c.condensate.rabi = 0.01),
    ("condensate.dimension", "condensate", |c| c.condensate.dimension = 4),
    ("condensate.system_length", "regime.rabi_window", |c| c.condensate.system_length = 1.0),
    ("ancilla.alpha", "ancilla", |c| c.ancilla.alpha = 1.2),
    ("ancilla.temperature", "regime.temperature", |c| c.ancilla.temperature = 0.06),
    ("ancilla.detuning", "ancilla", |c| c.ancilla.detuning = f64::NAN),
    ("ancilla.condensate.rabi", "ancilla.condensate", |c| c.ancilla.condensate.rabi = 0.3),
    ("gauge.electric_potential", "gauge", |c| c.gauge.electric_potential = 0.6),
    ("gauge.vector_potential", "regime.vector_rabi", |c| c.gauge.vector_potential[1] = 0.05),
    ("gauge.harmonic_wavevector", "gauge", |c| c.gauge.harmonic_wavevector = -0.1),
    ("fock.mode_count", "fock", |c| c.fock.mode_count = 0),
    ("fock.occupation_cutoff", "fock", |c| c.fock.occupation_cutoff = 1),
    ("fock.mode_energies", "fock", |c| c.fock.mode_energies = vec![-1.0]),
    ("fock.charge_unit", "fock", |c| c.fock.charge_unit = f64::INFINITY),
    ("fock.quadratic_strength", "fock.dt", |c| c.fock.quadratic_strength = -10.0),
    ("fock.dt", "fock.dt", |c| c.fock.dt = 0.1),
    ("fock.total_time", "fock", |c| c.fock.total_time = 0.0),
    ("grids.momentum_points", "grids.momentum_points", |c| c.grids.momentum_points = 1),
    ("grids.momentum_min", "grids.momentum_min", |c| c.grids.momentum_min = 0.0),
    ("grids.momentum_max", "grids.momentum_max", |c| c.grids.momentum_max = 1e-4),
    ("grids.alphas", "grids.alphas", |c| c.grids.alphas.push(0.2)),
    ("grids.fg_wavevectors", "grids.fg_wavevectors", |c| c.grids.fg_wavevectors.push(-1.0)),
    ("grids.scan_lambdas", "grids.scan_lambdas", |c| c.grids.scan_lambdas.clear()),
    ("grids.locality_bandwidths", "grids.locality_bandwidths", |c| c.grids.locality_bandwidths.reverse()),
    ("grids.jitter", "grids.jitter", |c| c.grids.jitter = 0.5),
    ("grids.jitter_trials", "grids.jitter_trials", |c| c.grids.jitter_trials = 0),
    ("output.directory", "output.directory", |c| c.output.directory = "".into()),
];

#[test]
fn default_config_is_valid() {
    let report = validate(&ScenarioConfig::default_config());
    assert!(report.pass, "{}", report.render());
    assert!(report.findings.iter().all(|f| f.status == Status::Pass), "{}", report.render());
}

#[test]
fn every_fault_is_caught_in_its_section() {
    for (field, section, mutate) in FAULTS {
        let mut cfg = ScenarioConfig::default_config();
        mutate(&mut cfg);
        let report = validate(&cfg);
        assert!(!report.pass, "{field}: not caught\n{}", report.render());
        assert!(
            report.failures().any(|f| f.section == *section),
            "{field}: expected failure in {section}\n{}",
            report.render()
        );
    }
}

#[test]
fn positive_rabi_names_the_mass_relation() {
    let mut cfg = ScenarioConfig::default_config();
    cfg.condensate.rabi = 0.01;
    let report = validate(&cfg);
    let msg: Vec<_> = report.failures().map(|f| f.message.clone()).collect();
    assert!(msg.iter().any(|m| m.contains("M^2/m^2")), "{msg:?}");
}

#[test]
fn heavy_mass_ratio_warns() {
    let mut cfg = ScenarioConfig::default_config();
    let g = cfg.condensate.gap_coupling();
    cfg.condensate.rabi = analog_sqed::analog::rabi_for_mass_ratio(g, 0.5).unwrap();
    let report = validate(&cfg);
    let f = report.findings.iter().find(|f| f.section == "regime.mass_ratio").unwrap();
    assert_eq!(f.status, Status::Warn);
}
