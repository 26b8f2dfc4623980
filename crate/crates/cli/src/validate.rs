//! Pre-flight validation: every module invariant, reported per section.

use crate::config::ScenarioConfig;
use analog_sqed::analog::AnalogParams;
use analog_sqed::bogoliubov::stability_report;
use analog_sqed::calibrate::{regime_report, Status};
use analog_sqed::kernel::ALPHA_WINDOW;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    /// Dotted config path, e.g. `condensate` or `grids.alphas`.
    pub section: String,
    pub status: Status,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.status == Status::Fail)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for f in &self.findings {
            let tag = match f.status {
                Status::Pass => "ok  ",
                Status::Warn => "warn",
                Status::Fail => "FAIL",
            };
            out.push_str(&format!("{tag} {:<28} {}\n", f.section, f.message));
        }
        out.push_str(if self.pass { "valid\n" } else { "invalid\n" });
        out
    }
}

struct Collector(Vec<Finding>);

impl Collector {
    fn push(&mut self, section: &str, status: Status, message: impl Into<String>) {
        self.0.push(Finding {
            section: section.into(),
            status,
            message: message.into(),
        });
    }

    fn result<E: std::fmt::Display>(&mut self, section: &str, r: Result<(), E>) -> bool {
        match r {
            Ok(()) => {
                self.push(section, Status::Pass, "ok");
                true
            }
            Err(e) => {
                self.push(section, Status::Fail, e.to_string());
                false
            }
        }
    }

    fn require(&mut self, section: &str, ok: bool, message: impl Into<String>) -> bool {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.push(section, status, message);
        ok
    }
}

fn finite_all(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

pub fn validate(cfg: &ScenarioConfig) -> ValidationReport {
    let mut c = Collector(Vec::new());

    let spec_ok = c.result("condensate", cfg.condensate.validate());
    let stability = stability_report(&cfg.condensate);
    for v in &stability.violations {
        c.push(
            "condensate.stability",
            Status::Fail,
            format!("{v} (real mass needs M^2/m^2 = -4 rabi (n(U-U') - rabi)/(n(U-U') - 2 rabi)^2 >= 0)"),
        );
    }
    for n in &stability.notes {
        c.push("condensate.stability", Status::Warn, n.clone());
    }
    let stable = spec_ok && stability.stable;
    if stable {
        if let Ok(params) = AnalogParams::from_spec(&cfg.condensate) {
            for w in params.warnings() {
                c.push("condensate.analog", Status::Warn, w);
            }
        }
    }

    let ancilla_stable = c.result("ancilla.condensate", cfg.ancilla.condensate.require_stable());
    let ancilla_stable = ancilla_stable && c.result("ancilla", cfg.ancilla.validate());

    if spec_ok {
        c.result("gauge", cfg.gauge.validate(&cfg.condensate));
    }

    if c.result("fock", cfg.fock.validate()) {
        let limit = 0.01 / cfg.fock.fastest_scale();
        c.require(
            "fock.dt",
            cfg.fock.dt <= limit * (1.0 + 1e-12),
            format!("dt = {} against 0.01 / fastest scale = {limit}", cfg.fock.dt),
        );
    }

    let g = &cfg.grids;
    c.require(
        "grids.momentum_points",
        g.momentum_points >= 2,
        format!("{} momentum points (need >= 2)", g.momentum_points),
    );
    c.require(
        "grids.momentum_min",
        g.momentum_min > 0.0 && g.momentum_min.is_finite() && g.momentum_min < g.momentum_max,
        format!("0 < momentum_min = {} < momentum_max", g.momentum_min),
    );
    c.require(
        "grids.momentum_max",
        g.momentum_max.is_finite() && g.momentum_max > g.momentum_min,
        format!("momentum_max = {} finite and above momentum_min", g.momentum_max),
    );
    c.require(
        "grids.alphas",
        g.alphas.len() >= 5 && g.alphas.iter().all(|a| (ALPHA_WINDOW.0..=ALPHA_WINDOW.1).contains(a)),
        format!(
            "{} alpha values, all in [{}, {}] (need >= 5)",
            g.alphas.len(),
            ALPHA_WINDOW.0,
            ALPHA_WINDOW.1
        ),
    );
    c.require(
        "grids.fg_wavevectors",
        !g.fg_wavevectors.is_empty() && finite_all(&g.fg_wavevectors) && g.fg_wavevectors.iter().all(|k| *k >= 0.0),
        "non-empty, finite, >= 0",
    );
    c.require(
        "grids.scan_lambdas",
        !g.scan_lambdas.is_empty() && finite_all(&g.scan_lambdas) && g.scan_lambdas.iter().all(|l| *l >= 0.0),
        "non-empty, finite, >= 0",
    );
    c.require(
        "grids.locality_bandwidths",
        g.locality_bandwidths.len() >= 2
            && finite_all(&g.locality_bandwidths)
            && g.locality_bandwidths.iter().all(|b| *b > 0.0)
            && g.locality_bandwidths.windows(2).all(|w| w[1] < w[0]),
        "at least two positive bandwidths, strictly decreasing",
    );
    c.require(
        "grids.jitter",
        (0.0..=0.05).contains(&g.jitter),
        format!("jitter = {} in [0, 0.05]", g.jitter),
    );
    c.require(
        "grids.jitter_trials",
        (1..=1000).contains(&g.jitter_trials),
        format!("{} jitter trials in [1, 1000]", g.jitter_trials),
    );
    c.require(
        "output.directory",
        !cfg.output.directory.as_os_str().is_empty(),
        "output directory must be non-empty",
    );

    if stable && ancilla_stable {
        for check in regime_report(&cfg.condensate, &cfg.ancilla, &cfg.gauge).checks {
            c.push(
                &format!("regime.{}", check.name),
                check.status,
                format!("{}: ratio {:.3e}", check.relation, check.ratio),
            );
        }
    }

    let findings = c.0;
    let pass = findings.iter().all(|f| f.status != Status::Fail);
    ValidationReport { findings, pass }
}
