//! Built-in experiments on a 16-element half-wavelength array.

use super::config::{AlgorithmSpec, Arrival, BoundSpec, DoaPolicy, ExperimentConfig, ScenarioSpec, SweepSpec};
use crate::error::{Error, Result};

const NAMES: [&str; 6] = ["fig4", "fig5", "fig6", "fig8", "fig9", "baseline"];

pub fn names() -> &'static [&'static str] {
    &NAMES
}

pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig4" => "q=10, SNR 10 dB, INR 30 dB, N=4000; SM-CG with fixed bound sqrt(5 sigma^2), RLS, MVDR",
        "fig5" => "q=10, SNR 10 dB, INR 35 dB, N=3000; SM-CG with fixed bounds 0.8/1.0/1.3, PDB and PIDB",
        "fig6" => "q=10, SNR 10 dB, INR 30 dB, N=3000; SM-CG (PIDB) against SG, RLS, CG and MVDR",
        "fig8" => "fig6 layout swept over SNR 0..30 dB in 5 dB steps",
        "fig9" => "q=8, SNR 10 dB, INR 35 dB, 4 interferers join at snapshot 3000, N=5000",
        "baseline" => "stationary 3-user scenario (DOAs 90/60/125, SNR 0 dB, INR 20 dB) for the full-rate baselines",
        _ => return None,
    })
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    match name {
        "fig4" => Ok(fig4()),
        "fig5" => Ok(fig5()),
        "fig6" => Ok(fig6()),
        "fig8" => Ok(fig8()),
        "fig9" => Ok(fig9()),
        "baseline" => Ok(baseline()),
        other => Err(Error::Config(format!(
            "unknown preset `{other}` (available: {})",
            NAMES.join(", ")
        ))),
    }
}

fn scenario(users: usize, inr_db: f64, snapshots: usize) -> ScenarioSpec {
    ScenarioSpec {
        sensors: 16,
        spacing: 0.5,
        gamma: 1.0,
        snr_db: 10.0,
        inr_db,
        users,
        snapshots,
        desired_doa: 90.0,
        interferer_doas: DoaPolicy::default(),
        arrivals: Vec::new(),
    }
}

fn sm_cg(label: &str, bound: BoundSpec) -> AlgorithmSpec {
    AlgorithmSpec::SmCg {
        label: label.into(),
        eta: 0.5,
        lambda_min: 0.1,
        lambda_max: 0.999,
        r_hat_init: 1e-2,
        bound,
    }
}

fn proposed_pidb() -> BoundSpec {
    BoundSpec::Pidb {
        varrho: 0.9,
        varsigma: 21.0,
        epsilon: 0.001,
    }
}

fn frost() -> AlgorithmSpec {
    AlgorithmSpec::FrostSg {
        label: "frost-sg".into(),
        step: 0.005,
        normalized: true,
    }
}

fn rls() -> AlgorithmSpec {
    AlgorithmSpec::Rls {
        label: "rls".into(),
        forgetting: 0.998,
        init_loading: 1e-2,
    }
}

fn cg() -> AlgorithmSpec {
    AlgorithmSpec::Cg {
        label: "cg".into(),
        eta: 0.5,
        forgetting: 0.998,
        r_hat_init: 1e-2,
    }
}

fn mvdr() -> AlgorithmSpec {
    AlgorithmSpec::Mvdr { label: "mvdr".into() }
}

fn config(name: &str, scenario: ScenarioSpec, algorithms: Vec<AlgorithmSpec>) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        runs: 50,
        master_seed: 7,
        scenario,
        algorithms,
        sweep: None,
    }
}

fn fig4() -> ExperimentConfig {
    config(
        "fig4",
        scenario(10, 30.0, 4000),
        vec![sm_cg("sm-cg", BoundSpec::NoiseScaled { factor: 5.0 }), rls(), mvdr()],
    )
}

fn fig5() -> ExperimentConfig {
    config(
        "fig5",
        scenario(10, 35.0, 3000),
        vec![
            sm_cg("sm-cg-fixed-0.8", BoundSpec::Fixed { delta: 0.8 }),
            sm_cg("sm-cg-fixed-1.0", BoundSpec::Fixed { delta: 1.0 }),
            sm_cg("sm-cg-fixed-1.3", BoundSpec::Fixed { delta: 1.3 }),
            sm_cg(
                "sm-cg-pdb",
                BoundSpec::Pdb {
                    rho: 0.9,
                    varsigma: 21.0,
                },
            ),
            sm_cg(
                "sm-cg-pidb",
                BoundSpec::Pidb {
                    varrho: 0.98,
                    varsigma: 19.0,
                    epsilon: 0.001,
                },
            ),
            mvdr(),
        ],
    )
}

fn fig6() -> ExperimentConfig {
    config(
        "fig6",
        scenario(10, 30.0, 3000),
        vec![sm_cg("sm-cg", proposed_pidb()), frost(), rls(), cg(), mvdr()],
    )
}

fn fig8() -> ExperimentConfig {
    let mut cfg = fig6();
    cfg.name = "fig8".into();
    cfg.sweep = Some(SweepSpec {
        snr_db: (0..=6).map(|k| 5.0 * k as f64).collect(),
        tail_fraction: 0.1,
    });
    cfg
}

fn fig9() -> ExperimentConfig {
    let mut sc = scenario(8, 35.0, 5000);
    sc.arrivals = vec![Arrival {
        at: 3000,
        interferers: 4,
    }];
    config(
        "fig9",
        sc,
        vec![
            sm_cg("sm-cg", proposed_pidb()),
            sm_cg(
                "sm-cg-pdb",
                BoundSpec::Pdb {
                    rho: 0.9,
                    varsigma: 21.0,
                },
            ),
            frost(),
            rls(),
            cg(),
            mvdr(),
        ],
    )
}

fn baseline() -> ExperimentConfig {
    let mut sc = scenario(3, 20.0, 3000);
    sc.snr_db = 0.0;
    sc.interferer_doas = DoaPolicy::Fixed {
        doas: vec![60.0, 125.0],
    };
    config("baseline", sc, vec![frost(), rls(), cg(), mvdr()])
}
