//! Figure-reproduction presets: fixed template parameters plus the sweep
//! axes that tabulate each figure's data.

use crate::params::{PointParams, TemplateKind, FRAC_1_SQRT_2};
use crate::sweep::{Axis, Observable};

const PI: f64 = std::f64::consts::PI;
const TWO_PI: f64 = 2.0 * PI;

pub struct Preset {
    pub id: &'static str,
    pub kind: TemplateKind,
    pub fixed: Vec<(&'static str, f64)>,
    pub axes: Vec<Axis>,
    pub description: &'static str,
}

pub const PRESET_IDS: [&str; 4] = ["fig3", "fig4", "fig5", "fig6"];

pub fn lookup(id: &str) -> Option<Preset> {
    let axis = |name: &str, start: f64, stop: f64, count: usize, log: bool| Axis {
        name: name.to_string(),
        start,
        stop,
        count,
        log,
    };
    match id {
        // Resonant backscatter ring: total emission over the
        // dipole-scatterer mismatch and the reflectivity (log axis).
        "fig3" => Some(Preset {
            id: "fig3",
            kind: TemplateKind::Backscatter,
            fixed: vec![("sigma", 0.98), ("delta1", TWO_PI), ("delta2", TWO_PI)],
            axes: vec![axis("Delta", 0.0, TWO_PI, 512, false), axis("rho", 1e-4, 0.5, 256, true)],
            description: "backscatter ring emission map vs mismatch Delta and reflectivity rho \
                          (resonant ring, sigma=0.98)",
        }),
        // Resonant backscatter ring at fixed small reflectivity: rate and
        // port probabilities over the mismatch.
        "fig4" => Some(Preset {
            id: "fig4",
            kind: TemplateKind::Backscatter,
            fixed: vec![("sigma", 0.98), ("rho", 0.017), ("delta1", TWO_PI), ("delta2", TWO_PI)],
            axes: vec![axis("Delta", 0.0, TWO_PI, 1025, false)],
            description: "backscatter ring rate and port split vs mismatch Delta \
                          (sigma=0.98, rho=0.017, resonant ring)",
        }),
        // Interferometric device, both rings resonant: port routing over
        // the Sagnac phase. delta1 stays 0 so the dipole phase is fixed
        // while delta_s sweeps through the second loop arm.
        "fig5" => Some(Preset {
            id: "fig5",
            kind: TemplateKind::Sagnac,
            fixed: vec![
                ("sigma_s", FRAC_1_SQRT_2),
                ("sigma_ms", 0.98),
                ("sigma_ma", 0.7),
                ("delta1", 0.0),
                ("delta3", PI),
                ("delta4", TWO_PI),
                ("delta5", PI),
                ("offset", 0.25),
            ],
            axes: vec![axis("delta_s", 0.0, TWO_PI, 1025, false)],
            description: "interferometric device routing vs Sagnac phase delta_s \
                          (sigma_ms=0.98, sigma_ma=0.7, balanced splitter, both rings resonant)",
        }),
        // Same device, fixed Sagnac phases, auxiliary round trip swept:
        // rate control through mode hybridization.
        "fig6" => Some(Preset {
            id: "fig6",
            kind: TemplateKind::Sagnac,
            fixed: vec![
                ("sigma_s", FRAC_1_SQRT_2),
                ("sigma_ms", 0.98),
                ("sigma_ma", 0.7),
                ("delta1", 0.0),
                ("delta3", PI),
                ("delta4", TWO_PI),
                ("delta5", PI),
                ("offset", 0.25),
            ],
            axes: vec![
                axis("delta_s", 0.75 * PI, 1.25 * PI, 2, false),
                axis("delta_a", 0.0, TWO_PI, 513, false),
            ],
            description: "interferometric device rate and routing vs auxiliary phase delta_a \
                          at delta_s = 3pi/4 and 5pi/4",
        }),
        _ => None,
    }
}

impl Preset {
    pub fn base_params(&self) -> PointParams {
        let mut params = PointParams::new(self.kind);
        for (key, value) in &self.fixed {
            params.set(key, *value).expect("preset keys are canonical");
        }
        params
    }

    pub fn observables(&self) -> Vec<Observable> {
        Observable::default_list(&self.kind.port_labels())
    }
}
