//! Template parameter registry: canonical names, defaults, derived
//! aliases, and resolution into concrete template arguments.
//!
//! Canonical parameters name the template inputs directly (`sigma`,
//! `delta1`, `offset`, ...). Aliases set combinations that figure axes
//! sweep over: `Delta` (dipole/scatterer mismatch), `delta_s`, `delta_m`,
//! `delta_a` and `delta_tilde0`. Shared keys (`n`, `ng`, `aeff`,
//! `lambda0`, `l`, `p`, `nocc`, `alignment`, `atten`) adjust the mode
//! context, the emitter and the per-arc attenuation knob.

use std::collections::BTreeMap;

use asymfield::circuit::{default_dipole, default_mode};
use asymfield::emission::{DipoleSpec, ModeContext};

pub const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateKind {
    Waveguide,
    Ring,
    Backscatter,
    Sagnac,
}

impl TemplateKind {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "waveguide" => Some(Self::Waveguide),
            "ring" => Some(Self::Ring),
            "ring_backscatter" | "backscatter" => Some(Self::Backscatter),
            "sagnac" | "sagnac_device" => Some(Self::Sagnac),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Waveguide => "waveguide",
            Self::Ring => "ring",
            Self::Backscatter => "ring_backscatter",
            Self::Sagnac => "sagnac_device",
        }
    }

    /// Canonical template parameters and their defaults.
    pub fn defaults(&self) -> &'static [(&'static str, f64)] {
        match self {
            Self::Waveguide => &[("phase", 0.0), ("offset", 0.5)],
            Self::Ring => &[("sigma", 0.98), ("delta0", 0.0), ("offset", 0.25)],
            Self::Backscatter => &[
                ("sigma", 0.98),
                ("rho", 0.017),
                ("delta1", TWO_PI),
                ("delta2", TWO_PI),
                ("offset", 0.0),
            ],
            Self::Sagnac => &[
                ("sigma_s", FRAC_1_SQRT_2),
                ("sigma_ms", 0.98),
                ("sigma_ma", 0.7),
                ("delta1", 0.0),
                ("delta2", 0.0),
                ("delta3", std::f64::consts::PI),
                ("delta4", TWO_PI),
                ("delta5", std::f64::consts::PI),
                ("offset", 0.25),
            ],
        }
    }

    /// Derived parameters accepted on top of the canonical set.
    pub fn aliases(&self) -> &'static [&'static str] {
        match self {
            Self::Waveguide | Self::Ring => &[],
            Self::Backscatter => &["Delta"],
            Self::Sagnac => &["delta_a", "delta_m", "delta_s", "delta_tilde0"],
        }
    }

    pub fn port_labels(&self) -> [&'static str; 2] {
        match self {
            Self::Sagnac => ["p1", "p2"],
            _ => ["L", "R"],
        }
    }
}

/// Shared (template-independent) keys and their defaults.
fn shared_defaults() -> Vec<(&'static str, f64)> {
    let mode = default_mode();
    let dipole = default_dipole();
    vec![
        ("n", mode.n),
        ("ng", mode.n_g),
        ("aeff", mode.a_eff),
        ("lambda0", mode.lambda0),
        ("p", dipole.moment),
        ("nocc", 0.0),
        ("alignment", 1.0),
        ("atten", 1.0),
    ]
}

/// A parameter point: template kind plus every key it understands.
#[derive(Debug, Clone)]
pub struct PointParams {
    pub kind: TemplateKind,
    values: BTreeMap<String, f64>,
}

/// Fully resolved template arguments for one evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum TemplateArgs {
    Waveguide { phase: f64, offset: f64 },
    Ring { sigma: f64, delta0: f64, offset: f64 },
    Backscatter { sigma: f64, rho: f64, delta1: f64, delta2: f64, offset: f64 },
    Sagnac { sigma_s: f64, sigma_ms: f64, sigma_ma: f64, deltas: [f64; 5], offset: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedPoint {
    pub args: TemplateArgs,
    pub mode: ModeContext,
    pub dipole: DipoleSpec,
    /// Per-arc amplitude attenuation knob (solver engine only when < 1).
    pub atten: f64,
}

impl PointParams {
    pub fn new(kind: TemplateKind) -> Self {
        let mut values = BTreeMap::new();
        for (key, value) in kind.defaults() {
            values.insert((*key).to_string(), *value);
        }
        for (key, value) in shared_defaults() {
            values.insert(key.to_string(), value);
        }
        Self { kind, values }
    }

    pub fn is_known(&self, key: &str) -> bool {
        self.values.contains_key(key) || self.kind.aliases().contains(&key) || key == "l"
    }

    /// Set one parameter; unknown names are errors listing the known set.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), String> {
        if !self.is_known(key) {
            let mut known: Vec<&str> = self.values.keys().map(|s| s.as_str()).collect();
            known.extend(self.kind.aliases());
            known.push("l");
            known.sort_unstable();
            return Err(format!(
                "unknown parameter `{key}` for template {} (known: {})",
                self.kind.name(),
                known.join(", ")
            ));
        }
        self.values.insert(key.to_string(), value);
        Ok(())
    }

    /// All values in sorted key order, for reports and sidecars.
    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Apply aliases and produce concrete template arguments.
    pub fn resolve(&self) -> Result<ResolvedPoint, String> {
        let mut v = self.values.clone();
        let take = |v: &BTreeMap<String, f64>, key: &str| -> f64 {
            *v.get(key).expect("defaulted key is always present")
        };

        // Aliases, most basic first so later ones see their effects.
        if let Some(delta_a) = v.get("delta_a").copied() {
            v.insert("delta4".into(), delta_a);
        }
        if let Some(delta_m) = v.get("delta_m").copied() {
            v.insert("delta3".into(), 0.5 * delta_m);
            v.insert("delta5".into(), 0.5 * delta_m);
        }
        if let Some(delta_s) = v.get("delta_s").copied() {
            let delta1 = take(&v, "delta1");
            v.insert("delta2".into(), delta_s - delta1);
        }
        if let Some(mismatch) = v.get("Delta").copied() {
            let delta2 = take(&v, "delta2");
            if delta2 == 0.0 {
                return Err("Delta requires a nonzero delta2".into());
            }
            let offset = mismatch / delta2;
            if !(0.0..=1.0).contains(&offset) {
                return Err(format!(
                    "Delta={mismatch} puts the dipole outside the delta2 arc (offset {offset})"
                ));
            }
            v.insert("offset".into(), offset);
        }
        if let Some(dt0) = v.get("delta_tilde0").copied() {
            let delta1 = take(&v, "delta1");
            let delta3 = take(&v, "delta3");
            let delta5 = take(&v, "delta5");
            if delta5 == 0.0 {
                return Err("delta_tilde0 requires a nonzero delta5".into());
            }
            let dipole_phase = 0.5 * dt0 - delta1;
            let offset = (dipole_phase - delta3) / delta5;
            if !(0.0..=1.0).contains(&offset) {
                return Err(format!(
                    "delta_tilde0={dt0} puts the dipole outside the delta5 arc (offset {offset})"
                ));
            }
            v.insert("offset".into(), offset);
        }

        let args = match self.kind {
            TemplateKind::Waveguide => {
                TemplateArgs::Waveguide { phase: take(&v, "phase"), offset: take(&v, "offset") }
            }
            TemplateKind::Ring => TemplateArgs::Ring {
                sigma: take(&v, "sigma"),
                delta0: take(&v, "delta0"),
                offset: take(&v, "offset"),
            },
            TemplateKind::Backscatter => TemplateArgs::Backscatter {
                sigma: take(&v, "sigma"),
                rho: take(&v, "rho"),
                delta1: take(&v, "delta1"),
                delta2: take(&v, "delta2"),
                offset: take(&v, "offset"),
            },
            TemplateKind::Sagnac => TemplateArgs::Sagnac {
                sigma_s: take(&v, "sigma_s"),
                sigma_ms: take(&v, "sigma_ms"),
                sigma_ma: take(&v, "sigma_ma"),
                deltas: [
                    take(&v, "delta1"),
                    take(&v, "delta2"),
                    take(&v, "delta3"),
                    take(&v, "delta4"),
                    take(&v, "delta5"),
                ],
                offset: take(&v, "offset"),
            },
        };

        let mut mode =
            ModeContext::new(take(&v, "lambda0"), take(&v, "n"), take(&v, "ng"), take(&v, "aeff"));
        mode.resonator_len = v.get("l").copied();
        if mode.lambda0 <= 0.0 || mode.n <= 0.0 || mode.n_g <= 0.0 || mode.a_eff <= 0.0 {
            return Err("mode parameters must be positive".into());
        }

        let nocc = take(&v, "nocc");
        if nocc < 0.0 || nocc.fract() != 0.0 || nocc > u32::MAX as f64 {
            return Err(format!("nocc must be a non-negative integer, got {nocc}"));
        }
        let mut dipole = DipoleSpec::new(take(&v, "p"), nocc as u32);
        dipole.alignment = take(&v, "alignment");
        if dipole.moment <= 0.0 {
            return Err("dipole moment p must be positive".into());
        }
        if !(0.0..=1.0).contains(&dipole.alignment) {
            return Err("alignment must lie in [0, 1]".into());
        }

        let atten = take(&v, "atten");
        if !(atten > 0.0 && atten <= 1.0) {
            return Err(format!("atten out of range: {atten} not in (0, 1]"));
        }

        Ok(ResolvedPoint { args, mode, dipole, atten })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        for kind in [
            TemplateKind::Waveguide,
            TemplateKind::Ring,
            TemplateKind::Backscatter,
            TemplateKind::Sagnac,
        ] {
            assert!(PointParams::new(kind).resolve().is_ok(), "{kind:?}");
        }
    }

    #[test]
    fn mismatch_alias_moves_the_probe() {
        let mut p = PointParams::new(TemplateKind::Backscatter);
        p.set("Delta", std::f64::consts::PI).unwrap();
        match p.resolve().unwrap().args {
            TemplateArgs::Backscatter { offset, delta2, .. } => {
                assert!((offset * delta2 - std::f64::consts::PI).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sagnac_aliases_set_arcs() {
        let mut p = PointParams::new(TemplateKind::Sagnac);
        p.set("delta_m", 3.0).unwrap();
        p.set("delta_a", 1.0).unwrap();
        p.set("delta_s", 2.0).unwrap();
        match p.resolve().unwrap().args {
            TemplateArgs::Sagnac { deltas, .. } => {
                assert_eq!(deltas[2] + deltas[4], 3.0);
                assert_eq!(deltas[3], 1.0);
                assert_eq!(deltas[0] + deltas[1], 2.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_parameters_are_rejected() {
        let mut p = PointParams::new(TemplateKind::Ring);
        assert!(p.set("rho", 0.1).is_err());
        assert!(p.set("sigma", 0.5).is_ok());
    }

    #[test]
    fn nocc_must_be_integral() {
        let mut p = PointParams::new(TemplateKind::Ring);
        p.set("nocc", 1.5).unwrap();
        assert!(p.resolve().is_err());
        p.set("nocc", 2.0).unwrap();
        assert_eq!(p.resolve().unwrap().dipole.n_occ, 2);
    }
}
