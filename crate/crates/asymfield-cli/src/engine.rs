//! Point evaluation: turn resolved template parameters (or a parsed
//! netlist) into enhancements and a rate report, through either engine.
//!
//! The solver engine builds the scattering network and solves it port by
//! port; the analytic engine evaluates the closed forms. Both feed the
//! same golden-rule prefactors, so on lossless circuits they agree to
//! solver accuracy.

use std::fmt;

use num_complex::Complex64;

use asymfield::analytic::{
    backscatter_enhancements, ring_enhancements, sagnac_enhancements, BackscatterParams,
    DivergenceError, RingParams, SagnacParams,
};
use asymfield::circuit::{
    template_ring, template_ring_backscatter, template_sagnac_device, template_waveguide, Circuit,
    CircuitError,
};
use asymfield::emission::{rates_from_enhancements, RateReport};
use asymfield::netsolver::{enhancements, SolveError};

use crate::params::{ResolvedPoint, TemplateArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Analytic,
    Solver,
}

impl Engine {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "analytic" => Some(Self::Analytic),
            "solver" => Some(Self::Solver),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Analytic => "analytic",
            Self::Solver => "solver",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// Bad parameters or unusable input; maps to exit code 1.
    Input(String),
    /// Degenerate point (pole or vanishing pivot); maps to exit code 2,
    /// or to a `nan` row inside a sweep.
    Singular(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Input(msg) => write!(f, "{msg}"),
            EvalError::Singular(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<CircuitError> for EvalError {
    fn from(e: CircuitError) -> Self {
        EvalError::Input(e.to_string())
    }
}

impl From<SolveError> for EvalError {
    fn from(e: SolveError) -> Self {
        EvalError::Singular(e.to_string())
    }
}

impl From<DivergenceError> for EvalError {
    fn from(e: DivergenceError) -> Self {
        EvalError::Singular(format!("singular system: {e}"))
    }
}

/// Everything one evaluation produces.
#[derive(Debug, Clone)]
pub struct PointOutput {
    pub port_labels: Vec<String>,
    pub enhancements: Vec<Complex64>,
    pub report: RateReport,
    /// The coupling that controls the resonance linewidth, for Q estimates.
    pub sigma_for_q: Option<f64>,
}

fn build_circuit(point: &ResolvedPoint) -> Result<Circuit, EvalError> {
    let mut circuit = match point.args {
        TemplateArgs::Waveguide { phase, offset } => template_waveguide(phase, offset)?,
        TemplateArgs::Ring { sigma, delta0, offset } => template_ring(sigma, delta0, offset)?,
        TemplateArgs::Backscatter { sigma, rho, delta1, delta2, offset } => {
            template_ring_backscatter(sigma, rho, delta1, delta2, offset)?
        }
        TemplateArgs::Sagnac { sigma_s, sigma_ms, sigma_ma, deltas, offset } => {
            template_sagnac_device(sigma_s, sigma_ms, sigma_ma, deltas, offset)?
        }
    };
    circuit.mode = point.mode.clone();
    circuit.dipole = point.dipole.clone();
    if point.atten < 1.0 {
        let arcs: &[&str] = match point.args {
            TemplateArgs::Waveguide { .. } => &["wg"],
            TemplateArgs::Ring { .. } => &["ring"],
            TemplateArgs::Backscatter { .. } => &["arc1", "arc2"],
            TemplateArgs::Sagnac { .. } => &["ring_ms_ma", "ring_ma_ms"],
        };
        for arc in arcs {
            circuit.segment_mut(arc).expect("template arc exists").atten = point.atten;
        }
    }
    Ok(circuit)
}

fn sigma_for_q(args: &TemplateArgs) -> Option<f64> {
    match args {
        TemplateArgs::Waveguide { .. } => None,
        TemplateArgs::Ring { sigma, .. } | TemplateArgs::Backscatter { sigma, .. } => Some(*sigma),
        TemplateArgs::Sagnac { sigma_ms, .. } => Some(*sigma_ms),
    }
}

fn analytic_enhancements(args: &TemplateArgs) -> Result<(Complex64, Complex64), EvalError> {
    Ok(match *args {
        TemplateArgs::Waveguide { phase, offset } => (
            Complex64::from_polar(1.0, offset * phase),
            Complex64::from_polar(1.0, (1.0 - offset) * phase),
        ),
        TemplateArgs::Ring { sigma, delta0, offset } => {
            ring_enhancements(&RingParams::new(sigma, delta0, offset * delta0))?
        }
        TemplateArgs::Backscatter { sigma, rho, delta1, delta2, offset } => {
            backscatter_enhancements(&BackscatterParams::new(
                sigma,
                rho,
                delta1,
                delta2,
                delta1 + offset * delta2,
            ))?
        }
        TemplateArgs::Sagnac { sigma_s, sigma_ms, sigma_ma, deltas, offset } => {
            sagnac_enhancements(&SagnacParams::new(
                sigma_s,
                sigma_ms,
                sigma_ma,
                deltas,
                deltas[2] + offset * deltas[4],
            ))?
        }
    })
}

/// Evaluate one template point with the chosen engine.
pub fn evaluate(point: &ResolvedPoint, engine: Engine) -> Result<PointOutput, EvalError> {
    let labels = match point.args {
        TemplateArgs::Sagnac { .. } => vec!["p1".to_string(), "p2".to_string()],
        _ => vec!["L".to_string(), "R".to_string()],
    };
    let f = match engine {
        Engine::Solver => {
            let circuit = build_circuit(point)?;
            enhancements(&circuit)?.per_port
        }
        Engine::Analytic => {
            if point.atten < 1.0 {
                return Err(EvalError::Input(
                    "the analytic engine is lossless; use --engine solver with atten < 1".into(),
                ));
            }
            let (fa, fb) = analytic_enhancements(&point.args)?;
            vec![fa, fb]
        }
    };
    let report = rates_from_enhancements(&f, &point.mode, &point.dipole);
    Ok(PointOutput {
        port_labels: labels,
        enhancements: f,
        report,
        sigma_for_q: sigma_for_q(&point.args),
    })
}

/// Evaluate a parsed netlist (always through the solver).
pub fn evaluate_circuit(circuit: &Circuit) -> Result<PointOutput, EvalError> {
    let f = enhancements(circuit)?.per_port;
    let report = rates_from_enhancements(&f, &circuit.mode, &circuit.dipole);
    Ok(PointOutput {
        port_labels: circuit.ports.iter().map(|p| p.label.clone()).collect(),
        enhancements: f,
        report,
        sigma_for_q: None,
    })
}
