//! Parameter grids, observables and the CSV writer.
//!
//! Sweep points are independent; they are evaluated on scoped worker
//! threads (capped by `ASYMFIELD_THREADS`) and emitted in grid order, so
//! the output bytes do not depend on the worker count. Values print with
//! 17 significant digits; singular points print `nan` and are counted so
//! the caller can signal a partial sweep.

use asymfield::emission::q_from_sigma;

use crate::engine::{evaluate, Engine, EvalError, PointOutput};
use crate::params::{PointParams, ResolvedPoint};
use crate::values::parse_value;

/// One swept parameter: inclusive endpoints, `count ≥ 2` samples, linear
/// or logarithmic spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl Axis {
    /// Parse `name=start:stop:count[,log]`; endpoints accept pi literals.
    pub fn parse(text: &str) -> Result<Self, String> {
        let (name, rest) = text
            .split_once('=')
            .ok_or_else(|| format!("`{text}` is not of the form name=start:stop:count[,log]"))?;
        let (range, log) = match rest.split_once(',') {
            Some((range, "log")) => (range, true),
            Some((_, other)) => return Err(format!("unknown spacing `{other}` (use `log`)")),
            None => (rest, false),
        };
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("`{text}` is not of the form name=start:stop:count[,log]"));
        }
        let start = parse_value(parts[0])?;
        let stop = parse_value(parts[1])?;
        let count: usize =
            parts[2].parse().map_err(|_| format!("`{}` is not a point count", parts[2]))?;
        if count < 2 {
            return Err(format!("axis {name} needs at least 2 points"));
        }
        if log && (start <= 0.0 || stop <= 0.0) {
            return Err(format!("log spacing on axis {name} requires positive endpoints"));
        }
        Ok(Self { name: name.to_string(), start, stop, count, log })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                // Endpoints are exact under both spacings.
                if i == 0 {
                    return self.start;
                }
                if i == n - 1 {
                    return self.stop;
                }
                let t = i as f64 / (n - 1) as f64;
                if self.log {
                    (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp()
                } else {
                    self.start + (self.stop - self.start) * t
                }
            })
            .collect()
    }

    pub fn spacing_name(&self) -> &'static str {
        if self.log {
            "log"
        } else {
            "linear"
        }
    }
}

/// A column of the sweep output.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    GammaRatio,
    GammaTotal,
    GammaWg,
    PurcellWg,
    Probability(String),
    AbsF2(String),
    Q,
}

impl Observable {
    pub fn from_name(name: &str, labels: &[&str]) -> Option<Self> {
        match name {
            "gamma_ratio" => return Some(Self::GammaRatio),
            "gamma_total" => return Some(Self::GammaTotal),
            "gamma_wg" => return Some(Self::GammaWg),
            "purcell_wg" => return Some(Self::PurcellWg),
            "q" => return Some(Self::Q),
            _ => {}
        }
        if let Some(label) = name.strip_prefix("P_") {
            if labels.contains(&label) {
                return Some(Self::Probability(label.to_string()));
            }
        }
        if let Some(label) = name.strip_prefix("absf2_") {
            if labels.contains(&label) {
                return Some(Self::AbsF2(label.to_string()));
            }
        }
        None
    }

    pub fn name(&self) -> String {
        match self {
            Self::GammaRatio => "gamma_ratio".into(),
            Self::GammaTotal => "gamma_total".into(),
            Self::GammaWg => "gamma_wg".into(),
            Self::PurcellWg => "purcell_wg".into(),
            Self::Probability(label) => format!("P_{label}"),
            Self::AbsF2(label) => format!("absf2_{label}"),
            Self::Q => "q".into(),
        }
    }

    /// Default column set: total ratio plus per-port probabilities and
    /// squared enhancements.
    pub fn default_list(labels: &[&str]) -> Vec<Observable> {
        let mut list = vec![Self::GammaRatio];
        for label in labels {
            list.push(Self::Probability((*label).to_string()));
        }
        for label in labels {
            list.push(Self::AbsF2((*label).to_string()));
        }
        list
    }

    fn extract(&self, output: &PointOutput, point: &ResolvedPoint) -> Result<f64, EvalError> {
        let port = |label: &str| -> Result<usize, EvalError> {
            output
                .port_labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| EvalError::Input(format!("no port labeled {label}")))
        };
        Ok(match self {
            Self::GammaRatio => output.report.total_ratio,
            Self::GammaTotal => output.report.gamma_total,
            Self::GammaWg => output.report.gamma_wg,
            Self::PurcellWg => output.report.purcell_wg,
            Self::Probability(label) => {
                let i = port(label)?;
                match &output.report.probabilities {
                    Some(p) => p[i],
                    None => f64::NAN,
                }
            }
            Self::AbsF2(label) => output.enhancements[port(label)?].norm_sqr(),
            Self::Q => {
                let sigma = output.sigma_for_q.ok_or_else(|| {
                    EvalError::Input("observable q needs a resonator template".into())
                })?;
                q_from_sigma(sigma, &point.mode)
                    .map_err(|_| {
                        EvalError::Input("observable q needs l (resonator length) set".into())
                    })?
                    .q
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: PointParams,
    pub axes: Vec<Axis>,
    pub observables: Vec<Observable>,
    pub engine: Engine,
    /// Add a column with the largest per-row deviation between the two
    /// engines, over all observables.
    pub check: bool,
}

pub struct SweepOutput {
    pub csv: String,
    pub nan_points: usize,
}

fn format_cell(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn worker_count(total: usize) -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let cap = std::env::var("ASYMFIELD_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(available);
    cap.min(available).min(total).max(1)
}

fn evaluate_row(spec: &SweepSpec, assignment: &[(&str, f64)]) -> Result<Vec<f64>, EvalError> {
    let mut params = spec.base.clone();
    for (name, value) in assignment {
        params.set(name, *value).map_err(EvalError::Input)?;
    }
    let point = params.resolve().map_err(EvalError::Input)?;

    let run = |engine: Engine| -> Result<Vec<f64>, EvalError> {
        let output = evaluate(&point, engine)?;
        spec.observables.iter().map(|o| o.extract(&output, &point)).collect()
    };

    let singular_to_nan = |r: Result<Vec<f64>, EvalError>| -> Result<Vec<f64>, EvalError> {
        match r {
            Err(EvalError::Singular(_)) => Ok(vec![f64::NAN; spec.observables.len()]),
            other => other,
        }
    };

    let mut cells = singular_to_nan(run(spec.engine))?;
    if spec.check {
        let other = match spec.engine {
            Engine::Solver => Engine::Analytic,
            Engine::Analytic => Engine::Solver,
        };
        let reference = singular_to_nan(run(other))?;
        let diff = cells
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, |acc, d| if d.is_nan() { f64::NAN } else { acc.max(d) });
        cells.push(diff);
    }
    Ok(cells)
}

/// Run the sweep; row order is axis 1 outer, axis 2 inner.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput, EvalError> {
    assert!((1..=2).contains(&spec.axes.len()), "sweeps take one or two axes");
    let axis_values: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let total: usize = axis_values.iter().map(Vec::len).product();

    let assignments = |flat: usize| -> Vec<(&str, f64)> {
        match axis_values.len() {
            1 => vec![(spec.axes[0].name.as_str(), axis_values[0][flat])],
            _ => {
                let inner = axis_values[1].len();
                vec![
                    (spec.axes[0].name.as_str(), axis_values[0][flat / inner]),
                    (spec.axes[1].name.as_str(), axis_values[1][flat % inner]),
                ]
            }
        }
    };

    let mut results: Vec<Result<Vec<f64>, EvalError>> = Vec::with_capacity(total);
    results.resize_with(total, || Ok(Vec::new()));
    let workers = worker_count(total);
    let chunk_size = total.div_ceil(workers);
    std::thread::scope(|scope| {
        for (index, chunk) in results.chunks_mut(chunk_size).enumerate() {
            let assignments = &assignments;
            scope.spawn(move || {
                let base = index * chunk_size;
                for (offset, slot) in chunk.iter_mut().enumerate() {
                    *slot = evaluate_row(spec, &assignments(base + offset));
                }
            });
        }
    });

    let mut header: Vec<String> = spec.axes.iter().map(|a| a.name.clone()).collect();
    header.extend(spec.observables.iter().map(Observable::name));
    if spec.check {
        header.push("check_abs_diff".to_string());
    }
    let mut csv = header.join(",");
    csv.push('\n');

    let mut nan_points = 0usize;
    for (flat, result) in results.into_iter().enumerate() {
        let cells = result?;
        if cells.iter().any(|c| c.is_nan()) {
            nan_points += 1;
        }
        let mut row: Vec<String> = assignments(flat).iter().map(|(_, v)| format_cell(*v)).collect();
        row.extend(cells.iter().map(|c| format_cell(*c)));
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    Ok(SweepOutput { csv, nan_points })
}
