//! Command-line front end: single-point rate reports, 1D/2D parameter
//! sweeps to CSV, figure-reproduction presets and a self-check.
//!
//! Exit codes are a stable contract: 0 success, 1 input error, 2 singular
//! solve, 3 sweep completed with nan points, 4 selfcheck failure.

mod engine;
mod params;
mod presets;
mod selfcheck;
mod sweep;
mod values;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use engine::{evaluate, evaluate_circuit, Engine, EvalError, PointOutput};
use params::{PointParams, ResolvedPoint, TemplateKind};
use sweep::{run_sweep, Axis, Observable, SweepSpec};

fn long_version() -> &'static str {
    let text = format!(
        "{}\nc        = {} m/s\nhbar     = {:e} J s\nepsilon0 = {:e} F/m",
        env!("CARGO_PKG_VERSION"),
        asymfield::emission::C_LIGHT,
        asymfield::emission::HBAR,
        asymfield::emission::EPSILON_0,
    );
    Box::leak(text.into_boxed_str())
}

#[derive(Parser)]
#[command(
    name = "asymfield",
    version,
    long_version = long_version(),
    about = "Dipole emission rates and photon routing in integrated photonic structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one parameter point and print a JSON rate report
    Rate(RateArgs),
    /// Sweep one or two parameters and write a CSV table
    Sweep(SweepArgs),
    /// Run a figure-reproduction preset (fig3, fig4, fig5, fig6)
    Figure(FigureArgs),
    /// Run the built-in verification suites
    Selfcheck(SelfcheckArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Built-in template: waveguide | ring | ring_backscatter | sagnac_device
    #[arg(long, value_name = "NAME")]
    template: Option<String>,
    /// Load a netlist file instead of a template (solver engine only)
    #[arg(long, value_name = "FILE", conflicts_with = "template")]
    netlist: Option<PathBuf>,
    /// Set a parameter, e.g. --set delta0=3pi/4 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Shorthand for --set sigma=VALUE
    #[arg(long, value_name = "VALUE")]
    sigma: Option<String>,
    /// Shorthand for --set rho=VALUE
    #[arg(long, value_name = "VALUE")]
    rho: Option<String>,
    /// Shorthand for --set delta0=VALUE
    #[arg(long, value_name = "VALUE")]
    delta0: Option<String>,
    /// Shorthand for --set delta1=VALUE
    #[arg(long, value_name = "VALUE")]
    delta1: Option<String>,
    /// Shorthand for --set delta2=VALUE
    #[arg(long, value_name = "VALUE")]
    delta2: Option<String>,
    /// Shorthand for --set delta3=VALUE
    #[arg(long, value_name = "VALUE")]
    delta3: Option<String>,
    /// Shorthand for --set delta4=VALUE
    #[arg(long, value_name = "VALUE")]
    delta4: Option<String>,
    /// Shorthand for --set delta5=VALUE
    #[arg(long, value_name = "VALUE")]
    delta5: Option<String>,
    /// Shorthand for --set sigma_s=VALUE
    #[arg(long, value_name = "VALUE")]
    sigma_s: Option<String>,
    /// Shorthand for --set sigma_ms=VALUE
    #[arg(long, value_name = "VALUE")]
    sigma_ms: Option<String>,
    /// Shorthand for --set sigma_ma=VALUE
    #[arg(long, value_name = "VALUE")]
    sigma_ma: Option<String>,
    /// Shorthand for --set offset=VALUE
    #[arg(long, value_name = "VALUE")]
    offset: Option<String>,
    /// Shorthand for --set phase=VALUE
    #[arg(long, value_name = "VALUE")]
    phase: Option<String>,
}

impl ModelArgs {
    fn overrides(&self) -> Result<Vec<(String, f64)>, CliError> {
        let mut out = Vec::new();
        for assignment in &self.set {
            out.push(values::parse_assignment(assignment).map_err(CliError::input)?);
        }
        let mut flag = |name: &str, value: &Option<String>| -> Result<(), CliError> {
            if let Some(text) = value {
                out.push((name.to_string(), values::parse_value(text).map_err(CliError::input)?));
            }
            Ok(())
        };
        flag("sigma", &self.sigma)?;
        flag("rho", &self.rho)?;
        flag("delta0", &self.delta0)?;
        flag("delta1", &self.delta1)?;
        flag("delta2", &self.delta2)?;
        flag("delta3", &self.delta3)?;
        flag("delta4", &self.delta4)?;
        flag("delta5", &self.delta5)?;
        flag("sigma_s", &self.sigma_s)?;
        flag("sigma_ms", &self.sigma_ms)?;
        flag("sigma_ma", &self.sigma_ma)?;
        flag("offset", &self.offset)?;
        flag("phase", &self.phase)?;
        Ok(out)
    }

    fn template_kind(&self) -> Result<TemplateKind, CliError> {
        match &self.template {
            Some(name) => TemplateKind::from_name(name).ok_or_else(|| {
                CliError::input(format!(
                    "unknown template `{name}` (waveguide, ring, ring_backscatter, sagnac_device)"
                ))
            }),
            None => Err(CliError::input("give --template NAME or --netlist FILE")),
        }
    }

    fn point_params(&self) -> Result<PointParams, CliError> {
        let mut params = PointParams::new(self.template_kind()?);
        for (key, value) in self.overrides()? {
            params.set(&key, value).map_err(CliError::input)?;
        }
        Ok(params)
    }
}

#[derive(Args)]
struct RateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Evaluation engine: solver | analytic
    #[arg(long, default_value = "solver", value_name = "NAME")]
    engine: String,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Swept axis, `name=start:stop:count[,log]`; give once or twice
    #[arg(long, value_name = "AXIS", required = true)]
    vary: Vec<String>,
    /// Comma-separated observable columns (default: gamma_ratio, P_*, absf2_*)
    #[arg(long, value_name = "LIST")]
    observables: Option<String>,
    /// Evaluation engine: solver | analytic
    #[arg(long, default_value = "solver", value_name = "NAME")]
    engine: String,
    /// Output CSV path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Add a cross-check column evaluated with the other engine
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct FigureArgs {
    /// Preset id: fig3 | fig4 | fig5 | fig6
    preset: String,
    /// Evaluation engine: solver | analytic
    #[arg(long, default_value = "solver", value_name = "NAME")]
    engine: String,
    /// Output CSV path (default: `<preset>.csv`, sidecar `<preset>.params.json`)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Add a cross-check column evaluated with the other engine
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct SelfcheckArgs {
    /// Randomized draws per topology
    #[arg(long, default_value_t = 1000)]
    draws: usize,
    /// Deliberately break the backward coupler sign to prove the oracle
    /// suites catch it
    #[arg(long)]
    inject_sign_fault: bool,
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Input(message) => Self { code: 1, message },
            EvalError::Singular(message) => Self { code: 2, message },
        }
    }
}

fn parse_engine(name: &str) -> Result<Engine, CliError> {
    Engine::from_name(name)
        .ok_or_else(|| CliError::input(format!("unknown engine `{name}` (solver, analytic)")))
}

fn parse_observables(text: Option<&str>, labels: &[&str]) -> Result<Vec<Observable>, CliError> {
    match text {
        None => Ok(Observable::default_list(labels)),
        Some(list) => list
            .split(',')
            .map(|name| {
                Observable::from_name(name.trim(), labels).ok_or_else(|| {
                    CliError::input(format!(
                        "unknown observable `{name}` (gamma_ratio, gamma_total, gamma_wg, \
                         purcell_wg, q, P_<port>, absf2_<port>)"
                    ))
                })
            })
            .collect(),
    }
}

fn number(v: f64) -> Value {
    json!(v)
}

fn rate_report_json(
    output: &PointOutput,
    point: Option<&ResolvedPoint>,
    params: Option<&PointParams>,
    engine: &str,
    source: (&str, &str),
) -> String {
    let mut map: BTreeMap<String, Value> = BTreeMap::new();
    map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    map.insert("engine".into(), json!(engine));
    map.insert(source.0.into(), json!(source.1));
    if let Some(params) = params {
        for (key, value) in params.entries() {
            map.insert(format!("param_{key}"), number(value));
        }
    }
    let report = &output.report;
    map.insert("gamma_wg".into(), number(report.gamma_wg));
    map.insert("gamma_free".into(), number(report.gamma_free));
    map.insert("gamma_total".into(), number(report.gamma_total));
    map.insert("gamma_ratio".into(), number(report.total_ratio));
    map.insert("purcell_wg".into(), number(report.purcell_wg));
    map.insert("probabilities_defined".into(), json!(report.probabilities.is_some()));
    for (i, label) in output.port_labels.iter().enumerate() {
        let f = output.enhancements[i];
        map.insert(format!("f_{label}_re"), number(f.re));
        map.insert(format!("f_{label}_im"), number(f.im));
        map.insert(format!("absf2_{label}"), number(f.norm_sqr()));
        map.insert(format!("gamma_{label}"), number(report.gamma_per_port[i]));
        if let Some(p) = &report.probabilities {
            map.insert(format!("P_{label}"), number(p[i]));
        }
    }
    if let (Some(point), Some(sigma)) = (point, output.sigma_for_q) {
        if point.mode.resonator_len.is_some() {
            if let Ok(q) = asymfield::emission::q_from_sigma(sigma, &point.mode) {
                map.insert("q".into(), number(q.q));
                map.insert("q_in_validity".into(), json!(q.in_validity));
            }
            if let Ok(hf) = asymfield::emission::purcell_highfinesse(sigma, &point.mode) {
                map.insert("purcell_highfinesse".into(), number(hf.q));
            }
        }
    }
    serde_json::to_string_pretty(&map).expect("report serializes")
}

fn cmd_rate(args: &RateArgs) -> Result<i32, CliError> {
    let engine = parse_engine(&args.engine)?;
    if let Some(path) = &args.model.netlist {
        if engine != Engine::Solver {
            return Err(CliError::input(
                "--netlist requires --engine solver; closed forms exist only for templates",
            ));
        }
        if !args.model.overrides()?.is_empty() {
            return Err(CliError::input(
                "parameter overrides apply to templates; edit the netlist instead",
            ));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        let circuit =
            asymfield::circuit::parse_netlist(&text).map_err(|e| CliError::input(e.to_string()))?;
        let output = evaluate_circuit(&circuit)?;
        let path_text = path.display().to_string();
        println!(
            "{}",
            rate_report_json(&output, None, None, engine.name(), ("netlist", &path_text))
        );
        return Ok(0);
    }
    let params = args.model.point_params()?;
    let point = params.resolve().map_err(CliError::input)?;
    let output = evaluate(&point, engine)?;
    println!(
        "{}",
        rate_report_json(
            &output,
            Some(&point),
            Some(&params),
            engine.name(),
            ("template", params.kind.name())
        )
    );
    Ok(0)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32, CliError> {
    if args.model.netlist.is_some() {
        return Err(CliError::input("sweeps need a --template; netlists have no named parameters"));
    }
    let engine = parse_engine(&args.engine)?;
    let base = args.model.point_params()?;
    if args.vary.len() > 2 {
        return Err(CliError::input("at most two --vary axes are supported"));
    }
    let axes: Vec<Axis> = args
        .vary
        .iter()
        .map(|text| Axis::parse(text).map_err(CliError::input))
        .collect::<Result<_, _>>()?;
    for axis in &axes {
        if !base.is_known(&axis.name) {
            return Err(CliError::input(format!(
                "unknown parameter `{}` for template {}",
                axis.name,
                base.kind.name()
            )));
        }
    }
    let labels = base.kind.port_labels();
    let observables = parse_observables(args.observables.as_deref(), &labels)?;
    let spec = SweepSpec { base, axes, observables, engine, check: args.check };
    let output = run_sweep(&spec)?;
    write_text(args.out.as_deref(), &output.csv)?;
    Ok(if output.nan_points > 0 { 3 } else { 0 })
}

fn sidecar_path(csv_path: &Path) -> PathBuf {
    let stem = csv_path.file_stem().unwrap_or_default().to_string_lossy();
    csv_path.with_file_name(format!("{stem}.params.json"))
}

fn cmd_figure(args: &FigureArgs) -> Result<i32, CliError> {
    let preset = presets::lookup(&args.preset).ok_or_else(|| {
        CliError::input(format!(
            "unknown preset `{}` ({})",
            args.preset,
            presets::PRESET_IDS.join(", ")
        ))
    })?;
    let engine = parse_engine(&args.engine)?;
    let base = preset.base_params();
    let observables = preset.observables();
    let csv_path = args.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", preset.id)));

    let mut parameters: BTreeMap<String, Value> = BTreeMap::new();
    for (key, value) in base.entries() {
        parameters.insert(key.to_string(), number(value));
    }
    let sidecar = json!({
        "preset": preset.id,
        "description": preset.description,
        "template": preset.kind.name(),
        "engine": engine.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "check": args.check,
        "parameters": parameters,
        "axes": preset.axes.iter().map(|a| json!({
            "name": a.name,
            "start": a.start,
            "stop": a.stop,
            "count": a.count,
            "spacing": a.spacing_name(),
        })).collect::<Vec<_>>(),
        "observables": observables.iter().map(Observable::name).collect::<Vec<_>>(),
        "csv": csv_path.display().to_string(),
    });

    let spec =
        SweepSpec { base, axes: preset.axes.clone(), observables, engine, check: args.check };
    let output = run_sweep(&spec)?;
    write_text(Some(&csv_path), &output.csv)?;
    let sidecar_file = sidecar_path(&csv_path);
    std::fs::write(&sidecar_file, format!("{}\n", serde_json::to_string_pretty(&sidecar).unwrap()))
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", sidecar_file.display())))?;
    eprintln!("wrote {} and {}", csv_path.display(), sidecar_file.display());
    Ok(if output.nan_points > 0 { 3 } else { 0 })
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses exit code 2 for usage errors; fold those into the
            // input-error code so 2 stays reserved for singular solves.
            let code = if e.exit_code() == 0 { 0 } else { 1 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Rate(args) => cmd_rate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Selfcheck(args) => return selfcheck::run(args.draws, args.inject_sign_fault),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn main() {
    std::process::exit(real_main());
}
