//! Built-in verification suites: solver-versus-closed-form equivalence,
//! unitarity and reciprocity of lossless networks, limit reductions and
//! probability normalization.
//!
//! The same suites back the crate's integration tests and the command-line
//! `selfcheck`; draws come from a fixed-seed generator so every run checks
//! the identical parameter set.

use num_complex::Complex64;

use crate::analytic::{
    backscatter_enhancements, backscatter_rates, ring_enhancements, ring_rate_ratio,
    sagnac_enhancements, sagnac_port_probs, sagnac_total_rate, BackscatterParams, RingParams,
    SagnacParams,
};
use crate::circuit::{
    template_ring, template_ring_backscatter, template_sagnac_device, template_waveguide, Circuit,
};
use crate::emission::rates_from_enhancements;
use crate::netsolver::{
    assemble, assemble_with, enhancements, probe_enhancement, scattering_matrix, solve,
    AssembleOptions, Solution,
};

/// Outcome of one verification suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    /// Worst error observed, in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SuiteReport {
    fn from_worst(name: &'static str, cases: usize, worst: f64, tolerance: f64) -> Self {
        Self { name, cases, worst, tolerance, passed: worst <= tolerance }
    }
}

#[derive(Debug, Clone)]
pub struct SelfTestOptions {
    /// Randomized draws per topology.
    pub draws: usize,
    /// Deliberately break the backward coupler sign in the solver path;
    /// the oracle suites must then fail.
    pub flip_backward_coupling: bool,
}

impl Default for SelfTestOptions {
    fn default() -> Self {
        Self { draws: 1000, flip_backward_coupling: false }
    }
}

/// Fixed-seed generator (splitmix64) for reproducible parameter draws.
struct Draws(u64);

impl Draws {
    fn new(seed: u64) -> Self {
        Self(seed)
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let unit = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        lo + (hi - lo) * unit
    }

    fn phase(&mut self) -> f64 {
        self.uniform(0.0, 2.0 * std::f64::consts::PI)
    }
}

fn solver_enhancements(circuit: &Circuit, options: &AssembleOptions) -> Vec<Complex64> {
    let solutions: Vec<Solution> = (0..circuit.ports.len())
        .map(|p| {
            let mut inputs = vec![Complex64::new(0.0, 0.0); circuit.ports.len()];
            inputs[p] = Complex64::new(1.0, 0.0);
            solve(&assemble_with(circuit, &inputs, options)).expect("solvable draw")
        })
        .collect();
    probe_enhancement(circuit, &solutions).per_port
}

fn enhancement_error(solver: &[Complex64], closed: &[Complex64]) -> f64 {
    solver.iter().zip(closed).map(|(s, c)| (s - c).norm() / (1.0 + c.norm())).fold(0.0, f64::max)
}

/// Solver versus closed forms over randomized parameters, one suite per
/// topology. Errors are relative: |f_solver − f_closed| / (1 + |f_closed|).
pub fn oracle_suites(options: &SelfTestOptions) -> Vec<SuiteReport> {
    let tol = 1e-9;
    let assemble_opts = AssembleOptions { flip_backward_coupling: options.flip_backward_coupling };
    let mut reports = Vec::new();

    let mut draws = Draws::new(0x5EED_0001);
    let mut worst = 0.0f64;
    for _ in 0..options.draws {
        let sigma = draws.uniform(0.0, 0.999);
        let delta0 = draws.phase();
        let s = draws.uniform(0.0, 1.0);
        let circuit = template_ring(sigma, delta0, s).unwrap();
        let solver = solver_enhancements(&circuit, &assemble_opts);
        let (fl, fr) = ring_enhancements(&RingParams::new(sigma, delta0, s * delta0)).unwrap();
        worst = worst.max(enhancement_error(&solver, &[fl, fr]));
    }
    reports.push(SuiteReport::from_worst("oracle/ring", options.draws, worst, tol));

    let mut draws = Draws::new(0x5EED_0002);
    let mut worst = 0.0f64;
    for _ in 0..options.draws {
        let sigma = draws.uniform(0.0, 0.999);
        let rho = draws.uniform(0.0, 0.9);
        let delta1 = draws.phase();
        let delta2 = draws.phase();
        let s = draws.uniform(0.0, 1.0);
        let circuit = template_ring_backscatter(sigma, rho, delta1, delta2, s).unwrap();
        let solver = solver_enhancements(&circuit, &assemble_opts);
        let params = BackscatterParams::new(sigma, rho, delta1, delta2, delta1 + s * delta2);
        let (fl, fr) = backscatter_enhancements(&params).unwrap();
        worst = worst.max(enhancement_error(&solver, &[fl, fr]));
    }
    reports.push(SuiteReport::from_worst("oracle/backscatter", options.draws, worst, tol));

    let mut draws = Draws::new(0x5EED_0003);
    let mut worst = 0.0f64;
    for _ in 0..options.draws {
        let sigma_s = draws.uniform(0.0, 0.999);
        let sigma_ms = draws.uniform(0.0, 0.999);
        let sigma_ma = draws.uniform(0.0, 0.999);
        let deltas = [draws.phase(), draws.phase(), draws.phase(), draws.phase(), draws.phase()];
        let s = draws.uniform(0.0, 1.0);
        let circuit = template_sagnac_device(sigma_s, sigma_ms, sigma_ma, deltas, s).unwrap();
        let solver = solver_enhancements(&circuit, &assemble_opts);
        let params =
            SagnacParams::new(sigma_s, sigma_ms, sigma_ma, deltas, deltas[2] + s * deltas[4]);
        let (f1, f2) = sagnac_enhancements(&params).unwrap();
        worst = worst.max(enhancement_error(&solver, &[f1, f2]));
    }
    reports.push(SuiteReport::from_worst("oracle/interferometric", options.draws, worst, tol));

    reports
}

fn random_lossless_circuit(draws: &mut Draws, index: usize) -> Circuit {
    match index % 4 {
        0 => template_waveguide(draws.phase(), draws.uniform(0.0, 1.0)).unwrap(),
        1 => template_ring(draws.uniform(0.0, 0.999), draws.phase(), draws.uniform(0.0, 1.0))
            .unwrap(),
        2 => template_ring_backscatter(
            draws.uniform(0.0, 0.999),
            draws.uniform(0.0, 0.9),
            draws.phase(),
            draws.phase(),
            draws.uniform(0.0, 1.0),
        )
        .unwrap(),
        _ => template_sagnac_device(
            draws.uniform(0.0, 0.999),
            draws.uniform(0.0, 0.999),
            draws.uniform(0.0, 0.999),
            [draws.phase(), draws.phase(), draws.phase(), draws.phase(), draws.phase()],
            draws.uniform(0.0, 1.0),
        )
        .unwrap(),
    }
}

/// Lossless scattering matrices must be unitary and symmetric to 1e-9.
pub fn unitarity_suites(circuits: usize) -> Vec<SuiteReport> {
    let mut draws = Draws::new(0x5EED_0004);
    let mut worst_unitarity = 0.0f64;
    let mut worst_asymmetry = 0.0f64;
    for i in 0..circuits {
        let circuit = random_lossless_circuit(&mut draws, i);
        let s = scattering_matrix(&circuit).expect("lossless draw is solvable");
        worst_unitarity = worst_unitarity.max(s.unitarity_deviation());
        worst_asymmetry = worst_asymmetry.max(s.asymmetry());
    }
    vec![
        SuiteReport::from_worst("smatrix/unitarity", circuits, worst_unitarity, 1e-9),
        SuiteReport::from_worst("smatrix/reciprocity", circuits, worst_asymmetry, 1e-9),
    ]
}

/// Any segment attenuation below one must push every column norm below one.
pub fn loss_suite(circuits: usize) -> SuiteReport {
    let mut draws = Draws::new(0x5EED_0005);
    let mut worst = 0.0f64;
    for _ in 0..circuits {
        let mut circuit =
            template_ring(draws.uniform(0.0, 0.99), draws.phase(), draws.uniform(0.0, 1.0))
                .unwrap();
        circuit.segment_mut("ring").unwrap().atten = draws.uniform(0.5, 0.9);
        let s = scattering_matrix(&circuit).expect("lossy ring is solvable");
        for norm in s.column_norms() {
            worst = worst.max(norm);
        }
    }
    SuiteReport {
        name: "smatrix/loss",
        cases: circuits,
        worst,
        tolerance: 1.0,
        passed: worst < 1.0,
    }
}

/// Superposed port inputs must solve to the superposition of solutions.
pub fn linearity_suite(draws_count: usize) -> SuiteReport {
    let mut draws = Draws::new(0x5EED_0006);
    let mut worst = 0.0f64;
    for _ in 0..draws_count {
        let circuit = template_ring_backscatter(
            draws.uniform(0.0, 0.99),
            draws.uniform(0.0, 0.9),
            draws.phase(),
            draws.phase(),
            draws.uniform(0.0, 1.0),
        )
        .unwrap();
        let weights = [
            Complex64::new(draws.uniform(-1.0, 1.0), draws.uniform(-1.0, 1.0)),
            Complex64::new(draws.uniform(-1.0, 1.0), draws.uniform(-1.0, 1.0)),
        ];
        let combined = solve(&crate::netsolver::assemble_with_inputs(&circuit, &weights)).unwrap();
        let parts: Vec<Solution> = (0..2).map(|p| solve(&assemble(&circuit, p)).unwrap()).collect();
        for i in 0..combined.amplitudes.len() {
            let expect = weights[0] * parts[0].amplitudes[i] + weights[1] * parts[1].amplitudes[i];
            worst = worst.max((combined.amplitudes[i] - expect).norm() / (1.0 + expect.norm()));
        }
    }
    SuiteReport::from_worst("solver/linearity", draws_count, worst, 1e-10)
}

/// Limit reductions: zero backscatter recovers the plain ring, a decoupled
/// auxiliary ring recovers the plain-ring rate, and the bare waveguide
/// recovers Γ_total = Γ_wg with an even split.
pub fn reduction_suites() -> Vec<SuiteReport> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for i in 0..16 {
        let delta0 = i as f64 * 2.0 * std::f64::consts::PI / 16.0;
        for j in 0..8 {
            let s = j as f64 / 7.0;
            let ring = ring_enhancements(&RingParams::new(0.98, delta0, s * delta0)).unwrap();
            let params = BackscatterParams::new(0.98, 1e-9, 0.0, delta0, s * delta0);
            let bs = backscatter_enhancements(&params).unwrap();
            worst = worst.max(enhancement_error(&[bs.0, bs.1], &[ring.0, ring.1]));
            cases += 1;
        }
    }
    let rho_limit = SuiteReport::from_worst("limits/zero-backscatter", cases, worst, 1e-6);

    let mut worst = 0.0f64;
    let mut cases = 0;
    for i in 0..64 {
        let delta_m = i as f64 * 2.0 * std::f64::consts::PI / 64.0;
        let params = SagnacParams::new(
            std::f64::consts::FRAC_1_SQRT_2,
            0.98,
            1.0 - 1e-9,
            [0.3, 1.1, 0.5 * delta_m, 1.9, 0.5 * delta_m],
            0.7 * delta_m,
        );
        let expect = ring_rate_ratio(&RingParams::new(0.98, delta_m, 0.0)).unwrap();
        let got = sagnac_total_rate(&params).unwrap();
        worst = worst.max((got - expect).abs() / expect);
        cases += 1;
    }
    let aux_limit = SuiteReport::from_worst("limits/decoupled-aux", cases, worst, 1e-6);

    let circuit = template_waveguide(0.0, 0.5).unwrap();
    let f = enhancements(&circuit).unwrap().per_port;
    let report = rates_from_enhancements(&f, &circuit.mode, &circuit.dipole);
    let p = report.probabilities.clone().unwrap_or_default();
    let exact = report.gamma_total == report.gamma_wg && p == vec![0.5, 0.5];
    let waveguide = SuiteReport {
        name: "limits/waveguide-anchor",
        cases: 1,
        worst: if exact { 0.0 } else { 1.0 },
        tolerance: 0.0,
        passed: exact,
    };

    vec![rho_limit, aux_limit, waveguide]
}

/// Exit probabilities must sum to one along every route that defines them.
pub fn normalization_suite(draws_count: usize) -> SuiteReport {
    let mut draws = Draws::new(0x5EED_0007);
    let mut worst = 0.0f64;
    for _ in 0..draws_count {
        let params = BackscatterParams::new(
            draws.uniform(0.0, 0.99),
            draws.uniform(0.0, 0.9),
            draws.phase(),
            draws.phase(),
            draws.phase(),
        );
        let (total, left, right) = backscatter_rates(&params).unwrap();
        worst = worst.max(((left + right) / total - 1.0).abs());

        let sagnac = SagnacParams::new(
            draws.uniform(0.0, 0.999),
            draws.uniform(0.0, 0.99),
            draws.uniform(0.0, 0.99),
            [draws.phase(), draws.phase(), draws.phase(), draws.phase(), draws.phase()],
            draws.phase(),
        );
        let (p1, p2) = sagnac_port_probs(&sagnac).unwrap();
        worst = worst.max((p1 + p2 - 1.0).abs());

        let circuit = template_ring_backscatter(
            params.sigma,
            params.rho,
            params.delta1,
            params.delta2,
            draws.uniform(0.0, 1.0),
        )
        .unwrap();
        let f = enhancements(&circuit).unwrap().per_port;
        let report = rates_from_enhancements(&f, &circuit.mode, &circuit.dipole);
        if let Some(p) = report.probabilities {
            worst = worst.max((p.iter().sum::<f64>() - 1.0).abs());
        }
        let via_fields: f64 = 0.5 * report.gamma_wg * f.iter().map(|x| x.norm_sqr()).sum::<f64>();
        worst = worst.max((report.gamma_total / via_fields - 1.0).abs());
    }
    SuiteReport::from_worst("rates/normalization", draws_count, worst, 1e-12)
}

/// Run every suite and collect the reports.
pub fn run_all(options: &SelfTestOptions) -> Vec<SuiteReport> {
    let mut reports = oracle_suites(options);
    reports.extend(unitarity_suites(options.draws));
    reports.push(loss_suite(options.draws.min(200)));
    reports.push(linearity_suite(options.draws.min(200)));
    reports.extend(reduction_suites());
    reports.push(normalization_suite(options.draws.min(500)));
    reports
}
