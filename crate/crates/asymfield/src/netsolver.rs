//! Assembly and solution of the complex linear system implied by a circuit
//! under asymptotic-in excitation of its external ports.
//!
//! Row conventions, per element:
//!
//! * coupler, forward pair: `out_a − σ·in_a − iκ·in_b = 0`,
//!   `out_b − iκ·in_a − σ·in_b = 0`;
//! * coupler, backward pair (written from the outputs, with −iκ):
//!   `σ·out_a − iκ·out_b − in_a = 0`, `−iκ·out_a + σ·out_b − in_b = 0`;
//! * segment, each direction: `out − atten·e^{iδ}·in = 0`;
//! * scatterer: `out_ccw − τ·in_ccw − iρ·in_cw = 0`,
//!   `out_cw − iρ·in_ccw − τ·in_cw = 0`;
//! * one pin row per external port fixing its input amplitude.
//!
//! The two coupler forms are algebraically inverse to each other, so both
//! directions realize the same physical splitter.

use std::fmt;

use num_complex::Complex64;

use crate::circuit::{Circuit, Element, LinkId};

/// Solutions with a worse relative residual than this are errors.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Pivots below this magnitude mean a degenerate input (|σ| = 1 or |ρ| = 1
/// at an actual pole) rather than a solvable system.
pub const SINGULAR_PIVOT: f64 = 1e-12;

/// Square complex system `A x = b` over the directed-link amplitudes.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    n: usize,
    matrix: Vec<Complex64>,
    rhs: Vec<Complex64>,
}

impl LinearSystem {
    /// Number of unknowns; equals the circuit's directed-link count.
    pub fn dimension(&self) -> usize {
        self.n
    }

    fn at(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.n + col]
    }
}

/// Per-link amplitudes and the relative residual of the solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub amplitudes: Vec<Complex64>,
    pub residual: f64,
}

impl Solution {
    pub fn amplitude(&self, link: LinkId) -> Complex64 {
        self.amplitudes[link.index()]
    }
}

/// Complex enhancement `f = A_d + B_d` at the dipole, one entry per
/// external port in circuit order.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldEnhancement {
    pub per_port: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    /// Elimination hit a vanishing pivot; the magnitude is reported.
    Singular { pivot: f64 },
    /// Back substitution produced a solution that does not satisfy the
    /// system to the required accuracy.
    Residual { residual: f64 },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Singular { pivot } => {
                write!(f, "singular system: pivot magnitude {pivot:.3e} below {SINGULAR_PIVOT:.0e}")
            }
            SolveError::Residual { residual } => {
                write!(f, "solve residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:.0e}")
            }
        }
    }
}

impl std::error::Error for SolveError {}

/// Assembly switches; only used to inject deliberate faults in self-tests.
#[derive(Debug, Clone, Default)]
pub struct AssembleOptions {
    /// Flip the backward coupler rows to +iκ, breaking the direction
    /// convention. The oracle suite must then fail loudly.
    pub flip_backward_coupling: bool,
}

/// Assemble the system for unit excitation of one port (all others dark).
pub fn assemble(circuit: &Circuit, excited_port: usize) -> LinearSystem {
    let mut inputs = vec![Complex64::new(0.0, 0.0); circuit.ports.len()];
    inputs[excited_port] = Complex64::new(1.0, 0.0);
    assemble_with_inputs(circuit, &inputs)
}

/// Assemble with arbitrary complex amplitudes on the port inputs.
pub fn assemble_with_inputs(circuit: &Circuit, inputs: &[Complex64]) -> LinearSystem {
    assemble_with(circuit, inputs, &AssembleOptions::default())
}

pub fn assemble_with(
    circuit: &Circuit,
    inputs: &[Complex64],
    options: &AssembleOptions,
) -> LinearSystem {
    assert_eq!(inputs.len(), circuit.ports.len(), "one input amplitude per port");
    let n = circuit.link_count();
    let mut matrix = vec![Complex64::new(0.0, 0.0); n * n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    let mut row = 0;
    let set = |row: usize, col: LinkId, value: Complex64, matrix: &mut Vec<Complex64>| {
        matrix[row * n + col.index()] += value;
    };
    let one = Complex64::new(1.0, 0.0);
    let backward_cross_sign = if options.flip_backward_coupling { 1.0 } else { -1.0 };

    for element in &circuit.elements {
        match element {
            Element::Coupler(c) => {
                let sigma = Complex64::new(c.sigma, 0.0);
                let ik = Complex64::new(0.0, c.kappa());
                // out_a = σ in_a + iκ in_b
                set(row, c.fwd.out_a, one, &mut matrix);
                set(row, c.fwd.in_a, -sigma, &mut matrix);
                set(row, c.fwd.in_b, -ik, &mut matrix);
                row += 1;
                // out_b = iκ in_a + σ in_b
                set(row, c.fwd.out_b, one, &mut matrix);
                set(row, c.fwd.in_a, -ik, &mut matrix);
                set(row, c.fwd.in_b, -sigma, &mut matrix);
                row += 1;
                // σ out_a − iκ out_b = in_a
                let bk = backward_cross_sign * ik;
                set(row, c.bwd.out_a, sigma, &mut matrix);
                set(row, c.bwd.out_b, bk, &mut matrix);
                set(row, c.bwd.in_a, -one, &mut matrix);
                row += 1;
                // −iκ out_a + σ out_b = in_b
                set(row, c.bwd.out_a, bk, &mut matrix);
                set(row, c.bwd.out_b, sigma, &mut matrix);
                set(row, c.bwd.in_b, -one, &mut matrix);
                row += 1;
            }
            Element::Segment(s) => {
                let transfer = Complex64::from_polar(s.atten, s.phase);
                for (input, output) in [s.fwd, s.bwd] {
                    set(row, output, one, &mut matrix);
                    set(row, input, -transfer, &mut matrix);
                    row += 1;
                }
            }
            Element::Scatterer(s) => {
                let tau = Complex64::new(s.tau(), 0.0);
                let ir = Complex64::new(0.0, s.rho);
                set(row, s.ccw.1, one, &mut matrix);
                set(row, s.ccw.0, -tau, &mut matrix);
                set(row, s.cw.0, -ir, &mut matrix);
                row += 1;
                set(row, s.cw.1, one, &mut matrix);
                set(row, s.ccw.0, -ir, &mut matrix);
                set(row, s.cw.0, -tau, &mut matrix);
                row += 1;
            }
        }
    }
    for (port, &amplitude) in circuit.ports.iter().zip(inputs) {
        set(row, port.input, one, &mut matrix);
        rhs[row] = amplitude;
        row += 1;
    }
    assert_eq!(row, n, "equation count must equal the directed-link count");
    LinearSystem { n, matrix, rhs }
}

/// Solve by dense Gaussian elimination with partial pivoting.
///
/// Pivot search takes the first strict maximum over column magnitudes, so
/// repeated solves of the same system are bit-identical.
pub fn solve(system: &LinearSystem) -> Result<Solution, SolveError> {
    let n = system.n;
    let mut a = system.matrix.clone();
    let mut x = system.rhs.clone();

    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_mag = a[k * n + k].norm();
        for i in (k + 1)..n {
            let mag = a[i * n + k].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if pivot_mag < SINGULAR_PIVOT {
            return Err(SolveError::Singular { pivot: pivot_mag });
        }
        if pivot_row != k {
            for j in k..n {
                a.swap(k * n + j, pivot_row * n + j);
            }
            x.swap(k, pivot_row);
        }
        let pivot = a[k * n + k];
        for i in (k + 1)..n {
            let factor = a[i * n + k] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            a[i * n + k] = Complex64::new(0.0, 0.0);
            for j in (k + 1)..n {
                let akj = a[k * n + j];
                a[i * n + j] -= factor * akj;
            }
            let xk = x[k];
            x[i] -= factor * xk;
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in (i + 1)..n {
            acc -= a[i * n + j] * x[j];
        }
        x[i] = acc / a[i * n + i];
    }

    let mut b_norm = 0.0;
    let mut r_norm = 0.0;
    for i in 0..n {
        let ax: Complex64 = x.iter().enumerate().map(|(j, xj)| system.at(i, j) * xj).sum();
        r_norm += (ax - system.rhs[i]).norm_sqr();
        b_norm += system.rhs[i].norm_sqr();
    }
    let residual = if b_norm > 0.0 { (r_norm / b_norm).sqrt() } else { r_norm.sqrt() };
    if residual > RESIDUAL_TOLERANCE {
        return Err(SolveError::Residual { residual });
    }
    Ok(Solution { amplitudes: x, residual })
}

/// Extract the probe enhancement for each port from per-port solutions.
///
/// The forward amplitude entering the host segment propagates `s·δ` to the
/// dipole and the backward one `(1−s)·δ`; attenuation splits likewise.
///
/// Panics if the circuit has no probe or the solution count does not match
/// the port count; `Circuit::validate` rejects both cases beforehand.
pub fn probe_enhancement(circuit: &Circuit, solutions: &[Solution]) -> FieldEnhancement {
    assert_eq!(solutions.len(), circuit.ports.len(), "one solution per external port");
    let probe = circuit.probe.as_ref().expect("circuit has a dipole probe");
    let host = circuit.probe_segment().expect("probe references an existing segment");
    let s = probe.offset;
    let fwd_transfer = Complex64::from_polar(host.atten.powf(s), s * host.phase);
    let bwd_transfer = Complex64::from_polar(host.atten.powf(1.0 - s), (1.0 - s) * host.phase);
    let per_port = solutions
        .iter()
        .map(|sol| {
            sol.amplitude(host.fwd.0) * fwd_transfer + sol.amplitude(host.bwd.0) * bwd_transfer
        })
        .collect();
    FieldEnhancement { per_port }
}

/// Solve the circuit for every port and extract the probe enhancements.
pub fn enhancements(circuit: &Circuit) -> Result<FieldEnhancement, SolveError> {
    let solutions = solve_all_ports(circuit)?;
    Ok(probe_enhancement(circuit, &solutions))
}

/// One solution per external port, each under unit excitation of that port.
pub fn solve_all_ports(circuit: &Circuit) -> Result<Vec<Solution>, SolveError> {
    (0..circuit.ports.len()).map(|p| solve(&assemble(circuit, p))).collect()
}

/// External scattering matrix `S[out][in]` at the evaluation phases.
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrix {
    pub labels: Vec<String>,
    data: Vec<Complex64>,
}

impl SMatrix {
    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, out_port: usize, in_port: usize) -> Complex64 {
        self.data[out_port * self.labels.len() + in_port]
    }

    /// Largest entry of |S†S − 1|; zero for a lossless network.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dimension();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - expect).norm());
            }
        }
        worst
    }

    /// Largest |S_ij − S_ji|; zero for a reciprocal network.
    pub fn asymmetry(&self) -> f64 {
        let n = self.dimension();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        worst
    }

    /// Output power per unit input, column by column; < 1 signals loss.
    pub fn column_norms(&self) -> Vec<f64> {
        let n = self.dimension();
        (0..n).map(|j| (0..n).map(|i| self.get(i, j).norm_sqr()).sum::<f64>().sqrt()).collect()
    }
}

/// Compute the external scattering matrix by exciting each port in turn.
pub fn scattering_matrix(circuit: &Circuit) -> Result<SMatrix, SolveError> {
    let n = circuit.ports.len();
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for in_port in 0..n {
        let solution = solve(&assemble(circuit, in_port))?;
        for (out_port, port) in circuit.ports.iter().enumerate() {
            data[out_port * n + in_port] = solution.amplitude(port.output);
        }
    }
    Ok(SMatrix { labels: circuit.ports.iter().map(|p| p.label.clone()).collect(), data })
}
