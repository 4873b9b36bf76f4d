//! Parameterized builders for the four supported device topologies.
//!
//! All templates take phases as primary inputs (δ = k₀·l); lengths never
//! appear. Each places the dipole probe so that its accumulated phase is a
//! simple function of the probe offset `s`:
//!
//! * waveguide: δ̃₀ = s·δ
//! * ring: δ̃₀ = s·δ₀ on the ring arc
//! * backscatter ring: δ̃₀ = δ₁ + s·δ₂, i.e. mismatch Δ = s·δ₂
//! * interferometric device: δ̃ = δ₃ + s·δ₅ from the Sagnac coupling point
//!
//! The default mode context (n = n_g = 2, A_eff = (λ₀/n)², λ₀ = 630 nm) and
//! dipole (1 debye, empty mode) only scale absolute rates; every ratio and
//! probability is independent of them.

use super::{Circuit, CircuitBuilder, CircuitError};
use crate::emission::{DipoleSpec, ModeContext};

/// Default mode data used by the templates: λ₀ = 630 nm, n = n_g = 2 and
/// A_eff = (λ₀/n)², which makes Γ_wg/(nΓ₀) exactly 3/(4π).
pub fn default_mode() -> ModeContext {
    let lambda0 = 630e-9;
    let n = 2.0;
    ModeContext::new(lambda0, n, 2.0, (lambda0 / n) * (lambda0 / n))
}

/// Default emitter: one debye, no photons in the mode.
pub fn default_dipole() -> DipoleSpec {
    DipoleSpec::new(3.33564e-30, 0)
}

/// Straight single-mode waveguide of total phase `phase`, probed at
/// fractional position `offset` from the left port.
pub fn template_waveguide(phase: f64, offset: f64) -> Result<Circuit, CircuitError> {
    let mut b = CircuitBuilder::new(default_mode(), default_dipole());
    b.segment("wg", phase, 1.0, ["l_in", "r_out"], ["r_in", "l_out"])?;
    b.port("L", "l_in", "l_out")?;
    b.port("R", "r_in", "r_out")?;
    b.probe("wg", offset)?;
    b.finish()
}

/// Waveguide-coupled ring resonator: self-coupling `sigma`, round-trip
/// phase `delta0`, probe at `offset` along the ring arc.
pub fn template_ring(sigma: f64, delta0: f64, offset: f64) -> Result<Circuit, CircuitError> {
    let mut b = CircuitBuilder::new(default_mode(), default_dipole());
    b.coupler(
        "c0",
        sigma,
        ["l_in", "ring_ret", "r_out", "ring_out"],
        ["r_in", "ring_cw_ret", "l_out", "ring_cw_out"],
    )?;
    b.segment("ring", delta0, 1.0, ["ring_out", "ring_ret"], ["ring_cw_out", "ring_cw_ret"])?;
    b.port("L", "l_in", "l_out")?;
    b.port("R", "r_in", "r_out")?;
    b.probe("ring", offset)?;
    b.finish()
}

/// Ring resonator with one lumped backscatterer. The counterclockwise path
/// runs coupler → (δ₁ arc) → scatterer → (δ₂ arc) → coupler; the probe
/// sits on the δ₂ arc, giving mismatch Δ = s·δ₂.
pub fn template_ring_backscatter(
    sigma: f64,
    rho: f64,
    delta1: f64,
    delta2: f64,
    offset: f64,
) -> Result<Circuit, CircuitError> {
    let mut b = CircuitBuilder::new(default_mode(), default_dipole());
    b.coupler(
        "c0",
        sigma,
        ["l_in", "ring_ret", "r_out", "ring_out"],
        ["r_in", "ring_cw_ret", "l_out", "ring_cw_out"],
    )?;
    b.segment("arc1", delta1, 1.0, ["ring_out", "sc_ccw_in"], ["sc_cw_out", "ring_cw_ret"])?;
    b.scatterer("sc", rho, ["sc_ccw_in", "sc_ccw_out"], ["sc_cw_in", "sc_cw_out"])?;
    b.segment("arc2", delta2, 1.0, ["sc_ccw_out", "ring_ret"], ["ring_cw_out", "sc_cw_in"])?;
    b.port("L", "l_in", "l_out")?;
    b.port("R", "r_in", "r_out")?;
    b.probe("arc2", offset)?;
    b.finish()
}

/// Main ring coupled to an output Sagnac interferometer (splitter
/// self-coupling `sigma_s`, loop arms δ₁ and δ₂) and an auxiliary ring
/// (round trip δ₄). The main ring consists of the δ₃ arc from the Sagnac
/// coupling to the auxiliary coupling and the probed δ₅ arc back.
pub fn template_sagnac_device(
    sigma_s: f64,
    sigma_ms: f64,
    sigma_ma: f64,
    deltas: [f64; 5],
    offset: f64,
) -> Result<Circuit, CircuitError> {
    let [d1, d2, d3, d4, d5] = deltas;
    let mut b = CircuitBuilder::new(default_mode(), default_dipole());
    b.coupler(
        "splitter",
        sigma_s,
        ["p1_in", "p2_in", "spl_arm1", "spl_arm2"],
        ["spl_arm1_ret", "spl_arm2_ret", "p1_out", "p2_out"],
    )?;
    b.coupler(
        "ms",
        sigma_ms,
        ["ring_ccw_d", "ms_arm1", "ring_ccw_a", "ms_arm2_ret"],
        ["ring_cw_a", "ms_arm2", "ring_cw_d", "ms_arm1_ret"],
    )?;
    b.coupler(
        "ma",
        sigma_ma,
        ["ring_ccw_b", "aux_ccw_b", "ring_ccw_c", "aux_ccw_a"],
        ["ring_cw_c", "aux_cw_a", "ring_cw_b", "aux_cw_b"],
    )?;
    // Sagnac loop: arm 1 keeps its direction labels, arm 2 crosses them —
    // light leaving the splitter clockwise reaches the ring coupler as a
    // counter-propagating input.
    b.segment("arm1", d1, 1.0, ["spl_arm1", "ms_arm1"], ["ms_arm1_ret", "spl_arm1_ret"])?;
    b.segment("arm2", d2, 1.0, ["spl_arm2", "ms_arm2"], ["ms_arm2_ret", "spl_arm2_ret"])?;
    b.segment("ring_ms_ma", d3, 1.0, ["ring_ccw_a", "ring_ccw_b"], ["ring_cw_b", "ring_cw_a"])?;
    b.segment("aux", d4, 1.0, ["aux_ccw_a", "aux_ccw_b"], ["aux_cw_b", "aux_cw_a"])?;
    b.segment("ring_ma_ms", d5, 1.0, ["ring_ccw_c", "ring_ccw_d"], ["ring_cw_d", "ring_cw_c"])?;
    b.port("p1", "p1_in", "p1_out")?;
    b.port("p2", "p2_in", "p2_out")?;
    b.probe("ring_ma_ms", offset)?;
    b.finish()
}
