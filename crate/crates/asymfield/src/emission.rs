//! Golden-rule spontaneous-emission rates from field enhancements.
//!
//! The guided-mode emission rate of an aligned point dipole is
//! `Γ_wg = p²ω₀ / (ε₀ n² ħ v_g A_eff)`, scaled by `(n_occ + 1)` for a
//! pre-populated mode. Per-channel rates follow from the dimensionless
//! enhancements `f_j` as `Γ_j = (Γ_wg / 2) |f_j|²`.

use std::fmt;

use num_complex::Complex64;

/// Speed of light in vacuum (m/s, exact).
pub const C_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant (J·s, CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity (F/m, CODATA 2018).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Scalar waveguide-mode data entering the rate prefactors.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeContext {
    /// Vacuum emission wavelength (m).
    pub lambda0: f64,
    /// Refractive index at the dipole position.
    pub n: f64,
    /// Group index; the group velocity is `c / n_g`.
    pub n_g: f64,
    /// Effective mode area at the dipole (m²).
    pub a_eff: f64,
    /// Resonator round-trip length (m), needed only for Q and V_eff.
    pub resonator_len: Option<f64>,
}

impl ModeContext {
    pub fn new(lambda0: f64, n: f64, n_g: f64, a_eff: f64) -> Self {
        Self { lambda0, n, n_g, a_eff, resonator_len: None }
    }

    /// Angular frequency ω₀ = 2πc/λ₀ (rad/s).
    pub fn omega0(&self) -> f64 {
        2.0 * std::f64::consts::PI * C_LIGHT / self.lambda0
    }

    /// Propagation constant k₀ = ω₀ n / c (rad/m).
    pub fn k0(&self) -> f64 {
        self.omega0() * self.n / C_LIGHT
    }

    /// Group velocity v_g = c / n_g (m/s).
    pub fn v_g(&self) -> f64 {
        C_LIGHT / self.n_g
    }
}

/// Emitter data: dipole moment, initial mode occupation, alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleSpec {
    /// Dipole moment magnitude (C·m).
    pub moment: f64,
    /// Photons already occupying the emission mode; rates scale with `n_occ + 1`.
    pub n_occ: u32,
    /// cos² alignment factor between dipole and mode field, default 1.
    pub alignment: f64,
}

impl DipoleSpec {
    pub fn new(moment: f64, n_occ: u32) -> Self {
        Self { moment, n_occ, alignment: 1.0 }
    }
}

/// Rates and port probabilities derived from a set of enhancements.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// Bare-waveguide emission rate Γ_wg (s⁻¹).
    pub gamma_wg: f64,
    /// Homogeneous-medium reference rate Γ₀ (s⁻¹).
    pub gamma_free: f64,
    /// Per-port rates Γ_j (s⁻¹), in input order.
    pub gamma_per_port: Vec<f64>,
    /// Total rate ΣΓ_j (s⁻¹).
    pub gamma_total: f64,
    /// Per-port exit probabilities Γ_j/Γ_total; `None` when the total
    /// rate underflows (fully suppressed dipole).
    pub probabilities: Option<Vec<f64>>,
    /// Γ_total / Γ_wg.
    pub total_ratio: f64,
    /// Γ_wg / (n Γ₀), the waveguide Purcell-type figure.
    pub purcell_wg: f64,
}

/// Raised when a rate helper needs a resonator length that was not supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct MissingLength;

impl fmt::Display for MissingLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mode context has no resonator length")
    }
}

impl std::error::Error for MissingLength {}

/// Emission rate into the guided modes of a bare waveguide (s⁻¹).
pub fn gamma_wg(mode: &ModeContext, dipole: &DipoleSpec) -> f64 {
    let p2 = dipole.moment * dipole.moment;
    let occupancy = f64::from(dipole.n_occ) + 1.0;
    occupancy * dipole.alignment * p2 * mode.omega0()
        / (EPSILON_0 * mode.n * mode.n * HBAR * mode.v_g() * mode.a_eff)
}

/// Emission rate of a randomly oriented dipole in a homogeneous medium (s⁻¹).
pub fn gamma_free(mode: &ModeContext, dipole: &DipoleSpec) -> f64 {
    let p2 = dipole.moment * dipole.moment;
    let w0 = mode.omega0();
    p2 * w0 * w0 * w0 / (3.0 * EPSILON_0 * HBAR * std::f64::consts::PI * C_LIGHT.powi(3))
}

/// Waveguide Purcell-type figure Γ_wg/(nΓ₀) = (3/4π)(n_g/n)(λ₀/n)²/A_eff.
pub fn purcell_wg_ratio(mode: &ModeContext) -> f64 {
    let lam_n = mode.lambda0 / mode.n;
    3.0 / (4.0 * std::f64::consts::PI) * (mode.n_g / mode.n) * lam_n * lam_n / mode.a_eff
}

/// Below this total rate (s⁻¹) port probabilities are reported as undefined.
const ZERO_TOTAL_THRESHOLD: f64 = 1e-300;

/// Turn per-port enhancements into physical rates and probabilities.
///
/// Each port contributes `Γ_j = (Γ_wg / 2) |f_j|²`; the factor 1/2 makes the
/// bare waveguide (|f_L| = |f_R| = 1) recover Γ_total = Γ_wg.
pub fn rates_from_enhancements(
    enhancements: &[Complex64],
    mode: &ModeContext,
    dipole: &DipoleSpec,
) -> RateReport {
    let g_wg = gamma_wg(mode, dipole);
    let g0 = gamma_free(mode, dipole);
    let per_port: Vec<f64> = enhancements.iter().map(|f| 0.5 * g_wg * f.norm_sqr()).collect();
    let total: f64 = per_port.iter().sum();
    let probabilities = if total > ZERO_TOTAL_THRESHOLD {
        Some(per_port.iter().map(|g| g / total).collect())
    } else {
        None
    };
    RateReport {
        gamma_wg: g_wg,
        gamma_free: g0,
        gamma_total: total,
        total_ratio: total / g_wg,
        probabilities,
        gamma_per_port: per_port,
        purcell_wg: purcell_wg_ratio(mode),
    }
}

/// Quality factor estimated from the self-coupling, Q = ω₀ l / (2 v_g (1−σ)).
///
/// The relation assumes the high-finesse regime; `in_validity` is false
/// below σ = 0.9 where the estimate degrades.
#[derive(Debug, Clone, PartialEq)]
pub struct QEstimate {
    pub q: f64,
    pub in_validity: bool,
}

pub fn q_from_sigma(sigma: f64, mode: &ModeContext) -> Result<QEstimate, MissingLength> {
    let l = mode.resonator_len.ok_or(MissingLength)?;
    let q = mode.omega0() * l / (2.0 * mode.v_g() * (1.0 - sigma));
    Ok(QEstimate { q, in_validity: sigma >= 0.9 })
}

/// High-finesse resonant Purcell figure Γ_ring/(nΓ₀) = (3/2π²)(λ₀/n)³ Q / V_eff
/// with V_eff = A_eff·l.
pub fn purcell_highfinesse(sigma: f64, mode: &ModeContext) -> Result<QEstimate, MissingLength> {
    let l = mode.resonator_len.ok_or(MissingLength)?;
    let est = q_from_sigma(sigma, mode)?;
    let lam_n = mode.lambda0 / mode.n;
    let v_eff = mode.a_eff * l;
    let ratio =
        3.0 / (2.0 * std::f64::consts::PI * std::f64::consts::PI) * lam_n.powi(3) * est.q / v_eff;
    Ok(QEstimate { q: ratio, in_validity: est.in_validity })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_mode() -> ModeContext {
        let lambda0 = 630e-9;
        let n = 2.0;
        ModeContext::new(lambda0, n, 2.0, (lambda0 / n) * (lambda0 / n))
    }

    #[test]
    fn doubling_area_halves_gamma_wg() {
        let mode = reference_mode();
        let mut wide = mode.clone();
        wide.a_eff *= 2.0;
        let dip = DipoleSpec::new(1e-29, 0);
        let ratio = gamma_wg(&mode, &dip) / gamma_wg(&wide, &dip);
        assert!((ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn occupation_factor_doubles_rate() {
        let mode = reference_mode();
        let ground = DipoleSpec::new(1e-29, 0);
        let seeded = DipoleSpec::new(1e-29, 1);
        let ratio = gamma_wg(&mode, &seeded) / gamma_wg(&mode, &ground);
        assert!((ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn misalignment_scales_as_cos_squared() {
        let mode = reference_mode();
        let aligned = DipoleSpec::new(1e-29, 0);
        let mut tilted = aligned.clone();
        tilted.alignment = 0.25;
        let ratio = gamma_wg(&mode, &tilted) / gamma_wg(&mode, &aligned);
        assert!((ratio - 0.25).abs() < 1e-12);
    }

    #[test]
    fn free_rate_scaling_laws() {
        let mode = reference_mode();
        let dip = DipoleSpec::new(1e-29, 0);
        let mut blue = mode.clone();
        blue.lambda0 /= 2.0; // doubles omega0
        assert!((gamma_free(&blue, &dip) / gamma_free(&mode, &dip) - 8.0).abs() < 1e-9);
        let strong = DipoleSpec::new(2e-29, 0);
        assert!((gamma_free(&mode, &strong) / gamma_free(&mode, &dip) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn purcell_wg_reference_value() {
        // n = n_g = 2 and A_eff = (λ0/n)² gives exactly 3/(4π).
        let mode = reference_mode();
        let expect = 3.0 / (4.0 * std::f64::consts::PI);
        assert!((purcell_wg_ratio(&mode) - expect).abs() < 1e-12);
        assert!((purcell_wg_ratio(&mode) - 0.238_732).abs() < 1e-6);
        // Cross-route: same number through the dimensional rates.
        let dip = DipoleSpec::new(1e-29, 0);
        let via_rates = gamma_wg(&mode, &dip) / (mode.n * gamma_free(&mode, &dip));
        assert!((via_rates - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn waveguide_enhancements_recover_gamma_wg() {
        let mode = reference_mode();
        let dip = DipoleSpec::new(1e-29, 0);
        let one = Complex64::new(1.0, 0.0);
        let report = rates_from_enhancements(&[one, one], &mode, &dip);
        assert_eq!(report.gamma_total, report.gamma_wg);
        let p = report.probabilities.unwrap();
        assert_eq!(p, vec![0.5, 0.5]);
    }

    #[test]
    fn suppressed_dipole_has_undefined_probabilities() {
        let mode = reference_mode();
        let dip = DipoleSpec::new(1e-29, 0);
        let zero = Complex64::new(0.0, 0.0);
        let report = rates_from_enhancements(&[zero, zero], &mode, &dip);
        assert_eq!(report.gamma_total, 0.0);
        assert!(report.probabilities.is_none());
    }

    #[test]
    fn q_estimate_and_validity_flag() {
        let mut mode = reference_mode();
        mode.resonator_len = Some(100e-6);
        let est = q_from_sigma(0.98, &mode).unwrap();
        assert!(est.in_validity);
        // 2/(1-σ) = 4 v_g Q / (ω0 l) rearranged.
        let back = 4.0 * mode.v_g() * est.q / (mode.omega0() * 100e-6);
        assert!((back - 2.0 / (1.0 - 0.98)).abs() / back < 1e-12);
        assert!(!q_from_sigma(0.5, &mode).unwrap().in_validity);
        assert!(q_from_sigma(0.98, &reference_mode()).is_err());
    }

    #[test]
    fn q_grows_monotonically_toward_unity_coupling() {
        let mut mode = reference_mode();
        mode.resonator_len = Some(50e-6);
        let mut last = 0.0;
        for k in 0..6 {
            let sigma = 1.0 - 10f64.powi(-(k + 1));
            let q = q_from_sigma(sigma, &mode).unwrap().q;
            assert!(q > last);
            last = q;
        }
    }

    #[test]
    fn highfinesse_matches_exact_ring_rate_near_unity() {
        // Relative gap between the Lorentzian 2/(1-σ) and the exact
        // resonant ratio (1+σ)/(1-σ) is (1-σ)/(1+σ) ≤ (1-σ).
        let mut mode = reference_mode();
        mode.resonator_len = Some(100e-6);
        for &sigma in &[0.9, 0.95, 0.98, 0.999] {
            let hf = purcell_highfinesse(sigma, &mode).unwrap().q;
            let exact = purcell_wg_ratio(&mode) * (1.0 + sigma) / (1.0 - sigma);
            let gap = (hf - exact).abs() / exact;
            assert!(gap <= 2.0 * (1.0 - sigma), "sigma={sigma} gap={gap}");
        }
        // Algebraic identity: high-finesse route equals Γ_wg/(nΓ0) · 2/(1-σ).
        let hf = purcell_highfinesse(0.98, &mode).unwrap().q;
        let alt = purcell_wg_ratio(&mode) * 2.0 / (1.0 - 0.98);
        assert!((hf - alt).abs() / alt < 1e-12);
    }
}
