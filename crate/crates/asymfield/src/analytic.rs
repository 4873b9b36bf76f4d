//! Closed-form field enhancements and rate ratios for the built-in
//! topologies: waveguide-coupled ring, ring with a lumped backscatterer,
//! and the ring/auxiliary-ring/Sagnac device.
//!
//! These expressions are the independent cross-check for the network
//! solver and the fast path for parameter sweeps. All forms are lossless;
//! attenuated circuits must go through the solver.

use std::fmt;

use num_complex::Complex64;

/// Denominators smaller than this are reported as divergent rather than
/// evaluated; sweep grids routinely land within float noise of resonances.
pub const DIVERGENCE_THRESHOLD: f64 = 1e-12;

/// A closed form was evaluated at (or within float noise of) a pole.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceError {
    /// Magnitude of the vanishing denominator.
    pub magnitude: f64,
}

impl fmt::Display for DivergenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "denominator magnitude {:.3e} below divergence threshold {:.0e}",
            self.magnitude, DIVERGENCE_THRESHOLD
        )
    }
}

impl std::error::Error for DivergenceError {}

fn phasor(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

fn guard(denominator: Complex64) -> Result<Complex64, DivergenceError> {
    let magnitude = denominator.norm();
    if magnitude < DIVERGENCE_THRESHOLD {
        Err(DivergenceError { magnitude })
    } else {
        Ok(denominator)
    }
}

/// Waveguide-coupled ring resonator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingParams {
    /// Coupler self-coupling σ.
    pub sigma: f64,
    /// Ring round-trip phase δ₀ (rad).
    pub delta0: f64,
    /// Dipole phase δ̃₀ (rad), measured counterclockwise from the coupler.
    pub dipole_phase: f64,
}

impl RingParams {
    pub fn new(sigma: f64, delta0: f64, dipole_phase: f64) -> Self {
        Self { sigma, delta0, dipole_phase }
    }

    /// Cross-coupling κ = √(1 − σ²).
    pub fn kappa(&self) -> f64 {
        (1.0 - self.sigma * self.sigma).sqrt()
    }
}

/// Enhancements at the dipole for left/right excitation of the plain ring.
///
/// f_L = iκ e^{iδ̃₀} / (1 − σ e^{iδ₀}),  f_R = iκ e^{i(δ₀−δ̃₀)} / (1 − σ e^{iδ₀}).
pub fn ring_enhancements(p: &RingParams) -> Result<(Complex64, Complex64), DivergenceError> {
    let den = guard(Complex64::new(1.0, 0.0) - p.sigma * phasor(p.delta0))?;
    let common = Complex64::new(0.0, p.kappa()) / den;
    let f_left = common * phasor(p.dipole_phase);
    let f_right = common * phasor(p.delta0 - p.dipole_phase);
    Ok((f_left, f_right))
}

/// Total ring emission over the waveguide rate, κ² / (1 + σ² − 2σ cos δ₀).
pub fn ring_rate_ratio(p: &RingParams) -> Result<f64, DivergenceError> {
    let den = guard(Complex64::new(1.0, 0.0) - p.sigma * phasor(p.delta0))?;
    Ok(p.kappa().powi(2) / den.norm_sqr())
}

/// Ring resonator with one lumped backscatterer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackscatterParams {
    /// Coupler self-coupling σ.
    pub sigma: f64,
    /// Scatterer reflection coefficient ρ.
    pub rho: f64,
    /// Arc phase from the coupler to the scatterer (counterclockwise), rad.
    pub delta1: f64,
    /// Arc phase from the scatterer back to the coupler, rad.
    pub delta2: f64,
    /// Dipole phase δ̃₀ (rad) from the coupler; the dipole sits on the
    /// second arc, so δ̃₀ − δ₁ ∈ [0, δ₂].
    pub dipole_phase: f64,
}

impl BackscatterParams {
    pub fn new(sigma: f64, rho: f64, delta1: f64, delta2: f64, dipole_phase: f64) -> Self {
        Self { sigma, rho, delta1, delta2, dipole_phase }
    }

    pub fn kappa(&self) -> f64 {
        (1.0 - self.sigma * self.sigma).sqrt()
    }

    /// Scatterer transmission τ = √(1 − ρ²).
    pub fn tau(&self) -> f64 {
        (1.0 - self.rho * self.rho).sqrt()
    }

    /// Round-trip phase δ₀ = δ₁ + δ₂.
    pub fn delta0(&self) -> f64 {
        self.delta1 + self.delta2
    }

    /// Dipole/scatterer phase mismatch Δ = δ̃₀ − δ₁.
    pub fn mismatch(&self) -> f64 {
        self.dipole_phase - self.delta1
    }

    fn denominator(&self) -> Result<Complex64, DivergenceError> {
        let round = phasor(self.delta0());
        guard(
            Complex64::new(1.0, 0.0) - 2.0 * self.tau() * self.sigma * round
                + self.sigma * self.sigma * round * round,
        )
    }
}

/// Enhancements at the dipole with backscattering present.
///
/// Each excitation now reaches the dipole as a superposition of the two
/// circulation directions:
///
/// f_L = [iκ(τ − σe^{iδ₀}) e^{iδ̃₀} − ρκσ e^{2iδ₁} e^{i(δ₀−δ̃₀)}] / D,
/// f_R = [iκ(1 − τσe^{iδ₀}) e^{i(δ₀−δ̃₀)} − ρκ e^{iδ₂} e^{i(δ̃₀−δ₁)}] / D,
///
/// with D = 1 − 2τσ e^{iδ₀} + σ² e^{2iδ₀}.
pub fn backscatter_enhancements(
    p: &BackscatterParams,
) -> Result<(Complex64, Complex64), DivergenceError> {
    let den = p.denominator()?;
    let kappa = p.kappa();
    let tau = p.tau();
    let round = phasor(p.delta0());
    let i = Complex64::new(0.0, 1.0);

    let f_left = (i * kappa * (tau - p.sigma * round) * phasor(p.dipole_phase)
        - p.rho * kappa * p.sigma * phasor(2.0 * p.delta1) * phasor(p.delta0() - p.dipole_phase))
        / den;
    let f_right = (i
        * kappa
        * (Complex64::new(1.0, 0.0) - tau * p.sigma * round)
        * phasor(p.delta0() - p.dipole_phase)
        - p.rho * kappa * phasor(p.delta2) * phasor(p.dipole_phase - p.delta1))
        / den;
    Ok((f_left, f_right))
}

/// Normalized backscatter rates `(Γ_rb, Γ_rb,L, Γ_rb,R) / Γ_wg`.
pub fn backscatter_rates(p: &BackscatterParams) -> Result<(f64, f64, f64), DivergenceError> {
    let den = p.denominator()?;
    let d2 = den.norm_sqr();
    let kappa2 = p.kappa().powi(2);
    let tau = p.tau();
    let sigma = p.sigma;
    let round = phasor(p.delta0());
    let standing =
        Complex64::new(1.0, 0.0) - Complex64::new(0.0, p.rho) * phasor(-2.0 * p.mismatch());

    let left = (2.0
        * (kappa2 * (Complex64::new(sigma * sigma, 0.0) - tau * sigma * round) * standing).re
        + kappa2 * kappa2 * tau * tau)
        / (2.0 * d2);
    let right = (2.0 * (kappa2 * (Complex64::new(1.0, 0.0) - tau * sigma * round) * standing).re
        - kappa2 * kappa2 * tau * tau)
        / (2.0 * d2);
    let total = kappa2
        * (2.0
            * ((Complex64::new(1.0 + sigma * sigma, 0.0) - 2.0 * tau * sigma * round) * standing)
                .re)
        / (2.0 * d2);
    Ok((total, left, right))
}

/// Main ring coupled to a Sagnac interferometer and an auxiliary ring.
///
/// Arc phases follow the device graph: δ₁ and δ₂ are the two splitter-to-ring
/// arms of the Sagnac loop, δ₃ the main-ring arc from the Sagnac coupling to
/// the auxiliary coupling, δ₄ the auxiliary round trip, δ₅ the main-ring arc
/// back to the Sagnac coupling. The dipole sits on the δ₅ arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SagnacParams {
    /// Output splitter self-coupling σ_s (1/√2 for a balanced splitter).
    pub sigma_s: f64,
    /// Main-ring/Sagnac self-coupling σ_ms.
    pub sigma_ms: f64,
    /// Main-ring/auxiliary-ring self-coupling σ_ma.
    pub sigma_ma: f64,
    /// Arc phases δ₁..δ₅ (rad).
    pub delta: [f64; 5],
    /// Dipole phase δ̃ (rad) measured counterclockwise from the Sagnac
    /// coupling point, so δ̃ ∈ [δ₃, δ₃ + δ₅] for a dipole on the δ₅ arc.
    pub dipole_phase: f64,
}

impl SagnacParams {
    pub fn new(
        sigma_s: f64,
        sigma_ms: f64,
        sigma_ma: f64,
        delta: [f64; 5],
        dipole_phase: f64,
    ) -> Self {
        Self { sigma_s, sigma_ms, sigma_ma, delta, dipole_phase }
    }

    pub fn kappa_s(&self) -> f64 {
        (1.0 - self.sigma_s * self.sigma_s).sqrt()
    }

    pub fn kappa_ms(&self) -> f64 {
        (1.0 - self.sigma_ms * self.sigma_ms).sqrt()
    }

    pub fn kappa_ma(&self) -> f64 {
        (1.0 - self.sigma_ma * self.sigma_ma).sqrt()
    }

    /// Main-ring round-trip phase δ_m = δ₃ + δ₅.
    pub fn delta_m(&self) -> f64 {
        self.delta[2] + self.delta[4]
    }

    /// Auxiliary round-trip phase δ_a = δ₄.
    pub fn delta_a(&self) -> f64 {
        self.delta[3]
    }

    /// Sagnac loop phase δ_s = δ₁ + δ₂.
    pub fn delta_s(&self) -> f64 {
        self.delta[0] + self.delta[1]
    }

    /// Unimodular auxiliary-ring response C = (1 − σ_ma e^{−iδ_a})/(1 − σ_ma e^{iδ_a}).
    pub fn aux_response(&self) -> Result<Complex64, DivergenceError> {
        let da = self.delta_a();
        let den = guard(Complex64::new(1.0, 0.0) - self.sigma_ma * phasor(da))?;
        Ok((Complex64::new(1.0, 0.0) - self.sigma_ma * phasor(-da)) / den)
    }
}

/// Enhancements at the dipole for excitation of ports 1 and 2.
///
/// Every excitation reaches the dipole as a superposition of the two main-ring
/// circulation directions; the counterclockwise component carries e^{i(δ̃−δ₃)}
/// and the clockwise one e^{i(δ_m−δ̃)}:
///
/// f₁ = [−iσ_sκ_ms e^{i(δ₁+δ₃+δ₄)}(1−σ_ma e^{−iδ₄}) e^{i(δ̃−δ₃)}
///        − κ_sκ_ms e^{iδ₂}(1−σ_ma e^{iδ₄}) e^{i(δ_m−δ̃)}] / D,
/// f₂ = [ κ_sκ_ms e^{i(δ₁+δ₃+δ₄)}(1−σ_ma e^{−iδ₄}) e^{i(δ̃−δ₃)}
///        + iσ_sκ_ms e^{iδ₂}(1−σ_ma e^{iδ₄}) e^{i(δ_m−δ̃)}] / D,
///
/// with D = 1 − σ_ma e^{iδ₄} + σ_ms e^{i(δ₃+δ₄+δ₅)}(1 − σ_ma e^{−iδ₄}).
pub fn sagnac_enhancements(p: &SagnacParams) -> Result<(Complex64, Complex64), DivergenceError> {
    let [d1, d2, d3, d4, d5] = p.delta;
    let one = Complex64::new(1.0, 0.0);
    let den = guard(
        one - p.sigma_ma * phasor(d4)
            + p.sigma_ms * phasor(d3 + d4 + d5) * (one - p.sigma_ma * phasor(-d4)),
    )?;
    let i = Complex64::new(0.0, 1.0);
    let ccw = p.kappa_ms()
        * phasor(d1 + d3 + d4)
        * (one - p.sigma_ma * phasor(-d4))
        * phasor(p.dipole_phase - d3)
        / den;
    let cw = p.kappa_ms()
        * phasor(d2)
        * (one - p.sigma_ma * phasor(d4))
        * phasor(p.delta_m() - p.dipole_phase)
        / den;
    let f1 = -i * p.sigma_s * ccw - p.kappa_s() * cw;
    let f2 = p.kappa_s() * ccw + i * p.sigma_s * cw;
    Ok((f1, f2))
}

/// Total emission over the waveguide rate,
/// Γ_T/Γ_wg = κ_ms² / (1 + σ_ms² + σ_ms [C e^{i(δ_a+δ_m)} + c.c.]).
///
/// Independent of the splitter ratio, the Sagnac phase and the dipole position.
pub fn sagnac_total_rate(p: &SagnacParams) -> Result<f64, DivergenceError> {
    let c = p.aux_response()?;
    let cross = (c * phasor(p.delta_a() + p.delta_m())).re;
    let den = 1.0 + p.sigma_ms * p.sigma_ms + 2.0 * p.sigma_ms * cross;
    if den.abs() < DIVERGENCE_THRESHOLD * DIVERGENCE_THRESHOLD {
        return Err(DivergenceError { magnitude: den.abs().sqrt() });
    }
    Ok(p.kappa_ms().powi(2) / den)
}

/// Port exit probabilities (P₁, P₂), computed from the general enhancements.
pub fn sagnac_port_probs(p: &SagnacParams) -> Result<(f64, f64), DivergenceError> {
    let (f1, f2) = sagnac_enhancements(p)?;
    let total = f1.norm_sqr() + f2.norm_sqr();
    if total < 1e-300 {
        return Err(DivergenceError { magnitude: total });
    }
    Ok((f1.norm_sqr() / total, f2.norm_sqr() / total))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIGMA: f64 = 0.98;

    #[test]
    fn ring_resonant_enhancement() {
        let p = RingParams::new(SIGMA, 0.0, 0.0);
        let (fl, fr) = ring_enhancements(&p).unwrap();
        let expect = (1.0 - SIGMA * SIGMA).sqrt() / (1.0 - SIGMA);
        assert!((fl - Complex64::new(0.0, expect)).norm() < 1e-12 * expect);
        assert!((fr - fl).norm() < 1e-12 * expect);
        assert!((fl.im - 9.9499).abs() < 1e-4);
        assert!((fl.norm_sqr() - 99.0).abs() < 1e-9);
    }

    #[test]
    fn ring_bare_waveguide_limit() {
        for delta0 in [0.0, 1.0, 3.0, 6.0] {
            let p = RingParams::new(0.0, delta0, 0.3);
            let (fl, _) = ring_enhancements(&p).unwrap();
            assert!((fl.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ring_antiresonant_enhancement() {
        let p = RingParams::new(SIGMA, std::f64::consts::PI, 0.0);
        let (fl, _) = ring_enhancements(&p).unwrap();
        assert!((fl.norm() - 0.100504).abs() < 1e-6);
        let ratio = ring_rate_ratio(&p).unwrap();
        assert!((ratio - (1.0 - SIGMA) / (1.0 + SIGMA)).abs() < 1e-12);
        assert!((ratio - 0.010101).abs() < 1e-6);
    }

    #[test]
    fn ring_rate_matches_resonant_value_and_lorentzian() {
        let p = RingParams::new(SIGMA, 0.0, 0.0);
        let ratio = ring_rate_ratio(&p).unwrap();
        assert!((ratio - 99.0).abs() < 1e-9);
        // High-finesse Lorentzian estimate 2/(1-σ) = 100 agrees within 1%.
        let lorentzian = 2.0 / (1.0 - SIGMA);
        assert!((ratio - lorentzian).abs() / lorentzian < 0.01);
    }

    #[test]
    fn ring_divergence_at_unity_coupling() {
        let p = RingParams::new(1.0, 0.0, 0.0);
        assert!(ring_enhancements(&p).is_err());
        assert!(ring_rate_ratio(&p).is_err());
        // Off resonance the σ = 1 denominator is finite.
        let p = RingParams::new(1.0, std::f64::consts::PI, 0.0);
        assert!(ring_rate_ratio(&p).is_ok());
    }

    #[test]
    fn backscatter_reduces_to_ring_at_zero_reflection() {
        for (k, delta0) in [0.0, 0.7, 2.9, 5.5].iter().enumerate() {
            let dipole = 0.17 + 0.4 * k as f64;
            let ring = RingParams::new(SIGMA, *delta0, dipole);
            let bs = BackscatterParams::new(SIGMA, 0.0, 0.0, *delta0, dipole);
            let (rl, rr) = ring_enhancements(&ring).unwrap();
            let (bl, br) = backscatter_enhancements(&bs).unwrap();
            assert!((rl - bl).norm() < 1e-12 * (1.0 + rl.norm()));
            assert!((rr - br).norm() < 1e-12 * (1.0 + rr.norm()));
        }
    }

    #[test]
    fn backscatter_resonant_rate_value() {
        // Resonant ring (δ₁ = δ₂ = 0), dipole aligned with the scatterer.
        let p = BackscatterParams::new(SIGMA, 0.017, 0.0, 0.0, 0.0);
        let (total, left, right) = backscatter_rates(&p).unwrap();
        let kappa2 = 1.0 - SIGMA * SIGMA;
        let tau = (1.0f64 - 0.017 * 0.017).sqrt();
        let resonant = kappa2 / (0.017 * 0.017 + (tau - SIGMA) * (tau - SIGMA));
        assert!((total - resonant).abs() < 1e-9 * resonant);
        assert!((total - 57.96).abs() < 0.01);
        assert!((left + right - total).abs() < 1e-12 * total);

        let (fl, fr) = backscatter_enhancements(&p).unwrap();
        let via_fields = 0.5 * (fl.norm_sqr() + fr.norm_sqr());
        assert!((via_fields - total).abs() < 1e-12 * total);
    }

    #[test]
    fn backscatter_mismatch_extremes() {
        let rho = 0.017;
        let at = |mismatch: f64| {
            let p = BackscatterParams::new(SIGMA, rho, 0.0, 0.0, mismatch);
            backscatter_rates(&p).unwrap().0
        };
        let ratio = at(std::f64::consts::FRAC_PI_4) / at(3.0 * std::f64::consts::FRAC_PI_4);
        assert!((ratio - (1.0 - rho) / (1.0 + rho)).abs() < 1e-12);
        assert!((ratio - 0.96657).abs() < 5e-6);
    }

    #[test]
    fn backscatter_rate_split_is_exact() {
        // Γ_L + Γ_R = Γ_rb for arbitrary (non-resonant) parameters.
        for sigma in [0.1, 0.6, 0.98] {
            for rho in [0.0, 0.3, 0.8] {
                for delta1 in [0.0, 1.7, 4.9] {
                    for mismatch in [0.0, 0.9, 2.2] {
                        let p = BackscatterParams::new(sigma, rho, delta1, 2.6, delta1 + mismatch);
                        let (total, left, right) = backscatter_rates(&p).unwrap();
                        assert!((left + right - total).abs() <= 1e-12 * (1.0 + total.abs()));
                    }
                }
            }
        }
    }

    #[test]
    fn backscatter_resonant_probabilities_match_standing_wave_forms() {
        let rho = 0.017;
        let tau = (1.0f64 - rho * rho).sqrt();
        let kappa2 = 1.0 - SIGMA * SIGMA;
        for k in 0..32 {
            let mismatch = k as f64 * std::f64::consts::PI / 8.0;
            let p = BackscatterParams::new(SIGMA, rho, 0.0, 0.0, mismatch);
            let (total, left, right) = backscatter_rates(&p).unwrap();
            let p_left = left / total;
            let p_right = right / total;
            assert!((p_left + p_right - 1.0).abs() <= 1e-12);

            // Standing-wave split at resonance, written independently.
            let standing = 1.0 - rho * (2.0 * mismatch).sin();
            let d = rho * rho + (tau - SIGMA) * (tau - SIGMA);
            let expect_left = (2.0 * SIGMA * (SIGMA - tau) * standing + kappa2 * tau * tau)
                / (2.0 * standing * d);
            let expect_right =
                (2.0 * (1.0 - tau * SIGMA) * standing - kappa2 * tau * tau) / (2.0 * standing * d);
            assert!((p_left - expect_left).abs() < 1e-10);
            assert!((p_right - expect_right).abs() < 1e-10);
        }
    }

    #[test]
    fn aux_response_is_unimodular() {
        for k in 0..25 {
            let p = SagnacParams::new(
                std::f64::consts::FRAC_1_SQRT_2,
                SIGMA,
                0.04 * k as f64,
                [0.0, 0.0, 1.0, 0.25 * k as f64, 2.0],
                1.5,
            );
            let c = p.aux_response().unwrap();
            assert!((c.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sagnac_total_rate_matches_enhancement_route() {
        let p = SagnacParams::new(
            std::f64::consts::FRAC_1_SQRT_2,
            SIGMA,
            0.7,
            [0.3, 1.1, 0.9, 2.2, 1.7],
            0.9 + 1.3,
        );
        let (f1, f2) = sagnac_enhancements(&p).unwrap();
        let via_fields = 0.5 * (f1.norm_sqr() + f2.norm_sqr());
        let closed = sagnac_total_rate(&p).unwrap();
        assert!((via_fields - closed).abs() < 1e-12 * closed);
    }

    #[test]
    fn sagnac_total_rate_ignores_splitter_sagnac_and_dipole() {
        let base = SagnacParams::new(
            std::f64::consts::FRAC_1_SQRT_2,
            SIGMA,
            0.7,
            [0.3, 1.1, 0.9, 2.2, 1.7],
            1.6,
        );
        let reference = sagnac_total_rate(&base).unwrap();
        for k in 0..64 {
            let t = k as f64 / 63.0;
            let mut p = base;
            p.dipole_phase = p.delta[2] + t * p.delta[4];
            p.delta[1] = 2.0 * std::f64::consts::PI * t;
            p.sigma_s = 0.999 * t;
            let (f1, f2) = sagnac_enhancements(&p).unwrap();
            let total = 0.5 * (f1.norm_sqr() + f2.norm_sqr());
            assert!((total - reference).abs() <= 1e-12 * reference);
            assert!((sagnac_total_rate(&p).unwrap() - reference).abs() <= 1e-12 * reference);
        }
    }

    #[test]
    fn sagnac_reduces_to_ring_when_aux_decouples() {
        // At δ_a = π the auxiliary ring is antiresonant and fully transparent,
        // so any σ_ma leaves the plain-ring response in δ_m.
        for k in 0..16 {
            let delta_m = 0.4 * k as f64;
            let p = SagnacParams::new(
                std::f64::consts::FRAC_1_SQRT_2,
                SIGMA,
                1.0 - 1e-9,
                [0.2, 0.5, 0.5 * delta_m, std::f64::consts::PI, 0.5 * delta_m],
                0.6 * delta_m,
            );
            let ring = RingParams::new(SIGMA, delta_m, 0.0);
            let expect = ring_rate_ratio(&ring).unwrap();
            let got = sagnac_total_rate(&p).unwrap();
            assert!((got - expect).abs() <= 1e-9 * expect, "delta_m={delta_m}");
        }
        // Same reduction away from auxiliary antiresonance, to limit accuracy.
        for k in 0..16 {
            let delta_m = 0.4 * k as f64;
            let p = SagnacParams::new(
                std::f64::consts::FRAC_1_SQRT_2,
                SIGMA,
                1.0 - 1e-9,
                [0.2, 0.5, 0.5 * delta_m, 1.9, 0.5 * delta_m],
                0.6 * delta_m,
            );
            let ring = RingParams::new(SIGMA, delta_m, 0.0);
            let expect = ring_rate_ratio(&ring).unwrap();
            let got = sagnac_total_rate(&p).unwrap();
            assert!((got - expect).abs() <= 1e-6 * expect, "delta_m={delta_m}");
        }
    }

    #[test]
    fn sagnac_probabilities_sum_to_one() {
        for k in 0..32 {
            let x = k as f64;
            let p = SagnacParams::new(
                std::f64::consts::FRAC_1_SQRT_2,
                0.9 * (0.07 * x % 1.0),
                0.9 * (0.11 * x % 1.0),
                [0.9 * x % 6.0, 1.3 * x % 6.0, 0.4 * x % 6.0, 2.1 * x % 6.0, 0.8 * x % 6.0],
                0.4 * x % 6.0 + 0.3,
            );
            let (p1, p2) = sagnac_port_probs(&p).unwrap();
            assert!((p1 + p2 - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn sagnac_quadrature_routes_to_single_port() {
        // Resonant main ring, balanced splitter. Choosing the Sagnac phase so
        // that arg C + δ_a + δ̃₀ − δ_s = π/2 (mod 2π) sends the photon
        // entirely to one port.
        let d3 = std::f64::consts::PI;
        let d5 = std::f64::consts::PI;
        let dipole = d3 + 0.25 * d5;
        let delta_tilde0_main = 2.0 * dipole; // δ₁ = 0
        let delta_a = 2.0 * std::f64::consts::PI;
        // C = 1 here, so δ_s = δ_a + δ̃₀ − π/2.
        let delta_s = delta_a + delta_tilde0_main - 0.5 * std::f64::consts::PI;
        let p = SagnacParams::new(
            std::f64::consts::FRAC_1_SQRT_2,
            SIGMA,
            0.7,
            [0.0, delta_s, d3, delta_a, d5],
            dipole,
        );
        let (p1, p2) = sagnac_port_probs(&p).unwrap();
        assert!(p1.abs() < 1e-12 && (p2 - 1.0).abs() < 1e-12, "p1={p1} p2={p2}");
        // Half a turn later the roles swap.
        let p = SagnacParams::new(
            std::f64::consts::FRAC_1_SQRT_2,
            SIGMA,
            0.7,
            [0.0, delta_s + std::f64::consts::PI, d3, delta_a, d5],
            dipole,
        );
        let (p1, p2) = sagnac_port_probs(&p).unwrap();
        assert!((p1 - 1.0).abs() < 1e-12 && p2.abs() < 1e-12);
    }

    #[test]
    fn sagnac_divergence_guard_fires_on_aux_pole() {
        let p = SagnacParams::new(
            std::f64::consts::FRAC_1_SQRT_2,
            SIGMA,
            1.0,
            [0.0, 0.0, 1.0, 0.0, 1.0],
            1.2,
        );
        assert!(p.aux_response().is_err());
        assert!(sagnac_enhancements(&p).is_err());
    }
}
