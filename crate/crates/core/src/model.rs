//! Physical parameters, quantum numbers and direct evaluation of the
//! potential
//!
//! ```text
//! V(r, θ) = −V₁ e^{−2αr}/r² − 2V₁ e^{−αr}/r − V₁
//!           + ħ²/(2μr²) · (C + B cos²θ + A cos⁴θ) / (sin²θ cos²θ)
//! ```
//!
//! Everything is in natural units by default (ħ = μ = 1, lengths in fm,
//! energies and α in fm⁻¹). The radial part is the expansion of
//! −V₁(1 + e^{−αr}/r)², read with r in fm so that both terms carry the
//! same unit.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Below this |sin θ| or |cos θ| the ring term is treated as singular.
const ANGULAR_SINGULARITY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub hbar: f64,
    pub mu: f64,
    pub v1: f64,
    pub alpha: f64,
    #[serde(rename = "ringA")]
    pub ring_a: f64,
    #[serde(rename = "ringB")]
    pub ring_b: f64,
    #[serde(rename = "ringC")]
    pub ring_c: f64,
}

impl PotentialParams {
    /// Central potential in natural units.
    pub fn new(v1: f64, alpha: f64) -> Result<Self> {
        let p = Self {
            hbar: 1.0,
            mu: 1.0,
            v1,
            alpha,
            ring_a: 0.0,
            ring_b: 0.0,
            ring_c: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_ring(mut self, a: f64, b: f64, c: f64) -> Result<Self> {
        self.ring_a = a;
        self.ring_b = b;
        self.ring_c = c;
        self.validate()?;
        Ok(self)
    }

    pub fn with_units(mut self, hbar: f64, mu: f64) -> Result<Self> {
        self.hbar = hbar;
        self.mu = mu;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.hbar,
            self.mu,
            self.v1,
            self.alpha,
            self.ring_a,
            self.ring_b,
            self.ring_c,
        ];
        if fields.iter().any(|x| !x.is_finite()) {
            return domain("potential parameters must be finite");
        }
        if self.alpha <= 0.0 {
            return domain(format!("alpha must be positive, got {}", self.alpha));
        }
        if self.hbar <= 0.0 || self.mu <= 0.0 {
            return domain("hbar and mu must be positive");
        }
        Ok(())
    }

    /// ħ²/(2μ).
    pub fn kinetic_scale(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mu)
    }

    /// C + A + m² + B, the radicand that controls the θ → 0 behaviour.
    pub fn ring_radicand(&self, m: i32) -> f64 {
        let m2 = f64::from(m) * f64::from(m);
        self.ring_c + self.ring_a + m2 + self.ring_b
    }

    pub fn has_ring(&self) -> bool {
        self.ring_a != 0.0 || self.ring_b != 0.0 || self.ring_c != 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNumbers {
    /// Radial node count.
    pub n: u32,
    /// Polar node count ñ.
    #[serde(rename = "ntilde")]
    pub n_tilde: u32,
    /// Magnetic quantum number; only m² reaches the spectrum.
    pub m: i32,
}

impl QuantumNumbers {
    pub fn new(n: u32, n_tilde: u32, m: i32) -> Self {
        Self { n, n_tilde, m }
    }
}

/// Central limit: the separation constant is fixed to ℓ(ℓ+1) directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedMode {
    pub ell: u32,
}

impl ReducedMode {
    pub fn new(ell: u32) -> Self {
        Self { ell }
    }

    pub fn lambda_sep(&self) -> f64 {
        let l = f64::from(self.ell);
        l * (l + 1.0)
    }
}

/// Full non-central potential V(r, θ).
pub fn potential(params: &PotentialParams, r: f64, theta: f64) -> Result<f64> {
    Ok(radial_potential(params, r)? + ring_term(params, r, theta)?)
}

/// −V₁e^{−2αr}/r² − 2V₁e^{−αr}/r − V₁.
pub fn radial_potential(params: &PotentialParams, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("radial potential needs r > 0, got {r}"));
    }
    let v1 = params.v1;
    let screened = (-params.alpha * r).exp() / r;
    Ok(-v1 * screened * screened - 2.0 * v1 * screened - v1)
}

/// The angle-dependent ħ²/(2μr²)·(C + B cos²θ + A cos⁴θ)/(sin²θ cos²θ) term.
pub fn ring_term(params: &PotentialParams, r: f64, theta: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("ring term needs r > 0, got {r}"));
    }
    let (s, c) = theta.sin_cos();
    if s.abs() < ANGULAR_SINGULARITY || c.abs() < ANGULAR_SINGULARITY {
        return domain(format!("ring term is singular at theta = {theta}"));
    }
    if !params.has_ring() {
        return Ok(0.0);
    }
    let c2 = c * c;
    let s2 = s * s;
    let numer = params.ring_c + params.ring_b * c2 + params.ring_a * c2 * c2;
    Ok(params.kinetic_scale() / (r * r) * numer / (s2 * c2))
}

/// α²/(1 − e^{−αr})², the short-range stand-in for 1/r².
///
/// The ratio to 1/r² is 1 + αr + O((αr)²), so the substitution is only
/// faithful while αr stays small.
pub fn greene_aldrich(alpha: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("Greene-Aldrich factor needs r > 0, got {r}"));
    }
    // 1 − e^{−αr} via expm1 keeps full precision for tiny αr.
    let d = -(-alpha * r).exp_m1();
    Ok(alpha * alpha / (d * d))
}
