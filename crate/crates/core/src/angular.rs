//! Polar equation
//!
//! ```text
//! (1/sinθ) d/dθ(sinθ Θ') + [Λ − m²/sin²θ − (C + B cos²θ + A cos⁴θ)/(sin²θ cos²θ)] Θ = 0
//! ```
//!
//! In z = cos²θ this is of hypergeometric type with σ = 2z(1 − z), and the
//! regular solution on the fundamental domain θ ∈ (0, π/2) is
//!
//! ```text
//! Θ = χ z^ν (1 − z)^ξ P_ñ^{(√(¼+C), √S)}(1 − 2z),   S = C + A + m² + B,
//! ν = ¼ + ½√(¼ + C),   ξ = ½√S.
//! ```
//!
//! On (π/2, π) the function is continued by Θ(π − θ) = Θ(θ), since the
//! equation sees θ only through cos²θ. The constant χ makes
//! ∫₀^π Θ² sinθ dθ = 1, and the sign is fixed by Θ(π/4) > 0.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::model::PotentialParams;
use crate::nu::{quantize, NuConstants, NuProblem};
use crate::specfun::{jacobi_p, Quadrature};

const NORM_ORDER: usize = 20;
const NORM_PANELS: usize = 64;
const NORM_GRADING: u32 = 4;
const NORM_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularSolution {
    pub lambda_sep: f64,
    pub nu: f64,
    pub xi: f64,
    pub n_tilde: u32,
    pub m: i32,
    pub norm: f64,
}

fn radicands(m: i32, a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    let m2 = f64::from(m) * f64::from(m);
    let s = c + a + m2 + b;
    let t = 1.0 + 4.0 * c;
    if !(s >= 0.0) {
        return domain(format!("C + A + m² + B = {s} is negative"));
    }
    if !(t >= 0.0) {
        return domain(format!("1 + 4C = {t} is negative"));
    }
    Ok((s.sqrt(), t.sqrt()))
}

/// Λ = (2ñ + 1 + √S)(2ñ + 1 + √S + √(1+4C)) + C − A.
///
/// For A = B = C = 0 this is ℓ(ℓ + 1) with ℓ = 2ñ + 1 + |m|.
pub fn lambda_separation(n_tilde: u32, m: i32, a: f64, b: f64, c: f64) -> Result<f64> {
    let (s, t) = radicands(m, a, b, c)?;
    let p = 2.0 * f64::from(n_tilde) + 1.0 + s;
    Ok(p * (p + t) + c - a)
}

/// Λ read off the quantization condition k₋ + π' = λ_ñ before factoring:
/// 2(2ñ² + 2ñ + ñ√(1+4C) + 2ñ√S) + √S√(1+4C) + 1 + √(1+4C) + 2√S + B + m² + 2C.
pub fn lambda_separation_expanded(n_tilde: u32, m: i32, a: f64, b: f64, c: f64) -> Result<f64> {
    let (s, t) = radicands(m, a, b, c)?;
    let n = f64::from(n_tilde);
    let m2 = f64::from(m) * f64::from(m);
    let lambda_n = 2.0 * n * n + 2.0 * n + n * t + 2.0 * n * s;
    Ok(2.0 * lambda_n + s * t + 1.0 + t + 2.0 * s + b + m2 + 2.0 * c)
}

/// k₋, τ' and λ_ñ of the polar construction at a given Λ:
/// k₋ = (Λ − B − m² − 2C)/2 − ½√(1+4C)√S, τ' = −4 − √(1+4C) − 2√S,
/// λ_ñ = 2ñ² + 2ñ + ñ√(1+4C) + 2ñ√S.
pub fn nu_constants(n_tilde: u32, m: i32, a: f64, b: f64, c: f64, lambda_sep: f64) -> Result<NuConstants> {
    let (s, t) = radicands(m, a, b, c)?;
    let n = f64::from(n_tilde);
    let m2 = f64::from(m) * f64::from(m);
    Ok(NuConstants {
        k_minus: 0.5 * (lambda_sep - b - m2 - 2.0 * c) - 0.5 * t * s,
        tau_slope: -4.0 - t - 2.0 * s,
        lambda_n: 2.0 * n * n + 2.0 * n + n * t + 2.0 * n * s,
    })
}

/// Λ found by the engine from λ = λ_ñ.
pub fn lambda_by_quantization(n_tilde: u32, m: i32, a: f64, b: f64, c: f64) -> Result<f64> {
    let (s, t) = radicands(m, a, b, c)?;
    let scale = a.abs() + b.abs() + c.abs();
    let p = 2.0 * f64::from(n_tilde) + 2.0 + s + t;
    quantize(|x| NuProblem::angular(x, a, b, c, m), n_tilde, (-10.0 - scale, 4.0 * p * p + scale + 100.0))
}

impl AngularSolution {
    /// Closed-form solution, normalized.
    pub fn solve(n_tilde: u32, m: i32, params: &PotentialParams) -> Result<Self> {
        let (a, b, c) = (params.ring_a, params.ring_b, params.ring_c);
        let (s, t) = radicands(m, a, b, c)?;
        let mut sol = Self {
            lambda_sep: lambda_separation(n_tilde, m, a, b, c)?,
            // √(¼ + C) = √(1 + 4C)/2.
            nu: 0.25 + 0.25 * t,
            xi: 0.5 * s,
            n_tilde,
            m,
            norm: 1.0,
        };
        sol.norm = angular_normalize(&sol)?;
        Ok(sol)
    }

    /// First Jacobi parameter √(¼ + C) = 2ν − ½.
    pub fn jacobi_a(&self) -> f64 {
        2.0 * self.nu - 0.5
    }

    /// Second Jacobi parameter √S = 2ξ.
    pub fn jacobi_b(&self) -> f64 {
        2.0 * self.xi
    }

    /// z^ν (1−z)^ξ P_ñ(1 − 2z) without the constant.
    fn shape(&self, z: f64, one_minus_z: f64) -> f64 {
        let p = jacobi_p(self.n_tilde, self.jacobi_a(), self.jacobi_b(), one_minus_z - z);
        z.powf(self.nu) * one_minus_z.powf(self.xi) * p
    }

    /// Analytic value of the norm integral without the constant,
    /// ∫₀¹ z^a (1−z)^b P_ñ²(1 − 2z) dz = h_ñ(a, b)/2^{a+b+1}.
    pub fn analytic_norm(&self) -> Result<f64> {
        let (a, b) = (self.jacobi_a(), self.jacobi_b());
        let ln_h = crate::specfun::ln_jacobi_norm(self.n_tilde, a, b)?;
        Ok((-0.5 * (ln_h - (a + b + 1.0) * 2f64.ln())).exp())
    }
}

/// ∫₀^π Θ² sinθ dθ for the solution as it stands, via z = cos²θ.
///
/// Both halves of (0, π) contribute equally, and 2 sinθ dθ = dz/√z on
/// each half, so the integrand becomes z^{2ν−½}(1−z)^{2ξ}P² on (0, 1).
pub fn norm_integral(sol: &AngularSolution, panels: usize) -> Result<f64> {
    let q = Quadrature::gauss_legendre(NORM_ORDER)?;
    let chi2 = sol.norm * sol.norm;
    q.integrate_graded(
        |z| {
            let v = sol.shape(z, 1.0 - z);
            chi2 * v * v / z.sqrt()
        },
        0.0,
        1.0,
        panels,
        NORM_GRADING,
    )
}

/// Unit L²(sinθ dθ) norm constant with Θ(π/4) > 0.
pub fn angular_normalize(sol: &AngularSolution) -> Result<f64> {
    if !(sol.jacobi_a() > -1.0 && sol.jacobi_b() > -1.0) {
        return Err(Error::NonIntegrable(format!(
            "exponents ({}, {}) are not square-integrable",
            sol.nu, sol.xi
        )));
    }
    let raw = AngularSolution { norm: 1.0, ..*sol };
    let integral = norm_integral(&raw, NORM_PANELS)?;
    if !(integral > 0.0 && integral.is_finite()) {
        return Err(Error::NonIntegrable(format!("norm integral {integral}")));
    }
    let sign = phase_sign(&raw);
    let norm = sign / integral.sqrt();
    let check = norm_integral(&AngularSolution { norm, ..raw }, NORM_PANELS)?;
    if (check - 1.0).abs() > NORM_CHECK_TOL {
        return Err(Error::NonIntegrable(format!("normalized integral {check}")));
    }
    Ok(norm)
}

/// Sign of the unnormalized Θ at π/4, or of P_ñ(−1) = (−1)^ñ·(b+1)_ñ/ñ!
/// when π/4 is a node.
fn phase_sign(raw: &AngularSolution) -> f64 {
    let (a, b, n) = (raw.jacobi_a(), raw.jacobi_b(), raw.n_tilde);
    let at_end = jacobi_p(n, a, b, -1.0);
    let mid = jacobi_p(n, a, b, 0.0);
    if mid.abs() > 1e-12 * at_end.abs() {
        mid.signum()
    } else {
        at_end.signum()
    }
}

/// Θ(θ) on the fundamental domain (0, π/2).
pub fn angular_wavefunction(sol: &AngularSolution, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return domain(format!("theta = {theta} is outside (0, π/2)"));
    }
    let (s, c) = theta.sin_cos();
    Ok(sol.norm * sol.shape(c * c, s * s))
}

/// Θ(θ) on (0, π) by the even continuation Θ(π − θ) = Θ(θ); the value at
/// π/2 is the limit 0.
pub fn angular_wavefunction_full(sol: &AngularSolution, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return domain(format!("theta = {theta} is outside (0, π)"));
    }
    let (s, c) = theta.sin_cos();
    if c == 0.0 {
        return Ok(0.0);
    }
    Ok(sol.norm * sol.shape(c * c, s * s))
}
