//! Radial problem under the Greene–Aldrich substitution
//!
//! With z = e^{−αr} and the dimensionless constants
//!
//! ```text
//! ε = −2μ(E + V₁)/(ħ²α²),   β = 2μV₁/ħ²,   χ = 4μV₁/(ħ²α),
//! ```
//!
//! the radial equation is of hypergeometric type with σ = z(1 − z). Its
//! regular solutions are
//!
//! ```text
//! R(r) = Ω z^ϖ (1 − z)^ϑ P_n^{(2ϖ, 2ϑ−1)}(1 − 2z),
//! ϑ = ½ + √(¼ + Λ − β),   ϖ = (χ − β − Λ − D²)/(2D),   D = n + ϑ,
//! ```
//!
//! and ε = ϖ² − Λ. A state is physical only when ϖ > 0 (R decays as
//! r → ∞) and ε ≥ 0 (E lies below the asymptote −V₁). Squaring ϖ away
//! gives the familiar closed form for ε, which also has spurious roots,
//! so both conditions are checked explicitly.
//!
//! Exponents reach O(10³) when α is small, so R is assembled in log space.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::model::{greene_aldrich, PotentialParams};
use crate::nu::{quantize, NuConstants, NuProblem};
use crate::specfun::{hyp2f1_terminating, jacobi_p, ln_jacobi_norm_lowered_a_raised_b, pochhammer};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionlessMap {
    pub epsilon_n: f64,
    pub beta: f64,
    pub chi: f64,
}

impl DimensionlessMap {
    /// β and χ for the given potential with ε taken from `energy`.
    pub fn from_energy(params: &PotentialParams, energy: f64) -> Self {
        let k = params.mu / (params.hbar * params.hbar);
        Self {
            epsilon_n: -2.0 * k * (energy + params.v1) / (params.alpha * params.alpha),
            beta: 2.0 * k * params.v1,
            chi: 4.0 * k * params.v1 / params.alpha,
        }
    }

    /// E = −V₁ − ħ²α²ε/(2μ).
    pub fn energy(&self, params: &PotentialParams) -> f64 {
        -params.v1 - params.kinetic_scale() * params.alpha * params.alpha * self.epsilon_n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialSolution {
    pub n: u32,
    pub lambda_sep: f64,
    pub epsilon_n: f64,
    pub energy: f64,
    pub varpi: f64,
    pub vartheta: f64,
    pub omega_norm: f64,
    /// 2ϖ.
    pub a_exp: f64,
    /// 2ϑ = 1 + 2√(¼ + Λ − β).
    pub u_exp: f64,
}

fn beta_chi(params: &PotentialParams) -> (f64, f64) {
    let m = DimensionlessMap::from_energy(params, 0.0);
    (m.beta, m.chi)
}

fn centrifugal_root(lambda_sep: f64, beta: f64) -> Result<f64> {
    let t = 0.25 + lambda_sep - beta;
    if !(t >= 0.0) {
        return domain(format!("¼ + Λ − β = {t} is negative"));
    }
    Ok(t.sqrt())
}

/// ϖ with its sign, (χ − β − Λ − D²)/(2D).
pub fn signed_varpi(n: u32, lambda_sep: f64, beta: f64, chi: f64) -> Result<f64> {
    let d = f64::from(n) + 0.5 + centrifugal_root(lambda_sep, beta)?;
    Ok((chi - beta - lambda_sep - d * d) / (2.0 * d))
}

/// ε_n = −Λ + ¼[(D² − χ + β + Λ)/D]².
pub fn epsilon_closed_form(n: u32, lambda_sep: f64, beta: f64, chi: f64) -> Result<f64> {
    let d = f64::from(n) + 0.5 + centrifugal_root(lambda_sep, beta)?;
    let bracket = (d * d - chi + beta + lambda_sep) / d;
    Ok(-lambda_sep + 0.25 * bracket * bracket)
}

/// E = ħ²α²Λ/(2μ) − V₁ − (ħ²α²/8μ)[(D² − χ + β + Λ)/D]², without the
/// admissibility filter.
pub fn energy_formula(n: u32, lambda_sep: f64, params: &PotentialParams) -> Result<f64> {
    let (beta, chi) = beta_chi(params);
    let d = f64::from(n) + 0.5 + centrifugal_root(lambda_sep, beta)?;
    let bracket = (d * d - chi + beta + lambda_sep) / d;
    let h2a2 = params.hbar * params.hbar * params.alpha * params.alpha;
    Ok(h2a2 * lambda_sep / (2.0 * params.mu) - params.v1 - h2a2 / (8.0 * params.mu) * bracket * bracket)
}

/// Bound-state energy, or [`Error::NoBoundState`] when the root is spurious.
pub fn energy_closed_form(n: u32, lambda_sep: f64, params: &PotentialParams) -> Result<f64> {
    params.validate()?;
    let (beta, chi) = beta_chi(params);
    let varpi = signed_varpi(n, lambda_sep, beta, chi)?;
    if !(varpi > 0.0) {
        return Err(Error::NoBoundState(format!(
            "n = {n}, Λ = {lambda_sep}: ϖ = {varpi} gives no decaying solution"
        )));
    }
    let epsilon = varpi * varpi - lambda_sep;
    if epsilon < 0.0 {
        return Err(Error::NoBoundState(format!(
            "n = {n}, Λ = {lambda_sep}: ε = {epsilon} puts E above −V₁"
        )));
    }
    energy_formula(n, lambda_sep, params)
}

/// k₋, τ' and λ_n of the radial construction at a given ε:
/// k₋ = −(2Λ − χ) − 2√(ε+Λ)√(¼+Λ−β), τ' = −2 − 2(√(ε+Λ) + √(¼+Λ−β)),
/// λ_n = n² + n + 2n√(ε+Λ) + 2n√(¼+Λ−β).
pub fn nu_constants(n: u32, lambda_sep: f64, beta: f64, chi: f64, epsilon: f64) -> Result<NuConstants> {
    let t = centrifugal_root(lambda_sep, beta)?;
    if !(epsilon + lambda_sep >= 0.0) {
        return domain(format!("ε + Λ = {} is negative", epsilon + lambda_sep));
    }
    let w = (epsilon + lambda_sep).sqrt();
    let nf = f64::from(n);
    Ok(NuConstants {
        k_minus: -(2.0 * lambda_sep - chi) - 2.0 * w * t,
        tau_slope: -2.0 - 2.0 * (w + t),
        lambda_n: nf * nf + nf + 2.0 * nf * w + 2.0 * nf * t,
    })
}

/// ε_n found by the engine from λ = λ_n over ε ∈ (−Λ, (χ+1)²].
pub fn epsilon_by_quantization(n: u32, lambda_sep: f64, beta: f64, chi: f64) -> Result<f64> {
    let hi = (chi.abs() + beta.abs() + lambda_sep.abs() + 1.0).powi(2);
    quantize(|eps| NuProblem::radial(eps, lambda_sep, beta, chi), n, (-lambda_sep, hi))
}

impl RadialSolution {
    /// Admissible bound state with quantum numbers (n, Λ).
    pub fn solve(n: u32, lambda_sep: f64, params: &PotentialParams) -> Result<Self> {
        energy_closed_form(n, lambda_sep, params)?;
        Self::solve_unchecked(n, lambda_sep, params)
    }

    /// Builds the closed form with ϖ = √(ε + Λ) whatever the sign of the
    /// quantization root. Only physical when [`RadialSolution::solve`]
    /// would succeed.
    pub fn solve_unchecked(n: u32, lambda_sep: f64, params: &PotentialParams) -> Result<Self> {
        params.validate()?;
        let (beta, chi) = beta_chi(params);
        let root = centrifugal_root(lambda_sep, beta)?;
        let epsilon_n = epsilon_closed_form(n, lambda_sep, beta, chi)?;
        let varpi = (epsilon_n + lambda_sep).max(0.0).sqrt();
        let vartheta = 0.5 + root;
        let mut sol = Self {
            n,
            lambda_sep,
            epsilon_n,
            energy: energy_formula(n, lambda_sep, params)?,
            varpi,
            vartheta,
            omega_norm: 0.0,
            a_exp: 2.0 * varpi,
            u_exp: 2.0 * vartheta,
        };
        sol.omega_norm = normalization_constant(&sol, params)?;
        Ok(sol)
    }

    pub fn map(&self, params: &PotentialParams) -> DimensionlessMap {
        DimensionlessMap::from_energy(params, self.energy)
    }
}

/// ln Ω with Ω² = α / ∫₀¹ z^{a−1}(1−z)^u [P_n^{(a,u−1)}(1−2z)]² dz.
pub fn ln_normalization_constant(sol: &RadialSolution, params: &PotentialParams) -> Result<f64> {
    let (a, u) = (sol.a_exp, sol.u_exp);
    if !(a > 0.0 && u > 0.0) {
        return domain(format!("normalization needs a, u > 0, got ({a}, {u})"));
    }
    // The Jacobi-variable integral carries an extra 2^{a+u}.
    let ln_i = ln_jacobi_norm_lowered_a_raised_b(sol.n, a, u - 1.0)? - (a + u) * 2f64.ln();
    Ok(0.5 * (params.alpha.ln() - ln_i))
}

/// Ω such that ∫₀^∞ R² dr = 1.
pub fn normalization_constant(sol: &RadialSolution, params: &PotentialParams) -> Result<f64> {
    let ln = ln_normalization_constant(sol, params)?;
    let omega = ln.exp();
    if !omega.is_finite() || omega == 0.0 {
        return Err(Error::NonFinite(ln));
    }
    Ok(omega)
}

/// (ln |R(r)|, sign R(r)).
pub fn radial_wavefunction_log(sol: &RadialSolution, params: &PotentialParams, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return domain(format!("radial wavefunction needs r > 0, got {r}"));
    }
    let ar = params.alpha * r;
    let ln_z = -ar;
    let one_minus_z = -(-ar).exp_m1();
    let z = (-ar).exp();
    let p = jacobi_p(sol.n, sol.a_exp, sol.u_exp - 1.0, one_minus_z - z);
    let ln_shape = sol.varpi * ln_z + sol.vartheta * one_minus_z.ln();
    let ln_omega = ln_normalization_constant(sol, params)?;
    if p == 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    Ok((ln_omega + ln_shape + p.abs().ln(), p.signum()))
}

/// R(r); underflows to 0 far outside the classically allowed region.
pub fn radial_wavefunction(sol: &RadialSolution, params: &PotentialParams, r: f64) -> Result<f64> {
    let (ln_abs, sign) = radial_wavefunction_log(sol, params, r)?;
    Ok(sign * ln_abs.exp())
}

/// R(r) with the polynomial written as
/// (2ϖ+1)_n/n! · ₂F₁(−n, 2ϖ + 2ϑ + n; 2ϖ + 1; z).
pub fn radial_wavefunction_hypergeometric(sol: &RadialSolution, params: &PotentialParams, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("radial wavefunction needs r > 0, got {r}"));
    }
    let ar = params.alpha * r;
    let z = (-ar).exp();
    let one_minus_z = -(-ar).exp_m1();
    let n = sol.n;
    let lead = pochhammer(sol.a_exp + 1.0, n) / pochhammer(1.0, n);
    let f = hyp2f1_terminating(n, sol.a_exp + sol.u_exp + f64::from(n), sol.a_exp + 1.0, z)?;
    let ln_shape = -sol.varpi * ar + sol.vartheta * one_minus_z.ln();
    Ok(sol.omega_norm * ln_shape.exp() * lead * f)
}

/// Admissible states n = 0, 1, … up to `n_max_cap`, stopping at the first
/// inadmissible n or at the first energy that fails to increase.
pub fn enumerate_bound_states(lambda_sep: f64, params: &PotentialParams, n_max_cap: u32) -> Vec<RadialSolution> {
    let mut out: Vec<RadialSolution> = Vec::new();
    for n in 0..=n_max_cap {
        let Ok(sol) = RadialSolution::solve(n, lambda_sep, params) else {
            break;
        };
        if out.last().is_some_and(|prev| !(sol.energy > prev.energy)) {
            break;
        }
        out.push(sol);
    }
    out
}

/// Effective potential of the substituted radial equation in units of
/// ħ²/(2μ): −u'' + U(r) u = (2μE/ħ²) u with
/// U = (2μ/ħ²)(−V₁α²e^{−2αr}/(1−e^{−αr})² − 2V₁αe^{−αr}/(1−e^{−αr}) − V₁)
///     + Λα²/(1−e^{−αr})².
pub fn substituted_effective_potential(params: &PotentialParams, lambda_sep: f64, r: f64) -> Result<f64> {
    let ga = greene_aldrich(params.alpha, r)?;
    let z = (-params.alpha * r).exp();
    let v1 = params.v1;
    let v = -v1 * z * z * ga - 2.0 * v1 * z * ga.sqrt() - v1;
    Ok(v / params.kinetic_scale() + lambda_sep * ga)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::Quadrature;
    use approx::assert_relative_eq;

    fn central(v1: f64, alpha: f64) -> PotentialParams {
        PotentialParams::new(v1, alpha).unwrap()
    }

    #[test]
    fn epsilon_examples() {
        let eps = epsilon_closed_form(0, 2.0, 1.0, 2000.0).unwrap();
        let p = central(0.5, 0.001);
        let e = DimensionlessMap { epsilon_n: eps, beta: 1.0, chi: 2000.0 }.energy(&p);
        assert_relative_eq!(e, -0.689_910_563_5, epsilon = 1e-10);
        // Inverting the map at the tabulated energy: ε = 2·0.1899105635/α².
        assert!((eps - 379_821.127).abs() < 1e-3, "{eps}");

        // D = ½ + √¼ = 1, so the bracket is 1.
        assert_eq!(epsilon_closed_form(0, 0.0, 0.0, 0.0).unwrap(), 0.25);

        let d = 0.5 + 1.25f64.sqrt();
        let chi = 1.0 + d * d + 2.0;
        assert_relative_eq!(epsilon_closed_form(0, 2.0, 1.0, chi).unwrap(), -2.0, max_relative = 1e-14);
        assert!(epsilon_closed_form(0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn energy_examples() {
        let cases = [
            (0, 1, 0.5, 0.001, -0.689_910_563_5),
            (0, 1, 1.0, 0.001, -2.995_002_125),
            (3, 4, 1.0, 0.01, -1.019_873_450),
        ];
        for (n, ell, v1, alpha, expected) in cases {
            let lam = f64::from(ell * (ell + 1));
            let e = energy_closed_form(n, lam, &central(v1, alpha)).unwrap();
            assert!((e - expected).abs() < 1e-9, "{e} vs {expected}");
        }
    }

    #[test]
    fn map_round_trip() {
        for (v1, alpha) in [(0.5, 0.001), (1.0, 0.001), (0.5, 0.01), (1.0, 0.01)] {
            let p = central(v1, alpha);
            for n in 0..4 {
                for ell in 1..5u32 {
                    let lam = f64::from(ell * (ell + 1));
                    let e = energy_closed_form(n, lam, &p).unwrap();
                    let map = DimensionlessMap::from_energy(&p, e);
                    let eps = epsilon_closed_form(n, lam, map.beta, map.chi).unwrap();
                    assert_relative_eq!(map.epsilon_n, eps, max_relative = 1e-12);
                    assert_relative_eq!(map.energy(&p), e, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn engine_reproduces_closed_forms() {
        let (lam, beta, chi) = (2.0, 1.0, 2000.0);
        let eps = epsilon_by_quantization(0, lam, beta, chi).unwrap();
        assert_relative_eq!(eps, epsilon_closed_form(0, lam, beta, chi).unwrap(), max_relative = 1e-10);
        for n in 0..4 {
            let eps = epsilon_by_quantization(n, 6.0, 2.0, 400.0).unwrap();
            assert_relative_eq!(eps, epsilon_closed_form(n, 6.0, 2.0, 400.0).unwrap(), max_relative = 1e-10);
            let p = NuProblem::radial(eps, 6.0, 2.0, 400.0).unwrap();
            let engine = NuConstants::from_engine(&p, n).unwrap();
            let closed = nu_constants(n, 6.0, 2.0, 400.0, eps).unwrap();
            assert_relative_eq!(engine.k_minus, closed.k_minus, max_relative = 1e-10);
            assert_relative_eq!(engine.tau_slope, closed.tau_slope, max_relative = 1e-12);
            assert_relative_eq!(engine.lambda_n, closed.lambda_n, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn no_attraction_no_states() {
        let p = central(0.0, 0.05);
        assert!(matches!(energy_closed_form(0, 2.0, &p), Err(Error::NoBoundState(_))));
        assert!(enumerate_bound_states(2.0, &p, 5).is_empty());
    }

    #[test]
    fn enumerate_matches_table_column() {
        let states = enumerate_bound_states(2.0, &central(0.5, 0.001), 3);
        let expected = [-0.689_910_563_5, -0.572_230_940_7, -0.537_583_483_5, -0.522_877_430_5];
        assert_eq!(states.len(), 4);
        for (s, e) in states.iter().zip(expected) {
            assert!((s.energy - e).abs() < 1e-9, "{} vs {e}", s.energy);
        }
        assert!(states.windows(2).all(|w| w[0].energy < w[1].energy));
        assert!(enumerate_bound_states(2.0, &central(0.5, 0.001), 0).len() <= 1);
    }

    #[test]
    fn spurious_roots_are_filtered() {
        let p = central(0.5, 0.25);
        let (beta, chi) = beta_chi(&p);
        // n = 1: ε ≥ −Λ after squaring, but ϖ < 0 means R grows as r → ∞.
        assert!(signed_varpi(1, 2.0, beta, chi).unwrap() < 0.0);
        assert!(matches!(RadialSolution::solve(1, 2.0, &p), Err(Error::NoBoundState(_))));
        // n = 0 decays but sits above −V₁.
        assert!(signed_varpi(0, 2.0, beta, chi).unwrap() > 0.0);
        assert!(epsilon_closed_form(0, 2.0, beta, chi).unwrap() < 0.0);
        assert!(matches!(RadialSolution::solve(0, 2.0, &p), Err(Error::NoBoundState(_))));
    }

    /// States with ϖ > 0, which solve the substituted equation whether or
    /// not they pass the ε ≥ 0 filter.
    fn decaying_states(p: &PotentialParams, lam: f64, count: u32) -> Vec<RadialSolution> {
        let (beta, chi) = beta_chi(p);
        (0..count)
            .map(|n| {
                assert!(signed_varpi(n, lam, beta, chi).unwrap() > 0.0);
                RadialSolution::solve_unchecked(n, lam, p).unwrap()
            })
            .collect()
    }

    fn norm_overlap(a: &RadialSolution, b: &RadialSolution, p: &PotentialParams) -> f64 {
        let q = Quadrature::gauss_legendre(20).unwrap();
        let scale = 1.0 / (p.alpha * a.varpi.min(b.varpi));
        q.integrate_to_infinity(
            |r| {
                if r <= 0.0 {
                    return 0.0;
                }
                radial_wavefunction(a, p, r).unwrap() * radial_wavefunction(b, p, r).unwrap()
            },
            0.0,
            scale,
            400,
        )
        .unwrap()
    }

    #[test]
    fn normalized_to_one() {
        for (v1, alpha, lam) in [(0.5, 0.25, 2.0), (1.0, 0.25, 2.0), (1.0, 0.05, 6.0), (0.5, 0.1, 2.0)] {
            let p = central(v1, alpha);
            for n in 0..3 {
                let sol = RadialSolution::solve_unchecked(n, lam, &p).unwrap();
                let one = norm_overlap(&sol, &sol, &p);
                assert!((one - 1.0).abs() < 1e-6, "V1={v1} α={alpha} n={n}: {one}");
                assert!(sol.omega_norm > 0.0);
            }
        }
    }

    #[test]
    fn genuine_states_are_orthogonal() {
        let p = central(1.0, 0.25);
        let states = decaying_states(&p, 2.0, 3);
        for i in 0..3 {
            for j in 0..i {
                let v = norm_overlap(&states[i], &states[j], &p);
                assert!(v.abs() < 1e-6, "({i},{j}): {v}");
            }
        }
    }

    #[test]
    fn node_count_and_limits() {
        let p = central(1.0, 0.05);
        for n in 0..3 {
            let sol = RadialSolution::solve(n, 2.0, &p).unwrap();
            let r_max = 40.0 / (p.alpha * sol.varpi);
            let steps = 20_000;
            let mut changes = 0;
            let mut prev = radial_wavefunction(&sol, &p, r_max / steps as f64).unwrap();
            for i in 2..steps {
                let v = radial_wavefunction(&sol, &p, r_max * i as f64 / steps as f64).unwrap();
                if v != 0.0 && prev != 0.0 && v * prev < 0.0 {
                    changes += 1;
                }
                if v != 0.0 {
                    prev = v;
                }
                if n == 0 {
                    assert!(v > 0.0);
                }
            }
            assert_eq!(changes, n);
            assert!(radial_wavefunction(&sol, &p, 1e-8).unwrap().abs() < 1e-6);
            assert!(radial_wavefunction(&sol, &p, 2.0 * r_max).unwrap().abs() < 1e-10);
        }
        assert!(radial_wavefunction(&RadialSolution::solve(0, 2.0, &p).unwrap(), &p, 0.0).is_err());
    }

    #[test]
    fn hypergeometric_form_agrees() {
        let p = central(1.0, 0.1);
        for n in 0..=5 {
            let sol = RadialSolution::solve_unchecked(n, 6.0, &p).unwrap();
            for i in 1..30 {
                let r = 0.25 * f64::from(i);
                let j = radial_wavefunction(&sol, &p, r).unwrap();
                let h = radial_wavefunction_hypergeometric(&sol, &p, r).unwrap();
                assert!((j - h).abs() <= 1e-10 * j.abs().max(1e-300) + 1e-14, "n={n} r={r}: {j} vs {h}");
            }
        }
    }

    #[test]
    fn log_form_survives_small_alpha() {
        let p = central(0.5, 0.001);
        let sol = RadialSolution::solve(0, 2.0, &p).unwrap();
        assert!(sol.a_exp > 1000.0);
        let (ln_abs, sign) = radial_wavefunction_log(&sol, &p, 2.0).unwrap();
        assert!(ln_abs.is_finite());
        assert_eq!(sign, 1.0);
    }

    fn ode_residual(sol: &RadialSolution, p: &PotentialParams, h: f64) -> f64 {
        let f = |r: f64| radial_wavefunction(sol, p, r).unwrap();
        let e = sol.energy / p.kinetic_scale();
        let mut worst: f64 = 0.0;
        let mut r = 0.5;
        while r < 6.0 {
            let d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
            let res = -d2 + (substituted_effective_potential(p, sol.lambda_sep, r).unwrap() - e) * f(r);
            worst = worst.max(res.abs());
            r += 0.05;
        }
        worst
    }

    #[test]
    fn satisfies_substituted_equation() {
        let p = central(1.0, 0.25);
        for sol in decaying_states(&p, 2.0, 3) {
            let n = sol.n;
            let coarse = ode_residual(&sol, &p, 2e-3);
            let fine = ode_residual(&sol, &p, 1e-3);
            assert!(fine < 1e-5, "n={n}: {fine}");
            let ratio = coarse / fine;
            assert!((3.5..4.5).contains(&ratio), "n={n}: ratio {ratio}");
        }
    }
}
