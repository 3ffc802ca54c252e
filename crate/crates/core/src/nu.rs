//! Generic Nikiforov–Uvarov solver for hypergeometric-type equations
//!
//! ```text
//! ψ'' + τ̃(z)/σ(z) ψ' + σ̃(z)/σ²(z) ψ = 0,   deg τ̃ ≤ 1, deg σ, σ̃ ≤ 2.
//! ```
//!
//! With ψ = φ(z) y(z) and φ'/φ = π/σ, the polynomial
//!
//! ```text
//! π(z) = (σ' − τ̃)/2 ± √( ((σ' − τ̃)/2)² − σ̃ + kσ )
//! ```
//!
//! must be linear, which fixes k by making the radicand a perfect square.
//! The eigenvalue follows from λ = k + π' and the quantization
//! λ = λ_n = −nτ' − n(n−1)σ''/2 with τ = τ̃ + 2π.
//!
//! Everything here is numeric: a candidate π is accepted when the
//! discriminant of the radicand vanishes to [`PERFECT_SQUARE_TOL`].

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Relative size of the radicand's discriminant still accepted as zero.
pub const PERFECT_SQUARE_TOL: f64 = 1e-9;

/// c0 + c1 z + c2 z².
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Poly {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Poly {
    pub const fn new(c0: f64, c1: f64, c2: f64) -> Self {
        Self { c0, c1, c2 }
    }

    pub const fn linear(c0: f64, c1: f64) -> Self {
        Self { c0, c1, c2: 0.0 }
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.c0 + z * (self.c1 + z * self.c2)
    }

    pub fn derivative(&self) -> Poly {
        Poly::linear(self.c1, 2.0 * self.c2)
    }

    /// Constant second derivative.
    pub fn second_derivative(&self) -> f64 {
        2.0 * self.c2
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c2 != 0.0 {
            Some(2)
        } else if self.c1 != 0.0 {
            Some(1)
        } else if self.c0 != 0.0 {
            Some(0)
        } else {
            None
        }
    }

    fn add(self, o: Poly) -> Poly {
        Poly::new(self.c0 + o.c0, self.c1 + o.c1, self.c2 + o.c2)
    }

    fn scale(self, s: f64) -> Poly {
        Poly::new(self.c0 * s, self.c1 * s, self.c2 * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuProblem {
    pub tau_tilde: Poly,
    pub sigma: Poly,
    pub sigma_tilde: Poly,
}

impl NuProblem {
    pub fn new(tau_tilde: Poly, sigma: Poly, sigma_tilde: Poly) -> Result<Self> {
        if tau_tilde.c2 != 0.0 {
            return domain("tau_tilde must be at most linear");
        }
        if sigma.degree().is_none() {
            return domain("sigma must not vanish identically");
        }
        let all = [
            tau_tilde.c0,
            tau_tilde.c1,
            sigma.c0,
            sigma.c1,
            sigma.c2,
            sigma_tilde.c0,
            sigma_tilde.c1,
            sigma_tilde.c2,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return domain("NU coefficients must be finite");
        }
        Ok(Self {
            tau_tilde,
            sigma,
            sigma_tilde,
        })
    }

    /// Radial equation in z = e^{−αr}:
    /// τ̃ = 1 − z, σ = z(1 − z), σ̃ = −(ε − β + χ)z² + (2ε + χ)z − (ε + Λ).
    pub fn radial(epsilon: f64, lambda_sep: f64, beta: f64, chi: f64) -> Result<Self> {
        Self::new(
            Poly::linear(1.0, -1.0),
            Poly::new(0.0, 1.0, -1.0),
            Poly::new(-(epsilon + lambda_sep), 2.0 * epsilon + chi, -(epsilon - beta + chi)),
        )
    }

    /// Polar equation in z = cos²θ for the ring term
    /// (C + B cos²θ + A cos⁴θ)/(sin²θ cos²θ):
    /// τ̃ = 1 − 3z, σ = 2z(1 − z), σ̃ = −(Λ + A)z² + (Λ − B − m²)z − C.
    pub fn angular(lambda_sep: f64, ring_a: f64, ring_b: f64, ring_c: f64, m: i32) -> Result<Self> {
        let m2 = f64::from(m) * f64::from(m);
        Self::new(
            Poly::linear(1.0, -3.0),
            Poly::new(0.0, 2.0, -2.0),
            Poly::new(-ring_c, lambda_sep - ring_b - m2, -(lambda_sep + ring_a)),
        )
    }

    /// (σ' − τ̃)/2.
    fn half_gap(&self) -> Poly {
        self.sigma.derivative().add(self.tau_tilde.scale(-1.0)).scale(0.5)
    }

    /// Radicand ((σ' − τ̃)/2)² − σ̃ + kσ as a quadratic in z.
    pub fn radicand(&self, k: f64) -> Poly {
        let g = self.half_gap();
        let g2 = Poly::new(g.c0 * g.c0, 2.0 * g.c0 * g.c1, g.c1 * g.c1);
        g2.add(self.sigma_tilde.scale(-1.0)).add(self.sigma.scale(k))
    }

    /// Discriminant of the radicand relative to its natural scale.
    pub fn relative_discriminant(&self, k: f64) -> f64 {
        let q = self.radicand(k);
        let disc = q.c1 * q.c1 - 4.0 * q.c2 * q.c0;
        let scale = (q.c1 * q.c1).max((4.0 * q.c2 * q.c0).abs()).max(1.0);
        disc / scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KRoot {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BranchTag {
    pub k_root: KRoot,
    pub sign: RootSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuSolution {
    pub k_plus: f64,
    pub k_minus: f64,
    /// The k of the selected branch.
    pub k: f64,
    pub pi_coeffs: Poly,
    pub tau_coeffs: Poly,
    /// λ = k + π'.
    pub lambda_of_k: f64,
    pub branch_tag: BranchTag,
}

impl NuSolution {
    pub fn tau_slope(&self) -> f64 {
        self.tau_coeffs.c1
    }
}

/// Both roots of the perfect-square condition on the radicand, k₊ ≥ k₋.
pub fn solve_k(problem: &NuProblem) -> Result<(f64, f64)> {
    // Radicand coefficients are affine in k: q_i = u_i + k s_i.
    let u = problem.radicand(0.0);
    let s = problem.sigma;
    let a2 = s.c1 * s.c1 - 4.0 * s.c2 * s.c0;
    let a1 = 2.0 * u.c1 * s.c1 - 4.0 * (u.c2 * s.c0 + s.c2 * u.c0);
    let a0 = u.c1 * u.c1 - 4.0 * u.c2 * u.c0;
    let scale = a1.abs().max(a0.abs().sqrt()).max(1.0);
    if a2.abs() <= 1e-14 * scale {
        if a1.abs() <= 1e-14 * scale {
            // Radicand is a perfect square for every k; only k = 0 is canonical.
            return if a0.abs() <= PERFECT_SQUARE_TOL * (u.c1 * u.c1).max(1.0) {
                Ok((0.0, 0.0))
            } else {
                Err(Error::ComplexRoots)
            };
        }
        let k = -a0 / a1;
        return Ok((k, k));
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    let tol = 1e-12 * (a1 * a1).max((4.0 * a2 * a0).abs());
    if disc < -tol {
        return Err(Error::ComplexRoots);
    }
    let root = disc.max(0.0).sqrt();
    // Stable quadratic formula.
    let q = -0.5 * (a1 + a1.signum() * root);
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a2, a0 / q) };
    Ok((r1.max(r2), r1.min(r2)))
}

/// Writes the radicand at k as (a z + b)² with a ≥ 0, if it is a real square.
fn square_root_linear(q: Poly) -> Option<(f64, f64)> {
    let scale = q.c0.abs().max(q.c2.abs()).max(q.c1.abs()).max(1e-300);
    let neg_tol = -1e-12 * scale;
    if q.c2 < neg_tol || q.c0 < neg_tol {
        return None;
    }
    let a0 = q.c2.max(0.0).sqrt();
    let b0 = q.c0.max(0.0).sqrt();
    if a0 >= b0 {
        if a0 == 0.0 {
            return Some((0.0, 0.0));
        }
        Some((a0, q.c1 / (2.0 * a0)))
    } else {
        let b = b0 * q.c1.signum();
        let b = if q.c1 == 0.0 { b0 } else { b };
        Some((q.c1 / (2.0 * b), b))
    }
}

/// Picks π(z) among the four (k, ±) combinations.
///
/// Keeps candidates with τ' < 0 and returns the one with the most negative
/// τ', which is the branch whose φ and weight carry the larger exponent
/// at both ends of the interval.
pub fn select_branch(problem: &NuProblem, k_plus: f64, k_minus: f64) -> Result<NuSolution> {
    let gap = problem.half_gap();
    let mut best: Option<NuSolution> = None;
    for (k, k_root) in [(k_minus, KRoot::Minus), (k_plus, KRoot::Plus)] {
        if problem.relative_discriminant(k).abs() > PERFECT_SQUARE_TOL {
            continue;
        }
        let Some((a, b)) = square_root_linear(problem.radicand(k)) else {
            continue;
        };
        for (sign, s) in [(RootSign::Minus, -1.0), (RootSign::Plus, 1.0)] {
            let pi = gap.add(Poly::linear(s * b, s * a));
            let tau = problem.tau_tilde.add(pi.scale(2.0));
            if !(tau.c1 < 0.0) {
                continue;
            }
            let candidate = NuSolution {
                k_plus,
                k_minus,
                k,
                pi_coeffs: pi,
                tau_coeffs: tau,
                lambda_of_k: k + pi.c1,
                branch_tag: BranchTag { k_root, sign },
            };
            if best.is_none_or(|b| candidate.tau_slope() < b.tau_slope()) {
                best = Some(candidate);
            }
        }
    }
    best.ok_or(Error::NoValidBranch)
}

/// solve_k followed by select_branch.
pub fn solve(problem: &NuProblem) -> Result<NuSolution> {
    let (kp, km) = solve_k(problem)?;
    select_branch(problem, kp, km)
}

/// λ_n = −nτ' − n(n−1)σ''/2.
pub fn lambda_n(problem: &NuProblem, solution: &NuSolution, n: u32) -> f64 {
    let nf = f64::from(n);
    -nf * solution.tau_slope() - 0.5 * nf * (nf - 1.0) * problem.sigma.second_derivative()
}

/// λ − λ_n for one member of a problem family.
pub fn quantization_residual(problem: &NuProblem, n: u32) -> Result<f64> {
    let sol = solve(problem)?;
    Ok(sol.lambda_of_k - lambda_n(problem, &sol, n))
}

/// The intermediate constants the construction produces for one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuConstants {
    pub k_minus: f64,
    pub tau_slope: f64,
    pub lambda_n: f64,
}

impl NuConstants {
    pub fn from_engine(problem: &NuProblem, n: u32) -> Result<Self> {
        let sol = solve(problem)?;
        Ok(Self {
            k_minus: sol.k_minus,
            tau_slope: sol.tau_slope(),
            lambda_n: lambda_n(problem, &sol, n),
        })
    }
}

const SCAN_POINTS: usize = 400;
const ROOT_REL_TOL: f64 = 1e-13;

/// Root of λ(x) − λ_n(x) = 0 for a one-parameter family x ↦ NuProblem.
///
/// The bracket is first swept at geometrically growing offsets from `lo`;
/// the first sign change found (ignoring members where the NU
/// construction fails) is refined by bisection.
pub fn quantize<F>(family: F, n: u32, bracket: (f64, f64)) -> Result<f64>
where
    F: Fn(f64) -> Result<NuProblem>,
{
    let (lo, hi) = bracket;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return domain(format!("invalid quantization bracket [{lo}, {hi}]"));
    }
    let residual = |x: f64| family(x).and_then(|p| quantization_residual(&p, n));
    let width = hi - lo;
    let first = 1e-12_f64;
    let ratio = (1.0 / first).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let mut prev: Option<(f64, f64)> = residual(lo).ok().map(|f| (lo, f));
    let mut offset = first;
    let mut bracketed = None;
    for _ in 0..SCAN_POINTS {
        let x = if offset >= 1.0 { hi } else { lo + width * offset };
        if let Ok(fx) = residual(x) {
            if fx == 0.0 {
                return Ok(x);
            }
            if let Some((px, pf)) = prev {
                if pf.signum() != fx.signum() {
                    bracketed = Some((px, pf, x));
                    break;
                }
            }
            prev = Some((x, fx));
        }
        offset *= ratio;
    }
    let Some((mut a, mut fa, mut b)) = bracketed else {
        return Err(Error::NoSignChange { lo, hi });
    };
    for _ in 0..300 {
        let mid = 0.5 * (a + b);
        if (b - a) <= ROOT_REL_TOL * mid.abs().max(f64::MIN_POSITIVE) || mid == a || mid == b {
            break;
        }
        match residual(mid) {
            Ok(fm) => {
                if fm == 0.0 {
                    return Ok(mid);
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            // The construction can fail only at the edge of the admissible
            // region, which lies on the `a` side of a validated bracket.
            Err(_) => a = mid,
        }
    }
    Ok(0.5 * (a + b))
}
