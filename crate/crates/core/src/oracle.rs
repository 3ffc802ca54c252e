//! Finite-difference eigensolvers used to check the closed forms.
//!
//! Every problem is brought to −u'' + U(x) u = λ u on (x_min, x_max) with
//! u = 0 at both ends, discretized with the three-point stencil, and
//! solved with Sturm-sequence bisection on the resulting symmetric
//! tridiagonal matrix. Two grids with spacing h and h/2 are combined by
//! Richardson extrapolation, (4λ_{h/2} − λ_h)/3.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{greene_aldrich, radial_potential, PotentialParams};
use crate::radial::{energy_formula, signed_varpi, substituted_effective_potential, DimensionlessMap};

/// Largest relative Richardson error estimate accepted from a grid pair.
pub const GRID_ERROR_LIMIT: f64 = 1e-4;
/// Largest |u| at the outer boundary relative to max |u|.
pub const TAIL_LIMIT: f64 = 1e-10;
pub const MIN_POINTS: usize = 200;
/// Spacing of automatically sized radial grids.
pub const RADIAL_STEP: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagProblem {
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
}

impl TridiagProblem {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::Dimension("empty matrix".into()));
        }
        if off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::Dimension(format!(
                "{} diagonal entries need {} off-diagonal entries, got {}",
                diagonal.len(),
                diagonal.len() - 1,
                off_diagonal.len()
            )));
        }
        Ok(Self {
            diagonal,
            off_diagonal,
        })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Number of eigenvalues strictly below x.
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.off_diagonal.iter().fold(1.0_f64, |m, e| m.max(e * e));
        let mut count = 0;
        let mut q = self.diagonal[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                let e = self.off_diagonal[i - 1];
                q = self.diagonal[i] - x - e * e / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off_diagonal[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off_diagonal[i].abs() } else { 0.0 };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        (lo, hi)
    }

    /// Solves (T − shift) x = b with partial pivoting.
    fn solve_shifted(&self, shift: f64, mut b: Vec<f64>) -> Vec<f64> {
        let n = self.dim();
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut d: Vec<f64> = self.diagonal.iter().map(|x| x - shift).collect();
        if n == 1 {
            return vec![b[0] / if d[0] == 0.0 { tiny } else { d[0] }];
        }
        let mut du = self.off_diagonal.clone();
        let mut dl = self.off_diagonal.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                let d_i = if d[i] == 0.0 { tiny } else { d[i] };
                d[i] = d_i;
                let fact = dl[i] / d_i;
                d[i + 1] -= fact * du[i];
                b[i + 1] -= fact * b[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du2[i];
                }
                du[i] = temp;
                let tb = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tb - fact * b[i + 1];
            }
            dl[i] = 0.0;
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        b[n - 1] /= d[n - 1];
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
        b
    }
}

/// The `k_lowest` smallest eigenvalues in increasing order.
pub fn tridiag_eigen(problem: &TridiagProblem, k_lowest: usize) -> Result<Vec<f64>> {
    if k_lowest == 0 || k_lowest > problem.dim() {
        return Err(Error::Dimension(format!(
            "asked for {k_lowest} eigenvalues of a {}x{} matrix",
            problem.dim(),
            problem.dim()
        )));
    }
    let (g_lo, g_hi) = problem.gershgorin();
    let pad = 1e-12 * (1.0 + g_lo.abs().max(g_hi.abs()));
    let mut out = Vec::with_capacity(k_lowest);
    let mut lo_start = g_lo - pad;
    for j in 0..k_lowest {
        let mut lo = lo_start;
        let mut hi = g_hi + pad;
        loop {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) || mid <= lo || mid >= hi {
                break;
            }
            if problem.sturm_count(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let value = 0.5 * (lo + hi);
        out.push(value);
        lo_start = lo;
    }
    Ok(out)
}

/// Unit eigenvector for an accurate eigenvalue, by inverse iteration.
pub fn eigenvector(problem: &TridiagProblem, eigenvalue: f64) -> Vec<f64> {
    let n = problem.dim();
    let shift = eigenvalue - 1e-10 * (1.0 + eigenvalue.abs());
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 13) as f64).collect();
    for _ in 0..3 {
        v = problem.solve_shifted(shift, v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

/// Interior sign changes, ignoring entries below 1e-8 of the peak.
pub fn node_count(v: &[f64]) -> usize {
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut last = 0.0;
    let mut nodes = 0;
    for &x in v {
        if x.abs() <= 1e-8 * peak {
            continue;
        }
        if last != 0.0 && (x > 0.0) != (last > 0.0) {
            nodes += 1;
        }
        last = x;
    }
    nodes
}

/// Uniform grid with `points` interior nodes and Dirichlet ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        if points < MIN_POINTS {
            return Err(Error::Dimension(format!("grid needs at least {MIN_POINTS} points, got {points}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Dimension(format!("invalid grid interval [{x_min}, {x_max}]")));
        }
        Ok(Self {
            x_min,
            x_max,
            points,
        })
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points + 1) as f64
    }

    /// Same interval at half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            points: 2 * self.points + 1,
            ..*self
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.step();
        (1..=self.points).map(move |i| self.x_min + h * i as f64)
    }

    /// [0, r_max] with r_max = (36 + 12n)/κ for a state decaying as e^{−κr},
    /// at spacing [`RADIAL_STEP`].
    pub fn radial_for_decay(kappa: f64, n: u32) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::Dimension(format!("decay rate {kappa} cannot size a grid")));
        }
        let r_max = (36.0 + 12.0 * f64::from(n)) / kappa;
        let points = ((r_max / RADIAL_STEP).ceil() as usize).max(MIN_POINTS);
        Self::new(0.0, r_max, points)
    }
}

/// −d²/dx² + U on the grid.
pub fn fd_matrix<F: Fn(f64) -> f64>(potential: F, grid: &GridSpec) -> Result<TridiagProblem> {
    let h = grid.step();
    let inv_h2 = 1.0 / (h * h);
    let mut diagonal = Vec::with_capacity(grid.points);
    for x in grid.nodes() {
        let u = potential(x);
        if !u.is_finite() {
            return Err(Error::NonFinite(x));
        }
        diagonal.push(2.0 * inv_h2 + u);
    }
    TridiagProblem::new(diagonal, vec![-inv_h2; grid.points - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleEstimate {
    /// Richardson-extrapolated eigenvalue.
    pub value: f64,
    pub coarse: f64,
    pub fine: f64,
    /// |fine − coarse|/(3|value|), the estimated relative error of `fine`.
    pub error_estimate: f64,
    /// Sign changes of the fine-grid eigenvector.
    pub nodes: usize,
    /// |u| at the last interior node relative to max |u|.
    pub tail: f64,
}

impl OracleEstimate {
    /// Applies x ↦ scale·x + offset to the eigenvalues.
    fn mapped(self, scale: f64, offset: f64) -> Self {
        let f = |x: f64| scale * x + offset;
        let value = f(self.value);
        Self {
            value,
            coarse: f(self.coarse),
            fine: f(self.fine),
            error_estimate: (scale * (self.fine - self.coarse)).abs() / (3.0 * value.abs().max(f64::MIN_POSITIVE)),
            ..self
        }
    }
}

/// Lowest `n_states` eigenvalues of −u'' + U u = λ u, extrapolated.
///
/// Fails with [`Error::GridTooCoarse`] when the Richardson error estimate
/// exceeds [`GRID_ERROR_LIMIT`].
pub fn fd_eigen<F: Fn(f64) -> f64>(potential: F, grid: &GridSpec, n_states: usize) -> Result<Vec<OracleEstimate>> {
    let fine_grid = grid.refined();
    let coarse = tridiag_eigen(&fd_matrix(&potential, grid)?, n_states)?;
    let fine_matrix = fd_matrix(&potential, &fine_grid)?;
    let fine = tridiag_eigen(&fine_matrix, n_states)?;
    let mut out = Vec::with_capacity(n_states);
    for (c, f) in coarse.into_iter().zip(fine) {
        let value = (4.0 * f - c) / 3.0;
        let error_estimate = (f - c).abs() / (3.0 * value.abs().max(f64::MIN_POSITIVE));
        if error_estimate > GRID_ERROR_LIMIT {
            let suggested_points = ((grid.points as f64) * (error_estimate / GRID_ERROR_LIMIT).sqrt() * 1.25).ceil() as usize;
            return Err(Error::GridTooCoarse {
                estimate: error_estimate,
                limit: GRID_ERROR_LIMIT,
                suggested_points,
            });
        }
        let v = eigenvector(&fine_matrix, f);
        let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        out.push(OracleEstimate {
            value,
            coarse: c,
            fine: f,
            error_estimate,
            nodes: node_count(&v),
            tail: v[v.len() - 1].abs() / peak,
        });
    }
    Ok(out)
}

fn check_tails(estimates: &[OracleEstimate]) -> Result<()> {
    match estimates.iter().map(|e| e.tail).fold(0.0_f64, f64::max) {
        t if t > TAIL_LIMIT => Err(Error::GridTooShort { tail: t }),
        _ => Ok(()),
    }
}

/// Radial grid sized for the slowest-decaying of the first `n_states`
/// closed-form states of the substituted equation.
pub fn radial_grid_approx(params: &PotentialParams, lambda_sep: f64, n_states: usize) -> Result<GridSpec> {
    let n = n_states.saturating_sub(1) as u32;
    let beta_chi = DimensionlessMap::from_energy(params, 0.0);
    let varpi = signed_varpi(n, lambda_sep, beta_chi.beta, beta_chi.chi)?;
    if !(varpi > 0.0) {
        return Err(Error::NoBoundState(format!("state n = {n} does not decay (ϖ = {varpi})")));
    }
    GridSpec::radial_for_decay(params.alpha * varpi, n)
}

/// Radial grid for the unsubstituted equation, sized from the closed-form
/// energy relative to the threshold −V₁.
pub fn radial_grid_exact(params: &PotentialParams, lambda_sep: f64, n_states: usize) -> Result<GridSpec> {
    let n = n_states.saturating_sub(1) as u32;
    let e = energy_formula(n, lambda_sep, params)?;
    let depth = (-params.v1 - e) / params.kinetic_scale();
    if !(depth > 0.0) {
        return Err(Error::NoBoundState(format!("estimated energy {e} lies above −V₁")));
    }
    GridSpec::radial_for_decay(depth.sqrt(), n)
}

/// Energies of −u'' + U u = (2μE/ħ²) u with the Greene–Aldrich form of U.
pub fn fd_radial_approx(params: &PotentialParams, lambda_sep: f64, n_states: usize, grid: Option<GridSpec>) -> Result<Vec<OracleEstimate>> {
    let grid = match grid {
        Some(g) => g,
        None => radial_grid_approx(params, lambda_sep, n_states)?,
    };
    let u = |r: f64| substituted_effective_potential(params, lambda_sep, r).unwrap_or(f64::NAN);
    let est = fd_eigen(u, &grid, n_states)?;
    check_tails(&est)?;
    Ok(est.into_iter().map(|e| e.mapped(params.kinetic_scale(), 0.0)).collect())
}

/// Energies with the true Λ/r² and the unsubstituted potential.
pub fn fd_radial_exact(params: &PotentialParams, lambda_sep: f64, n_states: usize, grid: Option<GridSpec>) -> Result<Vec<OracleEstimate>> {
    let grid = match grid {
        Some(g) => g,
        None => radial_grid_exact(params, lambda_sep, n_states)?,
    };
    let scale = params.kinetic_scale();
    let u = |r: f64| radial_potential(params, r).map(|v| v / scale + lambda_sep / (r * r)).unwrap_or(f64::NAN);
    let est = fd_eigen(u, &grid, n_states)?;
    check_tails(&est)?;
    Ok(est.into_iter().map(|e| e.mapped(scale, 0.0)).collect())
}

/// Radial energies for an arbitrary potential V(r) and centrifugal Λ/r².
pub fn fd_radial_potential<V: Fn(f64) -> f64>(
    potential: V,
    hbar: f64,
    mu: f64,
    lambda_sep: f64,
    n_states: usize,
    grid: &GridSpec,
) -> Result<Vec<OracleEstimate>> {
    let scale = hbar * hbar / (2.0 * mu);
    let est = fd_eigen(|r| potential(r) / scale + lambda_sep / (r * r), grid, n_states)?;
    check_tails(&est)?;
    Ok(est.into_iter().map(|e| e.mapped(scale, 0.0)).collect())
}

pub const ANGULAR_POINTS: usize = 2000;

/// Separation constants of the polar equation in Liouville form,
/// −u'' + [(m² − ¼)/sin²θ + (C + B cos²θ + A cos⁴θ)/(sin²θ cos²θ)] u = (Λ + ¼) u
/// with u = Θ√(sinθ) on (0, π/2).
pub fn fd_angular(params: &PotentialParams, m: i32, n_states: usize, grid: Option<GridSpec>) -> Result<Vec<OracleEstimate>> {
    let grid = match grid {
        Some(g) => g,
        None => GridSpec::new(0.0, FRAC_PI_2, ANGULAR_POINTS)?,
    };
    let m2 = f64::from(m) * f64::from(m);
    let (a, b, c) = (params.ring_a, params.ring_b, params.ring_c);
    let u = |t: f64| {
        let (s, co) = t.sin_cos();
        let (s2, c2) = (s * s, co * co);
        (m2 - 0.25) / s2 + (c + b * c2 + a * c2 * c2) / (s2 * c2)
    };
    let est = fd_eigen(u, &grid, n_states)?;
    Ok(est.into_iter().map(|e| e.mapped(1.0, -0.25)).collect())
}

/// 3D oscillator s-wave, V = ½r², ħ = μ = 1; exact E₀ = 1.5.
pub fn oscillator_ground_state() -> Result<OracleEstimate> {
    let grid = GridSpec::new(0.0, 10.0, 2000)?;
    Ok(fd_radial_potential(|r| 0.5 * r * r, 1.0, 1.0, 0.0, 1, &grid)?[0])
}

/// Hydrogen s-wave, V = −1/r, ħ = μ = 1; exact E₀ = −0.5.
pub fn hydrogen_ground_state() -> Result<OracleEstimate> {
    let grid = GridSpec::new(0.0, 40.0, 8000)?;
    Ok(fd_radial_potential(|r| -1.0 / r, 1.0, 1.0, 0.0, 1, &grid)?[0])
}

/// −u'' = λu on (0, 1) with `points` interior nodes (no extrapolation).
pub fn laplacian_lowest(points: usize) -> Result<f64> {
    let grid = GridSpec::new(0.0, 1.0, points)?;
    Ok(tridiag_eigen(&fd_matrix(|_| 0.0, &grid)?, 1)?[0])
}

/// α²/(1 − e^{−αr})² r², how far the substituted centrifugal term is
/// from Λ/r² at a given radius.
pub fn centrifugal_ratio(alpha: f64, r: f64) -> Result<f64> {
    Ok(greene_aldrich(alpha, r)? * r * r)
}
