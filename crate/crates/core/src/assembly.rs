//! Full non-central spectrum, total wavefunction, the tabulated central
//! spectrum and potential grids for plotting.
//!
//! The polar separation constant κ = Λ(ñ, m, A, B, C) enters the radial
//! problem in place of ℓ(ℓ + 1), so
//! E_{n ñ m} = E_radial(n, κ) and ψ = R(r) Θ(θ) e^{−imφ}/√(2π).

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::angular::{angular_wavefunction_full, lambda_separation, AngularSolution};
use crate::error::{domain, Error, Result};
use crate::model::{potential, PotentialParams, QuantumNumbers, ReducedMode};
use crate::radial::{energy_closed_form, radial_wavefunction, RadialSolution};

const EMBEDDED_TABLE1: &str = include_str!("../data/table1.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub quantum: QuantumNumbers,
    pub kappa: f64,
    pub energy: f64,
    pub params: PotentialParams,
}

impl SpectrumEntry {
    pub fn new(quantum: QuantumNumbers, params: &PotentialParams) -> Result<Self> {
        let kappa = kappa(quantum, params)?;
        Ok(Self {
            quantum,
            kappa,
            energy: energy_closed_form(quantum.n, kappa, params)?,
            params: *params,
        })
    }
}

/// κ, the polar separation constant for (ñ, m) and the ring constants.
pub fn kappa(q: QuantumNumbers, params: &PotentialParams) -> Result<f64> {
    lambda_separation(q.n_tilde, q.m, params.ring_a, params.ring_b, params.ring_c)
}

pub fn total_energy(q: QuantumNumbers, params: &PotentialParams) -> Result<f64> {
    energy_closed_form(q.n, kappa(q, params)?, params)
}

/// Central-limit energy with Λ = ℓ(ℓ + 1).
pub fn reduced_energy(n: u32, mode: ReducedMode, params: &PotentialParams) -> Result<f64> {
    energy_closed_form(n, mode.lambda_sep(), params)
}

/// ψ(r, θ, φ) = R(r) Θ(θ) e^{−imφ}/√(2π) with each factor normalized in
/// its own measure (dr, sinθ dθ, dφ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TotalWavefunction {
    pub quantum: QuantumNumbers,
    pub params: PotentialParams,
    pub angular: AngularSolution,
    pub radial: RadialSolution,
}

impl TotalWavefunction {
    pub fn new(q: QuantumNumbers, params: &PotentialParams) -> Result<Self> {
        let angular = AngularSolution::solve(q.n_tilde, q.m, params)?;
        let radial = RadialSolution::solve(q.n, angular.lambda_sep, params)?;
        Ok(Self {
            quantum: q,
            params: *params,
            angular,
            radial,
        })
    }

    /// θ ∈ (0, π), continued evenly across π/2.
    pub fn eval(&self, r: f64, theta: f64, phi: f64) -> Result<Complex64> {
        let value = radial_wavefunction(&self.radial, &self.params, r)? * angular_wavefunction_full(&self.angular, theta)?;
        let azimuthal = Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), -f64::from(self.quantum.m) * phi);
        Ok(azimuthal * value)
    }
}

pub fn total_wavefunction(q: QuantumNumbers, params: &PotentialParams, r: f64, theta: f64, phi: f64) -> Result<Complex64> {
    TotalWavefunction::new(q, params)?.eval(r, theta, phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub set: u32,
    pub v1: f64,
    pub alpha: f64,
    pub n: u32,
    pub ell: u32,
    pub present: f64,
    pub pqr: f64,
}

/// Reference energies for the central potential, ħ = μ = 1.
///
/// The data file starts with `# sha256 <hex>` covering everything after
/// that line, followed by a tab-separated table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Fixture {
    pub rows: Vec<Table1Row>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Table1Fixture {
    pub const ROWS: usize = 64;

    /// The copy compiled into the library.
    pub fn embedded() -> Result<Self> {
        Self::parse(EMBEDDED_TABLE1)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Fixture(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (first, body) = text
            .split_once('\n')
            .ok_or_else(|| Error::Fixture("fixture is empty".into()))?;
        let expected = first
            .strip_prefix("# sha256 ")
            .map(str::trim)
            .ok_or_else(|| Error::Fixture("missing sha256 header line".into()))?;
        let actual = hex(&Sha256::digest(body.as_bytes()));
        if actual != expected {
            return Err(Error::Fixture(format!("checksum mismatch: header {expected}, content {actual}")));
        }
        let mut reader = csv::ReaderBuilder::new().delimiter(b'\t').from_reader(body.as_bytes());
        let mut rows = Vec::with_capacity(Self::ROWS);
        for record in reader.deserialize() {
            rows.push(record.map_err(|e| Error::Fixture(e.to_string()))?);
        }
        if rows.len() != Self::ROWS {
            return Err(Error::Fixture(format!("expected {} rows, found {}", Self::ROWS, rows.len())));
        }
        Ok(Self { rows })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Comparison {
    pub set: u32,
    #[serde(rename = "V1")]
    pub v1: f64,
    pub alpha: f64,
    pub n: u32,
    pub ell: u32,
    #[serde(rename = "E_computed")]
    pub computed: f64,
    #[serde(rename = "E_paper")]
    pub reference: f64,
    #[serde(rename = "E_pqr")]
    pub pqr: f64,
    pub abs_dev: f64,
}

impl Table1Comparison {
    pub fn pqr_dev(&self) -> f64 {
        (self.computed - self.pqr).abs()
    }
}

/// Recomputes every tabulated energy with Λ = ℓ(ℓ + 1), sorted by
/// (set, n, ℓ).
pub fn generate_table1(fixture: &Table1Fixture) -> Result<Vec<Table1Comparison>> {
    let mut out = fixture
        .rows
        .iter()
        .map(|row| {
            let params = PotentialParams::new(row.v1, row.alpha)?;
            let computed = reduced_energy(row.n, ReducedMode::new(row.ell), &params)?;
            Ok(Table1Comparison {
                set: row.set,
                v1: row.v1,
                alpha: row.alpha,
                n: row.n,
                ell: row.ell,
                computed,
                reference: row.present,
                pqr: row.pqr,
                abs_dev: (computed - row.present).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|c| (c.set, c.n, c.ell));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub r: f64,
    pub theta: f64,
    #[serde(rename = "V")]
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialGrid {
    /// Row-major in r, then θ.
    pub points: Vec<GridPoint>,
    /// Samples dropped because the potential is singular there.
    pub skipped: usize,
}

fn linspace(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let step = if count > 1 { (hi - lo) / (count - 1) as f64 } else { 0.0 };
    (0..count).map(move |i| if i + 1 == count && count > 1 { hi } else { lo + step * i as f64 })
}

fn on_singular_line(theta: f64) -> bool {
    [0.0, FRAC_PI_2, PI].iter().any(|s| (theta - s).abs() < 1e-12)
}

/// V(r, θ) sampled on an nr × ntheta grid, both ends included.
pub fn potential_grid(params: &PotentialParams, r_range: (f64, f64), theta_range: (f64, f64), nr: usize, ntheta: usize) -> Result<PotentialGrid> {
    let (r_lo, r_hi) = r_range;
    let (t_lo, t_hi) = theta_range;
    if !(r_lo > 0.0 && r_hi >= r_lo) {
        return domain(format!("r range [{r_lo}, {r_hi}] must be positive and ordered"));
    }
    if !(t_hi >= t_lo) || !t_lo.is_finite() || !t_hi.is_finite() {
        return domain(format!("theta range [{t_lo}, {t_hi}] must be ordered"));
    }
    if nr == 0 || ntheta == 0 {
        return Err(Error::Dimension("grid sizes must be positive".into()));
    }
    let mut points = Vec::with_capacity(nr * ntheta);
    let mut skipped = 0;
    for r in linspace(r_lo, r_hi, nr) {
        for theta in linspace(t_lo, t_hi, ntheta) {
            if on_singular_line(theta) {
                skipped += 1;
                continue;
            }
            match potential(params, r, theta) {
                Ok(v) if v.is_finite() => points.push(GridPoint { r, theta, v }),
                _ => skipped += 1,
            }
        }
    }
    Ok(PotentialGrid { points, skipped })
}
