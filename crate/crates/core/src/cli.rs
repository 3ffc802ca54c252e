//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or invalid parameters, 3 no bound state,
//! 4 fixture integrity, 5 numerical tolerance breach.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::angular::{lambda_by_quantization, lambda_separation, nu_constants as angular_constants};
use crate::assembly::{generate_table1, potential_grid, Table1Fixture, TotalWavefunction};
use crate::error::Error;
use crate::model::{PotentialParams, QuantumNumbers, ReducedMode};
use crate::nu::{NuConstants, NuProblem};
use crate::oracle::{fd_angular, fd_radial_approx, fd_radial_exact, radial_grid_approx, radial_grid_exact, GridSpec, OracleEstimate};
use crate::radial::{
    energy_closed_form, energy_formula, epsilon_by_quantization, epsilon_closed_form, nu_constants as radial_constants,
    DimensionlessMap,
};

/// Tolerance on the deviation from the reference energies.
pub const TABLE1_TOLERANCE: f64 = 1e-7;
/// Engine-vs-closed-form tolerance for `nu-check`.
pub const NU_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "giqyp", version, about = "Bound states of the ring-shaped generalized inverse quadratic Yukawa potential")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy of one state, from ℓ or from (ñ, m) and the ring constants
    Energy(EnergyArgs),
    /// All admissible states up to the given quantum numbers
    Spectrum(SpectrumArgs),
    /// Samples of ψ(r, θ, φ)
    Wavefunction(WavefunctionArgs),
    /// Recomputes the tabulated central spectrum and compares
    Table1(Table1Args),
    /// V(r, θ) on a rectangular grid
    Grid(GridArgs),
    /// Closed form against the finite-difference eigensolver
    Oracle(OracleArgs),
    /// NU-engine intermediates against their closed forms
    NuCheck(NuCheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PhysicsArgs {
    /// Potential depth V₁ (fm⁻¹)
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub v1: f64,
    /// Screening parameter α (fm⁻¹)
    #[arg(long, default_value_t = 0.001)]
    pub alpha: f64,
    /// Ring constant A (cos⁴θ term)
    #[arg(long = "ringA", default_value_t = 0.0, allow_negative_numbers = true)]
    pub ring_a: f64,
    /// Ring constant B (cos²θ term)
    #[arg(long = "ringB", default_value_t = 0.0, allow_negative_numbers = true)]
    pub ring_b: f64,
    /// Ring constant C (constant term)
    #[arg(long = "ringC", default_value_t = 0.0, allow_negative_numbers = true)]
    pub ring_c: f64,
    /// Reduced Planck constant
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Reduced mass
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
}

impl PhysicsArgs {
    fn params(&self) -> crate::Result<PotentialParams> {
        PotentialParams::new(self.v1, self.alpha)?
            .with_units(self.hbar, self.mu)?
            .with_ring(self.ring_a, self.ring_b, self.ring_c)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Radial quantum number
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    /// Orbital quantum number (central potential, Λ = ℓ(ℓ+1))
    #[arg(long, conflicts_with_all = ["ntilde", "m"])]
    pub ell: Option<u32>,
    /// Polar quantum number ñ (needs --m)
    #[arg(long, requires = "m")]
    pub ntilde: Option<u32>,
    /// Magnetic quantum number (needs --ntilde)
    #[arg(long, requires = "ntilde", allow_negative_numbers = true)]
    pub m: Option<i32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Largest radial quantum number
    #[arg(long, default_value_t = 3)]
    pub n_max: u32,
    /// Central mode: list ℓ = 0..=ELL_MAX instead of (ñ, m)
    #[arg(long, conflicts_with_all = ["ntilde_max", "m_max"])]
    pub ell_max: Option<u32>,
    /// Largest polar quantum number
    #[arg(long, default_value_t = 1)]
    pub ntilde_max: u32,
    /// Largest |m|
    #[arg(long, default_value_t = 2)]
    pub m_max: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RangeArgs {
    #[arg(long, default_value_t = 0.5)]
    pub r_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub r_max: f64,
    /// Number of r samples
    #[arg(long, default_value_t = 50)]
    pub nr: usize,
    #[arg(long, default_value_t = 0.1)]
    pub theta_min: f64,
    #[arg(long, default_value_t = 1.4)]
    pub theta_max: f64,
    /// Number of θ samples
    #[arg(long, default_value_t = 50)]
    pub ntheta: usize,
}

#[derive(Debug, Clone, Args)]
pub struct WavefunctionArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub ntilde: u32,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub m: i32,
    #[command(flatten)]
    pub range: RangeArgs,
    /// Comma-separated azimuths φ
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub phi: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Table1Args {
    /// Checksummed fixture file (defaults to the embedded copy)
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    RadialApprox,
    RadialExact,
    Angular,
}

impl OracleMode {
    fn name(self) -> &'static str {
        match self {
            OracleMode::RadialApprox => "radial-approx",
            OracleMode::RadialExact => "radial-exact",
            OracleMode::Angular => "angular",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub mode: OracleMode,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub v1: f64,
    /// Comma-separated screening parameters
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    pub alpha: Vec<f64>,
    /// Radial state index (radial modes)
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    /// Orbital quantum number for Λ = ℓ(ℓ+1) (radial modes)
    #[arg(long, default_value_t = 1)]
    pub ell: u32,
    /// Explicit separation constant, overrides --ell
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Polar state index (angular mode)
    #[arg(long, default_value_t = 0)]
    pub ntilde: u32,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub m: i32,
    #[arg(long = "ringA", default_value_t = 0.0, allow_negative_numbers = true)]
    pub ring_a: f64,
    #[arg(long = "ringB", default_value_t = 0.0, allow_negative_numbers = true)]
    pub ring_b: f64,
    #[arg(long = "ringC", default_value_t = 0.0, allow_negative_numbers = true)]
    pub ring_c: f64,
    /// Interior points of the coarse grid (automatic when omitted)
    #[arg(long)]
    pub points: Option<usize>,
    /// Outer radius of the radial grid (automatic when omitted)
    #[arg(long)]
    pub grid_max: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct NuCheckArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub ntilde: u32,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub m: i32,
    /// Use Λ = ℓ(ℓ+1) for the radial check instead of the polar Λ
    #[arg(long)]
    pub ell: Option<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Failure with a fixed exit code.
#[derive(Debug)]
struct Exit {
    code: u8,
    message: String,
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

fn exit(code: u8, message: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Exit {
        code,
        message: message.into(),
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<Exit>() {
        return e.code;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::NoBoundState(_)) => 3,
        Some(Error::Fixture(_)) => 4,
        Some(Error::Domain(_) | Error::Dimension(_) | Error::NonIntegrable(_)) => 2,
        Some(_) => 5,
        None => 1,
    }
}

/// Parses `args` (program name first), runs, and reports failures on stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Energy(a) => cmd_energy(&a),
        Command::Spectrum(a) => cmd_spectrum(&a),
        Command::Wavefunction(a) => cmd_wavefunction(&a),
        Command::Table1(a) => cmd_table1(&a),
        Command::Grid(a) => cmd_grid(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::NuCheck(a) => cmd_nu_check(&a),
    }
}

/// x to 10 significant digits, as text.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.9e}")
    }
}

/// x rounded to 10 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.9e}").parse().unwrap_or(x)
}

trait Record: Serialize {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

struct Sink {
    out: Box<dyn Write>,
}

impl Sink {
    fn open(target: &Option<PathBuf>) -> anyhow::Result<Self> {
        let out: Box<dyn Write> = match target {
            Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { out })
    }

    /// CSV (with optional leading `#` comment lines) or a JSON array.
    fn emit<R: Record>(&mut self, format: Format, comments: &[String], records: &[R]) -> anyhow::Result<()> {
        match format {
            Format::Csv => {
                for c in comments {
                    writeln!(self.out, "# {c}")?;
                }
                let mut w = csv::Writer::from_writer(&mut self.out);
                w.write_record(R::HEADER)?;
                for r in records {
                    w.write_record(r.cells())?;
                }
                w.flush()?;
            }
            Format::Json => {
                for c in comments {
                    eprintln!("# {c}");
                }
                serde_json::to_writer_pretty(&mut self.out, records)?;
                writeln!(self.out)?;
            }
        }
        self.out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
struct EnergyRecord {
    v1: f64,
    alpha: f64,
    n: u32,
    ell: Option<u32>,
    ntilde: Option<u32>,
    m: Option<i32>,
    #[serde(rename = "ringA")]
    ring_a: f64,
    #[serde(rename = "ringB")]
    ring_b: f64,
    #[serde(rename = "ringC")]
    ring_c: f64,
    kappa: f64,
    epsilon: f64,
    energy: f64,
    verdict: &'static str,
}

impl Record for EnergyRecord {
    const HEADER: &'static [&'static str] = &[
        "v1", "alpha", "n", "ell", "ntilde", "m", "ringA", "ringB", "ringC", "kappa", "epsilon", "energy", "verdict",
    ];
    fn cells(&self) -> Vec<String> {
        vec![
            format_sig(self.v1),
            format_sig(self.alpha),
            self.n.to_string(),
            opt(self.ell),
            opt(self.ntilde),
            opt(self.m),
            format_sig(self.ring_a),
            format_sig(self.ring_b),
            format_sig(self.ring_c),
            format_sig(self.kappa),
            format_sig(self.epsilon),
            format_sig(self.energy),
            self.verdict.into(),
        ]
    }
}

enum Angular {
    Central(u32),
    Ring(u32, i32),
}

/// Record for one state; `Err` only for invalid parameters. The verdict
/// says whether the state passes the bound-state filter.
fn energy_record(params: &PotentialParams, n: u32, angular: &Angular) -> anyhow::Result<(EnergyRecord, Option<Error>)> {
    let (kappa, ell, ntilde, m) = match *angular {
        Angular::Central(ell) => (ReducedMode::new(ell).lambda_sep(), Some(ell), None, None),
        Angular::Ring(nt, m) => (lambda_separation(nt, m, params.ring_a, params.ring_b, params.ring_c)?, None, Some(nt), Some(m)),
    };
    let raw = energy_formula(n, kappa, params)?;
    let rejection = energy_closed_form(n, kappa, params).err();
    if let Some(e) = &rejection {
        if !matches!(e, Error::NoBoundState(_)) {
            return Err(e.clone().into());
        }
    }
    let map = DimensionlessMap::from_energy(params, raw);
    let record = EnergyRecord {
        v1: round_sig(params.v1),
        alpha: round_sig(params.alpha),
        n,
        ell,
        ntilde,
        m,
        ring_a: round_sig(params.ring_a),
        ring_b: round_sig(params.ring_b),
        ring_c: round_sig(params.ring_c),
        kappa: round_sig(kappa),
        epsilon: round_sig(map.epsilon_n),
        energy: round_sig(raw),
        verdict: if rejection.is_none() { "bound" } else { "rejected" },
    };
    Ok((record, rejection))
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    exit(2, msg)
}

fn cmd_energy(a: &EnergyArgs) -> anyhow::Result<()> {
    let params = a.physics.params()?;
    let angular = match (a.ell, a.ntilde, a.m) {
        (Some(ell), None, None) => {
            if params.has_ring() {
                return Err(usage("--ell is the central limit; use --ntilde and --m with ring constants"));
            }
            Angular::Central(ell)
        }
        (None, Some(nt), Some(m)) => Angular::Ring(nt, m),
        _ => return Err(usage("give exactly one of --ell or the pair --ntilde/--m")),
    };
    let (record, rejection) = energy_record(&params, a.n, &angular)?;
    Sink::open(&a.output.output)?.emit(a.output.format, &[], &[record])?;
    match rejection {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn cmd_spectrum(a: &SpectrumArgs) -> anyhow::Result<()> {
    let params = a.physics.params()?;
    let mut modes = Vec::new();
    match a.ell_max {
        Some(l) => modes.extend((0..=l).map(Angular::Central)),
        None => {
            for nt in 0..=a.ntilde_max {
                for m in 0..=a.m_max as i32 {
                    modes.push(Angular::Ring(nt, m));
                }
            }
        }
    }
    let mut records = Vec::new();
    for mode in &modes {
        for n in 0..=a.n_max {
            // States with negative radicands are skipped like rejected ones.
            if let Ok((record, None)) = energy_record(&params, n, mode) {
                records.push(record);
            }
        }
    }
    Sink::open(&a.output.output)?.emit(a.output.format, &[], &records)?;
    if records.is_empty() {
        return Err(exit(3, "no admissible bound states in the requested range"));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct WaveRecord {
    r: f64,
    theta: f64,
    phi: f64,
    re: f64,
    im: f64,
    abs2: f64,
}

impl Record for WaveRecord {
    const HEADER: &'static [&'static str] = &["r", "theta", "phi", "Re", "Im", "|psi|^2"];
    fn cells(&self) -> Vec<String> {
        [self.r, self.theta, self.phi, self.re, self.im, self.abs2].into_iter().map(format_sig).collect()
    }
}

fn samples(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

fn cmd_wavefunction(a: &WavefunctionArgs) -> anyhow::Result<()> {
    let params = a.physics.params()?;
    let q = QuantumNumbers::new(a.n, a.ntilde, a.m);
    let psi = TotalWavefunction::new(q, &params)?;
    let r = &a.range;
    if r.nr == 0 || r.ntheta == 0 {
        return Err(usage("--nr and --ntheta must be positive"));
    }
    let mut records = Vec::new();
    let mut skipped = 0usize;
    for rv in samples(r.r_min, r.r_max, r.nr) {
        for th in samples(r.theta_min, r.theta_max, r.ntheta) {
            for &phi in &a.phi {
                match psi.eval(rv, th, phi) {
                    Ok(v) => records.push(WaveRecord {
                        r: round_sig(rv),
                        theta: round_sig(th),
                        phi: round_sig(phi),
                        re: round_sig(v.re),
                        im: round_sig(v.im),
                        abs2: round_sig(v.norm_sqr()),
                    }),
                    Err(_) => skipped += 1,
                }
            }
        }
    }
    let comments: Vec<String> = if skipped > 0 {
        vec![format!("skipped {skipped} samples outside r > 0, 0 < theta < pi")]
    } else {
        Vec::new()
    };
    Sink::open(&a.output.output)?.emit(a.output.format, &comments, &records)
}

#[derive(Debug, Clone, Serialize)]
struct TableRecord {
    set: u32,
    #[serde(rename = "V1")]
    v1: f64,
    alpha: f64,
    n: u32,
    ell: u32,
    #[serde(rename = "E_computed")]
    computed: f64,
    #[serde(rename = "E_paper")]
    reference: f64,
    #[serde(rename = "E_pqr")]
    pqr: f64,
    abs_dev: f64,
}

impl Record for TableRecord {
    const HEADER: &'static [&'static str] = &["set", "V1", "alpha", "n", "ell", "E_computed", "E_paper", "E_pqr", "abs_dev"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.set.to_string(),
            format_sig(self.v1),
            format_sig(self.alpha),
            self.n.to_string(),
            self.ell.to_string(),
            format_sig(self.computed),
            format_sig(self.reference),
            format_sig(self.pqr),
            format_sig(self.abs_dev),
        ]
    }
}

fn cmd_table1(a: &Table1Args) -> anyhow::Result<()> {
    let fixture = match &a.fixture {
        Some(p) => Table1Fixture::from_file(p)?,
        None => Table1Fixture::embedded()?,
    };
    let rows = generate_table1(&fixture)?;
    let max_dev = rows.iter().map(|r| r.abs_dev).fold(0.0, f64::max);
    let records: Vec<_> = rows
        .iter()
        .map(|r| TableRecord {
            set: r.set,
            v1: r.v1,
            alpha: r.alpha,
            n: r.n,
            ell: r.ell,
            computed: round_sig(r.computed),
            reference: r.reference,
            pqr: round_sig(r.pqr),
            abs_dev: round_sig(r.abs_dev),
        })
        .collect();
    let summary = format!("rows {} max_abs_dev {}", records.len(), format_sig(max_dev));
    let mut sink = Sink::open(&a.output.output)?;
    sink.emit(a.output.format, &[], &records)?;
    match a.output.format {
        Format::Csv => writeln!(sink.out, "# {summary}")?,
        Format::Json => eprintln!("# {summary}"),
    }
    sink.out.flush()?;
    if !(max_dev < TABLE1_TOLERANCE) {
        return Err(exit(5, format!("max |deviation| {max_dev:e} is not below {TABLE1_TOLERANCE:e}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct GridRecord {
    r: f64,
    theta: f64,
    #[serde(rename = "V")]
    v: f64,
}

impl Record for GridRecord {
    const HEADER: &'static [&'static str] = &["r", "theta", "V"];
    fn cells(&self) -> Vec<String> {
        vec![format_sig(self.r), format_sig(self.theta), format_sig(self.v)]
    }
}

fn cmd_grid(a: &GridArgs) -> anyhow::Result<()> {
    let params = a.physics.params()?;
    let r = &a.range;
    let grid = potential_grid(&params, (r.r_min, r.r_max), (r.theta_min, r.theta_max), r.nr, r.ntheta)?;
    let records: Vec<_> = grid
        .points
        .iter()
        .map(|p| GridRecord {
            r: round_sig(p.r),
            theta: round_sig(p.theta),
            v: round_sig(p.v),
        })
        .collect();
    let comments: Vec<String> = if grid.skipped > 0 {
        vec![format!("skipped {} samples on singular lines theta in {{0, pi/2, pi}}", grid.skipped)]
    } else {
        Vec::new()
    };
    Sink::open(&a.output.output)?.emit(a.output.format, &comments, &records)
}

#[derive(Debug, Clone, Serialize)]
struct OracleRecord {
    mode: &'static str,
    v1: f64,
    alpha: Option<f64>,
    state: u32,
    m: Option<i32>,
    lambda: Option<f64>,
    closed: f64,
    oracle: f64,
    abs_dev: f64,
    rel_dev: f64,
    richardson_error: f64,
    nodes: usize,
}

impl Record for OracleRecord {
    const HEADER: &'static [&'static str] = &[
        "mode", "v1", "alpha", "state", "m", "lambda", "closed", "oracle", "abs_dev", "rel_dev", "richardson_error", "nodes",
    ];
    fn cells(&self) -> Vec<String> {
        vec![
            self.mode.into(),
            format_sig(self.v1),
            self.alpha.map(format_sig).unwrap_or_default(),
            self.state.to_string(),
            opt(self.m),
            self.lambda.map(format_sig).unwrap_or_default(),
            format_sig(self.closed),
            format_sig(self.oracle),
            format_sig(self.abs_dev),
            format_sig(self.rel_dev),
            format_sig(self.richardson_error),
            self.nodes.to_string(),
        ]
    }
}

fn oracle_record(mode: OracleMode, v1: f64, alpha: Option<f64>, state: u32, m: Option<i32>, lambda: Option<f64>, closed: f64, est: &OracleEstimate) -> OracleRecord {
    let abs_dev = (est.value - closed).abs();
    OracleRecord {
        mode: mode.name(),
        v1: round_sig(v1),
        alpha: alpha.map(round_sig),
        state,
        m,
        lambda: lambda.map(round_sig),
        closed: round_sig(closed),
        oracle: round_sig(est.value),
        abs_dev: round_sig(abs_dev),
        rel_dev: round_sig(abs_dev / closed.abs()),
        richardson_error: round_sig(est.error_estimate),
        nodes: est.nodes,
    }
}

fn cmd_oracle(a: &OracleArgs) -> anyhow::Result<()> {
    let mut records = Vec::new();
    let states = a.n as usize + 1;
    let override_grid = |auto: GridSpec| -> crate::Result<GridSpec> {
        GridSpec::new(auto.x_min, a.grid_max.unwrap_or(auto.x_max), a.points.unwrap_or(auto.points))
    };
    match a.mode {
        OracleMode::Angular => {
            let params = PotentialParams::new(0.0, 1.0)?.with_ring(a.ring_a, a.ring_b, a.ring_c)?;
            let count = a.ntilde as usize + 1;
            let auto = GridSpec::new(0.0, std::f64::consts::FRAC_PI_2, crate::oracle::ANGULAR_POINTS)?;
            let grid = GridSpec::new(0.0, auto.x_max, a.points.unwrap_or(auto.points))?;
            let est = fd_angular(&params, a.m, count, Some(grid))?;
            let closed = lambda_separation(a.ntilde, a.m, a.ring_a, a.ring_b, a.ring_c)?;
            records.push(oracle_record(a.mode, a.v1, None, a.ntilde, Some(a.m), None, closed, &est[a.ntilde as usize]));
        }
        OracleMode::RadialApprox | OracleMode::RadialExact => {
            let lambda = a.lambda.unwrap_or_else(|| ReducedMode::new(a.ell).lambda_sep());
            if a.alpha.is_empty() {
                return Err(usage("--alpha needs at least one value"));
            }
            for &alpha in &a.alpha {
                let params = PotentialParams::new(a.v1, alpha)?;
                let closed = energy_formula(a.n, lambda, &params)?;
                let est = if a.mode == OracleMode::RadialApprox {
                    let grid = override_grid(radial_grid_approx(&params, lambda, states)?)?;
                    fd_radial_approx(&params, lambda, states, Some(grid))?
                } else {
                    let grid = override_grid(radial_grid_exact(&params, lambda, states)?)?;
                    fd_radial_exact(&params, lambda, states, Some(grid))?
                };
                records.push(oracle_record(a.mode, a.v1, Some(alpha), a.n, None, Some(lambda), closed, &est[a.n as usize]));
            }
        }
    }
    Sink::open(&a.output.output)?.emit(a.output.format, &[], &records)
}

#[derive(Debug, Clone, Serialize)]
struct NuRecord {
    quantity: &'static str,
    engine: f64,
    closed: f64,
    rel_dev: f64,
}

impl Record for NuRecord {
    const HEADER: &'static [&'static str] = &["quantity", "engine", "closed", "rel_dev"];
    fn cells(&self) -> Vec<String> {
        vec![self.quantity.into(), format_sig(self.engine), format_sig(self.closed), format_sig(self.rel_dev)]
    }
}

fn rel_dev(engine: f64, closed: f64) -> f64 {
    let d = (engine - closed).abs();
    if d == 0.0 {
        0.0
    } else {
        d / closed.abs().max(f64::MIN_POSITIVE)
    }
}

fn push_constants(out: &mut Vec<(&'static str, f64, f64)>, prefix: [&'static str; 3], engine: NuConstants, closed: NuConstants) {
    out.push((prefix[0], engine.k_minus, closed.k_minus));
    out.push((prefix[1], engine.tau_slope, closed.tau_slope));
    out.push((prefix[2], engine.lambda_n, closed.lambda_n));
}

fn cmd_nu_check(a: &NuCheckArgs) -> anyhow::Result<()> {
    let p = a.physics.params()?;
    let (ra, rb, rc) = (p.ring_a, p.ring_b, p.ring_c);
    let mut rows = Vec::new();

    let lam_closed = lambda_separation(a.ntilde, a.m, ra, rb, rc)?;
    let lam_engine = lambda_by_quantization(a.ntilde, a.m, ra, rb, rc)?;
    let engine = NuConstants::from_engine(&NuProblem::angular(lam_engine, ra, rb, rc, a.m)?, a.ntilde)?;
    let closed = angular_constants(a.ntilde, a.m, ra, rb, rc, lam_engine)?;
    push_constants(&mut rows, ["angular.k_minus", "angular.tau_slope", "angular.lambda_n"], engine, closed);
    rows.push(("angular.lambda_sep", lam_engine, lam_closed));

    let lambda = a.ell.map(|l| ReducedMode::new(l).lambda_sep()).unwrap_or(lam_closed);
    let map = DimensionlessMap::from_energy(&p, 0.0);
    let eps_closed = epsilon_closed_form(a.n, lambda, map.beta, map.chi)?;
    let eps_engine = epsilon_by_quantization(a.n, lambda, map.beta, map.chi)
        .map_err(|e| anyhow!("radial quantization failed ({e}); the state does not decay"))
        .map_err(|e| exit(3, e.to_string()))?;
    let engine = NuConstants::from_engine(&NuProblem::radial(eps_engine, lambda, map.beta, map.chi)?, a.n)?;
    let closed = radial_constants(a.n, lambda, map.beta, map.chi, eps_engine)?;
    push_constants(&mut rows, ["radial.k_minus", "radial.tau_slope", "radial.lambda_n"], engine, closed);
    rows.push(("radial.epsilon", eps_engine, eps_closed));

    let records: Vec<_> = rows
        .iter()
        .map(|&(quantity, e, c)| NuRecord {
            quantity,
            engine: round_sig(e),
            closed: round_sig(c),
            rel_dev: rel_dev(e, c),
        })
        .collect();
    Sink::open(&a.output.output)?.emit(a.output.format, &[], &records)?;
    let worst = records.iter().map(|r| r.rel_dev).fold(0.0, f64::max);
    if worst > NU_TOLERANCE {
        return Err(exit(5, format!("largest relative deviation {worst:e} exceeds {NU_TOLERANCE:e}")));
    }
    Ok(())
}
