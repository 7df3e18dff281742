//! Command-line front end. Every subcommand writes plot-ready CSV/JSON into
//! `--out` plus a `manifest.json` describing the run.
//!
//! Exit codes: 0 success, 2 invalid flags or parameters, 3 numeric or I/O
//! failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dispersion::dispersion_samples;
use crate::error::Error;
use crate::exact::exact_band_edges;
use crate::isw::{
    density_from_modes, isw_density, isw_fourier_mode, isw_moment_closed, quantization_residual,
    IswMoments, DEFAULT_TRUNC,
};
use crate::lattice::LatticeParams;
use crate::moments::{Regularization, Rho0Source};
use crate::psd::DEFAULT_TOL;
use crate::scan::{
    convergence_study, refine_min_energy, scan_points, spectrum_from_points, MinEnergy, ScanConfig,
};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "COMB_BOOTSTRAP_THREADS";
/// Cutoffs above this need `--long`.
pub const LONG_CUTOFF: usize = 200;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "comb-bootstrap",
    version,
    about = "Moment bootstrap of the Dirac comb"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// PSD scan over energies: allowed bands, gaps and E_min.
    Scan(ScanArgs),
    /// Gap widths and E_min over a list of cutoffs and powers.
    Table1(Table1Args),
    /// Bloch dispersion of one band from the moment series.
    Dispersion(DispersionArgs),
    /// Infinite square well moments, densities and quantization residuals.
    Isw(IswArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegArg {
    FiniteK,
    Zeta,
}

impl From<RegArg> for Regularization {
    fn from(r: RegArg) -> Self {
        match r {
            RegArg::FiniteK => Regularization::FiniteK,
            RegArg::Zeta => Regularization::Zeta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rho0Arg {
    Analytic,
    FiniteK,
}

impl From<Rho0Arg> for Rho0Source {
    fn from(r: Rho0Arg) -> Self {
        match r {
            Rho0Arg::Analytic => Rho0Source::Analytic,
            Rho0Arg::FiniteK => Rho0Source::FiniteK,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LatticeArgs {
    /// Lattice period a.
    #[arg(long = "a", default_value_t = 2.0)]
    pub a: f64,
    /// Barrier strength A.
    #[arg(long = "A", default_value_t = 2.0)]
    pub strength: f64,
}

impl LatticeArgs {
    fn params(&self) -> Result<LatticeParams, Error> {
        LatticeParams::new(self.a, self.strength)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    pub e_lo: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub e_hi: f64,
    #[arg(long, default_value_t = 0.005)]
    pub e_step: f64,
    /// PSD tolerance on the rescaled matrix.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = RegArg::FiniteK)]
    pub reg: RegArg,
    #[arg(long = "rho0", value_enum, default_value_t = Rho0Arg::Analytic)]
    pub rho0: Rho0Arg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Mode cutoff; matrices have order K+1.
    #[arg(long = "K", default_value_t = 20)]
    pub cutoff: usize,
    /// Momentum power sigma+tau (0..=4).
    #[arg(long, default_value_t = 0)]
    pub power: u32,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Permit cutoffs above 200.
    #[arg(long)]
    pub long: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Table1Args {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Comma-separated cutoffs.
    #[arg(long = "K", value_delimiter = ',', default_values_t = vec![2usize, 5, 10, 20, 50, 100])]
    pub cutoffs: Vec<usize>,
    /// Comma-separated momentum powers.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0u32])]
    pub powers: Vec<u32>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub long: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DispersionArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// 1-based band index.
    #[arg(long, default_value_t = 1)]
    pub band: usize,
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    /// Series truncation; picked per energy from the tail bound if absent.
    #[arg(long = "N")]
    pub truncation: Option<usize>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IswArgs {
    /// Well width.
    #[arg(long = "a", default_value_t = 2.0)]
    pub width: f64,
    /// Levels m = 1..=levels for moments and densities.
    #[arg(long, default_value_t = 3)]
    pub levels: u32,
    /// Highest moment power.
    #[arg(long, default_value_t = 20)]
    pub max_power: usize,
    /// Density grid points on [0, a].
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Terms in each Fourier-mode sum.
    #[arg(long, default_value_t = DEFAULT_TRUNC)]
    pub trunc: usize,
    /// Residual sweep range and step.
    #[arg(long, default_value_t = 0.5)]
    pub e_lo: f64,
    #[arg(long, default_value_t = 25.0)]
    pub e_hi: f64,
    #[arg(long, default_value_t = 0.05)]
    pub e_step: f64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Record of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
    pub version: String,
    pub timing_seconds: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::InvalidPower(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numeric(format!("i/o: {e}"))
    }
}

/// `printf("%.10g")`.
pub fn fmt_g(x: f64) -> String {
    fmt_g_prec(x, 10)
}

pub fn fmt_g_prec(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let p = precision.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -4 || exp >= p as i32 {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_g(x: Option<f64>) -> String {
    x.map(fmt_g).unwrap_or_default()
}

fn min_energy_cell(e: &MinEnergy) -> String {
    match e {
        MinEnergy::Bounded(v) => fmt_g(*v),
        MinEnergy::UnboundedBelow => "unbounded-below".into(),
        MinEnergy::Empty => "none".into(),
    }
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.files.push(path.display().to_string());
        Ok(())
    }

    fn finish(
        mut self,
        command: &str,
        config: impl Serialize,
        start: Instant,
    ) -> Result<(), Failure> {
        let manifest_path = self.dir.join("manifest.json");
        self.files.push(manifest_path.display().to_string());
        let manifest = RunManifest {
            command: command.into(),
            config: serde_json::to_value(config).map_err(|e| Failure::Numeric(e.to_string()))?,
            outputs: self.files,
            version: env!("CARGO_PKG_VERSION").into(),
            timing_seconds: start.elapsed().as_secs_f64(),
        };
        let text =
            serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Numeric(e.to_string()))?;
        fs::write(manifest_path, text + "\n")?;
        Ok(())
    }
}

fn scan_config(
    params: LatticeParams,
    cutoff: usize,
    power: u32,
    grid: &GridArgs,
) -> Result<ScanConfig, Failure> {
    let cfg = ScanConfig {
        params,
        cutoff,
        power,
        e_lo: grid.e_lo,
        e_hi: grid.e_hi,
        e_step: grid.e_step,
        tol: grid.tol,
        reg: grid.reg.into(),
        rho0_source: grid.rho0.into(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn check_long(cutoff: usize, long: bool) -> Result<(), Failure> {
    if cutoff > LONG_CUTOFF && !long {
        return Err(Failure::Usage(format!(
            "K = {cutoff} > {LONG_CUTOFF} requires --long"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectrumFile<'a> {
    config: &'a ScanConfig,
    spectrum: &'a crate::scan::BandSpectrum,
    /// Bisection-refined lower edge; absent for unbounded or empty spectra.
    e_min_refined: Option<f64>,
}

fn cmd_scan(args: &ScanArgs) -> Result<(), Failure> {
    let start = Instant::now();
    check_long(args.cutoff, args.long)?;
    let cfg = scan_config(args.lattice.params()?, args.cutoff, args.power, &args.grid)?;
    let points = scan_points(&cfg)?;
    let spectrum = spectrum_from_points(&points);
    let refined = match spectrum.e_min {
        MinEnergy::Bounded(_) => refine_min_energy(&cfg, &points)?.value(),
        _ => None,
    };

    let mut csv = String::from("E,allowed,min_eig\n");
    for p in points.iter().flatten() {
        let _ = writeln!(
            csv,
            "{},{},{}",
            fmt_g(p.energy),
            u8::from(p.allowed),
            fmt_g(p.min_eig)
        );
    }
    let json = serde_json::to_string_pretty(&SpectrumFile {
        config: &cfg,
        spectrum: &spectrum,
        e_min_refined: refined,
    })
    .map_err(|e| Failure::Numeric(e.to_string()))?;

    let mut out = Outputs::new(&args.out)?;
    out.write("spectrum.json", &(json + "\n"))?;
    out.write("allowed.csv", &csv)?;
    out.finish("scan", args, start)
}

fn source_name(s: Rho0Source) -> &'static str {
    match s {
        Rho0Source::Analytic => "analytic",
        Rho0Source::FiniteK => "finite-k",
    }
}

fn cmd_table1(args: &Table1Args) -> Result<(), Failure> {
    let start = Instant::now();
    if args.cutoffs.is_empty() || args.powers.is_empty() {
        return Err(Failure::Usage("K and power lists must be non-empty".into()));
    }
    if let Some(&k) = args.cutoffs.iter().max() {
        check_long(k, args.long)?;
    }
    let template = scan_config(
        args.lattice.params()?,
        args.cutoffs[0],
        args.powers[0],
        &args.grid,
    )?;
    for &k in &args.cutoffs {
        scan_config(template.params, k, 0, &args.grid)?;
    }
    for &p in &args.powers {
        scan_config(template.params, 1, p, &args.grid)?;
    }
    let rows = convergence_study(&template, &args.cutoffs, &args.powers)?;
    let mut csv = String::from("source,power,K,gap1,gap2,gap3,e_min\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            source_name(r.rho0_source),
            r.power,
            r.cutoff,
            opt_g(r.gaps[0]),
            opt_g(r.gaps[1]),
            opt_g(r.gaps[2]),
            min_energy_cell(&r.e_min)
        );
    }
    let mut out = Outputs::new(&args.out)?;
    out.write("table1.csv", &csv)?;
    out.finish("table1", args, start)
}

fn cmd_dispersion(args: &DispersionArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let params = args.lattice.params()?;
    if args.band == 0 {
        return Err(Failure::Usage("band index is 1-based".into()));
    }
    let top = params.pole_energy(args.band as i64);
    let bands = exact_band_edges(&params, top * (1.0 + 1e-6) + 1e-3)?;
    let band = bands
        .iter()
        .find(|b| b.index == args.band)
        .ok_or_else(|| Failure::Numeric(format!("band {} not found", args.band)))?;
    let samples = dispersion_samples(band, &params, args.samples, args.truncation)?;
    let mut csv = String::from("E,k_series,cos_ka_series,cos_ka_exact,residual\n");
    for s in &samples {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            fmt_g(s.energy),
            fmt_g(s.k),
            fmt_g(s.cos_ka_series),
            fmt_g(s.cos_ka_exact),
            fmt_g(s.residual())
        );
    }
    let mut out = Outputs::new(&args.out)?;
    out.write("dispersion.csv", &csv)?;
    out.finish("dispersion", args, start)
}

fn cmd_isw(args: &IswArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let a = args.width;
    if !(a > 0.0 && a.is_finite()) {
        return Err(Failure::Usage(format!("well width must be > 0, got {a}")));
    }
    if args.levels == 0 || args.points < 2 {
        return Err(Failure::Usage("need levels >= 1 and points >= 2".into()));
    }
    if !(args.e_lo > 0.0 && args.e_lo < args.e_hi && args.e_step > 0.0) {
        return Err(Failure::Usage("need 0 < e_lo < e_hi and e_step > 0".into()));
    }
    let level_energy = |m: u32| (m as f64 * std::f64::consts::PI / a).powi(2);

    let mut moments = String::from("level,E");
    for n in 0..=args.max_power {
        let _ = write!(moments, ",X{n}");
    }
    moments.push_str(",max_rel_diff_closed\n");
    let mut density = String::from("level,x,density_modes,density_exact\n");
    for m in 1..=args.levels {
        let e = level_energy(m);
        let table = IswMoments::new(e, a, args.max_power)?;
        let mut worst: f64 = 0.0;
        let _ = write!(moments, "{m},{}", fmt_g(e));
        for (n, v) in table.values.iter().enumerate() {
            let closed = isw_moment_closed(n, e, a)?;
            worst = worst.max((closed - v).abs() / v.abs().max(f64::MIN_POSITIVE));
            let _ = write!(moments, ",{}", fmt_g(*v));
        }
        let _ = writeln!(moments, ",{}", fmt_g(worst));

        let modes = (0..=(m as i64 + 2))
            .map(|n| isw_fourier_mode(n, e, a, args.trunc))
            .collect::<Result<Vec<_>, _>>()?;
        for i in 0..args.points {
            let x = a * i as f64 / (args.points - 1) as f64;
            let _ = writeln!(
                density,
                "{m},{},{},{}",
                fmt_g(x),
                fmt_g(density_from_modes(x, &modes, a)),
                fmt_g(isw_density(x, m, a)?)
            );
        }
    }

    let n = ((args.e_hi - args.e_lo) / args.e_step + 1e-9).floor() as usize;
    let mut energies: Vec<(f64, bool)> = (0..=n)
        .map(|i| (args.e_lo + i as f64 * args.e_step, false))
        .collect();
    let mut m = 1;
    while level_energy(m) <= args.e_hi {
        if level_energy(m) >= args.e_lo {
            energies.push((level_energy(m), true));
        }
        m += 1;
    }
    energies.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut residuals = String::from("E,eigen,residual\n");
    for (e, eigen) in energies {
        let r = quantization_residual(e, a, args.trunc)?;
        let _ = writeln!(residuals, "{},{},{}", fmt_g(e), u8::from(eigen), fmt_g(r));
    }

    let mut out = Outputs::new(&args.out)?;
    out.write("isw_moments.csv", &moments)?;
    out.write("isw_density.csv", &density)?;
    out.write("quantization_residuals.csv", &residuals)?;
    out.finish("isw", args, start)
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Scan(a) => cmd_scan(a),
        Command::Table1(a) => cmd_table1(a),
        Command::Dispersion(a) => cmd_dispersion(a),
        Command::Isw(a) => cmd_isw(a),
    }
}

fn thread_count() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = thread_count().and_then(|threads| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| Failure::Numeric(e.to_string()))?;
        pool.install(|| dispatch(&cli))
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            EXIT_NUMERIC
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1.0 / 3.0, "0.3333333333"),
            (123456.789, "123456.789"),
            (1e-5, "1e-05"),
            (1.5e-7, "1.5e-07"),
            (12345678901.0, "1.23456789e+10"),
            (1e10, "1e+10"),
            (9999999999.5, "1e+10"),
            (0.0001, "0.0001"),
            (std::f64::consts::PI, "3.141592654"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g(x), want, "{x}");
        }
        assert_eq!(fmt_g(f64::INFINITY), "inf");
    }

    #[test]
    fn parse_defaults() {
        let cli = Cli::try_parse_from(["comb-bootstrap", "scan"]).unwrap();
        let Command::Scan(s) = cli.command else {
            panic!()
        };
        assert_eq!(s.lattice.a, 2.0);
        assert_eq!(s.lattice.strength, 2.0);
        assert_eq!(s.grid.e_lo, -2.0);
        assert_eq!(s.grid.rho0, Rho0Arg::Analytic);
        let cli = Cli::try_parse_from(["comb-bootstrap", "table1"]).unwrap();
        let Command::Table1(t) = cli.command else {
            panic!()
        };
        assert_eq!(t.cutoffs, vec![2, 5, 10, 20, 50, 100]);
    }

    #[test]
    fn negative_energies_parse() {
        let cli =
            Cli::try_parse_from(["comb-bootstrap", "scan", "--e-lo", "-1.5", "--A", "3"]).unwrap();
        let Command::Scan(s) = cli.command else {
            panic!()
        };
        assert_eq!(s.grid.e_lo, -1.5);
        assert_eq!(s.lattice.strength, 3.0);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["comb-bootstrap", "scan", "--K", "x"]), EXIT_USAGE);
        assert_eq!(run(["comb-bootstrap", "scan", "--K", "400"]), EXIT_USAGE);
        assert_eq!(run(["comb-bootstrap", "nope"]), EXIT_USAGE);
    }
}
