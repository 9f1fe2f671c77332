//! `fbsfc`: coefficient tables, density grids, SFC curves, geometry listings
//! and the validation suite, written as CSV / JSON.
//!
//! Exit codes: 0 success, 1 validation failure, 2 input parse error,
//! 3 constraint violation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fbsfc::fb5::{Fb5Params, MixtureModel};
use fbsfc::io;
use fbsfc::sfc::{ell_truncation_base, rda_positions, sfc_curve, uca_positions, GeometryFamily};
use fbsfc::validation::{self, CheckReport, CHECK_NAMES};
use fbsfc::Error;

#[derive(Parser)]
#[command(name = "fbsfc", version, about = "Fisher-Bingham spherical-harmonic coefficients and spatial fading correlation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the coefficient table `ell,m,re,im` of a model.
    Coeffs {
        #[command(flatten)]
        model: ModelArgs,
        /// Band-limit.
        #[arg(long = "L", default_value_t = 40)]
        l: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the density on an equiangular grid as `theta,phi,value`.
    Pdf {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of θ rows, poles included.
        #[arg(long, default_value_t = 181)]
        ntheta: usize,
        /// Number of φ columns over [0, 2π).
        #[arg(long, default_value_t = 360)]
        nphi: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write |ρ| against R/λ as `r_over_lambda,re_rho,im_rho,abs_rho`.
    Sfc {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Element pair `p,q` (1-based).
        #[arg(long, value_parser = parse_pair)]
        pair: (usize, usize),
        #[arg(long, default_value_t = 0.0)]
        rmin: f64,
        #[arg(long, default_value_t = 2.0)]
        rmax: f64,
        /// Number of R/λ points.
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Wavelength in metres.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Coefficient band-limit; chosen from the largest separation when omitted.
        #[arg(long = "L")]
        l: Option<usize>,
        /// Tail tolerance of the plane-wave sum.
        #[arg(long, default_value_t = 1e-14)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List element positions as `index,x,y,z`.
    Geometry {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Array radius in metres.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance checks and write a JSON report.
    Validate {
        /// One of coeff-oracle, spatial-error, truncation, sfc-oracle, structural, rotation, symmetry.
        #[arg(long)]
        check: Option<String>,
        /// With `--check spatial-error`: concentration of the tested density.
        #[arg(long)]
        kappa: Option<f64>,
        /// With `--check spatial-error`: ovalness of the tested density.
        #[arg(long)]
        beta: Option<f64>,
        /// Overrides the tolerance of every reported check.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Mixture JSON document.
    #[arg(long, conflicts_with_all = ["kappa", "beta"])]
    model: Option<PathBuf>,
    /// Standard-frame density: concentration.
    #[arg(long)]
    kappa: Option<f64>,
    /// Standard-frame density: ovalness.
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args)]
struct GeometryArgs {
    /// `uca`, `rda`, or a file of unit-radius positions (one `x y z` per line).
    #[arg(long, default_value = "uca")]
    geometry: String,
    /// UCA element count.
    #[arg(long, default_value_t = 16)]
    elements: usize,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected p,q")?;
    let p = a.trim().parse().map_err(|e| format!("{e}"))?;
    let q = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((p, q))
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Io(_) => 2,
            Error::Domain(_) | Error::Constraint(_) | Error::BandLimit(_) | Error::Index(_) => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Outcome<T> = Result<T, Failure>;

fn load_model(args: &ModelArgs) -> Outcome<MixtureModel> {
    match (&args.model, args.kappa, args.beta) {
        (Some(path), _, _) => Ok(io::read_mixture(path)?),
        (None, Some(k), b) => Ok(MixtureModel::single(Fb5Params::standard(k, b.unwrap_or(0.0))?)),
        (None, None, Some(_)) => Err(usage("--beta needs --kappa")),
        (None, None, None) => Err(usage("give --model <json> or --kappa/--beta")),
    }
}

fn family(args: &GeometryArgs) -> Outcome<GeometryFamily> {
    match args.geometry.as_str() {
        "uca" => Ok(GeometryFamily::Uca { elements: args.elements }),
        "rda" => Ok(GeometryFamily::Rda),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
            Ok(GeometryFamily::Custom(io::parse_positions(&text, path)?))
        }
    }
}

fn output(path: &Option<PathBuf>) -> Outcome<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| usage(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn cmd_coeffs(model: &ModelArgs, l: usize, out: &Option<PathBuf>) -> Outcome<()> {
    let c = load_model(model)?.coefficients(l)?;
    io::write_coeffs(&c, output(out)?)?;
    Ok(())
}

fn cmd_pdf(model: &ModelArgs, ntheta: usize, nphi: usize, out: &Option<PathBuf>) -> Outcome<()> {
    if ntheta < 2 || nphi < 2 {
        return Err(Failure { code: 3, message: "grid sizes must be at least 2".into() });
    }
    let density = load_model(model)?.density()?;
    let thetas: Vec<f64> = (0..ntheta).map(|i| PI * i as f64 / (ntheta - 1) as f64).collect();
    let phis: Vec<f64> = (0..nphi).map(|j| 2.0 * PI * j as f64 / nphi as f64).collect();
    let mut values = Vec::with_capacity(ntheta * nphi);
    for &t in &thetas {
        for &p in &phis {
            values.push(density.pdf(fbsfc::sht::Direction::new(t, p)));
        }
    }
    io::write_grid(&thetas, &phis, &values, output(out)?)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sfc(
    model: &ModelArgs,
    geometry: &GeometryArgs,
    pair: (usize, usize),
    (rmin, rmax, steps): (f64, f64, usize),
    lambda: f64,
    l: Option<usize>,
    tol: f64,
    out: &Option<PathBuf>,
) -> Outcome<()> {
    if steps == 0 || !(rmin >= 0.0) || !(rmax >= rmin) {
        return Err(Failure { code: 3, message: "need steps >= 1 and 0 <= rmin <= rmax".into() });
    }
    let model = load_model(model)?;
    let family = family(geometry)?;
    let unit = family.at_radius(1.0)?;
    let d1 = {
        let (a, b) = (unit.element(pair.0)?, unit.element(pair.1)?);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    };
    let l = l.unwrap_or_else(|| ell_truncation_base(2.0 * PI * rmax * d1) + 20);
    let coeffs = model.coefficients(l)?;
    let grid: Vec<f64> = if steps == 1 {
        vec![rmin]
    } else {
        (0..steps).map(|i| rmin + (rmax - rmin) * i as f64 / (steps - 1) as f64).collect()
    };
    let curve = sfc_curve(&coeffs, &family, pair, lambda, &grid, tol)?;
    io::write_curve(&curve, output(out)?)?;
    Ok(())
}

fn cmd_geometry(geometry: &GeometryArgs, radius: f64, out: &Option<PathBuf>) -> Outcome<()> {
    let g = match geometry.geometry.as_str() {
        "uca" => uca_positions(geometry.elements, radius)?,
        "rda" => rda_positions(radius)?,
        _ => family(geometry)?.at_radius(radius)?,
    };
    io::write_geometry(&g, output(out)?)?;
    Ok(())
}

fn cmd_validate(
    check: &Option<String>,
    kappa: Option<f64>,
    beta: Option<f64>,
    tol: Option<f64>,
    out: &Option<PathBuf>,
) -> Outcome<bool> {
    let mut reports: Vec<CheckReport> = match (check.as_deref(), kappa) {
        (Some("spatial-error"), Some(k)) => {
            let b = beta.unwrap_or(0.0);
            fbsfc::fb5::Fb5Params::standard(k, b)?;
            vec![validation::check_spatial_plateau(k, b, 150, tol.unwrap_or(1e-18))?]
        }
        (Some(name), _) => {
            if !CHECK_NAMES.contains(&name) {
                return Err(usage(format!("unknown check '{name}', expected one of {}", CHECK_NAMES.join(", "))));
            }
            validation::run_check(name)?
        }
        (None, _) => validation::run_all()?,
    };
    if let Some(t) = tol {
        for r in &mut reports {
            r.tolerance = t;
            r.pass = r.max_abs_error <= t;
        }
    }
    for r in &reports {
        eprintln!("{}", r.line());
    }
    let mut w = output(out)?;
    writeln!(w, "{}", io::reports_to_json(&reports))?;
    w.flush()?;
    Ok(reports.iter().all(|r| r.pass))
}

fn run(cli: Cli) -> Outcome<bool> {
    match &cli.command {
        Command::Coeffs { model, l, out } => cmd_coeffs(model, *l, out).map(|_| true),
        Command::Pdf { model, ntheta, nphi, out } => cmd_pdf(model, *ntheta, *nphi, out).map(|_| true),
        Command::Sfc { model, geometry, pair, rmin, rmax, steps, lambda, l, tol, out } => {
            cmd_sfc(model, geometry, *pair, (*rmin, *rmax, *steps), *lambda, *l, *tol, out).map(|_| true)
        }
        Command::Geometry { geometry, radius, out } => cmd_geometry(geometry, *radius, out).map(|_| true),
        Command::Validate { check, kappa, beta, tol, out } => cmd_validate(check, *kappa, *beta, *tol, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
