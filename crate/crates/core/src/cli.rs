use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use spherical_means::checks::Suite;
use spherical_means::epd::{epd_invert, epd_trace, EpdSpec};
use spherical_means::field::{Bump, PhantomKind, PhantomSpec, Point, ScalarField};
use spherical_means::grid::{sample_to_grid, SphereGrid, TimeGrid, VolumeGrid};
use spherical_means::io;
use spherical_means::recon::{fpr_invert, identity_check, interior_metrics, ReconConfig, Variant};
use spherical_means::sphmean::forward_scan;
use spherical_means::Error;

pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_GEOMETRY: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "smt", version, about = "Spherical mean transform toolkit")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a bump phantom on a volume grid and write its analytic spec.
    Phantom(PhantomArgs),
    /// Spherical means of a phantom on detector sphere x time grid.
    Forward(ForwardArgs),
    /// Reconstruct a volume from spherical mean data.
    Invert(InvertArgs),
    /// Euler-Poisson-Darboux traces and their inversion.
    Epd {
        #[command(subcommand)]
        command: EpdCommand,
    },
    /// Run a property suite and report one line per check.
    Check {
        /// ek, gek, rl, bessel, identity, radial or epd
        suite: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum EpdCommand {
    /// Trace u(theta, t) of the solution with initial value from a phantom.
    Trace(EpdTraceArgs),
    /// Recover the initial value from a trace.
    Invert(EpdInvertArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    RadialBump,
    ShiftedBump,
    SumOfBumps,
}

impl From<KindArg> for PhantomKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::RadialBump => PhantomKind::RadialBump,
            KindArg::ShiftedBump => PhantomKind::ShiftedBump,
            KindArg::SumOfBumps => PhantomKind::SumOfBumps,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    LaplacianLast,
    LaplacianFirst,
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    #[arg(long, value_enum, default_value = "radial-bump")]
    pub kind: KindArg,
    /// Bump center `x,y,z`; repeat for sum-of-bumps.
    #[arg(long, default_values = ["0,0,0"], allow_hyphen_values = true)]
    pub center: Vec<String>,
    /// Bump radius; one value, or one per center.
    #[arg(long, default_values_t = [0.8])]
    pub radius: Vec<f64>,
    /// Exponent `p` of `(1 - |x-c|^2/R^2)^p`; one value, or one per center.
    #[arg(long, default_values_t = [3])]
    pub exponent: Vec<u32>,
    /// Amplitude; one value, or one per center.
    #[arg(long, default_values_t = [1.0], allow_hyphen_values = true)]
    pub amplitude: Vec<f64>,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 1.0)]
    pub extent: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Spec sidecar path (default: `--out` with extension `spec`).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[command(flatten)]
    pub export: ExportArgs,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Write the central axial slice as a 16-bit PGM.
    #[arg(long)]
    pub slice: Option<PathBuf>,
    /// Write the values along the x axis through the center as CSV.
    #[arg(long)]
    pub line: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Phantom spec file.
    #[arg(long)]
    pub phantom: PathBuf,
    #[arg(long, default_value_t = 48)]
    pub npolar: usize,
    #[arg(long, default_value_t = 96)]
    pub nazimuth: usize,
    #[arg(long, default_value_t = 400)]
    pub nt: usize,
    #[arg(long, default_value_t = 2.0)]
    pub tmax: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the profile of one detector as CSV.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Detector index for `--profile`.
    #[arg(long, default_value_t = 0)]
    pub detector: usize,
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Args)]
pub struct ReconArgs {
    /// Cylinder data file.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 1.0)]
    pub extent: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Phantom spec to compare against; prints a metrics table.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[command(flatten)]
    pub export: ExportArgs,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[command(flatten)]
    pub recon: ReconArgs,
    #[arg(long, value_enum, default_value = "laplacian-last")]
    pub variant: VariantArg,
}

#[derive(Debug, Args)]
pub struct EpdParams {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lambda: f64,
}

#[derive(Debug, Args)]
pub struct EpdTraceArgs {
    #[command(flatten)]
    pub scan: ScanArgs,
    #[command(flatten)]
    pub params: EpdParams,
}

#[derive(Debug, Args)]
pub struct EpdInvertArgs {
    #[command(flatten)]
    pub recon: ReconArgs,
    #[command(flatten)]
    pub params: EpdParams,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Geometry(_) | Error::OutOfRange { .. } | Error::GammaPole(_) => EXIT_GEOMETRY,
            Error::Io(_) | Error::Format { .. } => EXIT_IO,
            Error::InvalidArgument(_) => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = std::result::Result<i32, Failure>;

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Phantom(_) => "phantom",
            Command::Forward(_) => "forward",
            Command::Invert(_) => "invert",
            Command::Epd {
                command: EpdCommand::Trace(_),
            } => "epd trace",
            Command::Epd {
                command: EpdCommand::Invert(_),
            } => "epd invert",
            Command::Check { .. } => "check",
        }
    }

    pub fn run(&self) -> Outcome {
        match self {
            Command::Phantom(a) => cmd_phantom(a),
            Command::Forward(a) => cmd_forward(a),
            Command::Invert(a) => cmd_invert(a),
            Command::Epd {
                command: EpdCommand::Trace(a),
            } => cmd_epd_trace(a),
            Command::Epd {
                command: EpdCommand::Invert(a),
            } => cmd_epd_invert(a),
            Command::Check { suite } => cmd_check(suite),
        }
    }
}

fn parse_point(s: &str) -> std::result::Result<Point, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(usage(format!("center {s:?} is not of the form x,y,z")));
    }
    let mut p = [0.0; 3];
    for (slot, part) in p.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| usage(format!("center {s:?} is not of the form x,y,z")))?;
    }
    Ok(p)
}

/// `values[k]`, or the single value for every `k`.
fn per_bump<T: Copy>(values: &[T], k: usize, n: usize, flag: &str) -> std::result::Result<T, Failure> {
    match values.len() {
        1 => Ok(values[0]),
        m if m == n => Ok(values[k]),
        m => Err(usage(format!("--{flag} given {m} times for {n} centers"))),
    }
}

fn phantom_spec(a: &PhantomArgs) -> std::result::Result<PhantomSpec, Failure> {
    let n = a.center.len();
    let bumps = (0..n)
        .map(|k| {
            Ok(Bump::new(
                parse_point(&a.center[k])?,
                per_bump(&a.radius, k, n, "radius")?,
                per_bump(&a.exponent, k, n, "exponent")?,
            )
            .with_amplitude(per_bump(&a.amplitude, k, n, "amplitude")?))
        })
        .collect::<std::result::Result<Vec<_>, Failure>>()?;
    Ok(PhantomSpec {
        kind: a.kind.into(),
        bumps,
    })
}

fn export(v: &VolumeGrid, e: &ExportArgs) -> std::result::Result<(), Failure> {
    let g = v.size();
    if let Some(path) = &e.slice {
        io::write_pgm(path, g, g, &v.slice_z(g / 2))?;
    }
    if let Some(path) = &e.line {
        let (j, k) = (g / 2, g / 2);
        let rows: Vec<Vec<f64>> = (0..g).map(|i| vec![v.coord(i), v.get(i, j, k)]).collect();
        io::write_csv(path, &["x", "value"], &rows)?;
    }
    Ok(())
}

fn cmd_phantom(a: &PhantomArgs) -> Outcome {
    let spec = phantom_spec(a)?;
    let f = spec.build()?;
    let v = sample_to_grid(&f, a.grid, a.extent)?;
    io::write_volume(&a.out, &v)?;
    let spec_path = a.spec.clone().unwrap_or_else(|| a.out.with_extension("spec"));
    io::write_phantom(&spec_path, &spec)?;
    export(&v, &a.export)?;
    Ok(0)
}

fn load_phantom(path: &Path) -> std::result::Result<ScalarField, Failure> {
    Ok(io::read_phantom(path)?.build()?)
}

fn scan_grids(a: &ScanArgs) -> std::result::Result<(SphereGrid, TimeGrid), Failure> {
    Ok((SphereGrid::new(a.npolar, a.nazimuth)?, TimeGrid::new(a.nt, a.tmax)?))
}

fn write_scan(a: &ScanArgs, data: &spherical_means::grid::CylinderData) -> Outcome {
    io::write_cylinder(&a.out, data)?;
    if let Some(path) = &a.profile {
        if a.detector >= data.sphere().len() {
            return Err(usage(format!(
                "--detector {} out of range (0..{})",
                a.detector,
                data.sphere().len()
            )));
        }
        io::write_profile_csv(path, &data.row_profile(a.detector))?;
    }
    Ok(0)
}

fn cmd_forward(a: &ForwardArgs) -> Outcome {
    let f = load_phantom(&a.scan.phantom)?;
    let (sphere, times) = scan_grids(&a.scan)?;
    write_scan(&a.scan, &forward_scan(&f, &sphere, &times))
}

fn recon_config(a: &ReconArgs) -> ReconConfig {
    ReconConfig::new(a.grid, a.extent)
}

fn print_metrics(rows: &[(&str, Option<f64>)]) {
    println!("{:<28} {:>14}", "metric", "value");
    for (name, v) in rows {
        match v {
            Some(v) => println!("{name:<28} {v:>14.6e}"),
            None => println!("{name:<28} {:>14}", "n/a"),
        }
    }
}

fn cmd_invert(a: &InvertArgs) -> Outcome {
    let data = io::read_cylinder(&a.recon.data)?;
    let variant = match a.variant {
        VariantArg::LaplacianLast => Variant::LaplacianLast,
        VariantArg::LaplacianFirst => Variant::LaplacianFirst,
    };
    let cfg = recon_config(&a.recon).with_variant(variant);
    let rec = fpr_invert(&data, &cfg)?;
    io::write_volume(&a.recon.out, &rec)?;
    export(&rec, &a.recon.export)?;
    if let Some(path) = &a.recon.reference {
        let f = load_phantom(path)?;
        let m = interior_metrics(&rec, &f, &cfg);
        let id = match identity_check(&f, &data, &cfg) {
            Ok(r) => Some(r.deviation),
            Err(e) => {
                log::warn!("identity check skipped: {e}");
                None
            }
        };
        print_metrics(&[
            ("interior_rel_l2", Some(m.rel_l2)),
            ("interior_rel_max", Some(m.rel_max)),
            ("identity_rel_max", id.map(|d| d.rel_max)),
            ("identity_rel_l2", id.map(|d| d.rel_l2)),
        ]);
    }
    Ok(0)
}

fn epd_spec(p: &EpdParams) -> std::result::Result<EpdSpec, Failure> {
    Ok(EpdSpec::new(p.alpha, p.lambda)?)
}

fn cmd_epd_trace(a: &EpdTraceArgs) -> Outcome {
    let spec = epd_spec(&a.params)?;
    let f = load_phantom(&a.scan.phantom)?;
    let (sphere, times) = scan_grids(&a.scan)?;
    write_scan(&a.scan, &epd_trace(&f, &spec, &sphere, &times)?)
}

fn cmd_epd_invert(a: &EpdInvertArgs) -> Outcome {
    let spec = epd_spec(&a.params)?;
    let data = io::read_cylinder(&a.recon.data)?;
    let cfg = recon_config(&a.recon);
    let rec = epd_invert(&data, &spec, &cfg)?;
    io::write_volume(&a.recon.out, &rec)?;
    export(&rec, &a.recon.export)?;
    if let Some(path) = &a.recon.reference {
        let f = load_phantom(path)?;
        let m = interior_metrics(&rec, &f, &cfg);
        print_metrics(&[("interior_rel_l2", Some(m.rel_l2)), ("interior_rel_max", Some(m.rel_max))]);
    }
    Ok(0)
}

fn cmd_check(name: &str) -> Outcome {
    let suite: Suite = name
        .parse()
        .map_err(|_| usage(format!("unknown suite {name:?} (expected one of ek, gek, rl, bessel, identity, radial, epd)")))?;
    let checks = suite.run()?;
    let mut ok = true;
    for c in &checks {
        println!("{c}");
        ok &= c.passed();
    }
    Ok(if ok { 0 } else { EXIT_CHECK_FAILED })
}
