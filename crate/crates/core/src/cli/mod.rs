//! `branchpath` command-line interface.
//!
//! Exit status: 0 on success, 1 on a domain error (reported by error name),
//! 2 on a usage error. Data goes to the file given by `--out`; the
//! human-readable summary goes to stdout.

mod output;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::branches::{self, PushGeometry, RecordMode};
use crate::catbox::{self, DecayModel, ExperimentWindow};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::propagator::{
    analytic_kernel, kernel_element, LagrangianSpec, PotentialSpec, TabulatedPotential, TimeSlicing,
};
use crate::units::{UnitMode, UnitSystem};
use crate::wavepacket::{self, GaussianPacket};

pub use output::{format_clock, parse_clock, sci};

/// Environment variable supplying the default seed.
pub const SEED_ENV: &str = "BRANCHPATH_SEED";
/// Seed used when neither `--seed` nor the environment variable is set.
pub const FALLBACK_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "branchpath", version, about = "One-dimensional path-integral laboratory")]
pub struct RunConfig {
    /// Unit system; defaults to SI for `spread` and natural units elsewhere.
    #[arg(long, global = true, value_enum)]
    pub units: Option<UnitsArg>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum UnitsArg {
    Si,
    Natural,
}

impl UnitsArg {
    fn system(self) -> UnitSystem {
        match self {
            UnitsArg::Si => UnitSystem::new(UnitMode::Si),
            UnitsArg::Natural => UnitSystem::new(UnitMode::Natural),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convergence of the time-sliced kernel against the closed form.
    Kernel(KernelArgs),
    /// Free-packet spreading estimates.
    Spread(SpreadArgs),
    /// Interference visibility of the two-branch experiment.
    Visibility(VisibilityArgs),
    /// Compare the collapse engines of the clock box.
    Catbox(CatboxArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PotentialArg {
    Free,
    ConstantForce,
    Tabulated,
}

/// `a:b` range of positive values.
#[derive(Debug, Clone, Copy)]
pub struct Range<T> {
    pub start: T,
    pub end: T,
}

fn parse_range<T: std::str::FromStr + PartialOrd + Copy>(
    s: &str,
    positive: impl Fn(T) -> bool,
) -> std::result::Result<Range<T>, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected START:END, got '{s}'"))?;
    let start: T = a.trim().parse().map_err(|_| format!("bad range start '{a}'"))?;
    let end: T = b.trim().parse().map_err(|_| format!("bad range end '{b}'"))?;
    if !positive(start) || !positive(end) || start > end {
        return Err(format!("range must satisfy 0 < START <= END, got '{s}'"));
    }
    Ok(Range { start, end })
}

fn parse_slice_range(s: &str) -> std::result::Result<Range<usize>, String> {
    parse_range(s, |v: usize| v > 0)
}

fn parse_mass_range(s: &str) -> std::result::Result<Range<f64>, String> {
    parse_range(s, |v: f64| v > 0.0 && v.is_finite())
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

fn parse_finite(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("expected a finite number, got '{s}'")),
    }
}

fn parse_nonnegative(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a non-negative number, got '{s}'")),
    }
}

fn parse_probability(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        _ => Err(format!("expected a value in (0, 1), got '{s}'")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_finite)]
    pub grid_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_finite)]
    pub grid_max: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub grid_points: Option<u32>,
}

impl GridArgs {
    fn build(&self, default: (f64, f64, u32)) -> Result<Grid1D> {
        Grid1D::new(
            self.grid_min.unwrap_or(default.0),
            self.grid_max.unwrap_or(default.1),
            self.grid_points.unwrap_or(default.2) as usize,
        )
    }
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    #[arg(long, value_enum, default_value = "free")]
    pub potential: PotentialArg,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub mass: f64,
    /// Constant force F (potential −F·x); also sampled for `tabulated` without `--table`.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true, value_parser = parse_finite)]
    pub force: f64,
    /// Two-column CSV `x,V` on a uniform grid for `--potential tabulated`.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub time: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true, value_parser = parse_finite)]
    pub from: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true, value_parser = parse_finite)]
    pub to: f64,
    /// Single slice count.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), conflicts_with = "sweep_slices")]
    pub slices: Option<u32>,
    /// Doubling sweep `START:END` of slice counts.
    #[arg(long, value_parser = parse_slice_range)]
    pub sweep_slices: Option<Range<usize>>,
    /// Require the closed-form comparison (fails for potentials without one).
    #[arg(long)]
    pub analytic: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    Electron,
    Elevator,
}

#[derive(Debug, Clone, Args)]
pub struct SpreadArgs {
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Use the exact electron Compton wavelength as the initial width.
    #[arg(long)]
    pub exact_compton: bool,
    #[arg(long, value_parser = parse_positive)]
    pub mass: Option<f64>,
    /// Initial width Δx₀.
    #[arg(long, value_parser = parse_positive)]
    pub dx0: Option<f64>,
    /// Elapsed time.
    #[arg(long, default_value_t = 1.0, value_parser = parse_nonnegative)]
    pub dt: f64,
    /// Target spread for the waiting time.
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub target: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RecordArg {
    WhichPath,
    None,
}

impl RecordArg {
    fn mode(self) -> RecordMode {
        match self {
            RecordArg::WhichPath => RecordMode::WhichPath,
            RecordArg::None => RecordMode::NoRecord,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VisibilityArgs {
    /// Record mode; both modes are reported when omitted.
    #[arg(long, value_enum)]
    pub record: Option<RecordArg>,
    /// Bring the lifted branch back down before comparing.
    #[arg(long)]
    pub recombine: bool,
    /// Sweep the packet mass over `START:END` (record-free, one-way push).
    #[arg(long, value_parser = parse_mass_range, conflicts_with_all = ["record", "recombine"])]
    pub mass_sweep: Option<Range<f64>>,
    /// Number of geometrically spaced masses in the sweep.
    #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u32).range(2..))]
    pub sweep_points: u32,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub mass: f64,
    /// Initial packet width σ₀ (standard deviation of |ψ|²).
    #[arg(long, value_parser = parse_positive)]
    pub sigma0: Option<f64>,
    /// Lift distance of the spin-up branch.
    #[arg(long, value_parser = parse_positive)]
    pub lift: Option<f64>,
    /// Overlap of the recombined packets.
    #[arg(long, default_value_t = 0.95, value_parser = parse_probability)]
    pub target_overlap: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub time: f64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub slices: Option<u32>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CatboxArgs {
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    /// Half-life in seconds.
    #[arg(long, default_value_t = 3600.0, value_parser = parse_positive)]
    pub half_life: f64,
    /// Time from starting the clock to opening the box, in seconds.
    #[arg(long, default_value_t = 3600.0, value_parser = parse_positive)]
    pub window: f64,
    /// Clock time at which the clock starts (HH:MM or HH:MM:SS).
    #[arg(long, default_value = "11:00", value_parser = parse_clock)]
    pub start: f64,
    /// Seed; defaults to $BRANCHPATH_SEED, then 42.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0.01, value_parser = parse_probability)]
    pub alpha: f64,
    /// Report JSON path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Stop-time histogram CSV path.
    #[arg(long)]
    pub histograms: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&config) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {} ({e})", e.name());
            1
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: Io: {}: {e}", path.display());
            1
        }
    }
}

fn dispatch(config: &RunConfig) -> std::result::Result<String, Failure> {
    match &config.command {
        Command::Kernel(a) => cmd_kernel(a, config.units.map_or(UnitSystem::natural(), UnitsArg::system)),
        Command::Spread(a) => cmd_spread(a, config.units.map_or(UnitSystem::si(), UnitsArg::system)),
        Command::Visibility(a) => cmd_visibility(a, config.units.map_or(UnitSystem::natural(), UnitsArg::system)),
        Command::Catbox(a) => cmd_catbox(a, std::env::var(SEED_ENV).ok().as_deref()),
    }
}

/// Writes `data` to `path` when given; the summary always goes to stdout.
fn emit(path: Option<&Path>, data: &str, summary: String) -> std::result::Result<String, Failure> {
    if let Some(p) = path {
        std::fs::write(p, data).map_err(|e| Failure::Io(p.to_path_buf(), e))?;
    }
    Ok(summary)
}

fn doubling(range: Range<usize>) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = range.start;
    while n <= range.end {
        out.push(n);
        n *= 2;
    }
    out
}

fn read_table(path: &Path) -> std::result::Result<TabulatedPotential, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let (Some(a), Some(b)) = (parts.next(), parts.next()) else {
            return Err(Failure::Usage(format!("{}: line {} needs two columns", path.display(), k + 1)));
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(v)) => {
                xs.push(x);
                vs.push(v);
            }
            _ if xs.is_empty() => continue, // header
            _ => return Err(Failure::Usage(format!("{}: bad number on line {}", path.display(), k + 1))),
        }
    }
    if xs.len() < 2 {
        return Err(Failure::Usage(format!("{}: need at least two rows", path.display())));
    }
    let grid = Grid1D::new(xs[0], xs[xs.len() - 1], xs.len())?;
    let tol = 1e-6 * grid.dx();
    if xs.iter().enumerate().any(|(i, &x)| (x - grid.point(i)).abs() > tol) {
        return Err(Failure::Domain(Error::InvalidGrid("table x column must be uniformly spaced".into())));
    }
    Ok(TabulatedPotential::new(grid, vs)?)
}

fn cmd_kernel(a: &KernelArgs, units: UnitSystem) -> std::result::Result<String, Failure> {
    let grid = a.grid.build((-20.0, 20.0, 801))?;
    let lagrangian = match a.potential {
        PotentialArg::Free => LagrangianSpec::free(a.mass)?,
        PotentialArg::ConstantForce => LagrangianSpec::constant_force(a.mass, a.force)?,
        PotentialArg::Tabulated => {
            let table = match &a.table {
                Some(p) => read_table(p)?,
                None => TabulatedPotential::new(grid, grid.points().map(|x| -a.force * x).collect())?,
            };
            LagrangianSpec::new(a.mass, PotentialSpec::Tabulated(table))?
        }
    };
    let reference = match analytic_kernel(a.from, a.to, a.time, &lagrangian, &units) {
        Ok(k) => Some(k),
        Err(e @ Error::UnsupportedPotential(_)) if a.analytic => return Err(e.into()),
        Err(Error::UnsupportedPotential(_)) => None,
        Err(e) => return Err(e.into()),
    };
    if !grid.contains(a.from) || !grid.contains(a.to) {
        return Err(Error::InvalidParameter(format!("endpoints {} and {} must lie on the grid", a.from, a.to)).into());
    }
    let counts = match (a.sweep_slices, a.slices) {
        (Some(r), _) => doubling(r),
        (None, Some(n)) => vec![n as usize],
        (None, None) => vec![64],
    };

    let mut csv = String::from("n_slices,abs_discrete,arg_discrete,abs_analytic,arg_analytic,rel_error\n");
    let mut rows = Vec::new();
    for &n in &counts {
        let slicing = TimeSlicing::new(a.time, n)?;
        let k = kernel_element(&grid, &slicing, &lagrangian, &units, a.from, a.to)?;
        let (ka, err) = match reference {
            Some(r) => (r, (k - r).norm() / r.norm()),
            None => (Complex64::new(f64::NAN, f64::NAN), f64::NAN),
        };
        writeln!(csv, "{n},{},{},{},{},{}", sci(k.norm()), sci(k.arg()), sci(ka.norm()), sci(ka.arg()), sci(err))
            .unwrap();
        rows.push((n, err));
    }

    let mut summary = format!(
        "kernel: {} potential, m = {}, T = {}, {} -> {}, grid [{}, {}] x {}\n",
        lagrangian.potential().kind(),
        a.mass,
        a.time,
        a.from,
        a.to,
        grid.x_min(),
        grid.x_max(),
        grid.len()
    );
    for (n, err) in &rows {
        writeln!(summary, "  N = {n:>5}  rel_error = {}", sci(*err)).unwrap();
    }
    emit(a.out.as_deref(), &csv, summary)
}

struct SpreadReference {
    rate: &'static str,
    spread: &'static str,
    wait: &'static str,
}

fn cmd_spread(a: &SpreadArgs, units: UnitSystem) -> std::result::Result<String, Failure> {
    let (packet, reference, label) = match a.preset {
        Some(Preset::Electron) => (
            GaussianPacket::electron(a.exact_compton),
            Some(SpreadReference { rate: "~1e19 /s", spread: "~1e8 m (100,000 km)", wait: "-" }),
            "electron",
        ),
        Some(Preset::Elevator) => (
            GaussianPacket::elevator(),
            Some(SpreadReference { rate: "~1e-12 /s", spread: "-", wait: "~1e23 s" }),
            "elevator",
        ),
        None => {
            let (Some(m), Some(w)) = (a.mass, a.dx0) else {
                return Err(Failure::Usage("spread needs --preset or both --mass and --dx0".into()));
            };
            (GaussianPacket::new(m, 0.0, w, 0.0)?, None, "custom")
        }
    };
    let packet = GaussianPacket { mass: a.mass.unwrap_or(packet.mass), width: a.dx0.unwrap_or(packet.width), ..packet };
    let packet = GaussianPacket::new(packet.mass, packet.center, packet.width, packet.velocity)?;
    let report = wavepacket::spread_report(&packet, a.dt, &units)?;
    let wait = wavepacket::wait_time_for_spread(&packet, a.target, &units)?;

    let json = output::spread_json(label, &packet, &report, a.target, wait, units.mode());
    let mut s = format!(
        "spread ({label}): m = {}, dx0 = {}, dt = {}, units = {}\n",
        sci(packet.mass),
        sci(packet.width),
        sci(a.dt),
        output::mode_name(units.mode())
    );
    let r = reference.as_ref();
    writeln!(s, "  rate hbar/(m dx0^2)      = {}  (reference {})", sci(report.rate), r.map_or("-", |r| r.rate))
        .unwrap();
    writeln!(s, "  dx_v(dt)                 = {}", sci(report.delta_x_v)).unwrap();
    writeln!(s, "  dx_1(dt)                 = {}  (reference {})", sci(report.delta_x_1), r.map_or("-", |r| r.spread))
        .unwrap();
    writeln!(s, "  wait to spread {}   = {}  (reference {})", sci(a.target), sci(wait), r.map_or("-", |r| r.wait))
        .unwrap();
    emit(a.out.as_deref(), &json, s)
}

fn geometric(range: Range<f64>, n: usize) -> Vec<f64> {
    let (lo, hi) = (range.start.ln(), range.end.ln());
    (0..n).map(|k| (lo + (hi - lo) * k as f64 / (n - 1) as f64).exp()).collect()
}

fn cmd_visibility(a: &VisibilityArgs, units: UnitSystem) -> std::result::Result<String, Failure> {
    if let Some(range) = a.mass_sweep {
        let geometry = PushGeometry {
            sigma0: a.sigma0.unwrap_or(PushGeometry::default().sigma0),
            distance: a.lift.unwrap_or(PushGeometry::default().distance),
            duration: a.time,
            n_slices: a.slices.map_or(PushGeometry::default().n_slices, |n| n as usize),
        };
        let grid = a.grid.build((-8.0, 8.0, 641))?;
        let masses = geometric(range, a.sweep_points as usize);
        let rows = branches::mass_sweep(&masses, &geometry, &grid, &units)?;
        let mut csv = String::from("mass,visibility,fringe_contrast,predicted\n");
        let mut s = format!(
            "visibility mass sweep: push by {} over T = {}, sigma0 = {}, no record\n",
            geometry.distance, geometry.duration, geometry.sigma0
        );
        for r in &rows {
            // equal weights: the fringe swing equals V
            writeln!(csv, "{},{},{},{}", sci(r.mass), sci(r.visibility), sci(r.visibility), sci(r.predicted)).unwrap();
            writeln!(s, "  m = {}  V = {}  predicted = {}", sci(r.mass), sci(r.visibility), sci(r.predicted)).unwrap();
        }
        let monotone = rows.windows(2).all(|w| w[1].visibility < w[0].visibility);
        writeln!(s, "  monotone decreasing: {monotone}").unwrap();
        return emit(a.out.as_deref(), &csv, s);
    }

    let sigma0 = a.sigma0.unwrap_or(0.5);
    let lift = a.lift.unwrap_or(if a.recombine { 2.0 } else { 1.0 });
    let n_slices = a.slices.map_or(64, |n| n as usize);
    let grid = a.grid.build((-8.0, 8.0, 641))?;
    let packet = GaussianPacket::new(a.mass, 0.0, sigma0, 0.0)?;
    let up = if a.recombine {
        let residual = branches::residual_for_overlap(sigma0, a.target_overlap)?;
        branches::recombining_schedule(a.mass, lift, residual, a.time, n_slices)?
    } else {
        branches::lift_schedule(a.mass, lift, a.time, n_slices)?
    };
    let down = branches::static_schedule(a.mass, &up)?;
    let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let modes = match a.record {
        Some(r) => vec![r.mode()],
        None => vec![RecordMode::WhichPath, RecordMode::NoRecord],
    };

    let mut csv = String::from("record_mode,visibility,fringe_contrast\n");
    let mut s = format!(
        "visibility: m = {}, sigma0 = {}, lift = {}, {}, T = {}, N = {}\n",
        a.mass,
        sigma0,
        lift,
        if a.recombine { "recombined" } else { "held" },
        a.time,
        n_slices
    );
    for mode in modes {
        let ens = branches::evolve_conditional_schedule((w, w), &packet, &up, &down, &grid, mode, &units)?;
        let v = branches::visibility(&ens)?;
        let c = branches::fringe_contrast(&ens, &branches::reference_detector(&ens)?)?;
        writeln!(csv, "{},{},{}", mode.name(), sci(v), sci(c)).unwrap();
        writeln!(s, "  record = {:<10}  V = {}  fringe_contrast = {}", mode.name(), sci(v), sci(c)).unwrap();
    }
    emit(a.out.as_deref(), &csv, s)
}

fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> std::result::Result<u64, Failure> {
    match (flag, env) {
        (Some(s), _) => Ok(s),
        (None, Some(v)) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV} must be an unsigned 64-bit integer, got '{v}'"))),
        (None, None) => Ok(FALLBACK_SEED),
    }
}

fn cmd_catbox(a: &CatboxArgs, env_seed: Option<&str>) -> std::result::Result<String, Failure> {
    let seed = resolve_seed(a.seed, env_seed)?;
    let model = DecayModel::new(a.half_life)?;
    let window = ExperimentWindow::new(a.start, a.start + a.window)?;
    let report = catbox::compare_engines(a.trials, &model, &window, seed, a.alpha)?;
    let json = report.to_json() + "\n";
    if let Some(p) = &a.histograms {
        std::fs::write(p, output::histogram_csv(&report)).map_err(|e| Failure::Io(p.clone(), e))?;
    }

    let mut s = format!(
        "catbox: {} trials per engine, half-life {} s, clock {} -> {}, seed {seed}\n",
        report.n_trials,
        a.half_life,
        format_clock(window.t_start()),
        format_clock(window.t_open())
    );
    writeln!(s, "  analytic p_stopped = {}", sci(report.analytic_p_stopped)).unwrap();
    for e in &report.engines {
        writeln!(
            s,
            "  {:<22} p_stopped = {} [{}, {}]  chi2 p = {}",
            e.engine,
            sci(e.p_stopped),
            sci(e.p_stopped_ci.0),
            sci(e.p_stopped_ci.1),
            sci(e.chi_square_p)
        )
        .unwrap();
    }
    for k in &report.ks {
        writeln!(s, "  KS {} vs {}: D = {}  p = {}", k.a, k.b, sci(k.statistic), sci(k.p_value)).unwrap();
    }
    writeln!(s, "  pass = {}", report.pass).unwrap();
    emit(a.out.as_deref(), &json, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_resolution_order() {
        assert_eq!(resolve_seed(Some(3), Some("9")).unwrap(), 3);
        assert_eq!(resolve_seed(None, Some(" 9 ")).unwrap(), 9);
        assert_eq!(resolve_seed(None, None).unwrap(), FALLBACK_SEED);
        assert!(matches!(resolve_seed(None, Some("x")), Err(Failure::Usage(_))));
    }

    #[test]
    fn doubling_sweep() {
        assert_eq!(doubling(Range { start: 4, end: 256 }), vec![4, 8, 16, 32, 64, 128, 256]);
        assert_eq!(doubling(Range { start: 3, end: 20 }), vec![3, 6, 12]);
    }

    #[test]
    fn geometric_masses_hit_endpoints() {
        let m = geometric(Range { start: 1.0, end: 100.0 }, 7);
        assert!((m[0] - 1.0).abs() < 1e-12 && (m[6] - 100.0).abs() < 1e-9);
        assert!((m[3] - 10.0).abs() < 1e-9);
    }

    #[test]
    fn range_parsing() {
        assert!(parse_slice_range("4:256").is_ok());
        assert!(parse_slice_range("0:4").is_err());
        assert!(parse_slice_range("8:4").is_err());
        assert!(parse_mass_range("1:100").is_ok());
        assert!(parse_mass_range("1-100").is_err());
    }
}
