//! Command-line surface. Every command is a plain function of its arguments
//! writing to a caller-supplied stream, so identical arguments give
//! byte-identical output.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure or
//! failed check, 3 undecided classification.

use crate::integrate::Tolerance;
use crate::io::{self, IoError};
use crate::pde::{self, PdeError, SimulationConfig};
use crate::shooting::{
    self, Classification, FrontProfile, OutcomeKind, ProfileKind, ShootConfig, ShootError, VelocityClass,
};
use crate::verify::{self, CheckReport, VerifyError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Default directory for output files when no explicit path is given.
pub const OUT_DIR_ENV: &str = "FRONTS_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    ChecksFailed(String),
    #[error("undecided: {0}")]
    Undecided(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) | CliError::ChecksFailed(_) => 2,
            CliError::Undecided(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(IoError::Io(e))
    }
}

impl From<ShootError> for CliError {
    fn from(e: ShootError) -> Self {
        match e {
            ShootError::InvalidConfig(_) | ShootError::InvalidBracket { .. } | ShootError::NotAFront { .. } => {
                CliError::Usage(e.to_string())
            }
            ShootError::Dynamics(_) => CliError::Usage(e.to_string()),
            ShootError::UndecidedInBracket { .. } => CliError::Undecided(e.to_string()),
            ShootError::Integrate(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<PdeError> for CliError {
    fn from(e: PdeError) -> Self {
        match e {
            PdeError::InvalidInput(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::InsufficientTail(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fronts", version, about = "Retracting fronts of the nonlinear complex heat equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify velocities as admitting no front, a gradual front, or undecided.
    Classify(ClassifyArgs),
    /// Bisect for the critical velocity between blow-up and gradual convergence.
    FindVstar(FindVstarArgs),
    /// Compute a front profile and write it as CSV.
    Profile(ProfileArgs),
    /// Simulate the PDE from a smoothed step and track the front.
    Simulate(SimulateArgs),
    /// Run property checks on a computed or stored profile.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Gradual,
    Steep,
}

impl From<KindArg> for ProfileKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Gradual => ProfileKind::Gradual,
            KindArg::Steep => ProfileKind::Steep,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ShootArgs {
    /// Seed offset from the zero-plane equilibrium.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    /// Relative integration tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub rtol: f64,
    /// Absolute integration tolerance for kappa and q.
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
    /// Amplitude above which a shot counts as blown up.
    #[arg(long, default_value_t = 10.0)]
    pub blowup: f64,
}

impl ShootArgs {
    pub fn config(&self) -> Result<ShootConfig, CliError> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(CliError::Usage("tolerances must be positive".into()));
        }
        Ok(ShootConfig {
            eps: self.eps,
            tol: Tolerance { rel: self.rtol, abs: self.atol },
            blowup_threshold: self.blowup,
            ..Default::default()
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    /// Comma-separated velocities.
    #[arg(long = "v", value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["from", "to", "step"])]
    pub velocities: Vec<f64>,
    #[arg(long, allow_negative_numbers = true, requires_all = ["to", "step"])]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Exit 0 even if some velocity stays undecided.
    #[arg(long)]
    pub allow_undecided: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub shoot: ShootArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FindVstarArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub shoot: ShootArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    /// Velocity of a gradual front.
    #[arg(long = "v", allow_negative_numbers = true, required_unless_present = "steep")]
    pub v: Option<f64>,
    /// Steep profile at the bisected critical velocity.
    #[arg(long, conflicts_with = "v")]
    pub steep: bool,
    #[command(flatten)]
    pub bracket: SteepBracket,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub shoot: ShootArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SteepBracket {
    /// Bracket for the critical velocity when a steep profile is requested.
    #[arg(long = "bracket-lo", default_value_t = 0.5)]
    pub lo: f64,
    #[arg(long = "bracket-hi", default_value_t = 2.0)]
    pub hi: f64,
    #[arg(long = "bracket-tol", default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long = "length", default_value_t = 400.0)]
    pub length: f64,
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    #[arg(long = "t-end", default_value_t = 200.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Interval between front-position samples.
    #[arg(long = "output-interval", default_value_t = 0.5)]
    pub output_interval: f64,
    /// Also write the field every this many time units.
    #[arg(long = "snapshot-interval")]
    pub snapshot_interval: Option<f64>,
    /// Mirror the domain so the front moves left.
    #[arg(long)]
    pub reflect: bool,
    /// Directory for track.csv, final.csv, speed.json and snapshots.
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Velocity; computes the profile unless --profile is given.
    #[arg(long = "v", allow_negative_numbers = true, required_unless_present_any = ["steep"])]
    pub v: Option<f64>,
    /// Verify the steep profile at the bisected critical velocity.
    #[arg(long)]
    pub steep: bool,
    /// Profile CSV to check instead of computing one.
    #[arg(long, requires = "v")]
    pub profile: Option<PathBuf>,
    /// Kind of a stored profile.
    #[arg(long, value_enum, default_value_t = KindArg::Gradual)]
    pub kind: KindArg,
    /// Comma-separated subset of checks to run.
    #[arg(long, value_delimiter = ',')]
    pub checks: Vec<String>,
    #[command(flatten)]
    pub bracket: SteepBracket,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub shoot: ShootArgs,
}

/// Explicit path, else `$FRONTS_OUT_DIR/default_name`, else standard output.
fn output_target(explicit: &Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    explicit.clone().or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(default_name)))
}

fn with_output(
    target: Option<PathBuf>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match target {
        Some(path) => {
            let mut w = BufWriter::new(File::create(&path)?);
            f(&mut w)?;
            w.flush()?;
            writeln!(stdout, "wrote {}", path.display())?;
            Ok(())
        }
        None => f(stdout),
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Classify(args) => cmd_classify(&args, stdout),
        Command::FindVstar(args) => cmd_find_vstar(&args, stdout),
        Command::Profile(args) => cmd_profile(&args, stdout),
        Command::Simulate(args) => cmd_simulate(&args, stdout),
        Command::Verify(args) => cmd_verify(&args, stdout),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyRow {
    pub v: f64,
    pub class: VelocityClass,
    pub outcome: Option<&'static str>,
    pub xi_blow: Option<f64>,
    pub decided_at: Option<f64>,
    pub alignment: Option<f64>,
    pub xq_drift: Option<f64>,
    pub attempts: usize,
}

impl From<&Classification> for ClassifyRow {
    fn from(c: &Classification) -> Self {
        let out = c.outcome.as_ref();
        let outcome = out.map(|o| match o.kind {
            OutcomeKind::Blowup { .. } => "Blowup",
            OutcomeKind::ConvergedCenter => "ConvergedCenter",
            OutcomeKind::ConvergedStable => "ConvergedStable",
            OutcomeKind::Undecided => "Undecided",
        });
        let xi_blow = out.and_then(|o| match o.kind {
            OutcomeKind::Blowup { xi_blow, .. } => Some(xi_blow),
            _ => None,
        });
        ClassifyRow {
            v: c.v,
            class: c.class,
            outcome,
            xi_blow,
            decided_at: out.and_then(|o| o.diagnostics.decided_at),
            alignment: out.and_then(|o| o.diagnostics.alignment),
            xq_drift: out.and_then(|o| o.diagnostics.xq_drift),
            attempts: c.attempts,
        }
    }
}

/// Velocities from an explicit list or an inclusive range.
pub fn velocity_list(args: &ClassifyArgs) -> Result<Vec<f64>, CliError> {
    if !args.velocities.is_empty() {
        if args.velocities.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Usage("velocities must be finite".into()));
        }
        return Ok(args.velocities.clone());
    }
    let (Some(from), Some(to), Some(step)) = (args.from, args.to, args.step) else {
        return Err(CliError::Usage("give --v or all of --from, --to, --step".into()));
    };
    if !(step > 0.0 && from.is_finite() && to.is_finite()) || from > to {
        return Err(CliError::Usage(format!("empty range {from}..{to} step {step}")));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| from + k as f64 * step).collect())
}

fn opt(x: Option<f64>) -> String {
    x.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

pub fn cmd_classify(args: &ClassifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let vs = velocity_list(args)?;
    let config = args.shoot.config()?;
    let rows = shooting::classify_many(&vs, &config)
        .into_iter()
        .map(|r| r.map(|c| ClassifyRow::from(&c)))
        .collect::<Result<Vec<_>, _>>()?;
    with_output(output_target(&args.out, "classify.csv"), stdout, |w| {
        match args.format {
            Format::Json => io::write_json(w, &rows)?,
            Format::Csv => {
                writeln!(w, "v,class,outcome,xi_blow,decided_at,alignment,xq_drift,attempts")?;
                for r in &rows {
                    writeln!(
                        w,
                        "{:.16e},{:?},{},{},{},{},{},{}",
                        r.v,
                        r.class,
                        r.outcome.unwrap_or(""),
                        opt(r.xi_blow),
                        opt(r.decided_at),
                        opt(r.alignment),
                        opt(r.xq_drift),
                        r.attempts
                    )?;
                }
            }
        }
        Ok(())
    })?;
    let undecided: Vec<f64> = rows.iter().filter(|r| r.class == VelocityClass::Undecided).map(|r| r.v).collect();
    if !undecided.is_empty() && !args.allow_undecided {
        return Err(CliError::Undecided(format!("velocities {undecided:?}")));
    }
    Ok(())
}

pub fn cmd_find_vstar(args: &FindVstarArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = args.shoot.config()?;
    let result = shooting::find_v_star(args.lo, args.hi, args.tol, &config)?;
    with_output(output_target(&args.out, "vstar.json"), stdout, |w| Ok(io::write_json(w, &result)?))
}

fn steep_at_vstar(bracket: &SteepBracket, config: &ShootConfig) -> Result<FrontProfile, CliError> {
    let r = shooting::find_v_star(bracket.lo, bracket.hi, bracket.tol, config)?;
    Ok(shooting::steep_profile(r.v_star, config)?)
}

pub fn cmd_profile(args: &ProfileArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = args.shoot.config()?;
    let (profile, name) = match args.v {
        Some(v) => (shooting::front_profile(v, &config)?, format!("profile_v{v}.csv")),
        None => (steep_at_vstar(&args.bracket, &config)?, "profile_steep.csv".to_string()),
    };
    with_output(output_target(&args.out, &name), stdout, |w| Ok(io::write_profile_csv(w, &profile)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedReport {
    pub a: f64,
    pub fitted_speed: f64,
    pub fit_residual: f64,
    pub window: (f64, f64),
    pub final_position: f64,
}

pub fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.n < 3 {
        return Err(CliError::Usage(format!("grid needs at least 3 points, got {}", args.n)));
    }
    let config = SimulationConfig {
        a: args.a,
        length: args.length,
        n: args.n,
        t_end: args.t_end,
        dt: args.dt,
        output_interval: args.output_interval,
        reflect: args.reflect,
        snapshot_interval: args.snapshot_interval,
        ..Default::default()
    };
    let sim = pde::simulate_front(&config)?;
    let dir = args
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let report = SpeedReport {
        a: args.a,
        fitted_speed: sim.track.fitted_speed,
        fit_residual: sim.track.fit_residual,
        window: sim.track.window,
        final_position: *sim.track.positions.last().expect("track is never empty"),
    };
    write_file(&dir.join("track.csv"), |w| io::write_track_csv(w, &sim.track))?;
    write_file(&dir.join("final.csv"), |w| io::write_snapshot_csv(w, &sim.field))?;
    for (k, snap) in sim.snapshots.iter().enumerate() {
        write_file(&dir.join(format!("snapshot_{k:05}.csv")), |w| io::write_snapshot_csv(w, snap))?;
    }
    write_file(&dir.join("speed.json"), |w| io::write_json(w, &report))?;
    io::write_json(stdout, &report)?;
    Ok(())
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<(), IoError>) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

pub const GRADUAL_CHECKS: [&str; 8] = [
    "monotone_amplitude",
    "monotone_phase",
    "cone_invariance",
    "center_asymptotics",
    "center_coefficients",
    "phase_divergence",
    "ode_residual",
    "scale_map",
];
pub const STEEP_CHECKS: [&str; 5] = ["monotone_amplitude", "monotone_phase", "phase_divergence", "stable_decay", "ode_residual"];

/// Runs the named check on `profile`.
pub fn run_check(name: &str, profile: &FrontProfile) -> Result<CheckReport, CliError> {
    let v = profile.v();
    let report = match name {
        "monotone_amplitude" => verify::check_monotone_amplitude(profile),
        "monotone_phase" => verify::check_monotone_phase(profile),
        "cone_invariance" => {
            let traj = profile.trajectory.clone().unwrap_or_else(|| profile.as_trajectory());
            verify::check_cone_invariance(v, &traj)?
        }
        "center_asymptotics" => verify::fit_center_asymptotics(profile, v)?.1,
        "center_coefficients" => verify::fit_center_coefficients(profile, v)?.1,
        "phase_divergence" => verify::check_phase_divergence(profile, profile.kind)?,
        "stable_decay" => verify::check_stable_decay(profile)?,
        "ode_residual" => verify::check_ode_residual(profile, v)?,
        "scale_map" => {
            let mut r = verify::check_system_residual(&verify::scale_map(profile, 2.0)?, verify::RESIDUAL_TOLERANCE)?;
            r.name = "scale_map".into();
            r
        }
        other => return Err(CliError::Usage(format!("unknown check {other:?}"))),
    };
    Ok(report)
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = args.shoot.config()?;
    if let Some(v) = args.v {
        if args.checks.iter().any(|c| c == "cone_invariance") && !(v >= 2.0) {
            return Err(VerifyError::Hypothesis(format!("cone invariance needs v >= 2, got {v}")).into());
        }
    }
    let profile = match (&args.profile, args.v, args.steep) {
        (Some(path), Some(v), _) => {
            let kind = if args.steep { ProfileKind::Steep } else { args.kind.into() };
            io::read_profile_csv(File::open(path)?, v, kind)?
        }
        (None, _, true) => steep_at_vstar(&args.bracket, &config)?,
        (None, Some(v), false) => shooting::front_profile(v, &config)?,
        _ => return Err(CliError::Usage("give --v, --steep, or --profile with --v".into())),
    };
    let names: Vec<String> = if args.checks.is_empty() {
        let defaults: &[&str] = match profile.kind {
            ProfileKind::Gradual => &GRADUAL_CHECKS,
            ProfileKind::Steep => &STEEP_CHECKS,
        };
        defaults
            .iter()
            .filter(|n| **n != "cone_invariance" || profile.v() >= 2.0)
            .map(|n| n.to_string())
            .collect()
    } else {
        args.checks.clone()
    };
    let reports = names.iter().map(|n| run_check(n, &profile)).collect::<Result<Vec<_>, _>>()?;
    with_output(output_target(&args.out, "verify.json"), stdout, |w| Ok(io::write_json(w, &reports)?))?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(format!("checks failed: {}", failed.join(", "))))
    }
}
