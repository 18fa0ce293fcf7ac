//! Command-line driver: surface-tension tables, epsilon sweeps, gradient
//! flow runs, and transition-profile dumps.
//!
//! Exit codes: 0 success, 2 configuration or domain errors, 3 singular
//! energy during a sweep, 4 tolerance failure, 5 time-step failure.

use std::fs::{create_dir_all, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dgch::config::RunConfig;
use dgch::fieldio::{fmt_g17, write_field_binary};
use dgch::flow::{mass_drift, run as run_flow, FlowError};
use dgch::model::{surface_tension_sigma, surface_tension_sigma_closed, ModelParams};
use dgch::profile::{build_recovery_field_with_profile, Profile, ProfileVariant};
use dgch::sweep::gamma_sweep;
use dgch::Error;

#[derive(Parser)]
#[command(name = "dgch", version, about = "phase-field energy toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PhaseArgs {
    /// Lower pure-phase value
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    u_minus: f64,
    /// Upper pure-phase value
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    u_plus: f64,
    /// Potential prefactor
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Surface-tension constants: quadrature vs closed form per exponent
    Sigma {
        /// Comma-separated exponents (each < 2); may be empty
        #[arg(long, value_name = "P,...", allow_negative_numbers = true, default_value = "")]
        p_list: String,
        #[command(flatten)]
        phases: PhaseArgs,
    },
    /// Epsilon sweep of the recovery-field energy against sigma(p)*Per(A)
    GammaSweep {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Explicit integration of the regularized conservative gradient flow
    Flow {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Transition-profile table phi(t)
    Profile {
        #[arg(long)]
        epsilon: f64,
        /// Number of table rows
        #[arg(long, default_value_t = 257)]
        samples: usize,
        #[arg(long, default_value = "two-w-plus-two-eps")]
        variant: String,
        #[command(flatten)]
        phases: PhaseArgs,
    },
}

fn code_for(err: &Error) -> u8 {
    match err {
        Error::Params(_) | Error::Domain(_) | Error::Config(_) | Error::Io(_) => 2,
        Error::Singular(_) => 3,
        Error::Step(_) => 5,
    }
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code_for(&err))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Sigma { p_list, phases } => cmd_sigma(&p_list, &phases),
        Command::GammaSweep { config, out } => cmd_gamma_sweep(&config, &out),
        Command::Flow { config, out } => cmd_flow(&config, &out),
        Command::Profile {
            epsilon,
            samples,
            variant,
            phases,
        } => cmd_profile(epsilon, samples, &variant, &phases),
    }
}

fn params_from(phases: &PhaseArgs) -> ModelParams {
    ModelParams {
        u_minus: phases.u_minus,
        u_plus: phases.u_plus,
        gamma: phases.gamma,
        ..ModelParams::default()
    }
}

fn cmd_sigma(p_list: &str, phases: &PhaseArgs) -> ExitCode {
    let mp = params_from(phases);
    if let Err(e) = mp.validate() {
        return fail(e);
    }
    let ps: Vec<&str> = p_list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let mut rows = Vec::new();
    for s in &ps {
        let p: f64 = match s.parse() {
            Ok(v) => v,
            Err(_) => return fail(Error::Config(format!("bad exponent '{s}' in --p-list"))),
        };
        let quad = match surface_tension_sigma(p, &mp) {
            Ok(v) => v,
            Err(e) => return fail(e),
        };
        let closed = match surface_tension_sigma_closed(p, &mp) {
            Ok(v) => v,
            Err(e) => return fail(e),
        };
        let rel = (quad - closed).abs() / closed.abs().max(f64::MIN_POSITIVE);
        rows.push(format!(
            "{},{},{},{}",
            fmt_g17(p),
            fmt_g17(quad),
            fmt_g17(closed),
            fmt_g17(rel)
        ));
    }
    println!(
        "# u_minus={} u_plus={} gamma={}",
        fmt_g17(mp.u_minus),
        fmt_g17(mp.u_plus),
        fmt_g17(mp.gamma)
    );
    println!("p,sigma_quadrature,sigma_closed_form,rel_err");
    for r in rows {
        println!("{r}");
    }
    ExitCode::SUCCESS
}

fn cmd_gamma_sweep(config: &PathBuf, out: &PathBuf) -> ExitCode {
    let cfg = match RunConfig::from_file(config) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let sweep_cfg = match cfg.sweep_config() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let rel_tol = cfg.sweep.as_ref().map(|s| s.rel_tol).unwrap_or(0.05);
    let report = match gamma_sweep(&sweep_cfg) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if let Err(e) = create_dir_all(out) {
        return fail(e.into());
    }
    let path = out.join("sweep.csv");
    let write = || -> dgch::Result<()> {
        let f = BufWriter::new(File::create(&path)?);
        report.write_csv(&cfg.resolved_line(), f)?;
        Ok(())
    };
    if let Err(e) = write() {
        return fail(e);
    }
    println!(
        "E0 = {}  target = {}  rel_gap = {}  ({} points, fit rate {})",
        fmt_g17(report.e0),
        fmt_g17(report.target),
        fmt_g17(report.rel_gap),
        report.points.len(),
        fmt_g17(report.fit_rate)
    );
    println!("wrote {}", path.display());
    if report.any_singular {
        eprintln!("error: singular energy during sweep");
        return ExitCode::from(3);
    }
    if report.rel_gap > rel_tol {
        eprintln!(
            "error: rel_gap {} exceeds tolerance {}",
            fmt_g17(report.rel_gap),
            fmt_g17(rel_tol)
        );
        return ExitCode::from(4);
    }
    ExitCode::SUCCESS
}

fn cmd_flow(config: &PathBuf, out: &PathBuf) -> ExitCode {
    let cfg = match RunConfig::from_file(config) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let (flow_cfg, grid, region) = match cfg.flow_setup() {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let profile = match Profile::build(&flow_cfg.params) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let u0 = match build_recovery_field_with_profile(&region, &grid, &profile) {
        Ok(u) => u,
        Err(e) => return fail(e),
    };
    if let Err(e) = create_dir_all(out) {
        return fail(e.into());
    }

    let (trajectory, failure) = match run_flow(u0, &flow_cfg) {
        Ok(t) => (t, None),
        Err(FlowError::Config(e)) => return fail(e),
        Err(FlowError::Step(f)) => (f.trajectory, Some(f.message)),
    };

    let header = cfg.resolved_line();
    let write = || -> dgch::Result<()> {
        let mut f = BufWriter::new(File::create(out.join("trajectory.csv"))?);
        writeln!(f, "# {header}")?;
        writeln!(f, "t,dt,energy,mass,overshoot")?;
        for (k, s) in trajectory.iter().enumerate() {
            writeln!(
                f,
                "{},{},{},{},{}",
                fmt_g17(s.t),
                fmt_g17(s.dt),
                fmt_g17(s.energy),
                fmt_g17(s.mass),
                fmt_g17(s.overshoot)
            )?;
            let snap = BufWriter::new(File::create(out.join(format!("snap_{k:06}.bin")))?);
            write_field_binary(&s.u, snap)?;
        }
        Ok(())
    };
    if let Err(e) = write() {
        return fail(e);
    }
    println!(
        "trajectory: {} states to t = {}, energy {} -> {}",
        trajectory.len(),
        fmt_g17(trajectory.last().map(|s| s.t).unwrap_or(0.0)),
        fmt_g17(trajectory[0].energy),
        fmt_g17(trajectory.last().map(|s| s.energy).unwrap_or(f64::NAN))
    );
    println!("wrote {}", out.join("trajectory.csv").display());

    if let Some(message) = failure {
        eprintln!("error: {message}");
        return ExitCode::from(5);
    }
    // saved states are save_every accepted steps apart; each step may move
    // the energy up by at most its 1e-12 relative allowance
    let save_every = cfg.flow.as_ref().map(|f| f.save_every).unwrap_or(1);
    let window_tol = 1e-12 * save_every as f64;
    let monotone = trajectory
        .windows(2)
        .all(|w| w[1].energy <= w[0].energy + window_tol * w[0].energy.abs() + 1e-300);
    let drift = mass_drift(&trajectory);
    if !monotone {
        eprintln!("error: energy increased along the trajectory");
        return ExitCode::from(4);
    }
    if drift > 1e-12 {
        eprintln!("error: relative mass drift {} exceeds 1e-12", fmt_g17(drift));
        return ExitCode::from(4);
    }
    ExitCode::SUCCESS
}

fn cmd_profile(epsilon: f64, samples: usize, variant: &str, phases: &PhaseArgs) -> ExitCode {
    let mut mp = params_from(phases);
    mp.epsilon = epsilon;
    if let Err(e) = mp.validate() {
        return fail(e);
    }
    let variant = match ProfileVariant::by_name(variant) {
        Some(v) => v,
        None => return fail(Error::Config(format!("unknown profile variant '{variant}'"))),
    };
    if samples < 2 {
        return fail(Error::Config("--samples must be at least 2".into()));
    }
    let profile = match Profile::build_with_variant(&mp, variant) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let width = profile.width();
    println!(
        "# u_minus={} u_plus={} gamma={} epsilon={} variant={} samples={}",
        fmt_g17(mp.u_minus),
        fmt_g17(mp.u_plus),
        fmt_g17(mp.gamma),
        fmt_g17(epsilon),
        variant.name(),
        samples
    );
    println!("t,phi");
    for k in 0..samples {
        let t = if k + 1 == samples {
            width // land exactly on the clamp at the last row
        } else {
            width * k as f64 / (samples - 1) as f64
        };
        println!("{},{}", fmt_g17(t), fmt_g17(profile.eval(t)));
    }
    println!("# width = {}", fmt_g17(width));
    println!(
        "# width_bound_sqrt_eps_gap = {}",
        fmt_g17(epsilon.sqrt() * mp.phase_gap())
    );
    ExitCode::SUCCESS
}
