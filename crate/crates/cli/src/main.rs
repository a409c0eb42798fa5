//! `conescan` command-line front end.
//!
//! Lengths are mm, times s, speeds mm/s, cam angular velocities rad/s and
//! reported angles degrees. Exit codes: 0 success, 1 a requirement or
//! constraint check failed, 2 bad input, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conescan::io::config::{
    profile_from_config, profile_to_config, requirements_from_config, Config, DesignConfig,
    PROFILE_HEADER,
};
use conescan::io::csv::{load_trajectory, save_trajectory, write_cam_program};
use conescan::io::svg::{write_svg_plot, PlotStyle, Series};
use conescan::kinematics::{contact_residual, CamState};
use conescan::metrics::{
    ideal_spiral_dots, match_ratio, mismatch_on, DEFAULT_DOT_SPACING, DEFAULT_HALF_THICKNESS,
    FRAME_INTERVAL,
};
use conescan::planning::{
    constant_speed_cam_program, coverage_report_with, plan_raster, plan_spiral, SpacingProbe,
    DEFAULT_OMEGA_CAP,
};
use conescan::profile::{
    fit_profile, generate_fit_samples, linearity_report, validate_design_in_tube, FOV_HALF_MIN,
};
use conescan::{
    contact_from_deflection, simulate_scan, solve_deflection, tip_pose, CamProgram, ConicProfile,
    Error, ErrorKind, RequirementSpec,
};

#[derive(Debug, Parser)]
#[command(
    name = "conescan",
    version,
    about = "Design, simulate and evaluate a cam-driven spiral scanner",
    after_help = "Units: lengths mm, times s, speeds mm/s, cam rates rad/s, angles deg.\n\
                  Exit codes: 0 ok, 1 check failed, 2 input error, 3 numerical failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct DesignArgs {
    /// Design config (`key = value`); built-in defaults when omitted
    #[arg(long)]
    design: Option<PathBuf>,
    /// Fitted profile config; fitted from the design when omitted
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Requirement config; built-in defaults when omitted
    #[arg(long)]
    requirements: Option<PathBuf>,
    /// Multiply every design length by this factor
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PatternArg {
    Spiral,
    Raster,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StyleArg {
    Polyline,
    Dots,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the cone profile and report its linearity
    FitProfile {
        #[command(flatten)]
        design: DesignArgs,
        /// Number of fit samples
        #[arg(long, default_value_t = 6)]
        samples: usize,
        /// Where to write the profile config
        #[arg(long)]
        out: Option<PathBuf>,
        /// Residual curve CSV
        #[arg(long)]
        residuals: Option<PathBuf>,
    },
    /// Solve the tip deflection for a cam travel
    Solve {
        #[command(flatten)]
        design: DesignArgs,
        /// Cam travel (mm)
        #[arg(long)]
        travel: f64,
    },
    /// Simulate a scan and write the probe trajectory
    Simulate {
        #[command(flatten)]
        design: DesignArgs,
        /// Tip speed for the constant-speed cam program (mm/s)
        #[arg(long, default_value_t = 0.38)]
        speed: f64,
        /// Run a constant cam rate (rad/s) instead of constant tip speed
        #[arg(long)]
        cam_rate: Option<f64>,
        /// Cam rate ceiling near the centre (rad/s)
        #[arg(long, default_value_t = DEFAULT_OMEGA_CAP)]
        omega_cap: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a design against the requirements
    Check {
        #[command(flatten)]
        design: DesignArgs,
        /// Report CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cam and motor velocity program for constant tip speed
    MotorProfile {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long, default_value_t = 0.38)]
        speed: f64,
        #[arg(long, default_value_t = DEFAULT_OMEGA_CAP)]
        omega_cap: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan a commanded spiral or raster and report its coverage
    Plan {
        #[arg(long, value_enum, default_value = "spiral")]
        pattern: PatternArg,
        #[arg(long, default_value_t = 0.15)]
        pitch: f64,
        /// Spiral outer radius (mm)
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Raster width (mm)
        #[arg(long, default_value_t = 2.0)]
        width: f64,
        /// Raster height (mm)
        #[arg(long, default_value_t = 2.0)]
        height: f64,
        #[arg(long, default_value_t = 0.38)]
        speed: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// Scale of the mechanism the plan is for
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        requirements: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Position and velocity mismatch between two trajectories
    Compare {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        probe: PathBuf,
        /// Common grid step (s)
        #[arg(long, default_value_t = FRAME_INTERVAL)]
        dt: f64,
    },
    /// Fraction of ideal-spiral dots a trajectory passes through
    MatchRatio {
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long, default_value_t = 0.15)]
        pitch: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = DEFAULT_DOT_SPACING)]
        dot_spacing: f64,
        #[arg(long, default_value_t = DEFAULT_HALF_THICKNESS)]
        half_thickness: f64,
    },
    /// Plot trajectories as SVG
    Plot {
        /// Trajectory CSV (repeatable)
        #[arg(long = "input", required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "polyline")]
        style: StyleArg,
        /// Overlay ideal spiral dots with this pitch (mm)
        #[arg(long)]
        pitch: Option<f64>,
        /// Outer radius for the overlay (mm)
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Why a command stopped short of success.
#[derive(Debug)]
enum Failure {
    /// A report was produced but some checks failed.
    Checks,
    Err(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Err(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Err(e.into())
    }
}

type Outcome = Result<(), Failure>;

struct Loaded {
    design: DesignConfig,
    profile: ConicProfile,
    req: RequirementSpec,
}

fn load_requirements(path: Option<&Path>) -> Result<RequirementSpec, Error> {
    match path {
        Some(p) => requirements_from_config(&Config::load(p)?),
        None => Ok(RequirementSpec::default()),
    }
}

fn load_design(args: &DesignArgs) -> Result<DesignConfig, Error> {
    let mut design = match &args.design {
        Some(p) => DesignConfig::from_config(&Config::load(p)?)?,
        None => DesignConfig::default(),
    };
    if let Some(factor) = args.scale {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidInput(format!("--scale must be > 0, got {factor}")));
        }
        design.params = design.params.scaled(factor);
    }
    Ok(design)
}

fn load(args: &DesignArgs) -> Result<Loaded, Error> {
    let design = load_design(args)?;
    let profile = match &args.profile {
        Some(p) => profile_from_config(&Config::load(p)?)?,
        None => fit_profile(&generate_fit_samples(&design.params, 6)?)?,
    };
    let req = load_requirements(args.requirements.as_deref())?.at_scale(design.params.scale);
    Ok(Loaded {
        design,
        profile,
        req,
    })
}

fn fit_cmd(args: &DesignArgs, samples: usize, out: Option<&Path>, residuals: Option<&Path>) -> Outcome {
    let design = load_design(args)?;
    let params = design.params;
    let set = generate_fit_samples(&params, samples)?;
    let profile = fit_profile(&set)?;
    println!("samples (z, d, s, f) in mm:");
    for s in &set.samples {
        println!("  {:.6} {:.6} {:.6} {:.6}", s.z, s.d, s.s, s.f);
    }
    println!("A = {:.9} 1/mm", profile.a);
    println!("B = {:.9}", profile.b);
    println!("C = {:.9} mm", profile.c);
    println!("s_max = {:.6} mm, f_max = {:.6} mm", profile.s_max, profile.f_max);
    let lin = linearity_report(&profile, &params, 201)?;
    print!("{lin}");
    if let Some(path) = out {
        std::fs::write(path, profile_to_config(&profile).render(PROFILE_HEADER))?;
    }
    if let Some(path) = residuals {
        std::fs::write(path, lin.to_csv())?;
    }
    Ok(())
}

fn solve_cmd(args: &DesignArgs, travel: f64) -> Outcome {
    let l = load(args)?;
    let p = &l.design.params;
    let z = solve_deflection(travel, &l.profile, p)?;
    let pose = tip_pose(z, p)?;
    let c = contact_from_deflection(z, travel, p)?;
    println!("d = {travel} mm");
    println!("z = {z:.9} mm (linear law {:.9} mm)", p.gain() * travel);
    println!("cam angle = {:.4} deg", CamState::from_travel(travel, p).phi.to_degrees());
    println!("contact s = {:.9} mm, f = {:.9} mm", c.s, c.f);
    println!("contact residual = {:.3e} mm", contact_residual(z, travel, &l.profile, p)?);
    println!("tip height change = {:.6} mm", pose.height);
    println!("inclination = {:.4} deg", pose.inclination_deg);
    Ok(())
}

fn simulate_cmd(
    args: &DesignArgs,
    speed: f64,
    cam_rate: Option<f64>,
    omega_cap: f64,
    dt: f64,
    out: &Path,
) -> Outcome {
    let l = load(args)?;
    let p = &l.design.params;
    let program = match cam_rate {
        Some(rate) => {
            if !(rate > 0.0) {
                return Err(Error::InvalidInput(format!("--cam-rate must be > 0, got {rate}")).into());
            }
            let turns = p.max_travel() / p.eta;
            CamProgram::constant(rate, turns * std::f64::consts::TAU / rate, dt)?
        }
        None => constant_speed_cam_program(&l.profile, p, &l.req, speed, omega_cap, dt)?,
    };
    let traj = simulate_scan(&program, &l.profile, p, dt)?;
    save_trajectory(&traj, out)?;
    println!("samples = {}", traj.len());
    println!("cam turns = {:.4}", program.forward_angle() / std::f64::consts::TAU);
    println!("duration = {:.3} s", traj.duration());
    println!("final radius = {:.6} mm", traj.last().radius());
    println!("path length = {:.4} mm", traj.path_length());
    Ok(())
}

fn check_cmd(args: &DesignArgs, out: Option<&Path>) -> Outcome {
    let l = load(args)?;
    let report = validate_design_in_tube(&l.profile, &l.design.params, &l.req, l.design.tube_inner_radius)?;
    print!("{report}");
    if let Some(path) = out {
        std::fs::write(path, report.to_csv())?;
    }
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn motor_cmd(args: &DesignArgs, speed: f64, omega_cap: f64, dt: f64, out: &Path) -> Outcome {
    let l = load(args)?;
    let program = constant_speed_cam_program(&l.profile, &l.design.params, &l.req, speed, omega_cap, dt)?;
    write_cam_program(&program, std::fs::File::create(out)?)?;
    let rewind = program.rewind.expect("constant-speed programs include a rewind");
    println!("setpoints = {}", program.setpoints.len());
    println!("forward duration = {:.3} s", program.forward_duration());
    println!("forward cam turns = {:.4}", program.forward_angle() / std::f64::consts::TAU);
    println!("rewind = {:.3} s at {:.4} rad/s", rewind.duration, rewind.omega);
    println!("gear ratio motor/cam = {:.6}", program.gear_ratio_motor_per_cam);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn plan_cmd(
    pattern: PatternArg,
    pitch: f64,
    radius: f64,
    width: f64,
    height: f64,
    speed: f64,
    dt: f64,
    scale: f64,
    requirements: Option<&Path>,
    out: Option<&Path>,
) -> Outcome {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidInput(format!("--scale must be > 0, got {scale}")).into());
    }
    let req = load_requirements(requirements)?.at_scale(scale);
    let (plan, probe) = match pattern {
        PatternArg::Spiral => (plan_spiral(pitch, radius, speed, dt, &req)?, SpacingProbe::Radial),
        PatternArg::Raster => (
            plan_raster(pitch, width, height, speed, dt, &req)?,
            SpacingProbe::Columns,
        ),
    };
    if let Some(path) = out {
        save_trajectory(&plan.trajectory, path)?;
    }
    let cov = coverage_report_with(&plan.trajectory, FOV_HALF_MIN * scale, &req, probe);
    println!("duration = {:.3} s", plan.trajectory.duration());
    println!("path length = {:.4} mm", plan.trajectory.path_length());
    println!("covered radius = {:.4} mm", cov.radius);
    print!("{}", cov.checks);
    if cov.checks.all_pass() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn compare_cmd(image: &Path, probe: &Path, dt: f64) -> Outcome {
    let image = load_trajectory(image)?;
    let probe = load_trajectory(probe)?;
    let r = mismatch_on(&image, &probe, dt)?;
    println!("D = {} mm", r.d);
    println!("C = {} mm/s", r.c);
    println!("t_f = {} s over {} samples", r.t_f, r.n_samples);
    Ok(())
}

fn match_cmd(path: &Path, pitch: f64, radius: f64, dot_spacing: f64, half_thickness: f64) -> Outcome {
    let traj = load_trajectory(path)?;
    let r = match_ratio(&traj, pitch, radius, dot_spacing, half_thickness)?;
    println!("ratio = {:.4}", r.ratio);
    println!("matched = {}, outside = {}, beyond reach = {}", r.matched, r.mismatched, r.irrelevant);
    Ok(())
}

fn plot_cmd(inputs: &[PathBuf], style: StyleArg, pitch: Option<f64>, radius: f64, out: &Path) -> Outcome {
    let mut series = Vec::new();
    for path in inputs {
        let t = load_trajectory(path)?;
        series.push(Series::new(t.label.clone(), t.points()));
    }
    let style = match style {
        StyleArg::Polyline => PlotStyle::Polyline,
        StyleArg::Dots => PlotStyle::Dots,
    };
    if let Some(pitch) = pitch {
        if !(pitch > 0.0 && radius > 0.0) {
            return Err(Error::InvalidInput("overlay pitch and radius must be > 0".into()).into());
        }
        let dots = ideal_spiral_dots(pitch, radius, DEFAULT_DOT_SPACING);
        series.push(Series::new("ideal spiral", dots));
    }
    write_svg_plot(&series, style, out)?;
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::FitProfile {
            design,
            samples,
            out,
            residuals,
        } => fit_cmd(&design, samples, out.as_deref(), residuals.as_deref()),
        Command::Solve { design, travel } => solve_cmd(&design, travel),
        Command::Simulate {
            design,
            speed,
            cam_rate,
            omega_cap,
            dt,
            out,
        } => simulate_cmd(&design, speed, cam_rate, omega_cap, dt, &out),
        Command::Check { design, out } => check_cmd(&design, out.as_deref()),
        Command::MotorProfile {
            design,
            speed,
            omega_cap,
            dt,
            out,
        } => motor_cmd(&design, speed, omega_cap, dt, &out),
        Command::Plan {
            pattern,
            pitch,
            radius,
            width,
            height,
            speed,
            dt,
            scale,
            requirements,
            out,
        } => plan_cmd(
            pattern,
            pitch,
            radius,
            width,
            height,
            speed,
            dt,
            scale,
            requirements.as_deref(),
            out.as_deref(),
        ),
        Command::Compare { image, probe, dt } => compare_cmd(&image, &probe, dt),
        Command::MatchRatio {
            trajectory,
            pitch,
            radius,
            dot_spacing,
            half_thickness,
        } => match_cmd(&trajectory, pitch, radius, dot_spacing, half_thickness),
        Command::Plot {
            inputs,
            style,
            pitch,
            radius,
            out,
        } => plot_cmd(&inputs, style, pitch, radius, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Requirement => 1,
                ErrorKind::Input => 2,
                ErrorKind::Numerical => 3,
            })
        }
    }
}
