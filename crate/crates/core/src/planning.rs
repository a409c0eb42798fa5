//! Commanded scan paths and cam velocity programs.
//!
//! Requirement limits are compared exactly as passed in. For a scaled
//! mechanism pass `RequirementSpec::at_scale(scale)`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{DesignParams, RequirementSpec};
use crate::kinematics::{
    deflection_rate, solve_deflection_within, CamProgram, CamSetpoint, CamState, Rewind,
    GEAR_RATIO_MOTOR_PER_CAM,
};
use crate::profile::ConicProfile;
use crate::report::{Bound, ConstraintReport};
use crate::trajectory::{Sample, Trajectory};

/// Time allotted to returning the cam to its start angle (s).
pub const REWIND_DURATION: f64 = 8.0;
/// Default ceiling on cam angular velocity near the scan centre (rad/s).
pub const DEFAULT_OMEGA_CAP: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pattern {
    Spiral,
    Raster { strokes: usize, width: f64, height: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPlan {
    pub pattern: Pattern,
    pub pitch: f64,
    /// Spiral outer radius, or half the larger raster side.
    pub extent: f64,
    pub tip_speed: f64,
    pub trajectory: Trajectory,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be > 0, got {v}")))
    }
}

fn check_limits(pitch: f64, tip_speed: f64, req: &RequirementSpec) -> Result<()> {
    if tip_speed > req.max_tip_speed {
        return Err(Error::Requirement {
            what: "tip speed",
            value: tip_speed,
            limit: req.max_tip_speed,
        });
    }
    if pitch > req.max_pitch {
        return Err(Error::Requirement {
            what: "pitch",
            value: pitch,
            limit: req.max_pitch,
        });
    }
    Ok(())
}

/// Arc length of `ρ = c·φ` from the centre out to angle `phi`.
pub fn spiral_arc_length(c: f64, phi: f64) -> f64 {
    0.5 * c * (phi * (1.0 + phi * phi).sqrt() + phi.asinh())
}

/// Angle at which the spiral `ρ = c·φ` has arc length `s`, by Newton
/// iteration from `guess`.
fn spiral_angle_for_length(c: f64, s: f64, guess: f64) -> f64 {
    let mut phi = guess.max(0.0);
    for _ in 0..100 {
        let step = (spiral_arc_length(c, phi) - s) / (c * (1.0 + phi * phi).sqrt());
        phi = (phi - step).max(0.0);
        if step.abs() <= 1e-15 * phi.max(1.0) {
            break;
        }
    }
    phi
}

/// Archimedean spiral `ρ = (pitch/2π)·φ` from the centre to `outer_radius`
/// at constant path speed.
pub fn plan_spiral(
    pitch: f64,
    outer_radius: f64,
    tip_speed: f64,
    dt: f64,
    req: &RequirementSpec,
) -> Result<ScanPlan> {
    for (name, v) in [
        ("pitch", pitch),
        ("outer radius", outer_radius),
        ("tip speed", tip_speed),
        ("dt", dt),
    ] {
        check_positive(name, v)?;
    }
    check_limits(pitch, tip_speed, req)?;

    let c = pitch / TAU;
    let phi_end = outer_radius / c;
    let total = spiral_arc_length(c, phi_end);
    let t_end = total / tip_speed;
    let n = (t_end / dt).floor() as usize;

    let mut samples = Vec::with_capacity(n + 2);
    let mut phi = 0.0;
    for i in 0..=n {
        let t = i as f64 * dt;
        if t_end - t <= 1e-9 * dt {
            break;
        }
        phi = spiral_angle_for_length(c, tip_speed * t, phi);
        let rho = c * phi;
        samples.push(Sample::new(t, rho * phi.cos(), rho * phi.sin()));
    }
    samples.push(Sample::new(
        t_end,
        outer_radius * phi_end.cos(),
        outer_radius * phi_end.sin(),
    ));
    Ok(ScanPlan {
        pattern: Pattern::Spiral,
        pitch,
        extent: outer_radius,
        tip_speed,
        trajectory: Trajectory::new(samples, "commanded spiral")?,
    })
}

/// Boustrophedon raster centred on the origin: strokes along x of length
/// `width`, stepped by `line_pitch` in y (the last step is shortened to
/// land on the far edge).
pub fn plan_raster(
    line_pitch: f64,
    width: f64,
    height: f64,
    tip_speed: f64,
    dt: f64,
    req: &RequirementSpec,
) -> Result<ScanPlan> {
    for (name, v) in [
        ("line pitch", line_pitch),
        ("width", width),
        ("height", height),
        ("tip speed", tip_speed),
        ("dt", dt),
    ] {
        check_positive(name, v)?;
    }
    check_limits(line_pitch, tip_speed, req)?;

    let steps = ((height / line_pitch) - 1e-9).ceil().max(0.0) as usize;
    let strokes = steps + 1;
    let (x0, y0) = (-0.5 * width, -0.5 * height);
    let mut vertices = Vec::with_capacity(2 * strokes);
    for j in 0..strokes {
        let y = y0 + (j as f64 * line_pitch).min(height);
        let (a, b) = if j % 2 == 0 { (x0, x0 + width) } else { (x0 + width, x0) };
        vertices.push((a, y));
        vertices.push((b, y));
    }

    let trajectory = sample_polyline(&vertices, tip_speed, dt, "commanded raster")?;
    Ok(ScanPlan {
        pattern: Pattern::Raster { strokes, width, height },
        pitch: line_pitch,
        extent: 0.5 * width.max(height),
        tip_speed,
        trajectory,
    })
}

/// Walks a polyline at constant speed, sampling every `dt` and at the end.
fn sample_polyline(vertices: &[(f64, f64)], speed: f64, dt: f64, label: &str) -> Result<Trajectory> {
    let mut cumulative = Vec::with_capacity(vertices.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for w in vertices.windows(2) {
        acc += (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1);
        cumulative.push(acc);
    }
    let t_end = acc / speed;
    let n = (t_end / dt).floor() as usize;
    let mut samples = Vec::with_capacity(n + 2);
    let mut seg = 0;
    for i in 0..=n {
        let t = i as f64 * dt;
        if t_end - t <= 1e-9 * dt {
            break;
        }
        let s = speed * t;
        while seg + 2 < cumulative.len() && cumulative[seg + 1] < s {
            seg += 1;
        }
        let len = cumulative[seg + 1] - cumulative[seg];
        let u = if len > 0.0 { (s - cumulative[seg]) / len } else { 0.0 };
        let (a, b) = (vertices[seg], vertices[seg + 1]);
        samples.push(Sample::new(t, a.0 + u * (b.0 - a.0), a.1 + u * (b.1 - a.1)));
    }
    let last = vertices[vertices.len() - 1];
    samples.push(Sample::new(t_end, last.0, last.1));
    Trajectory::new(samples, label)
}

/// Speed of the tip per unit cam angle, `|dP/dφ|`, and the deflection there.
fn tip_path_rate(phi: f64, profile: &ConicProfile, params: &DesignParams) -> Result<(f64, f64)> {
    let d = CamState::from_phi(phi, params).d;
    let z = solve_deflection_within(d, profile, params, 1.2 * params.z_max, 1e-12 * params.scale)?;
    if z == 0.0 {
        return Ok((0.0, 0.0));
    }
    let dz_dphi = params.eta / TAU * deflection_rate(z, d, profile, params)?;
    Ok((z.hypot(dz_dphi), z))
}

/// Cam velocity schedule that holds the tip at `tip_speed` along the
/// spiral, capped at `omega_cap` near the centre, followed by a rewind.
///
/// Setpoints are spaced `dt` apart; each new velocity is chosen so that the
/// trapezoidal angle update lands where that velocity gives `tip_speed`.
/// The forward phase stops once the deflection reaches `Z`.
pub fn constant_speed_cam_program(
    profile: &ConicProfile,
    params: &DesignParams,
    req: &RequirementSpec,
    tip_speed: f64,
    omega_cap: f64,
    dt: f64,
) -> Result<CamProgram> {
    check_positive("tip speed", tip_speed)?;
    check_positive("omega cap", omega_cap)?;
    check_positive("dt", dt)?;
    if dt >= 0.5 * REWIND_DURATION {
        return Err(Error::InvalidInput(format!("dt = {dt} s too coarse for the rewind")));
    }
    if tip_speed > req.max_tip_speed {
        return Err(Error::Requirement {
            what: "tip speed",
            value: tip_speed,
            limit: req.max_tip_speed,
        });
    }

    let omega_for = |phi: f64| -> Result<(f64, f64)> {
        let (rate, z) = tip_path_rate(phi, profile, params)?;
        let omega = if rate > 0.0 { (tip_speed / rate).min(omega_cap) } else { omega_cap };
        Ok((omega, z))
    };

    let mut phi = 0.0;
    let (mut omega, mut z) = omega_for(phi)?;
    let mut setpoints = vec![CamSetpoint { t: 0.0, omega }];
    let mut step = 0usize;
    while z < params.z_max {
        step += 1;
        let t = step as f64 * dt;
        if t > req.max_duration {
            return Err(Error::Requirement {
                what: "forward scan duration",
                value: t,
                limit: req.max_duration,
            });
        }
        // fixed-point iteration on the implicit trapezoid step
        let mut next = omega;
        for _ in 0..4 {
            let phi_next = phi + 0.5 * (omega + next) * dt;
            next = omega_for(phi_next)
                .map_err(|e| Error::AtTime {
                    t,
                    source: Box::new(e),
                })?
                .0;
        }
        phi += 0.5 * (omega + next) * dt;
        omega = next;
        z = omega_for(phi)?.1;
        setpoints.push(CamSetpoint { t, omega });
    }

    // hold a constant return velocity, ramping in and out over one step each
    let start_index = setpoints.len();
    let t_f = setpoints[start_index - 1].t;
    let hold = REWIND_DURATION - 2.0 * dt;
    let omega_back = -(phi + 0.5 * omega * dt) / (hold + dt);
    setpoints.push(CamSetpoint { t: t_f + dt, omega: omega_back });
    setpoints.push(CamSetpoint { t: t_f + dt + hold, omega: omega_back });
    setpoints.push(CamSetpoint { t: t_f + REWIND_DURATION, omega: 0.0 });

    let program = CamProgram {
        setpoints,
        gear_ratio_motor_per_cam: GEAR_RATIO_MOTOR_PER_CAM,
        rewind: Some(Rewind {
            start_index,
            duration: REWIND_DURATION,
            omega: omega_back,
        }),
    };
    program.validate()?;
    Ok(program)
}

/// How adjacent-line spacing is measured for a coverage report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpacingProbe {
    /// Crossings along rays from the origin (spirals).
    Radial,
    /// Crossings along vertical lines through the path (rasters).
    Columns,
}

/// Coverage figures and their pass/fail checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub radius: f64,
    pub area: f64,
    pub max_spacing: f64,
    pub checks: ConstraintReport,
}

const PROBE_COUNT: usize = 72;

/// Coverage of a spiral-like trajectory, measuring spacing along rays.
pub fn coverage_report(traj: &Trajectory, fov_halfmin: f64, req: &RequirementSpec) -> CoverageReport {
    coverage_report_with(traj, fov_halfmin, req, SpacingProbe::Radial)
}

pub fn coverage_report_with(
    traj: &Trajectory,
    fov_halfmin: f64,
    req: &RequirementSpec,
    probe: SpacingProbe,
) -> CoverageReport {
    let radius = traj.max_radius() + fov_halfmin;
    let area = PI * radius * radius;
    let max_spacing = match probe {
        SpacingProbe::Radial => radial_spacing(traj),
        SpacingProbe::Columns => column_spacing(traj),
    };
    let mut checks = ConstraintReport::default();
    checks.push("covered area", area, Bound::AtLeast, req.min_area, "mm2");
    checks.push("line spacing", max_spacing, Bound::AtMost, req.max_pitch, "mm");
    CoverageReport {
        radius,
        area,
        max_spacing,
        checks,
    }
}

fn max_gap(mut positions: Vec<f64>) -> f64 {
    positions.sort_by(f64::total_cmp);
    positions.windows(2).fold(0.0, |m, w| m.max(w[1] - w[0]))
}

/// Largest gap between consecutive crossings of the path along rays from
/// the origin, taken over evenly spaced ray directions.
fn radial_spacing(traj: &Trajectory) -> f64 {
    let pts = traj.points();
    let mut worst = 0.0f64;
    for k in 0..PROBE_COUNT {
        // offset so that no ray runs along an axis-aligned segment
        let angle = TAU * (k as f64 + 0.5) / PROBE_COUNT as f64;
        let (ux, uy) = (angle.cos(), angle.sin());
        let mut hits = Vec::new();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            // side of the ray line for each endpoint
            let ca = ux * a.1 - uy * a.0;
            let cb = ux * b.1 - uy * b.0;
            if (ca > 0.0) == (cb > 0.0) || ca == cb {
                continue;
            }
            let u = ca / (ca - cb);
            let (x, y) = (a.0 + u * (b.0 - a.0), a.1 + u * (b.1 - a.1));
            let along = x * ux + y * uy;
            if along > 0.0 {
                hits.push(along);
            }
        }
        worst = worst.max(max_gap(hits));
    }
    worst
}

/// Largest gap between consecutive crossings along vertical lines spread
/// across the path's x extent.
fn column_spacing(traj: &Trajectory) -> f64 {
    let pts = traj.points();
    let (lo, hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    if hi <= lo {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for k in 0..PROBE_COUNT {
        let x = lo + (hi - lo) * (k as f64 + 0.5) / PROBE_COUNT as f64;
        let mut hits = Vec::new();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if (a.0 > x) == (b.0 > x) {
                continue;
            }
            let u = (x - a.0) / (b.0 - a.0);
            hits.push(a.1 + u * (b.1 - a.1));
        }
        worst = worst.max(max_gap(hits));
    }
    worst
}
