//! Forward kinematics: contact solve, tip position, and scan simulation.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{contact_from_deflection, DesignParams};
use crate::profile::ConicProfile;
use crate::roots::{bisect, BisectError};
use crate::trajectory::{Sample, Trajectory};

/// Bisection stops once the bracket is narrower than this (mm at unity scale).
pub const SOLVE_TOL: f64 = 1e-7;
pub const SOLVE_MAX_ITER: usize = 200;

/// Cam rotation together with the translation the screw gives it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CamState {
    pub phi: f64,
    pub d: f64,
}

impl CamState {
    pub fn from_phi(phi: f64, params: &DesignParams) -> Self {
        Self {
            phi,
            d: params.eta * phi / TAU,
        }
    }

    pub fn from_travel(d: f64, params: &DesignParams) -> Self {
        Self {
            phi: d * TAU / params.eta,
            d,
        }
    }
}

/// Profile height minus geometric height at the contact abscissa. Its zero
/// in `z` is the deflection the cam imposes at travel `d`.
pub fn contact_residual(z: f64, d: f64, profile: &ConicProfile, params: &DesignParams) -> Result<f64> {
    let c = contact_from_deflection(z, d, params)?;
    Ok(profile.value(c.s) - c.f)
}

/// Deflection imposed by cam travel `d`, bracketed on `[0, 1.2·Z]`.
pub fn solve_deflection(d: f64, profile: &ConicProfile, params: &DesignParams) -> Result<f64> {
    solve_deflection_within(d, profile, params, 1.2 * params.z_max, SOLVE_TOL * params.scale)
}

/// [`solve_deflection`] with an explicit bracket top and tolerance.
///
/// While the profile still sits above the cam tip at `z = 0` the cam has not
/// reached the face and the cone rests undeflected, so `0` is returned.
pub fn solve_deflection_within(
    d: f64,
    profile: &ConicProfile,
    params: &DesignParams,
    z_hi: f64,
    tol: f64,
) -> Result<f64> {
    if !(d.is_finite() && d >= 0.0) {
        return Err(Error::InvalidInput(format!("cam travel must be >= 0, got {d}")));
    }
    let g_lo = contact_residual(0.0, d, profile, params)?;
    if g_lo >= 0.0 {
        return Ok(0.0);
    }
    let z_hi = z_hi.min(params.r);
    let g = |z: f64| contact_residual(z, d, profile, params).unwrap_or(f64::NAN);
    bisect(g, 0.0, z_hi, tol, SOLVE_MAX_ITER).map_err(|e| match e {
        BisectError::NoSignChange { lo, hi, f_lo, f_hi } => Error::NoSignChange {
            d,
            z_lo: lo,
            z_hi: hi,
            g_lo: f_lo,
            g_hi: f_hi,
        },
        BisectError::NotConverged { iterations } => Error::NotConverged { d, iterations },
        BisectError::NotFinite { x } => {
            Error::Domain(format!("contact residual undefined at z = {x}, d = {d}"))
        }
    })
}

/// Rate of change of the solved deflection with cam travel, `dz/dd`, from
/// the implicit-function rule on the contact residual.
pub fn deflection_rate(z: f64, d: f64, profile: &ConicProfile, params: &DesignParams) -> Result<f64> {
    let h = 1e-6 * params.scale;
    let g = |z: f64, d: f64| contact_residual(z, d, profile, params);
    let z_lo = (z - h).max(0.0);
    let g_z = (g(z + h, d)? - g(z_lo, d)?) / (z + h - z_lo);
    let d_lo = (d - h).max(0.0);
    let g_d = (g(z, d + h)? - g(z, d_lo)?) / (d + h - d_lo);
    if g_z == 0.0 {
        return Err(Error::Domain(format!("contact residual flat in z at z = {z}, d = {d}")));
    }
    Ok(-g_d / g_z)
}

/// Planar tip position after a cumulative cam rotation `phi`. The tip moves
/// radially by the solved deflection in the direction the cam points.
pub fn tip_position(phi: f64, profile: &ConicProfile, params: &DesignParams) -> Result<(f64, f64)> {
    if !(phi.is_finite() && phi >= 0.0) {
        return Err(Error::InvalidInput(format!("cam angle must be >= 0, got {phi}")));
    }
    let z = solve_deflection(CamState::from_phi(phi, params).d, profile, params)?;
    Ok((z * phi.cos(), z * phi.sin()))
}

/// Motor turns per cam turn for the spur-gear pair.
pub const GEAR_RATIO_MOTOR_PER_CAM: f64 = 24.0 / 11.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CamSetpoint {
    pub t: f64,
    /// Cam angular velocity (rad/s).
    pub omega: f64,
}

/// Return stroke appended after the forward scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rewind {
    /// Index of the first rewind setpoint.
    pub start_index: usize,
    /// Time from the last forward setpoint to the final (stopped) setpoint.
    pub duration: f64,
    /// Constant cam velocity held during the return (negative).
    pub omega: f64,
}

/// Cam angular-velocity schedule, linearly interpolated between setpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct CamProgram {
    pub setpoints: Vec<CamSetpoint>,
    pub gear_ratio_motor_per_cam: f64,
    pub rewind: Option<Rewind>,
}

impl CamProgram {
    pub fn new(setpoints: Vec<CamSetpoint>) -> Result<Self> {
        let p = Self {
            setpoints,
            gear_ratio_motor_per_cam: GEAR_RATIO_MOTOR_PER_CAM,
            rewind: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Constant cam velocity for `duration`, with setpoints every `dt`.
    pub fn constant(omega: f64, duration: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "need dt > 0 and finite duration > 0 (dt = {dt}, duration = {duration})"
            )));
        }
        let n = (duration / dt).ceil() as usize;
        let mut setpoints: Vec<CamSetpoint> = (0..n)
            .map(|i| CamSetpoint { t: i as f64 * dt, omega })
            .collect();
        setpoints.push(CamSetpoint { t: duration, omega });
        if setpoints.len() >= 2 && setpoints[setpoints.len() - 2].t >= duration {
            setpoints.remove(setpoints.len() - 2);
        }
        Self::new(setpoints)
    }

    pub fn validate(&self) -> Result<()> {
        if self.setpoints.len() < 2 {
            return Err(Error::InvalidInput("cam program needs at least 2 setpoints".into()));
        }
        for (i, s) in self.setpoints.iter().enumerate() {
            if !(s.t.is_finite() && s.omega.is_finite()) {
                return Err(Error::InvalidInput(format!("setpoint {i} is not finite")));
            }
        }
        if let Some(i) = self.setpoints.windows(2).position(|w| w[1].t <= w[0].t) {
            return Err(Error::InvalidInput(format!(
                "setpoint times not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some(s) = self.forward().iter().find(|s| s.omega < 0.0) {
            return Err(Error::InvalidInput(format!(
                "negative forward cam velocity {} at t = {}",
                s.omega, s.t
            )));
        }
        Ok(())
    }

    /// Setpoints of the imaging phase (everything before the rewind).
    pub fn forward(&self) -> &[CamSetpoint] {
        match self.rewind {
            Some(r) => &self.setpoints[..r.start_index],
            None => &self.setpoints,
        }
    }

    pub fn forward_duration(&self) -> f64 {
        let f = self.forward();
        f[f.len() - 1].t - f[0].t
    }

    pub fn motor_omega(&self, index: usize) -> f64 {
        self.setpoints[index].omega * self.gear_ratio_motor_per_cam
    }

    /// Cumulative cam angle at each setpoint (trapezoidal, exact for the
    /// piecewise-linear velocity).
    pub fn cumulative_angles(&self) -> Vec<f64> {
        let mut phi = Vec::with_capacity(self.setpoints.len());
        let mut acc = 0.0;
        phi.push(acc);
        for w in self.setpoints.windows(2) {
            acc += 0.5 * (w[0].omega + w[1].omega) * (w[1].t - w[0].t);
            phi.push(acc);
        }
        phi
    }

    /// Cam angle at the end of the forward phase.
    pub fn forward_angle(&self) -> f64 {
        self.cumulative_angles()[self.forward().len() - 1]
    }

    /// Cam angle after the whole program, rewind included.
    pub fn net_angle(&self) -> f64 {
        *self.cumulative_angles().last().unwrap()
    }
}

/// Cam angle reached at time `t` under piecewise-linear velocity, given the
/// cumulative angles at the setpoints.
fn angle_at(setpoints: &[CamSetpoint], cumulative: &[f64], t: f64) -> f64 {
    let i = match setpoints.partition_point(|s| s.t <= t) {
        0 => 0,
        n => (n - 1).min(setpoints.len() - 2),
    };
    let (a, b) = (setpoints[i], setpoints[i + 1]);
    let h = b.t - a.t;
    let tau = t - a.t;
    cumulative[i] + a.omega * tau + 0.5 * (b.omega - a.omega) * tau * tau / h
}

/// Probe trajectory produced by the forward phase of `program`, sampled
/// every `dt` from the first setpoint, with a final sample at the end of
/// the forward phase.
pub fn simulate_scan(
    program: &CamProgram,
    profile: &ConicProfile,
    params: &DesignParams,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput(format!("dt must be > 0, got {dt}")));
    }
    program.validate()?;
    let forward = program.forward();
    let cumulative = program.cumulative_angles();
    let t0 = forward[0].t;
    let t_end = forward[forward.len() - 1].t;

    let n = ((t_end - t0) / dt).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|i| t0 + i as f64 * dt).collect();
    if t_end - times[times.len() - 1] > 1e-9 * dt {
        times.push(t_end);
    } else {
        *times.last_mut().unwrap() = t_end;
    }

    let mut samples = Vec::with_capacity(times.len());
    for t in times {
        let phi = angle_at(forward, &cumulative, t);
        // a schedule that starts and stops at rest can round below zero
        let phi = if phi < 0.0 && phi > -1e-9 { 0.0 } else { phi };
        let (x, y) = tip_position(phi, profile, params).map_err(|e| Error::AtTime {
            t,
            source: Box::new(e),
        })?;
        samples.push(Sample::new(t, x, y));
    }
    Ok(Trajectory::new(samples, "probe")?.with_scale(params.scale))
}
