//! Scan quality metrics: position and velocity mismatch between an image
//! trajectory and a probe trajectory, the ideal-spiral match ratio, and a
//! toy stick-slip model that derives an image path from a probe path.

use std::f64::consts::{FRAC_PI_6, TAU};

use crate::error::{Error, Result};
use crate::trajectory::{Sample, Trajectory};

/// Default common-grid step: one imaging frame at 12 frames/s.
pub const FRAME_INTERVAL: f64 = 1.0 / 12.0;

/// Times `t0, t0 + step, ...` not exceeding `t1` (up to rounding).
pub fn uniform_grid(t0: f64, t1: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || t1 < t0 {
        return Vec::new();
    }
    let n = ((t1 - t0) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| t0 + i as f64 * step).collect()
}

/// Linear interpolation of `traj` at the given times.
pub fn resample(traj: &Trajectory, grid: &[f64]) -> Result<Trajectory> {
    let s = traj.samples();
    let (t0, t1) = (traj.start_time(), traj.end_time());
    let slack = 1e-9 * (t1 - t0).abs().max(1.0);
    let mut out = Vec::with_capacity(grid.len());
    for &t in grid {
        if !(t >= t0 - slack && t <= t1 + slack) {
            return Err(Error::InvalidInput(format!(
                "resample time {t} outside trajectory span [{t0}, {t1}]"
            )));
        }
        let i = s.partition_point(|p| p.t <= t);
        let p = if i == 0 {
            Sample::new(t, s[0].x, s[0].y)
        } else if i == s.len() {
            let last = s[s.len() - 1];
            Sample::new(t, last.x, last.y)
        } else {
            let (a, b) = (s[i - 1], s[i]);
            if t == a.t {
                Sample::new(t, a.x, a.y)
            } else {
                let u = (t - a.t) / (b.t - a.t);
                Sample::new(t, a.x + u * (b.x - a.x), a.y + u * (b.y - a.y))
            }
        };
        out.push(p);
    }
    let mut r = Trajectory::new(out, traj.label.clone())?;
    r.scale = traj.scale;
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchReport {
    /// Time-averaged position mismatch (mm).
    pub d: f64,
    /// Time-averaged velocity mismatch (mm/s).
    pub c: f64,
    /// Length of the common time span (s).
    pub t_f: f64,
    pub n_samples: usize,
}

/// Both trajectories resampled on a shared uniform grid over their overlap.
fn common_grid(a: &Trajectory, b: &Trajectory, step: f64) -> Result<(Vec<Sample>, Vec<Sample>)> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidInput(format!("grid step must be > 0, got {step}")));
    }
    let t0 = a.start_time().max(b.start_time());
    let t1 = a.end_time().min(b.end_time());
    let grid = uniform_grid(t0, t1, step);
    if grid.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "trajectories overlap on [{t0}, {t1}], too short for step {step}"
        )));
    }
    let ra = resample(a, &grid)?;
    let rb = resample(b, &grid)?;
    Ok((ra.samples().to_vec(), rb.samples().to_vec()))
}

/// Trapezoidal time average of `values` sampled every `step`.
fn time_average(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    let inner: f64 = values[1..n - 1].iter().sum();
    let integral = step * (0.5 * (values[0] + values[n - 1]) + inner);
    integral / (step * (n - 1) as f64)
}

/// Central differences inside, one-sided at the ends.
fn velocities(s: &[Sample], step: f64) -> Vec<(f64, f64)> {
    let n = s.len();
    (0..n)
        .map(|i| {
            let (a, b, h) = match i {
                0 => (s[0], s[1], step),
                _ if i == n - 1 => (s[n - 2], s[n - 1], step),
                _ => (s[i - 1], s[i + 1], 2.0 * step),
            };
            ((b.x - a.x) / h, (b.y - a.y) / h)
        })
        .collect()
}

/// Position mismatch on the default frame grid.
pub fn mismatch_d(image: &Trajectory, probe: &Trajectory) -> Result<f64> {
    mismatch_d_on(image, probe, FRAME_INTERVAL)
}

pub fn mismatch_d_on(image: &Trajectory, probe: &Trajectory, step: f64) -> Result<f64> {
    let (a, b) = common_grid(image, probe, step)?;
    let dist: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p.distance_to(q)).collect();
    Ok(time_average(&dist, step))
}

/// Velocity mismatch on the default frame grid.
pub fn mismatch_c(image: &Trajectory, probe: &Trajectory) -> Result<f64> {
    mismatch_c_on(image, probe, FRAME_INTERVAL)
}

pub fn mismatch_c_on(image: &Trajectory, probe: &Trajectory, step: f64) -> Result<f64> {
    let (a, b) = common_grid(image, probe, step)?;
    if a.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "velocity mismatch needs at least 3 grid samples, got {}",
            a.len()
        )));
    }
    let va = velocities(&a, step);
    let vb = velocities(&b, step);
    let diff: Vec<f64> = va
        .iter()
        .zip(&vb)
        .map(|(p, q)| (p.0 - q.0).hypot(p.1 - q.1))
        .collect();
    Ok(time_average(&diff, step))
}

pub fn mismatch(image: &Trajectory, probe: &Trajectory) -> Result<MismatchReport> {
    mismatch_on(image, probe, FRAME_INTERVAL)
}

pub fn mismatch_on(image: &Trajectory, probe: &Trajectory, step: f64) -> Result<MismatchReport> {
    let (a, _) = common_grid(image, probe, step)?;
    Ok(MismatchReport {
        d: mismatch_d_on(image, probe, step)?,
        c: mismatch_c_on(image, probe, step)?,
        t_f: a[a.len() - 1].t - a[0].t,
        n_samples: a.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchRatioReport {
    pub ratio: f64,
    pub matched: usize,
    pub mismatched: usize,
    pub irrelevant: usize,
    pub half_thickness: f64,
}

pub const DEFAULT_DOT_SPACING: f64 = 0.05;
pub const DEFAULT_HALF_THICKNESS: f64 = 0.015;

/// Points of `ρ = (pitch/2π)·φ` spaced `dot_spacing` apart in arc length,
/// from the centre out to `outer_radius`.
pub fn ideal_spiral_dots(pitch: f64, outer_radius: f64, dot_spacing: f64) -> Vec<(f64, f64)> {
    let c = pitch / TAU;
    let arc = |phi: f64| 0.5 * c * (phi * (1.0 + phi * phi).sqrt() + phi.asinh());
    let phi_end = outer_radius / c;
    let total = arc(phi_end);
    let n = (total / dot_spacing + 1e-9).floor() as usize;
    let mut dots = Vec::with_capacity(n + 1);
    let mut phi = 0.0f64;
    for j in 0..=n {
        let s = j as f64 * dot_spacing;
        for _ in 0..100 {
            let step = (arc(phi) - s) / (c * (1.0 + phi * phi).sqrt());
            phi = (phi - step).max(0.0);
            if step.abs() <= 1e-15 * phi.max(1.0) {
                break;
            }
        }
        dots.push((c * phi * phi.cos(), c * phi * phi.sin()));
    }
    dots
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let u = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p.0 - a.0 - u * dx).hypot(p.1 - a.1 - u * dy)
}

/// Fraction of ideal-spiral dots lying within `half_thickness` of the
/// trajectory polyline. Dots farther from the centre than the trajectory
/// ever reaches (plus the tolerance) are left out of the count.
pub fn match_ratio(
    traj: &Trajectory,
    pitch: f64,
    outer_radius: f64,
    dot_spacing: f64,
    half_thickness: f64,
) -> Result<MatchRatioReport> {
    for (name, v) in [
        ("pitch", pitch),
        ("outer radius", outer_radius),
        ("dot spacing", dot_spacing),
        ("half thickness", half_thickness),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidInput(format!("{name} must be > 0, got {v}")));
        }
    }
    if traj.len() < 2 {
        return Err(Error::InvalidInput("match ratio needs at least 2 trajectory samples".into()));
    }
    let pts = traj.points();
    let reach = traj.max_radius() + half_thickness;

    // bucket segments by bounding box so each dot only checks nearby ones
    let cell = (4.0 * half_thickness).max(1e-6);
    let key = |v: f64| (v / cell).floor() as i64;
    let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> = Default::default();
    for (i, w) in pts.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        for gx in key(a.0.min(b.0) - half_thickness)..=key(a.0.max(b.0) + half_thickness) {
            for gy in key(a.1.min(b.1) - half_thickness)..=key(a.1.max(b.1) + half_thickness) {
                grid.entry((gx, gy)).or_default().push(i);
            }
        }
    }

    let (mut matched, mut mismatched, mut irrelevant) = (0, 0, 0);
    for dot in ideal_spiral_dots(pitch, outer_radius, dot_spacing) {
        if dot.0.hypot(dot.1) > reach {
            irrelevant += 1;
            continue;
        }
        let hit = grid.get(&(key(dot.0), key(dot.1))).is_some_and(|segs| {
            segs.iter()
                .any(|&i| point_segment_distance(dot, pts[i], pts[i + 1]) <= half_thickness)
        });
        if hit {
            matched += 1;
        } else {
            mismatched += 1;
        }
    }
    let counted = matched + mismatched;
    Ok(MatchRatioReport {
        ratio: if counted > 0 { matched as f64 / counted as f64 } else { 0.0 },
        matched,
        mismatched,
        irrelevant,
        half_thickness,
    })
}

/// Parameters of the stick-slip image model.
///
/// The imaged tissue point holds still while the probe stays within
/// `stick_radius` of where it grabbed, then drags along at that distance,
/// relaxing toward a creeping offset over `lag_time`. A sharp change in
/// probe heading re-grabs the tissue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DragSurrogateParams {
    /// Dead-zone radius (mm).
    pub stick_radius: f64,
    /// Relaxation time constant while slipping (s).
    pub lag_time: f64,
    /// Fraction of the dead zone kept as steady-state lag while slipping.
    pub creep_gain: f64,
}

impl Default for DragSurrogateParams {
    fn default() -> Self {
        Self {
            stick_radius: 0.05,
            lag_time: 0.5,
            creep_gain: 0.5,
        }
    }
}

impl DragSurrogateParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.stick_radius.is_finite() && self.stick_radius >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "stick radius must be >= 0, got {}",
                self.stick_radius
            )));
        }
        if !(self.lag_time.is_finite() && self.lag_time > 0.0) {
            return Err(Error::InvalidInput(format!("lag time must be > 0, got {}", self.lag_time)));
        }
        if !(0.0..=1.0).contains(&self.creep_gain) {
            return Err(Error::InvalidInput(format!(
                "creep gain must lie in [0, 1], got {}",
                self.creep_gain
            )));
        }
        Ok(())
    }
}

/// Heading change between successive probe steps that counts as a sharp turn.
pub const SHARP_TURN: f64 = FRAC_PI_6;

/// Image trajectory produced by dragging tissue with the probe.
pub fn apply_drag_surrogate(probe: &Trajectory, p: &DragSurrogateParams) -> Trajectory {
    let s = probe.samples();
    let delta = p.stick_radius;
    let mut out = Vec::with_capacity(s.len());
    let mut image = (s[0].x, s[0].y);
    let mut stuck = true;
    // probe minus image, and the offset it relaxes toward while slipping
    let mut offset = (0.0, 0.0);
    let mut creep = (0.0, 0.0);
    let mut heading: Option<f64> = None;
    out.push(Sample::new(s[0].t, image.0, image.1));

    for w in s.windows(2) {
        let (prev, cur) = (w[0], w[1]);
        let (dx, dy) = (cur.x - prev.x, cur.y - prev.y);
        if dx != 0.0 || dy != 0.0 {
            let h = dy.atan2(dx);
            if let Some(old) = heading {
                let turn = (h - old + TAU * 1.5).rem_euclid(TAU) - TAU * 0.5;
                if turn.abs() > SHARP_TURN {
                    stuck = true;
                }
            }
            heading = Some(h);
        }

        if stuck {
            offset = (cur.x - image.0, cur.y - image.1);
            let dist = offset.0.hypot(offset.1);
            if dist > delta {
                stuck = false;
                let u = (offset.0 / dist, offset.1 / dist);
                offset = (delta * u.0, delta * u.1);
                creep = (p.creep_gain * offset.0, p.creep_gain * offset.1);
                image = (cur.x - offset.0, cur.y - offset.1);
            }
        } else {
            let keep = (-(cur.t - prev.t) / p.lag_time).exp();
            offset = (
                creep.0 + keep * (offset.0 - creep.0),
                creep.1 + keep * (offset.1 - creep.1),
            );
            image = (cur.x - offset.0, cur.y - offset.1);
        }
        out.push(Sample::new(cur.t, image.0, image.1));
    }
    let mut t = Trajectory::new(out, "image").expect("probe times are valid");
    t.scale = probe.scale;
    t
}
