//! Quadratic cone-face profile: sampling, least-squares fit, and the design
//! checks run against a fitted profile.
//!
//! The face of the cone is described in its own frame by `f'(s) = A s² + B s + C`.
//! Choosing the coefficients so that the contact condition reproduces the
//! linear law `z = (α/η)·d` turns the helical cam motion into an
//! Archimedean spiral at the probe tip.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{
    contact_from_deflection, radial_margin_in_tube, target_deflection, tip_pose, DesignParams,
    RequirementSpec, TUBE_INNER_RADIUS,
};
use crate::kinematics::{solve_deflection_within, SOLVE_TOL};
use crate::report::{Bound, ConstraintReport};
use crate::roots::bisect;

/// Quadratic profile of the cone face with its validity range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicProfile {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Largest contact abscissa the profile is meant for.
    pub s_max: f64,
    /// Profile height at `s_max` (the face extent `m`).
    pub f_max: f64,
}

/// A profile value together with whether it came from outside `[0, s_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValue {
    pub value: f64,
    pub extrapolated: bool,
}

impl ConicProfile {
    /// Builds a profile valid on `[0, s_max]`, computing `f_max`.
    pub fn new(a: f64, b: f64, c: f64, s_max: f64) -> Self {
        let mut p = Self {
            a,
            b,
            c,
            s_max,
            f_max: 0.0,
        };
        p.f_max = p.value(s_max);
        p
    }

    #[inline]
    pub fn value(&self, s: f64) -> f64 {
        (self.a * s + self.b) * s + self.c
    }

    pub fn evaluate(&self, s: f64) -> ProfileValue {
        ProfileValue {
            value: self.value(s),
            extrapolated: !(0.0..=self.s_max).contains(&s),
        }
    }

    pub fn slope(&self, s: f64) -> f64 {
        2.0 * self.a * s + self.b
    }

    /// Checks that the profile is finite and non-decreasing on `[0, s_max]`.
    pub fn validate(&self) -> Result<()> {
        if ![self.a, self.b, self.c, self.s_max, self.f_max]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::InvalidInput("profile has non-finite fields".into()));
        }
        if self.s_max <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "profile s_max must be > 0, got {}",
                self.s_max
            )));
        }
        // slope is linear in s: checking both ends covers the interval
        let worst = self.slope(0.0).min(self.slope(self.s_max));
        if worst < 0.0 {
            return Err(Error::InvalidInput(format!(
                "profile decreases on [0, {}] (min slope {worst})",
                self.s_max
            )));
        }
        Ok(())
    }

    /// Coefficients of the same curve drawn `factor` times larger.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            a: self.a / factor,
            b: self.b,
            c: self.c * factor,
            s_max: self.s_max * factor,
            f_max: self.f_max * factor,
        }
    }
}

/// Free function form of [`ConicProfile::evaluate`].
pub fn profile_eval(s: f64, profile: &ConicProfile) -> ProfileValue {
    profile.evaluate(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitSample {
    pub z: f64,
    pub d: f64,
    pub s: f64,
    pub f: f64,
}

/// Geometric samples on the linear law used to fit a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSampleSet {
    pub params: DesignParams,
    pub samples: Vec<FitSample>,
}

impl FitSampleSet {
    /// Samples at arbitrary deflections, each paired with the travel the
    /// linear law assigns to it.
    pub fn at_deflections(params: &DesignParams, zs: &[f64]) -> Result<Self> {
        let samples = zs
            .iter()
            .map(|&z| {
                let d = params.travel_for(z);
                let c = contact_from_deflection(z, d, params)?;
                Ok(FitSample { z, d, s: c.s, f: c.f })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: *params,
            samples,
        })
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }
}

/// `n` samples with `z_i = i·Z/n`, `i = 1..=n`.
pub fn generate_fit_samples(params: &DesignParams, n: usize) -> Result<FitSampleSet> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 samples, got {n}")));
    }
    let zs: Vec<f64> = (1..=n)
        .map(|i| i as f64 * params.z_max / n as f64)
        .collect();
    FitSampleSet::at_deflections(params, &zs)
}

/// Sum of squared profile errors over a sample set.
pub fn fit_error(a: f64, b: f64, c: f64, samples: &FitSampleSet) -> f64 {
    samples
        .samples
        .iter()
        .map(|p| {
            let r = (a * p.s + b) * p.s + c - p.f;
            r * r
        })
        .sum()
}

/// Least-squares quadratic through the samples.
///
/// `s_max` is pushed out to where the radial margin reaches zero, so the
/// profile covers the full face the tube can accommodate.
pub fn fit_profile(samples: &FitSampleSet) -> Result<ConicProfile> {
    let pts = &samples.samples;
    if pts.len() < 3 {
        return Err(Error::SingularFit(format!(
            "{} samples cannot determine three coefficients",
            pts.len()
        )));
    }
    let mut distinct: Vec<f64> = pts.iter().map(|p| p.s).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300));
    if distinct.len() < 3 {
        return Err(Error::SingularFit(format!(
            "only {} distinct abscissae",
            distinct.len()
        )));
    }

    // normal equations in (A, B, C)
    let mut m = [[0.0f64; 4]; 3];
    for p in pts {
        let basis = [p.s * p.s, p.s, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            m[i][3] += basis[i] * p.f;
        }
    }
    let [a, b, c] = solve3(m)?;

    let s_fit_max = distinct[distinct.len() - 1];
    let s_margin = margin_limited_abscissa(&samples.params)?;
    let profile = ConicProfile::new(a, b, c, s_fit_max.max(s_margin));
    Ok(profile)
}

/// Gaussian elimination with partial pivoting on an augmented 3×4 system.
fn solve3(mut m: [[f64; 4]; 3]) -> Result<[f64; 3]> {
    let scale = m
        .iter()
        .flat_map(|row| row[..3].iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::SingularFit("zero normal matrix".into()));
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot][col].abs() <= 1e-14 * scale {
            return Err(Error::SingularFit(format!(
                "pivot {col} vanishes ({:e})",
                m[pivot][col]
            )));
        }
        m.swap(col, pivot);
        for row in col + 1..3 {
            let factor = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (m[row][3] - tail) / m[row][row];
    }
    Ok(x)
}

/// Contact abscissa at the deflection where the radial margin vanishes.
/// Falls back to the largest deflection tried when the margin never closes.
fn margin_limited_abscissa(params: &DesignParams) -> Result<f64> {
    let margin = |z: f64| radial_margin_in_tube(z, params, TUBE_INNER_RADIUS);
    let z_ceiling = 0.99 * params.r;
    let mut hi = params.z_max.max(f64::MIN_POSITIVE);
    while margin(hi)? > 0.0 && hi < z_ceiling {
        hi = (hi * 1.5).min(z_ceiling);
    }
    let z_zero = if margin(hi)? > 0.0 {
        hi
    } else if margin(0.0)? <= 0.0 {
        0.0
    } else {
        let tol = 1e-12 * params.scale;
        bisect(|z| margin(z).unwrap_or(f64::NAN), 0.0, hi, tol, 200)
            .map_err(|e| Error::Domain(format!("margin root search failed: {e:?}")))?
    };
    Ok(contact_from_deflection(z_zero, params.travel_for(z_zero), params)?.s)
}

/// Closed-loop deviation of the fitted mechanism from the linear law.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearityReport {
    pub max_abs_residual: f64,
    /// `(d, z(d) - (α/η)·d)` pairs on the evaluation grid.
    pub residual_curve: Vec<(f64, f64)>,
    /// Whether the grid stayed inside the working range `[0, (η/α)·Z]`.
    pub in_range: bool,
}

impl LinearityReport {
    /// Largest residual magnitude over grid points with `d` in `[lo, hi]`.
    pub fn max_abs_residual_between(&self, lo: f64, hi: f64) -> f64 {
        self.residual_curve
            .iter()
            .filter(|(d, _)| *d >= lo && *d <= hi)
            .fold(0.0, |m, (_, r)| m.max(r.abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,residual\n");
        for (d, r) in &self.residual_curve {
            out.push_str(&format!("{d},{r}\n"));
        }
        out
    }
}

impl fmt::Display for LinearityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "linearity: max |z(d) - (alpha/eta) d| = {:.6} mm over {} grid points ({})",
            self.max_abs_residual,
            self.residual_curve.len(),
            if self.in_range {
                "working range"
            } else {
                "beyond working range"
            }
        )
    }
}

/// Linearity over the working range on a uniform `n_grid`-point grid.
pub fn linearity_report(
    profile: &ConicProfile,
    params: &DesignParams,
    n_grid: usize,
) -> Result<LinearityReport> {
    linearity_report_to(profile, params, n_grid, params.max_travel())
}

/// Linearity on a uniform grid over `[0, d_end]`. The root bracket widens
/// with `d_end` so that grids reaching past the working range still solve.
pub fn linearity_report_to(
    profile: &ConicProfile,
    params: &DesignParams,
    n_grid: usize,
    d_end: f64,
) -> Result<LinearityReport> {
    if n_grid < 10 {
        return Err(Error::InvalidInput(format!(
            "linearity grid needs >= 10 points, got {n_grid}"
        )));
    }
    if !(d_end.is_finite() && d_end > 0.0) {
        return Err(Error::InvalidInput(format!("d_end must be > 0, got {d_end}")));
    }
    let z_hi = (1.2 * params.z_max).max(1.2 * target_deflection(d_end, params));
    let tol = SOLVE_TOL * params.scale;
    let mut curve = Vec::with_capacity(n_grid);
    for i in 0..n_grid {
        let d = d_end * i as f64 / (n_grid - 1) as f64;
        let z = solve_deflection_within(d, profile, params, z_hi, tol)?;
        curve.push((d, z - target_deflection(d, params)));
    }
    let max_abs_residual = curve.iter().fold(0.0f64, |m, (_, r)| m.max(r.abs()));
    Ok(LinearityReport {
        max_abs_residual,
        residual_curve: curve,
        in_range: d_end <= params.max_travel() * (1.0 + 1e-12),
    })
}

/// Number of deflection samples used for worst-case searches over `[0, Z]`.
const DESIGN_GRID: usize = 201;

/// Half the smaller field-of-view dimension at unity scale (mm).
pub const FOV_HALF_MIN: f64 = 0.1;

/// Checks a fitted design against the requirements, which are compared
/// as given (pass `req.at_scale(params.scale)` for a scaled mechanism).
pub fn validate_design(
    profile: &ConicProfile,
    params: &DesignParams,
    req: &RequirementSpec,
) -> Result<ConstraintReport> {
    validate_design_in_tube(profile, params, req, TUBE_INNER_RADIUS)
}

pub fn validate_design_in_tube(
    profile: &ConicProfile,
    params: &DesignParams,
    req: &RequirementSpec,
    tube_radius: f64,
) -> Result<ConstraintReport> {
    let mut worst_height = 0.0f64;
    let mut worst_incl = 0.0f64;
    let mut min_margin = f64::INFINITY;
    for i in 0..DESIGN_GRID {
        let z = params.z_max * i as f64 / (DESIGN_GRID - 1) as f64;
        let pose = tip_pose(z, params)?;
        worst_height = worst_height.max(pose.height);
        worst_incl = worst_incl.max(pose.inclination_deg);
        min_margin = min_margin.min(radial_margin_in_tube(z, params, tube_radius)?);
    }
    let s_needed = contact_from_deflection(params.z_max, params.max_travel(), params)?.s;
    let fov = FOV_HALF_MIN * params.scale;

    let mut report = ConstraintReport::default();
    report.push("tip height change", worst_height, Bound::AtMost, req.max_height_change, "mm");
    report.push(
        "tip distance",
        req.nominal_tip_distance + worst_height,
        Bound::AtMost,
        req.max_tip_distance,
        "mm",
    );
    report.push("inclination", worst_incl, Bound::AtMost, req.max_inclination_deg, "deg");
    report.push(
        "inclination hard limit",
        worst_incl,
        Bound::AtMost,
        req.hard_max_inclination_deg,
        "deg",
    );
    report.push("radial margin", min_margin, Bound::Above, 0.0, "mm");
    report.push("pitch", params.alpha, Bound::AtMost, req.max_pitch, "mm");
    report.push(
        "covered area",
        PI * (params.z_max + fov).powi(2),
        Bound::AtLeast,
        req.min_area,
        "mm2",
    );
    report.push("profile extent", profile.s_max, Bound::AtLeast, s_needed, "mm");
    Ok(report)
}
