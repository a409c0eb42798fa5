//! Closed-form contact geometry of the cam-on-cone mechanism.
//!
//! The conic structure pivots about a fixed point `O`. A cam travelling
//! along the common axis pushes on the curved face of the cone; the cone
//! inclines by `θ` and the probe tip `P`, at lever arm `r` from `O`, moves
//! radially by `z = r sin θ`. All lengths are in millimetres and all angles
//! in radians unless a name says otherwise (`*_deg`).

use crate::error::{Error, Result};

/// Inner radius of the covering tube at unity scale (mm).
pub const TUBE_INNER_RADIUS: f64 = 2.5;

/// Fixed mechanism constants.
///
/// Lengths are the physical lengths of the mechanism being modelled, so a
/// 5:1 prototype carries lengths five times the unity values together with
/// `scale = 5`. Use [`DesignParams::scaled`] to derive one from the other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignParams {
    /// Lateral offset of the cam tip from the common axis.
    pub l: f64,
    /// Axial distance from the pivot to the cam tip at zero travel.
    pub k: f64,
    /// Lever arm from the pivot to the probe tip.
    pub r: f64,
    /// Target spiral pitch (radial spacing between turns).
    pub alpha: f64,
    /// Cam translation per cam revolution.
    pub eta: f64,
    /// Upper bound of the design deflection range.
    pub z_max: f64,
    /// Geometric scale factor relative to the unity-scale design.
    pub scale: f64,
}

impl Default for DesignParams {
    fn default() -> Self {
        Self {
            l: 1.4,
            k: 7.0,
            r: 20.0,
            alpha: 0.15,
            eta: 0.5,
            z_max: 1.0,
            scale: 1.0,
        }
    }
}

impl DesignParams {
    /// Multiplies every length by `factor` and the scale metadata with it.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            l: self.l * factor,
            k: self.k * factor,
            r: self.r * factor,
            alpha: self.alpha * factor,
            eta: self.eta * factor,
            z_max: self.z_max * factor,
            scale: self.scale * factor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lengths = [
            ("l", self.l),
            ("k", self.k),
            ("r", self.r),
            ("alpha", self.alpha),
            ("eta", self.eta),
            ("Z", self.z_max),
            ("scale", self.scale),
        ];
        for (name, v) in lengths {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if self.alpha >= self.eta {
            return Err(Error::InvalidInput(format!(
                "alpha ({}) must be smaller than eta ({})",
                self.alpha, self.eta
            )));
        }
        if self.z_max >= self.r {
            return Err(Error::InvalidInput(format!(
                "Z ({}) must be smaller than r ({})",
                self.z_max, self.r
            )));
        }
        Ok(())
    }

    /// Deflection per unit cam travel, `α/η`.
    pub fn gain(&self) -> f64 {
        self.alpha / self.eta
    }

    /// Cam travel that the linear law assigns to deflection `z`.
    pub fn travel_for(&self, z: f64) -> f64 {
        z * self.eta / self.alpha
    }

    /// Cam travel covering the whole working range, `(η/α)·Z`.
    pub fn max_travel(&self) -> f64 {
        self.travel_for(self.z_max)
    }

    /// Tube inner radius at this scale.
    pub fn tube_inner_radius(&self) -> f64 {
        TUBE_INNER_RADIUS * self.scale
    }
}

/// Imaging and handling requirements, stated at unity scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RequirementSpec {
    /// mm/s
    pub max_tip_speed: f64,
    /// mm
    pub target_pitch: f64,
    /// mm
    pub max_pitch: f64,
    /// mm²
    pub min_area: f64,
    /// s
    pub max_duration: f64,
    /// s
    pub target_duration: f64,
    /// mm
    pub max_height_change: f64,
    /// degrees; the preferred bound
    pub max_inclination_deg: f64,
    /// degrees; never acceptable beyond this
    pub hard_max_inclination_deg: f64,
    /// mm
    pub nominal_tip_distance: f64,
    /// mm
    pub max_tip_distance: f64,
}

impl Default for RequirementSpec {
    fn default() -> Self {
        Self {
            max_tip_speed: 0.5,
            target_pitch: 0.15,
            max_pitch: 0.2,
            min_area: 3.0,
            max_duration: 180.0,
            target_duration: 60.0,
            max_height_change: 0.1,
            max_inclination_deg: 5.0,
            hard_max_inclination_deg: 10.0,
            nominal_tip_distance: 0.2,
            max_tip_distance: 0.3,
        }
    }
}

impl RequirementSpec {
    /// Requirements for a mechanism built at `scale`: lengths and speeds
    /// grow linearly, areas quadratically, angles and durations stay put.
    pub fn at_scale(&self, scale: f64) -> Self {
        Self {
            max_tip_speed: self.max_tip_speed * scale,
            target_pitch: self.target_pitch * scale,
            max_pitch: self.max_pitch * scale,
            min_area: self.min_area * scale * scale,
            max_height_change: self.max_height_change * scale,
            nominal_tip_distance: self.nominal_tip_distance * scale,
            max_tip_distance: self.max_tip_distance * scale,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pairs = [
            ("target_pitch", self.target_pitch, "max_pitch", self.max_pitch),
            (
                "target_duration",
                self.target_duration,
                "max_duration",
                self.max_duration,
            ),
            (
                "max_inclination_deg",
                self.max_inclination_deg,
                "hard_max_inclination_deg",
                self.hard_max_inclination_deg,
            ),
            (
                "nominal_tip_distance",
                self.nominal_tip_distance,
                "max_tip_distance",
                self.max_tip_distance,
            ),
        ];
        for (t, tv, h, hv) in pairs {
            if !(tv.is_finite() && hv.is_finite()) || tv < 0.0 || tv > hv {
                return Err(Error::InvalidInput(format!(
                    "{t} ({tv}) must lie in [0, {h} = {hv}]"
                )));
            }
        }
        for (name, v) in [
            ("max_tip_speed", self.max_tip_speed),
            ("min_area", self.min_area),
            ("max_height_change", self.max_height_change),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// One solved contact state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactGeometry {
    /// Cam travel.
    pub d: f64,
    /// Tip deflection.
    pub z: f64,
    /// Distance from pivot to cam tip.
    pub e: f64,
    /// Angle of the pivot-to-cam-tip line against the axis.
    pub gamma: f64,
    /// Cone inclination.
    pub theta: f64,
    /// Contact abscissa along the cone face.
    pub s: f64,
    /// Contact ordinate (geometric profile height).
    pub f: f64,
}

/// Evaluates the contact state for deflection `z` at cam travel `d`.
pub fn contact_from_deflection(z: f64, d: f64, params: &DesignParams) -> Result<ContactGeometry> {
    if !(z.is_finite() && d.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite z = {z} or d = {d}")));
    }
    if z < 0.0 || d < 0.0 {
        return Err(Error::InvalidInput(format!(
            "z and d must be non-negative (z = {z}, d = {d})"
        )));
    }
    if z > params.r {
        return Err(Error::Domain(format!(
            "deflection z = {z} exceeds lever arm r = {}",
            params.r
        )));
    }
    let (l, k) = (params.l, params.k);
    let e = (d + k).hypot(l);
    let gamma = (l / e).asin();
    let theta = (z / params.r).asin();
    let s = e * (theta + gamma).sin() - l;
    let mut radicand = e * e - (l + s) * (l + s);
    // rounding at θ + γ = π/2
    if radicand < 0.0 && radicand > -1e-12 * e * e {
        radicand = 0.0;
    }
    if radicand < 0.0 {
        return Err(Error::Domain(format!(
            "impossible configuration at z = {z}, d = {d}: e² - (l+s)² = {radicand}"
        )));
    }
    let f = radicand.sqrt() - k;
    Ok(ContactGeometry {
        d,
        z,
        e,
        gamma,
        theta,
        s,
        f,
    })
}

/// Deflection required by the linear law, `z = (α/η)·d`.
pub fn target_deflection(d: f64, params: &DesignParams) -> f64 {
    params.gain() * d
}

/// Clearance between the outer extremity of the cone and the tube wall,
/// with the cam at the travel the linear law assigns to `z`. Negative
/// values mean the cone would hit the tube.
pub fn radial_margin(z: f64, params: &DesignParams) -> Result<f64> {
    radial_margin_in_tube(z, params, TUBE_INNER_RADIUS)
}

/// [`radial_margin`] for a tube whose unity-scale inner radius is
/// `tube_radius` (it is multiplied by `params.scale`).
pub fn radial_margin_in_tube(z: f64, params: &DesignParams, tube_radius: f64) -> Result<f64> {
    let c = contact_from_deflection(z, params.travel_for(z), params)?;
    let extent = 2.0 * (c.s + params.l) * c.theta.cos() - params.l;
    Ok(tube_radius * params.scale - extent)
}

/// Probe tip displacement away from the nominal plane and its inclination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipPose {
    pub z: f64,
    /// Axial retreat of the tip, `r(1 - cos θ)`.
    pub height: f64,
    pub inclination_deg: f64,
}

pub fn tip_pose(z: f64, params: &DesignParams) -> Result<TipPose> {
    if !(0.0..=params.r).contains(&z) {
        return Err(Error::Domain(format!(
            "deflection z = {z} outside [0, r = {}]",
            params.r
        )));
    }
    let theta = (z / params.r).asin();
    Ok(TipPose {
        z,
        height: params.r * (1.0 - theta.cos()),
        inclination_deg: theta.to_degrees(),
    })
}
