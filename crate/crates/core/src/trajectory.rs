//! Time-stamped planar paths.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl Sample {
    pub fn new(t: f64, x: f64, y: f64) -> Self {
        Self { t, x, y }
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance_to(&self, other: &Sample) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A planar path in mm sampled at strictly increasing times in s.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
    pub label: String,
    pub scale: f64,
}

impl Trajectory {
    pub fn new(samples: Vec<Sample>, label: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("trajectory has no samples".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.t.is_finite() && s.x.is_finite() && s.y.is_finite()) {
                return Err(Error::InvalidInput(format!("sample {i} is not finite")));
            }
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].t <= w[0].t) {
            return Err(Error::InvalidInput(format!(
                "sample times not strictly increasing at index {}: {} then {}",
                i + 1,
                samples[i].t,
                samples[i + 1].t
            )));
        }
        Ok(Self {
            samples,
            label: label.into(),
            scale: 1.0,
        })
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start_time(&self) -> f64 {
        self.samples[0].t
    }

    pub fn end_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn duration(&self) -> f64 {
        self.end_time() - self.start_time()
    }

    pub fn last(&self) -> &Sample {
        &self.samples[self.samples.len() - 1]
    }

    pub fn path_length(&self) -> f64 {
        self.samples.windows(2).map(|w| w[0].distance_to(&w[1])).sum()
    }

    pub fn max_radius(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.radius()))
    }

    /// Chord speed of each consecutive sample pair.
    pub fn segment_speeds(&self) -> Vec<f64> {
        self.samples
            .windows(2)
            .map(|w| w[0].distance_to(&w[1]) / (w[1].t - w[0].t))
            .collect()
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.x, s.y)).collect()
    }

    /// Same path with every sample shifted by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            samples: self
                .samples
                .iter()
                .map(|s| Sample::new(s.t, s.x + dx, s.y + dy))
                .collect(),
            label: self.label.clone(),
            scale: self.scale,
        }
    }
}

/// Multiplies positions (not times) by `factor` and the scale metadata with them.
pub fn rescale_trajectory(traj: &Trajectory, factor: f64) -> Result<Trajectory> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(Error::InvalidInput(format!("rescale factor must be > 0, got {factor}")));
    }
    Ok(Trajectory {
        samples: traj
            .samples
            .iter()
            .map(|s| Sample::new(s.t, s.x * factor, s.y * factor))
            .collect(),
        label: traj.label.clone(),
        scale: traj.scale * factor,
    })
}
