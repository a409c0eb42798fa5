//! Trajectory and cam-program CSV files.
//!
//! Numbers are written in shortest round-trip decimal form, so reading a
//! file back reproduces every value bit for bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::kinematics::CamProgram;
use crate::trajectory::{Sample, Trajectory};

pub fn write_trajectory<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "y"])?;
    for s in traj.samples() {
        w.write_record([s.t.to_string(), s.x.to_string(), s.y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory<R: Read>(input: R, label: &str) -> Result<Trajectory> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = r.headers()?.clone();
    let expected = ["t", "x", "y"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(Error::InvalidInput(format!(
            "trajectory CSV header must be `t,x,y`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut samples = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |j: usize| -> Result<f64> {
            rec[j].parse().map_err(|_| {
                Error::InvalidInput(format!("row {}: `{}` is not a number", i + 2, &rec[j]))
            })
        };
        samples.push(Sample::new(field(0)?, field(1)?, field(2)?));
    }
    Trajectory::new(samples, label)
}

pub fn save_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    write_trajectory(traj, File::create(path)?)
}

pub fn load_trajectory(path: &Path) -> Result<Trajectory> {
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_trajectory(File::open(path)?, &label)
}

/// Writes `t,omega_cam,omega_motor` rows for every setpoint.
pub fn write_cam_program<W: Write>(program: &CamProgram, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "omega_cam", "omega_motor"])?;
    for (i, s) in program.setpoints.iter().enumerate() {
        w.write_record([
            s.t.to_string(),
            s.omega.to_string(),
            program.motor_omega(i).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
