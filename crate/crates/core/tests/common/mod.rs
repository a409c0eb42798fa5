//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use conescan::{DesignParams, Sample, Trajectory};

/// Contact coordinates from an explicit 2-D scene: the cam tip sits at
/// lateral `l`, axial `d + k` from the pivot; expressing it in the frame of
/// a cone tilted by `θ` and measuring from the face origin `(l, k)` gives
/// the contact abscissa and ordinate.
pub fn scene_contact(z: f64, d: f64, p: &DesignParams) -> (f64, f64) {
    let theta = (z / p.r).asin();
    let tip = [p.l, d + p.k];
    let (c, s) = (theta.cos(), theta.sin());
    let body = [c * tip[0] + s * tip[1], -s * tip[0] + c * tip[1]];
    (body[0] - p.l, body[1] - p.k)
}

/// Position of `traj` at time `t` by scanning for the bracketing samples.
pub fn lerp_at(traj: &Trajectory, t: f64) -> (f64, f64) {
    let s = traj.samples();
    for w in s.windows(2) {
        if t >= w[0].t && t <= w[1].t {
            let u = (t - w[0].t) / (w[1].t - w[0].t);
            return (w[0].x + u * (w[1].x - w[0].x), w[0].y + u * (w[1].y - w[0].y));
        }
    }
    let last = s.last().unwrap();
    (last.x, last.y)
}

/// Discrete-sum position and velocity mismatch on the uniform grid of
/// step `h` starting at the later start time.
pub fn brute_force_mismatch(a: &Trajectory, b: &Trajectory, h: f64) -> (f64, f64) {
    let t0 = a.start_time().max(b.start_time());
    let t1 = a.end_time().min(b.end_time());
    let mut times = Vec::new();
    let mut k = 0;
    loop {
        let t = t0 + k as f64 * h;
        if t > t1 + 1e-9 * h {
            break;
        }
        times.push(t);
        k += 1;
    }
    let pa: Vec<(f64, f64)> = times.iter().map(|&t| lerp_at(a, t)).collect();
    let pb: Vec<(f64, f64)> = times.iter().map(|&t| lerp_at(b, t)).collect();
    let n = times.len();
    let weight = |i: usize| if i == 0 || i == n - 1 { 0.5 * h } else { h };
    let span = h * (n - 1) as f64;

    let mut dsum = 0.0;
    for i in 0..n {
        dsum += weight(i) * ((pa[i].0 - pb[i].0).powi(2) + (pa[i].1 - pb[i].1).powi(2)).sqrt();
    }
    let vel = |p: &[(f64, f64)], i: usize| -> (f64, f64) {
        let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
        let dt = (hi - lo) as f64 * h;
        ((p[hi].0 - p[lo].0) / dt, (p[hi].1 - p[lo].1) / dt)
    };
    let mut csum = 0.0;
    for i in 0..n {
        let (va, vb) = (vel(&pa, i), vel(&pb, i));
        csum += weight(i) * ((va.0 - vb.0).powi(2) + (va.1 - vb.1).powi(2)).sqrt();
    }
    (dsum / span, csum / span)
}

/// Random walk with jittered, strictly increasing sample times.
pub fn random_walk<R: rand::Rng>(rng: &mut R, n: usize, t_start: f64) -> Trajectory {
    let mut t = t_start;
    let (mut x, mut y) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        samples.push(Sample::new(t, x, y));
        t += rng.gen_range(0.02..0.2);
        x += rng.gen_range(-0.1..0.1);
        y += rng.gen_range(-0.1..0.1);
    }
    Trajectory::new(samples, "walk").unwrap()
}
