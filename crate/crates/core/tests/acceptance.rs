//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

mod common;

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;

use conescan::kinematics::{solve_deflection, tip_position, CamState};
use conescan::metrics::{
    apply_drag_surrogate, match_ratio, mismatch, mismatch_c, mismatch_d, DragSurrogateParams,
};
use conescan::planning::{
    constant_speed_cam_program, coverage_report, plan_raster, plan_spiral, DEFAULT_OMEGA_CAP,
};
use conescan::profile::{fit_error, fit_profile, generate_fit_samples, linearity_report_to};
use conescan::{
    contact_from_deflection, radial_margin, simulate_scan, tip_pose, ConicProfile, DesignParams,
    RequirementSpec, Sample, Trajectory,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn fitted(params: &DesignParams) -> ConicProfile {
    fit_profile(&generate_fit_samples(params, 6).unwrap()).unwrap()
}

const SIM_DT: f64 = 0.01;
const TIP_SPEED: f64 = 0.38;

/// Scale-dependent figures from criteria 1 to 6.
#[derive(Debug, Clone, Copy)]
struct Figures {
    inclination_deg: f64,
    height: f64,
    min_margin: f64,
    linearity: f64,
    final_radius: f64,
    turns: f64,
    min_turn_gap: f64,
    max_turn_gap: f64,
    worst_speed_error: f64,
    forward_duration: f64,
    rewind_duration: f64,
    gear_exact: bool,
}

fn figures(params: &DesignParams) -> Figures {
    let scale = params.scale;
    let req = RequirementSpec::default().at_scale(scale);
    let profile = fitted(params);

    let pose = tip_pose(params.z_max, params).unwrap();
    let min_margin = (0..=200)
        .map(|i| radial_margin(params.z_max * i as f64 / 200.0, params).unwrap())
        .fold(f64::INFINITY, f64::min);
    let linearity = linearity_report_to(&profile, params, 201, params.max_travel())
        .unwrap()
        .max_abs_residual;

    let program = constant_speed_cam_program(
        &profile,
        params,
        &req,
        TIP_SPEED * scale,
        DEFAULT_OMEGA_CAP,
        SIM_DT,
    )
    .unwrap();
    let traj = simulate_scan(&program, &profile, params, SIM_DT).unwrap();
    let turns = program.forward_angle() / TAU;

    let mut radii = vec![0.0];
    for k in 1.. {
        let (x, y) = tip_position(TAU * k as f64, &profile, params).unwrap();
        let r = x.hypot(y);
        if r > params.z_max {
            break;
        }
        radii.push(r);
    }
    let gaps: Vec<f64> = radii.windows(2).map(|w| w[1] - w[0]).collect();

    let forward = program.forward();
    let speeds = traj.segment_speeds();
    let worst_speed_error = speeds
        .iter()
        .enumerate()
        .filter(|(i, _)| forward[*i].omega < DEFAULT_OMEGA_CAP && forward[i + 1].omega < DEFAULT_OMEGA_CAP)
        .map(|(_, v)| (v / (TIP_SPEED * scale) - 1.0).abs())
        .fold(0.0, f64::max);
    let gear_exact = (0..program.setpoints.len())
        .all(|i| program.motor_omega(i) == program.setpoints[i].omega * (24.0 / 11.0));

    Figures {
        inclination_deg: pose.inclination_deg,
        height: pose.height,
        min_margin,
        linearity,
        final_radius: traj.last().radius(),
        turns,
        min_turn_gap: gaps.iter().cloned().fold(f64::INFINITY, f64::min),
        max_turn_gap: gaps.iter().cloned().fold(0.0, f64::max),
        worst_speed_error,
        forward_duration: program.forward_duration(),
        rewind_duration: program.rewind.unwrap().duration,
        gear_exact,
    }
}

fn inclination(f: &Figures) -> Outcome {
    outcome(
        within(f.inclination_deg, 2.87, 0.01) && within(f.height, 0.025, 0.002),
        format!("inclination {:.4} deg, height {:.5} mm", f.inclination_deg, f.height),
    )
}

fn margin(f: &Figures) -> Outcome {
    outcome(
        f.min_margin > 0.0 && within(f.min_margin, 0.075, 0.005),
        format!("min radial margin {:.5} mm", f.min_margin),
    )
}

fn linearity(params: &DesignParams) -> Outcome {
    let profile = fitted(params);
    let inside = linearity_report_to(&profile, params, 201, params.max_travel()).unwrap();
    let d_first = generate_fit_samples(params, 6).unwrap().samples[0].d;
    let fitted_span = inside.max_abs_residual_between(d_first, params.max_travel());

    let d_end = 1.3 * params.max_travel();
    let wide = linearity_report_to(&profile, params, 261, d_end).unwrap();
    let beyond: Vec<f64> = wide
        .residual_curve
        .iter()
        .filter(|(d, _)| *d > params.max_travel())
        .map(|(_, r)| r.abs())
        .collect();
    let grows = beyond.windows(2).all(|w| w[1] > w[0]) && beyond[0] >= 0.0;
    let outside_max = beyond.last().copied().unwrap_or(0.0);

    outcome(
        inside.max_abs_residual <= 0.005 && grows,
        format!(
            "max |z - 0.3 d| over [0, d_max] = {:.5} mm (limit 0.005; {:.5} over the fitted span \
             [{:.3}, {:.3}]); beyond range residual rises monotonically to {:.5} at d = {:.3}: {}",
            inside.max_abs_residual,
            fitted_span,
            d_first,
            params.max_travel(),
            outside_max,
            d_end,
            grows
        ),
    )
}

fn fit_optimality(params: &DesignParams) -> Outcome {
    let samples = generate_fit_samples(params, 6).unwrap();
    let best = fitted(params);
    let e_best = fit_error(best.a, best.b, best.c, &samples);
    let mut lowest = f64::INFINITY;
    let mut evaluated = 0;
    for span in [1e-1, 1e-3, 1e-5] {
        for i in -10..=10 {
            for j in -10..=10 {
                for k in -10..=10 {
                    let (a, b, c) = (
                        best.a + span * 10.0 * i as f64 / 10.0,
                        best.b + span * 3.0 * j as f64 / 10.0,
                        best.c + span * k as f64 / 10.0,
                    );
                    if (i, j, k) == (0, 0, 0) {
                        continue;
                    }
                    lowest = lowest.min(fit_error(a, b, c, &samples));
                    evaluated += 1;
                }
            }
        }
    }
    outcome(
        lowest >= e_best,
        format!(
            "least-squares SSE {:.6e}; lowest of {} grid neighbours {:.6e}",
            e_best, evaluated, lowest
        ),
    )
}

fn spiral_geometry(f: &Figures) -> Outcome {
    outcome(
        within(f.final_radius, 1.0, 0.01)
            && (6.4..=6.7).contains(&f.turns)
            && f.min_turn_gap >= 0.14
            && f.max_turn_gap <= 0.16,
        format!(
            "final radius {:.5} mm after {:.4} cam turns; turn spacing {:.5}..{:.5} mm",
            f.final_radius, f.turns, f.min_turn_gap, f.max_turn_gap
        ),
    )
}

fn constant_speed(f: &Figures) -> Outcome {
    outcome(
        f.worst_speed_error <= 0.05
            && (55.0..=65.0).contains(&f.forward_duration)
            && f.rewind_duration < 10.0
            && f.gear_exact,
        format!(
            "worst uncapped speed error {:.3e}; forward {:.2} s; rewind {:.2} s; motor = cam x 24/11: {}",
            f.worst_speed_error, f.forward_duration, f.rewind_duration, f.gear_exact
        ),
    )
}

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-12)
}

fn scale_invariance(unit: &Figures, unit_params: &DesignParams) -> Outcome {
    let big_params = unit_params.scaled(5.0);
    let big = figures(&big_params);
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_string());
        }
    };
    check("inclination", rel_eq(big.inclination_deg, unit.inclination_deg, 1e-12));
    check("height", rel_eq(big.height, 5.0 * unit.height, 1e-9));
    check("margin", rel_eq(big.min_margin, 5.0 * unit.min_margin, 1e-9));
    check("linearity", rel_eq(big.linearity, 5.0 * unit.linearity, 1e-4));
    check("final radius", rel_eq(big.final_radius, 5.0 * unit.final_radius, 1e-6));
    check("turns", rel_eq(big.turns, unit.turns, 1e-6));
    check("turn spacing", rel_eq(big.max_turn_gap, 5.0 * unit.max_turn_gap, 1e-6));
    check("speed error", (big.worst_speed_error - unit.worst_speed_error).abs() < 1e-4);
    check("forward duration", rel_eq(big.forward_duration, unit.forward_duration, 1e-9));
    check("rewind duration", big.rewind_duration == unit.rewind_duration);
    check("gear", big.gear_exact);
    let req = RequirementSpec::default().at_scale(5.0);
    check("speed limit", rel_eq(req.max_tip_speed, 2.5, 1e-12));
    outcome(
        failures.is_empty(),
        format!(
            "scale 5 at 1.9 mm/s (limit {:.1}): inclination {:.4} deg, height {:.5} mm, \
             margin {:.5} mm, radius {:.5} mm, {:.4} turns, forward {:.2} s{}",
            req.max_tip_speed,
            big.inclination_deg,
            big.height,
            big.min_margin,
            big.final_radius,
            big.turns,
            big.forward_duration,
            if failures.is_empty() {
                String::new()
            } else {
                format!("; mismatched: {}", failures.join(", "))
            }
        ),
    )
}

fn metrics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let n = rng.gen_range(40..120);
        let (ta, tb) = (rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5));
        let a = common::random_walk(&mut rng, n, ta);
        let b = common::random_walk(&mut rng, n, tb);
        let (d_ref, c_ref) = common::brute_force_mismatch(&a, &b, 1.0 / 12.0);
        let r = mismatch(&a, &b).unwrap();
        worst = worst.max((r.d - d_ref).abs()).max((r.c - c_ref).abs());
    }
    let a = common::random_walk(&mut rng, 80, 0.0);
    let same = mismatch(&a, &a).unwrap();
    let w = (0.12, -0.16);
    let shifted = a.translated(w.0, w.1);
    let d_off = mismatch_d(&a, &shifted).unwrap();
    let c_off = mismatch_c(&a, &shifted).unwrap();

    let req = RequirementSpec::default();
    let frame = 1.0 / 120.0;
    let spiral = plan_spiral(0.15, 0.91, TIP_SPEED, frame, &req).unwrap().trajectory;
    let side = PI.sqrt() * 1.01;
    let raster = plan_raster(0.15, side, side, TIP_SPEED, frame, &req).unwrap().trajectory;
    let mut ordered = true;
    let mut ratios = Vec::new();
    for stick_radius in [0.02, 0.05, 0.1] {
        for lag_time in [0.1, 0.5, 2.0] {
            for creep_gain in [0.0, 0.5, 1.0] {
                let p = DragSurrogateParams {
                    stick_radius,
                    lag_time,
                    creep_gain,
                };
                let cs = mismatch_c(&apply_drag_surrogate(&spiral, &p), &spiral).unwrap();
                let cr = mismatch_c(&apply_drag_surrogate(&raster, &p), &raster).unwrap();
                ordered &= cs < cr;
                ratios.push(cr / cs);
            }
        }
    }
    let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);

    outcome(
        worst <= 1e-6
            && same.d == 0.0
            && same.c == 0.0
            && c_off.abs() <= 1e-12
            && within(d_off, 0.2, 1e-12)
            && ordered,
        format!(
            "oracle deviation {:.1e}; identical D={} C={}; offset D={:.12} C={:.1e}; \
             C_spiral < C_raster in all 27 drag settings: {} (min ratio {:.2})",
            worst, same.d, same.c, d_off, c_off, ordered, min_ratio
        ),
    )
}

fn matching(params: &DesignParams) -> Outcome {
    let req = RequirementSpec::default();
    let profile = fitted(params);
    let program =
        constant_speed_cam_program(&profile, params, &req, TIP_SPEED, DEFAULT_OMEGA_CAP, SIM_DT)
            .unwrap();
    let sim = simulate_scan(&program, &profile, params, SIM_DT).unwrap();
    let simulated = match_ratio(&sim, 0.15, 1.0, 0.05, 0.015).unwrap();

    let ideal = plan_spiral(0.15, 1.0, TIP_SPEED, SIM_DT, &req).unwrap().trajectory;
    let own = match_ratio(&ideal, 0.15, 1.0, 0.05, 0.015).unwrap();

    let frames = plan_spiral(0.15, 1.0, TIP_SPEED, 1.0 / 12.0, &req).unwrap().trajectory;
    let mut means = Vec::new();
    for amp in [0.0, 0.005, 0.01, 0.02, 0.03, 0.04] {
        let mut total = 0.0;
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noisy: Vec<Sample> = frames
                .samples()
                .iter()
                .map(|s| {
                    Sample::new(
                        s.t,
                        s.x + amp * rng.gen_range(-1.0..1.0),
                        s.y + amp * rng.gen_range(-1.0..1.0),
                    )
                })
                .collect();
            let t = Trajectory::new(noisy, "noisy").unwrap();
            total += match_ratio(&t, 0.15, 1.0, 0.05, 0.015).unwrap().ratio;
        }
        means.push(total / 20.0);
    }
    let monotone = means.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        simulated.ratio >= 0.9 && own.ratio == 1.0 && monotone,
        format!(
            "simulated scan {:.4} ({} matched, {} outside); ideal self-match {}; \
             mean ratio vs noise {:?}",
            simulated.ratio,
            simulated.matched,
            simulated.mismatched,
            own.ratio,
            means.iter().map(|m| (m * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    )
}

fn coverage() -> Outcome {
    let req = RequirementSpec::default();
    let plan = plan_spiral(0.15, 0.91, TIP_SPEED, SIM_DT, &req).unwrap();
    let rep = coverage_report(&plan.trajectory, 0.1, &req);
    outcome(
        within(rep.area, 3.2, 0.1) && rep.checks.all_pass(),
        format!(
            "radius {:.4} mm, area {:.4} mm2, spacing {:.4} mm, all checks pass: {}",
            rep.radius,
            rep.area,
            rep.max_spacing,
            rep.checks.all_pass()
        ),
    )
}

fn geometry_oracle(params: &DesignParams) -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let z = params.z_max * i as f64 / 9.0;
            let d = params.max_travel() * j as f64 / 9.0;
            let c = contact_from_deflection(z, d, params).unwrap();
            let (s, f) = common::scene_contact(z, d, params);
            worst = worst.max((c.s - s).abs()).max((c.f - f).abs());
        }
    }
    outcome(worst <= 1e-9, format!("max deviation {worst:.2e} mm over 100 grid points"))
}

fn main() -> ExitCode {
    let started = std::time::Instant::now();
    let params = DesignParams::default();
    let unit = figures(&params);

    // sanity: the figures above were computed on a solvable design
    assert!(solve_deflection(CamState::from_phi(TAU, &params).d, &fitted(&params), &params).is_ok());

    let results = [
        ("1 inclination at full deflection", inclination(&unit)),
        ("2 radial margin", margin(&unit)),
        ("3 linearity of the fitted design", linearity(&params)),
        ("4 fit optimality", fit_optimality(&params)),
        ("5 spiral geometry", spiral_geometry(&unit)),
        ("6 constant-speed program", constant_speed(&unit)),
        ("7 scale invariance", scale_invariance(&unit, &params)),
        ("8 mismatch metrics", metrics()),
        ("9 match ratio", matching(&params)),
        ("10 coverage", coverage()),
        ("11 geometry oracle", geometry_oracle(&params)),
    ];

    let mut failed = 0;
    for (name, o) in &results {
        println!("{} {:<34} {}", if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed in {:.1} s",
        results.len() - failed,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
