use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conescan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const DEFAULT_DESIGN: &str = "# unity-scale design\nl = 1.4\nk = 7\nr = 20\nalpha = 0.15\neta = 0.5\nZ = 1\nscale = 1\n";

#[test]
fn fit_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("default.cfg");
    let profile = dir.path().join("profile.cfg");
    fs::write(&design, DEFAULT_DESIGN).unwrap();

    let o = run(&["fit-profile", "--design", p(&design), "--samples", "6", "--out", p(&profile)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("linearity: max |z(d) - (alpha/eta) d| = 0.0202"));
    let text = fs::read_to_string(&profile).unwrap();
    assert!(text.contains("A = ") && text.contains("s_max = "));

    let o = run(&["check", "--design", p(&design), "--profile", p(&profile)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("tip height change"));
    assert!(out.contains("0.025"), "{out}");
    assert!(out.contains("2.865984"), "{out}");
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("short.cfg");
    fs::write(&design, "r = 5\n").unwrap();
    let o = run(&["check", "--design", p(&design)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL]"));
}

#[test]
fn compare_identical_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    fs::write(&a, "t,x,y\n0,0,0\n0.5,0.1,0\n1,0.2,0.1\n1.5,0.2,0.3\n").unwrap();
    let o = run(&["compare", "--image", p(&a), "--probe", p(&a)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("D = 0 mm"), "{out}");
    assert!(out.contains("C = 0 mm/s"), "{out}");
}

#[test]
fn simulate_plot_and_match() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("sim.csv");
    let svg = dir.path().join("sim.svg");
    let o = run(&["simulate", "--speed", "0.38", "--dt", "0.05", "--out", p(&traj)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(&traj).unwrap().starts_with("t,x,y\n"));

    let o = run(&["match-ratio", "--trajectory", p(&traj)]);
    assert_eq!(o.status.code(), Some(0));
    let ratio: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("ratio = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(ratio >= 0.9);

    let o = run(&["plot", "--input", p(&traj), "--out", p(&svg)]);
    assert_eq!(o.status.code(), Some(0));
    let first = fs::read(&svg).unwrap();
    assert!(String::from_utf8_lossy(&first).contains("<polyline"));
    run(&["plot", "--input", p(&traj), "--out", p(&svg)]);
    assert_eq!(fs::read(&svg).unwrap(), first);
}

#[test]
fn motor_profile_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("motor.csv");
    let o = run(&["motor-profile", "--speed", "0.38", "--dt", "0.02", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,omega_cam,omega_motor"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(v[2], v[1] * (24.0 / 11.0));
    }
}

#[test]
fn plan_requirements_and_scale() {
    let o = run(&["plan", "--pattern", "spiral", "--pitch", "0.15", "--radius", "0.91"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["plan", "--speed", "0.6"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["plan", "--speed", "1.9", "--pitch", "0.75", "--radius", "5", "--scale", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["plan", "--pattern", "raster", "--pitch", "0.15"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn exit_codes_by_category() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "l = one\n").unwrap();
    let o = run(&["check", "--design", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.cfg:1"));

    let missing = dir.path().join("nope.csv");
    assert_eq!(run(&["compare", "--image", p(&missing), "--probe", p(&missing)]).status.code(), Some(2));

    // travel far past the working range: the cone leaves the bracket
    assert_eq!(run(&["solve", "--travel", "20"]).status.code(), Some(3));
    assert_eq!(run(&["solve", "--travel", "3"]).status.code(), Some(0));
}
