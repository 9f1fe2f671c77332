use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn fbsfc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbsfc")).args(args).output().expect("binary runs")
}

fn rows(out: &Output) -> Vec<Vec<f64>> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect()
}

fn header(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap().lines().next().unwrap_or("").to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const UNIFORM: &str =
    r#"{"components":[{"weight":1,"kappa":0,"beta":0,"mu":[0,0,1],"eta1":[1,0,0],"eta2":[0,1,0]}]}"#;

#[test]
fn uniform_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "u.json", UNIFORM);
    let out = fbsfc(&["coeffs", "--model", &model, "--L", "2"]);
    assert!(out.status.success());
    assert_eq!(header(&out), "ell,m,re,im");
    let r = rows(&out);
    assert_eq!(r.len(), 9);
    assert!((r[0][2] - 0.28209479177387814).abs() < 1e-15);
    assert!(r[1..].iter().all(|row| row[2] == 0.0 && row[3] == 0.0));
}

#[test]
fn standard_coefficients_are_real_with_zero_odd_orders() {
    let out = fbsfc(&["coeffs", "--kappa", "25", "--beta", "10", "--L", "40"]);
    assert!(out.status.success());
    let r = rows(&out);
    assert_eq!(r.len(), 41 * 41);
    let row11 = r.iter().find(|x| x[0] == 1.0 && x[1] == 1.0).unwrap();
    assert!(row11[3].abs() <= 1e-12);
    for x in r.iter().filter(|x| (x[1] as i64) % 2 != 0) {
        assert_eq!((x[2], x[3]), (0.0, 0.0));
    }
}

#[test]
fn input_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"components\": [");
    assert_eq!(fbsfc(&["coeffs", "--model", &bad]).status.code(), Some(2));
    let oval = write(dir.path(), "oval.json", &UNIFORM.replace("\"kappa\":0,\"beta\":0", "\"kappa\":10,\"beta\":6"));
    assert_eq!(fbsfc(&["coeffs", "--model", &oval]).status.code(), Some(3));
    let skew = write(dir.path(), "skew.json", &UNIFORM.replace("\"eta1\":[1,0,0]", "\"eta1\":[1,0.2,0]"));
    assert_eq!(fbsfc(&["coeffs", "--model", &skew]).status.code(), Some(3));
    assert_eq!(fbsfc(&["coeffs"]).status.code(), Some(2));
    assert_eq!(fbsfc(&["pdf", "--kappa", "10", "--beta", "6"]).status.code(), Some(3));
}

fn j0(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

#[test]
fn uniform_uca_curve_is_j0() {
    let out = fbsfc(&["sfc", "--kappa", "0", "--geometry", "uca", "--elements", "16", "--pair", "2,3"]);
    assert!(out.status.success());
    assert_eq!(header(&out), "r_over_lambda,re_rho,im_rho,abs_rho");
    let r = rows(&out);
    assert_eq!(r.len(), 50);
    assert_eq!(r[0][3], 1.0);
    for x in &r {
        let want = j0(4.0 * PI * (PI / 16.0).sin() * x[0]).abs();
        assert!((x[3] - want).abs() <= 1e-10, "R/λ={}: {} vs {want}", x[0], x[3]);
    }
}

#[test]
fn rda_curve_is_bounded() {
    let out = fbsfc(&["sfc", "--kappa", "25", "--beta", "10", "--geometry", "rda", "--pair", "1,2", "--rmin", "0.01"]);
    assert!(out.status.success());
    assert!(rows(&out).iter().all(|x| x[3] <= 1.0 + 1e-9));
}

#[test]
fn invalid_pair_is_a_constraint_error() {
    let out = fbsfc(&["sfc", "--kappa", "0", "--geometry", "uca", "--elements", "8", "--pair", "2,9"]);
    assert_eq!(out.status.code(), Some(3));
    let out = fbsfc(&["sfc", "--kappa", "0", "--geometry", "rda", "--pair", "0,1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn custom_positions_file() {
    let dir = tempfile::tempdir().unwrap();
    let pos = write(dir.path(), "line.txt", "# two elements on the x axis\n0 0 0\n0.25 0 0\n");
    let out = fbsfc(&["sfc", "--kappa", "0", "--geometry", &pos, "--pair", "1,2", "--steps", "9"]);
    assert!(out.status.success());
    for x in rows(&out) {
        assert!((x[1] - j0(2.0 * PI * 0.25 * x[0])).abs() < 1e-10);
    }
    let listed = fbsfc(&["geometry", "--geometry", &pos, "--radius", "2"]);
    assert_eq!(rows(&listed)[1], vec![2.0, 0.5, 0.0, 0.0]);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let s = fbsfc(&["sfc", "--kappa", "25", "--beta", "10", "--geometry", "rda", "--pair", "1,9", "--out", p.to_str().unwrap()]);
        assert!(s.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn pdf_grid() {
    let out = fbsfc(&["pdf", "--kappa", "0", "--ntheta", "5", "--nphi", "4"]);
    assert_eq!(header(&out), "theta,phi,value");
    let r = rows(&out);
    assert_eq!(r.len(), 20);
    assert!(r.iter().all(|x| (x[2] - 1.0 / (4.0 * PI)).abs() < 1e-16));

    let out = fbsfc(&["pdf", "--kappa", "25", "--beta", "10"]);
    let r = rows(&out);
    assert_eq!(r.len(), 181 * 360);
    let best = r.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert_eq!(best[0], 0.0);
    // trapezoid in θ, periodic rectangle rule in φ
    let (dt, dp) = (PI / 180.0, 2.0 * PI / 360.0);
    let mut total = 0.0;
    for (i, chunk) in r.chunks(360).enumerate() {
        let w = if i == 0 || i == 180 { 0.5 } else { 1.0 };
        total += w * chunk.iter().map(|x| x[2] * x[0].sin()).sum::<f64>() * dt * dp;
    }
    assert!((total - 1.0).abs() < 1e-3, "{total}");
}

#[test]
fn geometry_listing() {
    let out = fbsfc(&["geometry", "--geometry", "rda", "--radius", "1.5"]);
    assert_eq!(header(&out), "index,x,y,z");
    let r = rows(&out);
    assert_eq!(r.len(), 20);
    assert!(r.iter().all(|x| ((x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt() - 1.5).abs() < 1e-12));
    assert_eq!(rows(&fbsfc(&["geometry", "--elements", "8"])).len(), 8);
}

fn report(out: &Output) -> Vec<serde_json::Value> {
    serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap().as_array().unwrap().clone()
}

#[test]
fn validate_single_checks() {
    let out = fbsfc(&["validate", "--check", "sfc-oracle"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let oracle = r.iter().find(|x| x["test"] == "sfc-oracle").unwrap();
    assert!(oracle["max_abs_error"].as_f64().unwrap() <= 1e-8);
    assert_eq!(oracle["pass"], true);
    assert_eq!(oracle.as_object().unwrap().len(), 4);

    let out = fbsfc(&["validate", "--check", "spatial-error", "--kappa", "25", "--beta", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)[0]["max_abs_error"].as_f64().unwrap() <= 1e-18);

    assert_eq!(fbsfc(&["validate", "--check", "structural"]).status.code(), Some(0));
    assert_eq!(fbsfc(&["validate", "--check", "bogus"]).status.code(), Some(2));
}

#[test]
fn truncation_check_reports_the_bessel_tail() {
    let out = fbsfc(&["validate", "--check", "truncation"]);
    assert_eq!(out.status.code(), Some(1));
    let failed: Vec<_> = report(&out).into_iter().filter(|x| x["pass"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["test"], "truncation-bessel");
    // a loose tolerance override turns the same report green
    assert_eq!(fbsfc(&["validate", "--check", "truncation", "--tol", "1e-14"]).status.code(), Some(0));
}
