//! Worked examples run through the in-process command layer.

use std::f64::consts::PI;

use serde_json::Value;

use confsym_cli::config::{Command, RunConfig};
use confsym_cli::{run, CliError, EXIT_USAGE, EXIT_VERIFY};

fn config(args: &str) -> RunConfig {
    let mut words = args.split_whitespace();
    let mut cfg = RunConfig::new(words.next().unwrap().parse::<Command>().unwrap());
    cfg.set_pairs(&words.collect::<Vec<_>>()).unwrap();
    cfg
}

fn ok(args: &str) -> Value {
    let out = run(&config(args)).unwrap_or_else(|e| panic!("`{args}`: {e}"));
    assert!(out.failures.is_empty(), "`{args}`: {:?}", out.failures);
    serde_json::from_str(&out.json).unwrap()
}

fn err(args: &str) -> CliError {
    match run(&config(args)) {
        Ok(_) => panic!("`{args}` should fail"),
        Err(e) => e,
    }
}

fn f(v: &Value) -> f64 {
    match v {
        Value::Number(n) => n.to_string().parse().unwrap(),
        other => panic!("not a number: {other}"),
    }
}

fn value(args: &str) -> f64 {
    f(&ok(args)["value"])
}

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a:.15e} vs {b:.15e}");
}

#[test]
fn special_functions() {
    close(value("invariants quantity=log-gamma x=5"), 24f64.ln(), 1e-13);
    close(value("invariants quantity=log-gamma x=0.5"), 0.5 * PI.ln(), 1e-13);
    close(value("invariants quantity=gamma-ratio a=4 b=2"), 6.0, 1e-13);
    assert_eq!(value("invariants quantity=gamma-ratio a=4 b=0"), 0.0);
    close(value("invariants quantity=gamma-ratio a=0.5 b=1.5"), 2.0, 1e-13);
    close(
        value("invariants quantity=bessel-k nu=0.5 x=1"),
        (PI / 2.0).sqrt() * (-1.0f64).exp(),
        1e-14,
    );
    let r = ok("invariants quantity=bessel-k nu=2 x=1");
    assert!(f(&r["recurrence_residual"]) <= 1e-10);
    assert_eq!(err("invariants quantity=log-gamma x=0").exit_code(), EXIT_USAGE);
}

#[test]
fn sphere_geometry() {
    let r = ok("invariants quantity=quadrature n=2 degree=8");
    close(f(&r["weight_sum"]), 4.0 * PI, 1e-12);
    let r = ok("invariants quantity=quadrature n=4 degree=4");
    close(f(&r["weight_sum"]), 8.0 * PI * PI / 3.0, 1e-12);

    let r = ok("invariants quantity=transform n=2 l=3 input=constant c=1");
    close(f(&r["coefficient_k0"]), (4.0 * PI).sqrt(), 1e-12);
    let r = ok("invariants quantity=transform n=2 l=3 input=coordinate");
    let e: Vec<f64> = r["degree_energy"].as_array().unwrap().iter().map(f).collect();
    assert!(e[0].abs() < 1e-20 && e[2] < 1e-20 && e[3] < 1e-20 && e[1] > 1.0);
    assert!(f(&ok("invariants quantity=transform n=2 l=3")["round_trip_error"]) < 1e-10);

    let r = ok("invariants quantity=mobius n=2 map=rotation a=1 b=3 theta=0.4");
    close(f(&r["factor"]), 1.0, 1e-14);
    let img: Vec<f64> = r["image"].as_array().unwrap().iter().map(f).collect();
    close(img[0].hypot(img[2]), 1.0, 1e-14);
    let r = ok("invariants quantity=mobius n=3 map=identity y=0,0.6,0,0.8");
    assert_eq!(f(&r["factor"]), 1.0);

    let r = ok("invariants quantity=conformal-fields n=2");
    assert_eq!(r["count"], 6);
    assert_eq!(f(&r["max_killing_omega"]), 0.0);
    assert_eq!(err("invariants quantity=mobius map=rotation a=0 b=2 theta=1").exit_code(), EXIT_USAGE);
}

#[test]
fn model_spectra() {
    assert_eq!(ok("invariants quantity=harmonic-dim p=3 k=2")["value"], 5);
    assert_eq!(ok("invariants quantity=harmonic-dim p=1 k=2")["value"], 0);
    assert_eq!(ok("invariants quantity=laplace-eig n=2 k=3")["value"], 12);
    assert_eq!(ok("invariants quantity=yamabe-eig n=6 k=1")["value"], "12");
    assert_eq!(ok("invariants quantity=gjms-eig n=4 r=2 k=1")["value"], "24");
    assert_eq!(ok("invariants quantity=log-sobolev n=2 k=2")["value"], "3/2");
    assert_eq!(ok("invariants quantity=hessian n=4 j=0 q=2")["value"], 2880);
    let h = ok("invariants quantity=helmholtz n=6");
    assert_eq!(h["value"], serde_json::json!([-4, -6]));
    close(value("invariants quantity=knapp-stein n=2 p=1.5 k=1"), 0.5, 1e-13);
    close(value("invariants quantity=hls-constant n=5 p=1"), 1.0, 1e-13);

    let r = ok("spectrum op=laplace n=2 kmax=2");
    assert_eq!(
        r["lines"],
        serde_json::json!([
            {"k": 0, "eig": "0", "mult": 1},
            {"k": 1, "eig": "2", "mult": 3},
            {"k": 2, "eig": "6", "mult": 5}
        ])
    );
    let r = ok("spectrum op=laplace n=2 kmax=400 t=1");
    close(f(&r["heat_trace"]["value"]), 1.418443, 1e-6);
}

#[test]
fn zeta_and_heat() {
    let r = ok("zeta op=laplace n=2");
    close(f(&r["determinant"]), 3.1953, 1e-4);
    assert_eq!(r["kernel_dimension"], 1);
    let r = ok("zeta op=custom eigen=0,1 mult=1 kstart=1");
    close(f(&r["determinant"]), (2.0 * PI).sqrt(), 1e-6);
    let r = ok("zeta op=custom eigen=0,1 mult=1 kstart=1 s=2");
    close(f(&r["at_s"]["value"]), PI * PI / 6.0, 1e-10);
    // det(cΔ) = c^{ζ(0)} det Δ
    let a = ok("zeta op=yamabe n=4");
    let b = ok("zeta op=yamabe n=4 scale=3");
    close(
        f(&b["log_det"]) - f(&a["log_det"]),
        3f64.ln() * f(&a["zeta0"]),
        1e-9,
    );

    let r = ok("heat-fit op=yamabe n=4");
    close(f(&r["t0_coefficient"]["value"]), -1.0 / 90.0, 1e-6);
    let u0 = value("invariants quantity=heat-u i=0 n=3");
    close(u0, (4.0 * PI).powf(-1.5), 1e-15);
    let k = ok("invariants quantity=curvature n=4");
    assert_eq!(f(&k["value"]["scalar"]), 12.0);
    assert_eq!(f(&k["value"]["riemann_sq"]), 24.0);
}

#[test]
fn conformal_functionals() {
    for which in ["onofri", "log-sobolev"] {
        let r = ok(&format!("functional kind=deficit which={which} input=constant c=0.7"));
        assert!(f(&r["value"]).abs() <= 1e-10, "{which}: {}", r["value"]);
    }
    let r = ok("functional kind=polyakov input=mobius boost=0.8");
    assert!(f(&r["report"]["functional"]).abs() <= 1e-7);
    let r = ok("functional kind=polyakov input=zero");
    assert_eq!(f(&r["report"]["functional"]), 0.0);
    let r = ok("functional kind=beckner input=zero");
    assert_eq!(f(&r["report"]["s1"]), 0.0);
    assert_eq!(f(&r["report"]["s2"]), 0.0);
    // ∫ div X vanishes up to rounding on the symmetric rule
    let r = ok("functional kind=pohozaev input=zero");
    assert!(f(&r["max_residual"]) <= 1e-13);
    let r = ok("functional kind=curvature n=2 input=zero");
    assert_eq!(f(&r["min"]), 1.0);
    assert_eq!(f(&r["max"]), 1.0);

    let r = ok("optimize functional=onofri start=zero band=2");
    assert_eq!(r["iterations"], 0);
    assert_eq!(f(&r["value"]), 0.0);
    let r = ok("optimize functional=onofri start=mobius boost=0.6");
    assert!(f(&r["trajectory"]["max_value"]) <= 1e-6);

    // an unmet threshold fails the check, not the run
    let out = run(&config("cone kind=residual min_order=5")).unwrap();
    assert_eq!(out.exit_code(), EXIT_VERIFY);
    assert!(out.json.contains("\"status\": \"verification_failed\""));
    assert_eq!(err("functional kind=nope").exit_code(), EXIT_USAGE);
    assert_eq!(err("functional kind=variation h=0").exit_code(), EXIT_USAGE);
}

#[test]
fn branching_commands() {
    let r = ok("branch p=4 q=6 q1=3 q2=3 cutoff=12");
    assert_eq!(r["equal"], true);
    let r = ok("branch kind=minrep p=4 q=6 cutoff=3");
    let pairs: Vec<(u64, u64)> = r["ktypes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|k| (k[0].as_u64().unwrap(), k[1].as_u64().unwrap()))
        .collect();
    assert_eq!(pairs, [(1, 0), (2, 1), (3, 2)]);
    let r = ok("branch kind=harmonic q1=2 q2=2 b=2");
    assert_eq!(r["summands"].as_array().unwrap().len(), 4);
    assert_eq!(err("branch kind=elliptic p=4 q=2 lambda=1/2 cutoff=4").exit_code(), EXIT_USAGE);
    let r = ok("branch kind=elliptic p=4 q=2 lambda=0 cutoff=4");
    assert_eq!(r["ktypes"].as_array().unwrap().len(), 9);
    assert_eq!(err("branch p=4 q=5 q1=2 q2=3").exit_code(), EXIT_USAGE);
    assert_eq!(err("branch p=4 q=4 q1=2 q2=2 bogus=1").exit_code(), EXIT_USAGE);
}

#[test]
fn cone_commands() {
    let r = ok("cone kind=embedding z1=0,0 z2=0,0");
    let pt: Vec<f64> = r["point"].as_array().unwrap().iter().map(f).collect();
    assert_eq!(pt, [1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    close(value("cone kind=measure p=3 q=3 r=0.8"), 0.4, 1e-15);
    close(value("cone kind=measure p=2 q=2 r=0.5"), 1.0, 1e-15);
    let r = ok("cone kind=v0 p=3 q=3 r=30");
    assert!(f(&r["envelope"]).is_finite() && f(&r["envelope"]) > 0.0);

    // null plane wave: □f vanishes; unit-symbol wave: □f = −f
    let r = ok("cone kind=plane-wave p=3 zeta=0.6,0.8,1,0");
    assert!(f(&r["residual"]["residual"]) < 1e-5);
    let r = ok("cone kind=plane-wave p=3 zeta=1,1,1,0");
    close(f(&r["q_zeta"]), 1.0, 1e-15);
    assert!(f(&r["symbol_gap"]) < 1e-5);
    close(f(&r["residual"]["residual"]), 1.0, 1e-5);
}
