//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p confsym-cli --test acceptance -- --nocapture` to
//! see the summary.

use std::time::{Duration, Instant};

use num::{BigInt, BigRational, Zero};
use serde_json::Value;

use confsym::minrep::{
    branching_dimension_identity, branching_verify_compact, discrete_spectrum_params, harmonic_branching, HalfInt,
};
use confsym_cli::config::{parse_rational, Command, RunConfig};
use confsym_cli::run;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn config(args: &str) -> RunConfig {
    let mut words = args.split_whitespace();
    let command: Command = words.next().expect("command").parse().expect("known command");
    let mut cfg = RunConfig::new(command);
    let pairs: Vec<&str> = words.collect();
    cfg.set_pairs(&pairs).expect("key=value pairs");
    cfg
}

fn cli_seeded(args: &str, seed: u64) -> Result<Value, String> {
    let mut cfg = config(args);
    cfg.seed = seed;
    let out = run(&cfg).map_err(|e| format!("`{args}`: {e}"))?;
    if !out.failures.is_empty() {
        return Err(format!("`{args}`: {}", out.failures.join("; ")));
    }
    serde_json::from_str(&out.json).map_err(|e| e.to_string())
}

fn cli(args: &str) -> Result<Value, String> {
    cli_seeded(args, 0)
}

fn num(v: &Value, path: &str) -> f64 {
    let mut cur = v;
    for key in path.split('.') {
        cur = match key.parse::<usize>() {
            Ok(i) => &cur[i],
            Err(_) => &cur[key],
        };
    }
    match cur {
        Value::Number(n) => n.to_string().parse().expect("finite number"),
        other => panic!("{path} is not a number: {other}"),
    }
}

fn exact(v: &Value) -> BigRational {
    parse_rational("eig", v.as_str().expect("exact value is a string")).expect("rational")
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn within(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{label}: {got:.12e} vs {want:.12e} (tol {tol:.0e})"))
    }
}

fn deadline(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    if spent <= limit {
        Ok(())
    } else {
        Err(format!("took {spent:.2?}, limit {limit:?}"))
    }
}

fn heat_coefficient(rep: &Value, power: f64) -> f64 {
    let list = rep["coefficients"].as_array().expect("coefficients");
    let i = list
        .iter()
        .position(|c| (num(c, "power") - power).abs() < 1e-12)
        .expect("power present in fit");
    num(&list[i], "value")
}

fn c1_heat_s2() -> Check {
    let start = Instant::now();
    let r = cli("heat-fit op=laplace n=2")?;
    let (a, b) = (heat_coefficient(&r, -1.0), heat_coefficient(&r, 0.0));
    within("t^-1", a, 1.0, 1e-6)?;
    within("t^0", b, 1.0 / 3.0, 1e-6)?;
    deadline(start, Duration::from_secs(10))?;
    Ok(format!("a0 = {a:.10}, a1 = {b:.10}"))
}

fn c2_conformal_index() -> Check {
    let r = cli("zeta op=yamabe n=4")?;
    let z = num(&r, "zeta0");
    let u = num(&r, "heat_invariant.integrated_u");
    within("zeta(0)", z, -1.0 / 90.0, 1e-8)?;
    within("integrated U2", u, -1.0 / 90.0, 1e-8)?;
    within("zeta(0) vs integrated U2", z, u, 1e-9)?;
    Ok(format!("zeta(0) = {z:.12}, U2 = {u:.12}"))
}

fn c3_odd_vanishing() -> Check {
    let mut notes = Vec::new();
    for n in [3, 5] {
        let r = cli(&format!("heat-fit op=yamabe n={n}"))?;
        let c = num(&r, "t0_coefficient.value");
        within(&format!("S^{n} t^0"), c, 0.0, 1e-6)?;
        notes.push(format!("S^{n}: {c:.1e}"));
    }
    Ok(notes.join(", "))
}

fn c4_exact_spectra() -> Check {
    let start = Instant::now();
    for n in 3..=10i64 {
        for op in ["yamabe", "gjms r=1"] {
            let r = cli(&format!("spectrum op={op} n={n} kmax=50"))?;
            for (k, line) in r["lines"].as_array().expect("lines").iter().enumerate() {
                // (k + n/2)(k + n/2 − 1) = (2k + n)(2k + n − 2)/4
                let k = k as i64;
                let want = BigRational::new(BigInt::from((2 * k + n) * (2 * k + n - 2)), BigInt::from(4));
                if exact(&line["eig"]) != want {
                    return Err(format!("{op} n={n} k={k}: {} vs {want}", line["eig"]));
                }
            }
        }
    }
    let r = cli("spectrum op=paneitz n=4 kmax=50")?;
    for (k, line) in r["lines"].as_array().expect("lines").iter().enumerate() {
        let k = k as i64;
        if exact(&line["eig"]) != int(k * (k + 1) * (k + 2) * (k + 3)) {
            return Err(format!("Paneitz k={k}: {}", line["eig"]));
        }
    }
    deadline(start, Duration::from_secs(1))?;
    Ok(format!("n = 3..10, k = 0..50 in {:.2?}", start.elapsed()))
}

fn c5_knapp_stein_hls() -> Check {
    for n in [2, 3, 4] {
        for p in [1.2, 1.5, 1.8] {
            let r = cli(&format!("spectrum op=knapp-stein n={n} p={p} kmax=200"))?;
            let eig: Vec<f64> = r["lines"]
                .as_array()
                .expect("lines")
                .iter()
                .map(|l| num(l, "eig"))
                .collect();
            if eig[0] != 1.0 {
                return Err(format!("gamma_0 = {} for n={n} p={p}", eig[0]));
            }
            if let Some(k) = eig.windows(2).position(|w| w[1] >= w[0]) {
                return Err(format!("gamma not decreasing at k={k} for n={n} p={p}"));
            }
        }
    }
    let mut worst = f64::INFINITY;
    let mut at_one = 0.0f64;
    for p in [1.2, 1.5, 1.8] {
        let r = cli(&format!("functional kind=deficit which=hls p={p} band=4 samples=100"))?;
        worst = worst.min(num(&r, "min_value"));
        let one = cli(&format!("functional kind=deficit which=hls p={p} input=constant c=1"))?;
        at_one = at_one.max(num(&one, "value").abs());
    }
    if worst < -1e-8 {
        return Err(format!("HLS deficit {worst:.3e}"));
    }
    if at_one > 1e-10 {
        return Err(format!("HLS deficit at F = 1 is {at_one:.3e}"));
    }
    Ok(format!("min deficit {worst:.3e}, |deficit(1)| {at_one:.1e}"))
}

fn c6_onofri() -> Check {
    let start = Instant::now();
    let r = cli("functional kind=deficit which=onofri band=4 samples=100")?;
    let min = num(&r, "min_value");
    if min < -1e-8 {
        return Err(format!("Onofri deficit {min:.3e}"));
    }
    let mut mobius = 0.0f64;
    for i in 0..20 {
        let boost = 0.1 + 0.07 * i as f64;
        let theta = 0.37 * i as f64;
        let axis = 1 + i % 3;
        let r = cli(&format!(
            "functional kind=deficit which=onofri input=mobius boost={boost} theta={theta} axis={axis}"
        ))?;
        mobius = mobius.max(num(&r, "value").abs());
    }
    if mobius > 1e-6 {
        return Err(format!("Onofri deficit {mobius:.3e} on a Möbius factor"));
    }
    let mut opt = 0.0f64;
    for seed in 0..5 {
        let r = cli_seeded("optimize functional=onofri start=random band=2 max_iter=500", seed)?;
        let v = num(&r, "value");
        if v > 1e-5 {
            return Err(format!("optimizer from seed {seed} stopped at {v:.3e}"));
        }
        opt = opt.max(v);
    }
    deadline(start, Duration::from_secs(60))?;
    Ok(format!("min {min:.3e}, Möbius max {mobius:.1e}, optimizer max {opt:.1e}"))
}

fn c7_beckner() -> Check {
    let r = cli("functional kind=beckner band=2 samples=100")?;
    let (s1, s2) = (num(&r, "min_s1"), num(&r, "min_s2"));
    if s1 < -1e-8 || s2 < -1e-8 {
        return Err(format!("S1 {s1:.3e}, S2 {s2:.3e}"));
    }
    Ok(format!("min S1 {s1:.3e}, min S2 {s2:.3e}"))
}

fn c8_covariance_curvature() -> Check {
    let mut cov = 0.0f64;
    for n in [2, 4] {
        let r = cli(&format!("functional kind=covariance n={n} band=3 samples=10"))?;
        cov = cov.max(num(&r, "residual"));
    }
    if cov > 1e-6 {
        return Err(format!("covariance residual {cov:.3e}"));
    }
    let gb = num(&cli("functional kind=gauss-bonnet samples=20")?, "max_gap");
    let gbm = num(&cli("functional kind=gauss-bonnet input=mobius boost=0.9 theta=0.4")?, "max_gap");
    let gb = gb.max(gbm);
    if gb > 1e-7 {
        return Err(format!("Gauss–Bonnet gap {gb:.3e}"));
    }
    let mut poh = 0.0f64;
    for n in [2, 3] {
        let r = cli(&format!("functional kind=pohozaev n={n} samples=20"))?;
        poh = poh.max(num(&r, "max_residual"));
    }
    if poh > 1e-7 {
        return Err(format!("Pohozaev residual {poh:.3e}"));
    }
    Ok(format!("covariance {cov:.1e}, Gauss–Bonnet {gb:.1e}, Pohozaev {poh:.1e}"))
}

fn c9_variation() -> Check {
    let r = cli("functional kind=variation band=2 samples=10")?;
    let gap = num(&r, "max_gap");
    if gap > 1e-5 {
        return Err(format!("gap {gap:.3e}"));
    }
    Ok(format!("max gap {gap:.3e}"))
}

/// dim P^b(ℝ^m), P^b = homogeneous polynomials of degree b.
fn poly_dim(m: u32, b: i64) -> BigInt {
    if b < 0 {
        return BigInt::zero();
    }
    let mut acc = BigInt::from(1);
    for i in 1..m as i64 {
        acc = acc * BigInt::from(b + i) / BigInt::from(i);
    }
    acc
}

fn harmonic_dim_oracle(m: u32, b: u32) -> BigInt {
    if m == 1 {
        return BigInt::from(u32::from(b <= 1));
    }
    poly_dim(m, b as i64) - poly_dim(m, b as i64 - 2)
}

fn c10_branching() -> Check {
    let start = Instant::now();
    let mut cases = 0;
    // admissible: p, q ≥ 3 with p + q even
    for p in 3..=10u32 {
        for q in 3..=10u32 {
            if (p + q) % 2 != 0 {
                continue;
            }
            for q1 in 1..q {
                let r = branching_verify_compact(p, q, q1, q - q1, 12).map_err(|e| e.to_string())?;
                if !r.equal {
                    return Err(format!("({p},{q},{q1},{}) mismatch at {:?}", q - q1, r.first_mismatch));
                }
                cases += 1;
            }
        }
    }
    deadline(start, Duration::from_secs(30))?;
    for q1 in 1..=8u32 {
        for q2 in 1..=8u32 {
            for b in 0..=12u32 {
                let (lhs, rhs) = branching_dimension_identity(q1, q2, b).map_err(|e| e.to_string())?;
                let oracle: BigInt = harmonic_branching(q1, q2, b)
                    .map_err(|e| e.to_string())?
                    .iter()
                    .map(|&(b1, b2)| harmonic_dim_oracle(q1, b1) * harmonic_dim_oracle(q2, b2))
                    .sum();
                if lhs != rhs || oracle != harmonic_dim_oracle(q1 + q2, b) {
                    return Err(format!("dimension identity fails at ({q1},{q2},{b})"));
                }
            }
        }
    }
    let r = cli("branch p=6 q=4 q1=3 q2=1 cutoff=10")?;
    let ls: Vec<u64> = r["contributing_l"]
        .as_array()
        .expect("contributing_l")
        .iter()
        .map(|v| v.as_u64().expect("integer"))
        .collect();
    if r["equal"] != Value::Bool(true) || ls != [0, 1] {
        return Err(format!("q'' = 1 case: equal {}, l = {ls:?}", r["equal"]));
    }
    Ok(format!("{cases} splits equal in {:.2?}; q'' = 1 gives l = {ls:?}", start.elapsed()))
}

fn discrete(args: &str) -> Result<Vec<(BigRational, String)>, String> {
    let r = cli(&format!("discrete-spectrum {args}"))?;
    Ok(r["params"]
        .as_array()
        .expect("params")
        .iter()
        .map(|d| (exact(&d["lambda"]), d["orientation"].as_str().expect("orientation").to_string()))
        .collect())
}

fn both(lambdas: &[BigRational]) -> Vec<(BigRational, String)> {
    lambdas
        .iter()
        .flat_map(|l| [(l.clone(), "+-".to_string()), (l.clone(), "-+".to_string())])
        .collect()
}

fn c11_discrete_spectrum() -> Check {
    let integers: Vec<BigRational> = (2..=5).map(int).collect();
    let halves: Vec<BigRational> = [3, 5, 7, 9]
        .iter()
        .map(|&t| BigRational::new(BigInt::from(t), BigInt::from(2)))
        .collect();
    let a = discrete("p1=2 q1=2 p2=2 q2=2 lambda_max=5")?;
    let b = discrete("p1=3 q1=2 p2=2 q2=3 lambda_max=5")?;
    let c = discrete("p1=3 q1=2 p2=2 q2=2 lambda_max=5");
    if a != both(&integers) {
        return Err(format!("(2,2,2,2): {a:?}"));
    }
    if b != both(&halves) {
        return Err(format!("(3,2,2,3): {b:?}"));
    }
    // mixed parities on the two factors give an empty list, not an error
    if !c?.is_empty() || !discrete_spectrum_params(3, 2, 2, 2, HalfInt::from_int(5)).is_empty() {
        return Err("incompatible parities gave a non-empty list".into());
    }
    let d = discrete("p1=3 q1=2 p2=3 q2=2 lambda_max=5")?;
    if d != both(&halves) {
        return Err(format!("(3,2,3,2): {d:?}"));
    }
    Ok("integer, half-integer and incompatible cases match".into())
}

fn c12_flat_model() -> Check {
    let mut orders = Vec::new();
    for (p, q) in [(3, 3), (4, 2), (4, 4), (5, 3)] {
        let r = cli(&format!("cone kind=residual p={p} q={q} min_order=1.9"))?;
        let order = num(&r, "report.order");
        if order < 1.9 {
            return Err(format!("order {order:.3} for ({p},{q})"));
        }
        orders.push(order);
        let v = cli(&format!("cone kind=v0-norm p={p} q={q}"))?;
        let norm = num(&v, "norm.norm_sq");
        let change = num(&v, "norm.refinement_change");
        if !norm.is_finite() || norm <= 0.0 || change > 1e-6 {
            return Err(format!("v0 norm {norm} with refinement change {change:.2e} for ({p},{q})"));
        }
    }
    let mut cfg = config("cone kind=embedding z1=1/3,-2,7/5 z2=5/2,1/7");
    cfg.exact = true;
    let out = run(&cfg).map_err(|e| e.to_string())?;
    let r: Value = serde_json::from_str(&out.json).map_err(|e| e.to_string())?;
    if r["null_defect"] != Value::String("0".into()) || !out.failures.is_empty() {
        return Err(format!("exact null defect {}", r["null_defect"]));
    }
    let min = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(format!("min order {min:.3}; v0 norms grid-stable; exact null defect 0"))
}

fn c13_determinism() -> Check {
    let cases = [
        "zeta op=yamabe n=4",
        "functional kind=deficit which=onofri samples=5",
        "optimize functional=onofri band=2",
        "branch p=4 q=4 q1=2 q2=2 cutoff=12",
        "cone",
    ];
    for args in cases {
        let mut cfg = config(args);
        cfg.seed = 7;
        cfg.threads = 3;
        let a = run(&cfg).map_err(|e| e.to_string())?;
        let b = run(&cfg).map_err(|e| e.to_string())?;
        if a.json != b.json || a.csv != b.csv {
            return Err(format!("`{args}` is not reproducible"));
        }
    }
    let bin = env!("CARGO_BIN_EXE_confsym");
    let args = ["optimize", "functional=onofri", "band=2", "--seed", "11", "--threads", "2"];
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|_| std::process::Command::new(bin).args(args).output().expect("binary runs").stdout)
        .collect();
    if outputs[0] != outputs[1] || outputs[0].is_empty() {
        return Err("binary output differs between runs".into());
    }
    Ok(format!("{} configurations byte-identical", cases.len() + 1))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 13] = [
        ("1 heat coefficients on S^2", c1_heat_s2),
        ("2 conformal index on S^4", c2_conformal_index),
        ("3 odd-dimension vanishing", c3_odd_vanishing),
        ("4 exact spectral identities", c4_exact_spectra),
        ("5 Knapp-Stein and HLS", c5_knapp_stein_hls),
        ("6 Onofri endpoint", c6_onofri),
        ("7 Beckner functionals on S^4", c7_beckner),
        ("8 covariance and curvature", c8_covariance_curvature),
        ("9 variation law", c9_variation),
        ("10 branching", c10_branching),
        ("11 discrete spectrum", c11_discrete_spectrum),
        ("12 flat model", c12_flat_model),
        ("13 determinism", c13_determinism),
    ];
    println!();
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let start = Instant::now();
        match check() {
            Ok(note) => println!("PASS {name} ({:.2?}): {note}", start.elapsed()),
            Err(why) => {
                println!("FAIL {name} ({:.2?}): {why}", start.elapsed());
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
