use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use confsym::specfun::{bessel_k, gamma_ratio, log_gamma};
use confsym::spectra::{
    gjms_eigenvalue, gjms_factorization_poly, gjms_normalization, harmonic_dim, helmholtz_numbers,
    hls_constant, knapp_stein_gamma, laplace_eigenvalue, log_sobolev_coeff,
    universal_hessian_eigenvalue, yamabe_eigenvalue,
};
use confsym::sphere::{
    conformal_vector_fields, sphere_volume, BandlimitedFunction, ConformalMap, QuadratureRule,
    SphereGrid,
};
use confsym::zeta_heat::{heat_invariant_u, integrated_invariant, round_sphere_curvature};

use crate::config::{Params, RunConfig};
use crate::report::{bigint, float, obj, rational, Report};
use crate::CliError;

const QUANTITIES: &[&str] = &[
    "log-gamma",
    "gamma-ratio",
    "bessel-k",
    "hls-constant",
    "harmonic-dim",
    "laplace-eig",
    "yamabe-eig",
    "gjms-eig",
    "gjms-normalization",
    "knapp-stein",
    "log-sobolev",
    "hessian",
    "helmholtz",
    "curvature",
    "heat-u",
    "sphere-volume",
    "quadrature",
    "conformal-fields",
    "mobius",
    "transform",
];

/// Named closed-form and exact quantities.
pub fn invariants(cfg: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    let p = cfg.params();
    let q = p
        .raw("quantity")
        .ok_or_else(|| CliError::Usage(format!("missing quantity=({})", QUANTITIES.join("|"))))?;
    rep.put("quantity", q);
    let accept = |keys: &[&str]| {
        let mut all = vec!["quantity"];
        all.extend_from_slice(keys);
        p.only(&all)
    };
    match q {
        "log-gamma" => {
            accept(&["x"])?;
            rep.put_f64("value", log_gamma(p.f64_req("x")?)?);
        }
        "gamma-ratio" => {
            accept(&["a", "b"])?;
            rep.put_f64("value", gamma_ratio(p.f64_req("a")?, p.f64_req("b")?)?);
        }
        "bessel-k" => {
            accept(&["nu", "x"])?;
            let (nu, x) = (p.f64_req("nu")?, p.f64_req("x")?);
            let v = bessel_k(nu, x)?;
            rep.put_f64("value", v);
            // K_{ν+1} − K_{ν−1} − (2ν/x)K_ν = 0
            let rec = bessel_k(nu + 1.0, x)? - bessel_k(nu - 1.0, x)? - 2.0 * nu / x * v;
            rep.put_f64("recurrence_residual", rec.abs() / bessel_k(nu + 1.0, x)?);
        }
        "hls-constant" => {
            accept(&["n", "p"])?;
            rep.put_f64("value", hls_constant(p.u32_req("n")?, p.f64_req("p")?)?);
        }
        "harmonic-dim" => {
            accept(&["p", "k"])?;
            rep.put("value", bigint(&harmonic_dim(p.u32_req("p")?, p.u32_req("k")?)));
        }
        "laplace-eig" => {
            accept(&["n", "k"])?;
            rep.put("value", bigint(&laplace_eigenvalue(p.u32_req("n")?, p.u32_req("k")?)));
        }
        "yamabe-eig" => {
            accept(&["n", "k"])?;
            rep.put("value", rational(&yamabe_eigenvalue(p.u32_req("n")?, p.u32_req("k")?)));
        }
        "gjms-eig" => {
            accept(&["n", "r", "k"])?;
            let v = gjms_eigenvalue(p.u32_req("n")?, p.u32_req("r")?, p.u32_req("k")?)?;
            rep.put("value", rational(&v));
        }
        "gjms-normalization" => {
            accept(&["n", "r"])?;
            rep.put_f64("value", gjms_normalization(p.u32_req("n")?, p.u32_req("r")?)?);
        }
        "knapp-stein" => {
            accept(&["n", "p", "k"])?;
            rep.put_f64("value", knapp_stein_gamma(p.u32_req("n")?, p.f64_req("p")?, p.u32_req("k")?)?);
        }
        "log-sobolev" => {
            accept(&["n", "k"])?;
            rep.put("value", rational(&log_sobolev_coeff(p.u32_req("n")?, p.u32_req("k")?)?));
        }
        "hessian" => {
            accept(&["n", "j", "q"])?;
            let v = universal_hessian_eigenvalue(p.u32_req("n")?, p.u32_req("j")?, p.u32_req("q")?)?;
            rep.put("value", bigint(&v));
        }
        "helmholtz" => {
            accept(&["n"])?;
            let n = p.u32_req("n")?;
            let nums: Vec<Value> = helmholtz_numbers(n)?.iter().map(bigint).collect();
            let poly: Vec<Value> = gjms_factorization_poly(n)?.iter().map(bigint).collect();
            rep.put("value", nums);
            rep.put("factorization_coefficients", poly);
        }
        "curvature" => {
            accept(&["n"])?;
            let (k, r2, rr2, lk) = round_sphere_curvature(p.u32_req("n")?);
            rep.put(
                "value",
                obj(vec![
                    ("scalar", float(k)),
                    ("ricci_sq", float(r2)),
                    ("riemann_sq", float(rr2)),
                    ("laplacian_scalar", float(lk)),
                ]),
            );
        }
        "heat-u" => {
            accept(&["i", "n", "a"])?;
            let (i, n, a) = (p.u32_req("i")?, p.u32_req("n")?, p.f64_or("a", 0.0)?);
            rep.put_f64("value", heat_invariant_u(i, n, a, round_sphere_curvature(n))?);
            rep.put_f64("integrated", integrated_invariant(i, n, a)?);
        }
        "sphere-volume" => {
            accept(&["n"])?;
            rep.put_f64("value", sphere_volume(p.u32_req("n")?));
        }
        "quadrature" => {
            accept(&["n", "degree"])?;
            let n = p.u32_req("n")?;
            let rule = QuadratureRule::with_degree(n, p.u32_req("degree")?)?;
            rep.put("nodes", rule.len());
            rep.put("exactness_degree", rule.exactness_degree);
            rep.put_f64("weight_sum", rule.volume());
            rep.put_f64("volume", sphere_volume(n));
        }
        "conformal-fields" => {
            accept(&["n"])?;
            conformal_fields(&p, rep)?;
        }
        "mobius" => {
            accept(&["n", "map", "a", "b", "theta", "axis", "s", "y"])?;
            mobius(&p, rep)?;
        }
        "transform" => {
            accept(&["n", "l", "input", "c", "axis"])?;
            transform(cfg, &p, rep)?;
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown quantity '{other}' (expected one of {})",
                QUANTITIES.join("|")
            )))
        }
    }
    Ok(())
}

fn conformal_fields(p: &Params, rep: &mut Report) -> Result<(), CliError> {
    let n = p.u32_req("n")?;
    let fields = conformal_vector_fields(n)?;
    let rule = QuadratureRule::with_degree(n, 6)?;
    let mut killing_omega = 0.0f64;
    for f in fields.iter().filter(|f| f.is_killing()) {
        for i in 0..rule.len() {
            killing_omega = killing_omega.max(f.omega(rule.node(i)).abs());
        }
    }
    rep.put("count", fields.len());
    rep.put("labels", fields.iter().map(|f| Value::from(f.label())).collect::<Vec<_>>());
    rep.put_f64("max_killing_omega", killing_omega);
    Ok(())
}

/// Indices on the command line are 1-based, matching the field labels.
fn index(p: &Params, key: &str, dim: usize) -> Result<usize, CliError> {
    let i = p.u32_req(key)? as usize;
    if i == 0 || i > dim {
        return Err(CliError::Usage(format!("{key} = {i} must lie in 1..={dim}")));
    }
    Ok(i - 1)
}

fn mobius(p: &Params, rep: &mut Report) -> Result<(), CliError> {
    let n = p.u32_or("n", 2)?;
    let dim = n as usize + 1;
    let map = match p.choice("map", &["identity", "rotation", "boost"], "identity")? {
        "identity" => ConformalMap::identity(n),
        "rotation" => ConformalMap::rotation(
            n,
            index(p, "a", dim)?,
            index(p, "b", dim)?,
            p.f64_req("theta")?,
        )?,
        _ => ConformalMap::boost(n, index(p, "axis", dim)?, p.f64_req("s")?)?,
    };
    let y = match p.f64_list("y")? {
        Some(y) => y,
        None => {
            let mut y = vec![0.0; dim];
            y[dim - 1] = 1.0;
            y
        }
    };
    if y.len() != dim {
        return Err(CliError::Usage(format!("y needs {dim} coordinates")));
    }
    let norm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(CliError::Usage(format!("y must be a unit vector (|y| = {norm})")));
    }
    let (img, factor) = map.act(&y)?;
    rep.put("image", img.iter().map(|v| float(*v)).collect::<Vec<_>>());
    rep.put_f64("factor", factor);
    rep.put_f64("form_defect", map.form_defect());
    Ok(())
}

fn transform(cfg: &RunConfig, p: &Params, rep: &mut Report) -> Result<(), CliError> {
    let n = p.u32_or("n", 2)?;
    let l = p.u32_or("l", 3)?;
    let grid = SphereGrid::new(n, l, 2 * l + 2, false)?;
    let dim = n as usize + 1;
    let input = p.choice("input", &["constant", "coordinate", "random"], "random")?;
    let samples: Vec<f64> = match input {
        "constant" => vec![p.f64_or("c", 1.0)?; grid.len()],
        "coordinate" => {
            let a = match p.raw("axis") {
                Some(_) => index(p, "axis", dim)?,
                None => dim - 1,
            };
            let c = p.f64_or("c", 1.0)?;
            (0..grid.len()).map(|i| c * grid.rule.node(i)[a]).collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let f = BandlimitedFunction::random(n, l, p.f64_or("c", 1.0)?, &mut rng);
            grid.synthesize_nodes(&f)
        }
    };
    let f = grid.analyze(&samples, 1e-10)?;
    let back = grid.synthesize_nodes(&f);
    let err = samples
        .iter()
        .zip(&back)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    rep.put("input", input);
    rep.put_f64("coefficient_k0", f.coeffs[0]);
    rep.put(
        "degree_energy",
        (0..=l).map(|k| float(f.degree_energy(k))).collect::<Vec<_>>(),
    );
    rep.put_f64("round_trip_error", err);
    Ok(())
}
