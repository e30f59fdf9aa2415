use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use confsym::conformal_lab::*;
use confsym::sphere::{conformal_vector_fields, BandlimitedFunction, ConformalMap, NodalJet, SphereGrid};

use crate::config::{Params, RunConfig};
use crate::report::{float, obj, Report};
use crate::CliError;

const KINDS: &[&str] = &[
    "deficit",
    "beckner",
    "covariance",
    "polyakov",
    "pohozaev",
    "variation",
    "gauss-bonnet",
    "curvature",
];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The Möbius map boost(axis, s) ∘ rotation(1, n+1, theta).
fn mobius_map(p: &Params, n: u32) -> Result<ConformalMap, CliError> {
    let dim = n as usize + 1;
    let axis = p.u32_or("axis", n + 1)? as usize;
    if axis == 0 || axis > dim {
        return Err(CliError::Usage(format!("axis must lie in 1..={dim}")));
    }
    let b = ConformalMap::boost(n, axis - 1, p.f64_or("boost", 0.5)?)?;
    let r = ConformalMap::rotation(n, 0, dim - 1, p.f64_or("theta", 0.0)?)?;
    Ok(b.compose(&r))
}

/// factor·ω_h projected onto the grid's band.
fn mobius_band(grid: &SphereGrid, map: &ConformalMap, factor: f64) -> Result<BandlimitedFunction, CliError> {
    let w = map.log_factor_nodal(&grid.rule)?;
    let samples: Vec<f64> = w.values.iter().map(|v| factor * v).collect();
    Ok(grid.analyze(&samples, 1e-10)?)
}

/// Band-limited input from input=zero|constant|random|coordinate|mobius.
fn band_input(
    p: &Params,
    grid: &SphereGrid,
    seed: u64,
    default_scale: f64,
    mobius_factor: f64,
) -> Result<BandlimitedFunction, CliError> {
    let (n, l) = (grid.n(), grid.l());
    Ok(match p.choice("input", &["zero", "constant", "random", "coordinate", "mobius"], "random")? {
        "zero" => BandlimitedFunction::zeros(n, l),
        "constant" => BandlimitedFunction::constant(n, l, p.f64_or("c", 1.0)?),
        "random" => BandlimitedFunction::random(n, l, p.f64_or("scale", default_scale)?, &mut rng(seed)),
        "coordinate" => {
            let c = p.f64_or("c", 1.0)?;
            let samples: Vec<f64> = (0..grid.len()).map(|i| c * grid.rule.node(i)[n as usize]).collect();
            grid.analyze(&samples, 1e-10)?
        }
        _ => mobius_band(grid, &mobius_map(p, n)?, mobius_factor)?,
    })
}

fn grid_for(p: &Params, n: u32, default_l: u32, grads: bool) -> Result<SphereGrid, CliError> {
    let mobius = p.str_or("input", "") == "mobius";
    let l = p.u32_or("band", if mobius { 32 } else { default_l })?;
    let degree = p.u32_or("degree", if mobius { 2 * l + 8 } else { default_degree(n, l) })?;
    Ok(SphereGrid::new(n, l, degree, grads)?)
}

pub fn functional(cfg: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    let p = cfg.params();
    let kind = p
        .raw("kind")
        .ok_or_else(|| CliError::Usage(format!("missing kind=({})", KINDS.join("|"))))?;
    rep.put("kind", kind);
    let common = ["kind", "n", "band", "degree", "input", "c", "scale", "boost", "axis", "theta", "samples", "tol"];
    let accept = |extra: &[&str]| {
        let mut all = common.to_vec();
        all.extend_from_slice(extra);
        p.only(&all)
    };
    let samples = p.usize_or("samples", 1)?.max(1);
    match kind {
        "deficit" => {
            accept(&["which", "p"])?;
            deficit(cfg, &p, samples, rep)
        }
        "beckner" => {
            accept(&["beta", "beta1", "beta2", "guard"])?;
            beckner(cfg, &p, samples, rep)
        }
        "covariance" => {
            accept(&[])?;
            covariance(cfg, &p, samples, rep)
        }
        "polyakov" => {
            accept(&[])?;
            polyakov(cfg, &p, rep)
        }
        "pohozaev" => {
            accept(&[])?;
            pohozaev(cfg, &p, samples, rep)
        }
        "variation" => {
            accept(&["h", "a", "step_tol"])?;
            variation(cfg, &p, samples, rep)
        }
        "gauss-bonnet" => {
            accept(&[])?;
            gauss_bonnet_run(cfg, &p, samples, rep)
        }
        "curvature" => {
            accept(&[])?;
            curvature(cfg, &p, rep)
        }
        other => Err(CliError::Usage(format!(
            "unknown kind '{other}' (expected one of {})",
            KINDS.join("|")
        ))),
    }
}

fn deficit(cfg: &RunConfig, p: &Params, samples: usize, rep: &mut Report) -> Result<(), CliError> {
    let n = p.u32_or("n", 2)?;
    let which = match p.choice("which", &["onofri", "log-sobolev", "hls"], "onofri")? {
        "onofri" => DeficitKind::OnofriEndpoint,
        "log-sobolev" => DeficitKind::LogSobolev,
        _ => DeficitKind::HlsSpectral { p: p.f64_or("p", 1.5)? },
    };
    let grid = grid_for(p, n, 4, false)?;
    let tol = p.f64_or("tol", DEFICIT_TOLERANCE)?;
    let mut values = Vec::with_capacity(samples);
    let mut first = None;
    for i in 0..samples {
        let mut f = band_input(p, &grid, cfg.seed + i as u64, 1.0, 2.0)?;
        if which == DeficitKind::LogSobolev {
            f = normalize_l2(&f)?;
        }
        let d = sharp_inequality_deficit(&grid, which, &f)?;
        values.push(d.value);
        if first.is_none() {
            first = Some(d);
        }
    }
    let first = first.expect("at least one sample");
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    rep.put("functional", first.functional.clone());
    rep.put("n", n);
    rep.put("band", grid.l());
    rep.put("samples", samples);
    rep.put_f64("value", first.value);
    rep.put_ser("terms", &first.terms);
    rep.put_f64("min_value", min);
    rep.put_f64("tolerance", tol);
    rep.check(min >= -tol, || format!("deficit {min:.3e} below −{tol:.1e}"));
    Ok(())
}

fn beckner(cfg: &RunConfig, p: &Params, samples: usize, rep: &mut Report) -> Result<(), CliError> {
    let mut beta = match p.choice("beta", &["yamabe", "dirac"], "yamabe")? {
        "yamabe" => BecknerBeta::yamabe(),
        _ => BecknerBeta::dirac_squared(),
    };
    beta.beta1 = p.f64_or("beta1", beta.beta1)?;
    beta.beta2 = p.f64_or("beta2", beta.beta2)?;
    let grid = grid_for(p, 4, 2, true)?;
    let tol = p.f64_or("tol", DEFICIT_TOLERANCE)?;
    let mut min1 = f64::INFINITY;
    let mut min2 = f64::INFINITY;
    let mut first = None;
    for i in 0..samples {
        let f = band_input(p, &grid, cfg.seed + i as u64, 0.5, 4.0)?;
        let r = beckner_functionals_s4(&grid, &f, beta)?;
        min1 = min1.min(r.s1);
        min2 = min2.min(r.s2);
        if first.is_none() {
            if p.bool_or("guard", false)? {
                let g = beckner_s2_guard(&f, 4 * grid.l().max(2), 1e-8)?;
                rep.put(
                    "guard",
                    obj(vec![("s2", float(g)), ("gap", float((g - r.s2).abs()))]),
                );
            }
            first = Some(r);
        }
    }
    rep.put("band", grid.l());
    rep.put("samples", samples);
    rep.put_ser("report", &first.expect("at least one sample"));
    rep.put_f64("min_s1", min1);
    rep.put_f64("min_s2", min2);
    rep.check(min1 >= -tol && min2 >= -tol, || {
        format!("Beckner functional below −{tol:.1e}: S₁ {min1:.3e}, S₂ {min2:.3e}")
    });
    Ok(())
}

fn covariance(cfg: &RunConfig, p: &Params, samples: usize, rep: &mut Report) -> Result<(), CliError> {
    let n = p.u32_or("n", 2)?;
    let grid = grid_for(p, n, 3, true)?;
    let l = grid.l();
    let tol = p.f64_or("tol", 1e-6)?;
    let mut worst = 0.0f64;
    for i in 0..samples {
        let seed = cfg.seed + i as u64;
        let om = band_input(p, &grid, seed, 0.3, 1.0)?;
        let f = BandlimitedFunction::random(n, l, 1.0, &mut rng(seed ^ 0x9e37_79b9));
        worst = worst.max(yamabe_covariance_residual(&grid, &om, &f)?);
    }
    rep.put("n", n);
    rep.put("band", l);
    rep.put("samples", samples);
    rep.put_f64("residual", worst);
    rep.check(worst <= tol, || format!("covariance residual {worst:.3e} > {tol:.1e}"));
    Ok(())
}

/// Nodal jet of the input; Möbius factors use the closed-form jet.
fn omega_jet(p: &Params, grid: &SphereGrid, seed: u64) -> Result<NodalJet, CliError> {
    if p.str_or("input", "") == "mobius" {
        return Ok(mobius_map(p, grid.n())?.log_factor_nodal(&grid.rule)?);
    }
    let om = band_input(p, grid, seed, 0.3, 1.0)?;
    Ok(grid.jet(&om)?)
}

/// Jet grids stay at the default band even for Möbius inputs: the jet is
/// exact there, only the rule must resolve it.
fn jet_grid(p: &Params, n: u32, default_l: u32) -> Result<SphereGrid, CliError> {
    jet_grid_min(p, n, default_l, 0)
}

fn jet_grid_min(p: &Params, n: u32, default_l: u32, min_degree: u32) -> Result<SphereGrid, CliError> {
    let l = p.u32_or("band", default_l)?;
    let mobius = p.str_or("input", "") == "mobius";
    let degree = p.u32_or("degree", if mobius { 120 } else { default_degree(n, l).max(min_degree) })?;
    Ok(SphereGrid::new(n, l, degree, true)?)
}

fn polyakov(cfg: &RunConfig, p: &Params, rep: &mut Report) -> Result<(), CliError> {
    let grid = jet_grid(p, 2, 2)?;
    let w = omega_jet(p, &grid, cfg.seed)?;
    let r = polyakov_report(&grid, &w)?;
    rep.put_ser("report", &r);
    if p.str_or("input", "") == "mobius" || p.str_or("input", "") == "zero" {
        let tol = p.f64_or("tol", 1e-7)?;
        rep.check(r.functional.abs() <= tol, || {
            format!("Polyakov functional {:.3e} on a Möbius factor", r.functional)
        });
    }
    Ok(())
}

fn pohozaev(cfg: &RunConfig, p: &Params, samples: usize, rep: &mut Report) -> Result<(), CliError> {
    let n = p.u32_or("n", 2)?;
    // e^{nω} times curvature powers needs a finer rule than the band alone
    // suggests once n > 2.
    let grid = jet_grid_min(p, n, 3, if n > 2 { 44 } else { 0 })?;
    let tol = p.f64_or("tol", 1e-7)?;
    let fields = conformal_vector_fields(n)?;
    let mut per_field = vec![0.0f64; fields.len()];
    for i in 0..samples {
        let w = omega_jet(p, &grid, cfg.seed + i as u64)?;
        for (j, x) in fields.iter().enumerate() {
            per_field[j] = per_field[j].max(pohozaev_residual(&grid, &w, x)?);
        }
    }
    let worst = per_field.iter().cloned().fold(0.0, f64::max);
    let list: Vec<Value> = fields
        .iter()
        .zip(&per_field)
        .map(|(x, r)| obj(vec![("field", Value::from(x.label())), ("residual", float(*r))]))
        .collect();
    rep.put("n", n);
    rep.put("samples", samples);
    rep.put("fields", list);
    rep.put_f64("max_residual", worst);
    rep.check(worst <= tol, || format!("Pohozaev residual {worst:.3e} > {tol:.1e}"));
    Ok(())
}

fn variation(cfg: &RunConfig, p: &Params, samples: usize, rep: &mut Report) -> Result<(), CliError> {
    let grid = jet_grid(p, 4, 2)?;
    let h = p.f64_or("h", 1e-3)?;
    let a = p.f64_or("a", 0.0)?;
    let step_tol = p.f64_or("step_tol", 1e-6)?;
    let tol = p.f64_or("tol", 1e-5)?;
    let mut worst = 0.0f64;
    let mut first = None;
    for i in 0..samples {
        let w = omega_jet(p, &grid, cfg.seed + i as u64)?;
        let r = variation_check_u1(&grid, &w, h, a, step_tol)?;
        worst = worst.max(r.gap);
        first.get_or_insert(r);
    }
    rep.put("samples", samples);
    rep.put_ser("check", &first.expect("at least one sample"));
    rep.put_f64("max_gap", worst);
    rep.check(worst <= tol, || format!("variation gap {worst:.3e} > {tol:.1e}"));
    Ok(())
}

fn gauss_bonnet_run(cfg: &RunConfig, p: &Params, samples: usize, rep: &mut Report) -> Result<(), CliError> {
    let grid = jet_grid(p, 2, 3)?;
    let tol = p.f64_or("tol", 1e-7)?;
    let target = 4.0 * std::f64::consts::PI;
    let mut worst = 0.0f64;
    let mut first = None;
    for i in 0..samples {
        let w = omega_jet(p, &grid, cfg.seed + i as u64)?;
        let v = gauss_bonnet(&grid, &w)?;
        worst = worst.max((v - target).abs());
        first.get_or_insert(v);
    }
    rep.put("samples", samples);
    rep.put_f64("value", first.expect("at least one sample"));
    rep.put_f64("max_gap", worst);
    rep.check(worst <= tol, || format!("Gauss–Bonnet gap {worst:.3e} > {tol:.1e}"));
    Ok(())
}

fn curvature(cfg: &RunConfig, p: &Params, rep: &mut Report) -> Result<(), CliError> {
    let n = p.u32_or("n", 2)?;
    let grid = jet_grid(p, n, 3)?;
    let w = omega_jet(p, &grid, cfg.seed)?;
    let k = curvature_from_jet(&w);
    let min = k.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = k.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    rep.put("n", n);
    rep.put("quantity", if n == 2 { "gauss_curvature" } else { "scalar_curvature" });
    rep.put_f64("min", min);
    rep.put_f64("max", max);
    rep.put_f64("deformed_volume", deformed_volume(&grid, &w));
    Ok(())
}

pub fn optimize(cfg: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    let p = cfg.params();
    p.only(&["functional", "band", "start", "scale", "boost", "axis", "theta", "max_iter", "success"])?;
    let kind = match p.choice("functional", &["onofri", "beckner"], "onofri")? {
        "onofri" => ExtremalKind::OnofriS2,
        _ => ExtremalKind::BecknerS4,
    };
    let n = kind.n();
    let start = p.choice("start", &["random", "zero", "mobius"], "random")?;
    let l = p.u32_or("band", if start == "mobius" { 12 } else { 4 })?;
    let mut opts = ExtremalOptions::default();
    opts.max_iter = p.usize_or("max_iter", opts.max_iter)?;
    opts.success = p.f64_or("success", opts.success)?;
    let report = match start {
        "mobius" => {
            let grid = lab_grid(n, l)?;
            let omega = mobius_band(&grid, &mobius_map(&p, n)?, 1.0)?;
            extremal_search_from(&grid, kind, &omega, &opts)?
        }
        "zero" => extremal_search(kind, l, cfg.seed, 0.0, &opts)?,
        _ => extremal_search(kind, l, cfg.seed, p.f64_or("scale", 0.1)?, &opts)?,
    };
    let path_max = report
        .trajectory
        .iter()
        .map(|t| t.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let first = report.trajectory.first().map(|t| t.value).unwrap_or(report.value);
    let last_grad = report.trajectory.last().map(|t| t.grad_norm).unwrap_or(0.0);
    rep.put("functional", report.functional.clone());
    rep.put("n", report.n);
    rep.put("band", report.l);
    rep.put("start", start);
    rep.put_f64("value", report.value);
    rep.put("iterations", report.iterations);
    rep.put(
        "trajectory",
        obj(vec![
            ("points", Value::from(report.trajectory.len())),
            ("initial_value", float(first)),
            ("final_value", float(report.value)),
            ("max_value", float(path_max)),
            ("final_grad_norm", float(last_grad)),
        ]),
    );
    rep.put(
        "omega_degree_energy",
        (0..=report.l).map(|k| float(report.omega.degree_energy(k))).collect::<Vec<_>>(),
    );
    rep.set_csv(report.trajectory_csv());
    Ok(())
}
