use num::complex::Complex64;
use num::Zero;
use serde_json::Value;

use confsym::flat_model::{
    bessel_ktype_v0, box_fd, cone_measure_weight, demo_density, null_defect, null_defect_exact,
    parabolic_embedding, parabolic_embedding_exact, synthesize_solution, ultrahyperbolic_residual,
    v0_norm_sq,
};

use crate::config::{Params, RunConfig};
use crate::report::{float, obj, rational, Report};
use crate::CliError;

fn complex(z: Complex64) -> Value {
    obj(vec![("re", float(z.re)), ("im", float(z.im))])
}

fn point(p: &Params, key: &str, dim: usize) -> Result<Vec<f64>, CliError> {
    let x = match p.f64_list(key)? {
        Some(x) => x,
        // away from the origin, where the demo density's truncation error cancels
        None => (0..dim).map(|i| 1.5 * (1.0 + 1.3 * i as f64).sin()).collect(),
    };
    if x.len() != dim {
        return Err(CliError::Usage(format!("{key} needs {dim} coordinates")));
    }
    Ok(x)
}

pub fn cone(cfg: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    let p = cfg.params();
    let kind = p.choice(
        "kind",
        &["residual", "v0-norm", "v0", "embedding", "measure", "plane-wave"],
        "residual",
    )?;
    rep.put("kind", kind);
    match kind {
        "residual" => {
            p.only(&["kind", "p", "q", "nr", "degree", "x", "h", "min_order", "tol"])?;
            let (pp, q) = (p.u32_or("p", 3)?, p.u32_or("q", 3)?);
            let psi = demo_density(pp, q, p.usize_or("nr", 10)?, p.u32_or("degree", 7)?)?;
            let x = point(&p, "x", psi.dim())?;
            let f = |y: &[f64]| synthesize_solution(&psi, y).expect("dimension checked");
            let h = p.f64_or("h", 1e-2)?;
            let r = ultrahyperbolic_residual(&f, &x, pp, h)?;
            let scale = f(&x).norm().max(1.0);
            rep.put("p", pp);
            rep.put("q", q);
            rep.put("samples", psi.len());
            rep.put_f64("max_null_defect", psi.max_null_defect());
            rep.put_f64("l2_norm_sq", psi.l2_norm_sq());
            rep.put("value", complex(f(&x)));
            rep.put_ser("report", &r);
            let min_order = p.f64_or("min_order", 1.9)?;
            let tol = p.f64_or("tol", 1e-6)?;
            rep.check(r.order >= min_order, || format!("observed order {:.3} < {min_order}", r.order));
            rep.check(r.residual <= tol * scale, || {
                format!("residual {:.3e} at h = {h:.1e} exceeds {tol:.1e}", r.residual)
            });
        }
        "v0-norm" => {
            p.only(&["kind", "p", "q"])?;
            let v = v0_norm_sq(p.u32_req("p")?, p.u32_req("q")?)?;
            rep.put_ser("norm", &v);
        }
        "v0" => {
            p.only(&["kind", "p", "q", "r"])?;
            let (pp, q, r) = (p.u32_req("p")?, p.u32_req("q")?, p.f64_req("r")?);
            let v = bessel_ktype_v0(pp, q, r)?;
            rep.put_f64("value", v);
            // v₀(r) e^{2r} r^{(q−2)/2} stays bounded as r → ∞
            rep.put_f64("envelope", v * (2.0 * r).exp() * r.powf((q as f64 - 2.0) / 2.0));
        }
        "embedding" => {
            p.only(&["kind", "z1", "z2"])?;
            let z1 = p.rational_list("z1")?.unwrap_or_default();
            let z2 = p.rational_list("z2")?.unwrap_or_default();
            let pdim = z1.len() + 1;
            if cfg.exact {
                let e = parabolic_embedding_exact(&z1, &z2);
                let d = null_defect_exact(&e, pdim);
                rep.put("point", e.iter().map(rational).collect::<Vec<_>>());
                rep.put("null_defect", rational(&d));
                rep.check(d.is_zero(), || "embedded point is not null".into());
            } else {
                let f1: Vec<f64> = z1.iter().map(confsym::poly::rat_to_f64).collect();
                let f2: Vec<f64> = z2.iter().map(confsym::poly::rat_to_f64).collect();
                let e = parabolic_embedding(&f1, &f2);
                rep.put("point", e.iter().map(|v| float(*v)).collect::<Vec<_>>());
                rep.put_f64("null_defect", null_defect(&e, pdim));
            }
        }
        "measure" => {
            p.only(&["kind", "p", "q", "r"])?;
            rep.put_f64("value", cone_measure_weight(p.u32_req("p")?, p.u32_req("q")?, p.f64_req("r")?)?);
        }
        _ => {
            p.only(&["kind", "p", "zeta", "x", "h"])?;
            let pp = p.u32_or("p", 3)?;
            let zeta = p
                .f64_list("zeta")?
                .ok_or_else(|| CliError::Usage("plane-wave needs zeta=…".into()))?;
            if zeta.len() < pp as usize {
                return Err(CliError::Usage(format!("zeta needs more than p − 1 = {} entries", pp - 1)));
            }
            let x = point(&p, "x", zeta.len())?;
            let wave = |y: &[f64]| {
                let ph: f64 = y.iter().zip(&zeta).map(|(a, b)| a * b).sum();
                Complex64::from_polar(1.0, ph)
            };
            let h = p.f64_or("h", 1e-3)?;
            let q = null_defect(&zeta, pp as usize - 1);
            let boxed = box_fd(&wave, &x, pp, h);
            rep.put_f64("q_zeta", q);
            rep.put("box", complex(boxed));
            // □f = −Q(ζ) f
            rep.put_f64("symbol_gap", (boxed + wave(&x) * q).norm());
            rep.put_ser("residual", &ultrahyperbolic_residual(&wave, &x, pp, h)?);
        }
    }
    Ok(())
}
