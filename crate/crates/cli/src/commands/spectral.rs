use num::{BigRational, One, Signed};
use serde_json::Value;

use confsym::poly::RatPoly;
use confsym::spectra::{format_rational, spectrum_table, OperatorKind};
use confsym::zeta_heat::{
    curvature_coefficient, heat_coefficients_fit, heat_trace, integrated_invariant, spectral_zeta,
    zeta_direct_sum, FitGrid, PolySpectrum, PowerFamily,
};

use super::operator;
use crate::config::RunConfig;
use crate::report::{bigint, float, obj, rational, Report};
use crate::CliError;

const MAX_KMAX: u32 = 100_000;

pub fn spectrum(cfg: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    let p = cfg.params();
    p.only(&["op", "n", "r", "p", "kmax", "t"])?;
    let op = operator(&p)?;
    let kmax = p.u32_or("kmax", 10)?;
    if kmax > MAX_KMAX {
        return Err(CliError::Usage(format!("kmax = {kmax} exceeds {MAX_KMAX}")));
    }
    let table = spectrum_table(op, kmax);
    let lines: Vec<Value> = table
        .lines
        .iter()
        .map(|l| {
            let eig = match &l.exact {
                Some(e) => rational(e),
                None => float(l.eigenvalue),
            };
            obj(vec![("k", Value::from(l.k)), ("eig", eig), ("mult", bigint(&l.multiplicity))])
        })
        .collect();
    rep.put("operator", op.label());
    rep.put("lines", lines);
    rep.put("nondecreasing", table.is_nondecreasing());
    rep.put("positive", table.is_positive());
    if let Some(t) = p.f64_opt("t")? {
        if matches!(op.kind, OperatorKind::KnappStein { .. }) {
            return Err(CliError::Usage("heat trace needs a polynomial spectrum".into()));
        }
        let spec = PolySpectrum::from_operator(&op)?;
        let value = heat_trace(&spec, t)?;
        let lowest = spec.multiplicity(0) * (-t * spec.eigenvalue(0)).exp();
        rep.put(
            "heat_trace",
            obj(vec![
                ("t", float(t)),
                ("value", float(value)),
                ("lowest_term", float(lowest)),
                ("lowest_fraction", float(lowest / value)),
            ]),
        );
    }
    rep.set_csv(table.to_csv(cfg.exact));
    Ok(())
}

fn zeta_spectrum(cfg: &RunConfig) -> Result<(PolySpectrum, Option<f64>), CliError> {
    let p = cfg.params();
    let base = if p.str_or("op", "laplace") == "custom" {
        let eigen = p
            .rational_list("eigen")?
            .ok_or_else(|| CliError::Usage("op=custom needs eigen=c0,c1,… (ascending)".into()))?;
        let mult = p.rational_list("mult")?.unwrap_or_else(|| vec![BigRational::one()]);
        PolySpectrum::custom("custom", RatPoly::new(eigen), RatPoly::new(mult), p.u32_or("kstart", 0)?)
    } else {
        PolySpectrum::from_operator(&operator(&p)?)?
    };
    // ∫U_{n/2} is available for Δ + aK with n/2 ≤ 2.
    let dual = if p.str_or("op", "laplace") == "custom" {
        None
    } else {
        let op = operator(&p)?;
        match curvature_coefficient(&op) {
            Some(a) if op.n % 2 == 0 && op.n <= 4 => Some(integrated_invariant(op.n / 2, op.n, a)?),
            _ => None,
        }
    };
    match p.rational_opt("scale")? {
        None => Ok((base, dual)),
        Some(c) => {
            if !c.is_positive() {
                return Err(CliError::Usage("scale must be positive".into()));
            }
            let label = format!("{}·{}", format_rational(&c), base.label);
            Ok((PolySpectrum::custom(&label, base.eigen.scale(&c), base.mult.clone(), base.k_start), None))
        }
    }
}

pub fn zeta(cfg: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    let p = cfg.params();
    p.only(&["op", "n", "r", "s", "scale", "eigen", "mult", "kstart", "terms"])?;
    let (spec, dual) = zeta_spectrum(cfg)?;
    let z0 = spectral_zeta(&spec, 0.0)?;
    rep.put("operator", spec.label.clone());
    rep.put_f64("zeta0", z0.value);
    rep.put_f64("zeta_prime0", z0.derivative);
    rep.put_f64("log_det", -z0.derivative);
    rep.put_f64("determinant", (-z0.derivative).exp());
    rep.put("kernel_dimension", z0.kernel_dimension);
    rep.put_f64("remainder_bound", z0.remainder_bound);
    if let Some(u) = dual {
        // ζ(0) = ∫U_{n/2} − dim ker
        let gap = (z0.value + z0.kernel_dimension as f64 - u).abs();
        rep.put(
            "heat_invariant",
            obj(vec![("integrated_u", float(u)), ("dual_gap", float(gap))]),
        );
    }
    if let Some(s) = p.f64_opt("s")? {
        let z = spectral_zeta(&spec, s)?;
        let mut fields = vec![("s", float(s)), ("value", float(z.value)), ("derivative", float(z.derivative))];
        let terms = p.u32_or("terms", 10_000)?;
        if let Ok(d) = zeta_direct_sum(&spec, s, terms) {
            fields.push(("direct_sum", float(d)));
            fields.push(("direct_gap", float((d - z.value).abs())));
        }
        rep.put("at_s", obj(fields));
    }
    Ok(())
}

pub fn heat_fit(cfg: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    let p = cfg.params();
    p.only(&["op", "n", "r", "family", "tmin", "tmax", "points", "terms"])?;
    let op = operator(&p)?;
    if matches!(op.kind, OperatorKind::KnappStein { .. }) {
        return Err(CliError::Usage("heat-fit needs a polynomial spectrum".into()));
    }
    let default_family = if op.n % 2 == 0 { "even" } else { "all" };
    let family = match p.choice("family", &["even", "all"], default_family)? {
        "even" => PowerFamily::Even,
        _ => PowerFamily::All,
    };
    let mut grid = FitGrid::default_for(family);
    grid.t_min = p.f64_or("tmin", grid.t_min)?;
    grid.t_max = p.f64_or("tmax", grid.t_max)?;
    grid.points = p.usize_or("points", grid.points)?;
    grid.terms = p.usize_or("terms", grid.terms)?;
    let spec = PolySpectrum::from_operator(&op)?;
    let fit = heat_coefficients_fit(&spec, op.n, op.order(), grid)?;
    rep.put("operator", fit.operator.clone());
    rep.put("n", fit.n);
    rep.put("d", fit.d);
    rep.put_ser("coefficients", &fit.coefficients);
    rep.put_f64("residual", fit.residual);
    rep.put_ser("grid", &fit.grid);
    if let Some(c) = fit.coefficient(0.0) {
        rep.put_ser("t0_coefficient", &c);
    }
    Ok(())
}
