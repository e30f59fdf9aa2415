use serde_json::Value;

use confsym::minrep::{
    branching_dimension_identity, branching_verify_compact, discrete_spectrum_params,
    elliptic_rep_ktypes, harmonic_branching, minrep_ktypes, norm_factor, plancherel_weight, KTypeSet,
};

use crate::config::RunConfig;
use crate::report::{bigint, obj, Report};
use crate::CliError;

fn ktypes_value(set: &KTypeSet) -> Value {
    Value::Array(
        set.entries
            .iter()
            .map(|k| Value::Array(vec![Value::from(k.a), Value::from(k.b)]))
            .collect(),
    )
}

pub fn branch(cfg: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    let p = cfg.params();
    let kind = p.choice("kind", &["verify", "minrep", "elliptic", "harmonic", "plancherel"], "verify")?;
    rep.put("kind", kind);
    match kind {
        "verify" => {
            p.only(&["kind", "p", "q", "q1", "q2", "cutoff"])?;
            let (pp, q) = (p.u32_req("p")?, p.u32_req("q")?);
            let q1 = p.u32_req("q1")?;
            let q2 = p.u32_or("q2", q.saturating_sub(q1))?;
            let r = branching_verify_compact(pp, q, q1, q2, p.u32_or("cutoff", 12)?)?;
            rep.put("lhs_count", r.lhs_count);
            rep.put("rhs_count", r.rhs_count);
            rep.put("equal", r.equal);
            if let Some((m, b1, b2)) = r.first_mismatch {
                rep.put("first_mismatch", vec![m, b1, b2]);
            }
            rep.put("boundary_excluded", r.boundary_excluded);
            rep.put("contributing_l", r.contributing_l.clone());
            rep.put_ser("plancherel", &r.plancherel);
            rep.check(r.equal, || format!("restriction mismatch at {:?}", r.first_mismatch));
            rep.set_csv(r.to_csv());
        }
        "minrep" => {
            p.only(&["kind", "p", "q", "cutoff"])?;
            let (pp, q) = (p.u32_req("p")?, p.u32_req("q")?);
            let set = minrep_ktypes(pp, q, p.u32_or("cutoff", 4)?)?;
            let norms: Vec<Value> = set
                .entries
                .iter()
                .map(|k| Value::from(norm_factor(pp, k.a).to_string()))
                .collect();
            rep.put("ktypes", ktypes_value(&set));
            rep.put("norm_factors", norms);
        }
        "elliptic" => {
            p.only(&["kind", "p", "q", "lambda", "cutoff"])?;
            let set = elliptic_rep_ktypes(
                p.u32_req("p")?,
                p.u32_req("q")?,
                p.half_int_req("lambda")?,
                p.u32_or("cutoff", 4)?,
            )?;
            rep.put("lambda", set.lambda.map(|l| l.to_string()));
            rep.put("discrete_series", set.discrete_series);
            rep.put("ktypes", ktypes_value(&set));
        }
        "harmonic" => {
            p.only(&["kind", "q1", "q2", "b"])?;
            let (q1, q2, b) = (p.u32_req("q1")?, p.u32_req("q2")?, p.u32_req("b")?);
            let pairs = harmonic_branching(q1, q2, b)?;
            let (lhs, rhs) = branching_dimension_identity(q1, q2, b)?;
            rep.put(
                "summands",
                pairs.iter().map(|(x, y)| Value::from(vec![*x, *y])).collect::<Vec<_>>(),
            );
            rep.put("dimension_sum", bigint(&lhs));
            rep.put("dimension", bigint(&rhs));
            rep.check(lhs == rhs, || format!("dimension identity fails: {lhs} ≠ {rhs}"));
        }
        _ => {
            p.only(&["kind", "q2", "l"])?;
            rep.put_ser("weight", &plancherel_weight(p.u32_req("q2")?, p.u32_req("l")?));
        }
    }
    Ok(())
}

pub fn discrete_spectrum(cfg: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    let p = cfg.params();
    p.only(&["p1", "q1", "p2", "q2", "lambda_max"])?;
    let (p1, q1, p2, q2) = (p.u32_req("p1")?, p.u32_req("q1")?, p.u32_req("p2")?, p.u32_req("q2")?);
    let list = discrete_spectrum_params(p1, q1, p2, q2, p.half_int_req("lambda_max")?);
    // mixed parities on the two factors leave nothing to list
    rep.put("compatible", (p1 + q1) % 2 == (p2 + q2) % 2);
    rep.put("count", list.len());
    rep.put(
        "params",
        list.iter()
            .map(|d| {
                obj(vec![
                    ("lambda", Value::from(d.lambda.to_string())),
                    ("orientation", crate::report::to_value(&d.orientation)),
                ])
            })
            .collect::<Vec<_>>(),
    );
    Ok(())
}
