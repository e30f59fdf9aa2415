pub mod cone;
pub mod conformal;
pub mod invariants;
pub mod minrep;
pub mod spectral;

use confsym::spectra::{ModelOperator, OperatorKind};

use crate::config::Params;
use crate::CliError;

/// op=laplace|yamabe|gjms|paneitz|knapp-stein with n, r and p.
pub(crate) fn operator(p: &Params) -> Result<ModelOperator, CliError> {
    let n = p.u32_or("n", 2)?;
    let kind = match p.choice("op", &["laplace", "yamabe", "gjms", "paneitz", "knapp-stein"], "laplace")? {
        "laplace" => OperatorKind::Laplace,
        "yamabe" => OperatorKind::Yamabe,
        "gjms" => OperatorKind::Gjms { r: p.u32_or("r", 1)? },
        "paneitz" => OperatorKind::Gjms { r: 2 },
        _ => OperatorKind::KnappStein { p: p.f64_req("p")? },
    };
    Ok(ModelOperator::new(kind, n)?)
}
