//! Run configuration: command, `key=value` parameters and global flags.
//!
//! A config file is the JSON form of [`RunConfig`]. Values given on the
//! command line override the file, which overrides built-in defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num::{BigInt, BigRational};
use serde::{Deserialize, Serialize};

use confsym::minrep::HalfInt;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Zeta,
    HeatFit,
    Invariants,
    Functional,
    Optimize,
    Branch,
    DiscreteSpectrum,
    Cone,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Spectrum,
        Command::Zeta,
        Command::HeatFit,
        Command::Invariants,
        Command::Functional,
        Command::Optimize,
        Command::Branch,
        Command::DiscreteSpectrum,
        Command::Cone,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Zeta => "zeta",
            Command::HeatFit => "heat-fit",
            Command::Invariants => "invariants",
            Command::Functional => "functional",
            Command::Optimize => "optimize",
            Command::Branch => "branch",
            Command::DiscreteSpectrum => "discrete-spectrum",
            Command::Cone => "cone",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Command::ALL.iter().map(|c| c.name()).collect();
                CliError::Usage(format!("unknown command '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

fn default_threads() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default)]
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            params: BTreeMap::new(),
            seed: 0,
            threads: default_threads(),
            exact: false,
            out: None,
            csv: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Add `key=value` pairs, replacing earlier values.
    pub fn set_pairs<S: AsRef<str>>(&mut self, pairs: &[S]) -> Result<(), CliError> {
        for p in pairs {
            let p = p.as_ref();
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("expected key=value, got '{p}'")))?;
            if k.is_empty() {
                return Err(CliError::Usage(format!("empty key in '{p}'")));
            }
            self.params.insert(k.to_string(), v.to_string());
        }
        Ok(())
    }

    pub fn params(&self) -> Params<'_> {
        Params {
            map: &self.params,
        }
    }
}

/// Typed access to the parameter map.
pub struct Params<'a> {
    map: &'a BTreeMap<String, String>,
}

fn bad(key: &str, v: &str, what: &str) -> CliError {
    CliError::Usage(format!("parameter {key}='{v}' is not {what}"))
}

impl<'a> Params<'a> {
    /// Reject keys outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> Result<(), CliError> {
        for k in self.map.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(CliError::Usage(format!(
                    "unknown parameter '{k}' (accepted: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&'a str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    pub fn str_or(&self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    pub fn u32_opt(&self, key: &str) -> Result<Option<u32>, CliError> {
        self.raw(key)
            .map(|v| v.trim().parse().map_err(|_| bad(key, v, "a nonnegative integer")))
            .transpose()
    }

    pub fn u32_req(&self, key: &str) -> Result<u32, CliError> {
        self.u32_opt(key)?
            .ok_or_else(|| CliError::Usage(format!("missing parameter '{key}'")))
    }

    pub fn u32_or(&self, key: &str, default: u32) -> Result<u32, CliError> {
        Ok(self.u32_opt(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        self.raw(key)
            .map(|v| v.trim().parse().map_err(|_| bad(key, v, "a nonnegative integer")))
            .transpose()
            .map(|o| o.unwrap_or(default))
    }

    /// A real number; "a/b" rationals are accepted too.
    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.raw(key).map(|v| parse_real(key, v)).transpose()
    }

    pub fn f64_req(&self, key: &str) -> Result<f64, CliError> {
        self.f64_opt(key)?
            .ok_or_else(|| CliError::Usage(format!("missing parameter '{key}'")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn rational_opt(&self, key: &str) -> Result<Option<BigRational>, CliError> {
        self.raw(key).map(|v| parse_rational(key, v)).transpose()
    }

    pub fn half_int_req(&self, key: &str) -> Result<HalfInt, CliError> {
        let v = self
            .raw(key)
            .ok_or_else(|| CliError::Usage(format!("missing parameter '{key}'")))?;
        HalfInt::parse(v).map_err(|_| bad(key, v, "an integer or half-integer"))
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.raw(key)
            .map(|v| v.split(',').map(|s| parse_real(key, s)).collect())
            .transpose()
    }

    pub fn rational_list(&self, key: &str) -> Result<Option<Vec<BigRational>>, CliError> {
        self.raw(key)
            .map(|v| {
                if v.trim().is_empty() {
                    Ok(Vec::new())
                } else {
                    v.split(',').map(|s| parse_rational(key, s)).collect()
                }
            })
            .transpose()
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(v) => Err(bad(key, v, "a boolean")),
        }
    }

    /// One of `choices`, or `default` when absent.
    pub fn choice(&self, key: &str, choices: &[&'a str], default: &'a str) -> Result<&'a str, CliError> {
        let v = self.str_or(key, default);
        choices
            .iter()
            .find(|c| **c == v)
            .copied()
            .ok_or_else(|| bad(key, v, &format!("one of {}", choices.join("|"))))
    }
}

pub fn parse_rational(key: &str, v: &str) -> Result<BigRational, CliError> {
    let v = v.trim();
    let int = |s: &str| s.trim().parse::<BigInt>().map_err(|_| bad(key, v, "a rational"));
    if let Some((a, b)) = v.split_once('/') {
        let d = int(b)?;
        if d == BigInt::from(0) {
            return Err(bad(key, v, "a rational with nonzero denominator"));
        }
        return Ok(BigRational::new(int(a)?, d));
    }
    if let Ok(i) = v.parse::<BigInt>() {
        return Ok(BigRational::from_integer(i));
    }
    // terminating decimals
    if let Some((a, b)) = v.split_once('.') {
        if b.chars().all(|c| c.is_ascii_digit()) && !b.is_empty() {
            let neg = a.trim_start().starts_with('-');
            let whole = if a.is_empty() || a == "-" { BigInt::from(0) } else { int(a)? };
            let frac = int(b)?;
            let den = num::pow(BigInt::from(10), b.len());
            let mag = whole.magnitude().clone();
            let num_ = BigInt::from(mag) * &den + frac;
            let num_ = if neg { -num_ } else { num_ };
            return Ok(BigRational::new(num_, den));
        }
    }
    Err(bad(key, v, "a rational"))
}

pub fn parse_real(key: &str, v: &str) -> Result<f64, CliError> {
    let t = v.trim();
    if let Some((a, b)) = t.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| bad(key, v, "a real number"))?;
        let b: f64 = b.trim().parse().map_err(|_| bad(key, v, "a real number"))?;
        if b == 0.0 {
            return Err(bad(key, v, "a real number"));
        }
        return Ok(a / b);
    }
    let x: f64 = t.parse().map_err(|_| bad(key, v, "a real number"))?;
    if !x.is_finite() {
        return Err(bad(key, v, "a finite real number"));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut c = RunConfig::new(Command::Branch);
        c.set_pairs(&["p=4", "q=4", "q1=2", "q2=2", "cutoff=12"]).unwrap();
        c.seed = 17;
        c.threads = 3;
        c.exact = true;
        c.out = Some("r.json".into());
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), c.to_json());
    }

    #[test]
    fn defaults_fill_missing_fields() {
        let c = RunConfig::from_json(r#"{"command":"zeta","params":{"op":"yamabe"}}"#).unwrap();
        assert_eq!(c.threads, 1);
        assert_eq!(c.seed, 0);
        assert!(RunConfig::from_json(r#"{"command":"nope"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"command":"zeta","colour":1}"#).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("x", "-3/6").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("x", "2.25").unwrap(), BigRational::new(9.into(), 4.into()));
        assert_eq!(parse_rational("x", "-0.5").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert!(parse_rational("x", "1/0").is_err());
        assert_eq!(parse_real("x", "3/2").unwrap(), 1.5);
        assert!(parse_real("x", "inf").is_err());
        let mut c = RunConfig::new(Command::Zeta);
        assert!(c.set_pairs(&["novalue"]).is_err());
        c.set_pairs(&["n=4", "n=5"]).unwrap();
        assert_eq!(c.params().u32_req("n").unwrap(), 5);
        assert!(c.params().only(&["op"]).is_err());
        assert!("spectrum".parse::<Command>().is_ok());
        assert!("spectra".parse::<Command>().is_err());
    }
}
