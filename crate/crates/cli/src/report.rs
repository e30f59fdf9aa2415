//! JSON reports with stable key order and fixed float formatting.

use num::{BigInt, BigRational};
use serde::Serialize;
use serde_json::{Map, Number, Value};

use confsym::spectra::format_rational;

/// A float with 17 significant digits; non-finite values become strings.
pub fn float(x: f64) -> Value {
    if x.is_finite() {
        let n: Number = serde_json::from_str(&format!("{x:.16e}")).expect("valid number");
        Value::Number(n)
    } else {
        Value::String(format!("{x}"))
    }
}

pub fn rational(r: &BigRational) -> Value {
    Value::String(format_rational(r))
}

pub fn bigint(i: &BigInt) -> Value {
    Value::Number(serde_json::from_str(&i.to_string()).expect("valid integer"))
}

/// Rewrite every float inside `v` with [`float`].
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => float(n.as_f64().expect("float")),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(t: &T) -> Value {
    normalize(serde_json::to_value(t).expect("report value serializes"))
}

/// Result fields of one run, in insertion order.
#[derive(Debug, Default)]
pub struct Report {
    fields: Map<String, Value>,
    failures: Vec<String>,
    csv: Option<String>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_string(), v.into());
        self
    }

    pub fn put_f64(&mut self, key: &str, x: f64) -> &mut Self {
        self.put(key, float(x))
    }

    pub fn put_ser<T: Serialize>(&mut self, key: &str, t: &T) -> &mut Self {
        self.put(key, to_value(t))
    }

    /// Record a failed check; the run then exits with the verification code.
    pub fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }

    /// Record `ok`, failing with `msg` when it is false.
    pub fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) -> bool {
        if !ok {
            self.fail(msg());
        }
        ok
    }

    pub fn set_csv(&mut self, csv: String) {
        self.csv = Some(csv);
    }

    pub fn failures(&self) -> &[String] {
        &self.failures
    }

    pub fn take_csv(&mut self) -> Option<String> {
        self.csv.take()
    }

    pub fn into_fields(self) -> Map<String, Value> {
        self.fields
    }
}

pub fn obj(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(float(1.5).to_string(), "1.5000000000000000e+0");
        assert_eq!(float(-1.0 / 90.0).to_string(), "-1.1111111111111112e-2");
        assert_eq!(float(f64::NAN), Value::String("NaN".into()));
        let v = normalize(serde_json::json!({"a": [0.25, 3], "b": {"c": 2.0}}));
        assert_eq!(v.to_string(), r#"{"a":[2.5000000000000000e-1,3],"b":{"c":2.0000000000000000e+0}}"#);
    }

    #[test]
    fn exact_values() {
        let r = BigRational::new(BigInt::from(-3), BigInt::from(6));
        assert_eq!(rational(&r), Value::String("-1/2".into()));
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(bigint(&big).to_string(), "123456789012345678901234567890");
    }
}
