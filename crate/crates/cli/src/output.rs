//! Number formatting, ordered JSON objects and CSV writers.

use std::io::Write;

use anyhow::Result;
use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::value::RawValue;

/// Seventeen significant digits, round-trip exact.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// A functional value that may be `+∞`, `-∞` or undefined (`∞ - ∞`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Finite(f64),
    PosInf,
    NegInf,
    Undefined,
}

impl Value {
    pub fn from_f64(x: f64) -> Self {
        if x.is_nan() {
            Value::Undefined
        } else if x == f64::INFINITY {
            Value::PosInf
        } else if x == f64::NEG_INFINITY {
            Value::NegInf
        } else {
            Value::Finite(x)
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Value::Finite(x) => x,
            Value::PosInf => f64::INFINITY,
            Value::NegInf => f64::NEG_INFINITY,
            Value::Undefined => f64::NAN,
        }
    }

    fn json(self) -> String {
        match self {
            Value::Finite(x) => num(x),
            Value::PosInf => "\"inf\"".to_string(),
            Value::NegInf => "\"-inf\"".to_string(),
            Value::Undefined => "null".to_string(),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::from_f64(x)
    }
}

impl From<freeineq_core::Extended> for Value {
    fn from(x: freeineq_core::Extended) -> Self {
        match x {
            freeineq_core::Extended::Finite(v) => Value::Finite(v),
            freeineq_core::Extended::PosInfinity => Value::PosInf,
        }
    }
}

/// JSON object that keeps insertion order and prints numbers via [`num`].
#[derive(Debug, Default)]
pub struct Obj(Vec<(String, Box<RawValue>)>);

impl Obj {
    pub fn new() -> Self {
        Self::default()
    }

    fn raw(mut self, key: &str, text: String) -> Self {
        let raw = RawValue::from_string(text).expect("valid JSON fragment");
        self.0.push((key.to_string(), raw));
        self
    }

    pub fn value(self, key: &str, v: impl Into<Value>) -> Self {
        let text = v.into().json();
        self.raw(key, text)
    }

    pub fn opt(self, key: &str, v: Option<f64>) -> Self {
        match v {
            Some(x) => self.value(key, x),
            None => self.raw(key, "null".into()),
        }
    }

    pub fn int(self, key: &str, v: u64) -> Self {
        self.raw(key, v.to_string())
    }

    pub fn boolean(self, key: &str, v: bool) -> Self {
        self.raw(key, v.to_string())
    }

    pub fn text(self, key: &str, v: &str) -> Self {
        let s = serde_json::to_string(v).expect("string serializes");
        self.raw(key, s)
    }

    pub fn numbers(self, key: &str, xs: &[f64]) -> Self {
        let items: Vec<String> = xs.iter().map(|&x| Value::from(x).json()).collect();
        self.raw(key, format!("[{}]", items.join(",")))
    }

    pub fn object(self, key: &str, o: Obj) -> Self {
        let s = o.to_json();
        self.raw(key, s)
    }

    pub fn objects(self, key: &str, os: Vec<Obj>) -> Self {
        let items: Vec<String> = os.into_iter().map(|o| o.to_json()).collect();
        self.raw(key, format!("[{}]", items.join(",")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("object serializes")
    }

    pub fn to_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("object serializes")
    }
}

impl Serialize for Obj {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// CSV writer with a mandatory header and LF line endings.
pub struct Table<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> Table<W> {
    pub fn new(out: W, header: &[&str]) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        inner.write_record(header)?;
        Ok(Self { inner })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields)?;
        Ok(())
    }

    /// Flushes the rows and hands back the sink, e.g. to append comments.
    pub fn finish(self) -> Result<W> {
        self.inner.into_inner().map_err(|e| anyhow::anyhow!("flushing CSV output: {}", e.error()))
    }
}
