use std::io::Write;

use anyhow::Result;

use slope_core::rational::{format_rational, to_decimal};
use slope_core::{ExtRational, Rational};

pub const HEADER: [&str; 8] = ["experiment", "metric", "n", "value", "value_num", "value_den", "value_decimal", "note"];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Rational(Rational),
    Ext(ExtRational),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<Rational> for Value {
    fn from(x: Rational) -> Self {
        Value::Rational(x)
    }
}

impl From<&Rational> for Value {
    fn from(x: &Rational) -> Self {
        Value::Rational(x.clone())
    }
}

impl From<ExtRational> for Value {
    fn from(x: ExtRational) -> Self {
        match x {
            ExtRational::Finite(r) => Value::Rational(r),
            other => Value::Ext(other),
        }
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u32> for Value {
    fn from(x: u32) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

impl Value {
    /// `value, value_num, value_den, value_decimal`.
    fn columns(&self) -> [String; 4] {
        match self {
            Value::Rational(r) => [format_rational(r), r.numer().to_string(), r.denom().to_string(), to_decimal(r)],
            Value::Ext(e) => {
                let dec = if *e == ExtRational::PosInf { "inf" } else { "-inf" };
                [e.to_canonical(), String::new(), String::new(), dec.to_string()]
            }
            Value::Int(k) => [k.to_string(), k.to_string(), "1".into(), k.to_string()],
            Value::Bool(b) => [b.to_string(), String::new(), String::new(), String::new()],
            Value::Text(t) => [t.clone(), String::new(), String::new(), String::new()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub metric: String,
    pub n: Option<String>,
    pub value: Value,
    pub note: String,
}

#[derive(Debug, Default)]
pub struct Report {
    pub rows: Vec<Row>,
    /// Set when a mathematical check failed.
    pub failed: bool,
}

impl Report {
    pub fn push(&mut self, metric: &str, n: Option<String>, value: impl Into<Value>, note: impl Into<String>) {
        self.rows.push(Row { metric: metric.to_string(), n, value: value.into(), note: note.into() });
    }

    pub fn scalar(&mut self, metric: &str, value: impl Into<Value>) {
        self.push(metric, None, value, "");
    }

    pub fn indexed(&mut self, metric: &str, n: impl ToString, value: impl Into<Value>) {
        self.push(metric, Some(n.to_string()), value, "");
    }

    /// Records a failed check with its witness.
    pub fn violation(&mut self, metric: &str, n: Option<String>, value: impl Into<Value>, note: impl Into<String>) {
        self.failed = true;
        self.push(metric, n, value, note);
    }

    pub fn write_csv<W: Write>(&self, experiment: &str, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(HEADER)?;
        for row in &self.rows {
            let [value, num, den, dec] = row.value.columns();
            let n = row.n.clone().unwrap_or_default();
            w.write_record([experiment, &row.metric, &n, &value, &num, &den, &dec, &row.note])?;
        }
        w.flush()?;
        Ok(())
    }
}
