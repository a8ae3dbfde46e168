//! Table and JSON writers. Output is assembled in memory and written once, so a
//! failed run leaves no partial file behind.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use qat::linalg::OperatorMatrix;
use qat::FourierOperator;
use serde_json::{json, Value};

use crate::error::CliError;

pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(|x| number(*x)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({ "columns": self.columns, "rows": self.rows })
    }
}

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix(m: &OperatorMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect())).collect())
}

pub fn modes(op: &FourierOperator) -> Value {
    Value::Array(op.modes().iter().map(|m| json!({ "frequency": m.frequency, "matrix": matrix(&m.coeff) })).collect())
}

pub fn compact(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Output(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Output(e.to_string()))
        }
    }
}
