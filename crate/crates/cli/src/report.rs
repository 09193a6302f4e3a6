//! Report values and their JSON/CSV renderings.
//!
//! Exact rationals are written as `"num/den"` strings next to a 20-digit
//! decimal; big integers are written as decimal strings. JSON objects use
//! sorted keys, so identical inputs give identical bytes.

use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Value};
use toeplitz_core::numeric::{decimal_of_ratio, rational_string, render};
use toeplitz_core::Interval;

/// Significant digits of decimal renderings.
pub const DIGITS: usize = 20;

pub fn decimal(r: &BigRational) -> String {
    render(&decimal_of_ratio(r), DIGITS)
}

pub fn exact(r: &BigRational) -> Value {
    json!({ "exact": rational_string(r), "decimal": decimal(r) })
}

pub fn int(n: &BigUint) -> Value {
    Value::String(n.to_string())
}

pub fn interval(i: &Interval) -> Value {
    json!({ "lo": exact(i.lo()), "hi": exact(i.hi()), "width": exact(&i.width()) })
}

/// A flat table for CSV output.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory writer");
        for row in &self.rows {
            w.write_record(row).expect("in-memory writer");
        }
        w.into_inner().expect("in-memory writer")
    }
}

/// Outcome of one command.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub table: Table,
    /// Every check of the command passed.
    pub passed: bool,
    /// Human-readable notes for stderr.
    pub notes: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(&self.json).expect("reports serialize");
        out.push(b'\n');
        out
    }
}
