//! Tables and their CSV / JSON renderings.
//!
//! Numbers are printed like C's `%.15g`, so the output is byte-stable across
//! runs and platforms.

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const SIGNIFICANT_DIGITS: usize = 15;

/// `%.15g`: shortest of fixed and exponent notation, trailing zeros removed.
/// Negative zero prints as `0`.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = SIGNIFICANT_DIGITS;
    // the exponent after rounding to p significant digits
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One cell: a number, an integer, text, or empty when the value is undefined.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_g(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) => csv_escape(t),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // rounded to the same 15 digits as the CSV
            Cell::Num(x) if x.is_finite() => {
                serde_json::from_str(&fmt_g(*x)).expect("%.15g output is valid JSON")
            }
            Cell::Num(x) => Value::String(fmt_g(*x)),
            Cell::Int(i) => json!(i),
            Cell::Text(t) => Value::String(t.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Footer lines, e.g. why some cells are empty.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Adds a note once, keeping first-seen order.
    pub fn note(&mut self, msg: String) {
        if !self.notes.contains(&msg) {
            self.notes.push(msg);
        }
    }

    /// Header, rows, then `# `-prefixed notes; LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str("# ");
            out.push_str(n);
            out.push('\n');
        }
        out
    }

    pub fn rows_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

#[derive(Serialize)]
struct Document<'a> {
    meta: &'a RunConfig,
    columns: &'a [&'static str],
    rows: Value,
    notes: &'a [String],
}

/// `{"meta", "columns", "rows", "notes"}`, pretty-printed with a trailing LF.
pub fn table_json(table: &Table, config: &RunConfig) -> String {
    let doc = Document { meta: config, columns: &table.columns, rows: table.rows_json(), notes: &table.notes };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_g_matches_c() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.875, "0.875"),
            (14.134725141734693, "14.1347251417347"),
            (1e-5, "1e-05"),
            (0.0001, "0.0001"),
            (123456789012345.0, "123456789012345"),
            (1234567890123456.0, "1.23456789012346e+15"),
            (1.0 / 3.0, "0.333333333333333"),
            (9.9999999999999999e14, "1e+15"),
            (6.02214076e23, "6.02214076e+23"),
            (-7.5e-300, "-7.5e-300"),
            (f64::NAN, "nan"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g(x), want, "{x}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::Int(1), Cell::Num(0.5)]);
        t.push(vec![Cell::Int(2), Cell::Empty]);
        t.note("b undefined at row 2".into());
        t.note("b undefined at row 2".into());
        assert_eq!(t.to_csv(), "a,b\n1,0.5\n2,\n# b undefined at row 2\n");
    }

    #[test]
    fn json_numbers_mirror_csv() {
        let mut t = Table::new(vec!["x"]);
        t.push(vec![Cell::Num(1.0 / 3.0)]);
        assert_eq!(t.rows_json().to_string(), "[{\"x\":0.333333333333333}]");
    }
}
