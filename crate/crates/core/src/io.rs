//! Deterministic text formatting shared by the CSV writers.

use std::fmt::Write as _;

/// 17 significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Accumulates CSV rows with a fixed header and `\n` line endings.
#[derive(Debug, Clone)]
pub struct CsvWriter {
    buf: String,
    columns: usize,
}

pub enum Field<'a> {
    F(f64),
    I(i64),
    U(u64),
    B(bool),
    S(&'a str),
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        Self { buf: header.join(",") + "\n", columns: header.len() }
    }

    pub fn row(&mut self, fields: &[Field<'_>]) {
        assert_eq!(fields.len(), self.columns, "row width does not match header");
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            let _ = match f {
                Field::F(v) => write!(self.buf, "{}", fmt_f64(*v)),
                Field::I(v) => write!(self.buf, "{v}"),
                Field::U(v) => write!(self.buf, "{v}"),
                Field::B(v) => write!(self.buf, "{v}"),
                Field::S(v) => write!(self.buf, "{v}"),
            };
        }
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
