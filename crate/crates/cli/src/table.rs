//! Tabular records written as CSV (header row, 12 significant digits) or JSON.

use std::io::Write;

use serde_json::{Map, Number, Value as Json};

const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// Formats like C's `%.12g`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    /// JSON value carrying the same rounded number as the CSV cell.
    fn json(&self) -> Json {
        match self {
            Cell::Num(v) => format_number(*v)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Json::Null, Json::Number),
            Cell::Int(v) => Json::from(*v),
            Cell::Bool(v) => Json::Bool(*v),
            Cell::Text(s) => Json::String(s.clone()),
        }
    }
}

/// Rows sharing one header; a single-row table is a record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

/// One row under construction, built column by column.
#[derive(Debug, Default)]
pub struct Row(Vec<(String, Cell)>);

impl Row {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, column: impl Into<String>, value: impl Into<Cell>) -> &mut Self {
        self.0.push((column.into(), value.into()));
        self
    }
}

impl Table {
    /// Appends a row; every row must carry the columns of the first, in order.
    pub fn push(&mut self, row: Row) {
        let (columns, cells): (Vec<String>, Vec<Cell>) = row.0.into_iter().unzip();
        if self.rows.is_empty() {
            self.columns = columns;
        } else {
            assert_eq!(
                columns, self.columns,
                "rows of one table share their columns"
            );
        }
        self.rows.push(cells);
    }

    pub fn write_csv(&self, out: impl Write) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    fn object(&self, row: &[Cell]) -> Json {
        let map: Map<String, Json> = self
            .columns
            .iter()
            .cloned()
            .zip(row.iter().map(Cell::json))
            .collect();
        Json::Object(map)
    }

    /// A single object for a record, an array of objects otherwise.
    pub fn write_json(
        &self,
        as_record: bool,
        mut out: impl Write,
    ) -> Result<(), serde_json::Error> {
        let value = if as_record && self.rows.len() == 1 {
            self.object(&self.rows[0])
        } else {
            Json::Array(self.rows.iter().map(|r| self.object(r)).collect())
        };
        serde_json::to_writer_pretty(&mut out, &value)?;
        writeln!(out).map_err(serde_json::Error::io)
    }
}
