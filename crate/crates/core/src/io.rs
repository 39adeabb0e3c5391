//! Plain-text chain files and CSV tables.
//!
//! Chain format: the first non-empty line holds `n`, followed by `n` rows of
//! whitespace-separated probabilities. Lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::markov::StochasticMatrix;

pub fn parse_chain(text: &str) -> Result<StochasticMatrix> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty chain file".into()))?;
    let n: usize = header
        .parse()
        .map_err(|e| Error::Parse(format!("state count {header:?}: {e}")))?;
    if n == 0 {
        return Err(Error::Parse("state count must be positive".into()));
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("expected {n} rows, found {i}")))?;
        let vals: Vec<&str> = line.split_whitespace().collect();
        if vals.len() != n {
            return Err(Error::Parse(format!(
                "row {i} has {} entries, expected {n}",
                vals.len()
            )));
        }
        for (j, v) in vals.iter().enumerate() {
            m[(i, j)] = v
                .parse()
                .map_err(|e| Error::Parse(format!("entry ({i},{j}) {v:?}: {e}")))?;
        }
    }
    if lines.next().is_some() {
        return Err(Error::Parse(format!("trailing data after {n} rows")));
    }
    StochasticMatrix::new(m)
}

pub fn read_chain(path: &Path) -> Result<StochasticMatrix> {
    parse_chain(&fs::read_to_string(path)?)
}

pub fn format_chain(p: &StochasticMatrix) -> String {
    let mut out = format!("{}\n", p.n());
    for row in p.matrix().row_iter() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// A float with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated table with a header row and LF line endings.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    /// Two-column `index,value` table of a vector.
    pub fn indexed(values: impl IntoIterator<Item = f64>) -> Self {
        let mut t = Self::new(&["index", "value"]);
        for (i, v) in values.into_iter().enumerate() {
            t.push(vec![i.to_string(), num(v)]);
        }
        t
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_round_trip() {
        let p = crate::generators::random_reversible(5, 1, true);
        let back = parse_chain(&format_chain(&p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_chain("").is_err());
        assert!(parse_chain("2\n0.5 0.5\n").is_err());
        assert!(parse_chain("2\n0.5 0.5\n0.5\n").is_err());
        assert!(parse_chain("2\n0.5 0.5\n0.6 0.6\n").is_err());
        assert!(parse_chain("# comment\n1\n1.0\n").is_ok());
    }

    #[test]
    fn csv_format() {
        let t = CsvTable::indexed([0.1, 2.0]);
        assert_eq!(
            t.render(),
            "index,value\n0,1.0000000000000001e-1\n1,2.0000000000000000e0\n"
        );
    }
}
