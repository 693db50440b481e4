//! Sample matrices and the comma-separated text format they are loaded from.
//!
//! The format is deliberately small: one observation per line, fields split
//! on `,` with surrounding whitespace trimmed, no quoting. Blank lines and
//! lines whose first non-space character is `#` are skipped. An optional
//! header line names the columns.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::knn::Points;

/// `rows` observations of `cols` finite real variables, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
    names: Option<Vec<String>>,
}

impl SampleMatrix {
    /// Builds a matrix from row-major values. Requires at least two rows, at
    /// least one column and finite entries.
    pub fn new(values: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if cols == 0 || rows.checked_mul(cols) != Some(values.len()) {
            return Err(Error::Shape {
                rows,
                cols,
                len: values.len(),
            });
        }
        if rows < 2 {
            return Err(Error::TooFewRows(rows));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                line: pos / cols + 1,
                column: pos % cols + 1,
            });
        }
        Ok(SampleMatrix {
            values,
            rows,
            cols,
            names: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Ragged {
                    line: i + 1,
                    found: r.len(),
                    expected: cols,
                });
            }
            values.extend_from_slice(r);
        }
        Self::new(values, rows.len(), cols)
    }

    /// Builds a matrix from equal-length columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::InvalidArgument(
                "columns have different lengths".into(),
            ));
        }
        let mut values = Vec::with_capacity(rows * cols);
        for t in 0..rows {
            values.extend(columns.iter().map(|c| c[t]));
        }
        Self::new(values, rows, cols)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.cols {
            return Err(Error::InvalidArgument(format!(
                "{} column names for {} columns",
                names.len(),
                self.cols
            )));
        }
        self.names = Some(names);
        Ok(self)
    }

    /// Observation count (T).
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Variable count (N).
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.cols..(t + 1) * self.cols]
    }

    pub fn get(&self, t: usize, i: usize) -> f64 {
        self.values[t * self.cols + i]
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.values
            .iter()
            .skip(i)
            .step_by(self.cols)
            .copied()
            .collect()
    }

    pub fn points(&self) -> Points<'_> {
        Points::new(&self.values, self.cols).expect("matrix shape is checked on construction")
    }

    /// A new matrix holding the given columns, in the given order.
    pub fn select(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptySelection);
        }
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.cols) {
            return Err(Error::UnknownColumn(bad.to_string()));
        }
        let mut values = Vec::with_capacity(self.rows * columns.len());
        for t in 0..self.rows {
            let row = self.row(t);
            values.extend(columns.iter().map(|&c| row[c]));
        }
        let mut out = Self::new(values, self.rows, columns.len())?;
        if let Some(names) = &self.names {
            out.names = Some(columns.iter().map(|&c| names[c].clone()).collect());
        }
        Ok(out)
    }

    /// Applies `f` to every entry of the listed columns.
    pub fn map_columns(&self, columns: &[usize], f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut values = self.values.clone();
        for &c in columns {
            if c >= self.cols {
                return Err(Error::UnknownColumn(c.to_string()));
            }
            for v in values.iter_mut().skip(c).step_by(self.cols) {
                *v = f(*v);
            }
        }
        let mut out = Self::new(values, self.rows, self.cols)?;
        out.names = self.names.clone();
        Ok(out)
    }

    /// Reorders rows so that output row `t` is input row `order[t]`.
    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.rows];
        if order.len() != self.rows
            || order
                .iter()
                .any(|&t| t >= self.rows || std::mem::replace(&mut seen[t], true))
        {
            return Err(Error::InvalidArgument(
                "row order is not a permutation".into(),
            ));
        }
        let mut values = Vec::with_capacity(self.values.len());
        for &t in order {
            values.extend_from_slice(self.row(t));
        }
        let mut out = Self::new(values, self.rows, self.cols)?;
        out.names = self.names.clone();
        Ok(out)
    }
}

/// Selects a column by position, optionally carrying its header label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    pub index: usize,
    pub name: Option<String>,
}

impl ColumnSpec {
    pub fn index(index: usize) -> Self {
        ColumnSpec { index, name: None }
    }
}

/// Resolves a comma-separated list of column indices or header names.
///
/// Numeric tokens are 0-based positions; anything else must match a header
/// label exactly.
pub fn parse_column_list(list: &str, header: Option<&[String]>) -> Result<Vec<ColumnSpec>> {
    let mut specs = Vec::new();
    for token in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Ok(index) = token.parse::<usize>() {
            let name = header.and_then(|h| h.get(index)).cloned();
            specs.push(ColumnSpec { index, name });
        } else {
            let index = header
                .and_then(|h| h.iter().position(|n| n == token))
                .ok_or_else(|| Error::UnknownColumn(token.to_string()))?;
            specs.push(ColumnSpec {
                index,
                name: Some(token.to_string()),
            });
        }
    }
    if specs.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(specs)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i + 1, trimmed))
        }
    })
}

/// Reports whether the first data line looks like a header, i.e. contains a
/// field that is not a number.
pub fn sniff_header(text: &str) -> bool {
    data_lines(text)
        .next()
        .is_some_and(|(_, line)| line.split(',').any(|f| f.trim().parse::<f64>().is_err()))
}

/// Parses comma-separated numeric text into a sample matrix.
///
/// Errors name the 1-based line of the input and the 1-based field position
/// of the offending cell.
pub fn parse_csv(
    text: &str,
    has_header: bool,
    columns: Option<&[ColumnSpec]>,
) -> Result<SampleMatrix> {
    let mut lines = data_lines(text).peekable();
    let header: Option<Vec<String>> = if has_header {
        lines
            .next()
            .map(|(_, l)| l.split(',').map(|f| f.trim().to_string()).collect())
    } else {
        None
    };
    let width = match (&header, lines.peek()) {
        (Some(h), _) => h.len(),
        (None, Some((_, l))) => l.split(',').count(),
        (None, None) => return Err(Error::TooFewRows(0)),
    };

    let selected: Vec<usize> = match columns {
        Some([]) => return Err(Error::EmptySelection),
        Some(cs) => {
            for c in cs {
                if c.index >= width {
                    return Err(Error::UnknownColumn(c.index.to_string()));
                }
            }
            cs.iter().map(|c| c.index).collect()
        }
        None => (0..width).collect(),
    };

    let mut values = Vec::new();
    let mut rows = 0;
    let mut fields = Vec::with_capacity(width);
    for (line, text) in lines {
        fields.clear();
        fields.extend(text.split(',').map(str::trim));
        if fields.len() != width {
            return Err(Error::Ragged {
                line,
                found: fields.len(),
                expected: width,
            });
        }
        for &c in &selected {
            let cell = fields[c];
            let v: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                line,
                column: c + 1,
                cell: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    line,
                    column: c + 1,
                });
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows < 2 {
        return Err(Error::TooFewRows(rows));
    }
    let m = SampleMatrix::new(values, rows, selected.len())?;
    match header {
        Some(h) => m.with_names(selected.iter().map(|&c| h[c].clone()).collect()),
        None => Ok(m),
    }
}

/// Writes a matrix as comma-separated text. Values use the shortest decimal
/// form that parses back to the same `f64`.
pub fn to_csv(m: &SampleMatrix) -> String {
    let mut out = String::new();
    if let Some(names) = m.names() {
        out.push_str(&names.join(","));
        out.push('\n');
    }
    for t in 0..m.rows() {
        for (i, v) in m.row(t).iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// A data-quality observation. Findings are warnings; none of them stops
/// estimation on its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finding {
    NonFinite {
        row: usize,
        column: usize,
    },
    ConstantColumn {
        column: usize,
    },
    /// Rows whose entries are all exactly equal, ascending.
    DuplicateRows {
        rows: Vec<usize>,
    },
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Finding::NonFinite { row, column } => {
                write!(f, "non-finite value at row {row}, column {column}")
            }
            Finding::ConstantColumn { column } => write!(f, "column {column} is constant"),
            Finding::DuplicateRows { rows } => write!(f, "duplicate rows {rows:?}"),
        }
    }
}

pub fn validate(m: &SampleMatrix) -> Vec<Finding> {
    validate_values(m.as_slice(), m.cols())
}

/// Checks row-major values with `cols` columns. Indices in findings are
/// 0-based.
pub fn validate_values(values: &[f64], cols: usize) -> Vec<Finding> {
    let mut findings = Vec::new();
    if cols == 0 {
        return findings;
    }
    let rows = values.len() / cols;
    for (pos, v) in values.iter().enumerate() {
        if !v.is_finite() {
            findings.push(Finding::NonFinite {
                row: pos / cols,
                column: pos % cols,
            });
        }
    }
    if rows >= 2 {
        for c in 0..cols {
            let first = values[c];
            if values.iter().skip(c).step_by(cols).all(|&v| v == first) {
                findings.push(Finding::ConstantColumn { column: c });
            }
        }
    }

    // Keyed on bit patterns with -0.0 folded onto 0.0, so "equal" means `==`
    // for every finite entry.
    let key = |v: f64| if v == 0.0 { 0u64 } else { v.to_bits() };
    let mut groups: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    for t in 0..rows {
        let row = &values[t * cols..(t + 1) * cols];
        if row.iter().any(|v| v.is_nan()) {
            continue;
        }
        groups
            .entry(row.iter().map(|&v| key(v)).collect())
            .or_default()
            .push(t);
    }
    let mut dups: Vec<Vec<usize>> = groups.into_values().filter(|g| g.len() > 1).collect();
    dups.sort();
    findings.extend(dups.into_iter().map(|rows| Finding::DuplicateRows { rows }));
    findings
}
