//! Leontief inversion and country-pair reliance measures.

use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::table::WorldIOTable;
use crate::error::{Error, Result};

fn domain(msg: impl Into<String>) -> Error {
    Error::domain(msg)
}

/// Largest admissible entry of `B (I - A) - I`.
pub const INVERSE_RESIDUAL: f64 = 1e-10;

pub const REST_OF_WORLD: &str = "ROW";

/// `B = (I - A)^{-1}` for the table's technical coefficients.
///
/// Fails when `I - A` is singular, when `B` has negative entries (the
/// coefficients are not productive) or when the inverse is inaccurate.
pub fn leontief_inverse(table: &WorldIOTable) -> Result<DMatrix<f64>> {
    leontief_inverse_of(&table.coefficients())
}

pub fn leontief_inverse_of(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let m = DMatrix::<f64>::identity(n, n) - a;
    let b = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| domain("I - A is singular"))?;
    if b.iter().any(|v| *v < -1e-12) {
        return Err(domain(
            "coefficients are not productive: Leontief inverse has negative entries",
        ));
    }
    let residual = (&b * &m - DMatrix::<f64>::identity(n, n)).amax();
    if !(residual < INVERSE_RESIDUAL) {
        return Err(domain(format!(
            "Leontief inverse residual {residual:e} exceeds {INVERSE_RESIDUAL:e}"
        )));
    }
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Measure {
    /// Value-added content through the Leontief inverse.
    #[default]
    ValueAdded,
    /// Direct intermediate purchases only.
    Gross,
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "va" | "value-added" => Ok(Measure::ValueAdded),
            "gross" => Ok(Measure::Gross),
            other => Err(domain(format!("unknown measure {other:?} (expected va or gross)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelianceKind {
    /// Row country's final output relying on column country's inputs.
    Input,
    /// Row country's sales going to column country's final output.
    Market,
}

/// Country-by-country percentages; rows sum to 100.
#[derive(Debug, Clone, PartialEq)]
pub struct RelianceMatrix {
    pub kind: RelianceKind,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl RelianceMatrix {
    pub fn get(&self, row: &str, column: &str) -> Option<f64> {
        let r = self.rows.iter().position(|x| x == row)?;
        let c = self.columns.iter().position(|x| x == column)?;
        Some(self.values[r][c])
    }

    /// Share of each row country accounted for by itself.
    pub fn domestic(&self, row: &str) -> Option<f64> {
        self.get(row, row)
    }

    /// CSV with one decimal; own-country cells are left blank.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (r, name) in self.rows.iter().enumerate() {
            out.push_str(name);
            for (c, col) in self.columns.iter().enumerate() {
                out.push(',');
                if col != name {
                    let _ = write!(out, "{:.1}", self.values[r][c]);
                }
            }
            out.push('\n');
        }
        out
    }

    /// Restricts rows to `focus` and folds all other columns into [`REST_OF_WORLD`].
    pub fn focused(&self, focus: &[String]) -> Result<RelianceMatrix> {
        let mut row_idx = Vec::with_capacity(focus.len());
        for f in focus {
            let r = self
                .rows
                .iter()
                .position(|x| x == f)
                .ok_or_else(|| domain(format!("unknown country {f:?}")))?;
            row_idx.push(r);
        }
        let col_idx: Vec<usize> = focus
            .iter()
            .map(|f| self.columns.iter().position(|x| x == f).expect("square measure"))
            .collect();
        let has_rest = self.columns.len() > focus.len();
        let mut columns = focus.to_vec();
        if has_rest {
            columns.push(REST_OF_WORLD.to_string());
        }
        let values = row_idx
            .iter()
            .map(|&r| {
                let row = &self.values[r];
                let mut v: Vec<f64> = col_idx.iter().map(|&c| row[c]).collect();
                if has_rest {
                    let kept: f64 = v.iter().sum();
                    v.push(row.iter().sum::<f64>() - kept);
                }
                v
            })
            .collect();
        Ok(RelianceMatrix {
            kind: self.kind,
            rows: focus.to_vec(),
            columns,
            values,
        })
    }
}

/// Percentage-point change from `earlier` to `later`.
pub fn reliance_change(earlier: &RelianceMatrix, later: &RelianceMatrix) -> Result<RelianceMatrix> {
    if earlier.rows != later.rows || earlier.columns != later.columns || earlier.kind != later.kind {
        return Err(domain("reliance matrices cover different countries or measures"));
    }
    let values = earlier
        .values
        .iter()
        .zip(&later.values)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| y - x).collect())
        .collect();
    Ok(RelianceMatrix {
        kind: earlier.kind,
        rows: earlier.rows.clone(),
        columns: earlier.columns.clone(),
        values,
    })
}

/// Expands sector patterns into labels present in `table`, in table order.
///
/// A pattern is an exact label or a prefix followed by `*` (`C*` selects every
/// sector whose label starts with `C`). Every pattern must match something.
pub fn resolve_sectors(table: &WorldIOTable, patterns: &[String]) -> Result<Vec<String>> {
    let mut selected = vec![false; table.sectors().len()];
    for p in patterns {
        let hits: Vec<usize> = match p.strip_suffix('*') {
            Some(prefix) => (0..selected.len())
                .filter(|&s| table.sectors()[s].starts_with(prefix))
                .collect(),
            None => table.sector_index(p).into_iter().collect(),
        };
        if hits.is_empty() {
            return Err(domain(format!("unknown sector {p:?}")));
        }
        hits.into_iter().for_each(|s| selected[s] = true);
    }
    Ok(table
        .sectors()
        .iter()
        .zip(selected)
        .filter(|(_, keep)| *keep)
        .map(|(s, _)| s.clone())
        .collect())
}

/// Row indices of `targets` sectors for each country.
fn target_rows(table: &WorldIOTable, targets: &[String]) -> Result<Vec<Vec<usize>>> {
    if targets.is_empty() {
        return Err(domain("no target sectors"));
    }
    let mut ids = Vec::new();
    for t in targets {
        ids.push(
            table
                .sector_index(t)
                .ok_or_else(|| domain(format!("unknown sector {t:?}")))?,
        );
    }
    let mut rows = vec![Vec::new(); table.countries().len()];
    for (r, &(c, s)) in table.entries().iter().enumerate() {
        if ids.contains(&s) {
            rows[c].push(r);
        }
    }
    Ok(rows)
}

/// Content of each country's inputs in column `col` of `b`, per unit of output.
fn content_by_country(table: &WorldIOTable, weights: &[f64], b: &DMatrix<f64>, col: usize) -> Vec<f64> {
    let mut out = vec![0.0; table.countries().len()];
    for (r, &(c, _)) in table.entries().iter().enumerate() {
        out[c] += weights[r] * b[(r, col)];
    }
    out
}

/// Normalizes rows to percentages. A row without any flow is an error unless
/// `empty_is_domestic`, in which case it is booked entirely to its own country.
fn percent_rows(
    raw: Vec<Vec<f64>>,
    table: &WorldIOTable,
    what: &str,
    empty_is_domestic: bool,
) -> Result<Vec<Vec<f64>>> {
    raw.into_iter()
        .enumerate()
        .map(|(i, row)| {
            let total: f64 = row.iter().sum();
            if total == 0.0 && empty_is_domestic {
                let mut own = vec![0.0; row.len()];
                own[i] = 100.0;
                return Ok(own);
            }
            if !(total > 0.0) {
                return Err(domain(format!(
                    "{} has no {what} in the target sectors",
                    table.countries()[i]
                )));
            }
            Ok(row.into_iter().map(|v| 100.0 * v / total).collect())
        })
        .collect()
}

/// Foreign input reliance of each country's `targets` output, in percent.
///
/// Row `i`, column `j` is the share of the value of `i`'s target-sector output
/// that originates in `j`, averaged over target sectors with output weights.
/// With [`Measure::Gross`] only direct intermediate purchases count and the
/// remainder is attributed to the producing country.
pub fn compute_fir(table: &WorldIOTable, targets: &[String], measure: Measure) -> Result<RelianceMatrix> {
    let rows = target_rows(table, targets)?;
    let x = table.gross_output();
    let k = table.countries().len();
    let (weights, b) = match measure {
        Measure::ValueAdded => (table.value_added_ratio().as_slice().to_vec(), leontief_inverse(table)?),
        Measure::Gross => (vec![1.0; table.len()], table.coefficients()),
    };
    let mut raw = Vec::with_capacity(k);
    for (i, cols) in rows.iter().enumerate() {
        let mut acc = vec![0.0; k];
        for &col in cols {
            let content = content_by_country(table, &weights, &b, col);
            for (a, v) in acc.iter_mut().zip(content) {
                *a += x[col] * v;
            }
        }
        if measure == Measure::Gross {
            let out: f64 = cols.iter().map(|&c| x[c]).sum();
            let foreign: f64 = acc.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v).sum();
            acc[i] = out - foreign;
        }
        raw.push(acc);
    }
    Ok(RelianceMatrix {
        kind: RelianceKind::Input,
        rows: table.countries().to_vec(),
        columns: table.countries().to_vec(),
        values: percent_rows(raw, table, "output", false)?,
    })
}

/// Foreign market reliance of each country, in percent.
///
/// Row `i`, column `j` is the share of `i`'s sales into the world's
/// `targets` output that lands in country `j`'s target sectors. Value-added
/// sales include indirect routes through the Leontief inverse; gross sales
/// count direct intermediate deliveries only. A country with no such sales is
/// reported as fully domestic.
pub fn compute_fmr(table: &WorldIOTable, targets: &[String], measure: Measure) -> Result<RelianceMatrix> {
    let rows = target_rows(table, targets)?;
    let x = table.gross_output();
    let k = table.countries().len();
    let mut raw = vec![vec![0.0; k]; k];
    match measure {
        Measure::ValueAdded => {
            let weights = table.value_added_ratio();
            let b = leontief_inverse(table)?;
            for (j, cols) in rows.iter().enumerate() {
                for &col in cols {
                    let content = content_by_country(table, weights.as_slice(), &b, col);
                    for (i, v) in content.into_iter().enumerate() {
                        raw[i][j] += v * x[col];
                    }
                }
            }
        }
        Measure::Gross => {
            let z = table.intermediate();
            for (j, cols) in rows.iter().enumerate() {
                for &col in cols {
                    for (r, &(i, _)) in table.entries().iter().enumerate() {
                        raw[i][j] += z[(r, col)];
                    }
                }
            }
        }
    }
    Ok(RelianceMatrix {
        kind: RelianceKind::Market,
        rows: table.countries().to_vec(),
        columns: table.countries().to_vec(),
        values: percent_rows(raw, table, "sales", true)?,
    })
}
