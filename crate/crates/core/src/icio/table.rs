//! Inter-country input-output tables and their CSV layouts.
//!
//! Native layout (written by [`write_table`]):
//!
//! ```text
//! row,CAN:MFG,CAN:SRV,USA:MFG,USA:SRV,FD:CAN,FD:USA
//! CAN:MFG,...intermediate flows...,...final demand by country...
//! ...
//! VA,...value added per column...        (optional, checked when present)
//! OUT,...gross output per column...
//! ```
//!
//! Every `COUNTRY:SECTOR` column must have a row with the same label, in the
//! same order. `FD:COUNTRY` columns hold final demand by destination country.
//!
//! The OECD ICIO release layout (`AUS_A01` style labels, final demand columns
//! suffixed `_HFCE`, `_NPISH`, `_GGFC`, `_GFCF`, `_INVNT`, `_DPABR`, and
//! `TLS`/`VA`/`OUT` rows) is read by [`load_oecd_table`]. There, taxes less
//! subsidies are folded into value added.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance of the accounting identities.
pub const BALANCE_TOLERANCE: f64 = 1e-3;

const OECD_FINAL_DEMAND: [&str; 7] = ["HFCE", "NPISH", "NPISH1", "GGFC", "GFCF", "INVNT", "DPABR"];

#[derive(Debug, Clone, PartialEq)]
pub struct WorldIOTable {
    countries: Vec<String>,
    sectors: Vec<String>,
    /// `(country, sector)` index of each row/column of `z`.
    entries: Vec<(usize, usize)>,
    z: DMatrix<f64>,
    /// Final demand, one column per country.
    f: DMatrix<f64>,
    x: DVector<f64>,
    v: DVector<f64>,
}

fn index_of(list: &mut Vec<String>, name: &str) -> usize {
    match list.iter().position(|c| c == name) {
        Some(i) => i,
        None => {
            list.push(name.to_string());
            list.len() - 1
        }
    }
}

impl WorldIOTable {
    /// Builds and validates a table from labelled blocks.
    ///
    /// `value_added`, when given, must agree with output minus intermediate
    /// inputs within [`BALANCE_TOLERANCE`].
    pub fn new(
        labels: &[(String, String)],
        final_demand_countries: &[String],
        z: DMatrix<f64>,
        f: DMatrix<f64>,
        x: DVector<f64>,
        value_added: Option<DVector<f64>>,
    ) -> Result<Self> {
        let n = labels.len();
        if z.shape() != (n, n) || x.len() != n || f.nrows() != n || f.ncols() != final_demand_countries.len() {
            return Err(Error::domain("input-output blocks have inconsistent shapes"));
        }
        let mut countries = Vec::new();
        let mut sectors = Vec::new();
        let mut entries = Vec::with_capacity(n);
        for (c, s) in labels {
            let entry = (index_of(&mut countries, c), index_of(&mut sectors, s));
            if entries.contains(&entry) {
                return Err(Error::domain(format!("duplicate row {c}:{s}")));
            }
            entries.push(entry);
        }
        // final demand columns reordered to match `countries`
        let mut fd = DMatrix::<f64>::zeros(n, countries.len());
        for (k, c) in final_demand_countries.iter().enumerate() {
            let idx = countries
                .iter()
                .position(|x| x == c)
                .ok_or_else(|| Error::domain(format!("final demand column for unknown country {c}")))?;
            for r in 0..n {
                fd[(r, idx)] += f[(r, k)];
            }
        }

        let mut offenders = Vec::new();
        let label = |r: usize| format!("{}:{}", labels[r].0, labels[r].1);
        if z.iter().any(|v| !v.is_finite() || *v < 0.0) {
            offenders.push("intermediate flows must be finite and nonnegative".to_string());
        }
        let v: DVector<f64> = DVector::from_iterator(n, (0..n).map(|c| x[c] - z.column(c).sum()));
        for r in 0..n {
            let xr = x[r];
            if !(xr.is_finite() && xr >= 0.0) {
                offenders.push(format!("{}: gross output {xr}", label(r)));
                continue;
            }
            let uses = z.row(r).sum() + fd.row(r).sum();
            let scale = xr.abs().max(1e-9);
            if (uses - xr).abs() > BALANCE_TOLERANCE * scale {
                offenders.push(format!(
                    "{}: output {xr} but intermediate plus final use {uses}",
                    label(r)
                ));
            }
            if xr == 0.0 && z.column(r).sum() != 0.0 {
                offenders.push(format!("{}: inputs without output", label(r)));
            }
            if let Some(given) = &value_added {
                if (given[r] - v[r]).abs() > BALANCE_TOLERANCE * scale {
                    offenders.push(format!(
                        "{}: value added {} but output minus inputs is {}",
                        label(r),
                        given[r],
                        v[r]
                    ));
                }
            }
        }
        if !offenders.is_empty() {
            return Err(Error::Validation { offenders });
        }
        Ok(WorldIOTable {
            countries,
            sectors,
            entries,
            z,
            f: fd,
            x,
            v,
        })
    }

    pub fn countries(&self) -> &[String] {
        &self.countries
    }

    pub fn sectors(&self) -> &[String] {
        &self.sectors
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(country, sector)` indices of every row.
    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    pub fn label(&self, row: usize) -> String {
        let (c, s) = self.entries[row];
        format!("{}:{}", self.countries[c], self.sectors[s])
    }

    pub fn intermediate(&self) -> &DMatrix<f64> {
        &self.z
    }

    pub fn final_demand(&self) -> &DMatrix<f64> {
        &self.f
    }

    pub fn gross_output(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn value_added(&self) -> &DVector<f64> {
        &self.v
    }

    /// Technical coefficients `A = Z diag(x)^{-1}`; zero-output columns stay zero.
    pub fn coefficients(&self) -> DMatrix<f64> {
        let mut a = self.z.clone();
        for (c, mut col) in a.column_iter_mut().enumerate() {
            let x = self.x[c];
            if x > 0.0 {
                col /= x;
            }
        }
        a
    }

    /// Value added per unit of gross output; zero for rows without output.
    pub fn value_added_ratio(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            (0..self.len()).map(|r| if self.x[r] > 0.0 { self.v[r] / self.x[r] } else { 0.0 }),
        )
    }

    pub fn country_index(&self, name: &str) -> Option<usize> {
        self.countries.iter().position(|c| c == name)
    }

    pub fn sector_index(&self, name: &str) -> Option<usize> {
        self.sectors.iter().position(|s| s == name)
    }
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn read_records(reader: impl Read) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(line, 0, e.to_string())
        })?;
        let line = rec.position().map_or(out.len() + 1, |p| p.line() as usize);
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

fn number(cell: &str, line: usize, column: usize) -> Result<f64> {
    if cell.is_empty() {
        return Ok(0.0);
    }
    cell.parse::<f64>()
        .map_err(|_| parse_error(line, column, format!("not a number: {cell:?}")))
}

/// Reads a table in either supported layout.
pub fn load_table(path: impl AsRef<Path>) -> Result<WorldIOTable> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let first = text.lines().next().unwrap_or("");
    if first.contains(':') {
        parse_native(text.as_bytes())
    } else {
        parse_oecd(text.as_bytes())
    }
}

pub fn load_oecd_table(path: impl AsRef<Path>) -> Result<WorldIOTable> {
    parse_oecd(File::open(path)?)
}

/// Parses the native layout.
pub fn parse_native(reader: impl Read) -> Result<WorldIOTable> {
    let records = read_records(reader)?;
    let (header_line, header) = records.first().ok_or_else(|| parse_error(1, 1, "empty table"))?;
    let mut labels = Vec::new();
    let mut fd_countries = Vec::new();
    for (k, cell) in header.iter().enumerate().skip(1) {
        let col = k + 1;
        let (a, b) = cell
            .split_once(':')
            .ok_or_else(|| parse_error(*header_line, col, format!("expected COUNTRY:SECTOR, got {cell:?}")))?;
        if a == "FD" {
            fd_countries.push(b.to_string());
        } else if !fd_countries.is_empty() {
            return Err(parse_error(
                *header_line,
                col,
                "industry column after final demand block",
            ));
        } else {
            labels.push((a.to_string(), b.to_string()));
        }
    }
    let n = labels.len();
    if n == 0 {
        return Err(parse_error(*header_line, 2, "no industry columns"));
    }
    let width = 1 + n + fd_countries.len();
    let mut z = DMatrix::zeros(n, n);
    let mut f = DMatrix::zeros(n, fd_countries.len());
    let mut va = None;
    let mut out = None;
    let mut next_row = 0;
    for (line, rec) in records.iter().skip(1) {
        let line = *line;
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        if rec.len() > width {
            return Err(parse_error(line, width + 1, "row longer than header"));
        }
        let cell = |k: usize| rec.get(k).map(String::as_str).unwrap_or("");
        let values = |count: usize| -> Result<DVector<f64>> {
            (0..count)
                .map(|k| number(cell(k + 1), line, k + 2))
                .collect::<Result<Vec<_>>>()
                .map(DVector::from_vec)
        };
        match rec[0].as_str() {
            "VA" => va = Some(values(n)?),
            "OUT" => out = Some(values(n)?),
            label => {
                if next_row >= n {
                    return Err(parse_error(line, 1, format!("unexpected row {label:?}")));
                }
                let expect = format!("{}:{}", labels[next_row].0, labels[next_row].1);
                if label != expect {
                    return Err(parse_error(line, 1, format!("expected row {expect:?}, got {label:?}")));
                }
                let row = values(n + fd_countries.len())?;
                for c in 0..n {
                    z[(next_row, c)] = row[c];
                }
                for c in 0..fd_countries.len() {
                    f[(next_row, c)] = row[n + c];
                }
                next_row += 1;
            }
        }
    }
    if next_row != n {
        let line = records.last().map_or(1, |r| r.0);
        return Err(parse_error(
            line,
            1,
            format!("found {next_row} industry rows, expected {n}"),
        ));
    }
    let x = out.ok_or_else(|| parse_error(records.len(), 1, "missing OUT row"))?;
    WorldIOTable::new(&labels, &fd_countries, z, f, x, va)
}

/// Parses the OECD ICIO release layout.
pub fn parse_oecd(reader: impl Read) -> Result<WorldIOTable> {
    let records = read_records(reader)?;
    let (header_line, header) = records.first().ok_or_else(|| parse_error(1, 1, "empty table"))?;
    let mut industry_cols = Vec::new();
    let mut labels = Vec::new();
    let mut fd_cols: Vec<(usize, String)> = Vec::new();
    let mut fd_countries: Vec<String> = Vec::new();
    for (k, cell) in header.iter().enumerate().skip(1) {
        if cell == "OUT" || cell == "TOTAL" {
            continue;
        }
        let (country, code) = cell
            .split_once('_')
            .ok_or_else(|| parse_error(*header_line, k + 1, format!("unrecognized column {cell:?}")))?;
        if OECD_FINAL_DEMAND.contains(&code) {
            index_of(&mut fd_countries, country);
            fd_cols.push((k, country.to_string()));
        } else {
            industry_cols.push(k);
            labels.push((country.to_string(), code.to_string()));
        }
    }
    let n = labels.len();
    let position: HashMap<String, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, (c, s))| (format!("{c}_{s}"), i))
        .collect();
    let mut z = DMatrix::zeros(n, n);
    let mut f = DMatrix::zeros(n, fd_countries.len());
    let mut x: Option<DVector<f64>> = None;
    let mut seen = vec![false; n];
    for (line, rec) in records.iter().skip(1) {
        let line = *line;
        let cell = |k: usize| rec.get(k).map(String::as_str).unwrap_or("");
        let name = cell(0);
        if name == "OUT" {
            let mut out = DVector::zeros(n);
            for (i, &k) in industry_cols.iter().enumerate() {
                out[i] = number(cell(k), line, k + 1)?;
            }
            x = Some(out);
            continue;
        }
        let Some(&r) = position.get(name) else {
            // TLS, VA and other primary input rows are implied by OUT
            continue;
        };
        seen[r] = true;
        for (i, &k) in industry_cols.iter().enumerate() {
            z[(r, i)] = number(cell(k), line, k + 1)?;
        }
        for (k, country) in &fd_cols {
            let c = fd_countries.iter().position(|x| x == country).expect("indexed");
            f[(r, c)] += number(cell(*k), line, k + 1)?;
        }
    }
    if let Some(r) = seen.iter().position(|s| !s) {
        return Err(parse_error(
            records.len(),
            1,
            format!("missing row for {}_{}", labels[r].0, labels[r].1),
        ));
    }
    let x = x.ok_or_else(|| parse_error(records.len(), 1, "missing OUT row"))?;
    WorldIOTable::new(&labels, &fd_countries, z, f, x, None)
}

/// Writes `table` in the native layout.
pub fn write_table(table: &WorldIOTable, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let n = table.len();
    let mut header = vec!["row".to_string()];
    header.extend((0..n).map(|r| table.label(r)));
    header.extend(table.countries.iter().map(|c| format!("FD:{c}")));
    w.write_record(&header).map_err(csv_io)?;
    for r in 0..n {
        let mut row = vec![table.label(r)];
        row.extend(table.z.row(r).iter().map(|v| v.to_string()));
        row.extend(table.f.row(r).iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(csv_io)?;
    }
    let tail = |name: &str, v: &DVector<f64>| -> Vec<String> {
        std::iter::once(name.to_string())
            .chain(v.iter().map(|x| x.to_string()))
            .chain(std::iter::repeat_n(String::new(), table.countries.len()))
            .collect()
    };
    w.write_record(tail("VA", &table.v)).map_err(csv_io)?;
    w.write_record(tail("OUT", &table.x)).map_err(csv_io)?;
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
