//! Deterministic JSON and CSV output.
//!
//! Floats are always written with 17 significant digits in exponent form,
//! so equal values give equal bytes on every platform.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::classify::RegimeReport;
use crate::constants::ConstantReport;
use crate::error::{Error, Result};
use crate::pde::FieldSolution;
use crate::profiles::ProfileSolution;
use crate::scalar::Real;

/// Bumped whenever a field is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Format(format!("unknown format '{other}' (json, csv)"))),
        }
    }
}

/// `x` with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

struct SigFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for SigFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_float(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        w.write_all(fmt_float(v as f64).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Pretty JSON with fixed float formatting and a trailing newline.
pub fn to_json_bytes<S: Serialize + ?Sized>(value: &S) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let fmt = SigFormatter { inner: PrettyFormatter::with_indent(b"  ") };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value.serialize(&mut ser).map_err(|e| Error::Format(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

#[derive(Serialize)]
struct Envelope<'a, S: ?Sized> {
    schema_version: u32,
    kind: &'a str,
    result: &'a S,
}

/// Wraps `result` in `{schema_version, kind, result}`.
pub fn json_envelope<S: Serialize + ?Sized>(kind: &str, result: &S) -> Result<Vec<u8>> {
    to_json_bytes(&Envelope { schema_version: SCHEMA_VERSION, kind, result })
}

/// Anything the command line tool can write out.
pub trait Report: Serialize {
    fn kind(&self) -> &'static str;

    /// CSV rendering, if the report has a tabular form.
    fn csv(&self) -> Option<Vec<u8>> {
        None
    }
}

pub fn emit_report<R: Report + ?Sized>(report: &R, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => json_envelope(report.kind(), report),
        Format::Csv => report
            .csv()
            .ok_or_else(|| Error::Format(format!("no CSV form for '{}' output", report.kind()))),
    }
}

/// Joins rows of floats into CSV under `header`.
pub fn csv_table(header: &str, rows: impl Iterator<Item = Vec<f64>>) -> Vec<u8> {
    let mut out = String::with_capacity(64);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_float).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

/// `theta,value,residual` for each node.
pub fn profile_csv<T: Real>(sol: &ProfileSolution<T>) -> Vec<u8> {
    csv_table(
        "theta,value,residual",
        (0..sol.theta_grid.len())
            .map(|i| vec![sol.theta_grid[i].as_f64(), sol.values[i].as_f64(), sol.residuals[i].as_f64()]),
    )
}

/// `r,theta,u` in row-major grid order.
pub fn field_csv<T: Real>(sol: &FieldSolution<T>) -> Vec<u8> {
    let g = sol.grid;
    csv_table(
        "r,theta,u",
        (0..g.n_r).flat_map(move |i| {
            (0..g.n_theta).map(move |j| vec![g.r(i).as_f64(), g.theta(j).as_f64(), sol.at(i, j).as_f64()])
        }),
    )
}

impl<T: Real> Report for ConstantReport<T> {
    fn kind(&self) -> &'static str {
        "constants"
    }
}

impl<T: Real> Report for RegimeReport<T> {
    fn kind(&self) -> &'static str {
        "classify"
    }
}

impl<T: Real> Report for ProfileSolution<T> {
    fn kind(&self) -> &'static str {
        "profile"
    }

    fn csv(&self) -> Option<Vec<u8>> {
        Some(profile_csv(self))
    }
}

impl<T: Real> Report for FieldSolution<T> {
    fn kind(&self) -> &'static str {
        "pde2d"
    }

    fn csv(&self) -> Option<Vec<u8>> {
        Some(field_csv(self))
    }
}
