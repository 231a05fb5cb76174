//! JSON and CSV rendering. Floats are written with 17 significant digits
//! so that they parse back to the same `f64`.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::{CliError, CliResult};

/// Compact JSON with `{:.16e}` floats; non-finite values become `null`.
struct ExactFloats;

impl ExactFloats {
    fn write<W: ?Sized + Write>(writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{}", float(value))
        } else {
            writer.write_all(b"null")
        }
    }
}

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        Self::write(writer, value)
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        Self::write(writer, f64::from(value))
    }
}

pub fn float(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats);
    value
        .serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    String::from_utf8(buf).expect("JSON output is UTF-8")
}

pub fn write_json<T: Serialize + ?Sized, W: Write>(out: &mut W, value: &T) -> CliResult<()> {
    writeln!(out, "{}", to_json(value)).map_err(CliError::Output)
}

/// Header row then one row per record; floats as in the JSON output.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_io = |e: csv::Error| CliError::Output(io::Error::other(e));
    w.write_record(header).map_err(to_io)?;
    for row in rows {
        w.write_record(row).map_err(to_io)?;
    }
    w.flush().map_err(CliError::Output)
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    #[serde(flatten)]
    details: std::collections::BTreeMap<&'a str, f64>,
}

pub fn error_json(e: &CliError) -> String {
    to_json(&ErrorReport {
        error: e.name(),
        message: e.to_string(),
        details: e.details().into_iter().collect(),
    })
}
