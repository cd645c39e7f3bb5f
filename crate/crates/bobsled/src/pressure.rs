//! Contact-pressure grids: first row holds the normal-force axis [N] after a
//! corner label, each following row starts with a track radius [m] and lists
//! the pressures [MPa].

use std::fmt::Write;

use bobsled_core::friction::PressureLookup;

use crate::error::CoreContext;
use crate::meta::split_header;
use crate::provenance::Input;
use crate::{Error, Result};

pub fn parse_pressure_table(input: &Input) -> Result<PressureLookup> {
    let path = &input.path;
    let (header, body) = split_header(&input.text);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let mut f_z = Vec::new();
    let mut radius = Vec::new();
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = header.lines + row as u64 + 1;
        let record = record.map_err(|e| Error::parse(path, line, e.to_string()))?;
        let number = |raw: &str| {
            raw.parse::<f64>()
                .map_err(|_| Error::parse(path, line, format!("invalid number `{raw}`")))
        };
        if row == 0 {
            for raw in record.iter().skip(1) {
                f_z.push(number(raw)?);
            }
            continue;
        }
        if record.len() != f_z.len() + 1 {
            return Err(Error::parse(
                path,
                line,
                format!("expected {} values, found {}", f_z.len() + 1, record.len()),
            ));
        }
        radius.push(number(&record[0])?);
        for raw in record.iter().skip(1) {
            values.push(number(raw)?);
        }
    }
    PressureLookup::new(f_z, radius, values).context(path.display().to_string())
}

pub fn format_pressure_table(table: &PressureLookup) -> String {
    let mut out = String::from("r_y\\F_z");
    for f in table.f_z_axis() {
        let _ = write!(out, ",{f}");
    }
    out.push('\n');
    let n = table.f_z_axis().len();
    for (i, r) in table.radius_axis().iter().enumerate() {
        let _ = write!(out, "{r}");
        for p in &table.values()[i * n..(i + 1) * n] {
            let _ = write!(out, ",{p}");
        }
        out.push('\n');
    }
    out
}
