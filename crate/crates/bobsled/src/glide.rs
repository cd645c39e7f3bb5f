//! Glide-run CSV files from the ice house.
//!
//! A `# key: value` block carries `mass` [kg], `cxax` [m²], `p_air` [Pa],
//! `temperature` [K], optional `gas_constant`, `direction` (`up`/`down`),
//! `kappa` [rad] when no altitude column is present, and optional
//! `specimen` and `pressure` [MPa]. The columns are `t` or `s`, `v` and an
//! optional `h`.

use std::fmt::Write;

use bobsled_core::aero::AirState;
use bobsled_core::icehouse::{Direction, GlideRun};

use crate::error::CoreContext;
use crate::meta::{split_header, write_header};
use crate::provenance::{Input, Provenance};
use crate::{Error, Result};

/// A glide run plus the labels used to pair runs.
#[derive(Debug, Clone, PartialEq)]
pub struct GlideFile {
    pub run: GlideRun,
    pub specimen: String,
    /// Nominal contact pressure [MPa].
    pub pressure: Option<f64>,
}

pub fn parse_direction(raw: &str) -> Option<Direction> {
    match raw.to_ascii_lowercase().as_str() {
        "up" | "uphill" => Some(Direction::Up),
        "down" | "downhill" => Some(Direction::Down),
        _ => None,
    }
}

pub fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Up => "up",
        Direction::Down => "down",
    }
}

pub fn parse_glide(input: &Input) -> Result<GlideFile> {
    let path = &input.path;
    let (header, body) = split_header(&input.text);
    let required = |key: &str| -> Result<f64> {
        header
            .number(path, key)?
            .ok_or_else(|| Error::parse(path, 1, format!("missing `# {key}:` header line")))
    };
    let mass = required("mass")?;
    let cxax = required("cxax")?;
    let defaults = AirState::default();
    let air = AirState {
        p_air: header.number(path, "p_air")?.unwrap_or(defaults.p_air),
        temperature: header
            .number(path, "temperature")?
            .unwrap_or(defaults.temperature),
        gas_constant: header
            .number(path, "gas_constant")?
            .unwrap_or(defaults.gas_constant),
    };
    let direction = match header.entries.get("direction") {
        Some((raw, line)) => Some(
            parse_direction(raw)
                .ok_or_else(|| Error::parse(path, *line, format!("unknown direction `{raw}`")))?,
        ),
        None => None,
    };

    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let columns = reader
        .headers()
        .map_err(|e| Error::parse(path, header.lines + 1, e.to_string()))?
        .clone();
    let find = |name: &str| columns.iter().position(|c| c == name);
    let header_line = header.lines + 1;
    let (axis, by_time) = match (find("s"), find("t")) {
        (Some(i), _) => (i, false),
        (None, Some(i)) => (i, true),
        (None, None) => return Err(Error::parse(path, header_line, "need a `t` or `s` column")),
    };
    let v_col = find("v").ok_or_else(|| Error::parse(path, header_line, "missing column `v`"))?;
    let h_col = find("h");

    let (mut x, mut v, mut h) = (Vec::new(), Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| {
            Error::parse(
                path,
                header.lines + e.position().map_or(0, |p| p.line()),
                e.to_string(),
            )
        })?;
        let line = header.lines + record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64> {
            let raw = record.get(i).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(path, line, format!("invalid number `{raw}`")))
        };
        let xi = field(axis)?;
        if let Some(&prev) = x.last() {
            if !(xi > prev) {
                return Err(Error::parse(
                    path,
                    line,
                    format!("`{}` does not increase", &columns[axis]),
                ));
            }
        }
        x.push(xi);
        v.push(field(v_col)?);
        if let Some(i) = h_col {
            h.push(field(i)?);
        }
    }
    let s = if by_time {
        GlideRun::from_time_series(&x, &v)
    } else {
        x
    };
    let kappa = header.number(path, "kappa")?;
    let run = GlideRun {
        s,
        v,
        h: h_col.map(|_| h),
        direction,
        mass,
        air,
        cxax,
        kappa,
    };
    if run.h.is_none() && run.kappa.is_none() {
        return Err(Error::parse(
            path,
            1,
            "need an `h` column or a `# kappa:` header line",
        ));
    }
    run.validate().context(path.display().to_string())?;
    Ok(GlideFile {
        run,
        specimen: header.get("specimen").unwrap_or("default").to_string(),
        pressure: header.number(path, "pressure")?,
    })
}

pub fn format_glide(file: &GlideFile, provenance: Option<&Provenance>) -> String {
    let run = &file.run;
    let mut out = String::new();
    if let Some(p) = provenance {
        out += &p.comment_lines();
    }
    let mut entries = vec![
        ("mass", run.mass.to_string()),
        ("cxax", run.cxax.to_string()),
        ("p_air", run.air.p_air.to_string()),
        ("temperature", run.air.temperature.to_string()),
        ("gas_constant", run.air.gas_constant.to_string()),
        ("specimen", file.specimen.clone()),
    ];
    if let Some(d) = run.direction {
        entries.push(("direction", direction_name(d).to_string()));
    }
    if let Some(k) = run.kappa {
        entries.push(("kappa", k.to_string()));
    }
    if let Some(p) = file.pressure {
        entries.push(("pressure", p.to_string()));
    }
    write_header(&mut out, entries);
    out += if run.h.is_some() { "s,v,h\n" } else { "s,v\n" };
    for i in 0..run.s.len() {
        let _ = write!(out, "{},{}", run.s[i], run.v[i]);
        if let Some(h) = &run.h {
            let _ = write!(out, ",{}", h[i]);
        }
        out.push('\n');
    }
    out
}
