//! Axle force traces as CSV, one row per sample with a validity column.

use std::fmt::Write;

use bobsled_core::onetrack::{AxleForceTrace, AxleSample, InvalidReason};

use crate::meta::split_header;
use crate::provenance::{Input, Provenance};
use crate::{Error, Result};

const FIELDS: [&str; 21] = [
    "t", "s", "v", "beta", "alpha_f", "alpha_r", "gamma", "delta", "a_y_cog", "a_z_cog", "f_y_ext",
    "f_x_ext", "f_x_f0", "f_y_f0", "f_z_f0", "f_y_r", "f_z_r", "f_x_f", "f_y_f", "f_z_f", "f_x_r",
];

fn values(x: &AxleSample) -> [f64; 21] {
    [
        x.t, x.s, x.v, x.beta, x.alpha_f, x.alpha_r, x.gamma, x.delta, x.a_y_cog, x.a_z_cog,
        x.f_y_ext, x.f_x_ext, x.f_x_f0, x.f_y_f0, x.f_z_f0, x.f_y_r, x.f_z_r, x.f_x_f, x.f_y_f,
        x.f_z_f, x.f_x_r,
    ]
}

fn sample_from(v: &[f64; 21], invalid: Option<InvalidReason>) -> AxleSample {
    AxleSample {
        t: v[0],
        s: v[1],
        v: v[2],
        beta: v[3],
        alpha_f: v[4],
        alpha_r: v[5],
        gamma: v[6],
        delta: v[7],
        a_y_cog: v[8],
        a_z_cog: v[9],
        f_y_ext: v[10],
        f_x_ext: v[11],
        f_x_f0: v[12],
        f_y_f0: v[13],
        f_z_f0: v[14],
        f_y_r: v[15],
        f_z_r: v[16],
        f_x_f: v[17],
        f_y_f: v[18],
        f_z_f: v[19],
        f_x_r: v[20],
        invalid,
    }
}

pub fn reason_name(r: InvalidReason) -> &'static str {
    match r {
        InvalidReason::LowSpeed => "low_speed",
        InvalidReason::RollAcceleration => "roll_acceleration",
        InvalidReason::FrontRotation => "front_rotation",
        InvalidReason::NonFinite => "non_finite",
    }
}

fn reason_from(name: &str) -> Option<InvalidReason> {
    [
        InvalidReason::LowSpeed,
        InvalidReason::RollAcceleration,
        InvalidReason::FrontRotation,
        InvalidReason::NonFinite,
    ]
    .into_iter()
    .find(|r| reason_name(*r) == name)
}

pub fn format_trace(trace: &AxleForceTrace, provenance: Option<&Provenance>) -> String {
    let mut out = provenance
        .map(Provenance::comment_lines)
        .unwrap_or_default();
    out += &FIELDS.join(",");
    out += ",valid,reason\n";
    for x in &trace.samples {
        for (i, v) in values(x).iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        let reason = x.invalid.map(reason_name).unwrap_or("");
        let _ = writeln!(out, ",{},{reason}", u8::from(x.is_valid()));
    }
    out
}

pub fn parse_trace(input: &Input) -> Result<AxleForceTrace> {
    let path = &input.path;
    let (header, body) = split_header(&input.text);
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let columns = reader
        .headers()
        .map_err(|e| Error::parse(path, header.lines + 1, e.to_string()))?
        .clone();
    let mut index = [0usize; 21];
    for (slot, name) in index.iter_mut().zip(FIELDS) {
        *slot = columns.iter().position(|c| c == name).ok_or_else(|| {
            Error::parse(path, header.lines + 1, format!("missing column `{name}`"))
        })?;
    }
    let reason_col = columns.iter().position(|c| c == "reason");
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            Error::parse(
                path,
                header.lines + e.position().map_or(0, |p| p.line()),
                e.to_string(),
            )
        })?;
        let line = header.lines + record.position().map_or(0, |p| p.line());
        let mut v = [0.0; 21];
        for (slot, &i) in v.iter_mut().zip(&index) {
            let raw = record.get(i).unwrap_or("");
            *slot = raw
                .parse()
                .map_err(|_| Error::parse(path, line, format!("invalid number `{raw}`")))?;
        }
        let invalid = match reason_col
            .and_then(|i| record.get(i))
            .filter(|r| !r.is_empty())
        {
            Some(name) => Some(
                reason_from(name)
                    .ok_or_else(|| Error::parse(path, line, format!("unknown reason `{name}`")))?,
            ),
            None => None,
        };
        samples.push(sample_from(&v, invalid));
    }
    Ok(AxleForceTrace { samples })
}
