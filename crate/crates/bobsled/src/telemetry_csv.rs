//! Telemetry CSV files: optional `# driver:` / `# track:` header lines, a
//! header row, one row per sample.

use std::fmt::Write;

use bobsled_core::telemetry::{Channel, RunMeta, TelemetryFrame, TelemetryRun};

use crate::error::CoreContext;
use crate::meta::{split_header, write_header};
use crate::provenance::{Input, Provenance};
use crate::schema::{Schema, ALTITUDE, TIME};
use crate::{Error, Result};

/// Reads a run with all channels converted to SI units and radians.
pub fn parse_telemetry(input: &Input, schema: &Schema) -> Result<TelemetryRun> {
    let path = &input.path;
    let (header, body) = split_header(&input.text);
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let columns = reader
        .headers()
        .map_err(|e| Error::parse(path, header.lines + 1, e.to_string()))?
        .clone();
    let find = |key: &str| columns.iter().position(|c| c == schema.column(key));
    let mut index = Vec::new();
    for key in std::iter::once(TIME).chain(Channel::ALL.iter().map(|c| c.name())) {
        let i = find(key).ok_or_else(|| {
            Error::parse(
                path,
                header.lines + 1,
                format!("missing column `{}` for `{key}`", schema.column(key)),
            )
        })?;
        index.push(i);
    }
    let h_index = find(ALTITUDE);

    let mut frames = Vec::new();
    let mut altitude = h_index.map(|_| Vec::new());
    let mut last_t = f64::NEG_INFINITY;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(path, header.lines + line, e.to_string())
        })?;
        let line = header.lines + record.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| -> Result<f64> {
            let raw = record.get(i).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| {
                    Error::parse(
                        path,
                        line,
                        format!("column `{name}`: invalid number `{raw}`"),
                    )
                })
        };
        let t = field(index[0], schema.column(TIME))?;
        if !(t > last_t) {
            return Err(Error::parse(
                path,
                line,
                format!("time {t} does not increase"),
            ));
        }
        last_t = t;
        let mut frame = TelemetryFrame {
            t,
            ..Default::default()
        };
        for (c, &i) in Channel::ALL.iter().zip(&index[1..]) {
            let x = field(i, schema.column(c.name()))?;
            let x = if c.is_angle() {
                schema.angle_unit.to_rad(x)
            } else {
                x
            };
            c.set(&mut frame, x);
        }
        if frame.v < 0.0 {
            return Err(Error::parse(path, line, "negative speed"));
        }
        if frame.alpha_sensor.abs() >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::parse(path, line, "slip angle outside ±90°"));
        }
        if let (Some(i), Some(h)) = (h_index, altitude.as_mut()) {
            h.push(field(i, schema.column(ALTITUDE))?);
        }
        frames.push(frame);
    }
    let meta = RunMeta {
        driver: header.get("driver").unwrap_or_default().to_string(),
        track: header.get("track").unwrap_or_default().to_string(),
        sample_rate: 0.0,
    };
    TelemetryRun::new(frames, altitude, meta).context(path.display().to_string())
}

/// Writes a run in the units and column names of `schema`. Values use the
/// shortest representation that reads back to the same `f64`.
pub fn format_telemetry(
    run: &TelemetryRun,
    schema: &Schema,
    provenance: Option<&Provenance>,
) -> String {
    let mut out = String::new();
    if let Some(p) = provenance {
        out += &p.comment_lines();
    }
    let meta = run.meta();
    write_header(
        &mut out,
        [
            ("driver", meta.driver.clone()),
            ("track", meta.track.clone()),
        ],
    );
    let altitude = run.altitude();
    let mut cols: Vec<&str> = vec![schema.column(TIME)];
    cols.extend(Channel::ALL.iter().map(|c| schema.column(c.name())));
    if altitude.is_some() {
        cols.push(schema.column(ALTITUDE));
    }
    out += &cols.join(",");
    out.push('\n');
    for (k, f) in run.frames().iter().enumerate() {
        let _ = write!(out, "{}", f.t);
        for c in Channel::ALL {
            let x = c.get(f);
            let x = if c.is_angle() {
                schema.angle_unit.from_rad(x)
            } else {
                x
            };
            let _ = write!(out, ",{x}");
        }
        if let Some(h) = altitude {
            let _ = write!(out, ",{}", h[k]);
        }
        out.push('\n');
    }
    out
}
