//! The workflows behind the command line tool. Each returns its outputs in
//! memory; nothing touches the output directory until [`write_outputs`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use bobsled_core::evaluation::{
    combine, evaluate_run, loss_energies, measured_lateral_force, model_rmse,
    predicted_lateral_force, validate_rmse, EvaluationReport, RunEvaluation,
};
use bobsled_core::fitting::{
    fit_lateral, fit_report, select_fit_samples, AxleDatasets, FitConfig, FitResult, FitSample,
};
use bobsled_core::friction::{
    force_y, mu_x, Braghin, LateralFrictionParams, LateralModel, LongitudinalFrictionParams,
    LongitudinalLaw,
};
use bobsled_core::icehouse::{
    average_bidirectional, central_window, energy_series, fit_quadratic_mu_p, friction_force_fit,
    mu_from_force, Direction,
};
use bobsled_core::onetrack::{build_axle_trace, AxleForceTrace, TraceOptions};
use bobsled_core::sim::{export_synthetic_telemetry, simulate as run_simulation, SimModel};
use bobsled_core::telemetry::{lowpass_filter, prepare, RunMeta, TelemetryRun};
use bobsled_core::G;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{read_config_input, Config, Processing};
use crate::error::CoreContext;
use crate::glide::{direction_name, parse_glide, GlideFile};
use crate::meta::split_header;
use crate::params::{
    format_toml, parse_lateral, FitRecord, LateralParamsFile, LongitudinalParamsFile,
    ValidationRecord,
};
use crate::provenance::{read_input, Input, Provenance};
use crate::report::{angles_csv, format_report, losses_csv, LateralRmse};
use crate::scenario::parse_scenario;
use crate::telemetry_csv::{format_telemetry, parse_telemetry};
use crate::trace_csv::format_trace;
use crate::{Error, Result};

/// A file to be written, relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub name: String,
    pub contents: String,
}

impl Output {
    fn new(name: impl Into<String>, contents: String) -> Self {
        Self {
            name: name.into(),
            contents,
        }
    }
}

pub fn write_outputs(dir: &Path, outputs: &[Output]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for o in outputs {
        let path = dir.join(&o.name);
        fs::write(&path, &o.contents).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Maps `f` over `items` on at most `jobs` threads, keeping the input order.
/// The first error in input order wins.
pub fn par_map<T: Sync, U: Send>(
    jobs: usize,
    items: &[T],
    f: impl Fn(&T) -> Result<U> + Sync,
) -> Result<Vec<U>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker threads: {e}")))?;
    let results: Vec<Result<U>> = pool.install(|| items.par_iter().map(&f).collect());
    results.into_iter().collect()
}

fn provenance(command: &str, config: &Config) -> Provenance {
    let mut p = Provenance::new(command);
    for input in &config.inputs {
        p.input(input);
    }
    let bob = &config.bob;
    p.param("bob.mass", bob.mass);
    p.param("bob.j_yy", bob.j_yy);
    p.param("bob.j_zz", bob.j_zz);
    p.param("bob.l_f", bob.l_f);
    p.param("bob.l_r", bob.l_r);
    p.param("bob.cxax", bob.cxax);
    p.param("air.p_air", config.air.p_air);
    p.param("air.temperature", config.air.temperature);
    p.param("aero.yaw_sensitivity", config.yaw_sensitivity);
    match &config.longitudinal {
        LongitudinalLaw::Fixed(mu) => p.param("longitudinal.mu", mu),
        LongitudinalLaw::Pressure { params, .. } => {
            p.param("longitudinal.b_x", params.b_x);
            p.param("longitudinal.c_x", params.c_x);
            p.param("longitudinal.d_x", params.d_x);
        }
    }
    p
}

fn processing_params(p: &mut Provenance, proc: &Processing) {
    p.param("cutoff", proc.cutoff);
    if let Some(f) = proc.prefilter {
        p.param("prefilter", f);
    }
    p.param("rate", proc.rate);
    p.param("roll_threshold", proc.roll_threshold);
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".to_string())
}

/// File stems made unique by a numeric suffix.
fn unique_names(paths: &[PathBuf]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    paths
        .iter()
        .map(|p| {
            let stem = file_stem(p);
            let mut name = stem.clone();
            let mut k = 2;
            while !seen.insert(name.clone()) {
                name = format!("{stem}_{k}");
                k += 1;
            }
            name
        })
        .collect()
}

fn read_all(jobs: usize, files: &[PathBuf]) -> Result<Vec<Input>> {
    par_map(jobs, files, |p| read_input(p))
}

/// A telemetry run after filtering, resampling, differentiation and force
/// reconstruction.
#[derive(Debug, Clone)]
pub struct ProcessedRun {
    pub name: String,
    pub run: TelemetryRun,
    pub trace: AxleForceTrace,
}

pub fn process_run(
    name: &str,
    input: &Input,
    config: &Config,
    proc: &Processing,
) -> Result<ProcessedRun> {
    let label = input.path.display().to_string();
    let raw = parse_telemetry(input, &config.schema)?;
    let raw = match proc.prefilter {
        Some(cutoff) => lowpass_filter(&raw, cutoff).context(&label)?,
        None => raw,
    };
    let run = prepare(&raw, proc.cutoff, proc.rate).context(&label)?;
    let (driver, track) = {
        let m = run.meta();
        let or_unknown = |s: &str| {
            if s.is_empty() {
                "unknown".to_string()
            } else {
                s.to_string()
            }
        };
        (or_unknown(&m.driver), or_unknown(&m.track))
    };
    let run = run.with_labels(driver, track);
    let options = TraceOptions {
        roll_threshold: Some(proc.roll_threshold.to_radians()),
    };
    let trace = build_axle_trace(
        &run,
        &config.bob,
        &config.longitudinal,
        &config.aero(),
        &options,
    )
    .context(&label)?;
    Ok(ProcessedRun {
        name: name.to_string(),
        run,
        trace,
    })
}

fn process_all(
    config: &Config,
    proc: &Processing,
    jobs: usize,
    files: &[PathBuf],
) -> Result<(Vec<Input>, Vec<ProcessedRun>)> {
    let inputs = read_all(jobs, files)?;
    let names = unique_names(files);
    let pairs: Vec<(&String, &Input)> = names.iter().zip(&inputs).collect();
    let runs = par_map(jobs, &pairs, |(name, input)| {
        process_run(name, input, config, proc)
    })?;
    Ok((inputs, runs))
}

fn lateral_model(file: &LateralParamsFile) -> LateralModel {
    LateralModel::MagicFormula {
        front: file.front,
        rear: file.rear,
    }
}

/// Pooled lateral-force RMSE of `model` over the valid samples of all traces.
fn pooled_rmse<'a>(
    traces: impl Iterator<Item = &'a AxleForceTrace>,
    model: &LateralModel,
    mass: f64,
) -> Result<f64> {
    let (mut p, mut m) = (Vec::new(), Vec::new());
    for trace in traces {
        for x in trace.valid() {
            p.push(predicted_lateral_force(x, model));
            m.push(measured_lateral_force(x, mass));
        }
    }
    validate_rmse(&p, &m).context("validation RMSE")
}

fn diagnostics_csv(
    fit: &FitResult,
    data: &[FitSample],
    proc: &Processing,
    prov: &Provenance,
) -> String {
    let mut out = prov.comment_lines();
    out += "f_z_lo,f_z_hi,f_z_mean,band_count,alpha,count,q25,median,q75,model\n";
    for band in fit_report(&fit.params, data, &proc.fz_bands, proc.alpha_bins) {
        for bin in &band.bins {
            let model = force_y(band.f_z_mean, bin.alpha, &fit.params).unwrap_or(f64::NAN);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                band.f_z_lo,
                band.f_z_hi,
                band.f_z_mean,
                band.count,
                bin.alpha,
                bin.count,
                bin.q25,
                bin.median,
                bin.q75,
                model
            );
        }
    }
    out
}

/// Reconstructs forces from telemetry, fits the lateral law at both runners
/// and, with a holdout track, validates the fit on that track's runs.
pub fn fit(
    config: &Config,
    proc: &Processing,
    jobs: usize,
    files: &[PathBuf],
    holdout: Option<&str>,
) -> Result<Vec<Output>> {
    if files.is_empty() {
        return Err(Error::Usage("fit needs at least one telemetry file".into()));
    }
    let (inputs, runs) = process_all(config, proc, jobs, files)?;
    let (test, train): (Vec<&ProcessedRun>, Vec<&ProcessedRun>) = runs
        .iter()
        .partition(|r| holdout.is_some_and(|h| r.run.meta().track == h));
    if let Some(h) = holdout {
        if test.is_empty() {
            return Err(Error::Usage(format!(
                "no run is tagged with holdout track `{h}`"
            )));
        }
        if train.is_empty() {
            return Err(Error::Usage(format!(
                "every run is on holdout track `{h}`; nothing left to fit"
            )));
        }
    }

    let fit_config = FitConfig {
        roll_threshold_deg: proc.roll_threshold,
        ..FitConfig::default()
    };
    let mut data = AxleDatasets::default();
    for r in &train {
        data.extend(select_fit_samples(&r.trace, &r.run, &fit_config).context(&r.name)?);
    }
    let front = fit_lateral(&data.front, &fit_config).context("front runner fit")?;
    let rear = fit_lateral(&data.rear, &fit_config).context("rear runner fit")?;

    let mut params = LateralParamsFile {
        front: front.params,
        rear: rear.params,
        front_fit: Some(FitRecord::from(&front)),
        rear_fit: Some(FitRecord::from(&rear)),
        validation: None,
    };
    if let Some(h) = holdout {
        let mass = config.bob.mass;
        params.validation = Some(ValidationRecord {
            track: h.to_string(),
            runs: test.len(),
            rmse_fitted: pooled_rmse(test.iter().map(|r| &r.trace), &lateral_model(&params), mass)?,
            rmse_reference: pooled_rmse(
                test.iter().map(|r| &r.trace),
                &LateralModel::Braghin(Braghin::default()),
                mass,
            )?,
        });
    }

    let mut prov = provenance("fit", config);
    for input in &inputs {
        prov.input(input);
    }
    processing_params(&mut prov, proc);
    if let Some(h) = holdout {
        prov.param("holdout", h);
    }
    let mut outputs = vec![
        Output::new("lateral.toml", format_toml(&params, &prov)),
        Output::new(
            "fit_front.csv",
            diagnostics_csv(&front, &data.front, proc, &prov),
        ),
        Output::new(
            "fit_rear.csv",
            diagnostics_csv(&rear, &data.rear, proc, &prov),
        ),
    ];
    for r in &runs {
        outputs.push(Output::new(
            format!("trace_{}.csv", r.name),
            format_trace(&r.trace, Some(&prov)),
        ));
    }
    Ok(outputs)
}

fn windowed_evaluation(
    r: &ProcessedRun,
    config: &Config,
    window: Option<(f64, f64)>,
) -> Result<RunEvaluation> {
    let meta = r.run.meta();
    let aero = config.aero();
    let Some((s0, s1)) = window else {
        return evaluate_run(&r.name, &meta.driver, &meta.track, &r.trace, &aero).context(&r.name);
    };
    let segments = loss_energies(&r.trace, &aero, (s0, s1)).context(&r.name)?;
    let inside: Vec<_> = r
        .trace
        .samples
        .iter()
        .filter(|x| x.s >= s0 && x.s <= s1)
        .collect();
    let (first, last) = match (inside.first(), inside.last()) {
        (Some(a), Some(b)) if inside.len() >= 2 => (a, b),
        _ => {
            return Err(Error::data(
                &r.name,
                format!("fewer than two samples in window {s0}..{s1} m"),
            ))
        }
    };
    Ok(RunEvaluation {
        run: r.name.clone(),
        driver: meta.driver.clone(),
        track: meta.track.clone(),
        runtime: last.t - first.t,
        distance: last.s - first.s,
        breakdown: combine(&segments),
        segments,
    })
}

fn segments_csv(report: &EvaluationReport, prov: &Provenance) -> String {
    let mut out = prov.comment_lines();
    out += "run,s_start,s_end,t_start,t_end,samples,e_tot_loss,excess_ice_f,excess_ice_r,excess_aero,excess_ice_f_longitudinal\n";
    for r in &report.runs {
        for s in &r.segments {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.run,
                s.s_start,
                s.s_end,
                s.t_start,
                s.t_end,
                s.samples,
                s.e_tot_loss,
                s.excess_ice_f,
                s.excess_ice_r,
                s.excess_aero,
                s.excess_ice_f_longitudinal
            );
        }
    }
    out
}

/// Loss-energy evaluation per run with driver and track summaries.
pub fn eval(
    config: &Config,
    proc: &Processing,
    jobs: usize,
    files: &[PathBuf],
    params: Option<&Path>,
    window: Option<(f64, f64)>,
) -> Result<Vec<Output>> {
    let mut extra = Vec::new();
    let lateral = match (params, &config.lateral) {
        (Some(path), _) => {
            let input = read_config_input(path)?;
            let file = parse_lateral(&input)?;
            extra.push(input);
            file
        }
        (None, Some(file)) => file.clone(),
        (None, None) => {
            return Err(Error::Usage(
                "eval needs lateral friction parameters: pass --params or set [lateral] params"
                    .into(),
            ))
        }
    };
    if files.is_empty() {
        return Err(Error::Usage(
            "eval needs at least one telemetry file".into(),
        ));
    }
    if let Some((s0, s1)) = window {
        if !(s1 > s0) {
            return Err(Error::Usage(format!(
                "window end {s1} must exceed its start {s0}"
            )));
        }
    }
    let (inputs, runs) = process_all(config, proc, jobs, files)?;
    let evaluations = par_map(jobs, &runs, |r| windowed_evaluation(r, config, window))?;
    let fitted = lateral_model(&lateral);
    let reference = LateralModel::Braghin(Braghin::default());
    let rmse = par_map(jobs, &runs, |r| {
        let mass = config.bob.mass;
        Ok(LateralRmse {
            run: r.name.clone(),
            fitted: model_rmse(&r.trace, &fitted, mass).unwrap_or(f64::NAN),
            reference: model_rmse(&r.trace, &reference, mass).unwrap_or(f64::NAN),
        })
    })?;
    let traces: Vec<AxleForceTrace> = runs.iter().map(|r| r.trace.clone()).collect();
    let report = EvaluationReport::build(evaluations, &traces);

    let mut prov = provenance("eval", config);
    for input in extra.iter().chain(&inputs) {
        prov.input(input);
    }
    processing_params(&mut prov, proc);
    if let Some((s0, s1)) = window {
        prov.param("window", format!("{s0}:{s1}"));
    }
    Ok(vec![
        Output::new("report.json", format_report(&report, &rmse, &prov)),
        Output::new("losses.csv", losses_csv(&report, &prov)),
        Output::new("angles.csv", angles_csv(&report, &prov)),
        Output::new("segments.csv", segments_csv(&report, &prov)),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct SimSummary {
    stop: String,
    samples: usize,
    final_time: f64,
    final_distance: f64,
    final_speed: f64,
    dissipated_energy: f64,
    energy_closure: f64,
    noise_seed: u64,
}

/// Runs a scenario and writes sensor-frame telemetry plus the true forces.
pub fn simulate(config: &Config, scenario_path: &Path, seed: Option<u64>) -> Result<Vec<Output>> {
    let input = read_input(scenario_path)?;
    let (file, scenario) = parse_scenario(&input)?;
    let lateral = config
        .lateral
        .as_ref()
        .map(lateral_model)
        .unwrap_or_else(LateralModel::fitted);
    let mut model = SimModel::new(config.bob, config.longitudinal.clone(), lateral, config.air);
    model.aero.yaw_sensitivity = config.yaw_sensitivity;
    let log = run_simulation(&model, &scenario).context("simulation")?;
    if log.samples.len() < 2 {
        return Err(Error::data(
            input.path.display().to_string(),
            "simulation logged fewer than two samples",
        ));
    }
    let mut noise = file.noise;
    if let Some(s) = seed {
        noise.seed = s;
    }
    let meta = RunMeta {
        driver: file.driver.clone(),
        track: file.track.clone(),
        sample_rate: 1.0 / scenario.log_interval,
    };
    let (run, truth) =
        export_synthetic_telemetry(&log, &config.bob, &noise, meta).context("telemetry export")?;

    let name = file
        .name
        .clone()
        .unwrap_or_else(|| file_stem(scenario_path));
    let mut prov = provenance("simulate", config);
    prov.input(&input);
    prov.param("seed", noise.seed);
    prov.param("noise.accel", noise.accel);
    prov.param("noise.rate", noise.rate);
    prov.param("noise.speed", noise.speed);
    prov.param("noise.angle", noise.angle);
    let fin = &log.final_state;
    let summary = SimSummary {
        stop: format!("{:?}", log.stop).to_lowercase(),
        samples: log.samples.len(),
        final_time: fin.t,
        final_distance: fin.s,
        final_speed: fin.v,
        dissipated_energy: fin.e_loss,
        energy_closure: log.energy_closure(config.bob.mass),
        noise_seed: noise.seed,
    };
    Ok(vec![
        Output::new(
            format!("{name}_telemetry.csv"),
            format_telemetry(&run, &config.schema, Some(&prov)),
        ),
        Output::new(
            format!("{name}_truth.csv"),
            format_trace(&truth, Some(&prov)),
        ),
        Output::new(format!("{name}_summary.toml"), format_toml(&summary, &prov)),
    ])
}

/// Ranges for the friction curves.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRanges {
    /// Contact pressure [MPa].
    pub p_min: f64,
    pub p_max: f64,
    pub p_step: f64,
    /// Normal forces of the lateral curves [N].
    pub f_z: Vec<f64>,
    /// Slip angle range `±alpha_max` [°].
    pub alpha_max: f64,
    pub alpha_step: f64,
}

impl Default for TableRanges {
    fn default() -> Self {
        Self {
            p_min: 6.0,
            p_max: 18.0,
            p_step: 0.1,
            f_z: vec![2000.0, 5000.0, 10000.0],
            alpha_max: 3.0,
            alpha_step: 0.05,
        }
    }
}

/// `lo, lo + step, …` up to `hi` inclusive; a single point when `lo == hi`.
fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n)
        .map(|k| if k == n { hi } else { lo + k as f64 * step })
        .collect()
}

impl TableRanges {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Usage(m.to_string()));
        if !(self.p_min > 0.0 && self.p_max >= self.p_min) {
            return bad("pressure range needs 0 < p_min <= p_max");
        }
        if !(self.p_step > 0.0) {
            return bad("pressure step must be positive");
        }
        if self.f_z.is_empty() || self.f_z.iter().any(|f| !(*f > 0.0)) {
            return bad("normal forces must be positive");
        }
        if !(self.alpha_max >= 0.0 && self.alpha_max < 90.0) || !(self.alpha_step > 0.0) {
            return bad("slip range needs 0 <= alpha_max < 90 and a positive step");
        }
        Ok(())
    }
}

/// μ_x over pressure and F_y over slip angle at fixed normal forces.
pub fn friction_table(
    config: &Config,
    ranges: &TableRanges,
    params: Option<&Path>,
) -> Result<Vec<Output>> {
    ranges.validate()?;
    let mut extra = Vec::new();
    let lateral = match params {
        Some(path) => {
            let input = read_config_input(path)?;
            let file = parse_lateral(&input)?;
            extra.push(input);
            file
        }
        None => config.lateral.clone().unwrap_or_default(),
    };
    let longitudinal = match &config.longitudinal {
        LongitudinalLaw::Pressure { params, .. } => *params,
        LongitudinalLaw::Fixed(_) => LongitudinalFrictionParams::ICE_HOUSE,
    };

    let mut prov = provenance("friction-table", config);
    for input in &extra {
        prov.input(input);
    }
    prov.param(
        "p_range",
        format!("{}:{}:{}", ranges.p_min, ranges.p_max, ranges.p_step),
    );
    prov.param(
        "alpha_range_deg",
        format!("{}:{}", ranges.alpha_max, ranges.alpha_step),
    );

    let mut mu = prov.comment_lines();
    mu += "p,mu_x\n";
    for p in grid(ranges.p_min, ranges.p_max, ranges.p_step) {
        let m = mu_x(p, &longitudinal).context("μ_x curve")?;
        let _ = writeln!(mu, "{p},{m}");
    }

    let mut lat = prov.comment_lines();
    lat += "axle,f_z,b_y,alpha_deg,f_y\n";
    let alphas = grid(-ranges.alpha_max, ranges.alpha_max, ranges.alpha_step);
    let axles: [(&str, &LateralFrictionParams); 2] =
        [("front", &lateral.front), ("rear", &lateral.rear)];
    for (axle, p) in axles {
        for &f_z in &ranges.f_z {
            for &a in &alphas {
                let f_y = force_y(f_z, a.to_radians(), p).context("lateral curve")?;
                let _ = writeln!(lat, "{axle},{f_z},{},{a},{f_y}", p.b_y(f_z));
            }
        }
    }
    Ok(vec![
        Output::new("mu_x.csv", mu),
        Output::new("lateral_curves.csv", lat),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct GlideRecord {
    file: String,
    specimen: String,
    direction: String,
    mu: f64,
    std_error: f64,
    /// Friction force from the energy slope [N].
    force: f64,
    window_start: f64,
    window_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct SpecimenRecord {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pressure: Option<f64>,
    mu: f64,
    std_error: f64,
    mu_up: f64,
    mu_down: f64,
    runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct QuadraticRecord {
    b_x: f64,
    c_x: f64,
    d_x: f64,
    e_x: f64,
    vertex_pressure: f64,
    points: usize,
    /// Residuals of μ_x·10³ at the points.
    residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct IcehouseReport {
    run: Vec<GlideRecord>,
    specimen: Vec<SpecimenRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quadratic: Option<QuadraticRecord>,
}

struct GlideAnalysis {
    record: GlideRecord,
    direction: Direction,
    s: Vec<f64>,
    residuals: Vec<f64>,
}

fn analyse(input: &Input, file: &GlideFile, window: f64) -> Result<GlideAnalysis> {
    let label = input.path.display().to_string();
    let run = &file.run;
    let direction = run.direction.ok_or_else(|| {
        Error::data(
            &label,
            "no `# direction:` tag; ice-house runs are paired up and down",
        )
    })?;
    if run.s.len() < 2 {
        return Err(Error::data(&label, "fewer than two samples"));
    }
    let series = energy_series(run).context(&label)?;
    let w = central_window(run.s[0], run.s[run.s.len() - 1], window);
    let fit = friction_force_fit(&series.s, &series.total(), w).context(&label)?;
    let kappa = if run.h.is_some() {
        0.0
    } else {
        run.kappa.unwrap_or(0.0)
    };
    Ok(GlideAnalysis {
        record: GlideRecord {
            file: label,
            specimen: file.specimen.clone(),
            direction: direction_name(direction).to_string(),
            mu: mu_from_force(fit.force, run.mass, kappa),
            std_error: fit.std_error / (run.mass * G * kappa.cos()),
            force: fit.force,
            window_start: w.0,
            window_end: w.1,
        },
        direction,
        s: fit.s,
        residuals: fit.residuals,
    })
}

/// `(p [MPa], μ_x)` pairs from a CSV with `p` and `mu` columns.
pub fn parse_points(input: &Input) -> Result<Vec<(f64, f64)>> {
    let path = &input.path;
    let (header, body) = split_header(&input.text);
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let columns = reader
        .headers()
        .map_err(|e| Error::parse(path, header.lines + 1, e.to_string()))?
        .clone();
    let find = |name: &str| {
        columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::parse(path, header.lines + 1, format!("missing column `{name}`")))
    };
    let (pi, mi) = (find("p")?, find("mu")?);
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            Error::parse(
                path,
                header.lines + e.position().map_or(0, |p| p.line()),
                e.to_string(),
            )
        })?;
        let line = header.lines + record.position().map_or(0, |p| p.line());
        let number = |i: usize| -> Result<f64> {
            let raw = record.get(i).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(path, line, format!("invalid number `{raw}`")))
        };
        points.push((number(pi)?, number(mi)?));
    }
    Ok(points)
}

/// Friction coefficients from paired glide runs, and the quadratic pressure
/// law through all specimens with a known pressure plus any listed points.
pub fn icehouse(
    config: &Config,
    jobs: usize,
    files: &[PathBuf],
    points: Option<&Path>,
    window: f64,
) -> Result<Vec<Output>> {
    if files.is_empty() && points.is_none() {
        return Err(Error::Usage(
            "icehouse needs glide-run files or a --points table".into(),
        ));
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::Usage(format!(
            "window fraction {window} must lie in (0, 1]"
        )));
    }
    let inputs = read_all(jobs, files)?;
    let analyses = par_map(jobs, &inputs, |input| {
        let file = parse_glide(input)?;
        let a = analyse(input, &file, window)?;
        Ok((file, a))
    })?;

    let mut groups: BTreeMap<&str, Vec<&(GlideFile, GlideAnalysis)>> = BTreeMap::new();
    for item in &analyses {
        groups
            .entry(item.0.specimen.as_str())
            .or_default()
            .push(item);
    }
    let mut specimens = Vec::new();
    for (name, items) in &groups {
        let side = |d: Direction| -> Vec<&GlideRecord> {
            items
                .iter()
                .filter(|(_, a)| a.direction == d)
                .map(|(_, a)| &a.record)
                .collect()
        };
        let (up, down) = (side(Direction::Up), side(Direction::Down));
        if up.is_empty() || down.is_empty() {
            return Err(Error::data(
                format!("specimen `{name}`"),
                "needs at least one uphill and one downhill run",
            ));
        }
        let mean = |rs: &[&GlideRecord]| rs.iter().map(|r| r.mu).sum::<f64>() / rs.len() as f64;
        let se = |rs: &[&GlideRecord]| {
            rs.iter().map(|r| r.std_error.powi(2)).sum::<f64>().sqrt() / rs.len() as f64
        };
        let pressures: BTreeSet<u64> = items
            .iter()
            .filter_map(|(f, _)| f.pressure.map(f64::to_bits))
            .collect();
        if pressures.len() > 1 {
            return Err(Error::data(
                format!("specimen `{name}`"),
                "runs disagree on the contact pressure",
            ));
        }
        let (mu_up, mu_down) = (mean(&up), mean(&down));
        specimens.push(SpecimenRecord {
            name: name.to_string(),
            pressure: pressures.iter().next().map(|b| f64::from_bits(*b)),
            mu: average_bidirectional(mu_up, mu_down),
            std_error: 0.5 * (se(&up).powi(2) + se(&down).powi(2)).sqrt(),
            mu_up,
            mu_down,
            runs: items.len(),
        });
    }

    let mut extra = Vec::new();
    let mut pairs: Vec<(f64, f64)> = specimens
        .iter()
        .filter_map(|s| s.pressure.map(|p| (p, s.mu)))
        .collect();
    if let Some(path) = points {
        let input = read_input(path)?;
        pairs.extend(parse_points(&input)?);
        extra.push(input);
    }
    let e_x = LongitudinalFrictionParams::ICE_HOUSE.e_x;
    let quadratic = if points.is_some() || pairs.len() >= 3 {
        let q = fit_quadratic_mu_p(&pairs, e_x).context("quadratic μ_x(p) fit")?;
        Some(q)
    } else {
        None
    };

    let mut prov = provenance("icehouse", config);
    for input in inputs.iter().chain(&extra) {
        prov.input(input);
    }
    prov.param("window", window);
    let report = IcehouseReport {
        run: analyses.iter().map(|(_, a)| a.record.clone()).collect(),
        specimen: specimens,
        quadratic: quadratic.as_ref().map(|q| QuadraticRecord {
            b_x: q.params.b_x,
            c_x: q.params.c_x,
            d_x: q.params.d_x,
            e_x: q.params.e_x,
            vertex_pressure: q.params.vertex_pressure(),
            points: pairs.len(),
            residuals: q.residuals.clone(),
        }),
    };
    let mut outputs = vec![Output::new("icehouse.toml", format_toml(&report, &prov))];
    if !analyses.is_empty() {
        let mut res = prov.comment_lines();
        res += "file,specimen,direction,s,residual\n";
        for (_, a) in &analyses {
            for (s, r) in a.s.iter().zip(&a.residuals) {
                let _ = writeln!(
                    res,
                    "{},{},{},{s},{r}",
                    a.record.file, a.record.specimen, a.record.direction
                );
            }
        }
        outputs.push(Output::new("icehouse_residuals.csv", res));
    }
    if let Some(q) = quadratic {
        let file = LongitudinalParamsFile {
            longitudinal: q.params,
        };
        outputs.push(Output::new("longitudinal.toml", format_toml(&file, &prov)));
    }
    Ok(outputs)
}
