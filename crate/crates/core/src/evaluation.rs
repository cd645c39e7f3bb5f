//! Driver evaluation by relative loss-energy increases, angle statistics and
//! validation of the lateral model against the measured lateral force.
//!
//! Each loss term compares the force actually opposing the motion with an
//! ideal force that a sled sliding straight along its path would feel. Front
//! and rear runners and the air are compared separately; the sum of the
//! ideal losses is the reference energy.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::Vector3;

use crate::aero::AeroModel;
use crate::friction::LateralModel;
use crate::kinematics::{rotation_f0_to_f, to_driving_frame};
use crate::numeric::{pairwise_sum_by, quantile_sorted, sorted};
use crate::onetrack::{AxleForceTrace, AxleSample};
use crate::{Error, Result};

/// Longest gap of invalid samples bridged by interpolation [s].
pub const MAX_GAP: f64 = 0.1;

/// Relative loss increases of one run or segment.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LossBreakdown {
    /// Ideal loss energy [J].
    pub e_tot_loss: f64,
    pub de_ice_f: f64,
    pub de_ice_r: f64,
    pub de_aero: f64,
    pub de_tot: f64,
}

/// Absolute energies over one contiguous stretch of valid samples [J].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LossSegment {
    pub s_start: f64,
    pub s_end: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub e_tot_loss: f64,
    pub excess_ice_f: f64,
    pub excess_ice_r: f64,
    pub excess_aero: f64,
    /// Front excess when only the longitudinal `f0` component is projected
    /// onto the driving direction.
    pub excess_ice_f_longitudinal: f64,
}

impl LossSegment {
    pub fn breakdown(&self) -> LossBreakdown {
        breakdown_of(
            self.e_tot_loss,
            self.excess_ice_f,
            self.excess_ice_r,
            self.excess_aero,
        )
    }
}

fn breakdown_of(e_tot: f64, f: f64, r: f64, aero: f64) -> LossBreakdown {
    let (de_ice_f, de_ice_r, de_aero) = (f / e_tot, r / e_tot, aero / e_tot);
    LossBreakdown {
        e_tot_loss: e_tot,
        de_ice_f,
        de_ice_r,
        de_aero,
        de_tot: de_ice_f + de_ice_r + de_aero,
    }
}

/// Sums segments into one breakdown over all of them.
pub fn combine(segments: &[LossSegment]) -> LossBreakdown {
    let sum = |f: fn(&LossSegment) -> f64| pairwise_sum_by(segments.len(), |i| f(&segments[i]));
    breakdown_of(
        sum(|s| s.e_tot_loss),
        sum(|s| s.excess_ice_f),
        sum(|s| s.excess_ice_r),
        sum(|s| s.excess_aero),
    )
}

/// Loss integrands at one sample [N], all as motion-opposing magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Integrands {
    ideal: f64,
    ice_f: f64,
    ice_r: f64,
    aero: f64,
    ice_f_longitudinal: f64,
}

fn integrands(x: &AxleSample, aero: &AeroModel) -> Integrands {
    let forces = aero.aero_forces(x.v, x.beta);
    let opposing = |f: Vector3<f64>| -to_driving_frame(f, x.beta).x;
    let front = opposing(x.front_f0());
    let front_long = opposing(Vector3::new(x.f_x_f0, 0.0, 0.0));
    let rear = opposing(Vector3::new(x.f_x_r, x.f_y_r, x.f_z_r));
    Integrands {
        ideal: -x.f_x_f - x.f_x_r + forces.ideal,
        ice_f: front + x.f_x_f,
        ice_r: rear + x.f_x_r,
        aero: forces.actual - forces.ideal,
        ice_f_longitudinal: front_long + x.f_x_f,
    }
}

fn integrate(s: &[f64], y: &[f64]) -> f64 {
    pairwise_sum_by(s.len().saturating_sub(1), |i| {
        0.5 * (y[i] + y[i + 1]) * (s[i + 1] - s[i])
    })
}

/// Loss energies over the distance window `[s0, s1]`. Invalid samples are
/// bridged linearly when the gap lasts at most [`MAX_GAP`]; longer gaps start
/// a new segment.
pub fn loss_energies(
    trace: &AxleForceTrace,
    aero: &AeroModel,
    window: (f64, f64),
) -> Result<Vec<LossSegment>> {
    let (s0, s1) = window;
    if !(s1 > s0) {
        return Err(Error::InvalidParameter("empty evaluation window"));
    }
    let inside: Vec<&AxleSample> = trace
        .samples
        .iter()
        .filter(|x| x.s >= s0 && x.s <= s1)
        .collect();
    let mut groups: Vec<Vec<&AxleSample>> = Vec::new();
    let mut last_valid: Option<&AxleSample> = None;
    for x in inside {
        if !x.is_valid() {
            continue;
        }
        match last_valid {
            Some(prev) if x.t - prev.t <= MAX_GAP + 1e-9 => {
                groups.last_mut().expect("open group").push(x)
            }
            _ => groups.push(alloc::vec![x]),
        }
        last_valid = Some(x);
    }
    let segments: Vec<LossSegment> = groups
        .into_iter()
        .filter(|g| g.len() >= 2)
        .map(|g| {
            let s: Vec<f64> = g.iter().map(|x| x.s).collect();
            let terms: Vec<Integrands> = g.iter().map(|x| integrands(x, aero)).collect();
            let column = |f: fn(&Integrands) -> f64| -> f64 {
                let y: Vec<f64> = terms.iter().map(f).collect();
                integrate(&s, &y)
            };
            LossSegment {
                s_start: s[0],
                s_end: s[s.len() - 1],
                t_start: g[0].t,
                t_end: g[g.len() - 1].t,
                samples: g.len(),
                e_tot_loss: column(|x| x.ideal),
                excess_ice_f: column(|x| x.ice_f),
                excess_ice_r: column(|x| x.ice_r),
                excess_aero: column(|x| x.aero),
                excess_ice_f_longitudinal: column(|x| x.ice_f_longitudinal),
            }
        })
        .collect();
    if segments.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(segments)
}

/// Loss evaluation of one run over its full length.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunEvaluation {
    pub run: String,
    pub driver: String,
    pub track: String,
    /// Time from the first to the last sample [s].
    pub runtime: f64,
    /// Distance from the first to the last sample [m].
    pub distance: f64,
    pub breakdown: LossBreakdown,
    pub segments: Vec<LossSegment>,
}

pub fn evaluate_run(
    name: impl Into<String>,
    driver: impl Into<String>,
    track: impl Into<String>,
    trace: &AxleForceTrace,
    aero: &AeroModel,
) -> Result<RunEvaluation> {
    let (first, last) = match (trace.samples.first(), trace.samples.last()) {
        (Some(a), Some(b)) if trace.len() >= 2 => (a, b),
        _ => {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: trace.len(),
            })
        }
    };
    let segments = loss_energies(trace, aero, (first.s, last.s))?;
    Ok(RunEvaluation {
        run: name.into(),
        driver: driver.into(),
        track: track.into(),
        runtime: last.t - first.t,
        distance: last.s - first.s,
        breakdown: combine(&segments),
        segments,
    })
}

/// Five-number summary.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl Quantiles {
    /// `None` for an empty input.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let v = sorted(values);
        Some(Self {
            min: v[0],
            q25: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q75: quantile_sorted(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

/// Distribution of one absolute angle [rad].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AngleSummary {
    pub count: usize,
    pub quantiles: Quantiles,
    /// Share of samples above 2°.
    pub above_2deg: f64,
    /// Share of samples above 4°.
    pub above_4deg: f64,
}

impl AngleSummary {
    pub fn of(angles: &[f64]) -> Self {
        let abs: Vec<f64> = angles
            .iter()
            .filter(|a| a.is_finite())
            .map(|a| a.abs())
            .collect();
        let n = abs.len();
        let share = |deg: f64| {
            if n == 0 {
                0.0
            } else {
                abs.iter().filter(|a| **a > deg.to_radians()).count() as f64 / n as f64
            }
        };
        Self {
            count: n,
            quantiles: Quantiles::of(&abs).unwrap_or_default(),
            above_2deg: share(2.0),
            above_4deg: share(4.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AngleStatistics {
    pub delta: AngleSummary,
    pub alpha_f: AngleSummary,
    pub alpha_r: AngleSummary,
}

/// Angle statistics per group key over the valid samples of each trace.
pub fn angle_statistics<'a>(
    traces: impl IntoIterator<Item = (&'a str, &'a AxleForceTrace)>,
) -> BTreeMap<String, AngleStatistics> {
    let mut pooled: BTreeMap<String, [Vec<f64>; 3]> = BTreeMap::new();
    for (key, trace) in traces {
        let entry = pooled.entry(String::from(key)).or_default();
        for x in trace.valid() {
            entry[0].push(x.delta);
            entry[1].push(x.alpha_f);
            entry[2].push(x.alpha_r);
        }
    }
    pooled
        .into_iter()
        .map(|(k, [d, f, r])| {
            let stats = AngleStatistics {
                delta: AngleSummary::of(&d),
                alpha_f: AngleSummary::of(&f),
                alpha_r: AngleSummary::of(&r),
            };
            (k, stats)
        })
        .collect()
}

/// Spread of the loss terms over the runs of one group.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupSummary {
    pub key: String,
    pub runs: usize,
    pub de_ice_f: Quantiles,
    pub de_ice_r: Quantiles,
    pub de_aero: Quantiles,
    pub de_tot: Quantiles,
    pub runtime: Quantiles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Driver,
    Track,
}

pub fn summarize(runs: &[RunEvaluation], by: GroupBy) -> Vec<GroupSummary> {
    let mut groups: BTreeMap<&str, Vec<&RunEvaluation>> = BTreeMap::new();
    for r in runs {
        let key = match by {
            GroupBy::Driver => r.driver.as_str(),
            GroupBy::Track => r.track.as_str(),
        };
        groups.entry(key).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(key, rs)| {
            let q = |f: fn(&RunEvaluation) -> f64| {
                let v: Vec<f64> = rs.iter().map(|r| f(r)).collect();
                Quantiles::of(&v).unwrap_or_default()
            };
            GroupSummary {
                key: String::from(key),
                runs: rs.len(),
                de_ice_f: q(|r| r.breakdown.de_ice_f),
                de_ice_r: q(|r| r.breakdown.de_ice_r),
                de_aero: q(|r| r.breakdown.de_aero),
                de_tot: q(|r| r.breakdown.de_tot),
                runtime: q(|r| r.runtime),
            }
        })
        .collect()
}

/// Per-run rows, group summaries and angle statistics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvaluationReport {
    pub runs: Vec<RunEvaluation>,
    pub drivers: Vec<GroupSummary>,
    pub tracks: Vec<GroupSummary>,
    pub angles: BTreeMap<String, AngleStatistics>,
}

impl EvaluationReport {
    /// Assembles a report; `traces` pairs each run (same order as `runs`)
    /// with its force trace.
    pub fn build(runs: Vec<RunEvaluation>, traces: &[AxleForceTrace]) -> Self {
        let angles = angle_statistics(runs.iter().map(|r| r.driver.as_str()).zip(traces));
        Self {
            drivers: summarize(&runs, GroupBy::Driver),
            tracks: summarize(&runs, GroupBy::Track),
            angles,
            runs,
        }
    }
}

/// Lateral force at the COG predicted by a lateral model from the
/// reconstructed normal forces and slip angles [N].
pub fn predicted_lateral_force(x: &AxleSample, model: &LateralModel) -> f64 {
    let front_f = Vector3::new(x.f_x_f, model.front(x.f_z_f, x.alpha_f), x.f_z_f);
    let front_f0 = rotation_f0_to_f(x.gamma, x.delta) * front_f;
    front_f0.y + model.rear(x.f_z_r, x.alpha_r)
}

/// `m·a_y,COG − F_y,ext` [N].
pub fn measured_lateral_force(x: &AxleSample, mass: f64) -> f64 {
    mass * x.a_y_cog - x.f_y_ext
}

/// Root mean square difference over the pairs where both values are finite.
pub fn validate_rmse(predicted: &[f64], measured: &[f64]) -> Result<f64> {
    if predicted.len() != measured.len() {
        return Err(Error::LengthMismatch(predicted.len(), measured.len()));
    }
    let d: Vec<f64> = predicted
        .iter()
        .zip(measured)
        .filter(|(p, m)| p.is_finite() && m.is_finite())
        .map(|(p, m)| p - m)
        .collect();
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(libm::sqrt(
        pairwise_sum_by(d.len(), |i| d[i] * d[i]) / d.len() as f64,
    ))
}

/// RMSE of a lateral model over the valid samples of a trace.
pub fn model_rmse(trace: &AxleForceTrace, model: &LateralModel, mass: f64) -> Result<f64> {
    let (p, m): (Vec<f64>, Vec<f64>) = trace
        .valid()
        .map(|x| {
            (
                predicted_lateral_force(x, model),
                measured_lateral_force(x, mass),
            )
        })
        .unzip();
    validate_rmse(&p, &m)
}
