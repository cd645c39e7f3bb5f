//! Time-indexed run data and the signal processing applied before analysis.
//!
//! All angles are radians and all quantities SI. A [`TelemetryRun`] is an
//! immutable value; every processing step returns a new run.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::numeric::{cumulative_trapezoid, interp_clamped};
use crate::{Error, Result};

/// One sample of the sensor channels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TelemetryFrame {
    /// Time [s].
    pub t: f64,
    /// Accelerations at the sensor [m/s²].
    pub a_x: f64,
    pub a_y: f64,
    pub a_z: f64,
    /// Body rates around x, y, z [rad/s].
    pub phi_dot: f64,
    pub theta_dot: f64,
    pub psi_dot: f64,
    /// Speed over ground in the xy-plane [m/s].
    pub v: f64,
    /// Side slip angle at the speed sensor [rad].
    pub alpha_sensor: f64,
    /// Steering angle [rad].
    pub delta: f64,
    /// Roll-split angle [rad].
    pub gamma: f64,
}

/// The filterable channels of a [`TelemetryFrame`] (everything except time).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    AX,
    AY,
    AZ,
    PhiDot,
    ThetaDot,
    PsiDot,
    V,
    AlphaSensor,
    Delta,
    Gamma,
}

impl Channel {
    pub const ALL: [Channel; 10] = [
        Channel::AX,
        Channel::AY,
        Channel::AZ,
        Channel::PhiDot,
        Channel::ThetaDot,
        Channel::PsiDot,
        Channel::V,
        Channel::AlphaSensor,
        Channel::Delta,
        Channel::Gamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::AX => "a_x",
            Channel::AY => "a_y",
            Channel::AZ => "a_z",
            Channel::PhiDot => "phi_dot",
            Channel::ThetaDot => "theta_dot",
            Channel::PsiDot => "psi_dot",
            Channel::V => "v",
            Channel::AlphaSensor => "alpha",
            Channel::Delta => "delta",
            Channel::Gamma => "gamma",
        }
    }

    /// Whether the channel carries an angle (unit conversion applies).
    pub fn is_angle(self) -> bool {
        matches!(
            self,
            Channel::PhiDot
                | Channel::ThetaDot
                | Channel::PsiDot
                | Channel::AlphaSensor
                | Channel::Delta
                | Channel::Gamma
        )
    }

    pub fn get(self, f: &TelemetryFrame) -> f64 {
        match self {
            Channel::AX => f.a_x,
            Channel::AY => f.a_y,
            Channel::AZ => f.a_z,
            Channel::PhiDot => f.phi_dot,
            Channel::ThetaDot => f.theta_dot,
            Channel::PsiDot => f.psi_dot,
            Channel::V => f.v,
            Channel::AlphaSensor => f.alpha_sensor,
            Channel::Delta => f.delta,
            Channel::Gamma => f.gamma,
        }
    }

    pub fn set(self, f: &mut TelemetryFrame, value: f64) {
        let slot = match self {
            Channel::AX => &mut f.a_x,
            Channel::AY => &mut f.a_y,
            Channel::AZ => &mut f.a_z,
            Channel::PhiDot => &mut f.phi_dot,
            Channel::ThetaDot => &mut f.theta_dot,
            Channel::PsiDot => &mut f.psi_dot,
            Channel::V => &mut f.v,
            Channel::AlphaSensor => &mut f.alpha_sensor,
            Channel::Delta => &mut f.delta,
            Channel::Gamma => &mut f.gamma,
        };
        *slot = value;
    }
}

/// Channels computed from the sensor data. The differentiated channels and
/// `s` are empty until [`derive_channels`] has run; the optional altitude
/// travels with the run through filtering and resampling.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DerivedChannels {
    pub phi_ddot: Vec<f64>,
    pub theta_ddot: Vec<f64>,
    pub psi_ddot: Vec<f64>,
    /// Cumulative distance [m], `s[0] == 0`.
    pub s: Vec<f64>,
    /// Altitude [m].
    pub h: Option<Vec<f64>>,
}

impl DerivedChannels {
    fn only_altitude(h: Option<Vec<f64>>) -> Self {
        Self {
            h,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunMeta {
    pub driver: String,
    pub track: String,
    /// Sample rate [Hz].
    pub sample_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TelemetryRun {
    frames: Vec<TelemetryFrame>,
    derived: DerivedChannels,
    meta: RunMeta,
}

impl TelemetryRun {
    /// Builds a run, checking that time is strictly increasing. A
    /// non-positive `meta.sample_rate` is replaced by the mean rate of the
    /// time stamps.
    pub fn new(
        frames: Vec<TelemetryFrame>,
        altitude: Option<Vec<f64>>,
        mut meta: RunMeta,
    ) -> Result<Self> {
        if let Some(index) = frames
            .windows(2)
            .position(|w| !(w[1].t > w[0].t))
            .map(|i| i + 1)
        {
            return Err(Error::NonMonotonicTime { index });
        }
        if let Some(h) = &altitude {
            if h.len() != frames.len() {
                return Err(Error::ChannelLength {
                    channel: "h",
                    expected: frames.len(),
                    got: h.len(),
                });
            }
        }
        if !(meta.sample_rate > 0.0) && frames.len() >= 2 {
            let span = frames[frames.len() - 1].t - frames[0].t;
            meta.sample_rate = (frames.len() - 1) as f64 / span;
        }
        Ok(Self {
            frames,
            derived: DerivedChannels::only_altitude(altitude),
            meta,
        })
    }

    pub fn frames(&self) -> &[TelemetryFrame] {
        &self.frames
    }

    pub fn derived(&self) -> &DerivedChannels {
        &self.derived
    }

    pub fn meta(&self) -> &RunMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.meta.sample_rate
    }

    pub fn altitude(&self) -> Option<&[f64]> {
        self.derived.h.as_deref()
    }

    /// True once [`derive_channels`] has populated the derived channels.
    pub fn is_derived(&self) -> bool {
        let n = self.frames.len();
        self.derived.s.len() == n && self.derived.psi_ddot.len() == n && n > 0
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.t).collect()
    }

    pub fn channel(&self, channel: Channel) -> Vec<f64> {
        self.frames.iter().map(|f| channel.get(f)).collect()
    }

    /// Replaces the metadata, keeping the sample rate.
    pub fn with_labels(mut self, driver: impl Into<String>, track: impl Into<String>) -> Self {
        self.meta.driver = driver.into();
        self.meta.track = track.into();
        self
    }
}

/// Coefficients of a second-order Butterworth low-pass (bilinear transform,
/// prewarped at the cutoff), normalised so that `a0 == 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    pub fn butterworth_lowpass(cutoff: f64, sample_rate: f64) -> Result<Self> {
        let nyquist = 0.5 * sample_rate;
        if !(cutoff > 0.0) || cutoff >= nyquist {
            return Err(Error::CutoffAboveNyquist { cutoff, nyquist });
        }
        let k = libm::tan(PI * cutoff / sample_rate);
        let k2 = k * k;
        let sqrt2 = core::f64::consts::SQRT_2;
        let norm = 1.0 / (1.0 + sqrt2 * k + k2);
        let b0 = k2 * norm;
        Ok(Self {
            b: [b0, 2.0 * b0, b0],
            a: [1.0, 2.0 * (k2 - 1.0) * norm, (1.0 - sqrt2 * k + k2) * norm],
        })
    }

    /// Magnitude of the single-pass frequency response at `freq`.
    pub fn gain(&self, freq: f64, sample_rate: f64) -> f64 {
        let w = 2.0 * PI * freq / sample_rate;
        let (s1, c1) = libm::sincos(w);
        let s1 = -s1;
        let (s2, c2) = libm::sincos(2.0 * w);
        let s2 = -s2;
        let num = (
            self.b[0] + self.b[1] * c1 + self.b[2] * c2,
            self.b[1] * s1 + self.b[2] * s2,
        );
        let den = (
            1.0 + self.a[1] * c1 + self.a[2] * c2,
            self.a[1] * s1 + self.a[2] * s2,
        );
        libm::sqrt((num.0 * num.0 + num.1 * num.1) / (den.0 * den.0 + den.1 * den.1))
    }

    /// Direct form II transposed, starting from the steady state of `x[0]`.
    fn run(&self, x: &[f64]) -> Vec<f64> {
        let [b0, b1, b2] = self.b;
        let [_, a1, a2] = self.a;
        let Some(&x0) = x.first() else {
            return Vec::new();
        };
        let mut z1 = (1.0 - b0) * x0;
        let mut z2 = (b2 - a2) * x0;
        x.iter()
            .map(|&xi| {
                let y = b0 * xi + z1;
                z1 = b1 * xi - a1 * y + z2;
                z2 = b2 * xi - a2 * y;
                y
            })
            .collect()
    }

    /// Forward-backward (zero-phase) application with odd reflection padding.
    pub fn filtfilt(&self, x: &[f64], pad: usize) -> Vec<f64> {
        let n = x.len();
        if n < 2 {
            return x.to_vec();
        }
        let pad = pad.min(n - 1);
        let mut ext = Vec::with_capacity(n + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));
        let mut y = self.run(&ext);
        y.reverse();
        let mut y = self.run(&y);
        y.reverse();
        y[pad..pad + n].to_vec()
    }
}

/// Zero-phase second-order low-pass applied to every sensor channel (and the
/// altitude, when present). Differentiated channels are cleared.
pub fn lowpass_filter(run: &TelemetryRun, cutoff: f64) -> Result<TelemetryRun> {
    let fs = run.sample_rate();
    let filter = Biquad::butterworth_lowpass(cutoff, fs)?;
    // several time constants of the filter, never less than the classic 3*(order+1)
    let pad = (libm::ceil(3.0 * fs / cutoff) as usize).max(9);
    let mut frames = run.frames.clone();
    for ch in Channel::ALL {
        let filtered = filter.filtfilt(&run.channel(ch), pad);
        for (f, v) in frames.iter_mut().zip(filtered) {
            ch.set(f, v);
        }
    }
    let h = run.derived.h.as_ref().map(|h| filter.filtfilt(h, pad));
    Ok(TelemetryRun {
        frames,
        derived: DerivedChannels::only_altitude(h),
        meta: run.meta.clone(),
    })
}

/// Linear interpolation onto a uniform grid at `rate`, starting at the first
/// time stamp. Resampling at the native rate returns the run unchanged.
pub fn resample(run: &TelemetryRun, rate: f64) -> Result<TelemetryRun> {
    let native = run.sample_rate();
    if !(rate > 0.0) || rate > native * (1.0 + 1e-9) {
        return Err(Error::Upsampling {
            native,
            requested: rate,
        });
    }
    if run.len() < 2 || (rate - native).abs() <= native * 1e-9 {
        return Ok(run.clone());
    }
    let t = run.times();
    let t0 = t[0];
    let t_end = t[t.len() - 1];
    let n_out = libm::floor((t_end - t0) * rate + 1e-9) as usize + 1;
    let grid: Vec<f64> = (0..n_out).map(|k| t0 + k as f64 / rate).collect();

    let columns: Vec<Vec<f64>> = Channel::ALL.iter().map(|&c| run.channel(c)).collect();
    let frames = grid
        .iter()
        .map(|&tk| {
            let mut f = TelemetryFrame {
                t: tk,
                ..TelemetryFrame::default()
            };
            for (ch, col) in Channel::ALL.iter().zip(&columns) {
                ch.set(&mut f, interp_clamped(&t, col, tk));
            }
            f
        })
        .collect();
    let h = run
        .derived
        .h
        .as_ref()
        .map(|h| grid.iter().map(|&tk| interp_clamped(&t, h, tk)).collect());
    Ok(TelemetryRun {
        frames,
        derived: DerivedChannels::only_altitude(h),
        meta: RunMeta {
            sample_rate: rate,
            ..run.meta.clone()
        },
    })
}

/// Derivative by central differences at interior points and second-order
/// one-sided differences at the ends. Exact on quadratics for any spacing.
pub fn differentiate(t: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    debug_assert!(n >= 3 && t.len() == n);
    let endpoint = |t0: f64, t1: f64, t2: f64, x0: f64, x1: f64, x2: f64| {
        x0 * (2.0 * t0 - t1 - t2) / ((t0 - t1) * (t0 - t2))
            + x1 * (t0 - t2) / ((t1 - t0) * (t1 - t2))
            + x2 * (t0 - t1) / ((t2 - t0) * (t2 - t1))
    };
    let mut d = Vec::with_capacity(n);
    d.push(endpoint(t[0], t[1], t[2], x[0], x[1], x[2]));
    for i in 1..n - 1 {
        d.push((x[i + 1] - x[i - 1]) / (t[i + 1] - t[i - 1]));
    }
    d.push(endpoint(
        t[n - 1],
        t[n - 2],
        t[n - 3],
        x[n - 1],
        x[n - 2],
        x[n - 3],
    ));
    d
}

/// Angular accelerations by differentiation of the rates, and travelled
/// distance by trapezoidal integration of the speed.
pub fn derive_channels(run: &TelemetryRun) -> Result<TelemetryRun> {
    let n = run.len();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    let t = run.times();
    let derived = DerivedChannels {
        phi_ddot: differentiate(&t, &run.channel(Channel::PhiDot)),
        theta_ddot: differentiate(&t, &run.channel(Channel::ThetaDot)),
        psi_ddot: differentiate(&t, &run.channel(Channel::PsiDot)),
        s: cumulative_trapezoid(&t, &run.channel(Channel::V)),
        h: run.derived.h.clone(),
    };
    Ok(TelemetryRun {
        frames: run.frames.clone(),
        derived,
        meta: run.meta.clone(),
    })
}

/// Filter, resample and derive in one go.
pub fn prepare(run: &TelemetryRun, cutoff: f64, rate: f64) -> Result<TelemetryRun> {
    let filtered = lowpass_filter(run, cutoff)?;
    let resampled = resample(&filtered, rate)?;
    derive_channels(&resampled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn run_from(t: &[f64], fill: impl Fn(f64) -> TelemetryFrame) -> TelemetryRun {
        let frames = t
            .iter()
            .map(|&ti| TelemetryFrame { t: ti, ..fill(ti) })
            .collect();
        TelemetryRun::new(frames, None, RunMeta::default()).unwrap()
    }

    fn grid(rate: f64, seconds: f64) -> Vec<f64> {
        let n = (rate * seconds).round() as usize + 1;
        (0..n).map(|k| k as f64 / rate).collect()
    }

    #[test]
    fn rejects_decreasing_time() {
        let frames = vec![
            TelemetryFrame {
                t: 0.0,
                ..Default::default()
            },
            TelemetryFrame {
                t: 0.01,
                ..Default::default()
            },
            TelemetryFrame {
                t: 0.005,
                ..Default::default()
            },
        ];
        assert_eq!(
            TelemetryRun::new(frames, None, RunMeta::default()),
            Err(Error::NonMonotonicTime { index: 2 })
        );
    }

    #[test]
    fn sample_rate_from_timestamps() {
        let run = run_from(&grid(500.0, 1.0), |_| TelemetryFrame::default());
        assert!((run.sample_rate() - 500.0).abs() < 1e-9);
    }

    #[test]
    fn constant_channel_unchanged_by_filter() {
        let run = run_from(&grid(100.0, 3.0), |_| TelemetryFrame {
            v: 12.5,
            a_z: 9.81,
            ..Default::default()
        });
        let out = lowpass_filter(&run, 20.0).unwrap();
        for f in out.frames() {
            assert!((f.v - 12.5).abs() < 1e-12);
            assert!((f.a_z - 9.81).abs() < 1e-12);
        }
    }

    #[test]
    fn cutoff_at_nyquist_rejected() {
        let run = run_from(&grid(100.0, 1.0), |_| TelemetryFrame::default());
        assert!(matches!(
            lowpass_filter(&run, 50.0),
            Err(Error::CutoffAboveNyquist { .. })
        ));
    }

    #[test]
    fn slow_sinusoid_passes() {
        // zero-phase gain is |H|² = 1/(1 + (f/fc)^4) for the analogue prototype,
        // 0.9999 at a tenth of the cutoff
        let fs = 500.0;
        let fc = 20.0;
        let f = fc / 10.0;
        let filter = Biquad::butterworth_lowpass(fc, fs).unwrap();
        let g = filter.gain(f, fs);
        assert!((g * g - 1.0).abs() < 1e-3);

        let run = run_from(&grid(fs, 4.0), |t| TelemetryFrame {
            a_y: (2.0 * PI * f * t).sin(),
            ..Default::default()
        });
        let out = lowpass_filter(&run, fc).unwrap();
        let ay = out.channel(Channel::AY);
        let interior = &ay[250..ay.len() - 250];
        let peak = interior.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((peak - 1.0).abs() < 0.01, "peak {peak}");
    }

    #[test]
    fn resample_500_to_100() {
        let run = run_from(&grid(500.0, 2.0), |t| TelemetryFrame {
            v: 3.0 * t + 1.0,
            ..Default::default()
        });
        let out = resample(&run, 100.0).unwrap();
        let expected = run.len() / 5;
        assert!(out.len().abs_diff(expected) <= 1);
        assert_eq!(out.sample_rate(), 100.0);
        for f in out.frames() {
            assert!((f.v - (3.0 * f.t + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn resample_identity_and_upsampling() {
        let run = run_from(&grid(100.0, 1.0), |t| TelemetryFrame {
            v: t,
            ..Default::default()
        });
        assert_eq!(resample(&run, 100.0).unwrap(), run);
        assert!(matches!(
            resample(&run, 200.0),
            Err(Error::Upsampling { .. })
        ));
    }

    #[test]
    fn derived_channels() {
        let c = 0.7;
        let run = run_from(&grid(100.0, 10.0), |t| TelemetryFrame {
            psi_dot: c * t,
            theta_dot: 0.3,
            v: 10.0,
            ..Default::default()
        });
        let out = derive_channels(&run).unwrap();
        let d = out.derived();
        for i in 1..out.len() - 1 {
            assert!((d.psi_ddot[i] - c).abs() < 1e-9);
            assert_eq!(d.theta_ddot[i], 0.0);
        }
        assert_eq!(d.s[0], 0.0);
        assert!((d.s[out.len() - 1] - 100.0).abs() < 1e-9);
        assert!(out.is_derived());
    }

    #[test]
    fn derive_needs_three_samples() {
        let run = run_from(&[0.0, 0.01], |_| TelemetryFrame::default());
        assert_eq!(
            derive_channels(&run),
            Err(Error::TooFewSamples { needed: 3, got: 2 })
        );
    }

    #[test]
    fn altitude_follows_resampling() {
        let t = grid(200.0, 1.0);
        let frames = t
            .iter()
            .map(|&ti| TelemetryFrame {
                t: ti,
                v: 1.0,
                ..Default::default()
            })
            .collect();
        let h = t.iter().map(|ti| 5.0 - 2.0 * ti).collect();
        let run = TelemetryRun::new(frames, Some(h), RunMeta::default()).unwrap();
        let out = resample(&run, 100.0).unwrap();
        let h = out.altitude().unwrap();
        for (f, hv) in out.frames().iter().zip(h) {
            assert!((hv - (5.0 - 2.0 * f.t)).abs() < 1e-12);
        }
    }
}
