//! Longitudinal friction from straight glide runs by the energy method.
//!
//! The sum of potential, kinetic and aerodynamic energy is tracked along the
//! travelled distance. Its negative slope over the middle of the gliding phase
//! is the ice friction force. Runs in opposite directions are averaged to
//! cancel an unknown surface tilt.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

pub use crate::aero::{drag_force, AirState};
use crate::friction::LongitudinalFrictionParams;
use crate::numeric::{cumulative_trapezoid, fit_line};
use crate::{Error, Result, G};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    Up,
    Down,
}

/// One glide run: speed over distance plus the metadata needed for the
/// energy balance.
#[derive(Debug, Clone, PartialEq)]
pub struct GlideRun {
    /// Distance [m], strictly increasing.
    pub s: Vec<f64>,
    /// Speed [m/s].
    pub v: Vec<f64>,
    /// Altitude [m], if measured.
    pub h: Option<Vec<f64>>,
    pub direction: Option<Direction>,
    pub mass: f64,
    pub air: AirState,
    pub cxax: f64,
    /// Slope along the direction of travel, positive downhill [rad]. Used when
    /// no altitude is available.
    pub kappa: Option<f64>,
}

impl GlideRun {
    /// Builds the distance axis from sampled time and speed.
    pub fn from_time_series(t: &[f64], v: &[f64]) -> Vec<f64> {
        cumulative_trapezoid(t, v)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s.len() != self.v.len() {
            return Err(Error::LengthMismatch(self.s.len(), self.v.len()));
        }
        if let Some(h) = &self.h {
            if h.len() != self.s.len() {
                return Err(Error::LengthMismatch(self.s.len(), h.len()));
            }
        }
        if !(self.mass > 0.0) {
            return Err(Error::InvalidParameter("mass must be positive"));
        }
        Ok(())
    }
}

/// Energies over a section [J]. `e_ice` closes the balance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub e_pot: f64,
    pub e_kin: f64,
    pub e_aero: f64,
    pub e_ice: f64,
}

/// Cumulative energy terms relative to the first sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    pub s: Vec<f64>,
    pub e_pot: Vec<f64>,
    pub e_kin: Vec<f64>,
    pub e_aero: Vec<f64>,
}

impl EnergySeries {
    /// `E_pot + E_kin + E_aero` at each sample.
    pub fn total(&self) -> Vec<f64> {
        (0..self.s.len())
            .map(|i| self.e_pot[i] + self.e_kin[i] + self.e_aero[i])
            .collect()
    }

    /// Energy changes between the samples closest to `s0` and `s1`.
    pub fn breakdown(&self, s0: f64, s1: f64) -> EnergyBreakdown {
        let idx = |x: f64| self.s.partition_point(|&v| v < x).min(self.s.len() - 1);
        let (i, j) = (idx(s0), idx(s1));
        let e_pot = self.e_pot[j] - self.e_pot[i];
        let e_kin = self.e_kin[j] - self.e_kin[i];
        let e_aero = self.e_aero[j] - self.e_aero[i];
        EnergyBreakdown {
            e_pot,
            e_kin,
            e_aero,
            e_ice: -(e_pot + e_kin + e_aero),
        }
    }
}

pub fn energy_series(run: &GlideRun) -> Result<EnergySeries> {
    run.validate()?;
    if run.s.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let m = run.mass;
    let e_pot = match (&run.h, run.kappa) {
        (Some(h), _) => h.iter().map(|hi| m * G * (hi - h[0])).collect(),
        (None, Some(kappa)) => run
            .s
            .iter()
            .map(|si| -m * G * (si - run.s[0]) * libm::sin(kappa))
            .collect(),
        (None, None) => return Err(Error::MissingElevation),
    };
    let v0 = run.v[0];
    let e_kin = run.v.iter().map(|v| 0.5 * m * (v * v - v0 * v0)).collect();
    let drag: Vec<f64> = run
        .v
        .iter()
        .map(|&v| drag_force(v, run.cxax, &run.air))
        .collect();
    let e_aero = cumulative_trapezoid(&run.s, &drag);
    Ok(EnergySeries {
        s: run.s.clone(),
        e_pot,
        e_kin,
        e_aero,
    })
}

/// The central `fraction` of `[s_start, s_end]`.
pub fn central_window(s_start: f64, s_end: f64, fraction: f64) -> (f64, f64) {
    let margin = 0.5 * (1.0 - fraction.clamp(0.0, 1.0)) * (s_end - s_start);
    (s_start + margin, s_end - margin)
}

/// Default share of the gliding phase used for the slope fit.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.6;

/// Minimum number of samples inside the fit window.
pub const MIN_WINDOW_SAMPLES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ForceFit {
    /// Ice friction force, the negative slope of the energy series [N].
    pub force: f64,
    pub std_error: f64,
    pub intercept: f64,
    pub s: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Least-squares line through the energy series inside `window`.
pub fn friction_force_fit(s: &[f64], energy: &[f64], window: (f64, f64)) -> Result<ForceFit> {
    if s.len() != energy.len() {
        return Err(Error::LengthMismatch(s.len(), energy.len()));
    }
    let (lo, hi) = window;
    let (xs, ys): (Vec<f64>, Vec<f64>) = s
        .iter()
        .zip(energy)
        .filter(|(&si, _)| si >= lo && si <= hi)
        .map(|(&a, &b)| (a, b))
        .unzip();
    if xs.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_WINDOW_SAMPLES,
            got: xs.len(),
        });
    }
    let line = fit_line(&xs, &ys)?;
    Ok(ForceFit {
        force: -line.slope,
        std_error: line.slope_std_error,
        intercept: line.intercept,
        s: xs,
        residuals: line.residuals,
    })
}

/// `μ_x = |F_ice| / (m·g·cos κ)`.
pub fn mu_from_force(force: f64, mass: f64, kappa: f64) -> f64 {
    force.abs() / (mass * G * libm::cos(kappa))
}

pub fn average_bidirectional(up: f64, down: f64) -> f64 {
    0.5 * (up + down)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuEstimate {
    pub mu: f64,
    pub std_error: f64,
    pub force: f64,
}

/// Full single-run analysis: energy series, central window, slope, μ.
pub fn analyse_glide(run: &GlideRun, window_fraction: f64) -> Result<MuEstimate> {
    let series = energy_series(run)?;
    let s_first = run.s[0];
    let s_last = run.s[run.s.len() - 1];
    let window = central_window(s_first, s_last, window_fraction);
    let fit = friction_force_fit(&series.s, &series.total(), window)?;
    let kappa = if run.h.is_some() {
        0.0
    } else {
        run.kappa.unwrap_or(0.0)
    };
    let normal = run.mass * G * libm::cos(kappa);
    Ok(MuEstimate {
        mu: mu_from_force(fit.force, run.mass, kappa),
        std_error: fit.std_error / normal,
        force: fit.force,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFit {
    pub params: LongitudinalFrictionParams,
    /// Residuals of μ_x·10³ at the input points.
    pub residuals: Vec<f64>,
}

/// Least-squares `μ_x·10³ = B_x p² − C_x p + D_x` through `(p [MPa], μ_x)`
/// pairs, with `ζ_x = 1` and the supplied cap `e_x`.
pub fn fit_quadratic_mu_p(points: &[(f64, f64)], e_x: f64) -> Result<QuadraticFit> {
    if points.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: points.len(),
        });
    }
    let n = points.len();
    let design = DMatrix::from_fn(n, 3, |i, j| {
        let p = points[i].0;
        match j {
            0 => p * p,
            1 => -p,
            _ => 1.0,
        }
    });
    let rhs = DVector::from_iterator(n, points.iter().map(|&(_, mu)| mu * 1e3));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.rank(smax * 1e-12) < 3 {
        return Err(Error::RankDeficient);
    }
    let coef = svd
        .solve(&rhs, smax * 1e-12)
        .map_err(|_| Error::RankDeficient)?;
    let residuals = (rhs - &design * &coef).iter().copied().collect();
    Ok(QuadraticFit {
        params: LongitudinalFrictionParams {
            b_x: coef[0],
            c_x: coef[1],
            d_x: coef[2],
            e_x,
            zeta_x: 1.0,
        },
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn level_run(s: Vec<f64>, v: Vec<f64>) -> GlideRun {
        GlideRun {
            s,
            v,
            h: None,
            direction: Some(Direction::Up),
            mass: 100.0,
            air: AirState::ICE_HOUSE,
            cxax: 0.0,
            kappa: Some(0.0),
        }
    }

    #[test]
    fn constant_speed_level_series_is_flat() {
        let s: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let run = level_run(s.clone(), vec![2.0; 50]);
        let e = energy_series(&run).unwrap();
        assert!(e.total().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn constant_deceleration_slope() {
        // v² = v0² − 2·a·s ⇒ E_kin slope = −m·a
        let a = 0.05;
        let s: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let v = s.iter().map(|x| (9.0 - 2.0 * a * x).sqrt()).collect();
        let run = level_run(s.clone(), v);
        let e = energy_series(&run).unwrap();
        let fit = friction_force_fit(&e.s, &e.total(), (0.0, 10.0)).unwrap();
        assert!((fit.force - 100.0 * a).abs() < 1e-9);
    }

    #[test]
    fn slope_angle_energy() {
        let kappa = 0.12f64.to_radians();
        let s: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let mut run = level_run(s, vec![3.0; 30]);
        run.kappa = Some(kappa);
        let e = energy_series(&run).unwrap();
        let per_metre = e.e_pot[1] - e.e_pot[0];
        assert!((per_metre + 100.0 * G * kappa.sin()).abs() < 1e-12);
        run.kappa = None;
        assert_eq!(energy_series(&run), Err(Error::MissingElevation));
    }

    #[test]
    fn exact_linear_series() {
        let s: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
        let e: Vec<f64> = s.iter().map(|x| 500.0 - 8.0 * x).collect();
        let fit = friction_force_fit(&s, &e, (0.0, 100.0)).unwrap();
        assert!((fit.force - 8.0).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-9));
        let shifted: Vec<f64> = e.iter().map(|x| x + 1234.5).collect();
        let fit2 = friction_force_fit(&s, &shifted, (0.0, 100.0)).unwrap();
        assert!((fit2.force - fit.force).abs() < 1e-9);
    }

    #[test]
    fn short_window_rejected() {
        let s: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let e = s.clone();
        assert!(matches!(
            friction_force_fit(&s, &e, (0.0, 5.0)),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn mu_from_force_values() {
        assert!((mu_from_force(3.924, 100.0, 0.0) - 0.004).abs() < 1e-15);
        assert_eq!(mu_from_force(0.0, 100.0, 0.0), 0.0);
        let r =
            mu_from_force(3.924, 100.0, 0.12f64.to_radians()) / mu_from_force(3.924, 100.0, 0.0);
        assert!((r - 1.0 - 2.19e-6).abs() < 1e-8);
    }

    #[test]
    fn averaging() {
        assert!((average_bidirectional(3e-3, 5e-3) - 4e-3).abs() < 1e-18);
        assert_eq!(average_bidirectional(4.2e-3, 4.2e-3), 4.2e-3);
    }

    #[test]
    fn window() {
        assert_eq!(central_window(0.0, 10.0, 0.6), (2.0, 8.0));
    }

    #[test]
    fn quadratic_through_three_points() {
        let q = |p: f64| 0.1 * p * p - 2.0 * p + 15.0;
        let pts: Vec<(f64, f64)> = [6.0, 11.0, 17.0]
            .iter()
            .map(|&p| (p, q(p) * 1e-3))
            .collect();
        let fit = fit_quadratic_mu_p(&pts, 0.007).unwrap();
        assert!((fit.params.b_x - 0.1).abs() < 1e-10);
        assert!((fit.params.c_x - 2.0).abs() < 1e-10);
        assert!((fit.params.d_x - 15.0).abs() < 1e-10);
    }

    #[test]
    fn quadratic_rank_deficient() {
        let pts = [(5.0, 1e-3), (5.0, 2e-3), (5.0, 3e-3)];
        assert_eq!(fit_quadratic_mu_p(&pts, 0.007), Err(Error::RankDeficient));
    }
}
