//! Nonlinear least-squares estimation of the lateral friction parameters of a
//! runner from reconstructed axle forces.
//!
//! The free parameters are `(μ_y·ζ_y, C_y, K_y)`; `E_y` stays fixed. The
//! minimiser is a damped Gauss-Newton (Levenberg-Marquardt) iteration with
//! diagonal scaling, the analytic Jacobian of the sin-atan law, and projection
//! onto box bounds after each step.

use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::{Matrix3, Vector3};

use crate::friction::{Axle, LateralFrictionParams};
use crate::numeric::{median, pairwise_sum_by, quantile_sorted, sorted};
use crate::onetrack::AxleForceTrace;
use crate::telemetry::TelemetryRun;
use crate::{Error, Result};

/// One observation of the lateral law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitSample {
    pub alpha: f64,
    pub f_z: f64,
    pub f_y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Fixed curvature factor.
    pub e_y: f64,
    /// Start point `(μ_y·ζ_y, C_y, K_y)`. `None` uses `(3, 0.05, K₀)` with
    /// `K₀` from the small-angle samples.
    pub initial: Option<[f64; 3]>,
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    /// Roll-acceleration exclusion threshold [°/s²].
    pub roll_threshold_deg: f64,
    pub max_iterations: usize,
    /// Stop once an accepted step lowers the cost by less than this fraction.
    pub tolerance: f64,
    /// Holds `K_y` at this value and fits the other two parameters.
    pub fixed_k_y: Option<f64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            e_y: 0.99,
            initial: None,
            lower: [0.1, 0.001, 100.0],
            upper: [20.0, 1.9, 1e6],
            roll_threshold_deg: 100.0,
            max_iterations: 500,
            tolerance: 1e-15,
            fixed_k_y: None,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.roll_threshold_deg > 0.0) {
            return Err(Error::InvalidParameter("roll threshold must be positive"));
        }
        if (0..3).any(|j| !(self.lower[j] < self.upper[j])) {
            return Err(Error::InvalidParameter(
                "lower bounds must lie below upper bounds",
            ));
        }
        if let Some(x0) = self.initial {
            if (0..3).any(|j| x0[j] < self.lower[j] || x0[j] > self.upper[j]) {
                return Err(Error::InvalidParameter("initial guess outside the bounds"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: LateralFrictionParams,
    /// Root mean square of the force residuals [N].
    pub residual_rms: f64,
    pub samples: usize,
    /// Parameter covariance in `(μ_y·ζ_y, C_y, K_y)` order; the row and
    /// column of a held parameter are zero.
    pub covariance: [[f64; 3]; 3],
    pub status: Convergence,
    pub iterations: usize,
}

/// Fit datasets for both runners, aligned on the same samples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxleDatasets {
    pub front: Vec<FitSample>,
    pub rear: Vec<FitSample>,
}

impl AxleDatasets {
    pub fn get(&self, axle: Axle) -> &[FitSample] {
        match axle {
            Axle::Front => &self.front,
            Axle::Rear => &self.rear,
        }
    }

    pub fn extend(&mut self, other: AxleDatasets) {
        self.front.extend(other.front);
        self.rear.extend(other.rear);
    }
}

/// Keeps valid samples with |φ̈| below the threshold and positive normal
/// forces on both runners.
pub fn select_fit_samples(
    trace: &AxleForceTrace,
    run: &TelemetryRun,
    config: &FitConfig,
) -> Result<AxleDatasets> {
    if trace.len() != run.len() || !run.is_derived() {
        return Err(Error::LengthMismatch(trace.len(), run.len()));
    }
    let limit = config.roll_threshold_deg * PI / 180.0;
    let phi_ddot = &run.derived().phi_ddot;
    let mut out = AxleDatasets::default();
    for (s, &pdd) in trace.samples.iter().zip(phi_ddot) {
        if !s.is_valid() || pdd.abs() > limit || !(s.f_z_f > 0.0) || !(s.f_z_r > 0.0) {
            continue;
        }
        out.front.push(FitSample {
            alpha: s.alpha_f,
            f_z: s.f_z_f,
            f_y: s.f_y_f,
        });
        out.rear.push(FitSample {
            alpha: s.alpha_r,
            f_z: s.f_z_r,
            f_y: s.f_y_r,
        });
    }
    if out.front.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(out)
}

/// Model value and gradient with respect to `(μ_y·ζ_y, C_y, K_y)`.
fn model_and_gradient(theta: &[f64; 3], e_y: f64, alpha: f64, f_z: f64) -> (f64, [f64; 3]) {
    let [mz, c, k] = *theta;
    let d = mz * f_z;
    let b = k / (c * d);
    let u = b * alpha;
    let w = u - e_y * (u - libm::atan(u));
    let phi = libm::atan(w);
    let (sin_cp, cos_cp) = libm::sincos(c * phi);
    let f = d * sin_cp;
    let dw_du = 1.0 - e_y * (1.0 - 1.0 / (1.0 + u * u));
    let df_db = d * cos_cp * c / (1.0 + w * w) * dw_du * alpha;
    let grad = [
        f_z * sin_cp - df_db * b / mz,
        d * cos_cp * phi - df_db * b / c,
        df_db * b / k,
    ];
    (f, grad)
}

/// The minimiser works on `(μ_y·ζ_y·C_y, C_y, K_y)`. The force depends on
/// the first two almost only through their product, so this keeps the valley
/// of the cost function straight.
fn to_internal(theta: &[f64; 3]) -> [f64; 3] {
    [theta[0] * theta[1], theta[1], theta[2]]
}

fn from_internal(x: &[f64; 3]) -> [f64; 3] {
    [x[0] / x[1], x[1], x[2]]
}

fn internal_model_and_gradient(x: &[f64; 3], e_y: f64, alpha: f64, f_z: f64) -> (f64, [f64; 3]) {
    let (f, g) = model_and_gradient(&from_internal(x), e_y, alpha, f_z);
    let c = x[1];
    (f, [g[0] / c, g[1] - g[0] * x[0] / (c * c), g[2]])
}

fn params_of(theta: &[f64; 3], e_y: f64) -> LateralFrictionParams {
    LateralFrictionParams {
        mu_zeta_y: theta[0],
        c_y: theta[1],
        e_y,
        k_y: theta[2],
    }
}

fn cost(data: &[FitSample], x: &[f64; 3], e_y: f64) -> f64 {
    let p = params_of(&from_internal(x), e_y);
    0.5 * pairwise_sum_by(data.len(), |i| {
        let r = p.eval(data[i].f_z, data[i].alpha) - data[i].f_y;
        r * r
    })
}

/// `JᵀJ` and `Jᵀr` accumulated with pairwise summation.
fn normal_equations(
    data: &[FitSample],
    theta: &[f64; 3],
    e_y: f64,
) -> (Matrix3<f64>, Vector3<f64>) {
    fn go(data: &[FitSample], theta: &[f64; 3], e_y: f64) -> ([f64; 6], [f64; 3]) {
        if data.len() <= 32 {
            let mut h = [0.0; 6];
            let mut g = [0.0; 3];
            for s in data {
                let (f, j) = internal_model_and_gradient(theta, e_y, s.alpha, s.f_z);
                let r = f - s.f_y;
                h[0] += j[0] * j[0];
                h[1] += j[0] * j[1];
                h[2] += j[0] * j[2];
                h[3] += j[1] * j[1];
                h[4] += j[1] * j[2];
                h[5] += j[2] * j[2];
                g[0] += j[0] * r;
                g[1] += j[1] * r;
                g[2] += j[2] * r;
            }
            (h, g)
        } else {
            let (a, b) = data.split_at(data.len() / 2);
            let (ha, ga) = go(a, theta, e_y);
            let (hb, gb) = go(b, theta, e_y);
            (
                core::array::from_fn(|i| ha[i] + hb[i]),
                core::array::from_fn(|i| ga[i] + gb[i]),
            )
        }
    }
    let (h, g) = go(data, theta, e_y);
    (
        Matrix3::new(h[0], h[1], h[2], h[1], h[3], h[4], h[2], h[4], h[5]),
        Vector3::new(g[0], g[1], g[2]),
    )
}

/// Warm start for `K_y`: median of `F_y/α` over the smallest-|α| tenth of the
/// samples.
fn stiffness_guess(data: &[FitSample]) -> Option<f64> {
    let mut abs: Vec<f64> = data
        .iter()
        .map(|s| s.alpha.abs())
        .filter(|a| *a > 0.0)
        .collect();
    if abs.is_empty() {
        return None;
    }
    abs.sort_by(|a, b| a.total_cmp(b));
    let cut = abs[(abs.len() / 10).min(abs.len() - 1)];
    let ratios: Vec<f64> = data
        .iter()
        .filter(|s| s.alpha != 0.0 && s.alpha.abs() <= cut)
        .map(|s| s.f_y / s.alpha)
        .collect();
    Some(median(&ratios))
}

/// Clamps an internal parameter vector to the box on the physical parameters.
fn project(x: &mut [f64; 3], lower: &[f64; 3], upper: &[f64; 3]) {
    let mut theta = from_internal(x);
    for j in 0..3 {
        theta[j] = theta[j].clamp(lower[j], upper[j]);
    }
    *x = to_internal(&theta);
}

/// Restricts the system to the free parameters by zeroing the held rows and
/// columns and putting ones on their diagonal.
fn mask(h: &mut Matrix3<f64>, g: &mut Vector3<f64>, free: &[bool; 3]) {
    for j in 0..3 {
        if !free[j] {
            for k in 0..3 {
                h[(j, k)] = 0.0;
                h[(k, j)] = 0.0;
            }
            h[(j, j)] = 1.0;
            g[j] = 0.0;
        }
    }
}

pub fn fit_lateral(data: &[FitSample], config: &FitConfig) -> Result<FitResult> {
    config.validate()?;
    let free = [true, true, config.fixed_k_y.is_none()];
    let n_free = free.iter().filter(|f| **f).count();
    if data.len() < 10 * n_free {
        return Err(Error::TooFewSamples {
            needed: 10 * n_free,
            got: data.len(),
        });
    }
    if data.iter().any(|s| !(s.f_z > 0.0)) {
        return Err(Error::NonPositiveNormalForce(
            data.iter()
                .map(|s| s.f_z)
                .find(|f| !(*f > 0.0))
                .unwrap_or(0.0),
        ));
    }
    let e_y = config.e_y;
    let mut theta = match (config.initial, config.fixed_k_y) {
        (Some(x0), Some(k)) => [x0[0], x0[1], k],
        (Some(x0), None) => x0,
        (None, Some(k)) => [3.0, 0.05, k],
        (None, None) => [3.0, 0.05, stiffness_guess(data).unwrap_or(config.lower[2])],
    };
    for (j, x) in theta.iter_mut().enumerate() {
        *x = x.clamp(config.lower[j], config.upper[j]);
    }
    let mut theta = to_internal(&theta);

    let (mut h, mut g) = normal_equations(data, &theta, e_y);
    mask(&mut h, &mut g, &free);
    if (0..3).any(|j| free[j] && !(h[(j, j)] > 0.0)) {
        return Err(Error::RankDeficient);
    }
    let mut scale = Vector3::from_fn(|j, _| libm::sqrt(h[(j, j)]));
    if Matrix3::from_fn(|i, j| h[(i, j)] / (scale[i] * scale[j]))
        .cholesky()
        .is_none()
    {
        return Err(Error::RankDeficient);
    }

    let mut current = cost(data, &theta, e_y);
    let mut lambda = 1e-3;
    let mut status = Convergence::MaxIterations;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        if current == 0.0 {
            status = Convergence::Converged;
            break;
        }
        // Marquardt scaling: damping proportional to the running max of diag(JᵀJ)
        for j in 0..3 {
            scale[j] = scale[j].max(libm::sqrt(h[(j, j)]));
        }
        let mut accepted = false;
        for _ in 0..60 {
            let mut damped = h;
            for j in 0..3 {
                if free[j] {
                    damped[(j, j)] += lambda * scale[j] * scale[j];
                }
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&(-g));
            let mut trial = theta;
            for j in 0..3 {
                if free[j] {
                    trial[j] += step[j];
                }
            }
            project(&mut trial, &config.lower, &config.upper);
            let trial_cost = cost(data, &trial, e_y);
            if trial_cost < current {
                let decrease = (current - trial_cost) / current;
                let moved = (0..3).any(|j| trial[j] != theta[j]);
                theta = trial;
                current = trial_cost;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if decrease < config.tolerance || !moved {
                    status = Convergence::Converged;
                }
                break;
            }
            lambda *= 4.0;
            if lambda > 1e16 {
                break;
            }
        }
        if !accepted {
            // no descent direction left at machine precision
            status = Convergence::Converged;
            break;
        }
        if status == Convergence::Converged {
            break;
        }
        let (nh, ng) = normal_equations(data, &theta, e_y);
        h = nh;
        g = ng;
        mask(&mut h, &mut g, &free);
    }

    let (mut h, mut g) = normal_equations(data, &theta, e_y);
    mask(&mut h, &mut g, &free);
    let dof = (data.len() - n_free).max(1) as f64;
    let sigma2 = 2.0 * current / dof;
    let mut covariance = [[0.0; 3]; 3];
    if let Some(inv) = h.try_inverse() {
        let c = theta[1];
        let mut t = Matrix3::identity();
        t[(0, 0)] = 1.0 / c;
        t[(0, 1)] = -theta[0] / (c * c);
        let cov = t * inv * t.transpose();
        for i in 0..3 {
            for j in 0..3 {
                if free[i] && free[j] {
                    covariance[i][j] = sigma2 * cov[(i, j)];
                }
            }
        }
    }
    Ok(FitResult {
        params: params_of(&from_internal(&theta), e_y),
        residual_rms: libm::sqrt(2.0 * current / data.len() as f64),
        samples: data.len(),
        covariance,
        status,
        iterations,
    })
}

/// Spread of the measured lateral force inside one slip-angle bin.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaBin {
    pub alpha: f64,
    pub count: usize,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

/// Diagnostics for one normal-force band: binned data and the model curve at
/// the band's mean normal force.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceBand {
    pub f_z_lo: f64,
    pub f_z_hi: f64,
    pub f_z_mean: f64,
    pub count: usize,
    pub bins: Vec<AlphaBin>,
    pub curve: Vec<(f64, f64)>,
}

/// Groups the data into normal-force bands (`f_z_edges`, increasing) and
/// slip-angle bins, omitting empty bins and bands.
pub fn fit_report(
    params: &LateralFrictionParams,
    data: &[FitSample],
    f_z_edges: &[f64],
    alpha_bins: usize,
) -> Vec<ForceBand> {
    let mut bands = Vec::new();
    if data.is_empty() || alpha_bins == 0 {
        return bands;
    }
    let a_min = data.iter().map(|s| s.alpha).fold(f64::INFINITY, f64::min);
    let a_max = data
        .iter()
        .map(|s| s.alpha)
        .fold(f64::NEG_INFINITY, f64::max);
    let width = if a_max > a_min {
        (a_max - a_min) / alpha_bins as f64
    } else {
        1.0
    };
    for edge in f_z_edges.windows(2) {
        let (lo, hi) = (edge[0], edge[1]);
        let last = hi == f_z_edges[f_z_edges.len() - 1];
        let members: Vec<&FitSample> = data
            .iter()
            .filter(|s| s.f_z >= lo && (s.f_z < hi || (last && s.f_z <= hi)))
            .collect();
        if members.is_empty() {
            continue;
        }
        let f_z_mean = members.iter().map(|s| s.f_z).sum::<f64>() / members.len() as f64;
        let mut bins = Vec::new();
        for b in 0..alpha_bins {
            let b_lo = a_min + b as f64 * width;
            let b_hi = b_lo + width;
            let ys: Vec<f64> = members
                .iter()
                .filter(|s| {
                    s.alpha >= b_lo && (s.alpha < b_hi || (b + 1 == alpha_bins && s.alpha <= b_hi))
                })
                .map(|s| s.f_y)
                .collect();
            if ys.is_empty() {
                continue;
            }
            let ys = sorted(&ys);
            bins.push(AlphaBin {
                alpha: 0.5 * (b_lo + b_hi),
                count: ys.len(),
                q25: quantile_sorted(&ys, 0.25),
                median: quantile_sorted(&ys, 0.5),
                q75: quantile_sorted(&ys, 0.75),
            });
        }
        let curve = (0..=4 * alpha_bins)
            .map(|k| {
                let a = a_min + (a_max - a_min) * k as f64 / (4 * alpha_bins) as f64;
                (a, params.eval(f_z_mean, a))
            })
            .collect();
        bands.push(ForceBand {
            f_z_lo: lo,
            f_z_hi: hi,
            f_z_mean,
            count: members.len(),
            bins,
            curve,
        });
    }
    bands
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn grid_data(p: &LateralFrictionParams) -> Vec<FitSample> {
        let mut out = vec![];
        for i in 0..=40 {
            let alpha = (-3.0 + 6.0 * i as f64 / 40.0).to_radians();
            for j in 0..=14 {
                let f_z = 1000.0 + 1000.0 * j as f64;
                out.push(FitSample {
                    alpha,
                    f_z,
                    f_y: p.eval(f_z, alpha),
                });
            }
        }
        out
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let theta = [2.577, 0.024, 10522.0];
        for &(alpha, f_z) in &[(0.01, 3000.0), (-0.04, 12000.0), (0.002, 1500.0)] {
            let (_, grad) = model_and_gradient(&theta, 0.99, alpha, f_z);
            for j in 0..3 {
                let h = theta[j] * 1e-6;
                let mut up = theta;
                let mut dn = theta;
                up[j] += h;
                dn[j] -= h;
                let fd = (params_of(&up, 0.99).eval(f_z, alpha)
                    - params_of(&dn, 0.99).eval(f_z, alpha))
                    / (2.0 * h);
                assert!(
                    (fd - grad[j]).abs() <= 1e-6 * fd.abs().max(1e-3),
                    "j={j} fd={fd} an={}",
                    grad[j]
                );
            }
        }
    }

    #[test]
    fn noise_free_recovery() {
        let truth = LateralFrictionParams::FRONT;
        let res = fit_lateral(&grid_data(&truth), &FitConfig::default()).unwrap();
        let p = res.params;
        assert!(
            (p.mu_zeta_y / truth.mu_zeta_y - 1.0).abs() < 0.01,
            "{res:?}"
        );
        assert!((p.c_y / truth.c_y - 1.0).abs() < 0.01, "{p:?}");
        assert!((p.k_y / truth.k_y - 1.0).abs() < 0.01, "{p:?}");
    }

    #[test]
    fn zero_slip_is_unidentifiable() {
        let data: Vec<FitSample> = (0..100)
            .map(|i| FitSample {
                alpha: 0.0,
                f_z: 1000.0 + i as f64,
                f_y: 0.0,
            })
            .collect();
        assert_eq!(
            fit_lateral(&data, &FitConfig::default()),
            Err(Error::RankDeficient)
        );
    }

    #[test]
    fn too_few_samples() {
        let data = grid_data(&LateralFrictionParams::FRONT);
        assert!(matches!(
            fit_lateral(&data[..20], &FitConfig::default()),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn report_bins() {
        let p = LateralFrictionParams::FRONT;
        let data = grid_data(&p);
        let bands = fit_report(&p, &data, &[0.0, 1e6], 6);
        assert_eq!(bands.len(), 1);
        assert_eq!(bands[0].count, data.len());
        let bands = fit_report(&p, &data, &[0.0, 500.0, 5000.0, 20000.0], 6);
        // nothing below 500 N
        assert_eq!(bands.len(), 2);
        assert!(bands.iter().all(|b| b.bins.iter().all(|x| x.count > 0)));
    }
}
