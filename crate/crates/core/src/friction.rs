//! Runner-ice friction laws.
//!
//! Longitudinal friction depends on the contact pressure through a capped
//! quadratic; lateral friction follows a sin-atan curve parameterised by the
//! cornering stiffness. A reference lateral law with fixed arctangent shape is
//! included for comparison.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::numeric::interp_clamped;
use crate::{Error, Result};

/// Friction coefficient used when no pressure information is available.
pub const DEFAULT_MU_X: f64 = 0.004;

/// Below this pitch rate the track is treated as flat [rad/s].
pub const OMEGA_MIN: f64 = 1e-3;

/// Coefficients of `μ_x(p) = min{10⁻³·ζ_x·(B_x p² − C_x p + D_x), E_x}` with
/// `p` in MPa.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LongitudinalFrictionParams {
    pub b_x: f64,
    pub c_x: f64,
    pub d_x: f64,
    /// Upper bound of the friction coefficient.
    pub e_x: f64,
    /// Asperity factor, 1 on smooth ice.
    pub zeta_x: f64,
}

impl LongitudinalFrictionParams {
    /// Values obtained from the luge-steel glide experiments.
    pub const ICE_HOUSE: Self = Self {
        b_x: 0.088,
        c_x: 2.01,
        d_x: 14.66,
        e_x: 0.007,
        zeta_x: 1.0,
    };

    /// Pressure at which the quadratic has its minimum [MPa].
    pub fn vertex_pressure(&self) -> f64 {
        self.c_x / (2.0 * self.b_x)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b_x > 0.0) {
            return Err(Error::InvalidParameter("B_x must be positive"));
        }
        if !(self.e_x > 0.0) {
            return Err(Error::InvalidParameter("E_x must be positive"));
        }
        if !(self.zeta_x >= 1.0) {
            return Err(Error::InvalidParameter("zeta_x must be at least 1"));
        }
        Ok(())
    }
}

impl Default for LongitudinalFrictionParams {
    fn default() -> Self {
        Self::ICE_HOUSE
    }
}

/// Longitudinal friction coefficient at contact pressure `p` [MPa]. The cap
/// `E_x` bounds the final coefficient; negative values of the quadratic are
/// clamped to zero.
pub fn mu_x(p: f64, params: &LongitudinalFrictionParams) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::NonPositivePressure(p));
    }
    let quad = params.b_x * p * p - params.c_x * p + params.d_x;
    Ok((1e-3 * params.zeta_x * quad).min(params.e_x).max(0.0))
}

/// `F_x = −μ_x·F_z·cos α` with a given friction coefficient.
pub fn force_x_with_mu(f_z: f64, alpha: f64, mu: f64) -> f64 {
    -mu * f_z * libm::cos(alpha)
}

/// Longitudinal runner force [N] from the pressure-dependent law.
pub fn force_x(f_z: f64, alpha: f64, p: f64, params: &LongitudinalFrictionParams) -> Result<f64> {
    Ok(force_x_with_mu(f_z, alpha, mu_x(p, params)?))
}

/// Lateral friction parameters for one runner.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LateralFrictionParams {
    /// Peak scale, the product `μ_y·ζ_y`.
    pub mu_zeta_y: f64,
    /// Shape factor.
    pub c_y: f64,
    /// Curvature factor.
    pub e_y: f64,
    /// Cornering stiffness [N/rad].
    pub k_y: f64,
}

impl LateralFrictionParams {
    pub const FRONT: Self = Self {
        mu_zeta_y: 2.577,
        c_y: 0.024,
        e_y: 0.99,
        k_y: 10522.0,
    };

    pub const REAR: Self = Self {
        mu_zeta_y: 3.288,
        c_y: 0.076,
        e_y: 0.99,
        k_y: 49776.0,
    };

    /// Stiffness factor `B_y = K_y / (C_y·μ_y·ζ_y·F_z)`.
    pub fn b_y(&self, f_z: f64) -> f64 {
        self.k_y / (self.c_y * self.mu_zeta_y * f_z)
    }

    /// Scales the peak factor by an extra asperity factor `ζ_y`.
    pub fn with_zeta(self, zeta_y: f64) -> Self {
        Self {
            mu_zeta_y: self.mu_zeta_y * zeta_y,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu_zeta_y > 0.0) {
            return Err(Error::InvalidParameter("mu_zeta_y must be positive"));
        }
        if !(self.c_y > 0.0 && self.c_y < 2.0) {
            return Err(Error::InvalidParameter("C_y must lie in (0, 2)"));
        }
        if !(self.k_y > 0.0) {
            return Err(Error::InvalidParameter("K_y must be positive"));
        }
        if !(self.e_y > 0.0 && self.e_y <= 1.0) {
            return Err(Error::InvalidParameter("E_y must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Lateral force without the normal force check; `f_z` must be positive.
    pub(crate) fn eval(&self, f_z: f64, alpha: f64) -> f64 {
        let d = self.mu_zeta_y * f_z;
        let u = self.b_y(f_z) * alpha;
        let w = u - self.e_y * (u - libm::atan(u));
        d * libm::sin(self.c_y * libm::atan(w))
    }
}

/// Lateral runner force [N].
pub fn force_y(f_z: f64, alpha: f64, params: &LateralFrictionParams) -> Result<f64> {
    if !(f_z > 0.0) {
        return Err(Error::NonPositiveNormalForce(f_z));
    }
    Ok(params.eval(f_z, alpha))
}

/// Reference lateral law `F_y = μ_y·F_z·(2/π)·atan(k₃·α)` with the published
/// constants, used for both axles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Braghin {
    pub mu_y: f64,
    /// [1/rad]
    pub k_3: f64,
}

impl Default for Braghin {
    fn default() -> Self {
        Self {
            mu_y: 0.5,
            k_3: 50.0,
        }
    }
}

impl Braghin {
    pub fn force(&self, f_z: f64, alpha: f64) -> f64 {
        self.mu_y * f_z * (2.0 / PI) * libm::atan(self.k_3 * alpha)
    }
}

pub fn force_y_braghin(f_z: f64, alpha: f64) -> f64 {
    Braghin::default().force(f_z, alpha)
}

/// Lateral friction law for both axles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LateralModel {
    MagicFormula {
        front: LateralFrictionParams,
        rear: LateralFrictionParams,
    },
    Braghin(Braghin),
}

impl LateralModel {
    pub fn fitted() -> Self {
        LateralModel::MagicFormula {
            front: LateralFrictionParams::FRONT,
            rear: LateralFrictionParams::REAR,
        }
    }

    /// Force at the front runner; zero without normal load.
    pub fn front(&self, f_z: f64, alpha: f64) -> f64 {
        match self {
            _ if !(f_z > 0.0) => 0.0,
            LateralModel::MagicFormula { front, .. } => front.eval(f_z, alpha),
            LateralModel::Braghin(b) => b.force(f_z, alpha),
        }
    }

    pub fn rear(&self, f_z: f64, alpha: f64) -> f64 {
        match self {
            _ if !(f_z > 0.0) => 0.0,
            LateralModel::MagicFormula { rear, .. } => rear.eval(f_z, alpha),
            LateralModel::Braghin(b) => b.force(f_z, alpha),
        }
    }
}

/// Pitch radius of the track, or the flat-track marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrackRadius {
    Finite(f64),
    Flat,
}

/// `r_y,track = −v/θ̇`; negative radii are crests.
pub fn track_radius_y(v: f64, theta_dot: f64) -> TrackRadius {
    if theta_dot.abs() <= OMEGA_MIN {
        TrackRadius::Flat
    } else {
        TrackRadius::Finite(-v / theta_dot)
    }
}

/// Contact pressure [MPa] tabulated over normal force [N] and track radius [m].
#[derive(Debug, Clone, PartialEq)]
pub struct PressureLookup {
    f_z: Vec<f64>,
    radius: Vec<f64>,
    /// Row-major, one row per radius.
    values: Vec<f64>,
}

impl PressureLookup {
    pub fn new(f_z: Vec<f64>, radius: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if f_z.is_empty() || radius.is_empty() {
            return Err(Error::MalformedTable("empty axis"));
        }
        let increasing =
            |a: &[f64]| a.windows(2).all(|w| w[1] > w[0]) && a.iter().all(|v| v.is_finite());
        if !increasing(&f_z) || !increasing(&radius) {
            return Err(Error::MalformedTable("axes must be strictly increasing"));
        }
        if values.len() != f_z.len() * radius.len() {
            return Err(Error::MalformedTable("body size does not match the axes"));
        }
        if !values.iter().all(|&p| p > 0.0 && p.is_finite()) {
            return Err(Error::MalformedTable("pressures must be positive"));
        }
        Ok(Self {
            f_z,
            radius,
            values,
        })
    }

    pub fn f_z_axis(&self) -> &[f64] {
        &self.f_z
    }

    pub fn radius_axis(&self) -> &[f64] {
        &self.radius
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn row(&self, i: usize) -> &[f64] {
        let n = self.f_z.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// Bilinear interpolation, clamped to the nearest edge outside the grid.
    /// A flat track uses the largest-radius row.
    pub fn lookup(&self, f_z: f64, radius: TrackRadius) -> f64 {
        let last = self.radius.len() - 1;
        let r = match radius {
            TrackRadius::Flat => self.radius[last],
            TrackRadius::Finite(r) => r,
        };
        if r <= self.radius[0] {
            return interp_clamped(&self.f_z, self.row(0), f_z);
        }
        if r >= self.radius[last] {
            return interp_clamped(&self.f_z, self.row(last), f_z);
        }
        let hi = self.radius.partition_point(|&v| v <= r);
        let lo = hi - 1;
        let w = (r - self.radius[lo]) / (self.radius[hi] - self.radius[lo]);
        let p_lo = interp_clamped(&self.f_z, self.row(lo), f_z);
        let p_hi = interp_clamped(&self.f_z, self.row(hi), f_z);
        p_lo + w * (p_hi - p_lo)
    }
}

pub fn lookup_pressure(table: &PressureLookup, f_z: f64, r_y_track: TrackRadius) -> f64 {
    table.lookup(f_z, r_y_track)
}

/// How the longitudinal friction coefficient is obtained at each runner.
#[derive(Debug, Clone, PartialEq)]
pub enum LongitudinalLaw {
    Fixed(f64),
    Pressure {
        params: LongitudinalFrictionParams,
        front: PressureLookup,
        rear: PressureLookup,
    },
}

impl Default for LongitudinalLaw {
    fn default() -> Self {
        LongitudinalLaw::Fixed(DEFAULT_MU_X)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axle {
    Front,
    Rear,
}

impl LongitudinalLaw {
    pub fn mu(&self, axle: Axle, f_z: f64, radius: TrackRadius) -> f64 {
        match self {
            LongitudinalLaw::Fixed(mu) => *mu,
            LongitudinalLaw::Pressure {
                params,
                front,
                rear,
            } => {
                let table = match axle {
                    Axle::Front => front,
                    Axle::Rear => rear,
                };
                // tables hold positive pressures only
                mu_x(table.lookup(f_z, radius), params).unwrap_or(0.0)
            }
        }
    }
}
