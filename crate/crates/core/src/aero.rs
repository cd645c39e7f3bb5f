//! Aerodynamic drag with a linear dependence of the drag area on the chassis
//! slip angle.

/// Ambient air.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AirState {
    /// Ambient pressure [Pa].
    pub p_air: f64,
    /// Temperature [K].
    pub temperature: f64,
    /// Specific gas constant [J/(kg·K)].
    pub gas_constant: f64,
}

impl AirState {
    /// Conditions of the glide experiments: 947 hPa and 2 °C.
    pub const ICE_HOUSE: Self = Self {
        p_air: 94_700.0,
        temperature: 275.15,
        gas_constant: 287.05,
    };

    pub fn density(&self) -> f64 {
        self.p_air / (self.gas_constant * self.temperature)
    }
}

impl Default for AirState {
    fn default() -> Self {
        Self::ICE_HOUSE
    }
}

/// Drag force `C_xA_x·v²·ρ/2` [N].
pub fn drag_force(v: f64, cxax: f64, air: &AirState) -> f64 {
    0.5 * cxax * v * v * air.density()
}

/// Relative drag-area increase per degree of yaw measured on the Ahmed body.
pub const AHMED_YAW_SENSITIVITY: f64 = 0.032;
/// Side-to-front area ratio of the Ahmed body.
pub const AHMED_AREA_RATIO: f64 = 2.3;
/// Side-to-front area ratio of a bobsled.
pub const BOB_AREA_RATIO: f64 = 5.0;
/// Relative drag-area increase per degree of yaw used for bobsleds.
pub const YAW_SENSITIVITY: f64 = 0.0694;

/// Scales a reference yaw sensitivity linearly with the side/front area ratio.
pub fn scaled_yaw_sensitivity(reference: f64, reference_ratio: f64, ratio: f64) -> f64 {
    reference * ratio / reference_ratio
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AeroModel {
    /// Drag area at zero yaw [m²].
    pub cxax: f64,
    /// Relative drag-area increase per degree of |β|.
    pub yaw_sensitivity: f64,
    pub air: AirState,
}

/// Drag along the driving direction and the zero-yaw reference value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroForces {
    pub actual: f64,
    pub ideal: f64,
}

impl AeroModel {
    pub fn new(cxax: f64, air: AirState) -> Self {
        Self {
            cxax,
            yaw_sensitivity: YAW_SENSITIVITY,
            air,
        }
    }

    pub fn drag_area_at_beta(&self, beta: f64) -> f64 {
        self.cxax * (1.0 + self.yaw_sensitivity * beta.abs().to_degrees())
    }

    pub fn aero_forces(&self, v: f64, beta: f64) -> AeroForces {
        AeroForces {
            actual: drag_force(v, self.drag_area_at_beta(beta), &self.air),
            ideal: drag_force(v, self.cxax, &self.air),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_and_drag() {
        let air = AirState::ICE_HOUSE;
        assert!((air.density() - 1.199).abs() < 5e-4);
        let f = drag_force(10.0, 0.5, &air);
        assert!((f - 29.97).abs() < 0.01);
        assert_eq!(drag_force(0.0, 0.5, &air), 0.0);
        assert!((drag_force(20.0, 0.5, &air) / f - 4.0).abs() < 1e-12);
    }

    #[test]
    fn yaw_sensitive_area() {
        let m = AeroModel::new(0.2, AirState::default());
        assert_eq!(m.drag_area_at_beta(0.0), 0.2);
        let r = m.drag_area_at_beta(1f64.to_radians()) / m.drag_area_at_beta(0.0);
        assert!((r - 1.0694).abs() < 1e-15);
        assert_eq!(m.drag_area_at_beta(-0.03), m.drag_area_at_beta(0.03));
    }

    #[test]
    fn forces_at_thirty_metres_per_second() {
        let air = AirState {
            p_air: 1.2,
            temperature: 1.0,
            gas_constant: 1.0,
        };
        let m = AeroModel::new(0.2, air);
        let f = m.aero_forces(30.0, 1f64.to_radians());
        assert!((f.ideal - 108.0).abs() < 1e-9);
        assert!((f.actual - 115.4952).abs() < 1e-9);
        let g = m.aero_forces(12.0, 1f64.to_radians());
        assert!((g.actual / g.ideal - f.actual / f.ideal).abs() < 1e-14);
        let z = m.aero_forces(30.0, 0.0);
        assert_eq!(z.actual, z.ideal);
    }

    #[test]
    fn sensitivity_chain() {
        let ratio = BOB_AREA_RATIO / AHMED_AREA_RATIO;
        assert_eq!(libm::round(ratio * 100.0) / 100.0, 2.17);
        let pct = 2.17 * AHMED_YAW_SENSITIVITY * 100.0;
        assert_eq!(libm::round(pct * 100.0) / 100.0, 6.94);
    }
}
