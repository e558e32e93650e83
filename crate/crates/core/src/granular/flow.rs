use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Fluid properties for a Reynolds number estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidContext {
    /// Density, kg/m³.
    pub rho: f64,
    /// Flow velocity, m/s.
    pub u: f64,
    /// Characteristic length, m.
    pub length: f64,
    /// Dynamic viscosity, Pa·s.
    pub mu: f64,
}

/// Ratio of inertial to viscous forces, `ρ·u·L/μ`.
pub fn reynolds_number(ctx: &FluidContext) -> Result<f64> {
    let FluidContext { rho, u, length, mu } = *ctx;
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(domain(format!("viscosity must be > 0, got {mu}")));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(domain(format!("density must be > 0, got {rho}")));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(domain(format!("characteristic length must be > 0, got {length}")));
    }
    if !(u >= 0.0) || !u.is_finite() {
        return Err(domain(format!("velocity must be finite and >= 0, got {u}")));
    }
    Ok(rho * u * length / mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let re = |rho, u, length, mu| reynolds_number(&FluidContext { rho, u, length, mu });
        assert_eq!(re(1000.0, 0.0, 1.0, 0.001).unwrap(), 0.0);
        assert_eq!(re(1000.0, 1.0, 1.0, 1.0).unwrap(), 1000.0);
        assert!((re(1.2, 10.0, 0.5, 1.8e-5).unwrap() - 333_333.333).abs() < 1e-2);
        assert!(re(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(re(1.0, 1.0, 1.0, -1.0).is_err());
    }
}
