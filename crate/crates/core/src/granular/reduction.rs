use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Saturating drag-reduction law
///
/// ```text
/// η(λ) = η∞ + (1 − η∞) / (1 + (λ/λc)^p)
/// ```
///
/// `η(0) = 1`, `η` decreases strictly for `λ > 0` and tends to the floor `η∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionCurve {
    pub eta_inf: f64,
    pub lambda_c: f64,
    pub p: f64,
}

impl ReductionCurve {
    pub fn new(eta_inf: f64, lambda_c: f64, p: f64) -> Result<Self> {
        let curve = ReductionCurve { eta_inf, lambda_c, p };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.eta_inf) {
            return Err(domain(format!("eta_inf must lie in [0, 1), got {}", self.eta_inf)));
        }
        if !(self.lambda_c > 0.0) || !self.lambda_c.is_finite() {
            return Err(domain(format!("lambda_c must be > 0, got {}", self.lambda_c)));
        }
        if !(self.p > 0.0) || !self.p.is_finite() {
            return Err(domain(format!("p must be > 0, got {}", self.p)));
        }
        Ok(())
    }

    /// Reduction factor `η(λ)`.
    pub fn eval(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0) {
            return Err(domain(format!("slip velocity must be >= 0, got {lambda}")));
        }
        Ok(self.eval_unchecked(lambda))
    }

    /// `η` for a non-negative `λ`; `λ = +inf` yields the floor.
    pub(crate) fn eval_unchecked(&self, lambda: f64) -> f64 {
        let g = self.decay(lambda);
        self.eta_inf + (1.0 - self.eta_inf) * g
    }

    /// The decaying part `1 / (1 + (λ/λc)^p)`.
    pub(crate) fn decay(&self, lambda: f64) -> f64 {
        if lambda == 0.0 {
            return 1.0;
        }
        1.0 / (1.0 + (lambda / self.lambda_c).powf(self.p))
    }

    /// Partial derivatives of `η(λ)` with respect to `(η∞, λc, p)`.
    pub(crate) fn gradient(&self, lambda: f64) -> [f64; 3] {
        if lambda == 0.0 {
            return [0.0; 3];
        }
        let g = self.decay(lambda);
        // g·(1 − g) = r / (1 + r)^2 without forming r, which may overflow
        let gr = g * (1.0 - g);
        let scale = 1.0 - self.eta_inf;
        [1.0 - g, scale * gr * self.p / self.lambda_c, -scale * gr * (lambda / self.lambda_c).ln()]
    }

    /// Limit of `η` as `λ → ∞`.
    pub fn floor(&self) -> f64 {
        self.eta_inf
    }
}

/// Reduction factor of `curve` at slip velocity `lambda`.
pub fn reduction_factor(curve: &ReductionCurve, lambda: f64) -> Result<f64> {
    curve.validate()?;
    curve.eval(lambda)
}

/// Resistance under combined rotation and translation, `Q_static·η(λ)`.
pub fn rotational_resistance(q_static: f64, curve: &ReductionCurve, lambda: f64) -> Result<f64> {
    if !(q_static >= 0.0) || !q_static.is_finite() {
        return Err(domain(format!("static resistance must be >= 0, got {q_static}")));
    }
    Ok(q_static * reduction_factor(curve, lambda)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unity_at_zero() {
        let c = ReductionCurve::new(0.37, 3.0, 2.5).unwrap();
        assert_eq!(c.eval(0.0).unwrap(), 1.0);
    }

    #[test]
    fn direct_evaluation() {
        let c = ReductionCurve::new(0.2, 10.0, 1.0).unwrap();
        assert!((c.eval(10.0).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn floor_at_infinity() {
        let c = ReductionCurve::new(0.25, 9.0, 1.2).unwrap();
        assert_eq!(c.eval(f64::INFINITY).unwrap(), 0.25);
    }

    #[test]
    fn rejects_invalid() {
        assert!(ReductionCurve::new(1.0, 1.0, 1.0).is_err());
        assert!(ReductionCurve::new(-0.1, 1.0, 1.0).is_err());
        assert!(ReductionCurve::new(0.1, 0.0, 1.0).is_err());
        assert!(ReductionCurve::new(0.1, 1.0, 0.0).is_err());
        let c = ReductionCurve::new(0.1, 1.0, 1.0).unwrap();
        assert!(c.eval(-1.0).is_err());
        assert!(rotational_resistance(-1.0, &c, 1.0).is_err());
    }

    #[test]
    fn rotational_resistance_no_rotation() {
        let c = ReductionCurve::new(0.1, 7.0, 0.8).unwrap();
        assert_eq!(rotational_resistance(30.0, &c, 0.0).unwrap(), 30.0);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let c = ReductionCurve::new(0.2, 12.0, 1.3).unwrap();
        for &lambda in &[0.5, 3.0, 12.0, 80.0, 2000.0] {
            let g = c.gradient(lambda);
            let params = [c.eta_inf, c.lambda_c, c.p];
            for i in 0..3 {
                let h = 1e-6 * params[i].abs().max(1e-3);
                let mut up = params;
                let mut dn = params;
                up[i] += h;
                dn[i] -= h;
                let f = |q: [f64; 3]| ReductionCurve { eta_inf: q[0], lambda_c: q[1], p: q[2] }.eval_unchecked(lambda);
                let fd = (f(up) - f(dn)) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-7, "λ={lambda} i={i}: {fd} vs {}", g[i]);
            }
        }
    }
}
