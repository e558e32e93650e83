//! Bound-constrained damped Gauss–Newton (Levenberg–Marquardt).
//!
//! Small dense problems only: the normal equations are formed explicitly.
//! Damping is multiplicative, ×10 after a rejected trial and ÷10 after an
//! accepted one, scaled by the diagonal of `JᵀJ`. Parameters sitting on a
//! bound with the gradient pushing outward are frozen for that iteration;
//! every trial point is projected back into the box.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Converged once `‖Δx‖ ≤ step_tolerance·(‖x‖ + step_tolerance)`.
    pub step_tolerance: f64,
    /// Converged once the projected gradient norm drops below this.
    pub gradient_tolerance: f64,
    pub initial_damping: f64,
    pub max_damping: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iterations: 200,
            step_tolerance: 1e-10,
            gradient_tolerance: 1e-12,
            initial_damping: 1e-3,
            max_damping: 1e16,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmReport {
    pub params: Vec<f64>,
    /// `½·Σ r²` at `params`.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    /// Cost after the start and after every accepted step.
    pub cost_history: Vec<f64>,
    /// `JᵀJ` at `params`.
    pub normal_matrix: DMatrix<f64>,
}

/// Residual vector and Jacobian at a parameter point.
pub trait LeastSquares {
    fn residuals(&self, x: &[f64]) -> DVector<f64>;
    fn jacobian(&self, x: &[f64]) -> DMatrix<f64>;
}

fn cost_of(r: &DVector<f64>) -> f64 {
    0.5 * r.norm_squared()
}

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((xi, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *xi = xi.clamp(*lo, *hi);
    }
}

/// Gradient with components zeroed where a bound blocks descent.
fn projected_gradient(g: &DVector<f64>, x: &[f64], lower: &[f64], upper: &[f64]) -> DVector<f64> {
    DVector::from_iterator(
        g.len(),
        g.iter().enumerate().map(|(i, &gi)| {
            if (x[i] <= lower[i] && gi > 0.0) || (x[i] >= upper[i] && gi < 0.0) {
                0.0
            } else {
                gi
            }
        }),
    )
}

pub fn minimize<P: LeastSquares>(
    problem: &P,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &LmOptions,
) -> LmReport {
    let n = start.len();
    let mut x = start.to_vec();
    project(&mut x, lower, upper);
    let mut r = problem.residuals(&x);
    let mut cost = cost_of(&r);
    let mut history = vec![cost];
    let mut mu = opts.initial_damping;
    let mut converged = false;
    let mut iterations = 0;

    let mut jac = problem.jacobian(&x);
    let mut jtj = jac.transpose() * &jac;
    let mut grad = jac.transpose() * &r;
    let mut pg = projected_gradient(&grad, &x, lower, upper);

    if !cost.is_finite() {
        return LmReport {
            params: x,
            cost,
            iterations,
            converged,
            gradient_norm: f64::INFINITY,
            cost_history: history,
            normal_matrix: jtj,
        };
    }

    'outer: while iterations < opts.max_iterations {
        if pg.norm() < opts.gradient_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let free: Vec<usize> = (0..n).filter(|&i| pg[i] != 0.0 || grad[i] == 0.0).collect();
        let max_diag = (0..n).map(|i| jtj[(i, i)]).fold(0.0_f64, f64::max).max(f64::MIN_POSITIVE);

        loop {
            let m = free.len();
            let mut a = DMatrix::<f64>::zeros(m, m);
            let mut b = DVector::<f64>::zeros(m);
            for (ii, &i) in free.iter().enumerate() {
                b[ii] = -grad[i];
                for (jj, &j) in free.iter().enumerate() {
                    a[(ii, jj)] = jtj[(i, j)];
                }
                a[(ii, ii)] += mu * jtj[(i, i)].max(1e-12 * max_diag);
            }
            let step = a.cholesky().map(|c| c.solve(&b));

            if let Some(step) = step {
                let mut trial = x.clone();
                for (ii, &i) in free.iter().enumerate() {
                    trial[i] += step[ii];
                }
                project(&mut trial, lower, upper);
                let r_trial = problem.residuals(&trial);
                let cost_trial = cost_of(&r_trial);

                if cost_trial.is_finite() && cost_trial < cost {
                    let dx: f64 = trial.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    let xn: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    x = trial;
                    r = r_trial;
                    cost = cost_trial;
                    history.push(cost);
                    mu = (mu / 10.0).max(1e-20);
                    jac = problem.jacobian(&x);
                    jtj = jac.transpose() * &jac;
                    grad = jac.transpose() * &r;
                    pg = projected_gradient(&grad, &x, lower, upper);
                    if dx <= opts.step_tolerance * (xn + opts.step_tolerance) {
                        converged = true;
                        break 'outer;
                    }
                    continue 'outer;
                }
                // no representable decrease left along an already negligible step
                let dx: f64 = trial.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let xn: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if dx <= opts.step_tolerance * (xn + opts.step_tolerance) {
                    converged = true;
                    break 'outer;
                }
            }
            mu *= 10.0;
            if mu > opts.max_damping {
                break 'outer;
            }
        }
    }

    let gradient_norm = pg.norm();
    if gradient_norm < opts.gradient_tolerance {
        converged = true;
    }
    LmReport { params: x, cost, iterations, converged, gradient_norm, cost_history: history, normal_matrix: jtj }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rosenbrock as a two-residual least-squares problem.
    struct Rosenbrock;

    impl LeastSquares for Rosenbrock {
        fn residuals(&self, x: &[f64]) -> DVector<f64> {
            DVector::from_vec(vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]])
        }
        fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
            DMatrix::from_row_slice(2, 2, &[-20.0 * x[0], 10.0, -1.0, 0.0])
        }
    }

    #[test]
    fn solves_rosenbrock() {
        let inf = f64::INFINITY;
        let rep = minimize(&Rosenbrock, &[-1.2, 1.0], &[-inf, -inf], &[inf, inf], &LmOptions::default());
        assert!(rep.converged, "{rep:?}");
        assert!((rep.params[0] - 1.0).abs() < 1e-8 && (rep.params[1] - 1.0).abs() < 1e-8);
        assert!(rep.cost_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn respects_bounds() {
        let inf = f64::INFINITY;
        let rep = minimize(&Rosenbrock, &[0.0, 0.0], &[-inf, -inf], &[0.5, inf], &LmOptions::default());
        assert!(rep.params[0] <= 0.5);
        assert!((rep.params[0] - 0.5).abs() < 1e-9, "{rep:?}");
        assert!((rep.params[1] - 0.25).abs() < 1e-8);
        assert!(rep.converged, "{rep:?}");
    }
}
