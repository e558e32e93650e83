use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const NEG_TOL: f64 = 1e-12;

/// Nonnegative least squares `min ‖Ax − b‖²` subject to `x ≥ 0` and,
/// optionally, `Σx = sum_to`.
///
/// Enumerates every active set, so it is meant for a handful of unknowns.
/// Rank-deficient `A` is rejected.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, sum_to: Option<f64>) -> Result<DVector<f64>> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::Argument(format!("nnls: {m} rows but {} targets", b.len())));
    }
    if n == 0 || n > 16 {
        return Err(Error::Argument(format!("nnls: unsupported unknown count {n}")));
    }
    let rank = a.clone().svd(false, false).rank(1e-10 * a.amax().max(1.0));
    if rank < n {
        return Err(Error::Underdetermined(format!("{n} unknowns but the {m} equations have rank {rank}")));
    }

    let mut best: Option<(f64, DVector<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let free: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let Some(xs) = solve_subset(a, b, &free, sum_to) else { continue };
        if xs.iter().any(|v| *v < -NEG_TOL) {
            continue;
        }
        let mut x = DVector::zeros(n);
        for (k, &i) in free.iter().enumerate() {
            x[i] = xs[k].max(0.0);
        }
        let cost = (a * &x - b).norm_squared();
        if best.as_ref().is_none_or(|(c, _)| cost < *c - 1e-15 * c.abs()) {
            best = Some((cost, x));
        }
    }
    if sum_to.is_none_or(|s| s == 0.0) {
        let zero_cost = b.norm_squared();
        if best.as_ref().is_none_or(|(c, _)| zero_cost < *c) {
            best = Some((zero_cost, DVector::zeros(n)));
        }
    }
    best.map(|(_, x)| x).ok_or_else(|| Error::Data("no nonnegative solution satisfies the sum constraint".into()))
}

/// Unconstrained least squares on the columns in `free`, with the optional
/// equality constraint imposed through the KKT system.
fn solve_subset(a: &DMatrix<f64>, b: &DVector<f64>, free: &[usize], sum_to: Option<f64>) -> Option<DVector<f64>> {
    let k = free.len();
    let sub = a.select_columns(free);
    let ata = sub.transpose() * &sub;
    let atb = sub.transpose() * b;
    match sum_to {
        None => ata.cholesky().map(|c| c.solve(&atb)),
        Some(s) => {
            let mut kkt = DMatrix::zeros(k + 1, k + 1);
            kkt.view_mut((0, 0), (k, k)).copy_from(&ata);
            for i in 0..k {
                kkt[(i, k)] = 1.0;
                kkt[(k, i)] = 1.0;
            }
            let mut rhs = DVector::zeros(k + 1);
            rhs.rows_mut(0, k).copy_from(&atb);
            rhs[k] = s;
            kkt.lu().solve(&rhs).map(|sol| sol.rows(0, k).into_owned())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_solution_matches_least_squares() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0]);
        let x_true = DVector::from_vec(vec![2.0, 3.0]);
        let b = &a * &x_true;
        let x = nnls(&a, &b, None).unwrap();
        assert!((x - x_true).amax() < 1e-12);
    }

    #[test]
    fn clamps_negative_component() {
        let a = DMatrix::identity(2, 2);
        let b = DVector::from_vec(vec![-1.0, 2.0]);
        let x = nnls(&a, &b, None).unwrap();
        assert_eq!(x.as_slice(), &[0.0, 2.0]);
    }

    #[test]
    fn sum_constraint_holds() {
        let a = DMatrix::identity(3, 3);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let x = nnls(&a, &b, Some(9.0)).unwrap();
        assert!((x.sum() - 9.0).abs() < 1e-12);
        assert!((x[2] - x[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_is_underdetermined() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 1.0, 1.0, 0.5, 1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        assert!(matches!(nnls(&a, &b, None), Err(Error::Underdetermined(_))));
    }
}
