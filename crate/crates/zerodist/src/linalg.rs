//! Minimal dense solvers for the small systems the basis builders produce
//! (IRLS normal equations, Remez interpolation). Sizes stay below ~100, so
//! plain LU with partial pivoting is plenty.

use crate::error::{Error, Result};
use crate::num::{Cplx, Real};

/// Solves `A x = b` in place for complex `A` (row-major, n x n).
pub fn solve_complex<R: Real>(a: &mut [Vec<Cplx<R>>], b: &mut [Cplx<R>]) -> Result<(), R> {
    let n = b.len();
    for (row, _) in a.iter().zip(0..n) {
        debug_assert_eq!(row.len(), n);
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i][col].norm_sqr().partial_cmp(&a[j][col].norm_sqr()).unwrap()
            })
            .unwrap();
        if a[pivot][col].norm_sqr() == R::zero() {
            return Err(Error::Invalid(format!("singular system at column {col}")));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Cplx::new(R::one(), R::zero()) / a[col][col];
        for i in col + 1..n {
            let f = a[i][col] * inv;
            if f.norm_sqr() == R::zero() {
                continue;
            }
            for j in col..n {
                let v = a[col][j];
                a[i][j] -= f * v;
            }
            let bv = b[col];
            b[i] -= f * bv;
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for j in col + 1..n {
            s -= a[col][j] * b[j];
        }
        b[col] = s / a[col][col];
    }
    Ok(())
}

/// Solves `A x = b` in place for real `A` (row-major, n x n).
pub fn solve_real<R: Real>(a: &mut [Vec<R>], b: &mut [R]) -> Result<(), R> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col] == R::zero() {
            return Err(Error::Invalid(format!("singular system at column {col}")));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = R::one() / a[col][col];
        for i in col + 1..n {
            let f = a[i][col] * inv;
            if f == R::zero() {
                continue;
            }
            for j in col..n {
                let v = a[col][j];
                a[i][j] -= f * v;
            }
            let bv = b[col];
            b[i] -= f * bv;
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for j in col + 1..n {
            s -= a[col][j] * b[j];
        }
        b[col] = s / a[col][col];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Cplx<f64>;

    #[test]
    fn complex_solve_recovers_known_solution() {
        let x_true = [C::new(1.0, -2.0), C::new(0.5, 0.25), C::new(-3.0, 1.0)];
        let a0 = vec![
            vec![C::new(2.0, 1.0), C::new(0.0, -1.0), C::new(1.0, 0.0)],
            vec![C::new(1.0, 0.0), C::new(3.0, 0.5), C::new(-1.0, 1.0)],
            vec![C::new(0.0, 2.0), C::new(1.0, 1.0), C::new(4.0, 0.0)],
        ];
        let mut b: Vec<C> = a0
            .iter()
            .map(|row| row.iter().zip(&x_true).map(|(&m, &x)| m * x).sum())
            .collect();
        let mut a = a0.clone();
        solve_complex(&mut a, &mut b).unwrap();
        for (got, want) in b.iter().zip(&x_true) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn real_solve_and_singular_detection() {
        let mut a: Vec<Vec<f64>> = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let mut b: Vec<f64> = vec![5.0, 10.0];
        solve_real(&mut a, &mut b).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-13 && (b[1] - 3.0).abs() < 1e-13);

        let mut s: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        let mut sb: Vec<f64> = vec![1.0, 2.0];
        assert!(solve_real(&mut s, &mut sb).is_err());
    }
}
