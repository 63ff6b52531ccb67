//! Small dense kernels for the handful of k×k systems the fitters solve.

use alloc::vec;
use alloc::vec::Vec;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

pub(crate) fn norm(v: ArrayView1<f64>) -> f64 {
    libm::sqrt(v.dot(&v))
}

/// Solves `a x = b` for symmetric positive definite `a` (row-major, m×m) in place.
/// Returns `None` when a pivot is not safely positive.
pub(crate) fn solve_spd(a: &mut [f64], m: usize, b: &mut [f64]) -> Option<()> {
    debug_assert_eq!(a.len(), m * m);
    let scale = (0..m).map(|i| a[i * m + i].abs()).fold(0.0_f64, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }
    for j in 0..m {
        let mut d = a[j * m + j];
        for k in 0..j {
            d -= a[j * m + k] * a[j * m + k];
        }
        if !(d > 1e-13 * scale) {
            return None;
        }
        let d = libm::sqrt(d);
        a[j * m + j] = d;
        for i in (j + 1)..m {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = s / d;
        }
    }
    for i in 0..m {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * m + k] * b[k];
        }
        b[i] = s / a[i * m + i];
    }
    for i in (0..m).rev() {
        let mut s = b[i];
        for k in (i + 1)..m {
            s -= a[k * m + i] * b[k];
        }
        b[i] = s / a[i * m + i];
    }
    Some(())
}

/// Back substitution for an upper triangular k×k system.
pub(crate) fn solve_upper(u: &Array2<f64>, rhs: &[f64]) -> Vec<f64> {
    let k = rhs.len();
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = rhs[i];
        for j in (i + 1)..k {
            s -= u[[i, j]] * x[j];
        }
        x[i] = s / u[[i, i]];
    }
    x
}

/// Least-squares slopes of `y` on the columns of `t` with a free intercept.
///
/// Columns and response are centred first, so the intercept never enters the solve.
pub(crate) fn ols_slopes(t: ArrayView2<f64>, y: ArrayView1<f64>) -> Option<Vec<f64>> {
    let n = t.nrows();
    let k = t.ncols();
    if n <= k {
        return None;
    }
    let means = t.mean_axis(Axis(0))?;
    let y_mean = y.mean()?;
    let tc: Array2<f64> = &t - &means.insert_axis(Axis(0));
    let yc: Array1<f64> = y.mapv(|v| v - y_mean);
    let gram = tc.t().dot(&tc);
    let mut a: Vec<f64> = gram.iter().copied().collect();
    let mut b: Vec<f64> = tc.t().dot(&yc).to_vec();
    solve_spd(&mut a, k, &mut b)?;
    Some(b)
}
