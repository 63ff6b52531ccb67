//! Observations × predictors data with the centring/scaling used by every fitter.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

/// A response vector and predictor matrix, kept both raw and standardized.
///
/// Columns of `x` are centred and, when `scaled`, divided by their sample standard
/// deviation (n − 1 divisor). `y` is centred only. The raw copies are kept so that
/// row subsets (bootstrap resamples, CV folds) can be re-standardized from scratch.
#[derive(Debug, Clone)]
pub struct Dataset {
    raw_x: Array2<f64>,
    raw_y: Array1<f64>,
    x: Array2<f64>,
    y: Array1<f64>,
    column_means: Array1<f64>,
    column_sds: Array1<f64>,
    y_mean: f64,
    scaled: bool,
}

/// Centres and unit-variance scales `x`, centres `y`.
pub fn standardize(x: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<Dataset> {
    Dataset::new(x.to_owned(), y.to_owned(), true)
}

impl Dataset {
    pub fn new(raw_x: Array2<f64>, raw_y: Array1<f64>, scaled: bool) -> Result<Self> {
        let (n, p) = raw_x.dim();
        if raw_y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: raw_y.len(),
            });
        }
        if n < 2 {
            return Err(Error::InvalidParameter("at least two observations are required".into()));
        }
        if p == 0 {
            return Err(Error::InvalidParameter("at least one predictor is required".into()));
        }
        if raw_x.iter().chain(raw_y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }

        let column_means = raw_x.mean_axis(Axis(0)).expect("n >= 2");
        let mut x = &raw_x - &column_means.view().insert_axis(Axis(0));
        let mut column_sds = Array1::ones(p);
        for (j, col) in x.axis_iter(Axis(1)).enumerate() {
            let ss = col.dot(&col);
            let sd = libm::sqrt(ss / (n - 1) as f64);
            // Relative test: a column that is constant up to rounding has no variance.
            let scale = column_means[j].abs().max(1.0);
            if !(sd > 1e-12 * scale) {
                return Err(Error::ZeroVarianceColumn(j));
            }
            if scaled {
                column_sds[j] = sd;
            }
        }
        if scaled {
            x /= &column_sds.view().insert_axis(Axis(0));
        }
        let y_mean = raw_y.mean().expect("n >= 2");
        let y = raw_y.mapv(|v| v - y_mean);
        Ok(Self {
            raw_x,
            raw_y,
            x,
            y,
            column_means,
            column_sds,
            y_mean,
            scaled,
        })
    }

    /// The dataset restricted to `rows` (with repetition allowed), standardized afresh.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        let x = self.raw_x.select(Axis(0), rows);
        let y = self.raw_y.select(Axis(0), rows);
        Self::new(x, y, self.scaled)
    }

    /// The dataset restricted to the predictor columns `cols`, in the given order.
    ///
    /// Column statistics do not depend on the other columns, so they are copied
    /// rather than recomputed.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::InvalidParameter("column selection is empty".into()));
        }
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.p()) {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                found: bad,
            });
        }
        Ok(Self {
            raw_x: self.raw_x.select(Axis(1), cols),
            raw_y: self.raw_y.clone(),
            x: self.x.select(Axis(1), cols),
            y: self.y.clone(),
            column_means: self.column_means.select(Axis(0), cols),
            column_sds: self.column_sds.select(Axis(0), cols),
            y_mean: self.y_mean,
            scaled: self.scaled,
        })
    }

    /// Same predictors, different response.
    pub fn with_response(&self, raw_y: Array1<f64>) -> Result<Self> {
        Self::new(self.raw_x.clone(), raw_y, self.scaled)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Standardized predictors.
    pub fn x(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    /// Centred response.
    pub fn y(&self) -> ArrayView1<'_, f64> {
        self.y.view()
    }

    pub fn raw_x(&self) -> ArrayView2<'_, f64> {
        self.raw_x.view()
    }

    pub fn raw_y(&self) -> ArrayView1<'_, f64> {
        self.raw_y.view()
    }

    pub fn column_means(&self) -> ArrayView1<'_, f64> {
        self.column_means.view()
    }

    /// Scaling divisors; all ones when the dataset is not scaled.
    pub fn column_sds(&self) -> ArrayView1<'_, f64> {
        self.column_sds.view()
    }

    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    pub fn scaled(&self) -> bool {
        self.scaled
    }

    /// Applies this dataset's centring and scaling to new raw rows.
    pub fn transform(&self, raw: ArrayView2<f64>) -> Result<Array2<f64>> {
        if raw.ncols() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                found: raw.ncols(),
            });
        }
        let centred = &raw - &self.column_means.view().insert_axis(Axis(0));
        Ok(centred / &self.column_sds.view().insert_axis(Axis(0)))
    }

    /// Upper bound on the number of PLS components: min(n − 1, p).
    pub fn max_components(&self) -> usize {
        (self.n() - 1).min(self.p())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn two_point_example() {
        let d = standardize(array![[1.0], [3.0]].view(), array![0.0, 2.0].view()).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!((d.x()[[0, 0]] + h).abs() < 1e-15);
        assert!((d.x()[[1, 0]] - h).abs() < 1e-15);
        assert_eq!(d.y().to_vec(), vec![-1.0, 1.0]);
        assert_eq!(d.column_means()[0], 2.0);
        assert!((d.column_sds()[0] - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.y_mean(), 1.0);
    }

    #[test]
    fn standardizing_twice_is_identity() {
        let x = array![[1.0, 5.0], [2.0, -1.0], [4.0, 0.5], [-3.0, 2.0]];
        let y = array![1.0, 2.0, 3.0, 4.0];
        let once = standardize(x.view(), y.view()).unwrap();
        let twice = standardize(once.x(), y.view()).unwrap();
        for (a, b) in once.x().iter().zip(twice.x().iter()) {
            assert!((a - b).abs() < 1e-14);
        }
        for j in 0..2 {
            assert!(twice.column_means()[j].abs() < 1e-15);
            assert!((twice.column_sds()[j] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_column_is_rejected() {
        let x = array![[1.0, 2.0], [1.0, 3.0], [1.0, 4.0]];
        let err = standardize(x.view(), array![1.0, 2.0, 3.0].view()).unwrap_err();
        assert_eq!(err, Error::ZeroVarianceColumn(0));
    }

    #[test]
    fn non_finite_is_rejected() {
        let x = array![[1.0], [f64::NAN]];
        assert_eq!(
            standardize(x.view(), array![1.0, 2.0].view()).unwrap_err(),
            Error::NonFiniteInput
        );
    }

    #[test]
    fn unscaled_mode_only_centres() {
        let x = array![[1.0], [3.0], [8.0]];
        let d = Dataset::new(x, array![0.0, 1.0, 2.0], false).unwrap();
        assert_eq!(d.column_sds()[0], 1.0);
        assert_eq!(d.x()[[2, 0]], 4.0);
    }

    #[test]
    fn column_selection_matches_restandardizing() {
        let x = array![[1.0, 5.0, 2.0], [2.0, -1.0, 0.0], [4.0, 0.5, 1.0], [-3.0, 2.0, 7.0]];
        let y = array![1.0, 2.0, 3.0, 4.0];
        let d = standardize(x.view(), y.view()).unwrap();
        let sel = d.select_columns(&[2, 0]).unwrap();
        let direct = standardize(x.select(Axis(1), &[2, 0]).view(), y.view()).unwrap();
        assert_eq!(sel.x(), direct.x());
    }
}
