use alloc::format;
use alloc::vec::Vec;
use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::seed::{self, derive, tag, StreamRng};

/// Four hidden variables, each copied with small noise into a block of columns.
///
/// Columns `[p_{l−1}, p_l)` are noisy copies of h_l with
/// `(p_0, …, p_4) = (0, (p−q)/2, p−q, p−r, p)`. The response is
/// `3h_1 − 4h_2 + f`, so the first p − q columns are the relevant ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenGroupDesign {
    pub n: usize,
    pub p: usize,
    /// Number of spurious predictors.
    pub q: usize,
    /// Width of the last block.
    pub r: usize,
    pub snr: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct HiddenGroupSample {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    /// `3h_1 − 4h_2` without the noise term.
    pub y_noiseless: Array1<f64>,
    pub true_support: Vec<usize>,
}

fn gauss(rng: &mut StreamRng) -> f64 {
    StandardNormal.sample(rng)
}

const HIDDEN_VARIANCE: f64 = 25.0;
const COLUMN_NOISE_VARIANCE: f64 = 0.1;

impl HiddenGroupDesign {
    /// Design with q = q_ratio·p and the default last-block width
    /// (5 for p = 200, 10 for p = 1000, p/100 otherwise, at least 1), SNR 10.
    pub fn new(n: usize, p: usize, q_ratio: f64, seed: u64) -> Result<Self> {
        let qf = q_ratio * p as f64;
        let q = libm::round(qf);
        if !(q_ratio > 0.0 && q_ratio < 1.0) || (qf - q).abs() > 1e-9 {
            return Err(Error::BoundaryNotIntegral(format!("q = {qf} for q/p = {q_ratio}")));
        }
        let r = match p {
            200 => 5,
            1000 => 10,
            _ => (p / 100).max(1),
        };
        let design = Self { n, p, q: q as usize, r, snr: 10.0, seed };
        design.boundaries()?;
        Ok(design)
    }

    pub fn boundaries(&self) -> Result<[usize; 5]> {
        let Self { n, p, q, r, .. } = *self;
        if n < 2 {
            return Err(invalid("at least two observations are required"));
        }
        if q >= p || q == 0 {
            return Err(invalid("q must lie in (0, p)"));
        }
        if (p - q) % 2 != 0 {
            return Err(Error::BoundaryNotIntegral(format!("(p - q)/2 = {}/2", p - q)));
        }
        if r == 0 || r >= q {
            return Err(invalid("r must lie in (0, q)"));
        }
        if !(self.snr > 0.0) {
            return Err(invalid("snr must be positive"));
        }
        Ok([0, (p - q) / 2, p - q, p - r, p])
    }

    pub fn true_support(&self) -> Vec<usize> {
        (0..self.p - self.q).collect()
    }

    /// The same design with a different seed.
    pub fn reseeded(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }
}

pub fn gen_hidden_groups(design: &HiddenGroupDesign) -> Result<HiddenGroupSample> {
    let bounds = design.boundaries()?;
    let (n, p) = (design.n, design.p);
    let hidden_sd = libm::sqrt(HIDDEN_VARIANCE);
    let mut rng = seed::rng(derive(design.seed, &[tag::DATA]));
    let h = Array2::from_shape_fn((n, 4), |_| hidden_sd * gauss(&mut rng));
    let col_sd = libm::sqrt(COLUMN_NOISE_VARIANCE);
    let mut rng = seed::rng(derive(design.seed, &[tag::NOISE, 0]));
    let mut x = Array2::zeros((n, p));
    for l in 0..4 {
        for j in bounds[l]..bounds[l + 1] {
            for i in 0..n {
                let e: f64 = gauss(&mut rng);
                x[[i, j]] = h[[i, l]] + col_sd * e;
            }
        }
    }
    let y_noiseless = h.column(0).mapv(|v| 3.0 * v) - h.column(1).mapv(|v| 4.0 * v);
    let f_sd = libm::sqrt((9.0 + 16.0) * HIDDEN_VARIANCE / design.snr);
    let mut rng = seed::rng(derive(design.seed, &[tag::NOISE, 1]));
    let y = y_noiseless.mapv(|v| v + f_sd * gauss(&mut rng));
    Ok(HiddenGroupSample { x, y, y_noiseless, true_support: design.true_support() })
}

/// `y = X[:, support]·β + ε` with ε ~ N(0, σ²).
#[derive(Debug, Clone)]
pub struct LinearResponseDesign {
    pub x: Array2<f64>,
    pub support: Vec<usize>,
    pub beta: Vec<f64>,
    pub sigma: f64,
}

impl LinearResponseDesign {
    pub fn validate(&self) -> Result<()> {
        if self.support.len() != self.beta.len() {
            return Err(Error::DimensionMismatch { expected: self.support.len(), found: self.beta.len() });
        }
        if let Some(&bad) = self.support.iter().find(|&&j| j >= self.x.ncols()) {
            return Err(Error::DimensionMismatch { expected: self.x.ncols(), found: bad });
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(invalid("sigma must be positive"));
        }
        Ok(())
    }

    pub fn noiseless(&self) -> Array1<f64> {
        self.x.select(Axis(1), &self.support).dot(&Array1::from(self.beta.clone()))
    }
}

/// Returns `(y, y_noiseless)`.
pub fn gen_linear_response(design: &LinearResponseDesign, seed: u64) -> Result<(Array1<f64>, Array1<f64>)> {
    design.validate()?;
    let clean = design.noiseless();
    let normal = Normal::new(0.0, design.sigma).map_err(|_| invalid("sigma must be positive"))?;
    let mut rng = seed::rng(derive(seed, &[tag::NOISE]));
    let y = clean.mapv(|v| v + normal.sample(&mut rng));
    Ok((y, clean))
}

/// Sample variance (n − 1 divisor) of `X[:, support]·β`.
pub fn signal_variance(x: ArrayView2<f64>, support: &[usize], beta: &[f64]) -> f64 {
    let s = x.select(Axis(1), support).dot(&Array1::from(beta.to_vec()));
    let m = s.mean().unwrap_or(0.0);
    s.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (s.len().max(2) - 1) as f64
}

/// Planted predictors of the surrogate expression matrix.
pub const SURROGATE_SUPPORT: [usize; 4] = [0, 11, 14, 58];
pub const SURROGATE_BETA: [f64; 4] = [3.559, 2.071, 1.440, 1.770];
/// Population variance of the planted signal in the surrogate.
pub const SURROGATE_SIGNAL_VARIANCE: f64 = 202.651;
const SURROGATE_P: usize = 100;
const SURROGATE_FACTORS: usize = 6;
const SUPPORT_LOADING: f64 = 0.9;
/// Fixed seed for the correlation structure, which must not vary between draws.
const STRUCTURE_SEED: u64 = 0x5355_5252;

struct SurrogateColumn {
    factor: usize,
    loading: f64,
    sd: f64,
    mean: f64,
}

fn surrogate_structure() -> Vec<SurrogateColumn> {
    // Support columns share factor 0 with correlation 0.81 and a common sd chosen
    // so that Var(X_sel β) equals SURROGATE_SIGNAL_VARIANCE.
    let sum_sq: f64 = SURROGATE_BETA.iter().map(|b| b * b).sum();
    let total: f64 = SURROGATE_BETA.iter().sum();
    let rho = SUPPORT_LOADING * SUPPORT_LOADING;
    let support_sd = libm::sqrt(SURROGATE_SIGNAL_VARIANCE / (sum_sq + rho * (total * total - sum_sq)));
    let mut rng = seed::rng(STRUCTURE_SEED);
    (0..SURROGATE_P)
        .map(|j| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            let m: f64 = rng.random();
            if SURROGATE_SUPPORT.contains(&j) {
                SurrogateColumn { factor: 0, loading: SUPPORT_LOADING, sd: support_sd, mean: 5.0 + 5.0 * m }
            } else {
                // A quarter of the other columns load on the support's factor and act
                // as correlated decoys.
                let factor = if j % 4 == 0 { 0 } else { 1 + j % (SURROGATE_FACTORS - 1) };
                SurrogateColumn { factor, loading: 0.9 + 0.08 * u, sd: 0.8 + 1.2 * v, mean: 5.0 + 5.0 * m }
            }
        })
        .collect()
}

/// Synthetic stand-in for a 100-column expression matrix: correlated Gaussian blocks
/// driven by a few latent factors. Support columns [`SURROGATE_SUPPORT`] are
/// positively correlated and scaled so that [`SURROGATE_BETA`] yields a population
/// signal variance of [`SURROGATE_SIGNAL_VARIANCE`].
pub fn surrogate_predictors(n: usize, seed: u64) -> Result<Array2<f64>> {
    if n < 2 {
        return Err(invalid("at least two observations are required"));
    }
    let cols = surrogate_structure();
    let mut rng = seed::rng(derive(seed, &[tag::DATA]));
    let factors = Array2::from_shape_fn((n, SURROGATE_FACTORS), |_| gauss(&mut rng));
    let mut x = Array2::zeros((n, SURROGATE_P));
    for i in 0..n {
        for (j, c) in cols.iter().enumerate() {
            let e: f64 = gauss(&mut rng);
            let unique = libm::sqrt(1.0 - c.loading * c.loading);
            x[[i, j]] = c.mean + c.sd * (c.loading * factors[[i, c.factor]] + unique * e);
        }
    }
    Ok(x)
}

/// Independent standard normal predictors.
pub fn gaussian_predictors(n: usize, p: usize, seed: u64) -> Array2<f64> {
    let mut rng = seed::rng(derive(seed, &[tag::DATA]));
    Array2::from_shape_fn((n, p), |_| gauss(&mut rng))
}

/// 0/1 responses with `P(y = 1) = logistic(X[:, support]·β)`.
pub fn gen_logistic_response(x: ArrayView2<f64>, support: &[usize], beta: &[f64], seed: u64) -> Result<Array1<f64>> {
    if support.len() != beta.len() {
        return Err(Error::DimensionMismatch { expected: support.len(), found: beta.len() });
    }
    if let Some(&bad) = support.iter().find(|&&j| j >= x.ncols()) {
        return Err(Error::DimensionMismatch { expected: x.ncols(), found: bad });
    }
    let eta = x.select(Axis(1), support).dot(&Array1::from(beta.to_vec()));
    let mut rng = seed::rng(derive(seed, &[tag::NOISE]));
    Ok(eta.mapv(|e| {
        let u: f64 = rng.random();
        if u < crate::glm::sigmoid(e) { 1.0 } else { 0.0 }
    }))
}
