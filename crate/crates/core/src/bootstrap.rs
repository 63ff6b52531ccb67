//! Pairs resampling, replicate collection and bootstrap confidence intervals.
//!
//! Quantiles use linear interpolation between order statistics at position
//! `(m − 1)·q` (zero based) of the `m` finite replicates. For the BCa interval the
//! bias constant is `z0 = Φ⁻¹(#{θ* < θ̂} + ½#{θ* = θ̂}) / m)` with the count clamped to
//! `[1, m − 1]`, and the acceleration comes from jackknife skewness
//! `a = Σ(θ̄ − θ₍ᵢ₎)³ / (6 [Σ(θ̄ − θ₍ᵢ₎)²]^{3/2})`.

use alloc::vec::Vec;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::normal;
use crate::par::map_indexed;
use crate::seed::{self, tag};

/// Smallest number of finite replicates accepted when R ≥ 50.
pub const MIN_FINITE_REPLICATES: usize = 50;

/// Row indices for R bootstrap replicates of n paired observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResamplePlan {
    n: usize,
    seed: u64,
    indices: Vec<usize>,
}

/// Draws R resamples of `0..n` with replacement. Replicate `r` depends only on
/// `(seed, r)`.
pub fn resample_pairs(n: usize, replicates: usize, seed: u64) -> Result<ResamplePlan> {
    if n < 2 {
        return Err(invalid("resampling needs at least two observations"));
    }
    if replicates == 0 {
        return Err(invalid("at least one bootstrap replicate is required"));
    }
    let mut indices = Vec::with_capacity(n * replicates);
    for r in 0..replicates {
        let mut rng = seed::rng(seed::derive(seed, &[tag::RESAMPLE, r as u64]));
        let bound = u32::try_from(n).map_err(|_| invalid("too many observations"))?;
        indices.extend((0..n).map(|_| rng.random_range(0..bound) as usize));
    }
    Ok(ResamplePlan { n, seed, indices })
}

impl ResamplePlan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn replicates(&self) -> usize {
        self.indices.len() / self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.indices[r * self.n..(r + 1) * self.n]
    }

    /// Evaluates a vector statistic on every replicate, in replicate order.
    /// `None` marks a failed replicate.
    pub fn evaluate<F>(&self, statistic: F) -> Vec<Option<Vec<f64>>>
    where
        F: Fn(usize, &[usize]) -> Option<Vec<f64>> + Sync + Send,
    {
        map_indexed(self.replicates(), |r| statistic(r, self.row(r)))
    }
}

/// Evaluates a vector statistic on each leave-one-out subsample of `0..n`.
pub fn jackknife<F>(n: usize, statistic: F) -> Vec<Option<Vec<f64>>>
where
    F: Fn(&[usize]) -> Option<Vec<f64>> + Sync + Send,
{
    map_indexed(n, |i| {
        let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
        statistic(&rows)
    })
}

/// How the BCa acceleration constant is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Acceleration {
    /// Jackknife skewness of the statistic.
    #[default]
    Jackknife,
    /// a = 0 (bias correction only).
    Zero,
}

/// Replicates of a scalar statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapDistribution {
    /// One entry per replicate; non-finite entries are excluded from intervals.
    pub replicates: Vec<f64>,
    /// Value on the original sample.
    pub original: f64,
    /// Leave-one-out values, when available.
    pub jackknife: Option<Vec<f64>>,
}

impl BootstrapDistribution {
    pub fn new(replicates: Vec<f64>, original: f64) -> Self {
        Self {
            replicates,
            original,
            jackknife: None,
        }
    }

    pub fn with_jackknife(mut self, jackknife: Vec<f64>) -> Self {
        self.jackknife = Some(jackknife);
        self
    }

    pub fn finite_count(&self) -> usize {
        self.replicates.iter().filter(|v| v.is_finite()).count()
    }

    /// Finite replicates needed before an interval is built:
    /// `max(50, ⌈R/2⌉)`, capped at R.
    pub fn required_finite(&self) -> usize {
        let r = self.replicates.len();
        MIN_FINITE_REPLICATES.max(r.div_ceil(2)).min(r).max(1)
    }

    fn sorted_finite(&self) -> Result<Vec<f64>> {
        let finite = self.finite_count();
        let required = self.required_finite();
        if finite < required || self.replicates.is_empty() {
            return Err(Error::TooFewReplicates { finite, required });
        }
        let mut v: Vec<f64> = self.replicates.iter().copied().filter(|v| v.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        Ok(v)
    }
}

/// Interval construction actually used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalMethod {
    Bca,
    /// BCa without a jackknife: bias correction only.
    BcaZeroAcceleration,
    Percentile,
}

impl IntervalMethod {
    pub fn label(self) -> &'static str {
        match self {
            Self::Bca => "BCa",
            Self::BcaZeroAcceleration => "BCa(a=0)",
            Self::Percentile => "percentile",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
    /// Coverage level 1 − α.
    pub level: f64,
    pub method: IntervalMethod,
    pub z0: Option<f64>,
    pub acceleration: Option<f64>,
    /// The below-original count was clamped into [1, m − 1] before Φ⁻¹.
    pub z0_clamped: bool,
}

impl ConfidenceInterval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn excludes_zero(&self) -> bool {
        !self.contains(0.0)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid("alpha must lie in (0, 1)"))
    }
}

/// Empirical quantile of sorted data with linear interpolation at `(m − 1)·q`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let m = sorted.len();
    debug_assert!(m > 0);
    let q = q.clamp(0.0, 1.0);
    let h = (m - 1) as f64 * q;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(m - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Equal-tailed percentile interval.
pub fn percentile_interval(dist: &BootstrapDistribution, alpha: f64) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    let sorted = dist.sorted_finite()?;
    Ok(ConfidenceInterval {
        lo: quantile(&sorted, alpha / 2.0),
        hi: quantile(&sorted, 1.0 - alpha / 2.0),
        level: 1.0 - alpha,
        method: IntervalMethod::Percentile,
        z0: None,
        acceleration: None,
        z0_clamped: false,
    })
}

fn jackknife_acceleration(values: &[f64]) -> Option<f64> {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.len() < 2 {
        return None;
    }
    let mean = finite.iter().sum::<f64>() / finite.len() as f64;
    let (mut s2, mut s3) = (0.0, 0.0);
    for v in &finite {
        let d = mean - v;
        s2 += d * d;
        s3 += d * d * d;
    }
    let denom = 6.0 * libm::pow(s2, 1.5);
    if !(denom > 0.0) || !denom.is_finite() {
        return None;
    }
    Some(s3 / denom)
}

/// Bias-corrected and accelerated interval.
///
/// Without a jackknife the acceleration is 0 (`BcaZeroAcceleration`); with a
/// jackknife whose spread is zero the acceleration is undefined and the plain
/// percentile interval is returned.
pub fn bca_interval(dist: &BootstrapDistribution, alpha: f64) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    let sorted = dist.sorted_finite()?;
    let (acceleration, method) = match &dist.jackknife {
        None => (0.0, IntervalMethod::BcaZeroAcceleration),
        Some(jack) => match jackknife_acceleration(jack) {
            Some(a) => (a, IntervalMethod::Bca),
            None => return percentile_interval(dist, alpha),
        },
    };

    let m = sorted.len() as f64;
    let below = sorted.iter().filter(|&&v| v < dist.original).count() as f64;
    let ties = sorted.iter().filter(|&&v| v == dist.original).count() as f64;
    let raw = below + 0.5 * ties;
    let count = raw.clamp(1.0, m - 1.0);
    let z0_clamped = count != raw;
    let z0 = if m < 2.0 { 0.0 } else { normal::quantile(count / m) };

    let (lo_level, hi_level) = if z0 == 0.0 && acceleration == 0.0 {
        (alpha / 2.0, 1.0 - alpha / 2.0)
    } else {
        let adjust = |z: f64| {
            let num = z0 + z;
            normal::cdf(z0 + num / (1.0 - acceleration * num))
        };
        (
            adjust(normal::quantile(alpha / 2.0)),
            adjust(normal::quantile(1.0 - alpha / 2.0)),
        )
    };
    let (lo, hi) = (quantile(&sorted, lo_level), quantile(&sorted, hi_level));
    Ok(ConfidenceInterval {
        lo: lo.min(hi),
        hi: hi.max(lo),
        level: 1.0 - alpha,
        method,
        z0: Some(z0),
        acceleration: Some(acceleration),
        z0_clamped,
    })
}

/// Replicates of a p-dimensional statistic, sliced into per-coordinate distributions.
#[derive(Debug, Clone)]
pub struct VectorReplicates {
    pub original: Vec<f64>,
    pub replicates: Vec<Option<Vec<f64>>>,
    pub jackknife: Option<Vec<Option<Vec<f64>>>>,
}

impl VectorReplicates {
    pub fn dim(&self) -> usize {
        self.original.len()
    }

    /// Replicates that produced a value.
    pub fn valid_count(&self) -> usize {
        self.replicates.iter().filter(|r| r.is_some()).count()
    }

    pub fn distribution(&self, j: usize) -> BootstrapDistribution {
        let pick = |r: &Option<Vec<f64>>| r.as_ref().and_then(|v| v.get(j).copied()).unwrap_or(f64::NAN);
        let dist = BootstrapDistribution::new(
            self.replicates.iter().map(pick).collect(),
            self.original[j],
        );
        match &self.jackknife {
            Some(jack) => dist.with_jackknife(jack.iter().map(pick).collect()),
            None => dist,
        }
    }

    /// One interval per coordinate.
    pub fn intervals(&self, alpha: f64) -> Result<Vec<ConfidenceInterval>> {
        (0..self.dim())
            .map(|j| bca_interval(&self.distribution(j), alpha))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn one_to(n: usize) -> Vec<f64> {
        (1..=n).map(|v| v as f64).collect()
    }

    #[test]
    fn plans_are_reproducible() {
        let a = resample_pairs(30, 20, 5).unwrap();
        let b = resample_pairs(30, 20, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, resample_pairs(30, 20, 6).unwrap());
        // Replicate r depends only on (seed, r).
        let short = resample_pairs(30, 3, 5).unwrap();
        assert_eq!(short.row(2), a.row(2));
    }

    #[test]
    fn single_observation_is_rejected() {
        assert!(resample_pairs(1, 10, 0).is_err());
        assert!(resample_pairs(5, 0, 0).is_err());
    }

    #[test]
    fn index_frequency_within_binomial_band() {
        let (n, r) = (20usize, 2000usize);
        let plan = resample_pairs(n, r, 11).unwrap();
        let draws = (n * r) as f64;
        let hits = (0..r).flat_map(|i| plan.row(i).iter()).filter(|&&i| i == 0).count() as f64;
        let p = 1.0 / n as f64;
        let sd = libm::sqrt(draws * p * (1.0 - p));
        assert!((hits - draws * p).abs() <= 3.0 * sd, "hits = {hits}");
    }

    #[test]
    fn percentile_hand_values() {
        let d = BootstrapDistribution::new(vec![3.0, 1.0, 2.0], 2.0);
        let ci = percentile_interval(&d, 0.5).unwrap();
        assert_eq!((ci.lo, ci.hi), (1.5, 2.5));
        let c = BootstrapDistribution::new(vec![4.2; 60], 4.2);
        let ci = percentile_interval(&c, 0.05).unwrap();
        assert_eq!((ci.lo, ci.hi), (4.2, 4.2));
    }

    #[test]
    fn thousand_uniform_replicates() {
        let jack = vec![1.0; 10].into_iter().chain(vec![-1.0; 10]).collect();
        let d = BootstrapDistribution::new(one_to(1000), 500.5).with_jackknife(jack);
        let p = percentile_interval(&d, 0.05).unwrap();
        assert!((p.lo - 25.975).abs() < 1e-9 && (p.hi - 975.025).abs() < 1e-9);
        let b = bca_interval(&d, 0.05).unwrap();
        assert_eq!(b.method, IntervalMethod::Bca);
        assert_eq!(b.z0, Some(0.0));
        assert_eq!(b.acceleration, Some(0.0));
        assert_eq!((b.lo, b.hi), (p.lo, p.hi));
    }

    #[test]
    fn symmetric_odd_sample_has_no_bias() {
        let d = BootstrapDistribution::new(one_to(101), 51.0)
            .with_jackknife(vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        let b = bca_interval(&d, 0.1).unwrap();
        let p = percentile_interval(&d, 0.1).unwrap();
        assert_eq!(b.z0, Some(0.0));
        assert_eq!((b.lo, b.hi), (p.lo, p.hi));
    }

    #[test]
    fn all_above_original_is_clamped() {
        let d = BootstrapDistribution::new(one_to(100), 0.0);
        let b = bca_interval(&d, 0.05).unwrap();
        assert!(b.z0_clamped);
        assert!(b.z0.unwrap().is_finite() && b.z0.unwrap() < 0.0);
        assert_eq!(b.method, IntervalMethod::BcaZeroAcceleration);
    }

    #[test]
    fn flat_jackknife_falls_back_to_percentile() {
        let d = BootstrapDistribution::new(one_to(100), 30.0).with_jackknife(vec![1.0; 8]);
        assert_eq!(bca_interval(&d, 0.05).unwrap().method, IntervalMethod::Percentile);
    }

    #[test]
    fn too_few_finite_replicates() {
        let mut v = one_to(100);
        for x in v.iter_mut().take(51) {
            *x = f64::NAN;
        }
        let d = BootstrapDistribution::new(v, 50.0);
        assert_eq!(
            bca_interval(&d, 0.05).unwrap_err(),
            Error::TooFewReplicates { finite: 49, required: 50 }
        );
        let mut big = one_to(400);
        big[..150].iter_mut().for_each(|x| *x = f64::INFINITY);
        let d = BootstrapDistribution::new(big, 200.0);
        assert!(bca_interval(&d, 0.05).is_ok());
    }

    #[test]
    fn interval_shrinks_as_alpha_grows() {
        let d = BootstrapDistribution::new(one_to(201), 101.0);
        let wide = percentile_interval(&d, 0.05).unwrap();
        let narrow = percentile_interval(&d, 0.999).unwrap();
        assert!(narrow.lo > wide.lo && narrow.hi < wide.hi);
        assert!((narrow.lo - 101.0).abs() < 0.2 && (narrow.hi - 101.0).abs() < 0.2);
    }

    fn skewed(seed: u64, m: usize) -> BootstrapDistribution {
        let mut rng = seed::rng(seed);
        let reps: Vec<f64> = (0..m)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                libm::exp(0.5 * z)
            })
            .collect();
        let jack: Vec<f64> = (0..25)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                libm::exp(0.05 * z)
            })
            .collect();
        BootstrapDistribution::new(reps, 1.1).with_jackknife(jack)
    }

    proptest! {
        #[test]
        fn intervals_nest(seed in 0u64..5000, a1 in 0.01f64..0.5, gap in 0.01f64..0.4) {
            let d = skewed(seed, 300);
            let a2 = (a1 + gap).min(0.99);
            let wide = bca_interval(&d, a1).unwrap();
            let narrow = bca_interval(&d, a2).unwrap();
            prop_assert!(wide.lo <= narrow.lo && narrow.hi <= wide.hi);
            let wide = percentile_interval(&d, a1).unwrap();
            let narrow = percentile_interval(&d, a2).unwrap();
            prop_assert!(wide.lo <= narrow.lo && narrow.hi <= wide.hi);
        }

        #[test]
        fn translation_equivariance(seed in 0u64..5000, shift in -1e3f64..1e3) {
            let d = skewed(seed, 200);
            let moved = BootstrapDistribution {
                replicates: d.replicates.iter().map(|v| v + shift).collect(),
                original: d.original + shift,
                jackknife: d.jackknife.as_ref().map(|j| j.iter().map(|v| v + shift).collect()),
            };
            let a = bca_interval(&d, 0.05).unwrap();
            let b = bca_interval(&moved, 0.05).unwrap();
            let tol = 1e-9 * (1.0 + shift.abs());
            prop_assert!((a.lo + shift - b.lo).abs() < tol);
            prop_assert!((a.hi + shift - b.hi).abs() < tol);
        }
    }
}
