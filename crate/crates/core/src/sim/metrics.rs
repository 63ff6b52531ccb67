use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use ndarray::ArrayView2;

use crate::error::{invalid, Error, Result};

/// Signal-to-noise ratio `signal_variance / σ²`.
pub fn snr(signal_variance: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid("sigma must be positive"));
    }
    Ok(signal_variance / (sigma * sigma))
}

/// Share of the p include/exclude decisions that agree with the true support.
pub fn accuracy(selected: &[usize], truth: &[usize], p: usize) -> Result<f64> {
    if p == 0 {
        return Err(invalid("p must be positive"));
    }
    let mut sel = alloc::vec![false; p];
    let mut tru = alloc::vec![false; p];
    for (set, flags) in [(selected, &mut sel), (truth, &mut tru)] {
        for &j in set {
            if j >= p {
                return Err(Error::DimensionMismatch { expected: p, found: j });
            }
            flags[j] = true;
        }
    }
    let correct = sel.iter().zip(&tru).filter(|(a, b)| a == b).count();
    Ok(correct as f64 / p as f64)
}

/// Between-class over within-class sum of squares, per column. A column with zero
/// within-class spread gets +∞.
pub fn bss_wss<L: Ord + Clone>(x: ArrayView2<f64>, labels: &[L]) -> Result<Vec<f64>> {
    let (n, p) = x.dim();
    if labels.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: labels.len() });
    }
    let mut classes: BTreeMap<L, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        classes.entry(l.clone()).or_default().push(i);
    }
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let mut out = Vec::with_capacity(p);
    for j in 0..p {
        let col = x.column(j);
        let overall = col.sum() / n as f64;
        let mut bss = 0.0;
        let mut wss = 0.0;
        for rows in classes.values() {
            let m = rows.iter().map(|&i| col[i]).sum::<f64>() / rows.len() as f64;
            bss += rows.len() as f64 * (m - overall) * (m - overall);
            wss += rows.iter().map(|&i| (col[i] - m) * (col[i] - m)).sum::<f64>();
        }
        out.push(if wss > 0.0 { bss / wss } else { f64::INFINITY });
    }
    Ok(out)
}

/// Indices of the `m` largest statistics, largest first; ties keep the lower index.
pub fn top_m(stats: &[f64], m: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..stats.len()).collect();
    idx.sort_by(|&a, &b| stats[b].total_cmp(&stats[a]).then(a.cmp(&b)));
    idx.truncate(m);
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn table_two_signal_to_noise_pairs() {
        let cells = [
            (0.5, 810.603),
            (1.0, 202.651),
            (3.0, 22.517),
            (4.0, 12.666),
            (5.0, 8.106),
            (6.366, 5.000),
        ];
        for (sigma, expected) in cells {
            let got = snr(202.651, sigma).unwrap();
            assert!((got - expected).abs() / expected < 1e-3, "sigma {sigma}: {got}");
        }
        assert!(snr(1.0, 0.0).is_err());
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[1, 2], &[1, 2], 10).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 3], &[1, 2], 10).unwrap(), 0.8);
        assert_eq!(accuracy(&[2, 3], &[0, 1], 4).unwrap(), 0.0);
        assert!(accuracy(&[10], &[1], 10).is_err());
    }

    #[test]
    fn bss_wss_hand_examples() {
        let labels = ['A', 'A', 'B', 'B'];
        let r = bss_wss(array![[0.0], [0.0], [1.0], [1.0]].view(), &labels).unwrap();
        assert_eq!(r[0], f64::INFINITY);
        let r = bss_wss(array![[0.0], [1.0], [1.0], [2.0]].view(), &labels).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-15);
        assert_eq!(bss_wss(array![[0.0], [1.0]].view(), &[1, 1]).unwrap_err(), Error::SingleClass);
    }

    #[test]
    fn top_m_orders_by_statistic() {
        assert_eq!(top_m(&[0.1, f64::INFINITY, 0.5, 0.5], 3), vec![1, 2, 3]);
    }
}
