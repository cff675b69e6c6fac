//! Small descriptive and rank statistics used for fitness aggregation and
//! batch comparisons.

use statrs::function::erf::erfc;

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample (n - 1) standard deviation.
pub fn sample_sd(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Mid-ranks (1-based), ties sharing their average rank.
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let mx = mean(xs)?;
    let my = mean(ys)?;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation; `None` if either side is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    pearson(&ranks(xs), &ranks(ys))
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// One-sided Mann-Whitney U test of the alternative "`xs` tends to be
/// smaller than `ys`". Normal approximation with tie correction and
/// continuity correction. Returns `(U_x, p)`.
pub fn mann_whitney_less(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n1 = xs.len() as f64;
    let n2 = ys.len() as f64;
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let r = ranks(&pooled);
    let r1: f64 = r[..xs.len()].iter().sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;
    let mu = n1 * n2 / 2.0;

    let n = n1 + n2;
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return (u1, 1.0);
    }
    // Small U supports xs < ys.
    let z = (u1 - mu + 0.5) / var.sqrt();
    (u1, normal_cdf(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptive() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
        let sd = sample_sd(&[100.0, 300.0]).unwrap();
        assert!((sd - 141.421_356_237_309_5).abs() < 1e-9);
        assert_eq!(sample_sd(&[1.0]), None);
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn spearman_signs() {
        let x = [0.55, 0.6, 0.7, 0.8];
        assert_eq!(spearman(&x, &[4.0, 3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&x, &[1.0, 2.0, 3.0, 9.0]), Some(1.0));
        assert_eq!(spearman(&x, &[1.0, 1.0, 1.0, 1.0]), None);
    }

    #[test]
    fn mann_whitney_against_exact_enumeration() {
        // Exact one-sided p for small samples by enumerating all splits.
        let xs = [1.0, 2.0, 4.0, 5.0];
        let ys = [3.0, 6.0, 7.0, 8.0, 9.0];
        let (u, p) = mann_whitney_less(&xs, &ys);
        assert_eq!(u, 2.0);
        let pooled: Vec<f64> = xs.iter().chain(&ys).copied().collect();
        let n = pooled.len();
        let (mut le, mut total) = (0u32, 0u32);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != xs.len() {
                continue;
            }
            let rank_sum: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks(&pooled)[i]).sum();
            let u_perm = rank_sum - 10.0;
            total += 1;
            if u_perm <= u {
                le += 1;
            }
        }
        let exact = f64::from(le) / f64::from(total);
        assert!((p - exact).abs() < 0.03, "normal approx {p} vs exact {exact}");

        let small: Vec<f64> = (0..50).map(f64::from).collect();
        let large: Vec<f64> = (100..150).map(f64::from).collect();
        assert!(mann_whitney_less(&small, &large).1 < 1e-10);
        assert!(mann_whitney_less(&large, &small).1 > 0.999);
    }
}
