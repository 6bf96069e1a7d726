//! Confidence intervals and the goodness-of-fit, monotonicity and
//! independence tests used by the Monte Carlo experiments.
//!
//! Conventions: intervals are two-sided at the requested level (0.95 unless
//! stated); "within 3σ" means |z| < 3 under the report's variance method.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Normal, Poisson};

use crate::error::{Error, Result};
use crate::rng::{stream, Tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    Wilson,
    Normal,
    Delta,
}

/// Point estimate with interval, sample size and seed provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Standard error used for z-scores (normal approximation).
    pub std_error: f64,
    pub n: u64,
    pub method: CiMethod,
    pub seed_hash: String,
}

impl EstimatorReport {
    pub fn with_seeds(mut self, seeds: &[u64]) -> Self {
        self.seed_hash = seed_set_hash(seeds);
        self
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }
}

/// Hex digest identifying a set of seeds (order-insensitive).
pub fn seed_set_hash(seeds: &[u64]) -> String {
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    let mut h = Sha256::new();
    for s in sorted {
        h.update(s.to_le_bytes());
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).unwrap()
}

/// Two-sided normal quantile for a confidence level, e.g. 1.95996 for 0.95.
pub fn z_for_level(level: f64) -> f64 {
    standard_normal().inverse_cdf(0.5 + level / 2.0)
}

/// Upper tail probability of the standard normal.
pub fn normal_sf(z: f64) -> f64 {
    1.0 - standard_normal().cdf(z)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, n: u64, level: f64) -> EstimatorReport {
    assert!(n >= 1 && successes <= n, "wilson interval needs 0 <= k <= n, n >= 1");
    let z = z_for_level(level);
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    EstimatorReport {
        estimate: p,
        ci_low: (centre - half).max(0.0).min(p),
        ci_high: (centre + half).min(1.0).max(p),
        std_error: (p * (1.0 - p) / nf).sqrt(),
        n,
        method: CiMethod::Wilson,
        seed_hash: String::new(),
    }
}

/// Sample mean with a normal-approximation interval.
pub fn mean_interval(values: &[f64], level: f64) -> EstimatorReport {
    let n = values.len();
    assert!(n >= 1, "mean interval needs at least one value");
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    let se = (var / nf).sqrt();
    let z = z_for_level(level);
    EstimatorReport {
        estimate: mean,
        ci_low: mean - z * se,
        ci_high: mean + z * se,
        std_error: se,
        n: n as u64,
        method: CiMethod::Normal,
        seed_hash: String::new(),
    }
}

/// z-score of the difference between two independent estimates.
pub fn difference_z(a: &EstimatorReport, b: &EstimatorReport) -> f64 {
    let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    if se == 0.0 {
        if a.estimate == b.estimate {
            0.0
        } else {
            f64::INFINITY.copysign(a.estimate - b.estimate)
        }
    } else {
        (a.estimate - b.estimate) / se
    }
}

/// Result of a hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub binning: String,
}

/// Pearson chi-square of integer counts against Poisson(mean). Bins are
/// merged from the left and the right tail is pooled so that every expected
/// bin count is at least 5.
pub fn poisson_gof(counts: &[u64], mean: f64) -> Result<GofReport> {
    if !(mean > 0.0) {
        return Err(Error::InvalidParameter(format!("poisson mean {mean} must be positive")));
    }
    let n = counts.len() as f64;
    let law = Poisson::new(mean).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let max_obs = counts.iter().copied().max().unwrap_or(0);
    // bins as [lo, hi) with the final bin open to infinity
    let mut edges: Vec<u64> = vec![0];
    let mut expected: Vec<f64> = Vec::new();
    let mut acc = 0.0;
    let mut used = 0.0;
    let mut k = 0u64;
    loop {
        let pk = law.pmf(k);
        acc += n * pk;
        used += pk;
        k += 1;
        let remaining = n * (1.0 - used).max(0.0);
        if acc >= 5.0 && remaining >= 5.0 {
            expected.push(acc);
            edges.push(k);
            acc = 0.0;
        } else if remaining < 5.0 && (k > max_obs || remaining < 1e-12 * n.max(1.0)) {
            break;
        }
    }
    // pooled tail: everything from the last edge upward
    let tail = n - expected.iter().sum::<f64>();
    expected.push(tail);
    if expected.len() >= 2 && *expected.last().unwrap() < 5.0 {
        let t = expected.pop().unwrap();
        *expected.last_mut().unwrap() += t;
        edges.pop();
    }
    if expected.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "only {} bin(s) with expected count >= 5",
            expected.len()
        )));
    }
    let mut observed = vec![0f64; expected.len()];
    for &c in counts {
        let bin = edges.partition_point(|&e| e <= c) - 1;
        observed[bin.min(expected.len() - 1)] += 1.0;
    }
    let statistic: f64 =
        observed.iter().zip(&expected).map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = expected.len() - 1;
    let p_value = chi_square_sf(statistic, dof);
    let binning = edges.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",") + ",inf";
    Ok(GofReport { statistic, dof, p_value, binning })
}

/// Upper tail of the chi-square distribution.
pub fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    let d = ChiSquared::new(dof as f64).expect("positive dof");
    (1.0 - d.cdf(statistic)).clamp(0.0, 1.0)
}

/// Chi-square test of observed counts against expected probabilities.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<GofReport> {
    if observed.len() != probs.len() || observed.len() < 2 {
        return Err(Error::InsufficientData("need at least two matching bins".into()));
    }
    let n: u64 = observed.iter().sum();
    let statistic = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = n as f64 * p;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = observed.len() - 1;
    Ok(GofReport {
        statistic,
        dof,
        p_value: chi_square_sf(statistic, dof),
        binning: format!("{} categories", observed.len()),
    })
}

/// Chi-square test that two count samples come from the same law, on
/// integer bins 0..k with the tail pooled.
pub fn two_sample_count_test(a: &[u64], b: &[u64]) -> Result<GofReport> {
    let max = a.iter().chain(b).copied().max().unwrap_or(0) as usize;
    let mut ha = vec![0f64; max + 1];
    let mut hb = vec![0f64; max + 1];
    for &x in a {
        ha[x as usize] += 1.0;
    }
    for &x in b {
        hb[x as usize] += 1.0;
    }
    // pool bins until each pooled column has at least 10 observations
    let mut cols: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    for k in 0..=max {
        cur.0 += ha[k];
        cur.1 += hb[k];
        if cur.0 + cur.1 >= 10.0 {
            cols.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if cur.0 + cur.1 > 0.0 {
        match cols.last_mut() {
            Some(last) => {
                last.0 += cur.0;
                last.1 += cur.1;
            }
            None => cols.push(cur),
        }
    }
    if cols.len() < 2 {
        return Err(Error::InsufficientData("fewer than two pooled bins".into()));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    let mut statistic = 0.0;
    for &(x, y) in &cols {
        let col = x + y;
        let ea = na * col / total;
        let eb = nb * col / total;
        statistic += (x - ea).powi(2) / ea + (y - eb).powi(2) / eb;
    }
    let dof = cols.len() - 1;
    Ok(GofReport {
        statistic,
        dof,
        p_value: chi_square_sf(statistic, dof),
        binning: format!("{} pooled bins", cols.len()),
    })
}

/// Average ranks (1-based); ties share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        None
    } else {
        Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
    }
}

fn factorial_at_most(n: usize, cap: usize) -> bool {
    let mut f = 1usize;
    for k in 2..=n {
        f = match f.checked_mul(k) {
            Some(v) if v <= cap => v,
            _ => return false,
        };
    }
    true
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Spearman rank correlation with a one-sided permutation p-value for the
/// decreasing alternative. When n! does not exceed `permutations` the null
/// distribution is enumerated exactly; otherwise `permutations` shuffles are
/// drawn from the stream keyed by `seed` and p = (1 + #{ρ* ≤ ρ})/(1 + B).
/// Ties use average ranks; constant `ys` gives ρ = 0 and p = 1.
pub fn spearman_monotone(xs: &[f64], ys: &[f64], permutations: usize, seed: u64) -> Result<GofReport> {
    if xs.len() != ys.len() || xs.len() < 4 {
        return Err(Error::InsufficientData(format!("need >= 4 paired points, got {}", xs.len())));
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let Some(rho) = pearson(&rx, &ry) else {
        return Ok(GofReport { statistic: 0.0, dof: xs.len(), p_value: 1.0, binning: "constant input".into() });
    };
    let tol = 1e-12;
    let n = xs.len();
    let (p_value, binning) = if factorial_at_most(n, permutations.max(1)) {
        let mut perm: Vec<usize> = (0..n).collect();
        let (mut hits, mut total) = (0u64, 0u64);
        loop {
            let permuted: Vec<f64> = perm.iter().map(|&i| ry[i]).collect();
            let r = pearson(&rx, &permuted).unwrap_or(0.0);
            if r <= rho + tol {
                hits += 1;
            }
            total += 1;
            if !next_permutation(&mut perm) {
                break;
            }
        }
        (hits as f64 / total as f64, format!("exact enumeration of {total} permutations"))
    } else {
        let mut rng = stream(seed, Tag::Permutation, n as u64, 0, 0);
        let mut permuted = ry.clone();
        let mut hits = 0u64;
        for _ in 0..permutations {
            permuted.shuffle(&mut rng);
            if pearson(&rx, &permuted).unwrap_or(0.0) <= rho + tol {
                hits += 1;
            }
        }
        (
            (1 + hits) as f64 / (1 + permutations) as f64,
            format!("{permutations} random permutations"),
        )
    };
    Ok(GofReport { statistic: rho, dof: n, p_value, binning })
}

/// Pearson correlation with a two-sided Fisher-z p-value.
pub fn independence_corr(xs: &[f64], ys: &[f64]) -> Result<GofReport> {
    if xs.len() != ys.len() || xs.len() < 30 {
        return Err(Error::InsufficientData(format!("need >= 30 pairs, got {}", xs.len())));
    }
    let r = pearson(xs, ys).ok_or(Error::ZeroVariance)?;
    let n = xs.len();
    let z = r.atanh() * ((n - 3) as f64).sqrt();
    let p_value = if z.is_finite() { (2.0 * normal_sf(z.abs())).min(1.0) } else { 0.0 };
    Ok(GofReport { statistic: r, dof: n - 3, p_value, binning: "fisher-z".into() })
}

/// Kolmogorov–Smirnov test of uniformity on [0, 1] (asymptotic p-value).
pub fn ks_uniform(values: &[f64]) -> GofReport {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len() as f64;
    let d = v
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max);
    let sn = n.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    GofReport { statistic: d, dof: v.len(), p_value: p.clamp(0.0, 1.0), binning: "ks-uniform".into() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::Distribution;

    #[test]
    fn wilson_examples() {
        let r = wilson_interval(0, 100, 0.95);
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.ci_low, 0.0);
        // z² / (n + z²) with z = 1.959964
        assert!((r.ci_high - 0.036994).abs() < 1e-5, "{}", r.ci_high);
        let m = wilson_interval(50, 100, 0.95);
        assert!(((m.ci_low + m.ci_high) / 2.0 - 0.5).abs() < 1e-12);
        let f = wilson_interval(100, 100, 0.95);
        assert!((f.ci_low - (1.0 - 0.036994)).abs() < 1e-5);
        assert_eq!(f.ci_high, 1.0);
    }

    #[test]
    fn poisson_gof_examples() {
        let zeros = vec![0u64; 100];
        let r = poisson_gof(&zeros, 5.0).unwrap();
        assert!(r.p_value < 1e-6);
        assert!(matches!(poisson_gof(&[3], 5.0), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn poisson_gof_null_is_uniform() {
        let mut ps = Vec::new();
        for run in 0..1000u64 {
            let mut rng = stream(run, Tag::Pilot, 1, 0, 0);
            let law = rand_distr::Poisson::new(12.0).unwrap();
            let counts: Vec<u64> = (0..500).map(|_| law.sample(&mut rng) as u64).collect();
            ps.push(poisson_gof(&counts, 12.0).unwrap().p_value);
        }
        assert!(ks_uniform(&ps).p_value > 0.01, "{:?}", ks_uniform(&ps));
    }

    #[test]
    fn spearman_examples() {
        let xs: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let down: Vec<f64> = xs.iter().map(|x| -x).collect();
        let r = spearman_monotone(&xs, &down, 10_000, 1).unwrap();
        assert_eq!(r.statistic, -1.0);
        assert!(r.p_value <= 1.0 / 10_000.0);
        let flat = vec![0.3; 12];
        let r = spearman_monotone(&xs, &flat, 10_000, 1).unwrap();
        assert_eq!(r.statistic, 0.0);
        // six points: exact enumeration, 1/720
        let six: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let r = spearman_monotone(&six, &[6.0, 5.0, 4.0, 3.0, 2.0, 1.0], 10_000, 1).unwrap();
        assert!((r.p_value - 1.0 / 720.0).abs() < 1e-12);
        assert!(spearman_monotone(&six[..3], &six[..3], 100, 1).is_err());
    }

    #[test]
    fn spearman_null_is_roughly_uniform() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let mut ps = Vec::new();
        for seed in 0..300u64 {
            let mut rng = stream(seed, Tag::Pilot, 2, 0, 0);
            let ys: Vec<f64> = (0..10).map(|_| rng.gen::<f64>()).collect();
            ps.push(spearman_monotone(&xs, &ys, 2000, seed).unwrap().p_value);
        }
        assert!(ks_uniform(&ps).p_value > 0.01);
    }

    #[test]
    fn independence_examples() {
        let xs: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        assert!(independence_corr(&xs, &xs).unwrap().p_value < 1e-6);
        assert_eq!(independence_corr(&[1.0; 40], &xs[..40]), Err(Error::ZeroVariance));
        assert!(independence_corr(&xs[..10], &xs[..10]).is_err());
        let mut ps = Vec::new();
        for seed in 0..400u64 {
            let mut a = stream(seed, Tag::Pilot, 3, 0, 0);
            let mut b = stream(seed, Tag::Pilot, 4, 0, 0);
            let x: Vec<f64> = (0..60).map(|_| a.gen::<f64>()).collect();
            let y: Vec<f64> = (0..60).map(|_| b.gen::<f64>()).collect();
            ps.push(independence_corr(&x, &y).unwrap().p_value);
        }
        assert!(ks_uniform(&ps).p_value > 0.01);
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn seed_hash_is_order_free() {
        assert_eq!(seed_set_hash(&[1, 2, 3]), seed_set_hash(&[3, 1, 2]));
        assert_ne!(seed_set_hash(&[1, 2, 3]), seed_set_hash(&[1, 2, 4]));
    }
}
