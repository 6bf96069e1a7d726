use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;

use crate::error::{Error, Result};

fn check_length(len: u32) -> Result<()> {
    if len == 0 || !len.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "loop length must be even and positive, got {len}"
        )));
    }
    Ok(())
}

/// Exact probability that a planar simple random walk is back at its start
/// after `len` steps: C(len, len/2)² / 4^len.
pub fn return_probability_exact(len: u32) -> Result<BigRational> {
    check_length(len)?;
    let n = len / 2;
    let mut binom = BigUint::one();
    for k in 0..n {
        binom = binom * BigUint::from(len - k) / BigUint::from(k + 1);
    }
    let num = &binom * &binom;
    let den = BigUint::one() << (2 * len as usize);
    Ok(BigRational::new(num.into(), den.into()))
}

/// Floating-point return probability, computed by the product recursion
/// p(2n+2) = p(2n) · ((2n+1)/(2n+2))².
pub fn return_probability(len: u32) -> Result<f64> {
    check_length(len)?;
    let mut p = 1.0f64;
    for m in 0..len / 2 {
        let r = (2 * m + 1) as f64 / (2 * m + 2) as f64;
        p *= r * r;
    }
    Ok(p)
}

/// Mass of the rooted loop measure per root site and length: p(len)/len.
pub fn rooted_loop_mass(len: u32) -> Result<f64> {
    Ok(return_probability(len)? / len as f64)
}

/// Total rooted mass per site of lengths strictly above `n_max`.
pub fn tail_mass(n_max: u32) -> f64 {
    // exact summation into the tail, then the asymptote
    // p(2n)/(2n) ≈ (1/(2πn²))(1 − 1/(4n)) summed by Euler–Maclaurin
    const EXTRA: u64 = 40_000;
    let mut len = 2u64;
    let mut p = 0.25f64;
    while len < n_max as u64 {
        let m = len / 2;
        let r = (2 * m + 1) as f64 / (2 * m + 2) as f64;
        p *= r * r;
        len += 2;
    }
    let mut sum = 0.0;
    let stop = len + EXTRA;
    while len < stop {
        let m = len / 2;
        let r = (2 * m + 1) as f64 / (2 * m + 2) as f64;
        p *= r * r;
        len += 2;
        sum += p / len as f64;
    }
    let n = (len / 2) as f64;
    sum + (1.0 / n - 0.5 / (n * n) - 0.125 / (n * n)) / (2.0 * std::f64::consts::PI)
}

/// Cumulative table of the length law ∝ p(len)/len on an even range.
#[derive(Debug, Clone)]
pub struct LengthTable {
    min_len: u32,
    masses: Vec<f64>,
    cumulative: Vec<f64>,
}

impl LengthTable {
    pub fn new(min_len: u32, max_len: u32) -> Result<Self> {
        check_length(min_len)?;
        check_length(max_len)?;
        if max_len < min_len {
            return Err(Error::InvalidParameter(format!(
                "maximum length {max_len} below minimum {min_len}"
            )));
        }
        let mut masses = Vec::with_capacity(((max_len - min_len) / 2 + 1) as usize);
        let mut cumulative = Vec::with_capacity(masses.capacity());
        let mut p = return_probability(min_len)?;
        let mut len = min_len;
        let mut acc = 0.0;
        loop {
            let w = p / len as f64;
            masses.push(w);
            acc += w;
            cumulative.push(acc);
            if len == max_len {
                break;
            }
            let m = len / 2;
            let r = (2 * m + 1) as f64 / (2 * m + 2) as f64;
            p *= r * r;
            len += 2;
        }
        Ok(LengthTable { min_len, masses, cumulative })
    }

    /// Total rooted mass per site over the table's range.
    pub fn total_mass(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn mass(&self, len: u32) -> f64 {
        if len < self.min_len || !len.is_multiple_of(2) {
            return 0.0;
        }
        self.masses.get(((len - self.min_len) / 2) as usize).copied().unwrap_or(0.0)
    }

    pub fn min_len(&self) -> u32 {
        self.min_len
    }

    pub fn max_len(&self) -> u32 {
        self.min_len + 2 * (self.masses.len() as u32 - 1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u = rng.gen::<f64>() * self.total_mass();
        let k = self.cumulative.partition_point(|&c| c <= u).min(self.masses.len() - 1);
        self.min_len + 2 * k as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use num_bigint::BigInt;

    /// Counts closed walks by enumerating all 4^len step sequences.
    fn closed_walks_brute(len: u32) -> u64 {
        let mut count = 0;
        for code in 0..4u64.pow(len) {
            let (mut x, mut y) = (0i32, 0i32);
            let mut c = code;
            for _ in 0..len {
                match c % 4 {
                    0 => x += 1,
                    1 => y += 1,
                    2 => x -= 1,
                    _ => y -= 1,
                }
                c /= 4;
            }
            if x == 0 && y == 0 {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn enumeration_oracle() {
        assert_eq!(closed_walks_brute(2), 4);
        assert_eq!(closed_walks_brute(4), 36);
        assert_eq!(closed_walks_brute(6), 400);
    }

    #[test]
    fn exact_values() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(return_probability_exact(2).unwrap(), r(1, 4));
        assert_eq!(return_probability_exact(4).unwrap(), r(9, 64));
        assert_eq!(return_probability_exact(6).unwrap(), r(400, 4096));
        assert!(return_probability_exact(0).is_err());
        assert!(return_probability_exact(3).is_err());
    }

    #[test]
    fn float_agrees_with_exact() {
        for len in (2..=60).step_by(2) {
            let exact = return_probability_exact(len).unwrap().to_f64().unwrap();
            let float = return_probability(len).unwrap();
            assert!((exact - float).abs() <= 1e-14 * exact, "len {len}");
        }
    }

    #[test]
    fn table_masses_and_sampling() {
        let t = LengthTable::new(2, 6).unwrap();
        assert!((t.mass(2) - 1.0 / 8.0).abs() < 1e-15);
        assert!((t.mass(4) - 9.0 / 256.0).abs() < 1e-15);
        assert_eq!(t.mass(8), 0.0);
        assert_eq!(t.max_len(), 6);
        let mut rng = crate::rng::stream(1, crate::rng::Tag::Pilot, 0, 0, 0);
        let n = 200_000;
        let twos = (0..n).filter(|_| t.sample(&mut rng) == 2).count();
        let expect = t.mass(2) / t.total_mass();
        let sd = (expect * (1.0 - expect) / n as f64).sqrt();
        assert!(((twos as f64 / n as f64) - expect).abs() < 4.0 * sd);
    }

    #[test]
    fn tail_mass_is_consistent_with_table() {
        let head = LengthTable::new(2, 200).unwrap().total_mass();
        let full = head + tail_mass(200);
        let longer = LengthTable::new(2, 2000).unwrap().total_mass() + tail_mass(2000);
        assert!((full - longer).abs() < 1e-9, "{full} vs {longer}");
        assert!(tail_mass(200) > tail_mass(2000));
    }
}
