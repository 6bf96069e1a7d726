use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const KAPPA_MIN: f64 = 8.0 / 3.0;
const KAPPA_MAX: f64 = 4.0;

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > KAPPA_MIN && kappa <= KAPPA_MAX {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("kappa = {kappa} outside (8/3, 4]")))
    }
}

/// Loop-soup intensity c = (3κ − 8)(6 − κ)/(2κ).
pub fn c_of_kappa(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok((3.0 * kappa - 8.0) * (6.0 - kappa) / (2.0 * kappa))
}

/// Restriction exponent α = (6 − κ)/(2κ).
pub fn alpha_of_kappa(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok((6.0 - kappa) / (2.0 * kappa))
}

/// Inverse of [`c_of_kappa`]: the root of 3κ² + (2c − 26)κ + 48 = 0 in (8/3, 4].
pub fn kappa_of_c(c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidParameter(format!("c = {c} outside (0, 1]")));
    }
    let b = 2.0 * c - 26.0;
    let disc = (b * b - 576.0).max(0.0);
    // smaller root; written to avoid cancellation
    let q = -0.5 * (b - disc.sqrt());
    let kappa = 48.0 / q;
    Ok(kappa.min(KAPPA_MAX))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    pub kappa: f64,
    pub c: f64,
    pub alpha: f64,
}

impl ExponentTriple {
    pub fn from_kappa(kappa: f64) -> Result<Self> {
        Ok(ExponentTriple { kappa, c: c_of_kappa(kappa)?, alpha: alpha_of_kappa(kappa)? })
    }

    pub fn from_c(c: f64) -> Result<Self> {
        Self::from_kappa(kappa_of_c(c)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_values() {
        assert!((c_of_kappa(4.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((alpha_of_kappa(4.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((c_of_kappa(3.6).unwrap() - 14.0 / 15.0).abs() < 1e-14);
        assert!((alpha_of_kappa(3.6).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!((kappa_of_c(14.0 / 15.0).unwrap() - 3.6).abs() < 1e-13);
        assert!((kappa_of_c(1.0).unwrap() - 4.0).abs() < 1e-13);
        // α → 5/8 as κ ↓ 8/3
        let k = KAPPA_MIN + 1e-12;
        assert!((alpha_of_kappa(k).unwrap() - 0.625).abs() < 1e-11);
    }

    #[test]
    fn out_of_range() {
        assert!(c_of_kappa(KAPPA_MIN).is_err());
        assert!(c_of_kappa(4.5).is_err());
        assert!(kappa_of_c(0.0).is_err());
        assert!(kappa_of_c(1.2).is_err());
        assert!(kappa_of_c(f64::NAN).is_err());
    }

    #[test]
    fn round_trip_and_monotone() {
        let n = 1000;
        let mut prev: Option<ExponentTriple> = None;
        for i in 1..=n {
            let kappa = KAPPA_MIN + (KAPPA_MAX - KAPPA_MIN) * i as f64 / n as f64;
            let t = ExponentTriple::from_kappa(kappa).unwrap();
            assert!((kappa_of_c(t.c).unwrap() - kappa).abs() < 1e-12, "kappa {kappa}");
            if let Some(p) = prev {
                assert!(t.c > p.c && t.alpha < p.alpha);
            }
            prev = Some(t);
        }
    }
}
