use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, Site};
use crate::site_set::SiteSet;

/// Conformal map removing the half-disk of radius ε centred at a < 0 from
/// the upper half-plane: z ↦ z + ε²/(z − a).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullMap {
    pub a: f64,
    pub eps: f64,
}

impl HullMap {
    pub fn new(a: f64, eps: f64) -> Result<Self> {
        if !(a.is_finite() && eps.is_finite()) || eps < 0.0 {
            return Err(Error::InvalidParameter(format!("bad hull a = {a}, eps = {eps}")));
        }
        if a >= 0.0 || eps >= a.abs() {
            return Err(Error::HullTouchesArc { a, eps });
        }
        Ok(HullMap { a, eps })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        z + self.eps * self.eps / (z - self.a)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let w = z - self.a;
        Complex64::new(1.0, 0.0) - self.eps * self.eps / (w * w)
    }

    /// φ′ at a real boundary point off the hull.
    pub fn derivative_at(&self, x: f64) -> f64 {
        1.0 - (self.eps / (x - self.a)).powi(2)
    }

    /// φ′(0) = 1 − ε²/a², in (0, 1).
    pub fn derivative_at_origin(&self) -> f64 {
        self.derivative_at(0.0)
    }
}

/// How lattice sites are read as points of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "snake_case")]
pub enum Chart {
    /// Site (x, y) is the point x + iy; the row y = 0 is the real line.
    HalfPlane,
    /// The disk of the given radius, sent to the half-plane by
    /// w ↦ iσ(1 + w)/(1 − w) with w = (x + iy)/radius. The lower
    /// semicircle goes to the positive axis, with −1 ↦ 0 and 1 ↦ ∞.
    Disk { radius: u32, sigma: f64 },
}

impl Chart {
    pub fn to_half_plane(&self, s: Site) -> Complex64 {
        match *self {
            Chart::HalfPlane => Complex64::new(s.x as f64, s.y as f64),
            Chart::Disk { radius, sigma } => {
                let w = Complex64::new(s.x as f64, s.y as f64) / radius as f64;
                Complex64::new(0.0, sigma) * (1.0 + w) / (1.0 - w)
            }
        }
    }
}

/// A half-disk hull in the upper half-plane, drawn on the lattice through a chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hull {
    pub a: f64,
    pub eps: f64,
    pub chart: Chart,
}

impl Hull {
    pub fn new(a: f64, eps: f64, chart: Chart) -> Result<Self> {
        HullMap::new(a, eps)?;
        if let Chart::Disk { radius, sigma } = chart {
            if radius == 0 || !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidParameter("disk chart needs radius > 0 and sigma > 0".into()));
            }
        }
        Ok(Hull { a, eps, chart })
    }

    /// Half-disk at (a, 0) of radius ε in lattice units.
    pub fn lattice(a: i32, eps: u32) -> Result<Self> {
        Self::new(a as f64, eps as f64, Chart::HalfPlane)
    }

    /// The continuum hull (a·s, ε·s) in lattice units.
    pub fn scaled(a: f64, eps: f64, scale: u32) -> Result<Self> {
        Self::lattice((a * scale as f64).round() as i32, (eps * scale as f64).round() as u32)
    }

    pub fn map(&self) -> HullMap {
        HullMap { a: self.a, eps: self.eps }
    }

    #[inline]
    pub fn contains(&self, s: Site) -> bool {
        match self.chart {
            Chart::HalfPlane => {
                let dx = s.x as f64 - self.a;
                let dy = s.y as f64;
                s.y >= 0 && dx * dx + dy * dy < self.eps * self.eps
            }
            Chart::Disk { .. } => {
                let z = self.chart.to_half_plane(s);
                z.im >= 0.0 && (z - self.a).norm_sqr() < self.eps * self.eps
            }
        }
    }

    pub fn sites(&self, domain: &LatticeDomain) -> SiteSet {
        domain.sites().filter(|&s| self.contains(s)).collect()
    }

    /// Stream key distinguishing hulls.
    pub(crate) fn key(&self) -> u64 {
        let mut h = self.a.to_bits().rotate_left(17) ^ self.eps.to_bits();
        if let Chart::Disk { radius, sigma } = self.chart {
            h ^= (radius as u64).rotate_left(40) ^ sigma.to_bits().rotate_left(7);
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn derivative_examples() {
        assert!((HullMap::new(-2.0, 1.0).unwrap().derivative_at_origin() - 0.75).abs() < 1e-15);
        assert!((HullMap::new(-4.0, 1.0).unwrap().derivative_at_origin() - 15.0 / 16.0).abs() < 1e-15);
        assert!((HullMap::new(-1.0, 1e-9).unwrap().derivative_at_origin() - 1.0).abs() < 1e-15);
        assert_eq!(HullMap::new(-1.0, 1.0), Err(Error::HullTouchesArc { a: -1.0, eps: 1.0 }));
        assert!(HullMap::new(1.0, 0.5).is_err());
    }

    #[test]
    fn half_circle_maps_to_real_axis() {
        let m = HullMap::new(-2.0, 1.0).unwrap();
        for k in 0..200 {
            let theta = PI * (k as f64 + 0.5) / 200.0;
            let z = Complex64::new(m.a, 0.0) + Complex64::from_polar(m.eps, theta);
            assert!(m.eval(z).im.abs() < 1e-10);
        }
        let d = m.derivative(Complex64::new(0.0, 0.0));
        assert!((d.re - m.derivative_at_origin()).abs() < 1e-15 && d.im == 0.0);
        let h = 1e-6;
        let fd = (m.eval(Complex64::new(h, 0.0)) - m.eval(Complex64::new(-h, 0.0))).re / (2.0 * h);
        assert!((fd - 0.75).abs() < 1e-8);
    }

    #[test]
    fn lattice_hull_scaling() {
        let h = Hull::scaled(-2.0, 1.0, 12).unwrap();
        assert_eq!((h.a, h.eps), (-24.0, 12.0));
        assert!((h.map().derivative_at_origin() - 0.75).abs() < 1e-15);
        let d = LatticeDomain::half_plane_box(64, 64).unwrap();
        let sites = h.sites(&d);
        assert_eq!(sites, d.half_disk_sites(Site::new(-24, 0), 12));
    }

    #[test]
    fn disk_chart_geometry() {
        let chart = Chart::Disk { radius: 96, sigma: 3.0 };
        // −1 ↦ 0, −i ↦ σ, 0 ↦ iσ
        assert!(chart.to_half_plane(Site::new(-96, 0)).norm() < 1e-12);
        assert!((chart.to_half_plane(Site::new(0, -96)) - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        assert!((chart.to_half_plane(Site::ORIGIN) - Complex64::new(0.0, 3.0)).norm() < 1e-12);
        let d = LatticeDomain::disk(96).unwrap();
        let h1 = Hull::new(-2.0, 1.0, chart).unwrap();
        let h2 = Hull::new(-4.0, 1.0, chart).unwrap();
        let (s1, s2) = (h1.sites(&d), h2.sites(&d));
        assert!(!s1.is_empty() && !s2.is_empty() && !s1.intersects(&s2));
        // both hulls sit on the upper semicircle, away from the lower arc
        assert!(s1.iter().chain(s2.iter()).all(|s| s.y > 0));
    }
}
