//! Geodesic balls in the constant-curvature model spaces `M_k^m`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpace {
    /// Sectional curvature.
    pub k: f64,
    /// Dimension.
    pub m: u32,
}

/// Surface area of the unit `n`-sphere in `R^{n+1}`.
pub fn unit_sphere_area(n: u32) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI * unit_sphere_area(n - 2) / (n - 1) as f64,
    }
}

const GL_POINTS: usize = 20;
const PANELS: usize = 16;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        (0..n)
            .map(|i| {
                let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for j in 2..=n {
                        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let rule = gauss_legendre();
    let w = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|p| {
            let lo = a + p as f64 * w;
            rule.iter()
                .map(|&(x, wt)| wt * f(lo + 0.5 * w * (x + 1.0)))
                .sum::<f64>()
                * 0.5
                * w
        })
        .sum()
}

impl ModelSpace {
    pub fn new(k: f64, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::OutOfRange("dimension must be at least 1".into()));
        }
        if !k.is_finite() {
            return Err(Error::OutOfRange("curvature must be finite".into()));
        }
        Ok(ModelSpace { k, m })
    }

    /// Largest radius: `π/√k` on spheres, unbounded otherwise.
    pub fn max_radius(&self) -> f64 {
        if self.k > 0.0 {
            PI / self.k.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// `sn_k(r)`: `sin(√k r)/√k`, `r`, or `sinh(√-k r)/√-k`.
    pub fn sn(&self, r: f64) -> f64 {
        if self.k > 0.0 {
            let s = self.k.sqrt();
            (s * r).sin() / s
        } else if self.k < 0.0 {
            let s = (-self.k).sqrt();
            (s * r).sinh() / s
        } else {
            r
        }
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r >= 0.0) || r > self.max_radius() * (1.0 + 1e-15) {
            return Err(Error::OutOfRange(format!("radius {r}")));
        }
        Ok(())
    }

    /// Area of the geodesic sphere of radius `r`.
    pub fn boundary_area(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(unit_sphere_area(self.m - 1) * self.sn(r).powi(self.m as i32 - 1))
    }

    /// Volume of the geodesic ball of radius `r`.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        let k = self.k;
        Ok(match self.m {
            1 => 2.0 * r,
            // 1 - cos x = 2 sin^2(x/2) and cosh x - 1 = 2 sinh^2(x/2), free of cancellation
            2 if k > 0.0 => 4.0 * PI * (0.5 * k.sqrt() * r).sin().powi(2) / k,
            2 if k < 0.0 => 4.0 * PI * (0.5 * (-k).sqrt() * r).sinh().powi(2) / -k,
            2 => PI * r * r,
            m => {
                let s = unit_sphere_area(m - 1);
                integrate(|t| s * self.sn(t).powi(m as i32 - 1), 0.0, r)
            }
        })
    }

    /// Volume of the whole space for `k > 0`, infinite otherwise.
    pub fn total_volume(&self) -> f64 {
        if self.k > 0.0 {
            self.ball_volume(self.max_radius()).expect("max radius is in range")
        } else {
            f64::INFINITY
        }
    }

    /// Inverse of [`ModelSpace::ball_volume`] by bisection.
    pub fn ball_radius_for_volume(&self, vol: f64) -> Result<f64> {
        if !(vol >= 0.0) || vol > self.total_volume() * (1.0 + 1e-14) {
            return Err(Error::OutOfRange(format!("volume {vol}")));
        }
        if vol == 0.0 {
            return Ok(0.0);
        }
        let mut hi = if self.k > 0.0 { self.max_radius() } else { 1.0 };
        while self.k <= 0.0 && self.ball_volume(hi)? < vol {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.ball_volume(mid)? < vol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Euclidean value, the raw deviations at `±k`, and the two-sided estimate
/// `(V_k + V_{-k})/2` of the `k → 0` limit of `ball_volume(r)`.
pub fn curvature_limit(m: u32, r: f64, k: f64) -> Result<(f64, f64, f64, f64)> {
    let flat = ModelSpace::new(0.0, m)?.ball_volume(r)?;
    let plus = ModelSpace::new(k, m)?.ball_volume(r)?;
    let minus = ModelSpace::new(-k, m)?.ball_volume(r)?;
    Ok((flat, plus - flat, minus - flat, 0.5 * (plus + minus)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(unit_sphere_area(2), 4.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(unit_sphere_area(3), 2.0 * PI * PI, epsilon = 1e-13);
    }

    #[test]
    fn volume_examples() {
        let e2 = ModelSpace::new(0.0, 2).unwrap();
        assert_relative_eq!(e2.ball_volume(1.0).unwrap(), PI);
        let s2 = ModelSpace::new(1.0, 2).unwrap();
        assert_relative_eq!(s2.ball_volume(PI / 2.0).unwrap(), 2.0 * PI, epsilon = 1e-14);
        let h2 = ModelSpace::new(-1.0, 2).unwrap();
        let v = h2.ball_volume(1.0).unwrap();
        assert_relative_eq!(v, 2.0 * PI * (1f64.cosh() - 1.0), epsilon = 1e-13);
        assert!((v - 3.412276).abs() < 1e-6);
        let quad = integrate(|t| 2.0 * PI * t.sinh(), 0.0, 1.0);
        assert_relative_eq!(quad, v, epsilon = 1e-13);
        assert!(s2.ball_volume(4.0).is_err());
        assert!(e2.ball_volume(-1.0).is_err());
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        let e3 = ModelSpace::new(0.0, 3).unwrap();
        assert_relative_eq!(e3.ball_volume(1.3).unwrap(), 4.0 / 3.0 * PI * 1.3f64.powi(3), epsilon = 1e-13);
        let s3 = ModelSpace::new(1.0, 3).unwrap();
        // total volume of the unit 3-sphere is 2π²
        assert_relative_eq!(s3.total_volume(), 2.0 * PI * PI, epsilon = 1e-12);
    }

    #[test]
    fn inverse_examples() {
        let e2 = ModelSpace::new(0.0, 2).unwrap();
        assert_eq!(e2.ball_radius_for_volume(0.0).unwrap(), 0.0);
        assert_relative_eq!(e2.ball_radius_for_volume(1.0).unwrap(), 1.0 / PI.sqrt(), epsilon = 1e-12);
        for (k, m) in [(1.0, 2), (-2.0, 3), (0.5, 4)] {
            let ms = ModelSpace::new(k, m).unwrap();
            for r in [0.1, 0.7, 1.9] {
                let back = ms.ball_radius_for_volume(ms.ball_volume(r).unwrap()).unwrap();
                assert!((back - r).abs() < 1e-10, "{k} {m} {r}");
            }
        }
        assert!(ModelSpace::new(1.0, 2).unwrap().ball_radius_for_volume(13.0).is_err());
    }

    #[test]
    fn boundary_is_derivative() {
        for (k, m) in [(0.0, 2), (1.0, 2), (-1.0, 3), (0.3, 4)] {
            let ms = ModelSpace::new(k, m).unwrap();
            let d = 1e-4;
            for r in [0.5, 1.2] {
                let fd = (ms.ball_volume(r + d).unwrap() - ms.ball_volume(r - d).unwrap()) / (2.0 * d);
                assert!((fd - ms.boundary_area(r).unwrap()).abs() < 1e-6);
            }
        }
        assert_relative_eq!(ModelSpace::new(0.0, 2).unwrap().boundary_area(1.0).unwrap(), 2.0 * PI);
        assert_relative_eq!(ModelSpace::new(0.0, 3).unwrap().boundary_area(1.0).unwrap(), 4.0 * PI, epsilon = 1e-14);
    }

    #[test]
    fn curvature_limit_behaviour() {
        for m in 1..=4 {
            let (flat, plus, minus, sym) = curvature_limit(m, 1.0, 1e-6).unwrap();
            // first-order term: V_k = V_0 (1 - m(m-1) k r^2 / (6(m+2)) + O(k^2))
            let first = -flat * (m * (m - 1)) as f64 / (6.0 * (m + 2) as f64) * 1e-6;
            assert!((plus - first).abs() < 1e-10, "{m}: {plus} vs {first}");
            assert!((minus + first).abs() < 1e-10);
            assert!((sym - flat).abs() < 1e-8);
        }
    }
}
