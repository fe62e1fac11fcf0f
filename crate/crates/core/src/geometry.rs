//! Pseudohyperbolic distance, pseudohyperbolic disks and Carleson squares.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_disk(z: Complex64, name: &str) -> Result<()> {
    if !(z.norm() < 1.0) {
        return Err(Error::domain(format!(
            "{name} = {z} is not in the open unit disk"
        )));
    }
    Ok(())
}

/// `φ_a(z) = (a - z)/(1 - ā z)`.
pub fn mobius(a: Complex64, z: Complex64) -> Complex64 {
    (a - z) / (1.0 - a.conj() * z)
}

/// `δ(a, z) = |φ_a(z)|`.
pub fn pseudo_distance(a: Complex64, z: Complex64) -> Result<f64> {
    check_disk(a, "a")?;
    check_disk(z, "z")?;
    Ok(pseudo_distance_unchecked(a, z))
}

/// `δ` without the domain check. The denominator `1 - ā z` and its
/// conjugate-swapped twin have equal modulus, so the value is symmetric.
pub fn pseudo_distance_unchecked(a: Complex64, z: Complex64) -> f64 {
    let num = (a - z).norm();
    if num == 0.0 {
        return 0.0;
    }
    num / (1.0 - a.conj() * z).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanDisk {
    pub center: Complex64,
    pub radius: f64,
}

impl EuclideanDisk {
    /// Open-disk membership.
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }
}

/// `Δ(a, r) = {z : δ(a, z) < r}` as a Euclidean disk.
pub fn pseudo_disk(a: Complex64, r: f64) -> Result<EuclideanDisk> {
    check_disk(a, "a")?;
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!(
            "pseudohyperbolic radius must lie in [0, 1), got {r}"
        )));
    }
    let a2 = a.norm_sqr();
    let denom = 1.0 - r * r * a2;
    Ok(EuclideanDisk {
        center: a * ((1.0 - r * r) / denom),
        radius: (1.0 - a2) * r / denom,
    })
}

/// The Carleson square `S(a)`: angles within half-width `(1 - |a|)/2` of
/// `arg a`, radii in `[|a|, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonSquare {
    pub center_angle: f64,
    pub half_width: f64,
    pub angular_width: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl CarlesonSquare {
    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        if !(r >= self.r_min && r < self.r_max) {
            return false;
        }
        let mut d = (z.arg() - self.center_angle).rem_euclid(TAU);
        if d > PI {
            d -= TAU;
        }
        d.abs() <= self.half_width
    }
}

pub fn carleson_square(a: Complex64) -> Result<CarlesonSquare> {
    let m = a.norm();
    if m == 0.0 {
        return Err(Error::domain("Carleson square S(0) is undefined"));
    }
    check_disk(a, "a")?;
    let width = 1.0 - m;
    Ok(CarlesonSquare {
        center_angle: a.arg(),
        half_width: 0.5 * width,
        angular_width: width,
        r_min: 1.0 - width,
        r_max: 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn distance_examples() {
        assert!((pseudo_distance(c(0.5, 0.0), c(-0.5, 0.0)).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(pseudo_distance(c(0.3, 0.2), c(0.3, 0.2)).unwrap(), 0.0);
        assert!(pseudo_distance(c(1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn disk_examples() {
        let d = pseudo_disk(c(0.5, 0.0), 0.5).unwrap();
        assert!((d.center.re - 0.4).abs() < 1e-15 && (d.radius - 0.4).abs() < 1e-15);
        let d = pseudo_disk(c(0.9, 0.0), 0.1).unwrap();
        assert!((d.center.re - 0.99 * 0.9 / (1.0 - 0.01 * 0.81)).abs() < 1e-15);
        assert!((d.radius - 0.19 * 0.1 / (1.0 - 0.01 * 0.81)).abs() < 1e-15);
    }

    #[test]
    fn square_membership() {
        let a = Complex64::from_polar(0.9, PI / 4.0);
        let s = carleson_square(a).unwrap();
        assert!((s.half_width - 0.05).abs() < 1e-15);
        assert!(s.contains(Complex64::from_polar(0.95, PI / 4.0)));
        assert!(!s.contains(Complex64::from_polar(0.95, PI / 4.0 + 0.06)));
        assert!(carleson_square(c(0.0, 0.0)).is_err());
    }
}
