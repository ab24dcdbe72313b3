//! Interface values from cell averages on a periodic grid.
//!
//! Interface `i` sits between cells `i` and `i + 1` (mod N). `minus[i]` is the
//! value extrapolated from the left cell, `plus[i]` the one from the right.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::limiter::Limiter;

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceValues {
    pub minus: Vec<f64>,
    pub plus: Vec<f64>,
}

/// How interface values are built: a three-point ratio limiter or the five-point UNO2 rule.
#[derive(Debug, Clone, PartialEq)]
pub enum Reconstruction {
    Limited(Limiter),
    Uno2,
}

impl Reconstruction {
    pub fn name(&self) -> &str {
        match self {
            Reconstruction::Limited(l) => l.name(),
            Reconstruction::Uno2 => "uno2",
        }
    }

    pub fn limiter(&self) -> Option<&Limiter> {
        match self {
            Reconstruction::Limited(l) => Some(l),
            Reconstruction::Uno2 => None,
        }
    }

    pub fn min_cells(&self) -> usize {
        match self {
            Reconstruction::Limited(_) => 3,
            Reconstruction::Uno2 => 5,
        }
    }

    pub fn interface_values(&self, u: &[f64]) -> Result<InterfaceValues> {
        match self {
            Reconstruction::Limited(l) => interface_values(u, l),
            Reconstruction::Uno2 => uno2_interface(u),
        }
    }
}

impl From<Limiter> for Reconstruction {
    fn from(l: Limiter) -> Self {
        Reconstruction::Limited(l)
    }
}

impl FromStr for Reconstruction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "uno2" {
            Ok(Reconstruction::Uno2)
        } else {
            s.parse().map(Reconstruction::Limited)
        }
    }
}

impl fmt::Display for Reconstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_len(u: &[f64], min: usize) -> Result<()> {
    if u.len() < min {
        Err(Error::GridTooSmall {
            min,
            got: u.len(),
        })
    } else {
        Ok(())
    }
}

/// Three-point limited reconstruction.
///
/// u⁻ at j+½ is u_j + ½φ(r_j)Δ_{j+½} and u⁺ at j-½ is u_j - ½φ(1/r_j)Δ_{j-½}.
/// A zero increment kills its correction without evaluating φ, and a zero
/// neighbouring increment feeds φ(0).
pub fn interface_values(u: &[f64], l: &Limiter) -> Result<InterfaceValues> {
    check_len(u, 3)?;
    let n = u.len();
    let mut minus = vec![0.0; n];
    let mut plus = vec![0.0; n];
    for j in 0..n {
        let dl = u[j] - u[(j + n - 1) % n];
        let dr = u[(j + 1) % n] - u[j];
        minus[j] = if dr == 0.0 {
            u[j]
        } else {
            u[j] + 0.5 * l.phi(dl / dr) * dr
        };
        plus[(j + n - 1) % n] = if dl == 0.0 {
            u[j]
        } else {
            u[j] - 0.5 * l.phi(dr / dl) * dl
        };
    }
    Ok(InterfaceValues { minus, plus })
}

/// Zero when signs differ, otherwise the argument of smaller magnitude.
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() <= b.abs() {
        a
    } else {
        b
    }
}

/// Five-point UNO2 reconstruction built from limited second differences.
/// The plus side is the mirror image of the minus side.
pub fn uno2_interface(u: &[f64]) -> Result<InterfaceValues> {
    check_len(u, 5)?;
    let n = u.len();
    let at = |j: usize, off: isize| u[(j as isize + off).rem_euclid(n as isize) as usize];
    // second difference centred on cell j
    let d2: Vec<f64> = (0..n)
        .map(|j| at(j, -1) - 2.0 * at(j, 0) + at(j, 1))
        .collect();
    // limited curvature at interface j+½
    let c: Vec<f64> = (0..n).map(|j| minmod(d2[j], d2[(j + 1) % n])).collect();
    let mut minus = vec![0.0; n];
    let mut plus = vec![0.0; n];
    for j in 0..n {
        let jm = (j + n - 1) % n;
        let jp = (j + 1) % n;
        let dl = at(j, 0) - at(j, -1);
        let dr = at(j, 1) - at(j, 0);
        let drr = at(j, 2) - at(j, 1);
        minus[j] = u[j] + 0.5 * minmod(dl + 0.5 * c[jm], dr - 0.5 * c[j]);
        plus[j] = u[jp] - 0.5 * minmod(drr - 0.5 * c[jp], dr + 0.5 * c[j]);
    }
    Ok(InterfaceValues { minus, plus })
}

/// Σ|u_{j+1} - u_j| with the periodic wrap.
pub fn total_variation(u: &[f64]) -> f64 {
    let n = u.len();
    (0..n).map(|j| (u[(j + 1) % n] - u[j]).abs()).sum()
}

/// Total variation of the interleaved sequence ..., u_j, u⁻_{j+½}, u⁺_{j+½}, u_{j+1}, ...
pub fn interleaved_tv(u: &[f64], iv: &InterfaceValues) -> f64 {
    let n = u.len();
    (0..n)
        .map(|j| {
            (iv.minus[j] - u[j]).abs()
                + (iv.plus[j] - iv.minus[j]).abs()
                + (u[(j + 1) % n] - iv.plus[j]).abs()
        })
        .sum()
}

/// Total variation of the reconstructed sequence for a ratio limiter.
pub fn reconstructed_tv(u: &[f64], l: &Limiter) -> Result<f64> {
    let iv = interface_values(u, l)?;
    Ok(interleaved_tv(u, &iv))
}
