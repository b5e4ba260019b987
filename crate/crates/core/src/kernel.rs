//! Newtonian fundamental solution in `R^n` (`n >= 3`) and the double-layer
//! kernel row used by every Euclidean assembly.
//!
//! With softening width `w` the distance `|x - y|` is replaced by
//! `rho = sqrt(|x - y|^2 + w^2)`; `w = 0` is the exact singular kernel.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Ambient dimension and softening width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    dim: usize,
    softening: f64,
    omega: f64,
}

impl KernelConfig {
    pub fn new(dim: usize, softening: f64) -> Result<Self> {
        if dim < 3 {
            return Err(invalid("kernel requires ambient dimension n >= 3"));
        }
        if !(softening >= 0.0) || !softening.is_finite() {
            return Err(invalid("softening must be finite and >= 0"));
        }
        Ok(Self {
            dim,
            softening,
            omega: unit_sphere_measure(dim)?,
        })
    }

    /// Exact singular kernel (`w = 0`).
    pub fn exact(dim: usize) -> Result<Self> {
        Self::new(dim, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn softening(&self) -> f64 {
        self.softening
    }

    /// `omega_n`, cached.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    fn check(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: if x.len() != self.dim { x.len() } else { y.len() },
            });
        }
        let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        let rho2 = r2 + self.softening * self.softening;
        if rho2 == 0.0 {
            return Err(Error::SingularEvaluation);
        }
        Ok(rho2)
    }
}

/// `(n-1)`-dimensional measure of the unit sphere in `R^n`, `2 pi^{n/2} / Gamma(n/2)`.
pub fn unit_sphere_measure(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid("unit sphere measure needs n >= 2"));
    }
    // omega_2 = 2 pi, omega_3 = 4 pi, omega_{k+2} = 2 pi omega_k / k.
    let (mut k, mut omega) = if n % 2 == 0 { (2, 2.0 * PI) } else { (3, 4.0 * PI) };
    while k < n {
        omega *= 2.0 * PI / k as f64;
        k += 2;
    }
    Ok(omega)
}

/// `rho2^{n/2}` for integer `n`.
#[inline]
fn half_power(rho2: f64, n: usize) -> f64 {
    let mut p = 1.0;
    for _ in 0..n / 2 {
        p *= rho2;
    }
    if n % 2 == 1 {
        p *= libm::sqrt(rho2);
    }
    p
}

/// `G(x - y) = rho^{2-n} / ((n-2) omega_n)`.
pub fn fundamental_solution(x: &[f64], y: &[f64], config: &KernelConfig) -> Result<f64> {
    let rho2 = config.check(x, y)?;
    let n = config.dim;
    Ok(1.0 / (half_power(rho2, n - 2) * (n as f64 - 2.0) * config.omega))
}

/// `K(x, y) = (y - x) / (omega_n rho^n)`; sample `y` with vector element `mu`
/// contributes `K(x, y) . mu` to the indicator at `x`.
pub fn double_layer_row(x: &[f64], y: &[f64], config: &KernelConfig) -> Result<Vec<f64>> {
    let mut out = vec![0.0; config.dim];
    double_layer_row_into(x, y, config, &mut out)?;
    Ok(out)
}

/// [`double_layer_row`] writing into `out`.
pub fn double_layer_row_into(
    x: &[f64],
    y: &[f64],
    config: &KernelConfig,
    out: &mut [f64],
) -> Result<()> {
    let rho2 = config.check(x, y)?;
    let scale = 1.0 / (config.omega * half_power(rho2, config.dim));
    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
        *o = (yi - xi) * scale;
    }
    Ok(())
}

/// `K(x, y) . n` without allocating.
pub fn double_layer_normal(x: &[f64], y: &[f64], normal: &[f64], config: &KernelConfig) -> Result<f64> {
    let rho2 = config.check(x, y)?;
    let scale = 1.0 / (config.omega * half_power(rho2, config.dim));
    let proj: f64 = x
        .iter()
        .zip(y)
        .zip(normal)
        .map(|((xi, yi), ni)| (yi - xi) * ni)
        .sum();
    Ok(proj * scale)
}
