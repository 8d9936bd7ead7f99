//! The oscillating perturbation `φ_k = −k⁻⁴ sin(2kx) sin(2ky) η(|z|)` of the
//! degree-one Fubini–Study metric in the chart `z = x + iy`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

fn e_inv(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let f = (-1.0 / x).exp();
    let x2 = x * x;
    (f, f / x2, f * (1.0 / (x2 * x2) - 2.0 / (x2 * x)))
}

/// Smooth radial cutoff: 1 for `ρ ≤ 1/2`, 0 for `ρ ≥ 1`. Returns `(η, η', η'')` in ρ.
pub fn cutoff(rho: f64) -> (f64, f64, f64) {
    if rho <= 0.5 {
        return (1.0, 0.0, 0.0);
    }
    if rho >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let t = 2.0 * (rho - 0.5);
    let (p, p1, p2) = e_inv(t);
    let (q, q1, q2) = e_inv(1.0 - t);
    let (q1, q2) = (-q1, q2);
    let d = p + q;
    let d1 = p1 + q1;
    let d2 = p2 + q2;
    let g = p / d;
    let num1 = p1 * d - p * d1;
    let g1 = num1 / (d * d);
    let g2 = (p2 * d - p * d2) / (d * d) - 2.0 * d1 * num1 / (d * d * d);
    (1.0 - g, -2.0 * g1, -4.0 * g2)
}

#[derive(Debug, Clone, Copy)]
pub struct PerturbedPotential {
    pub k: u32,
    pub amplitude: f64,
}

impl PerturbedPotential {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("perturbation frequency k must be positive"));
        }
        Ok(PerturbedPotential { k, amplitude: (k as f64).powi(-4) })
    }

    /// A zero perturbation, for checks against the bare Fubini–Study metric.
    pub fn none() -> Self {
        PerturbedPotential { k: 1, amplitude: 0.0 }
    }

    pub fn phi(&self, x: f64, y: f64) -> f64 {
        let rho = x.hypot(y);
        if rho >= 1.0 || self.amplitude == 0.0 {
            return 0.0;
        }
        let kk = 2.0 * self.k as f64;
        -self.amplitude * (kk * x).sin() * (kk * y).sin() * cutoff(rho).0
    }

    /// Flat Laplacian `∂²_x φ + ∂²_y φ`.
    pub fn laplacian(&self, x: f64, y: f64) -> f64 {
        let rho = x.hypot(y);
        if rho >= 1.0 || self.amplitude == 0.0 {
            return 0.0;
        }
        let kk = 2.0 * self.k as f64;
        let (sx, cx) = (kk * x).sin_cos();
        let (sy, cy) = (kk * y).sin_cos();
        let s = sx * sy;
        let (eta, e1, e2) = cutoff(rho);
        let lap_s = -2.0 * kk * kk * s;
        let (grad_eta, lap_eta) = if rho > 0.0 {
            ((e1 * x / rho, e1 * y / rho), e2 + e1 / rho)
        } else {
            ((0.0, 0.0), 0.0)
        };
        let grad_s = (kk * cx * sy, kk * sx * cy);
        let cross = grad_s.0 * grad_eta.0 + grad_s.1 * grad_eta.1;
        -self.amplitude * (lap_s * eta + 2.0 * cross + s * lap_eta)
    }

    /// Area density of `ω_k = ω_FS − (i/2π) ∂∂̄φ_k` against `dx dy`.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        let s = x * x + y * y;
        1.0 / (PI * (1.0 + s) * (1.0 + s)) - self.laplacian(x, y) / (4.0 * PI)
    }
}
