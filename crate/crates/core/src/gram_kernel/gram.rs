//! Gram-matrix kernels for the perturbed Fubini–Study metrics on ℂP¹.
//!
//! The basis is `e_i = z^i/√G⁰_ii` with `G⁰_ii = i!(m−i)!/(m+1)!` the
//! Fubini–Study norms, so the unperturbed Gram matrix is the identity and
//! only the perturbation support `|z| < 1` needs two-dimensional quadrature.

use super::{KernelField, Sample};
use crate::error::{Error, Result};
use crate::models::PerturbedPotential;
use crate::numeric::ln_factorial;
use crate::quadrature::GaussRule;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct GramModel {
    pub m: u32,
    pub perturbation: PerturbedPotential,
    /// Trapezoid nodes in the angle.
    pub n_theta: usize,
    /// Gauss nodes per radial panel.
    pub n_radial: usize,
    /// Radial panels on each of `[0, 1/2]` and `[1/2, 1]`.
    pub panels: usize,
}

impl GramModel {
    pub fn new(m: u32, perturbation: PerturbedPotential) -> Self {
        GramModel { m, perturbation, n_theta: 512, n_radial: 24, panels: 4 }
    }

    pub fn refined(self) -> Self {
        GramModel { n_theta: self.n_theta * 2, panels: self.panels * 2, ..self }
    }

    fn log_fs_norm(&self, i: u32) -> f64 {
        ln_factorial(i as u64) + ln_factorial((self.m - i) as u64) - ln_factorial(self.m as u64 + 1)
    }

    /// Hermitian weight `e^{mφ}/(1+|z|²)^m` of the metric on the line bundle.
    pub fn log_weight(&self, x: f64, y: f64) -> f64 {
        self.m as f64 * (self.perturbation.phi(x, y) - (x * x + y * y).ln_1p())
    }
}

#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub model: GramModel,
    pub g: DMatrix<Complex64>,
    chol: Cholesky<Complex64, Dyn>,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// Ratio of extreme eigenvalues.
    pub fn condition_number(&self) -> f64 {
        let ev = self.g.clone().symmetric_eigenvalues();
        let max = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// Basis values `e_i(z)` scaled by `√weight`, so `ρ = v* G⁻¹ v`.
    fn evaluation(&self, x: f64, y: f64) -> DVector<Complex64> {
        let model = &self.model;
        let z = Complex64::new(x, y);
        let lw = 0.5 * model.log_weight(x, y);
        let (lr, th) = (z.norm().ln(), z.arg());
        DVector::from_iterator(
            self.dim(),
            (0..=model.m).map(|i| {
                if z.norm() == 0.0 {
                    let v = if i == 0 { (lw - 0.5 * model.log_fs_norm(0)).exp() } else { 0.0 };
                    return Complex64::new(v, 0.0);
                }
                let mag = (i as f64 * lr + lw - 0.5 * model.log_fs_norm(i)).exp();
                Complex64::from_polar(mag, i as f64 * th).conj()
            }),
        )
    }
}

/// `G_ij = ⟨e_i, e_j⟩` under the perturbed metric: identity plus the
/// correction integral over the unit disc on a polar grid.
pub fn gram_matrix(model: &GramModel) -> Result<GramMatrix> {
    if model.m == 0 {
        return Err(Error::invalid("tensor power m must be at least 1"));
    }
    let m = model.m as usize;
    let n = m + 1;
    let rule = GaussRule::new(model.n_radial);
    let mut radial: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in [(0.0, 0.5), (0.5, 1.0)] {
        for p in 0..model.panels {
            let a = lo + (hi - lo) * p as f64 / model.panels as f64;
            let b = lo + (hi - lo) * (p + 1) as f64 / model.panels as f64;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                radial.push((0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w));
            }
        }
    }
    let nt = model.n_theta;
    let pert = model.perturbation;
    let mf = model.m as f64;
    // Angular Fourier coefficients F_s(ρ) = ∫ C(ρ,θ) e^{isθ} dθ for s = −m..m,
    // where C = (e^{mφ} g_k − g_FS)(1+ρ²)^{-m}·(1+ρ²)^{m} is kept without the
    // common radial factor, which is folded into the log scale below.
    let coeffs: Vec<Vec<Complex64>> = radial
        .par_iter()
        .map(|&(rho, _)| {
            let g_fs = 1.0 / (PI * (1.0 + rho * rho).powi(2));
            let vals: Vec<f64> = (0..nt)
                .map(|t| {
                    let th = 2.0 * PI * t as f64 / nt as f64;
                    let (x, y) = (rho * th.cos(), rho * th.sin());
                    (mf * pert.phi(x, y)).exp() * pert.density(x, y) - g_fs
                })
                .collect();
            (0..=2 * m)
                .map(|si| {
                    let s = si as f64 - mf;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (t, &v) in vals.iter().enumerate() {
                        let th = 2.0 * PI * t as f64 / nt as f64;
                        acc += v * Complex64::from_polar(1.0, s * th);
                    }
                    acc * (2.0 * PI / nt as f64)
                })
                .collect()
        })
        .collect();
    let log_norm: Vec<f64> = (0..=model.m).map(|i| model.log_fs_norm(i)).collect();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j < i {
                        return Complex64::new(0.0, 0.0);
                    }
                    // conj(z^i) z^j = ρ^{i+j} e^{i(j−i)θ}
                    let si = (j as i64 - i as i64 + m as i64) as usize;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (q, &(rho, w)) in radial.iter().enumerate() {
                        let lf = (i + j) as f64 * rho.ln() - mf * (rho * rho).ln_1p()
                            - 0.5 * (log_norm[i] + log_norm[j]);
                        acc += coeffs[q][si] * (w * rho * lf.exp());
                    }
                    if i == j {
                        acc += Complex64::new(1.0, 0.0);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut g = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            g[(i, j)] = rows[i][j];
            g[(j, i)] = rows[i][j].conj();
        }
        g[(i, i)] = Complex64::new(g[(i, i)].re, 0.0);
    }
    let chol = Cholesky::new(g.clone()).ok_or_else(|| {
        let min = g.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        Error::compute(format!("Gram matrix is not positive definite (smallest eigenvalue ≈ {min:e})"))
    })?;
    Ok(GramMatrix { model: *model, g, chol })
}

/// `ρ(z) = v* G⁻¹ v · e^{mφ}(1+|z|²)^{-m}`, with `v` the basis at `z = x + iy`.
pub fn rho_gram(gram: &GramMatrix, x: f64, y: f64) -> f64 {
    let v = gram.evaluation(x, y);
    let sol = gram.chol.solve(&v);
    v.dotc(&sol).re
}

/// Kernel values on a polar grid over `|z| < radius` with area weights of
/// the perturbed metric.
pub fn gram_disc_field(gram: &GramMatrix, radius: f64, n_r: usize, n_theta: usize) -> KernelField {
    let rule = GaussRule::new(n_r);
    let pert = gram.model.perturbation;
    let pts: Vec<(f64, f64, f64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .flat_map(|(&t, &w)| {
            let rho = 0.5 * radius * (t + 1.0);
            let wr = 0.5 * radius * w * rho * 2.0 * PI / n_theta as f64;
            (0..n_theta).map(move |a| (rho, 2.0 * PI * (a as f64 + 0.5) / n_theta as f64, wr))
        })
        .collect();
    let samples: Vec<Sample> = pts
        .par_iter()
        .map(|&(rho, th, wr)| {
            let (x, y) = (rho * th.cos(), rho * th.sin());
            Sample { r: rho, x, y, value: rho_gram(gram, x, y), weight: wr * pert.density(x, y) }
        })
        .collect();
    KernelField::new(gram.model.m, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unperturbed_gram_is_identity() {
        let model = GramModel::new(6, PerturbedPotential::none());
        let g = gram_matrix(&model).unwrap();
        let id = DMatrix::<Complex64>::identity(7, 7);
        assert!((g.g.clone() - id).camax() < 1e-12);
        for (x, y) in [(0.0, 0.0), (0.3, -0.2), (2.0, 1.0)] {
            assert!((rho_gram(&g, x, y) - 7.0).abs() < 1e-10);
        }
    }

    #[test]
    fn perturbed_gram_is_hermitian_and_refines() {
        let model = GramModel::new(8, PerturbedPotential::new(6).unwrap());
        let g = gram_matrix(&model).unwrap();
        assert_eq!((g.g.clone() - g.g.adjoint()).camax(), 0.0);
        let fine = gram_matrix(&model.refined()).unwrap();
        assert!((rho_gram(&g, 0.0, 0.0) - rho_gram(&fine, 0.0, 0.0)).abs() < 1e-6);
        assert!(g.condition_number() > 1.0);
    }
}
