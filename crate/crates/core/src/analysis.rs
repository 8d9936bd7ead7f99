//! Experiment drivers and statistics on computed kernels.

use crate::error::{Error, Result};
use crate::gram_kernel::gram::gram_disc_field;
use crate::gram_kernel::{gram_matrix, rho_gram, GramModel, KernelField, RevolutionKernel};
use crate::models::{make_cyclic_weights, rescale_to_area, PerturbedPotential, RevolutionProfile};
use crate::orbifold_kernel::min_on_ray;
use crate::quadrature::golden_section;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A1Estimate {
    pub a1: f64,
    /// Next-order coefficient absorbed by the two-point fit.
    pub residual: f64,
}

/// Solves `ρ_{m_i} = m_i^n + a₁ m_i^{n−1} + c m_i^{n−2}` at two tensor powers.
pub fn tyz_a1_estimate(rho_m1: f64, rho_m2: f64, m1: u32, m2: u32, n: u32) -> Result<A1Estimate> {
    if m1 == m2 || m1 == 0 || m2 == 0 {
        return Err(Error::invalid("a₁ extraction needs two distinct positive tensor powers"));
    }
    let c = tyz_coefficients(&[(m1, rho_m1), (m2, rho_m2)], n)?;
    Ok(A1Estimate { a1: c[0], residual: c[1] })
}

/// Coefficients `a₁..a_K` of `ρ_m = m^n + Σ_i a_i m^{n−i}` from `K` samples.
pub fn tyz_coefficients(samples: &[(u32, f64)], n: u32) -> Result<Vec<f64>> {
    let k = samples.len();
    if k == 0 {
        return Err(Error::invalid("no samples"));
    }
    let a = DMatrix::from_fn(k, k, |row, col| {
        let m = samples[row].0 as f64;
        m.powi(n as i32 - 1 - col as i32)
    });
    let b = DVector::from_fn(k, |row, _| {
        let (m, rho) = samples[row];
        rho - (m as f64).powi(n as i32)
    });
    a.lu()
        .solve(&b)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::compute("singular a₁ system: tensor powers must be distinct"))
}

/// Scalar curvature `S = K/(2π)` of a profile, with `K = −ψ''/ψ`. Normalised so
/// the round sphere of area 1 has `S = 2`. Cone poles report `+∞`.
pub fn scalar_curvature_profile(profile: &RevolutionProfile, r: f64) -> Result<f64> {
    let l = profile.length();
    if !(0.0..=l).contains(&r) {
        return Err(Error::invalid(format!("radius {r} outside [0, {l}]")));
    }
    let (s0, s1) = profile.cone_slopes();
    let at_left = r <= 1e-9 * l;
    let at_right = r >= l * (1.0 - 1e-9);
    if (at_left && (s0 - 1.0).abs() > 1e-9) || (at_right && (s1 - 1.0).abs() > 1e-9) {
        return Ok(f64::INFINITY);
    }
    let r = r.clamp(1e-6 * l, l * (1.0 - 1e-6));
    let j = profile.jet(r);
    Ok(-j.d2 / j.value / (2.0 * PI))
}

fn lap4(f: &impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> f64 {
    let d2 = |g: &dyn Fn(f64) -> f64| (-g(2.0 * h) + 16.0 * g(h) - 30.0 * g(0.0) + 16.0 * g(-h) - g(-2.0 * h)) / (12.0 * h * h);
    d2(&|t| f(x + t, y)) + d2(&|t| f(x, y + t))
}

/// Scalar curvature of the perturbed metric at `z = x + iy`, from
/// `K = −Δ log g / (2g)` with a fourth-order difference Laplacian.
pub fn scalar_curvature_perturbed(pert: &PerturbedPotential, x: f64, y: f64) -> f64 {
    let lg = |a: f64, b: f64| pert.density(a, b).ln();
    let k = -lap4(&lg, x, y, 1e-3) / (2.0 * pert.density(x, y));
    k / (2.0 * PI)
}

/// Volume-normalised `‖m^{−n}ρ − 1‖_{L^p}` over samples with `r ≤ radius`.
/// `p = ∞` takes the maximum over every sample in the region.
pub fn lp_deviation(field: &KernelField, p: f64, radius: f64, n: u32) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::invalid("p must be at least 1"));
    }
    let scale = (field.m as f64).powi(n as i32);
    let inside: Vec<_> = field.samples.iter().filter(|s| s.r <= radius).collect();
    if inside.is_empty() {
        return Err(Error::invalid("region contains no samples"));
    }
    let dev = |v: f64| (v / scale - 1.0).abs();
    if p.is_infinite() {
        return Ok(inside.iter().map(|s| dev(s.value)).fold(0.0, f64::max));
    }
    let vol: f64 = inside.iter().map(|s| s.weight).sum();
    if !(vol > 0.0) {
        return Err(Error::invalid("region has no quadrature weight"));
    }
    let acc: f64 = inside.iter().map(|s| s.weight * dev(s.value).powf(p)).sum();
    Ok((acc / vol).powf(1.0 / p))
}

/// `sup |log ρ_m| / m` over the samples.
pub fn fs_current_sup(field: &KernelField, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("m must be positive"));
    }
    if let Some(s) = field.samples.iter().find(|s| !(s.value > 0.0)) {
        return Err(Error::invalid(format!("kernel value {} is not positive", s.value)));
    }
    Ok(field.samples.iter().map(|s| s.value.ln().abs()).fold(0.0, f64::max) / m as f64)
}

/// Minimum of the flat ℂ/ℤ₃ kernel along a ray: the blow-up floor of the cone family.
pub fn flat_cone_floor() -> f64 {
    let w = make_cyclic_weights(&[(1, 3)]).expect("valid weights");
    min_on_ray(&w, &[1.0], 3.0, 3000).expect("valid ray").1
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: u32,
    pub m: u32,
    pub inf_norm: f64,
    pub sup_norm: f64,
    pub argmin_r: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionReport {
    pub epsilon: f64,
    pub rows: Vec<SweepRow>,
}

/// A cell witnesses the counterexample when the normalised infimum sits at
/// least `ε/2` below 1 within `3 m^{−1/2}` of the cone pole.
pub fn sweep_verdict(inf_norm: f64, argmin_r: f64, m: u32, epsilon: f64) -> bool {
    inf_norm <= 1.0 - epsilon / 2.0 && argmin_r <= 3.0 / (m as f64).sqrt()
}

/// Infimum, its location, and the supremum of `ρ/m` within `window` of the pole.
pub fn kernel_extremes(kernel: &RevolutionKernel, window: f64) -> (f64, f64, f64) {
    let l = kernel.length();
    let m = kernel.m as f64;
    let mut rs: Vec<f64> = (0..=4000).map(|i| l * i as f64 / 4000.0).collect();
    rs.extend((0..=2000).map(|i| window.min(l) * i as f64 / 2000.0));
    rs.sort_by(|a, b| a.total_cmp(b));
    rs.dedup();
    let vals: Vec<f64> = rs.par_iter().map(|&r| kernel.rho(r) / m).collect();
    let mut best = 0;
    let mut sup = f64::NEG_INFINITY;
    for (i, (&r, &v)) in rs.iter().zip(&vals).enumerate() {
        if v < vals[best] {
            best = i;
        }
        if r <= window {
            sup = sup.max(v);
        }
    }
    let lo = rs[best.saturating_sub(1)];
    let hi = rs[(best + 1).min(rs.len() - 1)];
    let (r, v) = golden_section(|r| kernel.rho(r) / m, lo, hi, 1e-10 * l);
    let (argmin, inf) = if v < vals[best] { (r, v) } else { (rs[best], vals[best]) };
    (inf, argmin, sup)
}

pub fn sweep_cell(k: u32, m: u32, epsilon: f64) -> Result<SweepRow> {
    let profile = rescale_to_area(&RevolutionProfile::cone_approx(k)?, 1)?;
    let kernel = RevolutionKernel::new(&profile, m)?;
    let window = 3.0 / (m as f64).sqrt();
    let (inf_norm, argmin_r, sup_norm) = kernel_extremes(&kernel, window);
    let radius = profile.length().min(1.0);
    let field = kernel.quadrature_field(radius, 256);
    Ok(SweepRow {
        k,
        m,
        inf_norm,
        sup_norm,
        argmin_r,
        l1: lp_deviation(&field, 1.0, radius, 1)?,
        l2: lp_deviation(&field, 2.0, radius, 1)?,
        linf: lp_deviation(&field, f64::INFINITY, radius, 1)?,
        verdict: sweep_verdict(inf_norm, argmin_r, m, epsilon),
    })
}

/// Runs every `(k, m)` cell of the cone family.
pub fn cone_sweep(ks: &[u32], ms: &[u32]) -> Result<ExpansionReport> {
    if ks.is_empty() || ms.is_empty() {
        return Err(Error::invalid("cone sweep needs at least one k and one m"));
    }
    if ks.contains(&0) || ms.contains(&0) {
        return Err(Error::invalid("k and m must be positive"));
    }
    let epsilon = 1.0 - flat_cone_floor();
    let cells: Vec<(u32, u32)> = ks.iter().flat_map(|&k| ms.iter().map(move |&m| (k, m))).collect();
    let rows = cells.par_iter().map(|&(k, m)| sweep_cell(k, m, epsilon)).collect::<Result<Vec<_>>>()?;
    Ok(ExpansionReport { epsilon, rows })
}

pub const SWEEP_HEADER: &str = "k,m,inf_norm,sup_norm,argmin_r,l1,l2,linf,verdict";

impl ExpansionReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{SWEEP_HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{}\n",
                r.k, r.m, r.inf_norm, r.sup_norm, r.argmin_r, r.l1, r.l2, r.linf, r.verdict
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut s = format!("epsilon = {:.12} (verdict threshold {:.12})\n", self.epsilon, 1.0 - self.epsilon / 2.0);
        for r in &self.rows {
            s.push_str(&format!(
                "k={:<4} m={:<5} inf/m={:.6} at r={:.5} (3/sqrt(m)={:.5})  sup/m={:.4}  L1={:.3e}  witness={}\n",
                r.k,
                r.m,
                r.inf_norm,
                r.argmin_r,
                3.0 / (r.m as f64).sqrt(),
                r.sup_norm,
                r.l1,
                r.verdict
            ));
        }
        s
    }
}

/// Re-derives verdicts from sweep CSV text; returns `(stored, recomputed)` pairs.
pub fn recheck_sweep_csv(text: &str, epsilon: f64) -> Result<Vec<(bool, bool)>> {
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("k,") && !l.is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(Error::invalid(format!("malformed sweep row '{line}'")));
        }
        let num = |i: usize| f[i].parse::<f64>().map_err(|_| Error::invalid(format!("bad field in '{line}'")));
        let m: u32 = f[1].parse().map_err(|_| Error::invalid(format!("bad m in '{line}'")))?;
        let stored: bool = f[8].parse().map_err(|_| Error::invalid(format!("bad verdict in '{line}'")))?;
        out.push((stored, sweep_verdict(num(2)?, num(4)?, m, epsilon)));
    }
    Ok(out)
}

/// Kernel of the perturbed sphere sampled on the chart disc `|z| < radius`.
pub fn perturbed_field(k: u32, m: u32, radius: f64) -> Result<KernelField> {
    let gram = gram_matrix(&GramModel::new(m, PerturbedPotential::new(k)?))?;
    Ok(gram_disc_field(&gram, radius, 48, 128))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LuCheck {
    pub m: u32,
    /// Largest `|a₁ − S/2|` over the probe points, with `a₁` from `(m, 2m)`.
    pub max_error: f64,
}

/// Compares two-point `a₁` estimates against half the scalar curvature.
pub fn lu_check(k: u32, ms: &[u32], points: &[(f64, f64)]) -> Result<Vec<LuCheck>> {
    let pert = PerturbedPotential::new(k)?;
    let mut all: Vec<u32> = ms.iter().flat_map(|&m| [m, 2 * m]).collect();
    all.sort();
    all.dedup();
    let grams = all
        .par_iter()
        .map(|&m| gram_matrix(&GramModel::new(m, pert)).map(|g| (m, g)))
        .collect::<Result<Vec<_>>>()?;
    let rho = |m: u32, x: f64, y: f64| rho_gram(&grams.iter().find(|g| g.0 == m).unwrap().1, x, y);
    ms.iter()
        .map(|&m| {
            let mut max_error: f64 = 0.0;
            for &(x, y) in points {
                let est = tyz_a1_estimate(rho(m, x, y), rho(2 * m, x, y), m, 2 * m, 1)?;
                max_error = max_error.max((est.a1 - scalar_curvature_perturbed(&pert, x, y) / 2.0).abs());
            }
            Ok(LuCheck { m, max_error })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a1_on_exact_models() {
        let e = tyz_a1_estimate(11.0, 21.0, 10, 20, 1).unwrap();
        assert!((e.a1 - 1.0).abs() < 1e-12 && e.residual.abs() < 1e-10);
        let e = tyz_a1_estimate(132.0, 462.0, 10, 20, 2).unwrap();
        assert!((e.a1 - 3.0).abs() < 1e-12);
        let e = tyz_a1_estimate(100.0, 400.0, 10, 20, 2).unwrap();
        assert!(e.a1.abs() < 1e-12);
        assert!(tyz_a1_estimate(1.0, 1.0, 5, 5, 1).is_err());
    }

    #[test]
    fn curvature_of_models() {
        let round = RevolutionProfile::round_of_degree(1);
        for r in [0.0, 0.2, 0.5] {
            assert!((scalar_curvature_profile(&round, r).unwrap() - 2.0).abs() < 1e-6);
        }
        let lim = RevolutionProfile::cone_limit();
        assert!((scalar_curvature_profile(&lim, 1.0).unwrap() * 2.0 * PI - 1.0).abs() < 1e-12);
        assert_eq!(scalar_curvature_profile(&lim, 0.0).unwrap(), f64::INFINITY);
        let flat = scalar_curvature_perturbed(&PerturbedPotential::none(), 0.3, 0.4);
        assert!((flat - 2.0).abs() < 1e-6);
    }

    #[test]
    fn round_sphere_statistics() {
        let p = RevolutionProfile::round_of_degree(1);
        let k = RevolutionKernel::new(&p, 10).unwrap();
        let f = k.quadrature_field(p.length(), 32);
        for q in [1.0, 2.0, f64::INFINITY] {
            assert!((lp_deviation(&f, q, 1.0, 1).unwrap() - 0.1).abs() < 1e-9);
        }
        assert!((fs_current_sup(&f, 10).unwrap() - 11f64.ln() / 10.0).abs() < 1e-10);
        assert!(lp_deviation(&f, 1.0, -1.0, 1).is_err());
    }

    #[test]
    fn floor_value() {
        assert!((flat_cone_floor() - 0.973420066523580510).abs() < 1e-12);
    }
}
