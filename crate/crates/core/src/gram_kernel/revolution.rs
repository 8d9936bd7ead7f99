//! Bergman kernels of rotationally invariant metrics on the 2-sphere.
//! Rotation makes the monomials `z^k` orthogonal, so the kernel is a sum of
//! `md + 1` squared monomials divided by their norms.

use super::potential::{build_potential, build_potential_with, PotentialTable, TableOptions, NODES_PER_CELL};
use super::{FieldStats, KernelField, Sample};
use crate::error::{Error, Result};
use crate::models::RevolutionProfile;
use crate::numeric::logsumexp;
use crate::quadrature::integrate;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

/// `ln N_k` for `k = 0..md`.
#[derive(Debug, Clone)]
pub struct MonomialNorms {
    pub log: Vec<f64>,
}

impl MonomialNorms {
    pub fn value(&self, k: usize) -> f64 {
        self.log[k].exp()
    }
}

fn cell_log_mass(table: &PotentialTable, m: u32, k: u32, c: usize) -> f64 {
    let g = NODES_PER_CELL;
    let terms: Vec<f64> = (c * g..(c + 1) * g)
        .map(|i| table.exponent_node(m, k, i) + (2.0 * PI * table.psi[i] * table.weight[i]).ln())
        .collect();
    logsumexp(&terms)
}

/// `N_k = 2π ∫ e^{2ku − 2πmφ} ψ dr`, summed cell by cell outward from the
/// peak at `A = k/m` until further cells add less than `1e-12` relatively.
pub fn monomial_norms(table: &PotentialTable, m: u32) -> Result<MonomialNorms> {
    if m == 0 {
        return Err(Error::invalid("tensor power m must be at least 1"));
    }
    let md = m * table.degree;
    let ncell = table.cells();
    let cut = (1e-12f64).ln() - 10.0;
    let log: Vec<f64> = (0..=md)
        .into_par_iter()
        .map(|k| {
            let peak = table.cell_of_area(k as f64 / m as f64);
            let mut parts = vec![cell_log_mass(table, m, k, peak)];
            let mut total = parts[0];
            for dir in [-1i64, 1] {
                let mut c = peak as i64 + dir;
                let mut prev = parts[0];
                while c >= 0 && (c as usize) < ncell {
                    let v = cell_log_mass(table, m, k, c as usize);
                    parts.push(v);
                    total = logsumexp(&[total, v]);
                    if v < total + cut && v <= prev {
                        break;
                    }
                    prev = v;
                    c += dir;
                }
            }
            logsumexp(&parts)
        })
        .collect();
    if let Some(k) = log.iter().position(|x| !x.is_finite()) {
        return Err(Error::compute(format!("monomial norm N_{k} is not finite")));
    }
    Ok(MonomialNorms { log })
}

/// Precomputed kernel `ρ_m` of a profile.
#[derive(Debug, Clone)]
pub struct RevolutionKernel {
    pub table: Arc<PotentialTable>,
    pub m: u32,
    pub norms: MonomialNorms,
}

impl RevolutionKernel {
    pub fn new(profile: &RevolutionProfile, m: u32) -> Result<Self> {
        Self::from_table(Arc::new(build_potential(profile)?), m)
    }

    pub fn with_options(profile: &RevolutionProfile, m: u32, opt: TableOptions) -> Result<Self> {
        Self::from_table(Arc::new(build_potential_with(profile, opt)?), m)
    }

    pub fn from_table(table: Arc<PotentialTable>, m: u32) -> Result<Self> {
        let norms = monomial_norms(&table, m)?;
        Ok(RevolutionKernel { table, m, norms })
    }

    pub fn md(&self) -> u32 {
        self.m * self.table.degree
    }

    /// `ln(|z^k|²_{h^m} / N_k)` at radius `r`.
    pub fn log_term(&self, k: u32, r: f64) -> f64 {
        self.table.exponent_at(self.m, k, r) - self.norms.log[k as usize]
    }

    pub fn log_rho(&self, r: f64) -> f64 {
        let terms: Vec<f64> = (0..=self.md()).map(|k| self.log_term(k, r)).collect();
        logsumexp(&terms)
    }

    pub fn rho(&self, r: f64) -> f64 {
        self.log_rho(r).exp()
    }

    pub fn length(&self) -> f64 {
        self.table.length()
    }

    /// `∫ ρ dA` by adaptive Gauss–Kronrod, independent of the table nodes.
    pub fn integral(&self) -> Result<f64> {
        let l = self.length();
        let mut breaks = self.table.profile.breakpoints();
        breaks.extend((1..32).map(|i| l * i as f64 / 32.0));
        integrate(
            |r| self.rho(r) * 2.0 * PI * self.table.profile.psi(r),
            0.0,
            l,
            &breaks,
            1e-12,
            1e-11,
        )
    }

    /// Kernel values at radii, with `∫ρ dA` recorded.
    pub fn field(&self, radii: &[f64]) -> Result<KernelField> {
        let l = self.length();
        if let Some(r) = radii.iter().find(|&&r| !(0.0..=l).contains(&r)) {
            return Err(Error::invalid(format!("radius {r} outside [0, {l}]")));
        }
        let samples: Vec<Sample> = radii
            .par_iter()
            .map(|&r| Sample { r, x: r, y: 0.0, value: self.rho(r), weight: 0.0 })
            .collect();
        let mut field = KernelField::new(self.m, samples);
        field.stats.integral = Some(self.integral()?);
        Ok(field)
    }

    /// Samples on a composite Gauss grid over `r ≤ r_max` with area weights,
    /// suitable for L^p statistics.
    pub fn quadrature_field(&self, r_max: f64, panels: usize) -> KernelField {
        let l = self.length();
        let r_max = r_max.min(l);
        let rule = crate::quadrature::GaussRule::new(12);
        let mut edges: Vec<f64> = (0..=panels).map(|i| r_max * i as f64 / panels as f64).collect();
        edges.extend(self.table.profile.breakpoints().into_iter().filter(|&b| b < r_max));
        edges.sort_by(|a, b| a.total_cmp(b));
        edges.dedup();
        let pts: Vec<(f64, f64)> = edges
            .windows(2)
            .flat_map(|e| {
                let (a, b) = (e[0], e[1]);
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(move |(&x, &w)| (0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w))
                    .collect::<Vec<_>>()
            })
            .collect();
        let samples: Vec<Sample> = pts
            .par_iter()
            .map(|&(r, w)| Sample {
                r,
                x: r,
                y: 0.0,
                value: self.rho(r),
                weight: w * 2.0 * PI * self.table.profile.psi(r),
            })
            .collect();
        KernelField::new(self.m, samples)
    }
}

/// `ρ_m` at the given radii.
pub fn rho_revolution(profile: &RevolutionProfile, m: u32, radii: &[f64]) -> Result<KernelField> {
    RevolutionKernel::new(profile, m)?.field(radii)
}

#[derive(Debug, Clone)]
pub struct PeakSection {
    /// Coefficients of the unit peak section in the orthonormal monomial basis.
    pub coefficients: Vec<f64>,
    /// Mass outside the band `|r − r₀| ≤ R`.
    pub tail_mass: f64,
    pub rho_center: f64,
}

/// Peak section at radius `center` and its L² mass outside the band
/// `|r − center| ≤ radius`. At a pole the band is the geodesic ball.
pub fn peak_section_tail(kernel: &RevolutionKernel, center: f64, radius: f64) -> Result<PeakSection> {
    let l = kernel.length();
    if !(0.0..=l).contains(&center) || !(radius >= 0.0) {
        return Err(Error::invalid("peak section centre must lie in [0, L] and radius must be nonnegative"));
    }
    let md = kernel.md();
    let log_rho = kernel.log_rho(center);
    let logc: Vec<f64> = (0..=md).map(|k| kernel.log_term(k, center) - log_rho).collect();
    let coefficients: Vec<f64> = logc.iter().map(|&c| (0.5 * c).exp()).collect();
    let density = |r: f64| -> f64 {
        let terms: Vec<f64> = (0..=md).map(|k| logc[k as usize] + kernel.log_term(k, r)).collect();
        logsumexp(&terms).exp() * 2.0 * PI * kernel.table.profile.psi(r)
    };
    let mut breaks = kernel.table.profile.breakpoints();
    breaks.extend((1..64).map(|i| l * i as f64 / 64.0));
    let mut tail = 0.0;
    let lo = center - radius;
    let hi = center + radius;
    if lo > 0.0 {
        tail += integrate(density, 0.0, lo, &breaks, 1e-14, 1e-10)?;
    }
    if hi < l {
        tail += integrate(density, hi, l, &breaks, 1e-14, 1e-10)?;
    }
    Ok(PeakSection { coefficients, tail_mass: tail, rho_center: log_rho.exp() })
}

impl KernelField {
    pub fn new(m: u32, samples: Vec<Sample>) -> Self {
        let stats = FieldStats::of(&samples);
        KernelField { m, samples, stats }
    }
}

impl FieldStats {
    fn of(samples: &[Sample]) -> Self {
        let mut st = FieldStats { inf: f64::INFINITY, sup: f64::NEG_INFINITY, argmin: f64::NAN, integral: None };
        for s in samples {
            if s.value < st.inf {
                st.inf = s.value;
                st.argmin = s.r;
            }
            st.sup = st.sup.max(s.value);
        }
        st
    }
}
