//! Kähler potential of a surface of revolution.
//!
//! With area `A(r) = 2π∫₀^r ψ` and conformal coordinate `u = ∫dr/ψ`, the
//! potential satisfies `φ_u = A/π` (so `φ_uu = 2ψ²`). Instead of `u` itself,
//! which is log-singular at both poles, the table stores two potentials that
//! are each regular at one pole:
//!
//! * `φ' = A/(πψ)`, regular at `r = 0`;
//! * `w' = (d − A)/ψ`, regular at `r = L`, and `w = d·u − πφ`.
//!
//! The monomial exponent `2ku − 2πmφ` becomes `(2k/d)w − (2π/d)(md − k)φ`,
//! whose singular parts only ever enter with a coefficient that sends it to −∞.

use crate::error::{Error, Result};
use crate::models::RevolutionProfile;
use crate::quadrature::{bisect, GaussRule};
use std::f64::consts::PI;
use std::sync::OnceLock;

pub const NODES_PER_CELL: usize = 16;

pub(crate) fn cell_rule() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(NODES_PER_CELL))
}

#[derive(Debug, Clone, Copy)]
pub struct TableOptions {
    /// Number of uniform cells spanning the profile.
    pub cells: usize,
    /// Innermost cell edge as a fraction of the length.
    pub pole_offset: f64,
    /// Growth factor of the geometric cells near the poles.
    pub ratio: f64,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { cells: 2048, pole_offset: 1e-12, ratio: 1.25 }
    }
}

impl TableOptions {
    pub fn refined(self) -> Self {
        TableOptions { cells: self.cells * 2, ratio: self.ratio.sqrt(), ..self }
    }
}

#[derive(Debug, Clone)]
pub struct PotentialTable {
    pub profile: RevolutionProfile,
    pub degree: u32,
    /// Cell edges; node `c·G + i` is the `i`-th Gauss node of cell `c`.
    pub edges: Vec<f64>,
    pub r: Vec<f64>,
    pub psi: Vec<f64>,
    pub area: Vec<f64>,
    pub phi: Vec<f64>,
    pub w: Vec<f64>,
    /// Quadrature weight of each node for `∫ · dr`.
    pub weight: Vec<f64>,
    edge_area: Vec<f64>,
    edge_phi: Vec<f64>,
    edge_w: Vec<f64>,
    slopes: (f64, f64),
    pub total_area: f64,
    /// Area-median radius where the gauge `φ = w = 0` is fixed.
    pub r0: f64,
}

fn build_edges(profile: &RevolutionProfile, opt: &TableOptions) -> Vec<f64> {
    let l = profile.length();
    let h = l / opt.cells as f64;
    let mut left = vec![opt.pole_offset * l];
    while left.last().unwrap() * (opt.ratio - 1.0) < h {
        let next = left.last().unwrap() * opt.ratio;
        left.push(next);
    }
    let g = *left.last().unwrap();
    let inner = ((l - 2.0 * g) / h).ceil().max(1.0) as usize;
    let mut edges = left.clone();
    edges.extend((1..inner).map(|i| g + (l - 2.0 * g) * i as f64 / inner as f64));
    edges.extend(left.iter().rev().map(|&x| l - x));
    let lo = edges[0];
    edges.extend(profile.breakpoints().into_iter().filter(|&b| b > lo && b < l - lo));
    edges.sort_by(|a, b| a.total_cmp(b));
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * l);
    edges
}

/// Cumulative integral from the left edge of each cell, at the nodes and cell ends.
fn cumulative(edges: &[f64], f: &[f64], start: f64) -> (Vec<f64>, Vec<f64>) {
    let rule = cell_rule();
    let g = rule.len();
    let mut at_nodes = vec![0.0; f.len()];
    let mut at_edges = vec![start; edges.len()];
    for c in 0..edges.len() - 1 {
        let half = 0.5 * (edges[c + 1] - edges[c]);
        let vals = &f[c * g..(c + 1) * g];
        for i in 0..g {
            let s: f64 = (0..g).map(|j| rule.cumulative[i][j] * vals[j]).sum();
            at_nodes[c * g + i] = at_edges[c] + half * s;
        }
        let full: f64 = (0..g).map(|j| rule.weights[j] * vals[j]).sum();
        at_edges[c + 1] = at_edges[c] + half * full;
    }
    (at_nodes, at_edges)
}

/// Same as [`cumulative`] but integrating from the right end.
fn cumulative_from_right(edges: &[f64], f: &[f64], start: f64) -> (Vec<f64>, Vec<f64>) {
    let rule = cell_rule();
    let g = rule.len();
    let n = edges.len();
    let mut at_nodes = vec![0.0; f.len()];
    let mut at_edges = vec![start; n];
    for c in (0..n - 1).rev() {
        let half = 0.5 * (edges[c + 1] - edges[c]);
        let vals = &f[c * g..(c + 1) * g];
        let full: f64 = (0..g).map(|j| rule.weights[j] * vals[j]).sum();
        for i in 0..g {
            let s: f64 = (0..g).map(|j| (rule.weights[j] - rule.cumulative[i][j]) * vals[j]).sum();
            at_nodes[c * g + i] = at_edges[c + 1] + half * s;
        }
        at_edges[c] = at_edges[c + 1] + half * full;
    }
    (at_nodes, at_edges)
}

pub fn build_potential(profile: &RevolutionProfile) -> Result<PotentialTable> {
    build_potential_with(profile, TableOptions::default())
}

pub fn build_potential_with(profile: &RevolutionProfile, opt: TableOptions) -> Result<PotentialTable> {
    let l = profile.length();
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::invalid("profile has no positive length"));
    }
    let rule = cell_rule();
    let g = rule.len();
    let edges = build_edges(profile, &opt);
    let ncell = edges.len() - 1;
    let mut r = Vec::with_capacity(ncell * g);
    let mut weight = Vec::with_capacity(ncell * g);
    for c in 0..ncell {
        let (a, b) = (edges[c], edges[c + 1]);
        for i in 0..g {
            r.push(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i]);
            weight.push(0.5 * (b - a) * rule.weights[i]);
        }
    }
    let psi: Vec<f64> = r.iter().map(|&x| profile.psi(x)).collect();
    if let Some(i) = psi.iter().position(|&p| !(p > 0.0) || !p.is_finite()) {
        return Err(Error::invalid(format!("psi is not positive at r = {}", r[i])));
    }
    let two_pi_psi: Vec<f64> = psi.iter().map(|&p| 2.0 * PI * p).collect();
    let (e0, e1) = (edges[0], edges[ncell]);
    let cap_left = PI * profile.psi(e0) * e0;
    let cap_right = PI * profile.psi(e1) * (l - e1);
    let (area, edge_area) = cumulative(&edges, &two_pi_psi, cap_left);
    let (comp, edge_comp) = cumulative_from_right(&edges, &two_pi_psi, cap_right);
    let total_area = edge_area[ncell] + cap_right;
    let degree = match profile.degree() {
        Some(d) => d,
        None => {
            let d = total_area.round();
            if d < 1.0 || (total_area - d).abs() > 1e-9 * d {
                return Err(Error::invalid(format!(
                    "profile area {total_area} is not an integer degree; rescale it first"
                )));
            }
            d as u32
        }
    };
    let d = degree as f64;
    if (total_area - d).abs() > 1e-9 * d {
        return Err(Error::compute(format!("profile area {total_area} differs from degree {d}")));
    }
    let dphi: Vec<f64> = area.iter().zip(&psi).map(|(a, p)| a / (PI * p)).collect();
    let dw: Vec<f64> = comp.iter().zip(&psi).map(|(b, p)| b / p).collect();
    let (phi, edge_phi) = cumulative(&edges, &dphi, 0.0);
    let (w, edge_w) = cumulative(&edges, &dw, 0.0);
    let _ = edge_comp;
    let mut table = PotentialTable {
        profile: profile.clone(),
        degree,
        edges,
        r,
        psi,
        area,
        phi,
        w,
        weight,
        edge_area,
        edge_phi,
        edge_w,
        slopes: profile.cone_slopes(),
        total_area,
        r0: 0.0,
    };
    let half = 0.5 * d;
    let r0 = bisect(|x| table.area_at(x) - half, table.edges[0], table.edges[ncell], 1e-15 * l);
    let (p0, w0) = (table.phi_at(r0), table.w_at(r0));
    table.shift_gauge(-p0, -w0);
    table.r0 = r0;
    Ok(table)
}

impl PotentialTable {
    pub fn length(&self) -> f64 {
        self.profile.length()
    }

    pub fn cells(&self) -> usize {
        self.edges.len() - 1
    }

    /// Adds constants to both potentials. The kernel does not depend on this.
    pub fn shift_gauge(&mut self, dphi: f64, dw: f64) {
        self.phi.iter_mut().chain(self.edge_phi.iter_mut()).for_each(|x| *x += dphi);
        self.w.iter_mut().chain(self.edge_w.iter_mut()).for_each(|x| *x += dw);
    }

    fn locate(&self, r: f64) -> Option<(usize, f64)> {
        let n = self.edges.len();
        if r < self.edges[0] || r > self.edges[n - 1] {
            return None;
        }
        let c = self.edges.partition_point(|&e| e <= r).saturating_sub(1).min(n - 2);
        let (a, b) = (self.edges[c], self.edges[c + 1]);
        Some((c, (2.0 * r - a - b) / (b - a)))
    }

    fn interp(&self, v: &[f64], c: usize, t: f64) -> f64 {
        let g = NODES_PER_CELL;
        cell_rule().interpolate(&v[c * g..(c + 1) * g], t)
    }

    pub fn area_at(&self, r: f64) -> f64 {
        match self.locate(r) {
            Some((c, t)) => self.interp(&self.area, c, t),
            None if r < self.edges[0] => PI * self.profile.psi(r) * r.max(0.0),
            None => self.total_area - PI * self.profile.psi(r) * (self.length() - r).max(0.0),
        }
    }

    pub fn phi_at(&self, r: f64) -> f64 {
        let n = self.edges.len() - 1;
        match self.locate(r) {
            Some((c, t)) => self.interp(&self.phi, c, t),
            None if r < self.edges[0] => self.edge_phi[0],
            None => {
                let gap = (self.length() - r).max(0.0);
                let edge_gap = self.length() - self.edges[n];
                if gap == 0.0 {
                    return f64::INFINITY;
                }
                self.edge_phi[n] + self.total_area / (PI * self.slopes.1) * (edge_gap / gap).ln()
            }
        }
    }

    pub fn w_at(&self, r: f64) -> f64 {
        let n = self.edges.len() - 1;
        match self.locate(r) {
            Some((c, t)) => self.interp(&self.w, c, t),
            None if r < self.edges[0] => {
                if r <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                self.edge_w[0] + self.total_area / self.slopes.0 * (r / self.edges[0]).ln()
            }
            None => self.edge_w[n],
        }
    }

    /// Conformal coordinate `u = (w + πφ)/d`.
    pub fn u_at(&self, r: f64) -> f64 {
        (self.w_at(r) + PI * self.phi_at(r)) / self.degree as f64
    }

    /// Conformal factor `λ = ψ²`.
    pub fn lambda_at(&self, r: f64) -> f64 {
        self.profile.psi(r).powi(2)
    }

    /// `φ_u(+∞) − φ_u(−∞)`, which equals `d/π`.
    pub fn potential_slope_span(&self) -> f64 {
        self.total_area / PI
    }

    /// Exponent `2ku − 2πmφ` of the `k`-th monomial at node `i`.
    pub fn exponent_node(&self, m: u32, k: u32, i: usize) -> f64 {
        self.exponent(m, k, self.phi[i], self.w[i])
    }

    pub fn exponent_at(&self, m: u32, k: u32, r: f64) -> f64 {
        let md = (m * self.degree) as f64;
        let kf = k as f64;
        let d = self.degree as f64;
        let wterm = if k == 0 { 0.0 } else { 2.0 * kf / d * self.w_at(r) };
        let pterm = if md == kf { 0.0 } else { 2.0 * PI / d * (md - kf) * self.phi_at(r) };
        wterm - pterm
    }

    fn exponent(&self, m: u32, k: u32, phi: f64, w: f64) -> f64 {
        let md = (m * self.degree) as f64;
        let d = self.degree as f64;
        let kf = k as f64;
        2.0 * kf / d * w - 2.0 * PI / d * (md - kf) * phi
    }

    /// Index of the cell containing the radius where `A = target`.
    pub fn cell_of_area(&self, target: f64) -> usize {
        let c = self.edge_area.partition_point(|&a| a <= target);
        c.saturating_sub(1).min(self.cells() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_sphere_bookkeeping() {
        let p = RevolutionProfile::round_of_degree(1);
        let t = build_potential(&p).unwrap();
        assert!((t.total_area - 1.0).abs() < 1e-13);
        assert!((t.potential_slope_span() - 1.0 / PI).abs() < 1e-12);
        assert!((t.r0 - p.length() / 2.0).abs() < 1e-12);
        let c = p.scale();
        for &r in &[0.05, 0.3, 0.6, 0.85] {
            let x = r / c;
            // FS in u: u = ln tan(x/2), φ = (1/2π) ln(1 + e^{2u}) up to an affine term in u.
            let u = (x / 2.0).tan().ln();
            let fs = (1.0 + (2.0 * u).exp()).ln() / (2.0 * PI);
            let fs0 = 2f64.ln() / (2.0 * PI);
            assert!((t.u_at(r) - u).abs() < 1e-10, "u at {r}");
            assert!((t.phi_at(r) - (fs - fs0)).abs() < 1e-10, "phi at {r}");
        }
    }

    #[test]
    fn phi_is_convex_in_u() {
        let p = crate::models::rescale_to_area(&RevolutionProfile::cone_approx(8).unwrap(), 1).unwrap();
        let t = build_potential(&p).unwrap();
        let us: Vec<f64> = (1..400).map(|i| -6.0 + 12.0 * i as f64 / 400.0).collect();
        let rs: Vec<f64> = us
            .iter()
            .map(|&u| bisect(|r| t.u_at(r) - u, 1e-9, t.length() - 1e-9, 1e-14))
            .collect();
        let phis: Vec<f64> = rs.iter().map(|&r| t.phi_at(r)).collect();
        for i in 1..phis.len() - 1 {
            assert!(phis[i + 1] - 2.0 * phis[i] + phis[i - 1] > -1e-12);
        }
        assert!(build_potential(&RevolutionProfile::cone_approx(8).unwrap()).is_err());
    }
}
