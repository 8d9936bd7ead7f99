//! Quadrature rules and 1-D searches used across the crate.

use crate::error::{Error, Result};
use gauss_quad::legendre::GaussLegendre;
use std::num::NonZeroUsize;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// One 21-point Kronrod panel: (estimate, |Kronrod − Gauss|).
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[10];
    let mut rg = 0.0;
    for i in 0..10 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[i] * s;
        if i % 2 == 1 {
            rg += WG[i / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Globally adaptive Gauss–Kronrod integration over `[a, b]`, optionally pre-split at `breaks`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(|x, y| x.total_cmp(y));
    let mut panels: Vec<(f64, f64, f64, f64)> = pts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (v, e) = gk21(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    for _ in 0..4000 {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::compute("adaptive quadrature: interval underflow"));
        }
        for (x0, x1) in [(lo, mid), (mid, hi)] {
            let (v, e) = gk21(&f, x0, x1);
            panels.push((x0, x1, v, e));
        }
    }
    Err(Error::compute("adaptive quadrature did not converge"))
}

/// Gauss–Legendre rule on [-1, 1] with precomputed interpolation and
/// indefinite-integration data for the same nodes.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Barycentric weights of the nodes.
    pub bary: Vec<f64>,
    /// `cumulative[i][j] = ∫_{-1}^{x_i} ℓ_j(t) dt`.
    pub cumulative: Vec<Vec<f64>>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let bary: Vec<f64> = (0..n)
            .map(|j| {
                let p: f64 = (0..n).filter(|&k| k != j).map(|k| nodes[j] - nodes[k]).product();
                1.0 / p
            })
            .collect();
        let mut rule = GaussRule { nodes, weights, bary, cumulative: Vec::new() };
        let cumulative = (0..n)
            .map(|i| {
                let (lo, hi) = (-1.0, rule.nodes[i]);
                let half = 0.5 * (hi - lo);
                let mut row = vec![0.0; n];
                for q in 0..n {
                    let t = lo + half * (rule.nodes[q] + 1.0);
                    let basis = rule.lagrange(t);
                    for j in 0..n {
                        row[j] += half * rule.weights[q] * basis[j];
                    }
                }
                row
            })
            .collect();
        rule.cumulative = cumulative;
        rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values of all Lagrange basis polynomials at `t ∈ [-1, 1]`.
    pub fn lagrange(&self, t: f64) -> Vec<f64> {
        let n = self.nodes.len();
        if let Some(i) = self.nodes.iter().position(|&x| x == t) {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            return v;
        }
        let terms: Vec<f64> = (0..n).map(|j| self.bary[j] / (t - self.nodes[j])).collect();
        let s: f64 = terms.iter().sum();
        terms.into_iter().map(|x| x / s).collect()
    }

    /// Barycentric interpolation of node values at `t ∈ [-1, 1]`.
    pub fn interpolate(&self, values: &[f64], t: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..self.nodes.len() {
            let d = t - self.nodes[j];
            if d == 0.0 {
                return values[j];
            }
            let c = self.bary[j] / d;
            num += c * values[j];
            den += c;
        }
        num / den
    }

    /// `∫_a^b f` with this rule mapped to `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        h * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(c + h * x))
            .sum::<f64>()
    }
}

/// Golden-section minimisation of a unimodal `f` on `[a, b]` down to `|Δx| < tol`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(c, fc), (d, fd), (x, fx)]
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .unwrap()
}

/// Root of a function with a sign change on `[a, b]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= tol || mid <= a || mid >= b {
            return mid;
        }
        let fm = f(mid);
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
