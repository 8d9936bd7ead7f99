//! Bergman kernel of the flat orbifold ℂⁿ/ℤ_q with weight `e^{−π|z|²}`.

use crate::error::{Error, Result};
use crate::models::CyclicWeights;
use crate::numeric::{ln_factorial, logsumexp};
use crate::quadrature::golden_section;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Largest number of admissible indices the oracle will enumerate.
pub const MAX_ORACLE_INDICES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedValue {
    pub rho: f64,
    /// `|Σ_j Im(term_j)|` of the unpaired sum; should sit at rounding level.
    pub imag_residue: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub rho: f64,
    /// Rigorous upper bound on the omitted part of the series.
    pub tail_bound: f64,
    pub cap: usize,
    pub indices: usize,
}

fn squared_moduli(w: &CyclicWeights, z: &[Complex64]) -> Result<Vec<f64>> {
    if z.len() != w.n() {
        return Err(Error::invalid(format!("point has {} coordinates but weights have {}", z.len(), w.n())));
    }
    Ok(z.iter().map(|c| c.norm_sqr()).collect())
}

/// Closed form from squared moduli `s_l = |z_l|²`.
pub fn rho_closed_s(w: &CyclicWeights, s: &[f64]) -> ClosedValue {
    let q = w.q();
    let term = |j: i64| -> Complex64 {
        let mut e = Complex64::new(0.0, 0.0);
        for (l, &sl) in s.iter().enumerate() {
            let th = w.angle(j, l);
            e += sl * Complex64::new(th.cos() - 1.0, th.sin());
        }
        (PI * e).exp()
    };
    let mut rho = 1.0;
    let mut imag = 0.0;
    for j in 1..=(q - 1) / 2 {
        let t = term(j);
        rho += 2.0 * t.re;
        imag += t.im + term(q - j).im;
    }
    if q % 2 == 0 {
        let t = term(q / 2);
        rho += t.re;
        imag += t.im;
    }
    ClosedValue { rho, imag_residue: imag.abs() }
}

/// `ρ(z) = e^{−π|z|²} Σ_{j<q} exp(π Σ_l |z_l|² e^{2πi j p_l/q_l})`, evaluated
/// as `Σ_j exp(π Σ_l s_l (e^{iθ} − 1))` so nothing overflows.
pub fn rho_closed(w: &CyclicWeights, z: &[Complex64]) -> Result<ClosedValue> {
    Ok(rho_closed_s(w, &squared_moduli(w, z)?))
}

/// Multi-indices `j` with `|j| ≤ cap` and `Σ j_l p_l/q_l ∈ ℤ`, in graded lexicographic order.
pub fn admissible_indices(w: &CyclicWeights, cap: usize) -> Vec<Vec<u32>> {
    let q = w.q();
    let coeff: Vec<i64> = w.pairs().iter().map(|&(p, ql)| p * (q / ql)).collect();
    let n = w.n();
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    for deg in 0..=cap {
        compositions(deg as u32, 0, &mut cur, &mut |j| {
            let s: i64 = j.iter().zip(&coeff).map(|(&a, &c)| a as i64 * c).sum();
            if s.rem_euclid(q) == 0 {
                out.push(j.to_vec());
            }
        });
    }
    out
}

fn compositions(rem: u32, pos: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if pos + 1 == cur.len() {
        cur[pos] = rem;
        f(cur);
        return;
    }
    for a in (0..=rem).rev() {
        cur[pos] = a;
        compositions(rem - a, pos + 1, cur, f);
    }
    cur[pos] = 0;
}

/// Bound on `q e^{−λ} Σ_{N>cap} λ^N/N!` with `λ = π|z|²` (multinomial identity).
pub fn oracle_tail_bound(q: i64, lambda: f64, cap: usize) -> f64 {
    let n1 = (cap + 1) as f64;
    if lambda >= n1 + 1.0 {
        return f64::INFINITY;
    }
    let log_term = if lambda == 0.0 { f64::NEG_INFINITY } else { n1 * lambda.ln() - ln_factorial(cap as u64 + 1) };
    (q as f64) * (log_term - lambda).exp() / (1.0 - lambda / (n1 + 1.0))
}

/// Truncated invariant-monomial expansion of the kernel.
pub fn rho_oracle(w: &CyclicWeights, z: &[Complex64], cap: usize) -> Result<OracleValue> {
    let s = squared_moduli(w, z)?;
    let total: f64 = s.iter().sum();
    let idx = admissible_indices(w, cap);
    if idx.len() > MAX_ORACLE_INDICES {
        return Err(Error::compute(format!(
            "degree cap {cap} needs {} indices (limit {MAX_ORACLE_INDICES})",
            idx.len()
        )));
    }
    let logs: Vec<f64> = idx
        .iter()
        .map(|j| {
            let mut acc = 0.0;
            for (&jl, &sl) in j.iter().zip(&s) {
                if jl == 0 {
                    continue;
                }
                if sl == 0.0 {
                    return f64::NEG_INFINITY;
                }
                acc += jl as f64 * (PI * sl).ln() - ln_factorial(jl as u64);
            }
            acc
        })
        .collect();
    let q = w.q();
    let rho = ((q as f64).ln() - PI * total + logsumexp(&logs)).exp();
    Ok(OracleValue { rho, tail_bound: oracle_tail_bound(q, PI * total, cap), cap, indices: idx.len() })
}

/// Smallest degree cap whose tail bound is below `tol`.
pub fn cap_for_tolerance(w: &CyclicWeights, z: &[Complex64], tol: f64) -> Result<usize> {
    let s = squared_moduli(w, z)?;
    let lambda = PI * s.iter().sum::<f64>();
    let mut cap = 0;
    while oracle_tail_bound(w.q(), lambda, cap) >= tol {
        cap += 1;
        if cap > 100_000 {
            return Err(Error::compute("no degree cap reaches the requested tail tolerance"));
        }
    }
    Ok(cap)
}

/// Oracle at the smallest cap meeting `tol`.
pub fn rho_oracle_tol(w: &CyclicWeights, z: &[Complex64], tol: f64) -> Result<OracleValue> {
    let cap = cap_for_tolerance(w, z, tol)?;
    rho_oracle(w, z, cap)
}

/// `σᵃ(z)`.
pub fn apply_generator(w: &CyclicWeights, z: &[Complex64], a: i64) -> Vec<Complex64> {
    z.iter().enumerate().map(|(l, &zl)| zl * Complex64::from_polar(1.0, w.angle(a, l))).collect()
}

fn ray_point(direction: &[f64], t: f64) -> Vec<f64> {
    direction.iter().map(|&r| t * t * r).collect()
}

/// Minimum of `t ↦ ρ(t√r)` on `(0, t_max]` by a grid scan and golden-section refinement.
pub fn min_on_ray(w: &CyclicWeights, direction: &[f64], t_max: f64, nodes: usize) -> Result<(f64, f64)> {
    if !(t_max > 0.0) {
        return Err(Error::invalid("t_max must be positive"));
    }
    if direction.len() != w.n() || direction.iter().any(|&r| !(r >= 0.0)) || direction.iter().all(|&r| r == 0.0) {
        return Err(Error::invalid("direction must be nonnegative, nonzero and of length n"));
    }
    let nodes = nodes.max(2);
    let f = |t: f64| rho_closed_s(w, &ray_point(direction, t)).rho;
    let vals: Vec<(f64, f64)> = (1..=nodes)
        .into_par_iter()
        .map(|i| {
            let t = t_max * i as f64 / nodes as f64;
            (t, f(t))
        })
        .collect();
    let best = vals.iter().enumerate().fold(0, |b, (i, v)| if v.1 < vals[b].1 { i } else { b });
    let h = t_max / nodes as f64;
    let lo = (vals[best].0 - h).max(0.0);
    let hi = (vals[best].0 + h).min(t_max);
    let (t, r) = golden_section(f, lo, hi, 1e-8);
    Ok(if r <= vals[best].1 { (t, r) } else { vals[best] })
}

/// Samples `(t, ρ)` along the ray for CSV output.
pub fn ray_scan(w: &CyclicWeights, direction: &[f64], t_max: f64, nodes: usize) -> Result<Vec<(f64, f64)>> {
    min_on_ray(w, direction, t_max, 2)?;
    Ok((0..=nodes)
        .into_par_iter()
        .map(|i| {
            let t = t_max * i as f64 / nodes as f64;
            (t, rho_closed_s(w, &ray_point(direction, t)).rho)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::make_cyclic_weights;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn origin_and_trivial_group() {
        let w = make_cyclic_weights(&[(1, 3), (1, 5)]).unwrap();
        assert_eq!(rho_closed(&w, &[c(0.0), c(0.0)]).unwrap().rho, 15.0);
        let one = make_cyclic_weights(&[(1, 1)]).unwrap();
        assert!((rho_closed(&one, &[c(2.3)]).unwrap().rho - 1.0).abs() < 1e-15);
        assert!(rho_closed(&w, &[c(0.0)]).is_err());
    }

    #[test]
    fn order_two() {
        let w = make_cyclic_weights(&[(1, 2)]).unwrap();
        let v = rho_closed(&w, &[c(1.0)]).unwrap().rho;
        assert!((v - 1.001867442731707989).abs() < 1e-15);
    }

    #[test]
    fn admissible_lists() {
        let w = make_cyclic_weights(&[(1, 3)]).unwrap();
        assert_eq!(admissible_indices(&w, 7), vec![vec![0], vec![3], vec![6]]);
        let w = make_cyclic_weights(&[(1, 2)]).unwrap();
        assert_eq!(admissible_indices(&w, 4), vec![vec![0], vec![2], vec![4]]);
    }

    #[test]
    fn poisson_partial_sums_increase() {
        let w = make_cyclic_weights(&[(1, 1)]).unwrap();
        let mut prev = 0.0;
        for cap in 0..30 {
            let v = rho_oracle(&w, &[c(1.2)], cap).unwrap().rho;
            assert!(v > prev && v <= 1.0 + 1e-15);
            prev = v;
        }
        assert!((prev - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ray_min_for_trivial_and_order_two() {
        let one = make_cyclic_weights(&[(1, 1)]).unwrap();
        let (_, r) = min_on_ray(&one, &[1.0], 2.0, 50).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
        let two = make_cyclic_weights(&[(1, 2)]).unwrap();
        let (t, r) = min_on_ray(&two, &[1.0], 1.5, 50).unwrap();
        assert!((t - 1.5).abs() < 1e-6);
        assert!((r - (1.0 + (-2.0 * PI * 2.25f64).exp())).abs() < 1e-12);
        assert!(min_on_ray(&two, &[1.0], 0.0, 50).is_err());
    }
}
