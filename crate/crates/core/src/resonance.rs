//! Resonance certificates: a direction `r ≥ 0` and index `j` for which the
//! `j`-th character dominates the cosine sums, and the point on that ray
//! where the flat orbifold kernel drops below 1.

use crate::error::{Error, Result};
use crate::models::CyclicWeights;
use crate::numeric::{lcm, mod_inverse, two_adic};
use crate::orbifold_kernel::{min_on_ray, rho_closed_s};
use num_complex::Complex64;

pub const MIN_SIN_SUM: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceCertificate {
    pub r: Vec<f64>,
    pub j: i64,
    pub margin: f64,
    pub sin_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub pass: bool,
    pub margin: f64,
    pub argmax: Vec<i64>,
    pub sin_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubunityWitness {
    pub z: Vec<Complex64>,
    pub t: f64,
    pub rho: f64,
    /// Lobe index that produced the witness; `None` if the ray minimiser did.
    pub k: Option<usize>,
}

pub fn cos_sum(w: &CyclicWeights, r: &[f64], k: i64) -> f64 {
    r.iter().enumerate().map(|(l, &rl)| rl * w.angle(k, l).cos()).sum()
}

pub fn sin_sum(w: &CyclicWeights, r: &[f64], k: i64) -> f64 {
    r.iter().enumerate().map(|(l, &rl)| rl * w.angle(k, l).sin()).sum()
}

/// Builds a certificate by induction on the number of coordinates.
///
/// The step splits the coordinates into a "filter" block with `lcm = q'` and
/// one "selector" coordinate whose reduced weight has order `q/q'`. Indices
/// `j` that are multiples of `q'` keep every filter cosine at its maximum;
/// the filter weight `R` is large enough that any other `k` loses more on the
/// filter block than it can gain on the selector, and among multiples of `q'`
/// the selector's own base case picks out `j = j''q'`.
pub fn construct_certificate(w: &CyclicWeights) -> Result<ResonanceCertificate> {
    if w.q() < 3 {
        return Err(Error::invalid("resonance requires q ≥ 3"));
    }
    let idx: Vec<usize> = (0..w.n()).collect();
    let (r, j) = construct(w, &idx)?;
    let v = verify_certificate(w, &r, j);
    Ok(ResonanceCertificate { r, j, margin: v.margin, sin_sum: v.sin_sum })
}

fn construct(w: &CyclicWeights, idx: &[usize]) -> Result<(Vec<f64>, i64)> {
    let pairs = w.pairs();
    let q = idx.iter().fold(1, |acc, &l| lcm(acc, pairs[l].1));
    let mut best: Option<(usize, i64)> = None;
    for &l in idx.iter().filter(|&&l| pairs[l].1 == q) {
        let j = mod_inverse(pairs[l].0, q).expect("coprime by construction");
        if best.map_or(true, |b| j < b.1) {
            best = Some((l, j));
        }
    }
    if let Some((l, j)) = best {
        let mut r = vec![0.0; w.n()];
        r[l] = 1.0;
        return Ok((r, j));
    }
    let t = idx.iter().map(|&l| two_adic(pairs[l].1)).max().unwrap();
    let first = *idx.iter().find(|&&l| two_adic(pairs[l].1) == t).unwrap();
    let mut order = vec![first];
    order.extend(idx.iter().copied().filter(|&l| l != first));
    let (rest, last) = (&order[..order.len() - 1], order[order.len() - 1]);
    let qp = rest.iter().fold(1, |acc, &l| lcm(acc, pairs[l].1));
    if qp == q {
        return construct(w, rest);
    }
    let q2 = q / qp;
    if q2 == 2 {
        return Err(Error::compute(format!(
            "internal error: quotient order 2 for weights {w}; the 2-adic ordering should exclude this"
        )));
    }
    let (p, ql) = pairs[last];
    let g = crate::numeric::gcd(p * qp, ql);
    debug_assert_eq!(ql / g, q2);
    let p2 = ((p * qp) / g).rem_euclid(q2);
    let j2 = mod_inverse(p2, q2).expect("reduced fraction is coprime");
    let j = j2 * qp;
    let gap = 1.0 - (2.0 * std::f64::consts::PI / q2 as f64).cos();
    let min_filter = rest
        .iter()
        .filter(|&&l| pairs[l].1 > 1)
        .map(|&l| 1.0 - (2.0 * std::f64::consts::PI / pairs[l].1 as f64).cos())
        .fold(f64::INFINITY, f64::min);
    let big = (10.0 * gap + 4.0) / min_filter;
    let mut r = vec![0.0; w.n()];
    r[last] = 1.0;
    for &l in rest {
        r[l] = big;
    }
    Ok((r, j))
}

/// Exhaustive check over `k ∈ {1..q−1}`.
pub fn verify_certificate(w: &CyclicWeights, r: &[f64], j: i64) -> Verification {
    let q = w.q();
    let cj = cos_sum(w, r, j);
    let s = sin_sum(w, r, j);
    let mut margin = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let sums: Vec<(i64, f64)> = (1..q).map(|k| (k, cos_sum(w, r, k))).collect();
    for &(k, c) in &sums {
        max = max.max(c);
        if k != j && k != q - j {
            margin = margin.min(cj - c);
        }
    }
    let scale: f64 = r.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
    let argmax: Vec<i64> = sums.iter().filter(|(_, c)| *c >= max - 1e-12 * scale).map(|(k, _)| *k).collect();
    let in_range = (1..q).contains(&j);
    let pass = in_range
        && margin > 0.0
        && s.abs() >= MIN_SIN_SUM
        && argmax.iter().all(|&k| k == j || k == q - j);
    Verification { pass, margin, argmax, sin_sum: s }
}

/// Walks the lobes `t_k² = (2k+1)/|sin_sum|` until the kernel drops below 1,
/// then falls back on a ray minimisation.
pub fn find_subunity_point(
    w: &CyclicWeights,
    cert: &ResonanceCertificate,
    k_max: usize,
) -> Result<SubunityWitness> {
    if w.q() < 3 {
        return Err(Error::invalid("resonance requires q ≥ 3"));
    }
    if cert.r.len() != w.n() {
        return Err(Error::invalid("certificate length does not match the weights"));
    }
    let s = cert.sin_sum.abs();
    if s < MIN_SIN_SUM {
        return Err(Error::invalid("certificate sine sum is too small"));
    }
    let point = |t: f64| -> Vec<Complex64> {
        cert.r.iter().map(|&rl| Complex64::new(t * rl.sqrt(), 0.0)).collect()
    };
    let mut best = (f64::NAN, f64::INFINITY);
    for k in 0..=k_max {
        let t2 = (2 * k + 1) as f64 / s;
        let svec: Vec<f64> = cert.r.iter().map(|&rl| t2 * rl).collect();
        let rho = rho_closed_s(w, &svec).rho;
        if rho < 1.0 {
            let t = t2.sqrt();
            return Ok(SubunityWitness { z: point(t), t, rho, k: Some(k) });
        }
        if rho < best.1 {
            best = (t2.sqrt(), rho);
        }
    }
    let t_max = 1.1 * ((2 * k_max + 1) as f64 / s).sqrt();
    let (t, rho) = min_on_ray(w, &cert.r, t_max, 4000)?;
    if rho < 1.0 {
        return Ok(SubunityWitness { z: point(t), t, rho, k: None });
    }
    if rho < best.1 {
        best = (t, rho);
    }
    Err(Error::compute(format!(
        "no point with rho < 1 found up to k = {k_max}; best t = {:.12}, rho = {:.15}",
        best.0, best.1
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::make_cyclic_weights;

    #[test]
    fn base_cases() {
        let w = make_cyclic_weights(&[(1, 3)]).unwrap();
        let c = construct_certificate(&w).unwrap();
        assert_eq!((c.j, c.r.clone()), (1, vec![1.0]));
        assert_eq!(c.margin, f64::INFINITY);
        assert!((c.sin_sum - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let w = make_cyclic_weights(&[(2, 5)]).unwrap();
        let c = construct_certificate(&w).unwrap();
        assert_eq!(c.j, 3);
        let expect = (2.0 * std::f64::consts::PI / 5.0).cos() - (4.0 * std::f64::consts::PI / 5.0).cos();
        assert!((c.margin - expect).abs() < 1e-14);
        assert!(!verify_certificate(&w, &[1.0], 1).pass);
    }

    #[test]
    fn order_two_rejected() {
        let w = make_cyclic_weights(&[(1, 2)]).unwrap();
        assert!(construct_certificate(&w).unwrap_err().to_string().contains("q ≥ 3"));
    }

    #[test]
    fn mixed_system_with_even_factor() {
        let w = make_cyclic_weights(&[(1, 2), (1, 3)]).unwrap();
        let c = construct_certificate(&w).unwrap();
        assert_eq!(c.j, 4);
        assert!(verify_certificate(&w, &c.r, c.j).pass);
    }
}
