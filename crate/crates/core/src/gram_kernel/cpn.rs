//! The Fubini–Study kernel on ℂPⁿ and a monomial-norm oracle for it.

use crate::numeric::{ln_factorial, logsumexp};

/// `∏_{i=1}^{n} (m+i)`, the constant value of `ρ_m`.
pub fn cpn_fs_exact(n: u32, m: u32) -> u128 {
    (1..=n as u128).map(|i| m as u128 + i).product()
}

fn for_each_index(n: usize, max: u32, f: &mut impl FnMut(&[u32])) {
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if pos == cur.len() {
            f(cur);
            return;
        }
        for a in 0..=left {
            cur[pos] = a;
            rec(pos + 1, left - a, cur, f);
        }
    }
    rec(0, max, &mut vec![0; n], f);
}

fn factorial(n: u32) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

/// Kernel at the point with every `|z_i|² = 1`, in exact integer arithmetic:
/// `Σ_α |z^α|² (1+|z|²)^{-m} / ‖z^α‖²` with `‖z^α‖² = α!(m−|α|)!/(m+n)!`.
/// Returns `None` on overflow or if the quotient is not an integer.
pub fn cpn_oracle_at_unit_point(n: u32, m: u32) -> Option<u128> {
    let big = factorial(m + n)?;
    let mut sum: Option<u128> = Some(0);
    for_each_index(n as usize, m, &mut |a| {
        let mut den = factorial(m - a.iter().sum::<u32>());
        for &x in a {
            den = den.and_then(|d| factorial(x).and_then(|f| d.checked_mul(f)));
        }
        sum = match (sum, den) {
            (Some(s), Some(d)) if big % d == 0 => s.checked_add(big / d),
            _ => None,
        };
    });
    let sum = sum?;
    let scale = (n as u128 + 1).checked_pow(m)?;
    (sum % scale == 0).then(|| sum / scale)
}

/// The same sum in floating point at an arbitrary point with `s_i = |z_i|²`.
pub fn cpn_oracle_float(m: u32, s: &[f64]) -> f64 {
    let n = s.len() as u32;
    let lead = ln_factorial((m + n) as u64);
    let total: f64 = s.iter().sum();
    let mut logs = Vec::new();
    for_each_index(s.len(), m, &mut |a| {
        let mut t = lead - ln_factorial((m - a.iter().sum::<u32>()) as u64);
        for (&ai, &si) in a.iter().zip(s) {
            if ai > 0 {
                t += ai as f64 * si.ln() - ln_factorial(ai as u64);
            }
        }
        logs.push(t);
    });
    (logsumexp(&logs) - m as f64 * total.ln_1p()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(cpn_fs_exact(1, 0), 1);
        assert_eq!(cpn_fs_exact(1, 7), 8);
        assert_eq!(cpn_fs_exact(2, 3), 20);
        assert_eq!(cpn_oracle_at_unit_point(1, 7), Some(8));
        assert_eq!(cpn_oracle_at_unit_point(2, 3), Some(20));
        assert!((cpn_oracle_float(3, &[0.3, 2.0]) - 20.0).abs() < 1e-12);
    }
}
