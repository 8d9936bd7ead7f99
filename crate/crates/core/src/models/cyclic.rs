use crate::error::{Error, Result};
use crate::numeric::{gcd, lcm};
use std::fmt;

/// Weights `(p_l, q_l)` of a diagonal ℤ_q action on ℂⁿ, generator
/// `σ(z)_l = e^{2πi p_l/q_l} z_l`, with `q = lcm(q_l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicWeights {
    pairs: Vec<(i64, i64)>,
    q: i64,
}

pub fn make_cyclic_weights(pairs: &[(i64, i64)]) -> Result<CyclicWeights> {
    if pairs.is_empty() {
        return Err(Error::invalid("weights must contain at least one pair"));
    }
    let mut out = Vec::with_capacity(pairs.len());
    let mut q = 1;
    for &(p, ql) in pairs {
        if ql <= 0 {
            return Err(Error::invalid(format!("q must be positive in pair ({p},{ql})")));
        }
        if gcd(p, ql) != 1 {
            return Err(Error::invalid(format!("gcd({p},{ql})≠1: weights must be coprime")));
        }
        out.push((p.rem_euclid(ql), ql));
        q = lcm(q, ql);
    }
    Ok(CyclicWeights { pairs: out, q })
}

impl CyclicWeights {
    pub fn pairs(&self) -> &[(i64, i64)] {
        &self.pairs
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    /// Angle `2π j p_l / q_l` of the `j`-th power of the generator on coordinate `l`.
    pub fn angle(&self, j: i64, l: usize) -> f64 {
        let (p, ql) = self.pairs[l];
        let num = (j * p).rem_euclid(ql);
        2.0 * std::f64::consts::PI * num as f64 / ql as f64
    }

    /// Parses `"1/3,1/5"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (p, q) = item
                .split_once('/')
                .ok_or_else(|| Error::invalid(format!("weight '{item}' is not of the form p/q")))?;
            let p: i64 = p.trim().parse().map_err(|_| Error::invalid(format!("bad numerator in '{item}'")))?;
            let q: i64 = q.trim().parse().map_err(|_| Error::invalid(format!("bad denominator in '{item}'")))?;
            pairs.push((p, q));
        }
        make_cyclic_weights(&pairs)
    }
}

impl fmt::Display for CyclicWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(p, q)| format!("{p}/{q}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcm_and_normalisation() {
        let w = make_cyclic_weights(&[(1, 3)]).unwrap();
        assert_eq!((w.n(), w.q()), (1, 3));
        let w = make_cyclic_weights(&[(1, 3), (1, 5)]).unwrap();
        assert_eq!((w.n(), w.q()), (2, 15));
        let w = make_cyclic_weights(&[(-1, 3)]).unwrap();
        assert_eq!(w.pairs(), &[(2, 3)]);
    }

    #[test]
    fn rejects_bad_pairs() {
        let e = make_cyclic_weights(&[(2, 4)]).unwrap_err();
        assert!(e.to_string().contains("gcd(2,4)≠1"));
        assert!(make_cyclic_weights(&[(1, 0)]).is_err());
        assert!(make_cyclic_weights(&[]).is_err());
        assert!(CyclicWeights::parse("2/4").unwrap_err().to_string().contains("gcd"));
    }
}
