use super::cone::ConeApprox;
use super::Jet;
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, OnceLock};

/// Monotone cubic (Fritsch–Carlson) interpolant through `(r_i, ψ_i)`.
#[derive(Debug, Clone)]
pub struct Sampled {
    r: Vec<f64>,
    psi: Vec<f64>,
    slope: Vec<f64>,
}

impl Sampled {
    pub fn new(r: Vec<f64>, psi: Vec<f64>) -> Result<Self> {
        let n = r.len();
        if n < 3 || psi.len() != n {
            return Err(Error::invalid("sampled profile needs at least 3 matching (r, psi) rows"));
        }
        if r[0] != 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("sampled radii must start at 0 and increase strictly"));
        }
        if psi[0].abs() > 1e-12 || psi[n - 1].abs() > 1e-12 {
            return Err(Error::invalid("psi must vanish at both poles"));
        }
        if psi[1..n - 1].iter().any(|&p| !(p > 0.0)) {
            return Err(Error::invalid("psi must be positive between the poles"));
        }
        let h: Vec<f64> = r.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (psi[i + 1] - psi[i]) / h[i]).collect();
        let mut slope = vec![0.0; n];
        slope[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        slope[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                slope[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        Ok(Sampled { r, psi, slope })
    }

    fn length(&self) -> f64 {
        *self.r.last().unwrap()
    }

    fn jet(&self, x: f64) -> Jet {
        let n = self.r.len();
        let i = self.r.partition_point(|&t| t <= x).saturating_sub(1).min(n - 2);
        let h = self.r[i + 1] - self.r[i];
        let t = (x - self.r[i]) / h;
        let (y0, y1) = (self.psi[i], self.psi[i + 1]);
        let (m0, m1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let d1 = ((6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        let d2 = ((12.0 * t - 6.0) * y0 + (6.0 * t - 4.0) * m0 + (-12.0 * t + 6.0) * y1 + (6.0 * t - 2.0) * m1)
            / (h * h);
        Jet::new(value, d1, d2)
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

#[derive(Debug, Clone)]
pub enum Shape {
    /// `sin r` on `[0, π]`.
    Round,
    /// The k → ∞ limit of the cone family: `(1/3) sin r` then `(1/3) cos(3(r − π/2))`.
    ConeLimit,
    ConeApprox(Arc<ConeApprox>),
    Sampled(Arc<Sampled>),
}

impl Shape {
    fn length(&self) -> f64 {
        match self {
            Shape::Round => PI,
            Shape::ConeLimit => 2.0 * PI / 3.0,
            Shape::ConeApprox(c) => c.length(),
            Shape::Sampled(s) => s.length(),
        }
    }

    fn jet(&self, r: f64) -> Jet {
        match self {
            Shape::Round => Jet::new(r.sin(), r.cos(), -r.sin()),
            Shape::ConeLimit => {
                if r < FRAC_PI_2 {
                    Jet::new(r.sin() / 3.0, r.cos() / 3.0, -r.sin() / 3.0)
                } else {
                    let x = 3.0 * (r - FRAC_PI_2);
                    Jet::new(x.cos() / 3.0, -x.sin(), -3.0 * x.cos())
                }
            }
            Shape::ConeApprox(c) => c.jet(r),
            Shape::Sampled(s) => s.jet(r),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Shape::Round => vec![],
            Shape::ConeLimit => vec![FRAC_PI_2],
            Shape::ConeApprox(c) => c.breakpoints(),
            Shape::Sampled(s) => s.r[1..s.r.len() - 1].to_vec(),
        }
    }
}

/// Warped product `dr² + ψ(r)² dθ²` on the 2-sphere, stored as a base
/// shape and a homothety `ψ̃(r) = c ψ(r/c)`.
#[derive(Debug, Clone)]
pub struct RevolutionProfile {
    shape: Shape,
    scale: f64,
    degree: Option<u32>,
}

fn area_rule() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(20))
}

impl RevolutionProfile {
    pub fn new(shape: Shape) -> Self {
        RevolutionProfile { shape, scale: 1.0, degree: None }
    }

    pub fn round() -> Self {
        Self::new(Shape::Round)
    }

    pub fn cone_limit() -> Self {
        Self::new(Shape::ConeLimit)
    }

    pub fn cone_approx(k: u32) -> Result<Self> {
        Ok(Self::new(Shape::ConeApprox(Arc::new(ConeApprox::new(k)?))))
    }

    pub fn sampled(r: Vec<f64>, psi: Vec<f64>) -> Result<Self> {
        Ok(Self::new(Shape::Sampled(Arc::new(Sampled::new(r, psi)?))))
    }

    /// Round profile rescaled to area `d`.
    pub fn round_of_degree(d: u32) -> Self {
        rescale_to_area(&Self::round(), d).expect("round sphere has finite area")
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn degree(&self) -> Option<u32> {
        self.degree
    }

    pub fn length(&self) -> f64 {
        self.scale * self.shape.length()
    }

    pub fn jet(&self, r: f64) -> Jet {
        let c = self.scale;
        let j = self.shape.jet((r / c).clamp(0.0, self.shape.length()));
        Jet::new(c * j.value, j.d1, j.d2 / c)
    }

    pub fn psi(&self, r: f64) -> f64 {
        self.jet(r).value
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.shape.breakpoints().into_iter().map(|b| b * self.scale).collect()
    }

    /// `(ψ'(0⁺), −ψ'(L⁻))`.
    pub fn cone_slopes(&self) -> (f64, f64) {
        (self.jet(0.0).d1, -self.jet(self.length()).d1)
    }

    /// Sorted panel edges: breakpoints plus a uniform subdivision.
    pub fn panels(&self, per_unit: usize) -> Vec<f64> {
        let l = self.length();
        let mut edges: Vec<f64> = (0..=per_unit).map(|i| l * i as f64 / per_unit as f64).collect();
        edges.extend(self.breakpoints());
        edges.sort_by(|a, b| a.total_cmp(b));
        edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * l);
        edges
    }

    /// `2π ∫₀^L ψ dr` by piecewise Gauss–Legendre.
    pub fn area(&self) -> f64 {
        let rule = area_rule();
        let edges = self.panels(256);
        2.0 * PI * edges.windows(2).map(|w| rule.integrate(|r| self.psi(r), w[0], w[1])).sum::<f64>()
    }

    /// Writes `r,psi` rows at the given number of uniform nodes.
    pub fn to_csv(&self, nodes: usize) -> String {
        let mut out = String::from("r,psi\n");
        let l = self.length();
        for i in 0..nodes {
            let r = l * i as f64 / (nodes - 1) as f64;
            let p = if i == 0 || i == nodes - 1 { 0.0 } else { self.psi(r) };
            out.push_str(&format!("{r:e},{p:e}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        match lines.next().map(str::trim) {
            Some("r,psi") => {}
            _ => return Err(Error::invalid("profile CSV must start with header 'r,psi'")),
        }
        let mut r = Vec::new();
        let mut psi = Vec::new();
        for line in lines {
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::invalid(format!("malformed profile row '{line}'")))?;
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad number in row '{line}'")))
            };
            r.push(parse(a)?);
            psi.push(parse(b)?);
        }
        Self::sampled(r, psi)
    }
}

pub fn rescale_to_area(profile: &RevolutionProfile, d: u32) -> Result<RevolutionProfile> {
    if d == 0 {
        return Err(Error::invalid("degree must be positive"));
    }
    let a = profile.area();
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::compute(format!("profile area {a} is not positive and finite")));
    }
    let c = (d as f64 / a).sqrt();
    Ok(RevolutionProfile { shape: profile.shape.clone(), scale: profile.scale * c, degree: Some(d) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_area() {
        assert!((RevolutionProfile::round().area() - 4.0 * PI).abs() < 1e-13);
        let p = RevolutionProfile::round_of_degree(1);
        assert!((p.area() - 1.0).abs() < 1e-13);
        assert!((p.scale() - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn limit_cone_rescale_factor() {
        let p = RevolutionProfile::cone_limit();
        assert!((p.area() - 8.0 * PI / 9.0).abs() < 1e-13);
        let q = rescale_to_area(&p, 1).unwrap();
        assert!((q.scale() - 0.598413420602149017).abs() < 1e-13);
        let (s0, s1) = q.cone_slopes();
        assert!((s0 - 1.0 / 3.0).abs() < 1e-15 && (s1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rescale_is_idempotent() {
        let p = rescale_to_area(&RevolutionProfile::cone_approx(5).unwrap(), 2).unwrap();
        let q = rescale_to_area(&p, 2).unwrap();
        assert!((q.scale() / p.scale() - 1.0).abs() < 1e-12);
        assert!((q.area() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn sampled_round_trip() {
        let p = RevolutionProfile::round();
        let s = RevolutionProfile::from_csv(&p.to_csv(801)).unwrap();
        assert!((s.area() - 4.0 * PI).abs() < 1e-5);
        assert!((s.psi(1.0) - 1f64.sin()).abs() < 1e-6);
        assert!(RevolutionProfile::from_csv("x,y\n0,0\n").is_err());
        assert!(RevolutionProfile::sampled(vec![0.0, 1.0, 2.0], vec![0.0, -1.0, 0.0]).is_err());
    }
}
