//! The piecewise profiles f_k whose poles approach a cone of angle 2π/3,
//! and the C² smoothing used to turn them into honest metrics.

use super::Jet;
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::sync::OnceLock;

/// Curvature constant checked for every generated profile: −ψ'' ≥ κψ.
pub const KAPPA: f64 = 0.05;

fn rule() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(24))
}

pub fn alpha(k: u32) -> f64 {
    (1.0f64 / 3.0).acos() / (2.0 * k as f64)
}

pub fn f_k_end(k: u32) -> f64 {
    let k = k as f64;
    alpha(k as u32) + (4.0 * k + SQRT_2) * PI / (6.0 * k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Inner,
    Middle,
    Outer,
}

fn branch_jet(k: u32, b: Branch, r: f64) -> Jet {
    let kf = k as f64;
    let a = alpha(k);
    match b {
        Branch::Inner => {
            let x = 2.0 * kf * r;
            Jet::new(x.sin() / (2.0 * kf), x.cos(), -2.0 * kf * x.sin())
        }
        Branch::Middle => {
            let x = r - a;
            Jet::new(SQRT_2 / (3.0 * kf) + x.sin() / 3.0, x.cos() / 3.0, -x.sin() / 3.0)
        }
        Branch::Outer => {
            let amp = (kf + SQRT_2) / (3.0 * kf);
            let freq = 3.0 * kf / (kf + SQRT_2);
            let x = FRAC_PI_2 + freq * (r - a - FRAC_PI_2);
            Jet::new(amp * x.sin(), amp * freq * x.cos(), -amp * freq * freq * x.sin())
        }
    }
}

/// The unsmoothed three-branch profile.
pub fn eval_f_k(k: u32, r: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    let end = f_k_end(k);
    if !(0.0..=end).contains(&r) {
        return Err(Error::invalid(format!("r = {r} outside [0, {end}]")));
    }
    let a = alpha(k);
    let b = if r < a {
        Branch::Inner
    } else if r < a + FRAC_PI_2 {
        Branch::Middle
    } else {
        Branch::Outer
    };
    Ok(branch_jet(k, b, r).value)
}

/// Values of both branches meeting at junction `i` (0: r = α_k, 1: r = α_k + π/2).
pub fn junction_values(k: u32, i: usize) -> (Jet, Jet) {
    let a = alpha(k);
    match i {
        0 => (branch_jet(k, Branch::Inner, a), branch_jet(k, Branch::Middle, a)),
        _ => {
            let r = a + FRAC_PI_2;
            (branch_jet(k, Branch::Middle, r), branch_jet(k, Branch::Outer, r))
        }
    }
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
}

fn bump(t: f64, t0: f64, t1: f64) -> f64 {
    let x = (t - t0) / (t1 - t0);
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        64.0 * (x * (1.0 - x)).powi(3)
    }
}

/// A junction window on which ψ'' is a blend of the two adjacent branches'
/// second derivatives. The blend weight is a quintic step plus two
/// correction bumps on the far side of the junction, sized so that ψ and ψ'
/// integrated from the left edge land exactly on the right branch.
#[derive(Debug, Clone)]
struct Window {
    k: u32,
    left: Branch,
    right: Branch,
    a: f64,
    b: f64,
    step: (f64, f64),
    bumps: [f64; 4],
    lam: [f64; 2],
    /// Sorted breakpoints in r with the value and slope of ψ there.
    knots: Vec<(f64, f64, f64)>,
}

impl Window {
    fn new(k: u32, left: Branch, right: Branch, junction: f64, a: f64, b: f64) -> Self {
        let tj = (junction - a) / (b - a);
        let h = tj.min(1.0 - tj);
        let step = (tj - h, tj + h);
        let bumps = if step.0 > 1e-12 {
            [0.0, step.0 / 2.0, step.0 / 2.0, step.0]
        } else {
            let mid = 0.5 * (step.1 + 1.0);
            [step.1, mid, mid, 1.0]
        };
        let mut w = Window { k, left, right, a, b, step, bumps, lam: [0.0; 2], knots: Vec::new() };
        let m0 = w.mismatch([0.0, 0.0]);
        let c0 = w.mismatch([1.0, 0.0]);
        let c1 = w.mismatch([0.0, 1.0]);
        let (a11, a21) = (c0[0] - m0[0], c0[1] - m0[1]);
        let (a12, a22) = (c1[0] - m0[0], c1[1] - m0[1]);
        let det = a11 * a22 - a12 * a21;
        w.lam = [(-m0[0] * a22 + m0[1] * a12) / det, (-a11 * m0[1] + a21 * m0[0]) / det];
        w.build_knots();
        w
    }

    fn t(&self, r: f64) -> f64 {
        (r - self.a) / (self.b - self.a)
    }

    fn weight(&self, r: f64) -> f64 {
        let t = self.t(r);
        let (s0, s1) = self.step;
        let [d0, d1, d2, d3] = self.bumps;
        smoothstep((t - s0) / (s1 - s0)) + self.lam[0] * bump(t, d0, d1) + self.lam[1] * bump(t, d2, d3)
    }

    fn d2(&self, r: f64) -> f64 {
        let w = self.weight(r);
        (1.0 - w) * branch_jet(self.k, self.left, r).d2 + w * branch_jet(self.k, self.right, r).d2
    }

    fn breaks(&self) -> Vec<f64> {
        let span = self.b - self.a;
        let mut ts = vec![0.0, self.step.0, self.step.1, 1.0];
        ts.extend(self.bumps);
        ts.sort_by(|x, y| x.total_cmp(y));
        ts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
        ts.into_iter().map(|t| self.a + t * span).collect()
    }

    fn advance(&self, r0: f64, v0: f64, s0: f64, r1: f64) -> (f64, f64) {
        let rule = rule();
        let slope = s0 + rule.integrate(|t| self.d2(t), r0, r1);
        let value = v0 + s0 * (r1 - r0) + rule.integrate(|t| (r1 - t) * self.d2(t), r0, r1);
        (value, slope)
    }

    fn mismatch(&mut self, lam: [f64; 2]) -> [f64; 2] {
        self.lam = lam;
        let start = branch_jet(self.k, self.left, self.a);
        let (mut v, mut s) = (start.value, start.d1);
        let br = self.breaks();
        for p in br.windows(2) {
            (v, s) = self.advance(p[0], v, s, p[1]);
        }
        let end = branch_jet(self.k, self.right, self.b);
        [v - end.value, s - end.d1]
    }

    fn build_knots(&mut self) {
        let start = branch_jet(self.k, self.left, self.a);
        let (mut v, mut s) = (start.value, start.d1);
        let br = self.breaks();
        self.knots = vec![(br[0], v, s)];
        for p in br.windows(2) {
            (v, s) = self.advance(p[0], v, s, p[1]);
            self.knots.push((p[1], v, s));
        }
    }

    fn jet(&self, r: f64) -> Jet {
        let i = self.knots.partition_point(|kn| kn.0 <= r).saturating_sub(1).min(self.knots.len() - 2);
        let (r0, v0, s0) = self.knots[i];
        let (value, slope) = self.advance(r0, v0, s0, r);
        Jet::new(value, slope, self.d2(r))
    }
}

/// Smoothed member of the f_k family.
#[derive(Debug, Clone)]
pub struct ConeApprox {
    pub k: u32,
    pub alpha_k: f64,
    /// Half-width scale of the outer junction window, `min(α_k/4, 0.02)`.
    pub smoothing_width: f64,
    pub kappa: f64,
    end: f64,
    windows: [Window; 2],
}

impl ConeApprox {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("cone family index k must be positive"));
        }
        let a = alpha(k);
        let w = (a / 4.0).min(0.02);
        let j2 = a + FRAC_PI_2;
        let windows = [
            Window::new(k, Branch::Inner, Branch::Middle, a, 0.5 * a, 1.25 * a),
            Window::new(k, Branch::Middle, Branch::Outer, j2, j2 - w, j2 + 2.0 * w),
        ];
        Ok(ConeApprox { k, alpha_k: a, smoothing_width: w, kappa: KAPPA, end: f_k_end(k), windows })
    }

    pub fn length(&self) -> f64 {
        self.end
    }

    pub fn jet(&self, r: f64) -> Jet {
        let [w1, w2] = &self.windows;
        if r < w1.a {
            branch_jet(self.k, Branch::Inner, r)
        } else if r < w1.b {
            w1.jet(r)
        } else if r < w2.a {
            branch_jet(self.k, Branch::Middle, r)
        } else if r < w2.b {
            w2.jet(r)
        } else {
            branch_jet(self.k, Branch::Outer, r.min(self.end))
        }
    }

    /// Points where the profile is only finitely differentiable.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.windows.iter().flat_map(|w| w.breaks()).collect()
    }

    /// Interval `[lo, hi]` of each smoothing window.
    pub fn windows(&self) -> [(f64, f64); 2] {
        [(self.windows[0].a, self.windows[0].b), (self.windows[1].a, self.windows[1].b)]
    }

    /// Smallest −ψ''/ψ over `samples` interior points (plus every breakpoint).
    pub fn min_curvature_ratio(&self, samples: usize) -> f64 {
        let mut rs: Vec<f64> = (1..samples).map(|i| self.end * i as f64 / samples as f64).collect();
        for (lo, hi) in self.windows() {
            rs.extend((0..=samples / 4).map(|i| lo + (hi - lo) * i as f64 / (samples / 4) as f64));
        }
        rs.iter()
            .filter(|&&r| r > 0.0 && r < self.end)
            .map(|&r| {
                let j = self.jet(r);
                -j.d2 / j.value
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn junctions_are_continuous() {
        for k in 1..=64 {
            for i in 0..2 {
                let (l, r) = junction_values(k, i);
                assert!((l.value - r.value).abs() < 1e-12, "k={k} junction {i}");
                assert!((l.d1 - r.d1).abs() < 1e-12, "k={k} junction {i} slope");
            }
            let end = f_k_end(k);
            assert!(branch_jet(k, Branch::Outer, end).value.abs() < 1e-12);
        }
    }

    #[test]
    fn first_junction_value() {
        for k in [1, 5, 20] {
            let a = alpha(k);
            let expect = SQRT_2 / (3.0 * k as f64);
            assert!((eval_f_k(k, a).unwrap() - expect).abs() < 1e-15);
            assert!((branch_jet(k, Branch::Inner, a).value - expect).abs() < 1e-15);
        }
        assert_eq!(eval_f_k(3, 0.0).unwrap(), 0.0);
        assert!(eval_f_k(3, -0.1).is_err());
        assert!(eval_f_k(3, f_k_end(3) + 0.1).is_err());
    }

    #[test]
    fn smoothing_meets_the_right_branch() {
        for k in [1, 3, 8, 20, 64] {
            let c = ConeApprox::new(k).unwrap();
            for (w, right) in c.windows.iter().zip([Branch::Middle, Branch::Outer]) {
                let got = w.jet(w.b);
                let want = branch_jet(k, right, w.b);
                assert!((got.value - want.value).abs() < 1e-13, "k={k}");
                assert!((got.d1 - want.d1).abs() < 1e-12, "k={k}");
            }
        }
    }

    #[test]
    fn smoothed_profile_has_positive_curvature() {
        for k in [1, 2, 4, 10, 20, 40, 64] {
            let c = ConeApprox::new(k).unwrap();
            let ratio = c.min_curvature_ratio(4000);
            assert!(ratio >= KAPPA, "k={k}: {ratio}");
        }
    }

    #[test]
    fn unsmoothed_regions_are_untouched() {
        let k = 12;
        let c = ConeApprox::new(k).unwrap();
        let a = alpha(k);
        for r in [0.1 * a, 0.49 * a, a + 2.1, c.length() - 1e-3] {
            assert_eq!(c.jet(r).value, eval_f_k(k, r).unwrap());
        }
    }
}
