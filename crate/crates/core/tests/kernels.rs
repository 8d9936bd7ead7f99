use bergman::analysis::{scalar_curvature_profile, tyz_a1_estimate};
use bergman::gram_kernel::{gram_matrix, rho_gram, GramModel, RevolutionKernel};
use bergman::models::{rescale_to_area, ConeApprox, PerturbedPotential, RevolutionProfile};

#[test]
fn degree_two_sphere_kernel() {
    let p = RevolutionProfile::round_of_degree(2);
    let k = RevolutionKernel::new(&p, 5).unwrap();
    for r in [0.0, 0.3, 0.9, p.length()] {
        // md + 1 = 11 sections spread over area 2.
        assert!((k.rho(r) - 5.5).abs() < 1e-9);
    }
}

#[test]
fn exact_cone_value_at_the_pole() {
    let p = rescale_to_area(&RevolutionProfile::cone_limit(), 1).unwrap();
    for m in [10, 40] {
        let v = RevolutionKernel::new(&p, m).unwrap().rho(0.0) / m as f64;
        let expect = 3.0 + 2.0 / (3.0 * m as f64);
        assert!((v - expect).abs() < 1e-8, "m={m}: {v} vs {expect}");
    }
}

#[test]
fn smoothed_cone_keeps_positive_curvature() {
    for k in [10, 20, 40] {
        let c = ConeApprox::new(k).unwrap();
        assert!(c.min_curvature_ratio(4000) >= c.kappa, "k={k}");
    }
}

#[test]
fn profile_csv_round_trip() {
    let p = rescale_to_area(&RevolutionProfile::cone_approx(20).unwrap(), 1).unwrap();
    let back = rescale_to_area(&RevolutionProfile::from_csv(&p.to_csv(4001)).unwrap(), 1).unwrap();
    let a = RevolutionKernel::new(&p, 25).unwrap();
    let b = RevolutionKernel::new(&back, 25).unwrap();
    let r = 0.4 * p.length();
    assert!((a.rho(r) / b.rho(r) - 1.0).abs() < 1e-3);
}

#[test]
fn gram_path_agrees_with_round_sphere() {
    let g = gram_matrix(&GramModel::new(12, PerturbedPotential::none())).unwrap();
    for (x, y) in [(0.0, 0.0), (0.5, -0.3), (1.5, 2.0)] {
        assert!((rho_gram(&g, x, y) - 13.0).abs() < 1e-8);
    }
}

#[test]
fn a1_tracks_half_scalar_curvature_on_revolution() {
    let p = rescale_to_area(&RevolutionProfile::cone_approx(10).unwrap(), 1).unwrap();
    let r = 0.6 * p.length();
    let (m1, m2) = (40, 80);
    let k1 = RevolutionKernel::new(&p, m1).unwrap();
    let k2 = RevolutionKernel::new(&p, m2).unwrap();
    let est = tyz_a1_estimate(k1.rho(r), k2.rho(r), m1, m2, 1).unwrap();
    let s = scalar_curvature_profile(&p, r).unwrap();
    assert!((est.a1 - s / 2.0).abs() < 0.05 * s.abs().max(1.0), "a1 {} vs S/2 {}", est.a1, s / 2.0);
}
