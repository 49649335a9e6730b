//! Numbers computed independently of the library: closed forms worked out
//! by hand and adaptive quadrature from scipy.

use std::f64::consts::PI;
use std::sync::Arc;

use sobolev_curves::bounds::{separation_delta, shrink_upper, straight_shrink_length};
use sobolev_curves::path::{
    example_path, geometric_times_through, path_length, rotate_path, shrink_path_on, translate_path, Rotation,
    ScalarSamples,
};
use sobolev_curves::*;

fn circle(n: usize, r: f64) -> DiscreteCurve {
    DiscreteCurve::sample(Grid::new(n).unwrap(), Arc::new(CircleArc::full(r))).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

#[test]
fn first_derivative_converges_at_second_order() {
    let err = |n: usize| {
        let grid = Grid::new(n).unwrap();
        let f = TangentField::from_fn(grid, 1, |t, o| o[0] = (2.0 * PI * t).sin());
        let d = f.derivative();
        (0..grid.len()).map(|j| (d.at(j)[0] - 2.0 * PI * (2.0 * PI * grid.node(j)).cos()).abs()).fold(0.0, f64::max)
    };
    let (e128, e256) = (err(128), err(256));
    assert!(e128 / e256 >= 3.8, "{e128:e} / {e256:e}");
}

#[test]
fn circle_self_metric_scales_with_radius() {
    // |c| = r, speed 2πr, |∇_s c| = 1, |∇²_s c| = 1/r:
    // G_c(c, c) = 2π(a₀r³ + a₁r + a₂/r)
    let g = MetricCoefficients::new(2, vec![0.7, 1.3, 0.4]).unwrap();
    for r in [0.25, 1.0, 3.0] {
        let c = circle(512, r);
        let got = metric_eval(&g, &c, &c.as_field(), &c.as_field()).unwrap();
        let expect = 2.0 * PI * (0.7 * r.powi(3) + 1.3 * r + 0.4 / r);
        assert!(close(got, expect, 1e-4), "r = {r}: {got} vs {expect}");
    }
}

#[test]
fn circle_shrink_matches_scipy_quadrature() {
    // along t·c the velocity is c and G = 2π(a₀t + a₁/t + a₂/t³)
    let cases = [
        ([1.0, 1.0, 1.0], 1e-2, 46.15167759199525),
        ([2.0, 0.5, 0.25], 1e-2, 24.055640553716394),
        ([1.0, 1.0, 1.0], 1e-3, 154.55301315103927),
        ([2.0, 0.5, 0.25], 1e-3, 78.25671300538663),
    ];
    let c = circle(256, 1.0);
    for (a, eps, oracle) in cases {
        let g = MetricCoefficients::new(2, a.to_vec()).unwrap();
        let path = shrink_path_on(&c, geometric_times_through(&[eps, 1.0], 160).unwrap()).unwrap();
        let got = path_length(&path, &g).unwrap().length;
        assert!(close(got, oracle, 1e-4), "{a:?}, ε = {eps}: {got} vs {oracle}");
    }
}

#[test]
fn rotating_a_centered_circle() {
    // J commutes with ∇_s and is an isometry: G_c(Jc, Jc) = G_c(c, c)
    let g = MetricCoefficients::default();
    let c = circle(256, 1.0);
    let got = path_length(&rotate_path(&c, Rotation::Planar(1.5), 32).unwrap(), &g).unwrap().length;
    assert!(close(got, 1.5 * (6.0 * PI).sqrt(), 1e-4), "{got}");
}

#[test]
fn translation_of_a_circle() {
    let g = MetricCoefficients::new(2, vec![2.0, 1.0, 1.0]).unwrap();
    let c = circle(128, 0.5);
    let got = path_length(&translate_path(&c, &[3.0, 4.0], 8).unwrap(), &g).unwrap().length;
    // |v₀|√(a₀ℓ) = 5·√(2π), up to the O(h²) error of the sampled length
    assert!(close(got, 5.0 * (2.0 * PI).sqrt(), 1e-3), "{got}");
    assert!(close(got, 5.0 * (2.0 * curve_length(&c)).sqrt(), 1e-12), "{got}");
}

#[test]
fn unit_segment_shrink_oracles() {
    let g = MetricCoefficients::default();
    let seg = DiscreteCurve::sample(Grid::new(64).unwrap(), Arc::new(Segment::unit(2))).unwrap();
    // ∫₀¹ √(t/3 + 1/t) dt by scipy.integrate.quad
    assert!((straight_shrink_length(&g, &seg, 0.0).unwrap() - 2.063888513905749).abs() < 1e-10);
    assert!((shrink_upper(&g, 1.0).unwrap().value - 4.0).abs() < 1e-15);
}

#[test]
fn example_path_with_drift() {
    // γ(t, θ) = (tθ + t, 0) on [1/2, 1]: velocity (θ + 1, 0) on a segment of
    // length t, so G = a₀·t·∫(θ+1)² dθ + a₁·t·1/t² = 7t/3 + 1/t
    let grid = Grid::new(64).unwrap();
    let times: Vec<f64> = (0..=400).map(|i| 0.5 + i as f64 / 800.0).collect();
    let f = ScalarSamples::from_fn(&times, |t| t, |_| 1.0);
    let path = example_path(grid, times.clone(), &f, &ScalarSamples::zero(&times)).unwrap();
    let got = path_length(&path, &MetricCoefficients::default()).unwrap().length;
    // scipy: ∫ √(7t/3 + 1/t) dt over [1/2, 1]
    assert!(close(got, 0.8854097363703646, 1e-5), "{got}");
}

#[test]
fn separation_delta_for_the_exponential_pair() {
    let grid = Grid::new(128).unwrap();
    let g = MetricCoefficients::new(2, vec![1.0, 1.0, 4.0]).unwrap();
    let (id, psi) = (DiscreteDiffeo::identity(grid), DiscreteDiffeo::exp_family(grid, 1.0).unwrap());
    // Δ = 1, δ = Δ√a₂ / (2√L̂)
    let d = separation_delta(&id, &psi, &g, 0.25).unwrap().value;
    assert!((d - 2.0).abs() < 1e-6, "{d}");
}
