use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use sobolev_curves::bounds::{delta_lower, separation_delta};
use sobolev_curves::lab::run_threshold_scan;
use sobolev_curves::path::{linear_interpolation_path, path_length, shrink_path_on};
use sobolev_curves::*;

fn grid(n: usize) -> Grid {
    Grid::new(n).unwrap()
}

fn arc(n: usize, radius: f64, start: f64, sweep: f64) -> DiscreteCurve {
    DiscreteCurve::sample(grid(n), Arc::new(CircleArc { center: [0.3, -0.2], radius, start_angle: start, sweep }))
        .unwrap()
}

fn coefficients() -> impl Strategy<Value = MetricCoefficients> {
    (0.1..3.0f64, 0.0..3.0f64, 0.1..3.0f64).prop_map(|(a, b, c)| MetricCoefficients::new(2, vec![a, b, c]).unwrap())
}

fn fixing(n: usize) -> impl Strategy<Value = DiscreteDiffeo> {
    (-2.0..2.0f64, 0.3..1.7f64, 0.3..1.7f64).prop_map(move |(a, s0, s1)| {
        let e = DiscreteDiffeo::exp_family(grid(n), a).unwrap();
        e.compose(&DiscreteDiffeo::hermite(grid(n), s0, s1).unwrap()).unwrap()
    })
}

/// Either orientation.
fn diffeo(n: usize) -> impl Strategy<Value = DiscreteDiffeo> {
    (fixing(n), any::<bool>()).prop_map(move |(p, reverse)| {
        if reverse {
            p.compose(&DiscreteDiffeo::reversal(grid(n))).unwrap()
        } else {
            p
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn length_is_invariant_under_time_warps(k in -2.0..2.0f64, g in coefficients()) {
        // frames at t = w(s) relabelled with s, velocities scaled by w'(s)
        let (t0, m) = (0.3, 128);
        let w = |s: f64| t0 + (1.0 - t0) * if k == 0.0 { s } else { (k * s).exp_m1() / k.exp_m1() };
        let dw = |s: f64| (1.0 - t0) * if k == 0.0 { 1.0 } else { k * (k * s).exp() / k.exp_m1() };
        let s: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
        let c = arc(64, 1.0, 0.0, 2.0);
        let warped = shrink_path_on(&c, s.iter().map(|x| w(*x)).collect()).unwrap();
        let relabelled = warped.retimed(s.clone(), &s.iter().map(|x| dw(*x)).collect::<Vec<_>>()).unwrap();
        let plain = shrink_path_on(&c, s.iter().map(|x| t0 + (1.0 - t0) * x).collect()).unwrap();
        let (a, b) = (path_length(&relabelled, &g).unwrap().length, path_length(&plain, &g).unwrap().length);
        prop_assert!((a - b).abs() <= 1e-3 * b, "{a} vs {b}");
    }

    #[test]
    fn length_is_additive_under_splitting(m in 8usize..25, r in 0.2..2.0f64, sweep in 0.5..5.0f64) {
        let c = arc(32, r, 0.1, sweep);
        let d = arc(32, 2.0 * r, 0.4, sweep);
        let path = linear_interpolation_path(&c, &d, 32).unwrap();
        let g = MetricCoefficients::default();
        let (p, q) = path.split_at(m).unwrap();
        let total = path_length(&path, &g).unwrap().length;
        let parts = path_length(&p, &g).unwrap().length + path_length(&q, &g).unwrap().length;
        prop_assert!((total - parts).abs() <= 1e-12 * total.max(1.0));
    }

    #[test]
    fn delta_is_a_pseudometric(p in fixing(64), q in fixing(64), r in fixing(64)) {
        prop_assert_eq!(delta(&p, &p).unwrap(), 0.0);
        let (pq, qp) = (delta(&p, &q).unwrap(), delta(&q, &p).unwrap());
        prop_assert!(pq >= 0.0 && (pq - qp).abs() <= 4.0 * f64::EPSILON * pq.max(1.0));
        let (qr, pr) = (delta(&q, &r).unwrap(), delta(&p, &r).unwrap());
        prop_assert!(pr <= pq + qr + 4.0 * f64::EPSILON * (pq + qr).max(1.0));
    }

    #[test]
    fn interpolation_lengths_respect_the_delta_bound(a in 0.2..2.0f64, l in 0.05..1.0f64, g in coefficients()) {
        let (id, psi) = (DiscreteDiffeo::identity(grid(64)), DiscreteDiffeo::exp_family(grid(64), a).unwrap());
        let c0 = DiscreteCurve::from_diffeo(&id, l).unwrap();
        let c1 = DiscreteCurve::from_diffeo(&psi, l).unwrap();
        let path = linear_interpolation_path(&c0, &c1, 32).unwrap();
        let len = path_length(&path, &g).unwrap().length;
        let lower = delta_lower(&id, &psi, &g, path.max_frame_length()).unwrap().value;
        let sep = separation_delta(&id, &psi, &g, path.max_frame_length()).unwrap().value;
        prop_assert!(len >= lower - 1e-9, "{len} < {lower}");
        prop_assert!((lower - 2.0 * sep).abs() <= 1e-12 * lower);
    }

    #[test]
    fn metric_is_invariant_under_reparametrization(phi in diffeo(256), g in coefficients()) {
        // exact compositions of analytic data: what remains is discretization error
        let grid = grid(256);
        let src = CircleArc { center: [0.0, 0.5], radius: 1.2, start_angle: 0.3, sweep: 2.0 };
        let c = DiscreteCurve::sample(grid, Arc::new(src)).unwrap();
        let hf = |t: f64, o: &mut [f64]| {
            o[0] = (2.0 * t).cos();
            o[1] = t - t * t;
        };
        let h = TangentField::from_fn(grid, 2, hf);
        let hp = TangentField::from_fn(grid, 2, |t, o| hf(phi.eval(t), o));
        let base = metric_eval(&g, &c, &h, &h).unwrap();
        let moved = metric_eval(&g, &reparametrize(&c, &phi).unwrap(), &hp, &hp).unwrap();
        prop_assert!((moved - base).abs() <= 1e-2 * base, "{moved} vs {base}");
    }

    #[test]
    fn metric_is_invariant_under_rigid_motions(angle in -PI..PI, b0 in -3.0..3.0f64, b1 in -3.0..3.0f64, g in coefficients()) {
        let c = arc(64, 0.8, 0.2, 3.0);
        let h = TangentField::from_fn(grid(64), 2, |t, o| {
            o[0] = t.sin();
            o[1] = 1.0 + t;
        });
        let (cs, sn) = (angle.cos(), angle.sin());
        let rot = |v: &[f64]| -> Vec<f64> { v.chunks(2).flat_map(|p| [cs * p[0] - sn * p[1], sn * p[0] + cs * p[1]]).collect() };
        let moved_c = DiscreteCurve::new(grid(64), 2, rot(c.samples())).unwrap().translated(&[b0, b1]).unwrap();
        let moved_h = TangentField::new(grid(64), 2, rot(h.samples())).unwrap();
        let (a, b) = (metric_eval(&g, &c, &h, &h).unwrap(), metric_eval(&g, &moved_c, &moved_h, &moved_h).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn sup_norm_is_controlled_by_the_sobolev_norm(r0 in 0.2..2.0f64, r1 in 0.2..2.0f64, s0 in 0.5..4.0f64, s1 in 0.5..4.0f64) {
        let check = sobolev_sup_check(&arc(128, r0, 0.0, s0), &arc(128, r1, 1.0, s1)).unwrap();
        prop_assert!(check.holds, "{} > {}", check.lhs, check.rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn threshold_lengths_grow_with_alpha(mut alphas in proptest::collection::vec(0.0..1.0f64, 3)) {
        alphas.sort_by(f64::total_cmp);
        let c = arc(64, 1.0, 0.0, 2.0 * PI);
        let r = run_threshold_scan(&c, &MetricCoefficients::default(), &alphas, &[1e-2, 1e-3, 1e-4, 1e-5]).unwrap();
        prop_assert_eq!(&r.verdict("alpha-monotonicity").unwrap().verdict, "holds");
    }
}
