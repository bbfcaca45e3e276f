use pdae_core::linalg::determinant;
use pdae_core::problem::*;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

fn all() -> Vec<PdaeProblem> {
    vec![example1(), example2(), nondegenerate_demo(), singular_block_problem()]
}

fn random_points(seed: u64, count: usize, hi: f64) -> Vec<(f64, f64)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count).map(|_| (rng.random_range(0.0..hi), rng.random_range(0.0..hi))).collect()
}

#[test]
fn exact_solutions_satisfy_the_systems() {
    for p in all() {
        for (x, t) in random_points(11, 100, 2.0) {
            let r = p.residual(x, t).unwrap();
            let scale = p.f(x, t).iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let worst = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(worst <= 1e-10 * scale, "{} at ({x}, {t}): {worst:e}", p.name());
        }
    }
}

#[test]
fn analytic_derivatives_match_central_differences() {
    let eps = 1e-5;
    for p in all() {
        let e = p.exact().unwrap();
        let (dt, dx) = (e.dt.as_ref().unwrap(), e.dx.as_ref().unwrap());
        for (x, t) in random_points(12, 30, 1.5) {
            let (x, t) = (x + 0.1, t + 0.1);
            let u = |x: f64, t: f64| (e.value)(x, t);
            let fd_t: Vec<f64> = u(x, t + eps).iter().zip(u(x, t - eps)).map(|(a, b)| (a - b) / (2.0 * eps)).collect();
            let fd_x: Vec<f64> = u(x + eps, t).iter().zip(u(x - eps, t)).map(|(a, b)| (a - b) / (2.0 * eps)).collect();
            for (a, b) in dt(x, t).iter().zip(&fd_t).chain(dx(x, t).iter().zip(&fd_x)) {
                assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "{}: {a} vs {b}", p.name());
            }
        }
    }
}

#[test]
fn example1_is_degenerate_everywhere_sampled() {
    let p = example1();
    for (x, t) in random_points(13, 20, 1.0) {
        assert!(determinant(&p.a(x, t)).abs() < 1e-12);
        assert!(determinant(&p.b(x, t)).abs() < 1e-12);
    }
}

#[test]
fn example1_exact_value_at_origin() {
    assert_eq!(example1().exact_value(0.0, 0.0).unwrap(), vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
}

#[test]
fn boundary_data_agree_at_the_corner() {
    for p in all() {
        assert_eq!(p.corner_mismatch(0.0, 0.0), None, "{}", p.name());
        let u = p.exact_value(0.0, 0.7).unwrap();
        assert_eq!(p.psi(0.7), u);
        assert_eq!(p.phi(0.3), p.exact_value(0.3, 0.0).unwrap());
    }
}

#[test]
fn example_ids_round_trip() {
    for id in [ExampleId::One, ExampleId::Two, ExampleId::Demo, ExampleId::Singular] {
        assert_eq!(id.as_str().parse::<ExampleId>().unwrap(), id);
        assert_eq!(
            id.problem().order(),
            match id {
                ExampleId::One => 6,
                ExampleId::Two => 7,
                ExampleId::Demo => 2,
                ExampleId::Singular => 1,
            }
        );
        let json = serde_json::to_string(&id).unwrap();
        assert_eq!(serde_json::from_str::<ExampleId>(&json).unwrap(), id);
    }
    assert!("3".parse::<ExampleId>().is_err());
}

#[test]
fn canonical_block_sizes_must_sum_to_order() {
    let can = example1().canonical().unwrap().clone();
    assert!(nondegenerate_demo().with_canonical(can).is_err());
}

#[test]
fn grid_refinement_keeps_domain() {
    let g = GridSpec::new(0.0, 2.0, 0.0, 1.0, 0.1, 0.1).unwrap();
    let r = g.refined(2.0, 4.0).unwrap();
    assert_eq!((r.n1, r.n2), (40, 40));
    assert!((r.r - 0.5).abs() < 1e-15);
    assert!((r.x(r.n1) - 2.0).abs() < 1e-12 && (r.t(r.n2) - 1.0).abs() < 1e-12);
}
