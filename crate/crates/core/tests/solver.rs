use std::sync::Arc;

use pdae_core::linalg::DenseMatrix;
use pdae_core::problem::*;
use pdae_core::solver::*;
use pdae_core::stencil::build_stencil;
use pdae_core::Error;
use proptest::prelude::*;

/// Constant-coefficient 2×2 system whose solution lies in the tensor space
/// of degree 2 in x and 2 in t.
fn tensor_polynomial_problem() -> PdaeProblem {
    let a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
    let b = DenseMatrix::from_rows(&[&[0.5, 1.0], &[0.0, 1.0]]).unwrap();
    let c = DenseMatrix::from_rows(&[&[0.0, 0.0], &[1.0, 2.0]]).unwrap();
    let u = |x: f64, t: f64| vec![x * x * t + t * t, x * t * t - x];
    let ut = |x: f64, t: f64| vec![x * x + 2.0 * t, 2.0 * x * t];
    let ux = |x: f64, t: f64| vec![2.0 * x * t, t * t - 1.0];
    let (a2, b2, c2) = (a.clone(), b.clone(), c.clone());
    let f = move |x: f64, t: f64| {
        let at = a2.matvec(&ut(x, t));
        let bx = b2.matvec(&ux(x, t));
        let cu = c2.matvec(&u(x, t));
        (0..2).map(|k| at[k] + bx[k] + cu[k]).collect()
    };
    PdaeProblem::from_exact(
        "tensor polynomial",
        2,
        Arc::new(move |_, _| a.clone()),
        Arc::new(move |_, _| b.clone()),
        Arc::new(move |_, _| c.clone()),
        Arc::new(f),
        ExactSolution { value: Arc::new(u), dt: Some(Arc::new(ut)), dx: Some(Arc::new(ux)) },
        0.0,
        0.0,
    )
    .unwrap()
}

#[test]
fn polynomial_solution_in_scheme_space_is_reproduced() {
    let p = tensor_polynomial_problem();
    for (h, tau) in [(0.25, 0.25), (0.1, 0.05)] {
        let grid = GridSpec::unit_square(h, tau).unwrap();
        for stride in [CellStride::Unit, CellStride::Block] {
            let (_, r) = march_with(&p, &grid, 2, 2, &MarchOptions { stride }).unwrap();
            assert!(r.delta_u.unwrap() < 1e-11, "{h} {tau} {stride:?}: {:?}", r.delta_u);
        }
    }
    let grid = GridSpec::unit_square(0.25, 0.25).unwrap();
    let study = convergence_slope(&p, 3, 3, &grid, 2, RefineAxis::Both, &MarchOptions::default()).unwrap();
    assert_eq!(study.order, None);
}

#[test]
fn boundary_layers_hold_boundary_data() {
    let p = example2();
    let grid = GridSpec::unit_square(0.1, 0.1).unwrap();
    let (sol, _) = march(&p, &grid, 2, 2).unwrap();
    for i in 0..=10 {
        assert_eq!(sol.get(i, 0), p.phi(grid.x(i)).as_slice());
    }
    for j in 1..=10 {
        assert_eq!(sol.get(0, j), p.psi(grid.t(j)).as_slice());
    }
    assert!(sol.all_filled());
}

#[test]
fn report_fields_are_consistent() {
    let p = example1();
    let grid = GridSpec::unit_square(0.1, 0.1).unwrap();
    let (sol, r) = march(&p, &grid, 2, 2).unwrap();
    assert_eq!(r.cells_solved, 81);
    assert_eq!(r.clamped_cells, 0);
    assert!(r.warnings.is_empty());
    assert_eq!(r.max_solution_norm, sol.max_norm());
    assert_eq!(r.delta_u.unwrap(), error_norm(&sol, &p, &grid).unwrap());
    assert!(r.wall_time >= 0.0);

    let (_, rb) = march_with(&p, &grid, 3, 3, &MarchOptions { stride: CellStride::Block }).unwrap();
    assert_eq!(rb.cells_solved, 16);
    assert_eq!(rb.clamped_cells, 7);
    assert_eq!(rb.warnings.len(), 1);
}

#[test]
fn problems_without_exact_solution_report_no_error() {
    let p = PdaeProblem::new(
        "no exact",
        1,
        Arc::new(|_, _| DenseMatrix::identity(1)),
        Arc::new(|_, _| DenseMatrix::identity(1)),
        Arc::new(|_, _| DenseMatrix::zeros(1, 1)),
        Arc::new(|_, _| vec![0.0]),
        Arc::new(|_| vec![1.0]),
        Arc::new(|_| vec![1.0]),
    )
    .unwrap();
    let grid = GridSpec::unit_square(0.1, 0.1).unwrap();
    let (sol, r) = march(&p, &grid, 2, 2).unwrap();
    assert_eq!(r.delta_u, None);
    assert!(sol.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    assert!(matches!(error_norm(&sol, &p, &grid), Err(Error::Unsupported(_))));
}

#[test]
fn singular_block_names_the_cell() {
    let grid = GridSpec::unit_square(0.1, 0.1).unwrap();
    match march(&singular_block_problem(), &grid, 2, 2) {
        Err(Error::SingularCell { i, j, .. }) => {
            let (lo, hi) = SINGULAR_BLOCK;
            // A node inside the block contributes an all-zero row.
            let inside = |v: f64| v > lo && v < hi;
            assert!((1..=2).any(|a| inside(grid.x(i + a))) && (1..=2).any(|b| inside(grid.t(j + b))));
            assert_eq!((i, j), (3, 3));
        }
        other => panic!("expected a singular cell, got {other:?}"),
    }
}

#[test]
fn non_finite_data_is_reported() {
    let p = PdaeProblem::new(
        "blows up",
        1,
        Arc::new(|_, _| DenseMatrix::identity(1)),
        Arc::new(|_, _| DenseMatrix::identity(1)),
        Arc::new(|_, _| DenseMatrix::zeros(1, 1)),
        Arc::new(|x, t| vec![if x > 0.5 && t > 0.5 { f64::INFINITY } else { 0.0 }]),
        Arc::new(|_| vec![0.0]),
        Arc::new(|_| vec![0.0]),
    )
    .unwrap();
    let grid = GridSpec::unit_square(0.1, 0.1).unwrap();
    assert!(matches!(march(&p, &grid, 2, 2), Err(Error::Instability { .. })));
}

#[test]
fn marching_is_deterministic() {
    let grid = GridSpec::unit_square(0.05, 0.05).unwrap();
    let (a, _) = march(&example2(), &grid, 3, 2).unwrap();
    let (b, _) = march(&example2(), &grid, 3, 2).unwrap();
    assert_eq!(a.values(), b.values());
}

#[test]
fn demo_converges_at_second_order() {
    let base = GridSpec::unit_square(0.1, 0.1).unwrap();
    let s =
        convergence_slope(&nondegenerate_demo(), 2, 2, &base, 3, RefineAxis::Both, &MarchOptions::default()).unwrap();
    let q = s.order.unwrap();
    assert!((q - 2.0).abs() < 0.5, "order {q}");
    assert!(s.errors.windows(2).all(|w| w[1] < w[0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// A cell depends only on its bottom and left layers.
    #[test]
    fn cells_read_only_their_input_layers(i in 0usize..8, j in 0usize..8, m1 in 1usize..=3, m2 in 1usize..=3) {
        let p = example1();
        let grid = GridSpec::unit_square(0.1, 0.1).unwrap();
        prop_assume!(i + m1 <= grid.n1 && j + m2 <= grid.n2);
        let (st1, st2) = (build_stencil(m1).unwrap(), build_stencil(m2).unwrap());
        let full = SolutionGrid::from_exact(&p, &grid).unwrap();
        let mut sparse = full.clone();
        for a in 0..=grid.n1 {
            for b in 0..=grid.n2 {
                let bottom = b == j && a > i && a <= i + m1;
                let left = a == i && b > j && b <= j + m2;
                if !(bottom || left) {
                    sparse.clear(a, b);
                }
            }
        }
        let c1 = assemble_cell(&p, &grid, &st1, &st2, i, j, &full).unwrap();
        let c2 = assemble_cell(&p, &grid, &st1, &st2, i, j, &sparse).unwrap();
        prop_assert_eq!(c1.matrix, c2.matrix);
        prop_assert_eq!(c1.rhs, c2.rhs);
    }

    /// Feeding exact layers gives the exact values up to the local truncation error.
    #[test]
    fn cell_solve_is_locally_accurate(i in 0usize..8, j in 0usize..8) {
        let p = example2();
        let grid = GridSpec::unit_square(0.1, 0.1).unwrap();
        let st = build_stencil(2).unwrap();
        let exact = SolutionGrid::from_exact(&p, &grid).unwrap();
        let cell = assemble_cell(&p, &grid, &st, &st, i, j, &exact).unwrap();
        let values = solve_cell(&cell).unwrap();
        for (&(a, b), v) in cell.node_map.iter().zip(&values) {
            for (x, y) in v.iter().zip(exact.get(a, b)) {
                prop_assert!((x - y).abs() < 5e-2);
            }
        }
    }

    #[test]
    fn unit_bases_cover_every_interior_index(count in 1usize..40, m in 1usize..=10) {
        prop_assume!(m <= count);
        for stride in [CellStride::Unit, CellStride::Block] {
            let bases = cell_bases(count, m, stride);
            for k in 1..=count {
                prop_assert!(bases.iter().any(|&b| b < k && k <= b + m));
            }
            prop_assert_eq!(*bases.last().unwrap(), count - m);
        }
    }
}
