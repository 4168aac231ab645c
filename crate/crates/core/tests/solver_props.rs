use bminimal::geometry1d::{el_residual, grim_reaper, Grid1D, WeightField};
use bminimal::graphic::{graphic_el_residual, Axis, FieldWeight, GridND};
use bminimal::numerics::sup_norm;
use bminimal::solvers::*;
use bminimal::Expr;
use proptest::prelude::*;

fn grim_error(n: usize) -> (f64, SolveReport) {
    let g = Grid1D::new(-1.2, 1.2, n).unwrap();
    let ya = grim_reaper(-1.2).unwrap();
    let (c, rep) = solve_curve_bvp(g, ya, ya, &WeightField::translating(), &SolveConfig::default()).unwrap();
    let err = g
        .nodes()
        .iter()
        .zip(c.values())
        .map(|(&x, y)| (y - grim_reaper(x).unwrap()).abs())
        .fold(0.0, f64::max);
    (err, rep)
}

#[test]
fn curve_solve_converges_at_second_order() {
    let errs: Vec<f64> = [50usize, 100, 200].iter().map(|&n| grim_error(n).0).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..=4.5).contains(&ratio), "{errs:?}");
    }
}

#[test]
fn newton_tail_is_quadratic() {
    let (_, rep) = grim_error(200);
    let consts = rep.quadratic_constants(1e-12);
    assert!(consts.len() >= 2, "{:?}", rep.residual_history);
    assert!(consts.iter().all(|&c| c < 10.0), "{consts:?}");
}

#[test]
fn converged_solutions_have_small_recomputed_residuals() {
    let cfg = SolveConfig::default();
    for b in ["y", "0", "0.5*y + 0.2*x", "sin(y)"] {
        let w = WeightField::parse(b).unwrap();
        let g = Grid1D::new(-1.0, 1.0, 80).unwrap();
        let (c, rep) = solve_curve_bvp(g, 0.3, 0.8, &w, &cfg).unwrap();
        assert!(rep.converged(), "{b}: {rep:?}");
        assert!(sup_norm(&el_residual(&c, &w).unwrap()) <= cfg.tol_residual, "{b}");
    }
    let grid = GridND::rectangle(Axis::new(0.0, 1.0, 16).unwrap(), Axis::new(0.0, 1.0, 12).unwrap());
    let data = Expr::parse("0.3*x1*x2 + 0.1*sin(3*x1)", &["x1", "x2"]).unwrap();
    let (f, rep) = solve_graph_pde_2d(grid, &data, &cfg).unwrap();
    assert!(rep.converged());
    assert!(graphic_el_residual(&f, &FieldWeight::translating()).unwrap().sup_norm() <= cfg.tol_residual);
}

#[test]
fn repeated_solves_are_bit_identical() {
    let a = grim_error(120);
    let b = grim_error(120);
    assert_eq!(a.0.to_bits(), b.0.to_bits());
    assert_eq!(a.1, b.1);
    let grid = GridND::rectangle(Axis::new(-1.0, 1.0, 14).unwrap(), Axis::new(0.0, 1.0, 10).unwrap());
    let data = Expr::parse("x1*x1 - x2", &["x1", "x2"]).unwrap();
    let cfg = SolveConfig::default();
    let (f1, r1) = solve_graph_pde_2d(grid.clone(), &data, &cfg).unwrap();
    let (f2, r2) = solve_graph_pde_2d(grid, &data, &cfg).unwrap();
    assert_eq!(f1, f2);
    assert_eq!(r1, r2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn symmetric_data_gives_symmetric_curves(y0 in -1.0f64..1.0, n in 20usize..80) {
        let g = Grid1D::new(-0.8, 0.8, n).unwrap();
        let (c, rep) = solve_curve_bvp(g, y0, y0, &WeightField::translating(), &SolveConfig::default()).unwrap();
        prop_assert!(rep.converged());
        let y = c.values();
        for i in 0..=n {
            prop_assert!((y[i] - y[n - i]).abs() < 1e-9);
        }
    }

    #[test]
    fn translating_weight_shift_moves_solution(y0 in -1.0f64..1.0, y1 in -1.0f64..1.0, s in -2.0f64..2.0) {
        // B = y: adding s to the boundary data adds s to the solution
        let g = Grid1D::new(-0.8, 0.8, 40).unwrap();
        let w = WeightField::translating();
        let cfg = SolveConfig::default();
        let (a, _) = solve_curve_bvp(g, y0, y1, &w, &cfg).unwrap();
        let (b, _) = solve_curve_bvp(g, y0 + s, y1 + s, &w, &cfg).unwrap();
        for (p, q) in a.values().iter().zip(b.values()) {
            prop_assert!((q - p - s).abs() < 1e-9);
        }
    }
}

#[test]
fn invalid_configurations_are_rejected() {
    let g = Grid1D::new(0.0, 1.0, 10).unwrap();
    let w = WeightField::translating();
    for cfg in [
        SolveConfig { tol_residual: 0.0, ..SolveConfig::default() },
        SolveConfig { max_iter: 0, ..SolveConfig::default() },
        SolveConfig { min_step: 2.0, ..SolveConfig::default() },
    ] {
        assert!(solve_curve_bvp(g, 0.0, 1.0, &w, &cfg).is_err());
    }
}
