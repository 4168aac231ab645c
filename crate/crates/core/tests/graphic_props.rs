use bminimal::geometry1d::{el_residual, first_variation, weighted_length, GraphCurve, Grid1D, Perturbation, WeightField};
use bminimal::graphic::*;
use bminimal::solvers::{solve_curve_bvp, solve_graph_pde_2d, SolveConfig};
use bminimal::Expr;
use proptest::prelude::*;

fn grid(n: usize, m: usize) -> GridND {
    let x1 = Axis::new(-1.0, 1.0, m).unwrap();
    if n == 1 {
        GridND::line(x1)
    } else {
        GridND::rectangle(x1, Axis::new(0.0, 1.5, m + 2).unwrap())
    }
}

/// `k` smooth components, each `c0 + c1 x1 + c2 x2 + a sin(f1 x1 + f2 x2)`.
fn field(grid: GridND, k: usize, c: &[f64]) -> GraphField {
    GraphField::from_fn(grid, k, |p| {
        (0..k)
            .map(|a| {
                let c = &c[6 * a..6 * a + 6];
                c[0] + c[1] * p[0] + c[2] * p[1] + c[3] * (c[4] * p[0] + c[5] * p[1]).sin()
            })
            .collect()
    })
    .unwrap()
}

fn weight(k: usize, which: usize) -> FieldWeight {
    let text = match (k, which) {
        (1, 0) => "y1",
        (1, 1) => "0.5*sin(y1) - 0.1*y1*y1",
        (1, _) => "0",
        (_, 0) => "y1",
        (_, 1) => "0.3*y1 - 0.2*y2 + 0.1*sin(y1*y2)",
        _ => "0.2*y2*y2",
    };
    FieldWeight::parse(text, k).unwrap()
}

fn coefficients() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gradient_matches_finite_differences(
        n in 1usize..=2,
        k in 1usize..=2,
        which in 0usize..3,
        c in coefficients(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 6),
    ) {
        let f = field(grid(n, 8), k, &c);
        let b = weight(k, which);
        let grad = graphic_gradient(&f, &b).unwrap();
        let interior = f.grid().interior_nodes();
        for pick in &picks {
            let idx = pick.get(&interior);
            for alpha in 0..k {
                let v = f.at(*idx)[alpha];
                let t = 1e-6 * v.abs().max(1.0);
                let fd = (graphic_functional(&f.shifted(*idx, alpha, t), &b).unwrap()
                    - graphic_functional(&f.shifted(*idx, alpha, -t), &b).unwrap())
                    / (2.0 * t);
                let g = grad.at(*idx)[alpha];
                prop_assert!((g - fd).abs() <= 1e-6 * fd.abs().max(1.0), "node {idx} α={alpha}: {g} vs {fd}");
            }
        }
        for idx in 0..f.grid().len() {
            if f.grid().is_boundary(idx) {
                prop_assert!(grad.at(idx).iter().all(|&g| g == 0.0));
            }
        }
    }

    #[test]
    fn first_fundamental_form_is_positive_definite(n in 1usize..=2, k in 1usize..=3, c in prop::collection::vec(-2.0f64..2.0, 18)) {
        let f = field(grid(n, 6), k, &c);
        for ff in first_fundamental(&f) {
            prop_assert!(ff.w >= 1.0);
            prop_assert!(ff.g[0][0] > 0.0);
            if n == 2 {
                prop_assert!(ff.g[0][0] * ff.g[1][1] - ff.g[0][1] * ff.g[1][0] > 0.0);
                prop_assert!((ff.g[0][1] - ff.g[1][0]).abs() == 0.0);
            }
            for i in 0..n {
                for j in 0..n {
                    let e: f64 = (0..n).map(|l| ff.g[i][l] * ff.g_inv[l][j]).sum();
                    let id = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((e - id).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn scalar_forms_agree_to_second_order(c in coefficients(), n in 1usize..=2) {
        for m in [16usize, 32] {
            let f = field(grid(n, m), 1, &c[..6]);
            let r = graphic_el_residual(&f, &FieldWeight::translating()).unwrap();
            let d = divergence_form_residual(&f).unwrap();
            let h = 2.0 / m as f64;
            let diff = r.values.iter().zip(&d.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            prop_assert!(diff <= 1e-10 + 20.0 * h * h, "m={m} diff={diff}");
        }
    }

    #[test]
    fn x2_independent_fields_reduce_to_curves(c in prop::collection::vec(-1.0f64..1.0, 4)) {
        let m = 24;
        let g2 = GridND::rectangle(Axis::new(-1.0, 1.0, m).unwrap(), Axis::new(0.0, 1.0, 7).unwrap());
        let profile = |x: f64| c[0] + c[1] * x + 0.5 * c[2] * (2.0 * x + c[3]).sin();
        let f = GraphField::from_fn(g2.clone(), 1, |p| vec![profile(p[0])]).unwrap();
        let g1 = Grid1D::new(-1.0, 1.0, m).unwrap();
        let curve = GraphCurve::from_fn(g1, profile).unwrap();
        let r1 = el_residual(&curve, &WeightField::translating()).unwrap();
        let r2 = graphic_el_residual(&f, &FieldWeight::translating()).unwrap();
        for (slot, &idx) in r2.nodes.iter().enumerate() {
            let i = g2.coord(idx, 0);
            prop_assert!((r2.at(slot)[0] - r1[i - 1]).abs() < 1e-12);
        }
    }
}

#[test]
fn one_dimensional_case_matches_curves() {
    let g1 = Grid1D::new(-1.0, 1.0, 60).unwrap();
    let curve = GraphCurve::from_fn(g1, |x| 0.3 * x * x + (2.0 * x).sin() * 0.2).unwrap();
    let f = GraphField::new(GridND::from(g1), 1, curve.values().to_vec()).unwrap();
    let b1 = WeightField::translating();
    let bk = FieldWeight::translating();
    let lhs = graphic_functional(&f, &bk).unwrap();
    let rhs = weighted_length(&curve, &b1).unwrap();
    assert!((lhs - rhs).abs() <= 1e-14 * rhs.abs());
    let r1 = el_residual(&curve, &b1).unwrap();
    let r2 = graphic_el_residual(&f, &bk).unwrap();
    for (a, b) in r1.iter().zip(&r2.values) {
        assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0), "{a} vs {b}");
    }
    // gradient entries are first variations along unit nodal perturbations
    let grad = graphic_gradient(&f, &bk).unwrap();
    for i in 1..60 {
        let fv = first_variation(&curve, &Perturbation::unit(g1, i).unwrap(), &b1).unwrap();
        assert!((grad.at(i)[0] - fv).abs() <= 1e-13 * fv.abs().max(1.0));
    }
}

#[test]
fn vector_valued_line_has_the_expected_length() {
    let f = GraphField::from_fn(GridND::line(Axis::new(0.0, 1.0, 10).unwrap()), 2, |p| vec![p[0], 2.0 * p[0]]).unwrap();
    let v = graphic_functional(&f, &FieldWeight::constant(0.0, 2)).unwrap();
    assert!((v - 6f64.sqrt()).abs() < 1e-14);
}

#[test]
fn two_dimensional_solve_reduces_to_curve_solve() {
    let cfg = SolveConfig::default();
    let b = WeightField::translating();
    for m in [20usize, 40] {
        let grid = GridND::rectangle(Axis::new(-1.0, 1.0, m).unwrap(), Axis::new(0.0, 1.0, m).unwrap());
        let data = Expr::parse("-log(cos(x1))", &["x1", "x2"]).unwrap();
        let (field, rep) = solve_graph_pde_2d(grid.clone(), &data, &cfg).unwrap();
        assert!(rep.converged());
        let ya = (1f64.cos()).ln().abs();
        let (curve, _) = solve_curve_bvp(Grid1D::new(-1.0, 1.0, m).unwrap(), ya, ya, &b, &cfg).unwrap();
        let h = 2.0 / m as f64;
        for j in 0..=m {
            for i in 0..=m {
                let d = (field.at(grid.index(i, j))[0] - curve.values()[i]).abs();
                assert!(d <= 5.0 * h * h, "m={m} ({i},{j}) d={d}");
            }
        }
    }
}
