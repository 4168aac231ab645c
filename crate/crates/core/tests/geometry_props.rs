use std::f64::consts::{FRAC_PI_4, PI};

use approx::assert_abs_diff_eq;
use bminimal::geometry1d::*;
use bminimal::numerics::sup_norm;
use proptest::prelude::*;

/// Smooth random curve on `[-1, 1]`: `c0 + c1 x + a sin(k x + s)`.
fn curve_params() -> impl Strategy<Value = [f64; 5]> {
    (-1.0f64..1.0, -1.0f64..1.0, -0.5f64..0.5, 0.5f64..2.5, -PI..PI).prop_map(|(a, b, c, d, e)| [a, b, c, d, e])
}

fn curve(grid: Grid1D, q: [f64; 5]) -> GraphCurve {
    GraphCurve::from_fn(grid, |x| q[0] + q[1] * x + q[2] * (q[3] * x + q[4]).sin()).unwrap()
}

fn perturbation(grid: Grid1D, r: [f64; 3]) -> Perturbation {
    let (a, b) = (grid.a(), grid.b());
    Perturbation::from_fn(grid, |x| (x - a) * (b - x) * (r[0] + r[1] * x + r[2] * x * x)).unwrap()
}

fn weights() -> Vec<WeightField> {
    ["y", "0", "0.3*x*y + sin(y)", "0.5*y*y - x"]
        .iter()
        .map(|s| WeightField::parse(s).unwrap())
        .collect()
}

fn adjoint_gap(n: usize, q: [f64; 5], r: [f64; 3], b: &WeightField) -> f64 {
    let g = Grid1D::new(-1.0, 1.0, n).unwrap();
    let c = curve(g, q);
    let xi = perturbation(g, r);
    let fv = first_variation(&c, &xi, b).unwrap();
    let el = el_residual(&c, b).unwrap();
    let inner: f64 = (1..n)
        .map(|i| {
            let x = g.node(i);
            el[i - 1] * xi.values()[i] * b.value(x, c.values()[i]).unwrap().exp() * g.h()
        })
        .sum();
    // the discrepancy carries the weight factor, so measure it in units of max e^B
    let scale = (0..=n)
        .map(|i| b.value(g.node(i), c.values()[i]).unwrap().exp())
        .fold(1.0, f64::max);
    (fv - inner).abs() / scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn first_variation_is_the_derivative_of_weighted_length(
        q in curve_params(),
        r in prop::array::uniform3(-1.0f64..1.0),
        which in 0usize..4,
    ) {
        let b = &weights()[which];
        let g = Grid1D::new(-1.0, 1.0, 200).unwrap();
        let c = curve(g, q);
        let xi = perturbation(g, r);
        let t = 1e-6;
        let fd = (weighted_length(&c.perturbed(&xi, t).unwrap(), b).unwrap()
            - weighted_length(&c.perturbed(&xi, -t).unwrap(), b).unwrap())
            / (2.0 * t);
        let fv = first_variation(&c, &xi, b).unwrap();
        prop_assert!((fv - fd).abs() <= 1e-6 * fd.abs().max(1.0), "{fv} vs {fd}");
    }

    #[test]
    fn second_variation_is_the_second_derivative_of_weighted_length(
        q in curve_params(),
        r in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let b = WeightField::translating();
        let g = Grid1D::new(-1.0, 1.0, 200).unwrap();
        let c = curve(g, q);
        let xi = perturbation(g, r);
        let t = 1e-4;
        let at = |s: f64| weighted_length(&c.perturbed(&xi, s).unwrap(), &b).unwrap();
        let fd = (at(t) - 2.0 * at(0.0) + at(-t)) / (t * t);
        let sv = second_variation_general(&c, &xi, &b).unwrap();
        prop_assert!((sv - fd).abs() <= 1e-5 * fd.abs().max(1.0), "{sv} vs {fd}");
    }

    #[test]
    fn critical_second_variation_is_nonnegative(
        q in curve_params(),
        vals in prop::collection::vec(-10.0f64..10.0, 39),
    ) {
        let g = Grid1D::new(-1.0, 1.0, 40).unwrap();
        let c = curve(g, q);
        let mut v = vec![0.0];
        v.extend(vals);
        v.push(0.0);
        let xi = Perturbation::new(g, v).unwrap();
        prop_assert!(second_variation_critical(&c, &xi).unwrap() >= 0.0);
    }

    #[test]
    fn first_variation_is_adjoint_to_the_residual(
        q in curve_params(),
        r in prop::array::uniform3(-1.0f64..1.0),
        which in 0usize..4,
    ) {
        let b = &weights()[which];
        for n in [100usize, 200] {
            let h = 2.0 / n as f64;
            let gap = adjoint_gap(n, q, r, b);
            prop_assert!(gap <= 20.0 * h * h, "n={n} gap={gap}");
        }
    }

    #[test]
    fn frames_are_orthonormal(q in curve_params()) {
        let g = Grid1D::new(-1.0, 1.0, 50).unwrap();
        let f = curve_frame(&curve(g, q));
        for (t, n) in f.tangent.iter().zip(&f.normal) {
            prop_assert!((t[0].hypot(t[1]) - 1.0).abs() < 1e-14);
            prop_assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-14);
            prop_assert!((t[0] * n[0] + t[1] * n[1]).abs() < 1e-15);
        }
    }
}

#[test]
fn grim_reaper_identities_hold_to_second_order() {
    let mut errs = Vec::new();
    for n in [100usize, 200, 400] {
        let g = Grid1D::new(-1.2, 1.2, n).unwrap();
        let c = grim_reaper_curve(g).unwrap();
        let yp = c.slope();
        let ypp = c.second_derivative();
        let frame = curve_frame(&c);
        let mut e = 0.0f64;
        for i in 1..n {
            let w = (1.0 + yp[i] * yp[i]).sqrt();
            e = e.max((ypp[i] - 1.0 - yp[i] * yp[i]).abs());
            e = e.max((frame.curvature[i] * w - 1.0).abs());
            // DB = (0, 1) when B = y
            e = e.max((frame.normal[i][1] * w - 1.0).abs());
        }
        assert!(e < 10.0 * g.h() * g.h(), "n={n} e={e}");
        errs.push(e);
    }
    for w in errs.windows(2) {
        assert!(w[0] / w[1] > 3.0, "{errs:?}");
    }
}

#[test]
fn critical_form_agrees_with_general_form_on_solutions() {
    use bminimal::solvers::{solve_curve_bvp, SolveConfig};
    let b = WeightField::translating();
    let ya = grim_reaper(-1.2).unwrap();
    let mut scaled = Vec::new();
    for n in [100usize, 200, 400] {
        let g = Grid1D::new(-1.2, 1.2, n).unwrap();
        let (c, rep) = solve_curve_bvp(g, ya, ya, &b, &SolveConfig::default()).unwrap();
        assert!(rep.converged());
        assert!(sup_norm(&el_residual(&c, &b).unwrap()) < 1e-6);
        let xi = Perturbation::from_fn(g, |x| (x * x - 1.44) * (1.0 + x)).unwrap();
        let d = second_variation_general(&c, &xi, &b).unwrap() - second_variation_critical(&c, &xi).unwrap();
        scaled.push(d.abs() / (g.h() * g.h()));
    }
    // C = |difference| / h² stays bounded
    assert!(scaled.iter().all(|&c| c < 20.0), "{scaled:?}");
    assert!((scaled[2] / scaled[1] - 1.0).abs() < 0.1, "{scaled:?}");
}

#[test]
fn grim_reaper_point_values() {
    assert_abs_diff_eq!(grim_reaper(0.0).unwrap(), 0.0);
    assert_abs_diff_eq!(grim_reaper(FRAC_PI_4).unwrap(), 0.5 * 2f64.ln(), epsilon = 1e-15);
    let g = Grid1D::new(-FRAC_PI_4, FRAC_PI_4, 2000).unwrap();
    let c = grim_reaper_curve(g).unwrap();
    // ∫ sec²x dx over [−π/4, π/4]
    assert_abs_diff_eq!(weighted_length(&c, &WeightField::translating()).unwrap(), 2.0, epsilon = 1e-5);
}
