use bminimal::flow::*;
use bminimal::geometry1d::{grim_reaper, grim_reaper_curve, GraphCurve, Grid1D};

fn translation_error(n: usize, t_end: f64) -> f64 {
    let g = Grid1D::new(-1.0, 1.0, n).unwrap();
    let c = grim_reaper_curve(g).unwrap();
    let b = FlowBoundary::parse("-log(cos(-1)) + t", "-log(cos(1)) + t").unwrap();
    let h = g.h();
    let states = evolve_csf(&c, t_end, CFL * h * h, &b, 4).unwrap();
    let last = states.last().unwrap();
    assert_eq!(last.t, t_end);
    g.nodes()
        .iter()
        .zip(last.curve.values())
        .map(|(&x, y)| (y - grim_reaper(x).unwrap() - t_end).abs())
        .fold(0.0, f64::max)
}

#[test]
fn grim_reaper_speed_is_one_to_second_order() {
    let mut errs = Vec::new();
    for n in [200usize, 400, 800] {
        let c = grim_reaper_curve(Grid1D::new(-1.2, 1.2, n).unwrap()).unwrap();
        errs.push(csf_speed(&c).iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max));
    }
    for w in errs.windows(2) {
        assert!((3.5..4.5).contains(&(w[0] / w[1])), "{errs:?}");
    }
}

#[test]
fn translation_error_is_second_order() {
    let coarse = translation_error(100, 0.05);
    let fine = translation_error(200, 0.05);
    assert!(fine < 1e-4);
    assert!((3.0..5.0).contains(&(coarse / fine)), "{coarse} {fine}");
}

#[test]
fn samples_are_evenly_spaced_in_steps() {
    let g = Grid1D::new(0.0, 1.0, 10).unwrap();
    let c = GraphCurve::from_fn(g, |x| x * (1.0 - x)).unwrap();
    let dt = CFL * g.h() * g.h();
    let states = evolve_csf(&c, 100.0 * dt, dt, &FlowBoundary::fixed(&c), 4).unwrap();
    let times: Vec<f64> = states.iter().map(|s| s.t).collect();
    assert_eq!(times.len(), 5);
    for (k, t) in times.iter().enumerate() {
        assert!((t - 25.0 * k as f64 * dt).abs() < 1e-12, "{times:?}");
    }
    // a convex arch flattens toward the chord
    let peak = |s: &FlowState| s.curve.values()[5];
    assert!(states.windows(2).all(|w| peak(&w[1]) < peak(&w[0])));
}
