//! Task runners. Each returns the files to write, a JSON summary already
//! included among them, and the exit status the run deserves.

use bminimal::flow::evolve_csf;
use bminimal::geometry1d::*;
use bminimal::graphic::{divergence_form_residual, graphic_el_residual, FieldWeight};
use bminimal::numerics::sup_norm;
use bminimal::solvers::{solve_curve_bvp, solve_graph_pde_2d, SolveReport};
use bminimal::stability::*;
use bminimal::{Execution, Result};
use serde_json::{json, Value};

use crate::config::*;
use crate::output::{Csv, Outputs};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotConverged,
    NumericalFailure,
}

pub struct Finished {
    pub outputs: Outputs,
    pub status: Status,
    pub summary: String,
}

fn report_json(r: &SolveReport) -> Value {
    json!({
        "status": r.status.as_str(),
        "iterations": r.iterations,
        "residual_history": r.residual_history,
        "final_residual": r.final_residual,
        "step_history": r.step_history,
        "quadratic_constants": r.quadratic_constants(1e-12),
    })
}

fn ratios(v: &[f64]) -> Vec<f64> {
    v.windows(2).map(|w| w[0] / w[1]).collect()
}

pub fn run(plan: &Plan) -> Result<Finished> {
    match plan {
        Plan::Verify(p) => verify(p),
        Plan::Solve1d(p) => solve1d(p),
        Plan::Solve2d(p) => solve2d(p),
        Plan::Stability(p) => stability(p),
        Plan::Flow(p) => flow(p),
        Plan::Variation(p) => variation(p),
    }
}

fn verify(p: &VerifyPlan) -> Result<Finished> {
    let b = WeightField::translating();
    let mut csv = Csv::new(&["n", "el_sup", "geo_sup"]);
    let (mut el, mut geo) = (Vec::new(), Vec::new());
    for &n in &p.levels {
        let c = grim_reaper_curve(Grid1D::new(p.interval[0], p.interval[1], n)?)?;
        let r = sup_norm(&el_residual(&c, &b)?);
        let q = bminimal_residual_geometric(&c, &b)?
            .iter()
            .map(|v| v[0].hypot(v[1]))
            .fold(0.0, f64::max);
        csv.row(&[n as f64, r, q]);
        el.push(r);
        geo.push(q);
    }
    let mut out = Outputs::default();
    out.json(
        "result.json",
        &json!({
            "task": "verify",
            "interval": p.interval,
            "levels": p.levels,
            "el_sup": el,
            "geo_sup": geo,
            "el_ratios": ratios(&el),
            "geo_ratios": ratios(&geo),
        }),
    );
    out.csv("verify.csv", &csv);
    let summary = format!("verify: EL residual ratios {:?}", ratios(&el));
    Ok(Finished {
        outputs: out,
        status: Status::Ok,
        summary,
    })
}

fn solve1d(p: &Solve1dPlan) -> Result<Finished> {
    let (curve, report) = solve_curve_bvp(p.grid, p.ya, p.yb, &p.weight, &p.solve)?;
    let residual = el_residual(&curve, &p.weight)?;
    let mut csv = Csv::new(&["x", "y", "residual"]);
    let n = p.grid.intervals();
    for (i, (x, y)) in p.grid.nodes().iter().zip(curve.values()).enumerate() {
        let r = if i == 0 || i == n { 0.0 } else { residual[i - 1] };
        csv.row(&[*x, *y, r]);
    }
    let error = if p.grim_reaper {
        let e = p
            .grid
            .nodes()
            .iter()
            .zip(curve.values())
            .map(|(&x, y)| grim_reaper(x).map(|g| (y - g).abs()))
            .collect::<Result<Vec<_>>>()?;
        Some(e.into_iter().fold(0.0, f64::max))
    } else {
        None
    };
    let mut out = Outputs::default();
    out.json(
        "result.json",
        &json!({
            "task": "solve1d",
            "interval": [p.grid.a(), p.grid.b()],
            "n": n,
            "boundary": [p.ya, p.yb],
            "B": p.weight.b().to_string(),
            "report": report_json(&report),
            "residual_sup": sup_norm(&residual),
            "weighted_length": weighted_length(&curve, &p.weight)?,
            "grim_reaper_error": error,
        }),
    );
    out.csv("solve1d.csv", &csv);
    Ok(Finished {
        outputs: out,
        status: if report.converged() { Status::Ok } else { Status::NotConverged },
        summary: format!(
            "solve1d: {} after {} iterations, residual {:.3e}",
            report.status.as_str(),
            report.iterations,
            report.final_residual
        ),
    })
}

fn solve2d(p: &Solve2dPlan) -> Result<Finished> {
    let (field, report) = solve_graph_pde_2d(p.grid.clone(), &p.dirichlet, &p.solve)?;
    let residual = graphic_el_residual(&field, &FieldWeight::translating())?;
    let alternative = divergence_form_residual(&field)?;
    let mut nodal = vec![0.0; p.grid.len()];
    for (slot, &idx) in residual.nodes.iter().enumerate() {
        nodal[idx] = residual.at(slot)[0];
    }
    let mut csv = Csv::new(&["x1", "x2", "y", "residual"]);
    for idx in 0..p.grid.len() {
        let [x1, x2] = p.grid.point(idx);
        csv.row(&[x1, x2, field.at(idx)[0], nodal[idx]]);
    }
    let forms = residual
        .values
        .iter()
        .zip(&alternative.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let (a1, a2) = (p.grid.axis(0), p.grid.axis(1));
    let mut out = Outputs::default();
    out.json(
        "result.json",
        &json!({
            "task": "solve2d",
            "rectangle": [a1.a, a1.b, a2.a, a2.b],
            "m1": a1.m,
            "m2": a2.m,
            "boundary": p.dirichlet.to_string(),
            "report": report_json(&report),
            "residual_sup": residual.sup_norm(),
            "divergence_form_sup": alternative.sup_norm(),
            "form_difference_sup": forms,
        }),
    );
    out.csv("solve2d.csv", &csv);
    Ok(Finished {
        outputs: out,
        status: if report.converged() { Status::Ok } else { Status::NotConverged },
        summary: format!(
            "solve2d: {} after {} iterations, residual {:.3e}",
            report.status.as_str(),
            report.iterations,
            report.final_residual
        ),
    })
}

fn stability(p: &StabilityPlan) -> Result<Finished> {
    let prob = &p.problem;
    let eps = prob.epsilon();
    let resolutions = [p.m, 2 * p.m];
    let mut eigen = Csv::new(&["m", "lambda_min"]);
    let mut lambda = Vec::new();
    for &m in &resolutions {
        let (a, mass) = assemble_sl(prob, m)?;
        let l = min_eigenvalue(&a, &mass)?;
        eigen.row(&[m as f64, l]);
        lambda.push(l);
    }

    let grid = prob.grid(p.m + 1)?;
    let gaps = inequality_battery(prob, grid, p.count, p.seed, Execution::default())?;
    let min_gap = gaps.iter().map(|g| g.gap).fold(f64::INFINITY, f64::min);

    let riccati = if eps > 0.0 {
        let step = p.step.unwrap_or_else(|| default_riccati_step(eps));
        Some(solve_riccati_v_anchored(prob, step, p.anchor)?)
    } else {
        None
    };
    let mut csv = Csv::new(&["x", "p", "f", "v", "phi"]);
    for x in grid.nodes() {
        let (v, phi) = match &riccati {
            Some(sol) => {
                let (v, dv) = sol.interpolate(x);
                (v, if v > 0.0 { dv / v } else { f64::NAN })
            }
            None => (f64::NAN, f64::NAN),
        };
        csv.row(&[x, prob.p(x), prob.f(x), v, phi]);
    }

    let positive = riccati.as_ref().map(|s| s.is_positive());
    let square = match &riccati {
        Some(sol) if sol.is_positive() => {
            let u = Perturbation::from_fn(grid, f64::cos)?;
            Some(completing_square_check(&u, sol, prob)?)
        }
        _ => None,
    };
    let crossing = riccati
        .as_ref()
        .and_then(|s| s.first_nonpositive())
        .map(|(x, v)| json!({ "x": x, "v": v }));
    let mut out = Outputs::default();
    out.json(
        "result.json",
        &json!({
            "task": "stability",
            "epsilon": eps,
            "m": p.m,
            "lambda_min": lambda[0],
            "lambda_min_doubled": lambda[1],
            "lambda_drift": (lambda[1] - lambda[0]).abs(),
            "battery_count": p.count,
            "battery_seed": p.seed,
            "battery_min_gap": min_gap,
            "riccati_anchor": match p.anchor {
                RiccatiAnchor::LeftEndpoint => "left",
                RiccatiAnchor::Center => "center",
            },
            "riccati_step": riccati.as_ref().map(|s| s.step()),
            "riccati_positive": positive,
            "riccati_min_v": riccati.as_ref().map(|s| s.min_v()),
            "riccati_first_crossing": crossing,
            "completing_square_residual": square,
        }),
    );
    out.csv("stability.csv", &csv);
    out.csv("eigen.csv", &eigen);
    let status = if positive == Some(false) {
        Status::NumericalFailure
    } else {
        Status::Ok
    };
    let summary = match (positive, riccati.as_ref().and_then(|s| s.first_nonpositive())) {
        (Some(false), Some((x, v))) => format!(
            "stability: λ_min = {:.3e}; Riccati solution lost positivity at x = {x:.6} (v = {v:.3e})",
            lambda[0]
        ),
        _ => format!("stability: λ_min = {:.3e}, min gap {min_gap:.3e}", lambda[0]),
    };
    Ok(Finished {
        outputs: out,
        status,
        summary,
    })
}

fn flow(p: &FlowPlan) -> Result<Finished> {
    let states = evolve_csf(&p.initial, p.t_end, p.dt, &p.boundary, p.samples)?;
    let grid = *p.initial.grid();
    let xs = grid.nodes();
    let mut csv = Csv::new(&["t", "x", "y"]);
    for s in &states {
        for (x, y) in xs.iter().zip(s.curve.values()) {
            csv.row(&[s.t, *x, *y]);
        }
    }
    let errors = if p.translating {
        let mut e = Vec::new();
        for s in &states {
            let mut worst = 0.0f64;
            for i in 1..grid.intervals() {
                worst = worst.max((s.curve.values()[i] - grim_reaper(xs[i])? - s.t).abs());
            }
            e.push(worst);
        }
        Some(e)
    } else {
        None
    };
    let steps = ((p.t_end / p.dt) * (1.0 - 1e-12)).ceil().max(1.0);
    let mut out = Outputs::default();
    out.json(
        "result.json",
        &json!({
            "task": "flow",
            "interval": [grid.a(), grid.b()],
            "n": grid.intervals(),
            "t_end": p.t_end,
            "dt_max": p.dt,
            "dt": p.t_end / steps,
            "steps": steps as u64,
            "sample_times": states.iter().map(|s| s.t).collect::<Vec<_>>(),
            "translation_error": errors,
        }),
    );
    out.csv("flow.csv", &csv);
    let summary = match errors.as_ref().and_then(|e| e.last()) {
        Some(e) => format!("flow: t = {}, translation error {e:.3e}", p.t_end),
        None => format!("flow: t = {}, {} samples", p.t_end, states.len()),
    };
    Ok(Finished {
        outputs: out,
        status: Status::Ok,
        summary,
    })
}

fn variation(p: &VariationPlan) -> Result<Finished> {
    let [a, b] = p.interval;
    let translating = p.weight.is_translating();
    let mut csv = Csv::new(&["n", "I", "delta1_err", "delta2_err"]);
    let mut rows = Vec::new();
    for &n in &p.levels {
        let g = Grid1D::new(a, b, n)?;
        let c = match &p.curve {
            None => grim_reaper_curve(g)?,
            Some(e) => GraphCurve::from_expr(g, e)?,
        };
        let xi = match &p.test_function {
            None => Perturbation::from_fn(g, |x| (x - a) * (b - x))?,
            Some(e) => Perturbation::from_expr(g, e)?,
        };
        let w = &p.weight;
        let value = weighted_length(&c, w)?;
        let t = 1e-6;
        let fd1 = (weighted_length(&c.perturbed(&xi, t)?, w)? - weighted_length(&c.perturbed(&xi, -t)?, w)?) / (2.0 * t);
        let fv = first_variation(&c, &xi, w)?;
        let d1 = (fv - fd1).abs() / fd1.abs().max(1.0);
        let (d2, sv, crit) = if translating {
            let s = 1e-4;
            let fd2 = (weighted_length(&c.perturbed(&xi, s)?, w)? - 2.0 * value
                + weighted_length(&c.perturbed(&xi, -s)?, w)?)
                / (s * s);
            let sv = second_variation_general(&c, &xi, w)?;
            ((sv - fd2).abs() / fd2.abs().max(1.0), Some(sv), Some(second_variation_critical(&c, &xi)?))
        } else {
            (f64::NAN, None, None)
        };
        csv.row(&[n as f64, value, d1, d2]);
        rows.push(json!({
            "n": n,
            "I": value,
            "first_variation": fv,
            "second_variation_general": sv,
            "second_variation_critical": crit,
            "delta1_err": d1,
            "delta2_err": if translating { Some(d2) } else { None },
        }));
    }
    let mut out = Outputs::default();
    out.json(
        "result.json",
        &json!({
            "task": "variation",
            "interval": p.interval,
            "B": p.weight.b().to_string(),
            "levels": rows,
        }),
    );
    out.csv("variation.csv", &csv);
    Ok(Finished {
        outputs: out,
        status: Status::Ok,
        summary: format!("variation: {} levels", p.levels.len()),
    })
}
