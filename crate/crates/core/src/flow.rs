//! Curve-shortening flow of graphs, `∂y/∂t = y″/(1 + y′²)`, with
//! time-dependent Dirichlet data. Forward Euler in time, central
//! differences in space.
//!
//! Translating solitons move rigidly under this flow: the grim reaper
//! satisfies `y″ = 1 + y′²`, so with co-moving boundary values it translates
//! upward at unit speed.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry1d::{GraphCurve, Grid1D};

/// Explicit-scheme stability factor: `dt ≤ CFL·h²`.
pub const CFL: f64 = 0.4;

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub curve: GraphCurve,
    pub t: f64,
}

/// Dirichlet values at the two ends as expressions in `t`.
#[derive(Clone, Debug)]
pub struct FlowBoundary {
    left: Expr,
    right: Expr,
}

impl FlowBoundary {
    pub fn new(left: &Expr, right: &Expr) -> Result<Self> {
        Ok(FlowBoundary {
            left: left.rebind(&["t"])?,
            right: right.rebind(&["t"])?,
        })
    }

    pub fn parse(left: &str, right: &str) -> Result<Self> {
        Self::new(&Expr::parse(left, &["t"])?, &Expr::parse(right, &["t"])?)
    }

    /// Boundary values frozen at those of `curve`.
    pub fn fixed(curve: &GraphCurve) -> Self {
        let v = curve.values();
        FlowBoundary {
            left: Expr::constant(v[0], &["t"]),
            right: Expr::constant(v[v.len() - 1], &["t"]),
        }
    }

    pub fn at(&self, t: f64) -> Result<(f64, f64)> {
        Ok((self.left.eval_at(&[t])?, self.right.eval_at(&[t])?))
    }
}

/// Normal speed field `y″/(1 + y′²)` at interior nodes.
pub fn csf_speed(curve: &GraphCurve) -> Vec<f64> {
    let y = curve.values();
    let h = curve.grid().h();
    (1..y.len() - 1)
        .map(|i| {
            let p = (y[i + 1] - y[i - 1]) / (2.0 * h);
            let q = (y[i - 1] - 2.0 * y[i] + y[i + 1]) / (h * h);
            q / (1.0 + p * p)
        })
        .collect()
}

/// Evolves `initial` to `t_end` with steps of at most `dt`; the last step is
/// shortened so that it lands on `t_end`. Returns `samples + 1` states
/// evenly spaced in step count, the first at `t = 0` and the last at
/// `t_end`.
pub fn evolve_csf(
    initial: &GraphCurve,
    t_end: f64,
    dt: f64,
    boundary: &FlowBoundary,
    samples: usize,
) -> Result<Vec<FlowState>> {
    let grid: Grid1D = *initial.grid();
    let h = grid.h();
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Input(format!("t_end must be positive, got {t_end}")));
    }
    if !(dt > 0.0) || dt > CFL * h * h * (1.0 + 1e-12) {
        return Err(Error::Input(format!(
            "dt = {dt} violates 0 < dt ≤ {CFL}·h² = {}",
            CFL * h * h
        )));
    }
    let samples = samples.max(1);
    let steps = ((t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let samples = samples.min(steps);
    let dt = t_end / steps as f64;
    let n = grid.intervals();
    let mut y = initial.values().to_vec();
    let mut out = vec![FlowState {
        curve: initial.clone(),
        t: 0.0,
    }];
    let mut next = vec![0.0; n + 1];
    let mut sample_idx = 1;
    for k in 1..=steps {
        let t = if k == steps { t_end } else { k as f64 * dt };
        for i in 1..n {
            let p = (y[i + 1] - y[i - 1]) / (2.0 * h);
            let q = (y[i - 1] - 2.0 * y[i] + y[i + 1]) / (h * h);
            next[i] = y[i] + dt * q / (1.0 + p * p);
        }
        let (l, r) = boundary.at(t)?;
        next[0] = l;
        next[n] = r;
        std::mem::swap(&mut y, &mut next);
        // sample s is taken at step ⌈s·steps/samples⌉
        if k * samples >= sample_idx * steps {
            out.push(FlowState {
                curve: GraphCurve::new(grid, y.clone())?,
                t,
            });
            sample_idx += 1;
        }
    }
    Ok(out)
}
