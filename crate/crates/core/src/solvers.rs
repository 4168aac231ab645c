//! Damped Newton solvers for B-minimal graphs.
//!
//! Both solvers linearize the exact discrete residual. Jacobian columns are
//! obtained by forward-mode differentiation ([`Dual`]) of the residual
//! kernels with a colouring of the stencil: three colours for the 1D
//! three-point stencil, nine for the 2D nine-point stencil. The step is
//! halved while the sup-norm of the residual does not decrease.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry1d::{el_residual_generic, GraphCurve, Grid1D, WeightField};
use crate::graphic::{scalar_el_residual_generic, FieldWeight, GraphField, GridND};
use crate::numerics::{solve_tridiagonal, sup_norm, BandMatrix, SingularPivot};
use crate::scalar::Dual;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig {
    /// Sup-norm stopping threshold.
    pub tol_residual: f64,
    pub max_iter: usize,
    /// Smallest damping factor tried in the line search.
    pub min_step: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol_residual: 1e-10,
            max_iter: 50,
            min_step: 2f64.powi(-20),
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_residual > 0.0) {
            return Err(Error::Input(format!("tol_residual must be positive, got {}", self.tol_residual)));
        }
        if self.max_iter < 1 {
            return Err(Error::Input("max_iter must be at least 1".into()));
        }
        if !(self.min_step > 0.0 && self.min_step <= 1.0) {
            return Err(Error::Input(format!("min_step must lie in (0, 1], got {}", self.min_step)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Stalled,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIter => "max_iter",
            SolveStatus::Stalled => "stalled",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub iterations: usize,
    /// Sup-norm of the residual before the first and after every iteration.
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
    /// Damping factor accepted at each iteration.
    pub step_history: Vec<f64>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// `r_{i+1} / r_i²` over the last (up to) three transitions whose
    /// residuals both stay above `floor` (the round-off level). Bounded values
    /// indicate quadratic convergence.
    pub fn quadratic_constants(&self, floor: f64) -> Vec<f64> {
        let r = &self.residual_history;
        let pairs: Vec<f64> = r
            .windows(2)
            .filter(|w| w[0] > floor && w[1] > floor)
            .map(|w| w[1] / (w[0] * w[0]))
            .collect();
        pairs[pairs.len().saturating_sub(3)..].to_vec()
    }
}

/// Generic damped Newton driver. `residual` maps unknowns to residuals;
/// `newton_step` returns the solution `δ` of `J δ = r`.
fn damped_newton(
    mut x: Vec<f64>,
    cfg: &SolveConfig,
    residual: impl Fn(&[f64]) -> Result<Vec<f64>>,
    newton_step: impl Fn(&[f64], &[f64]) -> Result<std::result::Result<Vec<f64>, SingularPivot>>,
) -> Result<(Vec<f64>, SolveReport)> {
    cfg.validate()?;
    let mut r = residual(&x)?;
    let mut norm = sup_norm(&r);
    let mut history = vec![norm];
    let mut steps = Vec::new();
    let mut status = SolveStatus::MaxIter;
    if norm <= cfg.tol_residual {
        status = SolveStatus::Converged;
    }
    while status == SolveStatus::MaxIter && steps.len() < cfg.max_iter {
        let delta = match newton_step(&x, &r)? {
            Ok(d) => d,
            Err(_) => {
                status = SolveStatus::Stalled;
                break;
            }
        };
        let mut lambda = 1.0;
        let mut accepted = None;
        while lambda >= cfg.min_step {
            let trial: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a - lambda * d).collect();
            // evaluation failures (e.g. B leaving its domain) count as increase
            if let Ok(rt) = residual(&trial) {
                let nt = sup_norm(&rt);
                if nt < norm {
                    accepted = Some((trial, rt, nt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((xt, rt, nt)) => {
                x = xt;
                r = rt;
                norm = nt;
                history.push(norm);
                steps.push(lambda);
                if norm <= cfg.tol_residual {
                    status = SolveStatus::Converged;
                }
            }
            None => {
                status = SolveStatus::Stalled;
                break;
            }
        }
    }
    let report = SolveReport {
        status,
        iterations: steps.len(),
        residual_history: history,
        final_residual: norm,
        step_history: steps,
    };
    Ok((x, report))
}

/// Solves the discrete Euler–Lagrange equation of the weighted length on
/// `grid` with Dirichlet data `y(a) = ya`, `y(b) = yb`, starting from the
/// affine interpolant.
pub fn solve_curve_bvp(
    grid: Grid1D,
    ya: f64,
    yb: f64,
    b: &WeightField,
    cfg: &SolveConfig,
) -> Result<(GraphCurve, SolveReport)> {
    if !(ya.is_finite() && yb.is_finite()) {
        return Err(Error::Input("boundary values must be finite".into()));
    }
    let n = grid.intervals();
    if n < 3 {
        return Err(Error::Grid(format!("solver needs n ≥ 3, got {n}")));
    }
    let xs = grid.nodes();
    let len = grid.b() - grid.a();
    let x0: Vec<f64> = xs[1..n]
        .iter()
        .map(|x| ya + (yb - ya) * (x - grid.a()) / len)
        .collect();
    let full = |inner: &[f64]| -> Vec<f64> {
        let mut y = Vec::with_capacity(n + 1);
        y.push(ya);
        y.extend_from_slice(inner);
        y.push(yb);
        y
    };
    let residual = |inner: &[f64]| el_residual_generic(&grid, &full(inner), b);
    let step = |inner: &[f64], r: &[f64]| -> Result<std::result::Result<Vec<f64>, SingularPivot>> {
        let m = n - 1;
        let (mut lower, mut diag, mut upper) = (vec![0.0; m - 1], vec![0.0; m], vec![0.0; m - 1]);
        let y = full(inner);
        for color in 0..3 {
            let yd: Vec<Dual> = y
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let seeded = i >= 1 && i <= m && (i - 1) % 3 == color;
                    Dual::new(v, if seeded { 1.0 } else { 0.0 })
                })
                .collect();
            let rd = el_residual_generic(&grid, &yd, b)?;
            for (row, v) in rd.iter().enumerate() {
                // the single seeded unknown in {row−1, row, row+1}
                for col in row.saturating_sub(1)..=(row + 1).min(m - 1) {
                    if col % 3 == color {
                        match col as isize - row as isize {
                            -1 => lower[col] = v.du,
                            0 => diag[row] = v.du,
                            _ => upper[row] = v.du,
                        }
                    }
                }
            }
        }
        Ok(solve_tridiagonal(&lower, &diag, &upper, r))
    };
    let (inner, report) = damped_newton(x0, cfg, residual, step)?;
    Ok((GraphCurve::new(grid, full(&inner))?, report))
}

/// Solves `−e^{−y} div(e^y ∇y/w) + w = 0` on a 2D rectangle with Dirichlet
/// data given by an expression in `x1, x2`. Starts from the bilinear
/// interpolant of the four corner values plus the boundary data.
pub fn solve_graph_pde_2d(grid: GridND, dirichlet: &Expr, cfg: &SolveConfig) -> Result<(GraphField, SolveReport)> {
    if grid.dim() != 2 {
        return Err(Error::Grid("2D solver needs a two-dimensional grid".into()));
    }
    let data = GraphField::from_expr(grid.clone(), dirichlet)?;
    let b = FieldWeight::translating();
    let mut y0 = initial_guess_2d(&grid, data.values());
    let interior = grid.interior_nodes();
    let x0: Vec<f64> = interior.iter().map(|&p| y0[p]).collect();

    let mx = grid.axis(0).m - 1;
    let my = grid.axis(1).m - 1;
    let full = |inner: &[f64]| -> Vec<f64> {
        let mut y = y0.clone();
        for (v, &p) in inner.iter().zip(&interior) {
            y[p] = *v;
        }
        y
    };
    let residual = |inner: &[f64]| scalar_el_residual_generic(&grid, &full(inner), &b);
    let step = |inner: &[f64], r: &[f64]| -> Result<std::result::Result<Vec<f64>, SingularPivot>> {
        let nunk = interior.len();
        let mut jac = BandMatrix::zeros(nunk, mx + 1);
        let y = full(inner);
        // unknown u ↔ interior node (iu, ju), u = iu + mx·ju with iu, ju from 0
        for color in 0..9 {
            let (ci, cj) = (color % 3, color / 3);
            let mut yd: Vec<Dual> = y.iter().map(|&v| Dual::constant(v)).collect();
            for (u, &p) in interior.iter().enumerate() {
                if (u % mx) % 3 == ci && (u / mx) % 3 == cj {
                    yd[p].du = 1.0;
                }
            }
            let rd = scalar_el_residual_generic(&grid, &yd, &b)?;
            for (row, v) in rd.iter().enumerate() {
                if v.du == 0.0 {
                    continue;
                }
                let (ir, jr) = ((row % mx) as isize, (row / mx) as isize);
                for dj in -1..=1isize {
                    for di in -1..=1isize {
                        let (ic, jc) = (ir + di, jr + dj);
                        if ic < 0 || jc < 0 || ic >= mx as isize || jc >= my as isize {
                            continue;
                        }
                        if ic as usize % 3 == ci && jc as usize % 3 == cj {
                            let col = ic as usize + mx * jc as usize;
                            jac.set(row, col, v.du);
                        }
                    }
                }
            }
        }
        Ok(jac.solve(r))
    };
    let (inner, report) = damped_newton(x0, cfg, residual, step)?;
    for (v, &p) in inner.iter().zip(&interior) {
        y0[p] = *v;
    }
    Ok((GraphField::new(grid, 1, y0)?, report))
}

/// Boundary values kept, interior filled by the bilinear interpolant of
/// the boundary data along each grid line (transfinite interpolation).
fn initial_guess_2d(grid: &GridND, data: &[f64]) -> Vec<f64> {
    let (m1, m2) = (grid.axis(0).m, grid.axis(1).m);
    let at = |i: usize, j: usize| data[grid.index(i, j)];
    let mut y = data.to_vec();
    for j in 1..m2 {
        for i in 1..m1 {
            let s = i as f64 / m1 as f64;
            let t = j as f64 / m2 as f64;
            let edges = (1.0 - s) * at(0, j) + s * at(m1, j) + (1.0 - t) * at(i, 0) + t * at(i, m2);
            let corners = (1.0 - s) * (1.0 - t) * at(0, 0)
                + s * (1.0 - t) * at(m1, 0)
                + (1.0 - s) * t * at(0, m2)
                + s * t * at(m1, m2);
            y[grid.index(i, j)] = edges - corners;
        }
    }
    y
}
