//! Graph curves `x ↦ (x, y(x))` on a uniform grid and the weighted length
//! `I(y) = ∫ w·e^{B(x,y)} dx`, `w = √(1 + y′²)`.
//!
//! Slopes use central differences in the interior and second-order
//! one-sided differences at the two end nodes; integrals use the composite
//! trapezoid rule with compensated summation in index order. With these
//! choices [`first_variation`] and [`second_variation_general`] are the
//! exact first and second directional derivatives of the discrete
//! [`weighted_length`].
//!
//! The Euler–Lagrange residual
//! `−e^{−B}(e^B y′/w)′ + w·B_y` is discretized in flux form on half nodes,
//! which is what the Newton solver in [`crate::solvers`] drives to zero.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numerics::{first_derivative, second_derivative, trapezoid};
use crate::scalar::Scalar;

/// Uniform grid `x_i = a + i·h`, `i = 0..=n`, `h = (b − a)/n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    a: f64,
    b: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::Grid(format!("need finite a < b, got [{a}, {b}]")));
        }
        if n < 2 {
            return Err(Error::Grid(format!("need at least 2 intervals, got {n}")));
        }
        Ok(Grid1D { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.n
    }

    /// Number of nodes, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.b
        } else {
            self.a + i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.node(i)).collect()
    }

    /// Same interval with twice as many intervals.
    pub fn refined(&self) -> Grid1D {
        Grid1D {
            n: 2 * self.n,
            ..*self
        }
    }
}

/// Weight `B(x, y)` together with its exact partials.
#[derive(Clone, Debug)]
pub struct WeightField {
    b: Expr,
    b_x: Expr,
    b_y: Expr,
}

impl WeightField {
    pub const VARIABLES: [&'static str; 2] = ["x", "y"];

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_expr(&Expr::parse(text, &Self::VARIABLES)?)
    }

    /// Builds from any expression whose variables are a subset of `{x, y}`.
    pub fn from_expr(b: &Expr) -> Result<Self> {
        let b = b.rebind(&Self::VARIABLES)?;
        let b_x = b.differentiate("x")?;
        let b_y = b.differentiate("y")?;
        Ok(WeightField { b, b_x, b_y })
    }

    /// `B(x, y) = y`, the translating-soliton weight.
    pub fn translating() -> Self {
        Self::parse("y").expect("static expression")
    }

    pub fn constant(c: f64) -> Self {
        Self::from_expr(&Expr::constant(c, &Self::VARIABLES)).expect("constant weight")
    }

    pub fn b(&self) -> &Expr {
        &self.b
    }

    pub fn b_x(&self) -> &Expr {
        &self.b_x
    }

    pub fn b_y(&self) -> &Expr {
        &self.b_y
    }

    /// True when the weight is literally `B = y`.
    pub fn is_translating(&self) -> bool {
        self.b.is_variable("y")
    }

    pub fn value<S: Scalar>(&self, x: S, y: S) -> Result<S> {
        Ok(self.b.eval_at(&[x, y])?)
    }

    pub fn partial_x<S: Scalar>(&self, x: S, y: S) -> Result<S> {
        Ok(self.b_x.eval_at(&[x, y])?)
    }

    pub fn partial_y<S: Scalar>(&self, x: S, y: S) -> Result<S> {
        Ok(self.b_y.eval_at(&[x, y])?)
    }
}

/// Sampled graph `y(x_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphCurve {
    grid: Grid1D,
    y: Vec<f64>,
}

impl GraphCurve {
    pub fn new(grid: Grid1D, y: Vec<f64>) -> Result<Self> {
        if y.len() != grid.len() {
            return Err(Error::Input(format!(
                "curve has {} values for {} nodes",
                y.len(),
                grid.len()
            )));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite curve value at node {i}")));
        }
        Ok(GraphCurve { grid, y })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    /// Samples an expression in the single variable `x`.
    pub fn from_expr(grid: Grid1D, e: &Expr) -> Result<Self> {
        let e = e.rebind(&["x"])?;
        let y = grid
            .nodes()
            .into_iter()
            .map(|x| e.eval_at(&[x]))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(grid, y)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn into_values(self) -> Vec<f64> {
        self.y
    }

    /// `y′` at every node.
    pub fn slope(&self) -> Vec<f64> {
        first_derivative(&self.y, self.grid.h())
    }

    /// `w = √(1 + y′²)` at every node.
    pub fn area_element(&self) -> Vec<f64> {
        self.slope().iter().map(|p| (1.0 + p * p).sqrt()).collect()
    }

    pub fn second_derivative(&self) -> Vec<f64> {
        second_derivative(&self.y, self.grid.h())
    }

    /// Pointwise `y + t·ξ`.
    pub fn perturbed(&self, xi: &Perturbation, t: f64) -> Result<GraphCurve> {
        check_same_grid(&self.grid, &xi.grid)?;
        let y = self.y.iter().zip(&xi.values).map(|(y, x)| y + t * x).collect();
        GraphCurve::new(self.grid, y)
    }
}

/// Grid-aligned variation vanishing at both end nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Perturbation {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Input(format!(
                "perturbation has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values[0] != 0.0 || values[grid.intervals()] != 0.0 {
            return Err(Error::Input("perturbation must vanish at both end nodes".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite perturbation value".into()));
        }
        Ok(Perturbation { grid, values })
    }

    /// Samples `f` at the nodes and forces the two end values to zero.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut values: Vec<f64> = grid.nodes().into_iter().map(f).collect();
        values[0] = 0.0;
        values[grid.intervals()] = 0.0;
        Self::new(grid, values)
    }

    pub fn from_expr(grid: Grid1D, e: &Expr) -> Result<Self> {
        let e = e.rebind(&["x"])?;
        let mut values = Vec::with_capacity(grid.len());
        for (i, x) in grid.nodes().into_iter().enumerate() {
            if i == 0 || i == grid.intervals() {
                values.push(0.0);
            } else {
                values.push(e.eval_at(&[x])?);
            }
        }
        Self::new(grid, values)
    }

    pub fn zero(grid: Grid1D) -> Self {
        Perturbation {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Unit perturbation at interior node `i`.
    pub fn unit(grid: Grid1D, i: usize) -> Result<Self> {
        let mut values = vec![0.0; grid.len()];
        *values
            .get_mut(i)
            .ok_or_else(|| Error::Input(format!("node {i} out of range")))? = 1.0;
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slope(&self) -> Vec<f64> {
        first_derivative(&self.values, self.grid.h())
    }

    pub fn scaled(&self, c: f64) -> Perturbation {
        Perturbation {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

/// Per-node unit tangent, unit normal and curvature.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveFrame {
    pub tangent: Vec<[f64; 2]>,
    pub normal: Vec<[f64; 2]>,
    pub curvature: Vec<f64>,
}

pub(crate) fn check_same_grid(a: &Grid1D, b: &Grid1D) -> Result<()> {
    if a != b {
        return Err(Error::Input(format!("grid mismatch: {a:?} vs {b:?}")));
    }
    Ok(())
}

/// The grim reaper `−log cos x` on `|x| < π/2`.
pub fn grim_reaper(x: f64) -> Result<f64> {
    if !(x.abs() < FRAC_PI_2) {
        return Err(Error::Domain(format!("grim reaper needs |x| < π/2, got {x}")));
    }
    Ok(-x.cos().ln())
}

pub fn grim_reaper_curve(grid: Grid1D) -> Result<GraphCurve> {
    let y = grid
        .nodes()
        .into_iter()
        .map(grim_reaper)
        .collect::<Result<Vec<_>>>()?;
    GraphCurve::new(grid, y)
}

/// Trapezoid approximation of `∫ w·e^{B(x, y(x))} dx`.
pub fn weighted_length(c: &GraphCurve, b: &WeightField) -> Result<f64> {
    let w = c.area_element();
    let xs = c.grid.nodes();
    let mut vals = Vec::with_capacity(w.len());
    for i in 0..w.len() {
        vals.push(w[i] * b.value(xs[i], c.y[i])?.exp());
    }
    Ok(trapezoid(&vals, c.grid.h()))
}

/// `δI(y)ξ = ∫ {y′ξ′/w + w·B_y·ξ}·e^B dx`.
pub fn first_variation(c: &GraphCurve, xi: &Perturbation, b: &WeightField) -> Result<f64> {
    check_same_grid(&c.grid, &xi.grid)?;
    let yp = c.slope();
    let xp = xi.slope();
    let xs = c.grid.nodes();
    let mut vals = Vec::with_capacity(yp.len());
    for i in 0..yp.len() {
        let w = (1.0 + yp[i] * yp[i]).sqrt();
        let eb = b.value(xs[i], c.y[i])?.exp();
        let by = b.partial_y(xs[i], c.y[i])?;
        vals.push((yp[i] * xp[i] / w + w * by * xi.values[i]) * eb);
    }
    Ok(trapezoid(&vals, c.grid.h()))
}

/// Second variation for `B = y`:
/// `∫ {ξ′²/w − y′²ξ′²/w³ + 2y′ξ′ξ/w + wξ²}·e^y dx`.
pub fn second_variation_general(c: &GraphCurve, xi: &Perturbation, b: &WeightField) -> Result<f64> {
    if !b.is_translating() {
        return Err(Error::RequiresTranslatingWeight(b.b().to_string()));
    }
    check_same_grid(&c.grid, &xi.grid)?;
    let yp = c.slope();
    let xp = xi.slope();
    let vals: Vec<f64> = (0..yp.len())
        .map(|i| {
            let (p, q, s) = (yp[i], xp[i], xi.values[i]);
            let w = (1.0 + p * p).sqrt();
            let w3 = w * w * w;
            (q * q / w - p * p * q * q / w3 + 2.0 * p * q * s / w + w * s * s) * c.y[i].exp()
        })
        .collect();
    Ok(trapezoid(&vals, c.grid.h()))
}

/// `∫ ξ′²/w³ · e^y dx`, the second variation at a critical point.
pub fn second_variation_critical(c: &GraphCurve, xi: &Perturbation) -> Result<f64> {
    check_same_grid(&c.grid, &xi.grid)?;
    let yp = c.slope();
    let xp = xi.slope();
    let vals: Vec<f64> = (0..yp.len())
        .map(|i| {
            let w = (1.0 + yp[i] * yp[i]).sqrt();
            xp[i] * xp[i] / (w * w * w) * c.y[i].exp()
        })
        .collect();
    Ok(trapezoid(&vals, c.grid.h()))
}

/// Flux-form Euler–Lagrange residual at interior nodes `1..n`, generic over
/// the scalar type so that Jacobians can be taken with dual numbers.
pub fn el_residual_generic<S: Scalar>(grid: &Grid1D, y: &[S], b: &WeightField) -> Result<Vec<S>> {
    let n = grid.intervals();
    if n < 3 {
        return Err(Error::Grid(format!("residual needs n ≥ 3, got {n}")));
    }
    if y.len() != grid.len() {
        return Err(Error::Input("value count does not match grid".into()));
    }
    let h = grid.h();
    let mut flux = Vec::with_capacity(n);
    for j in 0..n {
        let s = (y[j + 1] - y[j]) / h;
        let wh = (s * s + 1.0).sqrt();
        let xm = S::from_f64(grid.node(j) + 0.5 * h);
        let bh = b.value(xm, (y[j] + y[j + 1]) * 0.5)?;
        flux.push(bh.exp() * s / wh);
    }
    let mut out = Vec::with_capacity(n - 1);
    for i in 1..n {
        let x = S::from_f64(grid.node(i));
        let p = (y[i + 1] - y[i - 1]) / (2.0 * h);
        let w = (p * p + 1.0).sqrt();
        let bi = b.value(x, y[i])?;
        let by = b.partial_y(x, y[i])?;
        out.push(-(-bi).exp() * (flux[i] - flux[i - 1]) / h + w * by);
    }
    Ok(out)
}

/// Euler–Lagrange residual at the interior nodes.
pub fn el_residual(c: &GraphCurve, b: &WeightField) -> Result<Vec<f64>> {
    el_residual_generic(&c.grid, &c.y, b)
}

/// `H − (DB)^N` at interior nodes, with `H = κN`, `κ = y″/w³`.
pub fn bminimal_residual_geometric(c: &GraphCurve, b: &WeightField) -> Result<Vec<[f64; 2]>> {
    let n = c.grid.intervals();
    if n < 3 {
        return Err(Error::Grid(format!("residual needs n ≥ 3, got {n}")));
    }
    let frame = curve_frame(c);
    let xs = c.grid.nodes();
    let mut out = Vec::with_capacity(n - 1);
    for i in 1..n {
        let nv = frame.normal[i];
        let db = [b.partial_x(xs[i], c.y[i])?, b.partial_y(xs[i], c.y[i])?];
        let proj = db[0] * nv[0] + db[1] * nv[1];
        let k = frame.curvature[i] - proj;
        out.push([k * nv[0], k * nv[1]]);
    }
    Ok(out)
}

pub fn curve_frame(c: &GraphCurve) -> CurveFrame {
    let yp = c.slope();
    let ypp = c.second_derivative();
    let mut tangent = Vec::with_capacity(yp.len());
    let mut normal = Vec::with_capacity(yp.len());
    let mut curvature = Vec::with_capacity(yp.len());
    for (p, q) in yp.iter().zip(&ypp) {
        let w = (1.0 + p * p).sqrt();
        tangent.push([1.0 / w, p / w]);
        normal.push([-p / w, 1.0 / w]);
        curvature.push(q / (w * w * w));
    }
    CurveFrame {
        tangent,
        normal,
        curvature,
    }
}
