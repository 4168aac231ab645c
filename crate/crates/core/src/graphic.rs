//! Graph maps `y: D ⊂ Rⁿ → Rᵏ` on tensor grids (`n ∈ {1, 2}`) and the
//! weighted volume `I(y) = ∫_D w·e^{B(y)} dx`, `w = √det g`,
//! `g_ij = δ_ij + ⟨D_i y, D_j y⟩`.
//!
//! First variation. Differentiating `det g` gives
//!
//! ```text
//! δI(y)ξ = ∫_D { w·g^{ij}⟨D_i y, D_j ξ⟩ + w·⟨D_y B, ξ⟩ } e^{B(y)} dx
//! ```
//!
//! The frequently quoted variant with `g^{ij}⟨D_i y, D_j ξ⟩ / w` in the first
//! term does not reduce to the curve formula `y′ξ′/w` for `n = k = 1`
//! (it would give `y′ξ′/w³`), nor to the scalar equation
//! `−e^{−y} div(e^y ∇y/w) + w = 0` for `k = 1`; the `w·g^{ij}` form
//! reproduces both and is what [`graphic_gradient`] differentiates.
//!
//! [`graphic_gradient`] is the exact gradient of the discrete functional
//! (central differences, one-sided at the boundary, tensor trapezoid), built
//! by transposing the difference stencils. [`graphic_el_residual`] uses a
//! half-node flux stencil for `k = 1`; for `k > 1` it rescales the discrete
//! gradient by the local quadrature weight and `e^B`.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry1d::Grid1D;
use crate::numerics::{first_derivative_stencil, sup_norm, KahanSum};
use crate::par::{map_range, Execution};
use crate::scalar::Scalar;

/// One axis of a tensor grid: `m` uniform intervals on `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub a: f64,
    pub b: f64,
    pub m: usize,
}

impl Axis {
    pub fn new(a: f64, b: f64, m: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::Grid(format!("need finite a < b, got [{a}, {b}]")));
        }
        if m < 2 {
            return Err(Error::Grid(format!("need at least 2 intervals per axis, got {m}")));
        }
        Ok(Axis { a, b, m })
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.m as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.m {
            self.b
        } else {
            self.a + i as f64 * self.h()
        }
    }

    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Tensor grid in one or two dimensions; node index `i + (m₁+1)·j`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridND {
    axes: Vec<Axis>,
}

impl GridND {
    pub fn line(axis: Axis) -> Self {
        GridND { axes: vec![axis] }
    }

    pub fn rectangle(x1: Axis, x2: Axis) -> Self {
        GridND { axes: vec![x1, x2] }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, d: usize) -> &Axis {
        &self.axes[d]
    }

    pub fn h(&self, d: usize) -> f64 {
        self.axes[d].h()
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    fn stride(&self, d: usize) -> usize {
        if d == 0 {
            1
        } else {
            self.axes[0].len()
        }
    }

    /// Per-axis index of node `idx` along axis `d`.
    #[inline]
    pub fn coord(&self, idx: usize, d: usize) -> usize {
        if d == 0 {
            idx % self.axes[0].len()
        } else {
            idx / self.axes[0].len()
        }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.axes[0].len() * j
    }

    /// Coordinates of node `idx`; the second entry is 0 in one dimension.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let mut p = [0.0; 2];
        for d in 0..self.dim() {
            p[d] = self.axes[d].node(self.coord(idx, d));
        }
        p
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        (0..self.dim()).any(|d| {
            let c = self.coord(idx, d);
            c == 0 || c == self.axes[d].m
        })
    }

    /// Indices of interior nodes in increasing order.
    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.is_boundary(i)).collect()
    }

    /// Tensor trapezoid weight of node `idx`.
    pub fn quadrature_weight(&self, idx: usize) -> f64 {
        (0..self.dim())
            .map(|d| {
                let c = self.coord(idx, d);
                let h = self.h(d);
                if c == 0 || c == self.axes[d].m {
                    0.5 * h
                } else {
                    h
                }
            })
            .product()
    }

    /// Stencil of `D_d` at node `idx` as `(node, coefficient)` pairs,
    /// coefficients already divided by `h_d`.
    fn derivative_stencil(&self, idx: usize, d: usize) -> [(usize, f64); 3] {
        let c = self.coord(idx, d);
        let base = idx - c * self.stride(d);
        let h = self.h(d);
        first_derivative_stencil(c, self.axes[d].len())
            .map(|(s, w)| (base + s * self.stride(d), w / h))
    }
}

impl From<Grid1D> for GridND {
    fn from(g: Grid1D) -> Self {
        GridND::line(Axis {
            a: g.a(),
            b: g.b(),
            m: g.intervals(),
        })
    }
}

/// Nodal values of a map `D → Rᵏ`, node-major (`k` values per node).
#[derive(Clone, Debug, PartialEq)]
pub struct GraphField {
    grid: GridND,
    k: usize,
    values: Vec<f64>,
    boundary: Vec<bool>,
}

impl GraphField {
    pub fn new(grid: GridND, k: usize, values: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Input("codimension must be at least 1".into()));
        }
        if values.len() != grid.len() * k {
            return Err(Error::Input(format!(
                "field has {} values, expected {}",
                values.len(),
                grid.len() * k
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite field value".into()));
        }
        let boundary = (0..grid.len()).map(|i| grid.is_boundary(i)).collect();
        Ok(GraphField {
            grid,
            k,
            values,
            boundary,
        })
    }

    /// Samples `f(point)`, which must return `k` values.
    pub fn from_fn(grid: GridND, k: usize, f: impl Fn([f64; 2]) -> Vec<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len() * k);
        for idx in 0..grid.len() {
            let v = f(grid.point(idx));
            if v.len() != k {
                return Err(Error::Input(format!("sampler returned {} values, expected {k}", v.len())));
            }
            values.extend(v);
        }
        Self::new(grid, k, values)
    }

    /// Samples a scalar expression in `x` (n = 1) or `x1, x2` (n = 2).
    pub fn from_expr(grid: GridND, e: &Expr) -> Result<Self> {
        let e = match grid.dim() {
            1 => e.rebind(&["x"])?,
            _ => e.rebind(&["x1", "x2"])?,
        };
        let mut values = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let p = grid.point(idx);
            values.push(e.eval_at(&p[..grid.dim()])?);
        }
        Self::new(grid, 1, values)
    }

    pub fn grid(&self) -> &GridND {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, idx: usize) -> &[f64] {
        &self.values[idx * self.k..(idx + 1) * self.k]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    /// Copy with the values at `idx` (component `alpha`) shifted by `t`.
    pub fn shifted(&self, idx: usize, alpha: usize, t: f64) -> GraphField {
        let mut out = self.clone();
        out.values[idx * self.k + alpha] += t;
        out
    }
}

/// Weight `B(y₁, …, y_k)` with its exact gradient.
#[derive(Clone, Debug)]
pub struct FieldWeight {
    b: Expr,
    grad: Vec<Expr>,
}

impl FieldWeight {
    pub fn variables(k: usize) -> Vec<String> {
        (1..=k).map(|a| format!("y{a}")).collect()
    }

    pub fn parse(text: &str, k: usize) -> Result<Self> {
        let names = Self::variables(k);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Self::from_expr(&Expr::parse(text, &refs)?, k)
    }

    pub fn from_expr(b: &Expr, k: usize) -> Result<Self> {
        let names = Self::variables(k);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let b = b.rebind(&refs)?;
        let grad = refs
            .iter()
            .map(|v| b.differentiate(v))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(FieldWeight { b, grad })
    }

    /// `B(y) = y` for scalar graphs.
    pub fn translating() -> Self {
        Self::parse("y1", 1).expect("static expression")
    }

    pub fn constant(c: f64, k: usize) -> Self {
        let names = Self::variables(k);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Self::from_expr(&Expr::constant(c, &refs), k).expect("constant weight")
    }

    pub fn k(&self) -> usize {
        self.grad.len()
    }

    pub fn b(&self) -> &Expr {
        &self.b
    }

    pub fn is_translating(&self) -> bool {
        self.k() == 1 && self.b.is_variable("y1")
    }

    pub fn value<S: Scalar>(&self, y: &[S]) -> Result<S> {
        Ok(self.b.eval_at(y)?)
    }

    pub fn partial<S: Scalar>(&self, alpha: usize, y: &[S]) -> Result<S> {
        Ok(self.grad[alpha].eval_at(y)?)
    }
}

/// First fundamental form at a node. For `n = 1` only the `[0][0]` entries
/// are meaningful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstFundamentalData {
    pub g: [[f64; 2]; 2],
    pub g_inv: [[f64; 2]; 2],
    pub w: f64,
}

/// `D_d y^α` at node `idx`, laid out `[d][α]`.
fn jacobian_at(field: &GraphField, idx: usize) -> Vec<[f64; 2]> {
    let grid = &field.grid;
    let mut jac = vec![[0.0; 2]; field.k];
    for d in 0..grid.dim() {
        for (node, c) in grid.derivative_stencil(idx, d) {
            if c != 0.0 {
                for (alpha, j) in jac.iter_mut().enumerate() {
                    j[d] += c * field.values[node * field.k + alpha];
                }
            }
        }
    }
    jac
}

fn fundamental_from_jacobian(n: usize, jac: &[[f64; 2]]) -> FirstFundamentalData {
    let mut g = [[0.0; 2]; 2];
    for d in 0..n {
        for e in 0..n {
            let dot: f64 = jac.iter().map(|j| j[d] * j[e]).sum();
            g[d][e] = if d == e { 1.0 + dot } else { dot };
        }
    }
    let mut g_inv = [[0.0; 2]; 2];
    let det = if n == 1 {
        g_inv[0][0] = 1.0 / g[0][0];
        g[0][0]
    } else {
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        g_inv[0][0] = g[1][1] / det;
        g_inv[1][1] = g[0][0] / det;
        g_inv[0][1] = -g[0][1] / det;
        g_inv[1][0] = -g[1][0] / det;
        det
    };
    FirstFundamentalData {
        g,
        g_inv,
        w: det.sqrt(),
    }
}

pub fn first_fundamental(field: &GraphField) -> Vec<FirstFundamentalData> {
    let n = field.grid.dim();
    (0..field.grid.len())
        .map(|idx| fundamental_from_jacobian(n, &jacobian_at(field, idx)))
        .collect()
}

fn check_weight(field: &GraphField, b: &FieldWeight) -> Result<()> {
    if b.k() != field.k {
        return Err(Error::Input(format!(
            "weight has {} components, field has {}",
            b.k(),
            field.k
        )));
    }
    Ok(())
}

pub fn graphic_functional(field: &GraphField, b: &FieldWeight) -> Result<f64> {
    graphic_functional_with(field, b, Execution::default())
}

/// Tensor-trapezoid approximation of `∫_D w·e^{B(y)} dx`.
pub fn graphic_functional_with(field: &GraphField, b: &FieldWeight, exec: Execution) -> Result<f64> {
    check_weight(field, b)?;
    let n = field.grid.dim();
    let terms = map_range(exec, field.grid.len(), |idx| -> Result<f64> {
        let ff = fundamental_from_jacobian(n, &jacobian_at(field, idx));
        let eb = b.value(field.at(idx))?.exp();
        Ok(field.grid.quadrature_weight(idx) * ff.w * eb)
    });
    let mut sum = KahanSum::new();
    for t in terms {
        sum.add(t?);
    }
    Ok(sum.total())
}

pub fn graphic_gradient(field: &GraphField, b: &FieldWeight) -> Result<GraphField> {
    graphic_gradient_with(field, b, Execution::default())
}

/// Exact gradient of [`graphic_functional`] with respect to interior nodal
/// values; boundary entries are zero.
pub fn graphic_gradient_with(field: &GraphField, b: &FieldWeight, exec: Execution) -> Result<GraphField> {
    check_weight(field, b)?;
    let grid = &field.grid;
    let n = grid.dim();
    let k = field.k;
    // per node: flux P[d][α] = ω e^B w g^{de} D_e y^α and source ω w e^B ∂_α B
    let local = map_range(exec, grid.len(), |idx| -> Result<(Vec<[f64; 2]>, Vec<f64>)> {
        let jac = jacobian_at(field, idx);
        let ff = fundamental_from_jacobian(n, &jac);
        let y = field.at(idx);
        let eb = b.value(y)?.exp();
        let om = grid.quadrature_weight(idx);
        let scale = om * eb * ff.w;
        let mut flux = vec![[0.0; 2]; k];
        for (alpha, j) in jac.iter().enumerate() {
            for d in 0..n {
                let mut acc = 0.0;
                for e in 0..n {
                    acc += ff.g_inv[d][e] * j[e];
                }
                flux[alpha][d] = scale * acc;
            }
        }
        let mut src = Vec::with_capacity(k);
        for alpha in 0..k {
            src.push(scale * b.partial(alpha, y)?);
        }
        Ok((flux, src))
    });
    let mut grad = vec![0.0; grid.len() * k];
    for (idx, item) in local.into_iter().enumerate() {
        let (flux, src) = item?;
        for alpha in 0..k {
            grad[idx * k + alpha] += src[alpha];
        }
        for d in 0..n {
            for (node, c) in grid.derivative_stencil(idx, d) {
                if c != 0.0 {
                    for alpha in 0..k {
                        grad[node * k + alpha] += c * flux[alpha][d];
                    }
                }
            }
        }
    }
    for idx in 0..grid.len() {
        if field.boundary[idx] {
            for alpha in 0..k {
                grad[idx * k + alpha] = 0.0;
            }
        }
    }
    GraphField::new(grid.clone(), k, grad)
}

/// Residual values at interior nodes, `k` per node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalResidual {
    pub nodes: Vec<usize>,
    pub k: usize,
    pub values: Vec<f64>,
}

impl NodalResidual {
    pub fn at(&self, i: usize) -> &[f64] {
        &self.values[i * self.k..(i + 1) * self.k]
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.values)
    }
}

/// Half-node flux `e^{B(ȳ)}·∂_d y / w` between `p` and `p + e_d`, using the
/// along-axis difference and the average of the two cross-axis central
/// differences. `with_weight = false` drops the `e^B` factor.
fn half_flux<S: Scalar>(
    grid: &GridND,
    y: &[S],
    p: usize,
    d: usize,
    b: &FieldWeight,
    with_weight: bool,
) -> Result<S> {
    let q = p + grid.stride(d);
    let s = (y[q] - y[p]) / grid.h(d);
    let mut sq = s * s + 1.0;
    if grid.dim() == 2 {
        let o = 1 - d;
        let st = grid.stride(o);
        let cross = (y[p + st] - y[p - st] + y[q + st] - y[q - st]) / (4.0 * grid.h(o));
        sq = sq + cross * cross;
    }
    let flux = s / sq.sqrt();
    if with_weight {
        let bh = b.value(&[(y[p] + y[q]) * 0.5])?;
        Ok(bh.exp() * flux)
    } else {
        Ok(flux)
    }
}

fn central_area_element<S: Scalar>(grid: &GridND, y: &[S], p: usize) -> S {
    let mut sq = S::from_f64(1.0);
    for d in 0..grid.dim() {
        let st = grid.stride(d);
        let g = (y[p + st] - y[p - st]) / (2.0 * grid.h(d));
        sq = sq + g * g;
    }
    sq.sqrt()
}

/// Flux-form residual `−e^{−B} D_j(e^B ∂_j y / w) + w·B′(y)` for scalar
/// fields, evaluated at every interior node (in [`GridND::interior_nodes`]
/// order) from the full nodal vector `y`.
pub fn scalar_el_residual_generic<S: Scalar>(grid: &GridND, y: &[S], b: &FieldWeight) -> Result<Vec<S>> {
    if b.k() != 1 {
        return Err(Error::Input("flux residual needs a scalar weight".into()));
    }
    grid.interior_nodes()
        .into_iter()
        .map(|p| scalar_el_residual_at(grid, y, b, p))
        .collect()
}

pub(crate) fn scalar_el_residual_at<S: Scalar>(grid: &GridND, y: &[S], b: &FieldWeight, p: usize) -> Result<S> {
    let mut div = S::from_f64(0.0);
    for d in 0..grid.dim() {
        let fp = half_flux(grid, y, p, d, b, true)?;
        let fm = half_flux(grid, y, p - grid.stride(d), d, b, true)?;
        div = div + (fp - fm) / grid.h(d);
    }
    let w = central_area_element(grid, y, p);
    let bp = b.value(&[y[p]])?;
    let bd = b.partial(0, &[y[p]])?;
    Ok(-(-bp).exp() * div + w * bd)
}

pub fn graphic_el_residual(field: &GraphField, b: &FieldWeight) -> Result<NodalResidual> {
    graphic_el_residual_with(field, b, Execution::default())
}

/// Euler–Lagrange residual at interior nodes.
pub fn graphic_el_residual_with(field: &GraphField, b: &FieldWeight, exec: Execution) -> Result<NodalResidual> {
    check_weight(field, b)?;
    let grid = &field.grid;
    let nodes = grid.interior_nodes();
    if field.k == 1 {
        let vals = map_range(exec, nodes.len(), |i| scalar_el_residual_at(grid, &field.values, b, nodes[i]));
        let values = vals.into_iter().collect::<Result<Vec<_>>>()?;
        return Ok(NodalResidual { nodes, k: 1, values });
    }
    let grad = graphic_gradient_with(field, b, exec)?;
    let k = field.k;
    let mut values = Vec::with_capacity(nodes.len() * k);
    for &p in &nodes {
        let scale = grid.quadrature_weight(p) * b.value(field.at(p))?.exp();
        values.extend(grad.at(p).iter().map(|g| g / scale));
    }
    Ok(NodalResidual { nodes, k, values })
}

/// `1/w − div(∇y/w)` for scalar fields, the expanded form of the `B = y`
/// residual, with the same half-node stencil.
pub fn divergence_form_residual(field: &GraphField) -> Result<NodalResidual> {
    if field.k != 1 {
        return Err(Error::Input("divergence form needs a scalar field".into()));
    }
    let grid = &field.grid;
    let y = &field.values;
    let unit = FieldWeight::translating();
    let nodes = grid.interior_nodes();
    let mut values = Vec::with_capacity(nodes.len());
    for &p in &nodes {
        let mut div = 0.0;
        for d in 0..grid.dim() {
            let fp = half_flux(grid, y, p, d, &unit, false)?;
            let fm = half_flux(grid, y, p - grid.stride(d), d, &unit, false)?;
            div += (fp - fm) / grid.h(d);
        }
        values.push(1.0 / central_area_element(grid, y, p) - div);
    }
    Ok(NodalResidual { nodes, k: 1, values })
}
