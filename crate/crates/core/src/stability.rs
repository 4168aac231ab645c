//! Stability of the grim reaper in Smoczyk's sense reduces to the weighted
//! inequality
//!
//! ```text
//! ∫ (3cos²x − 1)/(4cos x)·u² dx ≤ ∫ u′²·cos x dx,   u ∈ C₀^∞(−π/2, π/2).
//! ```
//!
//! It is regularized with `p = ε + cos x`, `f = (3p² − 1)/(4p²)`, `dμ = p dx`
//! into `∫ f u² dμ ≤ ∫ u′² dμ` and checked two independent ways:
//!
//! 1. **Spectral.** The form `∫ (u′² − f u²) dμ` is discretized with
//!    homogeneous Dirichlet conditions into a symmetric tridiagonal `A` and a
//!    lumped mass `M`; nonnegativity is `λ_min(A, M) ≥ 0`, computed by
//!    Sturm-sequence bisection ([`min_eigenvalue`]).
//! 2. **Constructive.** With `φ = (log v)′` and
//!    `v″ − (sin x/p)v′ + f v = 0`, `v(−π/2) = 1`, `v′(−π/2) = 0`, one has
//!    the identity `∫(u′ − uφ)² dμ = ∫(u′² − f u²) dμ` whenever `v > 0`,
//!    which makes the right side a square. [`solve_riccati_v`] integrates the
//!    ODE with RK4, [`completing_square_check`] measures the identity.
//!
//! At `ε = 0` the function `u = √cos x` makes the continuous form vanish,
//! so the inequality is sharp and the discrete `λ_min` tends to zero from
//! the regularized side.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry1d::{Grid1D, Perturbation};
use crate::numerics::trapezoid;
use crate::par::{map_range, map_slice, Execution};

/// Regularized stability data for a given `ε ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoczykProblem {
    epsilon: f64,
}

impl SmoczykProblem {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Input(format!("epsilon must be finite and ≥ 0, got {epsilon}")));
        }
        Ok(SmoczykProblem { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn p(&self, x: f64) -> f64 {
        self.epsilon + x.cos()
    }

    pub fn f(&self, x: f64) -> f64 {
        let p = self.p(x);
        (3.0 * p * p - 1.0) / (4.0 * p * p)
    }

    /// `f·p = (3p² − 1)/(4p)`, the potential against `dx`.
    pub fn f_times_p(&self, x: f64) -> f64 {
        let p = self.p(x);
        (3.0 * p * p - 1.0) / (4.0 * p)
    }

    /// `sin x / p`, the first-order coefficient of the Riccati ODE.
    pub fn drag(&self, x: f64) -> f64 {
        x.sin() / self.p(x)
    }

    /// Uniform grid over the closed interval `[−π/2, π/2]`.
    pub fn grid(&self, intervals: usize) -> Result<Grid1D> {
        Grid1D::new(-FRAC_PI_2, FRAC_PI_2, intervals)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapReport {
    /// `∫ f u² dμ`
    pub lhs: f64,
    /// `∫ u′² dμ`
    pub rhs: f64,
    pub gap: f64,
}

fn check_inside_interval(grid: &Grid1D) -> Result<()> {
    let slack = 1e-12;
    if grid.a() < -FRAC_PI_2 - slack || grid.b() > FRAC_PI_2 + slack {
        return Err(Error::Domain(format!(
            "grid [{}, {}] leaves [−π/2, π/2]",
            grid.a(),
            grid.b()
        )));
    }
    Ok(())
}

/// Both sides of the regularized inequality for one test function.
pub fn inequality_gap(u: &Perturbation, prob: &SmoczykProblem) -> Result<GapReport> {
    let grid = u.grid();
    check_inside_interval(grid)?;
    let up = u.slope();
    let xs = grid.nodes();
    let mut left = Vec::with_capacity(xs.len());
    let mut right = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let ui = u.values()[i];
        // at ε = 0 the potential blows up where u vanishes
        left.push(if ui == 0.0 { 0.0 } else { prob.f_times_p(x) * ui * ui });
        right.push(up[i] * up[i] * prob.p(x));
    }
    let lhs = trapezoid(&left, grid.h());
    let rhs = trapezoid(&right, grid.h());
    Ok(GapReport { lhs, rhs, gap: rhs - lhs })
}

/// Coefficients of `q(x) = Σ c_j x^j`; the test function is `q(x)·cos x`.
fn random_polynomials(count: usize, degree: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

/// Test function `q(x)·cos x` on `grid` for polynomial coefficients `q`.
pub fn polynomial_cos_test_function(grid: Grid1D, coeffs: &[f64]) -> Result<Perturbation> {
    Perturbation::from_fn(grid, |x| {
        let q = coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        q * x.cos()
    })
}

/// Gap reports for `count` random test functions `q(x)·cos x` with `q` of
/// degree ≤ 4 and coefficients uniform in `[−1, 1)`, drawn from `seed`.
pub fn inequality_battery(
    prob: &SmoczykProblem,
    grid: Grid1D,
    count: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<GapReport>> {
    let polys = random_polynomials(count, 4, seed);
    map_slice(exec, &polys, |q| {
        let u = polynomial_cos_test_function(grid, q)?;
        inequality_gap(&u, prob)
    })
    .into_iter()
    .collect()
}

/// Symmetric tridiagonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, u: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * u[i];
                if i > 0 {
                    v += self.off[i - 1] * u[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * u[i + 1];
                }
                v
            })
            .collect()
    }

    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        self.matvec(u).iter().zip(u).map(|(a, b)| a * b).sum()
    }

    /// Number of eigenvalues strictly below `sigma` (Sturm sequence count).
    pub fn count_below(&self, sigma: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - sigma - e2 / q;
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + sigma.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// Interior nodes `x_i = −π/2 + i·h`, `h = π/(m + 1)`, `i = 1..=m`.
pub fn interior_nodes(m: usize) -> Vec<f64> {
    let h = PI / (m + 1) as f64;
    (1..=m).map(|i| -FRAC_PI_2 + i as f64 * h).collect()
}

/// Assembles `A` and lumped `M` for the form `∫ (u′² − f u²) p dx` with
/// Dirichlet conditions at `±π/2`. `f_times_p(x)` is the potential `f·p`.
pub fn assemble_sl_with(
    p: impl Fn(f64) -> f64,
    f_times_p: impl Fn(f64) -> f64,
    m: usize,
) -> Result<(SymTridiagonal, Vec<f64>)> {
    if m < 3 {
        return Err(Error::Grid(format!("need at least 3 interior nodes, got {m}")));
    }
    let h = PI / (m + 1) as f64;
    let h2 = h * h;
    let xs: Vec<f64> = (0..=m + 1)
        .map(|i| if i == m + 1 { FRAC_PI_2 } else { -FRAC_PI_2 + i as f64 * h })
        .collect();
    let pn: Vec<f64> = xs.iter().map(|&x| p(x)).collect();
    // p at half node i + 1/2, i = 0..=m
    let ph: Vec<f64> = (0..=m).map(|i| 0.5 * (pn[i] + pn[i + 1])).collect();
    let mut diag = Vec::with_capacity(m);
    let mut mass = Vec::with_capacity(m);
    for i in 1..=m {
        diag.push((ph[i - 1] + ph[i]) / h2 - f_times_p(xs[i]));
        mass.push(pn[i]);
    }
    let off = (1..m).map(|i| -ph[i] / h2).collect();
    Ok((SymTridiagonal { diag, off }, mass))
}

pub fn assemble_sl(prob: &SmoczykProblem, m: usize) -> Result<(SymTridiagonal, Vec<f64>)> {
    assemble_sl_with(|x| prob.p(x), |x| prob.f_times_p(x), m)
}

/// Absolute bisection tolerance of [`min_eigenvalue`].
pub const EIGEN_TOL: f64 = 1e-12;

/// Smallest `λ` with `A u = λ M u`: reduce to `M^{−1/2} A M^{−1/2}` and
/// bisect on the Sturm count. Returns the lower end of the final bracket.
pub fn min_eigenvalue(a: &SymTridiagonal, mass: &[f64]) -> Result<f64> {
    let n = a.dim();
    if mass.len() != n || a.off.len() + 1 != n {
        return Err(Error::Input("matrix and mass dimensions disagree".into()));
    }
    if let Some(i) = mass.iter().position(|&m| !(m > 0.0)) {
        return Err(Error::Input(format!("mass entry {i} is not positive")));
    }
    let s: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let t = SymTridiagonal {
        diag: (0..n).map(|i| a.diag[i] * s[i] * s[i]).collect(),
        off: (0..n - 1).map(|i| a.off[i] * s[i] * s[i + 1]).collect(),
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += t.off[i - 1].abs();
        }
        if i + 1 < n {
            r += t.off[i].abs();
        }
        lo = lo.min(t.diag[i] - r);
        hi = hi.min(t.diag[i]);
    }
    // hi is a Rayleigh quotient, so λ_min ≤ hi; nudge so count_below(hi) ≥ 1
    hi += EIGEN_TOL + f64::EPSILON * hi.abs();
    while hi - lo > EIGEN_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if t.count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// `λ_min` for each `ε`, assembled at `m` interior nodes.
pub fn min_eigenvalue_sweep(epsilons: &[f64], m: usize, exec: Execution) -> Result<Vec<f64>> {
    map_slice(exec, epsilons, |&eps| {
        let prob = SmoczykProblem::new(eps)?;
        let (a, mass) = assemble_sl(&prob, m)?;
        min_eigenvalue(&a, &mass)
    })
    .into_iter()
    .collect()
}

/// Where the Riccati ODE receives its initial data `v = 1`, `v′ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RiccatiAnchor {
    /// `v(−π/2) = 1`, `v′(−π/2) = 0`, integrated left to right.
    LeftEndpoint,
    /// `v(0) = 1`, `v′(0) = 0`, integrated outward in both directions. The
    /// coefficients are even/odd in `x`, so this is the even solution.
    Center,
}

/// Samples of `v` and `v′` on a uniform mesh over `[−π/2, π/2]`.
#[derive(Clone, Debug)]
pub struct RiccatiSolution {
    anchor: RiccatiAnchor,
    step: f64,
    x: Vec<f64>,
    v: Vec<f64>,
    dv: Vec<f64>,
    ddv: Vec<f64>,
    first_nonpositive: Option<(f64, f64)>,
}

impl RiccatiSolution {
    pub fn anchor(&self) -> RiccatiAnchor {
        self.anchor
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn mesh(&self) -> &[f64] {
        &self.x
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn dv(&self) -> &[f64] {
        &self.dv
    }

    /// `φ = v′/v` at mesh point `i`, defined where `v > 0`.
    pub fn phi(&self, i: usize) -> Option<f64> {
        (self.v[i] > 0.0).then(|| self.dv[i] / self.v[i])
    }

    pub fn is_positive(&self) -> bool {
        self.first_nonpositive.is_none()
    }

    /// `(x, v(x))` at the first mesh point, scanning left to right, where
    /// `v ≤ 0`.
    pub fn first_nonpositive(&self) -> Option<(f64, f64)> {
        self.first_nonpositive
    }

    pub fn min_v(&self) -> f64 {
        self.v.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `(v, v′)` at any `x` in the mesh range by cubic Hermite interpolation
    /// of `(v, v′)` and `(v′, v″)`.
    pub fn interpolate(&self, x: f64) -> (f64, f64) {
        let n = self.x.len() - 1;
        let t = ((x - self.x[0]) / self.step).clamp(0.0, n as f64);
        let k = (t.floor() as usize).min(n - 1);
        let s = t - k as f64;
        let h = self.step;
        let herm = |a: f64, da: f64, b: f64, db: f64| {
            let s2 = s * s;
            let s3 = s2 * s;
            (2.0 * s3 - 3.0 * s2 + 1.0) * a
                + (s3 - 2.0 * s2 + s) * h * da
                + (-2.0 * s3 + 3.0 * s2) * b
                + (s3 - s2) * h * db
        };
        (
            herm(self.v[k], self.dv[k], self.v[k + 1], self.dv[k + 1]),
            herm(self.dv[k], self.ddv[k], self.dv[k + 1], self.ddv[k + 1]),
        )
    }
}

/// RK4 for `v″ = rhs(x, v, v′)` from `x0` over `steps` signed steps `h`.
/// Returns `(v, v′)` after each step, starting with the initial pair.
fn rk4_march(
    rhs: &impl Fn(f64, f64, f64) -> f64,
    x0: f64,
    h: f64,
    steps: usize,
) -> Vec<(f64, f64)> {
    let (mut y0, mut y1) = (1.0, 0.0);
    let mut out = Vec::with_capacity(steps + 1);
    out.push((y0, y1));
    for i in 0..steps {
        let x = x0 + i as f64 * h;
        let k1 = (y1, rhs(x, y0, y1));
        let k2 = (
            y1 + 0.5 * h * k1.1,
            rhs(x + 0.5 * h, y0 + 0.5 * h * k1.0, y1 + 0.5 * h * k1.1),
        );
        let k3 = (
            y1 + 0.5 * h * k2.1,
            rhs(x + 0.5 * h, y0 + 0.5 * h * k2.0, y1 + 0.5 * h * k2.1),
        );
        let k4 = (y1 + h * k3.1, rhs(x + h, y0 + h * k3.0, y1 + h * k3.1));
        y0 += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        y1 += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        out.push((y0, y1));
    }
    out
}

/// Integrates `v″ = drag(x)·v′ − f(x)·v` with `v = 1`, `v′ = 0` at the
/// anchor, using classic RK4 on a uniform mesh of `[−π/2, π/2]` whose step
/// is at most `step` (the step count is even so that `0` is a mesh point).
pub fn integrate_riccati_ode(
    drag: impl Fn(f64) -> f64,
    f: impl Fn(f64) -> f64,
    step: f64,
    anchor: RiccatiAnchor,
) -> Result<RiccatiSolution> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Input(format!("step must be positive, got {step}")));
    }
    let mut n = (PI / step).ceil() as usize;
    n += n % 2;
    let h = PI / n as f64;
    let rhs = |x: f64, v: f64, dv: f64| drag(x) * dv - f(x) * v;
    // symmetric about 0, with 0 itself at n/2
    let xs: Vec<f64> = (0..=n)
        .map(|i| match i {
            0 => -FRAC_PI_2,
            i if i == n => FRAC_PI_2,
            i => (i as f64 - (n / 2) as f64) * h,
        })
        .collect();
    let pairs = match anchor {
        RiccatiAnchor::LeftEndpoint => rk4_march(&rhs, -FRAC_PI_2, h, n),
        RiccatiAnchor::Center => {
            let half = n / 2;
            let mut left = rk4_march(&rhs, 0.0, -h, half);
            let right = rk4_march(&rhs, 0.0, h, half);
            left.reverse();
            left.extend_from_slice(&right[1..]);
            left
        }
    };
    let mut first_nonpositive = None;
    let (mut v, mut dv, mut ddv) = (Vec::with_capacity(n + 1), Vec::with_capacity(n + 1), Vec::with_capacity(n + 1));
    for (i, &(a, b)) in pairs.iter().enumerate() {
        if first_nonpositive.is_none() && !(a > 0.0) {
            first_nonpositive = Some((xs[i], a));
        }
        v.push(a);
        dv.push(b);
        ddv.push(rhs(xs[i], a, b));
    }
    Ok(RiccatiSolution {
        anchor,
        step: h,
        x: xs,
        v,
        dv,
        ddv,
        first_nonpositive,
    })
}

/// Solves `v″ − (sin x/p)v′ + f v = 0` with `v(−π/2) = 1`, `v′(−π/2) = 0`.
/// Requires `ε > 0`; positivity loss is recorded on the solution, not
/// raised.
pub fn solve_riccati_v(prob: &SmoczykProblem, step: f64) -> Result<RiccatiSolution> {
    solve_riccati_v_anchored(prob, step, RiccatiAnchor::LeftEndpoint)
}

/// [`solve_riccati_v`] with a selectable anchor for the initial data.
pub fn solve_riccati_v_anchored(prob: &SmoczykProblem, step: f64, anchor: RiccatiAnchor) -> Result<RiccatiSolution> {
    if !(prob.epsilon > 0.0) {
        return Err(Error::Domain("the Riccati route needs ε > 0".into()));
    }
    integrate_riccati_ode(|x| prob.drag(x), |x| prob.f(x), step, anchor)
}

/// Largest change of `v` at shared mesh points when the step is halved.
pub fn step_halving_change(prob: &SmoczykProblem, step: f64, anchor: RiccatiAnchor) -> Result<f64> {
    let coarse = solve_riccati_v_anchored(prob, step, anchor)?;
    let fine = solve_riccati_v_anchored(prob, coarse.step / 2.0, anchor)?;
    Ok(coarse
        .v
        .iter()
        .enumerate()
        .map(|(i, v)| (v - fine.v[2 * i]).abs())
        .fold(0.0, f64::max))
}

/// Default RK4 step for a given `ε`: the solution varies on the scale `ε`
/// near `−π/2`.
pub fn default_riccati_step(epsilon: f64) -> f64 {
    (epsilon / 128.0).min(1e-3)
}

/// `|∫(u′ − uφ)² dμ − ∫(u′² − f u²) dμ|` on the grid of `u`, which vanishes
/// up to discretization error when `φ` solves the Riccati equation.
pub fn completing_square_check(u: &Perturbation, sol: &RiccatiSolution, prob: &SmoczykProblem) -> Result<f64> {
    if let Some((x, v)) = sol.first_nonpositive {
        return Err(Error::PositivityLost { x, v });
    }
    let grid = u.grid();
    check_inside_interval(grid)?;
    let up = u.slope();
    let xs = grid.nodes();
    let mut square = Vec::with_capacity(xs.len());
    let mut form = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let ui = u.values()[i];
        let (v, dv) = sol.interpolate(x);
        let phi = dv / v;
        let p = prob.p(x);
        let d = up[i] - ui * phi;
        square.push(d * d * p);
        let pot = if ui == 0.0 { 0.0 } else { prob.f_times_p(x) * ui * ui };
        form.push(up[i] * up[i] * p - pot);
    }
    Ok((trapezoid(&square, grid.h()) - trapezoid(&form, grid.h())).abs())
}

/// Runs [`inequality_battery`] for each `ε` and returns the smallest gap
/// per `ε`.
pub fn min_gap_sweep(
    epsilons: &[f64],
    grid: Grid1D,
    count: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<f64>> {
    let per_eps = map_range(exec, epsilons.len(), |i| {
        let prob = SmoczykProblem::new(epsilons[i])?;
        let gaps = inequality_battery(&prob, grid, count, seed, Execution::Sequential)?;
        Ok(gaps.iter().map(|g| g.gap).fold(f64::INFINITY, f64::min))
    });
    per_eps.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn problem_formulas() {
        let prob = SmoczykProblem::new(0.0).unwrap();
        assert_relative_eq!(prob.f(0.0), 0.5, max_relative = 1e-15);
        let x0 = (1.0 / 3f64.sqrt()).acos();
        assert!(prob.f(x0).abs() < 1e-15);
        for i in 0..100 {
            let x = -1.5 + 3.0 * i as f64 / 99.0;
            assert!(prob.f(x) < 0.75);
            assert!(SmoczykProblem::new(0.01).unwrap().p(x) > 0.0);
        }
        assert!(SmoczykProblem::new(-0.1).is_err());
    }

    #[test]
    fn zero_test_function_has_zero_gap() {
        let prob = SmoczykProblem::new(0.0).unwrap();
        let u = Perturbation::zero(prob.grid(100).unwrap());
        let r = inequality_gap(&u, &prob).unwrap();
        assert_eq!((r.lhs, r.rhs, r.gap), (0.0, 0.0, 0.0));
    }

    #[test]
    fn laplacian_stencil_for_unit_coefficients() {
        let (a, m) = assemble_sl_with(|_| 1.0, |_| 0.0, 3).unwrap();
        let h = PI / 4.0;
        for d in &a.diag {
            assert_relative_eq!(*d, 2.0 / (h * h), max_relative = 1e-14);
        }
        for o in &a.off {
            assert_relative_eq!(*o, -1.0 / (h * h), max_relative = 1e-14);
        }
        assert_eq!(m, vec![1.0; 3]);
    }

    #[test]
    fn sturm_count_on_diagonal_matrix() {
        let t = SymTridiagonal {
            diag: vec![3.0, -1.0, 2.0],
            off: vec![0.0, 0.0],
        };
        assert_eq!(t.count_below(-2.0), 0);
        assert_eq!(t.count_below(0.0), 1);
        assert_eq!(t.count_below(2.5), 2);
        assert_eq!(t.count_below(10.0), 3);
        assert!((min_eigenvalue(&t, &[1.0; 3]).unwrap() + 1.0).abs() < 1e-11);
    }

    #[test]
    fn riccati_initial_values() {
        let prob = SmoczykProblem::new(0.1).unwrap();
        let sol = solve_riccati_v(&prob, 1e-3).unwrap();
        assert_eq!(sol.v()[0], 1.0);
        assert_eq!(sol.dv()[0], 0.0);
        assert_eq!(sol.phi(0), Some(0.0));
    }

    #[test]
    fn riccati_without_potential_stays_constant() {
        let prob = SmoczykProblem::new(0.1).unwrap();
        let sol = integrate_riccati_ode(|x| prob.drag(x), |_| 0.0, 1e-3, RiccatiAnchor::LeftEndpoint).unwrap();
        assert!(sol.v().iter().all(|&v| v == 1.0));
        assert!((0..sol.mesh().len()).all(|i| sol.phi(i) == Some(0.0)));
    }

    #[test]
    fn riccati_route_needs_positive_epsilon() {
        let prob = SmoczykProblem::new(0.0).unwrap();
        assert!(solve_riccati_v(&prob, 1e-3).is_err());
    }

    #[test]
    fn completing_square_rejects_lost_positivity() {
        // v'' + 4v = 0 from v = 1, v' = 0 vanishes at x = −π/2 + π/4
        let sol = integrate_riccati_ode(|_| 0.0, |_| 4.0, 1e-3, RiccatiAnchor::LeftEndpoint).unwrap();
        assert!(!sol.is_positive());
        let (x, _) = sol.first_nonpositive().unwrap();
        assert!((x - (-FRAC_PI_2 + PI / 4.0)).abs() < 2e-3);
        let prob = SmoczykProblem::new(0.1).unwrap();
        let u = Perturbation::from_fn(prob.grid(50).unwrap(), f64::cos).unwrap();
        assert!(matches!(
            completing_square_check(&u, &sol, &prob),
            Err(Error::PositivityLost { .. })
        ));
    }

    #[test]
    fn hermite_interpolation_reproduces_mesh_values() {
        let prob = SmoczykProblem::new(0.1).unwrap();
        let sol = solve_riccati_v(&prob, 1e-2).unwrap();
        for i in [0, 7, sol.mesh().len() - 1] {
            let (v, dv) = sol.interpolate(sol.mesh()[i]);
            assert_relative_eq!(v, sol.v()[i], max_relative = 1e-12);
            assert_relative_eq!(dv, sol.dv()[i], max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn center_anchor_gives_the_even_solution() {
        let prob = SmoczykProblem::new(0.1).unwrap();
        let sol = solve_riccati_v_anchored(&prob, 1e-3, RiccatiAnchor::Center).unwrap();
        let n = sol.mesh().len() - 1;
        assert_eq!(sol.mesh()[n / 2], 0.0);
        assert_eq!((sol.v()[n / 2], sol.dv()[n / 2]), (1.0, 0.0));
        for i in 0..=n {
            assert_relative_eq!(sol.v()[i], sol.v()[n - i], max_relative = 1e-12);
        }
    }
}
