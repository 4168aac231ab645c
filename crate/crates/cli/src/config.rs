//! Run configuration: the JSON document, and its validation into a [`Plan`]
//! that the task runners can execute without further checks.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::PathBuf;

use bminimal::flow::{FlowBoundary, CFL};
use bminimal::geometry1d::{grim_reaper, GraphCurve, Grid1D, Perturbation, WeightField};
use bminimal::graphic::{Axis, GridND};
use bminimal::solvers::SolveConfig;
use bminimal::stability::{RiccatiAnchor, SmoczykProblem};
use bminimal::Expr;
use serde::Deserialize;

/// Keeps grim-reaper work away from the poles of `−log cos x`.
pub const POLE_MARGIN: f64 = 1e-9;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Verify,
    Solve1d,
    Solve2d,
    Stability,
    Flow,
    Variation,
}

/// A number, or an expression / keyword given as a string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum BoundarySpec {
    Pair([Value; 2]),
    Single(Value),
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub residual: Option<f64>,
    pub max_iter: Option<usize>,
    pub min_step: Option<f64>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Anchor {
    Left,
    Center,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    pub interval: Option<[f64; 2]>,
    /// `[a1, b1, a2, b2]`
    pub rectangle: Option<[f64; 4]>,
    pub n: Option<usize>,
    pub m1: Option<usize>,
    pub m2: Option<usize>,
    /// Interior node count of the eigenvalue problem.
    pub m: Option<usize>,
    #[serde(rename = "B")]
    pub b: Option<String>,
    pub boundary: Option<BoundarySpec>,
    pub epsilon: Option<f64>,
    pub riccati_anchor: Option<Anchor>,
    pub riccati_step: Option<f64>,
    pub count: Option<usize>,
    pub tolerances: Option<Tolerances>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub samples: Option<usize>,
    pub initial: Option<String>,
    pub test_function: Option<String>,
    pub levels: Option<Vec<usize>>,
}

pub struct VerifyPlan {
    pub interval: [f64; 2],
    pub levels: Vec<usize>,
}

pub struct Solve1dPlan {
    pub grid: Grid1D,
    pub ya: f64,
    pub yb: f64,
    pub weight: WeightField,
    pub grim_reaper: bool,
    pub solve: SolveConfig,
}

pub struct Solve2dPlan {
    pub grid: GridND,
    pub dirichlet: Expr,
    pub solve: SolveConfig,
}

pub struct StabilityPlan {
    pub problem: SmoczykProblem,
    pub m: usize,
    pub anchor: RiccatiAnchor,
    pub step: Option<f64>,
    pub count: usize,
    pub seed: u64,
}

pub struct FlowPlan {
    pub initial: GraphCurve,
    pub boundary: FlowBoundary,
    /// Exact solution `grim_reaper(x) + t` applies.
    pub translating: bool,
    pub t_end: f64,
    pub dt: f64,
    pub samples: usize,
}

pub struct VariationPlan {
    pub interval: [f64; 2],
    pub levels: Vec<usize>,
    pub weight: WeightField,
    /// `None` selects the grim reaper.
    pub curve: Option<Expr>,
    /// `None` selects `(x − a)(b − x)`.
    pub test_function: Option<Expr>,
}

pub enum Plan {
    Verify(VerifyPlan),
    Solve1d(Solve1dPlan),
    Solve2d(Solve2dPlan),
    Stability(StabilityPlan),
    Flow(FlowPlan),
    Variation(VariationPlan),
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid config: {e}")))
}

fn interval(cfg: &RunConfig, default: [f64; 2]) -> Result<[f64; 2], ConfigError> {
    let [a, b] = cfg.interval.unwrap_or(default);
    if !(a.is_finite() && b.is_finite() && a < b) {
        return err(format!("interval [{a}, {b}] must be finite with a < b"));
    }
    Ok([a, b])
}

fn check_grim_interval([a, b]: [f64; 2]) -> Result<(), ConfigError> {
    let limit = FRAC_PI_2 - POLE_MARGIN;
    if a.abs() >= limit || b.abs() >= limit {
        return err(format!(
            "grim reaper needs the interval inside (−π/2, π/2) with margin {POLE_MARGIN}; got [{a}, {b}]"
        ));
    }
    Ok(())
}

fn grid(ab: [f64; 2], n: usize) -> Result<Grid1D, ConfigError> {
    Grid1D::new(ab[0], ab[1], n).map_err(|e| ConfigError(e.to_string()))
}

fn levels(cfg: &RunConfig) -> Result<Vec<usize>, ConfigError> {
    let levels = cfg.levels.clone().unwrap_or_else(|| vec![100, 200, 400]);
    if levels.is_empty() || levels.iter().any(|&n| n < 3) {
        return err("levels must be a non-empty list of grid sizes ≥ 3");
    }
    Ok(levels)
}

fn weight(cfg: &RunConfig) -> Result<WeightField, ConfigError> {
    let text = cfg.b.as_deref().unwrap_or("y");
    WeightField::parse(text).map_err(|e| ConfigError(format!("B: {e}")))
}

fn expression(text: &str, vars: &[&str], what: &str) -> Result<Expr, ConfigError> {
    Expr::parse(text, vars).map_err(|e| ConfigError(format!("{what}: {e}")))
}

fn solve_config(cfg: &RunConfig) -> Result<SolveConfig, ConfigError> {
    let t = cfg.tolerances.unwrap_or_default();
    let d = SolveConfig::default();
    let s = SolveConfig {
        tol_residual: t.residual.unwrap_or(d.tol_residual),
        max_iter: t.max_iter.unwrap_or(d.max_iter),
        min_step: t.min_step.unwrap_or(d.min_step),
    };
    s.validate().map_err(|e| ConfigError(format!("tolerances: {e}")))?;
    Ok(s)
}

fn constant(v: &Value, what: &str) -> Result<f64, ConfigError> {
    let x = match v {
        Value::Number(x) => *x,
        Value::Text(t) => expression(t, &[], what)?
            .eval_at::<f64>(&[])
            .map_err(|e| ConfigError(format!("{what}: {e}")))?,
    };
    if !x.is_finite() {
        return err(format!("{what} must be finite"));
    }
    Ok(x)
}

fn is_keyword(spec: &Option<BoundarySpec>, word: &str) -> bool {
    matches!(spec, Some(BoundarySpec::Single(Value::Text(t))) if t == word)
}

/// Rejects keys that the task would silently ignore.
fn reject_unused(cfg: &RunConfig, allowed: &[&str]) -> Result<(), ConfigError> {
    let present = [
        ("interval", cfg.interval.is_some()),
        ("rectangle", cfg.rectangle.is_some()),
        ("n", cfg.n.is_some()),
        ("m1", cfg.m1.is_some()),
        ("m2", cfg.m2.is_some()),
        ("m", cfg.m.is_some()),
        ("B", cfg.b.is_some()),
        ("boundary", cfg.boundary.is_some()),
        ("epsilon", cfg.epsilon.is_some()),
        ("riccati_anchor", cfg.riccati_anchor.is_some()),
        ("riccati_step", cfg.riccati_step.is_some()),
        ("count", cfg.count.is_some()),
        ("tolerances", cfg.tolerances.is_some()),
        ("seed", cfg.seed.is_some()),
        ("t_end", cfg.t_end.is_some()),
        ("dt", cfg.dt.is_some()),
        ("samples", cfg.samples.is_some()),
        ("initial", cfg.initial.is_some()),
        ("test_function", cfg.test_function.is_some()),
        ("levels", cfg.levels.is_some()),
    ];
    for (key, set) in present {
        if set && !allowed.contains(&key) {
            return err(format!("key \"{key}\" does not apply to this task"));
        }
    }
    Ok(())
}

pub fn validate(cfg: &RunConfig) -> Result<Plan, ConfigError> {
    match cfg.task {
        Task::Verify => {
            reject_unused(cfg, &["interval", "levels", "B"])?;
            let w = weight(cfg)?;
            if !w.is_translating() {
                return err("verify checks the grim reaper and needs B = y");
            }
            let iv = interval(cfg, [-1.3, 1.3])?;
            check_grim_interval(iv)?;
            Ok(Plan::Verify(VerifyPlan {
                interval: iv,
                levels: levels(cfg)?,
            }))
        }
        Task::Solve1d => {
            reject_unused(cfg, &["interval", "n", "B", "boundary", "tolerances"])?;
            let iv = interval(cfg, [-1.2, 1.2])?;
            let n = cfg.n.unwrap_or(200);
            if n < 3 {
                return err("n must be at least 3");
            }
            let weight = weight(cfg)?;
            let grim = cfg.boundary.is_none() || is_keyword(&cfg.boundary, "grim_reaper");
            let (ya, yb) = if grim {
                if !weight.is_translating() {
                    return err("grim reaper boundary data needs B = y");
                }
                check_grim_interval(iv)?;
                (grim_reaper(iv[0]).unwrap(), grim_reaper(iv[1]).unwrap())
            } else {
                match cfg.boundary.as_ref().unwrap() {
                    BoundarySpec::Pair([l, r]) => (constant(l, "boundary[0]")?, constant(r, "boundary[1]")?),
                    BoundarySpec::Single(v) => {
                        let c = constant(v, "boundary")?;
                        (c, c)
                    }
                }
            };
            Ok(Plan::Solve1d(Solve1dPlan {
                grid: grid(iv, n)?,
                ya,
                yb,
                weight,
                grim_reaper: grim,
                solve: solve_config(cfg)?,
            }))
        }
        Task::Solve2d => {
            reject_unused(cfg, &["rectangle", "m1", "m2", "B", "boundary", "tolerances"])?;
            if !weight(cfg)?.is_translating() {
                return err("solve2d solves the translating-soliton equation and needs B = y");
            }
            let [a1, b1, a2, b2] = cfg.rectangle.unwrap_or([-1.0, 1.0, 0.0, 1.0]);
            let (m1, m2) = (cfg.m1.unwrap_or(32), cfg.m2.unwrap_or(32));
            let x1 = Axis::new(a1, b1, m1).map_err(|e| ConfigError(format!("rectangle x1: {e}")))?;
            let x2 = Axis::new(a2, b2, m2).map_err(|e| ConfigError(format!("rectangle x2: {e}")))?;
            let dirichlet = match &cfg.boundary {
                // translating grim reaper surface
                _ if cfg.boundary.is_none() || is_keyword(&cfg.boundary, "grim_reaper") => {
                    check_grim_interval([a1, b1])?;
                    expression("-log(cos(x1)) + x2", &["x1", "x2"], "boundary")?
                }
                None => unreachable!(),
                Some(BoundarySpec::Single(Value::Number(c))) => Expr::constant(*c, &["x1", "x2"]),
                Some(BoundarySpec::Single(Value::Text(t))) => expression(t, &["x1", "x2"], "boundary")?,
                Some(BoundarySpec::Pair(_)) => return err("solve2d takes one boundary expression"),
            };
            Ok(Plan::Solve2d(Solve2dPlan {
                grid: GridND::rectangle(x1, x2),
                dirichlet,
                solve: solve_config(cfg)?,
            }))
        }
        Task::Stability => {
            reject_unused(cfg, &["epsilon", "m", "riccati_anchor", "riccati_step", "count", "seed"])?;
            let eps = cfg.epsilon.ok_or_else(|| ConfigError("stability needs epsilon".into()))?;
            let problem = SmoczykProblem::new(eps).map_err(|e| ConfigError(e.to_string()))?;
            let m = cfg.m.unwrap_or(2000);
            if m < 3 {
                return err("m must be at least 3");
            }
            if let Some(s) = cfg.riccati_step {
                if !(s > 0.0 && s.is_finite()) {
                    return err("riccati_step must be positive");
                }
            }
            let anchor = match cfg.riccati_anchor.unwrap_or(Anchor::Left) {
                Anchor::Left => RiccatiAnchor::LeftEndpoint,
                Anchor::Center => RiccatiAnchor::Center,
            };
            Ok(Plan::Stability(StabilityPlan {
                problem,
                m,
                anchor,
                step: cfg.riccati_step,
                count: cfg.count.unwrap_or(200),
                seed: cfg.seed.unwrap_or(0),
            }))
        }
        Task::Flow => {
            reject_unused(cfg, &["interval", "n", "initial", "boundary", "t_end", "dt", "samples"])?;
            let iv = interval(cfg, [-1.0, 1.0])?;
            let n = cfg.n.unwrap_or(200);
            if n < 2 {
                return err("n must be at least 2");
            }
            let g = grid(iv, n)?;
            let initial_text = cfg.initial.as_deref().unwrap_or("grim_reaper");
            let grim = initial_text == "grim_reaper";
            let initial = if grim {
                check_grim_interval(iv)?;
                GraphCurve::from_fn(g, |x| grim_reaper(x).unwrap()).unwrap()
            } else {
                let e = expression(initial_text, &["x"], "initial")?;
                GraphCurve::from_expr(g, &e).map_err(|e| ConfigError(format!("initial: {e}")))?
            };
            let mut translating = false;
            let boundary = match &cfg.boundary {
                None => FlowBoundary::fixed(&initial),
                Some(BoundarySpec::Single(Value::Text(t))) if t == "grim_reaper" => {
                    if !grim {
                        return err("co-moving grim reaper boundary needs initial = \"grim_reaper\"");
                    }
                    translating = true;
                    let v = initial.values();
                    let l = Expr::parse(&format!("{:.17e} + t", v[0]), &["t"]).unwrap();
                    let r = Expr::parse(&format!("{:.17e} + t", v[v.len() - 1]), &["t"]).unwrap();
                    FlowBoundary::new(&l, &r).unwrap()
                }
                Some(BoundarySpec::Pair([l, r])) => {
                    let side = |v: &Value, what: &str| match v {
                        Value::Number(c) => Ok(Expr::constant(*c, &["t"])),
                        Value::Text(t) => expression(t, &["t"], what),
                    };
                    FlowBoundary::new(&side(l, "boundary[0]")?, &side(r, "boundary[1]")?)
                        .map_err(|e| ConfigError(e.to_string()))?
                }
                Some(BoundarySpec::Single(_)) => {
                    return err("flow boundary is a pair of expressions in t, or \"grim_reaper\"")
                }
            };
            let t_end = cfg.t_end.unwrap_or(0.1);
            if !(t_end > 0.0 && t_end.is_finite()) {
                return err("t_end must be positive");
            }
            let h = g.h();
            let dt = cfg.dt.unwrap_or(CFL * h * h);
            if !(dt > 0.0) || dt > CFL * h * h * (1.0 + 1e-12) {
                return err(format!("dt must lie in (0, {CFL}·h²] = (0, {}]", CFL * h * h));
            }
            // boundary data must evaluate over the whole run
            for t in [0.0, t_end] {
                boundary.at(t).map_err(|e| ConfigError(format!("boundary at t = {t}: {e}")))?;
            }
            Ok(Plan::Flow(FlowPlan {
                initial,
                boundary,
                translating,
                t_end,
                dt,
                samples: cfg.samples.unwrap_or(10).max(1),
            }))
        }
        Task::Variation => {
            reject_unused(cfg, &["interval", "levels", "B", "initial", "test_function"])?;
            let iv = interval(cfg, [-1.2, 1.2])?;
            let weight = weight(cfg)?;
            let curve = match cfg.initial.as_deref() {
                None | Some("grim_reaper") => {
                    check_grim_interval(iv)?;
                    None
                }
                Some(t) => Some(expression(t, &["x"], "initial")?),
            };
            let test_function = cfg
                .test_function
                .as_deref()
                .map(|t| expression(t, &["x"], "test_function"))
                .transpose()?;
            let levels = levels(cfg)?;
            // evaluate once on the coarsest level so that domain errors are
            // configuration errors
            let g = grid(iv, levels[0])?;
            if let Some(c) = &curve {
                GraphCurve::from_expr(g, c).map_err(|e| ConfigError(format!("initial: {e}")))?;
            }
            if let Some(xi) = &test_function {
                Perturbation::from_expr(g, xi).map_err(|e| ConfigError(format!("test_function: {e}")))?;
            }
            Ok(Plan::Variation(VariationPlan {
                interval: iv,
                levels,
                weight,
                curve,
                test_function,
            }))
        }
    }
}
