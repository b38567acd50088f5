//! Quadrature for the integral representations
//!
//! ```text
//! x^l    = sin(l pi)/pi int_0^inf t^{l-1} (1 + t/x)^{-1} dt
//! log x  = int_0^inf (a + 1)^{-1} - (a + x)^{-1} da
//! A #_l B = sin(l pi)/pi int_0^inf t^{l-1} (A^{-1} + t B^{-1})^{-1} dt
//!        = sin(l pi)/pi int_0^1 t^{l-1} (1 - t)^{-l} (A !_t B) dt
//! ```
//!
//! and a diagnostic for the uniform Riemann integrability of the kernel
//! families behind them.
//!
//! Both schemes work on `(0, 1)` and reach the half line through
//! `t = s / (1 - s)`. Integrands receive the node together with its complement
//! (`1 - s`, or `1 / t` on the half line) so that nothing is lost to
//! cancellation near the endpoints. Element-valued integrals are summed
//! coordinatewise in the fixed basis.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::means::positive_decomposition;
use crate::spectral::{spectral_decompose, ScalarFunction, DEFAULT_CLUSTER_TOL};

pub const SCALAR_REL_TOL: f64 = 1e-8;
pub const ELEMENT_REL_TOL: f64 = 1e-6;

/// Refinement levels always computed before convergence is tested.
const MIN_LEVELS: usize = 3;

/// Tanh-sinh truncation `|v| <= V_MAX`. At 6 the nodes sit within `e^{-634}`
/// of the endpoints, which is still representable.
const V_MAX: f64 = 6.0;

const GL_ORDER: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Double exponential rule, nested halving of the step.
    TanhSinh,
    /// 10-point Gauss–Legendre on panels graded geometrically toward both ends.
    GaussLegendreComposite,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh_sinh" | "tanh-sinh" => Ok(Scheme::TanhSinh),
            "gauss_legendre" | "gauss-legendre" | "gauss_legendre_composite" => {
                Ok(Scheme::GaussLegendreComposite)
            }
            other => Err(Error::Domain(format!(
                "unknown quadrature scheme `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinement_levels: usize,
    /// Factor by which the probe's tail cutoff grows (and its head cutoff
    /// shrinks) from one level to the next.
    pub tail_cutoff_growth: f64,
    pub scheme: Scheme,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self::scalar()
    }
}

impl QuadratureConfig {
    /// Defaults for scalar integrals.
    pub fn scalar() -> Self {
        Self {
            rel_tol: SCALAR_REL_TOL,
            abs_tol: 1e-30,
            max_refinement_levels: 8,
            tail_cutoff_growth: 1e4,
            scheme: Scheme::TanhSinh,
        }
    }

    /// Defaults for element-valued integrals.
    pub fn element() -> Self {
        Self {
            rel_tol: ELEMENT_REL_TOL,
            ..Self::scalar()
        }
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Domain(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_refinement_levels < 1 {
            return Err(Error::Domain("need at least one refinement level".into()));
        }
        if self.tail_cutoff_growth.is_nan() || self.tail_cutoff_growth <= 1.0 {
            return Err(Error::Domain("tail_cutoff_growth must exceed 1".into()));
        }
        Ok(())
    }
}

/// A converged integral with the difference between its last two refinement
/// levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub error_bound: f64,
    pub levels: usize,
}

// ---------------------------------------------------------------------------
// engine

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Range {
    Unit,
    HalfLine,
}

/// Contribution of a node is `w * (jac * g(x, xc))`; `jac` is `t` on the half
/// line and is applied first so that large `t` never meets a large weight.
#[derive(Clone, Copy, Debug)]
struct Node {
    x: f64,
    xc: f64,
    jac: f64,
    w: f64,
}

/// New tanh-sinh nodes at `level` (all nodes at level 0, odd multiples of the
/// step afterwards). Weights exclude the step.
fn tanh_sinh_nodes(range: Range, level: usize) -> Vec<Node> {
    let h = 0.5f64.powi(level as i32);
    let kmax = (V_MAX / h).round() as i64;
    let step = if level == 0 { 1 } else { 2 };
    let start = if level == 0 {
        -kmax
    } else {
        -kmax + ((kmax + 1) % 2)
    };
    let mut out = Vec::with_capacity((2 * kmax / step + 1) as usize);
    let mut k = start;
    while k <= kmax {
        let v = k as f64 * h;
        let u = 0.5 * PI * v.sinh();
        let dv = PI * v.cosh();
        out.push(match range {
            Range::Unit => {
                let s = 1.0 / (1.0 + (-2.0 * u).exp());
                let sc = 1.0 / (1.0 + (2.0 * u).exp());
                Node {
                    x: s,
                    xc: sc,
                    jac: 1.0,
                    w: dv * s * sc,
                }
            }
            Range::HalfLine => {
                let t = (2.0 * u).exp();
                Node {
                    x: t,
                    xc: (-2.0 * u).exp(),
                    jac: t,
                    w: dv,
                }
            }
        });
        k += step;
    }
    out
}

/// Full Gauss–Legendre node set for `level`: `J` panels `[2^{-j-1}, 2^{-j}]`
/// toward each end, one panel on `[0, 2^{-J-1}]`, and every panel split into
/// `m` pieces.
fn gauss_legendre_nodes(range: Range, level: usize) -> Vec<Node> {
    let j_max = (24usize << level.min(6)).min(1000);
    let m = 1usize << level.saturating_sub(5);
    let rule = GaussLegendre::new(GL_ORDER.try_into().expect("non-zero order"));
    let rule: Vec<(f64, f64)> = rule.iter().map(|(x, w)| (*x, *w)).collect();

    // panels measured from the nearer endpoint
    let mut panels = Vec::with_capacity(j_max + 1);
    for j in 1..=j_max {
        panels.push((0.5f64.powi(j as i32 + 1), 0.5f64.powi(j as i32)));
    }
    panels.push((0.0, 0.5f64.powi(j_max as i32 + 1)));

    let mut out = Vec::with_capacity(2 * panels.len() * m * GL_ORDER);
    for left_end in [true, false] {
        for &(lo, hi) in &panels {
            let width = (hi - lo) / m as f64;
            for p in 0..m {
                let a = lo + p as f64 * width;
                let half = 0.5 * width;
                for &(xi, wi) in &rule {
                    // distance to the nearer endpoint
                    let d = a + half * (1.0 + xi);
                    let (s, sc) = if left_end { (d, 1.0 - d) } else { (1.0 - d, d) };
                    let w = wi * half;
                    out.push(match range {
                        Range::Unit => Node {
                            x: s,
                            xc: sc,
                            jac: 1.0,
                            w,
                        },
                        // dt = ds / sc^2 = t ds / (s sc)
                        Range::HalfLine => Node {
                            x: s / sc,
                            xc: sc / s,
                            jac: s / sc,
                            w: w / (s * sc),
                        },
                    });
                }
            }
        }
    }
    out
}

fn weighted_sum<G>(nodes: &[Node], dim: usize, parallel: bool, g: &G) -> Result<Vec<f64>>
where
    G: Fn(f64, f64) -> Result<Vec<f64>> + Sync,
{
    let eval = |n: &Node| -> Result<Vec<f64>> {
        let mut v = g(n.x, n.xc)?;
        for c in &mut v {
            *c = (*c * n.jac) * n.w;
        }
        Ok(v)
    };
    let values: Vec<Vec<f64>> = if parallel {
        nodes.par_iter().map(eval).collect::<Result<_>>()?
    } else {
        nodes.iter().map(eval).collect::<Result<_>>()?
    };
    // fixed summation order, independent of the thread schedule
    let mut sum = vec![0.0; dim];
    for v in &values {
        for (s, c) in sum.iter_mut().zip(v) {
            *s += c;
        }
    }
    Ok(sum)
}

/// Refines until successive levels agree to `max(abs_tol, rel_tol * scale)`;
/// `scale` defaults to the largest coordinate of the estimate.
fn integrate<G>(
    range: Range,
    dim: usize,
    cfg: &QuadratureConfig,
    scale: Option<f64>,
    g: G,
) -> Result<Estimate<Vec<f64>>>
where
    G: Fn(f64, f64) -> Result<Vec<f64>> + Sync,
{
    cfg.validate()?;
    let parallel = dim > 1;
    let mut running = vec![0.0; dim];
    let mut previous: Option<Vec<f64>> = None;
    let mut last_diff = f64::INFINITY;
    let max_levels = cfg.max_refinement_levels.max(MIN_LEVELS);
    for level in 0..max_levels {
        let estimate = match cfg.scheme {
            Scheme::TanhSinh => {
                let add = weighted_sum(&tanh_sinh_nodes(range, level), dim, parallel, &g)?;
                for (r, a) in running.iter_mut().zip(&add) {
                    *r += a;
                }
                let h = 0.5f64.powi(level as i32);
                running.iter().map(|r| r * h).collect::<Vec<f64>>()
            }
            Scheme::GaussLegendreComposite => {
                weighted_sum(&gauss_legendre_nodes(range, level), dim, parallel, &g)?
            }
        };
        if estimate.iter().any(|c| !c.is_finite()) {
            return Err(Error::Quadrature {
                estimate,
                error_bound: f64::INFINITY,
                levels: level + 1,
            });
        }
        if let Some(prev) = &previous {
            last_diff = prev
                .iter()
                .zip(&estimate)
                .fold(0.0f64, |m, (p, e)| m.max((p - e).abs()));
            let scale =
                scale.unwrap_or_else(|| estimate.iter().fold(0.0f64, |m, c| m.max(c.abs())));
            let target = cfg.abs_tol.max(cfg.rel_tol * scale);
            if level + 1 >= MIN_LEVELS && last_diff <= target {
                return Ok(Estimate {
                    value: estimate,
                    error_bound: last_diff,
                    levels: level + 1,
                });
            }
        }
        previous = Some(estimate);
    }
    Err(Error::Quadrature {
        estimate: previous.unwrap_or_default(),
        error_bound: last_diff,
        levels: max_levels,
    })
}

fn scalar_estimate(e: Estimate<Vec<f64>>) -> Estimate<f64> {
    Estimate {
        value: e.value[0],
        error_bound: e.error_bound,
        levels: e.levels,
    }
}

/// `int_0^1 g(s) ds`; `g` receives `(s, 1 - s)`.
pub fn integrate_unit<G>(g: G, cfg: &QuadratureConfig) -> Result<Estimate<f64>>
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    integrate(Range::Unit, 1, cfg, None, |s, sc| Ok(vec![g(s, sc)])).map(scalar_estimate)
}

/// `int_0^inf g(t) dt`; `g` receives `(t, 1 / t)`.
pub fn integrate_half_line<G>(g: G, cfg: &QuadratureConfig) -> Result<Estimate<f64>>
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    integrate(Range::HalfLine, 1, cfg, None, |t, ti| Ok(vec![g(t, ti)])).map(scalar_estimate)
}

// ---------------------------------------------------------------------------
// scalar representations

fn check_open_weight(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "weight must lie in (0, 1), got {lambda}"
        )))
    }
}

fn check_positive_real(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "argument must be positive and finite, got {x}"
        )))
    }
}

/// `x^l` from its integral representation, with error estimate.
pub fn power_integral(x: f64, lambda: f64, cfg: &QuadratureConfig) -> Result<Estimate<f64>> {
    check_positive_real(x)?;
    check_open_weight(lambda)?;
    let pre = (lambda * PI).sin() / PI;
    let mut e = integrate_half_line(|t, _| t.powf(lambda - 1.0) * (x / (x + t)), cfg)
        .map_err(|e| rescale_error(e, pre))?;
    e.value *= pre;
    e.error_bound *= pre;
    Ok(e)
}

pub fn power_integral_scalar(x: f64, lambda: f64, cfg: &QuadratureConfig) -> Result<f64> {
    power_integral(x, lambda, cfg).map(|e| e.value)
}

/// `log x` from its integral representation, with error estimate.
pub fn log_integral(x: f64, cfg: &QuadratureConfig) -> Result<Estimate<f64>> {
    check_positive_real(x)?;
    if x == 1.0 {
        return Ok(Estimate {
            value: 0.0,
            error_bound: 0.0,
            levels: 0,
        });
    }
    // (a+1)^{-1} - (a+x)^{-1} without the cancellation
    integrate_half_line(|a, _| (x - 1.0) / (a + 1.0) / (a + x), cfg)
}

pub fn log_integral_scalar(x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    log_integral(x, cfg).map(|e| e.value)
}

// ---------------------------------------------------------------------------
// geometric mean

struct Inverses {
    a_inv: AlgebraElement,
    b_inv: AlgebraElement,
    scale: f64,
}

fn prepare(a: &AlgebraElement, b: &AlgebraElement, lambda: f64) -> Result<Inverses> {
    a.check_same(b)?;
    check_open_weight(lambda)?;
    let da = positive_decomposition(a, "A")?;
    let db = positive_decomposition(b, "B")?;
    Ok(Inverses {
        a_inv: da.apply(&ScalarFunction::Inverse)?,
        b_inv: db.apply(&ScalarFunction::Inverse)?,
        scale: da.norm() + db.norm(),
    })
}

fn inverse_of(x: &AlgebraElement) -> Result<Vec<f64>> {
    Ok(spectral_decompose(x, DEFAULT_CLUSTER_TOL)
        .apply(&ScalarFunction::Inverse)?
        .into_coords())
}

fn scaled(mut v: Vec<f64>, s: f64) -> Vec<f64> {
    for c in &mut v {
        *c *= s;
    }
    v
}

fn element_result(
    a: &AlgebraElement,
    lambda: f64,
    e: Estimate<Vec<f64>>,
) -> Result<Estimate<AlgebraElement>> {
    let pre = (lambda * PI).sin() / PI;
    Ok(Estimate {
        value: AlgebraElement::from_coords(a.descriptor(), scaled(e.value, pre))?,
        error_bound: e.error_bound * pre,
        levels: e.levels,
    })
}

/// Applies the prefactor `pre` to the payload of a quadrature error.
fn rescale_error(e: Error, pre: f64) -> Error {
    match e {
        Error::Quadrature {
            estimate,
            error_bound,
            levels,
        } => Error::Quadrature {
            estimate: scaled(estimate, pre),
            error_bound: error_bound * pre,
            levels,
        },
        other => other,
    }
}

/// `A #_l B` as `sin(l pi)/pi int_0^inf t^{l-1} (A^{-1} + t B^{-1})^{-1} dt`,
/// with error estimate.
pub fn geometric_mean_integral_estimate(
    a: &AlgebraElement,
    b: &AlgebraElement,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<AlgebraElement>> {
    let inv = prepare(a, b, lambda)?;
    let dim = a.descriptor().dimension();
    let e = integrate(Range::HalfLine, dim, cfg, Some(inv.scale), |t, ti| {
        if t <= 1.0 {
            let m = inv.a_inv.add_scaled(t, &inv.b_inv);
            Ok(scaled(inverse_of(&m)?, t.powf(lambda - 1.0)))
        } else {
            // (A^{-1} + t B^{-1})^{-1} = t^{-1} (A^{-1}/t + B^{-1})^{-1}
            let m = inv.b_inv.add_scaled(ti, &inv.a_inv);
            Ok(scaled(inverse_of(&m)?, t.powf(lambda - 2.0)))
        }
    })
    .map_err(|e| rescale_error(e, (lambda * PI).sin() / PI))?;
    element_result(a, lambda, e)
}

pub fn geometric_mean_integral(
    a: &AlgebraElement,
    b: &AlgebraElement,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<AlgebraElement> {
    geometric_mean_integral_estimate(a, b, lambda, cfg).map(|e| e.value)
}

/// `A #_l B` as `sin(l pi)/pi int_0^1 t^{l-1} (1-t)^{-l} (A !_t B) dt`, with
/// error estimate.
pub fn geometric_mean_harmonic_integral_estimate(
    a: &AlgebraElement,
    b: &AlgebraElement,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<AlgebraElement>> {
    let inv = prepare(a, b, lambda)?;
    let dim = a.descriptor().dimension();
    let e = integrate(Range::Unit, dim, cfg, Some(inv.scale), |s, sc| {
        let m = inv.a_inv.scale(sc).add_scaled(s, &inv.b_inv);
        let w = s.powf(lambda - 1.0) * sc.powf(-lambda);
        Ok(scaled(inverse_of(&m)?, w))
    })
    .map_err(|e| rescale_error(e, (lambda * PI).sin() / PI))?;
    element_result(a, lambda, e)
}

pub fn geometric_mean_harmonic_integral(
    a: &AlgebraElement,
    b: &AlgebraElement,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<AlgebraElement> {
    geometric_mean_harmonic_integral_estimate(a, b, lambda, cfg).map(|e| e.value)
}

// ---------------------------------------------------------------------------
// uniform Riemann integrability

/// Kernel families `a -> f_a(x)` whose integrals over `a in (0, inf)` give
/// `x^l` (up to a constant) and `log x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionFamily {
    /// `f_a(x) = (1 + a x)^{-1} x a^{-l}`.
    PowerKernel { lambda: f64 },
    /// `g_a(x) = (a + 1)^{-1} - (a + x)^{-1}`.
    LogKernel,
}

impl FunctionFamily {
    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionFamily::PowerKernel { lambda } => check_open_weight(*lambda),
            FunctionFamily::LogKernel => Ok(()),
        }
    }

    pub fn eval(&self, alpha: f64, x: f64) -> f64 {
        match self {
            FunctionFamily::PowerKernel { lambda } => x / (1.0 + alpha * x) * alpha.powf(-lambda),
            FunctionFamily::LogKernel => (x - 1.0) / (alpha + 1.0) / (alpha + x),
        }
    }

    /// Grid for the sup over `[0, M]`. The log kernel is not integrable at
    /// `x = 0`, so its grid starts at `M / 16`.
    fn grid(&self, m: f64) -> Vec<f64> {
        let first = match self {
            FunctionFamily::PowerKernel { .. } => 0,
            FunctionFamily::LogKernel => 1,
        };
        (first..=PROBE_GRID)
            .map(|j| m * j as f64 / PROBE_GRID as f64)
            .collect()
    }
}

impl fmt::Display for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionFamily::PowerKernel { lambda } => write!(f, "power({lambda})"),
            FunctionFamily::LogKernel => write!(f, "log"),
        }
    }
}

pub const PROBE_LEVELS: usize = 4;
const PROBE_GRID: usize = 16;
const PROBE_DELTA: f64 = 1e-4;
const PROBE_CUTOFF: f64 = 1e4;
const PROBE_PANELS: usize = 4096;
/// Interior interval on which the two Riemann sums are compared.
pub const PROBE_MESH_INTERVAL: (f64, f64) = (0.1, 10.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeLevel {
    pub delta: f64,
    pub n_cutoff: f64,
    pub mesh_panels: usize,
}

/// Per-level sups over the grid of the head residual `|int_0^delta f_a da|`,
/// the tail residual `|int_N^inf f_a da|` and the gap between midpoint sums
/// with `m` and `2m` panels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub family: FunctionFamily,
    #[serde(rename = "M")]
    pub m: f64,
    pub grid: Vec<f64>,
    pub head: Vec<f64>,
    pub tail: Vec<f64>,
    pub mesh_discrepancy: Vec<f64>,
    pub levels: Vec<ProbeLevel>,
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2)
        .all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0))
}

impl ProbeRecord {
    /// Every residual column decreases from level to level.
    pub fn decays(&self) -> bool {
        strictly_decreasing(&self.head)
            && strictly_decreasing(&self.tail)
            && strictly_decreasing(&self.mesh_discrepancy)
    }

    /// Largest residual at the finest level.
    pub fn finest(&self) -> f64 {
        [&self.head, &self.tail, &self.mesh_discrepancy]
            .iter()
            .filter_map(|c| c.last())
            .fold(0.0f64, |m, v| m.max(*v))
    }
}

/// Best available value of a scalar integral: the converged estimate, or the
/// last estimate when refinement ran out.
fn best_value(r: Result<Estimate<f64>>) -> f64 {
    match r {
        Ok(e) => e.value,
        Err(Error::Quadrature { estimate, .. }) => estimate.first().copied().unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    }
}

fn midpoint_sum(family: &FunctionFamily, x: f64, panels: usize) -> f64 {
    let (a, b) = PROBE_MESH_INTERVAL;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| family.eval(a + (k as f64 + 0.5) * h, x))
        .sum::<f64>()
        * h
}

/// Runs [`PROBE_LEVELS`] levels; level `l` uses head cutoff
/// `1e-4 / g^l`, tail cutoff `1e4 * g^l` (`g = cfg.tail_cutoff_growth`) and
/// `4096 * 2^l` mesh panels.
pub fn uniformity_probe(
    family: FunctionFamily,
    m: f64,
    cfg: &QuadratureConfig,
) -> Result<ProbeRecord> {
    family.validate()?;
    cfg.validate()?;
    check_positive_real(m)?;
    let grid = family.grid(m);
    let g = cfg.tail_cutoff_growth;
    let levels: Vec<ProbeLevel> = (0..PROBE_LEVELS)
        .map(|l| ProbeLevel {
            delta: PROBE_DELTA / g.powi(l as i32),
            n_cutoff: PROBE_CUTOFF * g.powi(l as i32),
            mesh_panels: PROBE_PANELS << l,
        })
        .collect();

    let per_level: Vec<(f64, f64, f64)> = levels
        .par_iter()
        .map(|lv| {
            let mut head = 0.0f64;
            let mut tail = 0.0f64;
            let mut mesh = 0.0f64;
            for &x in &grid {
                let d = lv.delta;
                let h = best_value(integrate_unit(|s, _| d * family.eval(d * s, x), cfg));
                let n = lv.n_cutoff;
                let t = best_value(integrate_half_line(
                    |u, _| n * family.eval(n * (1.0 + u), x),
                    cfg,
                ));
                let r = (midpoint_sum(&family, x, lv.mesh_panels)
                    - midpoint_sum(&family, x, 2 * lv.mesh_panels))
                .abs();
                head = head.max(h.abs());
                tail = tail.max(t.abs());
                mesh = mesh.max(r);
            }
            (head, tail, mesh)
        })
        .collect();

    Ok(ProbeRecord {
        family,
        m,
        grid,
        head: per_level.iter().map(|p| p.0).collect(),
        tail: per_level.iter().map(|p| p.1).collect(),
        mesh_discrepancy: per_level.iter().map(|p| p.2).collect(),
        levels,
    })
}
