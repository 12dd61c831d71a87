//! Critical points of DC functions by DCA around a subgradient inner solver.

use crate::dc::{Component, Evaluator};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dist_sq, dot, norm, sub};

/// A convex objective with value and subgradient oracles.
pub trait ConvexObjective {
    fn value(&self, x: &[f64]) -> f64;
    fn subgradient(&self, x: &[f64]) -> Vec<f64>;
}

/// Closure-backed [`ConvexObjective`].
pub struct FnObjective<V, G>(pub V, pub G);

impl<V, G> ConvexObjective for FnObjective<V, G>
where
    V: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn value(&self, x: &[f64]) -> f64 {
        (self.0)(x)
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        (self.1)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexSolverConfig {
    pub step0: f64,
    pub decay: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for ConvexSolverConfig {
    fn default() -> Self {
        ConvexSolverConfig {
            step0: 1.0,
            decay: 0.5,
            max_iters: 2000,
            tol: 1e-8,
        }
    }
}

impl ConvexSolverConfig {
    pub fn validate(&self) -> Result<()> {
        positive("step0", self.step0)?;
        positive("inner tol", self.tol)?;
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::InvalidParameter {
                name: "decay",
                reason: format!("must lie in (0, 1), got {}", self.decay),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSearchConfig {
    pub tol_step: f64,
    pub tol_crit: f64,
    pub max_outer: usize,
    pub inner: ConvexSolverConfig,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        LocalSearchConfig {
            tol_step: 1e-6,
            tol_crit: 1e-5,
            max_outer: 200,
            inner: ConvexSolverConfig::default(),
        }
    }
}

impl LocalSearchConfig {
    pub fn validate(&self) -> Result<()> {
        positive("tol_step", self.tol_step)?;
        positive("tol_crit", self.tol_crit)?;
        self.inner.validate()
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive, got {v}"),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Step size fell below `tol` (or a zero subgradient was hit) before
    /// `max_iters`.
    pub converged: bool,
}

/// Fewest consecutive non-improving steps tolerated before restarting from
/// the best point with a smaller step; the bound used is `max(3, n / 2)`.
const PATIENCE: usize = 3;

/// Normalized subgradient method with geometric step decay.
///
/// Steps are `x - s * g / |g|` and are taken whether or not they improve,
/// so the iterate can cross kinks. After `max(3, n / 2)` steps without a new
/// best value the iterate returns to the best point and `s` shrinks by
/// `decay`. Stops once `s < tol` or after `max_iters` steps. The returned
/// value never exceeds `objective(x0)`.
///
/// For a non-convex objective the result is still the best point visited,
/// but nothing more is promised.
pub fn convex_minimize<O>(objective: &O, x0: &[f64], cfg: &ConvexSolverConfig) -> ConvexMinimum
where
    O: ConvexObjective + ?Sized,
{
    let mut best_x = x0.to_vec();
    let mut best_f = objective.value(x0);
    let mut x = best_x.clone();
    let mut step = cfg.step0;
    let mut misses = 0;
    let mut iterations = 0;
    let mut converged = false;
    let patience = PATIENCE.max(x0.len() / 2);

    while iterations < cfg.max_iters {
        if step < cfg.tol {
            converged = true;
            break;
        }
        let g = objective.subgradient(&x);
        let gn = norm(&g);
        if gn == 0.0 || !gn.is_finite() {
            if x == best_x {
                converged = gn == 0.0;
                break;
            }
            x.clone_from(&best_x);
            step *= cfg.decay;
            misses = 0;
            continue;
        }
        x = axpy(&x, -step / gn, &g);
        iterations += 1;
        let fx = objective.value(&x);
        if fx < best_f {
            best_f = fx;
            best_x.clone_from(&x);
            misses = 0;
        } else {
            misses += 1;
            if misses >= patience {
                x.clone_from(&best_x);
                step *= cfg.decay;
                misses = 0;
            }
        }
    }

    ConvexMinimum {
        x: best_x,
        value: best_f,
        iterations,
        converged,
    }
}

/// A critical point candidate returned by the local search.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub x: Vec<f64>,
    pub f_value: f64,
    /// `|xi1 - xi2|` with `xi1 = subgrad(1, x)` and `xi2` the last
    /// linearization slope: the inner solver's stationarity estimate.
    pub criticality_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchOutcome {
    pub point: CriticalPoint,
    /// `f(x_j)` for every accepted DCA iterate, starting with `f(x0)`.
    pub trace: Vec<f64>,
    pub outer_iterations: usize,
    /// Stopped on the step tolerance rather than `max_outer`.
    pub converged: bool,
}

/// `y -> f1(y) - <slope, y>`, the DCA subproblem.
pub struct Linearized<'a, 'p> {
    pub eval: &'a Evaluator<'p>,
    pub slope: &'a [f64],
}

impl ConvexObjective for Linearized<'_, '_> {
    fn value(&self, y: &[f64]) -> f64 {
        self.eval.value(Component::First, y) - dot(self.slope, y)
    }

    fn subgradient(&self, y: &[f64]) -> Vec<f64> {
        sub(&self.eval.subgrad(Component::First, y), self.slope)
    }
}

/// DCA: at `x_j` take `xi2 = subgrad(2, x_j)` and set `x_{j+1}` to the
/// minimizer of `f1(y) - <xi2, y>` from `x_j`. The problem is expected to be
/// in penalized (unconstrained) form.
///
/// `f(x_j)` is non-increasing: the inner solver never returns a point worse
/// than its start, and `f2` lies above its linearization.
pub fn dc_local_search(eval: &Evaluator<'_>, x0: &[f64], cfg: &LocalSearchConfig) -> LocalSearchOutcome {
    let mut x = x0.to_vec();
    let mut fx = eval.eval_f(&x);
    let mut trace = vec![fx];
    let mut outer = 0;
    let mut converged = false;
    let mut slope = eval.subgrad(Component::Second, &x);

    while outer < cfg.max_outer {
        outer += 1;
        let sub_problem = Linearized { eval, slope: &slope };
        let m = convex_minimize(&sub_problem, &x, &cfg.inner);
        let f_next = eval.eval_f(&m.x);
        if f_next > fx {
            // Only rounding can get here; keep the better point.
            converged = true;
            break;
        }
        let moved = dist_sq(&m.x, &x).sqrt();
        x = m.x;
        fx = f_next;
        trace.push(fx);
        if moved <= cfg.tol_step {
            converged = true;
            break;
        }
        slope = eval.subgrad(Component::Second, &x);
    }

    let xi1 = eval.subgrad(Component::First, &x);
    let residual = norm(&sub(&xi1, &slope));
    LocalSearchOutcome {
        point: CriticalPoint {
            x,
            f_value: fx,
            criticality_residual: residual,
        },
        trace,
        outer_iterations: outer,
        converged,
    }
}
