//! DC problems `f = f1 - f2` on a box, their oracles and the exact penalty.
//!
//! Oracles live on [`DcProblem`] and are pure; every evaluation made by a
//! solver goes through an [`Evaluator`], which owns the counters of one solve.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Penalty coefficient used when a caller does not choose one.
pub const DEFAULT_GAMMA: f64 = 100.0;

/// Box `[lower, upper]` in n-space.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidBounds(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(Error::InvalidBounds("zero-dimensional box".into()));
        }
        for (i, (a, b)) in lower.iter().zip(&upper).enumerate() {
            if !(a.is_finite() && b.is_finite()) || a > b {
                return Err(Error::InvalidBounds(format!(
                    "coordinate {i}: [{a}, {b}]"
                )));
            }
        }
        Ok(BoxBounds { lower, upper })
    }

    /// The cube `[a, b]^n`.
    pub fn cube(n: usize, a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a; n], vec![b; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(xi, (a, b))| a <= xi && xi <= b)
    }

    /// `max{0, a_i - x_i, x_i - b_i}` together with the derivative direction
    /// of the active term: `(index, -1.0)` for a lower violation, `(index, 1.0)`
    /// for an upper one. The lowest index wins ties; `None` when nothing is
    /// violated.
    pub fn max_violation(&self, x: &[f64]) -> (f64, Option<(usize, f64)>) {
        let mut worst = 0.0;
        let mut active = None;
        for (i, (xi, (a, b))) in x.iter().zip(self.lower.iter().zip(&self.upper)).enumerate() {
            let below = a - xi;
            let above = xi - b;
            if below > worst {
                worst = below;
                active = Some((i, -1.0));
            }
            if above > worst {
                worst = above;
                active = Some((i, 1.0));
            }
        }
        (worst, active)
    }
}

/// Per-solve oracle call counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounters {
    pub n_f1: u64,
    pub n_f2: u64,
    pub n_g1: u64,
    pub n_g2: u64,
}

impl EvalCounters {
    /// Average of the number of value evaluations of the two components.
    pub fn mean_function_evals(&self) -> f64 {
        (self.n_f1 + self.n_f2) as f64 / 2.0
    }

    pub fn mean_subgradient_evals(&self) -> f64 {
        (self.n_g1 + self.n_g2) as f64 / 2.0
    }

    /// True when no counter of `self` is below the matching counter of `earlier`.
    pub fn dominates(&self, earlier: &EvalCounters) -> bool {
        self.n_f1 >= earlier.n_f1
            && self.n_f2 >= earlier.n_f2
            && self.n_g1 >= earlier.n_g1
            && self.n_g2 >= earlier.n_g2
    }
}

/// Which DC component an oracle call targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    First,
    Second,
}

/// A finite convex function with a deterministic subgradient selection.
pub trait ConvexFunction: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn subgradient(&self, x: &[f64]) -> Vec<f64>;
}

/// [`ConvexFunction`] from a value closure and a subgradient closure.
pub struct FnConvex<V, G> {
    value: V,
    subgradient: G,
}

impl<V, G> FnConvex<V, G>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(value: V, subgradient: G) -> Self {
        FnConvex { value, subgradient }
    }

    pub fn shared(value: V, subgradient: G) -> Arc<dyn ConvexFunction>
    where
        V: 'static,
        G: 'static,
    {
        Arc::new(Self::new(value, subgradient))
    }
}

impl<V, G> ConvexFunction for FnConvex<V, G>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        (self.subgradient)(x)
    }
}

/// `f1(x) + gamma * max{0, a_i - x_i, x_i - b_i}`.
struct Penalized {
    inner: Arc<dyn ConvexFunction>,
    bounds: BoxBounds,
    gamma: f64,
}

impl ConvexFunction for Penalized {
    fn value(&self, x: &[f64]) -> f64 {
        let (violation, _) = self.bounds.max_violation(x);
        self.inner.value(x) + self.gamma * violation
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.inner.subgradient(x);
        if let (_, Some((j, s))) = self.bounds.max_violation(x) {
            g[j] += self.gamma * s;
        }
        g
    }
}

/// `minimize f1(x) - f2(x)` subject to `x` in a box.
#[derive(Clone)]
pub struct DcProblem {
    name: String,
    bounds: BoxBounds,
    f1: Arc<dyn ConvexFunction>,
    f2: Arc<dyn ConvexFunction>,
    f_star: Option<f64>,
    gamma: Option<f64>,
}

impl fmt::Debug for DcProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DcProblem")
            .field("name", &self.name)
            .field("dimension", &self.dimension())
            .field("bounds", &self.bounds)
            .field("f_star", &self.f_star)
            .field("gamma", &self.gamma)
            .finish()
    }
}

impl DcProblem {
    pub fn new(
        name: impl Into<String>,
        bounds: BoxBounds,
        f1: Arc<dyn ConvexFunction>,
        f2: Arc<dyn ConvexFunction>,
    ) -> Self {
        DcProblem {
            name: name.into(),
            bounds,
            f1,
            f2,
            f_star: None,
            gamma: None,
        }
    }

    pub fn with_f_star(mut self, f_star: f64) -> Self {
        self.f_star = Some(f_star);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &BoxBounds {
        &self.bounds
    }

    pub fn f_star(&self) -> Option<f64> {
        self.f_star
    }

    /// Penalty coefficient folded into `f1`, if any.
    pub fn penalty(&self) -> Option<f64> {
        self.gamma
    }

    /// Uncounted access to a component. Solvers go through [`Evaluator`].
    pub fn component(&self, c: Component) -> &dyn ConvexFunction {
        match c {
            Component::First => self.f1.as_ref(),
            Component::Second => self.f2.as_ref(),
        }
    }

    /// Unconstrained form: `f1 + gamma * max{0, a_i - x_i, x_i - b_i}` minus
    /// the unchanged `f2`. The box is kept for step-size computations.
    pub fn penalize(&self, gamma: f64) -> Result<DcProblem> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must be positive and finite, got {gamma}"),
            });
        }
        Ok(DcProblem {
            name: self.name.clone(),
            bounds: self.bounds.clone(),
            f1: Arc::new(Penalized {
                inner: Arc::clone(&self.f1),
                bounds: self.bounds.clone(),
                gamma,
            }),
            f2: Arc::clone(&self.f2),
            f_star: self.f_star,
            gamma: Some(gamma),
        })
    }
}

/// Counted oracle access for a single solve.
///
/// Not `Sync`: concurrent solves each build their own evaluator over a
/// shared `&DcProblem`.
pub struct Evaluator<'p> {
    problem: &'p DcProblem,
    counters: Cell<EvalCounters>,
}

impl<'p> Evaluator<'p> {
    pub fn new(problem: &'p DcProblem) -> Self {
        Evaluator {
            problem,
            counters: Cell::new(EvalCounters::default()),
        }
    }

    pub fn problem(&self) -> &'p DcProblem {
        self.problem
    }

    pub fn dimension(&self) -> usize {
        self.problem.dimension()
    }

    pub fn counters(&self) -> EvalCounters {
        self.counters.get()
    }

    fn check_dim(&self, x: &[f64]) {
        assert_eq!(
            x.len(),
            self.problem.dimension(),
            "point dimension does not match problem `{}`",
            self.problem.name
        );
    }

    fn bump(&self, update: impl FnOnce(&mut EvalCounters)) {
        let mut c = self.counters.get();
        update(&mut c);
        self.counters.set(c);
    }

    pub fn value(&self, c: Component, x: &[f64]) -> f64 {
        self.check_dim(x);
        self.bump(|k| match c {
            Component::First => k.n_f1 += 1,
            Component::Second => k.n_f2 += 1,
        });
        self.problem.component(c).value(x)
    }

    pub fn subgrad(&self, c: Component, x: &[f64]) -> Vec<f64> {
        self.check_dim(x);
        self.bump(|k| match c {
            Component::First => k.n_g1 += 1,
            Component::Second => k.n_g2 += 1,
        });
        self.problem.component(c).subgradient(x)
    }

    /// `f1(x) - f2(x)`, one call to each component.
    pub fn eval_f(&self, x: &[f64]) -> f64 {
        self.value(Component::First, x) - self.value(Component::Second, x)
    }
}
