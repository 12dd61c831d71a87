//! Escaping from critical points.
//!
//! Around a critical point `x` the subdifferentials of both components are
//! approximated by polytopes of subgradients gathered at `x + t * u_j`. When
//! some element of the `f2` polytope lies farther than the threshold from the
//! `f1` polytope, that element linearizes `f2` into a convex overestimate
//! `f_hat` of `f` whose minimizer lands in a lower basin.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dc::{Component, Evaluator};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dist_sq, dot, norm, sub};
use crate::local_search::{convex_minimize, ConvexMinimum, ConvexObjective, ConvexSolverConfig, Linearized};
use crate::min_norm::{dist_to_polytope, Polytope, DEFAULT_TOL};

/// Vertices closer than this are merged when a polytope is sampled.
pub const DUPLICATE_TOL: f64 = 1e-9;

/// Unit directions used to probe a neighbourhood of radius `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    directions: Vec<Vec<f64>>,
    seed: u64,
}

impl DirectionSet {
    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// True for the coordinate set `{+e_1, -e_1, ..., +e_n, -e_n}`.
    pub fn is_coordinate_set(&self) -> bool {
        let n = self.directions.first().map_or(0, Vec::len);
        self.directions.len() == 2 * n
            && self.directions.iter().enumerate().all(|(k, d)| {
                let (i, s) = (k / 2, if k % 2 == 0 { 1.0 } else { -1.0 });
                d.iter()
                    .enumerate()
                    .all(|(j, &v)| v == if j == i { s } else { 0.0 })
            })
    }
}

/// `{+e_1, -e_1, ..., +e_n, -e_n}` when `m >= 2n`; otherwise `m` seeded
/// Gaussian directions normalized to unit length.
pub fn sample_directions(n: usize, m: usize, seed: u64) -> Result<DirectionSet> {
    if m < 1 {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: "at least one direction is required".into(),
        });
    }
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "dimension must be positive".into(),
        });
    }
    let directions = if m >= 2 * n {
        (0..n)
            .flat_map(|i| {
                [1.0, -1.0].map(|s| {
                    let mut e = vec![0.0; n];
                    e[i] = s;
                    e
                })
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(m);
        while out.len() < m {
            let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let len = norm(&v);
            if len > 1e-8 {
                out.push(v.iter().map(|c| c / len).collect());
            }
        }
        out
    };
    Ok(DirectionSet { directions, seed })
}

/// `{subgrad(c, x + t * u_j)}` with near-duplicate vertices merged.
pub fn spherical_subdiff(
    eval: &Evaluator<'_>,
    component: Component,
    x: &[f64],
    t: f64,
    dirs: &DirectionSet,
) -> Result<Polytope> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("radius must be positive, got {t}"),
        });
    }
    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(dirs.len());
    for u in dirs.directions() {
        let g = eval.subgrad(component, &axpy(x, t, u));
        let tol_sq = DUPLICATE_TOL * DUPLICATE_TOL;
        if !vertices.iter().any(|v| dist_sq(v, &g) <= tol_sq) {
            vertices.push(g);
        }
    }
    Polytope::new(vertices)
}

/// The max-min pair between two polytopes.
#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    /// `max_{xi2 in D2} min_{xi1 in conv D1} |xi1 - xi2|^2`.
    pub sq_dist: f64,
    /// Vertex of `D2` attaining the maximum (first on ties).
    pub xi2: Vec<f64>,
    /// Nearest point of `conv(D1)` to `xi2`.
    pub xi1: Vec<f64>,
    /// Some projection stopped before meeting its optimality certificate.
    pub inexact: bool,
}

pub fn deviation(d2: &Polytope, d1: &Polytope) -> Result<Deviation> {
    if d2.dim() != d1.dim() {
        return Err(Error::DimensionMismatch {
            expected: d1.dim(),
            actual: d2.dim(),
        });
    }
    let mut best: Option<Deviation> = None;
    let mut inexact = false;
    for v in d2.vertices() {
        let proj = dist_to_polytope(v, d1, DEFAULT_TOL)?;
        inexact |= !proj.exact;
        if best.as_ref().is_none_or(|b| proj.sq_dist > b.sq_dist) {
            best = Some(Deviation {
                sq_dist: proj.sq_dist,
                xi2: v.clone(),
                xi1: proj.nearest,
                inexact: false,
            });
        }
    }
    let mut best = best.expect("polytopes are non-empty");
    best.inexact = inexact;
    Ok(best)
}

/// `y -> f1(y) - [f2(anchor) + <xi2, y - anchor> - epsilon]`.
pub struct FhatObjective<'a, 'p> {
    eval: &'a Evaluator<'p>,
    anchor: Vec<f64>,
    xi2: Vec<f64>,
    epsilon: f64,
    f2_at_anchor: f64,
}

impl<'a, 'p> FhatObjective<'a, 'p> {
    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn xi2(&self) -> &[f64] {
        &self.xi2
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn f2_at_anchor(&self) -> f64 {
        self.f2_at_anchor
    }

    /// `f_hat` minus its constant terms. Same minimizers, and the iterates of
    /// a solver run on it do not depend on `epsilon` at all.
    pub fn linear_part(&self) -> Linearized<'_, 'p> {
        Linearized {
            eval: self.eval,
            slope: &self.xi2,
        }
    }
}

impl ConvexObjective for FhatObjective<'_, '_> {
    fn value(&self, y: &[f64]) -> f64 {
        let affine = self.f2_at_anchor + dot(&self.xi2, &sub(y, &self.anchor)) - self.epsilon;
        self.eval.value(Component::First, y) - affine
    }

    fn subgradient(&self, y: &[f64]) -> Vec<f64> {
        sub(&self.eval.subgrad(Component::First, y), &self.xi2)
    }
}

pub fn build_fhat<'a, 'p>(
    eval: &'a Evaluator<'p>,
    x_bar: &[f64],
    xi2: &[f64],
    epsilon: f64,
) -> Result<FhatObjective<'a, 'p>> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("must be non-negative, got {epsilon}"),
        });
    }
    let n = eval.dimension();
    for v in [x_bar, xi2] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: v.len(),
            });
        }
    }
    let f2_at_anchor = eval.value(Component::Second, x_bar);
    Ok(FhatObjective {
        eval,
        anchor: x_bar.to_vec(),
        xi2: xi2.to_vec(),
        epsilon,
        f2_at_anchor,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscapePoint {
    pub y: Vec<f64>,
    /// True objective `f(y)`, not `f_hat(y)`.
    pub f_value: f64,
    pub fhat_value: f64,
    pub converged: bool,
}

/// Minimizes `f_hat` built from the deviation's `xi2`, starting at `x_bar`.
pub fn escape_step(
    eval: &Evaluator<'_>,
    x_bar: &[f64],
    dev: &Deviation,
    epsilon: f64,
    cfg: &ConvexSolverConfig,
) -> Result<EscapePoint> {
    let fhat = build_fhat(eval, x_bar, &dev.xi2, epsilon)?;
    let ConvexMinimum { x, value, converged, .. } = convex_minimize(&fhat.linear_part(), x_bar, cfg);
    let constant = fhat.epsilon - fhat.f2_at_anchor + dot(&fhat.xi2, &fhat.anchor);
    let f_value = eval.eval_f(&x);
    Ok(EscapePoint {
        y: x,
        f_value,
        fhat_value: value + constant,
        converged,
    })
}
