//! Minimum-norm point of a polytope given by its vertices (Wolfe's method).
//!
//! The solver keeps a *corral*, an affinely independent subset of vertices
//! whose affine-hull minimizer lies in their relative interior. A major cycle
//! adds the vertex most violating the optimality certificate; minor cycles
//! walk back toward the corral's convex hull, dropping vertices whose weight
//! reaches zero.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_sq, sub};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Weight below which a corral member is dropped.
const WEIGHT_EPS: f64 = 1e-15;

/// Finite vertex list; duplicates are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    vertices: Vec<Vec<f64>>,
}

impl Polytope {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let first = vertices.first().ok_or(Error::EmptyPolytope)?;
        let n = first.len();
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "vertices",
                reason: "vertices must have at least one coordinate".into(),
            });
        }
        if let Some(bad) = vertices.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        Ok(Polytope { vertices })
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    /// Every vertex shifted by `-q`.
    pub fn translated(&self, q: &[f64]) -> Polytope {
        Polytope {
            vertices: self.vertices.iter().map(|v| sub(v, q)).collect(),
        }
    }

    /// Convex combination `sum_i weights[i] * v_i`.
    pub fn combine(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (w, v) in weights.iter().zip(&self.vertices) {
            if *w != 0.0 {
                for (o, vi) in out.iter_mut().zip(v) {
                    *o += w * vi;
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinNormResult {
    pub point: Vec<f64>,
    /// One weight per input vertex, zero outside the final corral.
    pub weights: Vec<f64>,
    pub sq_norm: f64,
    /// `|w|^2 - min_i <w, v_i>`.
    pub residual: f64,
    /// False when the iteration cap or a numerical stall ended the solve.
    pub exact: bool,
    pub iterations: usize,
}

/// Wolfe's optimality gap of `w` against the vertex list.
pub fn wolfe_residual(w: &[f64], p: &Polytope) -> f64 {
    let min_proj = p
        .vertices()
        .iter()
        .map(|v| dot(w, v))
        .fold(f64::INFINITY, f64::min);
    norm_sq(w) - min_proj
}

/// Minimizer of `|sum_i alpha_i v_i|^2` subject to `sum_i alpha_i = 1` over
/// the corral. `None` when the corral is (numerically) affinely dependent.
fn affine_minimizer(p: &Polytope, corral: &[usize]) -> Option<Vec<f64>> {
    let k = corral.len();
    if k == 1 {
        return Some(vec![1.0]);
    }
    let base = &p.vertices()[corral[0]];
    let diffs: Vec<Vec<f64>> = corral[1..]
        .iter()
        .map(|&j| sub(&p.vertices()[j], base))
        .collect();
    let m = k - 1;
    // Normal equations (D^T D) beta = -D^T base, augmented in place.
    let mut a = vec![vec![0.0; m + 1]; m];
    for i in 0..m {
        for j in 0..=i {
            let g = dot(&diffs[i], &diffs[j]);
            a[i][j] = g;
            a[j][i] = g;
        }
        a[i][m] = -dot(&diffs[i], base);
    }
    let scale = (0..m).map(|i| a[i][i]).fold(0.0, f64::max);
    if scale <= 0.0 {
        return None;
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        if a[pivot][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, pivot);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest.iter_mut() {
            let factor = row[col] / pivot_row[col];
            if factor != 0.0 {
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= factor * p;
                }
            }
        }
    }
    let mut beta = vec![0.0; m];
    for r in (0..m).rev() {
        let tail: f64 = (r + 1..m).map(|c| a[r][c] * beta[c]).sum();
        beta[r] = (a[r][m] - tail) / a[r][r];
    }
    let mut alpha = Vec::with_capacity(k);
    alpha.push(1.0 - beta.iter().sum::<f64>());
    alpha.extend(beta);
    Some(alpha)
}

fn corral_point(p: &Polytope, corral: &[usize], lambda: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.dim()];
    for (&j, &l) in corral.iter().zip(lambda) {
        for (o, v) in out.iter_mut().zip(&p.vertices()[j]) {
            *o += l * v;
        }
    }
    out
}

fn finish(p: &Polytope, corral: &[usize], lambda: &[f64], exact: bool, iterations: usize) -> MinNormResult {
    let mut weights = vec![0.0; p.len()];
    let total: f64 = lambda.iter().sum();
    for (&j, &l) in corral.iter().zip(lambda) {
        weights[j] += l / total;
    }
    let point = p.combine(&weights);
    let sq_norm = norm_sq(&point);
    let residual = wolfe_residual(&point, p);
    MinNormResult {
        point,
        weights,
        sq_norm,
        residual,
        exact,
        iterations,
    }
}

/// Nearest point of `conv(p)` to the origin.
///
/// Succeeds when `|w|^2 - <w, v_i> <= tol * (1 + |w|^2)` for every vertex.
/// After `100 * p.len()` cycles the best iterate is returned with
/// `exact = false`.
pub fn min_norm_point(p: &Polytope, tol: f64) -> MinNormResult {
    let cap = 100 * p.len();
    let start = (0..p.len())
        .min_by(|&i, &j| norm_sq(&p.vertices()[i]).total_cmp(&norm_sq(&p.vertices()[j])))
        .unwrap();
    let mut corral = vec![start];
    let mut lambda = vec![1.0];
    let mut x = p.vertices()[start].clone();
    let mut iterations = 0;

    loop {
        let xx = norm_sq(&x);
        let (j, proj) = p
            .vertices()
            .iter()
            .map(|v| dot(&x, v))
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, d)| if d < best.1 { (i, d) } else { best });
        if xx - proj <= tol * (1.0 + xx) {
            return finish(p, &corral, &lambda, true, iterations);
        }
        if corral.contains(&j) {
            // Rounding left the certificate unmet on a corral member.
            return finish(p, &corral, &lambda, false, iterations);
        }
        corral.push(j);
        lambda.push(0.0);

        loop {
            iterations += 1;
            if iterations > cap {
                drop_unweighted_tail(&mut corral, &mut lambda);
                return finish(p, &corral, &lambda, false, iterations);
            }
            let Some(alpha) = affine_minimizer(p, &corral) else {
                drop_unweighted_tail(&mut corral, &mut lambda);
                return finish(p, &corral, &lambda, false, iterations);
            };
            if alpha.iter().all(|&a| a > WEIGHT_EPS) {
                lambda = alpha;
                x = corral_point(p, &corral, &lambda);
                break;
            }
            // Step from lambda toward alpha until the first weight hits zero.
            let theta = lambda
                .iter()
                .zip(&alpha)
                .filter(|(_, &a)| a <= WEIGHT_EPS)
                .map(|(&l, &a)| if l - a > 0.0 { l / (l - a) } else { 0.0 })
                .fold(1.0, f64::min);
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            // The member attaining theta is always dropped, even if rounding
            // leaves it slightly positive.
            let hit = lambda
                .iter()
                .zip(&alpha)
                .enumerate()
                .filter(|(_, (_, &a))| a <= WEIGHT_EPS)
                .min_by(|(_, (l1, _)), (_, (l2, _))| l1.total_cmp(l2))
                .map(|(i, _)| i);
            let mut keep_c = Vec::with_capacity(corral.len());
            let mut keep_l = Vec::with_capacity(corral.len());
            for (i, (&c, &l)) in corral.iter().zip(&lambda).enumerate() {
                if l > WEIGHT_EPS && Some(i) != hit {
                    keep_c.push(c);
                    keep_l.push(l);
                }
            }
            if keep_c.is_empty() {
                // Cannot happen in exact arithmetic; keep the largest weight.
                let i = (0..lambda.len())
                    .max_by(|&a, &b| lambda[a].total_cmp(&lambda[b]))
                    .unwrap();
                keep_c.push(corral[i]);
                keep_l.push(1.0);
            }
            let total: f64 = keep_l.iter().sum();
            keep_l.iter_mut().for_each(|l| *l /= total);
            corral = keep_c;
            lambda = keep_l;
        }
    }
}

/// Drops a trailing corral member that never received weight.
fn drop_unweighted_tail(corral: &mut Vec<usize>, lambda: &mut Vec<f64>) {
    if corral.len() > 1 && lambda.last() == Some(&0.0) {
        corral.pop();
        lambda.pop();
    }
}

/// Squared distance from a point to a polytope and the nearest hull point.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub sq_dist: f64,
    pub nearest: Vec<f64>,
    pub exact: bool,
}

/// Projects `q` onto `conv(p)` by solving the min-norm problem for `p - q`.
pub fn dist_to_polytope(q: &[f64], p: &Polytope, tol: f64) -> Result<Projection> {
    if q.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            actual: q.len(),
        });
    }
    let r = min_norm_point(&p.translated(q), tol);
    Ok(Projection {
        sq_dist: r.sq_norm,
        nearest: r.point.iter().zip(q).map(|(w, qi)| w + qi).collect(),
        exact: r.exact,
    })
}
