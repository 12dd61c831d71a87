//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tesgo::escape::{build_fhat, deviation, escape_step, sample_directions, spherical_subdiff, DirectionSet};
use tesgo::local_search::{ConvexObjective, ConvexSolverConfig};
use tesgo::problems::ProblemId;
use tesgo::{Component, DcProblem, Evaluator, DEFAULT_GAMMA};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean projection onto the unit simplex (sort-based).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Squared distance from the origin to `conv(vertices)` by accelerated
/// projected gradient on the simplex of weights.
pub fn simplex_pg_sq_norm(vertices: &[Vec<f64>], iters: usize) -> f64 {
    let k = vertices.len();
    let gram: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| dot(&vertices[i], &vertices[j])).collect())
        .collect();
    let mul = |l: &[f64]| -> Vec<f64> { (0..k).map(|i| dot(&gram[i], l)).collect() };
    let obj = |l: &[f64]| dot(l, &mul(l));
    // Largest Gram eigenvalue by power iteration.
    let mut v = vec![1.0; k];
    let mut lam = 0.0;
    for _ in 0..500 {
        let w = mul(&v);
        let nrm = dot(&w, &w).sqrt();
        if nrm == 0.0 {
            break;
        }
        lam = nrm / dot(&v, &v).sqrt();
        v = w.iter().map(|x| x / nrm).collect();
    }
    let lip = 2.0 * lam.max(1e-12) * 1.05;
    let mut x = vec![1.0 / k as f64; k];
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut best = obj(&x);
    for _ in 0..iters {
        let g = mul(&y);
        let step: Vec<f64> = y.iter().zip(&g).map(|(yi, gi)| yi - 2.0 * gi / lip).collect();
        let x_next = project_simplex(&step);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let f_next = obj(&x_next);
        if f_next > best {
            // Adaptive restart keeps the sequence monotone.
            y = x.clone();
            t = 1.0;
            continue;
        }
        best = f_next;
        y = x_next
            .iter()
            .zip(&x)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        x = x_next;
        t = t_next;
    }
    best.max(0.0)
}

/// Random polytope with 1..=6 vertices in dimension 1..=4, occasionally with
/// a duplicated vertex, and a query point.
pub fn random_instance(r: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = r.random_range(1..=6);
    let d = r.random_range(1..=4);
    let mut verts: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..d).map(|_| r.random_range(-1.0..1.0)).collect())
        .collect();
    if k > 1 && r.random_bool(0.2) {
        verts[k - 1] = verts[0].clone();
    }
    let q = (0..d).map(|_| r.random_range(-2.0..2.0)).collect();
    (verts, q)
}

/// Every registered problem, at a few dimensions for the parametric ones.
pub fn registered_problems() -> Vec<DcProblem> {
    let mut out = Vec::new();
    for id in ProblemId::ALL {
        match id.fixed_dimension() {
            Some(n) => out.push(id.make(n).unwrap()),
            None => {
                for n in [2, 5, 10] {
                    out.push(id.make(n).unwrap());
                }
            }
        }
    }
    out
}

fn random_point(r: &mut ChaCha8Rng, p: &DcProblem, spread: f64) -> Vec<f64> {
    p.bounds()
        .lower()
        .iter()
        .zip(p.bounds().upper())
        .map(|(a, b)| {
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a) * spread;
            r.random_range(c - h..=c + h)
        })
        .collect()
}

/// Smallest `f_i(y) - f_i(x) - <g, y - x>` over seeded random pairs. Points
/// come from the box inflated by `spread`, and a quarter of the `x` draws are
/// snapped onto kinks (zeros and integer grid points).
pub fn min_subgradient_slack(p: &DcProblem, c: Component, pairs: usize, seed: u64, spread: f64) -> f64 {
    let mut r = rng(seed);
    let f = p.component(c);
    let mut worst = f64::INFINITY;
    for i in 0..pairs {
        let mut x = random_point(&mut r, p, spread);
        if i % 4 == 0 {
            x.iter_mut().for_each(|v| *v = v.round() * r.random_range(0..2) as f64);
        }
        let y = random_point(&mut r, p, spread);
        let g = f.subgradient(&x);
        let diff: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
        worst = worst.min(f.value(&y) - f.value(&x) - dot(&g, &diff));
    }
    worst
}

/// Grid search over a 2-D (or 1-D) box followed by a shrinking compass
/// search polish.
pub fn grid_then_polish(p: &DcProblem, per_axis: usize) -> (Vec<f64>, f64) {
    let n = p.dimension();
    assert!(n <= 2);
    let f = |x: &[f64]| p.component(Component::First).value(x) - p.component(Component::Second).value(x);
    let (a, b) = (p.bounds().lower().to_vec(), p.bounds().upper().to_vec());
    let axis = |i: usize, k: usize| a[i] + (b[i] - a[i]) * k as f64 / (per_axis - 1) as f64;
    let mut best = (a.clone(), f64::INFINITY);
    let total = per_axis.pow(n as u32);
    for idx in 0..total {
        let x: Vec<f64> = (0..n).map(|i| axis(i, (idx / per_axis.pow(i as u32)) % per_axis)).collect();
        let v = f(&x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let mut h = (b[0] - a[0]) / (per_axis - 1) as f64;
    let (mut x, mut fx) = best;
    while h > 1e-10 {
        let mut improved = false;
        for i in 0..n {
            for s in [-1.0, 1.0] {
                let mut y = x.clone();
                y[i] = (y[i] + s * h).clamp(a[i], b[i]);
                let fy = f(&y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (x, fx)
}

pub struct EscapeFixture {
    pub problem: DcProblem,
    pub x_bar: Vec<f64>,
    pub t: f64,
    pub m1: usize,
    pub m2: usize,
}

/// Penalized problems with an anchor and radius where the sampled sets
/// disagree.
pub fn escape_fixtures() -> Vec<EscapeFixture> {
    let f = |id: ProblemId, n: usize, x_bar: Vec<f64>, t: f64, m1: usize, m2: usize| EscapeFixture {
        problem: id.make(n).unwrap().penalize(DEFAULT_GAMMA).unwrap(),
        x_bar,
        t,
        m1,
        m2,
    };
    vec![
        f(ProblemId::Ex1, 1, vec![1.0], 2.0, 2, 2),
        f(ProblemId::P16, 2, vec![0.0, 0.0], 5.0, 4, 4),
        f(ProblemId::P16, 5, vec![0.0; 5], 3.0, 10, 5),
        f(ProblemId::P19, 2, vec![0.0, 0.0], 0.5, 4, 4),
        f(ProblemId::P15, 2, vec![1.0, -1.0], 2.0, 4, 4),
        f(ProblemId::P18, 5, vec![0.5; 5], 2.5, 10, 10),
        f(ProblemId::P20, 10, vec![0.3; 10], 4.0, 20, 10),
    ]
}

/// The sample point whose subgradient produced `xi2`.
fn source_point(e: &Evaluator<'_>, x: &[f64], t: f64, dirs: &DirectionSet, xi2: &[f64]) -> Vec<f64> {
    dirs.directions()
        .iter()
        .map(|u| x.iter().zip(u).map(|(a, b)| a + t * b).collect::<Vec<f64>>())
        .find(|z| {
            let g = e.subgrad(Component::Second, z);
            g.iter().zip(xi2).map(|(a, b)| (a - b).powi(2)).sum::<f64>() <= 1e-18
        })
        .expect("xi2 is a sampled subgradient")
}

pub struct OverestimateCheck {
    /// Linearization error of `f2` at the anchor for the chosen `xi2`.
    pub eps_lin: f64,
    /// Smallest `f_hat(y) - f(y)` over the sampled `y`.
    pub min_gap: f64,
    /// The escape point is bitwise equal for `epsilon` in `{0, delta t, eps_lin}`.
    pub argmin_invariant: bool,
}

pub fn check_overestimate(fx: &EscapeFixture, samples: usize, seed: u64) -> OverestimateCheck {
    let mut r = rng(seed);
    let e = Evaluator::new(&fx.problem);
    let n = fx.problem.dimension();
    let d1 = spherical_subdiff(&e, Component::First, &fx.x_bar, fx.t, &sample_directions(n, fx.m1, 0).unwrap()).unwrap();
    let dirs2 = sample_directions(n, fx.m2, 0).unwrap();
    let d2 = spherical_subdiff(&e, Component::Second, &fx.x_bar, fx.t, &dirs2).unwrap();
    let dev = deviation(&d2, &d1).unwrap();
    let z = source_point(&e, &fx.x_bar, fx.t, &dirs2, &dev.xi2);
    let f2 = |v: &[f64]| e.value(Component::Second, v);
    let shift: Vec<f64> = fx.x_bar.iter().zip(&z).map(|(a, b)| a - b).collect();
    let eps_lin = f2(&fx.x_bar) - f2(&z) - dot(&dev.xi2, &shift);
    let fhat = build_fhat(&e, &fx.x_bar, &dev.xi2, eps_lin.max(0.0)).unwrap();
    let (a, b) = (fx.problem.bounds().lower(), fx.problem.bounds().upper());
    let mut min_gap = f64::INFINITY;
    for _ in 0..samples {
        let y: Vec<f64> = (0..n).map(|i| r.random_range(a[i]..=b[i])).collect();
        min_gap = min_gap.min(fhat.value(&y) - e.eval_f(&y));
    }
    let cfg = ConvexSolverConfig::default();
    let reference = escape_step(&e, &fx.x_bar, &dev, 0.0, &cfg).unwrap();
    let argmin_invariant = [0.01 * fx.t, eps_lin.max(0.0)]
        .iter()
        .all(|&eps| escape_step(&e, &fx.x_bar, &dev, eps, &cfg).unwrap().y == reference.y);
    OverestimateCheck {
        eps_lin,
        min_gap,
        argmin_invariant,
    }
}
