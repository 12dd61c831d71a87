mod common;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::Rng;
use tesgo::driver::{preset, Preset};
use tesgo::problems::ProblemId;
use tesgo::{tesgo_solve, Component, ConvexFunction, DcProblem, Evaluator, DEFAULT_GAMMA};

#[test]
fn subgradient_inequality_on_every_registered_component() {
    for (i, p) in common::registered_problems().iter().enumerate() {
        for c in [Component::First, Component::Second] {
            let slack = common::min_subgradient_slack(p, c, 1000, 100 + i as u64, 1.0);
            assert!(slack >= -1e-9, "{} n={} {c:?}: slack {slack}", p.name(), p.dimension());
        }
    }
}

#[test]
fn subgradient_inequality_after_penalization() {
    for (i, p) in common::registered_problems().iter().enumerate() {
        let pen = p.penalize(DEFAULT_GAMMA).unwrap();
        let slack = common::min_subgradient_slack(&pen, Component::First, 1000, 500 + i as u64, 1.5);
        assert!(slack >= -1e-9, "{} n={}: slack {slack}", p.name(), p.dimension());
    }
}

#[test]
fn penalized_first_component_is_convex() {
    let mut r = common::rng(11);
    for p in common::registered_problems() {
        let pen = p.penalize(DEFAULT_GAMMA).unwrap();
        let f = pen.component(Component::First);
        let n = p.dimension();
        let (a, b) = (p.bounds().lower()[0], p.bounds().upper()[0]);
        let w = b - a;
        for _ in 0..300 {
            let x: Vec<f64> = (0..n).map(|_| r.random_range(a - w..b + w)).collect();
            let y: Vec<f64> = (0..n).map(|_| r.random_range(a - w..b + w)).collect();
            let lam: f64 = r.random_range(0.0..=1.0);
            let mid: Vec<f64> = x.iter().zip(&y).map(|(u, v)| lam * u + (1.0 - lam) * v).collect();
            let chord = lam * f.value(&x) + (1.0 - lam) * f.value(&y);
            assert!(f.value(&mid) <= chord + 1e-9 * (1.0 + chord.abs()), "{}", p.name());
        }
    }
}

#[test]
fn nonnegativity_identities() {
    let mut r = common::rng(5);
    for n in [2, 5, 10] {
        let p16 = ProblemId::P16.make(n).unwrap();
        let p20 = ProblemId::P20.make(n).unwrap();
        let e16 = Evaluator::new(&p16);
        let e20 = Evaluator::new(&p20);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..n).map(|_| r.random_range(-10.0..10.0)).collect();
            let direct16: f64 = x.iter().map(|v| (v.abs() - 5.0).powi(2)).sum();
            let f16 = e16.eval_f(&x);
            assert!(f16 >= -1e-9 * (1.0 + direct16));
            assert!((f16 - direct16).abs() <= 1e-9 * (1.0 + direct16));
            let direct20: f64 = x.windows(2).map(|w| (w[1] - w[0] + 1.0 - w[0] * w[0]).abs()).sum();
            let f20 = e20.eval_f(&x);
            assert!(f20 >= -1e-9 * (1.0 + direct20));
            assert!((f20 - direct20).abs() <= 1e-9 * (1.0 + direct20));
        }
    }
}

#[test]
fn objective_is_exact_difference_of_components() {
    let mut r = common::rng(3);
    for p in common::registered_problems() {
        let e = Evaluator::new(&p);
        for _ in 0..100 {
            let x: Vec<f64> = p
                .bounds()
                .lower()
                .iter()
                .zip(p.bounds().upper())
                .map(|(a, b)| r.random_range(*a..=*b))
                .collect();
            let f1 = p.component(Component::First).value(&x);
            let f2 = p.component(Component::Second).value(&x);
            assert_eq!(e.eval_f(&x).to_bits(), (f1 - f2).to_bits());
        }
    }
}

#[test]
fn grid_oracle_reproduces_tabulated_optima() {
    for (id, per_axis) in [
        (ProblemId::P15, 401),
        (ProblemId::P17, 401),
        (ProblemId::P19, 401),
        (ProblemId::Ex1, 20_001),
    ] {
        let n = id.default_dimension();
        let p = id.make(n).unwrap();
        let (_, f) = common::grid_then_polish(&p, per_axis);
        let want = id.f_star(n).unwrap();
        assert!((f - want).abs() <= 1e-3, "{}: oracle {f} vs {want}", id.name());
    }
}

#[test]
fn default_starts_lie_in_the_box() {
    for id in ProblemId::ALL {
        let n = id.default_dimension();
        assert!(id.bounds(n).contains(&id.default_start(n)), "{}", id.name());
    }
}

struct Counting {
    inner: Arc<DcProblem>,
    which: Component,
    values: AtomicU64,
    subgradients: AtomicU64,
}

impl ConvexFunction for Counting {
    fn value(&self, x: &[f64]) -> f64 {
        self.values.fetch_add(1, Ordering::Relaxed);
        self.inner.component(self.which).value(x)
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        self.subgradients.fetch_add(1, Ordering::Relaxed);
        self.inner.component(self.which).subgradient(x)
    }
}

fn counting(inner: &Arc<DcProblem>, which: Component) -> Arc<Counting> {
    Arc::new(Counting {
        inner: inner.clone(),
        which,
        values: AtomicU64::new(0),
        subgradients: AtomicU64::new(0),
    })
}

#[test]
fn counters_match_oracle_invocations() {
    for id in [ProblemId::P16, ProblemId::P19, ProblemId::Ex1] {
        let n = id.default_dimension();
        let base = Arc::new(id.make(n).unwrap());
        let c1 = counting(&base, Component::First);
        let c2 = counting(&base, Component::Second);
        let wrapped = DcProblem::new("counted", base.bounds().clone(), c1.clone(), c2.clone());
        let report = tesgo_solve(&wrapped, &id.default_start(n), &preset(Preset::Full, n)).unwrap();
        let got = report.counters;
        assert_eq!(got.n_f1, c1.values.load(Ordering::Relaxed), "{}", id.name());
        assert_eq!(got.n_g1, c1.subgradients.load(Ordering::Relaxed), "{}", id.name());
        assert_eq!(got.n_f2, c2.values.load(Ordering::Relaxed), "{}", id.name());
        assert_eq!(got.n_g2, c2.subgradients.load(Ordering::Relaxed), "{}", id.name());
        assert!(got.n_f1 > 0 && got.n_g2 > 0);
    }
}
