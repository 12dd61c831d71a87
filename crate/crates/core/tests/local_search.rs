mod common;

use rand::Rng;
use tesgo::local_search::{
    convex_minimize, dc_local_search, ConvexObjective, ConvexSolverConfig, FnObjective, Linearized,
    LocalSearchConfig,
};
use tesgo::problems::ProblemId;
use tesgo::{dca_local_solve, Component, Evaluator, DEFAULT_GAMMA};

#[test]
fn p16_origin_is_critical() {
    let p = ProblemId::P16.make(2).unwrap().penalize(DEFAULT_GAMMA).unwrap();
    let e = Evaluator::new(&p);
    let out = dc_local_search(&e, &[0.0, 0.0], &LocalSearchConfig::default());
    assert_eq!(out.point.x, vec![0.0, 0.0]);
    assert_eq!(out.point.f_value, 50.0);
}

#[test]
fn p16_positive_orthant_reaches_minimizer() {
    let p = ProblemId::P16.make(2).unwrap().penalize(DEFAULT_GAMMA).unwrap();
    let e = Evaluator::new(&p);
    let out = dc_local_search(&e, &[6.0, 6.0], &LocalSearchConfig::default());
    assert!(out.point.x.iter().all(|v| (v - 5.0).abs() < 1e-5), "{:?}", out.point.x);
    assert!(out.point.f_value < 1e-9);
    assert!(out.point.criticality_residual >= 0.0);
    assert_eq!(out.point.f_value, e.eval_f(&out.point.x));
}

#[test]
fn convex_problem_is_one_convex_solve() {
    let p = tesgo::DcProblem::new(
        "shifted-norm",
        tesgo::BoxBounds::cube(3, -10.0, 10.0).unwrap(),
        tesgo::FnConvex::shared(
            |x| x.iter().map(|v| (v - 1.5).abs()).sum(),
            |x| x.iter().map(|v| tesgo::linalg::sign0(v - 1.5)).collect(),
        ),
        tesgo::FnConvex::shared(|_| 0.0, |x| vec![0.0; x.len()]),
    );
    let r = dca_local_solve(&p, &[7.0, -3.0, 0.0], DEFAULT_GAMMA, &LocalSearchConfig::default()).unwrap();
    assert!(r.f_best < 1e-6, "{}", r.f_best);
}

#[test]
fn trace_is_monotone_and_first_step_descends_the_model() {
    let cfg = LocalSearchConfig::default();
    let mut r = common::rng(4);
    for p in common::registered_problems() {
        let pen = p.penalize(DEFAULT_GAMMA).unwrap();
        let e = Evaluator::new(&pen);
        let (a, b) = (p.bounds().lower().to_vec(), p.bounds().upper().to_vec());
        for _ in 0..5 {
            let x0: Vec<f64> = (0..p.dimension()).map(|i| r.random_range(a[i]..=b[i])).collect();
            let out = dc_local_search(&e, &x0, &cfg);
            assert_eq!(out.trace[0], e.eval_f(&x0));
            assert!(out.trace.windows(2).all(|w| w[1] <= w[0]), "{}: {:?}", p.name(), out.trace);

            let slope = e.subgrad(Component::Second, &x0);
            let model = Linearized { eval: &e, slope: &slope };
            let m = convex_minimize(&model, &x0, &cfg.inner);
            assert!(model.value(&m.x) <= model.value(&x0) + cfg.inner.tol);
        }
    }
}

#[test]
fn local_search_is_deterministic() {
    let p = ProblemId::P20.make(5).unwrap().penalize(DEFAULT_GAMMA).unwrap();
    let cfg = LocalSearchConfig::default();
    let x0 = [3.0, -2.0, 7.5, 0.1, -9.0];
    let a = dc_local_search(&Evaluator::new(&p), &x0, &cfg);
    let b = dc_local_search(&Evaluator::new(&p), &x0, &cfg);
    assert_eq!(a, b);
}

#[test]
fn convex_minimize_never_ends_above_start() {
    let mut r = common::rng(8);
    let cfg = ConvexSolverConfig::default();
    for _ in 0..200 {
        let c: Vec<f64> = (0..3).map(|_| r.random_range(-5.0..5.0)).collect();
        let w: Vec<f64> = (0..3).map(|_| r.random_range(0.1..3.0)).collect();
        let (c2, w2) = (c.clone(), w.clone());
        let obj = FnObjective(
            move |x: &[f64]| x.iter().zip(&c).zip(&w).map(|((x, c), w)| w * (x - c).abs()).fold(0.0, f64::max),
            move |x: &[f64]| {
                let vals: Vec<f64> = x.iter().zip(&c2).zip(&w2).map(|((x, c), w)| w * (x - c).abs()).collect();
                let k = (0..3).fold(0, |k, i| if vals[i] > vals[k] { i } else { k });
                let mut g = vec![0.0; 3];
                g[k] = w2[k] * tesgo::linalg::sign0(x[k] - c2[k]);
                g
            },
        );
        let x0: Vec<f64> = (0..3).map(|_| r.random_range(-10.0..10.0)).collect();
        let m = convex_minimize(&obj, &x0, &cfg);
        assert!(m.value <= obj.value(&x0));
        assert_eq!(m.value, obj.value(&m.x));
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let p = ProblemId::P19.make(2).unwrap();
    let mut cfg = LocalSearchConfig::default();
    cfg.inner.decay = 1.0;
    assert!(dca_local_solve(&p, &[0.0, 0.0], DEFAULT_GAMMA, &cfg).is_err());
    assert!(dca_local_solve(&p, &[0.0], DEFAULT_GAMMA, &LocalSearchConfig::default()).is_err());
    assert!(dca_local_solve(&p, &[0.0, 0.0], 0.0, &LocalSearchConfig::default()).is_err());
}
