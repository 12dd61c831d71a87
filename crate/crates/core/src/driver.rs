//! The global solver loop.
//!
//! From each critical point `x` the radius `t` sweeps `dt, 2 dt, ..., K dt`
//! with `K dt` the largest distance from `x` to a box face. At each radius the
//! sampled `f2` polytope is compared with the sampled `f1` polytope; a
//! squared deviation above `delta` triggers an escape through `f_hat` and a
//! new local search. A sweep that completes without an accepted escape ends
//! the solve.
//!
//! With `n = 1` and directions `{-1, +1}` the sampled polytopes are the exact
//! spherical subdifferential intervals, so the same loop also runs the
//! conceptual exact-set method on one-dimensional problems.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::dc::{BoxBounds, Component, DcProblem, EvalCounters, Evaluator, DEFAULT_GAMMA};
use crate::error::{Error, Result};
use crate::escape::{deviation, escape_step, sample_directions, spherical_subdiff};
use crate::local_search::{dc_local_search, CriticalPoint, LocalSearchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Simple,
    Full,
    Full150,
    Full200,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Simple => "simple",
            Preset::Full => "full",
            Preset::Full150 => "full_150",
            Preset::Full200 => "full_200",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(Preset::Simple),
            "full" => Ok(Preset::Full),
            "full_150" => Ok(Preset::Full150),
            "full_200" => Ok(Preset::Full200),
            _ => Err(Error::UnknownPreset { name: s.into() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TesgoConfig {
    /// Threshold on the squared deviation.
    pub delta: f64,
    /// Radii per sweep.
    pub k: usize,
    /// Direction budget for the `f1` polytope.
    pub m1: usize,
    /// Direction budget for the `f2` polytope.
    pub m2: usize,
    pub gamma: f64,
    pub seed: u64,
    /// Relative improvement an escape must achieve to be accepted.
    pub improvement_eta: f64,
    /// Cap on accepted escapes.
    pub max_restarts: usize,
    pub local: LocalSearchConfig,
    pub preset: Preset,
}

impl TesgoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.delta > 0.0) {
            return bad("delta", format!("must be positive, got {}", self.delta));
        }
        if self.k < 1 {
            return bad("K", "must be at least 1".into());
        }
        if self.m1 < 1 || self.m2 < 1 {
            return bad("m1/m2", "direction budgets must be at least 1".into());
        }
        if !(self.gamma > 0.0) {
            return bad("gamma", format!("must be positive, got {}", self.gamma));
        }
        if !(self.improvement_eta > 0.0) {
            return bad("improvement_eta", format!("must be positive, got {}", self.improvement_eta));
        }
        self.local.validate()
    }
}

/// Parameter sets for dimension `n`.
pub fn preset(p: Preset, n: usize) -> TesgoConfig {
    let (k, m1, m2) = match p {
        Preset::Simple => (10, 50.min(2 * n), 10.min(n)),
        Preset::Full => (80, 100.min(2 * n), 30.min(2 * n)),
        Preset::Full150 => (80, 150.min(2 * n), 30.min(2 * n)),
        Preset::Full200 => (80, 200.min(2 * n), 30.min(2 * n)),
    };
    TesgoConfig {
        delta: 0.01,
        k,
        m1,
        m2,
        gamma: DEFAULT_GAMMA,
        seed: 0,
        improvement_eta: 1e-6,
        max_restarts: 100,
        local: LocalSearchConfig::default(),
        preset: p,
    }
}

pub fn preset_by_name(name: &str, n: usize) -> Result<TesgoConfig> {
    Ok(preset(name.parse()?, n))
}

/// Largest distance from `x` to a face of the box.
pub fn compute_tbar(x: &[f64], bounds: &BoxBounds) -> f64 {
    x.iter()
        .zip(bounds.lower().iter().zip(bounds.upper()))
        .map(|(xi, (a, b))| (xi - a).max(b - xi))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    ApproxGlobal,
    IterationCap,
    LocalOnly,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::ApproxGlobal => "approx_global",
            Status::IterationCap => "iteration_cap",
            Status::LocalOnly => "local_only",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    /// A critical point became the current iterate; `t` is 0.
    CriticalPoint,
    /// Deviation at radius `t` was within `delta`.
    Check,
    /// Escape at radius `t` led to a better critical point (`f_value`).
    EscapeAccepted,
    /// Escape at radius `t` led to a critical point (`f_value`) that was not
    /// better; the sweep went on.
    EscapeRejected,
    /// Sweep finished; `t` holds `t_bar`.
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    /// Index of the current critical point.
    pub k: usize,
    pub event: TraceEvent,
    pub f_value: f64,
    pub t: f64,
    pub sq_dist: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub x_best: Vec<f64>,
    /// Objective of the penalized problem at `x_best` (equal to `f` inside
    /// the box).
    pub f_best: f64,
    pub status: Status,
    pub counters: EvalCounters,
    pub trace: Vec<TraceEntry>,
    pub wall_time: f64,
}

impl SolveReport {
    /// `f` at each critical point adopted as the current iterate.
    pub fn critical_values(&self) -> Vec<f64> {
        self.trace
            .iter()
            .filter(|e| e.event == TraceEvent::CriticalPoint)
            .map(|e| e.f_value)
            .collect()
    }

    pub fn accepted_escapes(&self) -> usize {
        self.count(TraceEvent::EscapeAccepted)
    }

    pub fn rejected_escapes(&self) -> usize {
        self.count(TraceEvent::EscapeRejected)
    }

    fn count(&self, ev: TraceEvent) -> usize {
        self.trace.iter().filter(|e| e.event == ev).count()
    }
}

fn check_start(problem: &DcProblem, x0: &[f64]) -> Result<()> {
    if x0.len() != problem.dimension() {
        return Err(Error::DimensionMismatch {
            expected: problem.dimension(),
            actual: x0.len(),
        });
    }
    Ok(())
}

/// Penalized local search only, no escapes.
pub fn dca_local_solve(problem: &DcProblem, x0: &[f64], gamma: f64, cfg: &LocalSearchConfig) -> Result<SolveReport> {
    check_start(problem, x0)?;
    cfg.validate()?;
    let started = Instant::now();
    let penalized = problem.penalize(gamma)?;
    let eval = Evaluator::new(&penalized);
    let out = dc_local_search(&eval, x0, cfg);
    Ok(SolveReport {
        trace: vec![TraceEntry {
            k: 0,
            event: TraceEvent::CriticalPoint,
            f_value: out.point.f_value,
            t: 0.0,
            sq_dist: 0.0,
        }],
        x_best: out.point.x,
        f_best: out.point.f_value,
        status: Status::LocalOnly,
        counters: eval.counters(),
        wall_time: started.elapsed().as_secs_f64(),
    })
}

pub fn tesgo_solve(problem: &DcProblem, x0: &[f64], cfg: &TesgoConfig) -> Result<SolveReport> {
    check_start(problem, x0)?;
    cfg.validate()?;
    let started = Instant::now();
    let penalized = problem.penalize(cfg.gamma)?;
    let eval = Evaluator::new(&penalized);
    let n = problem.dimension();
    let dirs1 = sample_directions(n, cfg.m1, cfg.seed)?;
    let dirs2 = sample_directions(n, cfg.m2, cfg.seed)?;

    let mut trace = Vec::new();
    let mut k = 0;
    let mut current: CriticalPoint = dc_local_search(&eval, x0, &cfg.local).point;
    trace.push(TraceEntry {
        k,
        event: TraceEvent::CriticalPoint,
        f_value: current.f_value,
        t: 0.0,
        sq_dist: 0.0,
    });

    let status = 'outer: loop {
        let t_bar = compute_tbar(&current.x, problem.bounds());
        let dt = t_bar / cfg.k as f64;
        let mut moved = false;
        if dt > 0.0 {
            for step in 1..=cfg.k {
                let t = dt * step as f64;
                let d1 = spherical_subdiff(&eval, Component::First, &current.x, t, &dirs1)?;
                let d2 = spherical_subdiff(&eval, Component::Second, &current.x, t, &dirs2)?;
                let dev = deviation(&d2, &d1)?;
                if dev.sq_dist <= cfg.delta {
                    trace.push(TraceEntry {
                        k,
                        event: TraceEvent::Check,
                        f_value: current.f_value,
                        t,
                        sq_dist: dev.sq_dist,
                    });
                    continue;
                }
                let y = escape_step(&eval, &current.x, &dev, cfg.delta * t, &cfg.local.inner)?;
                let candidate = dc_local_search(&eval, &y.y, &cfg.local).point;
                let needed = cfg.improvement_eta * (1.0 + current.f_value.abs());
                let accepted = candidate.f_value <= current.f_value - needed;
                trace.push(TraceEntry {
                    k,
                    event: if accepted {
                        TraceEvent::EscapeAccepted
                    } else {
                        TraceEvent::EscapeRejected
                    },
                    f_value: candidate.f_value,
                    t,
                    sq_dist: dev.sq_dist,
                });
                if accepted {
                    debug_assert!(candidate.f_value < current.f_value);
                    current = candidate;
                    k += 1;
                    trace.push(TraceEntry {
                        k,
                        event: TraceEvent::CriticalPoint,
                        f_value: current.f_value,
                        t: 0.0,
                        sq_dist: 0.0,
                    });
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            trace.push(TraceEntry {
                k,
                event: TraceEvent::Stop,
                f_value: current.f_value,
                t: t_bar,
                sq_dist: 0.0,
            });
            break 'outer Status::ApproxGlobal;
        }
        if k >= cfg.max_restarts {
            break 'outer Status::IterationCap;
        }
    };

    Ok(SolveReport {
        x_best: current.x,
        f_best: current.f_value,
        status,
        counters: eval.counters(),
        trace,
        wall_time: started.elapsed().as_secs_f64(),
    })
}
