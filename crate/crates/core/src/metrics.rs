//! Solution quality and solver benchmarking.
//!
//! Accuracy profiles rank solvers by how close they come to the best value
//! any solver found on each instance; performance profiles (Dolan-More) rank
//! them by cost ratios over the instances each one solved. A multi-start run
//! contributes one instance per `(problem, n, start_id)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::dc::EvalCounters;
use crate::error::{Error, Result};

/// Points in the default tau and theta grids.
pub const GRID_POINTS: usize = 200;

/// `(f_val - f_ref) / (|f_ref| + 1)`.
pub fn relative_error(f_val: f64, f_ref: f64) -> f64 {
    (f_val - f_ref) / (f_ref.abs() + 1.0)
}

pub fn is_tau_approx(f_val: f64, f_ref: f64, tau: f64) -> bool {
    relative_error(f_val, f_ref) <= tau
}

/// One solver run on one start of one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub solver: String,
    pub problem: String,
    pub n: usize,
    pub start_id: usize,
    pub f_opt: f64,
    pub f_star: Option<f64>,
    pub counters: EvalCounters,
    pub wall_time: f64,
    pub status: String,
}

/// What a profile counts as one problem.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instance {
    pub problem: String,
    pub n: usize,
    pub start_id: usize,
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/n={}/start={}", self.problem, self.n, self.start_id)
    }
}

impl RunRecord {
    pub fn instance(&self) -> Instance {
        Instance {
            problem: self.problem.clone(),
            n: self.n,
            start_id: self.start_id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Accuracy,
    Time,
    Nfev,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Accuracy => "accuracy",
            Measure::Time => "time",
            Measure::Nfev => "nfev",
        }
    }

    /// Cost of a run; `nfev` averages the value evaluations of the two
    /// components.
    fn cost(self, r: &RunRecord) -> f64 {
        match self {
            Measure::Time => r.wall_time,
            Measure::Nfev => r.counters.mean_function_evals(),
            Measure::Accuracy => unreachable!("accuracy has no cost"),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accuracy" => Ok(Measure::Accuracy),
            "time" => Ok(Measure::Time),
            "nfev" => Ok(Measure::Nfev),
            _ => Err(Error::UnknownMeasure { name: s.into() }),
        }
    }
}

/// Curves over a shared grid, one per solver, each in `[0, 1]` and
/// non-decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub measure: Measure,
    pub grid: Vec<f64>,
    pub curves: BTreeMap<String, Vec<f64>>,
}

impl ProfileTable {
    pub fn is_well_formed(&self) -> bool {
        self.curves.values().all(|c| {
            c.len() == self.grid.len()
                && c.iter().all(|v| (0.0..=1.0).contains(v))
                && c.windows(2).all(|w| w[0] <= w[1])
        })
    }

    /// Value of `solver`'s curve at grid index `i`.
    pub fn value(&self, solver: &str, i: usize) -> Option<f64> {
        self.curves.get(solver).and_then(|c| c.get(i).copied())
    }
}

/// `points` evenly spaced values on `[0, hi]`; just `[0]` when `hi <= 0`.
pub fn linear_grid(hi: f64, points: usize) -> Vec<f64> {
    if !(hi > 0.0) || points < 2 {
        return vec![0.0];
    }
    let mut grid: Vec<f64> = (0..points)
        .map(|i| hi * i as f64 / (points - 1) as f64)
        .collect();
    grid[points - 1] = hi;
    grid
}

/// `points` log-spaced ratios on `[1, hi]`.
pub fn log_grid(hi: f64, points: usize) -> Vec<f64> {
    let hi = if hi.is_finite() && hi > 1.0 { hi } else { 2.0 };
    if points < 2 {
        return vec![1.0];
    }
    let top = hi.ln();
    let mut grid: Vec<f64> = (0..points)
        .map(|i| (top * i as f64 / (points - 1) as f64).exp())
        .collect();
    // exp(ln(hi)) can land just below hi.
    grid[points - 1] = hi;
    grid
}

/// Records arranged as instance -> solver -> record.
struct Grouped<'a> {
    solvers: Vec<String>,
    by_instance: BTreeMap<Instance, BTreeMap<String, &'a RunRecord>>,
}

fn group(records: &[RunRecord]) -> Result<Grouped<'_>> {
    let solvers: BTreeSet<String> = records.iter().map(|r| r.solver.clone()).collect();
    let mut by_instance: BTreeMap<Instance, BTreeMap<String, &RunRecord>> = BTreeMap::new();
    for r in records {
        by_instance
            .entry(r.instance())
            .or_default()
            .entry(r.solver.clone())
            .or_insert(r);
    }
    let missing = missing_pairs(&solvers, &by_instance);
    if !missing.is_empty() {
        return Err(Error::MissingRecords(missing.join(", ")));
    }
    Ok(Grouped {
        solvers: solvers.into_iter().collect(),
        by_instance,
    })
}

fn missing_pairs(
    solvers: &BTreeSet<String>,
    by_instance: &BTreeMap<Instance, BTreeMap<String, &RunRecord>>,
) -> Vec<String> {
    let mut out = Vec::new();
    for (inst, have) in by_instance {
        for s in solvers {
            if !have.contains_key(s) {
                out.push(format!("({s}, {inst})"));
            }
        }
    }
    out
}

/// Splits records into those on instances every solver ran, and a list of
/// the missing `(solver, instance)` pairs.
pub fn complete_instances(records: &[RunRecord]) -> (Vec<RunRecord>, Vec<String>) {
    let solvers: BTreeSet<String> = records.iter().map(|r| r.solver.clone()).collect();
    let mut by_instance: BTreeMap<Instance, BTreeMap<String, &RunRecord>> = BTreeMap::new();
    for r in records {
        by_instance.entry(r.instance()).or_default().entry(r.solver.clone()).or_insert(r);
    }
    let missing = missing_pairs(&solvers, &by_instance);
    let kept = records
        .iter()
        .filter(|r| by_instance[&r.instance()].len() == solvers.len())
        .cloned()
        .collect();
    (kept, missing)
}

/// Best value over solvers on one instance.
fn best_value(runs: &BTreeMap<String, &RunRecord>) -> f64 {
    runs.values().map(|r| r.f_opt).fold(f64::INFINITY, f64::min)
}

/// `E_it = (f_it - V_t) / (|V_t| + 1)` with `V_t` the best value on the
/// instance, for every instance (outer) and solver (inner, sorted).
pub fn accuracy_errors(records: &[RunRecord]) -> Result<BTreeMap<Instance, BTreeMap<String, f64>>> {
    let g = group(records)?;
    Ok(g.by_instance
        .iter()
        .map(|(inst, runs)| {
            let v = best_value(runs);
            let errs = runs
                .iter()
                .map(|(s, r)| (s.clone(), relative_error(r.f_opt, v)))
                .collect();
            (inst.clone(), errs)
        })
        .collect())
}

/// `sigma_i(tau) = |{t : E_it <= tau}| / m`. Without a grid, 200 points on
/// `[0, E_max]` are used.
pub fn accuracy_profile(records: &[RunRecord], tau_grid: Option<&[f64]>) -> Result<ProfileTable> {
    let errors = accuracy_errors(records)?;
    let solvers: Vec<String> = group(records)?.solvers;
    let e_max = errors
        .values()
        .flat_map(|m| m.values().copied())
        .fold(0.0, f64::max);
    let grid = match tau_grid {
        Some(g) => g.to_vec(),
        None => linear_grid(e_max, GRID_POINTS),
    };
    let m = errors.len().max(1) as f64;
    let curves = solvers
        .into_iter()
        .map(|s| {
            let mut errs: Vec<f64> = errors.values().map(|e| e[&s]).collect();
            errs.sort_by(f64::total_cmp);
            let curve = grid
                .iter()
                .map(|&tau| errs.partition_point(|&e| e <= tau) as f64 / m)
                .collect();
            (s, curve)
        })
        .collect();
    Ok(ProfileTable {
        measure: Measure::Accuracy,
        grid,
        curves,
    })
}

/// A Dolan-More profile and the instances no solver solved.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceProfile {
    pub table: ProfileTable,
    pub excluded: Vec<Instance>,
}

/// Smallest cost used in ratios, so zero timings stay finite.
const COST_FLOOR: f64 = 1e-9;

/// Standard performance profile over `cost` ratios.
///
/// A run solves its instance when it is a `tau`-approximate minimizer with
/// respect to the record's `f_star`, or to the best value among solvers when
/// `f_star` is unknown. Failed runs get ratio `+inf`. Instances no solver
/// solved are excluded and reported.
pub fn performance_profile(
    records: &[RunRecord],
    measure: Measure,
    tau: f64,
    ratio_grid: Option<&[f64]>,
) -> Result<PerformanceProfile> {
    if measure == Measure::Accuracy {
        return Err(Error::InvalidParameter {
            name: "measure",
            reason: "performance profiles need a cost measure (time or nfev)".into(),
        });
    }
    let g = group(records)?;
    let mut ratios: BTreeMap<&str, Vec<f64>> = g.solvers.iter().map(|s| (s.as_str(), Vec::new())).collect();
    let mut excluded = Vec::new();
    for (inst, runs) in &g.by_instance {
        let v = best_value(runs);
        let solved: BTreeMap<&str, f64> = runs
            .iter()
            .filter(|(_, r)| is_tau_approx(r.f_opt, r.f_star.unwrap_or(v), tau))
            .map(|(s, r)| (s.as_str(), measure.cost(r).max(COST_FLOOR)))
            .collect();
        let Some(best) = solved.values().copied().reduce(f64::min) else {
            excluded.push(inst.clone());
            continue;
        };
        for s in &g.solvers {
            let ratio = solved.get(s.as_str()).map_or(f64::INFINITY, |c| c / best);
            ratios.get_mut(s.as_str()).unwrap().push(ratio);
        }
    }
    let max_ratio = ratios
        .values()
        .flatten()
        .copied()
        .filter(|r| r.is_finite())
        .fold(1.0, f64::max);
    let grid = match ratio_grid {
        Some(gr) => gr.to_vec(),
        None => log_grid(max_ratio, GRID_POINTS),
    };
    let curves = ratios
        .into_iter()
        .map(|(s, mut rs)| {
            rs.sort_by(f64::total_cmp);
            let m = rs.len();
            let curve = grid
                .iter()
                .map(|&theta| {
                    if m == 0 {
                        0.0
                    } else {
                        rs.partition_point(|&r| r <= theta) as f64 / m as f64
                    }
                })
                .collect();
            (s.to_string(), curve)
        })
        .collect();
    Ok(PerformanceProfile {
        table: ProfileTable {
            measure,
            grid,
            curves,
        },
        excluded,
    })
}
