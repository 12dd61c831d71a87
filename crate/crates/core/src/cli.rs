//! `tesgo` command-line interface.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, unknown names),
//! 2 on runtime failures (I/O, malformed input files).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dc::{BoxBounds, DEFAULT_GAMMA};
use crate::driver::{dca_local_solve, preset, tesgo_solve, Preset, SolveReport};
use crate::error::{Error, Result};
use crate::local_search::LocalSearchConfig;
use crate::metrics::{accuracy_profile, complete_instances, linear_grid, performance_profile, Measure, RunRecord, GRID_POINTS};
use crate::problems::{registry, ProblemId};
use crate::results::{read_results, write_profile, write_results};

#[derive(Debug, Parser)]
#[command(name = "tesgo", version, about = "Global minimization of box-constrained DC functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a solver on registered problems and write one CSV row per run.
    Run {
        /// Problem name, optionally with a dimension as NAME:N. Repeatable.
        #[arg(long = "problem", required = true)]
        problems: Vec<String>,
        /// Dimension for problems given without one.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "tesgo")]
        solver: String,
        #[arg(long, default_value = "full")]
        preset: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random starts drawn uniformly in the box.
        #[arg(long, default_value_t = 1)]
        starts: usize,
        /// Run once from the problem's default start instead of random starts.
        #[arg(long)]
        default_start: bool,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute accuracy or performance profiles from results files.
    Profiles {
        #[arg(long = "in", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = "accuracy")]
        measure: String,
        /// Accuracy: upper end of the tau grid (default E_max).
        /// Time/nfev: solved-run threshold (default 0.2).
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the registered problems.
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Tesgo,
    DcaLocal,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Tesgo => "tesgo",
            Solver::DcaLocal => "dca_local",
        }
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tesgo" => Ok(Solver::Tesgo),
            "dca_local" => Ok(Solver::DcaLocal),
            _ => Err(Error::UnknownSolver { name: s.into() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub problems: Vec<(ProblemId, usize)>,
    pub solver: Solver,
    pub preset: Preset,
    pub seed: u64,
    pub starts: usize,
    pub default_start: bool,
}

impl RunRequest {
    /// Resolves `NAME` / `NAME:N` specs against the registry.
    pub fn parse_problems(specs: &[String], n: Option<usize>) -> Result<Vec<(ProblemId, usize)>> {
        specs
            .iter()
            .map(|spec| {
                let (name, dim) = match spec.split_once(':') {
                    Some((name, d)) => {
                        let d = d.trim().parse().map_err(|_| Error::InvalidParameter {
                            name: "problem",
                            reason: format!("bad dimension in `{spec}`"),
                        })?;
                        (name, Some(d))
                    }
                    None => (spec.as_str(), None),
                };
                let id: ProblemId = name.parse()?;
                let dim = dim.or(n).unwrap_or_else(|| id.default_dimension());
                id.check_dimension(dim)?;
                Ok((id, dim))
            })
            .collect()
    }
}

/// Uniform start in the box; `start_id` selects the ChaCha stream.
pub fn random_start(bounds: &BoxBounds, seed: u64, start_id: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(start_id as u64);
    bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(&a, &b)| if a < b { rng.random_range(a..=b) } else { a })
        .collect()
}

fn record_from(solver: Solver, id: ProblemId, n: usize, start_id: usize, f_star: Option<f64>, r: SolveReport) -> RunRecord {
    RunRecord {
        solver: solver.name().into(),
        problem: id.name().into(),
        n,
        start_id,
        f_opt: r.f_best,
        f_star,
        counters: r.counters,
        wall_time: r.wall_time,
        status: r.status.as_str().into(),
    }
}

/// Executes every `(problem, start)` job. Jobs run in parallel; records come
/// back in `(problem, start)` order.
pub fn execute_run(req: &RunRequest) -> Result<Vec<RunRecord>> {
    if req.starts < 1 {
        return Err(Error::InvalidParameter {
            name: "starts",
            reason: "at least one start is required".into(),
        });
    }
    let starts = if req.default_start { 1 } else { req.starts };
    let jobs: Vec<(ProblemId, usize, usize)> = req
        .problems
        .iter()
        .flat_map(|&(id, n)| (0..starts).map(move |s| (id, n, s)))
        .collect();
    jobs.par_iter()
        .map(|&(id, n, start_id)| {
            let problem = id.make(n)?;
            let x0 = if req.default_start {
                id.default_start(n)
            } else {
                random_start(problem.bounds(), req.seed, start_id)
            };
            let report = match req.solver {
                Solver::Tesgo => {
                    let mut cfg = preset(req.preset, n);
                    cfg.seed = req.seed;
                    tesgo_solve(&problem, &x0, &cfg)?
                }
                Solver::DcaLocal => dca_local_solve(&problem, &x0, DEFAULT_GAMMA, &LocalSearchConfig::default())?,
            };
            Ok(record_from(req.solver, id, n, start_id, problem.f_star(), report))
        })
        .collect()
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub fn cmd_run<W: Write>(req: &RunRequest, out: W) -> Result<Vec<RunRecord>> {
    let records = execute_run(req)?;
    write_results(out, &records)?;
    Ok(records)
}

/// Reads results files, drops instances some solver lacks (returning a
/// warning per missing pair) and writes the requested profile.
pub fn cmd_profiles<W: Write>(inputs: &[PathBuf], measure: Measure, tau: Option<f64>, out: W) -> Result<Vec<String>> {
    let mut records = Vec::new();
    for path in inputs {
        let file = File::open(path)?;
        records.extend(read_results(file).map_err(|e| match e {
            Error::Schema(msg) => Error::Schema(format!("{}: {msg}", path.display())),
            other => other,
        })?);
    }
    let (records, missing) = complete_instances(&records);
    let mut warnings: Vec<String> = missing
        .into_iter()
        .map(|m| format!("missing record {m}; instance dropped"))
        .collect();
    let table = match measure {
        Measure::Accuracy => {
            let grid = tau.map(|t| linear_grid(t, GRID_POINTS));
            accuracy_profile(&records, grid.as_deref())?
        }
        Measure::Time | Measure::Nfev => {
            let p = performance_profile(&records, measure, tau.unwrap_or(0.2), None)?;
            warnings.extend(p.excluded.iter().map(|i| format!("no solver solved {i}; excluded")));
            p.table
        }
    };
    write_profile(out, &table)?;
    Ok(warnings)
}

pub fn cmd_list<W: Write>(mut out: W) -> Result<()> {
    writeln!(out, "name  n      box          f_star")?;
    for spec in registry() {
        let stars = spec
            .f_star
            .iter()
            .map(|(n, f)| format!("n={n}:{f:.4}"))
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(out, "{:<5} {:<6} {:<12} {}", spec.name, spec.dims, spec.box_text, stars)?;
    }
    writeln!(out, "P1-P14 defined externally (no built-in formulas)")?;
    Ok(())
}

fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::UnknownProblem { .. }
            | Error::ExternallyDefined(_)
            | Error::UnsupportedDimension { .. }
            | Error::UnknownPreset { .. }
            | Error::UnknownSolver { .. }
            | Error::UnknownMeasure { .. }
            | Error::InvalidParameter { .. }
    )
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Run {
            problems,
            n,
            solver,
            preset,
            seed,
            starts,
            default_start,
            out,
        } => {
            let req = RunRequest {
                problems: RunRequest::parse_problems(&problems, n)?,
                solver: solver.parse()?,
                preset: preset.parse()?,
                seed,
                starts,
                default_start,
            };
            match out {
                Some(p) => cmd_run(&req, open_out(Some(&p))?)?,
                None => cmd_run(&req, &mut *stdout)?,
            };
        }
        Command::Profiles {
            inputs,
            measure,
            tau,
            out,
        } => {
            let measure: Measure = measure.parse()?;
            if let Some(t) = tau {
                if !(t >= 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "tau",
                        reason: format!("must be non-negative, got {t}"),
                    });
                }
            }
            let warnings = match out {
                Some(p) => cmd_profiles(&inputs, measure, tau, open_out(Some(&p))?)?,
                None => cmd_profiles(&inputs, measure, tau, &mut *stdout)?,
            };
            for w in warnings {
                writeln!(stderr, "warning: {w}")?;
            }
        }
        Command::List => cmd_list(&mut *stdout)?,
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if is_usage(&e) {
                1
            } else {
                2
            }
        }
    }
}
