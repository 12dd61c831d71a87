//! Built-in test problems.
//!
//! `P15`..`P20` are DC rewrites of classical global optimization benchmarks;
//! `EX1` is a one-dimensional function whose point `x = 1` is a local but not
//! a global minimizer. Names `P1`..`P14` are reserved for problems whose
//! formulas live elsewhere.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::dc::{BoxBounds, ConvexFunction, DcProblem, FnConvex};
use crate::error::{Error, Result};
use crate::linalg::sign0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemId {
    P15,
    P16,
    P17,
    P18,
    P19,
    P20,
    Ex1,
}

/// Dimensions with tabulated optima for the parametric problems.
pub const TABULATED_DIMS: [usize; 6] = [2, 5, 10, 50, 100, 200];

const VALID_NAMES: &str = "P15, P16, P17, P18, P19, P20, EX1";

impl ProblemId {
    pub const ALL: [ProblemId; 7] = [
        ProblemId::P15,
        ProblemId::P16,
        ProblemId::P17,
        ProblemId::P18,
        ProblemId::P19,
        ProblemId::P20,
        ProblemId::Ex1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::P15 => "P15",
            ProblemId::P16 => "P16",
            ProblemId::P17 => "P17",
            ProblemId::P18 => "P18",
            ProblemId::P19 => "P19",
            ProblemId::P20 => "P20",
            ProblemId::Ex1 => "EX1",
        }
    }

    /// Fixed dimension, or `None` for problems defined for every `n >= 2`.
    pub fn fixed_dimension(self) -> Option<usize> {
        match self {
            ProblemId::P15 | ProblemId::P17 | ProblemId::P19 => Some(2),
            ProblemId::Ex1 => Some(1),
            ProblemId::P16 | ProblemId::P18 | ProblemId::P20 => None,
        }
    }

    /// Dimension used when the caller does not pick one.
    pub fn default_dimension(self) -> usize {
        self.fixed_dimension().unwrap_or(2)
    }

    pub fn supports(self, n: usize) -> bool {
        match self.fixed_dimension() {
            Some(k) => n == k,
            None => n >= 2,
        }
    }

    fn supported_text(self) -> String {
        match self.fixed_dimension() {
            Some(k) => format!("n = {k}"),
            None => "any n >= 2".into(),
        }
    }

    pub fn bounds(self, n: usize) -> BoxBounds {
        let (a, b) = match self {
            ProblemId::P17 => (-5.0, 5.0),
            ProblemId::P18 => (-(n as f64), n as f64),
            ProblemId::Ex1 => (-100.0, 100.0),
            _ => (-10.0, 10.0),
        };
        BoxBounds::cube(n, a, b).expect("registry boxes are valid")
    }

    /// Known optimal value, to four decimals. P17 uses -0.8333, not the
    /// sometimes quoted -0.8332.
    pub fn f_star(self, n: usize) -> Option<f64> {
        match self {
            ProblemId::P15 => Some(-0.3524),
            ProblemId::P16 | ProblemId::P20 => Some(0.0),
            ProblemId::P17 => Some(-0.8333),
            ProblemId::P19 => Some(-0.25),
            ProblemId::Ex1 => Some(-11.0),
            ProblemId::P18 => match n {
                2 => Some(-0.3750),
                5 => Some(-1.3750),
                10 => Some(-3.0417),
                50 => Some(-16.3750),
                100 => Some(-33.0417),
                200 => Some(-66.3750),
                _ => None,
            },
        }
    }

    pub fn default_start(self, n: usize) -> Vec<f64> {
        match self {
            ProblemId::Ex1 => vec![1.0],
            _ => self.bounds(n).center(),
        }
    }

    pub fn check_dimension(self, n: usize) -> Result<()> {
        if self.supports(n) {
            return Ok(());
        }
        Err(Error::UnsupportedDimension {
            name: self.name().into(),
            n,
            supported: self.supported_text(),
        })
    }

    pub fn make(self, n: usize) -> Result<DcProblem> {
        self.check_dimension(n)?;
        let (f1, f2) = components(self);
        let mut p = DcProblem::new(self.name(), self.bounds(n), f1, f2);
        if let Some(f) = self.f_star(n) {
            p = p.with_f_star(f);
        }
        Ok(p)
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        if let Some(id) = ProblemId::ALL.into_iter().find(|p| p.name() == upper) {
            return Ok(id);
        }
        if let Some(k) = upper.strip_prefix('P').and_then(|d| d.parse::<u32>().ok()) {
            if (1..=14).contains(&k) && !upper[1..].starts_with('0') {
                return Err(Error::ExternallyDefined(upper));
            }
        }
        Err(Error::UnknownProblem {
            name: s.to_string(),
            valid: VALID_NAMES.into(),
        })
    }
}

/// Builds a registered problem by name.
pub fn make(name: &str, n: usize) -> Result<DcProblem> {
    name.parse::<ProblemId>()?.make(n)
}

pub fn default_start(name: &str, n: usize) -> Result<Vec<f64>> {
    let id: ProblemId = name.parse()?;
    if !id.supports(n) {
        return Err(Error::UnsupportedDimension {
            name: id.name().into(),
            n,
            supported: id.supported_text(),
        });
    }
    Ok(id.default_start(n))
}

/// A registry entry as shown by `tesgo list`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: &'static str,
    pub dims: &'static str,
    /// `(n, f_star)` for the tabulated dimensions.
    pub f_star: Vec<(usize, f64)>,
    pub box_text: &'static str,
}

pub fn registry() -> Vec<ProblemSpec> {
    ProblemId::ALL
        .into_iter()
        .map(|id| {
            let dims: Vec<usize> = match id.fixed_dimension() {
                Some(k) => vec![k],
                None => TABULATED_DIMS.to_vec(),
            };
            ProblemSpec {
                name: id.name(),
                dims: match id.fixed_dimension() {
                    Some(1) => "1",
                    Some(_) => "2",
                    None => "n>=2",
                },
                f_star: dims
                    .into_iter()
                    .filter_map(|n| id.f_star(n).map(|f| (n, f)))
                    .collect(),
                box_text: match id {
                    ProblemId::P17 => "[-5,5]^n",
                    ProblemId::P18 => "[-n,n]^n",
                    ProblemId::Ex1 => "[-100,100]",
                    _ => "[-10,10]^n",
                },
            }
        })
        .collect()
}

type Pair = (Arc<dyn ConvexFunction>, Arc<dyn ConvexFunction>);

fn components(id: ProblemId) -> Pair {
    match id {
        // DC Aluffi-Pentini.
        ProblemId::P15 => (
            FnConvex::shared(
                |x| 0.25 * x[0].powi(4) + 0.1 * x[0] + 0.5 * x[1] * x[1],
                |x| vec![x[0].powi(3) + 0.1, x[1]],
            ),
            FnConvex::shared(|x| 0.5 * x[0] * x[0], |x| vec![x[0], 0.0]),
        ),
        // Generalized DC Becker-Lago.
        ProblemId::P16 => (
            FnConvex::shared(
                |x| x.iter().map(|v| v * v).sum::<f64>() + 25.0 * x.len() as f64,
                |x| x.iter().map(|v| 2.0 * v).collect(),
            ),
            FnConvex::shared(
                |x| 10.0 * x.iter().map(|v| v.abs()).sum::<f64>(),
                |x| x.iter().map(|&v| 10.0 * sign0(v)).collect(),
            ),
        ),
        // Modified DC camel back.
        ProblemId::P17 => (
            FnConvex::shared(
                |x| {
                    1.0 / 6.0 + x[0].powi(6) + 4.0 * x[0] * x[0] + 4.0 * x[1].powi(4) + x[0].abs()
                },
                |x| {
                    vec![
                        6.0 * x[0].powi(5) + 8.0 * x[0] + sign0(x[0]),
                        16.0 * x[1].powi(3),
                    ]
                },
            ),
            FnConvex::shared(
                |x| 2.1 * x[0].powi(4) + 4.0 * x[1] * x[1],
                |x| vec![8.4 * x[0].powi(3), 8.0 * x[1]],
            ),
        ),
        ProblemId::P18 => (
            FnConvex::shared(
                |x| {
                    x.windows(2)
                        .map(|w| (w[1] - 1.0).powi(2) + w[0] * w[0] + w[1] * w[1])
                        .sum()
                },
                |x| {
                    let mut g = vec![0.0; x.len()];
                    for i in 1..x.len() {
                        g[i - 1] += 2.0 * x[i - 1];
                        g[i] += 2.0 * (x[i] - 1.0) + 2.0 * x[i];
                    }
                    g
                },
            ),
            FnConvex::shared(
                |x| x.windows(2).map(|w| (w[0] + w[1]).abs()).sum(),
                |x| {
                    let mut g = vec![0.0; x.len()];
                    for i in 1..x.len() {
                        let s = sign0(x[i - 1] + x[i]);
                        g[i - 1] += s;
                        g[i] += s;
                    }
                    g
                },
            ),
        ),
        ProblemId::P19 => (
            FnConvex::shared(
                |x| 2.0 * (x[0] * x[0] + x[1] * x[1]),
                |x| vec![4.0 * x[0], 4.0 * x[1]],
            ),
            FnConvex::shared(
                |x| (x[0] + x[1]).abs(),
                |x| {
                    let s = sign0(x[0] + x[1]);
                    vec![s, s]
                },
            ),
        ),
        ProblemId::P20 => (
            FnConvex::shared(
                |x| {
                    2.0 * x
                        .windows(2)
                        .map(|w| (w[1] - w[0] + 1.0).max(w[0] * w[0]))
                        .sum::<f64>()
                },
                |x| {
                    let mut g = vec![0.0; x.len()];
                    for i in 0..x.len() - 1 {
                        let linear = x[i + 1] - x[i] + 1.0;
                        if linear >= x[i] * x[i] {
                            g[i] -= 2.0;
                            g[i + 1] += 2.0;
                        } else {
                            g[i] += 4.0 * x[i];
                        }
                    }
                    g
                },
            ),
            FnConvex::shared(
                |x| {
                    x.windows(2)
                        .map(|w| w[0] * w[0] + w[1] - w[0] + 1.0)
                        .sum()
                },
                |x| {
                    let mut g = vec![0.0; x.len()];
                    for i in 0..x.len() - 1 {
                        g[i] += 2.0 * x[i] - 1.0;
                        g[i + 1] += 1.0;
                    }
                    g
                },
            ),
        ),
        ProblemId::Ex1 => (
            FnConvex::shared(|x| x[0] * x[0] - 5.0 * x[0] + 2.0, |x| vec![2.0 * x[0] - 5.0]),
            FnConvex::shared(
                |x| ex1_branches(x[0]).into_iter().fold(f64::NEG_INFINITY, f64::max),
                |x| {
                    let b = ex1_branches(x[0]);
                    let mut k = 0;
                    for i in 1..3 {
                        if b[i] > b[k] {
                            k = i;
                        }
                    }
                    vec![[-3.0, 1.0, 5.0][k]]
                },
            ),
        ),
    }
}

fn ex1_branches(x: f64) -> [f64; 3] {
    [-3.0 * x + 8.0, x + 1.0, 5.0 * x - 12.0]
}
