//! CSV files written and read by the command-line tool.
//!
//! Results: one row per run, header
//! `solver,problem,n,start_id,f_opt,f_star,rel_error,n_f1,n_f2,n_g1,n_g2,wall_seconds,status`.
//! Profiles: `measure,solver,tau,value`. Reals carry 10 significant digits;
//! an unknown `f_star` (and therefore `rel_error`) is an empty field.

use std::io::{Read, Write};

use crate::dc::EvalCounters;
use crate::error::{Error, Result};
use crate::metrics::{relative_error, ProfileTable, RunRecord};

pub const RESULTS_HEADER: [&str; 13] = [
    "solver",
    "problem",
    "n",
    "start_id",
    "f_opt",
    "f_star",
    "rel_error",
    "n_f1",
    "n_f2",
    "n_g1",
    "n_g2",
    "wall_seconds",
    "status",
];

pub const PROFILE_HEADER: [&str; 4] = ["measure", "solver", "tau", "value"];

/// Formats like C's `%.10g`.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..10).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (9 - exp) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_results<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        let (f_star, rel) = match r.f_star {
            Some(fs) => (format_real(fs), format_real(relative_error(r.f_opt, fs))),
            None => (String::new(), String::new()),
        };
        w.write_record([
            r.solver.clone(),
            r.problem.clone(),
            r.n.to_string(),
            r.start_id.to_string(),
            format_real(r.f_opt),
            f_star,
            rel,
            r.counters.n_f1.to_string(),
            r.counters.n_f2.to_string(),
            r.counters.n_g1.to_string(),
            r.counters.n_g2.to_string(),
            format_real(r.wall_time),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field(rec: &csv::StringRecord, i: usize, line: u64) -> Result<&str> {
    rec.get(i)
        .ok_or_else(|| Error::Schema(format!("line {line}: missing column `{}`", RESULTS_HEADER[i])))
}

fn parse<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    let raw = field(rec, i, line)?;
    raw.trim()
        .parse()
        .map_err(|_| Error::Schema(format!("line {line}: bad `{}` value {raw:?}", RESULTS_HEADER[i])))
}

/// Parses a results file, rejecting any header other than [`RESULTS_HEADER`].
pub fn read_results<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(RESULTS_HEADER.iter().copied()) {
        return Err(Error::Schema(format!(
            "expected header `{}`, found `{}`",
            RESULTS_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| Error::Schema(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let f_star = match field(&row, 5, line)?.trim() {
            "" => None,
            _ => Some(parse::<f64>(&row, 5, line)?),
        };
        let f_opt: f64 = parse(&row, 4, line)?;
        if !f_opt.is_finite() {
            return Err(Error::Schema(format!("line {line}: f_opt must be finite")));
        }
        let wall_time: f64 = parse(&row, 11, line)?;
        if !(wall_time >= 0.0) {
            return Err(Error::Schema(format!("line {line}: negative wall_seconds")));
        }
        out.push(RunRecord {
            solver: field(&row, 0, line)?.to_string(),
            problem: field(&row, 1, line)?.to_string(),
            n: parse(&row, 2, line)?,
            start_id: parse(&row, 3, line)?,
            f_opt,
            f_star,
            counters: EvalCounters {
                n_f1: parse(&row, 7, line)?,
                n_f2: parse(&row, 8, line)?,
                n_g1: parse(&row, 9, line)?,
                n_g2: parse(&row, 10, line)?,
            },
            wall_time,
            status: field(&row, 12, line)?.to_string(),
        });
    }
    Ok(out)
}

pub fn write_profile<W: Write>(out: W, table: &ProfileTable) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(PROFILE_HEADER)?;
    for (solver, curve) in &table.curves {
        for (tau, value) in table.grid.iter().zip(curve) {
            w.write_record([
                table.measure.name(),
                solver.as_str(),
                &format_real(*tau),
                &format_real(*value),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
