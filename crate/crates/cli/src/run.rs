//! Executes a [`RunSpec`] and writes its CSV.
//!
//! Cells run on a dedicated rayon pool of `jobs` threads; results are
//! collected in grid order, so the output bytes do not depend on `jobs`.

use std::fs::File;
use std::io::Write;

use qca_core::metrics::{
    contraction_probe, fixed_point_residual, irreversibility_time, reversibility_curve_with_delta,
};
use qca_core::oracle::compare_with_sector;
use qca_core::AutomatonConfig;
use rayon::prelude::*;

use crate::error::{HarnessError, Result};
use crate::runspec::{Cell, Command, RunSpec};

/// Upper slack on a return probability.
const P1_TOL: f64 = 1e-12;
/// Upper slack on a contraction ratio.
const RATIO_TOL: f64 = 1e-10;
/// Sector-vs-full elementwise agreement required by oracle-check.
const ORACLE_DIFF_TOL: f64 = 1e-10;
/// Largest leak out of the single-excitation sector tolerated by oracle-check.
const ORACLE_LEAK_TOL: f64 = 1e-12;

/// Floats are written with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn header(command: Command) -> &'static [&'static str] {
    match command {
        Command::Curve => &["n", "p", "q", "phi1", "phi2", "xi", "eta", "T", "p1"],
        Command::TirrSweep => &[
            "n", "p", "q", "phi1", "phi2", "xi", "eta", "delta", "t_max", "t_irr",
        ],
        Command::Contraction => &[
            "n",
            "p",
            "q",
            "phi1",
            "phi2",
            "xi",
            "eta",
            "samples",
            "seed",
            "max_ratio",
        ],
        Command::FixedPoint => &["n", "p", "q", "phi1", "phi2", "xi", "eta", "residual"],
        Command::OracleCheck => &[
            "n",
            "p",
            "q",
            "phi1",
            "phi2",
            "xi",
            "eta",
            "steps",
            "forward_diff",
            "inverse_diff",
            "max_leak",
        ],
    }
}

fn grid_fields(cell: &Cell, cfg: &AutomatonConfig) -> Vec<String> {
    vec![
        cell.n.to_string(),
        fmt_f64(cell.p),
        fmt_f64(cell.q),
        fmt_f64(cell.phi1),
        fmt_f64(cell.phi2),
        fmt_f64(cell.xi),
        fmt_f64(cfg.noise().eta()),
    ]
}

/// Rows produced by one cell plus any invariant violations it found.
struct CellOutput {
    rows: Vec<Vec<String>>,
    violations: Vec<String>,
}

fn run_cell(spec: &RunSpec, cell: &Cell, cfg: &AutomatonConfig) -> Result<CellOutput> {
    let base = grid_fields(cell, cfg);
    let row = |extra: Vec<String>| -> Vec<String> { base.iter().cloned().chain(extra).collect() };
    let mut violations = Vec::new();
    let rows = match spec.command {
        Command::Curve => {
            let rec = reversibility_curve_with_delta(cfg, spec.t_max, spec.stride, spec.delta)?;
            rec.times
                .iter()
                .zip(&rec.p1_values)
                .map(|(&t, &p1)| {
                    if !(-P1_TOL..=1.0 + P1_TOL).contains(&p1) {
                        violations.push(format!("{cell:?}: P1({t}) = {p1} outside [0, 1]"));
                    }
                    row(vec![t.to_string(), fmt_f64(p1)])
                })
                .collect()
        }
        Command::TirrSweep => {
            let t_irr = irreversibility_time(cfg, spec.delta, spec.t_max)?;
            let encoded = t_irr.time().map_or(-1, |t| t as i64);
            vec![row(vec![
                fmt_f64(spec.delta),
                spec.t_max.to_string(),
                encoded.to_string(),
            ])]
        }
        Command::Contraction => {
            let rep = contraction_probe(cfg, spec.samples, spec.seed)?;
            if rep.max_ratio.is_nan() || rep.max_ratio > 1.0 + RATIO_TOL {
                violations.push(format!(
                    "{cell:?}: contraction ratio {} exceeds 1",
                    rep.max_ratio
                ));
            }
            vec![row(vec![
                spec.samples.to_string(),
                spec.seed.to_string(),
                fmt_f64(rep.max_ratio),
            ])]
        }
        Command::FixedPoint => {
            let residual = fixed_point_residual(cfg)?;
            if !residual.is_finite() {
                violations.push(format!("{cell:?}: residual is {residual}"));
            }
            vec![row(vec![fmt_f64(residual)])]
        }
        Command::OracleCheck => {
            let cmp = compare_with_sector(cfg, spec.steps)?;
            if !(cmp.forward_diff <= ORACLE_DIFF_TOL && cmp.inverse_diff <= ORACLE_DIFF_TOL) {
                violations.push(format!(
                    "{cell:?}: sector and full-space evolution differ by {:e} / {:e}",
                    cmp.forward_diff, cmp.inverse_diff
                ));
            }
            if cmp.max_leak.is_nan() || cmp.max_leak > ORACLE_LEAK_TOL {
                violations.push(format!("{cell:?}: sector leak {:e}", cmp.max_leak));
            }
            vec![row(vec![
                spec.steps.to_string(),
                fmt_f64(cmp.forward_diff),
                fmt_f64(cmp.inverse_diff),
                fmt_f64(cmp.max_leak),
            ])]
        }
    };
    Ok(CellOutput { rows, violations })
}

/// Summary of a completed run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSummary {
    pub cells: usize,
    pub rows: usize,
}

/// Produces the full CSV text for `spec` without touching the filesystem.
pub fn render(spec: &RunSpec) -> Result<(String, Vec<String>, RunSummary)> {
    let cells = spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| HarnessError::Validation(format!("field `jobs`: {e}")))?;
    let outputs: Vec<CellOutput> = pool.install(|| {
        cells
            .par_iter()
            .map(|(cell, cfg)| run_cell(spec, cell, cfg))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| HarnessError::Numerical(format!("CSV encoding: {e}"));
    writer.write_record(header(spec.command)).map_err(csv_err)?;
    let mut rows = 0;
    let mut violations = Vec::new();
    for out in outputs {
        for r in &out.rows {
            writer.write_record(r).map_err(csv_err)?;
            rows += 1;
        }
        violations.extend(out.violations);
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| HarnessError::Numerical(format!("CSV encoding: {e}")))?;
    let text = String::from_utf8(bytes).expect("CSV fields are ASCII");
    Ok((
        text,
        violations,
        RunSummary {
            cells: cells.len(),
            rows,
        },
    ))
}

/// Validates, executes and writes the CSV to `spec.output_path`.
///
/// The file is written even when a numerical invariant fails, so the
/// offending values can be inspected; the violation is then reported as
/// [`HarnessError::Numerical`].
pub fn run(spec: &RunSpec) -> Result<RunSummary> {
    let (text, violations, summary) = render(spec)?;
    let path = &spec.output_path;
    let mut file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    file.write_all(text.as_bytes())
        .and_then(|_| file.flush())
        .map_err(|e| HarnessError::io(path, e))?;
    if !violations.is_empty() {
        return Err(HarnessError::Numerical(violations.join("; ")));
    }
    Ok(summary)
}
