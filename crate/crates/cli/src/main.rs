//! `reflco`: command-line front end for the spectral-theory toolkit with
//! m-functions and reflection coefficients of Jacobi operators, canonical
//! system transfer matrices and J-inner checks, Weyl-disk diameters, and
//! the semicontinuity experiment harness. Emits CSV or JSON.

// NaN-rejecting domain guards, as in the core crate
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
mod formats;
mod output;

use clap::{Parser, Subcommand};
use error::{from_core, CliError};
use formats::{
    parse_complex, parse_experiment, parse_grid_spec, parse_operator, parse_samples, parse_system,
    parse_weak_l2,
};
use output::{emit, render_json, Cell, OutputFormat, Table};
use reflco_core::canonical::{j_inner_defect, transfer};
use reflco_core::herglotz::{boundary_value, hilbert_transform, weak_l2_report, BoundaryLadder};
use reflco_core::jacobi::{m_pair, toda_flow, toda_flow_widened};
use reflco_core::reflection::{
    boundary_reflection, invariance_report, reflectionless_mask, sigma_ac_mask, OperatorMap,
};
use reflco_core::semicont::run_semicontinuity;
use reflco_core::weyl::{prefix_diameters, DEFAULT_TOUCH_TOL};
use serde_json::{Map, Number, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "reflco",
    version,
    about = "Reflection coefficients and Weyl theory for whole-line spectral problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; tables default to csv, scalar results to json.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Reserved for sampling-based runs; part of the reproducibility
    /// contract (identical flags and seed give byte-identical output).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Ladder start height.
    #[arg(long, global = true)]
    ladder_y0: Option<f64>,

    /// Ladder geometric ratio in (0, 1).
    #[arg(long, global = true)]
    ladder_ratio: Option<f64>,

    /// Maximum ladder steps.
    #[arg(long, global = true)]
    ladder_steps: Option<usize>,

    /// Ladder stopping tolerance.
    #[arg(long, global = true)]
    ladder_tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Boundary values of the half-line m-functions on a real grid.
    MFunction {
        #[arg(long)]
        op: PathBuf,
        /// Grid literal lo:hi:count.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
    /// Reflection coefficients on a real grid.
    Reflection {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
    /// Grid mask of the absolutely continuous spectrum, |R| < 1 - epsilon.
    SigmaAc {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
    },
    /// Grid mask of reflectionless points, |R| < tol.
    Reflectionless {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// |R| before and after a shift of the operator.
    ShiftInvariance {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = 1)]
        k: i64,
    },
    /// Evolves the operator by the time-t Toda flow and emits it.
    Toda {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Extra sites per side (defaults to the time-dependent widening).
        #[arg(long)]
        widen: Option<usize>,
    },
    /// Transfer matrix of a canonical system at a complex point.
    CanonicalTransfer {
        #[arg(long)]
        system: PathBuf,
        /// Complex literal such as 0+1i.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Minimum eigenvalue of -i(T*JT - J) for the system's transfer matrix.
    JInner {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Hyperbolic diameters of the Weyl disks of repeated transfer factors.
    WeylDisks {
        #[arg(long)]
        system: PathBuf,
        /// Number of factors in the product.
        #[arg(long, default_value_t = 200)]
        repeat: usize,
        /// Complex evaluation points (repeatable).
        #[arg(long, required = true, allow_hyphen_values = true)]
        z: Vec<String>,
    },
    /// Semicontinuity experiment from a spec file.
    Semicont {
        #[arg(long)]
        experiment: PathBuf,
    },
    /// Principal-value Hilbert transform of sampled data.
    Hilbert {
        #[arg(long)]
        samples: PathBuf,
        /// Evaluation points (repeatable); keep them off the sample nodes.
        #[arg(long, required = true, allow_hyphen_values = true)]
        x: Vec<f64>,
    },
    /// Weak-L2 pairing gaps of a Herglotz sequence against its limit.
    WeakL2 {
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    // flag errors are validation errors (exit 1); clap's default of 2 is
    // reserved here for numerical failures
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if err.use_stderr() => {
            eprintln!("E002: {err}");
            return ExitCode::from(1);
        }
        Err(err) => {
            // --help / --version; a closed pipe is not our problem
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit)
        }
    }
}

fn ladder_from(cli: &Cli) -> Result<BoundaryLadder, CliError> {
    let mut ladder = BoundaryLadder::default();
    if let Some(y0) = cli.ladder_y0 {
        ladder.y0 = y0;
    }
    if let Some(ratio) = cli.ladder_ratio {
        ladder.ratio = ratio;
    }
    if let Some(steps) = cli.ladder_steps {
        ladder.max_steps = steps;
    }
    if let Some(tol) = cli.ladder_tol {
        ladder.tol = tol;
    }
    ladder.validate().map_err(from_core)?;
    Ok(ladder)
}

fn c_cell(value: f64) -> Cell {
    Cell::Float(value)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let table_format = cli.format.unwrap_or(OutputFormat::Csv);
    let scalar_format = cli.format.unwrap_or(OutputFormat::Json);
    match &cli.command {
        Command::MFunction { op, grid } => {
            let op = parse_operator(op)?;
            let xs = parse_grid_spec(grid)?;
            let ladder = ladder_from(&cli)?;
            let pair = m_pair(&op);
            let mut table = Table::new(vec![
                "x",
                "re_m_plus",
                "im_m_plus",
                "re_m_minus",
                "im_m_minus",
                "converged",
            ]);
            for &x in &xs {
                let mp = boundary_value(&pair.m_plus, x, &ladder);
                let mm = boundary_value(&pair.m_minus, x, &ladder);
                table.push(vec![
                    c_cell(x),
                    c_cell(mp.value.re),
                    c_cell(mp.value.im),
                    c_cell(mm.value.re),
                    c_cell(mm.value.im),
                    Cell::Bool(mp.converged && mm.converged),
                ]);
            }
            emit(&cli.out, &table.render(table_format))
        }
        Command::Reflection { op, grid } => {
            let op = parse_operator(op)?;
            let xs = parse_grid_spec(grid)?;
            let ladder = ladder_from(&cli)?;
            let pair = m_pair(&op);
            let mut table = Table::new(vec![
                "x",
                "re_r_plus",
                "im_r_plus",
                "re_r_minus",
                "im_r_minus",
                "abs_r",
                "converged",
            ]);
            for &x in &xs {
                match boundary_reflection(&pair, x, &ladder) {
                    Ok(s) => table.push(vec![
                        c_cell(x),
                        c_cell(s.r_plus.re),
                        c_cell(s.r_plus.im),
                        c_cell(s.r_minus.re),
                        c_cell(s.r_minus.im),
                        c_cell(s.abs_r),
                        Cell::Bool(s.converged),
                    ]),
                    // keep hard points visible instead of dropping them
                    Err(_) => table.push(vec![
                        c_cell(x),
                        c_cell(f64::NAN),
                        c_cell(f64::NAN),
                        c_cell(f64::NAN),
                        c_cell(f64::NAN),
                        c_cell(f64::NAN),
                        Cell::Bool(false),
                    ]),
                }
            }
            emit(&cli.out, &table.render(table_format))
        }
        Command::SigmaAc { op, grid, epsilon } => {
            let op = parse_operator(op)?;
            let xs = parse_grid_spec(grid)?;
            let ladder = ladder_from(&cli)?;
            let report = sigma_ac_mask(&op, &xs, &ladder, *epsilon).map_err(from_core)?;
            let mut table = Table::new(vec!["x", "abs_r", "in_sigma_ac", "converged"]);
            for (i, &x) in xs.iter().enumerate() {
                table.push(vec![
                    c_cell(x),
                    c_cell(report.abs_r[i]),
                    Cell::Bool(report.mask[i]),
                    Cell::Bool(report.converged[i]),
                ]);
            }
            emit(&cli.out, &table.render(table_format))
        }
        Command::Reflectionless { op, grid, tol } => {
            let op = parse_operator(op)?;
            let xs = parse_grid_spec(grid)?;
            let ladder = ladder_from(&cli)?;
            let report = reflectionless_mask(&op, &xs, &ladder, *tol).map_err(from_core)?;
            let mut table = Table::new(vec!["x", "abs_r", "reflectionless", "converged"]);
            for (i, &x) in xs.iter().enumerate() {
                table.push(vec![
                    c_cell(x),
                    c_cell(report.abs_r[i]),
                    Cell::Bool(report.mask[i]),
                    Cell::Bool(report.converged[i]),
                ]);
            }
            emit(&cli.out, &table.render(table_format))
        }
        Command::ShiftInvariance { op, grid, k } => {
            let op = parse_operator(op)?;
            let xs = parse_grid_spec(grid)?;
            let ladder = ladder_from(&cli)?;
            let report =
                invariance_report(&op, OperatorMap::Shift(*k), &xs, &ladder).map_err(from_core)?;
            let mut table = Table::new(vec![
                "x",
                "abs_r_before",
                "abs_r_after",
                "discrepancy",
                "converged",
            ]);
            for row in &report.rows {
                table.push(vec![
                    c_cell(row.x),
                    c_cell(row.abs_r_before),
                    c_cell(row.abs_r_after),
                    c_cell((row.abs_r_after - row.abs_r_before).abs()),
                    Cell::Bool(row.converged),
                ]);
            }
            eprintln!(
                "shift-invariance: max_discrepancy={} non_converged={}",
                output::format_float(report.max_discrepancy),
                report.non_converged
            );
            emit(&cli.out, &table.render(table_format))
        }
        Command::Toda { op, t, dt, widen } => {
            let op = parse_operator(op)?;
            let evolved = match widen {
                Some(w) => toda_flow_widened(&op, *t, *dt, *w),
                None => toda_flow(&op, *t, *dt),
            }
            .map_err(from_core)?;
            match table_format {
                OutputFormat::Csv => {
                    let mut table = Table::new(vec!["n", "a", "b"]);
                    for n in evolved.window_lo()..=evolved.window_hi() {
                        table.push(vec![
                            Cell::Int(n),
                            c_cell(evolved.a(n)),
                            c_cell(evolved.b(n)),
                        ]);
                    }
                    emit(&cli.out, &table.render(OutputFormat::Csv))
                }
                OutputFormat::Json => {
                    // operator literal, round-trippable through --op
                    let mut object = Map::new();
                    object.insert(
                        "window_lo".into(),
                        Value::Number(evolved.window_lo().into()),
                    );
                    let range = evolved.window_lo()..=evolved.window_hi();
                    object.insert(
                        "a".into(),
                        Value::Array(
                            range
                                .clone()
                                .map(|n| Number::from_f64(evolved.a(n)).map(Value::Number).unwrap())
                                .collect(),
                        ),
                    );
                    object.insert(
                        "b".into(),
                        Value::Array(
                            range
                                .map(|n| Number::from_f64(evolved.b(n)).map(Value::Number).unwrap())
                                .collect(),
                        ),
                    );
                    emit(&cli.out, &render_json(&Value::Object(object)))
                }
            }
        }
        Command::CanonicalTransfer { system, z } => {
            let cs = parse_system(system)?;
            let z = parse_complex(z)?;
            let t = transfer(&cs, z);
            let columns = vec![
                "re_a", "im_a", "re_b", "im_b", "re_c", "im_c", "re_d", "im_d",
            ];
            let cells = vec![
                c_cell(t.entry_a().re),
                c_cell(t.entry_a().im),
                c_cell(t.entry_b().re),
                c_cell(t.entry_b().im),
                c_cell(t.entry_c().re),
                c_cell(t.entry_c().im),
                c_cell(t.entry_d().re),
                c_cell(t.entry_d().im),
            ];
            let mut table = Table::new(columns);
            table.push(cells);
            match scalar_format {
                OutputFormat::Csv => emit(&cli.out, &table.render(OutputFormat::Csv)),
                OutputFormat::Json => {
                    let row = table.render(OutputFormat::Json);
                    emit(&cli.out, &row)
                }
            }
        }
        Command::JInner { system, z } => {
            let cs = parse_system(system)?;
            let z = parse_complex(z)?;
            if !(z.im > 0.0) {
                return Err(CliError::invariant(
                    "the J-inner inequality is asserted for Im z > 0",
                ));
            }
            let defect = j_inner_defect(&transfer(&cs, z));
            match scalar_format {
                OutputFormat::Json => {
                    let mut object = Map::new();
                    object.insert(
                        "min_eig".into(),
                        Number::from_f64(defect.min_eig)
                            .map(Value::Number)
                            .unwrap_or(Value::Null),
                    );
                    emit(&cli.out, &render_json(&Value::Object(object)))
                }
                OutputFormat::Csv => {
                    let mut table = Table::new(vec!["min_eig"]);
                    table.push(vec![c_cell(defect.min_eig)]);
                    emit(&cli.out, &table.render(OutputFormat::Csv))
                }
            }
        }
        Command::WeylDisks { system, repeat, z } => {
            let cs = parse_system(system)?;
            let mut points = Vec::with_capacity(z.len());
            for z_text in z {
                let z = parse_complex(z_text)?;
                if !(z.im > 0.0) {
                    return Err(CliError::invariant("Weyl disks require Im z > 0"));
                }
                points.push(z);
            }
            // deterministic ordering regardless of flag order
            points.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
            let mut table = Table::new(vec!["n", "re_z", "im_z", "r_n"]);
            for z in points {
                let factors: Vec<_> = (0..*repeat).map(|_| transfer(&cs, z)).collect();
                let diameters = prefix_diameters(&factors, DEFAULT_TOUCH_TOL).map_err(from_core)?;
                for (i, &r) in diameters.iter().enumerate() {
                    table.push(vec![
                        Cell::Int((i + 1) as i64),
                        c_cell(z.re),
                        c_cell(z.im),
                        c_cell(r),
                    ]);
                }
            }
            emit(&cli.out, &table.render(table_format))
        }
        Command::Semicont { experiment } => {
            let spec = parse_experiment(experiment)?;
            let report = run_semicontinuity(&spec).map_err(from_core)?;
            let mut table = Table::new(vec![
                "x",
                "tail_sup_absR",
                "limit_absR",
                "violation",
                "converged",
            ]);
            for row in &report.rows {
                table.push(vec![
                    c_cell(row.x),
                    c_cell(row.tail_sup_abs_r),
                    c_cell(row.limit_abs_r),
                    Cell::Bool(row.violation),
                    Cell::Bool(row.converged),
                ]);
            }
            eprintln!(
                "semicont: violations={} non_converged={} sigma_ac_inclusion_ok={} convergence_gap={} warning={}",
                report.violations,
                report.non_converged,
                report.sigma_ac_inclusion_ok,
                output::format_float(report.convergence_gap),
                report.convergence_warning
            );
            emit(&cli.out, &table.render(table_format))
        }
        Command::Hilbert { samples, x } => {
            let data = parse_samples(samples)?;
            let mut table = Table::new(vec!["x", "value"]);
            for &point in x {
                let value =
                    hilbert_transform(&data.samples, data.lo, data.hi, point).map_err(from_core)?;
                table.push(vec![c_cell(point), c_cell(value)]);
            }
            emit(&cli.out, &table.render(table_format))
        }
        Command::WeakL2 { input } => {
            let input = parse_weak_l2(input)?;
            let ladder = ladder_from(&cli)?;
            let mut seq = Vec::with_capacity(input.seq.len());
            for record in input.seq {
                seq.push(record.build()?);
            }
            let limit = input.limit.build()?;
            let intervals: Vec<(f64, f64)> = input.testfns.iter().map(|t| (t.lo, t.hi)).collect();
            let closures: Vec<Box<dyn Fn(f64) -> f64>> = intervals
                .iter()
                .map(|&(lo, hi)| {
                    Box::new(move |x: f64| if x > lo && x < hi { 1.0 } else { 0.0 })
                        as Box<dyn Fn(f64) -> f64>
                })
                .collect();
            let testfns: Vec<&dyn Fn(f64) -> f64> = closures.iter().map(|b| b.as_ref()).collect();
            let report = weak_l2_report(
                &seq,
                &limit,
                input.half_width,
                input.cells,
                &testfns,
                &ladder,
            )
            .map_err(from_core)?;
            let mut table = Table::new(vec!["testfn", "n", "gap"]);
            for (t, gaps) in report.gaps.iter().enumerate() {
                for (n, &gap) in gaps.iter().enumerate() {
                    table.push(vec![Cell::Int(t as i64), Cell::Int(n as i64), c_cell(gap)]);
                }
            }
            emit(&cli.out, &table.render(table_format))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn grid_helper_is_inclusive() {
        let g = formats::build_grid(0.0, 1.0, 3).unwrap();
        assert_eq!(g, vec![0.0, 0.5, 1.0]);
    }
}
