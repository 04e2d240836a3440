//! Convergence tables on built-in problems.

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use super::CliError;
use crate::diagnostics::{
    fmt_sig, mesh_order, reference_eigenpair, ConvergenceReport, OrderEstimate,
};
use crate::grid::{unit_square, unit_square_principal_value};
use crate::iteration::{
    rayleigh_quotient_iteration, variable_lambda_power, Criterion, SolverConfig, StoppingRule,
    Update, DEFAULT_EPSILON, DEFAULT_MAX_ITERS,
};
use crate::operators::{hilbert_matrix, random_tridiagonal, InverseLaplacian, PositiveOperator};

/// Seed of the tridiagonal instance when none is given.
pub const DEFAULT_TRIDIAGONAL_SEED: u64 = 1;

const STEP_COUNT_CELLS: [u32; 6] = [4, 6, 10, 16, 25, 50];
const GRID_ORDER_CELLS: [u32; 3] = [6, 16, 50];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableId {
    /// Hilbert(1000) and a random tridiagonal(1000): error, order, SC1 per step.
    Matrix,
    /// Unit-square λ_h against the continuum value, with mesh orders.
    MeshError,
    /// Iterations to converge per mesh size, for ε = 1e-14 and ε = h²/10.
    StepCounts,
    /// Per-step error and order on three meshes.
    GridOrder,
    /// Variable-shift against Rayleigh quotient iteration.
    RayleighCompare,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_markdown(&self) -> String {
        let mut out = format!("{}\n\n| {} |\n|", self.title, self.columns.join(" | "));
        out.push_str(&"---:|".repeat(self.columns.len()));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("| {} |\n", row.join(" | ")));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }
}

/// A run with errors against its reference and the matching orders.
struct Column {
    report: ConvergenceReport,
    order: OrderEstimate,
}

impl Column {
    fn error(&self, k: usize) -> String {
        self.report
            .records
            .get(k)
            .and_then(|r| r.error)
            .map(fmt_sig)
            .unwrap_or_default()
    }

    fn order(&self, k: usize) -> String {
        self.order.get(k).map(fmt_sig).unwrap_or_default()
    }

    fn sc1(&self, k: usize) -> String {
        self.report
            .records
            .get(k)
            .and_then(|r| r.cw_gap)
            .map(fmt_sig)
            .unwrap_or_default()
    }

    fn len(&self) -> usize {
        self.report.records.len()
    }
}

fn column(mut report: ConvergenceReport, lambda_ref: f64) -> Column {
    report.attach_reference(lambda_ref);
    let order = report.order_estimate();
    Column { report, order }
}

fn config(update: Update, criterion: Criterion, epsilon: f64) -> SolverConfig {
    SolverConfig {
        stopping: StoppingRule {
            criterion,
            epsilon,
            max_iters: DEFAULT_MAX_ITERS,
        },
        update,
        record_trace: true,
    }
}

fn cw_column(
    op: &dyn PositiveOperator,
    v0: &[f64],
    cfg: &SolverConfig,
) -> Result<Column, CliError> {
    let (lambda_ref, _) = reference_eigenpair(op)?;
    let report = variable_lambda_power(op, v0, cfg)?;
    Ok(column(report, lambda_ref))
}

fn rayleigh_column(op: &dyn PositiveOperator, v0: &[f64]) -> Result<Column, CliError> {
    let (lambda_ref, _) = reference_eigenpair(op)?;
    let rule = StoppingRule {
        criterion: Criterion::LambdaDiff,
        epsilon: DEFAULT_EPSILON,
        max_iters: DEFAULT_MAX_ITERS,
    };
    let report = rayleigh_quotient_iteration(op, v0, &rule)?;
    Ok(column(report, lambda_ref))
}

fn square(cells: u32) -> Result<InverseLaplacian, CliError> {
    let h = 1.0 / f64::from(cells);
    Ok(InverseLaplacian::new(unit_square(h)?)?)
}

fn grid_run(cells: u32, epsilon: f64) -> Result<Column, CliError> {
    let t = square(cells)?;
    let v0 = t.apply_to_ones();
    cw_column(&t, &v0, &config(Update::Mu, Criterion::Sc2, epsilon))
}

fn rows_by_step(
    columns: &[&Column],
    cells: impl Fn(&Column, usize) -> Vec<String>,
) -> Vec<Vec<String>> {
    let len = columns.iter().map(|c| c.len()).max().unwrap_or(0);
    (0..len)
        .map(|k| {
            let mut row = vec![(k + 1).to_string()];
            for c in columns {
                row.extend(cells(c, k));
            }
            row
        })
        .collect()
}

fn matrix_table(seed: u64) -> Result<Table, CliError> {
    let cfg = config(Update::Sup, Criterion::LambdaDiff, DEFAULT_EPSILON);
    let (hilbert, tri) = rayon::join(
        || -> Result<Column, CliError> {
            let h = hilbert_matrix(1000)?;
            cw_column(&h, &vec![1.0; 1000], &cfg)
        },
        || -> Result<Column, CliError> {
            let t = random_tridiagonal(1000, seed)?;
            cw_column(&t, &vec![1.0; 1000], &cfg)
        },
    );
    let (hilbert, tri) = (hilbert?, tri?);
    Ok(Table {
        title: format!(
            "Variable-shift iteration, v0 = ones, dlambda < 1e-14 (tridiagonal seed {seed})"
        ),
        columns: [
            "n",
            "hilbert error",
            "hilbert order",
            "hilbert sc1",
            "tridiagonal error",
            "tridiagonal order",
            "tridiagonal sc1",
        ]
        .map(String::from)
        .to_vec(),
        rows: rows_by_step(&[&hilbert, &tri], |c, k| {
            vec![c.error(k), c.order(k), c.sc1(k)]
        }),
    })
}

fn mesh_error_table() -> Result<Table, CliError> {
    let star = 1.0 / (2.0 * std::f64::consts::PI.powi(2));
    let values: Vec<(f64, f64)> = STEP_COUNT_CELLS
        .par_iter()
        .map(|&k| -> Result<(f64, f64), CliError> {
            let t = square(k)?;
            Ok((1.0 / f64::from(k), reference_eigenpair(&t)?.0))
        })
        .collect::<Result<_, _>>()?;
    let orders = mesh_order(star, &values)?;
    let rows = values
        .iter()
        .enumerate()
        .map(|(i, &(h, l))| {
            vec![
                format!("1/{}", STEP_COUNT_CELLS[i]),
                fmt_sig(l),
                fmt_sig(unit_square_principal_value(h)),
                fmt_sig((star - l).abs()),
                if i == 0 {
                    String::new()
                } else {
                    fmt_sig(orders[i - 1])
                },
            ]
        })
        .collect();
    Ok(Table {
        title: format!(
            "Unit square: lambda_h against 1/(2 pi^2) = {}",
            fmt_sig(star)
        ),
        columns: ["h", "lambda_h", "analytic", "error", "order"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}

fn step_counts_table() -> Result<Table, CliError> {
    let cells: Vec<(u32, bool)> = STEP_COUNT_CELLS
        .iter()
        .flat_map(|&k| [(k, false), (k, true)])
        .collect();
    let runs: Vec<Column> = cells
        .par_iter()
        .map(|&(k, quick)| {
            let h = 1.0 / f64::from(k);
            grid_run(k, if quick { h * h / 10.0 } else { DEFAULT_EPSILON })
        })
        .collect::<Result<_, _>>()?;
    let rows = STEP_COUNT_CELLS
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let (strict, quick) = (&runs[2 * i], &runs[2 * i + 1]);
            let last = |c: &Column| {
                c.report
                    .records
                    .last()
                    .and_then(|r| r.error)
                    .map(fmt_sig)
                    .unwrap_or_default()
            };
            vec![
                format!("1/{k}"),
                strict.report.iterations.to_string(),
                last(strict),
                quick.report.iterations.to_string(),
                last(quick),
            ]
        })
        .collect();
    Ok(Table {
        title: "Unit square, v0 = T1, mu update, sc2".into(),
        columns: [
            "h",
            "steps (1e-14)",
            "error (1e-14)",
            "steps (h^2/10)",
            "error (h^2/10)",
        ]
        .map(String::from)
        .to_vec(),
        rows,
    })
}

fn grid_order_table() -> Result<Table, CliError> {
    let runs: Vec<Column> = GRID_ORDER_CELLS
        .par_iter()
        .map(|&k| grid_run(k, DEFAULT_EPSILON))
        .collect::<Result<_, _>>()?;
    let refs: Vec<&Column> = runs.iter().collect();
    let mut columns = vec!["n".to_string()];
    for k in GRID_ORDER_CELLS {
        columns.push(format!("error h=1/{k}"));
        columns.push(format!("order h=1/{k}"));
    }
    Ok(Table {
        title: "Unit square, v0 = T1, mu update, sc2 < 1e-14".into(),
        columns,
        rows: rows_by_step(&refs, |c, k| vec![c.error(k), c.order(k)]),
    })
}

fn rayleigh_compare_table() -> Result<Table, CliError> {
    let h = hilbert_matrix(50)?;
    let t = square(16)?;
    let ones = vec![1.0; 50];
    let t_one = t.apply_to_ones();
    let cfg_matrix = config(Update::Sup, Criterion::LambdaDiff, DEFAULT_EPSILON);
    let cfg_grid = config(Update::Mu, Criterion::LambdaDiff, DEFAULT_EPSILON);
    let jobs: Vec<Box<dyn Fn() -> Result<Column, CliError> + Send + Sync>> = vec![
        Box::new(|| cw_column(&h, &ones, &cfg_matrix)),
        Box::new(|| rayleigh_column(&h, &ones)),
        Box::new(|| cw_column(&t, &t_one, &cfg_grid)),
        Box::new(|| rayleigh_column(&t, &t_one)),
    ];
    let runs: Vec<Column> = jobs.par_iter().map(|job| job()).collect::<Result<_, _>>()?;
    let refs: Vec<&Column> = runs.iter().collect();
    Ok(Table {
        title: "Variable shift against Rayleigh quotient, dlambda < 1e-14".into(),
        columns: [
            "n",
            "hilbert(50) cw error",
            "order",
            "hilbert(50) rayleigh error",
            "order",
            "square h=1/16 cw error",
            "order",
            "square h=1/16 rayleigh error",
            "order",
        ]
        .map(String::from)
        .to_vec(),
        rows: rows_by_step(&refs, |c, k| vec![c.error(k), c.order(k)]),
    })
}

/// Builds one table. Cells run in parallel; row order is fixed.
pub fn bench_table(id: TableId, seed: u64) -> Result<Table, CliError> {
    match id {
        TableId::Matrix => matrix_table(seed),
        TableId::MeshError => mesh_error_table(),
        TableId::StepCounts => step_counts_table(),
        TableId::GridOrder => grid_order_table(),
        TableId::RayleighCompare => rayleigh_compare_table(),
    }
}
