//! Convergence reports, order estimates, reference eigenpairs and report
//! rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iteration::{plain_power, Criterion, StoppingRule, Update};
use crate::operators::{PositiveOperator, ShiftRegion, TridiagonalMatrix};
use crate::vecops::{norm2, normalized};

/// Gap below which the power-iteration reference is accepted.
pub const REFERENCE_GAP: f64 = 1e-14;
pub const REFERENCE_MAX_ITERS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Algorithm {
    VariableLambda { update: Update },
    FixedShift { shift: f64 },
    Power,
    Rayleigh,
}

impl Algorithm {
    pub fn tag(&self) -> String {
        match self {
            Algorithm::VariableLambda {
                update: Update::Sup,
            } => "cw-sup".into(),
            Algorithm::VariableLambda { update: Update::Mu } => "cw-mu".into(),
            Algorithm::FixedShift { shift } => format!("fixed-shift({shift})"),
            Algorithm::Power => "power".into(),
            Algorithm::Rayleigh => "rayleigh".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    CriterionMet,
    /// The shifted system became singular or lost positivity; the result is
    /// the last shift and iterate.
    ShiftCollision,
    /// The start vector was already the principal eigenvector.
    EigenvectorStart,
    MaxIters,
}

impl StopReason {
    pub fn converged(self) -> bool {
        !matches!(self, StopReason::MaxIters)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: usize,
    pub lambda: f64,
    /// Stopping-criterion value; absent for the final step of a `Δλ` run
    /// that stopped for another reason.
    pub criterion: Option<f64>,
    pub residual: Option<f64>,
    /// CW gap of the step's iterate; absent when the iterate is not positive.
    pub cw_gap: Option<f64>,
    /// `|λ⁽ⁿ⁾ − λ_ref| / |λ_ref|` once a reference is attached.
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub algorithm: Algorithm,
    pub criterion: Criterion,
    pub epsilon: f64,
    pub stop_reason: StopReason,
    /// `λ⁽⁰⁾`; step 0 has no record.
    pub initial_lambda: f64,
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// Steps `1..=iterations` in increasing order.
    pub records: Vec<StepRecord>,
    /// Reference eigenvalue the record errors are measured against.
    pub reference: Option<f64>,
    /// Seconds; not deterministic.
    pub wall_time: Option<f64>,
}

impl ConvergenceReport {
    pub fn converged(&self) -> bool {
        self.stop_reason.converged()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.lambda).collect()
    }

    /// Fills every record's relative error against `lambda_ref`.
    pub fn attach_reference(&mut self, lambda_ref: f64) {
        self.reference = Some(lambda_ref);
        for r in &mut self.records {
            r.error = Some(((r.lambda - lambda_ref) / lambda_ref).abs());
        }
    }

    /// Orders of the relative-error column, masked below the default floor.
    pub fn order_estimate(&self) -> OrderEstimate {
        match self.reference {
            Some(lambda_ref) => {
                let errors: Vec<Option<f64>> = self.records.iter().map(|r| r.error).collect();
                OrderEstimate::lenient(&errors, relative_floor(lambda_ref))
            }
            None => OrderEstimate::empty(self.records.len()),
        }
    }

    /// Record errors; `None` if any record lacks one.
    pub fn errors(&self) -> Option<Vec<f64>> {
        self.records.iter().map(|r| r.error).collect()
    }

    pub fn without_timing(mut self) -> Self {
        self.wall_time = None;
        self
    }
}

/// Per-step orders aligned with the error sequence: `orders[k]` uses
/// `e[k−2], e[k−1], e[k]`, so the first two entries are always undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    pub orders: Vec<Option<f64>>,
    /// Steps excluded because an error involved is below the floor.
    pub masked: Vec<bool>,
}

impl OrderEstimate {
    pub fn empty(len: usize) -> Self {
        Self {
            orders: vec![None; len],
            masked: vec![false; len],
        }
    }

    /// Order at step `k` if defined and not masked.
    pub fn get(&self, k: usize) -> Option<f64> {
        match (self.orders.get(k), self.masked.get(k)) {
            (Some(&Some(a)), Some(false)) => Some(a),
            _ => None,
        }
    }

    /// Last unmasked order.
    pub fn last_defined(&self) -> Option<f64> {
        (0..self.orders.len()).rev().find_map(|k| self.get(k))
    }

    /// Orders of a column that may contain zero or missing errors; these
    /// count as below the floor.
    pub fn lenient(errors: &[Option<f64>], floor: f64) -> Self {
        let e: Vec<f64> = errors.iter().map(|x| x.unwrap_or(0.0)).collect();
        compute_orders(&e, floor)
    }
}

/// Machine-precision floor for errors of an eigenvalue near `lambda_ref`.
pub fn default_floor(lambda_ref: f64) -> f64 {
    1e-13 * lambda_ref.abs().max(1.0)
}

/// [`default_floor`] expressed relative to `lambda_ref`.
pub fn relative_floor(lambda_ref: f64) -> f64 {
    default_floor(lambda_ref) / lambda_ref.abs()
}

/// `αₙ = (log eₙ₊₁ − log eₙ)/(log eₙ − log eₙ₋₁)`, masked where any of the
/// three errors is below `floor`.
pub fn estimate_order(errors: &[f64], floor: f64) -> Result<OrderEstimate> {
    if errors.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "order estimate needs at least 3 errors, got {}",
            errors.len()
        )));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(Error::Domain(format!(
            "errors must be positive and finite, got {e}"
        )));
    }
    Ok(compute_orders(errors, floor))
}

fn compute_orders(e: &[f64], floor: f64) -> OrderEstimate {
    let mut est = OrderEstimate::empty(e.len());
    for k in 2..e.len() {
        let window = &e[k - 2..=k];
        if window.iter().any(|&x| !(x >= floor) || !(x > 0.0)) {
            est.masked[k] = true;
            continue;
        }
        let den = e[k - 1].ln() - e[k - 2].ln();
        let a = (e[k].ln() - e[k - 1].ln()) / den;
        if a.is_finite() {
            est.orders[k] = Some(a);
        }
    }
    est
}

/// Consecutive-pair mesh orders
/// `(log|λ*−λ_{h₁}| − log|λ*−λ_{h₂}|)/(log h₁ − log h₂)`.
pub fn mesh_order(lambda_ref: f64, pairs: &[(f64, f64)]) -> Result<Vec<f64>> {
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(
            "mesh order needs at least 2 pairs".into(),
        ));
    }
    for &(h, l) in pairs {
        if !(h > 0.0) {
            return Err(Error::InvalidSpacing(h));
        }
        if l == lambda_ref {
            return Err(Error::Domain(format!(
                "lambda_h equals the reference at h = {h}"
            )));
        }
    }
    pairs
        .windows(2)
        .map(|w| {
            let ((h1, l1), (h2, l2)) = (w[0], w[1]);
            if h1 == h2 {
                return Err(Error::Domain(format!("coincident spacings h = {h1}")));
            }
            Ok(((lambda_ref - l1).abs().ln() - (lambda_ref - l2).abs().ln()) / (h1.ln() - h2.ln()))
        })
        .collect()
}

/// Principal eigenpair to near machine precision.
///
/// Runs plain power iteration from the ones vector until the CW gap is
/// below `1e−14` and returns the upper CW bound with the unit iterate.
/// Symmetric tridiagonal matrices use Sturm bisection instead: their
/// eigenvectors are localized, so the CW ratios at far components never
/// settle.
pub fn reference_eigenpair(op: &dyn PositiveOperator) -> Result<(f64, Vec<f64>)> {
    if let Some(t) = op.as_tridiagonal() {
        return tridiagonal_reference(op, t);
    }
    let rule = StoppingRule::new(Criterion::Sc1, REFERENCE_GAP, REFERENCE_MAX_ITERS)?;
    let report = plain_power(op, &vec![1.0; op.dim()], &rule)?;
    if !report.converged() {
        return Err(Error::NoConvergence(report.iterations));
    }
    Ok((report.lambda, report.vector))
}

fn tridiagonal_reference(
    op: &dyn PositiveOperator,
    t: &TridiagonalMatrix,
) -> Result<(f64, Vec<f64>)> {
    let lambda = t.largest_eigenvalue();
    // Inverse iteration just above the eigenvalue; two solves suffice at this
    // separation.
    let shift = lambda + 1e-10 * lambda.abs().max(1.0);
    let sys = op.factor_shifted(shift, ShiftRegion::Interior)?;
    let mut v = normalized(&vec![1.0; op.dim()]);
    for _ in 0..3 {
        let w = sys.solve(&v)?;
        let n = norm2(&w);
        if !n.is_finite() || n == 0.0 {
            return Err(Error::NoConvergence(0));
        }
        v = w.iter().map(|x| x / n).collect();
    }
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok((lambda, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Csv,
    Markdown,
    Json,
}

/// Six significant digits, `%g` style.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mant))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

#[derive(Serialize, Deserialize)]
struct JsonReport {
    report: ConvergenceReport,
    order: OrderEstimate,
}

/// Renders the report; `order` is aligned with `report.records`.
pub fn emit_report(
    report: &ConvergenceReport,
    order: &OrderEstimate,
    format: ReportFormat,
) -> String {
    let rows = report.records.iter().enumerate().map(|(k, r)| {
        [
            r.n.to_string(),
            fmt_sig(r.lambda),
            cell(r.error),
            cell(order.get(k)),
            cell(r.criterion),
            cell(r.residual),
        ]
    });
    match format {
        ReportFormat::Csv => {
            let mut out = String::from("n,lambda,error,order,criterion,residual\n");
            for row in rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        ReportFormat::Markdown => {
            let mut out = format!(
                "| n | lambda | error | order | {} | residual |\n|---:|---:|---:|---:|---:|---:|\n",
                report.criterion.name()
            );
            for row in rows {
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
            out
        }
        ReportFormat::Json => {
            let doc = JsonReport {
                report: report.clone(),
                order: order.clone(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

/// Parses [`emit_report`]'s JSON output.
pub fn parse_json_report(text: &str) -> Result<(ConvergenceReport, OrderEstimate)> {
    let doc: JsonReport = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    Ok((doc.report, doc.order))
}
