//! Collatz-Wielandt bounds and the eigenvalue iterations.
//!
//! All iterations share one driver: a stepper produces states
//! `(n, λ⁽ⁿ⁾, vⁿ, wⁿ)` and the driver records the trace and applies the
//! stopping rule. Iterations are single-threaded and pure in their inputs.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Algorithm, ConvergenceReport, StepRecord, StopReason};
use crate::error::{Error, Result};
use crate::operators::{
    check_positive, OperatorKind, PositiveOperator, ShiftRegion, ShiftedSystem,
};
use crate::vecops::{dot, norm2, normalized};

/// A start vector whose CW gap is at most this fraction of `λ⁽⁰⁾` is taken
/// as the principal eigenvector.
pub const DEGENERATE_START_RATIO: f64 = 1e-13;

pub const DEFAULT_EPSILON: f64 = 1e-14;
pub const DEFAULT_MAX_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CwBounds {
    pub lower: f64,
    pub upper: f64,
    pub argmin: usize,
    pub argmax: usize,
}

impl CwBounds {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    /// Bounds of the ratios `num_i / den_i`; smallest index wins ties.
    ///
    /// Every `den_i` must be positive.
    pub fn of_ratios(num: &[f64], den: &[f64]) -> Result<Self> {
        if num.len() != den.len() {
            return Err(Error::Shape {
                expected: den.len(),
                got: num.len(),
            });
        }
        if den.is_empty() {
            return Err(Error::InvalidDimension("empty vector".into()));
        }
        let mut b = CwBounds {
            lower: f64::INFINITY,
            upper: f64::NEG_INFINITY,
            argmin: 0,
            argmax: 0,
        };
        for (i, (&a, &y)) in num.iter().zip(den).enumerate() {
            if !(y > 0.0) {
                return Err(Error::Positivity { index: i, value: y });
            }
            let r = a / y;
            if r < b.lower {
                b.lower = r;
                b.argmin = i;
            }
            if r > b.upper {
                b.upper = r;
                b.argmax = i;
            }
        }
        Ok(b)
    }
}

/// `min_i (op·y)_i / y_i` and `max_i (op·y)_i / y_i` for positive `y`.
pub fn collatz_wielandt(op: &dyn PositiveOperator, y: &[f64]) -> Result<CwBounds> {
    op.check_len(y)?;
    if let Some((index, &value)) = y.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
        return Err(Error::Positivity { index, value });
    }
    CwBounds::of_ratios(&op.apply(y)?, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Gap of the CW bounds of the current iterate.
    Sc1,
    /// Gap of `vⁿ / wⁿ⁺¹`, equal to the CW gap of `vⁿ⁺¹` in exact arithmetic.
    Sc2,
    /// `|λ⁽ⁿ⁺¹⁾ − λ⁽ⁿ⁾|`, attributed to step `n`.
    LambdaDiff,
    /// `‖op·v − λ·v‖₂`.
    Residual,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Sc1 => "sc1",
            Criterion::Sc2 => "sc2",
            Criterion::LambdaDiff => "dlambda",
            Criterion::Residual => "residual",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub criterion: Criterion,
    pub epsilon: f64,
    pub max_iters: usize,
}

impl StoppingRule {
    pub fn new(criterion: Criterion, epsilon: f64, max_iters: usize) -> Result<Self> {
        let rule = Self {
            criterion,
            epsilon,
            max_iters,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Shift update of the variable-λ iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Update {
    /// `λ⁽ⁿ⁺¹⁾ = max_i (op·vⁿ⁺¹)_i / vⁿ⁺¹_i`; one extra application per step.
    Sup,
    /// `μ⁽ⁿ⁺¹⁾ = μ⁽ⁿ⁾ − min_i vⁿ_i / wⁿ⁺¹_i`; no extra application.
    Mu,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub stopping: StoppingRule,
    pub update: Update,
    /// Record residual and CW gap for every step (costs one application per
    /// step when the update does not already provide it).
    pub record_trace: bool,
}

impl SolverConfig {
    /// Matrices: sup update and `Δλ`; grid operators: μ update and SC2.
    pub fn for_kind(kind: OperatorKind) -> Self {
        let (update, criterion) = if kind.is_matrix() {
            (Update::Sup, Criterion::LambdaDiff)
        } else {
            (Update::Mu, Criterion::Sc2)
        };
        Self {
            stopping: StoppingRule {
                criterion,
                epsilon: DEFAULT_EPSILON,
                max_iters: DEFAULT_MAX_ITERS,
            },
            update,
            record_trace: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub n: usize,
    pub lambda: f64,
    /// Unit 2-norm iterate.
    pub v: Vec<f64>,
    /// Raw solve output that produced `v`; absent at `n = 0` and for
    /// multiplicative iterations.
    pub w: Option<Vec<f64>>,
    /// Right-hand side of the solve that produced `w`, i.e. the previous `v`.
    pub rhs: Option<Vec<f64>>,
    /// Cached `op·v`.
    pub image: Option<Vec<f64>>,
}

impl IterationState {
    fn initial(lambda: f64, v: Vec<f64>, image: Option<Vec<f64>>) -> Self {
        Self {
            n: 0,
            lambda,
            v,
            w: None,
            rhs: None,
            image,
        }
    }

    fn image_of(&self, op: &dyn PositiveOperator) -> Result<Vec<f64>> {
        match &self.image {
            Some(y) => Ok(y.clone()),
            None => op.apply(&self.v),
        }
    }
}

/// `‖op·v − λ·v‖₂` for the state's `(λ, v)`.
pub fn residual(op: &dyn PositiveOperator, state: &IterationState) -> Result<f64> {
    let y = state.image_of(op)?;
    Ok(residual_from_image(&y, &state.v, state.lambda))
}

fn residual_from_image(image: &[f64], v: &[f64], lambda: f64) -> f64 {
    image
        .iter()
        .zip(v)
        .map(|(y, x)| (y - lambda * x).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Value of the rule's criterion at `state`, and whether it is below `ε`.
///
/// `prev_lambda` is the shift of the preceding state, used by
/// [`Criterion::LambdaDiff`].
pub fn evaluate_stop(
    rule: &StoppingRule,
    op: &dyn PositiveOperator,
    state: &IterationState,
    prev_lambda: Option<f64>,
) -> Result<(bool, f64)> {
    let value = match rule.criterion {
        Criterion::Sc1 => CwBounds::of_ratios(&state.image_of(op)?, &state.v)?.gap(),
        Criterion::Sc2 => {
            let (Some(w), Some(rhs)) = (&state.w, &state.rhs) else {
                return Err(Error::State(
                    "SC2 needs the previous iterate and the solve output".into(),
                ));
            };
            CwBounds::of_ratios(rhs, w)?.gap()
        }
        Criterion::LambdaDiff => {
            let prev = prev_lambda
                .ok_or_else(|| Error::State("lambda difference needs the previous shift".into()))?;
            (state.lambda - prev).abs()
        }
        Criterion::Residual => residual(op, state)?,
    };
    Ok((value < rule.epsilon, value))
}

fn positive_unit(v0: &[f64], op: &dyn PositiveOperator) -> Result<Vec<f64>> {
    op.check_len(v0)?;
    if let Some((index, &value)) = v0
        .iter()
        .enumerate()
        .find(|(_, &x)| !(x > 0.0) || !x.is_finite())
    {
        return Err(Error::Positivity { index, value });
    }
    Ok(normalized(v0))
}

/// One step of an iteration. On error the state is left unchanged.
trait Stepper {
    fn state(&self) -> &IterationState;
    fn advance(&mut self) -> Result<()>;
}

/// Step-by-step variable-λ iteration, for callers that need every iterate.
pub struct VariableLambda<'a> {
    op: &'a dyn PositiveOperator,
    update: Update,
    state: IterationState,
    initial_gap: f64,
}

impl<'a> VariableLambda<'a> {
    /// `λ⁽⁰⁾` is the upper CW bound of `v0`, which must be positive.
    pub fn new(op: &'a dyn PositiveOperator, v0: &[f64], update: Update) -> Result<Self> {
        let v = positive_unit(v0, op)?;
        let image = op.apply(&v)?;
        let b = CwBounds::of_ratios(&image, &v)?;
        Ok(Self {
            op,
            update,
            state: IterationState::initial(b.upper, v, Some(image)),
            initial_gap: b.gap(),
        })
    }

    pub fn state(&self) -> &IterationState {
        &self.state
    }

    /// True when `v0` is numerically the principal eigenvector.
    pub fn is_degenerate_start(&self) -> bool {
        self.initial_gap <= DEGENERATE_START_RATIO * self.state.lambda.abs()
    }

    /// Advances to `n + 1`. A shift collision or positivity violation
    /// leaves the state unchanged.
    pub fn step(&mut self) -> Result<()> {
        let s = &self.state;
        let lambda = s.lambda;
        let sys = self.op.factor_shifted(lambda, ShiftRegion::AboveSpectrum)?;
        let w = sys.solve(&s.v)?;
        check_positive(&w, lambda)?;
        let v = normalized(&w);
        let (next, image) = match self.update {
            Update::Sup => {
                let image = self.op.apply(&v)?;
                (CwBounds::of_ratios(&image, &v)?.upper, Some(image))
            }
            Update::Mu => (lambda - CwBounds::of_ratios(&s.v, &w)?.lower, None),
        };
        if !next.is_finite() {
            return Err(Error::ShiftCollision { lambda });
        }
        let rhs = std::mem::take(&mut self.state.v);
        self.state = IterationState {
            n: self.state.n + 1,
            lambda: next,
            v,
            w: Some(w),
            rhs: Some(rhs),
            image,
        };
        Ok(())
    }
}

impl Stepper for VariableLambda<'_> {
    fn state(&self) -> &IterationState {
        &self.state
    }

    fn advance(&mut self) -> Result<()> {
        self.step()
    }
}

struct FixedShift<'a> {
    op: &'a dyn PositiveOperator,
    system: ShiftedSystem<'a>,
    state: IterationState,
}

impl Stepper for FixedShift<'_> {
    fn state(&self) -> &IterationState {
        &self.state
    }

    fn advance(&mut self) -> Result<()> {
        let shift = self.system.lambda();
        let w = self.system.solve(&self.state.v)?;
        check_positive(&w, shift)?;
        let v = normalized(&w);
        let image = self.op.apply(&v)?;
        let lambda = CwBounds::of_ratios(&image, &v)?.upper;
        let rhs = std::mem::take(&mut self.state.v);
        self.state = IterationState {
            n: self.state.n + 1,
            lambda,
            v,
            w: Some(w),
            rhs: Some(rhs),
            image: Some(image),
        };
        Ok(())
    }
}

struct Power<'a> {
    op: &'a dyn PositiveOperator,
    state: IterationState,
}

impl Stepper for Power<'_> {
    fn state(&self) -> &IterationState {
        &self.state
    }

    fn advance(&mut self) -> Result<()> {
        let y = self
            .state
            .image
            .as_deref()
            .expect("power state caches its image");
        let v = normalized(y);
        let image = self.op.apply(&v)?;
        let lambda = CwBounds::of_ratios(&image, &v)?.upper;
        self.state = IterationState {
            n: self.state.n + 1,
            lambda,
            v,
            w: None,
            rhs: None,
            image: Some(image),
        };
        Ok(())
    }
}

struct Rayleigh<'a> {
    op: &'a dyn PositiveOperator,
    state: IterationState,
}

impl Stepper for Rayleigh<'_> {
    fn state(&self) -> &IterationState {
        &self.state
    }

    fn advance(&mut self) -> Result<()> {
        let lambda = self.state.lambda;
        let w = self
            .op
            .factor_shifted(lambda, ShiftRegion::Interior)?
            .solve(&self.state.v)?;
        let norm = norm2(&w);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::ShiftCollision { lambda });
        }
        let v: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let image = self.op.apply(&v)?;
        let next = dot(&v, &image);
        let rhs = std::mem::take(&mut self.state.v);
        self.state = IterationState {
            n: self.state.n + 1,
            lambda: next,
            v,
            w: Some(w),
            rhs: Some(rhs),
            image: Some(image),
        };
        Ok(())
    }
}

/// What to do when a step fails.
enum OnFailure {
    /// Collisions and positivity violations end the run at the current state.
    StopAtCollision,
    /// Any failure means the fixed shift is not above the spectrum.
    ShiftTooSmall(f64),
}

struct Driver<'a> {
    op: &'a dyn PositiveOperator,
    rule: StoppingRule,
    record_trace: bool,
    algorithm: Algorithm,
    on_failure: OnFailure,
}

impl Driver<'_> {
    fn record(&self, state: &IterationState, criterion: Option<f64>) -> Result<StepRecord> {
        let (residual, cw_gap) = if self.record_trace {
            let image = state.image_of(self.op)?;
            let gap = CwBounds::of_ratios(&image, &state.v).ok().map(|b| b.gap());
            (
                Some(residual_from_image(&image, &state.v, state.lambda)),
                gap,
            )
        } else {
            (None, None)
        };
        Ok(StepRecord {
            n: state.n,
            lambda: state.lambda,
            criterion,
            residual,
            cw_gap,
            error: None,
        })
    }

    fn finish(
        &self,
        initial_lambda: f64,
        state: &IterationState,
        records: Vec<StepRecord>,
        stop_reason: StopReason,
        start: Instant,
    ) -> ConvergenceReport {
        ConvergenceReport {
            algorithm: self.algorithm,
            criterion: self.rule.criterion,
            epsilon: self.rule.epsilon,
            stop_reason,
            initial_lambda,
            lambda: state.lambda,
            vector: state.v.clone(),
            iterations: state.n,
            records,
            reference: None,
            wall_time: Some(start.elapsed().as_secs_f64()),
        }
    }

    fn failure(&self, err: Error) -> Result<StopReason> {
        match (&self.on_failure, err) {
            (
                OnFailure::StopAtCollision,
                Error::ShiftCollision { .. } | Error::Singular(_) | Error::Positivity { .. },
            ) => Ok(StopReason::ShiftCollision),
            (
                OnFailure::ShiftTooSmall(lambda),
                Error::ShiftCollision { .. } | Error::Singular(_) | Error::Positivity { .. },
            ) => Err(Error::ShiftTooSmall { lambda: *lambda }),
            (_, other) => Err(other),
        }
    }

    fn run(&self, stepper: &mut dyn Stepper, start: Instant) -> Result<ConvergenceReport> {
        let initial_lambda = stepper.state().lambda;
        let mut records: Vec<StepRecord> = Vec::new();
        let lookahead = self.rule.criterion == Criterion::LambdaDiff;
        let mut prev = stepper.state().clone();
        let max = self.rule.max_iters;
        loop {
            if let Err(e) = stepper.advance() {
                let reason = self.failure(e)?;
                return Ok(self.finish(initial_lambda, stepper.state(), records, reason, start));
            }
            let state = stepper.state();
            if lookahead {
                // Δλ belongs to the earlier state; the confirming step is not reported.
                let diff = (state.lambda - prev.lambda).abs();
                if let Some(last) = records.last_mut() {
                    last.criterion = Some(diff);
                }
                if diff < self.rule.epsilon {
                    return Ok(self.finish(
                        initial_lambda,
                        &prev,
                        records,
                        StopReason::CriterionMet,
                        start,
                    ));
                }
                if state.n > max {
                    return Ok(self.finish(
                        initial_lambda,
                        &prev,
                        records,
                        StopReason::MaxIters,
                        start,
                    ));
                }
                records.push(self.record(state, None)?);
            } else {
                let (fired, value) = evaluate_stop(&self.rule, self.op, state, Some(prev.lambda))?;
                records.push(self.record(state, Some(value))?);
                if fired {
                    return Ok(self.finish(
                        initial_lambda,
                        state,
                        records,
                        StopReason::CriterionMet,
                        start,
                    ));
                }
                if state.n >= max {
                    return Ok(self.finish(
                        initial_lambda,
                        state,
                        records,
                        StopReason::MaxIters,
                        start,
                    ));
                }
            }
            prev = state.clone();
        }
    }
}

/// Variable-shift inverse iteration from a positive `v0`.
///
/// Each step solves `(λ⁽ⁿ⁾ − op)·w = vⁿ`, sets `vⁿ⁺¹ = w/‖w‖₂` and updates
/// the shift per `config.update`. The shifts decrease strictly toward the
/// principal eigenvalue. A shift collision ends the run as converged at the
/// current shift.
///
/// The operator must be primitive; for imprimitive input the result is
/// unspecified.
pub fn variable_lambda_power(
    op: &dyn PositiveOperator,
    v0: &[f64],
    config: &SolverConfig,
) -> Result<ConvergenceReport> {
    config.stopping.validate()?;
    let start = Instant::now();
    let mut it = VariableLambda::new(op, v0, config.update)?;
    let driver = Driver {
        op,
        rule: config.stopping,
        record_trace: config.record_trace,
        algorithm: Algorithm::VariableLambda {
            update: config.update,
        },
        on_failure: OnFailure::StopAtCollision,
    };
    if it.is_degenerate_start() {
        let lambda = it.state.lambda;
        return Ok(driver.finish(
            lambda,
            &it.state,
            Vec::new(),
            StopReason::EigenvectorStart,
            start,
        ));
    }
    driver.run(&mut it, start)
}

/// Runs the sup and μ updates side by side from `v0` for up to `n_steps`
/// steps and checks that shifts agree to `1e−11` relative and iterates to an
/// angle of `1e−9`.
pub fn mu_matches_sup(op: &dyn PositiveOperator, v0: &[f64], n_steps: usize) -> Result<bool> {
    let mut sup = VariableLambda::new(op, v0, Update::Sup)?;
    let mut mu = VariableLambda::new(op, v0, Update::Mu)?;
    if sup.is_degenerate_start() {
        return Ok(true);
    }
    for _ in 0..n_steps {
        let a = sup.step();
        let b = mu.step();
        match (a, b) {
            (Ok(()), Ok(())) => {}
            // Both reached the eigenvalue to round-off.
            (Err(_), _) | (_, Err(_)) => break,
        }
        let (s, m) = (sup.state(), mu.state());
        if (s.lambda - m.lambda).abs() > 1e-11 * s.lambda.abs() {
            return Ok(false);
        }
        if angle(&s.v, &m.v) > 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Angle between two unit vectors, stable for small angles.
fn angle(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    2.0 * (0.5 * d).min(1.0).asin()
}

/// Inverse iteration with the fixed shift `lambda`, which must exceed the
/// principal eigenvalue. Converges linearly.
pub fn fixed_shift_power(
    op: &dyn PositiveOperator,
    v0: &[f64],
    lambda: f64,
    stopping: &StoppingRule,
) -> Result<ConvergenceReport> {
    stopping.validate()?;
    let start = Instant::now();
    let v = positive_unit(v0, op)?;
    let image = op.apply(&v)?;
    let b = CwBounds::of_ratios(&image, &v)?;
    if !(lambda > b.lower) {
        return Err(Error::ShiftTooSmall { lambda });
    }
    let system = op
        .factor_shifted(lambda, ShiftRegion::AboveSpectrum)
        .map_err(|e| match e {
            Error::ShiftCollision { .. } | Error::Singular(_) => Error::ShiftTooSmall { lambda },
            other => other,
        })?;
    let mut stepper = FixedShift {
        op,
        system,
        state: IterationState::initial(b.upper, v, Some(image)),
    };
    let driver = Driver {
        op,
        rule: *stopping,
        record_trace: true,
        algorithm: Algorithm::FixedShift { shift: lambda },
        on_failure: OnFailure::ShiftTooSmall(lambda),
    };
    driver.run(&mut stepper, start)
}

/// Multiplicative power iteration; `λ⁽ⁿ⁾` is the upper CW bound of `vⁿ`.
pub fn plain_power(
    op: &dyn PositiveOperator,
    v0: &[f64],
    stopping: &StoppingRule,
) -> Result<ConvergenceReport> {
    stopping.validate()?;
    if stopping.criterion == Criterion::Sc2 {
        return Err(Error::UnsupportedCriterion {
            criterion: "sc2",
            algorithm: "power",
        });
    }
    let start = Instant::now();
    let v = positive_unit(v0, op)?;
    let image = op.apply(&v)?;
    let b = CwBounds::of_ratios(&image, &v)?;
    let mut stepper = Power {
        op,
        state: IterationState::initial(b.upper, v, Some(image)),
    };
    let driver = Driver {
        op,
        rule: *stopping,
        record_trace: true,
        algorithm: Algorithm::Power,
        on_failure: OnFailure::StopAtCollision,
    };
    if b.gap() <= DEGENERATE_START_RATIO * b.upper.abs() {
        return Ok(driver.finish(
            b.upper,
            &stepper.state,
            Vec::new(),
            StopReason::EigenvectorStart,
            start,
        ));
    }
    driver.run(&mut stepper, start)
}

/// Inverse iteration with the Rayleigh-quotient shift `λ⁽ⁿ⁾ = vⁿᵀ·op·vⁿ`.
///
/// Iterates need not stay positive and the limit need not be the principal
/// pair. Only [`Criterion::LambdaDiff`] and [`Criterion::Residual`] apply.
pub fn rayleigh_quotient_iteration(
    op: &dyn PositiveOperator,
    v0: &[f64],
    stopping: &StoppingRule,
) -> Result<ConvergenceReport> {
    stopping.validate()?;
    if matches!(stopping.criterion, Criterion::Sc1 | Criterion::Sc2) {
        return Err(Error::UnsupportedCriterion {
            criterion: stopping.criterion.name(),
            algorithm: "rayleigh",
        });
    }
    op.check_len(v0)?;
    let norm = norm2(v0);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Domain(
            "start vector must be nonzero and finite".into(),
        ));
    }
    let start = Instant::now();
    let v: Vec<f64> = v0.iter().map(|x| x / norm).collect();
    let image = op.apply(&v)?;
    let lambda = dot(&v, &image);
    let mut stepper = Rayleigh {
        op,
        state: IterationState::initial(lambda, v, Some(image)),
    };
    let driver = Driver {
        op,
        rule: *stopping,
        record_trace: true,
        algorithm: Algorithm::Rayleigh,
        on_failure: OnFailure::StopAtCollision,
    };
    driver.run(&mut stepper, start)
}
