//! Two-step integration: starting procedure, fixed and variable steps,
//! embedded-pair error estimation, the step-size controller, and dense
//! output.
//!
//! One step advances with the cached stage derivatives `F_n` of the current
//! step and then positions the next step's stages explicitly:
//!
//! ```text
//! y_{n+1}  = y_n + h y'_n + h^2 b'F_n        Y_{n+1}  = e y_{n+1} + h c y'_{n+1} + h^2 A F_n
//! y'_{n+1} = y'_n + h d'F_n                  Y'_{n+1} = e y'_{n+1} + h B F_n
//! ```
//!
//! so every attempted step costs exactly s right-hand side evaluations. With
//! a changed next step size the stage rows use `A(q)`, `B(q)` at the ratio
//! `q = h_next / h`.

use crate::collocation::{CollocationScheme, EmbeddedScheme};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::problems::OdeProblem;
use crate::reference::rk_reference;

/// Which difference the local error estimate uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LteMode {
    /// `||y - y_emb||_2`.
    PositionOnly,
    /// `sqrt(||y - y_emb||^2 + ||y' - y'_emb||^2)`.
    PositionAndDerivative,
}

/// Adaptive-run settings. Defaults follow the standard accept/reject rule:
/// a step is accepted when LTE <= tol, rejected steps halve, and accepted
/// steps propose `h * min(2, max(0.5, 0.8 (tol/LTE)^(1/(p_emb+1))))`.
#[derive(Debug, Clone)]
pub struct ControllerConfig {
    pub tol: f64,
    pub safety: f64,
    pub clamp_lo: f64,
    pub clamp_hi: f64,
    pub lte_mode: LteMode,
    /// Order of the embedded method (the exponent uses p_embedded + 1).
    pub p_embedded: usize,
    /// Initial step size; when absent, `(t_end - t0) * tol^(1/(p_emb+1))`
    /// clamped to `[1e-6, (t_end - t0)/10]`.
    pub h0: Option<f64>,
    pub max_consecutive_rejects: u32,
}

impl ControllerConfig {
    pub fn new(tol: f64, p_embedded: usize) -> Self {
        ControllerConfig {
            tol,
            safety: 0.8,
            clamp_lo: 0.5,
            clamp_hi: 2.0,
            lte_mode: LteMode::PositionOnly,
            p_embedded,
            h0: None,
            max_consecutive_rejects: 40,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidConfig("tol must be positive".into()));
        }
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return Err(Error::InvalidConfig("safety must lie in (0, 1)".into()));
        }
        if !(self.clamp_lo > 0.0 && self.clamp_lo <= 1.0 && self.clamp_hi >= 1.0) {
            return Err(Error::InvalidConfig(
                "clamps must satisfy 0 < lo <= 1 <= hi".into(),
            ));
        }
        Ok(())
    }
}

/// Integration state at time `t`: committed `(y, y')` plus the stage values
/// and cached stage derivatives for the step of size `h` about to be taken.
#[derive(Debug, Clone)]
pub struct StepState {
    pub t: f64,
    pub h: f64,
    pub y: Vec<f64>,
    pub yp: Vec<f64>,
    /// Stage positions at `t + c_i h`, one row per stage.
    pub stages_y: Mat,
    /// Stage first derivatives at `t + c_i h`.
    pub stages_yp: Mat,
    /// Cached `f(t + c_i h, Y_i, Y'_i)`.
    pub stage_f: Mat,
}

/// Cost counters for one run. `nfe` counts main-loop evaluations (exactly
/// s per attempted step); `start_nfe` counts the starting procedure's
/// reference-solver evaluations separately.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub nfe: u64,
    pub start_nfe: u64,
    pub accepts: u64,
    pub rejects: u64,
}

/// One attempted step: where it started, the size tried, and the verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepAttempt {
    pub t: f64,
    pub h: f64,
    pub accepted: bool,
}

/// Accepted step history plus the end-point values.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<StepState>,
    pub t_end: f64,
    pub y_end: Vec<f64>,
    pub yp_end: Vec<f64>,
    pub stats: RunStats,
    /// Every step size the run tried, in order (rejections included).
    pub attempts: Vec<StepAttempt>,
}

impl Trajectory {
    /// Grid times, including the end point.
    pub fn times(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self.states.iter().map(|s| s.t).collect();
        t.push(self.t_end);
        t
    }

    /// Continuous evaluation anywhere inside the integrated span.
    pub fn sample(&self, scheme: &CollocationScheme, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.states.is_empty() {
            return Err(Error::OutOfRangeXi(t));
        }
        let t0 = self.states[0].t;
        let span_tol = 1e-12 * (1.0 + t.abs().max(self.t_end.abs()));
        if t < t0 - span_tol || t > self.t_end + span_tol {
            return Err(Error::OutOfRangeXi(t));
        }
        // Last state whose start time is <= t.
        let idx = match self
            .states
            .binary_search_by(|s| s.t.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let state = &self.states[idx];
        let xi = ((t - state.t) / state.h).clamp(0.0, 1.0);
        dense_eval(state, scheme, xi)
    }

    /// CSV export: `t,y_1..y_k,yp_1..yp_k,h,accepted`. The terminal row
    /// carries `h = 0`.
    pub fn to_csv(&self) -> String {
        let k = self.y_end.len();
        let mut out = String::from("t");
        for j in 1..=k {
            out.push_str(&format!(",y_{j}"));
        }
        for j in 1..=k {
            out.push_str(&format!(",yp_{j}"));
        }
        out.push_str(",h,accepted\n");
        let mut row = |t: f64, y: &[f64], yp: &[f64], h: f64| {
            out.push_str(&crate::serialize::fmt_f64(t));
            for v in y.iter().chain(yp) {
                out.push(',');
                out.push_str(&crate::serialize::fmt_f64(*v));
            }
            out.push(',');
            out.push_str(&crate::serialize::fmt_f64(h));
            out.push_str(",1\n");
        };
        for s in &self.states {
            row(s.t, &s.y, &s.yp, s.h);
        }
        row(self.t_end, &self.y_end, &self.yp_end, 0.0);
        out
    }

    /// Stats export: `{"nfe": .., "accepts": .., "rejects": .., "start_nfe": ..}`.
    pub fn stats_json(&self) -> String {
        format!(
            "{{\"nfe\": {}, \"accepts\": {}, \"rejects\": {}, \"start_nfe\": {}}}",
            self.stats.nfe, self.stats.accepts, self.stats.rejects, self.stats.start_nfe
        )
    }
}

fn check_finite(t: f64, values: &[&[f64]]) -> Result<()> {
    for chunk in values {
        if chunk.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { t });
        }
    }
    Ok(())
}

/// `w' F` across stage rows: returns the k-vector `sum_i w_i F[i][:]`.
fn weighted_stage_sum(f: &Mat, w: &[f64]) -> Vec<f64> {
    let k = f.cols();
    let mut out = vec![0.0; k];
    for (i, &wi) in w.iter().enumerate() {
        let row = f.row(i);
        for j in 0..k {
            out[j] += wi * row[j];
        }
    }
    out
}

/// Same as [`weighted_stage_sum`] over a subset of stage rows.
fn weighted_subset_sum(f: &Mat, w: &[f64], indices: &[usize]) -> Vec<f64> {
    let k = f.cols();
    let mut out = vec![0.0; k];
    for (&wi, &idx) in w.iter().zip(indices) {
        let row = f.row(idx);
        for j in 0..k {
            out[j] += wi * row[j];
        }
    }
    out
}

/// End-of-step values from the cached stage derivatives.
fn advance(state: &StepState, scheme: &CollocationScheme) -> (Vec<f64>, Vec<f64>) {
    let h = state.h;
    let bf = weighted_stage_sum(&state.stage_f, scheme.step_weights());
    let df = weighted_stage_sum(&state.stage_f, scheme.step_deriv_weights());
    let y1: Vec<f64> = state
        .y
        .iter()
        .zip(&state.yp)
        .zip(&bf)
        .map(|((&y, &yp), &s)| y + h * yp + h * h * s)
        .collect();
    let yp1: Vec<f64> = state
        .yp
        .iter()
        .zip(&df)
        .map(|(&yp, &s)| yp + h * s)
        .collect();
    (y1, yp1)
}

/// Embedded end-of-step values reusing the parent's stage derivatives
/// (no extra evaluations).
fn advance_embedded(state: &StepState, embedded: &EmbeddedScheme) -> (Vec<f64>, Vec<f64>) {
    let h = state.h;
    let bf = weighted_subset_sum(
        &state.stage_f,
        embedded.scheme.step_weights(),
        &embedded.parent_indices,
    );
    let df = weighted_subset_sum(
        &state.stage_f,
        embedded.scheme.step_deriv_weights(),
        &embedded.parent_indices,
    );
    let y1: Vec<f64> = state
        .y
        .iter()
        .zip(&state.yp)
        .zip(&bf)
        .map(|((&y, &yp), &s)| y + h * yp + h * h * s)
        .collect();
    let yp1: Vec<f64> = state
        .yp
        .iter()
        .zip(&df)
        .map(|(&yp, &s)| yp + h * s)
        .collect();
    (y1, yp1)
}

/// Positions the stages of the next step (size `h_new`, anchored at `t_new`)
/// from the previous step's cached derivatives `f_prev` using the supplied
/// stage matrices, then evaluates the s fresh stage derivatives.
#[allow(clippy::too_many_arguments)]
fn build_stages(
    problem: &OdeProblem,
    scheme: &CollocationScheme,
    t_new: f64,
    y_new: &[f64],
    yp_new: &[f64],
    h_new: f64,
    aq: &Mat,
    bq: &Mat,
    f_prev: &Mat,
) -> Result<(Mat, Mat, Mat)> {
    let s = scheme.s();
    let k = y_new.len();
    let c = scheme.node_slice();
    let af = aq.mul(f_prev);
    let bf = bq.mul(f_prev);
    let mut stages_y = Mat::zeros(s, k);
    let mut stages_yp = Mat::zeros(s, k);
    let mut stage_f = Mat::zeros(s, k);
    for i in 0..s {
        for j in 0..k {
            stages_y[(i, j)] = y_new[j] + h_new * c[i] * yp_new[j] + h_new * h_new * af[(i, j)];
            stages_yp[(i, j)] = yp_new[j] + h_new * bf[(i, j)];
        }
        check_finite(t_new, &[stages_y.row(i), stages_yp.row(i)])?;
        let (ys, yps) = (stages_y.row(i).to_vec(), stages_yp.row(i).to_vec());
        problem.eval(t_new + c[i] * h_new, &ys, &yps, stage_f.row_mut(i));
    }
    Ok((stages_y, stages_yp, stage_f))
}

fn start_with_cost(
    problem: &OdeProblem,
    t0: f64,
    y0: &[f64],
    yp0: &[f64],
    h0: f64,
    scheme: &CollocationScheme,
) -> Result<(StepState, u64)> {
    if h0 <= 0.0 || !h0.is_finite() {
        return Err(Error::InvalidConfig(
            "initial step size must be positive".into(),
        ));
    }
    let k = problem.dim();
    if y0.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: y0.len(),
        });
    }
    if yp0.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: yp0.len(),
        });
    }
    let s = scheme.s();
    let c = scheme.node_slice();

    // Stage values accurate to O(h^(s+2)) and never worse than 1e-13 of the
    // data scale, comfortably inside the accuracy the two-step recursion
    // preserves.
    let mut scale = 1.0_f64;
    for v in y0.iter().chain(yp0) {
        scale = scale.max(v.abs());
    }
    let target = (1e-14 * scale).max((0.01 * h0.powi(s as i32 + 2)).min(1e-13 * scale));

    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&i, &j| c[i].partial_cmp(&c[j]).unwrap());
    let targets: Vec<f64> = order.iter().map(|&i| t0 + c[i] * h0).collect();
    let oracle = rk_reference(problem, t0, y0, yp0, &targets, target).map_err(|e| match e {
        Error::ToleranceUnreachable { est } => Error::OracleFailure { est },
        other => other,
    })?;

    let mut stages_y = Mat::zeros(s, k);
    let mut stages_yp = Mat::zeros(s, k);
    let mut stage_f = Mat::zeros(s, k);
    for (pos, &i) in order.iter().enumerate() {
        let (_, y, yp) = &oracle.values[pos];
        stages_y.row_mut(i).copy_from_slice(y);
        stages_yp.row_mut(i).copy_from_slice(yp);
    }
    for (i, &ci) in c.iter().enumerate() {
        let (ys, yps) = (stages_y.row(i).to_vec(), stages_yp.row(i).to_vec());
        problem.eval(t0 + ci * h0, &ys, &yps, stage_f.row_mut(i));
    }
    let state = StepState {
        t: t0,
        h: h0,
        y: y0.to_vec(),
        yp: yp0.to_vec(),
        stages_y,
        stages_yp,
        stage_f,
    };
    Ok((state, oracle.nfe))
}

/// Starting procedure: stage values at `t0 + c_i h0` from the reference
/// solver (backward when a node is negative), with the stage derivative
/// cache populated.
pub fn start(
    problem: &OdeProblem,
    t0: f64,
    y0: &[f64],
    yp0: &[f64],
    h0: f64,
    scheme: &CollocationScheme,
) -> Result<StepState> {
    start_with_cost(problem, t0, y0, yp0, h0, scheme).map(|(state, _)| state)
}

/// One fixed step: `h` must equal the step size the state's stages were
/// positioned for. Returns the full next state, stage derivatives included.
pub fn step_fixed(
    problem: &OdeProblem,
    state: &StepState,
    scheme: &CollocationScheme,
    h: f64,
) -> Result<StepState> {
    if (h - state.h).abs() > 1e-12 * state.h.abs() {
        return Err(Error::InvalidConfig(
            "fixed step must match the step the stages were positioned for".into(),
        ));
    }
    step_with_ratio(problem, state, scheme, state.h)
}

/// One variable step: advances over the state's own step `h_n`, then
/// positions the next stages for `h_next`. The ratio `h_next / h_n` must lie
/// inside the controller clamp interval [0.5, 2].
pub fn step_variable(
    problem: &OdeProblem,
    state: &StepState,
    scheme: &CollocationScheme,
    h_next: f64,
) -> Result<StepState> {
    let q = h_next / state.h;
    if q <= 0.0 || !q.is_finite() {
        return Err(Error::NonPositiveRatio(q));
    }
    if !(0.5..=2.0).contains(&q) {
        return Err(Error::RatioOutOfRange {
            q,
            lo: 0.5,
            hi: 2.0,
        });
    }
    step_with_ratio(problem, state, scheme, h_next)
}

fn step_with_ratio(
    problem: &OdeProblem,
    state: &StepState,
    scheme: &CollocationScheme,
    h_next: f64,
) -> Result<StepState> {
    let (y1, yp1) = advance(state, scheme);
    let t1 = state.t + state.h;
    check_finite(t1, &[&y1, &yp1])?;
    let q = h_next / state.h;
    let (aq, bq) = scheme.variable_coefficients_scaled(q)?;
    let (stages_y, stages_yp, stage_f) = build_stages(
        problem,
        scheme,
        t1,
        &y1,
        &yp1,
        h_next,
        &aq,
        &bq,
        &state.stage_f,
    )?;
    Ok(StepState {
        t: t1,
        h: h_next,
        y: y1,
        yp: yp1,
        stages_y,
        stages_yp,
        stage_f,
    })
}

/// Local truncation error from the main and embedded end-of-step values.
pub fn estimate_lte(
    main: (&[f64], &[f64]),
    embedded: (&[f64], &[f64]),
    mode: LteMode,
) -> Result<f64> {
    let (y, yp) = main;
    let (ye, ype) = embedded;
    if y.len() != ye.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: ye.len(),
        });
    }
    if yp.len() != ype.len() {
        return Err(Error::DimensionMismatch {
            expected: yp.len(),
            got: ype.len(),
        });
    }
    let pos_sq: f64 = y.iter().zip(ye).map(|(a, b)| (a - b) * (a - b)).sum();
    match mode {
        LteMode::PositionOnly => Ok(pos_sq.sqrt()),
        LteMode::PositionAndDerivative => {
            let der_sq: f64 = yp.iter().zip(ype).map(|(a, b)| (a - b) * (a - b)).sum();
            Ok((pos_sq + der_sq).sqrt())
        }
    }
}

/// Continuous extension inside the step `[t, t + h]` at fraction `xi`.
pub fn dense_eval(
    state: &StepState,
    scheme: &CollocationScheme,
    xi: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (bxi, dxi) = scheme.dense_weights(xi)?;
    let hxi = xi * state.h;
    let bf = weighted_stage_sum(&state.stage_f, &bxi);
    let df = weighted_stage_sum(&state.stage_f, &dxi);
    let y: Vec<f64> = state
        .y
        .iter()
        .zip(&state.yp)
        .zip(&bf)
        .map(|((&y, &yp), &s)| y + hxi * yp + hxi * hxi * s)
        .collect();
    let yp: Vec<f64> = state
        .yp
        .iter()
        .zip(&df)
        .map(|(&yp, &s)| yp + hxi * s)
        .collect();
    Ok((y, yp))
}

/// Neumaier two-sum: adds `inc` into `(sum, comp)` keeping the rounding
/// residual in `comp`.
#[inline]
fn comp_add(sum: &mut f64, comp: &mut f64, inc: f64) {
    let inc = inc + *comp;
    let t = *sum + inc;
    *comp = if sum.abs() >= inc.abs() {
        (*sum - t) + inc
    } else {
        (inc - t) + *sum
    };
    *sum = t;
}

/// Fixed-step run over `[t0, t_end]` with an exact grid landing. Initial data
/// comes from the problem. Main-loop cost is exactly `s * steps` evaluations.
///
/// The committed `(y, y')` values accumulate with compensated summation so
/// that roundoff grows with the increment scale `h |y'|` rather than `|y|`;
/// high-order methods reach their accuracy floor noticeably later.
pub fn integrate_fixed(
    problem: &OdeProblem,
    t0: f64,
    t_end: f64,
    h: f64,
    scheme: &CollocationScheme,
) -> Result<Trajectory> {
    if h <= 0.0 || !h.is_finite() || t_end <= t0 {
        return Err(Error::GridMismatch);
    }
    let ratio = (t_end - t0) / h;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-8 {
        return Err(Error::GridMismatch);
    }
    let n = n as u64;
    let s = scheme.s() as u64;
    let k = problem.dim();

    let (state0, start_nfe) = start_with_cost(problem, t0, &problem.y0, &problem.yp0, h, scheme)?;
    let mut stats = RunStats {
        nfe: s,
        start_nfe,
        accepts: 0,
        rejects: 0,
    };
    let mut states = Vec::with_capacity(n as usize);
    states.push(state0);
    let mut attempts = Vec::with_capacity(n as usize);
    let mut comp_y = vec![0.0; k];
    let mut comp_yp = vec![0.0; k];

    for step in 1..=n {
        let cur = states.last().unwrap();
        let bf = weighted_stage_sum(&cur.stage_f, scheme.step_weights());
        let df = weighted_stage_sum(&cur.stage_f, scheme.step_deriv_weights());
        let mut y1 = cur.y.clone();
        let mut yp1 = cur.yp.clone();
        for j in 0..k {
            comp_add(&mut y1[j], &mut comp_y[j], h * cur.yp[j] + h * h * bf[j]);
            comp_add(&mut yp1[j], &mut comp_yp[j], h * df[j]);
        }
        let t1 = if step == n {
            t_end
        } else {
            t0 + h * step as f64
        };
        check_finite(t1, &[&y1, &yp1])?;
        stats.accepts += 1;
        attempts.push(StepAttempt {
            t: cur.t,
            h,
            accepted: true,
        });
        if step == n {
            return Ok(Trajectory {
                states,
                t_end,
                y_end: y1,
                yp_end: yp1,
                stats,
                attempts,
            });
        }
        let (stages_y, stages_yp, stage_f) = build_stages(
            problem,
            scheme,
            t1,
            &y1,
            &yp1,
            h,
            scheme.stage_weights(),
            scheme.stage_deriv_weights(),
            &cur.stage_f,
        )?;
        stats.nfe += s;
        states.push(StepState {
            t: t1,
            h,
            y: y1,
            yp: yp1,
            stages_y,
            stages_yp,
            stage_f,
        });
    }
    unreachable!("loop returns on the final step");
}

/// Adaptive run with the embedded-pair error estimate. A step is accepted
/// when LTE <= tol; rejected steps halve and reposition their stages from the
/// previous step's cache (the very first step restarts instead). The final
/// step is truncated to land exactly on `t_end`.
pub fn integrate_adaptive(
    problem: &OdeProblem,
    t0: f64,
    t_end: f64,
    config: &ControllerConfig,
    scheme: &CollocationScheme,
    embedded: &EmbeddedScheme,
) -> Result<Trajectory> {
    config.validate()?;
    if t_end <= t0 {
        return Err(Error::InvalidConfig("t_end must exceed t0".into()));
    }
    if embedded.parent_indices.iter().any(|&i| i >= scheme.s()) {
        return Err(Error::BadEmbeddedIndices);
    }
    let span = t_end - t0;
    let exponent = 1.0 / (config.p_embedded as f64 + 1.0);
    let h0 = config
        .h0
        .unwrap_or_else(|| (span * config.tol.powf(exponent)).clamp(1e-6, span / 10.0))
        .min(span);
    let s = scheme.s() as u64;
    let land_tol = 1e-12 * t_end.abs().max(1.0);

    let (first, start_nfe) = start_with_cost(problem, t0, &problem.y0, &problem.yp0, h0, scheme)?;
    let mut stats = RunStats {
        nfe: s,
        start_nfe,
        accepts: 0,
        rejects: 0,
    };
    let mut states: Vec<StepState> = Vec::new();
    let mut attempts: Vec<StepAttempt> = Vec::new();
    let mut cur = first;
    let mut consecutive_rejects = 0u32;

    loop {
        let (y1, yp1) = advance(&cur, scheme);
        let t1 = cur.t + cur.h;
        check_finite(t1, &[&y1, &yp1])?;
        let (ye, ype) = advance_embedded(&cur, embedded);
        let lte = estimate_lte((&y1, &yp1), (&ye, &ype), config.lte_mode)?;

        attempts.push(StepAttempt {
            t: cur.t,
            h: cur.h,
            accepted: lte <= config.tol,
        });
        if lte <= config.tol {
            consecutive_rejects = 0;
            stats.accepts += 1;
            let landed = t1 >= t_end - land_tol;
            if landed {
                states.push(cur);
                return Ok(Trajectory {
                    states,
                    t_end,
                    y_end: y1,
                    yp_end: yp1,
                    stats,
                    attempts,
                });
            }
            let factor = if lte == 0.0 {
                config.clamp_hi
            } else {
                (config.safety * (config.tol / lte).powf(exponent))
                    .clamp(config.clamp_lo, config.clamp_hi)
            };
            let mut h_next = cur.h * factor;
            let remaining = t_end - t1;
            if h_next >= remaining {
                h_next = remaining;
            }
            let q = h_next / cur.h;
            let (aq, bq) = scheme.variable_coefficients_scaled(q)?;
            let (stages_y, stages_yp, stage_f) = build_stages(
                problem,
                scheme,
                t1,
                &y1,
                &yp1,
                h_next,
                &aq,
                &bq,
                &cur.stage_f,
            )?;
            stats.nfe += s;
            let next = StepState {
                t: t1,
                h: h_next,
                y: y1,
                yp: yp1,
                stages_y,
                stages_yp,
                stage_f,
            };
            states.push(std::mem::replace(&mut cur, next));
        } else {
            stats.rejects += 1;
            consecutive_rejects += 1;
            if consecutive_rejects > config.max_consecutive_rejects {
                return Err(Error::MaxRejections { t: cur.t });
            }
            let h_half = cur.h / 2.0;
            match states.last() {
                Some(prev) => {
                    let q = h_half / prev.h;
                    let (aq, bq) = scheme.variable_coefficients_scaled(q)?;
                    let (stages_y, stages_yp, stage_f) = build_stages(
                        problem,
                        scheme,
                        cur.t,
                        &cur.y,
                        &cur.yp,
                        h_half,
                        &aq,
                        &bq,
                        &prev.stage_f,
                    )?;
                    stats.nfe += s;
                    cur.h = h_half;
                    cur.stages_y = stages_y;
                    cur.stages_yp = stages_yp;
                    cur.stage_f = stage_f;
                }
                None => {
                    // First step: restart the starting procedure at h/2.
                    let (state, extra) =
                        start_with_cost(problem, t0, &problem.y0, &problem.yp0, h_half, scheme)?;
                    stats.start_nfe += extra;
                    stats.nfe += s;
                    cur = state;
                }
            }
        }
    }
}
