//! Reference solutions on the first-order reformulation `(y, y')' = (y', f)`.
//!
//! A classical six-stage order-5 explicit Runge-Kutta formula (the
//! higher-order half of the Fehlberg 4(5) pair) is stepped with fixed
//! substeps; accuracy is certified a posteriori by halving the substep count
//! until the Richardson difference between the two runs is below tolerance.
//! Used for starting stage values, for problems without a closed form, and
//! for cross-validation.

use crate::error::{Error, Result};
use crate::problems::OdeProblem;

const STAGES: usize = 6;

const C: [f64; STAGES] = [0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5];

const A: [[f64; 5]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [
        -8.0 / 27.0,
        2.0,
        -3544.0 / 2565.0,
        1859.0 / 4104.0,
        -11.0 / 40.0,
    ],
];

const B: [f64; STAGES] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];

/// Result of a reference integration: values at the requested targets, the
/// worst posterior Richardson error estimate, and cost counters.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub values: Vec<(f64, Vec<f64>, Vec<f64>)>,
    pub est_error: f64,
    pub substeps_used: u64,
    /// Right-hand side evaluations consumed (both trial runs included).
    pub nfe: u64,
}

/// One fixed-substep run from `(t, y, yp)` to `t + span` with `n` substeps.
/// Returns the end state; increments `nfe`.
fn run_segment(
    problem: &OdeProblem,
    t: f64,
    y: &[f64],
    yp: &[f64],
    span: f64,
    n: u64,
    nfe: &mut u64,
) -> (Vec<f64>, Vec<f64>) {
    let k = problem.dim();
    let h = span / n as f64;
    let mut y = y.to_vec();
    let mut yp = yp.to_vec();
    // Stage slopes for the doubled system: ky = y-part, kp = y'-part.
    let mut ky = vec![vec![0.0; k]; STAGES];
    let mut kp = vec![vec![0.0; k]; STAGES];
    let mut ys = vec![0.0; k];
    let mut yps = vec![0.0; k];
    for step in 0..n {
        let tn = t + span * step as f64 / n as f64;
        for i in 0..STAGES {
            for j in 0..k {
                let mut ay = y[j];
                let mut ap = yp[j];
                for (m, a) in A[i][..i.min(5)].iter().enumerate() {
                    ay += h * a * ky[m][j];
                    ap += h * a * kp[m][j];
                }
                ys[j] = ay;
                yps[j] = ap;
            }
            ky[i].copy_from_slice(&yps);
            problem.eval(tn + C[i] * h, &ys, &yps, &mut kp[i]);
            *nfe += 1;
        }
        for j in 0..k {
            let mut dy = 0.0;
            let mut dp = 0.0;
            for i in 0..STAGES {
                dy += B[i] * ky[i][j];
                dp += B[i] * kp[i][j];
            }
            y[j] += h * dy;
            yp[j] += h * dp;
        }
    }
    (y, yp)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc: f64, (x, y)| acc.max((x - y).abs()))
}

/// Integrates from `(t_from, y, yp)` to each target time (sorted ascending;
/// targets may lie before `t_from`, in which case that part runs backward).
/// Each segment's substep count is doubled until the Richardson estimate
/// `|y_n - y_2n| / 31` is below `tol`.
pub fn rk_reference(
    problem: &OdeProblem,
    t_from: f64,
    y: &[f64],
    yp: &[f64],
    targets: &[f64],
    tol: f64,
) -> Result<OracleResult> {
    assert!(
        targets.windows(2).all(|w| w[0] <= w[1]),
        "targets must be sorted"
    );
    let mut values: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::with_capacity(targets.len());
    let mut worst_est = 0.0_f64;
    let mut substeps = 0u64;
    let mut nfe = 0u64;

    // Walk backward targets in descending order, then forward ones ascending.
    let backward: Vec<f64> = targets
        .iter()
        .copied()
        .filter(|&t| t < t_from)
        .rev()
        .collect();
    let forward: Vec<f64> = targets.iter().copied().filter(|&t| t >= t_from).collect();

    for chain in [backward, forward] {
        let mut tc = t_from;
        let mut yc = y.to_vec();
        let mut ypc = yp.to_vec();
        for target in chain {
            let span = target - tc;
            if span == 0.0 {
                values.push((target, yc.clone(), ypc.clone()));
                continue;
            }
            let mut n = (span.abs() / 0.1).ceil().max(1.0) as u64;
            let mut coarse = run_segment(problem, tc, &yc, &ypc, span, n, &mut nfe);
            let mut halvings = 0;
            loop {
                let fine = run_segment(problem, tc, &yc, &ypc, span, 2 * n, &mut nfe);
                let est =
                    max_abs_diff(&coarse.0, &fine.0).max(max_abs_diff(&coarse.1, &fine.1)) / 31.0;
                if est <= tol {
                    worst_est = worst_est.max(est);
                    substeps += 2 * n;
                    coarse = fine;
                    break;
                }
                halvings += 1;
                if halvings > 30 {
                    return Err(Error::ToleranceUnreachable { est });
                }
                n *= 2;
                coarse = fine;
            }
            yc = coarse.0;
            ypc = coarse.1;
            tc = target;
            values.push((target, yc.clone(), ypc.clone()));
        }
    }
    values.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(OracleResult {
        values,
        est_error: worst_est,
        substeps_used: substeps,
        nfe,
    })
}

/// Closed-form `(y, y')` at `t` when the problem carries one.
pub fn evaluate_exact(problem: &OdeProblem, t: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    problem.exact_at(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{line_problem, OdeProblem};
    use approx::assert_abs_diff_eq;

    fn free_motion() -> OdeProblem {
        OdeProblem::new("free", 1, 0.0, 1.0, vec![1.0], vec![2.0], |_, _, _, out| {
            out[0] = 0.0
        })
    }

    #[test]
    fn exact_on_linear_motion() {
        let p = free_motion();
        let res = rk_reference(&p, 0.0, &[1.0], &[2.0], &[0.5, 2.0], 1e-13).unwrap();
        assert_abs_diff_eq!(res.values[0].1[0], 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(res.values[1].1[0], 5.0, epsilon = 1e-13);
        assert_abs_diff_eq!(res.values[1].2[0], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn line_targets_match_closed_form() {
        let p = line_problem(2.0, 2.0, 10.0);
        let res = rk_reference(&p, 0.0, &[2.0], &[-1.0], &[1.0, 2.0], 1e-12).unwrap();
        for (t, y, yp) in &res.values {
            let (ye, ype) = p.exact_at(*t).unwrap();
            assert_abs_diff_eq!(y[0], ye[0], epsilon = 1e-11);
            assert_abs_diff_eq!(yp[0], ype[0], epsilon = 1e-11);
        }
    }

    #[test]
    fn backward_target_matches_closed_form() {
        let p = line_problem(2.0, 2.0, 10.0);
        let res = rk_reference(&p, 0.0, &[2.0], &[-1.0], &[-0.1, 0.2], 1e-12).unwrap();
        assert_eq!(res.values.len(), 2);
        let (t, y, _) = &res.values[0];
        assert_abs_diff_eq!(*t, -0.1, epsilon = 0.0);
        let (ye, _) = p.exact_at(-0.1).unwrap();
        assert_abs_diff_eq!(y[0], ye[0], epsilon = 1e-11);
    }

    #[test]
    fn order_five_convergence_on_line() {
        // Fixed-substep runs over [0, 1]; the end-point error must shrink by
        // about 2^5 per doubling.
        let p = line_problem(2.0, 2.0, 10.0);
        let (ye, _) = p.exact_at(1.0).unwrap();
        let mut errs = Vec::new();
        for n in [4u64, 8, 16, 32] {
            let mut nfe = 0;
            let (y, _) = run_segment(&p, 0.0, &[2.0], &[-1.0], 1.0, n, &mut nfe);
            errs.push((y[0] - ye[0]).abs());
        }
        let mut slopes = Vec::new();
        for w in errs.windows(2) {
            slopes.push((w[0] / w[1]).log2());
        }
        let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
        assert!((mean - 5.0).abs() < 0.3, "order slope {mean}");
    }

    #[test]
    fn deterministic_bitwise() {
        let p = line_problem(2.0, 2.0, 10.0);
        let a = rk_reference(&p, 0.0, &[2.0], &[-1.0], &[3.0], 1e-10).unwrap();
        let b = rk_reference(&p, 0.0, &[2.0], &[-1.0], &[3.0], 1e-10).unwrap();
        assert_eq!(a.values[0].1[0].to_bits(), b.values[0].1[0].to_bits());
        assert_eq!(a.nfe, b.nfe);
    }

    #[test]
    fn evaluate_exact_present_and_absent() {
        let line = line_problem(2.0, 2.0, 10.0);
        let (y, _) = evaluate_exact(&line, 0.0).unwrap();
        assert_abs_diff_eq!(y[0], 2.0, epsilon = 0.0);
        let half_pi = std::f64::consts::FRAC_PI_2;
        let (y, _) = evaluate_exact(&line, half_pi).unwrap();
        assert_abs_diff_eq!(y[0], -1.0, epsilon = 1e-15);
        let vand = crate::problems::vand_problem(1.0);
        assert!(evaluate_exact(&vand, 1.0).is_none());
    }
}
