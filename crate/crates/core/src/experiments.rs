//! Experiment drivers: accuracy tables on problems with closed-form
//! solutions, work-precision sweeps for adaptive runs, and coefficient
//! inspection reports. All output is deterministic.

use crate::collocation::{CollocationScheme, EmbeddedScheme};
use crate::error::{Error, Result};
use crate::integrator::{integrate_adaptive, integrate_fixed, ControllerConfig, Trajectory};
use crate::problems::OdeProblem;
use crate::reference::rk_reference;
use crate::serialize::fmt_f64;

/// Cells at or below this common-logarithm error level print as `--`
/// (machine-precision floor).
pub const NCD_FLOOR: f64 = -14.0;

/// Max over grid times (including the end point) of the componentwise
/// absolute error against the closed-form solution.
pub fn max_grid_error(problem: &OdeProblem, traj: &Trajectory) -> Result<f64> {
    if !problem.has_exact() {
        return Err(Error::MissingExactSolution);
    }
    let mut worst = 0.0_f64;
    let mut consider = |t: f64, y: &[f64]| {
        let (ye, _) = problem.exact_at(t).expect("checked above");
        for (a, b) in y.iter().zip(&ye) {
            worst = worst.max((a - b).abs());
        }
    };
    for state in &traj.states {
        consider(state.t, &state.y);
    }
    consider(traj.t_end, &traj.y_end);
    Ok(worst)
}

/// Common-logarithm accuracy table: one row per step size, one column per
/// method; entries are `log10` of the max-over-grid error.
#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub h_list: Vec<f64>,
    pub methods: Vec<String>,
    /// `ncd[i][j]` for step `h_list[i]` and method `methods[j]`.
    pub ncd: Vec<Vec<f64>>,
}

impl ConvergenceTable {
    pub fn cell_text(value: f64) -> String {
        if value <= NCD_FLOOR {
            "--".to_string()
        } else {
            format!("{value:.1}")
        }
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.methods.iter().map(|m| m.len()).collect();
        let cells: Vec<Vec<String>> = self
            .ncd
            .iter()
            .map(|row| row.iter().map(|&v| Self::cell_text(v)).collect())
            .collect();
        for row in &cells {
            for (j, cell) in row.iter().enumerate() {
                widths[j] = widths[j].max(cell.len());
            }
        }
        let h_width = self.h_list.len().max(2);
        let mut out = format!("{:<w$}", "h", w = 8.max(h_width));
        for (m, w) in self.methods.iter().zip(&widths) {
            out.push_str(&format!("  {m:>w$}"));
        }
        out.push('\n');
        for (i, row) in cells.iter().enumerate() {
            out.push_str(&format!(
                "{:<w$}",
                h_label(self.h_list[i]),
                w = 8.max(h_width)
            ));
            for (cell, w) in row.iter().zip(&widths) {
                out.push_str(&format!("  {cell:>w$}"));
            }
            out.push('\n');
        }
        out
    }

    /// CSV rendering with the same `--` convention.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h");
        for m in &self.methods {
            out.push(',');
            out.push_str(m);
        }
        out.push('\n');
        for (i, row) in self.ncd.iter().enumerate() {
            out.push_str(&h_label(self.h_list[i]));
            for &v in row {
                out.push(',');
                out.push_str(&Self::cell_text(v));
            }
            out.push('\n');
        }
        out
    }
}

/// Prints dyadic steps as `1/2^k`, anything else as a decimal.
fn h_label(h: f64) -> String {
    let k = -h.log2();
    let rounded = k.round();
    if k > 0.0 && (k - rounded).abs() < 1e-12 {
        format!("1/2^{}", rounded as i64)
    } else {
        format!("{h}")
    }
}

/// Fixed-step accuracy table over `h_list` for several methods on a problem
/// with a closed-form solution.
pub fn run_convergence_table(
    problem: &OdeProblem,
    methods: &[(String, CollocationScheme)],
    h_list: &[f64],
) -> Result<ConvergenceTable> {
    if !problem.has_exact() {
        return Err(Error::MissingExactSolution);
    }
    let mut ncd = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let mut row = Vec::with_capacity(methods.len());
        for (_, scheme) in methods {
            let traj = integrate_fixed(problem, problem.t0, problem.t_end, h, scheme)?;
            let err = max_grid_error(problem, &traj)?;
            row.push(err.log10());
        }
        ncd.push(row);
    }
    Ok(ConvergenceTable {
        h_list: h_list.to_vec(),
        methods: methods.iter().map(|(n, _)| n.clone()).collect(),
        ncd,
    })
}

/// One adaptive run at a tolerance: end-point error against the reference,
/// plus cost counters. `failed` rows keep the error NaN.
#[derive(Debug, Clone)]
pub struct WorkPrecisionRow {
    pub tol: f64,
    pub error: f64,
    pub nfe: u64,
    pub accepts: u64,
    pub rejects: u64,
    pub failed: bool,
}

/// Reference end values: the closed form when present, otherwise the
/// reference solver at tolerance 1e-12.
pub fn reference_end_values(problem: &OdeProblem) -> Result<Vec<f64>> {
    if let Some((y, _)) = problem.exact_at(problem.t_end) {
        return Ok(y);
    }
    let res = rk_reference(
        problem,
        problem.t0,
        &problem.y0,
        &problem.yp0,
        &[problem.t_end],
        1e-12,
    )?;
    Ok(res.values[0].1.clone())
}

/// Adaptive tolerance sweep. Row errors are the root-sum-square end-point
/// differences against the reference.
pub fn run_work_precision(
    problem: &OdeProblem,
    scheme: &CollocationScheme,
    embedded: &EmbeddedScheme,
    tol_list: &[f64],
) -> Result<Vec<WorkPrecisionRow>> {
    let reference = reference_end_values(problem)?;
    let mut rows = Vec::with_capacity(tol_list.len());
    for &tol in tol_list {
        let config = ControllerConfig::new(tol, embedded.scheme.step_order());
        match integrate_adaptive(
            problem,
            problem.t0,
            problem.t_end,
            &config,
            scheme,
            embedded,
        ) {
            Ok(traj) => {
                let error = traj
                    .y_end
                    .iter()
                    .zip(&reference)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                rows.push(WorkPrecisionRow {
                    tol,
                    error,
                    nfe: traj.stats.nfe,
                    accepts: traj.stats.accepts,
                    rejects: traj.stats.rejects,
                    failed: false,
                });
            }
            Err(_) => rows.push(WorkPrecisionRow {
                tol,
                error: f64::NAN,
                nfe: 0,
                accepts: 0,
                rejects: 0,
                failed: true,
            }),
        }
    }
    Ok(rows)
}

/// CSV rendering: `tol,error_at_tend,nfe,accepts,rejects,status`.
pub fn work_precision_csv(rows: &[WorkPrecisionRow]) -> String {
    let mut out = String::from("tol,error_at_tend,nfe,accepts,rejects,status\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(row.tol),
            if row.failed {
                "".to_string()
            } else {
                fmt_f64(row.error)
            },
            row.nfe,
            row.accepts,
            row.rejects,
            if row.failed { "failed" } else { "ok" }
        ));
    }
    out
}

/// Human-readable coefficient report: nodes, weights, stage matrices, orders,
/// defining residual, and the orthogonality integrals.
pub fn scheme_report(name: &str, scheme: &CollocationScheme) -> String {
    let mut out = String::new();
    let orth = scheme.orthogonality();
    out.push_str(&format!("method {name}\n"));
    out.push_str(&format!("stages               s = {}\n", scheme.s()));
    out.push_str(&format!(
        "step order           p = {}\n",
        scheme.step_order()
    ));
    out.push_str(&format!(
        "stage order          r = {}\n",
        scheme.stage_order()
    ));
    out.push_str(&format!(
        "defining residual    {}\n",
        fmt_f64(scheme.defining_residual())
    ));
    out.push_str(&format!(
        "orthogonality        r0 = {}, r1 = {}, rd = {} (order {})\n",
        fmt_f64(orth.r0),
        fmt_f64(orth.r1),
        fmt_f64(orth.r_double),
        orth.satisfied_order
    ));
    let vec_block = |label: &str, v: &[f64]| {
        let mut s = format!("{label} = [\n");
        for x in v {
            s.push_str(&format!("  {}\n", fmt_f64(*x)));
        }
        s.push_str("]\n");
        s
    };
    out.push_str(&vec_block("c", scheme.node_slice()));
    out.push_str(&vec_block("b", scheme.step_weights()));
    out.push_str(&vec_block("d", scheme.step_deriv_weights()));
    let mat_block = |label: &str, m: &crate::linalg::Mat| {
        let mut s = format!("{label} = [\n");
        for i in 0..m.rows() {
            let row: Vec<String> = m.row(i).iter().map(|&x| fmt_f64(x)).collect();
            s.push_str(&format!("  [{}]\n", row.join(", ")));
        }
        s.push_str("]\n");
        s
    };
    out.push_str(&mat_block("A", scheme.stage_weights()));
    out.push_str(&mat_block("B", scheme.stage_deriv_weights()));
    out
}
