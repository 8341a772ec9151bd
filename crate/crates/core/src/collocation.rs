//! Coefficient derivation for generalized explicit pseudo two-step
//! Runge-Kutta-Nystrom (GEPTRKN) collocation methods.
//!
//! An s-stage method is determined by s distinct collocation nodes `c`. The
//! weight vectors `b`, `d` and the stage matrices `A`, `B` are the unique
//! solutions of four Vandermonde-type linear systems:
//!
//! ```text
//! (k+2)(k+1) b'c^k = 1            (k+1) d'c^k = 1
//! (k+2)(k+1) A (c-e)^k = c^(k+2)  (k+1) B (c-e)^k = c^(k+1)      k = 0..s-1
//! ```
//!
//! with vector powers taken elementwise and `e` the all-ones vector. The step
//! order is s, s+1, or s+2 depending on which orthogonality integrals of the
//! node polynomial prod(xi - c_i) vanish; those integrals are evaluated here
//! exactly through monomial expansion, never by quadrature.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Minimum allowed pairwise node gap.
pub const MIN_NODE_GAP: f64 = 1e-12;

/// Residual threshold above which a coefficient solve is reported unusable.
pub const SOLVE_RESIDUAL_LIMIT: f64 = 1e-8;

/// Tolerance for classifying the orthogonality integrals as zero.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// A validated set of distinct collocation nodes. Nodes may lie outside
/// [0, 1]; the step formulas only require pairwise distinctness.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    c: Vec<f64>,
}

impl NodeSet {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::EmptyNodeSet);
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonDistinctNodes { gap: f64::NAN });
        }
        let mut min_gap = f64::INFINITY;
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                min_gap = min_gap.min((c[i] - c[j]).abs());
            }
        }
        if c.len() > 1 && min_gap <= MIN_NODE_GAP {
            return Err(Error::NonDistinctNodes { gap: min_gap });
        }
        Ok(NodeSet { c })
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }
}

/// Monomial coefficients (constant first, leading coefficient 1) of the node
/// polynomial `prod_i (xi - c_i)`.
pub fn expand_node_polynomial(nodes: &NodeSet) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for &ci in nodes.as_slice() {
        // Multiply by (xi - ci).
        let mut next = vec![0.0; coeffs.len() + 1];
        for (k, &a) in coeffs.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= ci * a;
        }
        coeffs = next;
    }
    coeffs
}

/// The orthogonality integrals of the node polynomial and the step order they
/// certify.
///
/// * `r0` = integral of P over [0, 1]
/// * `r1` = integral of xi * P over [0, 1]
/// * `r_double` = double integral of P, outer over t in [0, 1], inner over [0, 1 + t]
///
/// All three zero (within tolerance) certifies step order s + 2; `r0` alone
/// certifies s + 1; otherwise the generic order s holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalityReport {
    pub r0: f64,
    pub r1: f64,
    pub r_double: f64,
    pub satisfied_order: usize,
}

impl OrthogonalityReport {
    pub fn max_residual(&self) -> f64 {
        self.r0.abs().max(self.r1.abs()).max(self.r_double.abs())
    }
}

/// Evaluates the orthogonality integrals exactly (closed-form monomial
/// integration of the expanded node polynomial).
pub fn orthogonality_residuals(nodes: &NodeSet) -> OrthogonalityReport {
    let s = nodes.len();
    let coeffs = expand_node_polynomial(nodes);
    let mut r0 = 0.0;
    let mut r1 = 0.0;
    let mut r_double = 0.0;
    for (k, &a) in coeffs.iter().enumerate() {
        let kf = k as f64;
        r0 += a / (kf + 1.0);
        r1 += a / (kf + 2.0);
        // inner integral of xi^k from 0 to x is x^(k+1)/(k+1); integrating
        // that over x in [1, 2] gives (2^(k+2) - 1)/((k+1)(k+2)).
        r_double += a * (2f64.powi(k as i32 + 2) - 1.0) / ((kf + 1.0) * (kf + 2.0));
    }
    let satisfied_order = if r0.abs().max(r1.abs()).max(r_double.abs()) <= ORTHOGONALITY_TOL {
        s + 2
    } else if r0.abs() <= ORTHOGONALITY_TOL {
        s + 1
    } else {
        s
    };
    OrthogonalityReport {
        r0,
        r1,
        r_double,
        satisfied_order,
    }
}

/// Vandermonde matrix with rows indexed by points: `V[i][k] = x_i^k`,
/// k = 0..s-1 (with `x^0 = 1` for every x, including 0).
fn vandermonde(points: &[f64]) -> Mat {
    let s = points.len();
    let mut v = Mat::zeros(s, s);
    for (i, &x) in points.iter().enumerate() {
        let mut p = 1.0;
        for k in 0..s {
            v[(i, k)] = p;
            p *= x;
        }
    }
    v
}

/// One GEPTRKN method: nodes plus the derived weight vectors and stage
/// matrices, with the orthogonality-certified step order. Also carries the
/// diagonal-scaling factors used to update the stage matrices cheaply when
/// the step size changes.
#[derive(Debug, Clone)]
pub struct CollocationScheme {
    nodes: NodeSet,
    stage_weights: Mat, // A: new stage positions from previous stage derivatives
    stage_deriv_weights: Mat, // B: new stage first derivatives
    step_weights: Vec<f64>, // b: end-of-step position update
    step_deriv_weights: Vec<f64>, // d: end-of-step derivative update
    step_order: usize,
    derivation_residual: f64,
    orthogonality: OrthogonalityReport,
    // Factorization caches: A(q) = w_pos * Diag(1, q, .., q^(s-1)) * g_pos and
    // B(q) = w_der * Diag(...) * g_der.
    w_pos: Mat,
    w_der: Mat,
    g_pos: Mat,
    g_der: Mat,
}

/// Derives the full coefficient set from a node set; alias for
/// [`CollocationScheme::from_nodes`].
pub fn derive_coefficients(nodes: &NodeSet) -> Result<CollocationScheme> {
    CollocationScheme::from_nodes(nodes.clone())
}

impl CollocationScheme {
    pub fn from_nodes(nodes: NodeSet) -> Result<Self> {
        let s = nodes.len();
        let c = nodes.as_slice();

        let vc = vandermonde(c);
        let vc_t = vc.transpose();
        let shifted: Vec<f64> = c.iter().map(|&x| x - 1.0).collect();
        let vs = vandermonde(&shifted);
        let vs_t = vs.transpose();

        let rhs_b: Vec<f64> = (0..s).map(|k| 1.0 / (((k + 2) * (k + 1)) as f64)).collect();
        let rhs_d: Vec<f64> = (0..s).map(|k| 1.0 / ((k + 1) as f64)).collect();
        let step_weights = linalg::solve(&vc_t, &rhs_b)?;
        let step_deriv_weights = linalg::solve(&vc_t, &rhs_d)?;

        // Column k of the right-hand side for A is c^(k+2)/((k+2)(k+1)); for
        // B it is c^(k+1)/(k+1).
        let pow = |x: f64, e: usize| x.powi(e as i32);
        let rhs_a = Mat::from_fn(s, s, |i, k| pow(c[i], k + 2) / (((k + 2) * (k + 1)) as f64));
        let rhs_bm = Mat::from_fn(s, s, |i, k| pow(c[i], k + 1) / ((k + 1) as f64));
        let stage_weights = linalg::solve_mat(&vs_t, &rhs_a.transpose())?.transpose();
        let stage_deriv_weights = linalg::solve_mat(&vs_t, &rhs_bm.transpose())?.transpose();

        // Factorization caches for the variable-step update.
        let vc_inv = linalg::solve_mat(&vc, &Mat::identity(s))?;
        let w_pos = Mat::from_fn(s, s, |i, k| pow(c[i], k + 2));
        let w_der = Mat::from_fn(s, s, |i, k| pow(c[i], k + 1));
        let gamma_pos = Mat::from_fn(s, s, |k, i| {
            if k <= i {
                binomial(i + 2, k + 2) / (((i + 2) * (i + 1)) as f64)
            } else {
                0.0
            }
        });
        let gamma_der = Mat::from_fn(s, s, |k, i| {
            if k <= i {
                binomial(i + 1, k + 1) / ((i + 1) as f64)
            } else {
                0.0
            }
        });
        let g_pos = gamma_pos.mul(&vc_inv);
        let g_der = gamma_der.mul(&vc_inv);

        let orthogonality = orthogonality_residuals(&nodes);
        let mut scheme = CollocationScheme {
            nodes,
            stage_weights,
            stage_deriv_weights,
            step_weights,
            step_deriv_weights,
            step_order: orthogonality.satisfied_order,
            derivation_residual: 0.0,
            orthogonality,
            w_pos,
            w_der,
            g_pos,
            g_der,
        };
        scheme.derivation_residual = scheme.defining_residual();
        if !scheme.derivation_residual.is_finite()
            || scheme.derivation_residual > SOLVE_RESIDUAL_LIMIT
        {
            return Err(Error::IllConditioned {
                residual: scheme.derivation_residual,
            });
        }
        Ok(scheme)
    }

    /// Reconstructs a scheme from explicitly given coefficients (the JSON
    /// reader uses this; tests use it to inject perturbed coefficients). The
    /// weights are taken verbatim, so serialize/parse round-trips are
    /// bitwise. No residual threshold is enforced here.
    pub fn from_parts(
        nodes: NodeSet,
        stage_weights: Mat,
        stage_deriv_weights: Mat,
        step_weights: Vec<f64>,
        step_deriv_weights: Vec<f64>,
        step_order: usize,
    ) -> Result<Self> {
        let s = nodes.len();
        if stage_weights.rows() != s
            || stage_weights.cols() != s
            || stage_deriv_weights.rows() != s
            || stage_deriv_weights.cols() != s
            || step_weights.len() != s
            || step_deriv_weights.len() != s
        {
            return Err(Error::DimensionMismatch {
                expected: s,
                got: stage_weights.rows(),
            });
        }
        let derived = CollocationScheme::from_nodes(nodes.clone())?;
        let orthogonality = orthogonality_residuals(&nodes);
        let mut scheme = CollocationScheme {
            nodes,
            stage_weights,
            stage_deriv_weights,
            step_weights,
            step_deriv_weights,
            step_order,
            derivation_residual: 0.0,
            orthogonality,
            w_pos: derived.w_pos,
            w_der: derived.w_der,
            g_pos: derived.g_pos,
            g_der: derived.g_der,
        };
        scheme.derivation_residual = scheme.defining_residual();
        Ok(scheme)
    }

    pub fn s(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn node_slice(&self) -> &[f64] {
        self.nodes.as_slice()
    }

    /// Stage position matrix (A).
    pub fn stage_weights(&self) -> &Mat {
        &self.stage_weights
    }

    /// Stage derivative matrix (B).
    pub fn stage_deriv_weights(&self) -> &Mat {
        &self.stage_deriv_weights
    }

    /// End-of-step position weights (b).
    pub fn step_weights(&self) -> &[f64] {
        &self.step_weights
    }

    /// End-of-step derivative weights (d).
    pub fn step_deriv_weights(&self) -> &[f64] {
        &self.step_deriv_weights
    }

    pub fn step_order(&self) -> usize {
        self.step_order
    }

    /// Stage order equals the stage count for every node set.
    pub fn stage_order(&self) -> usize {
        self.s()
    }

    pub fn orthogonality(&self) -> &OrthogonalityReport {
        &self.orthogonality
    }

    /// Max-norm residual of the defining linear identities, evaluated with
    /// compensated summation at derivation time.
    pub fn derivation_residual(&self) -> f64 {
        self.derivation_residual
    }

    /// Recomputes the residual of all four defining identity families.
    pub fn defining_residual(&self) -> f64 {
        let s = self.s();
        let c = self.node_slice();
        let mut cpow = vec![1.0; s]; // c^k
        let shifted: Vec<f64> = c.iter().map(|&x| x - 1.0).collect();
        let mut spow = vec![1.0; s]; // (c - e)^k
        let mut worst = 0.0_f64;
        for k in 0..s {
            let fb = ((k + 2) * (k + 1)) as f64;
            let fd = (k + 1) as f64;
            let rb = fb * linalg::dot_compensated(&self.step_weights, &cpow) - 1.0;
            let rd = fd * linalg::dot_compensated(&self.step_deriv_weights, &cpow) - 1.0;
            worst = worst.max(rb.abs()).max(rd.abs());
            for (i, &ci) in c.iter().enumerate() {
                let ra = fb * linalg::dot_compensated(self.stage_weights.row(i), &spow)
                    - ci.powi(k as i32 + 2);
                let rbm = fd * linalg::dot_compensated(self.stage_deriv_weights.row(i), &spow)
                    - ci.powi(k as i32 + 1);
                worst = worst.max(ra.abs()).max(rbm.abs());
            }
            for ((cp, sp), (&ci, &si)) in cpow.iter_mut().zip(&mut spow).zip(c.iter().zip(&shifted))
            {
                *cp *= ci;
                *sp *= si;
            }
        }
        worst
    }

    /// Stage matrices `A(q)`, `B(q)` for a step-size ratio `q`, from a direct
    /// solve of the variable-step defining systems. At `q = 1` the fixed-step
    /// matrices are returned as-is.
    pub fn variable_coefficients(&self, q: f64) -> Result<(Mat, Mat)> {
        if q <= 0.0 || !q.is_finite() {
            return Err(Error::NonPositiveRatio(q));
        }
        if q == 1.0 {
            return Ok((self.stage_weights.clone(), self.stage_deriv_weights.clone()));
        }
        let s = self.s();
        let c = self.node_slice();
        // Column j (power k = j + 2): ((1 + c q)^k - 1 - k c q) / (k (k-1) q^2)
        // for A(q) and ((1 + c q)^(k-1) - 1) / ((k-1) q) for B(q).
        let u = Mat::from_fn(s, s, |i, j| {
            let k = (j + 2) as f64;
            let base = 1.0 + c[i] * q;
            (base.powi(j as i32 + 2) - 1.0 - k * c[i] * q) / (k * (k - 1.0) * q * q)
        });
        let v = Mat::from_fn(s, s, |i, j| {
            let k = (j + 2) as f64;
            let base = 1.0 + c[i] * q;
            (base.powi(j as i32 + 1) - 1.0) / ((k - 1.0) * q)
        });
        let vc_t = vandermonde(c).transpose();
        let aq = linalg::solve_mat(&vc_t, &u.transpose())?.transpose();
        let bq = linalg::solve_mat(&vc_t, &v.transpose())?.transpose();
        Ok((aq, bq))
    }

    /// Stage matrices `A(q)`, `B(q)` via the cached diagonal-scaling
    /// factorization; agrees with [`Self::variable_coefficients`] to roundoff
    /// and costs two small matrix products per call.
    pub fn variable_coefficients_scaled(&self, q: f64) -> Result<(Mat, Mat)> {
        if q <= 0.0 || !q.is_finite() {
            return Err(Error::NonPositiveRatio(q));
        }
        if q == 1.0 {
            return Ok((self.stage_weights.clone(), self.stage_deriv_weights.clone()));
        }
        let s = self.s();
        let mut scaled_pos = self.g_pos.clone();
        let mut scaled_der = self.g_der.clone();
        let mut qk = 1.0;
        for k in 0..s {
            for j in 0..s {
                scaled_pos[(k, j)] *= qk;
                scaled_der[(k, j)] *= qk;
            }
            qk *= q;
        }
        Ok((self.w_pos.mul(&scaled_pos), self.w_der.mul(&scaled_der)))
    }

    /// Continuous-extension weights at a fraction `xi` of the current step.
    /// At `xi = 1` these coincide with the end-of-step weights.
    pub fn dense_weights(&self, xi: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::OutOfRangeXi(xi));
        }
        let s = self.s();
        let mut rhs_b = vec![0.0; s];
        let mut rhs_d = vec![0.0; s];
        let mut xik = 1.0;
        for k in 0..s {
            rhs_b[k] = xik / (((k + 2) * (k + 1)) as f64);
            rhs_d[k] = xik / ((k + 1) as f64);
            xik *= xi;
        }
        let vc_t = vandermonde(self.node_slice()).transpose();
        let bxi = linalg::solve(&vc_t, &rhs_b)?;
        let dxi = linalg::solve(&vc_t, &rhs_d)?;
        Ok((bxi, dxi))
    }

    /// Embedded companion method on a strict subset of the stages, given by
    /// parent stage indices. The index map lets an integrator reuse the
    /// parent's cached stage evaluations.
    pub fn embedded(&self, indices: &[usize]) -> Result<EmbeddedScheme> {
        let s = self.s();
        if indices.is_empty() || indices.len() >= s {
            return Err(Error::BadEmbeddedIndices);
        }
        let mut seen = vec![false; s];
        for &i in indices {
            if i >= s || seen[i] {
                return Err(Error::BadEmbeddedIndices);
            }
            seen[i] = true;
        }
        let sub: Vec<f64> = indices.iter().map(|&i| self.node_slice()[i]).collect();
        let scheme = CollocationScheme::from_nodes(NodeSet::new(sub)?)?;
        Ok(EmbeddedScheme {
            scheme,
            parent_indices: indices.to_vec(),
        })
    }

    /// Embedded method on the first s-1 stages (the default pairing).
    pub fn embedded_default(&self) -> Result<EmbeddedScheme> {
        let indices: Vec<usize> = (0..self.s() - 1).collect();
        self.embedded(&indices)
    }
}

/// An embedded lower-stage method together with the parent stage indices its
/// weights apply to.
#[derive(Debug, Clone)]
pub struct EmbeddedScheme {
    pub scheme: CollocationScheme,
    pub parent_indices: Vec<usize>,
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * ((n - i) as f64) / ((i + 1) as f64);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn nodes(c: &[f64]) -> NodeSet {
        NodeSet::new(c.to_vec()).unwrap()
    }

    #[test]
    fn node_set_rejects_duplicates_and_empty() {
        assert_eq!(NodeSet::new(vec![]), Err(Error::EmptyNodeSet));
        assert!(matches!(
            NodeSet::new(vec![0.3, 0.3 + 1e-13]),
            Err(Error::NonDistinctNodes { .. })
        ));
        assert!(NodeSet::new(vec![-0.2, 0.0, 1.7]).is_ok());
    }

    #[test]
    fn node_polynomial_examples() {
        assert_eq!(expand_node_polynomial(&nodes(&[0.0])), vec![0.0, 1.0]);
        let p = expand_node_polynomial(&nodes(&[1.0, 2.0]));
        assert_eq!(p, vec![2.0, -3.0, 1.0]);
    }

    #[test]
    fn orthogonality_midpoint_is_exactly_zero() {
        let rep = orthogonality_residuals(&nodes(&[0.5]));
        assert_eq!(rep.r0, 0.0);
        assert!(rep.satisfied_order >= 2);
    }

    #[test]
    fn orthogonality_unit_interval_pair() {
        // r0 for c = [0, 1] is -1/6, so only the generic order holds.
        let rep = orthogonality_residuals(&nodes(&[0.0, 1.0]));
        assert_abs_diff_eq!(rep.r0, -1.0 / 6.0, epsilon = 1e-15);
        assert_eq!(rep.satisfied_order, 2);
    }

    #[test]
    fn single_stage_closed_form() {
        for c1 in [0.3, 1.0, 2.2599] {
            let scheme = CollocationScheme::from_nodes(nodes(&[c1])).unwrap();
            assert_abs_diff_eq!(scheme.step_weights()[0], 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(scheme.step_deriv_weights()[0], 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(
                scheme.stage_weights()[(0, 0)],
                c1 * c1 / 2.0,
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(scheme.stage_deriv_weights()[(0, 0)], c1, epsilon = 1e-14);
        }
    }

    #[test]
    fn two_stage_unit_interval_coefficients() {
        let scheme = CollocationScheme::from_nodes(nodes(&[0.0, 1.0])).unwrap();
        let b = scheme.step_weights();
        let d = scheme.step_deriv_weights();
        assert_abs_diff_eq!(b[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[1], 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], 0.5, epsilon = 1e-15);
        let a = scheme.stage_weights();
        assert_abs_diff_eq!(a[(0, 0)], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[(0, 1)], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[(1, 0)], -1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[(1, 1)], 2.0 / 3.0, epsilon = 1e-15);
        let bm = scheme.stage_deriv_weights();
        assert_abs_diff_eq!(bm[(1, 0)], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(bm[(1, 1)], 1.5, epsilon = 1e-15);
    }

    #[test]
    fn consistency_rows() {
        let scheme = CollocationScheme::from_nodes(nodes(&[0.1, 0.6, 1.1, 1.9])).unwrap();
        let sb: f64 = scheme.step_weights().iter().sum();
        let sd: f64 = scheme.step_deriv_weights().iter().sum();
        assert_abs_diff_eq!(sb, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(sd, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn variable_coefficients_reduce_to_fixed_at_unit_ratio() {
        let scheme = CollocationScheme::from_nodes(nodes(&[0.2, 0.8, 1.5])).unwrap();
        let (aq, bq) = scheme.variable_coefficients(1.0).unwrap();
        assert!(aq.max_abs_diff(scheme.stage_weights()) <= 1e-13);
        assert!(bq.max_abs_diff(scheme.stage_deriv_weights()) <= 1e-13);
        // Also through the defining systems rather than the early return.
        let (aq, bq) = scheme.variable_coefficients(1.0 + 1e-15).unwrap();
        assert!(aq.max_abs_diff(scheme.stage_weights()) <= 1e-12);
        assert!(bq.max_abs_diff(scheme.stage_deriv_weights()) <= 1e-12);
    }

    #[test]
    fn variable_coefficients_single_stage_closed_form() {
        let c1 = 0.7;
        let scheme = CollocationScheme::from_nodes(nodes(&[c1])).unwrap();
        for q in [0.5, 0.9, 1.7] {
            let (aq, bq) = scheme.variable_coefficients(q).unwrap();
            assert_abs_diff_eq!(bq[(0, 0)], c1, epsilon = 1e-13);
            assert_abs_diff_eq!(aq[(0, 0)], c1 * c1 / 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn variable_coefficients_match_hand_solve_two_stages() {
        // Independent 2x2 solve of the defining systems at q = 2 for c = [0, 1].
        let scheme = CollocationScheme::from_nodes(nodes(&[0.0, 1.0])).unwrap();
        let q = 2.0;
        let (aq, bq) = scheme.variable_coefficients(q).unwrap();
        let c = [0.0, 1.0];
        for i in 0..2 {
            // Row x of the unknown matrix satisfies x0 c_0^j + x1 c_1^j = u_j,
            // so with c = [0, 1]: x0 + x1 = u_0 and x1 = u_1.
            let u: Vec<f64> = (0..2usize)
                .map(|j| {
                    let k = (j + 2) as f64;
                    ((1.0 + c[i] * q).powi(j as i32 + 2) - 1.0 - k * c[i] * q)
                        / (k * (k - 1.0) * q * q)
                })
                .collect();
            let v: Vec<f64> = (0..2usize)
                .map(|j| {
                    let k = (j + 2) as f64;
                    ((1.0 + c[i] * q).powi(j as i32 + 1) - 1.0) / ((k - 1.0) * q)
                })
                .collect();
            assert_abs_diff_eq!(aq[(i, 1)], u[1], epsilon = 1e-13);
            assert_abs_diff_eq!(aq[(i, 0)], u[0] - u[1], epsilon = 1e-13);
            assert_abs_diff_eq!(bq[(i, 1)], v[1], epsilon = 1e-13);
            assert_abs_diff_eq!(bq[(i, 0)], v[0] - v[1], epsilon = 1e-13);
        }
    }

    #[test]
    fn factorization_matches_direct_solve() {
        let scheme = CollocationScheme::from_nodes(nodes(&[0.15, 0.55, 1.05, 1.65])).unwrap();
        for q in [0.5, 0.8, 1.3, 2.0] {
            let (a1, b1) = scheme.variable_coefficients(q).unwrap();
            let (a2, b2) = scheme.variable_coefficients_scaled(q).unwrap();
            assert!(a1.max_abs_diff(&a2) <= 1e-12, "A(q) mismatch at q={q}");
            assert!(b1.max_abs_diff(&b2) <= 1e-12, "B(q) mismatch at q={q}");
        }
    }

    #[test]
    fn variable_coefficients_reject_bad_ratio() {
        let scheme = CollocationScheme::from_nodes(nodes(&[0.2, 0.9])).unwrap();
        assert!(matches!(
            scheme.variable_coefficients(0.0),
            Err(Error::NonPositiveRatio(_))
        ));
        assert!(matches!(
            scheme.variable_coefficients(-1.0),
            Err(Error::NonPositiveRatio(_))
        ));
    }

    #[test]
    fn dense_weights_at_endpoint_equal_step_weights() {
        let scheme = CollocationScheme::from_nodes(nodes(&[0.1, 0.7, 1.2, 1.8])).unwrap();
        let (bxi, dxi) = scheme.dense_weights(1.0).unwrap();
        for i in 0..scheme.s() {
            assert_abs_diff_eq!(bxi[i], scheme.step_weights()[i], epsilon = 1e-13);
            assert_abs_diff_eq!(dxi[i], scheme.step_deriv_weights()[i], epsilon = 1e-13);
        }
    }

    #[test]
    fn dense_weights_single_stage_are_constant() {
        let scheme = CollocationScheme::from_nodes(nodes(&[0.42])).unwrap();
        for xi in [0.0, 0.37, 1.0] {
            let (bxi, dxi) = scheme.dense_weights(xi).unwrap();
            assert_abs_diff_eq!(bxi[0], 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(dxi[0], 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn dense_weights_match_hand_solve_midpoint() {
        let scheme = CollocationScheme::from_nodes(nodes(&[0.0, 1.0])).unwrap();
        let xi = 0.5;
        let (bxi, dxi) = scheme.dense_weights(xi).unwrap();
        // Hand solve of [1 1; 0 1] x = rhs with rhs_b = [1/2, xi/6] and
        // rhs_d = [1, xi/2]: x1 = rhs[1], x0 = rhs[0] - rhs[1].
        assert_abs_diff_eq!(bxi[1], xi / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(bxi[0], 0.5 - xi / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dxi[1], xi / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dxi[0], 1.0 - xi / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn dense_weights_reject_out_of_range() {
        let scheme = CollocationScheme::from_nodes(nodes(&[0.0, 1.0])).unwrap();
        assert!(matches!(
            scheme.dense_weights(-0.01),
            Err(Error::OutOfRangeXi(_))
        ));
        assert!(matches!(
            scheme.dense_weights(1.01),
            Err(Error::OutOfRangeXi(_))
        ));
    }

    #[test]
    fn embedded_subscheme_single_node() {
        let scheme = CollocationScheme::from_nodes(nodes(&[0.0, 1.0])).unwrap();
        let emb = scheme.embedded(&[0]).unwrap();
        assert_eq!(emb.parent_indices, vec![0]);
        assert_abs_diff_eq!(emb.scheme.step_weights()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(emb.scheme.step_deriv_weights()[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn embedded_rejects_bad_indices() {
        let scheme = CollocationScheme::from_nodes(nodes(&[0.0, 0.5, 1.0])).unwrap();
        assert!(scheme.embedded(&[]).is_err());
        assert!(scheme.embedded(&[0, 1, 2]).is_err());
        assert!(scheme.embedded(&[0, 0]).is_err());
        assert!(scheme.embedded(&[7]).is_err());
    }

    #[test]
    fn defining_residual_small_for_reasonable_nodes() {
        let scheme = CollocationScheme::from_nodes(nodes(&[0.0, 0.25, 0.69, 1.0, 1.62])).unwrap();
        assert!(scheme.defining_residual() <= 1e-12);
    }
}
