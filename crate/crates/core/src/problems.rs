//! Benchmark problems: a forced damped linear oscillator with closed-form
//! solution (`line`), the telegraph equation semi-discretized with a
//! Chebyshev-Gauss-Lobatto spectral differentiation matrix (`tele`), and the
//! Van der Pol oscillator (`vand`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Mat;

type Rhs = dyn Fn(f64, &[f64], &[f64], &mut [f64]) + Send + Sync;
type Exact = dyn Fn(f64, &mut [f64], &mut [f64]) + Send + Sync;

/// A second-order initial value problem `y'' = f(t, y, y')` with initial data
/// and, when available, a closed-form solution.
#[derive(Clone)]
pub struct OdeProblem {
    name: String,
    dim: usize,
    rhs: Arc<Rhs>,
    pub t0: f64,
    pub t_end: f64,
    pub y0: Vec<f64>,
    pub yp0: Vec<f64>,
    exact: Option<Arc<Exact>>,
}

impl std::fmt::Debug for OdeProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OdeProblem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("t0", &self.t0)
            .field("t_end", &self.t_end)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl OdeProblem {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        t0: f64,
        t_end: f64,
        y0: Vec<f64>,
        yp0: Vec<f64>,
        rhs: impl Fn(f64, &[f64], &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        assert_eq!(y0.len(), dim);
        assert_eq!(yp0.len(), dim);
        OdeProblem {
            name: name.into(),
            dim,
            rhs: Arc::new(rhs),
            t0,
            t_end,
            y0,
            yp0,
            exact: None,
        }
    }

    pub fn with_exact(
        mut self,
        exact: impl Fn(f64, &mut [f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        self.exact = Some(Arc::new(exact));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Evaluates the right-hand side into `out`.
    pub fn eval(&self, t: f64, y: &[f64], yp: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.dim);
        debug_assert_eq!(yp.len(), self.dim);
        (self.rhs)(t, y, yp, out);
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Closed-form `(y, y')` at `t` when the problem carries one.
    pub fn exact_at(&self, t: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        self.exact.as_ref().map(|f| {
            let mut y = vec![0.0; self.dim];
            let mut yp = vec![0.0; self.dim];
            f(t, &mut y, &mut yp);
            (y, yp)
        })
    }
}

/// Forced damped linear oscillator
/// `y'' = -c y' - lambda y - 2 cos(2t) - 4 sin(2t)`, `y(0) = 2`, `y'(0) = -1`.
/// With `c = lambda = 2` the closed-form solution
/// `y(t) = exp(-t) cos t + cos 2t` is attached.
pub fn line_problem(c_damp: f64, lambda: f64, t_end: f64) -> OdeProblem {
    let problem = OdeProblem::new(
        "line",
        1,
        0.0,
        t_end,
        vec![2.0],
        vec![-1.0],
        move |t, y, yp, out| {
            out[0] =
                -c_damp * yp[0] - lambda * y[0] - 2.0 * (2.0 * t).cos() - 4.0 * (2.0 * t).sin();
        },
    );
    if c_damp == 2.0 && lambda == 2.0 {
        problem.with_exact(|t, y, yp| {
            let e = (-t).exp();
            y[0] = e * t.cos() + (2.0 * t).cos();
            yp[0] = -e * (t.cos() + t.sin()) - 2.0 * (2.0 * t).sin();
        })
    } else {
        problem
    }
}

/// Chebyshev-Gauss-Lobatto points on [0, 1] (ascending) and the interior
/// second-derivative spectral differentiation matrix with homogeneous
/// Dirichlet rows and columns removed.
///
/// Built as the square of the standard first-derivative matrix on
/// `cos(j pi / n)`, scaled by 4 for the map from [-1, 1] to [0, 1].
pub fn chebyshev_d2(n: usize) -> (Vec<f64>, Mat) {
    assert!(n >= 2, "need at least one interior point");
    let m = n + 1;
    // Standard construction on [-1, 1] with descending points.
    let x: Vec<f64> = (0..m).map(|j| (PI * j as f64 / n as f64).cos()).collect();
    let weight = |j: usize| if j == 0 || j == n { 2.0 } else { 1.0 };
    let mut d = Mat::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            if i != j {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                d[(i, j)] = weight(i) / weight(j) * sign / (x[i] - x[j]);
            }
        }
    }
    // Negative-sum trick for the diagonal.
    for i in 0..m {
        let mut sum = 0.0;
        for j in 0..m {
            if i != j {
                sum += d[(i, j)];
            }
        }
        d[(i, i)] = -sum;
    }
    let d2 = d.mul(&d);

    // Map to [0, 1]: t = (x + 1)/2, so d2/dt2 = 4 d2/dx2. Reindex ascending
    // (the construction above is descending in x) and drop boundary rows and
    // columns. Descending index j maps to ascending index n - j.
    let interior = n - 1;
    let mut d2i = Mat::zeros(interior, interior);
    for i in 0..interior {
        for j in 0..interior {
            // Interior ascending index i corresponds to descending index n-1-i.
            d2i[(i, j)] = 4.0 * d2[(n - 1 - i, n - 1 - j)];
        }
    }
    let points: Vec<f64> = (0..m).map(|j| (x[n - j] + 1.0) / 2.0).collect();
    (points, d2i)
}

/// Telegraph equation `u_tt = -gamma u_t - kappa u + a^2 u_xx` on [0, 1] with
/// homogeneous Dirichlet boundaries, semi-discretized at the n-1 interior
/// Chebyshev-Gauss-Lobatto points. Initial profile `u(x, 0) = sin(pi x)`,
/// initial velocity zero.
pub fn tele_problem(a: f64, gamma: f64, kappa: f64, n: usize) -> OdeProblem {
    tele_problem_with_velocity(a, gamma, kappa, n, None)
}

/// [`tele_problem`] with an explicit initial velocity profile at the interior
/// points (defaults to zero when `None`).
pub fn tele_problem_with_velocity(
    a: f64,
    gamma: f64,
    kappa: f64,
    n: usize,
    ut0: Option<Vec<f64>>,
) -> OdeProblem {
    assert!(a > 0.0, "wave speed must be positive");
    let (points, d2) = chebyshev_d2(n);
    let dim = n - 1;
    let y0: Vec<f64> = points[1..n].iter().map(|&x| (PI * x).sin()).collect();
    let yp0 = match ut0 {
        Some(v) => {
            assert_eq!(v.len(), dim, "initial velocity dimension");
            v
        }
        None => vec![0.0; dim],
    };
    let a2 = a * a;
    OdeProblem::new("tele", dim, 0.0, 2.0, y0, yp0, move |_t, u, up, out| {
        for i in 0..dim {
            let mut acc = 0.0;
            for j in 0..dim {
                acc += d2[(i, j)] * u[j];
            }
            out[i] = -gamma * up[i] - kappa * u[i] + a2 * acc;
        }
    })
}

/// Van der Pol oscillator `y'' = mu (1 - y^2) y' - y`, `y(0) = 2`, `y'(0) = 0`,
/// integrated over [0, 10]. Non-stiff for small `mu`.
pub fn vand_problem(mu: f64) -> OdeProblem {
    assert!(mu > 0.0, "mu must be positive");
    OdeProblem::new(
        "vand",
        1,
        0.0,
        10.0,
        vec![2.0],
        vec![0.0],
        move |_t, y, yp, out| {
            out[0] = mu * (1.0 - y[0] * y[0]) * yp[0] - y[0];
        },
    )
}

/// Resolves a problem by registry name with numeric parameter overrides.
///
/// Known names and parameters:
/// * `line` - `c` (2), `lambda` (2), `t_end` (10)
/// * `tele` - `a` (0.01), `gamma` (1), `kappa` (0), `n` (11), `t_end` (2)
/// * `vand` - `mu` (1), `t_end` (10)
pub fn problem_by_name(name: &str, params: &BTreeMap<String, f64>) -> Result<OdeProblem> {
    let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
    let known: &[&str] = match name {
        "line" => &["c", "lambda", "t_end"],
        "tele" => &["a", "gamma", "kappa", "n", "t_end"],
        "vand" => &["mu", "t_end"],
        _ => return Err(Error::UnknownProblem(name.to_string())),
    };
    for key in params.keys() {
        if !known.contains(&key.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "problem '{name}' has no parameter '{key}'"
            )));
        }
    }
    let mut problem = match name {
        "line" => line_problem(get("c", 2.0), get("lambda", 2.0), get("t_end", 10.0)),
        "tele" => {
            let n = get("n", 11.0);
            if n < 2.0 || n.fract() != 0.0 {
                return Err(Error::InvalidConfig(
                    "tele parameter n must be an integer >= 2".into(),
                ));
            }
            tele_problem(
                get("a", 0.01),
                get("gamma", 1.0),
                get("kappa", 0.0),
                n as usize,
            )
        }
        "vand" => vand_problem(get("mu", 1.0)),
        _ => unreachable!(),
    };
    if let Some(&t_end) = params.get("t_end") {
        problem.t_end = t_end;
    }
    Ok(problem)
}
