//! Generalized explicit pseudo two-step Runge-Kutta-Nystrom (GEPTRKN)
//! collocation methods for second-order initial value problems
//! `y'' = f(t, y, y')`.
//!
//! The methods advance `(y, y')` together with a block of stage values using
//! only the previous step's stage derivatives, so all s right-hand side
//! evaluations of a step are independent of one another. Coefficients are
//! derived from an arbitrary set of distinct collocation nodes; special node
//! sets raise the step order from the generic s up to s + 2.
//!
//! What lives where:
//! * [`collocation`] - node sets, coefficient derivation, variable-step and
//!   dense-output weights, embedded companion methods, orthogonality
//!   classification.
//! * [`integrator`] - starting procedure, fixed and adaptive runs, local
//!   error estimation, dense evaluation.
//! * [`stability`] - amplification matrix, spectral radius, region scans.
//! * [`problems`] - the `line`, `tele`, and `vand` benchmark problems and the
//!   Chebyshev differentiation machinery.
//! * [`reference`] - order-5 reference solver used for starting values and
//!   reference solutions.
//! * [`methods`] - the built-in node sets (`geptrkn5` .. `geptrkn8`,
//!   `geptrkn54`).
//! * [`experiments`] - accuracy tables, work-precision sweeps, reports.
//!
//! ```
//! use geptrkn::methods::method_pair;
//! use geptrkn::problems::line_problem;
//! use geptrkn::integrator::{integrate_adaptive, ControllerConfig};
//!
//! let (scheme, embedded) = method_pair("geptrkn52").unwrap();
//! let problem = line_problem(2.0, 2.0, 10.0);
//! let config = ControllerConfig::new(1e-8, embedded.scheme.step_order());
//! let run = integrate_adaptive(&problem, 0.0, 10.0, &config, &scheme, &embedded).unwrap();
//! let (y_exact, _) = problem.exact_at(10.0).unwrap();
//! assert!((run.y_end[0] - y_exact[0]).abs() < 1e-6);
//! ```

pub mod collocation;
pub mod error;
pub mod experiments;
pub mod integrator;
pub mod linalg;
pub mod methods;
pub mod problems;
pub mod reference;
pub mod serialize;
pub mod stability;

pub use collocation::{
    derive_coefficients, expand_node_polynomial, orthogonality_residuals, CollocationScheme,
    EmbeddedScheme, NodeSet, OrthogonalityReport,
};
pub use error::{Error, Result};
pub use integrator::{
    dense_eval, estimate_lte, integrate_adaptive, integrate_fixed, start, step_fixed,
    step_variable, ControllerConfig, LteMode, RunStats, StepAttempt, StepState, Trajectory,
};
pub use problems::{line_problem, tele_problem, vand_problem, OdeProblem};
pub use stability::{scan_region, spectral_radius, stability_matrix, StabilityGrid};
