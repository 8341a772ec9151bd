//! Linear stability: amplification matrix, spectral radius, and region scans.
//!
//! Applying a scheme to the test equation `y'' = mu y' + lambda y` propagates
//! the extended state `(Y, h Y', y, h y')` by a (2s+2)-square matrix
//! `M(z, nu)` with `z = lambda h^2`, `nu = mu h`. The stability region is the
//! set of `(z, nu) != (0, 0)` in the closed third quadrant where the spectral
//! radius of `M` stays at or below one.

use rayon::prelude::*;

use crate::collocation::CollocationScheme;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Largest matrix the dense eigensolver accepts here.
pub const MAX_EIGEN_DIM: usize = 64;

/// Assembles the amplification matrix acting on `(Y, h Y', y, h y')`:
///
/// ```text
/// [ z(e b' + c d' + A)   nu(e b' + c d' + A)   e   e + c ]
/// [ z(e d' + B)          nu(e d' + B)          0   e     ]
/// [ z b'                 nu b'                 1   1     ]
/// [ z d'                 nu d'                 0   1     ]
/// ```
pub fn stability_matrix(scheme: &CollocationScheme, z: f64, nu: f64) -> Mat {
    let s = scheme.s();
    let c = scheme.node_slice();
    let b = scheme.step_weights();
    let d = scheme.step_deriv_weights();
    let a_mat = scheme.stage_weights();
    let b_mat = scheme.stage_deriv_weights();
    let n = 2 * s + 2;
    let mut m = Mat::zeros(n, n);

    // Top block row: position stages.
    for i in 0..s {
        for j in 0..s {
            let core = b[j] + c[i] * d[j] + a_mat[(i, j)];
            m[(i, j)] = z * core;
            m[(i, s + j)] = nu * core;
        }
        m[(i, 2 * s)] = 1.0;
        m[(i, 2 * s + 1)] = 1.0 + c[i];
    }
    // Second block row: derivative stages.
    for i in 0..s {
        for j in 0..s {
            let core = d[j] + b_mat[(i, j)];
            m[(s + i, j)] = z * core;
            m[(s + i, s + j)] = nu * core;
        }
        m[(s + i, 2 * s + 1)] = 1.0;
    }
    // End-of-step rows.
    for j in 0..s {
        m[(2 * s, j)] = z * b[j];
        m[(2 * s, s + j)] = nu * b[j];
        m[(2 * s + 1, j)] = z * d[j];
        m[(2 * s + 1, s + j)] = nu * d[j];
    }
    m[(2 * s, 2 * s)] = 1.0;
    m[(2 * s, 2 * s + 1)] = 1.0;
    m[(2 * s + 1, 2 * s + 1)] = 1.0;
    m
}

/// Spectral radius of a square matrix (dimension at most [`MAX_EIGEN_DIM`]).
pub fn spectral_radius(m: &Mat) -> Result<f64> {
    assert!(m.is_square());
    assert!(
        m.rows() <= MAX_EIGEN_DIM,
        "matrix too large for the dense eigensolver"
    );
    if m.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { t: f64::NAN });
    }
    linalg::spectral_radius_of(m)
}

/// Spectral radius samples of `M(z, nu)` over a uniform lattice on
/// `[z_min, 0] x [nu_min, 0]`. Cells whose eigensolve fails hold NaN.
#[derive(Debug, Clone)]
pub struct StabilityGrid {
    pub z_axis: Vec<f64>,
    pub nu_axis: Vec<f64>,
    /// `rho[(i, j)]` is the sample at `(z_axis[i], nu_axis[j])`.
    pub rho: Mat,
}

impl StabilityGrid {
    /// Fraction of lattice cells inside the stability region: `rho <= 1`,
    /// the origin excluded by definition.
    pub fn fraction_stable(&self) -> f64 {
        let mut stable = 0usize;
        let total = self.z_axis.len() * self.nu_axis.len();
        for (i, &z) in self.z_axis.iter().enumerate() {
            for (j, &nu) in self.nu_axis.iter().enumerate() {
                if z == 0.0 && nu == 0.0 {
                    continue;
                }
                if self.rho[(i, j)] <= 1.0 {
                    stable += 1;
                }
            }
        }
        stable as f64 / total as f64
    }

    /// Largest finite sample.
    pub fn max_rho(&self) -> f64 {
        self.rho
            .as_slice()
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0_f64, |acc, &v| acc.max(v))
    }

    pub fn failed_cells(&self) -> usize {
        self.rho.as_slice().iter().filter(|v| v.is_nan()).count()
    }

    /// CSV export with columns `z,nu,rho`, z-major.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("z,nu,rho\n");
        for (i, &z) in self.z_axis.iter().enumerate() {
            for (j, &nu) in self.nu_axis.iter().enumerate() {
                out.push_str(&crate::serialize::fmt_f64(z));
                out.push(',');
                out.push_str(&crate::serialize::fmt_f64(nu));
                out.push(',');
                out.push_str(&crate::serialize::fmt_f64(self.rho[(i, j)]));
                out.push('\n');
            }
        }
        out
    }

    /// JSON summary of the scan.
    pub fn summary_json(&self, scheme_id: &str) -> String {
        format!(
            "{{\"scheme_id\": \"{}\", \"fraction_stable\": {}, \"max_rho\": {}, \"grid_spec\": {{\"z_min\": {}, \"nu_min\": {}, \"n_z\": {}, \"n_nu\": {}}}, \"failed_cells\": {}}}",
            scheme_id,
            crate::serialize::fmt_f64(self.fraction_stable()),
            crate::serialize::fmt_f64(self.max_rho()),
            crate::serialize::fmt_f64(*self.z_axis.first().unwrap()),
            crate::serialize::fmt_f64(*self.nu_axis.first().unwrap()),
            self.z_axis.len(),
            self.nu_axis.len(),
            self.failed_cells()
        )
    }
}

/// Scans the lattice `[z_min, 0] x [nu_min, 0]`. Cells are independent and
/// evaluated in parallel; output ordering is fixed by index.
pub fn scan_region(
    scheme: &CollocationScheme,
    z_min: f64,
    nu_min: f64,
    n_z: usize,
    n_nu: usize,
) -> Result<StabilityGrid> {
    if n_z < 2 || n_nu < 2 {
        return Err(Error::InvalidConfig(
            "grid needs at least 2 points per axis".into(),
        ));
    }
    if !(z_min <= 0.0 && nu_min <= 0.0) {
        return Err(Error::InvalidConfig("z_min and nu_min must be <= 0".into()));
    }
    let z_axis: Vec<f64> = (0..n_z)
        .map(|i| z_min * (1.0 - i as f64 / (n_z - 1) as f64))
        .collect();
    let nu_axis: Vec<f64> = (0..n_nu)
        .map(|j| nu_min * (1.0 - j as f64 / (n_nu - 1) as f64))
        .collect();

    let cells: Vec<f64> = (0..n_z * n_nu)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n_nu, idx % n_nu);
            let m = stability_matrix(scheme, z_axis[i], nu_axis[j]);
            spectral_radius(&m).unwrap_or(f64::NAN)
        })
        .collect();
    let mut rho = Mat::zeros(n_z, n_nu);
    for idx in 0..n_z * n_nu {
        rho[(idx / n_nu, idx % n_nu)] = cells[idx];
    }
    Ok(StabilityGrid {
        z_axis,
        nu_axis,
        rho,
    })
}
