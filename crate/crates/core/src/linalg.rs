//! Small dense linear algebra: row-major matrices, LU solves with one step of
//! iterative refinement, and a real nonsymmetric eigensolver (balancing,
//! Householder reduction to Hessenberg form, Francis double-shift QR).
//!
//! Everything here targets the tiny systems this crate produces: coefficient
//! solves of size s <= 8 and stability matrices of size 2s + 2 <= 64.

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from nested rows. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Mat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn scale(&self, a: f64) -> Mat {
        let mut m = self.clone();
        for v in &mut m.data {
            *v *= a;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Compensated (Kahan-Babuska) dot product; used for refinement residuals and
/// residual verification.
pub fn dot_compensated(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (x, y) in a.iter().zip(b) {
        let term = x * y;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// LU factorization with partial pivoting.
struct Lu {
    lu: Mat,
    piv: Vec<usize>,
}

impl Lu {
    fn factor(a: &Mat) -> Result<Lu> {
        assert!(a.is_square());
        let n = a.rows;
        let mut lu = a.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut max = lu[(k, k)].abs();
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > max {
                    max = v;
                    p = i;
                }
            }
            if max == 0.0 {
                return Err(Error::IllConditioned {
                    residual: f64::INFINITY,
                });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                piv.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let m = lu[(i, k)] / pivot;
                lu[(i, k)] = m;
                for j in k + 1..n {
                    let s = m * lu[(k, j)];
                    lu[(i, j)] -= s;
                }
            }
        }
        Ok(Lu { lu, piv })
    }

    fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                x[i] -= self.lu[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[(i, j)] * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// Solves `a * x = b` for a vector `b` using LU with partial pivoting plus one
/// pass of iterative refinement (compensated residual).
pub fn solve(a: &Mat, b: &[f64]) -> Result<Vec<f64>> {
    let lu = Lu::factor(a)?;
    let mut x = lu.solve_vec(b);
    refine(a, b, &mut x, &lu);
    Ok(x)
}

/// Solves `a * X = B` column-by-column for a matrix right-hand side.
pub fn solve_mat(a: &Mat, b: &Mat) -> Result<Mat> {
    assert_eq!(a.rows, b.rows);
    let lu = Lu::factor(a)?;
    let mut out = Mat::zeros(b.rows, b.cols);
    let mut col = vec![0.0; b.rows];
    for j in 0..b.cols {
        for i in 0..b.rows {
            col[i] = b[(i, j)];
        }
        let mut x = lu.solve_vec(&col);
        refine(a, &col, &mut x, &lu);
        for i in 0..b.rows {
            out[(i, j)] = x[i];
        }
    }
    Ok(out)
}

fn refine(a: &Mat, b: &[f64], x: &mut [f64], lu: &Lu) {
    let n = a.rows;
    let mut r = vec![0.0; n];
    for i in 0..n {
        r[i] = b[i] - dot_compensated(a.row(i), x);
    }
    let dx = lu.solve_vec(&r);
    for i in 0..n {
        x[i] += dx[i];
    }
}

/// Max-norm of the residual `a * x - b`.
pub fn residual_norm(a: &Mat, x: &[f64], b: &[f64]) -> f64 {
    (0..a.rows)
        .map(|i| (dot_compensated(a.row(i), x) - b[i]).abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Real nonsymmetric eigenvalues
// ---------------------------------------------------------------------------

/// Eigenvalues of a real square matrix as `(re, im)` pairs, in no particular
/// order. Balancing + Householder Hessenberg reduction + Francis double-shift
/// QR iteration, following the classic EISPACK/JAMA formulation.
pub fn eigenvalues(a: &Mat) -> Result<Vec<(f64, f64)>> {
    assert!(a.is_square(), "eigenvalues of a non-square matrix");
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    francis_qr(&mut h)
}

/// Max |eigenvalue|.
pub fn spectral_radius_of(a: &Mat) -> Result<f64> {
    let eig = eigenvalues(a)?;
    Ok(eig.iter().map(|&(re, im)| re.hypot(im)).fold(0.0, f64::max))
}

/// Diagonal similarity scaling by radix powers; leaves eigenvalues unchanged
/// while roughly equalizing row and column norms.
fn balance(h: &mut Mat) {
    let n = h.rows();
    let radix = 2.0_f64;
    let sqrdx = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += h[(j, i)].abs();
                    r += h[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = c + r;
            let mut c2 = c;
            let mut g = r / radix;
            while c2 < g {
                f *= radix;
                c2 *= sqrdx;
            }
            g = r * radix;
            while c2 >= g {
                f /= radix;
                c2 /= sqrdx;
            }
            if (c2 + r / f) / f < 0.95 * s && f != 1.0 {
                done = false;
                let ginv = 1.0 / f;
                for j in 0..n {
                    h[(i, j)] *= ginv;
                }
                for j in 0..n {
                    h[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form (no transform
/// accumulation); entries below the first subdiagonal are zeroed afterwards.
fn hessenberg(h: &mut Mat) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let mut ort = vec![0.0; n];
    for m in 1..n - 1 {
        let mut scale = 0.0;
        for i in m..n {
            scale += h[(i, m - 1)].abs();
        }
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..n).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        // Apply the Householder similarity transform from both sides.
        for j in m..n {
            let mut f = 0.0;
            for i in (m..n).rev() {
                f += ort[i] * h[(i, j)];
            }
            f /= hh;
            for i in m..n {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..n {
            let mut f = 0.0;
            for j in (m..n).rev() {
                f += ort[j] * h[(i, j)];
            }
            f /= hh;
            for j in m..n {
                h[(i, j)] -= f * ort[j];
            }
        }
        h[(m, m - 1)] = scale * g;
    }
    for i in 2..n {
        for j in 0..i - 1 {
            h[(i, j)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix. Returns eigenvalues
/// as `(re, im)` pairs or [`Error::NoConvergence`] when the iteration stalls.
#[allow(clippy::needless_range_loop)]
fn francis_qr(h: &mut Mat) -> Result<Vec<(f64, f64)>> {
    let nn = h.rows();
    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];
    let eps = f64::EPSILON;

    let mut anorm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            anorm += h[(i, j)].abs();
        }
    }
    if anorm == 0.0 {
        return Ok(vec![(0.0, 0.0); nn]);
    }

    let mut n = nn as isize - 1;
    let mut exshift = 0.0;
    let mut iter = 0usize;
    let mut total_iter = 0usize;
    let max_total = 60 * nn.max(1);

    let (mut p, mut q, mut r, mut s, mut z);
    let (mut x, mut y, mut w);

    while n >= 0 {
        if total_iter > max_total {
            return Err(Error::NoConvergence);
        }
        let nu = n as usize;

        // Look for a single small subdiagonal element.
        let mut l = nu;
        while l > 0 {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = anorm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                h[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }

        if l == nu {
            // One root found.
            d[nu] = h[(nu, nu)] + exshift;
            e[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == nu - 1 {
            // Two roots found.
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            x = h[(nu, nu)] + exshift;
            if q >= 0.0 {
                // Real pair.
                z = if p >= 0.0 { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = if z != 0.0 { x - w / z } else { d[nu - 1] };
                e[nu - 1] = 0.0;
                e[nu] = 0.0;
            } else {
                // Complex pair.
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // Form shift and iterate.
            x = h[(nu, nu)];
            y = 0.0;
            w = 0.0;
            if l < nu {
                y = h[(nu - 1, nu - 1)];
                w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            }
            if iter == 10 || iter == 20 {
                // Exceptional shift.
                exshift += x;
                for i in 0..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            iter += 1;
            total_iter += 1;

            // Look for two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    // Row modification.
                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k, j)] -= p * x;
                        h[(k + 1, j)] -= p * y;
                    }

                    // Column modification.
                    let upper = if nu < k + 3 { nu } else { k + 3 };
                    for i in 0..=upper {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k)] -= p;
                        h[(i, k + 1)] -= p * q;
                    }
                }
            }
        }
    }

    Ok(d.into_iter().zip(e).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn sorted_moduli(eig: &[(f64, f64)]) -> Vec<f64> {
        let mut m: Vec<f64> = eig.iter().map(|&(re, im)| re.hypot(im)).collect();
        m.sort_by(|a, b| a.partial_cmp(b).unwrap());
        m
    }

    #[test]
    fn lu_solves_small_system() {
        let a = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = solve(&a, &[5.0, 10.0]).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn lu_rejects_singular() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(solve(&a, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn solve_mat_matches_columnwise() {
        let a = Mat::from_rows(&[
            vec![4.0, -2.0, 1.0],
            vec![3.0, 6.0, -4.0],
            vec![2.0, 1.0, 8.0],
        ]);
        let b = Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]);
        let x = solve_mat(&a, &b).unwrap();
        for j in 0..2 {
            let col: Vec<f64> = (0..3).map(|i| b[(i, j)]).collect();
            let xi = solve(&a, &col).unwrap();
            for i in 0..3 {
                assert_abs_diff_eq!(x[(i, j)], xi[i], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn eigen_identity() {
        let eig = eigenvalues(&Mat::identity(4)).unwrap();
        for (re, im) in eig {
            assert_abs_diff_eq!(re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn eigen_rotation_has_unit_modulus() {
        let a = Mat::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        let rho = spectral_radius_of(&a).unwrap();
        assert_abs_diff_eq!(rho, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigen_known_triangular() {
        let a = Mat::from_rows(&[
            vec![3.0, 1.0, -2.0],
            vec![0.0, -5.0, 4.0],
            vec![0.0, 0.0, 0.25],
        ]);
        let m = sorted_moduli(&eigenvalues(&a).unwrap());
        assert_abs_diff_eq!(m[0], 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(m[1], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m[2], 5.0, epsilon = 1e-12);
    }

    #[test]
    fn eigen_defective_jordan_block() {
        let a = Mat::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        let rho = spectral_radius_of(&a).unwrap();
        assert_abs_diff_eq!(rho, 1.0, epsilon = 1e-12);
    }

    /// Characteristic polynomial coefficients via Faddeev-LeVerrier, then
    /// Durand-Kerner root finding: an eigenvalue oracle fully independent of
    /// the QR path.
    fn char_poly(a: &Mat) -> Vec<f64> {
        let n = a.rows();
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        let mut m = Mat::zeros(n, n);
        for k in 1..=n {
            m = a.mul(&m);
            for i in 0..n {
                m[(i, i)] += coeffs[n - k + 1];
            }
            let am = a.mul(&m);
            let trace: f64 = (0..n).map(|i| am[(i, i)]).sum();
            coeffs[n - k] = -trace / k as f64;
        }
        coeffs
    }

    fn durand_kerner(coeffs: &[f64]) -> Vec<(f64, f64)> {
        let n = coeffs.len() - 1;
        let lead = coeffs[n];
        let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
        let cmul =
            |(ar, ai): (f64, f64), (br, bi): (f64, f64)| (ar * br - ai * bi, ar * bi + ai * br);
        let eval = |x: (f64, f64)| {
            let mut v = (0.0, 0.0);
            for k in (0..=n).rev() {
                v = cmul(v, x);
                v.0 += monic[k];
            }
            v
        };
        let mut roots: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let theta = 0.7 + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                (1.3 * theta.cos(), 1.3 * theta.sin())
            })
            .collect();
        for _ in 0..500 {
            let mut max_step = 0.0_f64;
            for i in 0..n {
                let mut denom = (1.0, 0.0);
                for j in 0..n {
                    if i != j {
                        denom = cmul(denom, (roots[i].0 - roots[j].0, roots[i].1 - roots[j].1));
                    }
                }
                let v = eval(roots[i]);
                let d2 = denom.0 * denom.0 + denom.1 * denom.1;
                let delta = (
                    (v.0 * denom.0 + v.1 * denom.1) / d2,
                    (v.1 * denom.0 - v.0 * denom.1) / d2,
                );
                roots[i].0 -= delta.0;
                roots[i].1 -= delta.1;
                max_step = max_step.max(delta.0.hypot(delta.1));
            }
            if max_step < 1e-13 {
                break;
            }
        }
        roots
    }

    #[test]
    fn eigen_matches_characteristic_roots_on_random_small_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 2..=6 {
            for _ in 0..10 {
                let a = Mat::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
                let qr = sorted_moduli(&eigenvalues(&a).unwrap());
                let dk = sorted_moduli(&durand_kerner(&char_poly(&a)));
                for (u, v) in qr.iter().zip(&dk) {
                    assert_abs_diff_eq!(u, v, epsilon = 1e-6);
                }
            }
        }
    }

    /// Power iteration on A*Aᵀ-free plain A: only checks the dominant modulus,
    /// run on matrices built with a known dominant real eigenvalue.
    #[test]
    fn eigen_matches_power_iteration_dominant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [3usize, 5, 8, 14] {
            // Diagonal with a clear dominant entry, conjugated by a random
            // well-conditioned transform.
            let dominant = 4.0;
            let mut d = Mat::zeros(n, n);
            d[(0, 0)] = dominant;
            for i in 1..n {
                d[(i, i)] = rng.random_range(-1.5..1.5);
            }
            let t = Mat::from_fn(n, n, |i, j| {
                if i == j {
                    1.0
                } else {
                    0.2 * rng.random_range(-1.0..1.0)
                }
            });
            let tinv = solve_mat(&t, &Mat::identity(n)).unwrap();
            let a = t.mul(&d).mul(&tinv);

            let mut v = vec![1.0; n];
            let mut lambda = 0.0;
            for _ in 0..2000 {
                let w = a.mat_vec(&v);
                let norm = w.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
                lambda = norm;
                v = w.iter().map(|x| x / norm).collect();
            }
            let rho = spectral_radius_of(&a).unwrap();
            assert_abs_diff_eq!(rho, lambda, epsilon = 1e-7);
            assert_abs_diff_eq!(rho, dominant, epsilon = 1e-7);
        }
    }
}
