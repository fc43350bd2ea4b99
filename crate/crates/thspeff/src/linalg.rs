//! Dense symmetric linear algebra: Householder tridiagonalization with
//! implicit-shift QL for eigenvalues, and Cholesky factorization for
//! positive-definite solves and log-determinants.
//!
//! Derived from the Algol procedures tred2/tql2 (Bowdler, Martin, Reinsch,
//! Wilkinson) and the corresponding EISPACK routines, specialized to
//! eigenvalues only.

// Index-based loops are kept where they mirror the reference routines.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// Dense row-major matrix.
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

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

const QL_MAX_ITER_PER_EIGENVALUE: usize = 30;

/// Eigenvalues of a symmetric matrix, ascending. The input is consumed as
/// workspace. Fails if the QL iteration does not converge.
pub fn sym_eigenvalues(mut a: Mat) -> Result<Vec<f64>> {
    assert_eq!(a.rows, a.cols, "matrix must be square");
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut a, &mut d, &mut e);
    ql_implicit_shift(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Householder reduction of the symmetric matrix to tridiagonal form.
/// Diagonal goes to `d`, subdiagonal to `e[1..]`.
fn tridiagonalize(a: &mut Mat, d: &mut [f64], e: &mut [f64]) {
    let n = a.rows;
    for j in 0..n {
        d[j] = a[(n - 1, j)];
    }

    for i in (1..n).rev() {
        // Scale to avoid under/overflow.
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = a[(i - 1, j)];
                a[(i, j)] = 0.0;
            }
        } else {
            // Generate Householder vector.
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = if f > 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            // Apply similarity transformation to remaining columns.
            for j in 0..i {
                f = d[j];
                g = e[j] + a[(j, j)] * f;
                for k in (j + 1)..i {
                    g += a[(k, j)] * d[k];
                    e[k] += a[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    a[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = a[(i - 1, j)];
                a[(i, j)] = 0.0;
            }
        }
    }

    for j in 0..n {
        d[j] = a[(j, j)];
    }
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on a tridiagonal matrix. On return `d` holds
/// the eigenvalues (unsorted).
fn ql_implicit_shift(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0_f64;
    let mut tst1 = 0.0_f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER_PER_EIGENVALUE {
                    return Err(Error::EigenNoConvergence(QL_MAX_ITER_PER_EIGENVALUE * n));
                }

                // Compute implicit shift.
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                // Implicit QL transformation.
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// In-place lower Cholesky factorization of a symmetric positive-definite
/// matrix. Only the lower triangle of the result is meaningful.
pub fn cholesky_in_place(a: &mut Mat) -> Result<()> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    for j in 0..n {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= a[(j, k)] * a[(j, k)];
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(Error::NotPositiveDefinite(j));
        }
        let ljj = diag.sqrt();
        a[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= a[(i, k)] * a[(j, k)];
            }
            a[(i, j)] = s / ljj;
        }
    }
    Ok(())
}

/// Natural-log determinant of the factored matrix (twice the log of the
/// diagonal product of the Cholesky factor).
pub fn cholesky_ln_det(chol: &Mat) -> f64 {
    let mut s = 0.0;
    for i in 0..chol.rows {
        s += chol[(i, i)].ln();
    }
    2.0 * s
}

/// Solves `A x = b` in place given the Cholesky factor of `A`.
pub fn cholesky_solve(chol: &Mat, b: &mut [f64]) {
    let n = chol.rows;
    assert_eq!(b.len(), n);
    // Forward substitution L y = b.
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= chol[(i, k)] * b[k];
        }
        b[i] = s / chol[(i, i)];
    }
    // Back substitution L^T x = y.
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= chol[(k, i)] * b[k];
        }
        b[i] = s / chol[(i, i)];
    }
}

/// Solves `A x = b` with one residual-correction pass. `a` is the original
/// matrix, `chol` its Cholesky factor.
pub fn cholesky_solve_refined(a: &Mat, chol: &Mat, b: &[f64]) -> Vec<f64> {
    let n = a.rows;
    let mut x = b.to_vec();
    cholesky_solve(chol, &mut x);
    // r = b - A x, then x += A^{-1} r.
    let mut r = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for j in 0..n {
            s -= a[(i, j)] * x[j];
        }
        r[i] = s;
    }
    cholesky_solve(chol, &mut r);
    for i in 0..n {
        x[i] += r[i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eig_of(entries: &[&[f64]]) -> Vec<f64> {
        let n = entries.len();
        let a = Mat::from_fn(n, n, |i, j| entries[i][j]);
        sym_eigenvalues(a).unwrap()
    }

    #[test]
    fn diagonal_matrix() {
        let ev = eig_of(&[&[3.0, 0.0], &[0.0, 1.0]]);
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_symmetric() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
        let ev = eig_of(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn known_three_by_three() {
        // Tridiagonal [[2,-1,0],[-1,2,-1],[0,-1,2]]: eigenvalues 2 - sqrt(2), 2, 2 + sqrt(2).
        let ev = eig_of(&[&[2.0, -1.0, 0.0], &[-1.0, 2.0, -1.0], &[0.0, -1.0, 2.0]]);
        let expect = [2.0 - 2.0_f64.sqrt(), 2.0, 2.0 + 2.0_f64.sqrt()];
        for (a, b) in ev.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn trace_and_det_preserved_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 5, 16, 33] {
            let mut a = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = rng.random_range(-1.0..1.0);
                    a[(i, j)] = v;
                    a[(j, i)] = v;
                }
            }
            let tr: f64 = (0..n).map(|i| a[(i, i)]).sum();
            let ev = sym_eigenvalues(a).unwrap();
            let s: f64 = ev.iter().sum();
            assert!((s - tr).abs() < 1e-9 * (1.0 + tr.abs()), "n={n}");
        }
    }

    #[test]
    fn cholesky_logdet_and_solve() {
        // A = [[4,2],[2,3]], det = 8.
        let mut a = Mat::from_fn(2, 2, |i, j| [[4.0, 2.0], [2.0, 3.0]][i][j]);
        let orig = a.clone();
        cholesky_in_place(&mut a).unwrap();
        assert!((cholesky_ln_det(&a) - 8.0_f64.ln()).abs() < 1e-12);
        let x = cholesky_solve_refined(&orig, &a, &[1.0, 0.0]);
        // Solution of A x = e1: x = (3/8, -2/8).
        assert!((x[0] - 0.375).abs() < 1e-12);
        assert!((x[1] + 0.25).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = Mat::from_fn(2, 2, |i, j| [[1.0, 2.0], [2.0, 1.0]][i][j]);
        assert!(cholesky_in_place(&mut a).is_err());
    }
}
