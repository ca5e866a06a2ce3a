//! Minimal dense linear algebra: row-major matrices, LU solves, Householder
//! least squares, Kronecker products, and a cyclic Jacobi eigensolver for
//! symmetric matrices. Everything here works at desk scale (N <= 2^20 entries
//! assembled, solves up to a few thousand rows) and is deliberately plain
//! loop-based code so it runs identically with and without `std`.

use alloc::vec;
use alloc::vec::Vec;

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
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = out.row_mut(i);
                for j in 0..src.len() {
                    dst[j] += aik * src[j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            out[i] = dot(self.row(i), x);
        }
        out
    }

    /// `A^T x` without forming the transpose.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len());
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let row = self.row(i);
            for j in 0..self.cols {
                out[j] += row[j] * xi;
            }
        }
        out
    }

    /// Gram matrix `A^T A`.
    pub fn gram(&self) -> Mat {
        let mut g = Mat::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let row = self.row(i);
            for a in 0..self.cols {
                let ra = row[a];
                if ra == 0.0 {
                    continue;
                }
                let dst = g.row_mut(a);
                for b in 0..self.cols {
                    dst[b] += ra * row[b];
                }
            }
        }
        g
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Mat) -> Mat {
        let (p, q) = (self.rows, self.cols);
        let (r, s) = (other.rows, other.cols);
        let mut out = Mat::zeros(p * r, q * s);
        for i in 0..p {
            for j in 0..q {
                let aij = self[(i, j)];
                if aij == 0.0 {
                    continue;
                }
                for k in 0..r {
                    for l in 0..s {
                        out[(i * r + k, j * s + l)] = aij * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(libm::fabs(v)))
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (&a, &b)| m.max(libm::fabs(a - b)))
    }

    /// 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        let mut best = 0.0_f64;
        for j in 0..self.cols {
            let mut s = 0.0;
            for i in 0..self.rows {
                s += libm::fabs(self[(i, j)]);
            }
            best = best.max(s);
        }
        best
    }

    /// Column `j` copied out.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Matrix with the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        Mat::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    /// Scale every entry in place.
    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.data {
            *v *= factor;
        }
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

pub fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(dot(v, v))
}

/// LU factorization with partial pivoting.
pub struct LuFactor {
    lu: Mat,
    perm: Vec<usize>,
    /// Ratio of the largest to smallest absolute pivot; a cheap conditioning
    /// indicator reported alongside the solve.
    pub pivot_ratio: f64,
}

impl LuFactor {
    pub fn new(a: &Mat) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::InvalidArgument("LU requires a square matrix".into()));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_piv = f64::INFINITY;
        let mut max_piv = 0.0_f64;
        for k in 0..n {
            let mut p = k;
            let mut best = libm::fabs(lu[(k, k)]);
            for i in k + 1..n {
                let v = libm::fabs(lu[(i, k)]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Numerical("singular matrix in LU".into()));
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let piv = lu[(k, k)];
            min_piv = min_piv.min(libm::fabs(piv));
            max_piv = max_piv.max(libm::fabs(piv));
            for i in k + 1..n {
                let factor = lu[(i, k)] / piv;
                lu[(i, k)] = factor;
                if factor == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] -= factor * v;
                }
            }
        }
        Ok(LuFactor {
            lu,
            perm,
            pivot_ratio: max_piv / min_piv,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        x
    }

    /// Solve `A^T x = b` using the same factorization
    /// (`A^T = U^T L^T P`).
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        // U^T w = b (forward substitution on the transposed upper factor)
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu[(j, i)] * y[j];
            }
            y[i] = s / self.lu[(i, i)];
        }
        // L^T z = w (unit diagonal, backward)
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu[(j, i)] * y[j];
            }
            y[i] = s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    /// One-norm condition estimate, `||A||_1 * est(||A^-1||_1)` with
    /// Hager's power iteration on the inverse.
    pub fn condition_estimate(&self, a: &Mat) -> f64 {
        let n = self.lu.rows;
        if n == 0 {
            return 1.0;
        }
        let mut v = vec![1.0 / n as f64; n];
        let mut inv_norm = 0.0_f64;
        for _ in 0..5 {
            let y = self.solve(&v);
            let y_norm: f64 = y.iter().map(|t| libm::fabs(*t)).sum();
            inv_norm = inv_norm.max(y_norm);
            let sign: Vec<f64> = y
                .iter()
                .map(|&t| if t >= 0.0 { 1.0 } else { -1.0 })
                .collect();
            let z = self.solve_transpose(&sign);
            let (mut best, mut best_j) = (0.0_f64, 0);
            for (j, &zj) in z.iter().enumerate() {
                if libm::fabs(zj) > best {
                    best = libm::fabs(zj);
                    best_j = j;
                }
            }
            let mut next = vec![0.0; n];
            next[best_j] = 1.0;
            if next == v {
                break;
            }
            v = next;
        }
        a.norm_one() * inv_norm
    }
}

/// Least-squares outcome of [`lstsq`].
pub struct Lstsq {
    pub solution: Vec<f64>,
    /// Set when the column set was (numerically) rank deficient or the
    /// system was underdetermined; the returned solution is then the
    /// minimum-norm least-squares solution via an eigendecomposition
    /// pseudo-inverse.
    pub rank_deficient: bool,
}

/// Minimize `||A y - b||_2` by Householder QR. Falls back to the
/// minimum-norm pseudo-inverse solution when A is rank deficient or has
/// more columns than rows.
pub fn lstsq(a: &Mat, b: &[f64]) -> Lstsq {
    let (m, k) = (a.rows, a.cols);
    assert_eq!(b.len(), m);
    if k == 0 {
        return Lstsq {
            solution: Vec::new(),
            rank_deficient: false,
        };
    }
    if k > m {
        return pseudo_inverse_solve(a, b);
    }
    let mut r = a.clone();
    let mut rhs = b.to_vec();
    let mut col_scale = 0.0_f64;
    for j in 0..k {
        // Householder reflector zeroing r[j+1.., j]
        let mut alpha = 0.0;
        for i in j..m {
            alpha += r[(i, j)] * r[(i, j)];
        }
        alpha = libm::sqrt(alpha);
        col_scale = col_scale.max(alpha);
        if alpha <= col_scale * 1e-13 {
            return pseudo_inverse_solve(a, b);
        }
        if r[(j, j)] > 0.0 {
            alpha = -alpha;
        }
        let mut v = vec![0.0; m - j];
        v[0] = r[(j, j)] - alpha;
        for i in j + 1..m {
            v[i - j] = r[(i, j)];
        }
        let vtv = dot(&v, &v);
        if vtv == 0.0 {
            continue;
        }
        for col in j..k {
            let mut s = 0.0;
            for i in j..m {
                s += v[i - j] * r[(i, col)];
            }
            let factor = 2.0 * s / vtv;
            for i in j..m {
                r[(i, col)] -= factor * v[i - j];
            }
        }
        let mut s = 0.0;
        for i in j..m {
            s += v[i - j] * rhs[i];
        }
        let factor = 2.0 * s / vtv;
        for i in j..m {
            rhs[i] -= factor * v[i - j];
        }
        r[(j, j)] = alpha;
    }
    // detect rank deficiency on the triangular factor
    let rmax = (0..k).fold(0.0_f64, |acc, j| acc.max(libm::fabs(r[(j, j)])));
    for j in 0..k {
        if libm::fabs(r[(j, j)]) <= rmax * 1e-13 {
            return pseudo_inverse_solve(a, b);
        }
    }
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = rhs[i];
        for j in i + 1..k {
            s -= r[(i, j)] * y[j];
        }
        y[i] = s / r[(i, i)];
    }
    Lstsq {
        solution: y,
        rank_deficient: false,
    }
}

/// Minimum-norm least squares via the eigendecomposition pseudo-inverse of
/// the (small) Gram matrix. Only reached on degenerate column sets.
fn pseudo_inverse_solve(a: &Mat, b: &[f64]) -> Lstsq {
    let k = a.cols;
    let gram = a.gram();
    let atb = a.tr_matvec(b);
    let (eigvals, eigvecs) = symmetric_eigen(&gram);
    let lmax = eigvals.iter().fold(0.0_f64, |m, &v| m.max(libm::fabs(v)));
    let tol = lmax * 1e-12;
    let mut y = vec![0.0; k];
    for (idx, &lam) in eigvals.iter().enumerate() {
        if libm::fabs(lam) <= tol {
            continue;
        }
        let v = eigvecs.column(idx);
        let coeff = dot(&v, &atb) / lam;
        for i in 0..k {
            y[i] += coeff * v[i];
        }
    }
    Lstsq {
        solution: y,
        rank_deficient: true,
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &Mat) -> Vec<f64> {
    symmetric_eigen(a).0
}

/// Full symmetric eigendecomposition `(values, vectors)`; eigenvalues
/// ascending, eigenvectors in the matching columns.
pub fn symmetric_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut vecs = Mat::identity(n);
    let fro = libm::sqrt(m.data.iter().map(|v| v * v).sum::<f64>());
    let tol = fro * 1e-14 + f64::MIN_POSITIVE;
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if libm::sqrt(2.0 * off) <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if libm::fabs(apq) <= tol / (n as f64) {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = c * mip - s * miq;
                    m[(i, q)] = s * mip + c * miq;
                }
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = c * mpj - s * mqj;
                    m[(q, j)] = s * mpj + c * mqj;
                }
                for i in 0..n {
                    let vip = vecs[(i, p)];
                    let viq = vecs[(i, q)];
                    vecs[(i, p)] = c * vip - s * viq;
                    vecs[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    (values, vectors)
}
