//! Small dense complex linear algebra.
//!
//! Everything here operates on row-major `CMatrix` values of desk-scale size
//! (tens of rows at most). The two factorizations are cyclic Jacobi methods:
//! a two-sided sweep for Hermitian eigenproblems and a one-sided (Hestenes)
//! sweep for the SVD. Both share the same 2x2 complex rotation.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
#[allow(unused_imports)] // float methods are inherent when std is linked
use num_traits::{Float, Zero};

pub type C64 = Complex64;

const MAX_SWEEPS: usize = 100;

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        CMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            m.set_column(j, col);
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C64]) {
        assert_eq!(col.len(), self.rows);
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let base = i * out.cols;
                for (j, &b) in orow.iter().enumerate() {
                    out.data[base + j] += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |(A^dagger A - I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.adjoint().matmul(self);
        g.max_abs_diff(&Self::identity(g.rows))
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// The 2x2 unitary `J = [[jpp, jpq], [jqp, jqq]]` such that `J^dagger H J`
/// is diagonal for the Hermitian block `H = [[app, apq], [conj(apq), aqq]]`.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> [C64; 4] {
    let r = apq.norm();
    let phase = if r > 0.0 { apq / r } else { C64::new(1.0, 0.0) };
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
        sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let back = phase.conj();
    [
        C64::new(c, 0.0),
        C64::new(s, 0.0),
        back * (-s),
        back * c,
    ]
}

/// Applies `A <- A J` on columns `p`, `q`.
fn rotate_columns(a: &mut CMatrix, p: usize, q: usize, j: &[C64; 4]) {
    for i in 0..a.rows {
        let ap = a[(i, p)];
        let aq = a[(i, q)];
        a[(i, p)] = ap * j[0] + aq * j[2];
        a[(i, q)] = ap * j[1] + aq * j[3];
    }
}

/// Applies `A <- J^dagger A` on rows `p`, `q`.
fn rotate_rows(a: &mut CMatrix, p: usize, q: usize, j: &[C64; 4]) {
    for k in 0..a.cols {
        let ap = a[(p, k)];
        let aq = a[(q, k)];
        a[(p, k)] = j[0].conj() * ap + j[2].conj() * aq;
        a[(q, k)] = j[1].conj() * ap + j[3].conj() * aq;
    }
}

fn off_diagonal_norm_sqr(a: &CMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.rows {
        for j in 0..a.cols {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, ordered like `values`.
    pub vectors: CMatrix,
}

pub fn hermitian_eigen(h: &CMatrix) -> HermitianEigen {
    assert!(h.is_square(), "eigenproblem needs a square matrix");
    let n = h.rows;
    // symmetrize so rounding in the input cannot leak into the rotations
    let mut a = CMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);
    let scale = a.norm_sqr();

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm_sqr(&a);
        if off <= scale * 1e-32 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if apq.norm() <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) || apq.is_zero() {
                    a[(p, q)] = C64::zero();
                    a[(q, p)] = C64::zero();
                    continue;
                }
                let j = jacobi_rotation(app, aqq, apq);
                rotate_columns(&mut a, p, q, &j);
                rotate_rows(&mut a, p, q, &j);
                a[(p, q)] = C64::zero();
                a[(q, p)] = C64::zero();
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                rotate_columns(&mut v, p, q, &j);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    HermitianEigen { values, vectors }
}

/// Thin singular value decomposition `A = U diag(sigma) V^dagger` of a
/// square matrix, with `U` completed to a unitary on the null space.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    /// Singular values in descending order.
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided Jacobi SVD of a square matrix.
pub fn svd(m: &CMatrix) -> Svd {
    assert!(m.is_square(), "svd is only provided for square matrices");
    let n = m.rows;
    let mut w = m.clone();
    let mut v = CMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, C64::zero());
                for i in 0..n {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma.is_zero() {
                    continue;
                }
                rotated = true;
                let j = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut w, p, q, &j);
                rotate_columns(&mut v, p, q, &j);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| vec_norm(&w.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let sigma: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let v = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);

    let cols: Vec<Option<Vec<C64>>> = order
        .iter()
        .map(|&k| {
            let s = norms[k];
            if s > 1e-150 {
                Some(w.column(k).into_iter().map(|z| z / s).collect())
            } else {
                None
            }
        })
        .collect();
    let u = complete_orthonormal(n, &cols);
    Svd { u, sigma, v }
}

/// Unitary polar factor `U V^dagger` of a square matrix. Directions in the
/// null space are completed deterministically by Gram-Schmidt against the
/// standard basis, which reduces to the identity when the null space and
/// the range complement coincide.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let d = svd(m);
    d.u.matmul(&d.v.adjoint())
}

/// Orthonormalizes the given columns by modified Gram-Schmidt; `None`
/// entries and columns that collapse are filled from the standard basis.
pub fn complete_orthonormal(n: usize, cols: &[Option<Vec<C64>>]) -> CMatrix {
    let mut slots: Vec<Option<Vec<C64>>> = Vec::with_capacity(cols.len());
    for col in cols {
        let placed: Vec<Vec<C64>> = slots.iter().flatten().cloned().collect();
        slots.push(col.as_ref().and_then(|c| project_out(c, &placed)));
    }
    let mut candidates = 0..n;
    for j in 0..slots.len() {
        if slots[j].is_some() {
            continue;
        }
        let placed: Vec<Vec<C64>> = slots.iter().flatten().cloned().collect();
        loop {
            let e = candidates.next().expect("ran out of completion vectors");
            let mut unit = vec![C64::zero(); n];
            unit[e] = C64::new(1.0, 0.0);
            if let Some(u) = project_out(&unit, &placed) {
                slots[j] = Some(u);
                break;
            }
        }
    }
    let basis: Vec<Vec<C64>> = slots.into_iter().flatten().collect();
    CMatrix::from_columns(n, &basis)
}

/// Removes the components along `basis` (twice, for stability) and
/// normalizes; `None` when almost nothing is left.
fn project_out(v: &[C64], basis: &[Vec<C64>]) -> Option<Vec<C64>> {
    let start = vec_norm(v);
    if start == 0.0 {
        return None;
    }
    let mut u = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, &u);
            for (x, y) in u.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
    let norm = vec_norm(&u);
    if norm <= 1e-8 * start {
        return None;
    }
    Some(u.into_iter().map(|z| z / norm).collect())
}

/// Modified Gram-Schmidt QR of a full-rank square matrix, returning `Q`.
/// The implied `R` has a real positive diagonal, which makes the
/// factorization unique.
pub fn gram_schmidt_q(m: &CMatrix) -> CMatrix {
    let n = m.rows;
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(m.cols);
    for j in 0..m.cols {
        let mut u = m.column(j);
        for b in &q {
            let c = inner(b, &u);
            for (x, y) in u.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let norm = vec_norm(&u);
        assert!(norm > 0.0, "rank-deficient input to gram_schmidt_q");
        q.push(u.into_iter().map(|z| z / norm).collect());
    }
    CMatrix::from_columns(n, &q)
}
