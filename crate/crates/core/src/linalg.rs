//! Dense complex linear algebra shared by every other module.
//!
//! Everything here works on `DMatrix<Complex64>`; the heavier decompositions
//! come from nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{iθ}`
pub fn phase(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

pub fn diag(entries: &[C64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(entries))
}

pub fn real_diag(entries: &[f64]) -> CMat {
    diag(&entries.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
}

pub fn from_rows(rows: &[&[C64]]) -> CMat {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    CMat::from_fn(r, cols, |i, j| rows[i][j])
}

/// Largest singular value; zero for empty matrices.
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn rank(m: &CMat, tol: f64) -> usize {
    singular_values(m).into_iter().filter(|&s| s > tol).count()
}

pub fn unitarity_defect(u: &CMat) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    op_norm(&(u.adjoint() * u - eye(u.nrows())))
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    unitarity_defect(u) <= tol
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    op_norm(&(m - m.adjoint()))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn block_diag(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let m: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(n, m);
    let (mut r, mut col) = (0, 0);
    for b in blocks {
        out.view_mut((r, col), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        col += b.ncols();
    }
    out
}

/// Orthonormal basis (as columns) of the null space of `m`, using singular
/// values `<= tol`.
pub fn null_space(m: &CMat, tol: f64) -> CMat {
    let (r, cols) = m.shape();
    if cols == 0 {
        return zeros(0, 0);
    }
    if r == 0 {
        return eye(cols);
    }
    // pad with zero rows so that the SVD returns a full right factor
    let padded = if r < cols {
        let mut p = zeros(cols, cols);
        p.view_mut((0, 0), (r, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= tol)
        .collect();
    let mut out = zeros(cols, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        for j in 0..cols {
            out[(j, k)] = v_t[(i, j)].conj();
        }
    }
    out
}

/// Orthonormal basis of the column range of `m`.
pub fn range_basis(m: &CMat, tol: f64) -> CMat {
    let (r, cols) = m.shape();
    if r == 0 || cols == 0 {
        return zeros(r, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .collect();
    let mut out = zeros(r, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

/// Extends orthonormal columns `cols` (n × k) to an orthonormal basis of
/// `C^n`, returning only the added columns.
pub fn orthonormal_complement(cols: &CMat, n: usize) -> CMat {
    let mut basis: Vec<CVec> = (0..cols.ncols()).map(|j| cols.column(j).into_owned()).collect();
    let start = basis.len();
    for k in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = CVec::zeros(n);
        v[k] = ONE;
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / c(norm, 0.0));
        }
    }
    let mut out = zeros(n, basis.len() - start);
    for (k, b) in basis[start..].iter().enumerate() {
        out.set_column(k, b);
    }
    out
}

/// Moore-Penrose pseudo-inverse, dropping singular values below `tol`.
pub fn pseudo_inverse(m: &CMat, tol: f64) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return zeros(m.ncols(), m.nrows());
    }
    m.clone().svd(true, true).pseudo_inverse(tol).expect("both factors were computed")
}

/// Nearest unitary in the polar sense; used to clean accumulated drift.
pub fn nearest_unitary(m: &CMat) -> CMat {
    if m.nrows() == 0 {
        return m.clone();
    }
    let svd = m.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// Hermitian eigen-decomposition with eigenvalues sorted ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vecs)
}

/// Eigenvalues of a general square complex matrix via the Schur form.
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    match nalgebra::linalg::Schur::new(m.clone()).eigenvalues() {
        Some(v) => v.iter().cloned().collect(),
        None => {
            // complex Schur forms are triangular; read the diagonal directly
            let (_, t) = nalgebra::linalg::Schur::new(m.clone()).unpack();
            (0..t.nrows()).map(|i| t[(i, i)]).collect()
        }
    }
}

/// True iff the two multisets agree within `tol` under some bijection.
pub fn multisets_match(a: &[C64], b: &[C64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    // match tightest pairs first so clustered spectra do not steal partners
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut matched_a = vec![false; a.len()];
    let mut count = 0;
    for (d, i, j) in pairs {
        if d > tol {
            break;
        }
        if !matched_a[i] && !used[j] {
            matched_a[i] = true;
            used[j] = true;
            count += 1;
        }
    }
    count == a.len()
}

/// Flattens a matrix column-major into `out`.
pub fn push_flat(m: &CMat, out: &mut Vec<C64>) {
    out.extend(m.iter().cloned());
}

pub fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_complex_gaussian<R: Rng>(rng: &mut R, r: usize, cols: usize) -> CMat {
    CMat::from_fn(r, cols, |_, _| {
        // Box-Muller
        let u1: f64 = rng.gen::<f64>().max(1e-300);
        let u2: f64 = rng.gen();
        let rad = (-2.0 * u1.ln()).sqrt();
        c(rad * (2.0 * std::f64::consts::PI * u2).cos(), rad * (2.0 * std::f64::consts::PI * u2).sin())
    })
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase correction).
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    if n == 0 {
        return zeros(0, 0);
    }
    let g = random_complex_gaussian(rng, n, n);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = q.clone();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / c(d.norm(), 0.0) } else { ONE };
        for i in 0..n {
            out[(i, j)] = q[(i, j)] * ph;
        }
    }
    out
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let g = random_complex_gaussian(rng, n, n);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// Incrementally maintained orthonormal basis of a subspace of `C^n`.
#[derive(Debug, Clone)]
pub struct SpanBasis {
    dim: usize,
    vectors: Vec<CVec>,
    tol: f64,
}

impl SpanBasis {
    pub fn new(dim: usize, tol: f64) -> Self {
        SpanBasis { dim, vectors: Vec::new(), tol }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[CVec] {
        &self.vectors
    }

    fn project_out(&self, v: &CVec) -> CVec {
        let mut w = v.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &self.vectors {
                let p = b.dotc(&w);
                w -= b * p;
            }
        }
        w
    }

    /// Distance from `v` to the span.
    pub fn residual(&self, v: &CVec) -> f64 {
        self.project_out(v).norm()
    }

    pub fn residual_slice(&self, v: &[C64]) -> f64 {
        self.residual(&CVec::from_column_slice(v))
    }

    pub fn contains(&self, v: &CVec) -> bool {
        self.residual(v) <= self.tol * v.norm().max(1.0)
    }

    /// Adds `v` if it is not already in the span; returns whether it was added.
    pub fn insert(&mut self, v: &CVec) -> bool {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let w = self.project_out(v);
        let norm = w.norm();
        if norm <= self.tol * v.norm().max(1.0) {
            return false;
        }
        self.vectors.push(w / c(norm, 0.0));
        true
    }

    pub fn insert_slice(&mut self, v: &[C64]) -> bool {
        self.insert(&CVec::from_column_slice(v))
    }
}
