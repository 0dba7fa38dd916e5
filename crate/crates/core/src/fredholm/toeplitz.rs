use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C64, ONE, ZERO};

/// Distance of a root modulus from 1 below which a symbol counts as vanishing
/// on the circle.
pub const CIRCLE_TOL: f64 = 1e-8;

/// A matrix-valued Laurent polynomial `Σ_k c_k z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub dim: usize,
    pub coeffs: BTreeMap<i32, CMat>,
}

impl Symbol {
    pub fn zero(dim: usize) -> Self {
        Symbol { dim, coeffs: BTreeMap::new() }
    }

    pub fn constant(m: CMat) -> Self {
        Self::monomial(0, m)
    }

    pub fn identity(dim: usize) -> Self {
        Self::constant(linalg::eye(dim))
    }

    pub fn monomial(k: i32, m: CMat) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "symbol coefficients are square");
        let dim = m.nrows();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(k, m);
        Symbol { dim, coeffs }
    }

    /// Scalar symbol from `(power, coefficient)` pairs.
    pub fn scalar(terms: &[(i32, C64)]) -> Self {
        let mut s = Symbol::zero(1);
        for &(k, a) in terms {
            s = s.add(&Symbol::monomial(k, CMat::from_element(1, 1, a)));
        }
        s
    }

    /// Scalar symbol `z^shift · Π (z − r)`.
    pub fn from_roots(shift: i32, roots: &[C64]) -> Self {
        let mut s = Symbol::scalar(&[(shift, ONE)]);
        for &r in roots {
            s = s.mul(&Symbol::scalar(&[(1, ONE), (0, -r)]));
        }
        s
    }

    pub fn add(&self, o: &Symbol) -> Symbol {
        let mut coeffs = self.coeffs.clone();
        for (k, m) in &o.coeffs {
            let e = coeffs.entry(*k).or_insert_with(|| linalg::zeros(self.dim, self.dim));
            *e += m;
        }
        Symbol { dim: self.dim, coeffs }.pruned()
    }

    pub fn sub(&self, o: &Symbol) -> Symbol {
        self.add(&o.scale(c(-1.0, 0.0)))
    }

    pub fn scale(&self, z: C64) -> Symbol {
        Symbol { dim: self.dim, coeffs: self.coeffs.iter().map(|(k, m)| (*k, m * z)).collect() }
    }

    pub fn mul(&self, o: &Symbol) -> Symbol {
        let mut out = Symbol::zero(self.dim);
        for (i, a) in &self.coeffs {
            for (j, b) in &o.coeffs {
                out = out.add(&Symbol::monomial(i + j, a * b));
            }
        }
        out
    }

    /// Pointwise adjoint on the circle: `c_k ↦ c_{-k}^*`.
    pub fn adjoint(&self) -> Symbol {
        Symbol { dim: self.dim, coeffs: self.coeffs.iter().map(|(k, m)| (-k, m.adjoint())).collect() }
    }

    /// `s ⊗ 1_n`.
    pub fn tensor_identity(&self, n: usize) -> Symbol {
        let id = linalg::eye(n);
        Symbol { dim: self.dim * n, coeffs: self.coeffs.iter().map(|(k, m)| (*k, linalg::kron(m, &id))).collect() }
    }

    /// Block symbol `[[a, b], [c, d]]`.
    pub fn blocks(a: &Symbol, b: &Symbol, cc: &Symbol, d: &Symbol) -> Symbol {
        let (n, m) = (a.dim, d.dim);
        let mut keys: Vec<i32> = [a, b, cc, d].iter().flat_map(|s| s.coeffs.keys().copied()).collect();
        keys.sort_unstable();
        keys.dedup();
        let mut coeffs = BTreeMap::new();
        for k in keys {
            let mut big = linalg::zeros(n + m, n + m);
            let mut put = |s: &Symbol, r: usize, col: usize, rows: usize, cols: usize| {
                if let Some(x) = s.coeffs.get(&k) {
                    assert_eq!(x.shape(), (rows, cols), "block shapes");
                    big.view_mut((r, col), (rows, cols)).copy_from(x);
                }
            };
            put(a, 0, 0, n, n);
            put(d, n, n, m, m);
            put(b, 0, n, n, m);
            put(cc, n, 0, m, n);
            coeffs.insert(k, big);
        }
        Symbol { dim: n + m, coeffs }.pruned()
    }

    fn pruned(mut self) -> Symbol {
        self.coeffs.retain(|_, m| m.iter().any(|z| *z != ZERO));
        self
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.values().map(linalg::op_norm).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_norm() <= tol
    }

    pub fn min_degree(&self) -> i32 {
        self.coeffs.keys().next().copied().unwrap_or(0)
    }

    pub fn max_degree(&self) -> i32 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn eval(&self, z: C64) -> CMat {
        let mut out = linalg::zeros(self.dim, self.dim);
        for (k, m) in &self.coeffs {
            out += m * z.powi(*k);
        }
        out
    }

    /// Coefficients of `det(z^{-q} s(z))`, `q` the lowest power, low order first.
    pub fn det_polynomial(&self) -> Vec<C64> {
        let q = self.min_degree();
        let span = (self.max_degree() - q) as usize;
        let m = self.dim * span + 1;
        let samples: Vec<C64> = (0..m)
            .map(|k| {
                let z = linalg::phase(2.0 * PI * k as f64 / m as f64);
                let shifted = self.eval(z) * z.powi(-q);
                if self.dim == 0 {
                    ONE
                } else {
                    shifted.determinant()
                }
            })
            .collect();
        (0..m)
            .map(|j| {
                let s: C64 = (0..m).map(|k| samples[k] * linalg::phase(-2.0 * PI * (j * k) as f64 / m as f64)).sum();
                s / m as f64
            })
            .collect()
    }
}

/// Roots of a polynomial (low order first) via companion-matrix eigenvalues;
/// coefficients below `tol` relative to the largest are treated as zero.
pub fn polynomial_roots(coeffs: &[C64], tol: f64) -> Vec<C64> {
    let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let cut = |z: &C64| z.norm() <= tol * scale;
    let hi = coeffs.iter().rposition(|z| !cut(z)).unwrap();
    let lo = coeffs.iter().position(|z| !cut(z)).unwrap();
    let mut roots = vec![ZERO; lo];
    let deg = hi - lo;
    if deg > 0 {
        let lead = coeffs[hi];
        let mut comp = linalg::zeros(deg, deg);
        for i in 1..deg {
            comp[(i, i - 1)] = ONE;
        }
        for i in 0..deg {
            comp[(i, deg - 1)] = -coeffs[lo + i] / lead;
        }
        roots.extend(linalg::eigenvalues(&comp));
    }
    roots
}

/// Winding number of `det s` around the circle, by root counting.
pub fn winding_number(s: &Symbol) -> Result<i64> {
    let p = s.det_polynomial();
    if p.iter().all(|z| z.norm() <= 1e-14) {
        return Err(Error::SymbolVanishesOnCircle(1.0));
    }
    let roots = polynomial_roots(&p, 1e-12);
    let mut inside = 0i64;
    for r in roots {
        let m = r.norm();
        if (m - 1.0).abs() <= CIRCLE_TOL {
            return Err(Error::SymbolVanishesOnCircle(m));
        }
        if m < 1.0 {
            inside += 1;
        }
    }
    Ok(inside + s.dim as i64 * s.min_degree() as i64)
}

/// Index data of a Fredholm operator.
#[derive(Debug, Clone, Serialize)]
pub struct IndexResult {
    pub index: i64,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    #[serde(skip)]
    pub kernel: CMat,
    #[serde(skip)]
    pub cokernel: CMat,
}

/// `T_s` on `span{e_0..e_{N-1}} ⊗ ℂ^d` into `span{e_0..e_{N+p-1}} ⊗ ℂ^d`
/// with `p` the highest positive power.
pub fn toeplitz_frame(s: &Symbol, n: usize) -> CMat {
    let d = s.dim;
    let p = s.max_degree().max(0) as usize;
    let mut m = linalg::zeros((n + p) * d, n * d);
    for j in 0..n {
        for (&k, coef) in &s.coeffs {
            let i = j as i64 + k as i64;
            if i >= 0 && (i as usize) < n + p {
                m.view_mut((i as usize * d, j * d), (d, d)).copy_from(coef);
            }
        }
    }
    m
}

/// Kernel and cokernel of `T_s` read off the rectangular frames of `s` and of
/// its adjoint at truncation `n`.
pub fn frame_index(s: &Symbol, correction: Option<&CMat>, n: usize, tol: f64) -> IndexResult {
    let mut f = toeplitz_frame(s, n);
    let mut g = toeplitz_frame(&s.adjoint(), n);
    if let Some(k) = correction {
        let r = k.nrows().min(n * s.dim);
        let mut fv = f.view_mut((0, 0), (r, r));
        fv += k.view((0, 0), (r, r));
        let mut gv = g.view_mut((0, 0), (r, r));
        gv += k.view((0, 0), (r, r)).adjoint();
    }
    let kernel = linalg::null_space(&f, tol);
    let cokernel = linalg::null_space(&g, tol);
    IndexResult {
        index: kernel.ncols() as i64 - cokernel.ncols() as i64,
        kernel_dim: kernel.ncols(),
        cokernel_dim: cokernel.ncols(),
        kernel,
        cokernel,
    }
}

/// A Toeplitz operator with a finite-rank correction acting on the first
/// `truncation` modes.
#[derive(Debug, Clone)]
pub struct ToeplitzOp {
    pub symbol: Symbol,
    pub correction: Option<CMat>,
    pub truncation: usize,
}

impl ToeplitzOp {
    pub fn new(symbol: Symbol, truncation: usize) -> Self {
        ToeplitzOp { symbol, correction: None, truncation }
    }

    pub fn is_compact(&self, tol: f64) -> bool {
        self.symbol.is_zero(tol)
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.symbol.sub(&self.symbol.adjoint()).is_zero(tol)
            && self.correction.as_ref().is_none_or(|k| linalg::hermitian_defect(k) <= tol)
    }
}

/// `index = −wind(det s)`; kernels from the frame at the declared truncation.
pub fn toeplitz_index(op: &ToeplitzOp) -> Result<IndexResult> {
    let w = winding_number(&op.symbol)?;
    let frames = frame_index(&op.symbol, op.correction.as_ref(), op.truncation, 1e-8);
    Ok(IndexResult { index: -w, ..frames })
}
