use serde::Serialize;

use super::{AlgElement, FinDimCStar};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64};

const UNITARY_TOL: f64 = 1e-10;

/// A *-morphism `source → target` in Bratteli normal form.
///
/// For target block `j` the image of `(a_1, …, a_s)` is
/// `u_j · diag(a_1^{⊕k_{j1}}, …, a_s^{⊕k_{js}}, 0) · u_j*`, where
/// `k = multiplicity` and `u_j = conjugators[j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarMorphism {
    pub source: FinDimCStar,
    pub target: FinDimCStar,
    /// `multiplicity[j][i]`: copies of source block `i` in target block `j`.
    pub multiplicity: Vec<Vec<usize>>,
    #[serde(skip)]
    pub conjugators: Vec<CMat>,
}

impl StarMorphism {
    pub fn new(
        source: FinDimCStar,
        target: FinDimCStar,
        multiplicity: Vec<Vec<usize>>,
        conjugators: Vec<CMat>,
    ) -> Result<Self> {
        if multiplicity.len() != target.blocks.len() || conjugators.len() != target.blocks.len() {
            return Err(Error::ShapeMismatch(format!(
                "morphism {source} → {target}: expected {} multiplicity rows and conjugators",
                target.blocks.len()
            )));
        }
        for (j, row) in multiplicity.iter().enumerate() {
            if row.len() != source.blocks.len() {
                return Err(Error::ShapeMismatch(format!("multiplicity row {j} has wrong length")));
            }
            let used: usize = row.iter().zip(&source.blocks).map(|(k, n)| k * n).sum();
            if used > target.blocks[j] {
                return Err(Error::ShapeMismatch(format!(
                    "target block {j} of size {} cannot hold {used} source dimensions",
                    target.blocks[j]
                )));
            }
            let u = &conjugators[j];
            if u.nrows() != target.blocks[j] || !linalg::is_unitary(u, UNITARY_TOL) {
                return Err(Error::InvalidInput(format!("conjugator {j} is not a unitary of size {}", target.blocks[j])));
            }
        }
        Ok(StarMorphism { source, target, multiplicity, conjugators })
    }

    /// Embedding with trivial conjugators.
    pub fn embedding(source: FinDimCStar, target: FinDimCStar, multiplicity: Vec<Vec<usize>>) -> Result<Self> {
        let conj = target.blocks.iter().map(|&n| linalg::eye(n)).collect();
        Self::new(source, target, multiplicity, conj)
    }

    pub fn identity(alg: &FinDimCStar) -> Self {
        let k = alg.blocks.len();
        let mult = (0..k).map(|j| (0..k).map(|i| usize::from(i == j)).collect()).collect();
        StarMorphism {
            source: alg.clone(),
            target: alg.clone(),
            multiplicity: mult,
            conjugators: alg.blocks.iter().map(|&n| linalg::eye(n)).collect(),
        }
    }

    /// Inner automorphism `ad(u)`, one unitary per block.
    pub fn ad(alg: &FinDimCStar, unitaries: Vec<CMat>) -> Result<Self> {
        let id = Self::identity(alg);
        Self::new(alg.clone(), alg.clone(), id.multiplicity, unitaries)
    }

    /// `ad(u)` on the single-block algebra `M_n`.
    pub fn ad_matrix(u: &CMat) -> Result<Self> {
        Self::ad(&FinDimCStar::matrix(u.nrows()), vec![u.clone()])
    }

    /// Permutation of equal-size blocks: source block `i` lands in target block `perm[i]`.
    pub fn block_permutation(alg: &FinDimCStar, perm: &[usize]) -> Result<Self> {
        let k = alg.blocks.len();
        let mut mult = vec![vec![0; k]; k];
        for (i, &j) in perm.iter().enumerate() {
            if j >= k || alg.blocks[i] != alg.blocks[j] {
                return Err(Error::InvalidInput("block permutation must match block sizes".into()));
            }
            mult[j][i] = 1;
        }
        Self::embedding(alg.clone(), alg.clone(), mult)
    }

    pub fn apply(&self, t: &AlgElement) -> Result<AlgElement> {
        t.check_in(&self.source)?;
        Ok(self.apply_unchecked(t))
    }

    pub(crate) fn apply_unchecked(&self, t: &AlgElement) -> AlgElement {
        let mut blocks = Vec::with_capacity(self.target.blocks.len());
        for (j, &nj) in self.target.blocks.iter().enumerate() {
            let mut d = linalg::zeros(nj, nj);
            let mut off = 0;
            for (i, &ni) in self.source.blocks.iter().enumerate() {
                for _ in 0..self.multiplicity[j][i] {
                    d.view_mut((off, off), (ni, ni)).copy_from(&t.blocks[i]);
                    off += ni;
                }
            }
            let u = &self.conjugators[j];
            blocks.push(u * d * u.adjoint());
        }
        AlgElement { blocks }
    }

    pub fn is_unital(&self) -> bool {
        self.multiplicity.iter().zip(&self.target.blocks).all(|(row, &nj)| {
            row.iter().zip(&self.source.blocks).map(|(k, n)| k * n).sum::<usize>() == nj
        })
    }

    pub fn is_injective(&self) -> bool {
        (0..self.source.blocks.len()).all(|i| self.multiplicity.iter().map(|row| row[i]).sum::<usize>() >= 1)
    }

    /// Block permutation `σ` with source block `i` ↦ target block `σ(i)`, if
    /// the multiplicity matrix is a size-preserving permutation matrix.
    pub fn block_permutation_of(&self) -> Option<Vec<usize>> {
        if self.source != self.target {
            return None;
        }
        let k = self.source.blocks.len();
        let mut perm = vec![usize::MAX; k];
        for i in 0..k {
            let ones: Vec<usize> = (0..k).filter(|&j| self.multiplicity[j][i] != 0).collect();
            if ones.len() != 1 || self.multiplicity[ones[0]][i] != 1 {
                return None;
            }
            perm[i] = ones[0];
        }
        let mut seen = vec![false; k];
        for (i, &j) in perm.iter().enumerate() {
            if seen[j] || self.source.blocks[i] != self.target.blocks[j] {
                return None;
            }
            seen[j] = true;
        }
        Some(perm)
    }

    pub fn is_automorphism(&self) -> bool {
        self.block_permutation_of().is_some()
    }

    pub fn inverse(&self) -> Result<StarMorphism> {
        let perm = self.block_permutation_of().ok_or(Error::NotInvertible)?;
        let k = perm.len();
        let mut mult = vec![vec![0; k]; k];
        let mut conj = vec![linalg::zeros(0, 0); k];
        for (i, &j) in perm.iter().enumerate() {
            mult[i][j] = 1;
            conj[i] = self.conjugators[j].adjoint();
        }
        Ok(StarMorphism { source: self.target.clone(), target: self.source.clone(), multiplicity: mult, conjugators: conj })
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &StarMorphism) -> Result<StarMorphism> {
        if first.target != self.source {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {} → {} after {} → {}",
                self.source, self.target, first.source, first.target
            )));
        }
        Ok(Self::from_images(&first.source, &self.target, |b, r, col| {
            self.apply_unchecked(&first.apply_unchecked(&AlgElement::matrix_unit(&first.source, b, r, col)))
        }))
    }

    /// Maximum over the source matrix units of `‖self(E) − other(E)‖`.
    pub fn distance(&self, other: &StarMorphism) -> f64 {
        if self.source != other.source || self.target != other.target {
            return f64::INFINITY;
        }
        self.source
            .basis()
            .iter()
            .map(|e| self.apply_unchecked(e).dist(&other.apply_unchecked(e)))
            .fold(0.0, f64::max)
    }

    /// Normal form of the *-morphism determined by the images of the source
    /// matrix units. `image(b, r, c)` must return the image of `E^{(b)}_{rc}`
    /// in `target`, and the images must form a system of matrix units.
    pub fn from_images<F>(source: &FinDimCStar, target: &FinDimCStar, image: F) -> StarMorphism
    where
        F: Fn(usize, usize, usize) -> AlgElement,
    {
        let first_col: Vec<Vec<AlgElement>> = source
            .blocks
            .iter()
            .enumerate()
            .map(|(b, &n)| (0..n).map(|r| image(b, r, 0)).collect())
            .collect();
        let mut multiplicity = vec![vec![0usize; source.blocks.len()]; target.blocks.len()];
        let mut conjugators = Vec::with_capacity(target.blocks.len());
        for (j, &nj) in target.blocks.iter().enumerate() {
            let mut cols: Vec<CVec> = Vec::new();
            for (i, &ni) in source.blocks.iter().enumerate() {
                let p = &first_col[i][0].blocks[j];
                let w = linalg::range_basis(p, 1e-6);
                multiplicity[j][i] = w.ncols();
                for l in 0..w.ncols() {
                    let wl = w.column(l).into_owned();
                    for r in 0..ni {
                        cols.push(&first_col[i][r].blocks[j] * &wl);
                    }
                }
            }
            let mut u = linalg::zeros(nj, cols.len());
            for (k, v) in cols.iter().enumerate() {
                u.set_column(k, v);
            }
            let rest = linalg::orthonormal_complement(&u, nj);
            let mut full = linalg::zeros(nj, nj);
            full.view_mut((0, 0), (nj, u.ncols())).copy_from(&u);
            full.view_mut((0, u.ncols()), (nj, rest.ncols())).copy_from(&rest);
            conjugators.push(linalg::nearest_unitary(&full));
        }
        StarMorphism { source: source.clone(), target: target.clone(), multiplicity, conjugators }
    }

    /// Preimage of `a` under an injective morphism, read off from the first
    /// copy of each source block. Returns the preimage and the residual
    /// `‖self(preimage) − a‖`.
    pub fn preimage(&self, a: &AlgElement) -> Result<(AlgElement, f64)> {
        a.check_in(&self.target)?;
        if !self.is_injective() {
            return Err(Error::NotInvertible);
        }
        let mut blocks = Vec::with_capacity(self.source.blocks.len());
        for (i, &ni) in self.source.blocks.iter().enumerate() {
            let j = (0..self.target.blocks.len()).find(|&j| self.multiplicity[j][i] > 0).unwrap();
            let off: usize = (0..i).map(|k| self.multiplicity[j][k] * self.source.blocks[k]).sum();
            let u = &self.conjugators[j];
            let inner = u.adjoint() * &a.blocks[j] * u;
            blocks.push(inner.view((off, off), (ni, ni)).into_owned());
        }
        let pre = AlgElement { blocks };
        let residual = self.apply_unchecked(&pre).dist(a);
        Ok((pre, residual))
    }

    /// Residual of the *-homomorphism identities on the matrix units.
    pub fn homomorphism_defect(&self) -> f64 {
        let basis = self.source.basis();
        let mut worst: f64 = 0.0;
        for a in &basis {
            let fa = self.apply_unchecked(a);
            worst = worst.max(fa.adjoint().dist(&self.apply_unchecked(&a.adjoint())));
            for b in &basis {
                let lhs = self.apply_unchecked(&a.mul(b));
                worst = worst.max(lhs.dist(&fa.mul(&self.apply_unchecked(b))));
            }
        }
        worst
    }
}

fn spectrum_up_to_phase(u: &[C64], v: &[C64], tol: f64) -> bool {
    if u.len() != v.len() {
        return false;
    }
    if u.is_empty() {
        return true;
    }
    v.iter().any(|mu| {
        if mu.norm() == 0.0 {
            return false;
        }
        let lambda = u[0] / mu;
        let rotated: Vec<C64> = v.iter().map(|x| x * lambda).collect();
        linalg::multisets_match(u, &rotated, tol)
    })
}

/// Unitaries are unitarily conjugate iff their spectra agree with multiplicity.
pub fn unitary_conjugacy(u: &CMat, v: &CMat, tol: f64) -> bool {
    u.shape() == v.shape() && linalg::multisets_match(&linalg::eigenvalues(u), &linalg::eigenvalues(v), tol)
}

/// `ad(u)` and `ad(v)` are conjugate inner automorphisms iff `u ~ λv` for a phase `λ`.
pub fn conjugate_up_to_phase(u: &CMat, v: &CMat, tol: f64) -> bool {
    u.shape() == v.shape() && spectrum_up_to_phase(&linalg::eigenvalues(u), &linalg::eigenvalues(v), tol)
}

/// Cycle data of an automorphism: for each cycle of the block permutation,
/// its length, block size and the unitary implementing the return map.
fn cycle_data(a: &StarMorphism) -> Option<Vec<(usize, usize, CMat)>> {
    let perm = a.block_permutation_of()?;
    let k = perm.len();
    let mut seen = vec![false; k];
    let mut out = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        let n = a.source.blocks[start];
        let mut u = linalg::eye(n);
        loop {
            seen[i] = true;
            i = perm[i];
            u = &a.conjugators[i] * u;
            len += 1;
            if i == start {
                break;
            }
        }
        out.push((len, n, u));
    }
    Some(out)
}

/// Decides whether two automorphisms of the same algebra are conjugate in
/// `Aut(A)`: cycles of the block permutation must match in length and block
/// size, with return unitaries conjugate up to phase.
pub fn automorphisms_conjugate(a: &StarMorphism, b: &StarMorphism, tol: f64) -> Result<bool> {
    if a.source != b.source {
        return Ok(false);
    }
    let (Some(ca), Some(cb)) = (cycle_data(a), cycle_data(b)) else {
        return Err(Error::NotInvertible);
    };
    if ca.len() != cb.len() {
        return Ok(false);
    }
    // bipartite matching by augmenting paths
    let compatible: Vec<Vec<bool>> = ca
        .iter()
        .map(|(la, na, ua)| {
            cb.iter().map(|(lb, nb, ub)| la == lb && na == nb && conjugate_up_to_phase(ua, ub, tol)).collect()
        })
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; cb.len()];
    fn augment(i: usize, compat: &[Vec<bool>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for j in 0..owner.len() {
            if compat[i][j] && !seen[j] {
                seen[j] = true;
                if owner[j].is_none() || augment(owner[j].unwrap(), compat, owner, seen) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    for i in 0..ca.len() {
        let mut seen = vec![false; cb.len()];
        if !augment(i, &compatible, &mut owner, &mut seen) {
            return Ok(false);
        }
    }
    Ok(true)
}
