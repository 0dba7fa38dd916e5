use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AlgElement, FinDimCStar, StarMorphism};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, SpanBasis};

const SPAN_TOL: f64 = 1e-10;
const CLUSTER_GAP: f64 = 1e-6;
const SEED: u64 = 0x5eed_c0de;

/// A unital *-subalgebra of a finite-dimensional C*-algebra, together with
/// its abstract block structure and the embedding into the ambient algebra.
#[derive(Debug, Clone)]
pub struct Subalgebra {
    pub ambient: FinDimCStar,
    pub algebra: FinDimCStar,
    pub embedding: StarMorphism,
    span: SpanBasis,
}

fn to_vec(e: &AlgElement) -> CVec {
    CVec::from_vec(e.coords())
}

fn span_elements(ambient: &FinDimCStar, span: &SpanBasis) -> Vec<AlgElement> {
    span.vectors().iter().map(|v| AlgElement::from_coords(ambient, v.as_slice())).collect()
}

/// Closes `gens` (plus the unit) under adjoints, sums and products.
pub(crate) fn star_closure(ambient: &FinDimCStar, gens: &[AlgElement], unital: bool) -> SpanBasis {
    let mut span = SpanBasis::new(ambient.dim(), SPAN_TOL);
    if unital {
        span.insert(&to_vec(&AlgElement::one(ambient)));
    }
    for g in gens {
        span.insert(&to_vec(g));
        span.insert(&to_vec(&g.adjoint()));
    }
    let mut done = 0;
    loop {
        let elems = span_elements(ambient, &span);
        let before = span.len();
        for i in 0..elems.len() {
            for j in 0..elems.len() {
                if i < done && j < done {
                    continue;
                }
                span.insert(&to_vec(&elems[i].mul(&elems[j])));
            }
        }
        done = before;
        if span.len() == before {
            return span;
        }
    }
}

impl Subalgebra {
    /// The unital *-subalgebra generated by `gens`.
    pub fn generated_by(ambient: &FinDimCStar, gens: &[AlgElement]) -> Result<Self> {
        for g in gens {
            g.check_in(ambient)?;
        }
        if ambient.is_zero() {
            return Ok(Subalgebra {
                ambient: ambient.clone(),
                algebra: FinDimCStar::zero(),
                embedding: StarMorphism::identity(ambient),
                span: SpanBasis::new(0, SPAN_TOL),
            });
        }
        let span = star_closure(ambient, gens, true);
        Self::decompose(ambient, span)
    }

    /// Treats a spanning set as a subalgebra, checking closure.
    pub fn from_basis(ambient: &FinDimCStar, basis: &[AlgElement]) -> Result<Self> {
        let mut span = SpanBasis::new(ambient.dim(), SPAN_TOL);
        for b in basis {
            b.check_in(ambient)?;
            span.insert(&to_vec(b));
        }
        let closed = star_closure(ambient, basis, true);
        if closed.len() != span.len() {
            return Err(Error::InvalidInput(format!(
                "span of the given elements is not a unital *-subalgebra (closure has dimension {} > {})",
                closed.len(),
                span.len()
            )));
        }
        Self::decompose(ambient, closed)
    }

    pub fn dim(&self) -> usize {
        self.span.len()
    }

    pub fn contains(&self, a: &AlgElement) -> bool {
        self.span.contains(&to_vec(a))
    }

    pub fn residual(&self, a: &AlgElement) -> f64 {
        self.span.residual(&to_vec(a))
    }

    pub fn contains_subalgebra(&self, other: &Subalgebra) -> bool {
        other.span.vectors().iter().all(|v| self.span.contains(v))
    }

    pub fn spanning_elements(&self) -> Vec<AlgElement> {
        span_elements(&self.ambient, &self.span)
    }

    /// Inclusion `self → other` as a morphism of the abstract algebras, when
    /// `self ⊆ other` inside the common ambient algebra.
    pub fn inclusion_into(&self, other: &Subalgebra) -> Result<StarMorphism> {
        if self.ambient != other.ambient || !other.contains_subalgebra(self) {
            return Err(Error::InvalidInput("subalgebra is not contained in the target".into()));
        }
        Ok(StarMorphism::from_images(&self.algebra, &other.algebra, |b, r, col| {
            let e = self.embedding.apply_unchecked(&AlgElement::matrix_unit(&self.algebra, b, r, col));
            other.embedding.preimage(&e).expect("embedding is injective").0
        }))
    }

    fn decompose(ambient: &FinDimCStar, span: SpanBasis) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let basis = span_elements(ambient, &span);
        let d = basis.len();
        let n_amb = ambient.dim();

        // center: coefficients c with [Σ c_k b_k, b_l] = 0 for all l
        let mut sys = linalg::zeros(n_amb * d, d);
        for (k, bk) in basis.iter().enumerate() {
            for (l, bl) in basis.iter().enumerate() {
                let comm = bk.mul(bl).sub(&bl.mul(bk)).coords();
                for (r, v) in comm.into_iter().enumerate() {
                    sys[(l * n_amb + r, k)] = v;
                }
            }
        }
        let center_coeffs = linalg::null_space(&sys, 1e-8);
        let center: Vec<AlgElement> = (0..center_coeffs.ncols())
            .map(|j| {
                basis
                    .iter()
                    .enumerate()
                    .fold(AlgElement::zero(ambient), |acc, (k, b)| acc.add(&b.scale(center_coeffs[(k, j)])))
            })
            .collect();

        for _attempt in 0..8 {
            if let Some((algebra, units)) = Self::try_matrix_units(ambient, &basis, &center, &mut rng) {
                let embedding = StarMorphism::from_images(&algebra, ambient, |b, r, col| units[b][r][col].clone());
                return Ok(Subalgebra { ambient: ambient.clone(), algebra, embedding, span });
            }
        }
        Err(Error::InvalidInput("could not decompose subalgebra into matrix blocks".into()))
    }

    /// Matrix units `units[block][r][c]` of the subalgebra spanned by `basis`.
    #[allow(clippy::type_complexity)]
    fn try_matrix_units(
        ambient: &FinDimCStar,
        basis: &[AlgElement],
        center: &[AlgElement],
        rng: &mut ChaCha8Rng,
    ) -> Option<(FinDimCStar, Vec<Vec<Vec<AlgElement>>>)> {
        use rand::Rng;
        let mut h = AlgElement::zero(ambient);
        for z in center {
            let r: f64 = rng.gen_range(-1.0..1.0);
            h = h.add(&z.add(&z.adjoint()).scale(c(r, 0.0)));
        }
        let central = spectral_projections(ambient, &h);
        let mut blocks: Vec<(usize, Vec<Vec<AlgElement>>)> = Vec::new();
        for p in central {
            let mut local = SpanBasis::new(ambient.dim(), SPAN_TOL);
            for b in basis {
                local.insert(&to_vec(&b.mul(&p)));
            }
            let dp = local.len();
            let m = (dp as f64).sqrt().round() as usize;
            if m * m != dp || m == 0 {
                return None;
            }
            // generic Hermitian element of pB
            let local_elems = span_elements(ambient, &local);
            let mut g = AlgElement::zero(ambient);
            for e in &local_elems {
                let r: f64 = rng.gen_range(-1.0..1.0);
                g = g.add(&e.add(&e.adjoint()).scale(c(r, 0.0)));
            }
            let pm = p.to_matrix();
            let q = linalg::range_basis(&pm, 0.5);
            let restricted = q.adjoint() * g.to_matrix() * &q;
            let (vals, vecs) = linalg::hermitian_eigen(&restricted);
            let mut clusters: Vec<Vec<usize>> = Vec::new();
            for (i, &v) in vals.iter().enumerate() {
                match clusters.last_mut() {
                    Some(cl) if (v - vals[*cl.last().unwrap()]).abs() < CLUSTER_GAP => cl.push(i),
                    _ => clusters.push(vec![i]),
                }
            }
            if clusters.len() != m {
                return None;
            }
            let k = q.ncols() / m;
            if clusters.iter().any(|cl| cl.len() != k) {
                return None;
            }
            let diag_proj: Vec<AlgElement> = clusters
                .iter()
                .map(|cl| {
                    let mut v = linalg::zeros(q.ncols(), cl.len());
                    for (t, &i) in cl.iter().enumerate() {
                        v.set_column(t, &vecs.column(i));
                    }
                    let full = &q * &v;
                    AlgElement::from_block_matrix(ambient, &(&full * full.adjoint()))
                })
                .collect();
            // a generic element of pB to connect the diagonal projections
            let mut x = AlgElement::zero(ambient);
            for e in &local_elems {
                let (re, im): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                x = x.add(&e.scale(c(re, im)));
            }
            let mut col0 = Vec::with_capacity(m);
            col0.push(diag_proj[0].clone());
            for e_ii in &diag_proj[1..] {
                let y = e_ii.mul(&x).mul(&diag_proj[0]);
                let nrm = y.norm();
                if nrm < 1e-6 {
                    return None;
                }
                col0.push(&y * (1.0 / nrm));
            }
            let units: Vec<Vec<AlgElement>> =
                (0..m).map(|r| (0..m).map(|s| col0[r].mul(&col0[s].adjoint())).collect()).collect();
            let first = first_diagonal_index(&pm);
            blocks.push((first, units));
        }
        blocks.sort_by_key(|(first, _)| *first);
        let algebra = FinDimCStar { blocks: blocks.iter().map(|(_, u)| u.len()).collect() };
        Some((algebra, blocks.into_iter().map(|(_, u)| u).collect()))
    }
}

fn first_diagonal_index(m: &CMat) -> usize {
    (0..m.nrows()).find(|&i| m[(i, i)].norm() > 0.25).unwrap_or(usize::MAX)
}

/// Spectral projections of a Hermitian element, one per distinct eigenvalue.
fn spectral_projections(ambient: &FinDimCStar, h: &AlgElement) -> Vec<AlgElement> {
    let mut eig: Vec<(f64, usize, CVec)> = Vec::new();
    for (b, blk) in h.blocks.iter().enumerate() {
        let (vals, vecs) = linalg::hermitian_eigen(blk);
        for (i, v) in vals.into_iter().enumerate() {
            eig.push((v, b, vecs.column(i).into_owned()));
        }
    }
    eig.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out = Vec::new();
    let mut i = 0;
    while i < eig.len() {
        let mut j = i + 1;
        while j < eig.len() && (eig[j].0 - eig[j - 1].0).abs() < CLUSTER_GAP {
            j += 1;
        }
        let mut p = AlgElement::zero(ambient);
        for (_, b, v) in &eig[i..j] {
            p.blocks[*b] += v * v.adjoint();
        }
        out.push(p);
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{real_diag, ONE, ZERO};

    #[test]
    fn diagonal_subalgebra_of_m2() {
        let m2 = FinDimCStar::matrix(2);
        let d = AlgElement::from_matrix(real_diag(&[1.0, 0.0]));
        let sub = Subalgebra::generated_by(&m2, &[d]).unwrap();
        assert_eq!(sub.algebra, FinDimCStar::commutative(2));
        assert_eq!(sub.embedding.multiplicity, vec![vec![1, 1]]);
        assert!(sub.embedding.homomorphism_defect() < 1e-10);
    }

    #[test]
    fn whole_algebra_and_scalars() {
        let m2 = FinDimCStar::matrix(2);
        let x = AlgElement::from_matrix(crate::linalg::from_rows(&[&[ZERO, ONE], &[ZERO, ZERO]]));
        assert_eq!(Subalgebra::generated_by(&m2, &[x]).unwrap().algebra, m2);
        let scalars = Subalgebra::generated_by(&m2, &[]).unwrap();
        assert_eq!(scalars.algebra, FinDimCStar::matrix(1));
        assert_eq!(scalars.embedding.multiplicity, vec![vec![2]]);
    }

    #[test]
    fn amplified_block_in_m4() {
        // M2 ⊗ 1_2 inside M4
        let m4 = FinDimCStar::matrix(4);
        let gens: Vec<AlgElement> = FinDimCStar::matrix(2)
            .basis()
            .iter()
            .map(|e| AlgElement::from_matrix(linalg::kron(&e.blocks[0], &linalg::eye(2))))
            .collect();
        let sub = Subalgebra::generated_by(&m4, &gens).unwrap();
        assert_eq!(sub.algebra, FinDimCStar::matrix(2));
        assert_eq!(sub.embedding.multiplicity, vec![vec![2]]);
        for g in &gens {
            let (_, res) = sub.embedding.preimage(g).unwrap();
            assert!(res < 1e-10);
        }
    }

    #[test]
    fn inclusion_between_subalgebras() {
        let m2 = FinDimCStar::matrix(2);
        let small = Subalgebra::generated_by(&m2, &[]).unwrap();
        let diag = Subalgebra::generated_by(&m2, &[AlgElement::from_matrix(real_diag(&[1.0, 0.0]))]).unwrap();
        let inc = small.inclusion_into(&diag).unwrap();
        assert_eq!(inc.multiplicity, vec![vec![1], vec![1]]);
        assert!(diag.inclusion_into(&small).is_err());
    }

    #[test]
    fn non_closed_basis_rejected() {
        let m2 = FinDimCStar::matrix(2);
        let x = AlgElement::from_matrix(crate::linalg::from_rows(&[&[ZERO, ONE], &[ZERO, ZERO]]));
        assert!(Subalgebra::from_basis(&m2, &[AlgElement::one(&m2), x]).is_err());
    }
}
