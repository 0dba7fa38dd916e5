//! Finite-dimensional C*-algebras `⊕ᵢ M_{nᵢ}(ℂ)`, their elements and
//! *-morphisms in Bratteli normal form.

mod morphism;
mod subalgebra;

pub use morphism::{automorphisms_conjugate, conjugate_up_to_phase, unitary_conjugacy, StarMorphism};
pub use subalgebra::Subalgebra;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C64};

/// `⊕ᵢ M_{nᵢ}(ℂ)`; the empty block list is the zero algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinDimCStar {
    pub blocks: Vec<usize>,
}

impl FinDimCStar {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.contains(&0) {
            return Err(Error::InvalidInput("block sizes must be positive".into()));
        }
        Ok(FinDimCStar { blocks })
    }

    pub fn matrix(n: usize) -> Self {
        FinDimCStar { blocks: vec![n] }
    }

    pub fn zero() -> Self {
        FinDimCStar { blocks: Vec::new() }
    }

    /// `ℂ^k` as k one-dimensional blocks.
    pub fn commutative(k: usize) -> Self {
        FinDimCStar { blocks: vec![1; k] }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Size of the block-diagonal matrix realization.
    pub fn total_size(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Matrix units `E^{(b)}_{rc}` ordered by block, then column-major within
    /// the block (matching [`AlgElement::coords`]).
    pub fn basis(&self) -> Vec<AlgElement> {
        let mut out = Vec::with_capacity(self.dim());
        for (b, &n) in self.blocks.iter().enumerate() {
            for col in 0..n {
                for row in 0..n {
                    out.push(AlgElement::matrix_unit(self, b, row, col));
                }
            }
        }
        out
    }
}

impl fmt::Display for FinDimCStar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.blocks.iter().map(|n| format!("M{n}")).collect();
        write!(f, "{}", parts.join("⊕"))
    }
}

/// An element of a [`FinDimCStar`], one square matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgElement {
    pub blocks: Vec<CMat>,
}

impl AlgElement {
    pub fn new(algebra: &FinDimCStar, blocks: Vec<CMat>) -> Result<Self> {
        let e = AlgElement { blocks };
        e.check_in(algebra)?;
        Ok(e)
    }

    pub fn zero(algebra: &FinDimCStar) -> Self {
        AlgElement { blocks: algebra.blocks.iter().map(|&n| linalg::zeros(n, n)).collect() }
    }

    pub fn one(algebra: &FinDimCStar) -> Self {
        AlgElement { blocks: algebra.blocks.iter().map(|&n| linalg::eye(n)).collect() }
    }

    pub fn scalar(algebra: &FinDimCStar, z: C64) -> Self {
        AlgElement::one(algebra).scale(z)
    }

    pub fn matrix_unit(algebra: &FinDimCStar, block: usize, row: usize, col: usize) -> Self {
        let mut e = AlgElement::zero(algebra);
        e.blocks[block][(row, col)] = linalg::ONE;
        e
    }

    /// Single-block element.
    pub fn from_matrix(m: CMat) -> Self {
        AlgElement { blocks: vec![m] }
    }

    pub fn algebra(&self) -> FinDimCStar {
        FinDimCStar { blocks: self.blocks.iter().map(|b| b.nrows()).collect() }
    }

    pub fn check_in(&self, algebra: &FinDimCStar) -> Result<()> {
        if self.blocks.len() != algebra.blocks.len()
            || self.blocks.iter().zip(&algebra.blocks).any(|(b, &n)| b.nrows() != n || b.ncols() != n)
        {
            return Err(Error::ShapeMismatch(format!("element of {} is not in {algebra}", self.algebra())));
        }
        Ok(())
    }

    pub fn add(&self, other: &AlgElement) -> AlgElement {
        AlgElement { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &AlgElement) -> AlgElement {
        AlgElement { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect() }
    }

    pub fn mul(&self, other: &AlgElement) -> AlgElement {
        AlgElement { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect() }
    }

    pub fn scale(&self, z: C64) -> AlgElement {
        AlgElement { blocks: self.blocks.iter().map(|a| a * z).collect() }
    }

    pub fn adjoint(&self) -> AlgElement {
        AlgElement { blocks: self.blocks.iter().map(|a| a.adjoint()).collect() }
    }

    /// C*-norm: maximum operator norm over blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &AlgElement) -> f64 {
        self.sub(other).norm()
    }

    /// Coordinates in the matrix-unit basis of [`FinDimCStar::basis`].
    pub fn coords(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for b in &self.blocks {
            linalg::push_flat(b, &mut out);
        }
        out
    }

    pub fn from_coords(algebra: &FinDimCStar, coords: &[C64]) -> AlgElement {
        let mut blocks = Vec::with_capacity(algebra.blocks.len());
        let mut off = 0;
        for &n in &algebra.blocks {
            blocks.push(CMat::from_column_slice(n, n, &coords[off..off + n * n]));
            off += n * n;
        }
        AlgElement { blocks }
    }

    /// Block-diagonal matrix realization.
    pub fn to_matrix(&self) -> CMat {
        linalg::block_diag(&self.blocks)
    }

    /// Inverse of [`AlgElement::to_matrix`], dropping off-diagonal blocks.
    pub fn from_block_matrix(algebra: &FinDimCStar, m: &CMat) -> AlgElement {
        let mut blocks = Vec::new();
        let mut off = 0;
        for &n in &algebra.blocks {
            blocks.push(m.view((off, off), (n, n)).into_owned());
            off += n;
        }
        AlgElement { blocks }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }
}

impl std::ops::Mul<f64> for &AlgElement {
    type Output = AlgElement;
    fn mul(self, rhs: f64) -> AlgElement {
        self.scale(c(rhs, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_complex_gaussian;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_element(seed: u64, alg: &FinDimCStar) -> AlgElement {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        AlgElement { blocks: alg.blocks.iter().map(|&n| random_complex_gaussian(&mut rng, n, n)).collect() }
    }

    #[test]
    fn dimension_is_sum_of_squares() {
        assert_eq!(FinDimCStar::new(vec![1, 2, 3]).unwrap().dim(), 14);
        assert_eq!(FinDimCStar::zero().dim(), 0);
        assert!(FinDimCStar::new(vec![2, 0]).is_err());
    }

    #[test]
    fn coords_round_trip() {
        let alg = FinDimCStar::new(vec![2, 1]).unwrap();
        let t = random_element(3, &alg);
        assert_eq!(AlgElement::from_coords(&alg, &t.coords()), t);
        assert_eq!(alg.basis().len(), alg.dim());
    }

    proptest! {
        #[test]
        fn norm_is_submultiplicative_and_cstar(seed in 0u64..500) {
            let alg = FinDimCStar::new(vec![1, 2, 3]).unwrap();
            let t = random_element(seed, &alg);
            let s = random_element(seed + 10_000, &alg);
            prop_assert!(t.mul(&s).norm() <= t.norm() * s.norm() + 1e-10);
            let n = t.norm();
            prop_assert!((t.adjoint().mul(&t).norm() - n * n).abs() <= 1e-10 * n * n.max(1.0));
        }
    }
}
