use serde::Serialize;

use super::{character_line_bundle, FiniteGroupRep};
use crate::error::{Error, Result};
use crate::fredholm::{index_finite, toeplitz_frame, validate_module, winding_number, FredholmNetModule, Symbol};
use crate::linalg::{self, CMat, C64, ONE};
use crate::matrix_cstar::{FinDimCStar, StarMorphism};
use crate::net::{Net, Representation};
use crate::poset_topology::{evaluate_character, pi1_presentation, Character, GroupPresentation, Poset};
use crate::report::ValidationReport;

pub const DEFAULT_SECTOR_TRUNCATION: usize = 16;

/// A pair of an irreducible group representation and a character of the
/// fundamental group.
#[derive(Debug, Clone)]
pub struct Sector {
    pub sigma: FiniteGroupRep,
    pub chi: Character,
}

impl Sector {
    pub fn tensor_character(&self, other: &Character) -> Result<Sector> {
        if other.values.len() != self.chi.values.len() {
            return Err(Error::InvalidSector("characters of different presentations".into()));
        }
        let values = self.chi.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Sector { sigma: self.sigma.clone(), chi: Character { values } })
    }
}

#[derive(Debug, Clone)]
pub struct SectorModule {
    pub sector: Sector,
    pub presentation: GroupPresentation,
    pub module: FredholmNetModule,
    pub truncation: usize,
    /// Dimension of the truncated fibers `2 · N · dim L_σ`.
    pub fiber_dim: usize,
}

/// Graded Toeplitz-mode module over the scalar net with coefficient fibers
/// `(L^χ ⊗ L_σ)^{⊕2}`, transports from the character line bundle and
/// `F = [[0, S*⊗1], [S⊗1, 0]]` with `S` the shift of symbol `z`.
pub fn twisted_sector_module(sector: &Sector, poset: &Poset, truncation: usize) -> Result<SectorModule> {
    if !sector.sigma.irreducible {
        return Err(Error::InvalidSector(format!("representation `{}` is reducible", sector.sigma.name)));
    }
    if truncation < 2 {
        return Err(Error::InvalidSector("truncation must be at least 2".into()));
    }
    let pres = pi1_presentation(poset, poset.name(0))?;
    let chi = evaluate_character(&pres, &sector.chi.values, 1e-10).map_err(|e| Error::InvalidSector(e.to_string()))?;
    let line = character_line_bundle(&chi, poset, &pres)?;
    let d = sector.sigma.dim();
    let unitaries: Vec<_> = poset
        .hasse_pairs()
        .into_iter()
        .map(|(a, b)| ((a, b), linalg::eye(2 * d) * line.unitary(a, b).expect("covering pair")[(0, 0)]))
        .collect();
    let bundle = crate::net::HilbertNetBundle::new(poset.clone(), vec![2 * d; poset.len()], unitaries)?;
    let scalars = FinDimCStar::matrix(1);
    let pi = StarMorphism::embedding(scalars.clone(), FinDimCStar::matrix(2 * d), vec![vec![2 * d]])?;
    let rep = Representation::new(Net::constant(poset.clone(), &scalars), bundle, vec![pi; poset.len()])?;
    let s = Symbol::monomial(1, linalg::eye(d));
    let f = Symbol::blocks(&Symbol::zero(d), &s.adjoint(), &s, &Symbol::zero(d));
    let mut gamma_diag = vec![1.0; d];
    gamma_diag.extend(vec![-1.0; d]);
    let gamma = linalg::real_diag(&gamma_diag);
    let mut module = FredholmNetModule::toeplitz(rep, Some(vec![gamma; poset.len()]), vec![f; poset.len()])?;
    module.truncation = truncation;
    Ok(SectorModule {
        sector: Sector { sigma: sector.sigma.clone(), chi },
        presentation: pres,
        module,
        truncation,
        fiber_dim: 2 * truncation * d,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorIndex {
    pub group: String,
    pub irrep: String,
    pub elements: Vec<String>,
    /// Trace of `σ(g)` on the kernel of `S* ⊗ 1`, as `[re, im]`.
    pub g_index: Vec<[f64; 2]>,
    pub classes: Vec<Vec<String>>,
    pub class_index: Vec<[f64; 2]>,
    pub index: i64,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    pub statistical_dimension: usize,
    /// Kernel dimensions of the square truncation, which cannot see the index.
    pub finite_kernel_dims: (usize, usize),
    pub report: ValidationReport,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Permutation of the first `modes` modes swapping `0` and `k`, tensored with `1_d`.
fn swap(modes: usize, k: usize, d: usize) -> CMat {
    let mut p = linalg::zeros(modes, modes);
    for i in 0..modes {
        let j = if i == 0 { k } else if i == k { 0 } else { i };
        p[(j, i)] = ONE;
    }
    linalg::kron(&p, &linalg::eye(d))
}

fn kernel_traces(sigma: &FiniteGroupRep, k: &CMat) -> Vec<C64> {
    let d = sigma.dim();
    let modes = k.nrows() / d;
    (0..sigma.order())
        .map(|g| (k.adjoint() * linalg::kron(&linalg::eye(modes), &sigma.sigma[g]) * k).trace())
        .collect()
}

/// G-index and statistical dimension of a twisted sector module.
pub fn sector_index(sm: &SectorModule, tol: f64) -> Result<SectorIndex> {
    let valid = validate_module(&sm.module, tol);
    if let Some(v) = valid.violations.first() {
        return Err(Error::InvalidSector(format!("module fails {} at {}", v.check, v.location.join("<"))));
    }
    let sigma = &sm.sector.sigma;
    let d = sigma.dim();
    let n = sm.truncation;
    let f = &sm.module.f[0];
    let t = Symbol {
        dim: d,
        coeffs: f.coeffs.iter().map(|(k, c)| (*k, c.view((d, 0), (d, d)).into_owned())).collect(),
    };
    let index = -winding_number(&t)?;
    let frame = toeplitz_frame(&t, n);
    let kernel = linalg::null_space(&frame, 1e-8);
    let cokernel = linalg::null_space(&frame.adjoint(), 1e-8);
    let mut report = ValidationReport::new();
    for c in ["winding_consistent", "character", "class_function", "omega_independence", "finite_cross_check"] {
        report.declare(c, tol);
    }
    if index != kernel.ncols() as i64 - cokernel.ncols() as i64 {
        report.fail(
            "winding_consistent",
            Vec::new(),
            format!("winding gives {index}, kernels give {} − {}", kernel.ncols(), cokernel.ncols()),
        );
    }
    let traces = kernel_traces(sigma, &cokernel);
    for (g, z) in traces.iter().enumerate() {
        report.residual("character", vec![sigma.elements[g].clone()], (z - sigma.character(g)).norm(), tol);
    }
    let classes = sigma.conjugacy_classes();
    for cl in &classes {
        let spread = cl.iter().map(|&g| (traces[g] - traces[cl[0]]).norm()).fold(0.0, f64::max);
        report.residual("class_function", vec![sigma.elements[cl[0]].clone()], spread, tol);
    }
    for k in [1, n / 2, n - 1] {
        let rows = frame.nrows() / d;
        let moved = swap(rows, k, d) * &frame * swap(n, k, d).transpose();
        let other = linalg::null_space(&moved.adjoint(), 1e-8);
        let res = if other.ncols() != cokernel.ncols() {
            f64::INFINITY
        } else {
            kernel_traces(sigma, &other).iter().zip(&traces).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
        };
        report.residual("omega_independence", vec![format!("mode {k}")], res, tol);
    }
    let mut shift = linalg::zeros(n, n);
    for i in 1..n {
        shift[(i, i - 1)] = ONE;
    }
    let square = index_finite(&linalg::kron(&shift, &linalg::eye(d)), 1e-10);
    let finite = kernel_traces(sigma, &square.cokernel);
    let res = finite.iter().zip(&traces).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    report.residual("finite_cross_check", Vec::new(), res, tol);
    Ok(SectorIndex {
        group: sigma.group.clone(),
        irrep: sigma.name.clone(),
        elements: sigma.elements.clone(),
        g_index: traces.iter().copied().map(pair).collect(),
        classes: classes.iter().map(|cl| cl.iter().map(|&g| sigma.elements[g].clone()).collect()).collect(),
        class_index: classes.iter().map(|cl| pair(traces[cl[0]])).collect(),
        index,
        kernel_dim: kernel.ncols(),
        cokernel_dim: cokernel.ncols(),
        statistical_dimension: cokernel.ncols(),
        finite_kernel_dims: (square.kernel_dim, square.cokernel_dim),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::{c, phase};
    use proptest::prelude::*;

    fn sector(group: &str, irrep: &str, chi: C64) -> Sector {
        Sector { sigma: FiniteGroupRep::by_name(group, irrep).unwrap(), chi: Character { values: vec![chi] } }
    }

    #[test]
    fn module_dimensions_and_validity() {
        let p = catalog::c6_poset();
        let sm = twisted_sector_module(&sector("z2", "sign", ONE), &p, 16).unwrap();
        assert_eq!(sm.fiber_dim, 32);
        assert!(validate_module(&sm.module, 1e-10).is_valid());
        let sm = twisted_sector_module(&sector("s3", "standard", c(-1.0, 0.0)), &p, 16).unwrap();
        assert_eq!(sm.fiber_dim, 64);
        assert!(validate_module(&sm.module, 1e-10).is_valid());
        let twisted = p
            .hasse_pairs()
            .into_iter()
            .filter(|&(a, b)| (sm.module.representation.bundle.unitary(a, b).unwrap()[(0, 0)] - ONE).norm() > 1e-12)
            .count();
        assert_eq!(twisted, 1);
        let mut bad = sm.clone();
        bad.module.f[3] = bad.module.f[3].scale(c(-1.0, 0.0));
        assert!(!validate_module(&bad.module, 1e-10).is_valid());
        assert!(matches!(sector_index(&bad, 1e-10), Err(Error::InvalidSector(_))));
    }

    #[test]
    fn indices() {
        let p = catalog::c6_poset();
        for (g, irrep, dim, classes) in [
            ("z2", "sign", 1, vec![1.0, -1.0]),
            ("s3", "standard", 2, vec![2.0, 0.0, -1.0]),
            ("s3", "trivial", 1, vec![1.0, 1.0, 1.0]),
        ] {
            let sm = twisted_sector_module(&sector(g, irrep, c(-1.0, 0.0)), &p, 16).unwrap();
            let r = sector_index(&sm, 1e-10).unwrap();
            assert!(r.report.is_valid(), "{g} {irrep}: {:?}", r.report.violations);
            assert_eq!(r.statistical_dimension, dim);
            assert_eq!(r.index, -(dim as i64));
            assert_eq!(r.finite_kernel_dims, (dim, dim));
            for (v, want) in r.class_index.iter().zip(&classes) {
                assert!((v[0] - want).abs() < 1e-10 && v[1].abs() < 1e-10);
            }
        }
    }

    #[test]
    fn invalid_sectors() {
        let p = catalog::c6_poset();
        let z2 = FiniteGroupRep::z2("sign").unwrap();
        let reducible = FiniteGroupRep::new("z2", "sum", z2.elements.clone(), z2.table.clone(), vec![linalg::eye(2), linalg::real_diag(&[1.0, -1.0])]).unwrap();
        let s = Sector { sigma: reducible, chi: Character { values: vec![ONE] } };
        assert!(matches!(twisted_sector_module(&s, &p, 8), Err(Error::InvalidSector(_))));
        let s = Sector { sigma: z2, chi: Character { values: vec![ONE, ONE] } };
        assert!(matches!(twisted_sector_module(&s, &p, 8), Err(Error::InvalidSector(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn trivial_character_leaves_index_unchanged(theta in 0.0f64..std::f64::consts::TAU, n in 4usize..20) {
            let p = catalog::c6_poset();
            let s = sector("s3", "standard", phase(theta));
            let a = sector_index(&twisted_sector_module(&s, &p, n).unwrap(), 1e-10).unwrap();
            let t = s.tensor_character(&Character { values: vec![ONE] }).unwrap();
            let b = sector_index(&twisted_sector_module(&t, &p, n).unwrap(), 1e-10).unwrap();
            prop_assert_eq!(a.statistical_dimension, b.statistical_dimension);
            prop_assert_eq!(a.g_index, b.g_index);
            prop_assert!(a.report.is_valid());
        }
    }
}
