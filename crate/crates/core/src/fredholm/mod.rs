//! Nets of Fredholm modules, their validation, assembly into point families
//! and index computation.

mod toeplitz;

pub use toeplitz::{
    frame_index, polynomial_roots, toeplitz_frame, toeplitz_index, winding_number, IndexResult, Symbol, ToeplitzOp,
    CIRCLE_TOL,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::matrix_cstar::{AlgElement, FinDimCStar, StarMorphism};
use crate::net::{universal_fiber, validate_representation, HilbertNetBundle, NetMorphism, Representation};
use crate::poset_topology::pi1_presentation;
use crate::report::ValidationReport;
use crate::space_model::SpaceModel;

/// Default truncation for kernels of Toeplitz-mode modules.
pub const DEFAULT_TRUNCATION: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// All fibers finite-dimensional; `F` is a matrix per element.
    Finite,
    /// Fibers `ℓ²(ℕ) ⊗ ℂ^{d_o}`; `F` is a Toeplitz operator with matrix symbol,
    /// representation, bundle and grading act on the coefficient factor.
    Toeplitz,
}

/// A representation on a (graded) Hilbert net bundle with an operator
/// section `F`. In finite mode every symbol is constant.
#[derive(Debug, Clone)]
pub struct FredholmNetModule {
    pub representation: Representation,
    pub grading: Option<Vec<CMat>>,
    pub f: Vec<Symbol>,
    /// Period-2 automorphism with `Γ π(t) Γ = π(β(t))`; identity when absent.
    pub beta: Option<NetMorphism>,
    pub mode: Mode,
    pub truncation: usize,
}

impl FredholmNetModule {
    pub fn finite(representation: Representation, grading: Option<Vec<CMat>>, f: Vec<CMat>) -> Result<Self> {
        let f = f.into_iter().map(Symbol::constant).collect();
        Self::build(representation, grading, f, Mode::Finite, 1)
    }

    pub fn toeplitz(representation: Representation, grading: Option<Vec<CMat>>, f: Vec<Symbol>) -> Result<Self> {
        Self::build(representation, grading, f, Mode::Toeplitz, DEFAULT_TRUNCATION)
    }

    fn build(
        representation: Representation,
        grading: Option<Vec<CMat>>,
        f: Vec<Symbol>,
        mode: Mode,
        truncation: usize,
    ) -> Result<Self> {
        let dims = &representation.bundle.dims;
        if f.len() != dims.len() || f.iter().zip(dims).any(|(s, &d)| s.dim != d) {
            return Err(Error::ShapeMismatch("F must have one operator of fiber size per element".into()));
        }
        if let Some(g) = &grading {
            if g.len() != dims.len() || g.iter().zip(dims).any(|(m, &d)| m.shape() != (d, d)) {
                return Err(Error::ShapeMismatch("grading must have one operator of fiber size per element".into()));
            }
        }
        if mode == Mode::Finite && f.iter().any(|s| s.coeffs.keys().any(|&k| k != 0)) {
            return Err(Error::InvalidInput("finite-mode operators have constant symbols".into()));
        }
        Ok(FredholmNetModule { representation, grading, f, beta: None, mode, truncation })
    }

    pub fn with_beta(mut self, beta: NetMorphism) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn parity(&self) -> Parity {
        if self.grading.is_some() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn f_matrix(&self, o: usize) -> CMat {
        self.f[o].coeffs.get(&0).cloned().unwrap_or_else(|| linalg::zeros(self.f[o].dim, self.f[o].dim))
    }

    /// Direct sum over the same net.
    pub fn direct_sum(&self, other: &FredholmNetModule) -> Result<FredholmNetModule> {
        if self.mode != other.mode || self.parity() != other.parity() {
            return Err(Error::InvalidInput("direct sum needs equal mode and parity".into()));
        }
        let (r1, r2) = (&self.representation, &other.representation);
        if r1.net.fibers != r2.net.fibers || r1.net.poset != r2.net.poset {
            return Err(Error::InvalidInput("modules represent different nets".into()));
        }
        let bundle = r1.bundle.direct_sum(&r2.bundle)?;
        let components = (0..r1.components.len())
            .map(|o| {
                let target = FinDimCStar::matrix(bundle.dims[o]);
                let source = &r1.net.fibers[o];
                StarMorphism::from_images(source, &target, |b, r, c| {
                    let e = AlgElement::matrix_unit(source, b, r, c);
                    let m = linalg::block_diag(&[
                        r1.represent(o, &e).expect("fiber element"),
                        r2.represent(o, &e).expect("fiber element"),
                    ]);
                    AlgElement::from_matrix(m)
                })
            })
            .collect();
        let rep = Representation::new(r1.net.clone(), bundle, components)?;
        let f = self.f.iter().zip(&other.f).map(|(a, b)| Symbol::blocks(a, &zero_block(a, b), &zero_block(b, a), b)).collect();
        let grading = match (&self.grading, &other.grading) {
            (Some(g1), Some(g2)) => Some(g1.iter().zip(g2).map(|(a, b)| linalg::block_diag(&[a.clone(), b.clone()])).collect()),
            _ => None,
        };
        let mut out = Self::build(rep, grading, f, self.mode, self.truncation)?;
        out.beta = self.beta.clone();
        Ok(out)
    }
}

fn zero_block(rows: &Symbol, cols: &Symbol) -> Symbol {
    let mut s = Symbol::zero(rows.dim);
    s.coeffs.insert(0, linalg::zeros(rows.dim, cols.dim));
    s.dim = rows.dim;
    s
}

fn conj(s: &Symbol, u: &CMat) -> Symbol {
    Symbol { dim: u.nrows(), coeffs: s.coeffs.iter().map(|(k, m)| (*k, u * m * u.adjoint())).collect() }
}

fn names(m: &FredholmNetModule, os: &[usize]) -> Vec<String> {
    os.iter().map(|&o| m.representation.net.poset.name(o).to_string()).collect()
}

/// Residual table of the Fredholm-module relations.
pub fn validate_module(m: &FredholmNetModule, tol: f64) -> ValidationReport {
    let r = &m.representation;
    let mut rep = validate_representation(r, tol);
    for c in ["nondegenerate", "self_adjoint", "section", "compact_square", "compact_commutator"] {
        rep.declare(c, tol);
    }
    if !r.is_nondegenerate() {
        rep.fail("nondegenerate", Vec::new(), "some component is not unital");
    }
    let p = &r.net.poset;
    for (o, f) in m.f.iter().enumerate() {
        rep.residual("self_adjoint", names(m, &[o]), f.sub(&f.adjoint()).max_norm(), tol);
    }
    for (a, b) in p.strict_pairs() {
        let u = r.bundle.unitary(a, b).expect("a < b");
        if !u.is_square() {
            rep.fail("section", names(m, &[a, b]), "transport between fibers of different size");
            continue;
        }
        rep.residual("section", names(m, &[a, b]), conj(&m.f[a], u).sub(&m.f[b]).max_norm(), tol);
    }
    match m.mode {
        Mode::Finite => {
            rep.notes.push("compactness is automatic for finite-dimensional fibers".into());
        }
        Mode::Toeplitz => {
            for (o, f) in m.f.iter().enumerate() {
                let sq = f.mul(f).sub(&Symbol::identity(f.dim)).max_norm();
                rep.residual("compact_square", names(m, &[o]), sq, tol);
                let mut worst: f64 = 0.0;
                for t in r.net.fibers[o].basis() {
                    let pt = Symbol::constant(r.represent(o, &t).expect("fiber basis"));
                    worst = worst.max(f.mul(&pt).sub(&pt.mul(f)).max_norm());
                }
                rep.residual("compact_commutator", names(m, &[o]), worst, tol);
            }
        }
    }
    if let Some(g) = &m.grading {
        for c in ["grading_involution", "grading_section", "odd", "graded_representation"] {
            rep.declare(c, tol);
        }
        for (o, go) in g.iter().enumerate() {
            let d = go.nrows();
            let inv = linalg::op_norm(&(go * go - linalg::eye(d))).max(linalg::hermitian_defect(go));
            rep.residual("grading_involution", names(m, &[o]), inv, tol);
            let gs = Symbol::constant(go.clone());
            rep.residual("odd", names(m, &[o]), gs.mul(&m.f[o]).add(&m.f[o].mul(&gs)).max_norm(), tol);
            let mut worst: f64 = 0.0;
            for t in r.net.fibers[o].basis() {
                let bt = match &m.beta {
                    Some(b) => b.components[o].apply(&t).expect("fiber basis"),
                    None => t.clone(),
                };
                let lhs = go * r.represent(o, &t).expect("fiber basis") * go;
                worst = worst.max(linalg::op_norm(&(lhs - r.represent(o, &bt).expect("fiber basis"))));
            }
            rep.residual("graded_representation", names(m, &[o]), worst, tol);
        }
        for (a, b) in p.strict_pairs() {
            let u = r.bundle.unitary(a, b).expect("a < b");
            rep.residual("grading_section", names(m, &[a, b]), linalg::op_norm(&(&g[b] * u - u * &g[a])), tol);
        }
    }
    if let Some(beta) = &m.beta {
        rep.declare("beta_period", tol);
        let nat = beta.validate(&r.net, &r.net, tol);
        rep.merge("", nat);
        for (o, b) in beta.components.iter().enumerate() {
            let sq = b.compose(b).map(|bb| bb.distance(&StarMorphism::identity(&r.net.fibers[o]))).unwrap_or(f64::INFINITY);
            rep.residual("beta_period", names(m, &[o]), sq, tol);
        }
    }
    rep
}

/// Index of a finite matrix via singular values below `tol`.
pub fn index_finite(t: &CMat, tol: f64) -> IndexResult {
    let kernel = linalg::null_space(t, tol);
    let cokernel = linalg::null_space(&t.adjoint(), tol);
    IndexResult {
        index: kernel.ncols() as i64 - cokernel.ncols() as i64,
        kernel_dim: kernel.ncols(),
        cokernel_dim: cokernel.ncols(),
        kernel,
        cokernel,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointIndex {
    pub point: String,
    pub index: i64,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
}

/// The point family of a module with its index data.
#[derive(Debug, Clone, Serialize)]
pub struct Family {
    pub per_point: Vec<PointIndex>,
    pub element_index: Vec<i64>,
    pub index: i64,
    pub kasparov: ValidationReport,
    #[serde(skip)]
    pub kernel_bundle: HilbertNetBundle,
    #[serde(skip)]
    pub cokernel_bundle: HilbertNetBundle,
    #[serde(skip)]
    pub kernel_holonomy: Vec<CMat>,
    #[serde(skip)]
    pub cokernel_holonomy: Vec<CMat>,
}

struct Kernels {
    index: i64,
    kernel: CMat,
    cokernel: CMat,
}

fn stack(a: &CMat, b: &CMat) -> CMat {
    let mut out = linalg::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}

/// Kernel of `F` on the even part and on the odd part (all of the kernel for
/// ungraded modules), realized on the truncated space `ℂ^N ⊗ ℂ^d`.
fn kernels(m: &FredholmNetModule, f: &Symbol, g: Option<&CMat>, tol: f64) -> Result<Kernels> {
    let n = m.truncation;
    let d = f.dim;
    let frame = toeplitz_frame(f, n);
    let Some(g) = g else {
        let k = linalg::null_space(&frame, tol);
        return Ok(Kernels { index: 0, kernel: k.clone(), cokernel: k });
    };
    let lift = linalg::kron(&linalg::eye(n), g);
    let id = linalg::eye(n * d);
    let kernel = linalg::null_space(&stack(&frame, &(&lift - &id)), tol);
    let cokernel = linalg::null_space(&stack(&frame, &(&lift + &id)), tol);
    let index = match m.mode {
        Mode::Finite => kernel.ncols() as i64 - cokernel.ncols() as i64,
        Mode::Toeplitz => {
            let (vals, vecs) = linalg::hermitian_eigen(g);
            let plus: Vec<usize> = (0..d).filter(|&i| vals[i] > 0.0).collect();
            let minus: Vec<usize> = (0..d).filter(|&i| vals[i] < 0.0).collect();
            if plus.len() != minus.len() {
                return Err(Error::InvalidInput("graded parts of different size in Toeplitz mode".into()));
            }
            let ep = vecs.select_columns(&plus);
            let em = vecs.select_columns(&minus);
            let t = Symbol { dim: plus.len(), coeffs: f.coeffs.iter().map(|(k, c)| (*k, em.adjoint() * c * &ep)).collect() };
            -winding_number(&t)?
        }
    };
    Ok(Kernels { index, kernel, cokernel })
}

fn assemble_kernels(m: &FredholmNetModule, spaces: &[CMat], tol: f64) -> Result<HilbertNetBundle> {
    let b = &m.representation.bundle;
    let p = &b.poset;
    let mut unitaries = Vec::new();
    for (a, c) in p.hasse_pairs() {
        let u = linalg::kron(&linalg::eye(m.truncation), b.unitary(a, c)?);
        let moved = &u * &spaces[a];
        let proj = &spaces[c] * spaces[c].adjoint();
        let leak = if moved.ncols() == 0 { 0.0 } else { linalg::op_norm(&(&moved - &proj * &moved)) };
        if spaces[a].ncols() != spaces[c].ncols() || leak > tol {
            return Err(Error::KernelNotInvariant(format!(
                "{}<{} (dimensions {} and {}, residual {leak:.3e})",
                p.name(a),
                p.name(c),
                spaces[a].ncols(),
                spaces[c].ncols()
            )));
        }
        unitaries.push(((a, c), spaces[c].adjoint() * moved));
    }
    HilbertNetBundle::new(p.clone(), spaces.iter().map(|s| s.ncols()).collect(), unitaries)
}

/// Assembles the point family `F̂(x) = ε^x_Y(F_Y)` of the module over the
/// model, checks the bimodule relations pointwise and builds the kernel
/// bundles.
pub fn assemble_family(m: &FredholmNetModule, model: &SpaceModel, tol: f64) -> Result<Family> {
    let r = &m.representation;
    if r.net.poset != model.poset {
        return Err(Error::InvalidInput("module and model live over different posets".into()));
    }
    let bh = r.bundle.to_net()?;
    let mut kasparov = ValidationReport::new();
    for c in ["well_defined", "self_adjoint", "odd", "graded_representation", "compact_square", "compact_commutator"] {
        kasparov.declare(c, tol);
    }
    let mut per_point = Vec::new();
    for x in 0..model.num_points() {
        let omega = model.omega(x)?;
        let u = universal_fiber(&bh, &omega.members)?;
        if u.realization.is_none() {
            return Err(Error::FiberNotRealizable(model.points[x].clone()));
        }
        let lift = |y: usize, c: &CMat| -> Result<CMat> {
            Ok(u.epsilon(y).expect("y in omega").apply(&AlgElement::from_matrix(c.clone()))?.blocks[0].clone())
        };
        let lift_symbol = |y: usize, s: &Symbol| -> Result<Symbol> {
            let coeffs = s.coeffs.iter().map(|(k, c)| Ok((*k, lift(y, c)?))).collect::<Result<_>>()?;
            Ok(Symbol { dim: s.dim, coeffs })
        };
        let y0 = omega.minimum;
        let f = lift_symbol(y0, &m.f[y0])?;
        let g = m.grading.as_ref().map(|g| lift(y0, &g[y0])).transpose()?;
        let loc = vec![model.points[x].clone()];
        let mut spread: f64 = 0.0;
        for &y in &omega.members {
            spread = spread.max(lift_symbol(y, &m.f[y])?.sub(&f).max_norm());
            if let Some(gr) = &m.grading {
                spread = spread.max(linalg::op_norm(&(lift(y, &gr[y])? - g.as_ref().unwrap())));
            }
        }
        kasparov.residual("well_defined", loc.clone(), spread, tol);
        kasparov.residual("self_adjoint", loc.clone(), f.sub(&f.adjoint()).max_norm(), tol);
        let mut sq: f64 = 0.0;
        let mut comm: f64 = 0.0;
        let mut graded: f64 = 0.0;
        if m.mode == Mode::Toeplitz {
            sq = f.mul(&f).sub(&Symbol::identity(f.dim)).max_norm();
        }
        for &y in &omega.members {
            for t in r.net.fibers[y].basis() {
                let eta = lift(y, &r.represent(y, &t)?)?;
                if m.mode == Mode::Toeplitz {
                    let e = Symbol::constant(eta.clone());
                    comm = comm.max(f.mul(&e).sub(&e.mul(&f)).max_norm());
                }
                if let Some(g) = &g {
                    let bt = match &m.beta {
                        Some(b) => b.components[y].apply(&t)?,
                        None => t.clone(),
                    };
                    let eta_b = lift(y, &r.represent(y, &bt)?)?;
                    graded = graded.max(linalg::op_norm(&(g * &eta * g - eta_b)));
                }
            }
        }
        kasparov.residual("compact_square", loc.clone(), sq, tol);
        kasparov.residual("compact_commutator", loc.clone(), comm, tol);
        kasparov.residual("graded_representation", loc.clone(), graded, tol);
        if let Some(g) = &g {
            let gs = Symbol::constant(g.clone());
            kasparov.residual("odd", loc.clone(), gs.mul(&f).add(&f.mul(&gs)).max_norm(), tol);
        }
        let k = kernels(m, &f, g.as_ref(), 1e-8)?;
        per_point.push(PointIndex {
            point: model.points[x].clone(),
            index: k.index,
            kernel_dim: k.kernel.ncols(),
            cokernel_dim: k.cokernel.ncols(),
        });
    }
    if m.mode == Mode::Finite {
        kasparov.notes.push("compactness is automatic for finite-dimensional fibers".into());
    }
    for y in 0..model.poset.len() {
        let pts: Vec<usize> = (0..model.num_points()).filter(|&x| model.contains(y, x)).collect();
        if let Some(&x0) = pts.first() {
            if let Some(&x1) = pts.iter().find(|&&x| per_point[x].index != per_point[x0].index) {
                return Err(Error::NonConstantIndex(format!(
                    "chart {} has index {} at {} and {} at {}",
                    model.poset.name(y),
                    per_point[x0].index,
                    model.points[x0],
                    per_point[x1].index,
                    model.points[x1]
                )));
            }
        }
    }
    let mut kers = Vec::new();
    let mut cokers = Vec::new();
    let mut element_index = Vec::new();
    for o in 0..r.net.poset.len() {
        let k = kernels(m, &m.f[o], m.grading.as_ref().map(|g| &g[o]), 1e-8)?;
        element_index.push(k.index);
        kers.push(k.kernel);
        cokers.push(k.cokernel);
    }
    let kernel_bundle = assemble_kernels(m, &kers, 1e-8)?;
    let cokernel_bundle = assemble_kernels(m, &cokers, 1e-8)?;
    let index = per_point.first().map(|p| p.index).unwrap_or(0);
    let (kernel_holonomy, cokernel_holonomy) = if r.net.poset.is_connected() && !r.net.poset.is_empty() {
        let pres = pi1_presentation(&r.net.poset, r.net.poset.name(0))?;
        (kernel_bundle.holonomy(&pres)?, cokernel_bundle.holonomy(&pres)?)
    } else {
        (Vec::new(), Vec::new())
    };
    Ok(Family { per_point, element_index, index, kasparov, kernel_bundle, cokernel_bundle, kernel_holonomy, cokernel_holonomy })
}
