//! The C(X)-algebra generated by a net over a finite space model.

mod checks;
mod hetero;

pub use checks::{directed_tensor_check, fiber_iso_check, section_to_multiplier, DirectedTensor, FiberIso};
pub use hetero::{check_competitor, functor_on_morphism, lift_heteromorphism, HeteroMorphism, Lift, LinearFieldMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, SpanBasis, C64, ZERO};
use crate::matrix_cstar::{AlgElement, FinDimCStar};
use crate::net::{universal_fiber, Net, UniversalFiber, UniversalRoute};
use crate::space_model::{PointFunction, SpaceModel};
use crate::report::ValidationReport;

/// Span tolerance for closure decisions.
pub const SPAN_TOL: f64 = 1e-10;

/// A point-indexed family of fiber elements.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub values: Vec<AlgElement>,
}

impl VectorField {
    pub fn zero(fibers: &[FinDimCStar]) -> Self {
        VectorField { values: fibers.iter().map(AlgElement::zero).collect() }
    }

    pub fn one(fibers: &[FinDimCStar]) -> Self {
        VectorField { values: fibers.iter().map(AlgElement::one).collect() }
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        VectorField { values: self.values.iter().zip(&o.values).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &VectorField) -> VectorField {
        VectorField { values: self.values.iter().zip(&o.values).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn mul(&self, o: &VectorField) -> VectorField {
        VectorField { values: self.values.iter().zip(&o.values).map(|(a, b)| a.mul(b)).collect() }
    }

    pub fn scale(&self, z: C64) -> VectorField {
        VectorField { values: self.values.iter().map(|a| a.scale(z)).collect() }
    }

    pub fn adjoint(&self) -> VectorField {
        VectorField { values: self.values.iter().map(AlgElement::adjoint).collect() }
    }

    /// Pointwise product with a function: the C(X)-action.
    pub fn times(&self, f: &PointFunction) -> VectorField {
        VectorField { values: self.values.iter().zip(&f.values).map(|(a, &z)| a.scale(z)).collect() }
    }

    /// Sup-norm over the points.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(AlgElement::norm).fold(0.0, f64::max)
    }

    pub fn dist(&self, o: &VectorField) -> f64 {
        self.sub(o).norm()
    }

    pub fn coords(&self) -> Vec<C64> {
        self.values.iter().flat_map(|v| v.coords()).collect()
    }

    pub fn coord_vector(&self) -> CVec {
        CVec::from_vec(self.coords())
    }

    pub fn from_coords(fibers: &[FinDimCStar], c: &[C64]) -> VectorField {
        let mut off = 0;
        let values = fibers
            .iter()
            .map(|f| {
                let v = AlgElement::from_coords(f, &c[off..off + f.dim()]);
                off += f.dim();
                v
            })
            .collect();
        VectorField { values }
    }

    /// Zero outside the given points.
    pub fn restricted_to(&self, points: &[usize]) -> VectorField {
        let mut out = self.clone();
        for (x, v) in out.values.iter_mut().enumerate() {
            if !points.contains(&x) {
                *v = v.scale(ZERO);
            }
        }
        out
    }

    pub fn vanishes_outside(&self, points: &[usize], tol: f64) -> bool {
        self.values.iter().enumerate().all(|(x, v)| points.contains(&x) || v.norm() <= tol)
    }
}

/// One generator `δ_x · ε̂_Y(e_k)` of the field algebra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Generator {
    pub chart: String,
    pub point: String,
    pub basis_index: usize,
    #[serde(skip)]
    pub chart_index: usize,
    #[serde(skip)]
    pub point_index: usize,
}

/// Universal fibers over every `ω_x`, failing where no realization exists.
pub fn point_fibers(net: &Net, model: &SpaceModel) -> Result<Vec<UniversalFiber>> {
    if net.poset != model.poset {
        return Err(Error::ShapeMismatch("net and space model use different posets".into()));
    }
    (0..model.num_points())
        .map(|x| {
            let omega = model.omega(x)?;
            let u = universal_fiber(net, &omega.members)?;
            if u.route == UniversalRoute::Formal {
                return Err(Error::FiberNotRealizable(model.points[x].clone()));
            }
            Ok(u)
        })
        .collect()
}

fn epsilon_hat_with(universal: &[UniversalFiber], model: &SpaceModel, y: usize, t: &AlgElement) -> Result<VectorField> {
    let values = universal
        .iter()
        .enumerate()
        .map(|(x, u)| {
            let alg = u.algebra().expect("realized");
            if model.contains(y, x) {
                u.epsilon(y).expect("y lies in omega").apply(t)
            } else {
                Ok(AlgElement::zero(alg))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VectorField { values })
}

/// `ε̂_Y(t)`: equal to `ε^x_Y(t)` on `κ(Y)` and zero elsewhere.
pub fn epsilon_hat(net: &Net, model: &SpaceModel, y: usize, t: &AlgElement) -> Result<VectorField> {
    let universal = point_fibers(net, model)?;
    t.check_in(net.fiber(y))?;
    epsilon_hat_with(&universal, model, y, t)
}

/// The field algebra with a basis obtained by closing the generators under
/// adjoints and products.
#[derive(Debug, Clone)]
pub struct FieldAlgebra {
    pub model: SpaceModel,
    pub net: Net,
    pub universal: Vec<UniversalFiber>,
    pub fibers: Vec<FinDimCStar>,
    pub generators: Vec<Generator>,
    generator_fields: Vec<VectorField>,
    span: SpanBasis,
}

pub fn build_field_algebra(net: &Net, model: &SpaceModel) -> Result<FieldAlgebra> {
    let universal = point_fibers(net, model)?;
    let fibers: Vec<FinDimCStar> = universal.iter().map(|u| u.algebra().unwrap().clone()).collect();
    let total: usize = fibers.iter().map(FinDimCStar::dim).sum();
    let mut generators = Vec::new();
    let mut generator_fields = Vec::new();
    let p = &model.poset;
    for y in 0..p.len() {
        let basis = net.fiber(y).basis();
        for &x in &model.extent[y] {
            let delta = PointFunction::delta(model, x);
            for (k, e) in basis.iter().enumerate() {
                let field = epsilon_hat_with(&universal, model, y, e)?.times(&delta);
                generators.push(Generator {
                    chart: p.name(y).to_string(),
                    point: model.points[x].clone(),
                    basis_index: k,
                    chart_index: y,
                    point_index: x,
                });
                generator_fields.push(field);
            }
        }
    }
    let mut span = SpanBasis::new(total, SPAN_TOL);
    for g in &generator_fields {
        span.insert(&g.coord_vector());
        span.insert(&g.adjoint().coord_vector());
    }
    let mut done = 0;
    while done < span.len() {
        let n = span.len();
        let fields: Vec<VectorField> =
            span.vectors().iter().map(|v| VectorField::from_coords(&fibers, v.as_slice())).collect();
        for i in 0..n {
            for j in 0..n {
                if i.max(j) < done {
                    continue;
                }
                span.insert(&fields[i].mul(&fields[j]).coord_vector());
            }
        }
        done = n;
    }
    Ok(FieldAlgebra { model: model.clone(), net: net.clone(), universal, fibers, generators, generator_fields, span })
}

impl FieldAlgebra {
    pub fn dim(&self) -> usize {
        self.span.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.span.ambient_dim()
    }

    /// Orthonormal basis fields.
    pub fn basis(&self) -> Vec<VectorField> {
        self.span.vectors().iter().map(|v| VectorField::from_coords(&self.fibers, v.as_slice())).collect()
    }

    /// Basis as the columns of a matrix of coordinates.
    pub fn basis_matrix(&self) -> CMat {
        let mut m = linalg::zeros(self.ambient_dim(), self.dim());
        for (j, v) in self.span.vectors().iter().enumerate() {
            m.set_column(j, v);
        }
        m
    }

    pub fn generator_fields(&self) -> &[VectorField] {
        &self.generator_fields
    }

    pub fn residual(&self, v: &VectorField) -> f64 {
        self.span.residual(&v.coord_vector())
    }

    pub fn contains(&self, v: &VectorField) -> bool {
        self.residual(v) <= SPAN_TOL * v.norm().max(1.0)
    }

    pub fn zero_field(&self) -> VectorField {
        VectorField::zero(&self.fibers)
    }

    pub fn unit_field(&self) -> VectorField {
        VectorField::one(&self.fibers)
    }

    pub fn epsilon_hat(&self, y: usize, t: &AlgElement) -> Result<VectorField> {
        t.check_in(self.net.fiber(y))?;
        epsilon_hat_with(&self.universal, &self.model, y, t)
    }

    /// The field `g · ε̂_U(ȷ_{UY}(t))` with `g` the indicator of `cl(Y)`.
    pub fn plateau_field(&self, y: usize, u: usize, t: &AlgElement) -> Result<VectorField> {
        if !self.model.is_plateau_witness(y, u) {
            return Err(Error::InvalidInput(format!(
                "{} is not a plateau witness for {}",
                self.model.poset.name(u),
                self.model.poset.name(y)
            )));
        }
        let g = PointFunction::indicator(&self.model, &self.model.closure[y]);
        Ok(self.epsilon_hat(u, &self.net.inclusion(y, u)?.apply(t)?)?.times(&g))
    }

    /// `τ_Y(t)` using witness `u`.
    pub fn tau_with(&self, y: usize, u: usize, t: &AlgElement) -> Result<VectorField> {
        Ok(self.restrict(&self.plateau_field(y, u, t)?, y))
    }

    /// `τ_Y(t)` using the declared witness.
    pub fn tau(&self, y: usize, t: &AlgElement) -> Result<VectorField> {
        let u = self
            .model
            .witness(y)
            .ok_or_else(|| Error::InvalidInput(format!("no plateau witness for {}", self.model.poset.name(y))))?;
        self.tau_with(y, u, t)
    }

    /// `r_Y`: the image in the quotient `S_Y`, modeled as restriction to `κ(Y)`.
    pub fn restrict(&self, v: &VectorField, y: usize) -> VectorField {
        v.restricted_to(&self.model.extent[y])
    }

    /// `r_{YY'}: S_{Y'} → S_Y` for `Y ≤ Y'`.
    pub fn restrict_between(&self, w: &VectorField, y: usize, y2: usize) -> Result<VectorField> {
        if !self.model.poset.leq(y, y2) {
            return Err(Error::InvalidInput("restriction needs Y ≤ Y'".into()));
        }
        Ok(w.restricted_to(&self.model.extent[y]))
    }

    /// `e_x`.
    pub fn evaluate(&self, v: &VectorField, x: usize) -> AlgElement {
        v.values[x].clone()
    }

    /// `f ▷ w` for `w ∈ S_Y` and `f` supported in `κ(Y)`.
    pub fn smoothing(&self, f: &PointFunction, w: &VectorField, y: usize) -> Result<VectorField> {
        if !f.is_supported_in(&self.model, y) {
            return Err(Error::SupportViolation(self.model.poset.name(y).to_string()));
        }
        Ok(w.times(f))
    }

    /// Rank of `e_x` on the field algebra.
    pub fn evaluation_rank(&self, x: usize) -> usize {
        let mut s = SpanBasis::new(self.fibers[x].dim(), SPAN_TOL);
        for b in self.basis() {
            s.insert_slice(&b.values[x].coords());
        }
        s.len()
    }

    /// Closure, support, coherence of `τ`, plateau independence, surjectivity
    /// of evaluations and nondegeneracy of the function action.
    pub fn report(&self, tol: f64) -> ValidationReport {
        let mut r = ValidationReport::new();
        for c in [
            "closed_under_product",
            "compact_support",
            "tau_coherence",
            "plateau_independence",
            "evaluation_surjective",
            "module_unit",
        ] {
            r.declare(c, tol);
        }
        let basis = self.basis();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                r.residual("closed_under_product", vec![i.to_string(), j.to_string()], self.residual(&a.mul(b)), tol);
            }
            let one = PointFunction::one(&self.model);
            r.residual("module_unit", vec![i.to_string()], a.times(&one).dist(a), tol);
        }
        for (g, f) in self.generators.iter().zip(&self.generator_fields) {
            if !f.vanishes_outside(&self.model.extent[g.chart_index], 0.0) {
                r.fail("compact_support", vec![g.chart.clone(), g.point.clone()], "generator leaves its chart");
            }
        }
        let p = &self.model.poset;
        for (a, b) in p.strict_pairs() {
            let mut worst: f64 = 0.0;
            for t in self.net.fiber(a).basis() {
                let lhs = self
                    .tau(b, &self.net.inclusion(a, b).unwrap().apply_unchecked(&t))
                    .and_then(|w| self.restrict_between(&w, a, b));
                let rhs = self.tau(a, &t);
                worst = match (lhs, rhs) {
                    (Ok(l), Ok(r)) => worst.max(l.dist(&r)),
                    _ => f64::INFINITY,
                };
            }
            r.residual("tau_coherence", vec![p.name(a).into(), p.name(b).into()], worst, tol);
        }
        for y in 0..p.len() {
            for t in self.net.fiber(y).basis() {
                let Ok(reference) = self.tau(y, &t) else {
                    r.fail("plateau_independence", vec![p.name(y).into()], "no plateau witness");
                    break;
                };
                for u in self.model.witnesses(y) {
                    let alt = self.tau_with(y, u, &t).unwrap();
                    r.residual("plateau_independence", vec![p.name(y).into(), p.name(u).into()], alt.dist(&reference), tol);
                }
            }
        }
        for x in 0..self.model.num_points() {
            if self.evaluation_rank(x) != self.fibers[x].dim() {
                r.fail(
                    "evaluation_surjective",
                    vec![self.model.points[x].clone()],
                    format!("rank {} < {}", self.evaluation_rank(x), self.fibers[x].dim()),
                );
            }
        }
        r
    }

    /// Coordinates of a member with respect to the orthonormal basis.
    pub fn basis_coefficients(&self, v: &VectorField) -> Vec<C64> {
        let c = v.coord_vector();
        self.span.vectors().iter().map(|b| b.dotc(&c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::random_unitary;
    use crate::matrix_cstar::StarMorphism;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dimensions_for_constant_and_vanishing_nets() {
        let m = catalog::circle_model();
        let scalar = Net::constant(m.poset.clone(), &FinDimCStar::matrix(1));
        assert_eq!(build_field_algebra(&scalar, &m).unwrap().dim(), 6);
        let m2 = Net::constant(m.poset.clone(), &FinDimCStar::matrix(2));
        let fa = build_field_algebra(&m2, &m).unwrap();
        assert_eq!(fa.dim(), 24);
        assert!(fa.report(1e-10).is_valid());
        let zero = Net::vanishing(m.poset.clone());
        assert_eq!(build_field_algebra(&zero, &m).unwrap().dim(), 0);
    }

    #[test]
    fn epsilon_hat_examples() {
        let m = catalog::circle_model();
        let net = Net::constant(m.poset.clone(), &FinDimCStar::matrix(1));
        let b1 = m.poset.index_of("b1").unwrap();
        let f = epsilon_hat(&net, &m, b1, &AlgElement::one(net.fiber(b1))).unwrap();
        let ind: Vec<f64> = f.values.iter().map(|v| v.blocks[0][(0, 0)].re).collect();
        assert_eq!(ind, vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn twisted_epsilon_hat_and_coherence() {
        let m = catalog::circle_model();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_unitary(&mut rng, 2);
        let net = catalog::twisted_circle_net(&FinDimCStar::matrix(2), &StarMorphism::ad_matrix(&u).unwrap());
        let fa = build_field_algebra(&net, &m).unwrap();
        assert_eq!(fa.dim(), 24);
        assert!(fa.report(1e-10).is_valid());
        let b3 = m.poset.index_of("b3").unwrap();
        let a2 = m.poset.index_of("a2").unwrap();
        let t = AlgElement::from_matrix(crate::linalg::random_complex_gaussian(&mut rng, 2, 2));
        let field = fa.epsilon_hat(b3, &t).unwrap();
        // at x5 the minimum of omega is a2, and ε = ȷ_{b3 a2}⁻¹ = ad(u*)
        let x5 = m.point_index("x5").unwrap();
        let expected = &u.adjoint() * &t.blocks[0] * &u;
        assert!((&field.values[x5].blocks[0] - expected).norm() < 1e-12);
        // ε̂_Y(t) and ε̂_{Y'}(ȷ(t)) agree on κ(Y)
        let s = AlgElement::from_matrix(crate::linalg::random_complex_gaussian(&mut rng, 2, 2));
        let lhs = fa.restrict(&fa.epsilon_hat(a2, &s).unwrap(), a2);
        let rhs = fa.restrict(&fa.epsilon_hat(b3, &net.inclusion(a2, b3).unwrap().apply(&s).unwrap()).unwrap(), a2);
        assert!(lhs.dist(&rhs) < 1e-12);
    }

    #[test]
    fn restriction_smoothing_and_separation() {
        let m = catalog::circle_model();
        let net = Net::constant(m.poset.clone(), &FinDimCStar::matrix(2));
        let fa = build_field_algebra(&net, &m).unwrap();
        let b1 = m.poset.index_of("b1").unwrap();
        let a1 = m.poset.index_of("a1").unwrap();
        let t = fa.basis()[5].clone();
        let w = fa.restrict(&t, b1);
        let ind = PointFunction::chart_indicator(&m, b1);
        assert_eq!(fa.smoothing(&ind, &w, b1).unwrap(), t.restricted_to(&m.extent[b1]));
        assert!(matches!(fa.smoothing(&PointFunction::one(&m), &w, b1), Err(Error::SupportViolation(_))));
        // presheaf relation r_{a1 b1} ∘ r_{b1} = r_{a1}
        assert_eq!(fa.restrict_between(&w, a1, b1).unwrap(), fa.restrict(&t, a1));
        // deltas separate elements of S_Y
        let w2 = fa.restrict(&fa.basis()[6], b1);
        let differs = m.extent[b1].iter().any(|&x| {
            let d = PointFunction::delta(&m, x);
            fa.smoothing(&d, &w, b1).unwrap() != fa.smoothing(&d, &w2, b1).unwrap()
        });
        assert_eq!(differs, w != w2);
    }

    #[test]
    fn layered_model_uses_strict_plateaus() {
        let m = catalog::layered_circle_model();
        let net = Net::constant(m.poset.clone(), &FinDimCStar::matrix(1));
        let fa = build_field_algebra(&net, &m).unwrap();
        assert_eq!(fa.dim(), 6);
        let r = fa.report(1e-10);
        assert!(r.is_valid(), "{:?}", r.violations);
        let s1 = m.poset.index_of("s1").unwrap();
        assert!(m.witnesses(s1).len() >= 2);
    }

    #[test]
    fn formal_fibers_are_rejected() {
        let p = crate::poset_topology::Poset::new(&["m", "l", "r"], &[("m", "l"), ("m", "r")]).unwrap();
        let model = SpaceModel::new(vec!["x".into()], p.clone(), vec![vec![0], vec![0], vec![0]], None, None).unwrap();
        let m1 = FinDimCStar::matrix(1);
        let m2 = FinDimCStar::matrix(2);
        let emb = StarMorphism::embedding(m1.clone(), m2.clone(), vec![vec![2]]).unwrap();
        let net = Net::new(p, vec![m1, m2.clone(), m2], vec![((0, 1), emb.clone()), ((0, 2), emb)]).unwrap();
        assert!(matches!(build_field_algebra(&net, &model), Err(Error::FiberNotRealizable(_))));
    }
}
