use serde::Serialize;

use super::{build_field_algebra, FieldAlgebra, VectorField, SPAN_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, SpanBasis};
use crate::net::{validate_section, Net, NetSection};
use crate::report::ValidationReport;
use crate::space_model::{PointFunction, SpaceModel};

#[derive(Debug, Clone, Serialize)]
pub struct FiberIso {
    pub point: String,
    pub rank: usize,
    pub fiber_dim: usize,
    pub quotient_dim: usize,
    pub report: ValidationReport,
}

/// Checks that `τ^x` identifies the universal fiber with the quotient of the
/// field algebra by the fields vanishing at `x`, and that `r^x = τ^x ∘ e_x`.
pub fn fiber_iso_check(fa: &FieldAlgebra, x: usize, tol: f64) -> Result<FiberIso> {
    let m = &fa.model;
    let n = fa.ambient_dim();
    let basis = fa.basis();
    // C_x(X)·𝒜 via the module action
    let away = PointFunction::indicator(m, &(0..m.num_points()).filter(|&p| p != x).collect::<Vec<_>>());
    let mut kx = SpanBasis::new(n, SPAN_TOL);
    for b in &basis {
        kx.insert(&b.times(&away).coord_vector());
    }
    let mut quotient = SpanBasis::new(n, SPAN_TOL);
    for b in &basis {
        let v = b.coord_vector();
        let mut w = v.clone();
        for k in kx.vectors() {
            w -= k * k.dotc(&v);
        }
        quotient.insert(&w);
    }
    let mut q = linalg::zeros(n, quotient.len());
    for (j, v) in quotient.vectors().iter().enumerate() {
        q.set_column(j, v);
    }
    let r_x = |v: &VectorField| q.adjoint() * v.coord_vector();
    let omega = m.omega(x)?;
    let dx = fa.fibers[x].dim();
    let mut pairs_p = Vec::new();
    let mut pairs_q = Vec::new();
    for &y in &omega.members {
        let u = m.witness(y).unwrap_or(y);
        for t in fa.net.fiber(y).basis() {
            let eps = fa.universal[x].epsilon(y).expect("y in omega").apply(&t)?;
            pairs_p.push(eps.coords());
            pairs_q.push(r_x(&fa.plateau_field(y, u, &t)?));
        }
    }
    let mut pm = linalg::zeros(dx, pairs_p.len());
    let mut qm = linalg::zeros(quotient.len(), pairs_q.len());
    for j in 0..pairs_p.len() {
        pm.set_column(j, &crate::linalg::CVec::from_vec(pairs_p[j].clone()));
        qm.set_column(j, &pairs_q[j]);
    }
    let tau_x: CMat = &qm * linalg::pseudo_inverse(&pm, SPAN_TOL);
    let mut report = ValidationReport::new();
    for c in ["tau_well_defined", "quotient_factorization", "bijective"] {
        report.declare(c, tol);
    }
    let well = (&tau_x * &pm - &qm).column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    report.residual("tau_well_defined", vec![m.points[x].clone()], well, tol);
    for (i, b) in basis.iter().enumerate() {
        let ex = crate::linalg::CVec::from_vec(fa.evaluate(b, x).coords());
        let res = (r_x(b) - &tau_x * ex).norm();
        report.residual("quotient_factorization", vec![m.points[x].clone(), i.to_string()], res, tol);
    }
    let rank = linalg::rank(&tau_x, 1e-8);
    if rank != dx || quotient.len() != dx {
        report.fail(
            "bijective",
            vec![m.points[x].clone()],
            format!("rank {rank}, fiber dimension {dx}, quotient dimension {}", quotient.len()),
        );
    }
    Ok(FiberIso { point: m.points[x].clone(), rank, fiber_dim: dx, quotient_dim: quotient.len(), report })
}

/// The multiplier `T̂ = {ε^x_Y(T_Y)}` of a section, with checks that it is
/// independent of `Y ∈ ω_x` and multiplies the field algebra into itself.
pub fn section_to_multiplier(fa: &FieldAlgebra, s: &NetSection, tol: f64) -> Result<(VectorField, ValidationReport)> {
    let sec = validate_section(&fa.net, s, tol);
    if let Some(v) = sec.violations.first() {
        return Err(Error::NotASection(format!("{} at {}", v.check, v.location.join("<"))));
    }
    let m = &fa.model;
    let mut report = ValidationReport::new();
    report.declare("well_defined", tol);
    report.declare("multiplier", tol);
    let mut values = Vec::new();
    for x in 0..m.num_points() {
        let omega = m.omega(x)?;
        let u = &fa.universal[x];
        let v0 = u.epsilon(omega.minimum).unwrap().apply(&s.values[omega.minimum])?;
        let mut worst: f64 = 0.0;
        for &y in &omega.members {
            worst = worst.max(u.epsilon(y).unwrap().apply(&s.values[y])?.dist(&v0));
        }
        report.residual("well_defined", vec![m.points[x].clone()], worst, tol);
        values.push(v0);
    }
    let t = VectorField { values };
    for (i, b) in fa.basis().iter().enumerate() {
        let res = fa.residual(&t.mul(b)).max(fa.residual(&b.mul(&t)));
        report.residual("multiplier", vec![i.to_string()], res, tol);
    }
    Ok((t, report))
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectedTensor {
    pub maximum: String,
    pub dimension: usize,
    pub expected: usize,
    pub report: ValidationReport,
}

/// For a poset with maximum `m`, checks that the fields `δ_x · ε̂_m(e_k)`
/// form a basis of the field algebra.
pub fn directed_tensor_check(net: &Net, model: &SpaceModel, tol: f64) -> Result<DirectedTensor> {
    let top = net.poset.maximum().ok_or(Error::NotDirected)?;
    let fa = build_field_algebra(net, model)?;
    let expected = model.num_points() * net.fiber(top).dim();
    let mut report = ValidationReport::new();
    for c in ["membership", "tensor_rank", "dimension"] {
        report.declare(c, tol);
    }
    let mut span = SpanBasis::new(fa.ambient_dim(), SPAN_TOL);
    for x in 0..model.num_points() {
        let d = PointFunction::delta(model, x);
        for (k, e) in net.fiber(top).basis().iter().enumerate() {
            let f = fa.epsilon_hat(top, e)?.times(&d);
            report.residual("membership", vec![model.points[x].clone(), k.to_string()], fa.residual(&f), tol);
            span.insert(&f.coord_vector());
        }
    }
    if span.len() != expected {
        report.fail("tensor_rank", Vec::new(), format!("tensor basis has rank {} < {expected}", span.len()));
    }
    if fa.dim() != expected {
        report.fail("dimension", Vec::new(), format!("dimension {} ≠ {expected}", fa.dim()));
    }
    Ok(DirectedTensor { maximum: net.poset.name(top).to_string(), dimension: fa.dim(), expected, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::random_unitary;
    use crate::matrix_cstar::{AlgElement, FinDimCStar, StarMorphism};
    use crate::poset_topology::{pi1_presentation, Poset};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fiber_isomorphisms() {
        let m = catalog::circle_model();
        let scalar = build_field_algebra(&Net::constant(m.poset.clone(), &FinDimCStar::matrix(1)), &m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let twist = StarMorphism::ad_matrix(&random_unitary(&mut rng, 2)).unwrap();
        let twisted = build_field_algebra(&catalog::twisted_circle_net(&FinDimCStar::matrix(2), &twist), &m).unwrap();
        let zero = build_field_algebra(&Net::vanishing(m.poset.clone()), &m).unwrap();
        for x in 0..6 {
            let a = fiber_iso_check(&scalar, x, 1e-10).unwrap();
            assert!(a.report.is_valid());
            assert_eq!(a.rank, 1);
            let b = fiber_iso_check(&twisted, x, 1e-10).unwrap();
            assert!(b.report.is_valid(), "{:?}", b.report.violations);
            assert_eq!(b.rank, 4);
            assert_eq!(fiber_iso_check(&zero, x, 1e-10).unwrap().rank, 0);
        }
    }

    #[test]
    fn multipliers_from_sections() {
        let m = catalog::circle_model();
        let m2 = FinDimCStar::matrix(2);
        let constant = build_field_algebra(&Net::constant(m.poset.clone(), &m2), &m).unwrap();
        let (unit, rep) = section_to_multiplier(&constant, &NetSection::unit(&constant.net), 1e-10).unwrap();
        assert!(rep.is_valid());
        assert_eq!(unit, constant.unit_field());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t0 = AlgElement::from_matrix(crate::linalg::random_complex_gaussian(&mut rng, 2, 2));
        let s = NetSection { values: vec![t0.clone(); 6] };
        let (t, rep) = section_to_multiplier(&constant, &s, 1e-10).unwrap();
        assert!(rep.is_valid());
        assert!(t.values.iter().all(|v| v.dist(&t0) < 1e-14));
        // a twisted bundle with a section commuting with the twist
        let u = crate::linalg::real_diag(&[1.0, -1.0]);
        let net = catalog::twisted_circle_net(&m2, &StarMorphism::ad_matrix(&u).unwrap());
        let fa = build_field_algebra(&net, &m).unwrap();
        let pres = pi1_presentation(&net.poset, "a1").unwrap();
        let d = AlgElement::from_matrix(crate::linalg::real_diag(&[2.0, 5.0]));
        let sec = NetSection::transported(&net, &pres, &d).unwrap();
        let (_, rep) = section_to_multiplier(&fa, &sec, 1e-10).unwrap();
        assert!(rep.is_valid());
        let bad = NetSection::transported(&net, &pres, &t0).unwrap();
        assert!(matches!(section_to_multiplier(&fa, &bad, 1e-10), Err(Error::NotASection(_))));
    }

    #[test]
    fn directed_examples() {
        let chain = catalog::chain_interval_model();
        let m1 = FinDimCStar::matrix(1);
        let m2 = FinDimCStar::matrix(2);
        let emb = StarMorphism::embedding(m1.clone(), m2.clone(), vec![vec![2]]).unwrap();
        let net = Net::new(chain.poset.clone(), vec![m1, m2.clone()], vec![((0, 1), emb)]).unwrap();
        let d = directed_tensor_check(&net, &chain, 1e-10).unwrap();
        assert_eq!((d.dimension, d.expected), (12, 12));
        assert!(d.report.is_valid());
        let single = SpaceModel::new(vec!["p".into(), "q".into()], Poset::new(&["Y"], &[]).unwrap(), vec![vec![0, 1]], None, None)
            .unwrap();
        let d = directed_tensor_check(&Net::constant(single.poset.clone(), &m2), &single, 1e-10).unwrap();
        assert_eq!(d.dimension, 8);
        let d = directed_tensor_check(&Net::vanishing(chain.poset.clone()), &chain, 1e-10).unwrap();
        assert_eq!(d.dimension, 0);
        let circle = catalog::circle_model();
        assert!(matches!(
            directed_tensor_check(&Net::constant(circle.poset.clone(), &m2), &circle, 1e-10),
            Err(Error::NotDirected)
        ));
    }
}
