use super::{FieldAlgebra, VectorField, SPAN_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::matrix_cstar::AlgElement;
use crate::net::{Net, NetMorphism};
use crate::space_model::PointFunction;
use crate::report::ValidationReport;

/// A family `φ_Y : A_Y → S_Y` given by the images of the basis of each `A_Y`;
/// elements of `S_Y` are fields of the target vanishing off `κ(Y)`.
#[derive(Debug, Clone)]
pub struct HeteroMorphism {
    pub components: Vec<Vec<VectorField>>,
}

impl HeteroMorphism {
    pub fn from_fn<F>(net: &Net, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, &AlgElement) -> Result<VectorField>,
    {
        let components = (0..net.poset.len())
            .map(|y| net.fiber(y).basis().iter().map(|t| f(y, t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(HeteroMorphism { components })
    }

    /// The canonical heteromorphism `τ`.
    pub fn tau(fa: &FieldAlgebra) -> Result<Self> {
        Self::from_fn(&fa.net, |y, t| fa.tau(y, t))
    }

    /// `φ_Y(t)` by linearity.
    pub fn apply(&self, y: usize, t: &AlgElement, target: &FieldAlgebra) -> VectorField {
        let mut out = target.zero_field();
        for (c, img) in t.coords().iter().zip(&self.components[y]) {
            if c.norm() > 0.0 {
                out = out.add(&img.scale(*c));
            }
        }
        out
    }

    /// `φ ∘ ψ` for a net morphism `ψ` into the source net of `φ`.
    pub fn after(&self, psi: &NetMorphism, source: &Net, target: &FieldAlgebra) -> Result<Self> {
        if psi.components.len() != self.components.len() {
            return Err(Error::ShapeMismatch("net morphism and heteromorphism differ in length".into()));
        }
        Self::from_fn(source, |y, t| Ok(self.apply(y, &psi.components[y].apply(t)?, target)))
    }

    /// Support, *-homomorphism and coherence `r_{oo'} ∘ φ_{o'} ∘ ȷ_{o'o} = φ_o`.
    pub fn validate(&self, net: &Net, target: &FieldAlgebra, tol: f64) -> ValidationReport {
        let mut r = ValidationReport::new();
        for c in ["support", "homomorphism", "coherence"] {
            r.declare(c, tol);
        }
        let p = &net.poset;
        if self.components.len() != p.len() || (0..p.len()).any(|y| self.components[y].len() != net.fiber(y).dim()) {
            r.fail("support", Vec::new(), "component shapes do not match the net");
            return r;
        }
        let m = &target.model;
        for y in 0..p.len() {
            if self.components[y].iter().any(|v| !v.vanishes_outside(&m.extent[y], tol)) {
                r.fail("support", vec![p.name(y).into()], "image does not vanish outside the chart");
            }
            let basis = net.fiber(y).basis();
            let mut worst: f64 = 0.0;
            for (i, s) in basis.iter().enumerate() {
                let star = self.apply(y, &s.adjoint(), target).dist(&self.components[y][i].adjoint());
                worst = worst.max(star);
                for (j, t) in basis.iter().enumerate() {
                    let prod = self.apply(y, &s.mul(t), target);
                    worst = worst.max(prod.dist(&self.components[y][i].mul(&self.components[y][j])));
                }
            }
            r.residual("homomorphism", vec![p.name(y).into()], worst, tol);
        }
        for (a, b) in p.strict_pairs() {
            let j = net.inclusion(a, b).unwrap();
            let mut worst: f64 = 0.0;
            for (k, t) in net.fiber(a).basis().iter().enumerate() {
                let lhs = self.apply(b, &j.apply_unchecked(t), target).restricted_to(&m.extent[a]);
                worst = worst.max(lhs.dist(&self.components[a][k]));
            }
            r.residual("coherence", vec![p.name(a).into(), p.name(b).into()], worst, tol);
        }
        r
    }
}

/// A linear map between field algebras on ambient coordinates.
#[derive(Debug, Clone)]
pub struct LinearFieldMap {
    pub matrix: CMat,
}

impl LinearFieldMap {
    pub fn identity(fa: &FieldAlgebra) -> Self {
        LinearFieldMap { matrix: linalg::eye(fa.ambient_dim()) }
    }

    pub fn apply(&self, v: &VectorField, target: &FieldAlgebra) -> VectorField {
        let c = &self.matrix * v.coord_vector();
        VectorField::from_coords(&target.fibers, c.as_slice())
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &LinearFieldMap) -> LinearFieldMap {
        LinearFieldMap { matrix: &self.matrix * &first.matrix }
    }

    /// Largest difference on the basis of `source`.
    pub fn distance_on(&self, other: &LinearFieldMap, source: &FieldAlgebra) -> f64 {
        let b = source.basis_matrix();
        (0..b.ncols())
            .map(|j| {
                let d: CVec = (&self.matrix - &other.matrix) * b.column(j);
                d.norm()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct Lift {
    pub map: LinearFieldMap,
    pub report: ValidationReport,
}

fn generator_matrix(fields: &[VectorField], dim: usize) -> CMat {
    let mut g = linalg::zeros(dim, fields.len());
    for (j, f) in fields.iter().enumerate() {
        g.set_column(j, &f.coord_vector());
    }
    g
}

/// The prescribed values `f ▷ φ_Y(t)` of the lift on every generator.
fn generator_images(source: &FieldAlgebra, target: &FieldAlgebra, phi: &HeteroMorphism) -> Vec<VectorField> {
    source
        .generators
        .iter()
        .map(|g| {
            let w = &phi.components[g.chart_index][g.basis_index];
            w.times(&PointFunction::delta(&target.model, g.point_index))
        })
        .collect()
}

/// The morphism `φ̄` with `f ▷ φ_Y(t) = φ̄(f ε̂_Y(t))` on generators.
pub fn lift_heteromorphism(
    source: &FieldAlgebra,
    target: &FieldAlgebra,
    phi: &HeteroMorphism,
    tol: f64,
) -> Result<Lift> {
    if source.model.points != target.model.points {
        return Err(Error::ShapeMismatch("field algebras live over different point sets".into()));
    }
    let pre = phi.validate(&source.net, target, tol);
    if let Some(v) = pre.violations.first() {
        return Err(Error::InconsistentHeteromorphism(format!("{} violated at {}", v.check, v.location.join("<"))));
    }
    let gens = source.generator_fields();
    let images = generator_images(source, target, phi);
    let g = generator_matrix(gens, source.ambient_dim());
    let h = generator_matrix(&images, target.ambient_dim());
    let proj = source.basis_matrix() * source.basis_matrix().adjoint();
    let l = &h * linalg::pseudo_inverse(&g, SPAN_TOL) * proj;
    let defect = &l * &g - &h;
    if let Some((j, res)) =
        (0..defect.ncols()).map(|j| (j, defect.column(j).norm())).max_by(|a, b| a.1.total_cmp(&b.1))
    {
        if res > tol {
            let gen = &source.generators[j];
            return Err(Error::InconsistentHeteromorphism(format!(
                "linear extension not well defined at generator δ_{}·ε̂_{}(e_{}) (residual {res:.3e})",
                gen.point, gen.chart, gen.basis_index
            )));
        }
    }
    let map = LinearFieldMap { matrix: l };
    let mut report = ValidationReport::new();
    for c in ["well_defined", "factorization", "multiplicative", "star", "lands_in_target"] {
        report.declare(c, tol);
    }
    report.residual("well_defined", Vec::new(), defect.column_iter().map(|c| c.norm()).fold(0.0, f64::max), tol);
    let p = &source.model.poset;
    for y in 0..p.len() {
        let mut worst: f64 = 0.0;
        for (k, t) in source.net.fiber(y).basis().iter().enumerate() {
            let u = source.model.witness(y).unwrap_or(y);
            match source.plateau_field(y, u, t) {
                Ok(pf) => {
                    let via = target.restrict(&map.apply(&pf, target), y);
                    worst = worst.max(via.dist(&phi.components[y][k]));
                }
                Err(_) => worst = f64::INFINITY,
            }
        }
        report.residual("factorization", vec![p.name(y).into()], worst, tol);
    }
    let basis = source.basis();
    let images: Vec<VectorField> = basis.iter().map(|b| map.apply(b, target)).collect();
    for (i, a) in basis.iter().enumerate() {
        report.residual("lands_in_target", vec![i.to_string()], target.residual(&images[i]), tol);
        report.residual("star", vec![i.to_string()], map.apply(&a.adjoint(), target).dist(&images[i].adjoint()), tol);
        for (j, b) in basis.iter().enumerate() {
            let res = map.apply(&a.mul(b), target).dist(&images[i].mul(&images[j]));
            report.residual("multiplicative", vec![i.to_string(), j.to_string()], res, tol);
        }
    }
    Ok(Lift { map, report })
}

/// Rejects a candidate lift that disagrees with `f ▷ φ_Y(t)` on a generator.
pub fn check_competitor(
    source: &FieldAlgebra,
    target: &FieldAlgebra,
    phi: &HeteroMorphism,
    competitor: &LinearFieldMap,
    tol: f64,
) -> Result<()> {
    let images = generator_images(source, target, phi);
    for (i, (g, want)) in source.generator_fields().iter().zip(&images).enumerate() {
        let residual = competitor.apply(g, target).dist(want);
        if residual > tol {
            return Err(Error::CompetitorRejected { generator: i, residual });
        }
    }
    Ok(())
}

/// `φ^τ` for a net morphism `φ`, with a report on the generator identity
/// `φ^τ(f ε̂_Y(t)) = f ε̂'_Y(φ_Y(t))` and the naturality square.
pub fn functor_on_morphism(
    phi: &NetMorphism,
    source: &FieldAlgebra,
    target: &FieldAlgebra,
    tol: f64,
) -> Result<(LinearFieldMap, ValidationReport)> {
    let p = &source.net.poset;
    if phi.components.len() != p.len() || target.net.poset != *p {
        return Err(Error::ShapeMismatch("net morphism does not match the field algebras".into()));
    }
    for (o, c) in phi.components.iter().enumerate() {
        if &c.source != source.net.fiber(o) || &c.target != target.net.fiber(o) {
            return Err(Error::ShapeMismatch(format!("component at {} has the wrong fibers", p.name(o))));
        }
    }
    let het = HeteroMorphism::tau(target)?.after(phi, &source.net, target)?;
    let lift = lift_heteromorphism(source, target, &het, tol)?;
    let mut report = lift.report;
    report.declare("generator_identity", tol);
    report.declare("naturality", tol);
    for (g, field) in source.generators.iter().zip(source.generator_fields()) {
        let e = &source.net.fiber(g.chart_index).basis()[g.basis_index];
        let image = phi.components[g.chart_index].apply(e)?;
        let want = target.epsilon_hat(g.chart_index, &image)?.times(&PointFunction::delta(&target.model, g.point_index));
        let res = lift.map.apply(field, target).dist(&want);
        report.residual("generator_identity", vec![g.chart.clone(), g.point.clone(), g.basis_index.to_string()], res, tol);
    }
    for y in 0..p.len() {
        let mut worst: f64 = 0.0;
        for t in source.net.fiber(y).basis() {
            let lhs = target.restrict(&lift.map.apply(&source.tau(y, &t)?, target), y);
            let rhs = target.tau(y, &phi.components[y].apply(&t)?)?;
            worst = worst.max(lhs.dist(&rhs));
        }
        report.residual("naturality", vec![p.name(y).into()], worst, tol);
    }
    Ok((lift.map, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::field_algebra::build_field_algebra;
    use crate::linalg::{c, random_unitary};
    use crate::matrix_cstar::{FinDimCStar, StarMorphism};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> FieldAlgebra {
        let m = catalog::circle_model();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = catalog::twisted_circle_net(
            &FinDimCStar::matrix(2),
            &StarMorphism::ad_matrix(&random_unitary(&mut rng, 2)).unwrap(),
        );
        build_field_algebra(&net, &m).unwrap()
    }

    #[test]
    fn tau_lifts_to_identity() {
        let fa = setup();
        let tau = HeteroMorphism::tau(&fa).unwrap();
        assert!(tau.validate(&fa.net, &fa, 1e-10).is_valid());
        let lift = lift_heteromorphism(&fa, &fa, &tau, 1e-10).unwrap();
        assert!(lift.report.is_valid());
        assert!(lift.map.distance_on(&LinearFieldMap::identity(&fa), &fa) < 1e-10);
    }

    #[test]
    fn seeded_incoherence_is_rejected() {
        let fa = setup();
        let mut tau = HeteroMorphism::tau(&fa).unwrap();
        tau.components[0][1] = tau.components[0][1].scale(c(2.0, 0.0));
        assert!(matches!(
            lift_heteromorphism(&fa, &fa, &tau, 1e-10),
            Err(Error::InconsistentHeteromorphism(_))
        ));
    }

    #[test]
    fn competitor_off_by_one_generator_is_rejected() {
        let fa = setup();
        let tau = HeteroMorphism::tau(&fa).unwrap();
        let id = LinearFieldMap::identity(&fa);
        assert!(check_competitor(&fa, &fa, &tau, &id, 1e-10).is_ok());
        let g = fa.generator_fields()[7].coord_vector();
        let bump = &g * g.adjoint() * c(1.0 / g.norm_squared(), 0.0);
        let competitor = LinearFieldMap { matrix: &id.matrix + bump };
        assert!(matches!(
            check_competitor(&fa, &fa, &tau, &competitor, 1e-10),
            Err(Error::CompetitorRejected { .. })
        ));
    }

    #[test]
    fn functor_identity_and_composition() {
        let fa = setup();
        let id = NetMorphism::identity(&fa.net);
        let (map, rep) = functor_on_morphism(&id, &fa, &fa, 1e-10).unwrap();
        assert!(rep.is_valid());
        assert!(map.distance_on(&LinearFieldMap::identity(&fa), &fa) < 1e-10);
    }
}
