use std::collections::HashMap;

use super::Net;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::matrix_cstar::{AlgElement, FinDimCStar, StarMorphism};
use crate::poset_topology::{EdgeLoop, GroupPresentation, Poset};
use crate::report::ValidationReport;

/// A net of Hilbert spaces `ℂ^{d_o}` with unitaries on covering pairs.
#[derive(Debug, Clone)]
pub struct HilbertNetBundle {
    pub poset: Poset,
    pub dims: Vec<usize>,
    hasse: HashMap<(usize, usize), CMat>,
    composites: HashMap<(usize, usize), CMat>,
}

impl HilbertNetBundle {
    pub fn new(poset: Poset, dims: Vec<usize>, unitaries: Vec<((usize, usize), CMat)>) -> Result<Self> {
        if dims.len() != poset.len() {
            return Err(Error::ShapeMismatch(format!("{} dimensions for {} elements", dims.len(), poset.len())));
        }
        let mut hasse = HashMap::new();
        for ((a, b), u) in unitaries {
            if a >= poset.len() || b >= poset.len() || !poset.covers(a, b) {
                return Err(Error::InvalidInput("bundle unitary on a non-covering pair".into()));
            }
            if u.shape() != (dims[b], dims[a]) {
                return Err(Error::ShapeMismatch(format!(
                    "unitary {}<{} has shape {:?}, expected {}×{}",
                    poset.name(a),
                    poset.name(b),
                    u.shape(),
                    dims[b],
                    dims[a]
                )));
            }
            hasse.insert((a, b), u);
        }
        for (a, b) in poset.hasse_pairs() {
            if !hasse.contains_key(&(a, b)) {
                return Err(Error::InvalidInput(format!("missing unitary {}<{}", poset.name(a), poset.name(b))));
            }
        }
        let mut composites = HashMap::new();
        let n = poset.len();
        for a in 0..n {
            for b in 0..n {
                if poset.leq(a, b) {
                    let chain = poset.canonical_chain(a, b);
                    let mut u = linalg::eye(dims[a]);
                    for w in chain.windows(2) {
                        u = &hasse[&(w[0], w[1])] * u;
                    }
                    composites.insert((a, b), u);
                }
            }
        }
        Ok(HilbertNetBundle { poset, dims, hasse, composites })
    }

    pub fn constant(poset: Poset, dim: usize) -> Self {
        let u = poset.hasse_pairs().into_iter().map(|e| (e, linalg::eye(dim))).collect();
        let dims = vec![dim; poset.len()];
        Self::new(poset, dims, u).expect("constant bundles are well formed")
    }

    pub fn with_unitaries(&self, replaced: &[((usize, usize), CMat)]) -> Result<Self> {
        let mut u: Vec<((usize, usize), CMat)> =
            self.poset.hasse_pairs().into_iter().map(|e| (e, self.hasse[&e].clone())).collect();
        for (e, m) in replaced {
            match u.iter_mut().find(|(f, _)| f == e) {
                Some(slot) => slot.1 = m.clone(),
                None => return Err(Error::InvalidInput("replacement is not a covering pair".into())),
            }
        }
        Self::new(self.poset.clone(), self.dims.clone(), u)
    }

    pub fn hasse_unitary(&self, a: usize, b: usize) -> Option<&CMat> {
        self.hasse.get(&(a, b))
    }

    /// `U_{ba}` for `a ≤ b`.
    pub fn unitary(&self, a: usize, b: usize) -> Result<&CMat> {
        self.composites.get(&(a, b)).ok_or_else(|| {
            Error::InvalidInput(format!("{} is not below {}", self.poset.name(a), self.poset.name(b)))
        })
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut r = ValidationReport::new();
        for name in ["unitary", "equal_dimensions", "net_relation"] {
            r.declare(name, tol);
        }
        let p = &self.poset;
        for (a, b) in p.hasse_pairs() {
            let loc = vec![p.name(a).to_string(), p.name(b).to_string()];
            r.residual("unitary", loc, linalg::unitarity_defect(&self.hasse[&(a, b)]), tol);
        }
        if self.dims.windows(2).any(|w| w[0] != w[1]) {
            r.fail("equal_dimensions", Vec::new(), format!("fiber dimensions differ: {:?}", self.dims));
        }
        for (a, b, c) in p.two_chains() {
            let lhs = &self.composites[&(b, c)] * &self.composites[&(a, b)];
            let res = linalg::op_norm(&(lhs - &self.composites[&(a, c)]));
            r.residual("net_relation", vec![p.name(a).into(), p.name(b).into(), p.name(c).into()], res, tol);
        }
        r
    }

    /// Transport along a path: `U` upward, `U*` downward.
    pub fn transport(&self, path: &[usize]) -> Result<CMat> {
        let first = *path.first().ok_or_else(|| Error::MalformedLoop("empty path".into()))?;
        let mut t = linalg::eye(self.dims[first]);
        for w in path.windows(2) {
            let (x, y) = (w[0], w[1]);
            let step = if self.poset.leq(x, y) {
                self.unitary(x, y)?.clone()
            } else if self.poset.leq(y, x) {
                self.unitary(y, x)?.adjoint()
            } else {
                return Err(Error::MalformedLoop(format!(
                    "{} and {} are not comparable",
                    self.poset.name(x),
                    self.poset.name(y)
                )));
            };
            t = step * t;
        }
        Ok(t)
    }

    pub fn loop_transport(&self, l: &EdgeLoop) -> Result<CMat> {
        self.transport(&l.vertices(&self.poset)?)
    }

    /// Holonomy unitary of each generator of `pres`.
    pub fn holonomy(&self, pres: &GroupPresentation) -> Result<Vec<CMat>> {
        (1..=pres.generators.len()).map(|g| self.loop_transport(&pres.generator_loop(&self.poset, g))).collect()
    }

    /// The net of matrix algebras `M_{d_o}` with inclusions `ad U`.
    pub fn to_net(&self) -> Result<Net> {
        let fibers: Vec<FinDimCStar> = self.dims.iter().map(|&d| FinDimCStar::matrix(d)).collect();
        let incl = self
            .poset
            .hasse_pairs()
            .into_iter()
            .map(|e| Ok((e, StarMorphism::ad_matrix(&self.hasse[&e])?)))
            .collect::<Result<Vec<_>>>()?;
        Net::new(self.poset.clone(), fibers, incl)
    }

    /// Direct sum of two bundles over the same poset.
    pub fn direct_sum(&self, other: &HilbertNetBundle) -> Result<HilbertNetBundle> {
        if self.poset != other.poset {
            return Err(Error::InvalidInput("bundles live over different posets".into()));
        }
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let u = self
            .poset
            .hasse_pairs()
            .into_iter()
            .map(|e| (e, linalg::block_diag(&[self.hasse[&e].clone(), other.hasse[&e].clone()])))
            .collect();
        Self::new(self.poset.clone(), dims, u)
    }
}

/// A representation `π_o : A_o → B(ℂ^{d_o})` of a net on a Hilbert net bundle.
#[derive(Debug, Clone)]
pub struct Representation {
    pub net: Net,
    pub bundle: HilbertNetBundle,
    pub components: Vec<StarMorphism>,
}

impl Representation {
    pub fn new(net: Net, bundle: HilbertNetBundle, components: Vec<StarMorphism>) -> Result<Self> {
        if net.poset != bundle.poset || components.len() != net.poset.len() {
            return Err(Error::ShapeMismatch("representation data do not match the poset".into()));
        }
        for (o, pi) in components.iter().enumerate() {
            if pi.source != net.fibers[o] || pi.target != FinDimCStar::matrix(bundle.dims[o]) {
                return Err(Error::ShapeMismatch(format!(
                    "component at {} maps {} → {}, expected {} → M{}",
                    net.poset.name(o),
                    pi.source,
                    pi.target,
                    net.fibers[o],
                    bundle.dims[o]
                )));
            }
        }
        Ok(Representation { net, bundle, components })
    }

    /// `π_o(t)` as a matrix.
    pub fn represent(&self, o: usize, t: &AlgElement) -> Result<CMat> {
        Ok(self.components[o].apply(t)?.blocks[0].clone())
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.components.iter().all(|pi| pi.is_unital())
    }
}

/// Residuals of `π_{o'} ∘ ȷ_{o'o} = ad U_{o'o} ∘ π_o` over all `o < o'`.
pub fn validate_representation(r: &Representation, tol: f64) -> ValidationReport {
    let mut rep = r.bundle.validate(tol);
    rep.declare("homomorphism", tol);
    rep.declare("covariance", tol);
    let p = &r.net.poset;
    for (o, pi) in r.components.iter().enumerate() {
        rep.residual("homomorphism", vec![p.name(o).into()], pi.homomorphism_defect(), tol);
    }
    for (a, b) in p.strict_pairs() {
        let j = r.net.inclusion(a, b).expect("a < b");
        let u = r.bundle.unitary(a, b).expect("a < b");
        let mut worst: f64 = 0.0;
        for t in r.net.fibers[a].basis() {
            let lhs = &r.components[b].apply_unchecked(&j.apply_unchecked(&t)).blocks[0];
            let rhs = u * &r.components[a].apply_unchecked(&t).blocks[0] * u.adjoint();
            worst = worst.max(linalg::op_norm(&(lhs - rhs)));
        }
        rep.residual("covariance", vec![p.name(a).into(), p.name(b).into()], worst, tol);
    }
    rep
}

/// A family `T_o ∈ A_o`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetSection {
    pub values: Vec<AlgElement>,
}

impl NetSection {
    pub fn unit(net: &Net) -> Self {
        NetSection { values: net.fibers.iter().map(AlgElement::one).collect() }
    }

    /// Section determined by its value at `base` on a net bundle over a
    /// connected poset, transported along the tree of `pres`.
    pub fn transported(net: &Net, pres: &GroupPresentation, value: &AlgElement) -> Result<Self> {
        let values = (0..net.poset.len())
            .map(|o| net.transport(&pres.tree_path(o))?.apply(value))
            .collect::<Result<Vec<_>>>()?;
        Ok(NetSection { values })
    }
}

/// Residuals of `T_Y = ȷ_{YV}(T_V)` over all `V < Y`.
pub fn validate_section(net: &Net, s: &NetSection, tol: f64) -> ValidationReport {
    let mut rep = ValidationReport::new();
    rep.declare("section", tol);
    let p = &net.poset;
    if s.values.len() != p.len() {
        rep.fail("section", Vec::new(), "one value per element is required");
        return rep;
    }
    for (o, v) in s.values.iter().enumerate() {
        if v.check_in(&net.fibers[o]).is_err() {
            rep.fail("section", vec![p.name(o).into()], "value does not lie in the fiber");
            return rep;
        }
    }
    for (v, y) in p.strict_pairs() {
        let img = net.inclusion(v, y).expect("v < y").apply_unchecked(&s.values[v]);
        rep.residual("section", vec![p.name(v).into(), p.name(y).into()], img.dist(&s.values[y]), tol);
    }
    rep
}

/// A morphism of nets over the same poset, one *-morphism per element.
#[derive(Debug, Clone)]
pub struct NetMorphism {
    pub components: Vec<StarMorphism>,
}

impl NetMorphism {
    pub fn identity(net: &Net) -> Self {
        NetMorphism { components: net.fibers.iter().map(StarMorphism::identity).collect() }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &NetMorphism) -> Result<NetMorphism> {
        let components = self
            .components
            .iter()
            .zip(&first.components)
            .map(|(a, b)| a.compose(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(NetMorphism { components })
    }

    /// Residuals of `φ_{o'} ∘ ȷ_{o'o} = y_{o'o} ∘ φ_o`.
    pub fn validate(&self, source: &Net, target: &Net, tol: f64) -> ValidationReport {
        let mut rep = ValidationReport::new();
        rep.declare("naturality", tol);
        if source.poset != target.poset || self.components.len() != source.poset.len() {
            rep.fail("naturality", Vec::new(), "morphism data do not match the poset");
            return rep;
        }
        let p = &source.poset;
        for (o, phi) in self.components.iter().enumerate() {
            if phi.source != source.fibers[o] || phi.target != target.fibers[o] {
                rep.fail("naturality", vec![p.name(o).into()], "component has the wrong source or target");
                return rep;
            }
        }
        for (a, b) in p.strict_pairs() {
            let lhs = self.components[b].compose(source.inclusion(a, b).unwrap()).unwrap();
            let rhs = target.inclusion(a, b).unwrap().compose(&self.components[a]).unwrap();
            rep.residual("naturality", vec![p.name(a).into(), p.name(b).into()], lhs.distance(&rhs), tol);
        }
        rep
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::{random_unitary, real_diag};
    use crate::poset_topology::pi1_presentation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_representation_of_constant_net() {
        let p = catalog::c6_poset();
        let m2 = FinDimCStar::matrix(2);
        let net = Net::constant(p.clone(), &m2);
        let bundle = HilbertNetBundle::constant(p, 2);
        let comps = vec![StarMorphism::identity(&m2); 6];
        let r = Representation::new(net, bundle, comps).unwrap();
        assert!(validate_representation(&r, 1e-10).is_valid());
        assert!(r.is_nondegenerate());
    }

    #[test]
    fn representation_ignoring_twist_is_flagged() {
        let u = real_diag(&[1.0, -1.0]);
        let m2 = FinDimCStar::matrix(2);
        let net = catalog::twisted_circle_net(&m2, &StarMorphism::ad_matrix(&u).unwrap());
        let p = net.poset.clone();
        let edge = (p.index_of("a2").unwrap(), p.index_of("b3").unwrap());
        let bundle = HilbertNetBundle::constant(p.clone(), 2).with_unitaries(&[(edge, u.clone())]).unwrap();
        let same = vec![StarMorphism::identity(&m2); 6];
        let good = Representation::new(net.clone(), bundle.clone(), same.clone()).unwrap();
        assert!(validate_representation(&good, 1e-10).is_valid());
        let flat = Representation::new(net, HilbertNetBundle::constant(p, 2), same).unwrap();
        let rep = validate_representation(&flat, 1e-10);
        let bad = rep.violations_of("covariance");
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].location, vec!["a2".to_string(), "b3".to_string()]);
        // ‖ad(u) − id‖ on matrix units is ‖E₀₁ + E₀₁‖ = 2
        assert!((bad[0].residual.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sections() {
        let m2 = FinDimCStar::matrix(2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = catalog::twisted_circle_net(&m2, &StarMorphism::ad_matrix(&random_unitary(&mut rng, 2)).unwrap());
        assert!(validate_section(&net, &NetSection::unit(&net), 1e-10).is_valid());
        // a value commuting with the holonomy extends to a global section
        let constant = Net::constant(catalog::c6_poset(), &m2);
        let t0 = AlgElement::from_matrix(crate::linalg::random_complex_gaussian(&mut rng, 2, 2));
        let pres = pi1_presentation(&constant.poset, "a1").unwrap();
        let s = NetSection::transported(&constant, &pres, &t0).unwrap();
        assert!(validate_section(&constant, &s, 1e-10).is_valid());
        let s_bad = NetSection::transported(&net, &pres, &t0).unwrap();
        assert!(!validate_section(&net, &s_bad, 1e-10).is_valid());
    }

    #[test]
    fn morphisms_compose_and_validate() {
        let m2 = FinDimCStar::matrix(2);
        let net = Net::constant(catalog::c6_poset(), &m2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = random_unitary(&mut rng, 2);
        let psi = NetMorphism { components: vec![StarMorphism::ad_matrix(&w).unwrap(); 6] };
        assert!(psi.validate(&net, &net, 1e-10).is_valid());
        let id = NetMorphism::identity(&net);
        assert!(psi.compose(&id).unwrap().components[3].distance(&psi.components[3]) < 1e-12);
        let mut broken = psi.clone();
        broken.components[0] = StarMorphism::identity(&m2);
        assert!(!broken.validate(&net, &net, 1e-10).is_valid());
    }

    #[test]
    fn hilbert_holonomy_and_validation() {
        let p = catalog::c6_poset();
        let edge = (p.index_of("a2").unwrap(), p.index_of("b3").unwrap());
        let b = HilbertNetBundle::constant(p.clone(), 1)
            .with_unitaries(&[(edge, CMat::from_element(1, 1, crate::linalg::c(-1.0, 0.0)))])
            .unwrap();
        assert!(b.validate(1e-10).is_valid());
        let pres = pi1_presentation(&p, "a1").unwrap();
        assert!((b.holonomy(&pres).unwrap()[0][(0, 0)] - crate::linalg::c(-1.0, 0.0)).norm() < 1e-15);
        let broken = b.with_unitaries(&[(edge, CMat::from_element(1, 1, crate::linalg::c(2.0, 0.0)))]).unwrap();
        assert_eq!(broken.validate(1e-10).violations_of("unitary").len(), 1);
    }
}
