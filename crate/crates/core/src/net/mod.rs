//! Nets of finite-dimensional C*-algebras over finite posets.

mod hilbert;
mod holonomy;
mod universal;

pub use hilbert::{
    validate_representation, validate_section, HilbertNetBundle, NetMorphism, NetSection, Representation,
};
pub use holonomy::{equivalent_bundles, holonomy, loop_transport};
pub use universal::{universal_fiber, FormalPresentation, FormalRelation, Realization, UniversalFiber, UniversalRoute};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matrix_cstar::{FinDimCStar, StarMorphism};
use crate::poset_topology::Poset;
use crate::report::ValidationReport;

/// A net over a poset: fibers `A_o` and inclusions `ȷ_{o'o}` on covering pairs.
#[derive(Debug, Clone)]
pub struct Net {
    pub poset: Poset,
    pub fibers: Vec<FinDimCStar>,
    hasse: HashMap<(usize, usize), StarMorphism>,
    composites: HashMap<(usize, usize), StarMorphism>,
}

impl Net {
    /// Builds a net from inclusions on the covering pairs of `poset`.
    pub fn new(poset: Poset, fibers: Vec<FinDimCStar>, inclusions: Vec<((usize, usize), StarMorphism)>) -> Result<Self> {
        if fibers.len() != poset.len() {
            return Err(Error::ShapeMismatch(format!("{} fibers for {} elements", fibers.len(), poset.len())));
        }
        let mut hasse = HashMap::new();
        for ((a, b), m) in inclusions {
            if a >= poset.len() || b >= poset.len() || !poset.covers(a, b) {
                let name = |i: usize| if i < poset.len() { poset.name(i).to_string() } else { format!("#{i}") };
                return Err(Error::InvalidInput(format!(
                    "inclusion {}<{} is not a covering pair",
                    name(a),
                    name(b)
                )));
            }
            if m.source != fibers[a] || m.target != fibers[b] {
                return Err(Error::ShapeMismatch(format!(
                    "inclusion {}<{} maps {} → {} but the fibers are {} and {}",
                    poset.name(a),
                    poset.name(b),
                    m.source,
                    m.target,
                    fibers[a],
                    fibers[b]
                )));
            }
            hasse.insert((a, b), m);
        }
        for (a, b) in poset.hasse_pairs() {
            if !hasse.contains_key(&(a, b)) {
                return Err(Error::InvalidInput(format!("missing inclusion {}<{}", poset.name(a), poset.name(b))));
            }
        }
        let mut net = Net { poset, fibers, hasse, composites: HashMap::new() };
        net.build_composites();
        Ok(net)
    }

    /// Constant net: every fiber `alg`, every inclusion the identity.
    pub fn constant(poset: Poset, alg: &FinDimCStar) -> Self {
        let incl = poset.hasse_pairs().into_iter().map(|e| (e, StarMorphism::identity(alg))).collect();
        let fibers = vec![alg.clone(); poset.len()];
        Net::new(poset, fibers, incl).expect("constant nets are well formed")
    }

    /// Vanishing net: all fibers zero.
    pub fn vanishing(poset: Poset) -> Self {
        Self::constant(poset, &FinDimCStar::zero())
    }

    /// Copy of the net with some covering-pair inclusions replaced.
    pub fn with_inclusions(&self, replaced: &[((usize, usize), StarMorphism)]) -> Result<Net> {
        let mut incl: Vec<((usize, usize), StarMorphism)> =
            self.hasse_edges().into_iter().map(|e| (e, self.hasse[&e].clone())).collect();
        for (e, m) in replaced {
            match incl.iter_mut().find(|(f, _)| f == e) {
                Some(slot) => slot.1 = m.clone(),
                None => return Err(Error::InvalidInput("replacement is not a covering pair".into())),
            }
        }
        Net::new(self.poset.clone(), self.fibers.clone(), incl)
    }

    fn build_composites(&mut self) {
        let n = self.poset.len();
        // process pairs by increasing length of the longest chain between them
        let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        pairs.retain(|&(a, b)| self.poset.leq(a, b));
        let height = |a: usize, b: usize| -> usize {
            (0..n).filter(|&c| self.poset.leq(a, c) && self.poset.leq(c, b)).count()
        };
        pairs.sort_by_key(|&(a, b)| (height(a, b), a, b));
        for (a, b) in pairs {
            let m = if a == b {
                StarMorphism::identity(&self.fibers[a])
            } else if let Some(m) = self.hasse.get(&(a, b)) {
                m.clone()
            } else {
                let c = self.poset.canonical_chain(a, b)[1];
                self.composites[&(c, b)].compose(&self.hasse[&(a, c)]).expect("fibers match along the path")
            };
            self.composites.insert((a, b), m);
        }
    }

    fn path_edges(&self, a: usize, b: usize) -> Vec<(String, String)> {
        self.poset.canonical_chain(a, b)
            .windows(2)
            .map(|w| (self.poset.name(w[0]).to_string(), self.poset.name(w[1]).to_string()))
            .collect()
    }

    pub fn fiber(&self, o: usize) -> &FinDimCStar {
        &self.fibers[o]
    }

    /// Covering pairs in element order.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        self.poset.hasse_pairs()
    }

    pub fn hasse_inclusion(&self, a: usize, b: usize) -> Option<&StarMorphism> {
        self.hasse.get(&(a, b))
    }

    /// `ȷ_{ba}` for `a ≤ b`, composed along the canonical path.
    pub fn inclusion(&self, a: usize, b: usize) -> Result<&StarMorphism> {
        self.composites.get(&(a, b)).ok_or_else(|| {
            Error::InvalidInput(format!("{} is not below {}", self.poset.name(a), self.poset.name(b)))
        })
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.poset.index_of(name)
    }

    /// True iff every inclusion is invertible.
    pub fn is_net_bundle(&self) -> bool {
        self.hasse.values().all(|m| m.is_automorphism())
    }

    /// Transport along an arbitrary path of comparable elements: inclusions
    /// upward, inverses downward. Returns a morphism `A_{path[0]} → A_{path[last]}`.
    pub fn transport(&self, path: &[usize]) -> Result<StarMorphism> {
        let first = *path.first().ok_or_else(|| Error::MalformedLoop("empty path".into()))?;
        let mut t = StarMorphism::identity(&self.fibers[first]);
        for w in path.windows(2) {
            let (x, y) = (w[0], w[1]);
            let step = if self.poset.leq(x, y) {
                self.inclusion(x, y)?.clone()
            } else if self.poset.leq(y, x) {
                self.inclusion(y, x)?.inverse().map_err(|_| {
                    Error::NotABundle(format!(
                        "inclusion {}<{} is not invertible",
                        self.poset.name(y),
                        self.poset.name(x)
                    ))
                })?
            } else {
                return Err(Error::MalformedLoop(format!(
                    "{} and {} are not comparable",
                    self.poset.name(x),
                    self.poset.name(y)
                )));
            };
            t = step.compose(&t)?;
        }
        Ok(t)
    }

    /// Restriction to a subset of elements (with the induced order).
    pub fn restrict(&self, subset: &[usize]) -> Result<Net> {
        let (sub, keep) = self.poset.restrict(subset)?;
        let fibers: Vec<FinDimCStar> = keep.iter().map(|&i| self.fibers[i].clone()).collect();
        let incl = sub
            .hasse_pairs()
            .into_iter()
            .map(|(a, b)| ((a, b), self.composites[&(keep[a], keep[b])].clone()))
            .collect();
        Net::new(sub, fibers, incl)
    }

    pub fn restrict_names(&self, names: &[&str]) -> Result<Net> {
        let idx = names.iter().map(|n| self.poset.index_of(n)).collect::<Result<Vec<_>>>()?;
        self.restrict(&idx)
    }
}

/// Checks unitality, injectivity and the net relations on every chain
/// `o < o' < o''`.
pub fn validate_net(net: &Net, tol: f64) -> ValidationReport {
    let mut report = ValidationReport::new();
    for name in ["homomorphism", "injective", "unital", "net_relation"] {
        report.declare(name, tol);
    }
    let p = &net.poset;
    let mut exempt = false;
    for (a, b) in net.hasse_edges() {
        let m = &net.hasse[&(a, b)];
        let loc = vec![p.name(a).to_string(), p.name(b).to_string()];
        report.residual("homomorphism", loc.clone(), m.homomorphism_defect(), tol);
        if !m.is_injective() {
            report.fail("injective", loc.clone(), format!("{} → {} is not injective", m.source, m.target));
        }
        if m.source.is_zero() {
            exempt |= !m.target.is_zero();
        } else if !m.is_unital() {
            report.fail("unital", loc, format!("{} → {} is not unital", m.source, m.target));
        }
    }
    if exempt {
        report.note("inclusions out of the zero algebra are exempt from unitality");
    }
    for (a, b, c) in p.two_chains() {
        let lhs = net.composites[&(b, c)].compose(&net.composites[&(a, b)]).expect("fibers match");
        let residual = lhs.distance(&net.composites[&(a, c)]);
        let mut edges = net.path_edges(a, b);
        edges.extend(net.path_edges(b, c));
        edges.extend(net.path_edges(a, c));
        edges.sort();
        edges.dedup();
        report.residual_with_edges(
            "net_relation",
            vec![p.name(a).to_string(), p.name(b).to_string(), p.name(c).to_string()],
            residual,
            tol,
            edges,
        );
    }
    report
}
