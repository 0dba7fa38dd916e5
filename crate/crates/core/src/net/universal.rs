use serde::Serialize;

use super::Net;
use crate::error::{Error, Result};
use crate::matrix_cstar::{FinDimCStar, StarMorphism};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UniversalRoute {
    /// The restricted net is a bundle: the fiber at the minimum.
    Bundle,
    /// Omega has a maximum, which is a terminal object.
    Maximum,
    /// No finite-dimensional realization is attempted.
    Formal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FormalRelation {
    Linear { element: String },
    Multiplicative { element: String },
    Star { element: String },
    Compatibility { lower: String, upper: String },
}

/// Generators `(Y, k)` stand for `ε_Y(e_k)` with `e_k` the k-th basis vector of `A_Y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormalPresentation {
    pub generators: Vec<(String, usize)>,
    pub relations: Vec<FormalRelation>,
    pub realizable_at: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Realization {
    pub algebra: FinDimCStar,
    /// `ε_Y`, aligned with [`UniversalFiber::omega`].
    pub embeddings: Vec<StarMorphism>,
    /// Largest `‖ε_{Y'} ∘ ȷ_{Y'Y} − ε_Y‖` over `Y < Y'` in omega.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct UniversalFiber {
    /// Net indices of the members of omega, ascending.
    pub omega: Vec<usize>,
    pub minimum: usize,
    pub route: UniversalRoute,
    pub realization: Option<Realization>,
    pub formal: Option<FormalPresentation>,
}

impl UniversalFiber {
    pub fn epsilon(&self, y: usize) -> Option<&StarMorphism> {
        let k = self.omega.iter().position(|&o| o == y)?;
        self.realization.as_ref().map(|r| &r.embeddings[k])
    }

    pub fn algebra(&self) -> Option<&FinDimCStar> {
        self.realization.as_ref().map(|r| &r.algebra)
    }
}

fn formal_presentation(net: &Net, omega: &[usize], realizable_at: Option<usize>) -> FormalPresentation {
    let p = &net.poset;
    let mut generators = Vec::new();
    let mut relations = Vec::new();
    for &y in omega {
        let name = p.name(y).to_string();
        generators.extend((0..net.fiber(y).dim()).map(|k| (name.clone(), k)));
        relations.push(FormalRelation::Linear { element: name.clone() });
        relations.push(FormalRelation::Multiplicative { element: name.clone() });
        relations.push(FormalRelation::Star { element: name });
    }
    for &a in omega {
        for &b in omega {
            if p.lt(a, b) {
                relations.push(FormalRelation::Compatibility { lower: p.name(a).into(), upper: p.name(b).into() });
            }
        }
    }
    FormalPresentation { generators, relations, realizable_at: realizable_at.map(|m| p.name(m).to_string()) }
}

fn realize(net: &Net, omega: &[usize], algebra: FinDimCStar, embeddings: Vec<StarMorphism>) -> Result<Realization> {
    let mut residual: f64 = 0.0;
    for (i, &a) in omega.iter().enumerate() {
        for (j, &b) in omega.iter().enumerate() {
            if net.poset.lt(a, b) {
                let lhs = embeddings[j].compose(net.inclusion(a, b)?)?;
                residual = residual.max(lhs.distance(&embeddings[i]));
            }
        }
    }
    Ok(Realization { algebra, embeddings, residual })
}

/// The universal C*-algebra of the net restricted to `omega` together with the
/// canonical embeddings `ε_Y`, realized when the restriction is a bundle or
/// when omega has a maximum, and given as a formal presentation otherwise.
pub fn universal_fiber(net: &Net, omega: &[usize]) -> Result<UniversalFiber> {
    let sub = net.restrict(omega)?;
    let mut members = omega.to_vec();
    members.sort_unstable();
    members.dedup();
    let (_, down) = sub.poset.directedness();
    let min = match (down, sub.poset.minimum()) {
        (true, Some(m)) => members[m],
        _ => {
            let names: Vec<&str> = members.iter().map(|&o| net.poset.name(o)).collect();
            return Err(Error::NotDownwardDirected(names.join(",")));
        }
    };
    if sub.is_net_bundle() {
        let embeddings = members
            .iter()
            .map(|&y| net.inclusion(min, y)?.inverse())
            .collect::<Result<Vec<_>>>()?;
        let realization = realize(net, &members, net.fiber(min).clone(), embeddings)?;
        return Ok(UniversalFiber {
            omega: members,
            minimum: min,
            route: UniversalRoute::Bundle,
            realization: Some(realization),
            formal: None,
        });
    }
    let max = sub.poset.maximum().map(|m| members[m]);
    let formal = Some(formal_presentation(net, &members, max));
    let (route, realization) = match max {
        Some(top) => {
            let embeddings =
                members.iter().map(|&y| net.inclusion(y, top).cloned()).collect::<Result<Vec<_>>>()?;
            (UniversalRoute::Maximum, Some(realize(net, &members, net.fiber(top).clone(), embeddings)?))
        }
        None => (UniversalRoute::Formal, None),
    };
    Ok(UniversalFiber { omega: members, minimum: min, route, realization, formal })
}
