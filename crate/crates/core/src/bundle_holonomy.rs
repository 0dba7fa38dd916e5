//! Transition cocycles of net bundles over a cover and classification of
//! Hilbert net bundles over spaces with cyclic fundamental group.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::matrix_cstar::{unitary_conjugacy, StarMorphism};
use crate::net::{HilbertNetBundle, Net};
use crate::poset_topology::pi1_presentation;
use crate::report::ValidationReport;
use crate::space_model::SpaceModel;

#[derive(Debug, Clone)]
pub struct Transition {
    pub alpha: usize,
    pub beta: usize,
    /// `θ_{αβ} : A_{Y_β} → A_{Y_α}`.
    pub theta: StarMorphism,
    pub witnesses: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Cocycle {
    /// Net indices of the cover elements `Y_α`.
    pub cover: Vec<usize>,
    pub transitions: Vec<Transition>,
    pub report: ValidationReport,
}

impl Cocycle {
    /// `θ_{αβ}` for positions `α, β` in the cover.
    pub fn theta(&self, alpha: usize, beta: usize) -> Option<&StarMorphism> {
        self.transitions.iter().find(|t| t.alpha == alpha && t.beta == beta).map(|t| &t.theta)
    }

    /// `θ_{c_0 c_{k-1}} ∘ … ∘ θ_{c_2 c_1} ∘ θ_{c_1 c_0}` along a closed cycle of
    /// cover positions `c_0, c_1, …, c_{k-1}`.
    pub fn cycle_product(&self, cycle: &[usize]) -> Result<StarMorphism> {
        let mut acc: Option<StarMorphism> = None;
        for k in 0..cycle.len() {
            let (from, to) = (cycle[k], cycle[(k + 1) % cycle.len()]);
            let step = self
                .theta(to, from)
                .ok_or_else(|| Error::MalformedLoop(format!("cover positions {from} and {to} do not overlap")))?;
            acc = Some(match acc {
                None => step.clone(),
                Some(a) => step.compose(&a)?,
            });
        }
        acc.ok_or_else(|| Error::MalformedLoop("empty cycle".into()))
    }

    pub fn nontrivial(&self, tol: f64) -> Vec<(usize, usize)> {
        self.transitions
            .iter()
            .filter(|t| t.alpha < t.beta && t.theta.distance(&StarMorphism::identity(&t.theta.source)) > tol)
            .map(|t| (t.alpha, t.beta))
            .collect()
    }
}

fn common_lower(net: &Net, ys: &[usize]) -> Vec<usize> {
    (0..net.poset.len()).filter(|&u| ys.iter().all(|&y| net.poset.leq(u, y))).collect()
}

fn theta_via(net: &Net, a: usize, b: usize, u: usize) -> Result<StarMorphism> {
    net.inclusion(u, a)?.compose(&net.inclusion(u, b)?.inverse()?)
}

/// `θ_{αβ} = ȷ_{Y_α U} ∘ ȷ_{U Y_β}` on every overlapping pair of the cover,
/// with identity, antisymmetry, triple-overlap and witness-independence checks.
pub fn transition_cocycle(net: &Net, model: &SpaceModel, cover: &[usize], tol: f64) -> Result<Cocycle> {
    if !net.is_net_bundle() {
        return Err(Error::NotABundle("transition maps need invertible inclusions".into()));
    }
    if net.poset != model.poset {
        return Err(Error::ShapeMismatch("net and space model use different posets".into()));
    }
    let p = &net.poset;
    let mut covered = vec![false; model.num_points()];
    for &y in cover {
        for &x in &model.extent[y] {
            covered[x] = true;
        }
    }
    let mut report = ValidationReport::new();
    for c in ["covering", "identity", "antisymmetry", "triple", "witness_independence"] {
        report.declare(c, tol);
    }
    for (x, ok) in covered.iter().enumerate() {
        if !ok {
            report.fail("covering", vec![model.points[x].clone()], "point not covered");
        }
    }
    let mut transitions = Vec::new();
    for (alpha, &a) in cover.iter().enumerate() {
        for (beta, &b) in cover.iter().enumerate() {
            if !model.extent[a].iter().any(|x| model.extent[b].contains(x)) {
                continue;
            }
            let witnesses = common_lower(net, &[a, b]);
            let Some(&u0) = witnesses.first() else {
                return Err(Error::NoRefinementWitness(p.name(a).into(), p.name(b).into()));
            };
            let theta = theta_via(net, a, b, u0)?;
            let mut worst: f64 = 0.0;
            for &u in &witnesses[1..] {
                worst = worst.max(theta_via(net, a, b, u)?.distance(&theta));
            }
            report.residual("witness_independence", vec![p.name(a).into(), p.name(b).into()], worst, tol);
            transitions.push(Transition { alpha, beta, theta, witnesses });
        }
    }
    let cocycle = Cocycle { cover: cover.to_vec(), transitions, report };
    let mut report = cocycle.report.clone();
    for t in &cocycle.transitions {
        let loc = vec![p.name(cover[t.alpha]).into(), p.name(cover[t.beta]).into()];
        if t.alpha == t.beta {
            report.residual("identity", loc.clone(), t.theta.distance(&StarMorphism::identity(&t.theta.source)), tol);
        }
        let back = cocycle.theta(t.beta, t.alpha).expect("overlap is symmetric");
        let res = back.compose(&t.theta)?.distance(&StarMorphism::identity(&t.theta.source));
        report.residual("antisymmetry", loc, res, tol);
    }
    let n = cover.len();
    for a in 0..n {
        for b in 0..n {
            for g in 0..n {
                if common_lower(net, &[cover[a], cover[b], cover[g]]).is_empty() {
                    continue;
                }
                let (Some(ab), Some(bg), Some(ag)) = (cocycle.theta(a, b), cocycle.theta(b, g), cocycle.theta(a, g))
                else {
                    continue;
                };
                let res = ab.compose(bg)?.distance(ag);
                let loc = [a, b, g].iter().map(|&i| p.name(cover[i]).to_string()).collect();
                report.residual("triple", loc, res, tol);
            }
        }
    }
    Ok(Cocycle { report, ..cocycle })
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub isomorphic_as_net_bundles: bool,
    pub locally_trivial_note: String,
}

const LOCALLY_TRIVIAL_NOTE: &str =
    "the unitary group is connected, so every bundle with these fibers is trivial as a locally trivial bundle";

/// Net bundles over a space with fundamental group ℤ are isomorphic iff their
/// holonomy unitaries are unitarily conjugate.
pub fn classify_hilbert_bundles(u: &CMat, v: &CMat, tol: f64) -> Result<Classification> {
    if u.shape() != v.shape() || u.nrows() != u.ncols() {
        return Err(Error::ShapeMismatch("holonomy unitaries must be square of the same size".into()));
    }
    if !linalg::is_unitary(u, tol.max(1e-10)) || !linalg::is_unitary(v, tol.max(1e-10)) {
        return Err(Error::InvalidInput("holonomies must be unitary".into()));
    }
    Ok(Classification {
        isomorphic_as_net_bundles: unitary_conjugacy(u, v, tol),
        locally_trivial_note: LOCALLY_TRIVIAL_NOTE.into(),
    })
}

/// Classification of two Hilbert net bundles by holonomy at `base`.
pub fn classify_bundles(b1: &HilbertNetBundle, b2: &HilbertNetBundle, base: &str, tol: f64) -> Result<Classification> {
    if b1.poset != b2.poset {
        return Err(Error::InvalidInput("bundles live over different posets".into()));
    }
    let pres = pi1_presentation(&b1.poset, base)?;
    match pres.simplified.generators.as_slice() {
        [] => {
            let same = b1.dims == b2.dims;
            Ok(Classification { isomorphic_as_net_bundles: same, locally_trivial_note: LOCALLY_TRIVIAL_NOTE.into() })
        }
        &[g] => {
            let h1 = b1.holonomy(&pres)?;
            let h2 = b2.holonomy(&pres)?;
            let i = g as usize - 1;
            classify_hilbert_bundles(&h1[i], &h2[i], tol)
        }
        gens => Err(Error::UnsupportedGroup(format!("{} generators after simplification", gens.len()))),
    }
}
