//! C*-covers and the nets they induce, the gap-filling example, the split
//! circle module, character line bundles and twisted sectors.

mod group;
mod twisted;

pub use group::{validate_group_rep, FiniteGroupRep};
pub use twisted::{sector_index, twisted_sector_module, Sector, SectorIndex, SectorModule, DEFAULT_SECTOR_TRUNCATION};

use serde::Serialize;

use crate::catalog;
use crate::error::{Error, Result};
use crate::field_algebra::build_field_algebra;
use crate::fredholm::FredholmNetModule;
use crate::linalg::{self, CMat};
use crate::matrix_cstar::{AlgElement, FinDimCStar, StarMorphism, Subalgebra};
use crate::net::{validate_net, HilbertNetBundle, Net, Representation};
use crate::poset_topology::{loop_word, Character, EdgeLoop, GroupPresentation, Poset};
use crate::report::ValidationReport;
use crate::space_model::SpaceModel;

/// A region of points with an algebra spanned by `basis` inside the ambient
/// algebra; an empty basis stands for the zero algebra.
#[derive(Debug, Clone)]
pub struct CoverPart {
    pub region: Vec<usize>,
    pub basis: Vec<AlgElement>,
}

#[derive(Debug, Clone)]
pub struct CStarCover {
    pub ambient: FinDimCStar,
    pub parts: Vec<CoverPart>,
}

impl CStarCover {
    pub fn whole(ambient: &FinDimCStar, points: usize) -> Self {
        CStarCover {
            ambient: ambient.clone(),
            parts: vec![CoverPart { region: (0..points).collect(), basis: ambient.basis() }],
        }
    }
}

pub fn validate_cover(c: &CStarCover, points: usize, tol: f64) -> ValidationReport {
    let mut rep = ValidationReport::new();
    for name in ["disjoint", "covering", "subalgebra"] {
        rep.declare(name, tol);
    }
    let mut owner: Vec<Option<usize>> = vec![None; points];
    for (i, part) in c.parts.iter().enumerate() {
        for &x in &part.region {
            if x >= points {
                rep.fail("covering", vec![i.to_string()], format!("point {x} out of range"));
                continue;
            }
            if let Some(j) = owner[x] {
                rep.fail("disjoint", vec![j.to_string(), i.to_string()], format!("both parts contain point {x}"));
            }
            owner[x] = Some(i);
        }
        if !part.basis.is_empty() {
            if let Err(e) = Subalgebra::from_basis(&c.ambient, &part.basis) {
                rep.fail("subalgebra", vec![i.to_string()], e.to_string());
            }
        }
    }
    if let Some(x) = owner.iter().position(Option::is_none) {
        rep.fail("covering", Vec::new(), format!("point {x} lies in no part"));
    }
    if c.parts.iter().all(|p| p.basis.is_empty() || p.region.is_empty()) {
        rep.fail("covering", Vec::new(), "every part carries the zero algebra");
    }
    rep
}

/// The net of a cover together with the embedding of each fiber into the
/// ambient algebra.
#[derive(Debug, Clone)]
pub struct CoverNet {
    pub net: Net,
    pub embeddings: Vec<StarMorphism>,
}

fn zero_morphism(target: &FinDimCStar) -> StarMorphism {
    StarMorphism::embedding(FinDimCStar::zero(), target.clone(), vec![Vec::new(); target.blocks.len()])
        .expect("zero source fits any target")
}

/// Fiber at `o` generated by the parts meeting `κ(o)`.
pub fn cover_to_net(c: &CStarCover, model: &SpaceModel) -> Result<CoverNet> {
    let rep = validate_cover(c, model.num_points(), 1e-10);
    if let Some(v) = rep.violations.first() {
        return Err(Error::InvalidInput(format!("invalid cover ({}): {}", v.check, v.detail)));
    }
    let p = &model.poset;
    let mut subs: Vec<Option<Subalgebra>> = Vec::with_capacity(p.len());
    for o in 0..p.len() {
        let gens: Vec<AlgElement> = c
            .parts
            .iter()
            .filter(|part| part.region.iter().any(|&x| model.contains(o, x)))
            .flat_map(|part| part.basis.iter().cloned())
            .collect();
        subs.push(if gens.is_empty() { None } else { Some(Subalgebra::generated_by(&c.ambient, &gens)?) });
    }
    let fibers: Vec<FinDimCStar> =
        subs.iter().map(|s| s.as_ref().map_or_else(FinDimCStar::zero, |s| s.algebra.clone())).collect();
    let mut incl = Vec::new();
    for (a, b) in p.hasse_pairs() {
        let m = match (&subs[a], &subs[b]) {
            (None, _) => zero_morphism(&fibers[b]),
            (Some(sa), Some(sb)) => sa.inclusion_into(sb)?,
            (Some(_), None) => {
                return Err(Error::InvalidInput(format!("fiber at {} is not monotone", p.name(b))));
            }
        };
        incl.push(((a, b), m));
    }
    let net = Net::new(p.clone(), fibers, incl)?;
    let embeddings =
        subs.iter().map(|s| s.as_ref().map_or_else(|| zero_morphism(&c.ambient), |s| s.embedding.clone())).collect();
    Ok(CoverNet { net, embeddings })
}

#[derive(Debug, Clone, Serialize)]
pub struct Subtrivial {
    pub fibers: Vec<String>,
    pub dimension: usize,
    pub expected: usize,
    pub report: ValidationReport,
}

/// Builds the cover with zero algebra on `dead` and `a` elsewhere, its net
/// and field algebra, and checks that every point fiber is `a`.
pub fn subtrivial_check(model: &SpaceModel, a: &FinDimCStar, dead: &[usize], tol: f64) -> Result<Subtrivial> {
    let n = model.num_points();
    let live: Vec<usize> = (0..n).filter(|x| !dead.contains(x)).collect();
    let mut parts = vec![CoverPart { region: live, basis: a.basis() }];
    if !dead.is_empty() {
        parts.push(CoverPart { region: dead.to_vec(), basis: Vec::new() });
    }
    let cover = CStarCover { ambient: a.clone(), parts };
    let expected = n * a.dim();
    let mut report = validate_cover(&cover, n, tol);
    if !report.is_valid() {
        return Ok(Subtrivial { fibers: Vec::new(), dimension: 0, expected, report });
    }
    let cn = cover_to_net(&cover, model)?;
    report.merge("net.", validate_net(&cn.net, tol));
    let fa = build_field_algebra(&cn.net, model)?;
    report.declare("fiber_is_ambient", tol);
    report.declare("dimension", tol);
    for (x, f) in fa.fibers.iter().enumerate() {
        if f != a {
            report.fail("fiber_is_ambient", vec![model.points[x].clone()], format!("fiber {f} differs from {a}"));
        }
    }
    if fa.dim() != expected {
        report.fail("dimension", Vec::new(), format!("dimension {} ≠ {expected}", fa.dim()));
    }
    Ok(Subtrivial { fibers: fa.fibers.iter().map(|f| f.to_string()).collect(), dimension: fa.dim(), expected, report })
}

/// Rank-one bundle with `U = 1` on tree edges and the value of `chi` on the
/// word of every other covering pair.
pub fn character_line_bundle(chi: &Character, poset: &Poset, pres: &GroupPresentation) -> Result<HilbertNetBundle> {
    if chi.values.len() != pres.generators.len() {
        return Err(Error::InvalidInput("character does not match the presentation".into()));
    }
    let mut unitaries = Vec::new();
    for (a, b) in poset.hasse_pairs() {
        let mut verts = pres.tree_path(a);
        let mut back = pres.tree_path(b);
        back.reverse();
        verts.extend(back);
        let names: Vec<&str> = verts.iter().map(|&i| poset.name(i)).collect();
        let l = EdgeLoop::through(poset, &names)?;
        let w = loop_word(poset, &l, pres)?;
        unitaries.push(((a, b), CMat::from_element(1, 1, chi.evaluate(&w))));
    }
    HilbertNetBundle::new(poset.clone(), vec![1; poset.len()], unitaries)
}

/// The split circle with its Fredholm module.
#[derive(Debug, Clone)]
pub struct SplitCircle {
    pub model: SpaceModel,
    pub net: Net,
    pub module: FredholmNetModule,
    /// `U•` on the twisted edge.
    pub twist: CMat,
}

/// Circle model with `A₁ = diag ⊂ A = M₂` on `{x1,x2,x3}` and `A` on
/// `{x4,x5,x6}`, inclusion `a2 < b3` twisted by `ad u`, `u = diag(1, e^{iψ})`,
/// and the module `H = ℂ²⊗ℂ² ⊕ ℂ²`, `π•(a) = 1⊗a ⊕ a`, `T(ξ₁,ξ₂) = ξ₁`,
/// `U• = diag(1, e^{iφ})⊗u ⊕ u` on the twisted edge.
pub fn split_circle_example(phi: f64, psi: f64) -> Result<SplitCircle> {
    let model = catalog::circle_model();
    let m2 = FinDimCStar::matrix(2);
    let diag: Vec<AlgElement> = (0..2).map(|i| AlgElement::matrix_unit(&m2, 0, i, i)).collect();
    let cover = CStarCover {
        ambient: m2.clone(),
        parts: vec![CoverPart { region: vec![0, 1, 2], basis: diag }, CoverPart { region: vec![3, 4, 5], basis: m2.basis() }],
    };
    let cn = cover_to_net(&cover, &model)?;
    let p = &model.poset;
    let (a2, b3) = (p.index_of("a2")?, p.index_of("b3")?);
    let u = linalg::diag(&[linalg::ONE, linalg::phase(psi)]);
    let alpha = StarMorphism::ad_matrix(&u)?;
    let twisted = StarMorphism::from_images(&cn.net.fibers[a2], &cn.net.fibers[b3], |b, r, col| {
        let e = cn.embeddings[a2].apply_unchecked(&AlgElement::matrix_unit(&cn.net.fibers[a2], b, r, col));
        cn.embeddings[b3].preimage(&alpha.apply_unchecked(&e)).expect("embedding is injective").0
    });
    let net = cn.net.with_inclusions(&[((a2, b3), twisted)])?;
    let v = linalg::diag(&[linalg::ONE, linalg::phase(phi)]);
    let twist = linalg::block_diag(&[linalg::kron(&v, &u), u.clone()]);
    let bundle = HilbertNetBundle::constant(p.clone(), 6).with_unitaries(&[((a2, b3), twist.clone())])?;
    let m6 = FinDimCStar::matrix(6);
    let components = (0..p.len())
        .map(|o| {
            StarMorphism::from_images(&net.fibers[o], &m6, |b, r, col| {
                let e = cn.embeddings[o].apply_unchecked(&AlgElement::matrix_unit(&net.fibers[o], b, r, col));
                AlgElement::from_matrix(linalg::kron(&linalg::eye(3), &e.to_matrix()))
            })
        })
        .collect();
    let representation = Representation::new(net.clone(), bundle, components)?;
    let mut t = linalg::zeros(2, 4);
    t[(0, 0)] = linalg::ONE;
    t[(1, 1)] = linalg::ONE;
    let mut f = linalg::zeros(6, 6);
    f.view_mut((4, 0), (2, 4)).copy_from(&t);
    f.view_mut((0, 4), (4, 2)).copy_from(&t.adjoint());
    let gamma = linalg::real_diag(&[1.0, 1.0, 1.0, 1.0, -1.0, -1.0]);
    let module = FredholmNetModule::finite(representation, Some(vec![gamma; p.len()]), vec![f; p.len()])?;
    Ok(SplitCircle { model, net, module, twist })
}
