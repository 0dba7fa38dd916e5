//! End-to-end acceptance run: one pass/fail line per criterion.
//!
//! Criteria listed in `KNOWN_DEVIATIONS` are still computed and reported;
//! their failure does not fail the run.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cstar_nets::bundle_holonomy::transition_cocycle;
use cstar_nets::catalog;
use cstar_nets::field_algebra::{
    build_field_algebra, check_competitor, directed_tensor_check, fiber_iso_check, functor_on_morphism,
    lift_heteromorphism, FieldAlgebra, HeteroMorphism, LinearFieldMap, VectorField,
};
use cstar_nets::fredholm::{assemble_family, frame_index, toeplitz_index, validate_module, Symbol, ToeplitzOp};
use cstar_nets::linalg::{self, c, phase, random_unitary, real_diag, CMat, C64};
use cstar_nets::matrix_cstar::{automorphisms_conjugate, AlgElement, FinDimCStar, StarMorphism};
use cstar_nets::net::{equivalent_bundles, holonomy, loop_transport, validate_net, Net, NetMorphism};
use cstar_nets::poset_topology::{evaluate_character, pi1_presentation, EdgeLoop, GroupKind, Poset};
use cstar_nets::sectors::{
    sector_index, split_circle_example, subtrivial_check, twisted_sector_module, FiniteGroupRep, Sector,
};
use cstar_nets::space_model::SpaceModel;

const TOL: f64 = 1e-10;

/// Criteria whose stated value disagrees with the computed one.
const KNOWN_DEVIATIONS: &[(usize, &str)] =
    &[(13, "z^2(z-2)(z-1/2) has three zeros in the unit disc, so its Toeplitz index is -3, not -2")];

type Outcome = Result<String, String>;
type Criterion = (usize, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn m2() -> FinDimCStar {
    FinDimCStar::matrix(2)
}

fn twisted(u: &CMat) -> Net {
    catalog::twisted_circle_net(&m2(), &StarMorphism::ad_matrix(u).unwrap())
}

fn random_directed(rng: &mut ChaCha8Rng, n: usize, up: bool) -> Poset {
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut leq: Vec<(String, String)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                leq.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    let mut all = names.clone();
    all.push("m".into());
    for nm in &names {
        if up {
            leq.push((nm.clone(), "m".into()));
        } else {
            leq.push(("m".into(), nm.clone()));
        }
    }
    let el: Vec<&str> = all.iter().map(String::as_str).collect();
    let pairs: Vec<(&str, &str)> = leq.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Poset::new(&el, &pairs).unwrap()
}

fn pi1_correctness() -> Outcome {
    let mut worst = Duration::ZERO;
    let mut timed = |p: &Poset| {
        let t = Instant::now();
        let pres = pi1_presentation(p, p.name(0)).map_err(err);
        worst = worst.max(t.elapsed());
        pres
    };
    let c6 = timed(&catalog::c6_poset())?;
    ensure(c6.generators.len() == 1 && c6.relators.is_empty(), "circle: expected one generator and no relators")?;
    ensure(c6.kind() == GroupKind::Free(1) && c6.abelianization == vec![0], "circle: expected Z")?;
    let tet = timed(&catalog::tetrahedron_boundary_poset())?;
    ensure(tet.is_trivial(), "tetrahedron boundary: expected trivial group")?;
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut count = 0;
    for n in 2..9 {
        for up in [true, false] {
            let p = random_directed(&mut rng, n, up);
            ensure(timed(&p)?.is_trivial(), format!("directed poset of size {} not simply connected", n + 1))?;
            count += 1;
        }
    }
    ensure(worst < Duration::from_secs(1), format!("slowest presentation took {worst:?}"))?;
    Ok(format!("C6 = Z, tetrahedron trivial, {count} directed posets trivial, slowest {worst:.1?}"))
}

fn net_validation() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let p = catalog::c6_poset();
    let edges: Vec<_> = p
        .hasse_pairs()
        .into_iter()
        .map(|e| (e, StarMorphism::ad_matrix(&random_unitary(&mut rng, 2)).unwrap()))
        .collect();
    let good = Net::constant(p.clone(), &m2()).with_inclusions(&edges).map_err(err)?;
    let r = validate_net(&good, TOL);
    ensure(r.is_valid(), format!("random twisted bundle rejected: {:?}", r.violations))?;
    let residual = r.max_residual();

    // a non-unitary conjugator on one circle edge breaks the *-homomorphism property
    let hasse = p.hasse_pairs();
    for k in 0..10 {
        let (a, b) = hasse[rng.gen_range(0..hasse.len())];
        let bad = &random_unitary(&mut rng, 2) * c(1.0 + 0.1 * (k + 1) as f64, 0.0);
        let m = StarMorphism { conjugators: vec![bad], ..StarMorphism::identity(&m2()) };
        let net = good.with_inclusions(&[((a, b), m)]).map_err(err)?;
        let r = validate_net(&net, TOL);
        let located = r.violations_of("homomorphism").iter().any(|v| v.location == [p.name(a), p.name(b)]);
        ensure(located, format!("fault on {}<{} not located", p.name(a), p.name(b)))?;
    }
    // a twisted edge on a cover with 2-chains breaks the net relations
    let lp = catalog::layered_circle_poset();
    let flat = Net::constant(lp.clone(), &m2());
    let lhasse = lp.hasse_pairs();
    for _ in 0..10 {
        let (a, b) = lhasse[rng.gen_range(0..lhasse.len())];
        let u = random_unitary(&mut rng, 2);
        let net = flat.with_inclusions(&[((a, b), StarMorphism::ad_matrix(&u).unwrap())]).map_err(err)?;
        let r = validate_net(&net, TOL);
        let edge = (lp.name(a).to_string(), lp.name(b).to_string());
        ensure(!r.violations_of("net_relation").is_empty(), format!("twist on {}<{} not detected", edge.0, edge.1))?;
        ensure(r.suspect_edges().contains(&edge), format!("twist on {}<{} not located", edge.0, edge.1))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), format!("took {t:?}"))?;
    Ok(format!("valid bundle max residual {residual:.1e}; 20/20 seeded faults detected and located; {t:.1?}"))
}

fn holonomy_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let p = catalog::c6_poset();
    let pres = pi1_presentation(&p, "a1").map_err(err)?;
    for _ in 0..10 {
        let u = random_unitary(&mut rng, 2);
        let net = twisted(&u);
        let h = holonomy(&net, &pres, TOL).map_err(err)?;
        let want = StarMorphism::ad_matrix(&u).unwrap();
        ensure(automorphisms_conjugate(&h[0], &want, TOL).map_err(err)?, "holonomy not conjugate to ad(u)")?;
        let w = random_unitary(&mut rng, 2);
        let conj = twisted(&(&w * &u * w.adjoint()));
        ensure(equivalent_bundles(&net, &conj, "a1", TOL).map_err(err)?, "u and wuw* judged inequivalent")?;
    }
    let same = equivalent_bundles(&twisted(&linalg::eye(2)), &twisted(&real_diag(&[1.0, -1.0])), "a1", TOL).map_err(err)?;
    ensure(!same, "1 and diag(1,-1) judged equivalent")?;
    Ok("10/10 holonomies conjugate to ad(u); wuw* equivalent; diag(1,-1) inequivalent to 1".into())
}

fn cocycle_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let m = catalog::circle_model();
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let u = random_unitary(&mut rng, 2);
        let net = twisted(&u);
        let cover: Vec<usize> = ["b1", "b2", "b3"].iter().map(|n| net.index_of(n).unwrap()).collect();
        let cov = transition_cocycle(&net, &m, &cover, TOL).map_err(err)?;
        ensure(cov.report.is_valid(), format!("{:?}", cov.report.violations))?;
        worst = worst.max(cov.report.max_residual());
        let product = cov.cycle_product(&[0, 1, 2]).map_err(err)?;
        let l = EdgeLoop::through(&net.poset, &["b1", "a1", "b2", "a2", "b3", "a3", "b1"]).map_err(err)?;
        let d = product.distance(&loop_transport(&net, &l).map_err(err)?);
        ensure(d < TOL, format!("cycle product differs from loop holonomy by {d:.2e}"))?;
        worst = worst.max(d);
    }
    // several refinement witnesses per overlap
    let lm = catalog::layered_circle_model();
    let w: Vec<CMat> = (0..lm.poset.len()).map(|_| random_unitary(&mut rng, 2)).collect();
    let gauge: Vec<_> = lm
        .poset
        .hasse_pairs()
        .into_iter()
        .map(|(a, b)| ((a, b), StarMorphism::ad_matrix(&(&w[b] * w[a].adjoint())).unwrap()))
        .collect();
    let net = Net::constant(lm.poset.clone(), &m2()).with_inclusions(&gauge).map_err(err)?;
    let t: Vec<usize> = (1..=6).map(|i| net.index_of(&format!("t{i}")).unwrap()).collect();
    let cov = transition_cocycle(&net, &lm, &t, TOL).map_err(err)?;
    ensure(cov.report.is_valid(), format!("{:?}", cov.report.violations))?;
    let multi = cov.transitions.iter().filter(|t| t.witnesses.len() >= 2).count();
    ensure(multi > 0, "no overlap with several witnesses")?;
    worst = worst.max(cov.report.max_residual());
    Ok(format!("identity, triple and witness laws hold; {multi} overlaps with several witnesses; max residual {worst:.1e}"))
}

fn field_algebra_construction() -> Outcome {
    let start = Instant::now();
    let m = catalog::circle_model();
    let fa = build_field_algebra(&Net::constant(m.poset.clone(), &m2()), &m).map_err(err)?;
    ensure(fa.dim() == 24, format!("dim = {}, expected 24", fa.dim()))?;
    let tau = HeteroMorphism::tau(&fa).map_err(err)?;
    let r = tau.validate(&fa.net, &fa, TOL);
    ensure(r.is_valid(), format!("tau: {:?}", r.violations))?;
    let rep = fa.report(TOL);
    ensure(rep.is_valid(), format!("{:?}", rep.violations))?;
    let lm = catalog::layered_circle_model();
    let layered = build_field_algebra(&Net::constant(lm.poset.clone(), &m2()), &lm).map_err(err)?;
    let lrep = layered.report(TOL);
    ensure(lrep.is_valid(), format!("layered: {:?}", lrep.violations))?;
    let witnesses: usize = (0..lm.poset.len()).map(|y| lm.witnesses(y).len()).sum();
    let t = start.elapsed();
    ensure(t < Duration::from_secs(5), format!("took {t:?}"))?;
    Ok(format!("dim 24; tau identity residual {:.1e}; plateau independence over {witnesses} witnesses; {t:.1?}", r.max_residual()))
}

fn diagonal_twist_algebra() -> (FieldAlgebra, CMat) {
    let model = catalog::circle_model();
    let u = linalg::diag(&[linalg::ONE, phase(0.9)]);
    let fa = build_field_algebra(&twisted(&u), &model).unwrap();
    (fa, u)
}

fn pointwise_ad(fa: &FieldAlgebra, v: &VectorField, w: &CMat) -> VectorField {
    let _ = fa;
    VectorField {
        values: v
            .values
            .iter()
            .map(|a| AlgElement { blocks: a.blocks.iter().map(|b| w * b * w.adjoint()).collect() })
            .collect(),
    }
}

fn ad_everywhere(net: &Net, w: &CMat) -> NetMorphism {
    NetMorphism { components: net.fibers.iter().map(|_| StarMorphism::ad_matrix(w).unwrap()).collect() }
}

fn universal_property() -> Outcome {
    let (fa, _) = diagonal_twist_algebra();
    let tau = HeteroMorphism::tau(&fa).map_err(err)?;
    let lift = lift_heteromorphism(&fa, &fa, &tau, TOL).map_err(err)?;
    ensure(lift.report.is_valid(), format!("{:?}", lift.report.violations))?;
    let d_id = lift.map.distance_on(&LinearFieldMap::identity(&fa), &fa);
    ensure(d_id < TOL, format!("lift of tau is {d_id:.2e} from the identity"))?;

    // diagonal unitaries commute with the twist, so ad(w) on every element is a net automorphism
    let w = linalg::diag(&[phase(0.4), phase(-1.1)]);
    let psi = ad_everywhere(&fa.net, &w);
    ensure(psi.validate(&fa.net, &fa.net, TOL).is_valid(), "psi is not a net morphism")?;
    let het = tau.after(&psi, &fa.net, &fa).map_err(err)?;
    let lift = lift_heteromorphism(&fa, &fa, &het, TOL).map_err(err)?;
    ensure(lift.report.is_valid(), format!("{:?}", lift.report.violations))?;
    let mut worst: f64 = 0.0;
    for b in fa.basis() {
        worst = worst.max(lift.map.apply(&b, &fa).dist(&pointwise_ad(&fa, &b, &w)));
    }
    ensure(worst < TOL, format!("lift of tau∘psi differs from pointwise ad(w) by {worst:.2e}"))?;
    let (psi_tau, _) = functor_on_morphism(&psi, &fa, &fa, TOL).map_err(err)?;
    let d = lift.map.distance_on(&psi_tau, &fa);
    ensure(d < TOL, format!("lift differs from psi^tau by {d:.2e}"))?;

    let id = LinearFieldMap::identity(&fa);
    ensure(check_competitor(&fa, &fa, &tau, &id, TOL).is_ok(), "identity rejected as lift of tau")?;
    let mut rejected = 0;
    for k in [0, 7, fa.generators.len() - 1] {
        let g = fa.generator_fields()[k].coord_vector();
        let bump = &g * g.adjoint() * c(1.0 / g.norm_squared(), 0.0);
        let competitor = LinearFieldMap { matrix: &id.matrix + bump };
        if check_competitor(&fa, &fa, &tau, &competitor, TOL).is_err() {
            rejected += 1;
        }
    }
    ensure(rejected == 3, format!("only {rejected}/3 competitors rejected"))?;
    Ok(format!("lift(tau) = id; lift(tau∘psi) = psi^tau on {} basis fields (max {worst:.1e}); 3/3 competitors rejected", fa.dim()))
}

fn fiber_isomorphism() -> Outcome {
    let m = catalog::circle_model();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let nets = [
        ("constant", Net::constant(m.poset.clone(), &m2())),
        ("twisted", twisted(&random_unitary(&mut rng, 2))),
    ];
    for (name, net) in nets {
        let fa = build_field_algebra(&net, &m).map_err(err)?;
        for x in 0..m.num_points() {
            let f = fiber_iso_check(&fa, x, TOL).map_err(err)?;
            ensure(f.report.is_valid(), format!("{name} at {}: {:?}", f.point, f.report.violations))?;
            ensure(f.rank == f.fiber_dim && f.rank == 4, format!("{name} at {}: rank {}", f.point, f.rank))?;
        }
    }
    Ok("rank 4 = dim A_x and r^x = tau^x∘e_x at all 6 points, constant and twisted".into())
}

fn functoriality() -> Outcome {
    let (fa, _) = diagonal_twist_algebra();
    let psi = ad_everywhere(&fa.net, &linalg::diag(&[phase(0.4), phase(-1.1)]));
    let chi = ad_everywhere(&fa.net, &linalg::diag(&[phase(2.3), phase(0.2)]));
    let (psi_t, rep) = functor_on_morphism(&psi, &fa, &fa, 1e-12).map_err(err)?;
    let gi = rep.violations_of("generator_identity");
    ensure(gi.is_empty(), format!("generator identity fails on {} generators", gi.len()))?;
    let (chi_t, _) = functor_on_morphism(&chi, &fa, &fa, 1e-12).map_err(err)?;
    let composite = psi.compose(&chi).map_err(err)?;
    let (comp_t, _) = functor_on_morphism(&composite, &fa, &fa, 1e-12).map_err(err)?;
    let d = comp_t.distance_on(&psi_t.compose(&chi_t), &fa);
    ensure(d < 1e-12, format!("(psi∘chi)^tau differs from psi^tau∘chi^tau by {d:.2e}"))?;
    let id = NetMorphism::identity(&fa.net);
    let (id_t, _) = functor_on_morphism(&id, &fa, &fa, 1e-12).map_err(err)?;
    ensure(id_t.distance_on(&LinearFieldMap::identity(&fa), &fa) < 1e-12, "id^tau is not the identity")?;
    Ok(format!("generator identity on {} generators within 1e-12; composition residual {d:.1e}", fa.generators.len()))
}

fn tau_rank(fa: &FieldAlgebra, y: usize) -> Result<usize, String> {
    let basis = fa.net.fiber(y).basis();
    let mut m = linalg::zeros(fa.ambient_dim(), basis.len());
    for (j, t) in basis.iter().enumerate() {
        m.set_column(j, &fa.tau(y, t).map_err(err)?.coord_vector());
    }
    Ok(linalg::rank(&m, 1e-9))
}

fn degeneracy() -> Outcome {
    let m = catalog::circle_model();
    let zero = build_field_algebra(&Net::vanishing(m.poset.clone()), &m).map_err(err)?;
    ensure(zero.dim() == 0, format!("vanishing net gives dim {}", zero.dim()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let chain = catalog::chain_interval_model();
    let m1 = FinDimCStar::matrix(1);
    let emb = StarMorphism::embedding(m1.clone(), m2(), vec![vec![2]]).unwrap();
    let cases = [
        ("constant", Net::constant(m.poset.clone(), &m2()), m.clone()),
        ("twisted", twisted(&random_unitary(&mut rng, 2)), m.clone()),
        ("injective chain", Net::new(chain.poset.clone(), vec![m1, m2()], vec![((0, 1), emb)]).unwrap(), chain),
    ];
    let mut checked = 0;
    for (name, net, model) in cases {
        let fa = build_field_algebra(&net, &model).map_err(err)?;
        for y in 0..net.poset.len() {
            let r = tau_rank(&fa, y)?;
            let d = net.fiber(y).dim();
            ensure(r == d, format!("{name}: tau at {} has rank {r}, dim {d}", net.poset.name(y)))?;
            checked += 1;
        }
    }
    Ok(format!("vanishing net gives dim 0; tau_Y injective at {checked} elements"))
}

fn directed_case() -> Outcome {
    let chain = catalog::chain_interval_model();
    let m1 = FinDimCStar::matrix(1);
    let emb = StarMorphism::embedding(m1.clone(), m2(), vec![vec![2]]).unwrap();
    let net = Net::new(chain.poset.clone(), vec![m1, m2()], vec![((0, 1), emb)]).map_err(err)?;
    let d = directed_tensor_check(&net, &chain, TOL).map_err(err)?;
    ensure(d.report.is_valid(), format!("{:?}", d.report.violations))?;
    ensure(d.dimension == 12 && d.expected == 12, format!("dim {} expected {}", d.dimension, d.expected))?;
    let three = SpaceModel::new(
        vec!["p".into(), "q".into(), "r".into(), "s".into()],
        Poset::new(&["u", "v", "m"], &[("u", "m"), ("v", "m")]).unwrap(),
        vec![vec![0, 1], vec![2, 3], vec![0, 1, 2, 3]],
        None,
        None,
    )
    .map_err(err)?;
    let m3 = FinDimCStar::new(vec![1, 2]).unwrap();
    let d2 = directed_tensor_check(&Net::constant(three.poset.clone(), &m3), &three, TOL).map_err(err)?;
    ensure(d2.report.is_valid() && d2.dimension == 4 * 5, format!("second example: dim {}", d2.dimension))?;
    Ok(format!("dims {} = 3×4 and {} = 4×5 with the tensor basis", d.dimension, d2.dimension))
}

fn subtrivial() -> Outcome {
    let m = catalog::interval_model(9);
    let r = subtrivial_check(&m, &m2(), &[3, 4, 5], TOL).map_err(err)?;
    ensure(r.report.is_valid(), format!("{:?}", r.report.violations))?;
    ensure(r.fibers.iter().all(|f| *f == m2().to_string()), format!("point fibers {:?}", r.fibers))?;
    ensure(r.dimension == 36, format!("dim {}", r.dimension))?;
    Ok(format!("all 9 fibers M2, dim {}", r.dimension))
}

fn fredholm_relations() -> Outcome {
    let s = split_circle_example(0.7, -1.3).map_err(err)?;
    let v = validate_module(&s.module, TOL);
    ensure(v.is_valid(), format!("{:?}", v.violations))?;
    let fam = assemble_family(&s.module, &s.model, TOL).map_err(err)?;
    ensure(fam.kasparov.is_valid(), format!("{:?}", fam.kasparov.violations))?;
    ensure(fam.per_point.iter().all(|p| p.index == fam.index), "index varies over the points")?;
    for b in [&fam.kernel_bundle, &fam.cokernel_bundle] {
        let r = b.validate(TOL);
        ensure(r.is_valid(), format!("kernel transport: {:?}", r.violations))?;
    }
    let hol = &fam.kernel_holonomy[0];
    let want: [C64; 2] = [phase(0.7), phase(0.7 - 1.3)];
    ensure(linalg::multisets_match(&linalg::eigenvalues(hol), &want, TOL), "kernel holonomy spectrum")?;
    let residual = v.max_residual().max(fam.kasparov.max_residual());
    Ok(format!("index {} at all 6 points; kernel transports unitary; max residual {residual:.1e}", fam.index))
}

fn toeplitz_indices() -> Outcome {
    let quartic = Symbol::from_roots(0, &[linalg::ZERO, linalg::ZERO, c(2.0, 0.0), c(0.5, 0.0)]);
    let cases = [
        ("1", Symbol::scalar(&[(0, linalg::ONE)]), 0),
        ("z", Symbol::scalar(&[(1, linalg::ONE)]), -1),
        ("z^-2", Symbol::scalar(&[(-2, linalg::ONE)]), 2),
        ("z^2(z-2)(z-1/2)", quartic, -2),
    ];
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for (name, s, want) in cases {
        let t = Instant::now();
        let op = ToeplitzOp::new(s.clone(), 64);
        let r = toeplitz_index(&op).map_err(err)?;
        let f = frame_index(&s, None, 64, 1e-8);
        let dt = t.elapsed();
        ensure(r.index == f.index, format!("{name}: winding {} vs frame {}", r.index, f.index))?;
        ensure(dt < Duration::from_secs(1), format!("{name} took {dt:?}"))?;
        lines.push(format!("{name} -> {}", r.index));
        if r.index != want {
            failures.push(format!("{name}: computed {} (frames agree), stated {want}", r.index));
        }
    }
    if failures.is_empty() {
        Ok(lines.join(", "))
    } else {
        Err(format!("{}; {}", failures.join("; "), lines.join(", ")))
    }
}

fn sector_indices() -> Outcome {
    let p = catalog::c6_poset();
    let pres = pi1_presentation(&p, "a1").map_err(err)?;
    let mut out = Vec::new();
    for (group, irrep, dim) in [("z2", "sign", 1), ("s3", "standard", 2)] {
        let mut reference: Option<Vec<[f64; 2]>> = None;
        for chi in [1.0, -1.0] {
            let sigma = FiniteGroupRep::by_name(group, irrep).map_err(err)?;
            let chi = evaluate_character(&pres, &[c(chi, 0.0)], 1e-12).map_err(err)?;
            let sm = twisted_sector_module(&Sector { sigma, chi }, &p, 16).map_err(err)?;
            let r = sector_index(&sm, TOL).map_err(err)?;
            ensure(r.report.is_valid(), format!("{group}/{irrep}: {:?}", r.report.violations))?;
            ensure(r.statistical_dimension == dim, format!("{group}/{irrep}: statistical dimension {}", r.statistical_dimension))?;
            match &reference {
                None => reference = Some(r.g_index.clone()),
                Some(g) => {
                    let d = g.iter().zip(&r.g_index).map(|(a, b)| (a[0] - b[0]).hypot(a[1] - b[1])).fold(0.0, f64::max);
                    ensure(d < TOL, format!("{group}/{irrep}: g-index changes with chi by {d:.2e}"))?;
                }
            }
            if group == "s3" {
                let vals: Vec<f64> = r.class_index.iter().map(|z| z[0]).collect();
                let want = [2.0, 0.0, -1.0];
                ensure(
                    vals.iter().zip(want).all(|(a, b)| (a - b).abs() < TOL) && r.class_index.iter().all(|z| z[1].abs() < TOL),
                    format!("class values {vals:?}"),
                )?;
            }
        }
        out.push(format!("{group}/{irrep} dim {dim}"));
    }
    Ok(format!("{}; S3 classes (2, 0, -1); omega and chi in {{1,-1}} invariant", out.join(", ")))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "pi1 correctness", pi1_correctness),
        (2, "net validation", net_validation),
        (3, "holonomy and equivalence", holonomy_equivalence),
        (4, "cocycle laws", cocycle_laws),
        (5, "field-algebra construction", field_algebra_construction),
        (6, "universal property", universal_property),
        (7, "fiber isomorphism", fiber_isomorphism),
        (8, "functoriality", functoriality),
        (9, "degeneracy dichotomy", degeneracy),
        (10, "directed case", directed_case),
        (11, "subtrivial gap filling", subtrivial),
        (12, "Fredholm/Kasparov relations", fredholm_relations),
        (13, "Toeplitz index", toeplitz_indices),
        (14, "sector indices", sector_indices),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (n, name, f) in &criteria {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let dt = t.elapsed();
        match result {
            Ok(detail) => {
                passed += 1;
                println!("criterion {n:>2} PASS  {name}: {detail} [{dt:.2?}]");
            }
            Err(detail) => {
                let known = KNOWN_DEVIATIONS.iter().find(|(k, _)| k == n);
                let tag = if known.is_some() { " (known deviation)" } else { "" };
                println!("criterion {n:>2} FAIL{tag}  {name}: {detail} [{dt:.2?}]");
                if let Some((_, why)) = known {
                    println!("              {why}");
                } else {
                    unexpected.push(*n);
                }
            }
        }
    }
    println!("{passed}/{} criteria passed", criteria.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
