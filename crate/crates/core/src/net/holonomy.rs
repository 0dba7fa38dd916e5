use super::Net;
use crate::error::{Error, Result};
use crate::matrix_cstar::{automorphisms_conjugate, StarMorphism};
use crate::poset_topology::{pi1_presentation, EdgeLoop, GroupPresentation, Word};

/// Transport around a loop: an automorphism of the fiber at the base.
pub fn loop_transport(net: &Net, l: &EdgeLoop) -> Result<StarMorphism> {
    let verts = l.vertices(&net.poset)?;
    net.transport(&verts)
}

/// Holonomy of a word, with `hol(w₁w₂) = hol(w₂) ∘ hol(w₁)`.
pub fn word_holonomy(generators: &[StarMorphism], base: &StarMorphism, w: &Word) -> Result<StarMorphism> {
    let mut acc = base.clone();
    for &x in w {
        let g = &generators[x.unsigned_abs() as usize - 1];
        let step = if x > 0 { g.clone() } else { g.inverse()? };
        acc = step.compose(&acc)?;
    }
    Ok(acc)
}

/// Holonomy automorphism of each generator of `pres`; every relator must
/// transport to the identity within `tol`.
pub fn holonomy(net: &Net, pres: &GroupPresentation, tol: f64) -> Result<Vec<StarMorphism>> {
    if !net.is_net_bundle() {
        return Err(Error::NotABundle("some inclusion is not invertible".into()));
    }
    let base = net.index_of(&pres.base)?;
    let hols = (1..=pres.generators.len())
        .map(|g| loop_transport(net, &pres.generator_loop(&net.poset, g)))
        .collect::<Result<Vec<_>>>()?;
    let id = StarMorphism::identity(net.fiber(base));
    for (k, r) in pres.relators.iter().enumerate() {
        let residual = word_holonomy(&hols, &id, r)?.distance(&id);
        if residual > tol {
            return Err(Error::RelatorNotFlat { relator: k, residual });
        }
    }
    Ok(hols)
}

/// Decides whether two net bundles over the same poset are isomorphic, i.e.
/// whether their holonomy actions are conjugate. Only cyclic fundamental
/// groups are decided.
pub fn equivalent_bundles(n1: &Net, n2: &Net, base: &str, tol: f64) -> Result<bool> {
    if n1.poset != n2.poset {
        return Err(Error::InvalidInput("bundles live over different posets".into()));
    }
    let b = n1.index_of(base)?;
    if n1.fiber(b) != n2.fiber(b) {
        return Ok(false);
    }
    let pres = pi1_presentation(&n1.poset, base)?;
    let h1 = holonomy(n1, &pres, tol)?;
    let h2 = holonomy(n2, &pres, tol)?;
    match pres.simplified.generators.as_slice() {
        [] => Ok(true),
        &[g] => {
            let i = g as usize - 1;
            automorphisms_conjugate(&h1[i], &h2[i], tol.max(1e-8))
        }
        gens => Err(Error::UnsupportedGroup(format!(
            "fundamental group needs {} generators after simplification",
            gens.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::{c, eye, from_rows, random_unitary, real_diag, CMat, ONE, ZERO};
    use crate::matrix_cstar::FinDimCStar;
    use crate::poset_topology::Poset;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn twisted(u: &CMat) -> Net {
        catalog::twisted_circle_net(&FinDimCStar::matrix(u.nrows()), &StarMorphism::ad_matrix(u).unwrap())
    }

    #[test]
    fn constant_circle_has_trivial_holonomy() {
        let net = Net::constant(catalog::c6_poset(), &FinDimCStar::matrix(2));
        let pres = pi1_presentation(&net.poset, "a1").unwrap();
        let h = holonomy(&net, &pres, 1e-10).unwrap();
        assert_eq!(h.len(), 1);
        assert!(h[0].distance(&StarMorphism::identity(&FinDimCStar::matrix(2))) < 1e-12);
    }

    #[test]
    fn single_twist_gives_holonomy_ad_u() {
        let u = real_diag(&[1.0, -1.0]);
        let net = twisted(&u);
        let pres = pi1_presentation(&net.poset, "a1").unwrap();
        let h = holonomy(&net, &pres, 1e-10).unwrap();
        assert!(h[0].distance(&StarMorphism::ad_matrix(&u).unwrap()) < 1e-12);
    }

    #[test]
    fn tree_has_no_generators() {
        let p = Poset::new(&["a", "b1", "b2"], &[("a", "b1"), ("a", "b2")]).unwrap();
        let net = Net::constant(p, &FinDimCStar::matrix(2));
        let pres = pi1_presentation(&net.poset, "a").unwrap();
        assert!(holonomy(&net, &pres, 1e-10).unwrap().is_empty());
    }

    #[test]
    fn non_bundle_rejected() {
        let p = Poset::new(&["a", "b"], &[("a", "b")]).unwrap();
        let m1 = FinDimCStar::matrix(1);
        let m2 = FinDimCStar::matrix(2);
        let emb = StarMorphism::embedding(m1.clone(), m2.clone(), vec![vec![2]]).unwrap();
        let net = Net::new(p, vec![m1, m2], vec![((0, 1), emb)]).unwrap();
        let pres = pi1_presentation(&net.poset, "a").unwrap();
        assert!(matches!(holonomy(&net, &pres, 1e-10), Err(Error::NotABundle(_))));
    }

    #[test]
    fn inconsistent_square_is_not_flat() {
        let m2 = FinDimCStar::matrix(2);
        // the two routes a<b<c and a<d<c disagree
        let p2 = Poset::new(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("a", "d"), ("d", "c")]).unwrap();
        let bad = Net::constant(p2, &m2)
            .with_inclusions(&[((0, 3), StarMorphism::ad_matrix(&real_diag(&[1.0, -1.0])).unwrap())])
            .unwrap();
        let pres = pi1_presentation(&bad.poset, "a").unwrap();
        assert!(matches!(holonomy(&bad, &pres, 1e-10), Err(Error::RelatorNotFlat { .. })));
    }

    #[test]
    fn equivalence_examples() {
        let m2 = FinDimCStar::matrix(2);
        let constant = Net::constant(catalog::c6_poset(), &m2);
        assert!(equivalent_bundles(&constant, &constant.clone(), "a1", 1e-10).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = random_unitary(&mut rng, 2);
        let u = real_diag(&[1.0, -1.0]);
        let a = twisted(&u);
        let b = twisted(&(&w * &u * w.adjoint()));
        assert!(equivalent_bundles(&a, &b, "a1", 1e-10).unwrap());
        let flip = from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]);
        assert!(!equivalent_bundles(&twisted(&eye(2)), &twisted(&flip), "a1", 1e-10).unwrap());
        assert!(!equivalent_bundles(&twisted(&eye(2)), &a, "a1", 1e-10).unwrap());
        // ad(i·u) = ad(u)
        assert!(equivalent_bundles(&a, &twisted(&(&u * c(0.0, 1.0))), "a1", 1e-10).unwrap());
    }

    proptest! {
        #[test]
        fn holonomy_is_multiplicative_and_base_change_conjugates(seed in 0u64..100) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = catalog::c6_poset();
            let m2 = FinDimCStar::matrix(2);
            let edges: Vec<_> = p.hasse_pairs().into_iter()
                .map(|e| (e, StarMorphism::ad_matrix(&random_unitary(&mut rng, 2)).unwrap()))
                .collect();
            let net = Net::constant(p.clone(), &m2).with_inclusions(&edges).unwrap();
            let pres = pi1_presentation(&p, "a1").unwrap();
            let l = pres.generator_loop(&p, 1);
            let t = loop_transport(&net, &l).unwrap();
            let t2 = loop_transport(&net, &l.concat(&l).unwrap()).unwrap();
            prop_assert!(t2.distance(&t.compose(&t).unwrap()) < 1e-10);
            let back = loop_transport(&net, &l.reverse()).unwrap();
            prop_assert!(back.compose(&t).unwrap().distance(&StarMorphism::identity(&m2)) < 1e-10);
            // another base and spanning tree: conjugate holonomy
            let other = pi1_presentation(&p, "b2").unwrap();
            let h_other = holonomy(&net, &other, 1e-10).unwrap();
            prop_assert!(automorphisms_conjugate(&t, &h_other[0], 1e-8).unwrap()
                || automorphisms_conjugate(&t, &h_other[0].inverse().unwrap(), 1e-8).unwrap());
        }

        #[test]
        fn transports_on_simply_connected_posets_are_path_independent(seed in 0u64..100) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Poset::new(&["a", "b1", "b2", "c"], &[("a", "b1"), ("a", "b2"), ("b1", "c"), ("b2", "c")]).unwrap();
            let m2 = FinDimCStar::matrix(2);
            // a gauge-trivial bundle: inclusions ad(w_b w_a*)
            let w: Vec<CMat> = (0..4).map(|_| random_unitary(&mut rng, 2)).collect();
            let edges: Vec<_> = p.hasse_pairs().into_iter()
                .map(|(a, b)| ((a, b), StarMorphism::ad_matrix(&(&w[b] * w[a].adjoint())).unwrap()))
                .collect();
            let net = Net::constant(p, &m2).with_inclusions(&edges).unwrap();
            let via1 = net.transport(&[0, 1, 3]).unwrap();
            let via2 = net.transport(&[0, 2, 3]).unwrap();
            prop_assert!(via1.distance(&via2) < 1e-10);
        }
    }
}
