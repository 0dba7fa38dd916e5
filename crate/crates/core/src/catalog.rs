//! Small named posets, space models and nets used in examples and tests.

use crate::matrix_cstar::{FinDimCStar, StarMorphism};
use crate::net::Net;
use crate::poset_topology::Poset;
use crate::space_model::SpaceModel;

/// Circle poset: three small arcs `a_i`, each below two of the three big arcs
/// `b_j` cyclically.
pub fn c6_poset() -> Poset {
    Poset::new(
        &["a1", "a2", "a3", "b1", "b2", "b3"],
        &[("a1", "b1"), ("a1", "b2"), ("a2", "b2"), ("a2", "b3"), ("a3", "b3"), ("a3", "b1")],
    )
    .expect("circle poset is valid")
}

/// Face poset of the boundary of a tetrahedron (vertices, edges, triangles).
pub fn tetrahedron_boundary_poset() -> Poset {
    simplicial_face_poset(4, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]])
}

/// Face poset of the six-vertex triangulation of the real projective plane.
pub fn projective_plane_poset() -> Poset {
    simplicial_face_poset(
        6,
        &[
            &[0, 1, 2],
            &[0, 2, 3],
            &[0, 3, 4],
            &[0, 4, 5],
            &[0, 1, 5],
            &[1, 2, 4],
            &[2, 3, 5],
            &[1, 3, 4],
            &[2, 4, 5],
            &[1, 3, 5],
        ],
    )
}

/// Face poset of a pure 2-dimensional simplicial complex given by its triangles.
pub fn simplicial_face_poset(vertices: usize, triangles: &[&[usize]]) -> Poset {
    let mut faces: Vec<Vec<usize>> = (0..vertices).map(|v| vec![v]).collect();
    let mut edges = Vec::new();
    for t in triangles {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let mut e = vec![t[i], t[j]];
            e.sort_unstable();
            if !edges.contains(&e) {
                edges.push(e);
            }
        }
    }
    edges.sort();
    faces.extend(edges);
    let mut tris: Vec<Vec<usize>> = triangles
        .iter()
        .map(|t| {
            let mut t = t.to_vec();
            t.sort_unstable();
            t
        })
        .collect();
    tris.sort();
    faces.extend(tris);
    let name = |f: &Vec<usize>| {
        let prefix = ["v", "e", "f"][f.len() - 1];
        format!("{prefix}{}", f.iter().map(|x| x.to_string()).collect::<String>())
    };
    let names: Vec<String> = faces.iter().map(name).collect();
    let mut leq = Vec::new();
    for (i, f) in faces.iter().enumerate() {
        for (j, g) in faces.iter().enumerate() {
            if i != j && f.iter().all(|x| g.contains(x)) {
                leq.push((names[i].as_str(), names[j].as_str()));
            }
        }
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Poset::new(&refs, &leq).expect("face posets are valid")
}

/// Extents of the layered circle cover on `x1..x6`: singletons `s_i`, arcs
/// of two points `p_i` and of three points `t_i`, ordered by inclusion.
pub fn layered_circle_extents() -> Vec<(String, Vec<usize>)> {
    let mut out = Vec::new();
    for (prefix, len) in [("s", 1), ("p", 2), ("t", 3)] {
        for i in 0..6 {
            out.push((format!("{prefix}{}", i + 1), (0..len).map(|k| (i + k) % 6).collect()));
        }
    }
    out
}

pub fn layered_circle_poset() -> Poset {
    inclusion_poset(&layered_circle_extents())
}

/// Poset of named point sets ordered by inclusion.
pub fn inclusion_poset(extents: &[(String, Vec<usize>)]) -> Poset {
    let mut leq = Vec::new();
    for (a, ea) in extents {
        for (b, eb) in extents {
            if a != b && ea.iter().all(|x| eb.contains(x)) {
                leq.push((a.as_str(), b.as_str()));
            }
        }
    }
    let names: Vec<&str> = extents.iter().map(|(n, _)| n.as_str()).collect();
    Poset::new(&names, &leq).expect("inclusion orders are valid")
}

/// Constant net over the circle poset with the inclusion `a2 < b3` replaced
/// by `twist`; its holonomy at `a1` is `twist`.
pub fn twisted_circle_net(alg: &FinDimCStar, twist: &StarMorphism) -> Net {
    let p = c6_poset();
    let edge = (p.index_of("a2").unwrap(), p.index_of("b3").unwrap());
    Net::constant(p, alg).with_inclusions(&[(edge, twist.clone())]).expect("twist is an automorphism of the fiber")
}

fn point_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Six points `x1..x6` on a circle covered by the circle poset:
/// `κ(b1) = {x1,x2,x3}`, `κ(b2) = {x3,x4,x5}`, `κ(b3) = {x5,x6,x1}` and
/// `κ(a1) = {x3}`, `κ(a2) = {x5}`, `κ(a3) = {x1}`.
pub fn circle_model() -> SpaceModel {
    let p = c6_poset();
    let extent = vec![vec![2], vec![4], vec![0], vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 0]];
    SpaceModel::new(point_names(6), p, extent, None, None).expect("circle model is well formed")
}

/// The layered circle cover with closures one step wider: `cl(s_i) = κ(p_i)`
/// and `cl(p_i) = κ(t_i)`, witnessed by `p_i` and `t_i`.
pub fn layered_circle_model() -> SpaceModel {
    let ext = layered_circle_extents();
    let p = inclusion_poset(&ext);
    let extent: Vec<Vec<usize>> = ext.iter().map(|(_, e)| e.clone()).collect();
    let mut closure = extent.clone();
    let mut plateau = vec![None; ext.len()];
    for i in 0..6 {
        closure[i] = extent[6 + i].clone();
        plateau[i] = Some(6 + i);
        closure[6 + i] = extent[12 + i].clone();
        plateau[6 + i] = Some(12 + i);
    }
    SpaceModel::new(point_names(6), p, extent, Some(closure), Some(plateau))
        .expect("layered circle model is well formed")
}

/// Chain `a ≤ m` over three points with `κ(a) = {x1,x2}` and `κ(m)` everything.
pub fn chain_interval_model() -> SpaceModel {
    let p = Poset::new(&["a", "m"], &[("a", "m")]).unwrap();
    SpaceModel::new(point_names(3), p, vec![vec![0, 1], vec![0, 1, 2]], None, None).unwrap()
}

/// All discrete intervals `i-j` (`1 ≤ i ≤ j ≤ n`) of `n` points, ordered by
/// inclusion; the closure of an interval adds its neighbouring points.
pub fn interval_model(n: usize) -> SpaceModel {
    let mut ext = Vec::new();
    for i in 0..n {
        for j in i..n {
            ext.push((format!("{}-{}", i + 1, j + 1), (i..=j).collect::<Vec<usize>>()));
        }
    }
    let p = inclusion_poset(&ext);
    let extent: Vec<Vec<usize>> = ext.iter().map(|(_, e)| e.clone()).collect();
    let closure: Vec<Vec<usize>> = extent
        .iter()
        .map(|e| {
            let lo = e[0].saturating_sub(1);
            let hi = (e[e.len() - 1] + 1).min(n - 1);
            (lo..=hi).collect()
        })
        .collect();
    let plateau = closure.iter().map(|c| ext.iter().position(|(_, e)| e == c)).collect();
    SpaceModel::new(point_names(n), p, extent, Some(closure), Some(plateau)).expect("interval model is well formed")
}
