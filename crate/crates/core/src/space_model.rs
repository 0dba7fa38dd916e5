//! Finite point models of a space with a base of charts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};
use crate::poset_topology::Poset;
use crate::report::ValidationReport;

/// JSON form; point and element names refer to the accompanying poset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceModelSpec {
    pub points: Vec<String>,
    pub extent: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub closure: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub plateau: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceModel {
    pub points: Vec<String>,
    pub poset: Poset,
    /// `κ(Y)` as sorted point indices.
    pub extent: Vec<Vec<usize>>,
    /// `cl(Y)`, defaulting to `κ(Y)`.
    pub closure: Vec<Vec<usize>>,
    /// Declared plateau witnesses.
    pub plateau: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Omega {
    pub members: Vec<usize>,
    pub minimum: usize,
}

fn normalized(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

impl SpaceModel {
    pub fn new(
        points: Vec<String>,
        poset: Poset,
        extent: Vec<Vec<usize>>,
        closure: Option<Vec<Vec<usize>>>,
        plateau: Option<Vec<Option<usize>>>,
    ) -> Result<Self> {
        let n = poset.len();
        let extent: Vec<Vec<usize>> = extent.into_iter().map(normalized).collect();
        let closure: Vec<Vec<usize>> = match closure {
            Some(c) => c.into_iter().map(normalized).collect(),
            None => extent.clone(),
        };
        let plateau = plateau.unwrap_or_else(|| vec![None; n]);
        if extent.len() != n || closure.len() != n || plateau.len() != n {
            return Err(Error::ShapeMismatch(format!("space model data must have one entry per element ({n})")));
        }
        let np = points.len();
        if extent.iter().chain(&closure).flatten().any(|&x| x >= np) {
            return Err(Error::InvalidInput("point index out of range".into()));
        }
        if plateau.iter().flatten().any(|&u| u >= n) {
            return Err(Error::InvalidInput("plateau witness out of range".into()));
        }
        Ok(SpaceModel { points, poset, extent, closure, plateau })
    }

    pub fn from_spec(poset: Poset, spec: &SpaceModelSpec) -> Result<Self> {
        let point = |name: &String| {
            spec.points.iter().position(|p| p == name).ok_or_else(|| Error::UnknownElement(name.clone()))
        };
        let sets = |map: &BTreeMap<String, Vec<String>>| -> Result<Vec<Option<Vec<usize>>>> {
            let mut out = vec![None; poset.len()];
            for (e, pts) in map {
                out[poset.index_of(e)?] = Some(pts.iter().map(point).collect::<Result<Vec<_>>>()?);
            }
            Ok(out)
        };
        let extent = sets(&spec.extent)?
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or_else(|| Error::InvalidInput(format!("no extent for {}", poset.name(i)))))
            .collect::<Result<Vec<_>>>()?;
        let closure = sets(&spec.closure)?.into_iter().zip(&extent).map(|(c, e)| c.unwrap_or_else(|| e.clone())).collect();
        let mut plateau = vec![None; poset.len()];
        for (y, u) in &spec.plateau {
            plateau[poset.index_of(y)?] = Some(poset.index_of(u)?);
        }
        Self::new(spec.points.clone(), poset, extent, Some(closure), Some(plateau))
    }

    pub fn to_spec(&self) -> SpaceModelSpec {
        let names = |v: &Vec<usize>| v.iter().map(|&x| self.points[x].clone()).collect::<Vec<_>>();
        let el = |i: usize| self.poset.name(i).to_string();
        SpaceModelSpec {
            points: self.points.clone(),
            extent: (0..self.poset.len()).map(|i| (el(i), names(&self.extent[i]))).collect(),
            closure: (0..self.poset.len())
                .filter(|&i| self.closure[i] != self.extent[i])
                .map(|i| (el(i), names(&self.closure[i])))
                .collect(),
            plateau: (0..self.poset.len()).filter_map(|i| self.plateau[i].map(|u| (el(i), el(u)))).collect(),
        }
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn point_index(&self, name: &str) -> Result<usize> {
        self.points.iter().position(|p| p == name).ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn contains(&self, y: usize, x: usize) -> bool {
        self.extent[y].binary_search(&x).is_ok()
    }

    /// Whether `u` can serve as a plateau witness for `y`: `y ≤ u` and `cl(y) ⊆ κ(u)`.
    pub fn is_plateau_witness(&self, y: usize, u: usize) -> bool {
        self.poset.leq(y, u) && is_subset(&self.closure[y], &self.extent[u])
    }

    /// The declared witness, or `y` itself when `cl(y) = κ(y)`.
    pub fn witness(&self, y: usize) -> Option<usize> {
        self.plateau[y].or_else(|| (self.closure[y] == self.extent[y]).then_some(y))
    }

    /// Every element that is a valid plateau witness for `y`.
    pub fn witnesses(&self, y: usize) -> Vec<usize> {
        (0..self.poset.len()).filter(|&u| self.is_plateau_witness(y, u)).collect()
    }

    /// `ω_x = {Y : x ∈ κ(Y)}` with its minimum.
    pub fn omega(&self, x: usize) -> Result<Omega> {
        let members: Vec<usize> = (0..self.poset.len()).filter(|&y| self.contains(y, x)).collect();
        let minimum = members.iter().copied().find(|&m| members.iter().all(|&y| self.poset.leq(m, y)));
        match minimum {
            Some(minimum) if !members.is_empty() => Ok(Omega { members, minimum }),
            _ => Err(Error::NotDownwardDirected(format!("omega of {}", self.points[x]))),
        }
    }

    /// The sub-model on the charts `subset`, keeping all points.
    pub fn restrict(&self, subset: &[usize]) -> Result<SpaceModel> {
        let (poset, keep) = self.poset.restrict(subset)?;
        let pos = |u: usize| keep.iter().position(|&k| k == u);
        SpaceModel::new(
            self.points.clone(),
            poset,
            keep.iter().map(|&k| self.extent[k].clone()).collect(),
            Some(keep.iter().map(|&k| self.closure[k].clone()).collect()),
            Some(keep.iter().map(|&k| self.plateau[k].and_then(pos)).collect()),
        )
    }
}

/// Reports monotonicity, covering, directedness of every `ω_x`, closures and
/// plateau witnesses.
pub fn validate_model(m: &SpaceModel) -> ValidationReport {
    let mut r = ValidationReport::new();
    for c in ["nonempty_extent", "closure", "monotone", "covering", "omega_directed", "plateau"] {
        r.declare(c, 0.0);
    }
    let p = &m.poset;
    for y in 0..p.len() {
        if m.extent[y].is_empty() {
            r.fail("nonempty_extent", vec![p.name(y).into()], "empty extent");
        }
        if !is_subset(&m.extent[y], &m.closure[y]) {
            r.fail("closure", vec![p.name(y).into()], "closure does not contain the extent");
        }
        match m.witness(y) {
            Some(u) if m.is_plateau_witness(y, u) => {}
            Some(u) => r.fail(
                "plateau",
                vec![p.name(y).into(), p.name(u).into()],
                "witness is not above the element or does not contain its closure",
            ),
            None => r.fail("plateau", vec![p.name(y).into()], "no plateau witness declared"),
        }
    }
    for (a, b) in p.strict_pairs() {
        if !is_subset(&m.extent[a], &m.extent[b]) {
            r.fail("monotone", vec![p.name(a).into(), p.name(b).into()], "extent not contained in the larger chart");
        }
    }
    for x in 0..m.num_points() {
        let members: Vec<usize> = (0..p.len()).filter(|&y| m.contains(y, x)).collect();
        if members.is_empty() {
            r.fail("covering", vec![m.points[x].clone()], "point lies in no chart");
        } else if m.omega(x).is_err() {
            r.fail("omega_directed", vec![m.points[x].clone()], "charts containing the point have no minimum");
        }
    }
    r
}

/// A complex function on the model points, optionally declared to vanish
/// outside one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFunction {
    pub values: Vec<C64>,
    pub support: Option<usize>,
}

impl PointFunction {
    pub fn new(m: &SpaceModel, values: Vec<C64>, support: Option<usize>) -> Result<Self> {
        if values.len() != m.num_points() {
            return Err(Error::ShapeMismatch(format!("{} values for {} points", values.len(), m.num_points())));
        }
        if let Some(y) = support {
            if (0..values.len()).any(|x| values[x] != ZERO && !m.contains(y, x)) {
                return Err(Error::SupportViolation(m.poset.name(y).to_string()));
            }
        }
        Ok(PointFunction { values, support })
    }

    pub fn one(m: &SpaceModel) -> Self {
        PointFunction { values: vec![ONE; m.num_points()], support: None }
    }

    pub fn indicator(m: &SpaceModel, points: &[usize]) -> Self {
        let mut values = vec![ZERO; m.num_points()];
        for &x in points {
            values[x] = ONE;
        }
        PointFunction { values, support: None }
    }

    /// Indicator of `κ(y)`, supported in `y`.
    pub fn chart_indicator(m: &SpaceModel, y: usize) -> Self {
        PointFunction { support: Some(y), ..Self::indicator(m, &m.extent[y]) }
    }

    pub fn delta(m: &SpaceModel, x: usize) -> Self {
        Self::indicator(m, &[x])
    }

    pub fn is_supported_in(&self, m: &SpaceModel, y: usize) -> bool {
        (0..self.values.len()).all(|x| self.values[x] == ZERO || m.contains(y, x))
    }
}
