//! Declarative scenario files and their conversion into library objects.

use std::collections::BTreeMap;

use serde::Deserialize;

use cstar_nets::fredholm::{FredholmNetModule, Mode, Symbol, ToeplitzOp};
use cstar_nets::linalg::{c, CMat, C64};
use cstar_nets::matrix_cstar::{FinDimCStar, StarMorphism};
use cstar_nets::net::{HilbertNetBundle, Net, Representation};
use cstar_nets::poset_topology::{Poset, PosetSpec};
use cstar_nets::sectors::FiniteGroupRep;
use cstar_nets::space_model::{SpaceModel, SpaceModelSpec};

use crate::error::CliError;

/// Rows of `[re, im]` entries.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub poset: PosetSpec,
    #[serde(default)]
    pub model: Option<SpaceModelSpec>,
    #[serde(default)]
    pub net: Option<NetSpec>,
    #[serde(default)]
    pub other_net: Option<NetSpec>,
    #[serde(default)]
    pub bundle: Option<BundleSpec>,
    #[serde(default)]
    pub other_bundle: Option<BundleSpec>,
    #[serde(default)]
    pub module: Option<ModuleSpec>,
    #[serde(default)]
    pub toeplitz: Option<ToeplitzSpec>,
    #[serde(default)]
    pub sector: Option<SectorSpec>,
    #[serde(default)]
    pub cover: Option<Vec<String>>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetSpec {
    /// Block sizes used for every element without an entry in `fibers`.
    #[serde(default)]
    pub algebra: Option<Vec<usize>>,
    #[serde(default)]
    pub fibers: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub inclusions: Vec<InclusionSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InclusionSpec {
    pub lower: String,
    pub upper: String,
    #[serde(default)]
    pub multiplicity: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub conjugators: Option<Vec<MatrixSpec>>,
    /// Shortcut for `ad U` between equal matrix fibers.
    #[serde(default)]
    pub unitary: Option<MatrixSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub dims: BTreeMap<String, usize>,
    #[serde(default)]
    pub unitaries: Vec<UnitarySpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitarySpec {
    pub lower: String,
    pub upper: String,
    pub matrix: MatrixSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepSpec {
    pub multiplicity: Vec<Vec<usize>>,
    #[serde(default)]
    pub conjugators: Option<Vec<MatrixSpec>>,
}

/// A constant matrix, a Laurent symbol keyed by power, or one of these per element.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OpSpec {
    Matrix(MatrixSpec),
    Symbol { symbol: BTreeMap<String, MatrixSpec> },
    PerElement { per_element: BTreeMap<String, OpSpec> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeSpec {
    Finite,
    Toeplitz,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub mode: ModeSpec,
    pub bundle: BundleSpec,
    #[serde(default)]
    pub representation: BTreeMap<String, RepSpec>,
    #[serde(default)]
    pub grading: Option<OpSpec>,
    pub f: OpSpec,
    #[serde(default)]
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToeplitzSpec {
    /// Scalar coefficients keyed by power.
    pub symbol: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    pub correction: Option<MatrixSpec>,
    #[serde(default)]
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorSpec {
    pub group: String,
    pub irrep: String,
    #[serde(default)]
    pub chi: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub truncation: Option<usize>,
    #[serde(default)]
    pub table: Option<GroupTableSpec>,
}

/// A finite group by multiplication table with one matrix per element.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupTableSpec {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
    pub matrices: Vec<MatrixSpec>,
}

pub fn parse(text: &str, path: &str) -> Result<Scenario, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn complex(z: &[f64; 2]) -> C64 {
    c(z[0], z[1])
}

pub fn matrix(m: &MatrixSpec, what: &str) -> Result<CMat, CliError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(CliError::Input(format!("{what}: rows of different length")));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| complex(&m[i][j])))
}

fn algebra(blocks: &[usize], what: &str) -> Result<FinDimCStar, CliError> {
    FinDimCStar::new(blocks.to_vec()).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

fn names_exist(poset: &Poset, names: impl IntoIterator<Item = String>, what: &str) -> Result<(), CliError> {
    for n in names {
        poset.index_of(&n).map_err(|_| CliError::Input(format!("{what}: unknown element `{n}`")))?;
    }
    Ok(())
}

impl Scenario {
    pub fn build_poset(&self) -> Result<Poset, CliError> {
        Ok(Poset::from_spec(&self.poset)?)
    }

    pub fn build_model(&self, poset: &Poset) -> Result<SpaceModel, CliError> {
        let spec = self.model.as_ref().ok_or_else(|| CliError::Input("scenario has no `model`".into()))?;
        Ok(SpaceModel::from_spec(poset.clone(), spec)?)
    }

    pub fn tolerance(&self, flag: Option<f64>) -> Result<f64, CliError> {
        let tol = flag.or(self.tolerance).unwrap_or(1e-10);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Input(format!("tolerance must be positive, got {tol}")));
        }
        Ok(tol)
    }
}

pub fn build_net(spec: &NetSpec, poset: &Poset) -> Result<Net, CliError> {
    names_exist(poset, spec.fibers.keys().cloned(), "net fibers")?;
    let fibers = (0..poset.len())
        .map(|o| {
            let name = poset.name(o);
            match spec.fibers.get(name).or(spec.algebra.as_ref()) {
                Some(b) => algebra(b, &format!("fiber {name}")),
                None => Err(CliError::Input(format!("no fiber for `{name}` and no default `algebra`"))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut given: BTreeMap<(usize, usize), StarMorphism> = BTreeMap::new();
    for inc in &spec.inclusions {
        let what = format!("inclusion {}<{}", inc.lower, inc.upper);
        let a = poset.index_of(&inc.lower).map_err(|_| CliError::Input(format!("{what}: unknown element")))?;
        let b = poset.index_of(&inc.upper).map_err(|_| CliError::Input(format!("{what}: unknown element")))?;
        let m = if let Some(u) = &inc.unitary {
            let u = matrix(u, &what)?;
            if fibers[a] != fibers[b] || fibers[a] != FinDimCStar::matrix(u.nrows()) {
                return Err(CliError::Input(format!("{what}: `unitary` needs equal fibers M_{}", u.nrows())));
            }
            StarMorphism::ad_matrix(&u)?
        } else if let Some(mult) = &inc.multiplicity {
            let conj = match &inc.conjugators {
                Some(cs) => cs.iter().map(|m| matrix(m, &what)).collect::<Result<Vec<_>, _>>()?,
                None => fibers[b].blocks.iter().map(|&n| cstar_nets::linalg::eye(n)).collect(),
            };
            StarMorphism::new(fibers[a].clone(), fibers[b].clone(), mult.clone(), conj)?
        } else {
            return Err(CliError::Input(format!("{what}: give `unitary` or `multiplicity`")));
        };
        given.insert((a, b), m);
    }
    let mut incl = Vec::new();
    for (a, b) in poset.hasse_pairs() {
        let m = match given.remove(&(a, b)) {
            Some(m) => m,
            None if fibers[a] == fibers[b] => StarMorphism::identity(&fibers[a]),
            None => {
                return Err(CliError::Input(format!(
                    "missing inclusion {}<{} between different fibers",
                    poset.name(a),
                    poset.name(b)
                )))
            }
        };
        incl.push(((a, b), m));
    }
    if let Some((a, b)) = given.keys().next() {
        return Err(CliError::Input(format!("{}<{} is not a covering pair", poset.name(*a), poset.name(*b))));
    }
    Ok(Net::new(poset.clone(), fibers, incl)?)
}

pub fn build_bundle(spec: &BundleSpec, poset: &Poset) -> Result<HilbertNetBundle, CliError> {
    names_exist(poset, spec.dims.keys().cloned(), "bundle dims")?;
    let dims = (0..poset.len())
        .map(|o| {
            spec.dims
                .get(poset.name(o))
                .copied()
                .or(spec.dim)
                .ok_or_else(|| CliError::Input(format!("no bundle dimension for `{}`", poset.name(o))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut given = BTreeMap::new();
    for u in &spec.unitaries {
        let what = format!("unitary {}<{}", u.lower, u.upper);
        let a = poset.index_of(&u.lower).map_err(|_| CliError::Input(format!("{what}: unknown element")))?;
        let b = poset.index_of(&u.upper).map_err(|_| CliError::Input(format!("{what}: unknown element")))?;
        given.insert((a, b), matrix(&u.matrix, &what)?);
    }
    let mut unitaries = Vec::new();
    for (a, b) in poset.hasse_pairs() {
        let m = match given.remove(&(a, b)) {
            Some(m) => m,
            None if dims[a] == dims[b] => cstar_nets::linalg::eye(dims[a]),
            None => {
                return Err(CliError::Input(format!("missing unitary {}<{}", poset.name(a), poset.name(b))));
            }
        };
        unitaries.push(((a, b), m));
    }
    if let Some((a, b)) = given.keys().next() {
        return Err(CliError::Input(format!("{}<{} is not a covering pair", poset.name(*a), poset.name(*b))));
    }
    Ok(HilbertNetBundle::new(poset.clone(), dims, unitaries)?)
}

fn symbol_of(spec: &OpSpec, dim: usize, what: &str) -> Result<Symbol, CliError> {
    let s = match spec {
        OpSpec::Matrix(m) => Symbol::constant(matrix(m, what)?),
        OpSpec::Symbol { symbol } => {
            let mut s = Symbol::zero(dim);
            for (k, m) in symbol {
                let k: i32 = k.parse().map_err(|_| CliError::Input(format!("{what}: power `{k}` is not an integer")))?;
                let m = matrix(m, what)?;
                if !m.is_square() {
                    return Err(CliError::Input(format!("{what}: symbol coefficients must be square")));
                }
                s = s.add(&Symbol::monomial(k, m));
            }
            s
        }
        OpSpec::PerElement { .. } => return Err(CliError::Input(format!("{what}: nested per_element"))),
    };
    if s.dim != dim || s.coeffs.values().any(|m| m.shape() != (dim, dim)) {
        return Err(CliError::Input(format!("{what}: expected {dim}×{dim} operators")));
    }
    Ok(s)
}

fn per_element(spec: &OpSpec, poset: &Poset, dims: &[usize], what: &str) -> Result<Vec<Symbol>, CliError> {
    match spec {
        OpSpec::PerElement { per_element } => {
            names_exist(poset, per_element.keys().cloned(), what)?;
            (0..poset.len())
                .map(|o| {
                    let s = per_element
                        .get(poset.name(o))
                        .ok_or_else(|| CliError::Input(format!("{what}: no entry for `{}`", poset.name(o))))?;
                    symbol_of(s, dims[o], &format!("{what} at {}", poset.name(o)))
                })
                .collect()
        }
        other => (0..poset.len()).map(|o| symbol_of(other, dims[o], what)).collect(),
    }
}

pub fn build_module(spec: &ModuleSpec, net: &Net) -> Result<FredholmNetModule, CliError> {
    let poset = &net.poset;
    let bundle = build_bundle(&spec.bundle, poset)?;
    names_exist(poset, spec.representation.keys().cloned(), "representation")?;
    let components = (0..poset.len())
        .map(|o| {
            let name = poset.name(o);
            let target = FinDimCStar::matrix(bundle.dims[o]);
            let src = net.fibers[o].clone();
            match spec.representation.get(name) {
                Some(r) => {
                    let conj = match &r.conjugators {
                        Some(cs) => cs.iter().map(|m| matrix(m, name)).collect::<Result<Vec<_>, _>>()?,
                        None => vec![cstar_nets::linalg::eye(bundle.dims[o])],
                    };
                    Ok(StarMorphism::new(src, target, r.multiplicity.clone(), conj)?)
                }
                None => match src.blocks.as_slice() {
                    [n] if *n > 0 && bundle.dims[o] % n == 0 => {
                        Ok(StarMorphism::embedding(src.clone(), target, vec![vec![bundle.dims[o] / n]])?)
                    }
                    _ => Err(CliError::Input(format!("representation at `{name}` must be given explicitly"))),
                },
            }
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let dims = bundle.dims.clone();
    let rep = Representation::new(net.clone(), bundle, components)?;
    let f = per_element(&spec.f, poset, &dims, "f")?;
    let grading = match &spec.grading {
        Some(g) => Some(
            per_element(g, poset, &dims, "grading")?
                .into_iter()
                .map(|s| {
                    if s.coeffs.keys().any(|&k| k != 0) {
                        Err(CliError::Input("grading must be constant".into()))
                    } else {
                        Ok(s.coeffs.get(&0).cloned().unwrap_or_else(|| cstar_nets::linalg::zeros(s.dim, s.dim)))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let mut module = match spec.mode {
        ModeSpec::Finite => {
            let mats = f
                .iter()
                .map(|s| {
                    if s.coeffs.keys().any(|&k| k != 0) {
                        Err(CliError::Input("finite-mode `f` must be constant".into()))
                    } else {
                        Ok(s.coeffs.get(&0).cloned().unwrap_or_else(|| cstar_nets::linalg::zeros(s.dim, s.dim)))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            FredholmNetModule::finite(rep, grading, mats)?
        }
        ModeSpec::Toeplitz => FredholmNetModule::toeplitz(rep, grading, f)?,
    };
    if let Some(n) = spec.truncation {
        if module.mode == Mode::Toeplitz {
            module.truncation = n;
        }
    }
    Ok(module)
}

pub fn build_toeplitz(spec: &ToeplitzSpec, truncation: Option<usize>) -> Result<ToeplitzOp, CliError> {
    let mut terms = Vec::new();
    for (k, z) in &spec.symbol {
        let k: i32 = k.parse().map_err(|_| CliError::Input(format!("toeplitz: power `{k}` is not an integer")))?;
        terms.push((k, complex(z)));
    }
    let mut op = ToeplitzOp::new(Symbol::scalar(&terms), truncation.or(spec.truncation).unwrap_or(64));
    if let Some(m) = &spec.correction {
        let m = matrix(m, "toeplitz correction")?;
        if !m.is_square() {
            return Err(CliError::Input("toeplitz correction must be square".into()));
        }
        op.correction = Some(m);
    }
    Ok(op)
}

pub fn build_group(spec: &SectorSpec) -> Result<FiniteGroupRep, CliError> {
    match &spec.table {
        Some(t) => {
            let sigma = t.matrices.iter().map(|m| matrix(m, "group matrix")).collect::<Result<Vec<_>, _>>()?;
            Ok(FiniteGroupRep::new(&spec.group, &spec.irrep, t.elements.clone(), t.table.clone(), sigma)?)
        }
        None => Ok(FiniteGroupRep::by_name(&spec.group, &spec.irrep)?),
    }
}
