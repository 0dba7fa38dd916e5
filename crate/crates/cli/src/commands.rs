use serde_json::{json, Map, Value};

use cstar_nets::bundle_holonomy::{classify_bundles, transition_cocycle};
use cstar_nets::field_algebra::{build_field_algebra, directed_tensor_check, fiber_iso_check};
use cstar_nets::fredholm::{assemble_family, frame_index, toeplitz_index, validate_module, FredholmNetModule, Mode};
use cstar_nets::linalg::{self, CMat, C64};
use cstar_nets::matrix_cstar::StarMorphism;
use cstar_nets::net::{equivalent_bundles, holonomy, universal_fiber, validate_net};
use cstar_nets::poset_topology::{pi1_presentation, validate_poset, Character, GroupKind, GroupPresentation, Poset};
use cstar_nets::report::ValidationReport;
use cstar_nets::sectors::{sector_index, twisted_sector_module, Sector, DEFAULT_SECTOR_TRUNCATION};
use cstar_nets::space_model::validate_model;

use crate::error::CliError;
use crate::scenario::{self, ModeSpec, Scenario, SectorSpec};

/// A report body and whether every check in it passed.
pub struct Outcome {
    pub body: Map<String, Value>,
    pub pass: bool,
}

impl Outcome {
    fn new() -> Self {
        Outcome { body: Map::new(), pass: true }
    }

    fn put(&mut self, key: &str, v: impl serde::Serialize) {
        self.body.insert(key.to_string(), serde_json::to_value(v).expect("report values serialize"));
    }

    fn report(&mut self, key: &str, r: &ValidationReport) {
        self.pass &= r.is_valid();
        self.put(key, r);
    }

    /// Records a failed check raised as an error.
    fn failure(&mut self, key: &str, e: &cstar_nets::Error) {
        self.pass = false;
        self.put(key, json!({ "error": e.to_string() }));
    }
}

pub fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix_json(m: &CMat) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect())).collect())
}

fn morphism_json(m: &StarMorphism) -> Value {
    json!({
        "source": m.source.blocks,
        "target": m.target.blocks,
        "multiplicity": m.multiplicity,
        "block_permutation": m.block_permutation_of(),
        "conjugators": m.conjugators.iter().map(matrix_json).collect::<Vec<_>>(),
    })
}

fn group_text(p: &GroupPresentation) -> String {
    match p.kind() {
        GroupKind::Trivial => "trivial".into(),
        GroupKind::Free(1) => "Z".into(),
        GroupKind::Free(n) => format!("free group of rank {n}"),
        GroupKind::Undetermined => "undetermined".into(),
    }
}

fn base_of(poset: &Poset, base: Option<&str>) -> Result<String, CliError> {
    match base {
        Some(b) => {
            poset.index_of(b).map_err(|_| CliError::Input(format!("unknown base element `{b}`")))?;
            Ok(b.to_string())
        }
        None if !poset.is_empty() => Ok(poset.name(0).to_string()),
        None => Err(CliError::Input("empty poset".into())),
    }
}

fn require<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Input(format!("scenario has no `{what}`")))
}

pub fn validate(s: &Scenario, tol: f64) -> Result<Outcome, CliError> {
    let mut out = Outcome::new();
    let poset = match Poset::from_spec(&s.poset) {
        Ok(p) => p,
        Err(_) => {
            out.report("poset", &validate_poset(&s.poset));
            return Ok(out);
        }
    };
    let mut pr = validate_poset(&poset.to_spec_closed());
    if !poset.closure_added.is_empty() {
        pr.note(format!("{} pairs added by reflexive and transitive closure", poset.closure_added.len()));
    }
    out.report("poset", &pr);
    if s.model.is_some() {
        out.report("model", &validate_model(&s.build_model(&poset)?));
    }
    let net = match &s.net {
        Some(spec) => {
            let net = scenario::build_net(spec, &poset)?;
            out.report("net", &validate_net(&net, tol));
            Some(net)
        }
        None => None,
    };
    if let Some(b) = &s.bundle {
        out.report("bundle", &scenario::build_bundle(b, &poset)?.validate(tol));
    }
    if let Some(m) = &s.module {
        let net = net.ok_or_else(|| CliError::Input("a module needs a `net`".into()))?;
        out.report("module", &validate_module(&scenario::build_module(m, &net)?, tol));
    }
    Ok(out)
}

pub fn pi1(s: &Scenario, base: Option<&str>) -> Result<Outcome, CliError> {
    let poset = s.build_poset()?;
    let base = base_of(&poset, base)?;
    let p = pi1_presentation(&poset, &base)?;
    let mut out = Outcome::new();
    out.put("base", &base);
    out.put("generators", &p.generators);
    out.put("relators", &p.relators);
    out.put("abelianization", &p.abelianization);
    out.put("simplified", &p.simplified);
    out.put("group", group_text(&p));
    Ok(out)
}

pub fn holonomy_cmd(s: &Scenario, base: Option<&str>, tol: f64) -> Result<Outcome, CliError> {
    let poset = s.build_poset()?;
    let base = base_of(&poset, base)?;
    let pres = pi1_presentation(&poset, &base)?;
    let mut out = Outcome::new();
    out.put("base", &base);
    out.put("generators", &pres.generators);
    if s.net.is_none() && s.bundle.is_none() {
        return Err(CliError::Input("holonomy needs a `net` or a `bundle`".into()));
    }
    if let Some(spec) = &s.net {
        let net = scenario::build_net(spec, &poset)?;
        match holonomy(&net, &pres, tol) {
            Ok(h) => out.put("net", h.iter().map(morphism_json).collect::<Vec<_>>()),
            Err(e) => out.failure("net", &e),
        }
    }
    if let Some(spec) = &s.bundle {
        let b = scenario::build_bundle(spec, &poset)?;
        let r = b.validate(tol);
        let hol = b.holonomy(&pres)?;
        let rows: Vec<Value> = hol
            .iter()
            .map(|u| json!({ "unitary": matrix_json(u), "eigenvalues": linalg::eigenvalues(u).into_iter().map(complex_json).collect::<Vec<_>>() }))
            .collect();
        out.put("bundle", rows);
        out.report("bundle_validation", &r);
    }
    Ok(out)
}

pub fn cocycle(s: &Scenario, cover: Option<&[String]>, tol: f64) -> Result<Outcome, CliError> {
    let poset = s.build_poset()?;
    let model = s.build_model(&poset)?;
    let net = scenario::build_net(require(&s.net, "net")?, &poset)?;
    let names: Vec<String> = match cover.map(<[String]>::to_vec).or_else(|| s.cover.clone()) {
        Some(c) => c,
        None => return Err(CliError::Input("no cover given (`--cover` or scenario `cover`)".into())),
    };
    let idx = names
        .iter()
        .map(|n| poset.index_of(n).map_err(|_| CliError::Input(format!("unknown cover element `{n}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Outcome::new();
    out.put("cover", &names);
    match transition_cocycle(&net, &model, &idx, tol) {
        Ok(c) => {
            let transitions: Vec<Value> = c
                .transitions
                .iter()
                .map(|t| {
                    json!({
                        "alpha": names[t.alpha],
                        "beta": names[t.beta],
                        "witnesses": t.witnesses.iter().map(|&w| poset.name(w)).collect::<Vec<_>>(),
                        "theta": morphism_json(&t.theta),
                    })
                })
                .collect();
            out.put("transitions", transitions);
            let nontrivial: Vec<(String, String)> =
                c.nontrivial(tol).into_iter().map(|(a, b)| (names[a].clone(), names[b].clone())).collect();
            out.put("nontrivial", nontrivial);
            out.report("cocycle", &c.report);
        }
        Err(e) if matches!(e, cstar_nets::Error::NotABundle(_) | cstar_nets::Error::NoRefinementWitness(..)) => {
            out.failure("cocycle", &e)
        }
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

pub fn build_c0x(s: &Scenario, tol: f64) -> Result<Outcome, CliError> {
    let poset = s.build_poset()?;
    let model = s.build_model(&poset)?;
    let net = scenario::build_net(require(&s.net, "net")?, &poset)?;
    let mut out = Outcome::new();
    match build_field_algebra(&net, &model) {
        Ok(fa) => {
            out.put("dimension", fa.dim());
            out.put("ambient_dimension", fa.ambient_dim());
            let fibers: Vec<Value> = (0..model.num_points())
                .map(|x| {
                    json!({
                        "point": model.points[x],
                        "fiber": fa.fibers[x].blocks,
                        "route": fa.universal[x].route,
                        "evaluation_rank": fa.evaluation_rank(x),
                    })
                })
                .collect();
            out.put("points", fibers);
            out.put("generators", fa.generators.len());
            out.report("field_algebra", &fa.report(tol));
        }
        Err(e @ cstar_nets::Error::FiberNotRealizable(_)) => out.failure("field_algebra", &e),
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

pub fn universal_check(s: &Scenario, tol: f64) -> Result<Outcome, CliError> {
    let poset = s.build_poset()?;
    let model = s.build_model(&poset)?;
    let net = scenario::build_net(require(&s.net, "net")?, &poset)?;
    let mut out = Outcome::new();
    let mut points = Vec::new();
    let mut realizable = true;
    for x in 0..model.num_points() {
        let omega = model.omega(x)?;
        let u = universal_fiber(&net, &omega.members)?;
        realizable &= u.realization.is_some();
        points.push(json!({
            "point": model.points[x],
            "omega": omega.members.iter().map(|&o| poset.name(o)).collect::<Vec<_>>(),
            "minimum": poset.name(omega.minimum),
            "route": u.route,
            "fiber": u.algebra().map(|a| a.blocks.clone()),
            "compatibility_residual": u.realization.as_ref().map(|r| r.residual),
            "formal": u.formal,
        }));
        if let Some(r) = &u.realization {
            let mut rep = ValidationReport::new();
            rep.residual("compatibility", vec![model.points[x].clone()], r.residual, tol);
            out.pass &= rep.is_valid();
        }
    }
    out.put("points", points);
    if realizable {
        let fa = build_field_algebra(&net, &model)?;
        let mut iso = ValidationReport::new();
        let mut ranks = Vec::new();
        for x in 0..model.num_points() {
            let f = fiber_iso_check(&fa, x, tol)?;
            ranks.push(json!({ "point": f.point, "rank": f.rank, "fiber_dim": f.fiber_dim, "quotient_dim": f.quotient_dim }));
            iso.merge("", f.report);
        }
        out.put("fiber_isomorphisms", ranks);
        out.report("fiber_iso", &iso);
    } else {
        out.put("fiber_isomorphisms", Value::Null);
    }
    if poset.maximum().is_some() {
        let d = directed_tensor_check(&net, &model, tol)?;
        out.put("directed_tensor", json!({ "maximum": d.maximum, "dimension": d.dimension, "expected": d.expected }));
        out.report("directed_tensor_report", &d.report);
    }
    Ok(out)
}

fn module_outcome(out: &mut Outcome, s: &Scenario, module: &FredholmNetModule, tol: f64) -> Result<(), CliError> {
    let poset = &module.representation.net.poset;
    let v = validate_module(module, tol);
    out.report("module", &v);
    out.put("mode", module.mode);
    out.put("parity", module.parity());
    if !v.is_valid() {
        return Ok(());
    }
    let model = s.build_model(poset)?;
    match assemble_family(module, &model, tol) {
        Ok(fam) => {
            out.put("index", fam.index);
            out.put("per_point", &fam.per_point);
            out.put("element_index", &fam.element_index);
            out.put("kernel_dims", &fam.kernel_bundle.dims);
            out.put("cokernel_dims", &fam.cokernel_bundle.dims);
            out.put("kernel_holonomy", fam.kernel_holonomy.iter().map(matrix_json).collect::<Vec<_>>());
            out.put("cokernel_holonomy", fam.cokernel_holonomy.iter().map(matrix_json).collect::<Vec<_>>());
            out.report("kasparov", &fam.kasparov);
        }
        Err(
            e @ (cstar_nets::Error::KernelNotInvariant(_)
            | cstar_nets::Error::NonConstantIndex(_)
            | cstar_nets::Error::FiberNotRealizable(_)
            | cstar_nets::Error::SymbolVanishesOnCircle(_)),
        ) => out.failure("family", &e),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

pub fn fredholm(s: &Scenario, mode: Option<ModeSpec>, truncation: Option<usize>, tol: f64) -> Result<Outcome, CliError> {
    let mut out = Outcome::new();
    let mut ran = false;
    if let Some(spec) = &s.module {
        if mode.is_none_or(|m| m == spec.mode) {
            let poset = s.build_poset()?;
            let net = scenario::build_net(require(&s.net, "net")?, &poset)?;
            let mut module = scenario::build_module(spec, &net)?;
            if let (Some(n), Mode::Toeplitz) = (truncation, module.mode) {
                module.truncation = n;
            }
            module_outcome(&mut out, s, &module, tol)?;
            ran = true;
        }
    }
    if let Some(spec) = &s.toeplitz {
        if mode.is_none_or(|m| m == ModeSpec::Toeplitz) {
            let op = scenario::build_toeplitz(spec, truncation)?;
            match toeplitz_index(&op) {
                Ok(r) => {
                    let oracle = frame_index(&op.symbol, op.correction.as_ref(), op.truncation, 1e-8);
                    let mut rep = ValidationReport::new();
                    rep.declare("frame_oracle", tol);
                    if oracle.index != r.index {
                        rep.fail(
                            "frame_oracle",
                            Vec::new(),
                            format!("winding gives {}, frames give {}", r.index, oracle.index),
                        );
                    }
                    out.put(
                        "toeplitz",
                        json!({
                            "index": r.index,
                            "kernel_dim": r.kernel_dim,
                            "cokernel_dim": r.cokernel_dim,
                            "truncation": op.truncation,
                            "self_adjoint": op.is_self_adjoint(tol),
                            "compact": op.is_compact(tol),
                        }),
                    );
                    out.report("toeplitz_oracle", &rep);
                }
                Err(e @ cstar_nets::Error::SymbolVanishesOnCircle(_)) => out.failure("toeplitz", &e),
                Err(e) => return Err(e.into()),
            }
            ran = true;
        }
    }
    if !ran {
        return Err(CliError::Input("scenario has no `module` or `toeplitz` section for this mode".into()));
    }
    Ok(out)
}

/// Parses `re` or `re:im`.
pub fn parse_complex(text: &str) -> Result<C64, CliError> {
    let bad = || CliError::Input(format!("cannot read `{text}` as a complex number (use `re` or `re:im`)"));
    let mut parts = text.split(':');
    let re: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(p) => p.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(linalg::c(re, im))
}

pub struct SectorFlags<'a> {
    pub group: Option<&'a str>,
    pub irrep: Option<&'a str>,
    pub chi: Option<&'a str>,
    pub truncation: Option<usize>,
}

pub fn sector(s: Option<&Scenario>, flags: &SectorFlags, tol: f64) -> Result<Outcome, CliError> {
    let poset = match s {
        Some(s) => s.build_poset()?,
        None => cstar_nets::catalog::c6_poset(),
    };
    let from_file = s.and_then(|s| s.sector.clone());
    let mut spec = from_file.unwrap_or(SectorSpec { group: String::new(), irrep: String::new(), chi: None, truncation: None, table: None });
    if let Some(g) = flags.group {
        spec.group = g.to_string();
        spec.table = None;
    }
    if let Some(i) = flags.irrep {
        spec.irrep = i.to_string();
    }
    if spec.group.is_empty() || spec.irrep.is_empty() {
        return Err(CliError::Input("sector needs a group and an irrep (`--group`, `--irrep`)".into()));
    }
    let sigma = scenario::build_group(&spec)?;
    let pres = pi1_presentation(&poset, poset.name(0))?;
    let values: Vec<C64> = match (flags.chi, &spec.chi) {
        (Some(text), _) => text.split(',').map(parse_complex).collect::<Result<_, _>>()?,
        (None, Some(v)) => v.iter().map(scenario::complex).collect(),
        (None, None) => Character::trivial(&pres).values,
    };
    let truncation = flags.truncation.or(spec.truncation).unwrap_or(DEFAULT_SECTOR_TRUNCATION);
    let sm = twisted_sector_module(&Sector { sigma, chi: Character { values } }, &poset, truncation)?;
    let r = sector_index(&sm, tol)?;
    let mut out = Outcome::new();
    out.put("group", &r.group);
    out.put("irrep", &r.irrep);
    out.put("chi", sm.sector.chi.values.iter().map(|&z| complex_json(z)).collect::<Vec<_>>());
    out.put("truncation", truncation);
    out.put("fiber_dim", sm.fiber_dim);
    out.put("elements", &r.elements);
    out.put("g_index", &r.g_index);
    out.put("classes", &r.classes);
    out.put("class_index", &r.class_index);
    out.put("index", r.index);
    out.put("statistical_dimension", r.statistical_dimension);
    out.put("finite_kernel_dims", r.finite_kernel_dims);
    out.report("checks", &r.report);
    Ok(out)
}

pub fn classify(s: &Scenario, base: Option<&str>, tol: f64) -> Result<Outcome, CliError> {
    let poset = s.build_poset()?;
    let base = base_of(&poset, base)?;
    let mut out = Outcome::new();
    out.put("base", &base);
    let mut ran = false;
    if let (Some(a), Some(b)) = (&s.bundle, &s.other_bundle) {
        let c = classify_bundles(&scenario::build_bundle(a, &poset)?, &scenario::build_bundle(b, &poset)?, &base, tol)?;
        out.put("hilbert_bundles", &c);
        ran = true;
    }
    if let (Some(a), Some(b)) = (&s.net, &s.other_net) {
        let same = equivalent_bundles(&scenario::build_net(a, &poset)?, &scenario::build_net(b, &poset)?, &base, tol);
        match same {
            Ok(v) => out.put("net_bundles", json!({ "isomorphic_as_net_bundles": v })),
            Err(e @ (cstar_nets::Error::NotABundle(_) | cstar_nets::Error::RelatorNotFlat { .. })) => out.failure("net_bundles", &e),
            Err(e) => return Err(e.into()),
        }
        ran = true;
    }
    if !ran {
        return Err(CliError::Input("classify needs `bundle` and `other_bundle`, or `net` and `other_net`".into()));
    }
    Ok(out)
}
