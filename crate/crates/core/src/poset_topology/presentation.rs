use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::snf::abelian_invariants;
use super::Poset;
use crate::error::{Error, Result};
use crate::linalg::{C64, ONE};

/// Word in a presentation: letters are signed 1-based generator indices.
pub type Word = Vec<i32>;

pub fn free_reduce(w: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

fn cyclic_reduce(w: &[i32]) -> Word {
    let mut w = free_reduce(w);
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        w.pop();
        w.remove(0);
    }
    w
}

pub fn inverse_word(w: &[i32]) -> Word {
    w.iter().rev().map(|x| -x).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

/// One traversal of a comparable pair `lower < upper`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub lower: String,
    pub upper: String,
    pub direction: Direction,
}

impl Step {
    pub fn up(lower: &str, upper: &str) -> Self {
        Step { lower: lower.into(), upper: upper.into(), direction: Direction::Up }
    }

    pub fn down(lower: &str, upper: &str) -> Self {
        Step { lower: lower.into(), upper: upper.into(), direction: Direction::Down }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeLoop {
    pub base: String,
    pub steps: Vec<Step>,
}

impl EdgeLoop {
    /// Loop through the given element sequence, which must start and end at
    /// the base and move between comparable elements.
    pub fn through(poset: &Poset, vertices: &[&str]) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::MalformedLoop("empty vertex sequence".into()));
        };
        let mut steps = Vec::new();
        for w in vertices.windows(2) {
            let (a, b) = (poset.index_of(w[0])?, poset.index_of(w[1])?);
            if poset.lt(a, b) {
                steps.push(Step::up(w[0], w[1]));
            } else if poset.lt(b, a) {
                steps.push(Step::down(w[1], w[0]));
            } else {
                return Err(Error::MalformedLoop(format!("{} and {} are not comparable", w[0], w[1])));
            }
        }
        Ok(EdgeLoop { base: first.to_string(), steps })
    }

    pub fn concat(&self, other: &EdgeLoop) -> Result<EdgeLoop> {
        if self.base != other.base {
            return Err(Error::MalformedLoop("loops have different base points".into()));
        }
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Ok(EdgeLoop { base: self.base.clone(), steps })
    }

    pub fn reverse(&self) -> EdgeLoop {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| Step {
                lower: s.lower.clone(),
                upper: s.upper.clone(),
                direction: match s.direction {
                    Direction::Up => Direction::Down,
                    Direction::Down => Direction::Up,
                },
            })
            .collect();
        EdgeLoop { base: self.base.clone(), steps }
    }

    /// Element indices visited, starting and ending at the base.
    pub fn vertices(&self, poset: &Poset) -> Result<Vec<usize>> {
        let mut at = poset.index_of(&self.base)?;
        let mut out = vec![at];
        for (k, s) in self.steps.iter().enumerate() {
            let (lo, hi) = (poset.index_of(&s.lower)?, poset.index_of(&s.upper)?);
            if !poset.lt(lo, hi) {
                return Err(Error::MalformedLoop(format!("step {k}: {} is not below {}", s.lower, s.upper)));
            }
            let (from, to) = match s.direction {
                Direction::Up => (lo, hi),
                Direction::Down => (hi, lo),
            };
            if from != at {
                return Err(Error::MalformedLoop(format!(
                    "step {k} starts at {} but the path is at {}",
                    poset.name(from),
                    poset.name(at)
                )));
            }
            at = to;
            out.push(at);
        }
        if at != out[0] {
            return Err(Error::MalformedLoop(format!("loop ends at {} instead of {}", poset.name(at), self.base)));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "rank", rename_all = "lowercase")]
pub enum GroupKind {
    Trivial,
    Free(usize),
    Undetermined,
}

/// Result of Tietze-style simplification of a presentation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplifiedPresentation {
    /// Surviving generators (1-based indices into the original list).
    pub generators: Vec<i32>,
    /// Relators in the original generator indices, mentioning only survivors.
    pub relators: Vec<Word>,
    /// For every original generator, its expression in the survivors.
    pub substitutions: Vec<Word>,
    pub kind: GroupKind,
}

/// Edge-path group presentation of the order complex of a poset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupPresentation {
    pub base: String,
    /// Generator symbols `lower<upper`, one per non-tree edge.
    pub generators: Vec<String>,
    /// Non-tree edges as element indices `(lower, upper)`.
    #[serde(skip)]
    pub generator_edges: Vec<(usize, usize)>,
    pub relators: Vec<Word>,
    pub abelianization: Vec<i64>,
    pub simplified: SimplifiedPresentation,
    /// Spanning-tree parent of each element (`None` for the base).
    #[serde(skip)]
    pub tree_parent: Vec<Option<usize>>,
}

impl GroupPresentation {
    pub fn kind(&self) -> GroupKind {
        self.simplified.kind
    }

    pub fn is_trivial(&self) -> bool {
        self.simplified.kind == GroupKind::Trivial
    }

    /// Generator index (1-based) of the edge `(lower, upper)`, if it is a non-tree edge.
    pub fn generator_of_edge(&self, lower: usize, upper: usize) -> Option<i32> {
        self.generator_edges.iter().position(|&e| e == (lower, upper)).map(|k| k as i32 + 1)
    }

    pub fn is_tree_edge(&self, a: usize, b: usize) -> bool {
        self.tree_parent[a] == Some(b) || self.tree_parent[b] == Some(a)
    }

    /// Tree path from the base to `x`, as element indices.
    pub fn tree_path(&self, x: usize) -> Vec<usize> {
        let mut path = vec![x];
        let mut at = x;
        while let Some(p) = self.tree_parent[at] {
            path.push(p);
            at = p;
        }
        path.reverse();
        path
    }

    /// The loop representing generator `g` (1-based): tree path to the lower
    /// end, up across the edge, tree path back from the upper end.
    pub fn generator_loop(&self, poset: &Poset, g: usize) -> EdgeLoop {
        let (a, b) = self.generator_edges[g - 1];
        let mut verts = self.tree_path(a);
        let mut back = self.tree_path(b);
        back.reverse();
        verts.extend(back);
        let names: Vec<&str> = verts.iter().map(|&i| poset.name(i)).collect();
        EdgeLoop::through(poset, &names).expect("tree paths consist of comparable pairs")
    }

    fn relator_matrix(&self) -> Vec<Vec<i64>> {
        exponent_rows(&self.relators, self.generators.len())
    }
}

fn exponent_rows(relators: &[Word], ngens: usize) -> Vec<Vec<i64>> {
    relators
        .iter()
        .map(|r| {
            let mut row = vec![0i64; ngens];
            for &x in r {
                row[x.unsigned_abs() as usize - 1] += x.signum() as i64;
            }
            row
        })
        .collect()
}

/// Edge-path group of the order complex of `poset` based at `base`.
pub fn pi1_presentation(poset: &Poset, base: &str) -> Result<GroupPresentation> {
    let b = poset.index_of(base)?;
    if !poset.is_connected() {
        return Err(Error::DisconnectedPoset);
    }
    let n = poset.len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[b] = true;
    let mut queue = VecDeque::from([b]);
    while let Some(i) = queue.pop_front() {
        for j in poset.neighbours(i) {
            if !seen[j] {
                seen[j] = true;
                parent[j] = Some(i);
                queue.push_back(j);
            }
        }
    }
    let mut generator_edges = Vec::new();
    for (lo, hi) in poset.strict_pairs() {
        if parent[lo] != Some(hi) && parent[hi] != Some(lo) {
            generator_edges.push((lo, hi));
        }
    }
    let generators = generator_edges.iter().map(|&(lo, hi)| format!("{}<{}", poset.name(lo), poset.name(hi))).collect();
    let mut pres = GroupPresentation {
        base: base.to_string(),
        generators,
        generator_edges,
        relators: Vec::new(),
        abelianization: Vec::new(),
        simplified: SimplifiedPresentation {
            generators: Vec::new(),
            relators: Vec::new(),
            substitutions: Vec::new(),
            kind: GroupKind::Undetermined,
        },
        tree_parent: parent,
    };
    let letter = |p: &GroupPresentation, lo: usize, hi: usize| -> Word { p.generator_of_edge(lo, hi).into_iter().collect() };
    let mut relators = Vec::new();
    for (x, y, z) in poset.two_chains() {
        // x → y → z → x around the 2-simplex
        let mut w = letter(&pres, x, y);
        w.extend(letter(&pres, y, z));
        w.extend(inverse_word(&letter(&pres, x, z)));
        let w = free_reduce(&w);
        if !w.is_empty() {
            relators.push(w);
        }
    }
    pres.relators = relators;
    pres.abelianization = abelian_invariants(&pres.relator_matrix(), pres.generators.len());
    pres.simplified = simplify(pres.generators.len(), &pres.relators);
    Ok(pres)
}

fn substitute(w: &[i32], g: i32, value: &[i32]) -> Word {
    let mut out = Vec::new();
    for &x in w {
        if x == g {
            out.extend_from_slice(value);
        } else if x == -g {
            out.extend(inverse_word(value));
        } else {
            out.push(x);
        }
    }
    free_reduce(&out)
}

/// Eliminates generators that occur exactly once in some relator, to a fixpoint.
pub fn simplify(ngens: usize, relators: &[Word]) -> SimplifiedPresentation {
    let mut rels: Vec<Word> = relators.iter().map(|r| cyclic_reduce(r)).filter(|r| !r.is_empty()).collect();
    let mut alive = vec![true; ngens];
    let mut subst: Vec<Word> = (1..=ngens as i32).map(|g| vec![g]).collect();
    loop {
        let mut found = None;
        'search: for (ri, r) in rels.iter().enumerate() {
            for (pos, &x) in r.iter().enumerate() {
                if r.iter().filter(|&&y| y.abs() == x.abs()).count() == 1 {
                    found = Some((ri, pos));
                    break 'search;
                }
            }
        }
        let Some((ri, pos)) = found else { break };
        let r = rels.remove(ri);
        let mut rotated = r[pos..].to_vec();
        rotated.extend_from_slice(&r[..pos]);
        let x = rotated[0];
        let rest = &rotated[1..];
        // x·rest = 1  ⇒  x = rest⁻¹
        let value_of_x = inverse_word(rest);
        let (g, value) = if x > 0 { (x, value_of_x) } else { (-x, inverse_word(&value_of_x)) };
        alive[g as usize - 1] = false;
        for other in rels.iter_mut() {
            *other = cyclic_reduce(&substitute(other, g, &value));
        }
        rels.retain(|r| !r.is_empty());
        for s in subst.iter_mut() {
            *s = substitute(s, g, &value);
        }
    }
    let generators: Vec<i32> = (1..=ngens as i32).filter(|&g| alive[g as usize - 1]).collect();
    let kind = if generators.is_empty() {
        GroupKind::Trivial
    } else if rels.is_empty() {
        GroupKind::Free(generators.len())
    } else {
        GroupKind::Undetermined
    };
    SimplifiedPresentation { generators, relators: rels, substitutions: subst, kind }
}

/// Word of `l` in the generators of `pres`, freely reduced.
pub fn loop_word(poset: &Poset, l: &EdgeLoop, pres: &GroupPresentation) -> Result<Word> {
    if l.base != pres.base {
        return Err(Error::MalformedLoop(format!("loop is based at {} but the presentation at {}", l.base, pres.base)));
    }
    let verts = l.vertices(poset)?;
    let mut w = Vec::new();
    for (s, pair) in l.steps.iter().zip(verts.windows(2)) {
        let (lo, hi) = if s.direction == Direction::Up { (pair[0], pair[1]) } else { (pair[1], pair[0]) };
        if let Some(g) = pres.generator_of_edge(lo, hi) {
            w.push(if s.direction == Direction::Up { g } else { -g });
        }
    }
    Ok(free_reduce(&w))
}

/// A homomorphism from the presented group to the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Character {
    pub values: Vec<C64>,
}

impl Character {
    pub fn trivial(pres: &GroupPresentation) -> Self {
        Character { values: vec![ONE; pres.generators.len()] }
    }

    pub fn evaluate(&self, w: &[i32]) -> C64 {
        w.iter().fold(ONE, |acc, &x| {
            let v = self.values[x.unsigned_abs() as usize - 1];
            acc * if x > 0 { v } else { v.conj() }
        })
    }
}

pub fn evaluate_character(pres: &GroupPresentation, values: &[C64], tol: f64) -> Result<Character> {
    if values.len() != pres.generators.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} character values, got {}",
            pres.generators.len(),
            values.len()
        )));
    }
    if let Some((k, v)) = values.iter().enumerate().find(|(_, v)| (v.norm() - 1.0).abs() > tol) {
        return Err(Error::InvalidInput(format!("value {v} for generator {} is not of unit modulus", k + 1)));
    }
    let ch = Character { values: values.to_vec() };
    for (k, r) in pres.relators.iter().enumerate() {
        let v = ch.evaluate(r);
        if (v - ONE).norm() > tol {
            return Err(Error::RelatorViolation { relator: k, value: format!("{:.6}{:+.6}i", v.re, v.im) });
        }
    }
    Ok(ch)
}
