//! Finite posets, directedness and fundamental-group presentations.

mod presentation;
mod snf;

pub use presentation::{
    evaluate_character, loop_word, pi1_presentation, Character, Direction, EdgeLoop, GroupKind, GroupPresentation,
    SimplifiedPresentation, Step, Word,
};
pub use snf::{abelian_invariants, smith_diagonal};

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::ValidationReport;

/// Poset as declared in input: element names and a list of `a ≤ b` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetSpec {
    pub elements: Vec<String>,
    pub leq: Vec<(String, String)>,
}

impl PosetSpec {
    pub fn new(elements: &[&str], leq: &[(&str, &str)]) -> Self {
        PosetSpec {
            elements: elements.iter().map(|s| s.to_string()).collect(),
            leq: leq.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        }
    }
}

/// Checks the partial-order axioms and connectedness of the declared
/// relation as given (no closure applied).
pub fn validate_poset(spec: &PosetSpec) -> ValidationReport {
    let mut report = ValidationReport::new();
    for name in ["known_elements", "reflexive", "antisymmetric", "transitive", "connected"] {
        report.declare(name, 0.0);
    }
    let n = spec.elements.len();
    let mut index = HashMap::new();
    for (i, e) in spec.elements.iter().enumerate() {
        if index.insert(e.as_str(), i).is_some() {
            report.fail("known_elements", vec![e.clone()], "duplicate element");
        }
    }
    let mut rel = vec![vec![false; n]; n];
    for (a, b) in &spec.leq {
        match (index.get(a.as_str()), index.get(b.as_str())) {
            (Some(&i), Some(&j)) => rel[i][j] = true,
            _ => report.fail("known_elements", vec![a.clone(), b.clone()], "pair mentions an undeclared element"),
        }
    }
    let name = |i: usize| spec.elements[i].clone();
    for i in 0..n {
        if !rel[i][i] {
            report.fail("reflexive", vec![name(i)], "missing reflexive pair");
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if rel[i][j] && rel[j][i] {
                report.fail("antisymmetric", vec![name(i), name(j)], "a ≤ b and b ≤ a with a ≠ b");
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if !rel[i][j] {
                continue;
            }
            for k in 0..n {
                if rel[j][k] && !rel[i][k] {
                    report.fail("transitive", vec![name(i), name(j), name(k)], "missing composite pair");
                }
            }
        }
    }
    let comp = components(n, |i, j| rel[i][j] || rel[j][i]);
    if comp > 1 {
        report.fail("connected", Vec::new(), format!("comparability graph has {comp} components"));
    }
    report
}

fn components(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> usize {
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if !seen[j] && adjacent(i, j) {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    count
}

/// A finite partially ordered set with transitively closed order.
#[derive(Debug, Clone)]
pub struct Poset {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    leq: Vec<Vec<bool>>,
    /// Pairs added by reflexive/transitive closure on load.
    pub closure_added: Vec<(String, String)>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && self.leq == other.leq
    }
}

impl Eq for Poset {}

impl Poset {
    /// Loads a declared relation, applying reflexive and transitive closure.
    /// Fails on unknown or duplicate elements and on antisymmetry breaches.
    pub fn from_spec(spec: &PosetSpec) -> Result<Self> {
        let n = spec.elements.len();
        let mut index = HashMap::new();
        for (i, e) in spec.elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::InvalidPoset(format!("duplicate element {e}")));
            }
        }
        let mut leq = vec![vec![false; n]; n];
        for (a, b) in &spec.leq {
            let i = *index.get(a).ok_or_else(|| Error::UnknownElement(a.clone()))?;
            let j = *index.get(b).ok_or_else(|| Error::UnknownElement(b.clone()))?;
            leq[i][j] = true;
        }
        let declared = leq.clone();
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::InvalidPoset(format!(
                        "{} and {} are mutually below each other",
                        spec.elements[i], spec.elements[j]
                    )));
                }
            }
        }
        let mut closure_added = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if leq[i][j] && !declared[i][j] {
                    closure_added.push((spec.elements[i].clone(), spec.elements[j].clone()));
                }
            }
        }
        Ok(Poset { elements: spec.elements.clone(), index, leq, closure_added })
    }

    pub fn new(elements: &[&str], leq: &[(&str, &str)]) -> Result<Self> {
        Self::from_spec(&PosetSpec::new(elements, leq))
    }

    pub fn to_spec(&self) -> PosetSpec {
        let mut leq = Vec::new();
        for (a, b) in self.hasse_pairs() {
            leq.push((self.elements[a].clone(), self.elements[b].clone()));
        }
        PosetSpec { elements: self.elements.clone(), leq }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq[a][b] || self.leq[b][a]
    }

    /// `a ⋖ b`: `a < b` with nothing strictly in between.
    pub fn covers(&self, a: usize, b: usize) -> bool {
        self.lt(a, b) && !(0..self.len()).any(|c| self.lt(a, c) && self.lt(c, b))
    }

    /// Covering chain from `a` up to `b ≥ a`, always stepping to the first
    /// covering element (in element order) that stays below `b`.
    pub fn canonical_chain(&self, a: usize, b: usize) -> Vec<usize> {
        let mut path = vec![a];
        let mut at = a;
        while at != b {
            at = (0..self.len())
                .find(|&c| self.covers(at, c) && self.leq(c, b))
                .expect("a < b has a covering element below b");
            path.push(at);
        }
        path
    }

    /// Covering pairs `(a, b)`, `a ⋖ b`, in element order.
    pub fn hasse_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.covers(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// All pairs `a < b`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.lt(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Chains `a < b < c`.
    pub fn two_chains(&self) -> Vec<(usize, usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if !self.lt(a, b) {
                    continue;
                }
                for c in 0..n {
                    if self.lt(b, c) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    /// Neighbours in the comparability graph, in element order.
    pub fn neighbours(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&b| b != a && self.comparable(a, b)).collect()
    }

    pub fn is_connected(&self) -> bool {
        !self.is_empty() && components(self.len(), |i, j| self.comparable(i, j)) == 1
    }

    /// (upward directed, downward directed).
    pub fn directedness(&self) -> (bool, bool) {
        let n = self.len();
        let mut up = n > 0;
        let mut down = n > 0;
        for a in 0..n {
            for b in a + 1..n {
                up &= (0..n).any(|c| self.leq(a, c) && self.leq(b, c));
                down &= (0..n).any(|c| self.leq(c, a) && self.leq(c, b));
            }
        }
        (up, down)
    }

    pub fn maximum(&self) -> Option<usize> {
        (0..self.len()).find(|&m| (0..self.len()).all(|a| self.leq(a, m)))
    }

    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&m| (0..self.len()).all(|a| self.leq(m, a)))
    }

    /// The induced sub-poset on `subset` (kept in the original element order).
    pub fn restrict(&self, subset: &[usize]) -> Result<(Poset, Vec<usize>)> {
        let mut keep: Vec<usize> = subset.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::EmptyRestriction);
        }
        if let Some(&bad) = keep.iter().find(|&&i| i >= self.len()) {
            return Err(Error::UnknownElement(format!("#{bad}")));
        }
        let elements: Vec<String> = keep.iter().map(|&i| self.elements[i].clone()).collect();
        let index = elements.iter().enumerate().map(|(k, e)| (e.clone(), k)).collect();
        let leq = keep.iter().map(|&i| keep.iter().map(|&j| self.leq[i][j]).collect()).collect();
        Ok((Poset { elements, index, leq, closure_added: Vec::new() }, keep))
    }

    /// Full relation including reflexive and composite pairs.
    pub fn to_spec_closed(&self) -> PosetSpec {
        let n = self.len();
        let mut leq = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.leq[a][b] {
                    leq.push((self.elements[a].clone(), self.elements[b].clone()));
                }
            }
        }
        PosetSpec { elements: self.elements.clone(), leq }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn chain_is_valid_and_directed() {
        let spec = PosetSpec::new(&["a", "b", "c"], &[("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c"), ("a", "c")]);
        assert!(validate_poset(&spec).is_valid());
        assert_eq!(Poset::from_spec(&spec).unwrap().directedness(), (true, true));
    }

    #[test]
    fn antisymmetry_breach_reported() {
        let spec = PosetSpec::new(&["a", "b"], &[("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")]);
        let r = validate_poset(&spec);
        assert_eq!(r.violations_of("antisymmetric").len(), 1);
        assert!(Poset::from_spec(&spec).is_err());
    }

    #[test]
    fn disjoint_chains_reported_disconnected() {
        let spec = PosetSpec::new(
            &["a", "b", "c", "d"],
            &[("a", "a"), ("b", "b"), ("c", "c"), ("d", "d"), ("a", "b"), ("c", "d")],
        );
        let r = validate_poset(&spec);
        assert_eq!(r.violations_of("connected").len(), 1);
        assert!(!Poset::from_spec(&spec).unwrap().is_connected());
    }

    #[test]
    fn missing_reflexive_and_transitive_pairs() {
        let spec = PosetSpec::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let r = validate_poset(&spec);
        assert_eq!(r.violations_of("reflexive").len(), 3);
        assert_eq!(r.violations_of("transitive").len(), 1);
        let p = Poset::from_spec(&spec).unwrap();
        assert!(p.closure_added.contains(&("a".into(), "c".into())));
        assert!(validate_poset(&p.to_spec_closed()).is_valid());
    }

    #[test]
    fn circle_and_tree_directedness() {
        assert_eq!(catalog::c6_poset().directedness(), (false, false));
        let tree = Poset::new(&["a", "b1", "b2"], &[("a", "b1"), ("a", "b2")]).unwrap();
        assert_eq!(tree.directedness(), (false, true));
        assert_eq!(tree.minimum(), Some(0));
        assert_eq!(tree.maximum(), None);
    }

    #[test]
    fn hasse_pairs_skip_composites() {
        let p = Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert_eq!(p.hasse_pairs(), vec![(0, 1), (1, 2)]);
        assert_eq!(p.strict_pairs().len(), 3);
        assert_eq!(p.two_chains(), vec![(0, 1, 2)]);
    }
}
