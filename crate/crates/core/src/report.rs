//! Report-style results: named checks with residuals and violations.

use serde::Serialize;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Violation {
    pub check: String,
    pub location: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub detail: String,
    /// Hasse edges whose data enter this violation (net relation checks).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckSummary {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckSummary>,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    fn summary_mut(&mut self, name: &str, tol: f64) -> &mut CheckSummary {
        if let Some(i) = self.checks.iter().position(|c| c.name == name) {
            return &mut self.checks[i];
        }
        self.checks.push(CheckSummary { name: name.to_string(), max_residual: 0.0, tolerance: tol, passed: true });
        self.checks.last_mut().unwrap()
    }

    /// Registers a check even if no residual is ever recorded for it.
    pub fn declare(&mut self, name: &str, tol: f64) {
        self.summary_mut(name, tol);
    }

    /// Records one residual; adds a violation when it exceeds `tol`.
    pub fn residual(&mut self, name: &str, location: Vec<String>, residual: f64, tol: f64) -> bool {
        let ok = residual <= tol && residual.is_finite();
        let s = self.summary_mut(name, tol);
        if residual > s.max_residual || !residual.is_finite() {
            s.max_residual = residual;
        }
        if !ok {
            s.passed = false;
            self.violations.push(Violation {
                check: name.to_string(),
                location,
                residual: Some(residual),
                detail: format!("residual {residual:.3e} exceeds {tol:.1e}"),
                edges: Vec::new(),
            });
        }
        ok
    }

    /// Like [`ValidationReport::residual`], attaching the edges involved.
    pub fn residual_with_edges(
        &mut self,
        name: &str,
        location: Vec<String>,
        residual: f64,
        tol: f64,
        edges: Vec<(String, String)>,
    ) -> bool {
        let before = self.violations.len();
        let ok = self.residual(name, location, residual, tol);
        if self.violations.len() > before {
            self.violations.last_mut().unwrap().edges = edges;
        }
        ok
    }

    pub fn fail(&mut self, name: &str, location: Vec<String>, detail: impl Into<String>) {
        let s = self.summary_mut(name, 0.0);
        s.passed = false;
        self.violations.push(Violation {
            check: name.to_string(),
            location,
            residual: None,
            detail: detail.into(),
            edges: Vec::new(),
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn violations_of(&self, check: &str) -> Vec<&Violation> {
        self.violations.iter().filter(|v| v.check == check).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.max_residual).fold(0.0, f64::max)
    }

    pub fn merge(&mut self, prefix: &str, other: ValidationReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            match self.checks.iter_mut().find(|x| x.name == c.name) {
                Some(x) => {
                    x.max_residual = x.max_residual.max(c.max_residual);
                    x.passed &= c.passed;
                }
                None => self.checks.push(c),
            }
        }
        for mut v in other.violations {
            v.check = format!("{prefix}{}", v.check);
            self.violations.push(v);
        }
        self.notes.extend(other.notes);
    }

    /// Hasse edges common to every violation that names edges: the location
    /// of a single faulty inclusion.
    pub fn suspect_edges(&self) -> Vec<(String, String)> {
        let mut with_edges = self.violations.iter().filter(|v| !v.edges.is_empty());
        let Some(first) = with_edges.next() else { return Vec::new() };
        let mut common = first.edges.clone();
        for v in with_edges {
            common.retain(|e| v.edges.contains(e));
        }
        common.sort();
        common.dedup();
        common
    }
}
