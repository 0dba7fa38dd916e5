use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C64, ONE, ZERO};
use crate::report::ValidationReport;

/// A unitary representation of a finite group given by its multiplication
/// table; element 0 is the identity.
#[derive(Debug, Clone, Serialize)]
pub struct FiniteGroupRep {
    pub group: String,
    pub name: String,
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
    #[serde(skip)]
    pub sigma: Vec<CMat>,
    pub irreducible: bool,
}

impl FiniteGroupRep {
    pub fn new(group: &str, name: &str, elements: Vec<String>, table: Vec<Vec<usize>>, sigma: Vec<CMat>) -> Result<Self> {
        let mut rep = FiniteGroupRep { group: group.into(), name: name.into(), elements, table, sigma, irreducible: false };
        let report = validate_group_rep(&rep, 1e-12);
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidSector(format!("{} at {}: {}", v.check, v.location.join(","), v.detail)));
        }
        rep.irreducible = rep.character_norm() == rep.order();
        Ok(rep)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.sigma.first().map_or(0, |m| m.nrows())
    }

    pub fn character(&self, g: usize) -> C64 {
        self.sigma[g].trace()
    }

    /// `Σ_g |χ(g)|²`, rounded; equals the group order exactly for irreducibles.
    pub fn character_norm(&self) -> usize {
        (0..self.order()).map(|g| self.character(g).norm_sqr()).sum::<f64>().round() as usize
    }

    pub fn inverse(&self, g: usize) -> usize {
        (0..self.order()).find(|&h| self.table[g][h] == 0).expect("group elements are invertible")
    }

    /// Conjugacy classes ordered by their smallest element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for g in 0..n {
            if seen[g] {
                continue;
            }
            let mut class: Vec<usize> = (0..n).map(|h| self.table[self.table[h][g]][self.inverse(h)]).collect();
            class.sort_unstable();
            class.dedup();
            for &k in &class {
                seen[k] = true;
            }
            out.push(class);
        }
        out
    }

    pub fn z2(irrep: &str) -> Result<Self> {
        let s = match irrep {
            "trivial" => 1.0,
            "sign" => -1.0,
            _ => return Err(Error::InvalidSector(format!("unknown irrep `{irrep}` of z2"))),
        };
        let sigma = vec![linalg::eye(1), linalg::real_diag(&[s])];
        Self::new("z2", irrep, vec!["e".into(), "g".into()], vec![vec![0, 1], vec![1, 0]], sigma)
    }

    /// `S₃` with elements `e, (12), (13), (23), (123), (132)`.
    pub fn s3(irrep: &str) -> Result<Self> {
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
        let names = ["e", "(12)", "(13)", "(23)", "(123)", "(132)"];
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|g| {
                perms
                    .iter()
                    .map(|h| {
                        let gh = [g[h[0]], g[h[1]], g[h[2]]];
                        perms.iter().position(|p| *p == gh).unwrap()
                    })
                    .collect()
            })
            .collect();
        let perm_matrix = |p: &[usize; 3]| {
            let mut m = linalg::zeros(3, 3);
            for (i, &j) in p.iter().enumerate() {
                m[(j, i)] = ONE;
            }
            m
        };
        let sigma: Vec<CMat> = match irrep {
            "trivial" => perms.iter().map(|_| linalg::eye(1)).collect(),
            "sign" => perms
                .iter()
                .map(|p| CMat::from_element(1, 1, perm_matrix(p).determinant()))
                .collect(),
            "standard" => {
                let s2 = 2f64.sqrt();
                let s6 = 6f64.sqrt();
                let q = linalg::from_rows(&[
                    &[c(1.0 / s2, 0.0), c(1.0 / s6, 0.0)],
                    &[c(-1.0 / s2, 0.0), c(1.0 / s6, 0.0)],
                    &[ZERO, c(-2.0 / s6, 0.0)],
                ]);
                perms.iter().map(|p| q.adjoint() * perm_matrix(p) * &q).collect()
            }
            _ => return Err(Error::InvalidSector(format!("unknown irrep `{irrep}` of s3"))),
        };
        Self::new("s3", irrep, names.iter().map(|s| s.to_string()).collect(), table, sigma)
    }

    pub fn by_name(group: &str, irrep: &str) -> Result<Self> {
        match group {
            "z2" => Self::z2(irrep),
            "s3" => Self::s3(irrep),
            _ => Err(Error::InvalidSector(format!("unknown group `{group}`"))),
        }
    }
}

/// Group axioms of the table and homomorphism residuals of `σ`.
pub fn validate_group_rep(rep: &FiniteGroupRep, tol: f64) -> ValidationReport {
    let mut r = ValidationReport::new();
    for name in ["group_table", "identity", "unitary", "homomorphism"] {
        r.declare(name, tol);
    }
    let n = rep.elements.len();
    if n == 0 || rep.table.len() != n || rep.table.iter().any(|row| row.len() != n || row.iter().any(|&k| k >= n)) {
        r.fail("group_table", Vec::new(), "table must be a square array of element indices");
        return r;
    }
    if rep.sigma.len() != n || rep.sigma.iter().any(|m| !m.is_square() || m.nrows() != rep.sigma[0].nrows()) {
        r.fail("group_table", Vec::new(), "one square matrix of common size per element is required");
        return r;
    }
    for g in 0..n {
        if rep.table[0][g] != g || rep.table[g][0] != g {
            r.fail("group_table", vec![rep.elements[g].clone()], "element 0 is not the identity");
        }
        if !(0..n).any(|h| rep.table[g][h] == 0) {
            r.fail("group_table", vec![rep.elements[g].clone()], "no inverse");
        }
        for h in 0..n {
            for k in 0..n {
                if rep.table[rep.table[g][h]][k] != rep.table[g][rep.table[h][k]] {
                    r.fail("group_table", vec![rep.elements[g].clone()], "multiplication is not associative");
                    return r;
                }
            }
        }
    }
    let d = rep.sigma[0].nrows();
    r.residual("identity", Vec::new(), linalg::op_norm(&(&rep.sigma[0] - linalg::eye(d))), tol);
    for g in 0..n {
        r.residual("unitary", vec![rep.elements[g].clone()], linalg::unitarity_defect(&rep.sigma[g]), tol);
        for h in 0..n {
            let res = linalg::op_norm(&(&rep.sigma[rep.table[g][h]] - &rep.sigma[g] * &rep.sigma[h]));
            r.residual("homomorphism", vec![rep.elements[g].clone(), rep.elements[h].clone()], res, tol);
        }
    }
    r
}
