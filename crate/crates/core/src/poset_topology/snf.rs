//! Smith normal form over the integers.

/// Nonzero diagonal entries of the Smith normal form of `m` (rows × `cols`),
/// positive and forming a divisibility chain.
pub fn smith_diagonal(m: &[Vec<i64>], cols: usize) -> Vec<i64> {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let rows = a.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero absolute value in the remaining submatrix
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &v) in row.iter().enumerate().skip(t) {
                if v != 0 && best.is_none_or(|(bi, bj)| v.abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility: p must divide every remaining entry
                let offender = (t + 1..rows).find_map(|i| (t + 1..cols).find(|&j| a[i][j] % p != 0).map(|j| (i, j)));
                match offender {
                    Some((i, _)) => {
                        for j in t..cols {
                            a[t][j] += a[i][j];
                        }
                        continue;
                    }
                    None => break,
                }
            }
            // move the smallest entry of row/column t onto the pivot
            let mut bi = (t, t);
            for i in t..rows {
                if a[i][t] != 0 && a[i][t].abs() < a[bi.0][bi.1].abs() {
                    bi = (i, t);
                }
            }
            for j in t..cols {
                if a[t][j] != 0 && a[t][j].abs() < a[bi.0][bi.1].abs() {
                    bi = (t, j);
                }
            }
            a.swap(t, bi.0);
            for row in a.iter_mut() {
                row.swap(t, bi.1);
            }
        }
        diag.push(a[t][t].unsigned_abs() as i64);
        t += 1;
    }
    diag
}

/// Abelianization of `⟨cols generators | rows⟩` as invariant factors: torsion
/// coefficients `d > 1` ascending, then one `0` per free summand.
pub fn abelian_invariants(m: &[Vec<i64>], cols: usize) -> Vec<i64> {
    let d = smith_diagonal(m, cols);
    let mut out: Vec<i64> = d.iter().copied().filter(|&x| x > 1).collect();
    out.sort_unstable();
    out.extend(std::iter::repeat_n(0, cols - d.len()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclic_and_free() {
        assert_eq!(abelian_invariants(&[], 1), vec![0]);
        assert_eq!(abelian_invariants(&[vec![2]], 1), vec![2]);
        assert_eq!(abelian_invariants(&[vec![1]], 1), Vec::<i64>::new());
        // ℤ² / ⟨(2,0),(0,3)⟩ ≅ ℤ/6
        assert_eq!(abelian_invariants(&[vec![2, 0], vec![0, 3]], 2), vec![6]);
        // ℤ³ / ⟨(2,4,0)⟩ ≅ ℤ/2 ⊕ ℤ²
        assert_eq!(abelian_invariants(&[vec![2, 4, 0]], 3), vec![2, 0, 0]);
    }

    fn det(m: &[Vec<i64>]) -> i128 {
        // cofactor expansion; only used for small matrices
        let n = m.len();
        if n == 1 {
            return m[0][0] as i128;
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] as i128 * det(&minor)
            })
            .sum()
    }

    proptest! {
        #[test]
        fn diagonal_is_divisibility_chain_with_matching_determinant(
            entries in proptest::collection::vec(-6i64..7, 9)
        ) {
            let m: Vec<Vec<i64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let d = smith_diagonal(&m, 3);
            for w in d.windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
            let prod: i128 = if d.len() == 3 { d.iter().map(|&x| x as i128).product() } else { 0 };
            prop_assert_eq!(prod, det(&m).abs());
        }
    }
}
