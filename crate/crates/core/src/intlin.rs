//! Solvability of small integer linear systems `A x = b` over `Z`.

/// Column-style Hermite reduction: returns `true` iff `A x = b` has an integer
/// solution. `a` is row-major with `cols` columns.
pub fn solvable_over_z(a: &[Vec<i64>], b: &[i64]) -> bool {
    let rows = a.len();
    if rows == 0 {
        return true;
    }
    let cols = a[0].len();
    // Work on columns: column operations keep the lattice spanned by the columns.
    let mut m: Vec<Vec<i128>> = (0..cols)
        .map(|c| (0..rows).map(|r| a[r][c] as i128).collect())
        .collect();
    let mut target: Vec<i128> = b.iter().map(|&v| v as i128).collect();
    let mut pivot_col = 0;
    for r in 0..rows {
        // Euclid across the remaining columns on row r.
        loop {
            let mut best: Option<usize> = None;
            for c in pivot_col..cols {
                if m[c][r] != 0 && best.is_none_or(|k| m[c][r].abs() < m[k][r].abs()) {
                    best = Some(c);
                }
            }
            let Some(k) = best else { break };
            m.swap(pivot_col, k);
            let mut done = true;
            for c in pivot_col + 1..cols {
                if m[c][r] != 0 {
                    let q = m[c][r].div_euclid(m[pivot_col][r]);
                    let pivot = m[pivot_col].clone();
                    for (x, p) in m[c].iter_mut().zip(&pivot).take(rows) {
                        *x -= q * p;
                    }
                    if m[c][r] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_col < cols && m[pivot_col][r] != 0 {
            let p = m[pivot_col][r];
            if target[r] % p != 0 {
                return false;
            }
            let q = target[r] / p;
            for i in 0..rows {
                target[i] -= q * m[pivot_col][i];
            }
            pivot_col += 1;
        } else if target[r] != 0 {
            return false;
        }
    }
    target.iter().all(|&t| t == 0)
}
