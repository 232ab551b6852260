//! Linear sum assignment.
//!
//! Exact minimum-cost matching on rectangular cost matrices via
//! shortest augmenting paths with potentials, O(rows^2 * cols).
//! Used for the initial firm/bank, firm/employee, household/bank, and
//! household/property matchings.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Minimum-cost one-to-one assignment of every row to a distinct
/// column. Requires rows <= cols and finite costs. Returns the column
/// chosen for each row and the total cost.
pub fn assign(cost: &Array2<f64>) -> Result<(Vec<usize>, f64)> {
    let (n, m) = cost.dim();
    if n == 0 {
        return Ok((Vec::new(), 0.0));
    }
    if n > m {
        return Err(Error::Config(format!(
            "assignment infeasible: {n} rows > {m} columns; replicate columns by capacity first"
        )));
    }
    if cost.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("assignment cost matrix contains non-finite entries".into()));
    }

    // 1-indexed potentials; p[j] = row matched to column j, 0 = free.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[[i0 - 1, j - 1]] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        // Unwind the augmenting path.
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![usize::MAX; n];
    for j in 1..=m {
        if p[j] != 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    let total = row_to_col.iter().enumerate().map(|(i, &j)| cost[[i, j]]).sum();
    Ok((row_to_col, total))
}

/// Assignment where column `j` may absorb up to `capacity[j]` rows.
/// Columns are replicated to capacity and the replicated solution is
/// mapped back to original column indices.
pub fn assign_with_capacity(cost: &Array2<f64>, capacity: &[usize]) -> Result<(Vec<usize>, f64)> {
    let (n, m) = cost.dim();
    if capacity.len() != m {
        return Err(Error::Config(format!(
            "capacity vector length {} != {m} columns",
            capacity.len()
        )));
    }
    let slots: usize = capacity.iter().sum();
    if slots < n {
        return Err(Error::Config(format!(
            "assignment infeasible: {n} rows > {slots} column slots"
        )));
    }
    let mut col_of_slot = Vec::with_capacity(slots);
    for (j, &c) in capacity.iter().enumerate() {
        col_of_slot.extend(std::iter::repeat(j).take(c));
    }
    let mut wide = Array2::zeros((n, slots));
    for i in 0..n {
        for (s, &j) in col_of_slot.iter().enumerate() {
            wide[[i, s]] = cost[[i, j]];
        }
    }
    let (slot_assignment, total) = assign(&wide)?;
    Ok((slot_assignment.into_iter().map(|s| col_of_slot[s]).collect(), total))
}

/// Brute-force oracle: tries every injective row-to-column map.
/// Exponential; intended for tests on matrices up to 7x7.
pub fn assign_brute_force(cost: &Array2<f64>) -> Result<(Vec<usize>, f64)> {
    let (n, m) = cost.dim();
    if n > m {
        return Err(Error::Config("brute force requires rows <= cols".into()));
    }
    let mut best = f64::INFINITY;
    let mut best_map = vec![0usize; n];
    let mut current = vec![0usize; n];
    let mut used = vec![false; m];
    fn rec(
        cost: &Array2<f64>,
        i: usize,
        n: usize,
        m: usize,
        acc: f64,
        used: &mut [bool],
        current: &mut [usize],
        best: &mut f64,
        best_map: &mut [usize],
    ) {
        if i == n {
            if acc < *best {
                *best = acc;
                best_map.copy_from_slice(current);
            }
            return;
        }
        for j in 0..m {
            if !used[j] {
                used[j] = true;
                current[i] = j;
                rec(cost, i + 1, n, m, acc + cost[[i, j]], used, current, best, best_map);
                used[j] = false;
            }
        }
    }
    rec(cost, 0, n, m, 0.0, &mut used, &mut current, &mut best, &mut best_map);
    Ok((best_map, best))
}
