//! Phase-one simplex for linear feasibility: find `x >= 0` with `A x = b`.
//!
//! Dense tableau with Bland's rule; sized for the small systems arising from
//! coarsening-parameter constraints (tens of rows and columns).

const EPS: f64 = 1e-10;

/// Returns a feasible `x >= 0` with `A x = b` (within `EPS`-scale tolerance),
/// or `None` when the system is infeasible.
pub(crate) fn feasible_point(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let m = a.len();
    if m == 0 {
        return Some(Vec::new());
    }
    let n = a[0].len();

    // Tableau columns: n structural + m artificial + 1 rhs.
    // Rows are flipped so every rhs is nonnegative.
    let cols = n + m + 1;
    let mut t = vec![vec![0.0; cols]; m];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][cols - 1] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Objective: minimize the sum of artificials. Reduced costs start as the
    // negated column sums of the constraint rows.
    let mut obj = vec![0.0; cols];
    for i in 0..m {
        for j in 0..cols {
            obj[j] -= t[i][j];
        }
    }

    loop {
        // Bland: entering column = lowest index with negative reduced cost,
        // artificials excluded once they leave the basis.
        let mut enter = None;
        for j in 0..n + m {
            if obj[j] < -EPS {
                enter = Some(j);
                break;
            }
        }
        let Some(enter) = enter else { break };

        // Ratio test, Bland tie-break on basis index.
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > EPS {
                let ratio = t[i][cols - 1] / t[i][enter];
                if ratio < best - EPS
                    || (ratio < best + EPS && leave.map(|l| basis[i] < basis[l]).unwrap_or(false))
                {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            // Unbounded phase-one objective cannot happen (bounded below by 0).
            return None;
        };

        // Pivot.
        let pivot = t[leave][enter];
        for j in 0..cols {
            t[leave][j] /= pivot;
        }
        for i in 0..m {
            if i != leave {
                let f = t[i][enter];
                if f != 0.0 {
                    for j in 0..cols {
                        t[i][j] -= f * t[leave][j];
                    }
                }
            }
        }
        let f = obj[enter];
        if f != 0.0 {
            for j in 0..cols {
                obj[j] -= f * t[leave][j];
            }
        }
        basis[leave] = enter;
    }

    // Feasible iff the artificial total is (numerically) zero.
    let artificial_total: f64 = (0..m)
        .filter(|&i| basis[i] >= n)
        .map(|i| t[i][cols - 1])
        .sum();
    if artificial_total.abs() > 1e-7 {
        return None;
    }

    let mut x = vec![0.0; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][cols - 1].max(0.0);
        }
    }
    Some(x)
}
