#![allow(clippy::needless_range_loop)]

use super::{ArithError, MultiPoly, RatFunc};

/// Result of [`solve_linear`]: every solution is
/// `particular + Σ t_i · null_basis[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution {
    pub particular: Vec<RatFunc>,
    pub null_basis: Vec<Vec<RatFunc>>,
    pub pivot_columns: Vec<usize>,
    /// Pivot entries that were inverted during elimination, in order. Any
    /// specialization of the parameters that zeroes one of them falls outside
    /// the generic solution.
    pub pivots: Vec<RatFunc>,
}

/// Gauss-Jordan elimination over the rational-function field. The pivot in
/// each column is the first nonzero entry at or below the current row.
pub fn solve_linear(matrix: &[Vec<RatFunc>], rhs: &[RatFunc]) -> Result<LinearSolution, ArithError> {
    let nrows = matrix.len();
    if nrows == 0 {
        return Err(ArithError::Dimension("empty matrix".into()));
    }
    if rhs.len() != nrows {
        return Err(ArithError::Dimension(format!("{} rows but {} right-hand entries", nrows, rhs.len())));
    }
    let ncols = matrix[0].len();
    if matrix.iter().any(|r| r.len() != ncols) {
        return Err(ArithError::Dimension("ragged matrix".into()));
    }
    let vars = matrix[0].first().map(|e| e.vars().clone()).unwrap_or_else(|| rhs[0].vars().clone());

    let mut a: Vec<Vec<RatFunc>> = matrix.to_vec();
    let mut b: Vec<RatFunc> = rhs.to_vec();
    let mut pivot_columns = Vec::new();
    let mut pivots = Vec::new();
    let mut row = 0;

    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(r) = (row..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(r, row);
        b.swap(r, row);
        let p = a[row][col].clone();
        let inv = p.inv()?;
        for j in col..ncols {
            if !a[row][j].is_zero() {
                a[row][j] = &a[row][j] * &inv;
            }
        }
        b[row] = &b[row] * &inv;
        for i in 0..nrows {
            if i == row || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in col..ncols {
                if !a[row][j].is_zero() {
                    let t = &f * &a[row][j];
                    a[i][j] = &a[i][j] - &t;
                }
            }
            if !b[row].is_zero() {
                let t = &f * &b[row];
                b[i] = &b[i] - &t;
            }
        }
        pivots.push(p);
        pivot_columns.push(col);
        row += 1;
    }

    if let Some(i) = (row..nrows).find(|&i| !b[i].is_zero()) {
        return Err(ArithError::Inconsistent { row: i, value: b[i].to_string() });
    }

    let mut particular = vec![RatFunc::zero(&vars); ncols];
    for (k, &c) in pivot_columns.iter().enumerate() {
        particular[c] = b[k].clone();
    }
    let mut null_basis = Vec::new();
    for f in (0..ncols).filter(|c| !pivot_columns.contains(c)) {
        let mut v = vec![RatFunc::zero(&vars); ncols];
        v[f] = RatFunc::one(&vars);
        for (k, &c) in pivot_columns.iter().enumerate() {
            v[c] = -&a[k][f];
        }
        null_basis.push(v);
    }
    Ok(LinearSolution { particular, null_basis, pivot_columns, pivots })
}

/// Null space of a polynomial matrix over the fraction field of its
/// coefficient ring, via fraction-free (Bareiss) elimination to row echelon
/// form followed by back substitution.
///
/// Returns one basis vector per free column `f` (with entry 1 at `f` and 0
/// at the other free columns) and the pivots used.
pub fn null_space_fraction_free(matrix: &[Vec<MultiPoly>]) -> Result<(Vec<Vec<RatFunc>>, Vec<MultiPoly>), ArithError> {
    let nrows = matrix.len();
    let ncols = matrix.first().map_or(0, Vec::len);
    if matrix.iter().any(|r| r.len() != ncols) {
        return Err(ArithError::Dimension("ragged matrix".into()));
    }
    let Some(vars) = matrix.first().and_then(|r| r.first()).map(|e| e.vars().clone()) else {
        return Err(ArithError::Dimension("empty matrix".into()));
    };
    let mut a: Vec<Vec<MultiPoly>> = matrix.to_vec();
    let mut prev = MultiPoly::one(&vars);
    let mut pivot_columns = Vec::new();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(r) = (row..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(r, row);
        let p = a[row][col].clone();
        for i in row + 1..nrows {
            let f = a[i][col].clone();
            for j in col..ncols {
                let t = &(&p * &a[i][j]) - &(&f * &a[row][j]);
                a[i][j] = if t.is_zero() { t } else { t.exact_div(&prev).expect("Bareiss division is exact") };
            }
        }
        prev = p.clone();
        pivots.push(p);
        pivot_columns.push(col);
        row += 1;
    }

    let mut basis = Vec::new();
    for f in (0..ncols).filter(|c| !pivot_columns.contains(c)) {
        let mut v = vec![RatFunc::zero(&vars); ncols];
        v[f] = RatFunc::one(&vars);
        for (k, &c) in pivot_columns.iter().enumerate().rev() {
            let mut acc = RatFunc::zero(&vars);
            for j in c + 1..ncols {
                if !a[k][j].is_zero() && !v[j].is_zero() {
                    acc = &acc + &(&RatFunc::from_poly(a[k][j].clone()) * &v[j]);
                }
            }
            v[c] = -acc.try_div(&RatFunc::from_poly(a[k][c].clone()))?;
        }
        basis.push(v);
    }
    Ok((basis, pivots))
}
