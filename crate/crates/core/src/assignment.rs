//! Minimum-cost bipartite assignment.
//!
//! [`solve_min_cost`] runs a shortest-augmenting-path Hungarian solver with
//! dual potentials, then walks the equality subgraph of the optimal duals to
//! pick the lexicographically smallest optimal pairing. [`brute_force_min_cost`]
//! enumerates every injection and exists to check the solver.

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};

/// Largest side accepted by [`brute_force_min_cost`].
pub const BRUTE_FORCE_LIMIT: usize = 9;

/// Dense row-major matrix of finite, non-negative costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(EvalError::CostShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(idx) = data.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(EvalError::InvalidCost {
                row: idx / cols,
                col: idx % cols,
                value: data[idx],
            });
        }
        Ok(CostMatrix { rows, cols, data })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CostMatrix::new(rows, cols, data)
    }

    pub fn try_from_fn<E>(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> std::result::Result<f64, E>,
    ) -> std::result::Result<Self, E>
    where
        E: From<EvalError>,
    {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c)?);
            }
        }
        Ok(CostMatrix::new(rows, cols, data)?)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(EvalError::CostShape {
                    rows: rows.len(),
                    cols,
                    len: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        CostMatrix::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn transpose(&self) -> CostMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        CostMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Sum of the costs of `pairs`, in the order given.
    pub fn cost_of(&self, pairs: &[(usize, usize)]) -> f64 {
        pairs.iter().map(|&(r, c)| self.get(r, c)).sum()
    }
}

/// A set of `(row, col)` pairs, sorted by row, and its total cost.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Assignment {
    pub pairs: Vec<(usize, usize)>,
    pub total_cost: f64,
}

impl Assignment {
    fn from_pairs(matrix: &CostMatrix, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        let total_cost = matrix.cost_of(&pairs);
        Assignment { pairs, total_cost }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Column assigned to `row`, if any.
    pub fn col_for(&self, row: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&row, |&(r, _)| r)
            .ok()
            .map(|i| self.pairs[i].1)
    }
}

/// Optimal assignment covering every row or every column, whichever side is smaller.
///
/// Among optimal pairings the one whose column sequence (taken over the
/// smaller side, in index order) is lexicographically smallest is returned.
pub fn solve_min_cost(matrix: &CostMatrix) -> Assignment {
    if matrix.rows == 0 || matrix.cols == 0 {
        return Assignment::default();
    }
    let transposed = matrix.rows > matrix.cols;
    let work = if transposed {
        matrix.transpose()
    } else {
        matrix.clone()
    };
    let duals = hungarian(&work);
    let row_to_col = lexicographic_optimum(&work, duals);
    let pairs = row_to_col
        .into_iter()
        .enumerate()
        .map(|(r, c)| if transposed { (c, r) } else { (r, c) })
        .collect();
    Assignment::from_pairs(matrix, pairs)
}

struct Duals {
    row_to_col: Vec<usize>,
    u: Vec<f64>,
    v: Vec<f64>,
}

/// Shortest augmenting path solver for `rows <= cols`.
fn hungarian(c: &CostMatrix) -> Duals {
    let (n, m) = (c.rows, c.cols);
    debug_assert!(n <= m);
    // 1-based with index 0 as the virtual source column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![0.0; m + 1];
    let mut used = vec![false; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = c.get(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=m {
        if owner[j] != 0 {
            row_to_col[owner[j] - 1] = j - 1;
        }
    }
    Duals {
        row_to_col,
        u: u[1..].to_vec(),
        v: v[1..].to_vec(),
    }
}

/// Rewrites an optimal matching into the lexicographically smallest optimal one.
///
/// The problem is squared up with zero-cost dummy rows (dual 0). Optimal
/// matchings are then exactly the perfect matchings of the tight-edge graph;
/// rows are fixed in order, each to its smallest column that still admits a
/// perfect matching of the unfixed rows.
fn lexicographic_optimum(c: &CostMatrix, duals: Duals) -> Vec<usize> {
    let (n, m) = (c.rows, c.cols);
    let tol = 1e-11 * (1.0 + c.max_entry()) * m as f64;
    let Duals {
        mut row_to_col,
        u,
        v,
    } = duals;

    // Tight columns per row; rows n..m are dummies.
    let adjacency: Vec<Vec<usize>> = (0..m)
        .map(|r| {
            (0..m)
                .filter(|&j| {
                    let reduced = if r < n {
                        c.get(r, j) - u[r] - v[j]
                    } else {
                        -v[j]
                    };
                    reduced <= tol
                })
                .collect()
        })
        .collect();

    let mut owner = vec![usize::MAX; m];
    for (r, &j) in row_to_col.iter().enumerate() {
        owner[j] = r;
    }
    let mut next_dummy = n;
    for slot in owner.iter_mut() {
        if *slot == usize::MAX {
            *slot = next_dummy;
            next_dummy += 1;
        }
    }
    let mut match_of = vec![0usize; m];
    for (j, &r) in owner.iter().enumerate() {
        match_of[r] = j;
    }

    let mut parent = vec![None::<(usize, usize)>; m];
    let mut queue = Vec::with_capacity(m);
    for i in 0..n {
        let current = match_of[i];
        for &cand in &adjacency[i] {
            if cand >= current {
                break;
            }
            let start = owner[cand];
            if start < i {
                continue;
            }
            // Search an alternating path from `start` to the column `i` frees.
            parent.fill(None);
            queue.clear();
            queue.push(start);
            parent[start] = Some((usize::MAX, usize::MAX));
            let mut found = None;
            let mut head = 0;
            'bfs: while head < queue.len() {
                let x = queue[head];
                head += 1;
                for &j in &adjacency[x] {
                    if j == cand || j == match_of[x] {
                        continue;
                    }
                    if j == current {
                        found = Some(x);
                        break 'bfs;
                    }
                    let y = owner[j];
                    if y > i && parent[y].is_none() {
                        parent[y] = Some((x, j));
                        queue.push(y);
                    }
                }
            }
            if let Some(last) = found {
                let mut row = last;
                let mut col = current;
                loop {
                    let old = match_of[row];
                    match_of[row] = col;
                    owner[col] = row;
                    if row == start {
                        break;
                    }
                    let (prev, _) = parent[row].expect("path rows have parents");
                    col = old;
                    row = prev;
                }
                match_of[i] = cand;
                owner[cand] = i;
                break;
            }
        }
    }
    row_to_col.copy_from_slice(&match_of[..n]);
    row_to_col
}

/// Exhaustive minimum over all injections of the smaller side into the larger.
///
/// Ties are resolved the same way as [`solve_min_cost`].
pub fn brute_force_min_cost(matrix: &CostMatrix) -> Result<Assignment> {
    let (rows, cols) = (matrix.rows, matrix.cols);
    if rows.max(cols) > BRUTE_FORCE_LIMIT {
        return Err(EvalError::BruteForceTooLarge {
            rows,
            cols,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if rows == 0 || cols == 0 {
        return Ok(Assignment::default());
    }
    let transposed = rows > cols;
    let work = if transposed {
        matrix.transpose()
    } else {
        matrix.clone()
    };

    struct Search<'a> {
        work: &'a CostMatrix,
        current: Vec<usize>,
        used: Vec<bool>,
        best: Option<(f64, Vec<usize>)>,
    }

    impl Search<'_> {
        fn visit(&mut self, row: usize) {
            if row == self.work.rows {
                let cost: f64 = self
                    .current
                    .iter()
                    .enumerate()
                    .map(|(r, &c)| self.work.get(r, c))
                    .sum();
                if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                    self.best = Some((cost, self.current.clone()));
                }
                return;
            }
            for col in 0..self.work.cols {
                if self.used[col] {
                    continue;
                }
                self.used[col] = true;
                self.current.push(col);
                self.visit(row + 1);
                self.current.pop();
                self.used[col] = false;
            }
        }
    }

    let mut search = Search {
        work: &work,
        current: Vec::with_capacity(work.rows),
        used: vec![false; work.cols],
        best: None,
    };
    search.visit(0);
    let (_, best) = search.best.expect("non-empty matrix has an injection");
    let pairs = best
        .into_iter()
        .enumerate()
        .map(|(r, c)| if transposed { (c, r) } else { (r, c) })
        .collect();
    Ok(Assignment::from_pairs(matrix, pairs))
}
