//! Maximum-weight one-to-one assignment over a non-negative count matrix.
//!
//! The solver is the O(r²c) potentials form of the Hungarian method, run on
//! the orientation with fewer rows so rectangular inputs need no padding.
//! [`brute_force_assignment_total`] enumerates every injective matching and
//! exists to cross-check the solver.

use thiserror::Error;

/// Largest min(rows, cols) the exhaustive oracle will enumerate.
pub const BRUTE_FORCE_MAX_DIM: usize = 9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssignmentError {
    #[error(
        "brute-force enumeration limited to min dimension {BRUTE_FORCE_MAX_DIM}, got {rows}x{cols}"
    )]
    BudgetExceeded { rows: usize, cols: usize },
}

/// Dense row-major matrix of non-negative weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl WeightMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u64>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "weight matrix data does not match {rows}x{cols}"
        );
        WeightMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        WeightMatrix::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn transpose(&self) -> WeightMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        WeightMatrix::new(self.cols, self.rows, data)
    }

    pub fn max_entry(&self) -> u64 {
        self.data.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentResult {
    /// Sum of the selected entries.
    pub total: u64,
    /// (row, column) pairs of one optimal matching. Pairs with zero weight
    /// are omitted since selecting them contributes nothing.
    pub matched_pairs: Vec<(usize, usize)>,
}

/// Maximum total picking at most one entry per row and per column.
pub fn max_assignment_total(weights: &WeightMatrix) -> AssignmentResult {
    if weights.is_empty() {
        return AssignmentResult {
            total: 0,
            matched_pairs: Vec::new(),
        };
    }
    let transposed = weights.rows > weights.cols;
    let oriented = if transposed {
        weights.transpose()
    } else {
        weights.clone()
    };

    let row_to_col = hungarian_max(&oriented);
    let mut matched_pairs: Vec<(usize, usize)> = row_to_col
        .into_iter()
        .enumerate()
        .filter(|&(r, c)| oriented.get(r, c) > 0)
        .map(|(r, c)| if transposed { (c, r) } else { (r, c) })
        .collect();
    matched_pairs.sort_unstable();
    let total = matched_pairs.iter().map(|&(r, c)| weights.get(r, c)).sum();
    AssignmentResult {
        total,
        matched_pairs,
    }
}

/// Assigns every row of a rows <= cols matrix to a distinct column so the
/// weight sum is maximal. Returns the column chosen for each row.
fn hungarian_max(w: &WeightMatrix) -> Vec<usize> {
    let (n, m) = (w.rows, w.cols);
    debug_assert!(n <= m);
    // minimise (max - w) instead of maximising w; all costs stay >= 0
    let max = w.max_entry() as i64;
    let cost = |r: usize, c: usize| max - w.get(r, c) as i64;

    let inf = i64::MAX / 4;
    // 1-based with column 0 as the virtual start, as in the classic layout
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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
        if owner[j] > 0 {
            row_to_col[owner[j] - 1] = j - 1;
        }
    }
    row_to_col
}

/// Exhaustive maximum over all injective matchings of the smaller side into
/// the larger one. Cost grows as P(max, min); limited to
/// min(rows, cols) <= [`BRUTE_FORCE_MAX_DIM`].
pub fn brute_force_assignment_total(weights: &WeightMatrix) -> Result<u64, AssignmentError> {
    let (rows, cols) = (weights.rows, weights.cols);
    if rows.min(cols) > BRUTE_FORCE_MAX_DIM {
        return Err(AssignmentError::BudgetExceeded { rows, cols });
    }
    if weights.is_empty() {
        return Ok(0);
    }
    let oriented = if rows > cols {
        weights.transpose()
    } else {
        weights.clone()
    };

    fn recurse(w: &WeightMatrix, row: usize, used: &mut [bool], acc: u64, best: &mut u64) {
        if row == w.rows {
            *best = (*best).max(acc);
            return;
        }
        for c in 0..w.cols {
            if !used[c] {
                used[c] = true;
                recurse(w, row + 1, used, acc + w.get(row, c), best);
                used[c] = false;
            }
        }
    }

    let mut used = vec![false; oriented.cols];
    let mut best = 0;
    recurse(&oriented, 0, &mut used, 0, &mut best);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[u64]]) -> WeightMatrix {
        WeightMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn check_witness(w: &WeightMatrix, res: &AssignmentResult) {
        let mut rows: Vec<_> = res.matched_pairs.iter().map(|p| p.0).collect();
        let mut cols: Vec<_> = res.matched_pairs.iter().map(|p| p.1).collect();
        rows.sort_unstable();
        cols.sort_unstable();
        rows.dedup();
        cols.dedup();
        assert_eq!(rows.len(), res.matched_pairs.len(), "row reused");
        assert_eq!(cols.len(), res.matched_pairs.len(), "column reused");
        let sum: u64 = res.matched_pairs.iter().map(|&(r, c)| w.get(r, c)).sum();
        assert_eq!(sum, res.total);
    }

    #[test]
    fn small_examples() {
        // brute force: max(1+1, 1+0) = 2
        let w = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(brute_force_assignment_total(&w).unwrap(), 2);
        assert_eq!(max_assignment_total(&w).total, 2);

        // brute force: 5+4 = 9 beats 2+3 = 5
        let w = m(&[&[5, 2], &[3, 4]]);
        assert_eq!(brute_force_assignment_total(&w).unwrap(), 9);
        let res = max_assignment_total(&w);
        assert_eq!(res.total, 9);
        assert_eq!(res.matched_pairs, vec![(0, 0), (1, 1)]);

        assert_eq!(max_assignment_total(&m(&[&[7]])).total, 7);
    }

    #[test]
    fn empty_matrices() {
        for w in [
            WeightMatrix::new(0, 0, vec![]),
            WeightMatrix::new(0, 3, vec![]),
            WeightMatrix::new(4, 0, vec![]),
        ] {
            assert_eq!(max_assignment_total(&w).total, 0);
            assert!(max_assignment_total(&w).matched_pairs.is_empty());
            assert_eq!(brute_force_assignment_total(&w).unwrap(), 0);
        }
    }

    #[test]
    fn diagonal_and_row_vector() {
        let w = m(&[&[4, 0, 0], &[0, 5, 0], &[0, 0, 6]]);
        assert_eq!(brute_force_assignment_total(&w).unwrap(), 15);
        assert_eq!(max_assignment_total(&w).total, 15);

        let row = m(&[&[3, 9, 2, 9, 1]]);
        assert_eq!(brute_force_assignment_total(&row).unwrap(), 9);
        assert_eq!(max_assignment_total(&row).total, 9);
        assert_eq!(max_assignment_total(&row.transpose()).total, 9);
    }

    #[test]
    fn rectangular_tall() {
        let w = m(&[&[1, 8], &[7, 9], &[6, 0]]);
        // 8 + 7 = 15 vs 9 + 6 = 15 vs 1 + 9 = 10
        assert_eq!(brute_force_assignment_total(&w).unwrap(), 15);
        let res = max_assignment_total(&w);
        assert_eq!(res.total, 15);
        check_witness(&w, &res);
    }

    #[test]
    fn greedy_is_not_enough() {
        // taking the global max 10 first leaves only the 0; optimum is 9+9
        let w = m(&[&[10, 9], &[9, 0]]);
        assert_eq!(brute_force_assignment_total(&w).unwrap(), 18);
        assert_eq!(max_assignment_total(&w).total, 18);
    }

    #[test]
    fn zero_weight_pairs_omitted() {
        let w = m(&[&[0, 0], &[0, 3]]);
        let res = max_assignment_total(&w);
        assert_eq!(res.total, 3);
        assert_eq!(res.matched_pairs, vec![(1, 1)]);
    }

    #[test]
    fn brute_force_budget() {
        let w = WeightMatrix::new(10, 10, vec![1; 100]);
        assert_eq!(
            brute_force_assignment_total(&w),
            Err(AssignmentError::BudgetExceeded { rows: 10, cols: 10 })
        );
        // wide but shallow is within budget
        let w = WeightMatrix::new(2, 40, (0..80).collect());
        assert_eq!(brute_force_assignment_total(&w).unwrap(), 39 + 78);
    }

    #[test]
    fn large_counts_do_not_overflow() {
        let big = 2560 * 1920;
        let w = m(&[&[big, big - 1], &[big - 1, 0]]);
        assert_eq!(max_assignment_total(&w).total, 2 * (big - 1));
    }

    fn matrix_strategy(max_dim: usize, max_entry: u64) -> impl Strategy<Value = WeightMatrix> {
        (0..=max_dim, 0..=max_dim).prop_flat_map(move |(r, c)| {
            prop::collection::vec(0..=max_entry, r * c)
                .prop_map(move |d| WeightMatrix::new(r, c, d))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn matches_brute_force(w in matrix_strategy(6, 50)) {
            let res = max_assignment_total(&w);
            prop_assert_eq!(res.total, brute_force_assignment_total(&w).unwrap());
            check_witness(&w, &res);
        }

        #[test]
        fn transpose_invariant(w in matrix_strategy(7, 1000)) {
            prop_assert_eq!(max_assignment_total(&w).total, max_assignment_total(&w.transpose()).total);
        }

        #[test]
        fn bounds(w in matrix_strategy(7, 1000)) {
            let total = max_assignment_total(&w).total;
            prop_assert!(total <= w.data().iter().sum::<u64>());
            prop_assert!(total >= w.max_entry());
        }

        #[test]
        fn monotone_in_each_entry(w in matrix_strategy(6, 100), pick in any::<prop::sample::Index>(), bump in 1u64..100) {
            prop_assume!(!w.is_empty());
            let before = max_assignment_total(&w).total;
            let i = pick.index(w.rows() * w.cols());
            let mut raised = w.clone();
            raised.set(i / w.cols(), i % w.cols(), w.get(i / w.cols(), i % w.cols()) + bump);
            prop_assert!(max_assignment_total(&raised).total >= before);
        }

        #[test]
        fn permutation_invariant(w in matrix_strategy(6, 100), seed in any::<u64>()) {
            prop_assume!(!w.is_empty());
            let rotate = |len: usize, k: u64| -> Vec<usize> { (0..len).map(|i| (i + k as usize) % len).collect() };
            let rp = rotate(w.rows(), seed);
            let cp: Vec<usize> = rotate(w.cols(), seed / 7).into_iter().rev().collect();
            let mut permuted = WeightMatrix::new(w.rows(), w.cols(), vec![0; w.rows() * w.cols()]);
            for (r, &pr) in rp.iter().enumerate() {
                for (c, &pc) in cp.iter().enumerate() {
                    permuted.set(pr, pc, w.get(r, c));
                }
            }
            prop_assert_eq!(max_assignment_total(&permuted).total, max_assignment_total(&w).total);
        }
    }
}
