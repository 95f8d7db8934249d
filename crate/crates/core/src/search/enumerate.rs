//! Grid enumeration of channel kernels up to relabeling of the output.
//!
//! A kernel with `rows` input rows and `k` output symbols is a `rows x k`
//! matrix of numerators, each row summing to `grid`. Two kernels that differ
//! by a permutation of output symbols induce the same regions, and a kernel
//! with an unused output symbol is the same as one over a smaller alphabet.
//! We therefore visit only kernels whose columns are all nonzero and sorted in
//! nonincreasing lexicographic order (row 0 most significant), which picks
//! exactly one representative per class.

use std::ops::ControlFlow;

/// Visits every canonical kernel with exactly `k` used output symbols. The
/// slice passed to `f` is row-major, `rows x k`.
pub fn for_each_canonical<F>(rows: usize, k: usize, grid: u32, f: &mut F) -> ControlFlow<()>
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    for first in first_columns(rows, k, grid) {
        for_each_with_first(rows, k, grid, &first, f)?;
    }
    ControlFlow::Continue(())
}

/// Candidate first columns, in decreasing lexicographic order. Splitting the
/// enumeration on these gives independent units of work.
pub fn first_columns(rows: usize, k: usize, grid: u32) -> Vec<Vec<u32>> {
    if rows == 0 || k == 0 {
        return Vec::new();
    }
    let full = vec![grid; rows];
    if k == 1 {
        return vec![full];
    }
    let mut out = Vec::new();
    let mut col = vec![0u32; rows];
    collect_columns(&full, None, 0, &mut col, &mut out);
    out.retain(|c| {
        c[0] as usize * k >= grid as usize
            && c.iter().any(|&v| v > 0)
            && c.iter().zip(&full).any(|(&a, &b)| a < b)
    });
    out
}

fn collect_columns(
    rem: &[u32],
    bound: Option<&[u32]>,
    r: usize,
    col: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if r == rem.len() {
        out.push(col.clone());
        return;
    }
    let hi = match bound {
        Some(b) => rem[r].min(b[r]),
        None => rem[r],
    };
    for v in (0..=hi).rev() {
        col[r] = v;
        let still_tight = bound.filter(|b| v == b[r]);
        collect_columns(rem, still_tight, r + 1, col, out);
    }
}

/// Visits the canonical kernels whose first column is `first`.
pub fn for_each_with_first<F>(
    rows: usize,
    k: usize,
    grid: u32,
    first: &[u32],
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    let mut gen = Generator {
        rows,
        k,
        rem: vec![grid; rows],
        cols: vec![0; rows * k],
        out: vec![0; rows * k],
        f,
    };
    if !gen.take(0, first) {
        return ControlFlow::Continue(());
    }
    let flow = gen.level(1);
    gen.give_back(first);
    flow
}

struct Generator<'a, F> {
    rows: usize,
    k: usize,
    rem: Vec<u32>,
    /// Column-major: column `j` occupies `cols[j * rows..(j + 1) * rows]`.
    cols: Vec<u32>,
    out: Vec<u32>,
    f: &'a mut F,
}

impl<F> Generator<'_, F>
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    /// Places `col` at position `j` if it fits the remaining row mass.
    fn take(&mut self, j: usize, col: &[u32]) -> bool {
        if col.iter().zip(&self.rem).any(|(c, r)| c > r) || col.iter().all(|&c| c == 0) {
            return false;
        }
        for r in 0..self.rows {
            self.rem[r] -= col[r];
            self.cols[j * self.rows + r] = col[r];
        }
        true
    }

    fn give_back(&mut self, col: &[u32]) {
        for r in 0..self.rows {
            self.rem[r] += col[r];
        }
    }

    fn level(&mut self, j: usize) -> ControlFlow<()> {
        let rows = self.rows;
        if j == self.k {
            if self.rem.iter().any(|&r| r > 0) {
                return ControlFlow::Continue(());
            }
            for r in 0..rows {
                for c in 0..self.k {
                    self.out[r * self.k + c] = self.cols[c * rows + r];
                }
            }
            return (self.f)(&self.out);
        }
        if self.rem.iter().all(|&r| r == 0) {
            return ControlFlow::Continue(());
        }
        if j == self.k - 1 {
            // The last column is forced; it must not exceed its predecessor.
            let prev = &self.cols[(j - 1) * rows..j * rows];
            if !lex_le(&self.rem, prev) {
                return ControlFlow::Continue(());
            }
            for r in 0..rows {
                self.cols[j * rows + r] = self.rem[r];
                self.rem[r] = 0;
            }
            let flow = self.level(j + 1);
            for r in 0..rows {
                self.rem[r] = self.cols[j * rows + r];
            }
            return flow;
        }
        self.column(j, 0, true)
    }

    fn column(&mut self, j: usize, r: usize, tight: bool) -> ControlFlow<()> {
        let rows = self.rows;
        if r == rows {
            let col = j * rows..(j + 1) * rows;
            if self.cols[col.clone()].iter().all(|&c| c == 0) {
                return ControlFlow::Continue(());
            }
            let mut left = false;
            for i in 0..rows {
                self.rem[i] -= self.cols[col.start + i];
                left |= self.rem[i] > 0;
            }
            let flow = if left { self.level(j + 1) } else { ControlFlow::Continue(()) };
            for i in 0..rows {
                self.rem[i] += self.cols[col.start + i];
            }
            return flow;
        }
        let prev = self.cols[(j - 1) * rows + r];
        let hi = if tight { self.rem[r].min(prev) } else { self.rem[r] };
        // Later columns are lexicographically smaller, so none of them takes
        // more than this column from row 0; the rest of row 0 must fit.
        let lo = if r == 0 { self.rem[0].div_ceil((self.k - j) as u32) } else { 0 };
        for v in (lo..=hi).rev() {
            self.cols[j * rows + r] = v;
            self.column(j, r + 1, tight && v == prev)?;
        }
        self.cols[j * rows + r] = 0;
        ControlFlow::Continue(())
    }
}

fn lex_le(a: &[u32], b: &[u32]) -> bool {
    a.iter().cmp(b.iter()) != std::cmp::Ordering::Greater
}

/// Number of canonical kernels with exactly `k` used symbols.
pub fn count_canonical(rows: usize, k: usize, grid: u32) -> u64 {
    let mut n = 0u64;
    let _ = for_each_canonical(rows, k, grid, &mut |_| {
        n += 1;
        ControlFlow::Continue(())
    });
    n
}

/// Upper estimate of the number of canonical kernels with at most `cap`
/// symbols: `sum_k C(grid + k - 1, k - 1)^rows / k!`.
pub fn estimate(rows: usize, cap: usize, grid: u32) -> f64 {
    let mut total = 0.0;
    let mut fact = 1.0;
    for k in 1..=cap {
        fact *= k as f64;
        let comps = binomial(grid as u64 + k as u64 - 1, k as u64 - 1);
        total += comps.powi(rows as i32) / fact;
    }
    total
}

fn binomial(n: u64, r: u64) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
