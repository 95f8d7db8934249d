//! Allocation-free evaluation of the single-auxiliary regions.
//!
//! With `p(w,x,y,u,v) = p(w|x,y) Q(x,y,u,v)` every term the regions need is a
//! difference of entropies of small marginals `(W, X)`, `(W, U)`,
//! `(W, X, U)`, and so on, plus `K = sum_xy Q(x,y) H(W | X=x, Y=y)`:
//!
//! - `I(X,Y;W) = H(W) - K`
//! - `I(X,Y;W|U) = H(W,U) - H(U) - K`
//! - `H(X|W,U) = H(W,X,U) - H(W,U)`
//!
//! so one pass over the kernel rows accumulates all of them.
//!
//! Every marginal above keeps `W`, so each entropy, and `K` too, is a sum over
//! output symbols of a function of that symbol's kernel column. On a grid the
//! columns take few values, and [`WEval::eval_grid`] reads the per-column
//! contributions from a table when it is small enough.

use std::sync::OnceLock;

use crate::measures::{JointPmf, MeasureError, Var};
use crate::regions::{Constraint, Face, HalfspaceRegion, RateTriple};

use super::BoundFamily;

/// One support row `(x, y)` and the side-information masses attached to it.
#[derive(Debug, Clone)]
struct Row {
    x: usize,
    y: usize,
    q: f64,
    /// `Q(x, y, u)` over `u`.
    qu: Vec<f64>,
    /// `Q(x, y, v)` over `v`.
    qv: Vec<f64>,
}

/// Every entropy-derived term of the single-auxiliary regions for one kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Terms {
    pub i_xy_w: f64,
    pub h_x_w: f64,
    pub h_y_w: f64,
    pub i_xy_w_u: f64,
    pub i_xy_w_v: f64,
    pub h_x_wu: f64,
    pub h_y_wv: f64,
}

impl Terms {
    /// `(R0, R0+R1, R0+R2)` bounds of the outer shape, clamped like
    /// [`HalfspaceRegion::new`] clamps them.
    fn outer_bounds(&self) -> [f64; 3] {
        let m = self.i_xy_w_u.max(self.i_xy_w_v);
        [m.max(0.0), (m + self.h_x_wu).max(0.0), (m + self.h_y_wv).max(0.0)]
    }

    fn corner(&self, family: BoundFamily) -> [f64; 3] {
        let c = match family {
            BoundFamily::Gw => [self.i_xy_w, self.h_x_w, self.h_y_w],
            _ => [self.i_xy_w_u.max(self.i_xy_w_v), self.h_x_wu, self.h_y_wv],
        };
        c.map(|x| x.max(0.0))
    }

    /// Minimum of `w . R` over the region, without building it. The outer
    /// shape's cost `l0 R0 + l1 (a - R0)+ + l2 (b - R0)+` is convex and
    /// piecewise linear in `R0 >= m`, so a breakpoint attains it.
    pub fn weighted_min(&self, family: BoundFamily, w: [f64; 3]) -> f64 {
        match family {
            BoundFamily::Outer => {
                let [m, a, b] = self.outer_bounds();
                [m, a.max(m), b.max(m)]
                    .into_iter()
                    .map(|r0| w[0] * r0 + w[1] * (a - r0).max(0.0) + w[2] * (b - r0).max(0.0))
                    .fold(f64::INFINITY, f64::min)
            }
            _ => {
                let c = self.corner(family);
                w[0] * c[0] + w[1] * c[1] + w[2] * c[2]
            }
        }
    }

    /// Smallest constraint slack of `t`, as [`HalfspaceRegion::min_slack`].
    pub fn min_slack(&self, family: BoundFamily, t: &RateTriple) -> f64 {
        match family {
            BoundFamily::Outer => {
                let [m, a, b] = self.outer_bounds();
                (t.r0 - m).min(t.r0 + t.r1 - a).min(t.r0 + t.r2 - b)
            }
            _ => {
                let c = self.corner(family);
                (t.r0 - c[0]).min(t.r1 - c[1]).min(t.r2 - c[2])
            }
        }
    }

    pub fn region(&self, family: BoundFamily) -> HalfspaceRegion {
        let m = self.i_xy_w_u.max(self.i_xy_w_v);
        match family {
            BoundFamily::Gw => HalfspaceRegion::corner(RateTriple::new(self.i_xy_w, self.h_x_w, self.h_y_w)),
            BoundFamily::Inner => HalfspaceRegion::corner(RateTriple::new(m, self.h_x_wu, self.h_y_wv))
                .with_operands([self.i_xy_w_u, self.i_xy_w_v]),
            BoundFamily::Outer => HalfspaceRegion::new([
                Constraint { face: Face::R0, bound: m },
                Constraint { face: Face::R0R1, bound: m + self.h_x_wu },
                Constraint { face: Face::R0R2, bound: m + self.h_y_wv },
            ])
            .with_operands([self.i_xy_w_u, self.i_xy_w_v]),
            BoundFamily::Star | BoundFamily::StarStar => panic!("{family} has two auxiliaries"),
        }
    }
}

/// Largest per-column table `(grid + 1)^rows` built by [`WEval::eval_grid`].
const COLUMN_TABLE_MAX: usize = 1 << 18;

/// Contributions of one kernel column: `H(W)`, `H(W,X)`, `H(W,Y)`, `H(W,U)`,
/// `H(W,X,U)`, `H(W,V)`, `H(W,Y,V)` and `K`.
type ColumnTerms = [f64; 8];

#[derive(Debug, Clone)]
pub struct WEval {
    rows: Vec<Row>,
    /// `(grid, table)`; `None` when the table would be too large.
    columns: OnceLock<Option<(u32, Vec<ColumnTerms>)>>,
    nx: usize,
    ny: usize,
    nu: usize,
    nv: usize,
    h_u: f64,
    h_v: f64,
}

/// Reusable accumulators, sized for the largest `|W|` in use.
#[derive(Debug, Clone, Default)]
pub struct Scratch {
    w: Vec<f64>,
    wx: Vec<f64>,
    wy: Vec<f64>,
    wu: Vec<f64>,
    wv: Vec<f64>,
    wxu: Vec<f64>,
    wyv: Vec<f64>,
    /// `-(n/grid) log2(n/grid)` for `n = 0..=grid`.
    row_terms: Vec<f64>,
    grid: u32,
}

fn plogp_sum(v: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in v {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

fn reset(v: &mut Vec<f64>, len: usize) {
    v.clear();
    v.resize(len, 0.0);
}

impl WEval {
    /// `source` is over `(X, Y, U, V)`; `support` lists the flat `(x, y)`
    /// indices the kernel rows correspond to, in order.
    pub fn new(source: &JointPmf, support: &[usize]) -> Result<WEval, MeasureError> {
        use Var::*;
        let sizes = source.sizes();
        let (nx, ny, nu, nv) = (sizes[0], sizes[1], sizes[2], sizes[3]);
        let mut rows = Vec::with_capacity(support.len());
        for &r in support {
            let (x, y) = (r / ny, r % ny);
            let mut qu = vec![0.0; nu];
            let mut qv = vec![0.0; nv];
            for u in 0..nu {
                for v in 0..nv {
                    let p = source.get(&[x, y, u, v]);
                    qu[u] += p;
                    qv[v] += p;
                }
            }
            rows.push(Row { x, y, q: qu.iter().sum(), qu, qv });
        }
        let h_u = crate::measures::entropy(source, &[U])?;
        let h_v = crate::measures::entropy(source, &[V])?;
        Ok(WEval { rows, columns: OnceLock::new(), nx, ny, nu, nv, h_u, h_v })
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    /// Terms for the kernel whose row `i` is `num[i*k..(i+1)*k] / grid`.
    pub fn eval_grid(&self, num: &[u32], k: usize, grid: u32, s: &mut Scratch) -> Terms {
        if let Some((g, table)) = self.columns.get_or_init(|| self.column_table(grid)) {
            if *g == grid {
                let base = grid as usize + 1;
                let mut acc = [0.0; 8];
                for w in 0..k {
                    let idx = (0..self.rows.len()).rev().fold(0, |i, r| i * base + num[r * k + w] as usize);
                    for (a, t) in acc.iter_mut().zip(&table[idx]) {
                        *a += t;
                    }
                }
                let [h_w, h_wx, h_wy, h_wu, h_wxu, h_wv, h_wyv, cond] = acc;
                return self.terms([h_w, h_wx, h_wy, h_wu, h_wxu, h_wv, h_wyv], cond);
            }
        }
        if s.grid != grid || s.row_terms.is_empty() {
            let g = grid as f64;
            s.row_terms = (0..=grid).map(|n| plogp_sum(&[n as f64 / g])).collect();
            s.grid = grid;
        }
        let g = grid as f64;
        let table = std::mem::take(&mut s.row_terms);
        let t = self.eval_with(k, s, |i, w| num[i * k + w] as f64 / g, |i, w| table[num[i * k + w] as usize]);
        s.row_terms = table;
        t
    }

    fn column_table(&self, grid: u32) -> Option<(u32, Vec<ColumnTerms>)> {
        let base = grid as usize + 1;
        let len = (0..self.rows.len()).try_fold(1usize, |n, _| n.checked_mul(base))?;
        if len > COLUMN_TABLE_MAX {
            return None;
        }
        let mut col = vec![0u32; self.rows.len()];
        let table = (0..len)
            .map(|mut idx| {
                for c in col.iter_mut() {
                    *c = (idx % base) as u32;
                    idx /= base;
                }
                self.column_terms(&col, grid)
            })
            .collect();
        Some((grid, table))
    }

    fn column_terms(&self, col: &[u32], grid: u32) -> ColumnTerms {
        let (nx, ny, nu, nv) = (self.nx, self.ny, self.nu, self.nv);
        let (mut wx, mut wy) = (vec![0.0; nx], vec![0.0; ny]);
        let (mut wu, mut wxu) = (vec![0.0; nu], vec![0.0; nx * nu]);
        let (mut wv, mut wyv) = (vec![0.0; nv], vec![0.0; ny * nv]);
        let (mut w, mut cond) = (0.0, 0.0);
        for (row, &c) in self.rows.iter().zip(col) {
            if c == 0 {
                continue;
            }
            let p = c as f64 / grid as f64;
            let m = p * row.q;
            w += m;
            wx[row.x] += m;
            wy[row.y] += m;
            for (u, &qu) in row.qu.iter().enumerate() {
                wu[u] += p * qu;
                wxu[row.x * nu + u] += p * qu;
            }
            for (v, &qv) in row.qv.iter().enumerate() {
                wv[v] += p * qv;
                wyv[row.y * nv + v] += p * qv;
            }
            cond += row.q * plogp_sum(&[p]);
        }
        [
            plogp_sum(&[w]),
            plogp_sum(&wx),
            plogp_sum(&wy),
            plogp_sum(&wu),
            plogp_sum(&wxu),
            plogp_sum(&wv),
            plogp_sum(&wyv),
            cond,
        ]
    }

    fn terms(&self, h: [f64; 7], cond: f64) -> Terms {
        let [h_w, h_wx, h_wy, h_wu, h_wxu, h_wv, h_wyv] = h;
        Terms {
            i_xy_w: h_w - cond,
            h_x_w: h_wx - h_w,
            h_y_w: h_wy - h_w,
            i_xy_w_u: h_wu - self.h_u - cond,
            i_xy_w_v: h_wv - self.h_v - cond,
            h_x_wu: h_wxu - h_wu,
            h_y_wv: h_wyv - h_wv,
        }
    }

    /// Terms for a row-major `rows x k` kernel.
    pub fn eval(&self, kernel: &[f64], k: usize, s: &mut Scratch) -> Terms {
        self.eval_with(k, s, |i, w| kernel[i * k + w], |i, w| plogp_sum(&[kernel[i * k + w]]))
    }

    /// A single-symbol side alphabet adds nothing to any marginal, so its
    /// accumulators are skipped and the unconditioned ones reused.
    fn eval_with(
        &self,
        k: usize,
        s: &mut Scratch,
        kern: impl Fn(usize, usize) -> f64,
        row_term: impl Fn(usize, usize) -> f64,
    ) -> Terms {
        let (nx, ny, nu, nv) = (self.nx, self.ny, self.nu, self.nv);
        let (track_u, track_v) = (nu > 1, nv > 1);
        reset(&mut s.w, k);
        reset(&mut s.wx, k * nx);
        reset(&mut s.wy, k * ny);
        if track_u {
            reset(&mut s.wu, k * nu);
            reset(&mut s.wxu, k * nx * nu);
        }
        if track_v {
            reset(&mut s.wv, k * nv);
            reset(&mut s.wyv, k * ny * nv);
        }
        let mut cond = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            let mut h_row = 0.0;
            for w in 0..k {
                let p = kern(i, w);
                if p <= 0.0 {
                    continue;
                }
                h_row += row_term(i, w);
                let m = p * row.q;
                s.w[w] += m;
                s.wx[w * nx + row.x] += m;
                s.wy[w * ny + row.y] += m;
                if track_u {
                    for (u, &qu) in row.qu.iter().enumerate() {
                        let m = p * qu;
                        s.wu[w * nu + u] += m;
                        s.wxu[(w * nx + row.x) * nu + u] += m;
                    }
                }
                if track_v {
                    for (v, &qv) in row.qv.iter().enumerate() {
                        let m = p * qv;
                        s.wv[w * nv + v] += m;
                        s.wyv[(w * ny + row.y) * nv + v] += m;
                    }
                }
            }
            cond += row.q * h_row;
        }
        let h_w = plogp_sum(&s.w);
        let h_wx = plogp_sum(&s.wx);
        let h_wy = plogp_sum(&s.wy);
        let (h_wu, h_wxu) = if track_u { (plogp_sum(&s.wu), plogp_sum(&s.wxu)) } else { (h_w, h_wx) };
        let (h_wv, h_wyv) = if track_v { (plogp_sum(&s.wv), plogp_sum(&s.wyv)) } else { (h_w, h_wy) };
        self.terms([h_w, h_wx, h_wy, h_wu, h_wxu, h_wv, h_wyv], cond)
    }
}
