//! Optimization over auxiliary channels.
//!
//! Each union region is approximated by enumerating grid-rational kernels
//! (every row a pmf with denominators `grid`), deduplicated up to output
//! relabeling, followed by a few passes of coordinate-wise local refinement
//! around the best kernel. Membership and minima are therefore one-sided:
//! a found channel is a witness, a miss only says none was found at this
//! resolution.

pub mod check;
pub mod enumerate;
pub mod fast;
pub mod support;

use std::cmp::Ordering;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::measures::{
    attach_channel, cond_entropy, unravel, Alphabet, AuxChannel, JointPmf, MeasureError, Var,
    DERIVED_TOL,
};
use crate::regions::{
    aux_half, contains, corner_from_halves, gw_region, inner_region, outer_region, AuxHalf,
    HalfspaceRegion, RateTriple, RegionError,
};
use crate::sources;

pub use check::{
    check_special_case, closed_form_sum_rate, CheckOptions, ClosedForm, SpecialCaseReport,
    Theorem, WeightRow,
};
pub use support::{support_value, Weights};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("weights {0:?} must be finite, nonnegative and not all zero")]
    InvalidWeights([f64; 3]),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("source does not satisfy {0}")]
    Hypothesis(String),
    #[error("search space of about {estimate:.3e} candidates exceeds the budget of {limit}")]
    Budget { estimate: f64, limit: u64 },
}

/// Relative cost of evaluating one kernel of a two-auxiliary slot.
pub const PAIR_COST: u64 = 20;

/// Which union region to search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundFamily {
    Gw,
    Inner,
    Outer,
    Star,
    StarStar,
}

impl BoundFamily {
    pub const ALL: [BoundFamily; 5] =
        [BoundFamily::Gw, BoundFamily::Inner, BoundFamily::Outer, BoundFamily::Star, BoundFamily::StarStar];

    pub fn name(self) -> &'static str {
        match self {
            BoundFamily::Gw => "gw",
            BoundFamily::Inner => "inner",
            BoundFamily::Outer => "outer",
            BoundFamily::Star => "star",
            BoundFamily::StarStar => "starstar",
        }
    }
}

impl fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundFamily {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoundFamily::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| SearchError::InvalidConfig(format!("unknown family {s:?}")))
    }
}

/// Search resolution and cardinality caps.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Cap on `|W|`; `None` means `|X||Y| + 3`.
    pub w_card: Option<usize>,
    /// Caps on `|A|` and `|B|`; `None` means `|X| + 1` for the single-source
    /// family and `|X||Y| + 1` for complementary delivery.
    pub a_card: Option<usize>,
    pub b_card: Option<usize>,
    pub grid: u32,
    pub refine_iters: u32,
    pub seed: u64,
    /// Allow caps above the cardinality bounds that make the unions exact.
    pub allow_cap_override: bool,
    /// Refuse searches estimated to visit more kernels than this. Each slot
    /// of a two-auxiliary family gets `1 / PAIR_COST` of it, since those
    /// kernels are evaluated on the full joint.
    pub max_channels: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            w_card: None,
            a_card: None,
            b_card: None,
            grid: 8,
            refine_iters: 0,
            seed: 0,
            allow_cap_override: false,
            max_channels: 50_000_000,
        }
    }
}

impl SearchConfig {
    pub fn with_grid(grid: u32) -> Self {
        SearchConfig { grid, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.grid == 0 {
            return Err(SearchError::InvalidConfig("grid must be at least 1".into()));
        }
        for (name, cap) in [("w_card", self.w_card), ("a_card", self.a_card), ("b_card", self.b_card)] {
            if cap == Some(0) {
                return Err(SearchError::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    fn resolve_cap(&self, requested: Option<usize>, bound: usize, name: &str) -> Result<usize, SearchError> {
        match requested {
            None => Ok(bound),
            Some(c) if c > bound && !self.allow_cap_override => Err(SearchError::InvalidConfig(format!(
                "{name} = {c} exceeds the cardinality bound {bound}"
            ))),
            Some(c) => Ok(c),
        }
    }
}

/// One auxiliary variable: its output, the inputs it is drawn from, and the
/// input tuples that carry positive mass. Rows outside the support do not
/// change the joint and are not searched.
#[derive(Debug, Clone)]
struct Slot {
    output: Var,
    inputs: Vec<Alphabet>,
    support: Vec<usize>,
    cap: usize,
    /// `(target, side)` for the two-auxiliary families.
    half: Option<(Var, Var)>,
}

impl Slot {
    fn new(base: &JointPmf, output: Var, inputs: &[Var], cap: usize, half: Option<(Var, Var)>) -> Result<Slot, SearchError> {
        let marg = base.marginal(inputs)?.permuted(inputs)?;
        let support = marg.probs().iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(i, _)| i).collect();
        Ok(Slot { output, inputs: marg.vars().to_vec(), support, cap, half })
    }

    fn rows(&self) -> usize {
        self.support.len()
    }

    fn full_rows(&self) -> usize {
        self.inputs.iter().map(|a| a.size).product()
    }

    /// Expands a kernel over the support to a full channel; rows outside the
    /// support put all mass on symbol 0.
    fn channel(&self, k: &SlotKernel) -> AuxChannel {
        let mut kernel = vec![0.0; self.full_rows() * k.card];
        for r in 0..self.full_rows() {
            kernel[r * k.card] = 1.0;
        }
        for (i, &r) in self.support.iter().enumerate() {
            kernel[r * k.card..(r + 1) * k.card].copy_from_slice(k.row(i));
        }
        AuxChannel::new(self.inputs.clone(), vec![Alphabet::new(self.output, k.card)], kernel)
            .expect("grid kernels have pmf rows")
    }
}

/// Kernel of one slot restricted to its support rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotKernel {
    pub card: usize,
    /// Row-major, `support rows x card`.
    pub data: Vec<f64>,
}

impl SlotKernel {
    fn from_grid(num: &[u32], card: usize, grid: u32) -> Self {
        SlotKernel { card, data: num.iter().map(|&n| n as f64 / grid as f64).collect() }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.card..(i + 1) * self.card]
    }

    fn key_cmp(&self, other: &SlotKernel) -> Ordering {
        self.card.cmp(&other.card).then_with(|| {
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

/// A source together with the auxiliary slots of one family.
struct Problem {
    family: BoundFamily,
    base: JointPmf,
    slots: Vec<Slot>,
    /// Evaluator for the single-auxiliary families.
    fast: Option<fast::WEval>,
}

fn functional_pair(source: &JointPmf, a: Var, b: Var) -> Result<bool, SearchError> {
    Ok(cond_entropy(source, &[a], &[b])? <= DERIVED_TOL && cond_entropy(source, &[b], &[a])? <= DERIVED_TOL)
}

pub(crate) fn is_single_source(source: &JointPmf) -> Result<bool, SearchError> {
    functional_pair(source, Var::X, Var::Y)
}

pub(crate) fn is_complementary(source: &JointPmf) -> Result<bool, SearchError> {
    Ok(functional_pair(source, Var::U, Var::Y)? && functional_pair(source, Var::V, Var::X)?)
}

impl Problem {
    fn new(source: &JointPmf, family: BoundFamily, cfg: &SearchConfig) -> Result<Problem, SearchError> {
        use Var::*;
        cfg.validate()?;
        sources::check_layout(source)?;
        let (nx, ny) = (source.card(X)?, source.card(Y)?);
        match family {
            BoundFamily::Gw | BoundFamily::Inner | BoundFamily::Outer => {
                let cap = cfg.resolve_cap(cfg.w_card, nx * ny + 3, "w_card")?;
                let slot = Slot::new(source, W, &[X, Y], cap, None)?;
                let fast = Some(fast::WEval::new(source, &slot.support)?);
                Ok(Problem { family, base: source.clone(), slots: vec![slot], fast })
            }
            BoundFamily::Star => {
                if !is_single_source(source)? {
                    return Err(SearchError::Hypothesis("X = Y".into()));
                }
                let base = source.marginal(&[X, U, V])?;
                let a = cfg.resolve_cap(cfg.a_card, nx + 1, "a_card")?;
                let b = cfg.resolve_cap(cfg.b_card, nx + 1, "b_card")?;
                let slots = vec![
                    Slot::new(&base, A, &[X], a, Some((X, U)))?,
                    Slot::new(&base, B, &[X], b, Some((X, V)))?,
                ];
                Ok(Problem { family, base, slots, fast: None })
            }
            BoundFamily::StarStar => {
                if !is_complementary(source)? {
                    return Err(SearchError::Hypothesis("U = Y and V = X".into()));
                }
                let base = source.marginal(&[X, Y])?;
                let a = cfg.resolve_cap(cfg.a_card, nx * ny + 1, "a_card")?;
                let b = cfg.resolve_cap(cfg.b_card, nx * ny + 1, "b_card")?;
                let slots = vec![
                    Slot::new(&base, A, &[X, Y], a, Some((X, Y)))?,
                    Slot::new(&base, B, &[X, Y], b, Some((Y, X)))?,
                ];
                Ok(Problem { family, base, slots, fast: None })
            }
        }
    }

    fn fast(&self) -> &fast::WEval {
        self.fast.as_ref().expect("single-auxiliary family")
    }

    fn is_pair(&self) -> bool {
        self.slots.len() == 2
    }

    fn check_budget(&self, cfg: &SearchConfig) -> Result<(), SearchError> {
        let per_slot: Vec<f64> =
            self.slots.iter().map(|s| enumerate::estimate(s.rows(), s.cap, cfg.grid)).collect();
        let (estimate, limit) = if self.is_pair() {
            (per_slot[0].max(per_slot[1]), cfg.max_channels / PAIR_COST)
        } else {
            (per_slot[0], cfg.max_channels)
        };
        if estimate > limit as f64 {
            return Err(SearchError::Budget { estimate, limit });
        }
        Ok(())
    }

    fn half(&self, slot: usize, k: &SlotKernel) -> Result<AuxHalf, SearchError> {
        let s = &self.slots[slot];
        let (target, side) = s.half.expect("pair slots carry their half");
        let joint = attach_channel(&self.base, &s.channel(k))?;
        Ok(aux_half(&joint, target, s.output, side)?)
    }

    fn region(&self, kernels: &[SlotKernel]) -> Result<HalfspaceRegion, SearchError> {
        if self.is_pair() {
            return Ok(corner_from_halves(self.half(0, &kernels[0])?, self.half(1, &kernels[1])?));
        }
        let k = &kernels[0];
        let terms = self.fast().eval(&k.data, k.card, &mut fast::Scratch::default());
        Ok(terms.region(self.family))
    }

    /// The full channel: the single slot's kernel, or the product kernel
    /// `p(a|.) p(b|.)` for the pair families.
    fn channel(&self, kernels: &[SlotKernel]) -> AuxChannel {
        if !self.is_pair() {
            return self.slots[0].channel(&kernels[0]);
        }
        let (ca, cb) = (self.slots[0].channel(&kernels[0]), self.slots[1].channel(&kernels[1]));
        let (ka, kb) = (ca.cols(), cb.cols());
        let mut kernel = Vec::with_capacity(ca.rows() * ka * kb);
        for r in 0..ca.rows() {
            for &pa in ca.row(r) {
                kernel.extend(cb.row(r).iter().map(|&pb| pa * pb));
            }
        }
        AuxChannel::new(ca.inputs().to_vec(), vec![ca.outputs()[0], cb.outputs()[0]], kernel)
            .expect("product of pmf rows is a pmf row")
    }

    /// Every canonical kernel of one slot, in enumeration order.
    fn slot_kernels(&self, slot: usize, grid: u32) -> Vec<SlotKernel> {
        let s = &self.slots[slot];
        let mut out = Vec::new();
        for k in 1..=s.cap {
            let _ = enumerate::for_each_canonical(s.rows(), k, grid, &mut |num: &[u32]| {
                out.push(SlotKernel::from_grid(num, k, grid));
                ControlFlow::Continue(())
            });
        }
        out
    }

    /// Folds `score` over every single-slot kernel in parallel and keeps the
    /// smallest `(score, kernel)` pair. Ties go to the smaller kernel so the
    /// result does not depend on scheduling.
    fn best_single<S>(&self, grid: u32, score: S) -> Result<(f64, SlotKernel), SearchError>
    where
        S: Fn(&fast::Terms) -> f64 + Sync,
    {
        let eval = self.fast();
        let s = &self.slots[0];
        let units: Vec<(usize, Vec<u32>)> = (1..=s.cap)
            .flat_map(|k| enumerate::first_columns(s.rows(), k, grid).into_iter().map(move |c| (k, c)))
            .collect();
        let best = units
            .par_iter()
            .map(|(k, first)| -> Result<Option<(f64, SlotKernel)>, SearchError> {
                let mut best: Option<(f64, SlotKernel)> = None;
                let mut scratch = fast::Scratch::default();
                let _ = enumerate::for_each_with_first(s.rows(), *k, grid, first, &mut |num: &[u32]| {
                    let v = score(&eval.eval_grid(num, *k, grid, &mut scratch));
                    let improves = match &best {
                        None => true,
                        Some((bv, _)) => v <= *bv,
                    };
                    if improves {
                        let cand = SlotKernel::from_grid(num, *k, grid);
                        if better(v, &cand, best.as_ref()) {
                            best = Some((v, cand));
                        }
                    }
                    ControlFlow::Continue(())
                });
                Ok(best)
            })
            .try_reduce(|| None, |a, b| Ok(pick(a, b)))?;
        Ok(best.expect("the constant kernel is always enumerated"))
    }
}

fn better(v: f64, k: &SlotKernel, cur: Option<&(f64, SlotKernel)>) -> bool {
    match cur {
        None => true,
        Some((bv, bk)) => v < *bv || (v == *bv && k.key_cmp(bk) == Ordering::Less),
    }
}

fn pick(a: Option<(f64, SlotKernel)>, b: Option<(f64, SlotKernel)>) -> Option<(f64, SlotKernel)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            if better(b.0, &b.1, Some(&a)) {
                Some(b)
            } else {
                Some(a)
            }
        }
    }
}

/// Lazily enumerated channels of one family.
pub struct ChannelStream {
    problem: Problem,
    grid: u32,
    state: StreamState,
}

enum StreamState {
    Single { units: Vec<(usize, Vec<u32>)>, next_unit: usize, buffer: std::vec::IntoIter<SlotKernel> },
    Pair { a: Vec<SlotKernel>, b: Vec<SlotKernel>, i: usize, j: usize },
}

impl Iterator for ChannelStream {
    type Item = AuxChannel;

    fn next(&mut self) -> Option<AuxChannel> {
        match &mut self.state {
            StreamState::Single { units, next_unit, buffer } => loop {
                if let Some(k) = buffer.next() {
                    return Some(self.problem.slots[0].channel(&k));
                }
                let (card, first) = units.get(*next_unit)?.clone();
                *next_unit += 1;
                let rows = self.problem.slots[0].rows();
                let grid = self.grid;
                let mut chunk = Vec::new();
                let _ = enumerate::for_each_with_first(rows, card, grid, &first, &mut |num: &[u32]| {
                    chunk.push(SlotKernel::from_grid(num, card, grid));
                    ControlFlow::Continue(())
                });
                *buffer = chunk.into_iter();
            },
            StreamState::Pair { a, b, i, j } => {
                if *i >= a.len() {
                    return None;
                }
                let pair = [a[*i].clone(), b[*j].clone()];
                *j += 1;
                if *j == b.len() {
                    *j = 0;
                    *i += 1;
                }
                Some(self.problem.channel(&pair))
            }
        }
    }
}

/// Every grid kernel of the family, deduplicated up to output relabeling and
/// restricted to the support of the input marginal. Pair families yield the
/// product kernels of all marginal-kernel pairs; the pair regions depend on
/// the joint kernel only through those marginals.
pub fn enumerate_channels(
    source: &JointPmf,
    family: BoundFamily,
    cfg: &SearchConfig,
) -> Result<ChannelStream, SearchError> {
    let problem = Problem::new(source, family, cfg)?;
    let state = if problem.is_pair() {
        StreamState::Pair { a: problem.slot_kernels(0, cfg.grid), b: problem.slot_kernels(1, cfg.grid), i: 0, j: 0 }
    } else {
        let s = &problem.slots[0];
        let units = (1..=s.cap)
            .flat_map(|k| enumerate::first_columns(s.rows(), k, cfg.grid).into_iter().map(move |c| (k, c)))
            .collect();
        StreamState::Single { units, next_unit: 0, buffer: Vec::new().into_iter() }
    };
    Ok(ChannelStream { problem, grid: cfg.grid, state })
}

/// Region of a single channel under `family`, built the same way the search
/// builds it.
pub fn channel_region(
    source: &JointPmf,
    family: BoundFamily,
    ch: &AuxChannel,
) -> Result<HalfspaceRegion, SearchError> {
    use Var::*;
    sources::check_layout(source)?;
    match family {
        BoundFamily::Gw => Ok(gw_region(&attach_channel(source, ch)?)?),
        BoundFamily::Inner => Ok(inner_region(&attach_channel(source, ch)?)?),
        BoundFamily::Outer => Ok(outer_region(&attach_channel(source, ch)?)?),
        BoundFamily::Star => {
            Ok(crate::regions::star_region(&attach_channel(&source.marginal(&[X, U, V])?, ch)?)?)
        }
        BoundFamily::StarStar => {
            Ok(crate::regions::starstar_region(&attach_channel(&source.marginal(&[X, Y])?, ch)?)?)
        }
    }
}

/// Best channel found for one weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub value: f64,
    pub triple: RateTriple,
    pub region: HalfspaceRegion,
    pub channel: AuxChannel,
    /// Per-slot kernels over the support rows (one for `W`, two for `A, B`).
    pub kernels: Vec<SlotKernel>,
}

/// Minimizes `weights . R` over the union of per-channel regions.
pub fn min_weighted(
    source: &JointPmf,
    family: BoundFamily,
    weights: &Weights,
    cfg: &SearchConfig,
) -> Result<Optimum, SearchError> {
    let problem = Problem::new(source, family, cfg)?;
    problem.check_budget(cfg)?;
    let score = |ks: &[SlotKernel]| -> Result<f64, SearchError> {
        Ok(support_value(&problem.region(ks)?, weights).0)
    };
    let (value, kernels) = if problem.is_pair() {
        best_pair(&problem, cfg.grid, weights)?
    } else {
        let (v, k) = problem.best_single(cfg.grid, |t| t.weighted_min(family, weights.as_array()))?;
        (v, vec![k])
    };
    let (_, kernels) = refine(&problem, kernels, value, cfg, &score)?;
    let region = problem.region(&kernels)?;
    let (value, triple) = support_value(&region, weights);
    Ok(Optimum { value, triple, region, channel: problem.channel(&kernels), kernels })
}

/// Minimizes `l0 max{ra, rb} + l1 ia + l2 ib` over all pairs of slot
/// kernels without visiting every pair. When `ra >= rb` the cost is
/// `l0 ra + l1 ia + l2 ib`, so for each A-kernel the best partner is the
/// B-kernel with smallest `ib` among those with `rb <= ra`: a prefix minimum
/// over B sorted by `rb`. The case `rb >= ra` is symmetric.
fn best_pair(problem: &Problem, grid: u32, weights: &Weights) -> Result<(f64, Vec<SlotKernel>), SearchError> {
    let [l0, l1, l2] = weights.as_array();
    let halves = |slot: usize| -> Result<Vec<(SlotKernel, AuxHalf)>, SearchError> {
        problem
            .slot_kernels(slot, grid)
            .into_par_iter()
            .map(|k| {
                // Same clamping as region construction, so values match it exactly.
                problem.half(slot, &k).map(|h| (k, AuxHalf { residual: h.residual.max(0.0), info: h.info.max(0.0) }))
            })
            .collect()
    };
    let (a, b) = (halves(0)?, halves(1)?);
    let cost = |i: usize, j: usize| {
        let (ha, hb) = (a[i].1, b[j].1);
        l0 * ha.residual.max(hb.residual) + l1 * ha.info + l2 * hb.info
    };
    let mut best: Option<(f64, usize, usize)> = None;
    let mut offer = |v: f64, i: usize, j: usize| {
        let take = match best {
            None => true,
            Some((bv, bi, bj)) => {
                v < bv || (v == bv && a[i].0.key_cmp(&a[bi].0).then_with(|| b[j].0.key_cmp(&b[bj].0)) == Ordering::Less)
            }
        };
        if take {
            best = Some((v, i, j));
        }
    };
    // Case ra >= rb, scanning B by residual.
    for (i, j) in sweep_partners(&a, &b, l2, |h| h.info) {
        offer(cost(i, j), i, j);
    }
    // Case rb >= ra, roles swapped.
    for (j, i) in sweep_partners(&b, &a, l1, |h| h.info) {
        offer(cost(i, j), i, j);
    }
    let (v, i, j) = best.expect("both slots contain the constant kernel");
    Ok((v, vec![a[i].0.clone(), b[j].0.clone()]))
}

/// For every `lead` entry, the `other` entry with residual at most the
/// lead's residual minimizing `weight * info` (smallest kernel on ties).
fn sweep_partners(
    lead: &[(SlotKernel, AuxHalf)],
    other: &[(SlotKernel, AuxHalf)],
    weight: f64,
    info: impl Fn(&AuxHalf) -> f64,
) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..other.len()).collect();
    order.sort_by(|&x, &y| other[x].1.residual.total_cmp(&other[y].1.residual));
    let mut prefix = Vec::with_capacity(order.len());
    let mut cur: Option<usize> = None;
    for &j in &order {
        let better = match cur {
            None => true,
            Some(c) => {
                let (vj, vc) = (weight * info(&other[j].1), weight * info(&other[c].1));
                vj < vc || (vj == vc && other[j].0.key_cmp(&other[c].0) == Ordering::Less)
            }
        };
        if better {
            cur = Some(j);
        }
        prefix.push(cur.expect("set above"));
    }
    let mut out = Vec::new();
    for (i, (_, h)) in lead.iter().enumerate() {
        let n = order.partition_point(|&j| other[j].1.residual <= h.residual);
        if n > 0 {
            out.push((i, prefix[n - 1]));
        }
    }
    out
}

/// Coordinate-wise local search: move `step` mass between two output symbols
/// of one support row, keep strict improvements, halve the step each pass.
/// The visiting order is a seeded shuffle.
fn refine<S>(
    problem: &Problem,
    mut kernels: Vec<SlotKernel>,
    mut value: f64,
    cfg: &SearchConfig,
    score: &S,
) -> Result<(f64, Vec<SlotKernel>), SearchError>
where
    S: Fn(&[SlotKernel]) -> Result<f64, SearchError>,
{
    if cfg.refine_iters == 0 {
        return Ok((value, kernels));
    }
    let mut moves = Vec::new();
    for (s, k) in kernels.iter().enumerate() {
        for r in 0..problem.slots[s].rows() {
            for from in 0..k.card {
                for to in 0..k.card {
                    if from != to {
                        moves.push((s, r, from, to));
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    moves.shuffle(&mut rng);
    let mut step = 0.5 / cfg.grid as f64;
    for _ in 0..cfg.refine_iters {
        for &(s, r, from, to) in &moves {
            let k = &kernels[s];
            let amount = step.min(k.data[r * k.card + from]);
            if amount <= 0.0 {
                continue;
            }
            let mut cand = kernels.clone();
            let c = &mut cand[s];
            let card = c.card;
            c.data[r * card + from] -= amount;
            c.data[r * card + to] += amount;
            renormalize(&mut c.data[r * card..(r + 1) * card]);
            let v = score(&cand)?;
            if v < value {
                value = v;
                kernels = cand;
            }
        }
        step /= 2.0;
    }
    Ok((value, kernels))
}

fn renormalize(row: &mut [f64]) {
    for x in row.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let s: f64 = row.iter().sum();
    for x in row.iter_mut() {
        *x /= s;
    }
}

/// One row of a boundary sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub weights: Weights,
    pub optimum: Optimum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub family: BoundFamily,
    pub rows: Vec<SweepRow>,
}

pub fn sweep_boundary(
    source: &JointPmf,
    family: BoundFamily,
    weights: &[Weights],
    cfg: &SearchConfig,
) -> Result<SweepResult, SearchError> {
    let rows = weights
        .iter()
        .map(|w| Ok(SweepRow { weights: *w, optimum: min_weighted(source, family, w, cfg)? }))
        .collect::<Result<_, SearchError>>()?;
    Ok(SweepResult { family, rows })
}

/// Whether some enumerated (or refined) channel's region contains `t`.
pub fn member(
    source: &JointPmf,
    family: BoundFamily,
    t: &RateTriple,
    cfg: &SearchConfig,
) -> Result<bool, SearchError> {
    let problem = Problem::new(source, family, cfg)?;
    problem.check_budget(cfg)?;
    let violation =
        |ks: &[SlotKernel]| -> Result<f64, SearchError> { Ok(-problem.region(ks)?.min_slack(t)) };
    let (v, kernels) = if problem.is_pair() {
        // The corner splits into independent conditions on each slot.
        let worst = |slot: usize, h: AuxHalf| {
            let r = if slot == 0 { t.r1 } else { t.r2 };
            (h.residual - t.r0).max(h.info - r)
        };
        let mut parts = Vec::new();
        for slot in 0..2 {
            let best = problem
                .slot_kernels(slot, cfg.grid)
                .into_iter()
                .map(|k| problem.half(slot, &k).map(|h| (worst(slot, h), k)))
                .try_fold(None::<(f64, SlotKernel)>, |acc, x| {
                    let (v, k) = x?;
                    Ok::<_, SearchError>(if better(v, &k, acc.as_ref()) { Some((v, k)) } else { acc })
                })?
                .expect("constant kernel");
            parts.push(best);
        }
        let v = parts[0].0.max(parts[1].0);
        (v, parts.into_iter().map(|p| p.1).collect::<Vec<_>>())
    } else {
        let (v, k) = problem.best_single(cfg.grid, |terms| -terms.min_slack(family, t))?;
        (v, vec![k])
    };
    if v <= crate::regions::CONTAINS_TOL {
        return Ok(true);
    }
    let (_, kernels) = refine(&problem, kernels, v, cfg, &violation)?;
    Ok(contains(&problem.region(&kernels)?, t))
}

/// Short label for a kernel, stable across runs.
pub fn channel_id(ch: &AuxChannel) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    for a in ch.inputs().iter().chain(ch.outputs()) {
        h.update(a.var.as_str().as_bytes());
        h.update((a.size as u64).to_le_bytes());
    }
    for p in ch.kernel() {
        h.update(p.to_bits().to_le_bytes());
    }
    let digest = h.finalize();
    let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    let cards: Vec<String> = ch.outputs().iter().map(|a| format!("{}{}", a.var, a.size)).collect();
    format!("{}-{hex}", cards.join(""))
}

/// Human-readable kernel rows, one `input -> [p, ...]` entry per input tuple.
pub fn describe_channel(ch: &AuxChannel) -> String {
    let sizes: Vec<usize> = ch.inputs().iter().map(|a| a.size).collect();
    (0..ch.rows())
        .map(|r| {
            let probs: Vec<String> = ch.row(r).iter().map(|p| format!("{p:.6}")).collect();
            format!("{:?}->[{}]", unravel(r, &sizes), probs.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}
