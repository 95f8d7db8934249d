//! Random-binning block code for the Gray-Wyner network with side
//! information, and a Monte Carlo simulator for its error probabilities.
//!
//! Codebook symbols are stored as `u8` alphabet indices, one flat row of `n`
//! symbols per codeword. Codeword indices and bin labels are 0-based.
//!
//! Every trial draws from its own ChaCha stream selected by the trial index,
//! and the codebooks use stream 0, so results do not depend on how trials are
//! scheduled across threads.

use std::collections::HashMap;
use std::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::measures::{attach_channel, unravel, AuxChannel, JointPmf, MeasureError, Var};
use crate::sources;

/// Largest codebook, in stored symbols, that [`Codebooks::generate`] accepts.
pub const MAX_CODEBOOK_SYMBOLS: u64 = 1 << 28;

const RATE_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodecError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("invalid code parameters: {0}")]
    Params(String),
    #[error("{book} codebook needs 2^{bits} codewords of length {n}, over the limit of {MAX_CODEBOOK_SYMBOLS} symbols")]
    TooLarge { book: &'static str, bits: u32, n: usize },
    #[error("sequence {index} has length {actual}, expected {expected}")]
    Length { index: usize, expected: usize, actual: usize },
    #[error("{0} alphabet has more than 256 symbols")]
    Alphabet(Var),
}

/// Block length, codebook and bin rates (bits per symbol), typicality slack
/// and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeParams {
    pub n: usize,
    pub rate0p: f64,
    pub rate1p: f64,
    pub rate2p: f64,
    pub rate0: f64,
    pub rate1: f64,
    pub rate2: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl CodeParams {
    pub fn validate(&self) -> Result<(), CodecError> {
        if self.n == 0 {
            return Err(CodecError::Params("block length must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(CodecError::Params(format!("epsilon {} must be positive", self.epsilon)));
        }
        let pairs = [(0, self.rate0, self.rate0p), (1, self.rate1, self.rate1p), (2, self.rate2, self.rate2p)];
        for (i, r, rp) in pairs {
            if !(r.is_finite() && rp.is_finite()) || r < 0.0 || rp < 0.0 {
                return Err(CodecError::Params(format!("rates for index {i} must be finite and nonnegative")));
            }
            if self.bin_bits(r) > self.codebook_bits(rp) {
                return Err(CodecError::Params(format!(
                    "bin rate R{i} = {r} exceeds codebook rate R{i}' = {rp}"
                )));
            }
        }
        for (book, rp) in [("W", self.rate0p), ("X", self.rate1p), ("Y", self.rate2p)] {
            let bits = self.codebook_bits(rp);
            if bits >= 32 || (1u64 << bits) * self.n as u64 > MAX_CODEBOOK_SYMBOLS {
                return Err(CodecError::TooLarge { book, bits, n: self.n });
            }
        }
        Ok(())
    }

    /// `ceil(n R')`: the codebook holds `2^bits` codewords.
    pub fn codebook_bits(&self, rate: f64) -> u32 {
        (self.n as f64 * rate - RATE_SLACK).ceil().max(0.0) as u32
    }

    /// `floor(n R)`: the index travels in `bits` bits.
    pub fn bin_bits(&self, rate: f64) -> u32 {
        (self.n as f64 * rate + RATE_SLACK).floor().max(0.0) as u32
    }
}

/// Relative strong typicality against a fixed pmf: for every joint symbol
/// `a`, `|count(a)/n - p(a)| <= eps p(a)`, and symbols of zero mass never
/// occur.
#[derive(Debug, Clone)]
pub struct Typicality {
    probs: Vec<f64>,
    strides: Vec<usize>,
    eps: f64,
}

impl Typicality {
    /// The sequences passed to [`Typicality::check`] follow the variable order
    /// of `pmf`.
    pub fn new(pmf: &JointPmf, eps: f64) -> Self {
        let sizes = pmf.sizes();
        let mut strides = vec![1; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        Typicality { probs: pmf.probs().to_vec(), strides, eps }
    }

    pub fn check(&self, seqs: &[&[u8]]) -> Result<bool, CodecError> {
        let n = seqs.first().map_or(0, |s| s.len());
        for (index, s) in seqs.iter().enumerate() {
            if s.len() != n {
                return Err(CodecError::Length { index, expected: n, actual: s.len() });
            }
        }
        if seqs.len() != self.strides.len() {
            return Err(CodecError::Params(format!(
                "{} sequences for a pmf over {} variables",
                seqs.len(),
                self.strides.len()
            )));
        }
        Ok(self.check_unchecked(seqs, n))
    }

    fn check_unchecked(&self, seqs: &[&[u8]], n: usize) -> bool {
        const STACK: usize = 64;
        let mut small = [0u32; STACK];
        let mut large = Vec::new();
        let counts: &mut [u32] = if self.probs.len() <= STACK {
            &mut small[..self.probs.len()]
        } else {
            large.resize(self.probs.len(), 0);
            &mut large
        };
        let nf = n as f64;
        for t in 0..n {
            let mut idx = 0;
            for (s, stride) in seqs.iter().zip(&self.strides) {
                idx += s[t] as usize * stride;
            }
            let p = self.probs[idx];
            if p == 0.0 {
                return false;
            }
            counts[idx] += 1;
            // Counts only grow, so overshooting the upper limit is final.
            if counts[idx] as f64 / nf - p > self.eps * p {
                return false;
            }
        }
        counts
            .iter()
            .zip(&self.probs)
            .all(|(&c, &p)| (c as f64 / nf - p).abs() <= self.eps * p)
    }
}

/// Checks whether `seqs` (aligned with the variables of `pmf`) are strongly
/// typical.
pub fn strongly_typical(seqs: &[&[u8]], pmf: &JointPmf, epsilon: f64) -> Result<bool, CodecError> {
    Typicality::new(pmf, epsilon).check(seqs)
}

/// A codebook of `2^bits` codewords and their bin labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Book {
    pub n: usize,
    /// Flat `count x n` symbols.
    pub symbols: Vec<u8>,
    pub bins: Vec<u32>,
    pub bin_count: u32,
    /// Codeword indices grouped by bin, increasing within each bin.
    members: Vec<u32>,
    offsets: Vec<usize>,
}

impl Book {
    fn generate(rng: &mut ChaCha8Rng, n: usize, bits: u32, bin_bits: u32, marginal: &[f64]) -> Book {
        let count = 1usize << bits;
        let dist = WeightedIndex::new(marginal).expect("marginal of a valid pmf");
        let symbols: Vec<u8> = (0..count * n).map(|_| dist.sample(rng) as u8).collect();
        let bin_count = 1u32 << bin_bits;
        let bins: Vec<u32> = (0..count).map(|_| rng.random_range(0..bin_count)).collect();
        let mut offsets = vec![0usize; bin_count as usize + 1];
        for &b in &bins {
            offsets[b as usize + 1] += 1;
        }
        for i in 0..bin_count as usize {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut members = vec![0u32; count];
        for (i, &b) in bins.iter().enumerate() {
            members[fill[b as usize]] = i as u32;
            fill[b as usize] += 1;
        }
        Book { n, symbols, bins, bin_count, members, offsets }
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn codeword(&self, i: usize) -> &[u8] {
        &self.symbols[i * self.n..(i + 1) * self.n]
    }

    /// Indices of the codewords labeled `bin`, in increasing order.
    pub fn bin(&self, bin: u32) -> &[u32] {
        let b = bin as usize;
        &self.members[self.offsets[b]..self.offsets[b + 1]]
    }
}

/// The three codebooks `C_W`, `C_X`, `C_Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebooks {
    pub cw: Book,
    pub cx: Book,
    pub cy: Book,
}

/// Joint over `(X, Y, U, V, W)` with `W` drawn from `ch` given `(X, Y)`.
pub fn code_joint(source: &JointPmf, ch: &AuxChannel) -> Result<JointPmf, CodecError> {
    sources::check_layout(source)?;
    let ins: Vec<Var> = ch.inputs().iter().map(|a| a.var).collect();
    let outs: Vec<Var> = ch.outputs().iter().map(|a| a.var).collect();
    if ins != [Var::X, Var::Y] || outs != [Var::W] {
        return Err(CodecError::Params("channel must map (X, Y) to W".into()));
    }
    for a in source.vars().iter().chain(ch.outputs()) {
        if a.size > 256 {
            return Err(CodecError::Alphabet(a.var));
        }
    }
    Ok(attach_channel(source, ch)?)
}

/// Draws the codebooks from the `W`, `X` and `Y` marginals of `joint` and
/// labels every codeword with a uniform bin.
pub fn gen_codebooks(joint: &JointPmf, params: &CodeParams) -> Result<Codebooks, CodecError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut book = |var: Var, rp: f64, r: f64| -> Result<Book, CodecError> {
        let m = joint.marginal(&[var])?;
        Ok(Book::generate(&mut rng, params.n, params.codebook_bits(rp), params.bin_bits(r), m.probs()))
    };
    Ok(Codebooks {
        cw: book(Var::W, params.rate0p, params.rate0)?,
        cx: book(Var::X, params.rate1p, params.rate1)?,
        cy: book(Var::Y, params.rate2p, params.rate2)?,
    })
}

/// Error events of the code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    /// The source block is not typical.
    E1,
    /// No `W` codeword is typical with `(x^n, y^n)`.
    E2,
    /// `x^n` is not in the `X` codebook.
    E3x,
    E3y,
    /// The transmitted `W` codeword is not typical with the side information,
    /// or no codeword in its bin is.
    E4x,
    E4y,
    /// Another `W` codeword in the bin is typical with the side information.
    E5x,
    E5y,
    /// Second-stage failure: the true `X` codeword is not typical with
    /// `(w^n, u^n)`, another one in its bin is, or no one is.
    E6x,
    E6y,
}

impl Event {
    pub const ALL: [Event; 10] = [
        Event::E1,
        Event::E2,
        Event::E3x,
        Event::E3y,
        Event::E4x,
        Event::E4y,
        Event::E5x,
        Event::E5y,
        Event::E6x,
        Event::E6y,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Event::E1 => "E1",
            Event::E2 => "E2",
            Event::E3x => "E3x",
            Event::E3y => "E3y",
            Event::E4x => "E4x",
            Event::E4y => "E4y",
            Event::E5x => "E5x",
            Event::E5y => "E5y",
            Event::E6x => "E6x",
            Event::E6y => "E6y",
        }
    }

    fn bit(self) -> u16 {
        1 << self as u16
    }

    /// Events that can make the x-receiver fail.
    pub const X_SIDE: [Event; 6] = [Event::E1, Event::E2, Event::E3x, Event::E4x, Event::E5x, Event::E6x];
    pub const Y_SIDE: [Event; 6] = [Event::E1, Event::E2, Event::E3y, Event::E4y, Event::E5y, Event::E6y];
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Flags(u16);

impl Flags {
    pub fn set(&mut self, e: Event) {
        self.0 |= e.bit();
    }

    pub fn has(self, e: Event) -> bool {
        self.0 & e.bit() != 0
    }

    pub fn any(self, events: &[Event]) -> bool {
        events.iter().any(|&e| self.has(e))
    }

    pub fn iter(self) -> impl Iterator<Item = Event> {
        Event::ALL.into_iter().filter(move |&e| self.has(e))
    }
}

impl std::ops::BitOr for Flags {
    type Output = Flags;

    fn bitor(self, rhs: Flags) -> Flags {
        Flags(self.0 | rhs.0)
    }
}

/// What the encoder sends, plus the codeword indices it picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encoded {
    pub m0: u32,
    pub m1: u32,
    pub m2: u32,
    pub w_index: u32,
    pub x_index: u32,
    pub y_index: u32,
    pub flags: Flags,
}

/// Output of one receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub seq: Vec<u8>,
    /// Index of the `W` codeword the receiver settled on, if its bin was
    /// nonempty.
    pub w_index: Option<u32>,
    pub flags: Flags,
}

/// Codebooks together with the typicality tests the encoder and decoders use.
#[derive(Debug, Clone)]
pub struct Codec {
    pub params: CodeParams,
    pub books: Codebooks,
    joint: JointPmf,
    wxy: Typicality,
    xy: Typicality,
    wu: Typicality,
    xwu: Typicality,
    wv: Typicality,
    ywv: Typicality,
    x_lookup: HashMap<Box<[u8]>, u32>,
    y_lookup: HashMap<Box<[u8]>, u32>,
}

fn first_index(book: &Book) -> HashMap<Box<[u8]>, u32> {
    let mut map = HashMap::with_capacity(book.len());
    for i in (0..book.len()).rev() {
        map.insert(book.codeword(i).into(), i as u32);
    }
    map
}

impl Codec {
    /// `joint` is over `(X, Y, U, V, W)`, as built by [`code_joint`].
    pub fn new(joint: JointPmf, params: CodeParams) -> Result<Codec, CodecError> {
        use Var::*;
        let books = gen_codebooks(&joint, &params)?;
        let typ = |vars: &[Var]| -> Result<Typicality, CodecError> {
            Ok(Typicality::new(&joint.marginal(vars)?.permuted(vars)?, params.epsilon))
        };
        Ok(Codec {
            wxy: typ(&[W, X, Y])?,
            xy: typ(&[X, Y])?,
            wu: typ(&[W, U])?,
            xwu: typ(&[X, W, U])?,
            wv: typ(&[W, V])?,
            ywv: typ(&[Y, W, V])?,
            x_lookup: first_index(&books.cx),
            y_lookup: first_index(&books.cy),
            params,
            books,
            joint,
        })
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    fn check_len(&self, index: usize, s: &[u8]) -> Result<(), CodecError> {
        if s.len() != self.params.n {
            return Err(CodecError::Length { index, expected: self.params.n, actual: s.len() });
        }
        Ok(())
    }

    /// Picks the smallest-index `W` codeword typical with `(x^n, y^n)` and the
    /// smallest-index exact matches in the `X` and `Y` codebooks, falling back
    /// to index 0, and sends their bin labels.
    pub fn encode(&self, x: &[u8], y: &[u8]) -> Result<Encoded, CodecError> {
        self.check_len(0, x)?;
        self.check_len(1, y)?;
        let mut flags = Flags::default();
        let cw = &self.books.cw;
        let n = self.params.n;
        // Joint typicality of (w, x, y) implies typicality of (x, y), so an
        // atypical pair skips the scan.
        let w_index = (self.xy.check_unchecked(&[x, y], n))
            .then(|| (0..cw.len()).find(|&i| self.wxy.check_unchecked(&[cw.codeword(i), x, y], n)))
            .flatten()
            .unwrap_or_else(|| {
                flags.set(Event::E2);
                0
            }) as u32;
        let x_index = self.x_lookup.get(x).copied().unwrap_or_else(|| {
            flags.set(Event::E3x);
            0
        });
        let y_index = self.y_lookup.get(y).copied().unwrap_or_else(|| {
            flags.set(Event::E3y);
            0
        });
        Ok(Encoded {
            m0: cw.bins[w_index as usize],
            m1: self.books.cx.bins[x_index as usize],
            m2: self.books.cy.bins[y_index as usize],
            w_index,
            x_index,
            y_index,
            flags,
        })
    }

    /// Two-stage decoding at the x-receiver from `(m0, m1, u^n)`.
    pub fn decode_x(&self, m0: u32, m1: u32, u: &[u8]) -> Result<Decoded, CodecError> {
        self.decode(m0, m1, u, Side::X)
    }

    /// Two-stage decoding at the y-receiver from `(m0, m2, v^n)`.
    pub fn decode_y(&self, m0: u32, m2: u32, v: &[u8]) -> Result<Decoded, CodecError> {
        self.decode(m0, m2, v, Side::Y)
    }

    fn decode(&self, m0: u32, m: u32, side_seq: &[u8], side: Side) -> Result<Decoded, CodecError> {
        self.check_len(0, side_seq)?;
        let (book, stage1, stage2, no_w, multi_w, bad_x) = match side {
            Side::X => (&self.books.cx, &self.wu, &self.xwu, Event::E4x, Event::E5x, Event::E6x),
            Side::Y => (&self.books.cy, &self.wv, &self.ywv, Event::E4y, Event::E5y, Event::E6y),
        };
        let (cw, n) = (&self.books.cw, self.params.n);
        if m0 >= cw.bin_count || m >= book.bin_count {
            return Err(CodecError::Params(format!("bin label ({m0}, {m}) out of range")));
        }
        let mut flags = Flags::default();

        let w_bin = cw.bin(m0);
        let w_index = if w_bin.is_empty() {
            flags.set(no_w);
            None
        } else {
            let mut hits = w_bin.iter().filter(|&&i| stage1.check_unchecked(&[cw.codeword(i as usize), side_seq], n));
            Some(match (hits.next(), hits.next()) {
                (None, _) => {
                    flags.set(no_w);
                    w_bin[0]
                }
                (Some(&i), None) => i,
                (Some(&i), Some(_)) => {
                    flags.set(multi_w);
                    i
                }
            })
        };
        let zeros = vec![0u8; n];
        let w_hat = w_index.map_or(&zeros[..], |i| cw.codeword(i as usize));

        let x_bin = book.bin(m);
        let seq = if x_bin.is_empty() {
            flags.set(bad_x);
            zeros.clone()
        } else {
            let mut hits =
                x_bin.iter().filter(|&&i| stage2.check_unchecked(&[book.codeword(i as usize), w_hat, side_seq], n));
            let pick = match (hits.next(), hits.next()) {
                (Some(&i), None) => i,
                (None, _) => {
                    flags.set(bad_x);
                    x_bin[0]
                }
                (Some(&i), Some(_)) => {
                    flags.set(bad_x);
                    i
                }
            };
            book.codeword(pick as usize).to_vec()
        };
        Ok(Decoded { seq, w_index, flags })
    }
}

#[derive(Clone, Copy)]
enum Side {
    X,
    Y,
}

/// Everything observed on one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    pub x: Vec<u8>,
    pub y: Vec<u8>,
    pub u: Vec<u8>,
    pub v: Vec<u8>,
    pub sent: Encoded,
    pub x_hat: Vec<u8>,
    pub y_hat: Vec<u8>,
    pub flags: Flags,
}

impl TrialRecord {
    pub fn err_x(&self) -> bool {
        self.x_hat != self.x
    }

    pub fn err_y(&self) -> bool {
        self.y_hat != self.y
    }
}

/// A codec plus the source it is fed from.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub codec: Codec,
    source: WeightedIndex<f64>,
    sizes: Vec<usize>,
    source_typ: Typicality,
}

impl Simulator {
    pub fn new(source: &JointPmf, ch: &AuxChannel, params: CodeParams) -> Result<Simulator, CodecError> {
        let joint = code_joint(source, ch)?;
        let codec = Codec::new(joint, params)?;
        Ok(Simulator {
            codec,
            source: WeightedIndex::new(source.probs()).expect("valid source pmf"),
            sizes: source.sizes(),
            source_typ: Typicality::new(source, params.epsilon),
        })
    }

    /// Runs trial `t` on its own random stream.
    pub fn trial(&self, t: u64) -> TrialRecord {
        let n = self.codec.params.n;
        let mut rng = ChaCha8Rng::seed_from_u64(self.codec.params.seed);
        rng.set_stream(t.wrapping_add(1));
        let mut seqs: [Vec<u8>; 4] = std::array::from_fn(|_| Vec::with_capacity(n));
        for _ in 0..n {
            let sym = unravel(self.source.sample(&mut rng), &self.sizes);
            for (s, &v) in seqs.iter_mut().zip(&sym) {
                s.push(v as u8);
            }
        }
        let [x, y, u, v] = seqs;

        let mut flags = Flags::default();
        if !self.source_typ.check_unchecked(&[&x, &y, &u, &v], n) {
            flags.set(Event::E1);
        }
        let c = &self.codec;
        let sent = c.encode(&x, &y).expect("lengths match");
        let dx = c.decode_x(sent.m0, sent.m1, &u).expect("labels in range");
        let dy = c.decode_y(sent.m0, sent.m2, &v).expect("labels in range");
        flags = flags | sent.flags | dx.flags | dy.flags;

        // Events the receivers cannot see for themselves.
        let w_true = c.books.cw.codeword(sent.w_index as usize);
        if !c.wu.check_unchecked(&[w_true, &u], n) {
            flags.set(Event::E4x);
        }
        if !c.wv.check_unchecked(&[w_true, &v], n) {
            flags.set(Event::E4y);
        }
        if dx.w_index != Some(sent.w_index) {
            flags.set(Event::E5x);
        }
        if dy.w_index != Some(sent.w_index) {
            flags.set(Event::E5y);
        }
        if dx.seq != c.books.cx.codeword(sent.x_index as usize) {
            flags.set(Event::E6x);
        }
        if dy.seq != c.books.cy.codeword(sent.y_index as usize) {
            flags.set(Event::E6y);
        }
        TrialRecord { trial: t, x, y, u, v, sent, x_hat: dx.seq, y_hat: dy.seq, flags }
    }

    pub fn run(&self, trials: u64) -> SimOutcome {
        (0..trials)
            .into_par_iter()
            .map(|t| SimOutcome::from_record(&self.trial(t)))
            .reduce(SimOutcome::default, SimOutcome::merge)
    }
}

/// Aggregated error counts.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimOutcome {
    pub trials: u64,
    pub err_x: u64,
    pub err_y: u64,
    /// Trials on which each event occurred, indexed like [`Event::ALL`].
    pub event_counts: [u64; 10],
}

impl SimOutcome {
    fn from_record(r: &TrialRecord) -> SimOutcome {
        let mut event_counts = [0; 10];
        for (i, e) in Event::ALL.iter().enumerate() {
            event_counts[i] = r.flags.has(*e) as u64;
        }
        SimOutcome { trials: 1, err_x: r.err_x() as u64, err_y: r.err_y() as u64, event_counts }
    }

    fn merge(mut self, other: SimOutcome) -> SimOutcome {
        self.trials += other.trials;
        self.err_x += other.err_x;
        self.err_y += other.err_y;
        for (a, b) in self.event_counts.iter_mut().zip(other.event_counts) {
            *a += b;
        }
        self
    }

    pub fn count(&self, e: Event) -> u64 {
        self.event_counts[e as usize]
    }

    fn rate(&self, k: u64) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            k as f64 / self.trials as f64
        }
    }

    pub fn pe_x(&self) -> f64 {
        self.rate(self.err_x)
    }

    pub fn pe_y(&self) -> f64 {
        self.rate(self.err_y)
    }

    pub fn pe(&self) -> f64 {
        self.pe_x().max(self.pe_y())
    }
}

/// Builds the codebooks for `params` and runs `trials` trials.
pub fn simulate(
    source: &JointPmf,
    ch: &AuxChannel,
    params: &CodeParams,
    trials: u64,
) -> Result<SimOutcome, CodecError> {
    if trials == 0 {
        return Err(CodecError::Params("at least one trial is required".into()));
    }
    Ok(Simulator::new(source, ch, *params)?.run(trials))
}
