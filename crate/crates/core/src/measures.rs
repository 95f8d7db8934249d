//! Finite-alphabet probability tensors and the Shannon measures computed on
//! them.
//!
//! A [`JointPmf`] is a dense row-major tensor over an ordered list of named
//! variables (the last variable varies fastest). All logarithms are base 2,
//! so every measure is in bits. `0 log 0` is taken as `0`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Tolerance on total mass and on kernel row sums for input distributions.
pub const MASS_TOL: f64 = 1e-12;

/// Tolerance applied to derived quantities (Markov checks, nonnegativity).
pub const DERIVED_TOL: f64 = 1e-9;

/// Variable labels used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
    U,
    V,
    W,
    A,
    B,
}

impl Var {
    pub const ALL: [Var; 7] = [Var::X, Var::Y, Var::U, Var::V, Var::W, Var::A, Var::B];

    pub fn as_str(self) -> &'static str {
        match self {
            Var::X => "X",
            Var::Y => "Y",
            Var::U => "U",
            Var::V => "V",
            Var::W => "W",
            Var::A => "A",
            Var::B => "B",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Var {
    type Err = MeasureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Var::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| MeasureError::UnknownName(s.to_string()))
    }
}

/// A named finite alphabet `{0, .., size-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    pub var: Var,
    pub size: usize,
}

impl Alphabet {
    pub fn new(var: Var, size: usize) -> Self {
        Alphabet { var, size }
    }
}

/// Why a tensor failed to be a pmf.
#[derive(Debug, Clone, PartialEq)]
pub enum PmfViolation {
    EmptyAlphabet(Var),
    DuplicateVar(Var),
    Shape { expected: usize, actual: usize },
    NotFinite { index: Vec<usize> },
    Negative { index: Vec<usize>, value: f64 },
    Mass { total: f64 },
}

impl fmt::Display for PmfViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PmfViolation::EmptyAlphabet(v) => write!(f, "alphabet of {v} is empty"),
            PmfViolation::DuplicateVar(v) => write!(f, "variable {v} appears twice"),
            PmfViolation::Shape { expected, actual } => {
                write!(f, "tensor has {actual} entries, alphabets require {expected}")
            }
            PmfViolation::NotFinite { index } => {
                write!(f, "non-finite entry at {}", fmt_index(index))
            }
            PmfViolation::Negative { index, .. } => {
                write!(f, "negative entry at {}", fmt_index(index))
            }
            PmfViolation::Mass { total } => {
                let shown = format!("{total:.12}");
                write!(f, "mass {} ≠ 1", shown.trim_end_matches('0').trim_end_matches('.'))
            }
        }
    }
}

fn fmt_index(index: &[usize]) -> String {
    let parts: Vec<String> = index.iter().map(|i| i.to_string()).collect();
    format!("({})", parts.join(","))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("invalid pmf: {0}")]
    Invalid(PmfViolation),
    #[error("variable {0} is not part of the distribution")]
    UnknownVar(Var),
    #[error("unknown variable name {0:?}")]
    UnknownName(String),
    #[error("variable {0} appears in more than one argument set")]
    Overlap(Var),
    #[error("variable {0} is already present in the base distribution")]
    AlreadyPresent(Var),
    #[error("channel input {var} has size {channel} but the base alphabet has size {base}")]
    InputMismatch { var: Var, channel: usize, base: usize },
    #[error("channel row {row} is not a pmf: {reason}")]
    BadKernelRow { row: usize, reason: String },
    #[error("channel kernel has {actual} entries, expected {expected}")]
    KernelShape { expected: usize, actual: usize },
}

/// Checks the pmf invariants of a raw tensor without constructing it.
pub fn validate_pmf(vars: &[Alphabet], probs: &[f64]) -> Result<(), PmfViolation> {
    for (i, a) in vars.iter().enumerate() {
        if a.size == 0 {
            return Err(PmfViolation::EmptyAlphabet(a.var));
        }
        if vars[..i].iter().any(|b| b.var == a.var) {
            return Err(PmfViolation::DuplicateVar(a.var));
        }
    }
    let expected: usize = vars.iter().map(|a| a.size).product();
    if expected != probs.len() {
        return Err(PmfViolation::Shape { expected, actual: probs.len() });
    }
    let sizes: Vec<usize> = vars.iter().map(|a| a.size).collect();
    let mut total = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() {
            return Err(PmfViolation::NotFinite { index: unravel(i, &sizes) });
        }
        if p < 0.0 {
            return Err(PmfViolation::Negative { index: unravel(i, &sizes), value: p });
        }
        total += p;
    }
    if (total - 1.0).abs() > MASS_TOL {
        return Err(PmfViolation::Mass { total });
    }
    Ok(())
}

/// Row-major multi-index of a flat offset.
pub fn unravel(mut flat: usize, sizes: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; sizes.len()];
    for d in (0..sizes.len()).rev() {
        idx[d] = flat % sizes[d];
        flat /= sizes[d];
    }
    idx
}

/// Flat offset of a row-major multi-index.
pub fn ravel(idx: &[usize], sizes: &[usize]) -> usize {
    idx.iter().zip(sizes).fold(0, |acc, (&i, &s)| acc * s + i)
}

/// Dense joint pmf over named finite variables.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    vars: Vec<Alphabet>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(vars: Vec<Alphabet>, probs: Vec<f64>) -> Result<Self, MeasureError> {
        validate_pmf(&vars, &probs).map_err(MeasureError::Invalid)?;
        Ok(JointPmf { vars, probs })
    }

    /// Builds a pmf from a function of the multi-index.
    pub fn from_fn(
        vars: Vec<Alphabet>,
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> Result<Self, MeasureError> {
        let sizes: Vec<usize> = vars.iter().map(|a| a.size).collect();
        let total: usize = sizes.iter().product();
        let probs = (0..total).map(|i| f(&unravel(i, &sizes))).collect();
        JointPmf::new(vars, probs)
    }

    /// Point mass on a single variable with a one-symbol alphabet.
    pub fn constant(var: Var) -> Self {
        JointPmf { vars: vec![Alphabet::new(var, 1)], probs: vec![1.0] }
    }

    pub fn vars(&self) -> &[Alphabet] {
        &self.vars
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.vars.iter().map(|a| a.size).collect()
    }

    pub fn has(&self, var: Var) -> bool {
        self.vars.iter().any(|a| a.var == var)
    }

    pub fn position(&self, var: Var) -> Result<usize, MeasureError> {
        self.vars.iter().position(|a| a.var == var).ok_or(MeasureError::UnknownVar(var))
    }

    pub fn card(&self, var: Var) -> Result<usize, MeasureError> {
        Ok(self.vars[self.position(var)?].size)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.probs[ravel(idx, &self.sizes())]
    }

    /// Marginal on `keep`. The result lists its variables in this pmf's order,
    /// not in the order of `keep`.
    pub fn marginal(&self, keep: &[Var]) -> Result<JointPmf, MeasureError> {
        let mask = self.mask(keep)?;
        let vars: Vec<Alphabet> =
            self.vars.iter().zip(&mask).filter(|(_, &k)| k).map(|(a, _)| *a).collect();
        let probs = self.project(&mask);
        Ok(JointPmf { vars, probs })
    }

    /// Reorders the variables of this pmf.
    pub fn permuted(&self, order: &[Var]) -> Result<JointPmf, MeasureError> {
        let pos: Vec<usize> = order.iter().map(|&v| self.position(v)).collect::<Result<_, _>>()?;
        if pos.len() != self.vars.len() {
            let missing = self.vars.iter().find(|a| !order.contains(&a.var)).map(|a| a.var);
            return Err(MeasureError::UnknownVar(missing.unwrap_or(order[0])));
        }
        let vars: Vec<Alphabet> = pos.iter().map(|&p| self.vars[p]).collect();
        let sizes = self.sizes();
        let new_sizes: Vec<usize> = vars.iter().map(|a| a.size).collect();
        let mut probs = vec![0.0; self.probs.len()];
        let mut new_idx = vec![0; pos.len()];
        for (i, &p) in self.probs.iter().enumerate() {
            let idx = unravel(i, &sizes);
            for (k, &src) in pos.iter().enumerate() {
                new_idx[k] = idx[src];
            }
            probs[ravel(&new_idx, &new_sizes)] = p;
        }
        Ok(JointPmf { vars, probs })
    }

    fn mask(&self, set: &[Var]) -> Result<Vec<bool>, MeasureError> {
        let mut mask = vec![false; self.vars.len()];
        for &v in set {
            let p = self.position(v)?;
            mask[p] = true;
        }
        Ok(mask)
    }

    /// Sums out every variable whose mask entry is false.
    fn project(&self, mask: &[bool]) -> Vec<f64> {
        let nd = self.vars.len();
        let mut out_stride = vec![0usize; nd];
        let mut out_len = 1usize;
        for d in (0..nd).rev() {
            if mask[d] {
                out_stride[d] = out_len;
                out_len *= self.vars[d].size;
            }
        }
        let mut out = vec![0.0; out_len];
        if out_len == self.probs.len() {
            out.copy_from_slice(&self.probs);
            return out;
        }
        let mut digits = vec![0usize; nd];
        let mut oi = 0usize;
        for &p in &self.probs {
            out[oi] += p;
            for d in (0..nd).rev() {
                digits[d] += 1;
                oi += out_stride[d];
                if digits[d] < self.vars[d].size {
                    break;
                }
                oi -= out_stride[d] * self.vars[d].size;
                digits[d] = 0;
            }
        }
        out
    }

    fn entropy_mask(&self, mask: &[bool]) -> f64 {
        if !mask.iter().any(|&m| m) {
            return 0.0;
        }
        // Adding 0.0 clears the sign of a point mass's -0.0.
        self.project(mask).iter().filter(|&&q| q > 0.0).map(|&q| -q * q.log2()).sum::<f64>() + 0.0
    }
}

fn union_mask(pmf: &JointPmf, sets: &[&[Var]]) -> Result<Vec<bool>, MeasureError> {
    let mut mask = vec![false; pmf.vars.len()];
    for set in sets {
        for &v in *set {
            mask[pmf.position(v)?] = true;
        }
    }
    Ok(mask)
}

fn check_disjoint(sets: &[&[Var]]) -> Result<(), MeasureError> {
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate() {
            if i < j {
                if let Some(&v) = a.iter().find(|v| b.contains(v)) {
                    return Err(MeasureError::Overlap(v));
                }
            }
        }
    }
    Ok(())
}

/// Marginal on `keep`; see [`JointPmf::marginal`].
pub fn marginal(pmf: &JointPmf, keep: &[Var]) -> Result<JointPmf, MeasureError> {
    pmf.marginal(keep)
}

/// `H(vars)` in bits. The empty set has entropy zero.
pub fn entropy(pmf: &JointPmf, vars: &[Var]) -> Result<f64, MeasureError> {
    Ok(pmf.entropy_mask(&union_mask(pmf, &[vars])?))
}

/// `H(a | b) = H(a, b) - H(b)`.
pub fn cond_entropy(pmf: &JointPmf, a: &[Var], b: &[Var]) -> Result<f64, MeasureError> {
    check_disjoint(&[a, b])?;
    let ab = union_mask(pmf, &[a, b])?;
    let bm = union_mask(pmf, &[b])?;
    Ok(pmf.entropy_mask(&ab) - pmf.entropy_mask(&bm))
}

/// `I(a; b) = H(a) + H(b) - H(a, b)`.
pub fn mutual_info(pmf: &JointPmf, a: &[Var], b: &[Var]) -> Result<f64, MeasureError> {
    cond_mutual_info(pmf, a, b, &[])
}

/// `I(a; b | c) = H(a, c) + H(b, c) - H(a, b, c) - H(c)`.
pub fn cond_mutual_info(
    pmf: &JointPmf,
    a: &[Var],
    b: &[Var],
    c: &[Var],
) -> Result<f64, MeasureError> {
    check_disjoint(&[a, b, c])?;
    let ac = union_mask(pmf, &[a, c])?;
    let bc = union_mask(pmf, &[b, c])?;
    let abc = union_mask(pmf, &[a, b, c])?;
    let cm = union_mask(pmf, &[c])?;
    Ok(pmf.entropy_mask(&ac) + pmf.entropy_mask(&bc)
        - pmf.entropy_mask(&abc)
        - pmf.entropy_mask(&cm))
}

/// Conditional pmf of `outputs` given `inputs`.
///
/// The kernel is stored row-major: one row per input tuple (inputs in the
/// listed order, last fastest), one column per output tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxChannel {
    inputs: Vec<Alphabet>,
    outputs: Vec<Alphabet>,
    kernel: Vec<f64>,
}

impl AuxChannel {
    pub fn new(
        inputs: Vec<Alphabet>,
        outputs: Vec<Alphabet>,
        kernel: Vec<f64>,
    ) -> Result<Self, MeasureError> {
        let rows: usize = inputs.iter().map(|a| a.size).product();
        let cols: usize = outputs.iter().map(|a| a.size).product();
        for a in inputs.iter().chain(&outputs) {
            if a.size == 0 {
                return Err(MeasureError::Invalid(PmfViolation::EmptyAlphabet(a.var)));
            }
        }
        if kernel.len() != rows * cols {
            return Err(MeasureError::KernelShape { expected: rows * cols, actual: kernel.len() });
        }
        for r in 0..rows {
            let row = &kernel[r * cols..(r + 1) * cols];
            if let Some(c) = row.iter().position(|p| !p.is_finite() || *p < 0.0) {
                return Err(MeasureError::BadKernelRow {
                    row: r,
                    reason: format!("entry {c} is {}", row[c]),
                });
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > MASS_TOL {
                return Err(MeasureError::BadKernelRow { row: r, reason: format!("sums to {s}") });
            }
        }
        Ok(AuxChannel { inputs, outputs, kernel })
    }

    /// Output is a deterministic function of the input.
    pub fn deterministic(
        inputs: Vec<Alphabet>,
        output: Alphabet,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<Self, MeasureError> {
        let sizes: Vec<usize> = inputs.iter().map(|a| a.size).collect();
        let rows: usize = sizes.iter().product();
        let mut kernel = vec![0.0; rows * output.size];
        for r in 0..rows {
            let o = f(&unravel(r, &sizes));
            if o >= output.size {
                return Err(MeasureError::BadKernelRow {
                    row: r,
                    reason: format!("output symbol {o} out of range"),
                });
            }
            kernel[r * output.size + o] = 1.0;
        }
        AuxChannel::new(inputs, vec![output], kernel)
    }

    /// Output alphabet of size one.
    pub fn constant(inputs: Vec<Alphabet>, output: Var) -> Self {
        let rows = inputs.iter().map(|a| a.size).product();
        AuxChannel { inputs, outputs: vec![Alphabet::new(output, 1)], kernel: vec![1.0; rows] }
    }

    pub fn inputs(&self) -> &[Alphabet] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Alphabet] {
        &self.outputs
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    pub fn rows(&self) -> usize {
        self.inputs.iter().map(|a| a.size).product()
    }

    pub fn cols(&self) -> usize {
        self.outputs.iter().map(|a| a.size).product()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let c = self.cols();
        &self.kernel[r * c..(r + 1) * c]
    }

    /// Cardinality of a single output variable.
    pub fn output_card(&self, var: Var) -> Option<usize> {
        self.outputs.iter().find(|a| a.var == var).map(|a| a.size)
    }
}

/// Joint of `base` and the channel outputs: `p(o, base) = k(o | inputs) base`.
/// Output variables are appended after the base variables.
pub fn attach_channel(base: &JointPmf, ch: &AuxChannel) -> Result<JointPmf, MeasureError> {
    let nd = base.vars.len();
    let mut in_stride = vec![0usize; nd];
    let mut stride = 1usize;
    for a in ch.inputs.iter().rev() {
        let p = base.position(a.var)?;
        let size = base.vars[p].size;
        if size != a.size {
            return Err(MeasureError::InputMismatch { var: a.var, channel: a.size, base: size });
        }
        in_stride[p] = stride;
        stride *= size;
    }
    for o in &ch.outputs {
        if base.has(o.var) {
            return Err(MeasureError::AlreadyPresent(o.var));
        }
    }
    let cols = ch.cols();
    let mut probs = Vec::with_capacity(base.probs.len() * cols);
    let mut digits = vec![0usize; nd];
    let mut row = 0usize;
    for &p in &base.probs {
        let k = &ch.kernel[row * cols..(row + 1) * cols];
        probs.extend(k.iter().map(|&q| q * p));
        for d in (0..nd).rev() {
            digits[d] += 1;
            row += in_stride[d];
            if digits[d] < base.vars[d].size {
                break;
            }
            row -= in_stride[d] * base.vars[d].size;
            digits[d] = 0;
        }
    }
    let mut vars = base.vars.clone();
    vars.extend(ch.outputs.iter().copied());
    Ok(JointPmf { vars, probs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(var: Var) -> Alphabet {
        Alphabet::new(var, 2)
    }

    fn h2(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.ln() / std::f64::consts::LN_2 - (1.0 - p) * (1.0 - p).ln() / std::f64::consts::LN_2
        }
    }

    fn dsbs(q: f64) -> JointPmf {
        JointPmf::new(
            vec![bin(Var::X), bin(Var::Y)],
            vec![(1.0 - q) / 2.0, q / 2.0, q / 2.0, (1.0 - q) / 2.0],
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        let xy = [bin(Var::X), bin(Var::Y)];
        assert_eq!(validate_pmf(&xy, &[0.25; 4]), Ok(()));
        let neg = validate_pmf(&xy, &[0.6, -0.1, 0.25, 0.25]).unwrap_err();
        assert_eq!(neg.to_string(), "negative entry at (0,1)");
        let mass = validate_pmf(&xy, &[0.3, 0.2, 0.2, 0.2]).unwrap_err();
        match mass {
            PmfViolation::Mass { total } => assert!((total - 0.9).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(mass.to_string().starts_with("mass 0.9"));
        assert!(matches!(
            validate_pmf(&xy, &[0.5, 0.5]),
            Err(PmfViolation::Shape { expected: 4, actual: 2 })
        ));
        assert!(matches!(
            validate_pmf(&[bin(Var::X), bin(Var::X)], &[0.25; 4]),
            Err(PmfViolation::DuplicateVar(Var::X))
        ));
    }

    #[test]
    fn marginal_examples() {
        let p = dsbs(0.25);
        assert_eq!(p.marginal(&[Var::Y, Var::X]).unwrap(), p);
        let x = p.marginal(&[Var::X]).unwrap();
        assert_eq!(x.probs(), &[0.5, 0.5]);
        assert_eq!(p.marginal(&[Var::U]), Err(MeasureError::UnknownVar(Var::U)));
    }

    #[test]
    fn entropy_examples() {
        let uni4 = JointPmf::new(vec![Alphabet::new(Var::X, 4)], vec![0.25; 4]).unwrap();
        assert_eq!(entropy(&uni4, &[Var::X]).unwrap(), 2.0);
        let b = JointPmf::new(vec![bin(Var::X)], vec![0.8, 0.2]).unwrap();
        assert!((entropy(&b, &[Var::X]).unwrap() - h2(0.2)).abs() < 1e-12);
        assert!((entropy(&b, &[Var::X]).unwrap() - 0.721928).abs() < 1e-6);
        let point = JointPmf::new(vec![Alphabet::new(Var::X, 3)], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(entropy(&point, &[Var::X]).unwrap(), 0.0);
    }

    #[test]
    fn conditional_examples() {
        let p = dsbs(0.25);
        assert_eq!(cond_entropy(&p, &[Var::X], &[Var::X]), Err(MeasureError::Overlap(Var::X)));
        let hxy = cond_entropy(&p, &[Var::X], &[Var::Y]).unwrap();
        assert!((hxy - h2(0.25)).abs() < 1e-12);
        assert!((hxy - 0.811278).abs() < 1e-6);
        let ixy = mutual_info(&p, &[Var::X], &[Var::Y]).unwrap();
        assert!((ixy - (1.0 - h2(0.25))).abs() < 1e-12);
        assert!((ixy - 0.188722).abs() < 1e-6);

        // H(X|X) is zero when expressed through a copy of X.
        let copy = AuxChannel::deterministic(vec![bin(Var::X)], bin(Var::W), |i| i[0]).unwrap();
        let pw = attach_channel(&p, &copy).unwrap();
        assert!(cond_entropy(&pw, &[Var::X], &[Var::W]).unwrap().abs() < 1e-12);
        let ixx = mutual_info(&pw, &[Var::X], &[Var::W]).unwrap();
        assert!((ixx - entropy(&pw, &[Var::X]).unwrap()).abs() < 1e-12);
        assert!(cond_mutual_info(&pw, &[Var::X], &[Var::Y], &[Var::W]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn independent_conditioning() {
        let ind = JointPmf::new(vec![bin(Var::X), bin(Var::U)], vec![0.08, 0.12, 0.32, 0.48])
            .unwrap();
        let hx = entropy(&ind, &[Var::X]).unwrap();
        assert!((cond_entropy(&ind, &[Var::X], &[Var::U]).unwrap() - hx).abs() < 1e-12);
        assert!(mutual_info(&ind, &[Var::X], &[Var::U]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn attach_constant_and_copy() {
        let p = dsbs(0.25);
        let c = AuxChannel::constant(vec![bin(Var::X), bin(Var::Y)], Var::W);
        let pw = attach_channel(&p, &c).unwrap();
        assert_eq!(pw.probs(), p.probs());
        assert_eq!(pw.card(Var::W).unwrap(), 1);
        let copy = AuxChannel::deterministic(vec![bin(Var::X)], bin(Var::W), |i| i[0]).unwrap();
        let pw = attach_channel(&p, &copy).unwrap();
        assert_eq!(entropy(&pw, &[Var::W]).unwrap(), entropy(&pw, &[Var::X]).unwrap());
        assert_eq!(pw.marginal(&[Var::X, Var::Y]).unwrap(), p);
    }

    #[test]
    fn attach_errors() {
        let p = dsbs(0.25);
        let wrong = AuxChannel::constant(vec![Alphabet::new(Var::X, 3)], Var::W);
        assert!(matches!(attach_channel(&p, &wrong), Err(MeasureError::InputMismatch { .. })));
        let missing = AuxChannel::constant(vec![bin(Var::U)], Var::W);
        assert_eq!(attach_channel(&p, &missing), Err(MeasureError::UnknownVar(Var::U)));
        let clash = AuxChannel::constant(vec![bin(Var::X)], Var::Y);
        assert_eq!(attach_channel(&p, &clash), Err(MeasureError::AlreadyPresent(Var::Y)));
    }

    #[test]
    fn kernel_rows_validated() {
        let err = AuxChannel::new(vec![bin(Var::X)], vec![bin(Var::W)], vec![0.5, 0.5, 0.7, 0.2])
            .unwrap_err();
        assert!(matches!(err, MeasureError::BadKernelRow { row: 1, .. }));
    }

    #[test]
    fn permute_round_trip() {
        let p = JointPmf::new(
            vec![bin(Var::X), Alphabet::new(Var::U, 3)],
            vec![0.1, 0.2, 0.05, 0.3, 0.15, 0.2],
        )
        .unwrap();
        let q = p.permuted(&[Var::U, Var::X]).unwrap();
        assert_eq!(q.get(&[2, 1]), p.get(&[1, 2]));
        assert_eq!(q.permuted(&[Var::X, Var::U]).unwrap(), p);
    }
}
