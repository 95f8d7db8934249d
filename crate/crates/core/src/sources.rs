//! Source distributions `Q(x, y, u, v)` used by the checks, the CLI presets
//! and the tests.
//!
//! Every source is a [`JointPmf`] over exactly `(X, Y, U, V)` in that order.

use crate::measures::{Alphabet, JointPmf, MeasureError, Var};

pub const SOURCE_VARS: [Var; 4] = [Var::X, Var::Y, Var::U, Var::V];

/// Fails unless `pmf` is laid out as `(X, Y, U, V)`.
pub fn check_layout(pmf: &JointPmf) -> Result<(), MeasureError> {
    let vars: Vec<Var> = pmf.vars().iter().map(|a| a.var).collect();
    for (i, v) in SOURCE_VARS.iter().enumerate() {
        if vars.get(i) != Some(v) {
            return Err(MeasureError::UnknownVar(*v));
        }
    }
    if vars.len() != 4 {
        return Err(MeasureError::AlreadyPresent(vars[4]));
    }
    Ok(())
}

pub fn from_table(sizes: [usize; 4], probs: Vec<f64>) -> Result<JointPmf, MeasureError> {
    let vars = SOURCE_VARS.iter().zip(sizes).map(|(&v, s)| Alphabet::new(v, s)).collect();
    JointPmf::new(vars, probs)
}

/// Lifts a pmf over `(X, Y)` to a source with constant side information.
pub fn without_side_info(qxy: &JointPmf) -> Result<JointPmf, MeasureError> {
    let q = qxy.permuted(&[Var::X, Var::Y])?;
    let (nx, ny) = (q.card(Var::X)?, q.card(Var::Y)?);
    from_table([nx, ny, 1, 1], q.probs().to_vec())
}

/// Complementary delivery: each receiver observes the other source, `U = Y`
/// and `V = X`.
pub fn complementary_delivery(qxy: &JointPmf) -> Result<JointPmf, MeasureError> {
    let q = qxy.permuted(&[Var::X, Var::Y])?;
    let (nx, ny) = (q.card(Var::X)?, q.card(Var::Y)?);
    let vars = vec![
        Alphabet::new(Var::X, nx),
        Alphabet::new(Var::Y, ny),
        Alphabet::new(Var::U, ny),
        Alphabet::new(Var::V, nx),
    ];
    JointPmf::from_fn(vars, |i| if i[2] == i[1] && i[3] == i[0] { q.get(&i[..2]) } else { 0.0 })
}

/// Doubly symmetric binary pmf over `(X, Y)`: X uniform, `Y = X xor Bern(q)`.
pub fn dsbs_xy(q: f64) -> Result<JointPmf, MeasureError> {
    JointPmf::new(
        vec![Alphabet::new(Var::X, 2), Alphabet::new(Var::Y, 2)],
        vec![(1.0 - q) / 2.0, q / 2.0, q / 2.0, (1.0 - q) / 2.0],
    )
}

/// DSBS(q) with constant side information at both receivers.
pub fn dsbs(q: f64) -> Result<JointPmf, MeasureError> {
    without_side_info(&dsbs_xy(q)?)
}

/// DSBS(q) in the complementary-delivery configuration.
pub fn compdel_dsbs(q: f64) -> Result<JointPmf, MeasureError> {
    complementary_delivery(&dsbs_xy(q)?)
}

fn bern(q: f64, bit: usize) -> f64 {
    if bit == 1 {
        q
    } else {
        1.0 - q
    }
}

/// Single source `X = Y ~ Bern(1/2)` with `U = X xor Bern(qu)` and
/// `V = X xor Bern(qv)`.
pub fn sgarro(qu: f64, qv: f64) -> Result<JointPmf, MeasureError> {
    from_fn4([2, 2, 2, 2], |x, y, u, v| {
        if x != y {
            0.0
        } else {
            0.5 * bern(qu, u ^ x) * bern(qv, v ^ x)
        }
    })
}

/// `X ~ Bern(1/2)`, `Y = X xor Bern(q)`, `U = Y`, `V` constant. Here
/// `(X, Y) - U - V` is trivially a Markov chain.
pub fn markov_dsbs(q: f64) -> Result<JointPmf, MeasureError> {
    from_fn4([2, 2, 2, 1], |x, y, u, _| if u == y { 0.5 * bern(q, x ^ y) } else { 0.0 })
}

/// `Y = (X, Z)` encoded as `2x + z`, with `X ~ Bern(1/2)`,
/// `Z = X xor Bern(q)`, `U = Z xor Bern(qu)` and `V` constant.
pub fn degraded(q: f64, qu: f64) -> Result<JointPmf, MeasureError> {
    from_fn4([2, 4, 2, 1], |x, y, u, _| {
        let (yx, z) = (y / 2, y % 2);
        if yx != x {
            0.0
        } else {
            0.5 * bern(q, x ^ z) * bern(qu, z ^ u)
        }
    })
}

/// Every alphabet has a single symbol.
pub fn constant() -> JointPmf {
    from_table([1, 1, 1, 1], vec![1.0]).expect("point mass is a pmf")
}

fn from_fn4(
    sizes: [usize; 4],
    f: impl Fn(usize, usize, usize, usize) -> f64,
) -> Result<JointPmf, MeasureError> {
    let vars = SOURCE_VARS.iter().zip(sizes).map(|(&v, s)| Alphabet::new(v, s)).collect();
    JointPmf::from_fn(vars, |i| f(i[0], i[1], i[2], i[3]))
}
