//! Per-distribution rate regions over `(R0, R1, R2)`.
//!
//! Each region is a system of at most three lower bounds on the rates. The
//! Gray-Wyner, inner, single-source (`*`) and complementary-delivery (`**`)
//! regions are corners (axis-aligned bounds only); the outer region bounds
//! `R0`, `R0 + R1` and `R0 + R2`.

use std::fmt;

use thiserror::Error;

use crate::measures::{cond_entropy, cond_mutual_info, JointPmf, MeasureError, Var, DERIVED_TOL};

/// Slack allowed by [`contains`].
pub const CONTAINS_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("distribution does not factor through the source: {what} = {value:.3e}")]
    Markov { what: &'static str, value: f64 },
    #[error("|{var}| = {size} exceeds the cardinality cap {cap}")]
    Cardinality { var: Var, size: usize, cap: usize },
}

/// A rate triple in bits per source symbol.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateTriple {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
}

impl RateTriple {
    pub const fn new(r0: f64, r1: f64, r2: f64) -> Self {
        RateTriple { r0, r1, r2 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.r0, self.r1, self.r2]
    }

    pub fn sum(&self) -> f64 {
        self.r0 + self.r1 + self.r2
    }

    pub fn dot(&self, w: [f64; 3]) -> f64 {
        w[0] * self.r0 + w[1] * self.r1 + w[2] * self.r2
    }
}

impl From<[f64; 3]> for RateTriple {
    fn from(a: [f64; 3]) -> Self {
        RateTriple::new(a[0], a[1], a[2])
    }
}

impl fmt::Display for RateTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6}, {:.6})", self.r0, self.r1, self.r2)
    }
}

/// Left-hand side of a constraint. Only these five rate combinations occur.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Face {
    R0,
    R1,
    R2,
    R0R1,
    R0R2,
}

impl Face {
    pub fn coeffs(self) -> [f64; 3] {
        match self {
            Face::R0 => [1.0, 0.0, 0.0],
            Face::R1 => [0.0, 1.0, 0.0],
            Face::R2 => [0.0, 0.0, 1.0],
            Face::R0R1 => [1.0, 1.0, 0.0],
            Face::R0R2 => [1.0, 0.0, 1.0],
        }
    }

    pub fn is_axis(self) -> bool {
        matches!(self, Face::R0 | Face::R1 | Face::R2)
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Face::R0 => "R0",
            Face::R1 => "R1",
            Face::R2 => "R2",
            Face::R0R1 => "R0+R1",
            Face::R0R2 => "R0+R2",
        })
    }
}

/// `face · R >= bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub face: Face,
    pub bound: f64,
}

impl Constraint {
    pub fn slack(&self, t: &RateTriple) -> f64 {
        t.dot(self.face.coeffs()) - self.bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceRegion {
    constraints: Vec<Constraint>,
    /// The two operands whose maximum became the `R0` term, when the region
    /// has one.
    pub r0_operands: Option<[f64; 2]>,
}

impl HalfspaceRegion {
    /// Negative bounds (rounding noise from differences of entropies) are
    /// clamped to zero.
    pub fn new(constraints: impl IntoIterator<Item = Constraint>) -> Self {
        let constraints = constraints
            .into_iter()
            .map(|c| Constraint { face: c.face, bound: c.bound.max(0.0) })
            .collect();
        HalfspaceRegion { constraints, r0_operands: None }
    }

    pub fn corner(t: RateTriple) -> Self {
        HalfspaceRegion::new([
            Constraint { face: Face::R0, bound: t.r0 },
            Constraint { face: Face::R1, bound: t.r1 },
            Constraint { face: Face::R2, bound: t.r2 },
        ])
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bound(&self, face: Face) -> Option<f64> {
        self.constraints.iter().find(|c| c.face == face).map(|c| c.bound)
    }

    /// Bound values in constraint order.
    pub fn bounds(&self) -> Vec<f64> {
        self.constraints.iter().map(|c| c.bound).collect()
    }

    /// The minimal point, if every constraint is axis-aligned.
    pub fn as_corner(&self) -> Option<RateTriple> {
        if !self.constraints.iter().all(|c| c.face.is_axis()) {
            return None;
        }
        let b = |f| self.bound(f).unwrap_or(0.0);
        Some(RateTriple::new(b(Face::R0), b(Face::R1), b(Face::R2)))
    }

    /// Most negative constraint slack at `t` (positive means strictly inside).
    pub fn min_slack(&self, t: &RateTriple) -> f64 {
        self.constraints.iter().map(|c| c.slack(t)).fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn with_operands(mut self, ops: [f64; 2]) -> Self {
        self.r0_operands = Some(ops);
        self
    }
}

impl fmt::Display for HalfspaceRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.constraints.iter().map(|c| format!("{} >= {:.6}", c.face, c.bound)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// True iff `t` satisfies every constraint with slack at least `-1e-9`.
pub fn contains(region: &HalfspaceRegion, t: &RateTriple) -> bool {
    region.min_slack(t) >= -CONTAINS_TOL
}

/// Gray-Wyner region without side information:
/// `R0 >= I(X,Y;W)`, `R1 >= H(X|W)`, `R2 >= H(Y|W)`.
pub fn gw_region(joint: &JointPmf) -> Result<HalfspaceRegion, RegionError> {
    use Var::*;
    let r0 = cond_mutual_info(joint, &[X, Y], &[W], &[])?;
    let r1 = cond_entropy(joint, &[X], &[W])?;
    let r2 = cond_entropy(joint, &[Y], &[W])?;
    Ok(HalfspaceRegion::corner(RateTriple::new(r0, r1, r2)))
}

/// Terms shared by the inner and outer regions.
struct SideInfoTerms {
    common_u: f64,
    common_v: f64,
    private_x: f64,
    private_y: f64,
}

impl SideInfoTerms {
    fn common(&self) -> f64 {
        self.common_u.max(self.common_v)
    }
}

fn side_info_terms(joint: &JointPmf) -> Result<SideInfoTerms, RegionError> {
    use Var::*;
    let markov = cond_mutual_info(joint, &[W], &[U, V], &[X, Y])?;
    if markov > DERIVED_TOL {
        return Err(RegionError::Markov { what: "I(W;U,V|X,Y)", value: markov });
    }
    Ok(SideInfoTerms {
        common_u: cond_mutual_info(joint, &[X, Y], &[W], &[U])?,
        common_v: cond_mutual_info(joint, &[X, Y], &[W], &[V])?,
        private_x: cond_entropy(joint, &[X], &[W, U])?,
        private_y: cond_entropy(joint, &[Y], &[W, V])?,
    })
}

/// Inner bound corner:
/// `R0 >= max{I(X,Y;W|U), I(X,Y;W|V)}`, `R1 >= H(X|W,U)`, `R2 >= H(Y|W,V)`.
pub fn inner_region(joint: &JointPmf) -> Result<HalfspaceRegion, RegionError> {
    let t = side_info_terms(joint)?;
    Ok(HalfspaceRegion::corner(RateTriple::new(t.common(), t.private_x, t.private_y))
        .with_operands([t.common_u, t.common_v]))
}

/// Outer bound: `R0 >= m`, `R0 + R1 >= m + H(X|W,U)`, `R0 + R2 >= m + H(Y|W,V)`
/// where `m = max{I(X,Y;W|U), I(X,Y;W|V)}`.
pub fn outer_region(joint: &JointPmf) -> Result<HalfspaceRegion, RegionError> {
    let t = side_info_terms(joint)?;
    let m = t.common();
    Ok(HalfspaceRegion::new([
        Constraint { face: Face::R0, bound: m },
        Constraint { face: Face::R0R1, bound: m + t.private_x },
        Constraint { face: Face::R0R2, bound: m + t.private_y },
    ])
    .with_operands([t.common_u, t.common_v]))
}

/// One receiver's share of a two-auxiliary region: `H(target | aux, side)`
/// and `I(target; aux | side)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxHalf {
    pub residual: f64,
    pub info: f64,
}

pub fn aux_half(
    joint: &JointPmf,
    target: Var,
    aux: Var,
    side: Var,
) -> Result<AuxHalf, RegionError> {
    Ok(AuxHalf {
        residual: cond_entropy(joint, &[target], &[aux, side])?,
        info: cond_mutual_info(joint, &[target], &[aux], &[side])?,
    })
}

/// Corner `R0 >= max{a.residual, b.residual}`, `R1 >= a.info`, `R2 >= b.info`.
pub fn corner_from_halves(a: AuxHalf, b: AuxHalf) -> HalfspaceRegion {
    HalfspaceRegion::corner(RateTriple::new(a.residual.max(b.residual), a.info, b.info))
        .with_operands([a.residual, b.residual])
}

fn check_cap(joint: &JointPmf, var: Var, cap: usize) -> Result<(), RegionError> {
    let size = joint.card(var)?;
    if size > cap {
        return Err(RegionError::Cardinality { var, size, cap });
    }
    Ok(())
}

/// Single-source region (`X = Y`):
/// `R0 >= max{H(X|A,U), H(X|B,V)}`, `R1 >= I(X;A|U)`, `R2 >= I(X;B|V)`.
///
/// The joint must factor as `p(a,b|x) p(x,u,v)` and `|A|, |B| <= |X| + 1`.
pub fn star_region(joint: &JointPmf) -> Result<HalfspaceRegion, RegionError> {
    use Var::*;
    let cap = joint.card(X)? + 1;
    check_cap(joint, A, cap)?;
    check_cap(joint, B, cap)?;
    let markov = cond_mutual_info(joint, &[A, B], &[U, V], &[X])?;
    if markov > DERIVED_TOL {
        return Err(RegionError::Markov { what: "I(A,B;U,V|X)", value: markov });
    }
    Ok(corner_from_halves(aux_half(joint, X, A, U)?, aux_half(joint, X, B, V)?))
}

/// Complementary-delivery region (`U = Y`, `V = X`):
/// `R0 >= max{H(X|A,Y), H(Y|B,X)}`, `R1 >= I(X;A|Y)`, `R2 >= I(Y;B|X)`,
/// with `|A|, |B| <= |X||Y| + 1`.
pub fn starstar_region(joint: &JointPmf) -> Result<HalfspaceRegion, RegionError> {
    use Var::*;
    let cap = joint.card(X)? * joint.card(Y)? + 1;
    check_cap(joint, A, cap)?;
    check_cap(joint, B, cap)?;
    Ok(corner_from_halves(aux_half(joint, X, A, Y)?, aux_half(joint, Y, B, X)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{attach_channel, Alphabet, AuxChannel};
    use crate::sources;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    fn xy(source: &JointPmf) -> Vec<Alphabet> {
        vec![
            Alphabet::new(Var::X, source.card(Var::X).unwrap()),
            Alphabet::new(Var::Y, source.card(Var::Y).unwrap()),
        ]
    }

    fn with_w(source: &JointPmf, card: usize, f: impl Fn(&[usize]) -> usize) -> JointPmf {
        let ch = AuxChannel::deterministic(xy(source), Alphabet::new(Var::W, card), f).unwrap();
        attach_channel(source, &ch).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn gw_examples() {
        let s = sources::dsbs(0.25).unwrap();
        close(&gw_region(&with_w(&s, 1, |_| 0)).unwrap().bounds(), &[0.0, 1.0, 1.0], 1e-12);
        let pair = gw_region(&with_w(&s, 4, |i| 2 * i[0] + i[1])).unwrap();
        close(&pair.bounds(), &[1.0 + h2(0.25), 0.0, 0.0], 1e-12);
        close(&pair.bounds(), &[1.811278, 0.0, 0.0], 1e-6);
        let wx = gw_region(&with_w(&s, 2, |i| i[0])).unwrap();
        close(&wx.bounds(), &[1.0, 0.0, h2(0.25)], 1e-12);
    }

    #[test]
    fn gw_needs_w() {
        let s = sources::dsbs(0.25).unwrap();
        assert_eq!(gw_region(&s), Err(RegionError::Measure(MeasureError::UnknownVar(Var::W))));
    }

    #[test]
    fn inner_examples() {
        let s = sources::sgarro(0.1, 0.2).unwrap();
        let c = inner_region(&with_w(&s, 1, |_| 0)).unwrap();
        let hxu = cond_entropy(&s, &[Var::X], &[Var::U]).unwrap();
        let hyv = cond_entropy(&s, &[Var::Y], &[Var::V]).unwrap();
        close(&c.bounds(), &[0.0, hxu, hyv], 1e-12);

        let d = sources::dsbs(0.25).unwrap();
        let j = with_w(&d, 2, |i| i[0] ^ i[1]);
        close(&inner_region(&j).unwrap().bounds(), &gw_region(&j).unwrap().bounds(), 1e-12);

        let cd = sources::compdel_dsbs(0.25).unwrap();
        let r = inner_region(&with_w(&cd, 4, |i| 2 * i[0] + i[1])).unwrap();
        close(&r.bounds(), &[h2(0.25), 0.0, 0.0], 1e-12);
        close(&r.bounds(), &[0.811278, 0.0, 0.0], 1e-6);
    }

    #[test]
    fn inner_rejects_non_factoring_joint() {
        // W copies U, which the family forbids.
        let s = sources::sgarro(0.1, 0.2).unwrap();
        let u_copy = AuxChannel::deterministic(
            vec![Alphabet::new(Var::U, 2)],
            Alphabet::new(Var::W, 2),
            |i| i[0],
        )
        .unwrap();
        let j = attach_channel(&s, &u_copy).unwrap();
        assert!(matches!(inner_region(&j), Err(RegionError::Markov { .. })));
        assert!(matches!(outer_region(&j), Err(RegionError::Markov { .. })));
    }

    #[test]
    fn outer_examples() {
        let s = sources::sgarro(0.1, 0.2).unwrap();
        let o = outer_region(&with_w(&s, 1, |_| 0)).unwrap();
        let hxu = cond_entropy(&s, &[Var::X], &[Var::U]).unwrap();
        let hyv = cond_entropy(&s, &[Var::Y], &[Var::V]).unwrap();
        close(&o.bounds(), &[0.0, hxu, hyv], 1e-12);
        assert_eq!(o.constraints()[1].face, Face::R0R1);

        let d = sources::dsbs(0.25).unwrap();
        let o = outer_region(&with_w(&d, 4, |i| 2 * i[0] + i[1])).unwrap();
        let hxy = 1.0 + h2(0.25);
        close(&o.bounds(), &[hxy, hxy, hxy], 1e-12);
        close(&o.bounds(), &[1.811278; 3], 1e-6);
    }

    #[test]
    fn star_examples() {
        let s = sources::sgarro(0.1, 0.2).unwrap();
        let xuv = s.marginal(&[Var::X, Var::U, Var::V]).unwrap();
        let x = vec![Alphabet::new(Var::X, 2)];
        let ab_const = AuxChannel::new(
            x.clone(),
            vec![Alphabet::new(Var::A, 1), Alphabet::new(Var::B, 1)],
            vec![1.0, 1.0],
        )
        .unwrap();
        let r = star_region(&attach_channel(&xuv, &ab_const).unwrap()).unwrap();
        let hxu = cond_entropy(&s, &[Var::X], &[Var::U]).unwrap();
        let hxv = cond_entropy(&s, &[Var::X], &[Var::V]).unwrap();
        close(&r.bounds(), &[hxu.max(hxv), 0.0, 0.0], 1e-12);
        assert!((r.as_corner().unwrap().sum() - h2(0.2)).abs() < 1e-12);
        assert!((r.as_corner().unwrap().sum() - 0.721928).abs() < 1e-6);

        // A = B = X.
        let ab_x = AuxChannel::new(
            x,
            vec![Alphabet::new(Var::A, 2), Alphabet::new(Var::B, 2)],
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let r = star_region(&attach_channel(&xuv, &ab_x).unwrap()).unwrap();
        close(&r.bounds(), &[0.0, hxu, hxv], 1e-12);
    }

    #[test]
    fn star_cardinality_cap() {
        let s = sources::sgarro(0.1, 0.2).unwrap();
        let xuv = s.marginal(&[Var::X, Var::U, Var::V]).unwrap();
        let big = AuxChannel::constant(vec![Alphabet::new(Var::X, 2)], Var::B);
        let mut kernel = vec![0.0; 8];
        kernel[0] = 1.0;
        kernel[4] = 1.0;
        let a4 = AuxChannel::new(
            vec![Alphabet::new(Var::X, 2)],
            vec![Alphabet::new(Var::A, 4)],
            kernel,
        )
        .unwrap();
        let j = attach_channel(&attach_channel(&xuv, &a4).unwrap(), &big).unwrap();
        assert_eq!(
            star_region(&j),
            Err(RegionError::Cardinality { var: Var::A, size: 4, cap: 3 })
        );
    }

    #[test]
    fn starstar_examples() {
        let q = sources::dsbs_xy(0.25).unwrap();
        let inputs = vec![Alphabet::new(Var::X, 2), Alphabet::new(Var::Y, 2)];
        let consts = AuxChannel::new(
            inputs.clone(),
            vec![Alphabet::new(Var::A, 1), Alphabet::new(Var::B, 1)],
            vec![1.0; 4],
        )
        .unwrap();
        let r = starstar_region(&attach_channel(&q, &consts).unwrap()).unwrap();
        close(&r.bounds(), &[h2(0.25), 0.0, 0.0], 1e-12);
        close(&r.bounds(), &[0.811278, 0.0, 0.0], 1e-6);

        let a = AuxChannel::deterministic(inputs.clone(), Alphabet::new(Var::A, 2), |i| i[0])
            .unwrap();
        let b = AuxChannel::deterministic(inputs, Alphabet::new(Var::B, 2), |i| i[1]).unwrap();
        let j = attach_channel(&attach_channel(&q, &a).unwrap(), &b).unwrap();
        let r = starstar_region(&j).unwrap();
        close(&r.bounds(), &[0.0, h2(0.25), h2(0.25)], 1e-12);
    }

    #[test]
    fn contains_examples() {
        let r0 = HalfspaceRegion::new([Constraint { face: Face::R0, bound: 1.0 }]);
        assert!(contains(&r0, &RateTriple::new(1.0, 0.0, 0.0)));
        assert!(contains(&r0, &RateTriple::new(0.999999999, 0.0, 0.0)));
        assert!(!contains(&r0, &RateTriple::new(0.99, 0.0, 0.0)));
        let r01 = HalfspaceRegion::new([Constraint { face: Face::R0R1, bound: 2.0 }]);
        assert!(!contains(&r01, &RateTriple::new(0.5, 1.0, 5.0)));
    }

    #[test]
    fn refining_u_with_x_kills_private_x_rate() {
        // Side information U' = (U, X) encoded as 2u + x.
        let s = sources::dsbs(0.25).unwrap();
        let refined = sources::from_table([2, 2, 2, 1], {
            let mut p = vec![0.0; 8];
            for x in 0..2 {
                for y in 0..2 {
                    p[(x * 2 + y) * 2 + x] = s.get(&[x, y, 0, 0]);
                }
            }
            p
        })
        .unwrap();
        let j = with_w(&refined, 1, |_| 0);
        assert!(inner_region(&j).unwrap().bound(Face::R1).unwrap().abs() < 1e-12);
    }
}
