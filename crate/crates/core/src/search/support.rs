//! Weighted minimization of `lambda . R` over a region in the nonnegative
//! octant.

use std::fmt;

use crate::regions::{HalfspaceRegion, RateTriple};

use super::SearchError;

/// Nonnegative weights on `(R0, R1, R2)`, not all zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights([f64; 3]);

impl Weights {
    pub const SUM: Weights = Weights([1.0, 1.0, 1.0]);

    pub fn new(l0: f64, l1: f64, l2: f64) -> Result<Self, SearchError> {
        let w = [l0, l1, l2];
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) || w.iter().all(|&x| x == 0.0) {
            return Err(SearchError::InvalidWeights(w));
        }
        Ok(Weights(w))
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

const TIE: f64 = 1e-12;
const FEAS: f64 = 1e-12;

/// Minimum of `weights . R` over `region` intersected with `R >= 0`, and a
/// point attaining it.
///
/// Corners are answered directly. Otherwise the minimum sits on a vertex of
/// the polyhedron cut out by the constraints and the three coordinate planes,
/// so every triple of planes is solved and the feasible intersections are
/// compared. Ties go to the smaller rate sum, then to the lexicographically
/// smaller triple, so free coordinates come back at their smallest feasible
/// values.
pub fn support_value(region: &HalfspaceRegion, weights: &Weights) -> (f64, RateTriple) {
    let w = weights.as_array();
    if let Some(c) = region.as_corner() {
        return (c.dot(w), c);
    }
    let mut planes: Vec<([f64; 3], f64)> =
        region.constraints().iter().map(|c| (c.face.coeffs(), c.bound)).collect();
    planes.push(([1.0, 0.0, 0.0], 0.0));
    planes.push(([0.0, 1.0, 0.0], 0.0));
    planes.push(([0.0, 0.0, 1.0], 0.0));

    let feasible = |p: &[f64; 3]| {
        p.iter().all(|&x| x >= -FEAS)
            && region.constraints().iter().all(|c| {
                let lhs: f64 = c.face.coeffs().iter().zip(p).map(|(a, b)| a * b).sum();
                lhs >= c.bound - FEAS * (1.0 + c.bound.abs())
            })
    };

    let mut best: Option<(f64, [f64; 3])> = None;
    let n = planes.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some(p) = solve3([planes[i], planes[j], planes[k]]) else {
                    continue;
                };
                if !feasible(&p) {
                    continue;
                }
                let p = p.map(|x| if x.abs() < FEAS { 0.0 } else { x });
                let v = w[0] * p[0] + w[1] * p[1] + w[2] * p[2];
                let better = match best {
                    None => true,
                    Some((bv, bp)) => {
                        if v < bv - TIE {
                            true
                        } else if v > bv + TIE {
                            false
                        } else {
                            let (s, bs) = (p.iter().sum::<f64>(), bp.iter().sum::<f64>());
                            s < bs - TIE
                                || ((s - bs).abs() <= TIE
                                    && p.iter().zip(&bp).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne())
                                        == Some(std::cmp::Ordering::Less))
                        }
                    }
                };
                if better {
                    best = Some((v, p));
                }
            }
        }
    }
    // The coordinate planes alone give the origin, and every constraint bound
    // is finite, so the octant polyhedron always has a vertex.
    let (v, p) = best.expect("polyhedron in the octant has a vertex");
    (v, RateTriple::from(p))
}

fn solve3(rows: [([f64; 3], f64); 3]) -> Option<[f64; 3]> {
    let m = [rows[0].0, rows[1].0, rows[2].0];
    let b = [rows[0].1, rows[1].1, rows[2].1];
    let det = det3(m);
    if det.abs() < 1e-12 {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for r in 0..3 {
            mc[r][c] = b[r];
        }
        *o = det3(mc) / det;
    }
    Some(out)
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::{contains, Constraint, Face};

    fn outer_shape(m: f64, s1: f64, s2: f64) -> HalfspaceRegion {
        HalfspaceRegion::new([
            Constraint { face: Face::R0, bound: m },
            Constraint { face: Face::R0R1, bound: s1 },
            Constraint { face: Face::R0R2, bound: s2 },
        ])
    }

    /// Brute-force oracle: scan a fine lattice of the box [0, 4]^3.
    fn lattice_min(region: &HalfspaceRegion, w: [f64; 3]) -> f64 {
        let steps = 80;
        let mut best = f64::INFINITY;
        for a in 0..=steps {
            for b in 0..=steps {
                for c in 0..=steps {
                    let t = RateTriple::new(
                        a as f64 * 4.0 / steps as f64,
                        b as f64 * 4.0 / steps as f64,
                        c as f64 * 4.0 / steps as f64,
                    );
                    if contains(region, &t) {
                        best = best.min(t.dot(w));
                    }
                }
            }
        }
        best
    }

    #[test]
    fn corner_region() {
        let r = HalfspaceRegion::corner(RateTriple::new(0.5, 0.25, 1.0));
        let (v, t) = support_value(&r, &Weights::SUM);
        assert_eq!(v, 1.75);
        assert_eq!(t, RateTriple::new(0.5, 0.25, 1.0));
    }

    #[test]
    fn outer_shape_sum_rate() {
        let r = outer_shape(1.0, 3.0, 2.0);
        let (v, t) = support_value(&r, &Weights::SUM);
        assert!((v - lattice_min(&r, [1.0, 1.0, 1.0])).abs() < 1e-12);
        assert_eq!(v, 3.0);
        assert_eq!(t, RateTriple::new(2.0, 1.0, 0.0));
    }

    #[test]
    fn outer_shape_r0_only() {
        let r = outer_shape(1.0, 3.0, 2.0);
        let (v, t) = support_value(&r, &Weights::new(1.0, 0.0, 0.0).unwrap());
        assert_eq!(v, 1.0);
        assert_eq!(t, RateTriple::new(1.0, 2.0, 1.0));
    }

    #[test]
    fn matches_lattice_oracle() {
        let regions = [outer_shape(0.5, 2.0, 1.25), outer_shape(0.0, 1.5, 0.75), outer_shape(2.0, 2.0, 2.5)];
        let weights = [[1.0, 1.0, 1.0], [2.0, 1.0, 1.0], [1.0, 3.0, 0.5], [0.0, 1.0, 1.0], [1.0, 0.0, 2.0]];
        for r in &regions {
            for w in weights {
                let (v, t) = support_value(r, &Weights::new(w[0], w[1], w[2]).unwrap());
                assert!(contains(r, &t));
                assert!((t.dot(w) - v).abs() < 1e-12);
                assert!((v - lattice_min(r, w)).abs() < 1e-9, "{r} {w:?}: {v}");
            }
        }
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(Weights::new(0.0, 0.0, 0.0).is_err());
        assert!(Weights::new(-1.0, 1.0, 1.0).is_err());
        assert!(Weights::new(f64::NAN, 1.0, 1.0).is_err());
    }
}
