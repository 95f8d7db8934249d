//! Closed-form sum rates and cross-checks between equivalent descriptions of
//! the rate region in the special cases where it is known.

use std::fmt;
use std::str::FromStr;

use crate::measures::{cond_entropy, cond_mutual_info, JointPmf, Var, DERIVED_TOL};
use crate::sources;

use super::{is_complementary, is_single_source, min_weighted, BoundFamily, SearchConfig, SearchError, Weights};

/// Source structures with a known minimal sum rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedForm {
    /// `(X, Y) - U - V`: `H(Y|V) + H(X|Y,U)`.
    Markov,
    /// `X = Y`: `max{H(X|U), H(X|V)}`.
    Sgarro,
    /// `U = Y`, `V = X`: `max{H(X|Y), H(Y|X)}`.
    Compdel,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 3] = [ClosedForm::Markov, ClosedForm::Sgarro, ClosedForm::Compdel];

    pub fn name(self) -> &'static str {
        match self {
            ClosedForm::Markov => "markov",
            ClosedForm::Sgarro => "sgarro",
            ClosedForm::Compdel => "compdel",
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClosedForm {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClosedForm::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| SearchError::InvalidConfig(format!("unknown case {s:?}")))
    }
}

fn markov_chain(source: &JointPmf) -> Result<bool, SearchError> {
    use Var::*;
    Ok(cond_mutual_info(source, &[X, Y], &[V], &[U])? <= DERIVED_TOL)
}

pub fn closed_form_sum_rate(case: ClosedForm, source: &JointPmf) -> Result<f64, SearchError> {
    use Var::*;
    sources::check_layout(source)?;
    match case {
        ClosedForm::Markov => {
            if !markov_chain(source)? {
                return Err(SearchError::Hypothesis("(X, Y) - U - V".into()));
            }
            Ok(cond_entropy(source, &[Y], &[V])? + cond_entropy(source, &[X], &[Y, U])?)
        }
        ClosedForm::Sgarro => {
            if !is_single_source(source)? {
                return Err(SearchError::Hypothesis("X = Y".into()));
            }
            Ok(cond_entropy(source, &[X], &[U])?.max(cond_entropy(source, &[X], &[V])?))
        }
        ClosedForm::Compdel => {
            if !is_complementary(source)? {
                return Err(SearchError::Hypothesis("U = Y and V = X".into()));
            }
            Ok(cond_entropy(source, &[X], &[Y])?.max(cond_entropy(source, &[Y], &[X])?))
        }
    }
}

/// Special cases in which the rate region is known exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// `X = Y`: the outer bound is tight.
    XyEqual,
    /// `Y = (X, Z)` with `(X, Z) - U - V`: the inner bound is tight.
    Degraded,
    /// `U = Y`, `V = X`: inner and outer bounds coincide.
    Compdel,
    /// `X = Y`: the two-description region with auxiliaries `A`, `B`.
    Star,
    /// `U = Y`, `V = X`: the two-description region over `(X, Y)`.
    StarStar,
}

impl Theorem {
    pub const ALL: [Theorem; 5] =
        [Theorem::XyEqual, Theorem::Degraded, Theorem::Compdel, Theorem::Star, Theorem::StarStar];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::XyEqual => "xy-equal",
            Theorem::Degraded => "degraded",
            Theorem::Compdel => "compdel",
            Theorem::Star => "star",
            Theorem::StarStar => "starstar",
        }
    }

    /// Descriptions that must agree, and the closed form for the sum rate.
    fn plan(self) -> (&'static [BoundFamily], ClosedForm) {
        use BoundFamily::*;
        match self {
            Theorem::XyEqual => (&[Outer, Star], ClosedForm::Sgarro),
            Theorem::Degraded => (&[Outer, Inner], ClosedForm::Markov),
            Theorem::Compdel => (&[Outer, Inner, StarStar], ClosedForm::Compdel),
            Theorem::Star => (&[Star, Outer], ClosedForm::Sgarro),
            Theorem::StarStar => (&[StarStar, Outer], ClosedForm::Compdel),
        }
    }

    fn check_hypothesis(self, source: &JointPmf) -> Result<(), SearchError> {
        use Var::*;
        let ok = match self {
            Theorem::XyEqual | Theorem::Star => is_single_source(source)?,
            Theorem::Compdel | Theorem::StarStar => is_complementary(source)?,
            Theorem::Degraded => {
                if cond_entropy(source, &[X], &[Y])? > DERIVED_TOL {
                    return Err(SearchError::Hypothesis("X is a function of Y".into()));
                }
                markov_chain(source)?
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SearchError::Hypothesis(
                match self {
                    Theorem::XyEqual | Theorem::Star => "X = Y",
                    Theorem::Compdel | Theorem::StarStar => "U = Y and V = X",
                    Theorem::Degraded => "(X, Y) - U - V",
                }
                .into(),
            ))
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| SearchError::InvalidConfig(format!("unknown theorem {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub cfg: SearchConfig,
    /// Extra weight vectors checked after `(1, 1, 1)`.
    pub sweep: Vec<Weights>,
    pub tol: f64,
}

impl CheckOptions {
    pub fn new(cfg: SearchConfig) -> Self {
        CheckOptions { cfg, sweep: Vec::new(), tol: 1e-3 }
    }
}

/// Minima of every description for one weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightRow {
    pub weights: Weights,
    /// `(family, minimum)` for every family searched, in plan order. The
    /// inner bound is always included.
    pub minima: Vec<(BoundFamily, f64)>,
    /// Only for the sum-rate weights.
    pub closed_form: Option<f64>,
    /// Largest pairwise gap among the values that must agree.
    pub gap: f64,
    pub pass: bool,
}

impl WeightRow {
    pub fn min(&self, family: BoundFamily) -> Option<f64> {
        self.minima.iter().find(|(f, _)| *f == family).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecialCaseReport {
    pub theorem: Theorem,
    pub grid: u32,
    pub tol: f64,
    pub rows: Vec<WeightRow>,
}

impl SpecialCaseReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

impl fmt::Display for SpecialCaseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theorem {} at grid {} (tolerance {:e})", self.theorem, self.grid, self.tol)?;
        for r in &self.rows {
            write!(f, "  weights {}:", r.weights)?;
            for (fam, v) in &r.minima {
                write!(f, " {fam}={v:.6}")?;
            }
            if let Some(c) = r.closed_form {
                write!(f, " closed-form={c:.6}")?;
            }
            writeln!(f, " gap={:.3e} {}", r.gap, if r.pass { "ok" } else { "FAIL" })?;
        }
        write!(f, "{}", if self.pass() { "PASS" } else { "FAIL" })
    }
}

/// Compares every description of the region named by `theorem` on `source`.
/// Minima over unions are grid approximations, so agreement is within
/// `opts.tol`. The inner bound is always reported; it only has to agree when
/// the theorem says it is tight.
pub fn check_special_case(
    theorem: Theorem,
    source: &JointPmf,
    opts: &CheckOptions,
) -> Result<SpecialCaseReport, SearchError> {
    sources::check_layout(source)?;
    theorem.check_hypothesis(source)?;
    let (families, case) = theorem.plan();
    let closed = closed_form_sum_rate(case, source)?;
    let mut weights = vec![Weights::SUM];
    weights.extend(opts.sweep.iter().copied().filter(|w| *w != Weights::SUM));

    let mut rows = Vec::new();
    for w in weights {
        let mut minima = Vec::new();
        for &fam in families {
            minima.push((fam, min_weighted(source, fam, &w, &opts.cfg)?.value));
        }
        let mut agree: Vec<f64> = minima.iter().map(|m| m.1).collect();
        if !families.contains(&BoundFamily::Inner) {
            minima.push((BoundFamily::Inner, min_weighted(source, BoundFamily::Inner, &w, &opts.cfg)?.value));
        }
        let closed_form = (w == Weights::SUM).then_some(closed);
        agree.extend(closed_form);
        let hi = agree.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = agree.iter().copied().fold(f64::INFINITY, f64::min);
        let gap = hi - lo;
        let outer = minima.iter().find(|m| m.0 == BoundFamily::Outer).map(|m| m.1);
        let inner = minima.iter().find(|m| m.0 == BoundFamily::Inner).map(|m| m.1);
        let sandwich = match (outer, inner) {
            (Some(o), Some(i)) => o <= i + DERIVED_TOL,
            _ => true,
        };
        rows.push(WeightRow { weights: w, minima, closed_form, gap, pass: gap <= opts.tol && sandwich });
    }
    Ok(SpecialCaseReport { theorem, grid: opts.cfg.grid, tol: opts.tol, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn closed_forms() {
        let s = sources::sgarro(0.1, 0.2).unwrap();
        assert!((closed_form_sum_rate(ClosedForm::Sgarro, &s).unwrap() - h2(0.2)).abs() < 1e-12);
        let s = sources::compdel_dsbs(0.25).unwrap();
        assert!((closed_form_sum_rate(ClosedForm::Compdel, &s).unwrap() - h2(0.25)).abs() < 1e-12);
        let s = sources::markov_dsbs(0.3).unwrap();
        assert!((closed_form_sum_rate(ClosedForm::Markov, &s).unwrap() - (1.0 + h2(0.3))).abs() < 1e-12);
    }

    #[test]
    fn closed_form_hypotheses() {
        let s = sources::dsbs(0.25).unwrap();
        assert!(closed_form_sum_rate(ClosedForm::Sgarro, &s).is_err());
        assert!(closed_form_sum_rate(ClosedForm::Compdel, &s).is_err());
        // Constant side information makes the chain trivial.
        assert!(closed_form_sum_rate(ClosedForm::Markov, &s).is_ok());
        let s = sources::sgarro(0.1, 0.2).unwrap();
        assert!(matches!(closed_form_sum_rate(ClosedForm::Markov, &s), Err(SearchError::Hypothesis(_))));
    }

    #[test]
    fn theorem_hypotheses() {
        let opts = CheckOptions::new(SearchConfig::with_grid(1));
        let s = sources::dsbs(0.25).unwrap();
        for t in [Theorem::XyEqual, Theorem::Star, Theorem::Compdel, Theorem::StarStar] {
            assert!(matches!(check_special_case(t, &s, &opts), Err(SearchError::Hypothesis(_))), "{t}");
        }
        // X is not a function of Y for a DSBS.
        assert!(check_special_case(Theorem::Degraded, &s, &opts).is_err());
    }

    #[test]
    fn names_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.name().parse::<Theorem>().unwrap(), t);
        }
        for c in ClosedForm::ALL {
            assert_eq!(c.name().parse::<ClosedForm>().unwrap(), c);
        }
    }
}
