//! Local solubility and the achievable values of the Brauer invariant
//! `(-1, aT^2 + b)_v` at the real place, at 2, and at odd primes.

mod engine;
mod real;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{Place, Prime, Sign};
use crate::error::{Error, Result};
use crate::surface::SurfaceTuple;

pub use engine::{Ball, BallSearch, DepthExceeded, LocalRing, StopRule};
pub use real::real_invariant_set;

/// Extra subdivision depth allowed beyond the valuations of the coefficients.
pub const DEFAULT_EXTRA_DEPTH: u32 = 32;

/// Subset of `{+1, -1}`: the invariants realised by local points at one place.
/// Empty exactly when there is no local point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct InvariantSet {
    pub contains_plus: bool,
    pub contains_minus: bool,
}

impl InvariantSet {
    pub const EMPTY: InvariantSet = InvariantSet {
        contains_plus: false,
        contains_minus: false,
    };

    pub const FULL: InvariantSet = InvariantSet {
        contains_plus: true,
        contains_minus: true,
    };

    pub fn singleton(s: Sign) -> Self {
        let mut set = InvariantSet::EMPTY;
        set.insert(s);
        set
    }

    pub fn insert(&mut self, s: Sign) {
        match s {
            Sign::Plus => self.contains_plus = true,
            Sign::Minus => self.contains_minus = true,
        }
    }

    pub fn contains(&self, s: Sign) -> bool {
        match s {
            Sign::Plus => self.contains_plus,
            Sign::Minus => self.contains_minus,
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.contains_plus && !self.contains_minus
    }

    pub fn is_full(&self) -> bool {
        self.contains_plus && self.contains_minus
    }

    /// The unique element, if there is exactly one.
    pub fn as_singleton(&self) -> Option<Sign> {
        match (self.contains_plus, self.contains_minus) {
            (true, false) => Some(Sign::Plus),
            (false, true) => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn union(self, other: InvariantSet) -> InvariantSet {
        InvariantSet {
            contains_plus: self.contains_plus || other.contains_plus,
            contains_minus: self.contains_minus || other.contains_minus,
        }
    }

    /// `{-w : w in self}`. Scaling a tuple by `-1` negates both factors,
    /// which maps the real and 2-adic sets to their negations.
    pub fn negated(self) -> InvariantSet {
        InvariantSet {
            contains_plus: self.contains_minus,
            contains_minus: self.contains_plus,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Sign> + '_ {
        [Sign::Plus, Sign::Minus]
            .into_iter()
            .filter(|s| self.contains(*s))
    }
}

impl fmt::Display for InvariantSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl Serialize for InvariantSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for InvariantSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let signs = Vec::<Sign>::deserialize(deserializer)?;
        let mut set = InvariantSet::EMPTY;
        for s in signs {
            set.insert(s);
        }
        Ok(set)
    }
}

/// `lead * t^2 + constant`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quadratic {
    pub lead: i64,
    pub constant: i64,
}

impl Quadratic {
    pub fn eval(&self, t: i128) -> i128 {
        self.lead as i128 * t * t + self.constant as i128
    }
}

/// The two factors of the quartic in one affine chart.
///
/// The affine chart uses `(a t^2 + b, c t^2 + d)`; the chart at infinity,
/// `s = 1/t`, uses `(b s^2 + a, d s^2 + c)`. In both charts the Brauer
/// invariant of a point is `(-1, first(t))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChartPolynomialPair {
    pub first: Quadratic,
    pub second: Quadratic,
}

impl ChartPolynomialPair {
    pub fn affine(u: &SurfaceTuple) -> Self {
        ChartPolynomialPair {
            first: Quadratic {
                lead: u.a(),
                constant: u.b(),
            },
            second: Quadratic {
                lead: u.c(),
                constant: u.d(),
            },
        }
    }

    pub fn at_infinity(u: &SurfaceTuple) -> Self {
        ChartPolynomialPair {
            first: Quadratic {
                lead: u.b(),
                constant: u.a(),
            },
            second: Quadratic {
                lead: u.d(),
                constant: u.c(),
            },
        }
    }

    /// `lead1 * constant2 - constant1 * lead2`, which equals
    /// `lead1 * g2(t) - lead2 * g1(t)` for every `t`. It is `+-1` for valid tuples.
    pub fn chart_det(&self) -> i128 {
        self.first.lead as i128 * self.second.constant as i128
            - self.first.constant as i128 * self.second.lead as i128
    }
}

/// Settings shared by the p-adic deciders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalConfig {
    /// Absolute cap on ball level. `None` means `v(abcd) + DEFAULT_EXTRA_DEPTH`.
    pub depth_cap: Option<u32>,
}

impl Default for LocalConfig {
    fn default() -> Self {
        LocalConfig { depth_cap: None }
    }
}

impl LocalConfig {
    fn cap_for(&self, u: &SurfaceTuple, p: Prime) -> u32 {
        self.depth_cap.unwrap_or_else(|| {
            let v: u32 = u
                .coefficients()
                .iter()
                .map(|x| crate::arith::valuation(*x as i128, p).expect("nonzero"))
                .sum();
            v + DEFAULT_EXTRA_DEPTH
        })
    }
}

fn undecided(u: &SurfaceTuple, place: Place, depth: u32) -> Error {
    Error::Undecided {
        a: u.a(),
        b: u.b(),
        c: u.c(),
        d: u.d(),
        place,
        depth,
    }
}

/// Searches both charts: `t` in `Z_p` on the affine chart and `s = 1/t` in
/// `p Z_p` on the chart at infinity.
pub fn p_adic_invariant_set(
    u: &SurfaceTuple,
    p: Prime,
    stop: StopRule,
    config: &LocalConfig,
) -> Result<InvariantSet> {
    let cap = config.cap_for(u, p);
    let affine = ChartPolynomialPair::affine(u);
    let infinity = ChartPolynomialPair::at_infinity(u);
    let mut found = BallSearch::new(&affine, p, cap)
        .run(&[Ball::WHOLE], stop)
        .map_err(|DepthExceeded(k)| undecided(u, Place::Prime(p), k))?;
    let enough = match stop {
        StopRule::FirstPoint => !found.is_empty(),
        StopRule::Exhaustive => found.is_full(),
    };
    if !enough {
        let more = BallSearch::new(&infinity, p, cap)
            .run(&[Ball::MAXIMAL_IDEAL], stop)
            .map_err(|DepthExceeded(k)| undecided(u, Place::Prime(p), k))?;
        found = found.union(more);
    }
    Ok(found)
}

/// Invariants `(-1, a t^2 + b)_2` realised by 2-adic points.
pub fn two_adic_invariant_set(u: &SurfaceTuple) -> Result<InvariantSet> {
    two_adic_invariant_set_with(u, &LocalConfig::default())
}

pub fn two_adic_invariant_set_with(u: &SurfaceTuple, config: &LocalConfig) -> Result<InvariantSet> {
    p_adic_invariant_set(u, Prime::TWO, StopRule::Exhaustive, config)
}

fn require_odd(p: Prime) -> Result<()> {
    if p.is_two() {
        Err(Error::Domain("odd prime required"))
    } else {
        Ok(())
    }
}

/// Whether the surface has a point over `Q_p` for odd `p`.
pub fn odd_place_soluble(u: &SurfaceTuple, p: Prime) -> Result<bool> {
    odd_place_soluble_with(u, p, &LocalConfig::default())
}

pub fn odd_place_soluble_with(u: &SurfaceTuple, p: Prime, config: &LocalConfig) -> Result<bool> {
    require_odd(p)?;
    if p.get() % 4 == 1 {
        // Every element of Q_p is a sum of two squares.
        return Ok(true);
    }
    Ok(!p_adic_invariant_set(u, p, StopRule::FirstPoint, config)?.is_empty())
}

/// All invariants realised at an odd prime (full search).
pub fn odd_invariant_set(u: &SurfaceTuple, p: Prime) -> Result<InvariantSet> {
    require_odd(p)?;
    if p.get() % 4 == 1 {
        return Ok(InvariantSet::singleton(Sign::Plus));
    }
    p_adic_invariant_set(u, p, StopRule::Exhaustive, &LocalConfig::default())
}

/// The invariant at an odd prime; always `+1` for this family.
///
/// Runs the full search and returns its unique value; an error if the
/// surface has no `Q_p` point or both values occur.
pub fn odd_invariant_value(u: &SurfaceTuple, p: Prime) -> Result<Sign> {
    let set = odd_invariant_set(u, p)?;
    set.as_singleton().ok_or(if set.is_empty() {
        Error::Domain("no p-adic point")
    } else {
        Error::Domain("both invariants occur at an odd prime")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: i64, b: i64, c: i64, d: i64) -> SurfaceTuple {
        SurfaceTuple::new(a, b, c, d).unwrap()
    }

    fn p(q: u64) -> Prime {
        Prime::new(q).unwrap()
    }

    #[test]
    fn two_adic_examples() {
        assert!(two_adic_invariant_set(&t(1, 1, 1, 2))
            .unwrap()
            .contains(Sign::Plus));
        assert_eq!(
            two_adic_invariant_set(&t(1, -2, -1, 3)).unwrap(),
            InvariantSet::singleton(Sign::Minus)
        );
    }

    #[test]
    fn odd_place_examples() {
        assert!(odd_place_soluble(&t(1, -2, -1, 3), p(3)).unwrap());
        assert!(odd_place_soluble(&t(1, 1, 1, 2), p(13)).unwrap());
        assert_eq!(odd_invariant_value(&t(1, -2, -1, 3), p(3)).unwrap(), Sign::Plus);
        assert_eq!(odd_invariant_value(&t(1, 1, 1, 2), p(3)).unwrap(), Sign::Plus);
        assert_eq!(odd_invariant_value(&t(3, -1, -2, 1), p(7)).unwrap(), Sign::Plus);
        assert!(odd_place_soluble(&t(1, 1, 1, 2), Prime::TWO).is_err());
    }

    #[test]
    fn chart_det_matches_tuple_det() {
        let u = t(3, -1, -2, 1);
        assert_eq!(ChartPolynomialPair::affine(&u).chart_det(), u.det().to_i64() as i128);
        assert_eq!(
            ChartPolynomialPair::at_infinity(&u).chart_det(),
            -(u.det().to_i64() as i128)
        );
    }

    #[test]
    fn depth_cap_override_reports_undecided() {
        let cfg = LocalConfig { depth_cap: Some(1) };
        match two_adic_invariant_set_with(&t(1, -2, -1, 3), &cfg) {
            Err(Error::Undecided { place, .. }) => assert_eq!(place, Place::Prime(Prime::TWO)),
            other => panic!("expected undecided, got {other:?}"),
        }
    }

    #[test]
    fn invariant_set_display_and_serde() {
        assert_eq!(InvariantSet::FULL.to_string(), "{+1,-1}");
        assert_eq!(InvariantSet::EMPTY.to_string(), "{}");
        let json = serde_json::to_string(&InvariantSet::singleton(Sign::Minus)).unwrap();
        assert_eq!(json, "[\"-1\"]");
        let back: InvariantSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back.as_singleton(), Some(Sign::Minus));
    }
}
