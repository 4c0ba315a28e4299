//! Brauer-Manin verdicts.
//!
//! The invariant `(-1, aT^2 + b)_v` is `+1` at every odd prime, so the sum of
//! local invariants is governed by the real place and by 2. A surface that is
//! everywhere locally soluble fails the Hasse principle exactly when both of
//! those places force a single value and the two values multiply to `-1`.
//! Otherwise the Brauer-Manin set is nonempty, and for these surfaces that is
//! taken to imply a rational point; no point is searched for.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{odd_prime_factors, Place, Prime, Sign};
use crate::error::Result;
use crate::local::{
    odd_place_soluble_with, real_invariant_set, two_adic_invariant_set_with, InvariantSet,
    LocalConfig,
};
use crate::surface::SurfaceTuple;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "place")]
pub enum Verdict {
    InsolubleAt(Place),
    SolubleNoObstruction,
    HasseFailure,
}

impl Verdict {
    pub fn is_locally_soluble(&self) -> bool {
        !matches!(self, Verdict::InsolubleAt(_))
    }

    pub fn is_hasse_failure(&self) -> bool {
        matches!(self, Verdict::HasseFailure)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::InsolubleAt(p) => write!(f, "InsolubleAt({p})"),
            Verdict::SolubleNoObstruction => f.write_str("SolubleNoObstruction"),
            Verdict::HasseFailure => f.write_str("HasseFailure"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub real: InvariantSet,
    pub two_adic: InvariantSet,
    /// Odd primes dividing `abcd` whose local solubility was checked, in order.
    pub checked_odd_primes: Vec<u64>,
}

/// Distinct odd primes dividing `abcd`, ascending.
pub fn odd_primes_of(u: &SurfaceTuple) -> Vec<u64> {
    let primes: BTreeSet<u64> = u
        .coefficients()
        .iter()
        .flat_map(|x| odd_prime_factors(*x as i128))
        .collect();
    primes.into_iter().collect()
}

pub fn classify(u: &SurfaceTuple) -> Result<Classification> {
    classify_with(u, &LocalConfig::default())
}

pub fn classify_with(u: &SurfaceTuple, config: &LocalConfig) -> Result<Classification> {
    let real = real_invariant_set(u);
    let two_adic = two_adic_invariant_set_with(u, config)?;
    let mut out = Classification {
        verdict: Verdict::SolubleNoObstruction,
        real,
        two_adic,
        checked_odd_primes: Vec::new(),
    };
    if real.is_empty() {
        out.verdict = Verdict::InsolubleAt(Place::Real);
        return Ok(out);
    }
    if two_adic.is_empty() {
        out.verdict = Verdict::InsolubleAt(Place::Prime(Prime::TWO));
        return Ok(out);
    }
    for p in odd_primes_of(u) {
        out.checked_odd_primes.push(p);
        let prime = Prime::new(p)?;
        if !odd_place_soluble_with(u, prime, config)? {
            out.verdict = Verdict::InsolubleAt(Place::Prime(prime));
            return Ok(out);
        }
    }
    if let (Some(w_real), Some(w_two)) = (real.as_singleton(), two_adic.as_singleton()) {
        if w_real * w_two == Sign::Minus {
            out.verdict = Verdict::HasseFailure;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCase {
    pub k: i64,
    pub tuple: [i64; 4],
    pub verdict: Verdict,
    pub pass: bool,
}

/// Classifies `(1, 1 - k, -1, k)` for every `k = 3 (mod 4)` with `3 <= k <= k_max`.
pub fn ctcs_family_check(k_max: i64) -> Result<Vec<FamilyCase>> {
    (3..=k_max)
        .step_by(4)
        .map(|k| {
            let u = SurfaceTuple::new(1, 1 - k, -1, k)?;
            let verdict = classify(&u)?.verdict;
            Ok(FamilyCase {
                k,
                tuple: u.coefficients(),
                verdict,
                pass: verdict == Verdict::HasseFailure,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: i64, b: i64, c: i64, d: i64) -> SurfaceTuple {
        SurfaceTuple::new(a, b, c, d).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&t(1, -2, -1, 3)).unwrap().verdict, Verdict::HasseFailure);
        assert_eq!(
            classify(&t(1, 1, 1, 2)).unwrap().verdict,
            Verdict::SolubleNoObstruction
        );
        assert_eq!(
            classify(&t(1, 1, -1, -2)).unwrap().verdict,
            Verdict::InsolubleAt(Place::Real)
        );
        assert_eq!(classify(&t(1, -6, -1, 7)).unwrap().verdict, Verdict::HasseFailure);
    }

    #[test]
    fn hasse_failure_sets_are_opposite_singletons() {
        let c = classify(&t(1, -2, -1, 3)).unwrap();
        assert_eq!(c.real.as_singleton(), Some(Sign::Plus));
        assert_eq!(c.two_adic.as_singleton(), Some(Sign::Minus));
        assert_eq!(c.checked_odd_primes, vec![3]);
    }

    #[test]
    fn family_small_range() {
        let cases = ctcs_family_check(11).unwrap();
        assert_eq!(cases.iter().map(|c| c.k).collect::<Vec<_>>(), vec![3, 7, 11]);
        assert!(cases.iter().all(|c| c.pass));
        for c in &cases {
            let [a, b, cc, d] = c.tuple;
            assert_eq!(a * d - b * cc, 1);
        }
    }

    #[test]
    fn verdict_json_shape() {
        let v = Verdict::InsolubleAt(Place::Real);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"kind":"InsolubleAt","place":"Real"}"#
        );
        assert_eq!(
            serde_json::to_string(&Verdict::HasseFailure).unwrap(),
            r#"{"kind":"HasseFailure"}"#
        );
    }
}
