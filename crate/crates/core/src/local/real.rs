use crate::arith::Sign;
use crate::surface::{sign_signature, SignSignature, SurfaceTuple};

use super::InvariantSet;

/// Real invariants `sign(a t^2 + b)` over real points, by sign pattern of `(b, c, d)`.
pub fn real_invariant_set(u: &SurfaceTuple) -> InvariantSet {
    match sign_signature(u) {
        SignSignature::PlusPlusPlus => InvariantSet::singleton(Sign::Plus),
        // c, d < 0 makes c t^2 + d < 0 while a t^2 + b > 0.
        SignSignature::PlusMinusMinus => InvariantSet::EMPTY,
        SignSignature::MinusPlusMinus => InvariantSet::FULL,
        // Points need a t^2 + b and c t^2 + d of equal sign; the admissible
        // t^2-interval exists only on the side selected by ad - bc.
        SignSignature::MinusMinusPlus => InvariantSet::singleton(u.det()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: i64, b: i64, c: i64, d: i64) -> SurfaceTuple {
        SurfaceTuple::new(a, b, c, d).unwrap()
    }

    #[test]
    fn real_examples() {
        assert_eq!(real_invariant_set(&t(1, 1, 1, 2)), InvariantSet::singleton(Sign::Plus));
        assert_eq!(real_invariant_set(&t(1, -2, -1, 3)), InvariantSet::singleton(Sign::Plus));
        assert_eq!(real_invariant_set(&t(1, 1, -1, -2)), InvariantSet::EMPTY);
        assert_eq!(real_invariant_set(&t(1, -1, 2, -1)), InvariantSet::FULL);
    }

    #[test]
    fn minus_minus_plus_follows_determinant() {
        // 1*1 - (-1)(-2) = -1
        let u = t(1, -1, -2, 1);
        assert_eq!(u.det(), Sign::Minus);
        assert_eq!(real_invariant_set(&u), InvariantSet::singleton(Sign::Minus));
    }
}
