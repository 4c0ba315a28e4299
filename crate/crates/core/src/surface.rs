//! Coefficient tuples `(a, b, c, d)` with `a > 0`, `abcd != 0`, `|ad - bc| = 1`,
//! their orbits under the two coordinate swaps, and the mod-16 strata.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{xgcd, Sign};
use crate::error::{Error, Result};

/// Default number of candidate `d'` values tried per cell by [`build_representatives`].
pub const DEFAULT_SEARCH_BOUND: u64 = 1 << 16;

/// One representative of a surface `Y^2 + Z^2 = (aT^2 + b)(cT^2 + d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SurfaceTuple {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    det: Sign,
}

impl SurfaceTuple {
    /// Validates `(a, b, c, d)`, negating all four entries when `a < 0`.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidTuple { a, b, c, d, reason };
        if a == 0 || b == 0 || c == 0 || d == 0 {
            return Err(invalid("zero entry (abcd = 0)".into()));
        }
        let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
        if det.abs() != 1 {
            return Err(invalid(format!("determinant is {det}")));
        }
        let (a, b, c, d) = if a < 0 {
            let neg = |x: i64| x.checked_neg().ok_or(Error::Overflow("tuple negation"));
            (neg(a)?, neg(b)?, neg(c)?, neg(d)?)
        } else {
            (a, b, c, d)
        };
        // ad - bc is unchanged by a global sign flip.
        Ok(SurfaceTuple {
            a,
            b,
            c,
            d,
            det: Sign::of(det),
        })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// `ad - bc`, which is `+1` or `-1`.
    pub fn det(&self) -> Sign {
        self.det
    }

    pub fn coefficients(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Sup-norm `max(|a|, |b|, |c|, |d|)`.
    pub fn height(&self) -> u64 {
        self.coefficients()
            .iter()
            .map(|x| x.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// `(a, b, c, d) -> (c, d, a, b)`: swap the two quadratic factors.
    pub fn swap_factors(&self) -> Self {
        Self::renormalize(self.c, self.d, self.a, self.b)
    }

    /// `(a, b, c, d) -> (b, a, d, c)`: replace `T` by `1/T`.
    pub fn invert_parameter(&self) -> Self {
        Self::renormalize(self.b, self.a, self.d, self.c)
    }

    fn renormalize(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(a, b, c, d).expect("coordinate swaps preserve validity")
    }
}

impl fmt::Display for SurfaceTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a, self.b, self.c, self.d)
    }
}

/// The four images of `u` under `{id, swap, invert, swap*invert}`, each with `a > 0`.
pub fn orbit(u: &SurfaceTuple) -> BTreeSet<SurfaceTuple> {
    let swapped = u.swap_factors();
    [*u, swapped, u.invert_parameter(), swapped.invert_parameter()]
        .into_iter()
        .collect()
}

/// Signs of `(b, c, d)`. Only four patterns are compatible with `a > 0` and `|ad - bc| = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SignSignature {
    /// `(+, +, +)`
    #[serde(rename = "(+,+,+)")]
    PlusPlusPlus,
    /// `(-, +, -)`
    #[serde(rename = "(-,+,-)")]
    MinusPlusMinus,
    /// `(-, -, +)`
    #[serde(rename = "(-,-,+)")]
    MinusMinusPlus,
    /// `(+, -, -)`
    #[serde(rename = "(+,-,-)")]
    PlusMinusMinus,
}

impl SignSignature {
    pub const ALL: [SignSignature; 4] = [
        SignSignature::PlusPlusPlus,
        SignSignature::MinusPlusMinus,
        SignSignature::MinusMinusPlus,
        SignSignature::PlusMinusMinus,
    ];

    pub fn from_signs(b: Sign, c: Sign, d: Sign) -> Option<Self> {
        use Sign::{Minus, Plus};
        match (b, c, d) {
            (Plus, Plus, Plus) => Some(SignSignature::PlusPlusPlus),
            (Minus, Plus, Minus) => Some(SignSignature::MinusPlusMinus),
            (Minus, Minus, Plus) => Some(SignSignature::MinusMinusPlus),
            (Plus, Minus, Minus) => Some(SignSignature::PlusMinusMinus),
            _ => None,
        }
    }

    /// `(eps_b, eps_c, eps_d)`.
    pub fn signs(self) -> [Sign; 3] {
        use Sign::{Minus, Plus};
        match self {
            SignSignature::PlusPlusPlus => [Plus, Plus, Plus],
            SignSignature::MinusPlusMinus => [Minus, Plus, Minus],
            SignSignature::MinusMinusPlus => [Minus, Minus, Plus],
            SignSignature::PlusMinusMinus => [Plus, Minus, Minus],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SignSignature::PlusPlusPlus => "(+,+,+)",
            SignSignature::MinusPlusMinus => "(-,+,-)",
            SignSignature::MinusMinusPlus => "(-,-,+)",
            SignSignature::PlusMinusMinus => "(+,-,-)",
        }
    }
}

impl fmt::Display for SignSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn sign_signature(u: &SurfaceTuple) -> SignSignature {
    let s = |x: i64| Sign::of(x as i128);
    SignSignature::from_signs(s(u.b), s(u.c), s(u.d))
        .expect("a > 0 and |ad - bc| = 1 force one of four sign patterns")
}

/// A residue cell: signs, 2-adic valuations of `(b, c, d)`, determinant sign,
/// and the odd parts `(a', b', c', d')` modulo 16.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub epsilon: SignSignature,
    pub det_sign: Sign,
    pub beta: u32,
    pub gamma: u32,
    pub delta: u32,
    pub xi: [u8; 4],
}

impl Cell {
    /// `min(beta + gamma, delta) = 0 < max(beta + gamma, delta)`.
    pub fn has_valid_shape(&self) -> bool {
        let s = self.beta + self.gamma;
        s.min(self.delta) == 0 && s.max(self.delta) > 0
    }

    pub fn has_unit_residues(&self) -> bool {
        self.xi.iter().all(|x| x % 2 == 1 && *x < 16)
    }

    /// `eps_d 2^delta xi_1 xi_4 - eps_b eps_c 2^(beta+gamma) xi_2 xi_3 = det (mod 16)`.
    pub fn satisfies_determinant_congruence(&self) -> bool {
        determinant_congruence(
            self.epsilon,
            self.beta + self.gamma,
            self.delta,
            self.xi,
            self.det_sign,
        )
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "eps={} det={} (beta,gamma,delta)=({},{},{}) xi=({},{},{},{})",
            self.epsilon,
            self.det_sign,
            self.beta,
            self.gamma,
            self.delta,
            self.xi[0],
            self.xi[1],
            self.xi[2],
            self.xi[3]
        )
    }
}

pub(crate) fn determinant_congruence(
    epsilon: SignSignature,
    beta_plus_gamma: u32,
    delta: u32,
    xi: [u8; 4],
    det: Sign,
) -> bool {
    let [e2, e3, e4] = epsilon.signs().map(|s| s.to_i64());
    let pow = |e: u32| if e >= 4 { 0 } else { 1i64 << e };
    let [x1, x2, x3, x4] = xi.map(i64::from);
    let lhs = e4 * pow(delta) * x1 * x4 - e2 * e3 * pow(beta_plus_gamma) * x2 * x3;
    (lhs - det.to_i64()).rem_euclid(16) == 0
}

/// Stratum data of a tuple, read off its odd-`a` representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Stratum {
    pub cell: Cell,
    /// `beta >= 1`, i.e. the representative also lies in the even-`b` family.
    pub b_even: bool,
}

/// Computes the stratum of `u`. Tuples with even `a` are first sent through
/// `(a, b, c, d) -> (b, a, d, c)`, which makes `a` odd and `b` even.
pub fn stratify(u: &SurfaceTuple) -> Stratum {
    let v = if u.a % 2 == 0 {
        u.invert_parameter()
    } else {
        *u
    };
    let [a, b, c, d] = v.coefficients();
    let residue = |x: i64| {
        let odd = x.unsigned_abs() >> x.trailing_zeros();
        (odd % 16) as u8
    };
    let cell = Cell {
        epsilon: sign_signature(&v),
        det_sign: v.det,
        beta: b.trailing_zeros(),
        gamma: c.trailing_zeros(),
        delta: d.trailing_zeros(),
        xi: [residue(a), residue(b), residue(c), residue(d)],
    };
    debug_assert!(cell.has_valid_shape() && cell.satisfies_determinant_congruence());
    Stratum {
        cell,
        b_even: cell.beta >= 1,
    }
}

/// Finds `count` distinct tuples whose stratum cell is `cell`.
///
/// Walks `(a', b')` through their residue classes mod 16 in order of size,
/// solves `eps_d 2^delta a' d' = det (mod 2^(beta+gamma) b')` for `d'`, and
/// scans `d'` along that progression until the quotient `c'` and `d'` land in
/// the required classes. At most `search_bound` values of `d'` are tried.
pub fn build_representatives(
    cell: &Cell,
    count: usize,
    search_bound: u64,
) -> Result<Vec<SurfaceTuple>> {
    if !cell.has_valid_shape() || !cell.has_unit_residues() {
        return Err(Error::Domain("cell has an invalid stratum shape"));
    }
    if !cell.satisfies_determinant_congruence() {
        return Err(Error::Domain(
            "cell violates the determinant congruence mod 16",
        ));
    }
    let not_found = || Error::RepresentativeNotFound {
        cell: cell.to_string(),
        bound: search_bound,
    };
    let [e2, e3, e4] = cell.epsilon.signs().map(|s| s.to_i64() as i128);
    let det = cell.det_sign.to_i64() as i128;
    let [x1, x2, x3, x4] = cell.xi.map(i128::from);
    let pow_d = 1i128 << cell.delta;
    let pow_bg = 1i128 << (cell.beta + cell.gamma);
    let period = 256;

    let mut out = Vec::with_capacity(count);
    let mut tried = 0u64;
    for diagonal in 0i128.. {
        for i in 0..=diagonal {
            let a1 = x1 + 16 * i;
            let b1 = x2 + 16 * (diagonal - i);
            if xgcd(a1, b1)?.0 != 1 {
                continue;
            }
            // d' = d0 (mod m) makes the c' quotient integral.
            let m = pow_bg * b1;
            let lead = e4 * pow_d * a1;
            let (_, inv, _) = xgcd(lead.rem_euclid(m), m)?;
            let d0 = (det * inv).rem_euclid(m);
            for j in 0..period {
                if tried >= search_bound {
                    return Err(not_found());
                }
                tried += 1;
                let d1 = d0 + m * j;
                if d1 <= 0 || d1.rem_euclid(16) != x4 {
                    continue;
                }
                let num = lead * d1 - det;
                let den = e2 * e3 * m;
                debug_assert_eq!(num % den, 0);
                let c1 = num / den;
                if c1 <= 0 || c1.rem_euclid(16) != x3 {
                    continue;
                }
                let to_i64 =
                    |x: i128| i64::try_from(x).map_err(|_| Error::Overflow("representative entry"));
                let u = SurfaceTuple::new(
                    to_i64(a1)?,
                    to_i64(e2 * (1i128 << cell.beta) * b1)?,
                    to_i64(e3 * (1i128 << cell.gamma) * c1)?,
                    to_i64(e4 * pow_d * d1)?,
                )?;
                debug_assert_eq!(stratify(&u).cell, *cell);
                out.push(u);
                if out.len() == count {
                    return Ok(out);
                }
                break;
            }
        }
        if tried >= search_bound {
            return Err(not_found());
        }
    }
    unreachable!("diagonal loop only exits by return")
}
