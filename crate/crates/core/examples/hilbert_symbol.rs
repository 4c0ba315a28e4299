//! The Hilbert symbol (-1, n)_v at a handful of places, checked against the
//! product formula and against a direct search for points on x^2 + y^2 = n z^2.

use chatelet::arith::{conic_oracle, hilbert_minus_one, odd_prime_factors, valuation, Place, Prime, Sign};

fn main() -> chatelet::Result<()> {
    let samples: [i128; 8] = [1, -1, 3, 5, 6, 21, -7, 1 << 5];
    println!("{:>6}  {:>4} {:>4} {:>4} {:>4} {:>4}", "n", "inf", "2", "3", "5", "7");
    for n in samples {
        let mut line = format!("{n:>6} ");
        for v in [Place::Real, Place::prime(2)?, Place::prime(3)?, Place::prime(5)?, Place::prime(7)?] {
            line.push_str(&format!(" {:>4}", hilbert_minus_one(n, v)?.to_i64()));
        }
        println!("{line}");
    }

    // Product over all places is +1.
    for n in [-15i128, 21, 1_000_003, -2 * 3 * 7 * 11] {
        let mut product = hilbert_minus_one(n, Place::Real)? * hilbert_minus_one(n, Place::Prime(Prime::TWO))?;
        for q in odd_prime_factors(n) {
            product = product * hilbert_minus_one(n, Place::prime(q)?)?;
        }
        assert_eq!(product, Sign::Plus);
        println!("product formula holds for n = {n}");
    }

    // The conic oracle decides local solubility by a search mod p^k.
    let p = Prime::new(3)?;
    for n in [3i128, 6, 10, 13] {
        let k = valuation(n, p)? + 2;
        let symbol = hilbert_minus_one(n, Place::Prime(p))?;
        println!("n = {n:>3}: symbol {symbol}, conic soluble mod 3^{k}: {}", conic_oracle(n, p, k)?);
    }
    Ok(())
}
