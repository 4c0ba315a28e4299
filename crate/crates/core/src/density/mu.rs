//! Local densities of the quadric `F(x) = +-1`.
//!
//! The odd and 2-adic densities are exact point counts modulo prime powers.
//! The archimedean density is a Monte Carlo estimate of a thin-shell volume.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{valuation, ExactRational, Prime, Sign};
use crate::error::{Error, Result};
use crate::surface::{Cell, SignSignature};

/// Largest `p^(3t)` the brute-force counter will loop over.
pub const MU_P_BUDGET: u64 = 1_000_000_000;

/// Default shell width for [`mu_inf_estimate`], in normalised coordinates.
pub const DEFAULT_SHELL_WIDTH: f64 = 1e-3;

pub const DEFAULT_MU_SEED: u64 = 0x5eed_c4a7;

/// `#{x in (Z/p^t)^4 : x1 x2 - x3 x4 = target (mod p^t)}` for odd `p`.
///
/// The triple `(x1, x2, x3)` is enumerated and `x4` is counted from the
/// linear congruence `x3 x4 = x1 x2 - target`, which has `p^v(x3)` solutions
/// when `p^v(x3)` divides the right side and none otherwise.
pub fn mu_p_bruteforce(p: Prime, t: u32, target: Sign) -> Result<u64> {
    if p.is_two() || t == 0 {
        return Err(Error::Domain("mu_p_bruteforce needs an odd prime and t >= 1"));
    }
    let q = p
        .get()
        .checked_pow(t)
        .ok_or(Error::Overflow("p^t"))?;
    q.checked_pow(3).filter(|c| *c <= MU_P_BUDGET).ok_or_else(|| {
        Error::Budget(format!("{}^{} exceeds the brute-force budget", p.get(), 3 * t))
    })?;
    // Solutions of x3 x4 = r with p^v || x3 depend only on v(x3) and whether
    // p^v | r, so tabulate v(x3) once.
    let vals: Vec<u32> = (0..q)
        .map(|x| if x == 0 { t } else { valuation(x as i128, p).unwrap_or(t) })
        .collect();
    let qi = q as i128;
    let tgt = target.to_i64() as i128;
    let total = (0..q)
        .into_par_iter()
        .map(|x1| {
            let mut count = 0u64;
            for x2 in 0..q {
                let prod = (x1 as i128 * x2 as i128 - tgt).rem_euclid(qi);
                let v_rhs = if prod == 0 { t } else { vals[prod as usize] };
                for &v in &vals {
                    if v <= v_rhs {
                        count += p.get().pow(v);
                    }
                }
            }
            count
        })
        .sum();
    Ok(total)
}

/// Expected count at an odd prime: `p^(3t) (1 - p^-2)`.
pub fn mu_p_expected(p: Prime, t: u32) -> u64 {
    let p = p.get();
    p.pow(3 * t) - p.pow(3 * t - 2)
}

fn inverse_mod_pow2(x: u64) -> u64 {
    // Newton iteration; each step doubles the number of correct low bits.
    let mut inv = x;
    for _ in 0..6 {
        inv = inv.wrapping_mul(2u64.wrapping_sub(x.wrapping_mul(inv)));
    }
    inv
}

/// `#S(t)`: lifts `x = xi (mod 16)` in `(Z/2^t)^4` with `F(x) = det (mod 2^t)`.
pub fn s_count(cell: &Cell, t: u32) -> Result<u64> {
    if !(4..=12).contains(&t) {
        return Err(Error::Domain("2-adic level must lie in 4..=12"));
    }
    let mask = (1u64 << t) - 1;
    let [e2, e3, e4] = cell.epsilon.signs().map(|s| s.to_i64());
    let pow = |e: u32| if e >= t { 0 } else { 1u64 << e };
    let coeff_a = (e4 as u64).wrapping_mul(pow(cell.delta)) & mask;
    let coeff_b = ((e2 * e3) as u64).wrapping_mul(pow(cell.beta + cell.gamma)) & mask;
    let det = cell.det_sign.to_i64() as u64;
    let lifts = 1u64 << (t - 4);
    let xi = cell.xi.map(u64::from);
    let lift = |i: usize, k: u64| (xi[i] + 16 * k) & mask;
    let mut count = 0;
    // F = A x1 x4 - B x2 x3. One of A, B is a unit, and the variable it
    // multiplies is then solved for from the other three.
    if coeff_a & 1 == 1 {
        let inv = inverse_mod_pow2(coeff_a);
        for k1 in 0..lifts {
            let x1 = lift(0, k1);
            let inv1 = inverse_mod_pow2(x1).wrapping_mul(inv);
            for k2 in 0..lifts {
                for k3 in 0..lifts {
                    let rhs = det.wrapping_add(coeff_b.wrapping_mul(lift(1, k2)).wrapping_mul(lift(2, k3)));
                    let x4 = rhs.wrapping_mul(inv1) & mask;
                    if x4 & 15 == xi[3] {
                        count += 1;
                    }
                }
            }
        }
    } else if coeff_b & 1 == 1 {
        let inv = inverse_mod_pow2(coeff_b);
        for k2 in 0..lifts {
            let x2 = lift(1, k2);
            let inv2 = inverse_mod_pow2(x2).wrapping_mul(inv);
            for k1 in 0..lifts {
                for k4 in 0..lifts {
                    let rhs = coeff_a.wrapping_mul(lift(0, k1)).wrapping_mul(lift(3, k4)).wrapping_sub(det);
                    let x3 = rhs.wrapping_mul(inv2) & mask;
                    if x3 & 15 == xi[2] {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `2^(-3t) #S(t)` for each level in `levels`.
pub fn mu_2_stabilization(cell: &Cell, levels: std::ops::RangeInclusive<u32>) -> Result<Vec<ExactRational>> {
    levels
        .map(|t| Ok(ExactRational::integer(s_count(cell, t)? as i128) * ExactRational::pow2(-3 * t as i32)))
        .collect()
}

/// `count` cells drawn from a seeded stream: random signs, a random valid
/// shape with exponents below 8, and random unit residues satisfying the
/// determinant congruence.
pub fn sample_cells(seed: u64, count: usize) -> Vec<Cell> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let units = [1u8, 3, 5, 7, 9, 11, 13, 15];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (beta, gamma, delta) = if rng.gen_bool(0.5) {
            (0, 0, rng.gen_range(1..8))
        } else {
            let beta = rng.gen_range(0..8);
            let gamma = rng.gen_range(u32::from(beta == 0)..8);
            (beta, gamma, 0)
        };
        let cell = Cell {
            epsilon: SignSignature::ALL[rng.gen_range(0..4)],
            det_sign: Sign::from_bool(rng.gen_bool(0.5)),
            beta,
            gamma,
            delta,
            xi: [0; 4].map(|_| units[rng.gen_range(0..8)]),
        };
        if cell.satisfies_determinant_congruence() {
            out.push(cell);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl MonteCarloEstimate {
    /// The closed-form main term `2 P^2 / 2^(beta+gamma+delta)`.
    pub fn main_term(beta: u32, gamma: u32, delta: u32, height: u64) -> f64 {
        2.0 * (height as f64).powi(2) / 2f64.powi((beta + gamma + delta) as i32)
    }
}

/// `(1/w) * integral of -ln(s) over (centre - w/2, centre + w/2) within (0, 1)`:
/// the `(y1, y4)` mass of the shell, since `y1 y4` has density `-ln s` on `(0, 1)`.
fn shell_mass(centre: f64, width: f64) -> f64 {
    let lo = (centre - width / 2.0).max(0.0);
    let hi = (centre + width / 2.0).min(1.0);
    if hi <= lo {
        return 0.0;
    }
    // Antiderivative of -ln s is s - s ln s, continuous at 0.
    let g = |s: f64| if s == 0.0 { 0.0 } else { s - s * s.ln() };
    (g(hi) - g(lo)) / width
}

const CHUNK: u64 = 1 << 16;

/// Monte Carlo estimate of the archimedean density for height `height`.
///
/// After scaling the box to `(0, 1]^4` the density is
/// `P^2 / 2^(beta+gamma+delta)` times the shell volume of
/// `|y1 y4 - y2 y3 - target/P^2| < w/2` divided by `w`. The pair `(y1, y4)` is
/// integrated in closed form, so only `(y2, y3)` is sampled. Chunks draw from
/// independent ChaCha streams keyed by the seed, so the result does not depend
/// on the thread count.
pub fn mu_inf_estimate(
    beta: u32,
    gamma: u32,
    delta: u32,
    height: u64,
    target: Sign,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if height == 0 || samples == 0 {
        return Err(Error::Domain("height and sample count must be positive"));
    }
    let shift = target.to_i64() as f64 / (height as f64).powi(2);
    let width = DEFAULT_SHELL_WIDTH / (height as f64).powi(2);
    let chunks = samples.div_ceil(CHUNK);
    let (sum, sum_sq) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let n = CHUNK.min(samples - chunk * CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..n {
                let y2: f64 = 1.0 - rng.gen::<f64>();
                let y3: f64 = 1.0 - rng.gen::<f64>();
                let m = shell_mass(y2 * y3 + shift, width);
                s += m;
                s2 += m * m;
            }
            (s, s2)
        })
        .collect::<Vec<_>>()
        .into_iter()
        // Sequential fold keeps the float sum independent of thread scheduling.
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let scale = (height as f64).powi(2) / 2f64.powi((beta + gamma + delta) as i32);
    Ok(MonteCarloEstimate {
        estimate: scale * mean,
        std_error: scale * (var / n).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn odd_counts_match_the_closed_form() {
        assert_eq!(mu_p_bruteforce(p(3), 1, Sign::Plus).unwrap(), 24);
        assert_eq!(mu_p_bruteforce(p(3), 2, Sign::Minus).unwrap(), 648);
        assert_eq!(mu_p_bruteforce(p(5), 1, Sign::Plus).unwrap(), 120);
        assert_eq!(mu_p_expected(p(5), 1), 120);
    }

    #[test]
    fn odd_count_budget() {
        assert!(matches!(mu_p_bruteforce(p(101), 2, Sign::Plus), Err(Error::Budget(_))));
        assert!(mu_p_bruteforce(Prime::TWO, 1, Sign::Plus).is_err());
    }

    #[test]
    fn inverse_mod_two_power() {
        for x in (1..200u64).step_by(2) {
            assert_eq!(x.wrapping_mul(inverse_mod_pow2(x)), 1);
        }
    }

    fn cell(beta: u32, gamma: u32, delta: u32, xi: [u8; 4], det: Sign) -> Cell {
        Cell {
            epsilon: SignSignature::PlusPlusPlus,
            det_sign: det,
            beta,
            gamma,
            delta,
            xi,
        }
    }

    #[test]
    fn two_adic_count_triples_per_level() {
        // 1*1 - 2*1*1 = -1
        let c = cell(1, 0, 0, [1, 1, 1, 1], Sign::Minus);
        assert!(c.satisfies_determinant_congruence());
        let values = mu_2_stabilization(&c, 4..=7).unwrap();
        assert!(values.iter().all(|v| *v == ExactRational::pow2(-12)));
        // delta > 0 takes the other branch: 2*1*1 - 1*1 = 1
        let c = cell(0, 0, 1, [1, 1, 1, 1], Sign::Plus);
        assert!(c.satisfies_determinant_congruence());
        assert_eq!(s_count(&c, 6).unwrap(), 1 << 6);
    }

    #[test]
    fn two_adic_count_vanishes_off_the_congruence() {
        let c = cell(1, 0, 0, [1, 1, 1, 1], Sign::Plus);
        assert!(!c.satisfies_determinant_congruence());
        assert_eq!(s_count(&c, 8).unwrap(), 0);
    }

    #[test]
    fn sampled_cells_are_valid_and_reproducible() {
        let cells = sample_cells(3, 20);
        assert_eq!(cells, sample_cells(3, 20));
        for c in &cells {
            assert!(c.has_valid_shape() && c.has_unit_residues());
            assert!(c.satisfies_determinant_congruence());
        }
    }

    #[test]
    fn shell_mass_approximates_log_density() {
        let m = shell_mass(0.25, 1e-6);
        assert!((m - (-(0.25f64).ln())).abs() < 1e-6);
        assert_eq!(shell_mass(2.0, 1e-3), 0.0);
    }

    #[test]
    fn archimedean_estimate_is_reproducible() {
        let a = mu_inf_estimate(0, 0, 1, 50, Sign::Plus, 200_000, 7).unwrap();
        let b = mu_inf_estimate(0, 0, 1, 50, Sign::Plus, 200_000, 7).unwrap();
        assert_eq!(a, b);
        let expected = MonteCarloEstimate::main_term(0, 0, 1, 50);
        assert!((a.estimate - expected).abs() / expected < 0.05);
    }
}
