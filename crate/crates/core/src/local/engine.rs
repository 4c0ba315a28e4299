//! Ball subdivision over `Z_p` for a pair of quadratic factors.
//!
//! All arithmetic is done modulo the largest `p^E` below `2^64`, so valuations are
//! exact below `E` and reported as `E` otherwise. A ball is the set
//! `center + p^level Z_p`.

use crate::arith::{hilbert_minus_one, Place, Prime, Sign};

use super::{ChartPolynomialPair, InvariantSet, Quadratic};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ball {
    pub center: u64,
    pub level: u32,
}

impl Ball {
    /// All of `Z_p`.
    pub const WHOLE: Ball = Ball {
        center: 0,
        level: 0,
    };

    /// `p Z_p`.
    pub const MAXIMAL_IDEAL: Ball = Ball {
        center: 0,
        level: 1,
    };
}

/// When to stop exploring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// As soon as any point is found.
    FirstPoint,
    /// Once both invariants are found or the search space is exhausted.
    Exhaustive,
}

#[derive(Debug)]
pub struct DepthExceeded(pub u32);

/// Arithmetic modulo `p^precision` for one prime.
#[derive(Clone, Copy, Debug)]
pub struct LocalRing {
    prime: Prime,
    modulus: u64,
    precision: u32,
}

impl LocalRing {
    pub fn new(prime: Prime) -> Self {
        let p = prime.get();
        let mut modulus = 1u64;
        let mut precision = 0;
        while let Some(next) = modulus.checked_mul(p) {
            modulus = next;
            precision += 1;
        }
        LocalRing {
            prime,
            modulus,
            precision,
        }
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }

    fn mul(&self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.modulus as u128) as u64
    }

    fn add(&self, x: u64, y: u64) -> u64 {
        ((x as u128 + y as u128) % self.modulus as u128) as u64
    }

    /// Valuation of a residue, capped at the working precision.
    fn valuation(&self, x: u64) -> u32 {
        if x == 0 {
            return self.precision;
        }
        if self.prime.is_two() {
            return x.trailing_zeros();
        }
        let p = self.prime.get();
        let mut x = x;
        let mut e = 0;
        while x % p == 0 {
            x /= p;
            e += 1;
        }
        e
    }

    /// `(-1, x)_p` for a residue whose valuation is below the precision by at
    /// least the decision margin.
    fn symbol(&self, x: u64, v: u32) -> Sign {
        let p = self.prime.get();
        if p == 2 {
            Sign::from_bool((x >> v) % 4 == 1)
        } else if p % 4 == 1 {
            Sign::Plus
        } else {
            Sign::from_bool(v % 2 == 0)
        }
    }

    fn power(&self, e: u32) -> u64 {
        self.prime.get().pow(e)
    }

    /// Margin below the ball level at which a factor's square class is frozen
    /// on the whole ball.
    pub fn decision_margin(&self) -> u32 {
        if self.prime.is_two() {
            3
        } else {
            1
        }
    }
}

struct ReducedQuadratic {
    lead: u64,
    constant: u64,
    twice_lead: u64,
}

impl ReducedQuadratic {
    fn new(ring: &LocalRing, q: &Quadratic) -> Self {
        ReducedQuadratic {
            lead: ring.reduce(q.lead as i128),
            constant: ring.reduce(q.constant as i128),
            twice_lead: ring.reduce(2 * q.lead as i128),
        }
    }

    fn eval(&self, ring: &LocalRing, t: u64) -> u64 {
        ring.add(ring.mul(self.lead, ring.mul(t, t)), self.constant)
    }

    fn derivative(&self, ring: &LocalRing, t: u64) -> u64 {
        ring.mul(self.twice_lead, t)
    }
}

/// Outcome of examining one ball.
#[derive(Debug, PartialEq, Eq)]
enum Verdict {
    /// Both factors have frozen square classes: the ball contributes this
    /// invariant, or nothing.
    Decided(Option<Sign>),
    /// One factor has a certified root in the ball and the other is frozen.
    Root(Sign),
    Split,
}

pub struct BallSearch<'a> {
    ring: LocalRing,
    pair: &'a ChartPolynomialPair,
    first: ReducedQuadratic,
    second: ReducedQuadratic,
    depth_cap: u32,
    root_invariants: [Sign; 2],
    pub balls_examined: u64,
}

impl<'a> BallSearch<'a> {
    pub fn new(pair: &'a ChartPolynomialPair, prime: Prime, depth_cap: u32) -> Self {
        let ring = LocalRing::new(prime);
        let place = Place::Prime(prime);
        let det = pair.chart_det();
        // At a root of g1, g2 = det/lead1; at a root of g2, g1 = -det/lead2.
        let root_invariants = [
            hilbert_minus_one(det * pair.first.lead as i128, place).expect("nonzero"),
            hilbert_minus_one(-det * pair.second.lead as i128, place).expect("nonzero"),
        ];
        BallSearch {
            ring,
            pair,
            first: ReducedQuadratic::new(&ring, &pair.first),
            second: ReducedQuadratic::new(&ring, &pair.second),
            depth_cap: depth_cap.min(ring.precision),
            root_invariants,
            balls_examined: 0,
        }
    }

    /// Strong Hensel: a root exists in `center + p^(v(g) - v(g'))`, and it lies
    /// in the ball when that exponent reaches the ball level.
    fn root_certified(&self, value_val: u32, deriv_val: u32, level: u32) -> bool {
        deriv_val < self.ring.precision
            && value_val > 2 * deriv_val
            && value_val - deriv_val >= level
    }

    fn examine(&self, ball: Ball) -> Verdict {
        let ring = &self.ring;
        let t = ball.center;
        let g1 = self.first.eval(ring, t);
        let g2 = self.second.eval(ring, t);
        let v1 = ring.valuation(g1);
        let v2 = ring.valuation(g2);
        let margin = ring.decision_margin();
        let frozen1 = v1 + margin <= ball.level;
        let frozen2 = v2 + margin <= ball.level;

        if frozen1 && frozen2 {
            let s1 = ring.symbol(g1, v1);
            let s2 = ring.symbol(g2, v2);
            // g1 g2 is a norm iff the two symbols agree.
            return Verdict::Decided((s1 == s2).then_some(s1));
        }

        let cert1 =
            self.root_certified(v1, ring.valuation(self.first.derivative(ring, t)), ball.level);
        let cert2 =
            self.root_certified(v2, ring.valuation(self.second.derivative(ring, t)), ball.level);
        assert!(
            !(cert1 && cert2),
            "both factors of {:?} certified at one center",
            self.pair
        );
        if cert1 && frozen2 {
            debug_assert_eq!(self.root_invariants[0], ring.symbol(g2, v2));
            return Verdict::Root(self.root_invariants[0]);
        }
        if cert2 && frozen1 {
            debug_assert_eq!(self.root_invariants[1], ring.symbol(g1, v1));
            return Verdict::Root(self.root_invariants[1]);
        }
        Verdict::Split
    }

    /// Explores the given balls; returns the invariants of all points found.
    ///
    /// Balls that would need to go past the depth cap are skipped; if any
    /// were skipped and the stop rule was not met, the search is undecided.
    pub fn run(&mut self, start: &[Ball], stop: StopRule) -> Result<InvariantSet, DepthExceeded> {
        let mut found = InvariantSet::EMPTY;
        let mut skipped: Option<u32> = None;
        let mut stack: Vec<Ball> = start.iter().rev().copied().collect();
        let p = self.ring.prime.get();
        while let Some(ball) = stack.pop() {
            self.balls_examined += 1;
            match self.examine(ball) {
                Verdict::Decided(Some(s)) | Verdict::Root(s) => {
                    found.insert(s);
                    let done = match stop {
                        StopRule::FirstPoint => true,
                        StopRule::Exhaustive => found.is_full(),
                    };
                    if done {
                        return Ok(found);
                    }
                }
                Verdict::Decided(None) => {}
                Verdict::Split => {
                    let level = ball.level + 1;
                    if level > self.depth_cap {
                        skipped = Some(level);
                        continue;
                    }
                    let step = self.ring.power(ball.level);
                    for j in (0..p).rev() {
                        stack.push(Ball {
                            center: ball.center + j * step,
                            level,
                        });
                    }
                }
            }
        }
        match skipped {
            Some(level) => Err(DepthExceeded(level)),
            None => Ok(found),
        }
    }
}
