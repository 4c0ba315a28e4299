//! Counting surfaces by height.
//!
//! Every tuple with `max(|a|, |b|, |c|, |d|) <= P`, `a > 0`, `abcd != 0` and
//! `ad - bc = +-1` is reached from a coprime pair `(a, c)` and a base solution
//! of the determinant equation, then classified. `N(P)` and friends are a
//! quarter of the raw tuple counts, one for each orbit of four.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{xgcd, ExactRational, Sign};
use crate::brauer::{classify_with, Classification, Verdict};
use crate::density::{Column, DensityTable};
use crate::error::{Error, Result};
use crate::local::LocalConfig;
use crate::surface::{stratify, SignSignature, SurfaceTuple};

fn floor_div(n: i64, d: i64) -> i64 {
    let q = n / d;
    if (n % d != 0) && ((n < 0) != (d < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(n: i64, d: i64) -> i64 {
    -floor_div(-n, d)
}

/// `k` with `lo <= base + k * step <= hi`, as an inclusive range.
fn progression_range(base: i64, step: i64, lo: i64, hi: i64) -> (i64, i64) {
    if step > 0 {
        (ceil_div(lo - base, step), floor_div(hi - base, step))
    } else {
        (ceil_div(hi - base, step), floor_div(lo - base, step))
    }
}

/// Calls `visitor` once for every tuple of height at most `height`, for the
/// given values of `a`. Order: `a`, then `c`, then determinant sign, then `b`.
pub fn enumerate_rows<F>(height: u64, a_values: impl IntoIterator<Item = i64>, mut visitor: F) -> Result<()>
where
    F: FnMut(SurfaceTuple) -> Result<()>,
{
    let p = i64::try_from(height).map_err(|_| Error::Overflow("census height"))?;
    for a in a_values {
        for c in (-p..=p).filter(|c| *c != 0) {
            let (g, s, t) = xgcd(a as i128, c as i128)?;
            if g != 1 {
                continue;
            }
            for det in [Sign::Minus, Sign::Plus] {
                let e = det.to_i64() as i128;
                // a (s e) - (-t e) c = e
                let d0 = i64::try_from(s * e).map_err(|_| Error::Overflow("base solution"))?;
                let b0 = i64::try_from(-t * e).map_err(|_| Error::Overflow("base solution"))?;
                let (k1, k2) = progression_range(b0, a, -p, p);
                let (k3, k4) = progression_range(d0, c, -p, p);
                for k in k1.max(k3)..=k2.min(k4) {
                    let b = b0 + k * a;
                    let d = d0 + k * c;
                    if b == 0 || d == 0 {
                        continue;
                    }
                    visitor(SurfaceTuple::new(a, b, c, d)?)?;
                }
            }
        }
    }
    Ok(())
}

/// Visits every tuple of height at most `height` exactly once.
pub fn enumerate<F>(height: u64, visitor: F) -> Result<()>
where
    F: FnMut(SurfaceTuple) -> Result<()>,
{
    let p = i64::try_from(height).map_err(|_| Error::Overflow("census height"))?;
    enumerate_rows(height, 1..=p, visitor)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StratumKey {
    pub epsilon: SignSignature,
    pub det: Sign,
    pub beta: u32,
    pub gamma: u32,
    pub delta: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumTally {
    pub total: u64,
    pub two_adic_soluble: u64,
    pub loc: u64,
    pub br: u64,
}

impl StratumTally {
    fn merge(&mut self, o: &StratumTally) {
        self.total += o.total;
        self.two_adic_soluble += o.two_adic_soluble;
        self.loc += o.loc;
        self.br += o.br;
    }
}

/// Raw tuple counts. Merging is a sum, so any partition of the work gives
/// the same result.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CensusCounters {
    pub raw_total: u64,
    pub raw_loc: u64,
    pub raw_br: u64,
    pub strata: BTreeMap<StratumKey, StratumTally>,
    /// First insoluble place, keyed by its display form (`inf`, `2`, `3`, ...).
    pub witnesses: BTreeMap<String, u64>,
}

impl CensusCounters {
    pub fn record(&mut self, u: &SurfaceTuple, c: &Classification) {
        self.raw_total += 1;
        let stratum = stratify(u).cell;
        let key = StratumKey {
            epsilon: stratum.epsilon,
            det: stratum.det_sign,
            beta: stratum.beta,
            gamma: stratum.gamma,
            delta: stratum.delta,
        };
        let tally = self.strata.entry(key).or_default();
        tally.total += 1;
        if !c.two_adic.is_empty() {
            tally.two_adic_soluble += 1;
        }
        match c.verdict {
            Verdict::InsolubleAt(place) => {
                *self.witnesses.entry(place.to_string()).or_default() += 1;
            }
            Verdict::SolubleNoObstruction => {
                self.raw_loc += 1;
                tally.loc += 1;
            }
            Verdict::HasseFailure => {
                self.raw_loc += 1;
                self.raw_br += 1;
                tally.loc += 1;
                tally.br += 1;
            }
        }
    }

    pub fn merge(&mut self, o: &CensusCounters) {
        self.raw_total += o.raw_total;
        self.raw_loc += o.raw_loc;
        self.raw_br += o.raw_br;
        for (k, v) in &o.strata {
            self.strata.entry(*k).or_default().merge(v);
        }
        for (k, v) in &o.witnesses {
            *self.witnesses.entry(k.clone()).or_default() += v;
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StratumRow {
    #[serde(flatten)]
    pub key: StratumKey,
    #[serde(flatten)]
    pub tally: StratumTally,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusReport {
    pub height: u64,
    pub raw_total: u64,
    pub raw_loc: u64,
    pub raw_br: u64,
    pub n: ExactRational,
    pub n_loc: ExactRational,
    pub n_br: ExactRational,
    pub n_over_p2: ExactRational,
    pub nloc_over_p2: ExactRational,
    pub nbr_over_p2: ExactRational,
    /// Absent when no tuple is locally soluble.
    pub nbr_over_nloc: Option<ExactRational>,
    pub witnesses: BTreeMap<String, u64>,
    pub strata: Vec<StratumRow>,
}

impl CensusReport {
    pub fn from_counters(height: u64, c: &CensusCounters) -> Self {
        let quarter = |n: u64| ExactRational::new(n as i128, 4).expect("nonzero denominator");
        let p2 = ExactRational::integer((height as i128).pow(2));
        let per_p2 = |x: &ExactRational| x.checked_div(&p2).expect("height is positive");
        let n = quarter(c.raw_total);
        let n_loc = quarter(c.raw_loc);
        let n_br = quarter(c.raw_br);
        CensusReport {
            height,
            raw_total: c.raw_total,
            raw_loc: c.raw_loc,
            raw_br: c.raw_br,
            n_over_p2: per_p2(&n),
            nloc_over_p2: per_p2(&n_loc),
            nbr_over_p2: per_p2(&n_br),
            nbr_over_nloc: n_br.checked_div(&n_loc).ok(),
            n,
            n_loc,
            n_br,
            witnesses: c.witnesses.clone(),
            strata: c
                .strata
                .iter()
                .map(|(key, tally)| StratumRow { key: *key, tally: *tally })
                .collect(),
        }
    }

    /// Whether the raw counts are whole orbits.
    pub fn orbit_complete(&self) -> bool {
        self.raw_total % 4 == 0 && self.raw_loc % 4 == 0 && self.raw_br % 4 == 0
    }
}

/// Census parameters. `shards` is the number of partitions of the `a` range,
/// each run on its own worker thread.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusConfig {
    pub height: u64,
    pub checkpoints: Vec<u64>,
    pub shards: usize,
    pub local: LocalConfig,
}

impl CensusConfig {
    pub fn new(height: u64) -> Self {
        CensusConfig {
            height,
            checkpoints: vec![height],
            shards: 1,
            local: LocalConfig::default(),
        }
    }

    /// Ascending checkpoints, ending at the full height.
    pub fn resolved_checkpoints(&self) -> Result<Vec<u64>> {
        if self.height == 0 {
            return Err(Error::Config("height must be at least 1".into()));
        }
        if self.shards == 0 {
            return Err(Error::Config("shard count must be at least 1".into()));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("checkpoints must be strictly ascending".into()));
        }
        if self.checkpoints.iter().any(|c| *c == 0 || *c > self.height) {
            return Err(Error::Config(format!(
                "checkpoints must lie in 1..={}",
                self.height
            )));
        }
        let mut out = self.checkpoints.clone();
        if out.last() != Some(&self.height) {
            out.push(self.height);
        }
        Ok(out)
    }
}

fn census_shard(config: &CensusConfig, checkpoints: &[u64], shard: usize) -> Result<Vec<CensusCounters>> {
    let mut buckets = vec![CensusCounters::default(); checkpoints.len()];
    let a_values = (1..=config.height as i64).filter(|a| (*a as usize - 1) % config.shards == shard);
    enumerate_rows(config.height, a_values, |u| {
        // Classification is constant on orbits and every orbit lies in one
        // height bucket, so classify the least member and credit all four.
        let swapped = u.swap_factors();
        let orbit = [u, swapped, u.invert_parameter(), swapped.invert_parameter()];
        if orbit.iter().any(|v| *v < u) {
            return Ok(());
        }
        let c = classify_with(&u, &config.local)?;
        let h = u.height();
        let bucket = checkpoints.partition_point(|cp| *cp < h);
        for v in &orbit {
            buckets[bucket].record(v, &c);
        }
        Ok(())
    })?;
    Ok(buckets)
}

/// Classifies every tuple of height at most `config.height` and reports the
/// cumulative counts at each checkpoint.
pub fn run_census(config: &CensusConfig) -> Result<Vec<CensusReport>> {
    let checkpoints = config.resolved_checkpoints()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.shards)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let shards: Vec<Vec<CensusCounters>> = pool.install(|| {
        (0..config.shards)
            .into_par_iter()
            .map(|s| census_shard(config, &checkpoints, s))
            .collect::<Result<_>>()
    })?;
    let mut running = CensusCounters::default();
    let mut reports = Vec::with_capacity(checkpoints.len());
    for (i, cp) in checkpoints.iter().enumerate() {
        for shard in &shards {
            running.merge(&shard[i]);
        }
        reports.push(CensusReport::from_counters(*cp, &running));
    }
    Ok(reports)
}

/// Leading constants `c` in `N(P) ~ c P^2 / pi^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeadingConstants {
    pub c_tot: ExactRational,
    pub c_loc: ExactRational,
    pub c_br: ExactRational,
}

impl LeadingConstants {
    /// `c_tot = S_T / 2^8`, `c_loc = 3 S_H / 2^10`, `c_br = 2 S_H~ / 2^10`.
    pub fn from_sums(t: &ExactRational, h: &ExactRational, htilde: &ExactRational) -> Self {
        LeadingConstants {
            c_tot: t * &ExactRational::pow2(-8),
            c_loc: ExactRational::integer(3) * h.clone() * ExactRational::pow2(-10),
            c_br: ExactRational::integer(2) * htilde.clone() * ExactRational::pow2(-10),
        }
    }

    pub fn from_table(table: &DensityTable) -> Self {
        Self::from_sums(
            &table.stratum_sum(Column::T),
            &table.stratum_sum(Column::H),
            &table.stratum_sum(Column::Htilde),
        )
    }

    /// The constants as stated in the literature: `32`, `279/16`, `33/8`.
    pub fn published() -> Self {
        LeadingConstants {
            c_tot: ExactRational::integer(32),
            c_loc: ExactRational::new(279, 16).expect("nonzero denominator"),
            c_br: ExactRational::new(33, 8).expect("nonzero denominator"),
        }
    }
}

/// Computes the density table and assembles the constants from it.
pub fn predict_constants(config: &LocalConfig) -> Result<LeadingConstants> {
    Ok(LeadingConstants::from_table(&DensityTable::compute(config)?))
}

/// `c / pi^2` as a float.
pub fn over_pi_squared(c: &ExactRational) -> f64 {
    c.to_f64() / (PI * PI)
}

/// `|observed - c/pi^2| / (c/pi^2)`.
pub fn relative_deviation(observed: &ExactRational, c: &ExactRational) -> f64 {
    let target = over_pi_squared(c);
    (observed.to_f64() - target).abs() / target
}

/// Renders `x` with six significant digits in plain decimal notation.
pub fn six_significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub const CSV_HEADER: [&str; 11] = [
    "P",
    "raw_total",
    "raw_loc",
    "raw_br",
    "N",
    "N_loc",
    "N_Br",
    "N_over_P2",
    "Nloc_over_P2",
    "NBr_over_P2",
    "NBr_over_Nloc",
];

pub fn write_csv<W: Write>(reports: &[CensusReport], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        let dec = |x: &ExactRational| six_significant(x.to_f64());
        w.write_record([
            r.height.to_string(),
            r.raw_total.to_string(),
            r.raw_loc.to_string(),
            r.raw_br.to_string(),
            // Whole numbers at every checkpoint, since orbits never straddle one.
            r.n.to_string(),
            r.n_loc.to_string(),
            r.n_br.to_string(),
            dec(&r.n_over_p2),
            dec(&r.nloc_over_p2),
            dec(&r.nbr_over_p2),
            r.nbr_over_nloc.as_ref().map(dec).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(reports: &[CensusReport], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, reports)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn collect(height: u64) -> Vec<SurfaceTuple> {
        let mut out = Vec::new();
        enumerate(height, |u| {
            out.push(u);
            Ok(())
        })
        .unwrap();
        out
    }

    #[test]
    fn small_heights() {
        assert!(collect(1).is_empty());
        let two = collect(2);
        assert_eq!(two.len(), 16);
        assert_eq!(two.iter().filter(|u| u.a() == 1).count(), 12);
        assert_eq!(two.iter().filter(|u| u.a() == 2).count(), 4);
    }

    #[test]
    fn enumeration_matches_brute_force_without_repeats() {
        for height in [3i64, 7, 12] {
            let seen = collect(height as u64);
            let set: HashSet<_> = seen.iter().copied().collect();
            assert_eq!(set.len(), seen.len());
            let mut brute = 0;
            let r = -height..=height;
            for a in 1..=height {
                for b in r.clone() {
                    for c in r.clone() {
                        for d in r.clone() {
                            if b * c * d != 0 && (a * d - b * c).abs() == 1 {
                                brute += 1;
                            }
                        }
                    }
                }
            }
            assert_eq!(seen.len(), brute);
        }
    }

    #[test]
    fn progression_bounds() {
        assert_eq!(progression_range(1, 3, -5, 5), (-2, 1));
        assert_eq!(progression_range(1, -3, -5, 5), (-1, 2));
        assert_eq!(floor_div(-7, 2), -4);
        assert_eq!(ceil_div(-7, 2), -3);
    }

    #[test]
    fn census_at_height_two() {
        let reports = run_census(&CensusConfig::new(2)).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].raw_total, 16);
        assert_eq!(reports[0].n, ExactRational::integer(4));
        assert!(reports[0].orbit_complete());
    }

    #[test]
    fn shard_count_does_not_change_counts() {
        let mut config = CensusConfig::new(40);
        config.checkpoints = vec![10, 25];
        let one = run_census(&config).unwrap();
        config.shards = 3;
        let three = run_census(&config).unwrap();
        let json = |r: &[CensusReport]| serde_json::to_string(r).unwrap();
        assert_eq!(json(&one), json(&three));
        for r in &one {
            assert!(r.raw_br <= r.raw_loc && r.raw_loc <= r.raw_total);
            assert!(r.orbit_complete());
        }
    }

    #[test]
    fn checkpoint_validation() {
        let mut config = CensusConfig::new(10);
        config.checkpoints = vec![5, 3];
        assert!(config.resolved_checkpoints().is_err());
        config.checkpoints = vec![3, 11];
        assert!(config.resolved_checkpoints().is_err());
        config.checkpoints = vec![3];
        assert_eq!(config.resolved_checkpoints().unwrap(), vec![3, 10]);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(six_significant(2.4318123), "2.43181");
        assert_eq!(six_significant(0.000123456789), "0.000123457");
        assert_eq!(six_significant(1234567.0), "1234567");
    }

    #[test]
    fn published_constants_ratio() {
        let c = LeadingConstants::published();
        assert_eq!(
            c.c_br.checked_div(&c.c_loc).unwrap(),
            ExactRational::new(66, 279).unwrap()
        );
    }
}
