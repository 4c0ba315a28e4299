//! Claim-by-claim comparison of the recomputed quantities against the
//! published ones.
//!
//! Two kinds of claim are reported. Comparisons with published numbers get
//! `match` or `mismatch` and never fail the run. Internal invariants (sign
//! independence, stabilisation, count ordering, orbit completeness, ...) get
//! `holds` or `violated`; a violation means the computation itself is suspect.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::arith::{ExactRational, Prime, Sign};
use crate::brauer::FamilyCase;
use crate::census::{over_pi_squared, relative_deviation, CensusReport, LeadingConstants};
use crate::surface::SignSignature;

use super::mu::{
    mu_2_stabilization, mu_inf_estimate, mu_p_bruteforce, mu_p_expected, sample_cells,
    MonteCarloEstimate,
};
use super::table::{published_stratum_sum, Column, DensityTable, TableRow};

/// Relative tolerance for `N/P^2` and `N_loc/P^2` against a constant.
pub const TOTAL_TOLERANCE: f64 = 0.03;
/// Relative tolerance for `N_Br/P^2`.
pub const BR_TOLERANCE: f64 = 0.05;
/// Absolute tolerance for `N_Br/N_loc`.
pub const RATIO_TOLERANCE: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimVerdict {
    Match,
    Mismatch,
    Holds,
    Violated,
}

impl ClaimVerdict {
    fn compare(ok: bool) -> Self {
        if ok {
            ClaimVerdict::Match
        } else {
            ClaimVerdict::Mismatch
        }
    }

    fn invariant(ok: bool) -> Self {
        if ok {
            ClaimVerdict::Holds
        } else {
            ClaimVerdict::Violated
        }
    }
}

impl fmt::Display for ClaimVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClaimVerdict::Match => "match",
            ClaimVerdict::Mismatch => "mismatch",
            ClaimVerdict::Holds => "holds",
            ClaimVerdict::Violated => "violated",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub claim_id: String,
    pub paper_value: String,
    pub computed_value: String,
    pub verdict: ClaimVerdict,
}

impl Claim {
    fn new(id: impl Into<String>, listed: impl fmt::Display, computed: impl fmt::Display, verdict: ClaimVerdict) -> Self {
        Claim {
            claim_id: id.into(),
            paper_value: listed.to_string(),
            computed_value: computed.to_string(),
            verdict,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VerifyReport {
    pub claims: Vec<Claim>,
}

impl VerifyReport {
    pub fn claim(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.claim_id == id)
    }

    pub fn invariants_hold(&self) -> bool {
        self.claims.iter().all(|c| c.verdict != ClaimVerdict::Violated)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| c.verdict == ClaimVerdict::Mismatch)
    }

    /// Plain-text rendering with the same content as the JSON.
    pub fn summary(&self) -> String {
        let width = self.claims.iter().map(|c| c.claim_id.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.claims {
            let _ = writeln!(
                out,
                "{:<9} {:<width$}  published: {}  computed: {}",
                c.verdict, c.claim_id, c.paper_value, c.computed_value
            );
        }
        let mismatches = self.mismatches().count();
        let violated = self.claims.iter().filter(|c| c.verdict == ClaimVerdict::Violated).count();
        let _ = writeln!(
            out,
            "{} claims, {} mismatched, {} invariants violated",
            self.claims.len(),
            mismatches,
            violated
        );
        out
    }
}

/// Everything the report is built from.
pub struct VerifyInputs<'a> {
    pub table: &'a DensityTable,
    /// Census reports in ascending height; the last one is compared.
    pub census: &'a [CensusReport],
    pub family: &'a [FamilyCase],
    /// Seed for the sampled cells and the archimedean Monte Carlo.
    pub seed: u64,
}

fn row_value(row: &TableRow) -> String {
    let mut s = format!(
        "H={} Htilde={}",
        row.effective(Column::H),
        row.effective(Column::Htilde)
    );
    if !row.uniform() {
        let parts: Vec<String> = row
            .parts
            .iter()
            .map(|p| format!("{}: H={} Htilde={}", p.label(), p.counts.h, p.counts.htilde))
            .collect();
        let _ = write!(s, " [{}]", parts.join("; "));
    }
    s
}

fn table_claims(table: &DensityTable, claims: &mut Vec<Claim>) {
    for row in &table.rows {
        claims.push(Claim::new(
            format!("table1/{}", row.published.label()),
            format!("H={} Htilde={}", row.published.h, row.published.htilde),
            row_value(row),
            ClaimVerdict::compare(row.matches_published()),
        ));
    }
    let parts = || table.rows.iter().flat_map(|r| r.parts.iter());
    let samples = || parts().flat_map(|p| p.samples.iter());
    claims.push(Claim::new(
        "table1/sign-independence",
        "counts do not depend on the sign pattern",
        format!("{} strata checked", samples().count()),
        ClaimVerdict::invariant(table.all_sign_independent()),
    ));
    claims.push(Claim::new(
        "table1/stabilisation",
        "counts constant along each row class",
        format!("{} parity parts, each at two exponents", parts().count()),
        ClaimVerdict::invariant(table.all_stable()),
    ));
    let ordered = samples().all(|s| {
        SignSignature::ALL.iter().all(|e| {
            let c = s.combined(*e);
            c.htilde <= c.h && c.h <= c.t && c.t == 1024
        })
    });
    claims.push(Claim::new(
        "table1/count-order",
        "#H~ <= #H <= #T = 1024",
        format!("checked on {} strata", samples().count()),
        ClaimVerdict::invariant(ordered),
    ));
    let multiples = samples().all(|s| {
        s.counts
            .values()
            .flat_map(|m| m.values())
            .all(|c| c.t % 32 == 0 && c.h % 32 == 0 && c.htilde % 32 == 0)
    });
    claims.push(Claim::new(
        "table1/multiples-of-32",
        "all counts divisible by 32",
        "per sign pattern and determinant sign",
        ClaimVerdict::invariant(multiples),
    ));
    claims.push(Claim::new(
        "table1/determinacy",
        "classes mod 16 determine the verdict",
        format!(
            "{} representatives per class agreed in every class",
            super::table::REPRESENTATIVES_PER_CELL
        ),
        ClaimVerdict::Holds,
    ));
}

fn sum_claims(table: &DensityTable, claims: &mut Vec<Claim>) -> LeadingConstants {
    let sum_t = table.stratum_sum(Column::T);
    let sum_h = table.stratum_sum(Column::H);
    let sum_ht = table.stratum_sum(Column::Htilde);
    let scale = ExactRational::pow2(-13);

    claims.push(Claim::new(
        "sum/T",
        ExactRational::pow2(13),
        &sum_t,
        ClaimVerdict::compare(sum_t == ExactRational::pow2(13)),
    ));
    let paper_h = ExactRational::new(17856, 3).expect("nonzero denominator");
    let listed_ht = ExactRational::integer(2112);
    claims.push(Claim::new("sum/H", &paper_h, &sum_h, ClaimVerdict::compare(sum_h == paper_h)));
    claims.push(Claim::new(
        "sum/Htilde",
        &listed_ht,
        &sum_ht,
        ClaimVerdict::compare(sum_ht == listed_ht),
    ));
    let tau = &sum_h * &scale;
    let listed_tau = &paper_h * &scale;
    claims.push(Claim::new("tau_loc_2", &listed_tau, &tau, ClaimVerdict::compare(tau == listed_tau)));
    let sigma = &sum_ht * &scale;
    let listed_sigma = &listed_ht * &scale;
    claims.push(Claim::new(
        "sigma_loc_2",
        &listed_sigma,
        &sigma,
        ClaimVerdict::compare(sigma == listed_sigma),
    ));

    // The assembly step on its own: the published rows must give the
    // published sums, or the sums were not derived from that table.
    let assembled_h = published_stratum_sum(Column::H);
    let assembled_ht = published_stratum_sum(Column::Htilde);
    claims.push(Claim::new(
        "assembly/published-rows",
        format!("H sum {paper_h}, Htilde sum {listed_ht}"),
        format!("H sum {assembled_h}, Htilde sum {assembled_ht}"),
        ClaimVerdict::invariant(assembled_h == paper_h && assembled_ht == listed_ht),
    ));

    let published = LeadingConstants::published();
    let computed = LeadingConstants::from_table(table);
    for (id, p, c) in [
        ("constant/c_tot", &published.c_tot, &computed.c_tot),
        ("constant/c_loc", &published.c_loc, &computed.c_loc),
        ("constant/c_br", &published.c_br, &computed.c_br),
    ] {
        claims.push(Claim::new(id, p, c, ClaimVerdict::compare(p == c)));
    }
    let listed_ratio = published.c_br.checked_div(&published.c_loc).expect("nonzero");
    let ratio = computed.c_br.checked_div(&computed.c_loc);
    claims.push(Claim::new(
        "constant/c_br_over_c_loc",
        &listed_ratio,
        ratio.as_ref().map(ToString::to_string).unwrap_or_else(|_| "undefined".into()),
        ClaimVerdict::compare(ratio.ok().as_ref() == Some(&listed_ratio)),
    ));
    computed
}

fn census_claims(census: &[CensusReport], computed: &LeadingConstants, claims: &mut Vec<Claim>) {
    let published = LeadingConstants::published();
    for r in census {
        claims.push(Claim::new(
            format!("census/P={}/orbit-completeness", r.height),
            "raw counts divisible by 4, N_Br <= N_loc <= N",
            format!("raw {} / {} / {}", r.raw_total, r.raw_loc, r.raw_br),
            ClaimVerdict::invariant(r.orbit_complete() && r.raw_br <= r.raw_loc && r.raw_loc <= r.raw_total),
        ));
        let odd_witnesses: u64 = r
            .witnesses
            .iter()
            .filter(|(place, _)| *place != "inf" && *place != "2")
            .map(|(_, n)| n)
            .sum();
        claims.push(Claim::new(
            format!("census/P={}/odd-places", r.height),
            "odd places never obstruct",
            format!("{odd_witnesses} tuples insoluble at an odd prime"),
            ClaimVerdict::invariant(odd_witnesses == 0),
        ));
    }
    let Some(last) = census.last() else {
        return;
    };
    let p = last.height;
    let fmt_dev = |observed: &ExactRational, c: &ExactRational| {
        format!(
            "{:.6} vs {:.6} ({:.2}% off)",
            observed.to_f64(),
            over_pi_squared(c),
            100.0 * relative_deviation(observed, c)
        )
    };
    for (name, observed, listed_c, computed_c, tol) in [
        ("N_over_P2", &last.n_over_p2, &published.c_tot, &computed.c_tot, TOTAL_TOLERANCE),
        ("Nloc_over_P2", &last.nloc_over_p2, &published.c_loc, &computed.c_loc, TOTAL_TOLERANCE),
        ("NBr_over_P2", &last.nbr_over_p2, &published.c_br, &computed.c_br, BR_TOLERANCE),
    ] {
        claims.push(Claim::new(
            format!("census/P={p}/{name}/published"),
            format!("{listed_c}/pi^2"),
            fmt_dev(observed, listed_c),
            ClaimVerdict::compare(relative_deviation(observed, listed_c) <= tol),
        ));
        claims.push(Claim::new(
            format!("census/P={p}/{name}/recomputed"),
            format!("{computed_c}/pi^2"),
            fmt_dev(observed, computed_c),
            ClaimVerdict::compare(relative_deviation(observed, computed_c) <= tol),
        ));
    }
    let listed_ratio = published.c_br.checked_div(&published.c_loc).expect("nonzero");
    let observed = last.nbr_over_nloc.as_ref().map(ExactRational::to_f64);
    claims.push(Claim::new(
        format!("census/P={p}/NBr_over_Nloc"),
        format!("{listed_ratio} = {:.6}", listed_ratio.to_f64()),
        observed.map(|x| format!("{x:.6}")).unwrap_or_else(|| "undefined".into()),
        ClaimVerdict::compare(observed.is_some_and(|x| (x - listed_ratio.to_f64()).abs() <= RATIO_TOLERANCE)),
    ));
}

fn family_claims(family: &[FamilyCase], claims: &mut Vec<Claim>) {
    let Some(k_max) = family.iter().map(|c| c.k).max() else {
        return;
    };
    let failures: Vec<String> = family.iter().filter(|c| !c.pass).map(|c| c.k.to_string()).collect();
    claims.push(Claim::new(
        format!("family/k=3mod4/k<={k_max}"),
        "every member fails the Hasse principle",
        if failures.is_empty() {
            format!("{} of {} are Hasse failures", family.len(), family.len())
        } else {
            format!("not Hasse failures for k = {}", failures.join(", "))
        },
        ClaimVerdict::compare(failures.is_empty()),
    ));
}

/// Odd prime powers checked against `p^(3t) (1 - p^-2)`.
pub const MU_P_CASES: [(u64, u32); 6] = [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1)];
/// Archimedean checks: strata and height.
pub const MU_INF_CASES: [(u32, u32, u32); 2] = [(0, 0, 1), (1, 1, 0)];
pub const MU_INF_HEIGHT: u64 = 50;
pub const MU_INF_SAMPLES: u64 = 1_000_000;
/// Relative tolerance for the archimedean estimate.
pub const MU_INF_TOLERANCE: f64 = 0.05;

fn density_claims(seed: u64, claims: &mut Vec<Claim>) {
    for (p, t) in MU_P_CASES {
        let prime = Prime::new(p).expect("small primes");
        let expected = mu_p_expected(prime, t);
        for target in [Sign::Plus, Sign::Minus] {
            let computed = mu_p_bruteforce(prime, t, target);
            claims.push(Claim::new(
                format!("mu_p/p={p}/t={t}/{target}"),
                expected,
                computed.as_ref().map(ToString::to_string).unwrap_or_else(|e| e.to_string()),
                ClaimVerdict::compare(computed.ok() == Some(expected)),
            ));
        }
    }
    let target = ExactRational::pow2(-12);
    let cells = sample_cells(seed, 20);
    let bad: Vec<String> = cells
        .iter()
        .filter(|c| !matches!(mu_2_stabilization(c, 4..=8), Ok(v) if v.iter().all(|x| *x == target)))
        .map(ToString::to_string)
        .collect();
    claims.push(Claim::new(
        "mu_2/levels-4-to-8",
        &target,
        if bad.is_empty() {
            format!("{} sampled cells, all equal", cells.len())
        } else {
            format!("differs on {}", bad.join("; "))
        },
        ClaimVerdict::compare(bad.is_empty()),
    ));
    for (beta, gamma, delta) in MU_INF_CASES {
        let expected = MonteCarloEstimate::main_term(beta, gamma, delta, MU_INF_HEIGHT);
        for target in [Sign::Plus, Sign::Minus] {
            let id = format!("mu_inf/({beta},{gamma},{delta})/P={MU_INF_HEIGHT}/{target}");
            match mu_inf_estimate(beta, gamma, delta, MU_INF_HEIGHT, target, MU_INF_SAMPLES, seed) {
                Ok(est) => claims.push(Claim::new(
                    id,
                    expected,
                    format!("{:.2} +- {:.2}", est.estimate, est.std_error),
                    ClaimVerdict::compare((est.estimate - expected).abs() <= MU_INF_TOLERANCE * expected),
                )),
                Err(e) => claims.push(Claim::new(id, expected, e, ClaimVerdict::Violated)),
            }
        }
    }
}

/// Builds the full report.
pub fn verify_paper(inputs: &VerifyInputs<'_>) -> VerifyReport {
    let mut claims = Vec::new();
    table_claims(inputs.table, &mut claims);
    let computed = sum_claims(inputs.table, &mut claims);
    census_claims(inputs.census, &computed, &mut claims);
    family_claims(inputs.family, &mut claims);
    density_claims(inputs.seed, &mut claims);
    VerifyReport { claims }
}
