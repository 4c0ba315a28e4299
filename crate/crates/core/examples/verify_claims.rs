//! Runs every check the `verify` subcommand runs, at a small height, and
//! prints one line per claim.

use chatelet::brauer::ctcs_family_check;
use chatelet::census::{run_census, CensusConfig};
use chatelet::density::{verify_paper, DensityTable, VerifyInputs, DEFAULT_MU_SEED};

fn main() -> chatelet::Result<()> {
    let height = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let mut config = CensusConfig::new(height);
    config.shards = 4;
    let table = DensityTable::compute(&config.local)?;
    let census = run_census(&config)?;
    let family = ctcs_family_check(199)?;
    let report = verify_paper(&VerifyInputs {
        table: &table,
        census: &census,
        family: &family,
        seed: DEFAULT_MU_SEED,
    });
    println!("{}", report.summary());
    println!("invariants hold: {}", report.invariants_hold());
    Ok(())
}
