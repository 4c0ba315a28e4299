//! Counts everywhere locally soluble surfaces and Hasse failures up to a
//! height bound, with checkpoints, and compares the growth against the
//! leading constants.
//!
//! `cargo run --release --example census -- 400 4`

use chatelet::census::{over_pi_squared, predict_constants, run_census, write_csv, CensusConfig, LeadingConstants};

fn main() -> chatelet::Result<()> {
    let mut args = std::env::args().skip(1);
    let height: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let shards: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);

    let mut config = CensusConfig::new(height);
    config.checkpoints = vec![height / 4, height / 2, height];
    config.shards = shards;
    let reports = run_census(&config)?;
    write_csv(&reports, std::io::stdout())?;

    let last = reports.last().expect("at least one checkpoint");
    println!("witnesses at P = {height}: {:?}", last.witnesses);
    let predicted = predict_constants(&config.local)?;
    let listed = LeadingConstants::published();
    for (name, observed, ours, theirs) in [
        ("N/P^2", &last.n_over_p2, &predicted.c_tot, &listed.c_tot),
        ("N_loc/P^2", &last.nloc_over_p2, &predicted.c_loc, &listed.c_loc),
        ("N_Br/P^2", &last.nbr_over_p2, &predicted.c_br, &listed.c_br),
    ] {
        println!(
            "{name:<10} {:.5}   computed constant {:.5}   listed {:.5}",
            observed.to_f64(),
            over_pi_squared(ours),
            over_pi_squared(theirs)
        );
    }
    Ok(())
}
