//! Recomputes the 2-adic density table by classifying representatives of
//! every stratum, then assembles the leading constants from it.
//!
//! Rows whose exponent class is unbounded are split by parity, because the
//! counts differ between even and odd exponents in some rows.

use chatelet::census::{over_pi_squared, LeadingConstants};
use chatelet::density::{published_stratum_sum, Column, DensityTable};
use chatelet::local::LocalConfig;

fn main() -> chatelet::Result<()> {
    let table = DensityTable::compute(&LocalConfig::default())?;
    println!("{:<24} {:>10} {:>10} {:>10} {:>10}  match", "row", "H", "listed H", "H~", "listed H~");
    for row in &table.rows {
        println!(
            "{:<24} {:>10} {:>10} {:>10} {:>10}  {}",
            row.published.label(),
            row.effective(Column::H).to_string(),
            row.published.h.to_string(),
            row.effective(Column::Htilde).to_string(),
            row.published.htilde.to_string(),
            row.matches_published()
        );
        if !row.uniform() {
            for part in &row.parts {
                println!("    {:<20} {:?}", part.label(), part.counts);
            }
        }
    }

    for column in [Column::T, Column::H, Column::Htilde] {
        println!(
            "sum {:?}: computed {}, from listed rows {}",
            column,
            table.stratum_sum(column),
            published_stratum_sum(column)
        );
    }
    let ours = LeadingConstants::from_table(&table);
    let listed = LeadingConstants::published();
    for (name, a, b) in [
        ("c_tot", &ours.c_tot, &listed.c_tot),
        ("c_loc", &ours.c_loc, &listed.c_loc),
        ("c_br", &ours.c_br, &listed.c_br),
    ] {
        println!("{name:<6} {a} (/pi^2 = {:.5})   listed {b} (/pi^2 = {:.5})", over_pi_squared(a), over_pi_squared(b));
    }
    Ok(())
}
