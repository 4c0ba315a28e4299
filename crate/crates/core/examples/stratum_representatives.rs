// Picks random 2-adic strata, builds integer tuples landing in each one and
// confirms that every representative agrees on the 2-adic invariant set.

use chatelet::density::{evaluate_cell, sample_cells};
use chatelet::local::LocalConfig;
use chatelet::surface::{build_representatives, stratify, DEFAULT_SEARCH_BOUND};

fn main() -> chatelet::Result<()> {
    let config = LocalConfig::default();
    for cell in sample_cells(7, 6) {
        let reps = build_representatives(&cell, 4, DEFAULT_SEARCH_BOUND)?;
        assert!(reps.iter().all(|u| stratify(u).cell == cell));
        let outcome = evaluate_cell(&cell, 4, &config)?;
        println!("{cell}");
        for u in &reps {
            println!("    {u}");
        }
        println!("  2-adic {}  verdict {}", outcome.two_adic, outcome.verdict);
    }
    Ok(())
}
