//! The family (1, 1 - k, -1, k) with k = 3 mod 4 fails the Hasse principle
//! for every k. This walks the family and stops on the first exception.

use chatelet::brauer::ctcs_family_check;

fn main() -> chatelet::Result<()> {
    let k_max = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(99);
    let cases = ctcs_family_check(k_max)?;
    for case in &cases {
        println!("k = {:>4}  {:?}  {}", case.k, case.tuple, case.verdict);
    }
    match cases.iter().find(|c| !c.pass) {
        Some(bad) => println!("exception at k = {}", bad.k),
        None => println!("all {} members are Hasse failures", cases.len()),
    }
    Ok(())
}
