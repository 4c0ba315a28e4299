//! Classifies a few surfaces y^2 + z^2 = (a t^2 + b)(c t^2 + d) and shows the
//! local invariant sets behind each verdict.
//!
//! Pass four integers to classify your own tuple:
//! `cargo run --example classify_surface -- 1 -2 -1 3`

use chatelet::brauer::classify;
use chatelet::surface::{orbit, stratify, SurfaceTuple};

fn show(u: &SurfaceTuple) -> chatelet::Result<()> {
    let c = classify(u)?;
    let s = stratify(u);
    println!("{u}");
    println!("  stratum     {}", s.cell);
    println!("  real set    {}", c.real);
    println!("  2-adic set  {}", c.two_adic);
    println!("  odd primes  {:?}", c.checked_odd_primes);
    println!("  verdict     {}", c.verdict);
    let same = orbit(u).iter().all(|v| classify(v).map(|x| x.verdict == c.verdict).unwrap_or(false));
    println!("  orbit of {} agrees: {same}", orbit(u).len());
    Ok(())
}

fn main() -> chatelet::Result<()> {
    let args: Vec<i64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    if let [a, b, c, d] = args[..] {
        return show(&SurfaceTuple::new(a, b, c, d)?);
    }
    for (a, b, c, d) in [(1, -2, -1, 3), (1, 1, 1, 2), (1, -1, 1, -2), (3, 1, 2, 1), (1, -6, -1, 7)] {
        show(&SurfaceTuple::new(a, b, c, d)?)?;
    }
    Ok(())
}
