//! Local densities of ad - bc = +-1: brute-force counts mod p^t, the 2-adic
//! count stabilising in a stratum, and a Monte Carlo archimedean density.

use chatelet::arith::{Prime, Sign};
use chatelet::density::{mu_2_stabilization, mu_inf_estimate, mu_p_bruteforce, mu_p_expected, sample_cells, MonteCarloEstimate};

fn main() -> chatelet::Result<()> {
    for (p, t) in [(3, 1), (3, 2), (5, 1), (7, 1)] {
        let prime = Prime::new(p)?;
        let plus = mu_p_bruteforce(prime, t, Sign::Plus)?;
        let minus = mu_p_bruteforce(prime, t, Sign::Minus)?;
        println!("p = {p}, t = {t}: {plus} / {minus}, expected {}", mu_p_expected(prime, t));
    }

    let cell = sample_cells(11, 1).remove(0);
    println!("{cell}");
    for (t, mu) in (4..=8).zip(mu_2_stabilization(&cell, 4..=8)?) {
        println!("  normalised count at 2^{t}: {mu}");
    }

    let (beta, gamma, delta, height) = (1, 0, 2, 50);
    let main = MonteCarloEstimate::main_term(beta, gamma, delta, height);
    for target in [Sign::Plus, Sign::Minus] {
        let e = mu_inf_estimate(beta, gamma, delta, height, target, 1 << 20, 42)?;
        println!(
            "archimedean ({beta},{gamma},{delta}) P={height} det {target}: {:.3} +- {:.3}  (main term {main:.3})",
            e.estimate, e.std_error
        );
    }
    Ok(())
}
