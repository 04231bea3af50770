//! Statistics of a Gaussian source clipped to [-C, C].
//!
//! cargo run --example truncated_gaussian

use rdfc::special::TruncGaussStats;

fn main() -> rdfc::Result<()> {
    let clip = 1.0;
    println!("{:>8} {:>9} {:>10} {:>11} {:>10}", "sigma_x", "beta", "gamma", "var_trunc", "h(X)");
    for sigma_x in [0.1, 0.25, 0.4938, 0.75, 1.0, 2.0, 5.0] {
        let t = TruncGaussStats::new(sigma_x, clip)?;
        println!(
            "{:>8.4} {:>9.4} {:>10.6} {:>11.6} {:>10.5}",
            sigma_x, t.beta, t.gamma_beta, t.var_trunc, t.diff_entropy
        );
    }
    // with little mass beyond C the clipped law is nearly the original Gaussian
    let t = TruncGaussStats::new(0.1, clip)?;
    let untruncated = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * 0.01f64).ln();
    println!("\nsigma_x = 0.1: h = {:.8}, Gaussian h = {:.8}", t.diff_entropy, untruncated);
    Ok(())
}
