//! Finite-blocklength privacy slack delta_n for a random-response source and
//! for the clipped Gaussian mechanism.
//!
//! cargo run --example finite_blocklength

use rdfc::discrete::{self, BscMixtureParams};
use rdfc::fbl::{self, DiscreteSource, FblConfig, GaussianSource, InfoDensitySource};
use rdfc::gaussian::{self, GaussianLdpConfig};

fn report<S: InfoDensitySource + Sync>(name: &str, src: &S, epsilon: f64, delta: f64) -> rdfc::Result<()> {
    let mi = src.mutual_information()?;
    let cfg = FblConfig {
        rate_r: mi + 0.05,
        n: 1,
        epsilon,
        delta,
        a: 2.0,
        k_const: 1.0,
    };
    let rows = fbl::delta_n_curve(src, &cfg, &[50, 100, 200, 500, 1000, 2000])?;
    println!(
        "{name}: I = {mi:.5} nats, R = {:.5}, rho* = {:.4} ({:?}), exponent = {:.3e}",
        cfg.rate_r, rows[0].rho_star, rows[0].branch, rows[0].exponent
    );
    for r in &rows {
        println!("  n = {:>5}  ln Delta_n = {:>10.4}  delta_n = {:.6e}", r.n, r.ln_delta_cap_n, r.delta_n);
    }
    Ok(())
}

fn main() -> rdfc::Result<()> {
    let q = discrete::bsc_mixture(&BscMixtureParams::new(0.1, 0.05, 0.1, 0.0, 0.1, 0.05))?;
    let src = DiscreteSource::new(q);
    for alpha in [1.001, 1.5, 2.0, 4.0] {
        println!("I_{alpha} = {:.5}", src.alpha_mutual_information(alpha)?);
    }
    report("random response", &src, 1.0, 0.0)?;

    let cfg = GaussianLdpConfig::unit_clip(0.4938, 0.8918, 0.0097);
    let g = GaussianSource::new(gaussian::build_joint(&cfg)?);
    report("clipped Gaussian", &g, cfg.epsilon, cfg.delta)
}
