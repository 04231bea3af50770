//! Both corner points of the rate region for the clipped Gaussian mechanism:
//! I(X;Y) (unlimited common randomness) and a lower bound on the Wyner common
//! information (no common randomness), across privacy levels.
//!
//! cargo run --example gaussian_ldp_corner_points

use rdfc::gaussian::{self, GaussianLdpConfig};
use rdfc::quadrature::QuadratureSpec;

fn main() -> rdfc::Result<()> {
    let quad = QuadratureSpec::default();
    let (sigma_x, delta) = (0.328, 0.0032);
    println!("sigma_x = {sigma_x}, delta = {delta}, C = 1");
    println!("{:>7} {:>11} {:>12} {:>12} {:>9}", "eps", "sigma_z^2", "WCI bound", "I(X;Y)", "ratio");
    for epsilon in [0.1, 0.1266, 0.25, 0.4663, 0.75, 1.0] {
        let cfg = GaussianLdpConfig::unit_clip(sigma_x, epsilon, delta);
        let joint = gaussian::build_joint(&cfg)?;
        let p = gaussian::rate_point(&cfg, &quad)?;
        println!(
            "{:>7.4} {:>11.3} {:>12.6} {:>12.3e} {:>9.2}",
            epsilon,
            joint.sigma_z_sq,
            p.wci_lower,
            p.mutual_info,
            p.wci_lower / p.mutual_info
        );
    }
    Ok(())
}
