//! Exact strong-coordination experiment: random codebooks with a likelihood
//! encoder, and the total variation between the induced law of (X^n, Y^n) and
//! the i.i.d. target.
//!
//! cargo run --example channel_synthesis

use rdfc::synth::{self, CoordinationScheme, SynthesisConfig};

fn main() -> rdfc::Result<()> {
    let scheme = CoordinationScheme::binary_symmetric(0.2)?;
    for (rate_r, rate_r0) in [(0.6, 0.3), (0.3, 0.0), (0.0, 0.0)] {
        let region = synth::rate_region_check(&scheme, rate_r, rate_r0);
        println!(
            "R = {rate_r}, R0 = {rate_r0}  (I(X;U) = {:.3}, I(XY;U) = {:.3}, inside: {})",
            region.i_xu,
            region.i_xyu,
            region.ok_r && region.ok_sum
        );
        for n in [2, 4, 6, 8] {
            let out = synth::synthesis_experiment(&SynthesisConfig {
                scheme: scheme.clone(),
                n,
                rate_r,
                rate_r0,
                trials: 20,
                seed: 1,
            })?;
            println!(
                "  n = {n}: M = {:>4}, M0 = {:>3}, median TV = {:.4}, mean TV = {:.4}",
                out.m, out.m0, out.median_tv, out.mean_tv
            );
        }
    }
    Ok(())
}
