//! Smallest delta for which a discrete mechanism P(Y|X) is (epsilon, delta)-LDP.
//!
//! cargo run --example ldp_audit

use rdfc::discrete::{self, BscMixtureParams, JointPmf};

fn main() -> rdfc::Result<()> {
    // binary randomized response with flip probability 0.25 is ln(3)-LDP
    let rr = JointPmf::new(2, vec![0.375, 0.125, 0.125, 0.375])?;
    for eps in [0.0, 0.5, 1.0, 3f64.ln(), 1.5] {
        println!("randomized response, eps = {eps:.4}: delta = {:.6}", discrete::ldp_audit(&rr, eps)?);
    }
    let q = discrete::bsc_mixture(&BscMixtureParams::new(0.05, 0.45, 0.5, 0.25, 0.45, 0.4))?;
    println!();
    for eps in [0.0, 0.5, 1.0, 2.0, 4.0] {
        println!("BSC mixture, eps = {eps:.1}: delta = {:.6}", discrete::ldp_audit(&q, eps)?);
    }
    Ok(())
}
