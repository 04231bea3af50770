//! Witsenhausen lower bound on the Wyner common information of a BSC-mixture
//! random-response joint, next to I(X;Y) and the marginal entropies.
//!
//! cargo run --example random_response_wci

use rdfc::discrete::{self, BscMixtureParams};

fn main() -> rdfc::Result<()> {
    let params = BscMixtureParams::new(0.1, 0.05, 0.1, 0.0, 0.1, 0.05);
    let q = discrete::bsc_mixture(&params)?;
    println!("joint pmf Q(x, y):");
    for i in 0..q.k() {
        let row: Vec<String> = q.row(i).iter().map(|v| format!("{v:.5}")).collect();
        println!("  {}", row.join("  "));
    }
    let (hx, hy) = discrete::marginal_entropies(&q);
    let mi = discrete::mutual_information_discrete(&q);
    let mt = discrete::maxtrace(&q)?;
    let w = discrete::wci_lower_bound_discrete(&q)?;
    println!("H(X) = {hx:.4}, H(Y) = {hy:.4}, H(X,Y) = {:.4}", w.h_joint);
    println!("maxtrace = {:.4} with permutation {:?}", mt.value, mt.perm);
    println!("f(maxtrace) = {:.4} ({:?} branch)", w.f_value, w.branch);
    println!("WCI bound = {:.4}, I(X;Y) = {mi:.4}, ratio = {:.2}", w.wci_lower, w.wci_lower / mi);
    println!("min(H(X), H(Y)) / WCI bound = {:.3}", hx.min(hy) / w.wci_lower);
    Ok(())
}
