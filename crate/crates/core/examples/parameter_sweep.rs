//! Random search for configurations where the WCI bound beats I(X;Y).
//!
//! cargo run --example parameter_sweep -- [count] [seed]

use rdfc::gaussian::{self, ParamRanges};
use rdfc::quadrature::QuadratureSpec;

fn main() -> rdfc::Result<()> {
    let mut args = std::env::args().skip(1);
    let count = args.next().and_then(|a| a.parse().ok()).unwrap_or(200);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);

    let rows = gaussian::sweep(&ParamRanges::default(), count, seed, &QuadratureSpec::default())?;
    let mut flagged: Vec<_> = rows.iter().filter(|r| r.flagged).collect();
    flagged.sort_by(|a, b| b.ratio.total_cmp(&a.ratio));
    println!("{} of {} configurations have WCI bound > I(X;Y); top 10:", flagged.len(), rows.len());
    for r in flagged.iter().take(10) {
        println!(
            "  sigma_x {:.4}  eps {:.4}  delta {:.4}  wci {:.5}  I {:.3e}  ratio {:.1}",
            r.sigma_x, r.epsilon, r.delta, r.wci_lower, r.mutual_info, r.ratio
        );
    }
    Ok(())
}
