mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use rdfc::discrete::{self, BscMixtureParams, JointPmf};
use rdfc::gaussian::{self, GaussianJoint, GaussianLdpConfig, PdfForm};
use rdfc::quadrature::{integrate, QuadratureSpec, Tolerance};
use rdfc::special::TruncGaussStats;
use rdfc::tables::{reference_tables, round4};

fn truncated_samples(t: &TruncGaussStats, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v: f64 = StandardNormal.sample(&mut rng);
        let v = v * t.sigma_x;
        if v.abs() <= t.clip_c {
            out.push(v);
        }
    }
    out
}

#[test]
fn truncated_variance_matches_monte_carlo() {
    for (sx, c) in [(0.4938, 1.0), (1.0, 1.0), (2.0, 0.5)] {
        let t = TruncGaussStats::new(sx, c).unwrap();
        let xs = truncated_samples(&t, 1_000_000, 1);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((var - t.var_trunc).abs() < 4e-3 * t.var_trunc, "sigma_x {sx}: {var} vs {}", t.var_trunc);
    }
}

#[test]
fn truncated_entropy_matches_quadrature() {
    for (sx, c) in [(0.2, 1.0), (0.4938, 1.0), (1.0, 1.0), (3.0, 0.7)] {
        let t = TruncGaussStats::new(sx, c).unwrap();
        let h = integrate(
            |x| {
                let p = t.pdf(x);
                if p > 0.0 { -p * p.ln() } else { 0.0 }
            },
            -c,
            c,
            &[],
            Tolerance { abs: 1e-13, rel: 1e-13 },
            100_000,
        )
        .unwrap()
        .value;
        assert!((h - t.diff_entropy).abs() < 1e-10, "{h} vs {}", t.diff_entropy);
        let var = integrate(|x| x * x * t.pdf(x), -c, c, &[], Tolerance::abs(1e-14), 100_000).unwrap().value;
        assert!((var - t.var_trunc).abs() < 1e-12);
    }
}

#[test]
fn output_entropy_matches_histogram_plug_in() {
    // strong signal so that I(X;Y) is large relative to the plug-in bias
    let t = TruncGaussStats::new(1.0, 1.5).unwrap();
    let j = GaussianJoint::from_parts(t, 0.05).unwrap();
    let quad = QuadratureSpec::default();
    let mi = gaussian::mutual_information(&j, &quad).unwrap();
    assert!(mi > 0.9);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let xs = truncated_samples(&t, 1_000_000, 2);
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| {
            let z: f64 = StandardNormal.sample(&mut rng);
            x + j.sigma_z() * z
        })
        .collect();
    let (lo, hi, bins) = (-3.0, 3.0, 600usize);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for y in &ys {
        let b = ((y - lo) / width).floor();
        assert!(b >= 0.0 && (b as usize) < bins);
        counts[b as usize] += 1;
    }
    let n = ys.len() as f64;
    let h_y: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * (p / width).ln()
        })
        .sum();
    let plug_in = h_y - j.noise_entropy();
    assert!((plug_in - mi).abs() < 5e-3, "plug-in {plug_in} vs quadrature {mi}");
}

#[test]
fn pdf_forms_agree_on_reference_rows() {
    let quad = QuadratureSpec::default();
    for r in &reference_tables().table1.rows {
        let j = gaussian::build_joint(&GaussianLdpConfig::unit_clip(r[0], r[1], r[2])).unwrap();
        let a = gaussian::mutual_information_with(&j, &quad, PdfForm::ConvolutionExact).unwrap();
        let b = gaussian::mutual_information_with(&j, &quad, PdfForm::BetaBar).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn sweep_row_seven_ratio_uses_rounded_cells() {
    let cfg = GaussianLdpConfig::unit_clip(0.3280, 0.4663, 0.0032);
    let row = gaussian::evaluate_row(7, &cfg, &QuadratureSpec::default()).unwrap();
    assert!(row.flagged);
    assert!((round4(row.wci_lower) / round4(row.mutual_info) - 98.5).abs() < 1e-9);
    assert!((row.ratio - 82.4).abs() < 0.5);
}

fn table2_columns(q: &JointPmf) -> [f64; 5] {
    let (hx, hy) = discrete::marginal_entropies(q);
    [
        hx,
        hy,
        discrete::mutual_information_discrete(q),
        discrete::wci_lower_bound_discrete(q).unwrap().wci_lower,
        discrete::maxtrace(q).unwrap().value,
    ]
}

#[test]
fn table2_parameter_mapping_is_unique() {
    type Map = fn(&[f64; 12]) -> [f64; 6];
    let candidates: [(&str, Map); 4] = [
        ("as printed", |r| [r[0], r[1], r[2], r[3], r[4], r[5]]),
        ("p1 and p3 swapped", |r| [r[2], r[1], r[0], r[3], r[4], r[5]]),
        ("sides swapped", |r| [r[1], r[0], r[3], r[2], r[5], r[4]]),
        ("both", |r| [r[3], r[0], r[1], r[2], r[5], r[4]]),
    ];
    let mut matching = Vec::new();
    for (name, map) in candidates {
        let all = reference_tables().table2.rows.iter().all(|r| {
            let q = discrete::bsc_mixture(&BscMixtureParams::from_array(map(r))).unwrap();
            let [hx, hy, mi, wci, _] = table2_columns(&q);
            [(hx, r[9]), (hy, r[10]), (mi, r[7]), (wci, r[6])]
                .iter()
                .all(|(got, want)| (got - want).abs() <= 1e-4)
        });
        if all {
            matching.push(name);
        }
    }
    assert_eq!(matching, vec!["as printed"]);
}

#[test]
fn relabelling_one_side_changes_nothing() {
    for r in &reference_tables().table2.rows {
        let q = discrete::bsc_mixture(&BscMixtureParams::from_array([r[0], r[1], r[2], r[3], r[4], r[5]])).unwrap();
        // exchange the outcomes 01 and 10 of X
        let perm = [0, 2, 1, 3];
        let rows: Vec<Vec<f64>> = (0..4).map(|i| q.row(perm[i]).to_vec()).collect();
        let p = JointPmf::from_rows(&rows).unwrap();
        let (a, b) = (table2_columns(&q), table2_columns(&p));
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
