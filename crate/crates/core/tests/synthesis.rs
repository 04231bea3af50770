mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rdfc::synth::{self, CoordinationScheme, SynthesisConfig};

use common::*;

#[test]
fn codebook_symbols_follow_p_u() {
    let s = CoordinationScheme::new(
        vec![0.2, 0.5, 0.3],
        vec![vec![1.0]; 3],
        vec![vec![1.0]; 3],
    )
    .unwrap();
    let book = synth::build_codebook_seeded(&s, 1, 10_000, 1, 77).unwrap();
    let n = book.symbols.len() as f64;
    for (u, &p) in s.p_u().iter().enumerate() {
        let count = book.symbols.iter().filter(|&&v| v as usize == u).count() as f64;
        let sd = (n * p * (1.0 - p)).sqrt();
        assert!((count - n * p).abs() < 3.0 * sd, "symbol {u}: {count} vs {}", n * p);
    }
}

#[test]
fn larger_codebooks_do_not_hurt() {
    let s = CoordinationScheme::binary_symmetric(0.2).unwrap();
    let n = 4;
    let target = synth::target_product(&s, n).unwrap();
    let mut prev = f64::INFINITY;
    for m in [2usize, 4, 8, 16, 32, 64] {
        let tvs: Vec<f64> = (0..10)
            .map(|seed| {
                let book = synth::build_codebook_seeded(&s, n, m, 1, seed).unwrap();
                let induced = synth::induced_joint_exact(&book, &s).unwrap();
                synth::tv_distance(&induced.probs, &target.probs).unwrap()
            })
            .collect();
        let med = synth::median(&tvs);
        assert!(med <= prev + 1e-12, "M = {m}: {med} > {prev}");
        prev = med;
    }
}

#[test]
fn zero_rate_stays_far_from_target() {
    let s = CoordinationScheme::binary_symmetric(0.2).unwrap();
    for n in 1..=8 {
        let out = synth::synthesis_experiment(&SynthesisConfig {
            scheme: s.clone(),
            n,
            rate_r: 0.0,
            rate_r0: 0.0,
            trials: 20,
            seed: 5,
        })
        .unwrap();
        assert!(out.median_tv >= 0.05);
    }
}

#[test]
fn outcomes_are_reproducible() {
    let s = CoordinationScheme::binary_symmetric(0.1).unwrap();
    let cfg = SynthesisConfig {
        scheme: s,
        n: 5,
        rate_r: 0.5,
        rate_r0: 0.2,
        trials: 6,
        seed: 99,
    };
    let a = synth::synthesis_experiment(&cfg).unwrap();
    let b = synth::synthesis_experiment(&cfg).unwrap();
    assert_eq!(a, b);
    let c = synth::synthesis_experiment(&SynthesisConfig { seed: 100, ..cfg }).unwrap();
    assert_ne!(a.tv_per_trial(), c.tv_per_trial());
}

#[test]
fn data_processing_on_random_schemes() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let s = random_scheme(&mut rng, 3, 3, 2);
        assert!(s.mutual_information_xu() >= s.mutual_information_xy() - 1e-12);
        assert!(s.mutual_information_xyu() >= s.mutual_information_xu() - 1e-12);
    }
}

#[test]
fn ternary_alphabets_within_cap() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let s = random_scheme(&mut rng, 2, 3, 3);
    let out = synth::synthesis_experiment(&SynthesisConfig {
        scheme: s.clone(),
        n: 4,
        rate_r: 0.7,
        rate_r0: 0.3,
        trials: 2,
        seed: 1,
    })
    .unwrap();
    assert!(out.trials.iter().all(|t| t.x_marginal_deviation < 1e-12));
    let too_big = SynthesisConfig {
        scheme: s,
        n: 7,
        rate_r: 0.1,
        rate_r0: 0.0,
        trials: 1,
        seed: 1,
    };
    assert!(matches!(synth::synthesis_experiment(&too_big), Err(rdfc::Error::Size(_))));
}
