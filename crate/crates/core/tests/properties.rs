mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rdfc::discrete::{self, BscMixtureParams, MaxtraceMode};
use rdfc::fbl::{DiscreteSource, InfoDensitySource};
use rdfc::info::binary_entropy;
use rdfc::synth::{self, SynthesisConfig};

use common::*;

fn prob() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn mixture() -> impl Strategy<Value = BscMixtureParams> {
    (prob(), prob(), prob(), prob(), prob(), prob()).prop_map(|(p1, p2, p3, p4, c, d)| BscMixtureParams::new(p1, p2, p3, p4, c, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mixture_is_a_valid_symmetric_pmf(params in mixture()) {
        let q = discrete::bsc_mixture(&params).unwrap();
        let total: f64 = q.entries().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        // flipping every bit maps the joint onto itself
        for x in 0..4 {
            for y in 0..4 {
                prop_assert!((q.get(x, y) - q.get(3 - x, 3 - y)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mixture_marginal_entropies_have_closed_form(params in mixture()) {
        let q = discrete::bsc_mixture(&params).unwrap();
        let (hx, hy) = discrete::marginal_entropies(&q);
        let ln2 = std::f64::consts::LN_2;
        prop_assert!((hx - (ln2 + binary_entropy(params.d))).abs() < 1e-12);
        prop_assert!((hy - (ln2 + binary_entropy(params.c))).abs() < 1e-12);
    }

    #[test]
    fn maxtrace_modes_agree_with_brute_force(seed in any::<u64>(), k in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_joint(&mut rng, k);
        let brute = brute_force_maxtrace(&q);
        let exhaustive = discrete::maxtrace_with(&q, MaxtraceMode::Exhaustive).unwrap();
        let assignment = discrete::maxtrace_with(&q, MaxtraceMode::Assignment).unwrap();
        prop_assert!((exhaustive.value - brute).abs() <= 1e-15);
        prop_assert!((assignment.value - brute).abs() <= 1e-12);
        prop_assert!(exhaustive.value >= 1.0 / k as f64 - 1e-15);
        let from_perm: f64 = exhaustive.perm.iter().enumerate().map(|(i, &j)| q.get(i, j)).sum();
        prop_assert!((from_perm - exhaustive.value).abs() < 1e-15);
    }

    #[test]
    fn witsenhausen_bound_is_below_entropies(params in mixture()) {
        let q = discrete::bsc_mixture(&params).unwrap();
        let w = discrete::wci_lower_bound_discrete(&q).unwrap();
        let (hx, hy) = discrete::marginal_entropies(&q);
        prop_assert!(w.wci_lower >= 0.0);
        prop_assert!(w.wci_lower <= hx.min(hy) + 1e-12);
    }

    #[test]
    fn alpha_mi_nested_sums_match_longhand(seed in any::<u64>(), k in 2usize..=5, alpha in 1.01f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_joint(&mut rng, k);
        let fast = DiscreteSource::new(q.clone()).alpha_mutual_information(alpha).unwrap();
        prop_assert!((fast - alpha_mi_longhand(&q, alpha)).abs() < 1e-12);
    }

    #[test]
    fn ldp_audit_is_monotone_in_epsilon(seed in any::<u64>(), k in 2usize..=4, e in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_joint(&mut rng, k);
        let a = discrete::ldp_audit(&q, e).unwrap();
        let b = discrete::ldp_audit(&q, e + 0.5).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn synthesis_tv_is_bounded_and_marginal_exact(seed in any::<u64>(), n in 1usize..=4, r in 0.0f64..1.0, r0 in 0.0f64..0.6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scheme = random_scheme(&mut rng, 2, 2, 3);
        let out = synth::synthesis_experiment(&SynthesisConfig {
            scheme, n, rate_r: r, rate_r0: r0, trials: 2, seed,
        }).unwrap();
        for t in &out.trials {
            prop_assert!((0.0..=1.0).contains(&t.tv));
            prop_assert!(t.first_letter_tv <= t.tv + 1e-12);
            prop_assert!(t.x_marginal_deviation <= 1e-12);
        }
    }
}
