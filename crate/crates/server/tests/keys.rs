use miniverse_core::rng::{label, stream};
use miniverse_server::keys::assign_keys;
use miniverse_testkit::stats::{chi_square, chi_square_critical, outlier_bins};

const SAMPLES: u64 = 100_000;

/// Each digit should be chosen in n/9 of the mappings, and each digit should
/// be equally likely to land on any given action.
#[test]
fn digit_frequencies_are_uniform() {
    for n in [1usize, 3, 7] {
        let mut rng = stream(2024, label::KEYS);
        let mut chosen = [0u64; 9];
        let mut first_action = [0u64; 9];
        for _ in 0..SAMPLES {
            let m = assign_keys(&mut rng, n).unwrap();
            for d in m.entries().keys() {
                chosen[*d as usize - 1] += 1;
            }
            first_action[m.digit(0).unwrap() as usize - 1] += 1;
        }
        // `chosen` sums to n * SAMPLES, so compare each digit to a binomial
        // over SAMPLES draws directly.
        let p = n as f64 / 9.0;
        let mean = SAMPLES as f64 * p;
        let sd = (SAMPLES as f64 * p * (1.0 - p)).sqrt();
        for (d, &c) in chosen.iter().enumerate() {
            assert!((c as f64 - mean).abs() <= 3.0 * sd, "n={n} digit {}: {c} vs {mean} +- {sd}", d + 1);
        }
        let uniform = [1.0 / 9.0; 9];
        assert!(outlier_bins(&first_action, &uniform, 3.0).is_empty(), "n={n}: {first_action:?}");
        let expected = [SAMPLES as f64 / 9.0; 9];
        let chi = chi_square(&first_action, &expected);
        assert!(chi < chi_square_critical(8, 3.0), "n={n}: action-0 digit chi-square {chi}");
    }
}

#[test]
fn mappings_are_distinct_and_complete() {
    let mut rng = stream(7, label::KEYS);
    for n in 1..=9 {
        for _ in 0..200 {
            let m = assign_keys(&mut rng, n).unwrap();
            assert_eq!(m.entries().len(), n);
            let mut actions: Vec<usize> = m.entries().values().copied().collect();
            actions.sort_unstable();
            assert_eq!(actions, (0..n).collect::<Vec<_>>());
        }
    }
}
