use bulsol_core::dynamics::sample_binomial;
use bulsol_core::oracle::{binomial_pmf_table, run_threshold, BernoulliMatrix};
use bulsol_core::RngStream;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

// Pearson statistic over cells pooled so that each expected count is >= 5.
fn chi_square_p_value(observed: &[u64], expected: &[f64]) -> f64 {
    let mut stat = 0.0;
    let mut cells = 0;
    let (mut o, mut e) = (0.0, 0.0);
    for (&ob, &ex) in observed.iter().zip(expected) {
        o += ob as f64;
        e += ex;
        if e >= 5.0 {
            stat += (o - e) * (o - e) / e;
            cells += 1;
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 {
        stat += (o - e) * (o - e) / e.max(1e-300);
        cells += 1;
    }
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn binomial_sampler_passes_chi_square() {
    for (seed, m, p) in [(1u64, 50u64, 0.3), (2, 1000, 0.01), (3, 20, 0.9), (4, 100_000, 0.01)] {
        let draws = 1_000_000u64;
        let mut rng = RngStream::new(seed, 0);
        let mut counts = vec![0u64; m as usize + 1];
        for _ in 0..draws {
            counts[sample_binomial(m, p, &mut rng) as usize] += 1;
        }
        let law = Binomial::new(p, m).unwrap();
        let expected: Vec<f64> = (0..=m).map(|k| law.pmf(k) * draws as f64).collect();
        let pv = chi_square_p_value(&counts, &expected);
        assert!(pv > 0.001, "Bin({m}, {p}): p-value {pv}");
    }
}

#[test]
fn certain_outcomes_consume_no_randomness() {
    let mut rng = RngStream::new(9, 0);
    assert_eq!(sample_binomial(0, 0.5, &mut rng), 0);
    assert_eq!(sample_binomial(17, 1.0, &mut rng), 17);
    assert_eq!(sample_binomial(17, 0.0, &mut rng), 0);
    assert_eq!(rng.position(), 0);
}

#[test]
fn pmf_table_matches_independent_library() {
    for (m, p) in [(10u64, 0.1), (100, 0.5), (1000, 0.9), (5000, 0.003)] {
        let law = Binomial::new(p, m).unwrap();
        for (k, v) in binomial_pmf_table::<f64>(m, p).into_iter().enumerate() {
            let w = law.pmf(k as u64);
            assert!((v - w).abs() <= 1e-12 + 1e-9 * w, "m={m} p={p} k={k}: {v} vs {w}");
        }
    }
}

#[test]
fn threshold_survivors_follow_their_binomial_law() {
    let (a1, s, p, r) = (60u64, 0.5, 0.2, 4u64);
    let seeds = 20_000u64;
    let mut counts = vec![0u64; 31];
    for seed in 0..seeds {
        let x = BernoulliMatrix::from_seed(seed, a1, r, p);
        let t = run_threshold(a1, s, r, &x).unwrap();
        assert_eq!(*t.sizes.last().unwrap(), a1 - t.cutoff + t.survivors_below);
        counts[t.survivors_below as usize] += 1;
    }
    let law = Binomial::new(0.8f64.powi(4), 30).unwrap();
    let expected: Vec<f64> = (0..=30).map(|k| law.pmf(k) * seeds as f64).collect();
    assert!(chi_square_p_value(&counts, &expected) > 0.001);
}
