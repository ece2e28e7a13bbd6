//! Sample means against model means, within 4 standard errors over 10^5 draws.

use renewal_control::model::{
    build_task_model, sample_arrivals_with_rates, sample_outcome, seeded_rng, Noise, NoiseTable, TaskAction,
};
use renewal_control::sim::builtin_scenario;
use renewal_control::sim::scenarios::ten_class_spec;
use renewal_control::sim::ScenarioModel;

const N: usize = 100_000;

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn assert_mean(xs: &[f64], target: f64, what: &str) {
    let (mean, se) = mean_and_se(xs);
    let slack = (4.0 * se).max(1e-12);
    assert!(
        (mean - target).abs() <= slack,
        "{what}: mean {mean} vs {target} (4 se = {slack})"
    );
}

#[test]
fn outcome_means_match_model() {
    for noise in [
        Noise::Uniform { width: 1.0 },
        Noise::Uniform { width: 40.0 },
        Noise::ExponentialShifted,
    ] {
        let mut spec = ten_class_spec(0.8);
        spec.noise = NoiseTable::Uniform(noise);
        let m = build_task_model(&spec).unwrap();
        let mut rng = seeded_rng(11);
        for (c, mode) in [(1, 1), (4, 2), (10, 1)] {
            let action = TaskAction::new(c, mode, 0.0);
            let draws: Vec<_> = (0..N).map(|_| sample_outcome(&m, action, &mut rng)).collect();
            let busy: Vec<f64> = draws.iter().map(|o| o.busy).collect();
            let energy: Vec<f64> = draws.iter().map(|o| o.energy).collect();
            assert_mean(
                &busy,
                spec.mean_duration[c - 1][mode - 1],
                &format!("{noise:?} D({c},{mode})"),
            );
            assert_mean(
                &energy,
                spec.mean_energy[c - 1][mode - 1],
                &format!("{noise:?} e({c},{mode})"),
            );
            let floor = m.duration_min();
            assert!(busy.iter().all(|&d| d >= floor - 1e-12), "duration below floor");
            assert!(energy.iter().all(|&e| e >= 0.0), "negative energy");
        }
    }
}

#[test]
fn arrival_counts_are_binomial() {
    let rates = [0.05, 0.3, 0.9];
    let gamma = [1.0, 0.5, 0.25];
    let slots = 7;
    let mut rng = seeded_rng(3);
    let draws: Vec<_> = (0..N)
        .map(|_| sample_arrivals_with_rates(&rates, slots, &gamma, &mut rng).unwrap())
        .collect();
    for n in 0..rates.len() {
        let raw: Vec<f64> = draws.iter().map(|a| a.raw[n] as f64).collect();
        let adm: Vec<f64> = draws.iter().map(|a| a.admitted[n] as f64).collect();
        assert_mean(&raw, rates[n] * slots as f64, "raw arrivals");
        assert_mean(&adm, rates[n] * gamma[n] * slots as f64, "admitted arrivals");
        assert!(draws.iter().all(|a| a.admitted[n] <= a.raw[n] && a.raw[n] <= slots));
    }
}

#[test]
fn event_frequencies_match_probabilities() {
    let ScenarioModel::Attribute(attr) = builtin_scenario("smart_device").unwrap().model else {
        panic!("attribute scenario expected");
    };
    let mut rng = seeded_rng(5);
    let mut counts = vec![0usize; attr.num_events()];
    for _ in 0..N {
        counts[attr.sample_event(&mut rng)] += 1;
    }
    for (w, &c) in counts.iter().enumerate() {
        let p = attr.event(w).probability;
        let se = (p * (1.0 - p) / N as f64).sqrt();
        let freq = c as f64 / N as f64;
        assert!((freq - p).abs() <= 4.0 * se, "event {w}: {freq} vs {p}");
    }
}
