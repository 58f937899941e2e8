use interference_core::bandit::{select_action_buffered, PolicySpec, QuantileSchedule, SelectScratch, StatsView};
use interference_core::numerics::{beta_quantile, BetaParams, RngStream};
use std::time::Instant;

fn main() {
    // Quantile solves at parameters typical of late pooled rounds.
    let cases = [
        (1.0 - 5e-7, 150_000.0, 850_000.0),
        (1.0 - 5e-7, 1_000_002.0, 5_700_010.0),
        (0.9999995, 2.0, 10.0),
        (0.999, 300.0, 1700.0),
        (0.99999, 30_002.0, 170_010.0),
    ];
    for (q, a, b) in cases {
        let p = BetaParams::new(a, b).unwrap();
        let t = Instant::now();
        let n = 200_000;
        let mut acc = 0.0;
        for i in 0..n {
            // Perturb q slightly so the solver cannot trivially cache.
            let qq = q - (i % 1000) as f64 * 1e-13;
            acc += beta_quantile(qq, p).unwrap();
        }
        let dt = t.elapsed().as_secs_f64();
        println!(
            "quantile q={q:.7} a={a:.0} b={b:.0}: {:.0} ns/solve (acc {acc:.3})",
            dt / n as f64 * 1e9
        );
    }

    // Full UCB policy step at late-round counts (11 arms).
    let mut view = StatsView::new(11);
    let mut rng = RngStream::new(1, 1);
    // Fake late-round counts: arm i has ~1e6 * share observations.
    for arm in 0..11 {
        for _ in 0..(50_000 + arm * 10_000) {
            view.record(arm, rng.draw_uniform() < 0.1);
        }
    }
    let spec = PolicySpec::bayes_ucb(QuantileSchedule::OneMinusInvT);
    let mut scratch = SelectScratch::new();
    let t = Instant::now();
    let n = 20_000u64;
    let mut acc = 0usize;
    for round in 1_900_000..(1_900_000 + n) {
        acc += select_action_buffered(&spec, &view, round, &mut rng, &mut scratch)
            .unwrap()
            .arm;
    }
    let dt = t.elapsed().as_secs_f64();
    println!("ucb step (11 arms): {:.2} us/step (acc {acc})", dt / n as f64 * 1e6);

    // Thompson step at the same counts.
    let spec = PolicySpec::thompson();
    let t = Instant::now();
    let n = 200_000u64;
    let mut acc = 0usize;
    for round in 1..=n {
        acc += select_action_buffered(&spec, &view, round, &mut rng, &mut scratch)
            .unwrap()
            .arm;
    }
    let dt = t.elapsed().as_secs_f64();
    println!("thompson step (11 arms): {:.2} us/step (acc {acc})", dt / n as f64 * 1e6);

    // Greedy step.
    let spec = PolicySpec::map_greedy();
    let t = Instant::now();
    let n = 2_000_000u64;
    let mut acc = 0usize;
    for round in 1..=n {
        acc += select_action_buffered(&spec, &view, round, &mut rng, &mut scratch)
            .unwrap()
            .arm;
    }
    let dt = t.elapsed().as_secs_f64();
    println!("map-greedy step (11 arms): {:.0} ns/step (acc {acc})", dt / n as f64 * 1e9);
}
