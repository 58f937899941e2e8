use interference_core::numerics::{beta_pdf, inv_normal_cdf, reg_inc_beta, BetaParams};

// Mirror of the solver loop, counting CDF evaluations.
fn solve_counting(q0: f64, alpha: f64, beta: f64) -> (f64, u32) {
    let (q, a, b, flip) = if q0 > 0.5 {
        (1.0 - q0, beta, alpha, true)
    } else {
        (q0, alpha, beta, false)
    };
    let p = BetaParams::new(a, b).unwrap();
    let mut evals = 0;
    let guess = if a > 1.0 && b > 1.0 {
        let yp = -inv_normal_cdf(q);
        let lam = (yp * yp - 3.0) / 6.0;
        let h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
        let w = yp * (h + lam).sqrt() / h
            - (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (lam + 5.0 / 6.0 - 2.0 / (3.0 * h));
        a / (a + b * (2.0 * w).exp())
    } else {
        a / (a + b)
    };
    let mut x = guess.clamp(1e-300, 1.0 - 1e-16);
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let f = reg_inc_beta(x, p).unwrap() - q;
        evals += 1;
        if f > 0.0 { hi = x; } else { lo = x; }
        let pdf = beta_pdf(x, p);
        let step = f / pdf;
        if f.abs() <= 1e-12 && step.abs() <= 1e-10 { break; }
        let mut next = x - step;
        if !(next > lo && next < hi) { next = 0.5 * (lo + hi); }
        if hi - lo <= f64::EPSILON * hi { break; }
        x = next;
    }
    (if flip { 1.0 - x } else { x }, evals)
}

fn main() {
    let cases = [
        (1.0 - 5e-7, 150_000.0, 850_000.0),
        (1.0 - 5e-7, 1_000_002.0, 5_700_010.0),
        (0.9999995, 2.0, 10.0),
        (0.999, 300.0, 1700.0),
        (0.99999, 30_002.0, 170_010.0),
        (0.5, 52.0, 460.0),
        (0.99, 2.0, 400_000.0),
    ];
    for (q, a, b) in cases {
        let (x, evals) = solve_counting(q, a, b);
        println!("q={q:.7} a={a:.0} b={b:.0}: x={x:.6e} evals={evals}");
    }
}
