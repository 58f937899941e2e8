use interference_core::numerics::{ibeta_asym, ibeta_cf};
use std::time::Instant;

fn main() {
    // Direct asym-vs-CF relative difference across (min shape, lam/min).
    println!("{:>8} {:>6} | {:>10} {:>10} {:>12}", "min", "ratio", "lam/min", "value", "rel diff");
    for &a in &[100.0_f64, 200.0, 500.0, 1000.0, 5000.0, 20000.0] {
        for &r in &[1.0_f64, 6.0, 19.0] {
            let b = a * r;
            for &frac in &[0.05_f64, 0.15, 0.3, 0.5, 0.7, 0.9] {
                let lam = frac * a.min(b);
                // flipped-side x0: lam = a0 - (a0+b0) x0 with a0=b, b0=a
                let x0 = (b - lam) / (a + b);
                let asym = ibeta_asym(b, a, lam);
                let cf = ibeta_cf(b, a, x0);
                let rel = ((asym - cf) / cf.max(1e-300)).abs();
                if rel > 1e-11 {
                    println!("{:>8.0} {:>6.0} | {:>10.2} {:>10.3e} {:>12.3e}  <-- DIVERGES", a, r, frac, cf, rel);
                } else if frac >= 0.5 {
                    println!("{:>8.0} {:>6.0} | {:>10.2} {:>10.3e} {:>12.3e}", a, r, frac, cf, rel);
                }
            }
        }
    }
    // Timing: basym vs CF at a=5000, b=30000, z=4.9 point.
    let (a, b, x) = (5000.0, 30000.0, 0.15202216);
    let lam = (a + b) * x - a;
    let n = 500_000;
    let t = Instant::now();
    let mut acc = 0.0;
    for i in 0..n { acc += ibeta_asym(b, a, lam + (i % 7) as f64 * 1e-9); }
    println!("basym: {:.0} ns ({acc:.3e})", t.elapsed().as_secs_f64() / n as f64 * 1e9);
    let t = Instant::now();
    let mut acc = 0.0;
    for i in 0..n { acc += ibeta_cf(b, a, 1.0 - x + (i % 7) as f64 * 1e-12); }
    println!("cf:    {:.0} ns ({acc:.3e})", t.elapsed().as_secs_f64() / n as f64 * 1e9);
}
