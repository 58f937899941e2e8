// Standalone Lentz CF with iteration counting, mirroring ibeta_cf.
fn ln_beta(a: f64, b: f64) -> f64 {
    // crude lgamma via Stirling w/ recurrence (adequate for counting)
    fn lg(x: f64) -> f64 {
        let mut s = 0.0;
        let mut t = x;
        while t < 10.0 { s += t.ln(); t += 1.0; }
        let r = 1.0/t; let r2 = r*r;
        (t-0.5)*t.ln() - t + 0.9189385332046727
            + r*(1.0/12.0 + r2*(-1.0/360.0 + r2*(1.0/1260.0)))
            - s
    }
    lg(a)+lg(b)-lg(a+b)
}

fn cf_iters(a: f64, b: f64, x: f64) -> (f64, u32) {
    let tiny = 1e-300;
    let ln_prefix = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    let prefix = ln_prefix.exp() / a;
    let qab = a + b; let qap = a + 1.0; let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < tiny { d = tiny; }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=20000u32 {
        let mf = m as f64; let m2 = 2.0*mf;
        let num = mf*(b-mf)*x/((qam+m2)*(a+m2));
        d = 1.0+num*d; if d.abs()<tiny {d=tiny;}
        c = 1.0+num/c; if c.abs()<tiny {c=tiny;}
        d = 1.0/d; h *= d*c;
        let num = -(a+mf)*(qab+mf)*x/((a+m2)*(qap+m2));
        d = 1.0+num*d; if d.abs()<tiny {d=tiny;}
        c = 1.0+num/c; if c.abs()<tiny {c=tiny;}
        d = 1.0/d; let delta = d*c; h *= delta;
        if (delta-1.0).abs() < 3e-16 { return (prefix*h, m); }
    }
    (prefix*h, 20000)
}

fn main() {
    // Mid-game UCB posteriors: (a, b) with b ~ 6-19x a, x at mean + 4.9 sd
    for (a, b) in [(500.0_f64, 4500.0_f64), (5000.0, 50000.0), (3000.0, 17000.0),
                   (30000.0, 170000.0), (100.0, 1900.0), (1000.0, 11000.0)] {
        let mean = a/(a+b);
        let sd = (a*b/((a+b)*(a+b)*(a+b+1.0))).sqrt();
        let x = mean + 4.9*sd;
        // orientation flip: evaluate smaller side I_{1-x}(b,a)
        let (v, iters) = cf_iters(b, a, 1.0-x);
        println!("a={a:.0} b={b:.0} x=mean+4.9sd: upper tail={:.3e} CF iters={iters}", v);
    }
}
