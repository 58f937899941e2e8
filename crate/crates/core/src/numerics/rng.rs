//! Keyed deterministic random streams.
//!
//! Every source of randomness in a simulation is an [`RngStream`] created
//! from the experiment master seed plus a structured stream id (derived
//! from replication index, variant index and a purpose tag — see the
//! harness). Same `(seed, stream_id)` always reproduces the same draw
//! sequence; distinct stream ids select distinct ChaCha key streams, so
//! streams never overlap.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::BetaParams;
use crate::CoreError;

const INV_2_POW_53: f64 = 1.0 / (1u64 << 53) as f64;

/// A single-owner deterministic random stream.
///
/// ChaCha8 keyed by the 64-bit seed, with the 64-bit stream id selecting
/// one of 2^64 independent key streams. Never share one stream between
/// workers; derive one stream per purpose instead.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Unbiased integer in `[0, n)` via rejection sampling.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below requires n > 0");
        // Reject draws from the incomplete final slice of the u64 range.
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Uniform deviate in `[0, 1)` with 53 random mantissa bits.
    pub fn draw_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * INV_2_POW_53
    }

    /// Uniform deviate in `(0, 1]`, for places that must never see 0.
    fn draw_uniform_open(&mut self) -> f64 {
        1.0 - self.draw_uniform()
    }

    /// Bernoulli trial: `true` with probability `p`.
    pub fn draw_bernoulli(&mut self, p: f64) -> Result<bool, CoreError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(CoreError::domain(format!(
                "Bernoulli probability must lie in [0, 1], got {p}"
            )));
        }
        Ok(self.draw_uniform() < p)
    }

    /// Standard normal deviate (Box–Muller, cosine branch).
    fn draw_standard_normal(&mut self) -> f64 {
        let u1 = self.draw_uniform_open();
        let u2 = self.draw_uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Gamma(shape, scale = 1) deviate via the Marsaglia–Tsang squeeze,
    /// with the `u^(1/shape)` boost for shape < 1.
    pub fn draw_gamma(&mut self, shape: f64) -> Result<f64, CoreError> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(CoreError::domain(format!(
                "Gamma shape must be positive and finite, got {shape}"
            )));
        }
        if shape < 1.0 {
            let g = self.gamma_shape_ge_1(shape + 1.0);
            let u = self.draw_uniform_open();
            return Ok(g * u.powf(1.0 / shape));
        }
        Ok(self.gamma_shape_ge_1(shape))
    }

    fn gamma_shape_ge_1(&mut self, shape: f64) -> f64 {
        debug_assert!(shape >= 1.0);
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.draw_standard_normal();
            let t = 1.0 + c * x;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u = self.draw_uniform_open();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 {
                return d * v;
            }
            if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }

    /// Beta(alpha, beta) deviate via the Gamma ratio `X / (X + Y)`.
    pub fn draw_beta(&mut self, p: BetaParams) -> Result<f64, CoreError> {
        let x = self.draw_gamma(p.alpha)?;
        let y = self.draw_gamma(p.beta)?;
        let sum = x + y;
        if sum == 0.0 {
            // Both gammas underflowed (only reachable for extreme tiny
            // shapes); fall back to the shape-weighted mean.
            return Ok(p.mean());
        }
        // Keep the result inside the open interval (0, 1).
        Ok((x / sum).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_reproduces_sequence() {
        let mut a = RngStream::new(0, 0);
        let mut b = RngStream::new(0, 0);
        let xs: Vec<u64> = (0..1000).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..1000).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        let u = RngStream::new(0, 0).draw_uniform();
        assert!((0.0..1.0).contains(&u));
        assert_eq!(u.to_bits(), RngStream::new(0, 0).draw_uniform().to_bits());
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = RngStream::new(7, 1);
        let mut b = RngStream::new(7, 2);
        let xs: Vec<u64> = (0..100).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..100).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
        assert!(xs.iter().zip(&ys).any(|(x, y)| x != y));
    }

    #[test]
    fn uniform_mean_matches_law_of_large_numbers() {
        let mut rng = RngStream::new(42, 0);
        let n = 1_000_000;
        let mean = (0..n).map(|_| rng.draw_uniform()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn next_below_is_uniform_enough() {
        let mut rng = RngStream::new(3, 9);
        let mut counts = [0u32; 7];
        let n = 70_000;
        for _ in 0..n {
            counts[rng.next_below(7) as usize] += 1;
        }
        // 3-sigma band around n/7 for a binomial with p = 1/7.
        let expect = n as f64 / 7.0;
        let sd = (n as f64 * (1.0 / 7.0) * (6.0 / 7.0)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - expect).abs() < 3.0 * sd,
                "bucket {i}: {c} vs {expect}"
            );
        }
    }

    #[test]
    fn bernoulli_endpoints_and_moments() {
        let mut rng = RngStream::new(5, 0);
        for _ in 0..1000 {
            assert!(!rng.draw_bernoulli(0.0).unwrap());
            assert!(rng.draw_bernoulli(1.0).unwrap());
        }
        let n = 1_000_000;
        let mut hits = 0u32;
        for _ in 0..n {
            if rng.draw_bernoulli(0.15).unwrap() {
                hits += 1;
            }
        }
        let mean = hits as f64 / n as f64;
        // Binomial 3-sigma: 3 * sqrt(0.15 * 0.85 / 1e6) ≈ 0.00107.
        assert!((mean - 0.15).abs() < 0.0011, "mean {mean}");
        assert!(rng.draw_bernoulli(-0.1).is_err());
        assert!(rng.draw_bernoulli(1.1).is_err());
        assert!(rng.draw_bernoulli(f64::NAN).is_err());
    }

    #[test]
    fn gamma_moments() {
        let mut rng = RngStream::new(11, 0);
        let n = 1_000_000;

        // shape = 1 is Exponential(1): mean 1.
        let mean1 = (0..n).map(|_| rng.draw_gamma(1.0).unwrap()).sum::<f64>() / n as f64;
        assert!((mean1 - 1.0).abs() < 0.004, "shape 1 mean {mean1}");

        // shape = 2: mean 2, variance 2.
        let xs: Vec<f64> = (0..n).map(|_| rng.draw_gamma(2.0).unwrap()).collect();
        let mean2 = xs.iter().sum::<f64>() / n as f64;
        let var2 = xs.iter().map(|x| (x - mean2) * (x - mean2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean2 - 2.0).abs() < 0.005, "shape 2 mean {mean2}");
        assert!((var2 - 2.0).abs() < 0.05, "shape 2 variance {var2}");

        // shape < 1 boost path: Gamma(0.5) has mean 0.5, sd sqrt(0.5).
        let mean_half = (0..n).map(|_| rng.draw_gamma(0.5).unwrap()).sum::<f64>() / n as f64;
        assert!((mean_half - 0.5).abs() < 0.0022, "shape 0.5 mean {mean_half}");

        assert!(rng.draw_gamma(0.0).is_err());
        assert!(rng.draw_gamma(-1.0).is_err());
    }

    #[test]
    fn beta_moments() {
        let mut rng = RngStream::new(13, 0);
        let n = 1_000_000;

        // Beta(1,1) = U(0,1).
        let p = BetaParams::new(1.0, 1.0).unwrap();
        let mean = (0..n).map(|_| rng.draw_beta(p).unwrap()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.001, "Beta(1,1) mean {mean}");

        // Beta(2,10): mean 2/12.
        let p = BetaParams::new(2.0, 10.0).unwrap();
        let mean = (0..n).map(|_| rng.draw_beta(p).unwrap()).sum::<f64>() / n as f64;
        assert!((mean - 2.0 / 12.0).abs() < 0.002, "Beta(2,10) mean {mean}");

        // Posterior-like Beta(32,180) concentrates near 32/212.
        let p = BetaParams::new(32.0, 180.0).unwrap();
        let xs: Vec<f64> = (0..n).map(|_| rng.draw_beta(p).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean - 32.0 / 212.0).abs() < 0.002, "Beta(32,180) mean {mean}");
        let outside = xs.iter().filter(|&&x| (x - 0.151).abs() > 0.1).count();
        assert!(outside < n / 1000, "{outside} draws far from 0.151");
    }

    #[test]
    fn beta_stays_in_open_unit_interval() {
        let mut rng = RngStream::new(17, 0);
        let p = BetaParams::new(0.05, 0.05).unwrap();
        for _ in 0..10_000 {
            let x = rng.draw_beta(p).unwrap();
            assert!(x > 0.0 && x < 1.0, "draw {x}");
        }
    }
}
