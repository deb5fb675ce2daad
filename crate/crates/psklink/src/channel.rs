//! Rayleigh fading with distance-based path loss, and seeded random streams.
//!
//! The channel to user `k` is a row of iid unit-variance complex Gaussians
//! scaled by `d_k^(-m/2)`, with `d_k` the link distance and `m` the path
//! loss exponent. Users either sit at fixed distances or are dropped
//! uniformly by area on an annulus.
//!
//! Randomness comes from counter-mode streams: a [`RandomStream`] names a
//! `(seed, stream)` pair, and independent work items (Monte Carlo trials,
//! user placements) take consecutive stream indices. Replaying a stream
//! reproduces its draws exactly, regardless of what other streams did, which
//! is what makes parallel runs byte-identical to serial ones.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::ComplexMatrix;
use crate::Error;

/// Name of one reproducible random sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomStream {
    pub seed: u64,
    pub stream: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    /// The stream `offset` positions after this one. Callers hand disjoint
    /// offset ranges to independent work items.
    pub fn offset(&self, offset: u64) -> Self {
        Self { seed: self.seed, stream: self.stream.wrapping_add(offset) }
    }

    /// Instantiates the generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// One draw of a circularly symmetric complex Gaussian with unit variance
/// (0.5 per real dimension), via the polar transform. Consumes exactly two
/// uniforms, so draw counts stay predictable for reproducibility.
#[inline]
pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen();
    // 1 - u1 lies in (0, 1], keeping the log finite.
    let r = (-(1.0 - u1).ln()).sqrt();
    let phase = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * phase.cos(), r * phase.sin())
}

/// One draw of receiver noise with total variance `sigma2`.
pub fn sample_noise(sigma2: f64, rng: &mut ChaCha8Rng) -> Result<Complex64, Error> {
    if !(sigma2 > 0.0) {
        return Err(Error::Domain(format!("noise variance must be positive, got {sigma2}")));
    }
    Ok(complex_gaussian(rng) * sigma2.sqrt())
}

/// Power path gain `d^(-m)` at distance `d` with exponent `m`.
pub fn path_loss(distance: f64, exponent: f64) -> Result<f64, Error> {
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(Error::Domain(format!("distance must be positive, got {distance}")));
    }
    Ok(distance.powf(-exponent))
}

/// User distances plus the path loss exponent that turns them into gains.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    pub distances: Vec<f64>,
    pub path_loss_exponent: f64,
}

impl Geometry {
    pub fn fixed(distances: Vec<f64>, path_loss_exponent: f64) -> Result<Self, Error> {
        if distances.is_empty() {
            return Err(Error::InvalidConfig("geometry needs at least one user".into()));
        }
        for &d in &distances {
            path_loss(d, path_loss_exponent)?;
        }
        Ok(Self { distances, path_loss_exponent })
    }

    pub fn path_gains(&self) -> Vec<f64> {
        self.distances
            .iter()
            .map(|&d| path_loss(d, self.path_loss_exponent).expect("validated"))
            .collect()
    }
}

/// Drops `users` distances uniformly by area on the annulus
/// `[r_min, r_max]`: the radius CDF is `(r^2 - r_min^2)/(r_max^2 - r_min^2)`.
pub fn place_users(
    users: usize,
    r_min: f64,
    r_max: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, Error> {
    if !(r_min > 0.0) || r_max < r_min {
        return Err(Error::InvalidConfig(format!(
            "annulus needs 0 < r_min <= r_max, got [{r_min}, {r_max}]"
        )));
    }
    Ok((0..users)
        .map(|_| {
            let u: f64 = rng.gen();
            (r_min * r_min + u * (r_max * r_max - r_min * r_min)).sqrt()
        })
        .collect())
}

/// One channel draw: the faded matrix, the unit-variance part, and the gains.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    /// Faded channel `H = D^{1/2} H1`, users by antennas.
    pub h: ComplexMatrix,
    /// Unit-variance fading `H1`.
    pub h1: ComplexMatrix,
    /// Per-user power gains `d_k^(-m)`.
    pub path_gains: Vec<f64>,
}

/// Draws one channel for the given geometry and antenna count. Entries of
/// `H1` are consumed row-major, one user at a time.
pub fn sample_channel(
    geometry: &Geometry,
    n_antennas: usize,
    rng: &mut ChaCha8Rng,
) -> ChannelRealization {
    let k_users = geometry.distances.len();
    let gains = geometry.path_gains();
    let mut h1 = ComplexMatrix::zeros(k_users, n_antennas);
    for k in 0..k_users {
        for n in 0..n_antennas {
            h1.set(k, n, complex_gaussian(rng));
        }
    }
    let h = ComplexMatrix::from_fn(k_users, n_antennas, |k, n| h1.get(k, n) * gains[k].sqrt());
    ChannelRealization { h, h1, path_gains: gains }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_replay_exactly() {
        let s = RandomStream::new(42).offset(7);
        let a: Vec<f64> = {
            let mut rng = s.rng();
            (0..8).map(|_| rng.gen()).collect()
        };
        let b: Vec<f64> = {
            let mut rng = s.rng();
            (0..8).map(|_| rng.gen()).collect()
        };
        assert_eq!(a, b);

        let mut other = RandomStream::new(42).offset(8).rng();
        let c: f64 = other.gen();
        assert_ne!(a[0], c);
    }

    #[test]
    fn complex_gaussian_moments() {
        let mut rng = RandomStream::new(1).rng();
        let n = 100_000;
        let mut mean = Complex64::new(0.0, 0.0);
        let mut power = 0.0;
        for _ in 0..n {
            let z = complex_gaussian(&mut rng);
            mean += z;
            power += z.norm_sqr();
        }
        mean /= n as f64;
        power /= n as f64;
        assert!(mean.norm() < 0.02);
        assert!((power - 1.0).abs() < 0.02);
    }

    #[test]
    fn noise_variance_scales() {
        let mut rng = RandomStream::new(2).rng();
        let sigma2 = 3.0;
        let n = 100_000;
        let mut power = 0.0;
        for _ in 0..n {
            power += sample_noise(sigma2, &mut rng).unwrap().norm_sqr();
        }
        power /= n as f64;
        assert!((power / sigma2 - 1.0).abs() < 0.03);
        assert!(sample_noise(0.0, &mut rng).is_err());
    }

    #[test]
    fn path_loss_values() {
        assert!((path_loss(1.0, 2.7).unwrap() - 1.0).abs() < 1e-15);
        assert!((path_loss(10.0, 2.7).unwrap() - 10f64.powf(-2.7)).abs() < 1e-18);
        assert!(path_loss(0.0, 2.7).is_err());
        assert!(path_loss(-1.0, 2.7).is_err());
    }

    #[test]
    fn placement_cdf_matches_area_law() {
        let mut rng = RandomStream::new(3).rng();
        let (r_min, r_max) = (10.0, 80.0);
        let n = 100_000;
        let draws = place_users(n, r_min, r_max, &mut rng).unwrap();
        for r in [20.0, 40.0, 60.0] {
            let want = (r * r - r_min * r_min) / (r_max * r_max - r_min * r_min);
            let got = draws.iter().filter(|&&d| d <= r).count() as f64 / n as f64;
            assert!((got - want).abs() < 0.01, "cdf off at r = {r}: {got} vs {want}");
        }
        for &d in &draws {
            assert!((r_min..=r_max).contains(&d));
        }
    }

    #[test]
    fn degenerate_annulus_pins_all_users() {
        let mut rng = RandomStream::new(4).rng();
        let draws = place_users(5, 30.0, 30.0, &mut rng).unwrap();
        assert!(draws.iter().all(|&d| (d - 30.0).abs() < 1e-12));
    }

    #[test]
    fn channel_entries_have_path_loss_weighted_power() {
        let geometry = Geometry::fixed(vec![1.0, 10.0], 2.7).unwrap();
        let mut rng = RandomStream::new(5).rng();
        let draws = 20_000;
        let mut power = [0.0f64; 2];
        for _ in 0..draws {
            let ch = sample_channel(&geometry, 2, &mut rng);
            for k in 0..2 {
                for n in 0..2 {
                    power[k] += ch.h.get(k, n).norm_sqr();
                }
            }
        }
        let gains = geometry.path_gains();
        for k in 0..2 {
            let per_entry = power[k] / (2.0 * draws as f64);
            assert!((per_entry / gains[k] - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn unit_distance_channel_is_unit_variance() {
        let geometry = Geometry::fixed(vec![1.0], 2.7).unwrap();
        let mut rng = RandomStream::new(6).rng();
        let ch = sample_channel(&geometry, 3, &mut rng);
        for n in 0..3 {
            assert_eq!(ch.h.get(0, n), ch.h1.get(0, n));
        }
    }
}
