//! # psklink
//!
//! Link-level analysis toolkit for the multiuser MIMO downlink with PSK
//! signalling. One multi-antenna transmitter serves several single-antenna
//! users over a Rayleigh fading channel with distance-based path loss, and
//! every user draws its symbols from an M-PSK constellation.
//!
//! The crate provides:
//!
//! - Monte Carlo estimation of the per-user finite-alphabet mutual
//!   information for three transmit schemes: un-precoded transmission,
//!   zero-forcing (ZF) precoding, and closed-form constructive-interference
//!   (CI) symbol-level precoding ([`rate_mc`]).
//! - Closed-form average sum-rate upper bounds for the same three schemes,
//!   built from an exponential-average kernel and a Gamma-average kernel
//!   that uses the confluent hypergeometric function ([`rate_bound`],
//!   [`specfun`]).
//! - Minimum transmit power solvers (robust bisection plus high-SNR closed
//!   forms with validity cross-checks) and a max-min fairness power
//!   allocator with Jain's index reporting ([`power`]).
//! - A reproducible experiment runner with JSON configuration and CSV
//!   output, exposed through the `psklink` command line tool
//!   ([`experiment`]).
//!
//! Everything is deterministic given a seed: Monte Carlo trials run on
//! counter-based substreams and merge in a fixed order, so results are
//! byte-identical for any worker count.
//!
//! # Example
//!
//! ```
//! use psklink::{Geometry, RandomStream, Scheme, SystemConfig};
//! use psklink::rate_mc::sum_rate_mc;
//!
//! let geometry = Geometry::fixed(vec![1.0, 1.0], 2.7).unwrap();
//! let config = SystemConfig::new(2, 2, 2, 100.0, 1.0, geometry).unwrap();
//! let report = sum_rate_mc(&config, Scheme::ZeroForcing, 200, RandomStream::new(7)).unwrap();
//!
//! // BPSK with two users saturates at 2 bits/s/Hz; 20 dB is close to there.
//! assert!(report.sum_rate > 1.5 && report.sum_rate < 2.0 + 3.0 * report.sum_ci95);
//! ```

pub mod channel;
pub mod constellation;
pub mod experiment;
pub mod linalg;
pub mod power;
pub mod precoding;
pub mod rate_bound;
pub mod rate_mc;
pub mod specfun;

pub use channel::{ChannelRealization, Geometry, RandomStream};
pub use constellation::{JointSymbolSpace, PskConstellation};
pub use linalg::ComplexMatrix;
pub use power::PowerSolution;
pub use precoding::{BetaMode, CiWeights, Scheme};
pub use rate_bound::BoundReport;
pub use rate_mc::RateReport;

use serde::{Deserialize, Serialize};

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration or dimension mismatch, with a field-level message.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// A scalar argument left its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Hermitian factorization hit a nonpositive pivot, so the matrix is
    /// treated as singular (a degenerate channel draw; callers resample).
    #[error("matrix is singular or not positive definite")]
    SingularMatrix,
    /// The requested target cannot be met at any power.
    #[error("infeasible request: {0}")]
    Infeasible(String),
    /// A high-SNR closed form produced a value outside its validity range.
    #[error("closed form out of validity range: {0}")]
    ClosedFormInvalid(String),
    /// A series evaluation did not converge within its term cap.
    #[error("series did not converge: {0}")]
    NonConvergence(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convention for reporting rates.
///
/// `Normalized` maps every per-user quantity onto `[0, log2 M]` so Monte
/// Carlo estimates and closed-form bounds are directly comparable (zero at
/// zero power, `log2 M` at saturation). `Verbatim` keeps the unnormalized
/// leading constant of the analytical expressions, which adds a fixed
/// `(N-1)*log2 M` offset per user; it is retained for auditing the formulas
/// in their original form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateMode {
    #[default]
    #[serde(rename = "normalized")]
    Normalized,
    #[serde(rename = "paper_verbatim", alias = "verbatim")]
    Verbatim,
}

/// Static description of one downlink scenario: array and user counts,
/// constellation, transmit power, noise power, and user geometry.
///
/// `power` is the total transmit power `p`; with `sigma2` fixed at 1 the
/// operating point in dB is `10*log10(p)`, which [`SystemConfig::with_snr_db`]
/// sets directly.
#[derive(Clone, Debug)]
pub struct SystemConfig {
    pub n_antennas: usize,
    pub n_users: usize,
    pub modulation: usize,
    pub power: f64,
    pub sigma2: f64,
    pub geometry: Geometry,
    pub beta_mode: BetaMode,
    pub weights: CiWeights,
    pub mode: RateMode,
}

impl SystemConfig {
    /// Validates and builds a configuration with the default long-term power
    /// scaling, uniform CI weights, and normalized rate reporting.
    pub fn new(
        n_antennas: usize,
        n_users: usize,
        modulation: usize,
        power: f64,
        sigma2: f64,
        geometry: Geometry,
    ) -> Result<Self, Error> {
        if n_users < 1 || n_antennas < n_users {
            return Err(Error::InvalidConfig(format!(
                "need n_antennas >= n_users >= 1, got N={n_antennas}, K={n_users}"
            )));
        }
        PskConstellation::new(modulation)?;
        JointSymbolSpace::new(modulation, n_users)?;
        if geometry.distances.len() != n_users {
            return Err(Error::InvalidConfig(format!(
                "geometry lists {} distances for {} users",
                geometry.distances.len(),
                n_users
            )));
        }
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::Domain(format!("sigma2 must be positive, got {sigma2}")));
        }
        if !(power >= 0.0) || !power.is_finite() {
            return Err(Error::Domain(format!("power must be nonnegative, got {power}")));
        }
        Ok(Self {
            n_antennas,
            n_users,
            modulation,
            power,
            sigma2,
            geometry,
            beta_mode: BetaMode::LongTerm,
            weights: CiWeights::Uniform,
            mode: RateMode::Normalized,
        })
    }

    pub fn with_power(mut self, power: f64) -> Self {
        self.power = power;
        self
    }

    /// Sets the total power from an SNR in dB via `p = sigma2 * 10^(snr/10)`.
    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.power = self.sigma2 * 10f64.powf(snr_db / 10.0);
        self
    }

    pub fn with_mode(mut self, mode: RateMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_beta_mode(mut self, beta_mode: BetaMode) -> Self {
        self.beta_mode = beta_mode;
        self
    }

    pub fn with_weights(mut self, weights: CiWeights) -> Self {
        self.weights = weights;
        self
    }

    pub fn constellation(&self) -> PskConstellation {
        PskConstellation::new(self.modulation).expect("validated at construction")
    }

    pub fn joint_space(&self) -> JointSymbolSpace {
        JointSymbolSpace::new(self.modulation, self.n_users).expect("validated at construction")
    }

    /// Path gains `d_k^(-m)` for every user.
    pub fn path_gains(&self) -> Vec<f64> {
        self.geometry.path_gains()
    }

    /// Bits per symbol of the configured constellation.
    pub fn bits_per_symbol(&self) -> f64 {
        (self.modulation as f64).log2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_bad_dimensions() {
        let geom = Geometry::fixed(vec![1.0, 1.0], 2.7).unwrap();
        assert!(SystemConfig::new(1, 2, 2, 1.0, 1.0, geom.clone()).is_err());
        assert!(SystemConfig::new(2, 2, 3, 1.0, 1.0, geom.clone()).is_err());
        assert!(SystemConfig::new(2, 2, 2, 1.0, 0.0, geom.clone()).is_err());
        assert!(SystemConfig::new(2, 2, 2, -1.0, 1.0, geom.clone()).is_err());
        let geom_short = Geometry::fixed(vec![1.0], 2.7).unwrap();
        assert!(SystemConfig::new(2, 2, 2, 1.0, 1.0, geom_short).is_err());
        assert!(SystemConfig::new(2, 2, 2, 1.0, 1.0, geom).is_ok());
    }

    #[test]
    fn snr_helper_matches_definition() {
        let geom = Geometry::fixed(vec![1.0], 2.7).unwrap();
        let cfg = SystemConfig::new(1, 1, 2, 0.0, 2.0, geom).unwrap().with_snr_db(10.0);
        assert!((cfg.power - 20.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_cap_enforced() {
        let geom = Geometry::fixed(vec![1.0; 4], 2.7).unwrap();
        // 16^4 = 65536 exceeds the joint-space cap of 4096.
        assert!(SystemConfig::new(4, 4, 16, 1.0, 1.0, geom).is_err());
    }
}
