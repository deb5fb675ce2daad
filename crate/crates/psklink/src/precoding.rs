//! Transmit schemes: un-precoded, zero-forcing, and symbol-level
//! constructive interference precoding.
//!
//! All schemes map a joint symbol vector `s` to a transmit vector `x` under
//! a power budget `p`. The budget can be enforced per channel draw
//! ([`BetaMode::Instantaneous`], exact `||x||^2 = p`) or on average over the
//! fading ([`BetaMode::LongTerm`], a constant scale factor with
//! `E||x||^2 = p`). Long-term scaling is what the closed-form rate bounds
//! model, so it is the default in experiments.
//!
//! - Un-precoded: `x = sqrt(p/N) s`, one user per antenna, `N = K`.
//! - Zero-forcing: `x = beta H^H (H H^H)^{-1} s`, which makes the noise-free
//!   receive vector exactly `beta s`.
//! - Constructive interference: the closed-form symbol-level precoder
//!   `x = (beta/K) H^H (H H^H)^{-1} diag(V^{-1} u) s` with
//!   `V^{-1} = diag(s^H) H H^H diag(s)`, which rotates residual interference
//!   onto each user's symbol direction instead of cancelling it. The weight
//!   vector `u` (summing to one) splits the budget across users.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constellation::JointSymbolSpace;
use crate::linalg::ComplexMatrix;
use crate::specfun::ln_gamma;
use crate::Error;

/// Transmit scheme selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "none")]
    Unprecoded,
    #[serde(rename = "zf")]
    ZeroForcing,
    #[serde(rename = "ci")]
    ConstructiveInterference,
}

impl Scheme {
    pub const ALL: [Scheme; 3] =
        [Scheme::Unprecoded, Scheme::ZeroForcing, Scheme::ConstructiveInterference];

    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Unprecoded => "none",
            Scheme::ZeroForcing => "zf",
            Scheme::ConstructiveInterference => "ci",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "unprecoded" => Ok(Scheme::Unprecoded),
            "zf" | "zero-forcing" => Ok(Scheme::ZeroForcing),
            "ci" | "constructive" => Ok(Scheme::ConstructiveInterference),
            other => Err(Error::InvalidConfig(format!(
                "unknown scheme '{other}', expected none, zf, or ci"
            ))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// How the power budget is enforced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BetaMode {
    #[default]
    #[serde(rename = "long_term")]
    LongTerm,
    #[serde(rename = "instantaneous")]
    Instantaneous,
}

/// Per-user weight vector of the constructive interference precoder.
#[derive(Clone, Debug, PartialEq)]
pub enum CiWeights {
    /// `u_k = 1/K` for every user.
    Uniform,
    /// An explicit weight vector summing to one.
    Fixed(Vec<Complex64>),
    /// Per-symbol weights that align every noise-free receive value exactly
    /// with its symbol. Inherently instantaneous.
    Aligned,
}

impl CiWeights {
    /// Concrete weight vector for `k_users` users. `Aligned` has no static
    /// vector (it depends on the channel and symbol), so it is rejected here
    /// and handled inside the per-symbol code paths.
    pub fn resolve(&self, k_users: usize) -> Result<Vec<Complex64>, Error> {
        match self {
            CiWeights::Uniform => {
                Ok(vec![Complex64::new(1.0 / k_users as f64, 0.0); k_users])
            }
            CiWeights::Fixed(u) => {
                if u.len() != k_users {
                    return Err(Error::InvalidConfig(format!(
                        "weight vector has {} entries for {} users",
                        u.len(),
                        k_users
                    )));
                }
                let sum: Complex64 = u.iter().sum();
                if (sum - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
                    return Err(Error::InvalidConfig(format!(
                        "weights must sum to one, got {sum}"
                    )));
                }
                Ok(u.clone())
            }
            CiWeights::Aligned => Err(Error::InvalidConfig(
                "aligned weights are defined per symbol, not as a static vector".into(),
            )),
        }
    }
}

/// Transmit vector together with the power scale that produced it.
#[derive(Clone, Debug)]
pub struct PrecoderOutput {
    pub x: Vec<Complex64>,
    pub beta: f64,
}

/// Un-precoded transmission `x = sqrt(p/N) s`; needs one antenna per user.
pub fn precode_none(s: &[Complex64], p: f64, n_antennas: usize) -> Result<PrecoderOutput, Error> {
    if s.len() != n_antennas {
        return Err(Error::InvalidConfig(format!(
            "un-precoded transmission needs N = K, got N={n_antennas}, K={}",
            s.len()
        )));
    }
    let beta = (p / n_antennas as f64).sqrt();
    Ok(PrecoderOutput { x: s.iter().map(|z| z * beta).collect(), beta })
}

/// Long-term zero-forcing scale: with `E||x||^2 = p` enforced over the
/// fading, `beta = sqrt(p / sum_l d_l^m) * Gamma(N - K + 3/2) /
/// (K sqrt(K) (N - K)!)`.
pub fn zf_beta_longterm(
    p: f64,
    k_users: usize,
    n_antennas: usize,
    path_gains: &[f64],
) -> Result<f64, Error> {
    if n_antennas < k_users || path_gains.len() != k_users {
        return Err(Error::InvalidConfig("zero-forcing needs N >= K and K path gains".into()));
    }
    let nu = (n_antennas - k_users) as f64;
    let inv_gain_sum: f64 = path_gains.iter().map(|g| 1.0 / g).sum();
    let kf = k_users as f64;
    let ln_ratio = ln_gamma(nu + 1.5)? - ln_gamma(nu + 1.0)?;
    Ok((p / inv_gain_sum).sqrt() * ln_ratio.exp() / (kf * kf.sqrt()))
}

/// Long-term constructive interference scale: `E||x||^2 = p` gives
/// `beta = K sqrt(p / (N sum_l d_l^(-m) |u_l|^2))`.
pub fn ci_beta_longterm(p: f64, n_antennas: usize, u: &[Complex64], path_gains: &[f64]) -> f64 {
    let weighted: f64 =
        path_gains.iter().zip(u).map(|(g, ul)| g * ul.norm_sqr()).sum();
    let k = u.len() as f64;
    k * (p / (n_antennas as f64 * weighted)).sqrt()
}

/// Zero-forcing precoder for one joint symbol vector.
pub fn precode_zf(
    h: &ComplexMatrix,
    path_gains: &[f64],
    s: &[Complex64],
    p: f64,
    beta_mode: BetaMode,
) -> Result<PrecoderOutput, Error> {
    let (k_users, n_antennas) = (h.rows(), h.cols());
    if s.len() != k_users {
        return Err(Error::InvalidConfig("symbol vector length must equal the user count".into()));
    }
    let w = h.gram().hermitian_solve(s)?;
    let beta = match beta_mode {
        BetaMode::Instantaneous => {
            let quad: f64 = s.iter().zip(&w).map(|(si, wi)| (si.conj() * wi).re).sum();
            (p / quad).sqrt()
        }
        BetaMode::LongTerm => zf_beta_longterm(p, k_users, n_antennas, path_gains)?,
    };
    let ht = h.conj_transpose();
    Ok(PrecoderOutput { x: ht.mul_vec(&w).iter().map(|z| z * beta).collect(), beta })
}

/// Constructive interference precoder for one joint symbol vector.
///
/// Uses the algebraic identity `G^{-1} diag(V^{-1} u) s = s .* u` (entrywise
/// product) that holds for unit-modulus symbols, so no inverse is formed.
pub fn precode_ci(
    h: &ComplexMatrix,
    path_gains: &[f64],
    s: &[Complex64],
    p: f64,
    u: &[Complex64],
    beta_mode: BetaMode,
) -> Result<PrecoderOutput, Error> {
    let (k_users, n_antennas) = (h.rows(), h.cols());
    if s.len() != k_users || u.len() != k_users {
        return Err(Error::InvalidConfig(
            "symbol and weight vectors must match the user count".into(),
        ));
    }
    let kf = k_users as f64;
    let v: Vec<Complex64> = s.iter().zip(u).map(|(si, ui)| si * ui).collect();
    let gv = h.gram().mul_vec(&v);
    let beta = match beta_mode {
        BetaMode::Instantaneous => {
            let quad: f64 = v.iter().zip(&gv).map(|(vi, gi)| (vi.conj() * gi).re).sum();
            kf * (p / quad).sqrt()
        }
        BetaMode::LongTerm => ci_beta_longterm(p, n_antennas, u, path_gains),
    };
    let ht = h.conj_transpose();
    Ok(PrecoderOutput { x: ht.mul_vec(&v).iter().map(|z| z * (beta / kf)).collect(), beta })
}

/// Weights that make the noise-free receive value of every user an exact
/// positive multiple of its symbol for this channel and symbol vector.
pub fn aligned_weights(h: &ComplexMatrix, s: &[Complex64]) -> Result<Vec<Complex64>, Error> {
    let w = h.gram().hermitian_solve(s)?;
    let quad: f64 = s.iter().zip(&w).map(|(si, wi)| (si.conj() * wi).re).sum();
    Ok(s.iter().zip(&w).map(|(si, wi)| si.conj() * wi / quad).collect())
}

/// Received sample of user `k`: `y_k = h_k x + noise`.
pub fn receive(h: &ComplexMatrix, x: &[Complex64], k: usize, noise: Complex64) -> Complex64 {
    h.row(k).iter().zip(x).map(|(hk, xn)| hk * xn).sum::<Complex64>() + noise
}

/// Noise-free receive values `f_k(m)` for every user `k` and joint symbol
/// `m`, laid out as `map[k * space.len() + m]`. This is the only
/// channel-dependent input the mutual information estimator needs.
pub fn receive_map(
    h: &ComplexMatrix,
    path_gains: &[f64],
    space: &JointSymbolSpace,
    scheme: Scheme,
    p: f64,
    beta_mode: BetaMode,
    weights: &CiWeights,
) -> Result<Vec<Complex64>, Error> {
    let (k_users, n_antennas) = (h.rows(), h.cols());
    let len = space.len();
    let mut map = vec![Complex64::new(0.0, 0.0); k_users * len];
    match scheme {
        Scheme::Unprecoded => {
            if n_antennas != k_users {
                return Err(Error::InvalidConfig(format!(
                    "un-precoded transmission needs N = K, got N={n_antennas}, K={k_users}"
                )));
            }
            let scale = (p / n_antennas as f64).sqrt();
            for m in 0..len {
                let s = space.vector(m);
                for k in 0..k_users {
                    let y: Complex64 = h.row(k).iter().zip(&s).map(|(a, b)| a * b).sum();
                    map[k * len + m] = y * scale;
                }
            }
        }
        Scheme::ZeroForcing => {
            match beta_mode {
                BetaMode::LongTerm => {
                    let beta = zf_beta_longterm(p, k_users, n_antennas, path_gains)?;
                    for m in 0..len {
                        let s = space.vector(m);
                        for k in 0..k_users {
                            map[k * len + m] = s[k] * beta;
                        }
                    }
                }
                BetaMode::Instantaneous => {
                    let chol = h.gram().cholesky()?;
                    for m in 0..len {
                        let s = space.vector(m);
                        let w = chol.solve(&s);
                        let quad: f64 =
                            s.iter().zip(&w).map(|(si, wi)| (si.conj() * wi).re).sum();
                        let beta = (p / quad).sqrt();
                        for k in 0..k_users {
                            map[k * len + m] = s[k] * beta;
                        }
                    }
                }
            }
        }
        Scheme::ConstructiveInterference => match weights {
            CiWeights::Aligned => {
                if beta_mode == BetaMode::LongTerm {
                    return Err(Error::InvalidConfig(
                        "aligned weights imply per-symbol scaling; use instantaneous mode".into(),
                    ));
                }
                // Aligned CI pushes every receive value onto beta s_k, the
                // same noise-free map as instantaneous zero-forcing.
                let chol = h.gram().cholesky()?;
                for m in 0..len {
                    let s = space.vector(m);
                    let w = chol.solve(&s);
                    let quad: f64 = s.iter().zip(&w).map(|(si, wi)| (si.conj() * wi).re).sum();
                    let beta = (p / quad).sqrt();
                    for k in 0..k_users {
                        map[k * len + m] = s[k] * beta;
                    }
                }
            }
            _ => {
                let u = weights.resolve(k_users)?;
                let g = h.gram();
                let kf = k_users as f64;
                let beta_lt = ci_beta_longterm(p, n_antennas, &u, path_gains);
                for m in 0..len {
                    let s = space.vector(m);
                    let v: Vec<Complex64> = s.iter().zip(&u).map(|(si, ui)| si * ui).collect();
                    let gv = g.mul_vec(&v);
                    let beta = match beta_mode {
                        BetaMode::LongTerm => beta_lt,
                        BetaMode::Instantaneous => {
                            let quad: f64 =
                                v.iter().zip(&gv).map(|(vi, gi)| (vi.conj() * gi).re).sum();
                            kf * (p / quad).sqrt()
                        }
                    };
                    for k in 0..k_users {
                        map[k * len + m] = gv[k] * (beta / kf);
                    }
                }
            }
        },
    }
    Ok(map)
}
