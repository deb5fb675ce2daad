//! Minimum transmit power and max-min fairness allocation.
//!
//! All solvers work on the normalized per-user rate bound of
//! [`crate::rate_bound`], which increases monotonically from zero to
//! `log2 M` as the user's power grows. [`min_power_bisect`] inverts that
//! curve robustly for any target in `(0, log2 M)`; the `*_closed` variants
//! evaluate the high-SNR closed-form inversions and cross-check themselves
//! against bisection, flagging values whose relative gap exceeds 25% (near
//! saturation the flags clear; at mid targets, where the high-SNR expansion
//! is not valid, callers should use bisection directly).
//!
//! [`maxmin_allocate`] turns the per-user solvers into a max-min fair
//! allocator: an outer bisection on the common rate finds the largest rate
//! whose total power fits the budget, which equalizes every user's rate.
//!
//! # Example
//!
//! ```
//! use psklink::{Geometry, Scheme, SystemConfig};
//! use psklink::power::{maxmin_allocate, jain_index};
//!
//! let geometry = Geometry::fixed(vec![10.0, 90.0], 2.7).unwrap();
//! let config = SystemConfig::new(2, 2, 2, 0.0, 1.0, geometry).unwrap();
//! let sol = maxmin_allocate(&config, Scheme::ConstructiveInterference, 1e6, 1e-3).unwrap();
//! assert!(sol.feasible && sol.rate > 0.0);
//! assert_eq!(sol.iterations, 10);
//! ```

use crate::precoding::{zf_beta_longterm, Scheme};
use crate::rate_bound::{ci_user_gain, CiKernel, UnprecodedKernel, ZfKernel};
use crate::specfun::ln_gamma;
use crate::{Error, SystemConfig};

/// Result of a max-min fairness allocation.
#[derive(Clone, Debug)]
pub struct PowerSolution {
    /// Per-user transmit powers achieving the common rate.
    pub powers: Vec<f64>,
    /// The max-min rate, in bits per channel use on the normalized scale.
    pub rate: f64,
    /// False when the budget cannot support any positive common rate.
    pub feasible: bool,
    /// Outer bisection iterations performed.
    pub iterations: usize,
}

/// A closed-form minimum power together with its bisection cross-check.
#[derive(Clone, Copy, Debug)]
pub struct ClosedFormOutcome {
    /// The closed-form power value.
    pub power: f64,
    /// The bisection solution of the same per-user problem.
    pub bisect_power: f64,
    /// `|power - bisect_power| / bisect_power`.
    pub relative_gap: f64,
    /// True when the relative gap exceeds 25%, meaning the closed form sits
    /// outside its high-SNR validity range for this target.
    pub flagged: bool,
}

const GAP_TOLERANCE: f64 = 0.25;

enum RateCurve {
    Unprecoded { kernel: UnprecodedKernel, gain: f64 },
    ZeroForcing { kernel: ZfKernel, k_users: usize, n_antennas: usize, gains: Vec<f64> },
    Ci { kernel: CiKernel, coeff: CiGainCoeff },
}

/// Everything needed to map a power to the CI effective gain of one user.
struct CiGainCoeff {
    n_antennas: usize,
    k_users: usize,
    gains: Vec<f64>,
    u_abs: Vec<f64>,
    user: usize,
}

impl RateCurve {
    fn new(config: &SystemConfig, scheme: Scheme, k: usize) -> Result<Self, Error> {
        if k >= config.n_users {
            return Err(Error::InvalidConfig(format!(
                "user index {k} out of range for {} users",
                config.n_users
            )));
        }
        let gains = config.path_gains();
        match scheme {
            Scheme::Unprecoded => {
                if config.n_antennas != config.n_users {
                    return Err(Error::InvalidConfig(
                        "un-precoded transmission needs N = K".into(),
                    ));
                }
                Ok(RateCurve::Unprecoded {
                    kernel: UnprecodedKernel::new(config.modulation, config.n_users)?,
                    gain: gains[k],
                })
            }
            Scheme::ZeroForcing => Ok(RateCurve::ZeroForcing {
                kernel: ZfKernel::new(config.modulation)?,
                k_users: config.n_users,
                n_antennas: config.n_antennas,
                gains,
            }),
            Scheme::ConstructiveInterference => {
                let u = config.weights.resolve(config.n_users)?;
                Ok(RateCurve::Ci {
                    kernel: CiKernel::new(config.modulation, config.n_users, config.n_antennas)?,
                    coeff: CiGainCoeff {
                        n_antennas: config.n_antennas,
                        k_users: config.n_users,
                        gains,
                        u_abs: u.iter().map(|z| z.norm()).collect(),
                        user: k,
                    },
                })
            }
        }
    }

    fn rate(&self, p: f64, sigma2: f64) -> Result<f64, Error> {
        match self {
            RateCurve::Unprecoded { kernel, gain } => Ok(kernel.rate(p * gain, sigma2)),
            RateCurve::ZeroForcing { kernel, k_users, n_antennas, gains } => {
                let beta = zf_beta_longterm(p, *k_users, *n_antennas, gains)?;
                Ok(kernel.rate(beta, sigma2))
            }
            RateCurve::Ci { kernel, coeff } => {
                let c = if p == 0.0 {
                    0.0
                } else {
                    ci_user_gain(
                        coeff.n_antennas,
                        coeff.k_users,
                        &coeff.gains,
                        &coeff.u_abs,
                        coeff.user,
                        p,
                    )
                };
                kernel.rate(c, sigma2)
            }
        }
    }
}

/// Normalized rate-bound value of user `k` when that user's power budget is
/// `p`, under the given scheme. This is the curve the power solvers invert.
pub fn rate_at_power(
    config: &SystemConfig,
    scheme: Scheme,
    k: usize,
    p: f64,
) -> Result<f64, Error> {
    RateCurve::new(config, scheme, k)?.rate(p, config.sigma2)
}

/// Minimum power for user `k` to reach the normalized rate `r_target`,
/// by geometric bracketing and bisection to relative precision `eps_rel`.
pub fn min_power_bisect(
    config: &SystemConfig,
    scheme: Scheme,
    k: usize,
    r_target: f64,
    eps_rel: f64,
) -> Result<f64, Error> {
    let bits = config.bits_per_symbol();
    if !(r_target >= 0.0) || !r_target.is_finite() {
        return Err(Error::Domain(format!("target rate must be nonnegative, got {r_target}")));
    }
    if r_target >= bits {
        return Err(Error::Infeasible(format!(
            "target {r_target} is at or above the saturation rate {bits}"
        )));
    }
    if r_target == 0.0 {
        return Ok(0.0);
    }
    if !(eps_rel > 0.0 && eps_rel < 1.0) {
        return Err(Error::Domain(format!("eps_rel must lie in (0,1), got {eps_rel}")));
    }
    let curve = RateCurve::new(config, scheme, k)?;
    let sigma2 = config.sigma2;

    let mut lo = 0.0;
    let mut hi = sigma2;
    let mut grows = 0;
    while curve.rate(hi, sigma2)? < r_target {
        lo = hi;
        hi *= 4.0;
        grows += 1;
        if grows > 600 {
            return Err(Error::Infeasible(format!(
                "no finite power reaches rate {r_target}"
            )));
        }
    }
    while hi - lo > eps_rel * hi {
        let mid = 0.5 * (lo + hi);
        if curve.rate(mid, sigma2)? >= r_target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn check_target(config: &SystemConfig, r_target: f64) -> Result<(), Error> {
    let bits = config.bits_per_symbol();
    if !(r_target > 0.0) || r_target >= bits {
        return Err(Error::Infeasible(format!(
            "closed forms need a target in (0, {bits}), got {r_target}"
        )));
    }
    Ok(())
}

fn outcome(
    config: &SystemConfig,
    scheme: Scheme,
    k: usize,
    r_target: f64,
    power: f64,
) -> Result<ClosedFormOutcome, Error> {
    let bisect_power = min_power_bisect(config, scheme, k, r_target, 1e-4)?;
    let relative_gap = (power - bisect_power).abs() / bisect_power;
    Ok(ClosedFormOutcome { power, bisect_power, relative_gap, flagged: relative_gap > GAP_TOLERANCE })
}

/// High-SNR closed-form minimum power for un-precoded transmission: with
/// `Y = 2^(r_target - log2 M)`, the linearized kernel equation solves to
/// `p = (sum_t 2 sigma^2/(g lambda_t) - Y sum_i 2 sigma^2/(g lambda_i)) / (Y - 1)`
/// over the interference and joint difference norms. Rejected when the
/// expression turns nonpositive; flagged when it strays more than 25% from
/// bisection.
pub fn min_power_unprecoded_closed(
    config: &SystemConfig,
    k: usize,
    r_target: f64,
) -> Result<ClosedFormOutcome, Error> {
    if config.n_antennas != config.n_users {
        return Err(Error::InvalidConfig("un-precoded transmission needs N = K".into()));
    }
    check_target(config, r_target)?;
    let gain = config.path_gains()[k];
    let space = config.joint_space();
    let interference = space.interference_space(k);
    let two_sigma2 = 2.0 * config.sigma2;
    let sum_joint: f64 =
        space.difference_norms_from(0).iter().map(|&l| two_sigma2 / (gain * l)).sum();
    let sum_intf: f64 =
        interference.difference_norms_from(0).iter().map(|&l| two_sigma2 / (gain * l)).sum();
    let y = 2f64.powf(r_target - config.bits_per_symbol());
    let power = (sum_intf - y * sum_joint) / (y - 1.0);
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::ClosedFormInvalid(format!(
            "un-precoded inversion returned {power} at target {r_target}"
        )));
    }
    outcome(config, Scheme::Unprecoded, k, r_target, power)
}

/// Long-term zero-forcing receive scale per unit power.
pub fn zf_zeta(k_users: usize, n_antennas: usize, path_gains: &[f64]) -> Result<f64, Error> {
    zf_beta_longterm(1.0, k_users, n_antennas, path_gains)
}

/// Scaling skeleton of the zero-forcing closed form:
/// `sigma^2 (N log2 M - r_target) / (log2 e * zeta^2 * gain^2 * chord^2)`.
/// Exposed so the proportionalities in `sigma2` and in the path gain can be
/// verified even though the full closed form is degenerate (see
/// [`min_power_zf_closed`]).
pub fn min_power_zf_closed_raw(
    sigma2: f64,
    zeta: f64,
    gain: f64,
    chord: f64,
    r_target: f64,
    n_antennas: usize,
    m_order: usize,
) -> f64 {
    let bits_total = n_antennas as f64 * (m_order as f64).log2();
    sigma2 * (bits_total - r_target)
        / (std::f64::consts::LOG2_E * zeta * zeta * gain * gain * chord * chord)
}

/// The zero-forcing closed form is degenerate as stated: its exponential
/// inversion anchors on the pair whose own-user difference is zero, which
/// divides by a zero chord, and its rate deficit term has the wrong sign for
/// every attainable target. It therefore never yields a usable value; the
/// error reports why, and callers fall back to [`min_power_bisect`].
pub fn min_power_zf_closed(
    config: &SystemConfig,
    _k: usize,
    r_target: f64,
) -> Result<ClosedFormOutcome, Error> {
    check_target(config, r_target)?;
    Err(Error::ClosedFormInvalid(
        "zero-forcing inversion anchors on a zero chord and a negative rate deficit; \
         use bisection"
            .into(),
    ))
}

/// High-SNR closed-form minimum power for constructive interference
/// precoding: inverts the small-argument expansion of the Gamma-average
/// kernel, `Lambda ~ a1 (c e)^(-nu)`, against the interference count the
/// target implies. Always positive; flagged when more than 25% from
/// bisection (the expansion needs the target near saturation to be sharp).
pub fn min_power_ci_closed(
    config: &SystemConfig,
    k: usize,
    r_target: f64,
) -> Result<ClosedFormOutcome, Error> {
    check_target(config, r_target)?;
    let n = config.n_antennas;
    let k_users = config.n_users;
    let nu = (n - k_users + 1) as f64;
    let m = config.modulation as f64;
    let kf = k_users as f64;

    // Interference mass the target leaves room for, net of the kernel terms
    // that are identically one.
    let y_prime = m.powi(k_users as i32) * 2f64.powf(-r_target)
        - m.powi(k_users as i32 - 1);
    if !(y_prime > 0.0) {
        return Err(Error::ClosedFormInvalid(format!(
            "target {r_target} leaves no interference margin"
        )));
    }

    let constellation = config.constellation();
    let chord_sum: f64 = constellation.chords().iter().map(|c| c.powf(-nu)).sum();
    let s = m.powi(k_users as i32 - 1) * chord_sum;

    let ln_a1 = nu * config.sigma2.sqrt().ln()
        + 0.5 * (nu - 2.0) * std::f64::consts::LN_2
        + nu * kf.ln()
        + ln_gamma(nu / 2.0)?
        - ln_gamma(nu)?;

    let u = config.weights.resolve(k_users)?;
    let u_abs: Vec<f64> = u.iter().map(|z| z.norm()).collect();
    let gains = config.path_gains();
    let weighted: f64 = gains.iter().zip(&u_abs).map(|(g, ua)| g * ua * ua).sum();
    let a3 = (n as f64 * weighted).sqrt();
    let calibration = (n * k_users) as f64 / nu;
    let coeff = a3 / (calibration * gains[k] * u_abs[k]);

    let ln_p = (2.0 / nu) * (ln_a1 + s.ln() - y_prime.ln()) + 2.0 * coeff.ln();
    let power = ln_p.exp();
    if !power.is_finite() {
        return Err(Error::ClosedFormInvalid(format!(
            "constructive interference inversion overflowed at target {r_target}"
        )));
    }
    outcome(config, Scheme::ConstructiveInterference, k, r_target, power)
}

/// Max-min fairness power allocation: bisects the common rate on
/// `[0, log2 M]` until the interval is narrower than `eps`, accepting a rate
/// when the summed per-user minimum powers fit `p_total`. Runs exactly
/// `ceil(log2(log2 M / eps))` iterations.
pub fn maxmin_allocate(
    config: &SystemConfig,
    scheme: Scheme,
    p_total: f64,
    eps: f64,
) -> Result<PowerSolution, Error> {
    if !(p_total > 0.0) || !p_total.is_finite() {
        return Err(Error::Domain(format!("total power must be positive, got {p_total}")));
    }
    let bits = config.bits_per_symbol();
    if !(eps > 0.0 && eps < bits) {
        return Err(Error::Domain(format!("eps must lie in (0, {bits}), got {eps}")));
    }
    let mut lb = 0.0f64;
    let mut ub = bits;
    let mut best: Option<Vec<f64>> = None;
    let mut iterations = 0;
    while ub - lb > eps {
        let mid = 0.5 * (lb + ub);
        let mut powers = Vec::with_capacity(config.n_users);
        let mut total = 0.0;
        for k in 0..config.n_users {
            let p = min_power_bisect(config, scheme, k, mid, 1e-4)?;
            total += p;
            powers.push(p);
        }
        if total <= p_total {
            lb = mid;
            best = Some(powers);
        } else {
            ub = mid;
        }
        iterations += 1;
    }
    let feasible = best.is_some();
    Ok(PowerSolution {
        powers: best.unwrap_or_else(|| vec![0.0; config.n_users]),
        rate: lb,
        feasible,
        iterations,
    })
}

/// Jain's fairness index `(sum r)^2 / (n sum r^2)`: 1 for equal rates,
/// `1/n` when a single user takes everything.
pub fn jain_index(rates: &[f64]) -> Result<f64, Error> {
    if rates.is_empty() {
        return Err(Error::Domain("fairness index needs at least one rate".into()));
    }
    if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::Domain("rates must be finite and nonnegative".into()));
    }
    let sum: f64 = rates.iter().sum();
    let sq: f64 = rates.iter().map(|r| r * r).sum();
    if sq == 0.0 {
        return Err(Error::Domain("fairness index is undefined for all-zero rates".into()));
    }
    Ok(sum * sum / (rates.len() as f64 * sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Geometry;

    fn config(n: usize, k: usize, m: usize) -> SystemConfig {
        let geometry = Geometry::fixed(vec![1.0; k], 2.7).unwrap();
        SystemConfig::new(n, k, m, 0.0, 1.0, geometry).unwrap()
    }

    fn config_at(n: usize, k: usize, m: usize, d: f64) -> SystemConfig {
        let geometry = Geometry::fixed(vec![d; k], 2.7).unwrap();
        SystemConfig::new(n, k, m, 0.0, 1.0, geometry).unwrap()
    }

    #[test]
    fn bisect_solves_the_kernel_equation() {
        let cfg = config(2, 2, 2);
        let p = min_power_bisect(&cfg, Scheme::Unprecoded, 0, 0.5, 1e-6).unwrap();
        // Hand-solved fixed point of the half-bit equation for BPSK pairs.
        assert!((0.92..0.96).contains(&p), "got {p}");
        let r = rate_at_power(&cfg, Scheme::Unprecoded, 0, p).unwrap();
        assert!((r - 0.5).abs() < 1e-5);
    }

    #[test]
    fn bisect_edge_targets() {
        let cfg = config(2, 2, 2);
        assert_eq!(min_power_bisect(&cfg, Scheme::ZeroForcing, 0, 0.0, 1e-4).unwrap(), 0.0);
        assert!(matches!(
            min_power_bisect(&cfg, Scheme::ZeroForcing, 0, 1.0, 1e-4),
            Err(Error::Infeasible(_))
        ));
        assert!(min_power_bisect(&cfg, Scheme::ZeroForcing, 0, 1.5, 1e-4).is_err());
    }

    #[test]
    fn bisect_is_monotone_in_target() {
        let cfg = config(2, 2, 2);
        for scheme in Scheme::ALL {
            let p3 = min_power_bisect(&cfg, scheme, 0, 0.3, 1e-4).unwrap();
            let p5 = min_power_bisect(&cfg, scheme, 0, 0.5, 1e-4).unwrap();
            let p9 = min_power_bisect(&cfg, scheme, 0, 0.9, 1e-4).unwrap();
            assert!(p3 < p5 && p5 < p9, "{scheme}: {p3} {p5} {p9}");
        }
    }

    #[test]
    fn unprecoded_closed_form_reference_value() {
        let cfg = config(2, 2, 2);
        let out = min_power_unprecoded_closed(&cfg, 0, 0.5).unwrap();
        assert!((out.power - 1.3106601717798214).abs() < 1e-12);
        // At this mid target the high-SNR linearization is visibly off, and
        // the cross-check must say so.
        assert!(out.flagged);
        assert!(out.relative_gap > 0.25);
    }

    #[test]
    fn unprecoded_closed_form_sharpens_near_saturation() {
        let cfg = config(2, 2, 2);
        let out = min_power_unprecoded_closed(&cfg, 0, 0.95).unwrap();
        assert!(!out.flagged, "gap {} at 0.95", out.relative_gap);
        assert!(out.relative_gap < 0.25);
    }

    #[test]
    fn zf_closed_form_is_always_degenerate() {
        let cfg = config(2, 2, 2);
        assert!(matches!(
            min_power_zf_closed(&cfg, 0, 0.5),
            Err(Error::ClosedFormInvalid(_))
        ));
    }

    #[test]
    fn zf_raw_skeleton_scales_correctly() {
        let zeta = zf_zeta(2, 2, &[1.0, 1.0]).unwrap();
        let base = min_power_zf_closed_raw(1.0, zeta, 1.0, 2.0, 0.5, 2, 2);
        let double_noise = min_power_zf_closed_raw(2.0, zeta, 1.0, 2.0, 0.5, 2, 2);
        assert!((double_noise / base - 2.0).abs() < 1e-12);
        // Path gain d^(-m): quartering the gain quadruples-squared the power.
        let weaker = min_power_zf_closed_raw(1.0, zeta, 0.25, 2.0, 0.5, 2, 2);
        assert!((weaker / base - 16.0).abs() < 1e-12);
        assert!(base > 0.0);
    }

    #[test]
    fn ci_closed_form_is_monotone_and_sharp_near_saturation() {
        let cfg = config_at(3, 2, 2, 15.0);
        let p3 = min_power_ci_closed(&cfg, 0, 0.3).unwrap().power;
        let p6 = min_power_ci_closed(&cfg, 0, 0.6).unwrap().power;
        let p9 = min_power_ci_closed(&cfg, 0, 0.9).unwrap().power;
        assert!(p3 < p6 && p6 < p9);

        let near = min_power_ci_closed(&cfg, 0, 0.98).unwrap();
        assert!(!near.flagged, "gap {}", near.relative_gap);
    }

    #[test]
    fn maxmin_runs_the_predicted_iteration_count() {
        let cfg = config_at(2, 2, 2, 10.0);
        let sol = maxmin_allocate(&cfg, Scheme::ZeroForcing, 1e6, 1e-3).unwrap();
        // ceil(log2(1 / 1e-3)) = 10 for BPSK.
        assert_eq!(sol.iterations, 10);
        assert!(sol.feasible);
        assert!(sol.rate > 0.0 && sol.rate < 1.0);
        assert!(sol.powers.iter().sum::<f64>() <= 1e6);
    }

    #[test]
    fn maxmin_equalizes_rates() {
        let geometry = Geometry::fixed(vec![10.0, 90.0], 2.7).unwrap();
        let cfg = SystemConfig::new(2, 2, 2, 0.0, 1.0, geometry).unwrap();
        let sol = maxmin_allocate(&cfg, Scheme::ConstructiveInterference, 1e6, 1e-3).unwrap();
        assert!(sol.feasible);
        let rates: Vec<f64> = (0..2)
            .map(|k| {
                rate_at_power(&cfg, Scheme::ConstructiveInterference, k, sol.powers[k]).unwrap()
            })
            .collect();
        for r in &rates {
            assert!(*r >= sol.rate - 1e-9, "rate {r} below common rate {}", sol.rate);
        }
        assert!(jain_index(&rates).unwrap() > 0.99);
    }

    #[test]
    fn maxmin_reports_infeasible_budgets() {
        let geometry = Geometry::fixed(vec![50.0, 50.0], 2.7).unwrap();
        let cfg = SystemConfig::new(2, 2, 2, 0.0, 1.0, geometry).unwrap();
        let sol = maxmin_allocate(&cfg, Scheme::ZeroForcing, 1e-9, 1e-3).unwrap();
        assert!(!sol.feasible);
        assert_eq!(sol.rate, 0.0);
        assert!(sol.powers.iter().all(|p| *p == 0.0));
    }

    #[test]
    fn jain_index_values() {
        assert!((jain_index(&[1.0, 1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((jain_index(&[2.0, 1.0, 1.0]).unwrap() - 8.0 / 9.0).abs() < 1e-15);
        assert!(jain_index(&[0.0, 0.0]).is_err());
        assert!(jain_index(&[]).is_err());
    }
}
