//! Shared numerical oracles for the integration suites.
//!
//! Everything in this module is computed through routes the library itself
//! never uses (Gaussian quadrature, direct series summation), so a bug in the
//! library cannot hide inside its own reference values.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

/// Nodes and weights of an n-point Gauss-Hermite rule for weight exp(-x^2),
/// found by Newton iteration on the normalized Hermite recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let half = (n + 1) / 2;
    let mut z = 0.0f64;
    for i in 0..half {
        z = match i {
            0 => {
                let c = (2 * n + 1) as f64;
                c.sqrt() - 1.85575 * c.powf(-1.0 / 6.0)
            }
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0f64;
        for _ in 0..100 {
            let mut p1 = PI.powf(-0.25);
            let mut p2 = 0.0f64;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - (((jf - 1.0) / jf).sqrt()) * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Nodes and weights of an n-point Gauss-Laguerre rule for weight exp(-x)
/// on [0, inf).
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let nf = n as f64;
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let mut z = 0.0f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - x[i - 2])
            }
        };
        let mut pp = 0.0f64;
        let mut p2 = 0.0f64;
        for _ in 0..100 {
            let mut p1 = 1.0f64;
            p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (p1 - p2) / z;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-14 * z.max(1.0) {
                break;
            }
        }
        x[i] = z;
        w[i] = -1.0 / (pp * nf * p2);
    }
    (x, w)
}

/// Kummer's series summed term by term with compensated addition. Valid for
/// z >= 0 where every term is positive and no cancellation occurs.
pub fn hyp1f1_reference(a: f64, b: f64, z: f64) -> f64 {
    assert!(z >= 0.0, "reference series is only trustworthy for z >= 0");
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    let mut term = 1.0f64;
    for k in 0..2000 {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * z / (kf + 1.0);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.abs() < sum.abs() * 1e-18 && k > 8 {
            break;
        }
    }
    sum
}

/// Normalized mutual information of a deterministic complex-AWGN channel
/// y = amplitude * s + n with s uniform M-PSK and n circular with total
/// variance sigma2, via a tensorized Gauss-Hermite rule over the noise.
pub fn awgn_psk_mi(
    amplitude: f64,
    sigma2: f64,
    m_order: usize,
    hermite: &(Vec<f64>, Vec<f64>),
) -> f64 {
    let (xs, ws) = hermite;
    let points: Vec<Complex64> = (0..m_order)
        .map(|c| Complex64::from_polar(1.0, 2.0 * PI * c as f64 / m_order as f64))
        .collect();
    // Rotation symmetry lets the anchor symbol be fixed at +1.
    let diffs: Vec<Complex64> = points.iter().map(|s| s - points[0]).collect();
    let sig = sigma2.sqrt();
    let mut acc = 0.0f64;
    for (i, &xi) in xs.iter().enumerate() {
        for (j, &xj) in xs.iter().enumerate() {
            let noise = Complex64::new(sig * xi, sig * xj);
            let base = noise.norm_sqr();
            let mut lse = 0.0f64;
            for d in &diffs {
                lse += (-((amplitude * d + noise).norm_sqr() - base) / sigma2).exp();
            }
            acc += ws[i] * ws[j] * lse.log2();
        }
    }
    (m_order as f64).log2() - acc / PI
}

/// Single-user Rayleigh-faded PSK rate: the AWGN rate averaged over an
/// exponentially distributed channel power via Gauss-Laguerre.
pub fn siso_fading_psk_mi(
    p: f64,
    sigma2: f64,
    m_order: usize,
    hermite: &(Vec<f64>, Vec<f64>),
    laguerre: &(Vec<f64>, Vec<f64>),
) -> f64 {
    let (ts, ws) = laguerre;
    ts.iter()
        .zip(ws)
        .map(|(&t, &wl)| wl * awgn_psk_mi((p * t).sqrt(), sigma2, m_order, hermite))
        .sum()
}

/// Exact average of exp(-t |A|^2) where A is the two-user constructive
/// interference receive amplitude on an N-antenna array with unit path gains
/// and unit weights, normalized by beta/K = 1. Conditioned on the serving
/// row's squared norm g, the amplitude is complex Gaussian with mean g and
/// variance g, and g itself is Gamma(N, 1); the conditional average has a
/// closed form that leaves a single smooth integral over g.
pub fn ci_pair_exp_average(
    n_antennas: usize,
    t: f64,
    laguerre: &(Vec<f64>, Vec<f64>),
) -> f64 {
    let (gs, ws) = laguerre;
    let mut ln_gamma_n = 0.0f64;
    for j in 2..n_antennas {
        ln_gamma_n += (j as f64).ln();
    }
    gs.iter()
        .zip(ws)
        .map(|(&g, &w)| {
            let density = ((n_antennas as f64 - 1.0) * g.ln() - ln_gamma_n).exp();
            let shrink = 1.0 + t * g;
            w * density / shrink * (-t * g * g / shrink).exp()
        })
        .sum()
}
