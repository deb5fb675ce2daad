//! Samples the fading channel and checks two things empirically: the
//! per-user channel energy follows the path-loss profile, and the two power
//! scaling modes of the precoders do what they claim (exact budget use per
//! realization versus on average).

use num_complex::Complex64;
use psklink::channel::{sample_channel, Geometry, RandomStream};
use psklink::precoding::{ci_beta_longterm, precode_ci, BetaMode};
use psklink::{JointSymbolSpace, SystemConfig};

fn main() {
    let n = 3usize;
    let geometry = Geometry::fixed(vec![5.0, 20.0], 2.7).unwrap();
    let config = SystemConfig::new(n, 2, 4, 4.0, 1.0, geometry).unwrap();
    let gains = config.path_gains();
    let space = JointSymbolSpace::new(config.modulation, config.n_users).unwrap();
    let u = vec![Complex64::new(0.5, 0.0); 2];

    let draws = 20_000;
    let mut rng = RandomStream::new(2).rng();
    let mut energy = vec![0.0f64; 2];
    let mut used_lt = 0.0f64;
    let mut worst_inst = 0.0f64;

    for i in 0..draws {
        let ch = sample_channel(&config.geometry, n, &mut rng);
        for k in 0..2 {
            energy[k] += ch.h.row(k).iter().map(|z| z.norm_sqr()).sum::<f64>();
        }

        let s = space.vector(i % space.len());
        let lt = precode_ci(&ch.h, &ch.path_gains, &s, config.power, &u, BetaMode::LongTerm)
            .unwrap();
        used_lt += lt.x.iter().map(|z| z.norm_sqr()).sum::<f64>();

        let inst =
            precode_ci(&ch.h, &ch.path_gains, &s, config.power, &u, BetaMode::Instantaneous)
                .unwrap();
        let used: f64 = inst.x.iter().map(|z| z.norm_sqr()).sum();
        worst_inst = worst_inst.max((used - config.power).abs());
    }

    println!("channel energy per user over {draws} draws (expect N * d^-2.7):");
    for k in 0..2 {
        let mean = energy[k] / draws as f64;
        let expect = n as f64 * gains[k];
        println!(
            "  user {k}: mean {mean:.6e}, expected {expect:.6e}, rel {:+.3e}",
            mean / expect - 1.0
        );
    }

    let beta = ci_beta_longterm(config.power, n, &u, &gains);
    println!();
    println!("constructive interference, budget p = {}:", config.power);
    println!(
        "  long-term scale beta = {beta:.4}: mean used power {:.4} (exact on average)",
        used_lt / draws as f64
    );
    println!(
        "  instantaneous scale: worst |used - p| = {worst_inst:.2e} (exact per draw)"
    );
}
