//! A short tour of the constellation layer: PSK points, chord lengths, and
//! the joint symbol space the multiuser estimators enumerate.

use psklink::{JointSymbolSpace, PskConstellation};

fn main() {
    for m in [2usize, 4, 8] {
        let psk = PskConstellation::new(m).unwrap();
        let chords: Vec<String> =
            (1..m).map(|c| format!("{:.4}", psk.chord(c))).collect();
        println!("{m}-PSK chords |s_0 - s_c|: {}", chords.join(", "));
    }
    println!();

    // Two QPSK users seen jointly: 16 symbol vectors, user 0 in the high
    // digit. The difference norms from a fixed anchor drive every bound.
    let space = JointSymbolSpace::new(4, 2).unwrap();
    println!("joint QPSK space for K = 2 has {} vectors", space.len());
    for i in [0usize, 1, 4, 5, 15] {
        let v = space.vector(i);
        println!(
            "  index {i:>2}: digits ({}, {}) -> [{:+.3}{:+.3}i, {:+.3}{:+.3}i]",
            space.digit(i, 0),
            space.digit(i, 1),
            v[0].re,
            v[0].im,
            v[1].re,
            v[1].im
        );
    }

    let norms = space.difference_norms_from(0);
    let nonzero = norms.iter().filter(|&&x| x > 0.0).count();
    println!("difference norms from index 0: {nonzero} nonzero of {}", norms.len());

    // Interference subspace of user 0: joint vectors that agree with the
    // anchor in user 0's digit.
    let intf = space.interference_space(0);
    println!("interference space of user 0 has {} vectors", intf.len());
}
