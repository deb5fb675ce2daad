//! PSK constellations and joint multiuser symbol enumeration.
//!
//! Every user draws from the same unit-energy M-PSK alphabet. Finite-alphabet
//! rate expressions sum over the joint symbol space of all `K` users (size
//! `M^K`, lexicographic with user 0 most significant) and over the
//! interference space of the `K-1` other users. Both enumerations live here,
//! together with the pairwise difference geometry (chords and squared
//! difference norms) that the closed-form bounds consume.
//!
//! # Example
//!
//! ```
//! use psklink::JointSymbolSpace;
//!
//! let space = JointSymbolSpace::new(2, 2).unwrap();
//! assert_eq!(space.len(), 4);
//! // Joint index 2 is (second symbol, first symbol) = (-1, +1) for BPSK.
//! let v = space.vector(2);
//! assert!((v[0].re + 1.0).abs() < 1e-15 && (v[1].re - 1.0).abs() < 1e-15);
//! ```

use num_complex::Complex64;

use crate::Error;

/// Largest joint symbol space the exhaustive sums will enumerate.
pub const MAX_JOINT_SYMBOLS: usize = 4096;

const SUPPORTED_ORDERS: [usize; 4] = [2, 4, 8, 16];

/// Unit-energy M-PSK alphabet, points `exp(j 2 pi c / M)`.
#[derive(Clone, Debug)]
pub struct PskConstellation {
    order: usize,
    points: Vec<Complex64>,
}

impl PskConstellation {
    pub fn new(order: usize) -> Result<Self, Error> {
        if !SUPPORTED_ORDERS.contains(&order) {
            return Err(Error::InvalidConfig(format!(
                "modulation order must be one of {SUPPORTED_ORDERS:?}, got {order}"
            )));
        }
        let points = (0..order)
            .map(|c| {
                let phase = 2.0 * std::f64::consts::PI * c as f64 / order as f64;
                Complex64::new(phase.cos(), phase.sin())
            })
            .collect();
        Ok(Self { order, points })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    #[inline]
    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    /// Chord length `|1 - exp(j 2 pi c / M)| = 2 |sin(pi c / M)|` between
    /// constellation points `c` steps apart.
    pub fn chord(&self, steps: usize) -> f64 {
        2.0 * (std::f64::consts::PI * steps as f64 / self.order as f64).sin().abs()
    }

    /// Chords for all nonzero separations `c = 1..M-1`.
    pub fn chords(&self) -> Vec<f64> {
        (1..self.order).map(|c| self.chord(c)).collect()
    }

    pub fn min_distance(&self) -> f64 {
        self.chord(1)
    }

    pub fn bits_per_symbol(&self) -> f64 {
        (self.order as f64).log2()
    }
}

/// Lexicographic enumeration of `users` M-PSK symbols as one index in
/// `0..M^users`, user 0 most significant. `users = 0` is the valid empty
/// enumeration with a single empty vector, which is what the interference
/// space of a single-user system degenerates to.
#[derive(Clone, Debug)]
pub struct JointSymbolSpace {
    constellation: PskConstellation,
    users: usize,
    len: usize,
}

impl JointSymbolSpace {
    pub fn new(order: usize, users: usize) -> Result<Self, Error> {
        let constellation = PskConstellation::new(order)?;
        let mut len: usize = 1;
        for _ in 0..users {
            len = len.saturating_mul(order);
            if len > MAX_JOINT_SYMBOLS {
                return Err(Error::InvalidConfig(format!(
                    "joint symbol space {order}^{users} exceeds the cap of \
                     {MAX_JOINT_SYMBOLS}; reduce the modulation order or the user count"
                )));
            }
        }
        Ok(Self { constellation, users, len })
    }

    pub fn order(&self) -> usize {
        self.constellation.order()
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn constellation(&self) -> &PskConstellation {
        &self.constellation
    }

    /// Place value of a user's digit inside a joint index.
    #[inline]
    pub fn place(&self, user: usize) -> usize {
        self.constellation.order().pow((self.users - 1 - user) as u32)
    }

    /// Constellation index of `user` inside joint index `index`.
    #[inline]
    pub fn digit(&self, index: usize, user: usize) -> usize {
        (index / self.place(user)) % self.constellation.order()
    }

    /// Symbol vector `s(index)`, one entry per user.
    pub fn vector(&self, index: usize) -> Vec<Complex64> {
        (0..self.users).map(|u| self.constellation.point(self.digit(index, u))).collect()
    }

    /// The joint space of the `users - 1` users other than `user`, in user
    /// order with `user` removed.
    pub fn interference_space(&self, user: usize) -> Self {
        assert!(user < self.users, "user index out of range");
        Self::new(self.constellation.order(), self.users - 1).expect("smaller space always fits")
    }

    /// Joint index whose `user` digit is zero and whose remaining digits come
    /// from interference index `t` (over the other users, in order).
    pub fn embed_interference(&self, user: usize, t: usize) -> usize {
        assert!(user < self.users, "user index out of range");
        let m_order = self.constellation.order();
        let mut rest = t;
        let mut index = 0;
        // Digits of t are consumed most significant first.
        let mut div = m_order.pow((self.users.saturating_sub(2)) as u32);
        for u in 0..self.users {
            if u == user {
                continue;
            }
            let d = if self.users >= 2 { (rest / div) % m_order } else { 0 };
            rest %= div.max(1);
            index += d * self.place(u);
            if div >= m_order {
                div /= m_order;
            }
        }
        index
    }

    /// Joint index combining `anchor`'s digit for `user` with interference
    /// index `t` for everyone else.
    #[inline]
    pub fn substitute(&self, anchor: usize, user: usize, t: usize) -> usize {
        self.embed_interference(user, t) + self.digit(anchor, user) * self.place(user)
    }

    /// Squared Euclidean norm of the joint symbol difference
    /// `|| s(m) - s(i) ||^2`, the single nonzero eigenvalue of the rank-one
    /// pairwise matrix the union-style rate expressions average over.
    pub fn diff_eigenvalue(&self, m: usize, i: usize) -> Result<f64, Error> {
        if m == i {
            return Err(Error::Domain(
                "difference eigenvalue needs two distinct joint symbols".into(),
            ));
        }
        let mut acc = 0.0;
        for u in 0..self.users {
            let d = self.constellation.point(self.digit(m, u))
                - self.constellation.point(self.digit(i, u));
            acc += d.norm_sqr();
        }
        Ok(acc)
    }

    /// Squared difference norms from one anchor to every other joint symbol.
    pub fn difference_norms_from(&self, anchor: usize) -> Vec<f64> {
        (0..self.len)
            .filter(|&i| i != anchor)
            .map(|i| self.diff_eigenvalue(anchor, i).expect("distinct indices"))
            .collect()
    }
}

/// All pairwise differences from one anchor symbol, indices included. The
/// anchor's own entry is the exact zero vector.
#[derive(Clone, Debug)]
pub struct DifferenceSet {
    pub anchor: usize,
    pub differences: Vec<(usize, Vec<Complex64>)>,
}

/// Differences `s(anchor) - s(i)` for every joint index `i`.
pub fn difference_set(space: &JointSymbolSpace, anchor: usize) -> DifferenceSet {
    let base = space.vector(anchor);
    let differences = (0..space.len())
        .map(|i| {
            let v = space.vector(i);
            (i, base.iter().zip(&v).map(|(a, b)| a - b).collect())
        })
        .collect();
    DifferenceSet { anchor, differences }
}
