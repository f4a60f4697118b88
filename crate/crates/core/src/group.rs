//! The element interface shared by matrices and permutations.

use std::fmt::Debug;
use std::hash::Hash;

use sha2::{Digest, Sha256};

/// Default ceiling for order computations.
pub const DEFAULT_ORDER_BOUND: u64 = 1_000_000;

/// An element of a group acting on the right: `x.op(y)` applies `x` first.
pub trait GroupElement: Clone + PartialEq + Eq + Hash + Debug + Send + Sync {
    fn op(&self, other: &Self) -> Self;

    fn inverse(&self) -> Self;

    fn identity_like(&self) -> Self;

    fn is_identity(&self) -> bool {
        *self == self.identity_like()
    }

    /// Byte encoding used for digests; equal elements give equal bytes.
    fn canonical_bytes(&self) -> Vec<u8>;

    /// Least `n >= 1` with `self^n = 1`, or `None` above `bound`.
    fn order(&self, bound: u64) -> Option<u64> {
        let mut x = self.clone();
        for n in 1..=bound {
            if x.is_identity() {
                return Some(n);
            }
            x = x.op(self);
        }
        None
    }

    fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.identity_like();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.op(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.op(&sq);
            }
        }
        acc
    }

    /// `h^-1 self h`.
    fn conjugate_by(&self, h: &Self) -> Self {
        h.inverse().op(self).op(h)
    }

    fn commutes_with(&self, other: &Self) -> bool {
        self.op(other) == other.op(self)
    }

    fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_bytes()))
    }
}
