#![allow(dead_code)]

use amalgamkit::actions::Perm;
use amalgamkit::fields::Field;
use amalgamkit::linalg::DenseMatrix;
use amalgamkit::words::Word;
use proptest::prelude::*;

/// Random invertible matrix over GF(q) as a product `L U P` with unit triangular factors.
pub fn invertible(q: u32, n: usize) -> impl Strategy<Value = DenseMatrix> {
    let field = Field::from_order(q).unwrap();
    let entries = proptest::collection::vec(0..q as u16, 2 * n * n);
    (entries, shuffled(n)).prop_map(move |(e, images)| {
        let mut l = DenseMatrix::identity(field, n);
        let mut u = DenseMatrix::identity(field, n);
        for i in 0..n {
            for j in 0..n {
                if j < i {
                    l.set(i, j, e[i * n + j]);
                }
                if j > i {
                    u.set(i, j, e[n * n + i * n + j]);
                }
            }
        }
        let p = DenseMatrix::permutation(field, &images);
        l.mat_mul(&u).unwrap().mat_mul(&p).unwrap()
    })
}

pub fn shuffled(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

pub fn perm(n: usize) -> impl Strategy<Value = Perm> {
    shuffled(n).prop_map(|v| Perm::from_images(v).unwrap())
}

/// Random words over the named generators, nested to a small depth.
pub fn word(names: &'static [&'static str]) -> impl Strategy<Value = Word> {
    let leaf = proptest::sample::select(names).prop_map(Word::gen);
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 1..4).prop_map(Word::product),
            (inner.clone(), -3i64..5).prop_map(|(w, e)| w.pow(e)),
            (inner.clone(), inner).prop_map(|(w, h)| w.conj(h)),
        ]
    })
}
