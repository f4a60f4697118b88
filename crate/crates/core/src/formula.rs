//! Centralizing lifts of elements and vector-orbit order probes.

use thiserror::Error;

use crate::group::{GroupElement, DEFAULT_ORDER_BOUND};
use crate::linalg::{DenseMatrix, LinalgError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("i must be a non-identity element of odd order")]
    BadCentre,
    #[error("(i i^x)^3 does not conjugate i^x into <i>")]
    EnablerFails,
    #[error("the lifted element does not normalize <i> as requested")]
    VerificationFails,
    #[error("probe vector is zero")]
    ZeroVector,
    #[error("no return to the probe vector within {0} steps")]
    BoundExceeded(u64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Inputs to [`lift_formula`]: `x' = i^k x (i i^x)^3`.
#[derive(Clone, Debug)]
pub struct LiftSpec<G> {
    pub i: G,
    pub x: G,
    pub k: i64,
}

impl<G: GroupElement> LiftSpec<G> {
    pub fn new(i: G, x: G) -> Self {
        LiftSpec { i, x, k: 1 }
    }

    pub fn with_power(mut self, k: i64) -> Self {
        self.k = k;
        self
    }
}

fn in_cyclic<G: GroupElement>(g: &G, i: &G, order: u64) -> bool {
    let mut p = i.identity_like();
    for _ in 0..order {
        if p == *g {
            return true;
        }
        p = p.op(i);
    }
    false
}

/// With `k = 1` the result centralizes `i`; otherwise it normalizes `<i>`.
pub fn lift_formula<G: GroupElement>(spec: &LiftSpec<G>) -> Result<G, FormulaError> {
    let LiftSpec { i, x, k } = spec;
    let order = i.order(DEFAULT_ORDER_BOUND).ok_or(FormulaError::BadCentre)?;
    if order == 1 || order % 2 == 0 {
        return Err(FormulaError::BadCentre);
    }
    let ix = i.conjugate_by(x);
    let y = i.op(&ix).pow(3);
    let moved = ix.conjugate_by(&y);
    let enabled = if *k == 1 { moved == *i } else { in_cyclic(&moved, i, order) };
    if !enabled {
        return Err(FormulaError::EnablerFails);
    }
    let lifted = i.pow(*k).op(x).op(&y);
    let image = i.conjugate_by(&lifted);
    let verified = if *k == 1 { image == *i } else { in_cyclic(&image, i, order) };
    if !verified {
        return Err(FormulaError::VerificationFails);
    }
    Ok(lifted)
}

/// Least `n >= 1` with `v M^n = v`.
pub fn probable_order(m: &DenseMatrix, v: &[u16], max: u64) -> Result<u64, FormulaError> {
    if v.iter().all(|&x| x == 0) {
        return Err(FormulaError::ZeroVector);
    }
    let start = DenseMatrix::from_rows(m.field(), &[v.to_vec()])?;
    let mut w = start.mat_mul(m)?;
    let mut n = 1;
    while w != start {
        n += 1;
        if n > max {
            return Err(FormulaError::BoundExceeded(max));
        }
        w = w.mat_mul(m)?;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::Perm;
    use crate::fields::Poly2;
    use crate::linalg::DenseMatrix;

    #[test]
    fn commuting_case_is_unchanged() {
        let i = Perm::from_cycles(7, &[&[0, 1, 2, 3, 4, 5, 6]]).unwrap();
        let x = i.pow(3);
        assert_eq!(lift_formula(&LiftSpec::new(i, x.clone())).unwrap(), x);
    }

    #[test]
    fn even_order_centre_rejected() {
        let i = Perm::from_cycles(4, &[&[0, 1]]).unwrap();
        let x = Perm::identity(4);
        assert_eq!(lift_formula(&LiftSpec::new(i, x)), Err(FormulaError::BadCentre));
    }

    #[test]
    fn companion_probe() {
        let c = DenseMatrix::companion(&"x^6+x^5+x^4+x^3+x^2+x+1".parse::<Poly2>().unwrap());
        let mut v = vec![0u16; 6];
        v[0] = 1;
        assert_eq!(probable_order(&c, &v, 100).unwrap(), 7);
        assert_eq!(probable_order(&c, &[0; 6], 100), Err(FormulaError::ZeroVector));
    }
}
