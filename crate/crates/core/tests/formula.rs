mod common;

use amalgamkit::actions::Perm;
use amalgamkit::fields::{BinaryField, Field, FieldElement};
use amalgamkit::formula::{lift_formula, probable_order, FormulaError, LiftSpec};
use amalgamkit::group::GroupElement;
use amalgamkit::linalg::DenseMatrix;
use proptest::prelude::*;

/// The affine group `2^3:7` on the 8 elements of GF(8).
struct Affine {
    field: BinaryField,
}

impl Affine {
    fn map(&self, scale: FieldElement, shift: FieldElement) -> Perm {
        let f = self.field;
        Perm::from_images((0..8).map(|v| f.add(f.mul(scale, f.element(v)), shift).0 as usize).collect()).unwrap()
    }

    fn multiplier(&self) -> Perm {
        self.map(self.field.generator(), self.field.element(0))
    }

    fn translation(&self, a: u16) -> Perm {
        self.map(self.field.element(1), self.field.element(a))
    }

    /// Image in the quotient `C7`: the multiplier applied to 1 after removing the shift.
    fn quotient(&self, g: &Perm) -> usize {
        let f = self.field;
        f.add(f.element(g.image(1) as u16), f.element(g.image(0) as u16)).0 as usize
    }
}

#[test]
fn affine_model_lifts_translations_to_the_identity() {
    let m = Affine { field: BinaryField::gf8() };
    let i = m.multiplier();
    for a in 0..8 {
        let x = m.translation(a);
        let lifted = lift_formula(&LiftSpec::new(i.clone(), x.clone())).unwrap();
        assert!(lifted.is_identity(), "translation by {a}");
        assert!(lifted.commutes_with(&i));
        assert_eq!(m.quotient(&lifted.op(&x.inverse())), 1);
    }
}

#[test]
fn affine_model_normalising_powers() {
    let m = Affine { field: BinaryField::gf8() };
    let i = m.multiplier();
    for k in 1..7 {
        for a in 0..8 {
            let lifted = lift_formula(&LiftSpec::new(i.clone(), m.translation(a)).with_power(k)).unwrap();
            assert_eq!(lifted, i.pow(k - 1));
            assert_eq!(m.quotient(&lifted.op(&m.translation(a).inverse())), m.quotient(&i.pow(k - 1)));
        }
    }
}

#[test]
fn rejects_bad_centres_and_failed_enablers() {
    let t = Perm::from_cycles(7, &[&[0, 1]]).unwrap();
    assert_eq!(lift_formula(&LiftSpec::new(t, Perm::identity(7))), Err(FormulaError::BadCentre));
    assert_eq!(lift_formula(&LiftSpec::new(Perm::identity(7), Perm::identity(7))), Err(FormulaError::BadCentre));
    let i = Perm::from_cycles(7, &[&[0, 1, 2, 3, 4, 5, 6]]).unwrap();
    let x = Perm::from_cycles(7, &[&[0, 1]]).unwrap();
    assert_eq!(lift_formula(&LiftSpec::new(i, x)), Err(FormulaError::EnablerFails));
}

#[test]
fn probe_examples() {
    let id = DenseMatrix::identity(Field::gf2(), 5);
    assert_eq!(probable_order(&id, &[0, 1, 0, 1, 1], 10).unwrap(), 1);
    let c = DenseMatrix::companion(&"x^6+x^5+x^4+x^3+x^2+x+1".parse().unwrap());
    assert_eq!(probable_order(&c, &[1, 0, 0, 0, 0, 0], 100).unwrap(), 7);
    assert_eq!(probable_order(&c, &[1, 0, 0, 0, 0, 0], 3), Err(FormulaError::BoundExceeded(3)));
}

fn seven_cycle_and_centraliser() -> impl Strategy<Value = (Perm, Perm)> {
    (common::perm(9), 0i64..7, common::perm(2)).prop_map(|(r, k, tail)| {
        let i = Perm::from_cycles(9, &[&[0, 1, 2, 3, 4, 5, 6]]).unwrap();
        let mut images: Vec<usize> = (0..9).collect();
        images[7] = 7 + tail.image(0);
        images[8] = 7 + tail.image(1);
        let c = Perm::from_images(images).unwrap().op(&i.pow(k));
        (i.conjugate_by(&r), c.conjugate_by(&r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn commuting_inputs_are_fixed((i, x) in seven_cycle_and_centraliser()) {
        prop_assert!(i.commutes_with(&x));
        let lifted = lift_formula(&LiftSpec::new(i.clone(), x.clone())).unwrap();
        prop_assert_eq!(&lifted, &x);
        prop_assert!(lifted.commutes_with(&i));
    }

    #[test]
    fn any_returned_lift_centralises(i in common::perm(7), x in common::perm(7)) {
        if let Ok(lifted) = lift_formula(&LiftSpec::new(i.clone(), x)) {
            prop_assert!(lifted.commutes_with(&i));
        }
    }
}
