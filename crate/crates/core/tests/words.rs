mod common;

use amalgamkit::actions::Perm;
use amalgamkit::fields::Field;
use amalgamkit::group::GroupElement;
use amalgamkit::linalg::DenseMatrix;
use amalgamkit::scenarios::shipped_script;
use amalgamkit::words::{parse_word, run_script, ElementScript, Env, TagFilter, Word, WordError};
use proptest::prelude::*;

const AB: &[&str] = &["a", "b"];

fn matrix_env() -> impl Strategy<Value = Env<DenseMatrix>> {
    (2usize..=6)
        .prop_flat_map(|n| (common::invertible(2, n), common::invertible(2, n)))
        .prop_map(|(a, b)| Env::from_pairs([("a", a), ("b", b)]))
}

#[test]
fn conjugation_is_h_inverse_g_h() {
    let g = Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap();
    let h = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
    let env = Env::from_pairs([("g", g.clone()), ("h", h.clone())]);
    let x = env.eval_str("g^(h)").unwrap();
    assert_eq!(x, h.inverse().op(&g).op(&h));
    assert_eq!(x, Perm::from_cycles(3, &[&[0, 2, 1]]).unwrap());
}

#[test]
fn identity_generator_evaluates_to_identity() {
    let env = Env::from_pairs([("a", DenseMatrix::identity(Field::gf2(), 4))]);
    assert!(env.eval_str("a").unwrap().is_identity_matrix());
    assert!(matches!(env.eval_str("b"), Err(WordError::UnboundName(_))));
}

#[test]
fn exponent_binds_to_the_preceding_atom() {
    assert_eq!(parse_word("ab^2").unwrap(), Word::product(vec![Word::gen("a"), Word::gen("b").pow(2)]));
    assert_eq!(parse_word("(ab)^34").unwrap(), Word::product(vec![Word::gen("a"), Word::gen("b")]).pow(34));
    assert!(parse_word("").is_err());
    assert!(parse_word("(ab").is_err());
}

#[test]
fn shipped_script_prints_and_parses_back() {
    let script = shipped_script();
    let again = ElementScript::parse(&script.to_string()).unwrap();
    let strip = |s: &ElementScript| s.entries().iter().map(|e| (e.name.clone(), e.word.clone(), e.tag, e.expected_order)).collect::<Vec<_>>();
    assert_eq!(strip(&again), strip(&script));
    for e in script.entries() {
        assert_eq!(parse_word(&e.word.to_string()).unwrap(), e.word);
    }
    assert_eq!(script.inputs(TagFilter::Co1Exact), ["a", "b"]);
}

#[test]
fn empty_script_leaves_env_unchanged() {
    let env = Env::from_pairs([("a", Perm::identity(3))]);
    let (out, reports) = run_script(&ElementScript::parse("").unwrap(), &env, TagFilter::All).unwrap();
    assert_eq!(out.len(), 1);
    assert!(reports.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn evaluation_is_a_homomorphism(env in matrix_env(), u in common::word(AB), v in common::word(AB)) {
        let uv = Word::product(vec![u.clone(), v.clone()]);
        let (eu, ev) = (env.eval(&u).unwrap(), env.eval(&v).unwrap());
        prop_assert_eq!(env.eval(&uv).unwrap(), eu.op(&ev));
        prop_assert_eq!(env.eval(&u.clone().conj(v.clone())).unwrap(), eu.conjugate_by(&ev));
    }

    #[test]
    fn words_print_and_parse_back(w in common::word(AB)) {
        prop_assert_eq!(parse_word(&w.to_string()).unwrap(), w);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inverse_words_cancel(env in matrix_env(), w in common::word(AB)) {
        let x = env.eval(&w.clone().pow(-1)).unwrap().op(&env.eval(&w).unwrap());
        prop_assert!(x.is_identity());
    }

    #[test]
    fn permutation_and_matrix_evaluations_agree(a in common::perm(6), b in common::perm(6), w in common::word(AB)) {
        let as_matrix = |p: &Perm| DenseMatrix::permutation(Field::gf2(), &p.images());
        let perms = Env::from_pairs([("a", a.clone()), ("b", b.clone())]);
        let mats = Env::from_pairs([("a", as_matrix(&a)), ("b", as_matrix(&b))]);
        prop_assert_eq!(as_matrix(&perms.eval(&w).unwrap()), mats.eval(&w).unwrap());
    }
}
