//! Property tests for exact arithmetic and polynomial algebra.

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use psmaps_core::{GRat, HermPoly, Var};

const N: usize = 2;

fn grat() -> impl Strategy<Value = GRat> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4).prop_map(|(a, b, c, d)| GRat::from_fracs(a, b, c, d))
}

fn poly() -> impl Strategy<Value = HermPoly> {
    prop::collection::vec((prop::collection::vec(0u32..3, 2 * N + 2), grat()), 0..5)
        .prop_map(|terms| HermPoly::from_terms(N, terms))
}

fn point() -> impl Strategy<Value = (Vec<GRat>, GRat)> {
    (prop::collection::vec(grat(), N), grat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in grat(), b in grat(), c in grat()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), GRat::one());
        }
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &a.conj()).re, a.norm_sqr());
        prop_assert!(a.norm_sqr() >= BigRational::zero());
    }

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &HermPoly::one(N), a.clone());
        prop_assert_eq!(&a + &HermPoly::zero(N), a);
    }

    #[test]
    fn bar_swap_is_a_conjugate_linear_involutive_homomorphism(a in poly(), b in poly(), c in grat()) {
        prop_assert_eq!(a.bar_swap().bar_swap(), a.clone());
        prop_assert_eq!((&a * &b).bar_swap(), &a.bar_swap() * &b.bar_swap());
        prop_assert_eq!((&a + &b).bar_swap(), &a.bar_swap() + &b.bar_swap());
        prop_assert_eq!(a.scale(&c).bar_swap(), a.bar_swap().scale(&c.conj()));
    }

    #[test]
    fn symmetric_part_is_real_on_the_real_slice(a in poly(), (z, w) in point()) {
        let sym = &a + &a.bar_swap();
        let mut pt: Vec<GRat> = z.clone();
        pt.extend(z.iter().map(GRat::conj));
        pt.push(w.clone());
        pt.push(w.conj());
        prop_assert!(sym.eval_exact(&pt).is_real());
    }

    #[test]
    fn text_round_trip(a in poly()) {
        prop_assert_eq!(HermPoly::parse(N, &a.to_string()).unwrap(), a);
    }

    #[test]
    fn substitution_is_a_homomorphism(a in poly(), b in poly(), s in poly()) {
        let s = s.filter_terms(|e| e[2 * N] == 0);
        let lhs = (&a * &b).substitute_w(&s).unwrap();
        let rhs = &a.substitute_w(&s).unwrap() * &b.substitute_w(&s).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn substitution_hand_expansion() {
    // 1 - r w with w <- tau + 2i z^2 chi^2, r = 3/2.
    let n = 1;
    let r = GRat::from_fracs(3, 2, 0, 1);
    let p = &HermPoly::one(n) - &HermPoly::var(n, Var::W).scale(&r);
    let q = HermPoly::parse(n, "tau + (0+2*i)*z1^2*chi1^2").unwrap();
    let expected = HermPoly::parse(n, "1 + (-3/2+0*i)*tau + (0-3*i)*z1^2*chi1^2").unwrap();
    assert_eq!(p.substitute_w(&q).unwrap(), expected);
    assert!(HermPoly::var(n, Var::W).substitute_w(&HermPoly::var(n, Var::W)).is_err());
}

#[test]
fn exact_zero_test_has_no_tolerance() {
    let tiny = GRat::real(BigRational::new(1.into(), 1_000_000_000.into()));
    assert!(!HermPoly::var(1, Var::Z(0)).scale(&tiny).is_zero());
    let z = HermPoly::var(1, Var::Z(0));
    assert!((&z - &z).is_zero());
}
