use matfact::action::{Character, GroupAction};
use matfact::{Field, Monomial, Polynomial};
use proptest::prelude::*;

fn poly_strategy(nvars: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0u32..4, nvars), -5i64..=5), 0..6).prop_map(move |terms| {
        let mut p = Polynomial::zero(nvars, Field::Rational);
        for (e, c) in terms {
            let t = Polynomial::term(Monomial::new(e), Field::Rational.from_i64(c));
            p = &p + &t;
        }
        p
    })
}

proptest! {
    #[test]
    fn ring_axioms(a in poly_strategy(2), b in poly_strategy(2), c in poly_strategy(2)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn display_parses_back(a in poly_strategy(3)) {
        let back = Polynomial::parse(&a.to_string(), 3, Field::Rational).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn prime_field_is_a_ring_map(a in poly_strategy(2), b in poly_strategy(2)) {
        let f = Field::prime(7).unwrap();
        let prod = (&a * &b).change_field(f).unwrap();
        prop_assert_eq!(prod, &a.change_field(f).unwrap() * &b.change_field(f).unwrap());
    }

    /// `h . (g . f) = (hg) . f` as twisted polynomials.
    #[test]
    fn action_cocycle(a in poly_strategy(2), g in 0u64..12, h in 0u64..12) {
        let act = GroupAction::new(vec![3, 4], vec![vec![1, 2], vec![3, 1]], 2).unwrap();
        let g = Character(vec![g % 3, g % 4]);
        let h = Character(vec![h % 3, h % 4]);
        let lhs = act.act_twisted(&h, &act.act(&g, &a));
        let rhs = act.act(&act.add(&h, &g), &a);
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn sign_action_on_monomials() {
    let act = GroupAction::cyclic(2, vec![1, 1]).unwrap();
    let x = Polynomial::parse("x1", 2, Field::Rational).unwrap();
    let q = Polynomial::parse("x1^2 + x1*x2", 2, Field::Rational).unwrap();
    assert!(!act.is_invariant(&x));
    assert!(act.is_invariant(&q));
    assert_eq!(act.polynomial_character(&x), Some(Character(vec![1])));
}

#[test]
fn parse_errors_carry_columns() {
    match Polynomial::parse("x1 + * x2", 2, Field::Rational) {
        Err(matfact::Error::Parse { column, .. }) => assert_eq!(column, 6),
        other => panic!("{other:?}"),
    }
}
