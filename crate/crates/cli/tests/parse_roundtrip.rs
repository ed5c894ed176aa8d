use gm_exponents::rational::rat;
use gm_exponents::ring::{Monomial, RingElement};
use gm_exponents_cli::parse::{parse_poly, parse_upoly};
use gm_exponents::upoly::UPoly;
use proptest::prelude::*;

fn element(n: usize) -> impl Strategy<Value = RingElement> {
    let term = (
        -4i64..=4,
        proptest::collection::vec(0u32..=3, n),
        0u32..=2,
        -20i64..=20,
        1i64..=9,
    );
    proptest::collection::vec(term, 0..6).prop_map(move |terms| {
        RingElement::from_terms(
            n,
            terms
                .into_iter()
                .map(|(t, x, g, a, b)| (Monomial::new(t, x, g), rat(a, b))),
        )
    })
}

proptest! {
    #[test]
    fn serialized_elements_parse_back((n, e) in (1usize..=3).prop_flat_map(|n| (Just(n), element(n)))) {
        prop_assert_eq!(parse_poly(&e.to_string(), n).unwrap(), e);
    }

    #[test]
    #[test]
    fn roundtrip_euler_polynomials(coeffs in proptest::collection::vec((-9i64..=9, 1i64..=5), 0..6)) {
        let p = UPoly::new(coeffs.into_iter().map(|(a, b)| rat(a, b)).collect());
        prop_assert_eq!(parse_upoly(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn whitespace_is_ignored(e in element(2)) {
        let padded = e.to_string().replace('*', " * ").replace('^', " ^ ");
        prop_assert_eq!(parse_poly(&padded, 2).unwrap(), e);
    }
}

#[test]
fn spec_shaped_examples() {
    let e = parse_poly("x1*x2*(1-x1-x2)", 2).unwrap();
    let expect = parse_poly("x1*x2 - x1^2*x2 - x1*x2^2", 2).unwrap();
    assert_eq!(e, expect);
    let e = parse_poly("3/2*t^-1*x1^2*x2*ginv^1 - x1^2*x2*ginv", 2).unwrap();
    assert_eq!(e.to_string(), "3/2*t^-1*x1^2*x2*ginv^1 - x1^2*x2*ginv^1");
}
