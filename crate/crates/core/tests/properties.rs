use gm_exponents::koszul::window_estimate;
use gm_exponents::linalg::SparseMatrixQ;
use gm_exponents::operators::{apply, phi_inverse, OperatorSpec};
use gm_exponents::rational::{int, is_integer, rat};
use gm_exponents::reduction::scale_exponents;
use gm_exponents::ring::{Monomial, RingElement};
use gm_exponents::upoly::UPoly;
use gm_exponents::{EngineOptions, ExecMode, ProblemInstance, Rational, SolverPath, WindowSchedule};
use proptest::prelude::*;

const N: usize = 2;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| rat(a, b))
}

fn element(max_gpow: u32) -> impl Strategy<Value = RingElement> {
    let term = (-2i64..=2, 0u32..=2, 0u32..=2, 0..=max_gpow, small_rat());
    prop::collection::vec(term, 0..5).prop_map(|terms| {
        RingElement::from_terms(
            N,
            terms.into_iter().map(|(t, a, b, g, c)| (Monomial::new(t, vec![a, b], g), c)),
        )
    })
}

fn g() -> RingElement {
    // 1 + x1 x2
    RingElement::one(N).checked_add(&RingElement::var(N, 0).checked_mul(&RingElement::var(N, 1)).unwrap()).unwrap()
}

/// Equality in the localized ring, up to rewriting over a common power of g.
fn same(a: &RingElement, b: &RingElement) -> bool {
    a.checked_sub(b).unwrap().clear_g(&g()).unwrap().is_zero()
}

fn matrix() -> impl Strategy<Value = SparseMatrixQ> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..=3], c), r).prop_map(
            |rows| {
                let rows: Vec<Vec<Rational>> = rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect();
                SparseMatrixQ::from_dense(&rows).unwrap()
            },
        )
    })
}

proptest! {
    #[test]
    fn ring_axioms(a in element(2), b in element(2), c in element(1)) {
        prop_assert!(same(&a.checked_mul(&b).unwrap(), &b.checked_mul(&a).unwrap()));
        let ab_c = a.checked_mul(&b).unwrap().checked_mul(&c).unwrap();
        let a_bc = a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap();
        prop_assert!(same(&ab_c, &a_bc));
        let lhs = a.checked_mul(&b.checked_add(&c).unwrap()).unwrap();
        let rhs = a.checked_mul(&b).unwrap().checked_add(&a.checked_mul(&c).unwrap()).unwrap();
        prop_assert!(same(&lhs, &rhs));
        prop_assert!(a.checked_sub(&a).unwrap().is_zero());
    }

    #[test]
    fn leibniz_rule(a in element(2), b in element(2), i in 0usize..N) {
        let g = g();
        let lhs = a.checked_mul(&b).unwrap().partial_x(i, &g).unwrap();
        let rhs = a.partial_x(i, &g).unwrap().checked_mul(&b).unwrap()
            .checked_add(&a.checked_mul(&b.partial_x(i, &g).unwrap()).unwrap()).unwrap();
        prop_assert!(same(&lhs, &rhs));
        let lt = a.checked_mul(&b).unwrap().partial_t();
        let rt = a.partial_t().checked_mul(&b).unwrap().checked_add(&a.checked_mul(&b.partial_t()).unwrap()).unwrap();
        prop_assert_eq!(lt, rt);
    }

    #[test]
    fn phi_inverse_is_two_sided(e in element(1), c in small_rat()) {
        prop_assume!(!is_integer(&c));
        let inv = phi_inverse(&c, &e).unwrap();
        prop_assert_eq!(apply(&OperatorSpec::PhiC(c.clone()), &inv, &g()).unwrap(), e.clone());
        let back = apply(&OperatorSpec::PhiC(c.clone()), &e, &g()).unwrap();
        prop_assert_eq!(phi_inverse(&c, &back).unwrap(), e);
    }

    #[test]
    fn rank_equals_transpose_rank(a in matrix()) {
        prop_assert_eq!(a.rank(), a.transpose().rank());
        prop_assert!(a.rank() <= a.nrows().min(a.ncols()));
    }

    #[test]
    fn solve_returns_a_solution(a in matrix(), seed in prop::collection::vec(-3i64..=3, 6)) {
        let y: Vec<Rational> = seed[..a.ncols()].iter().map(|v| int(*v)).collect();
        let b = a.mul_vec(&y).unwrap();
        let x = a.solve(&b).unwrap().expect("b lies in the image");
        prop_assert_eq!(a.mul_vec(&x).unwrap(), b);
        // nullspace vectors are killed and their count matches rank-nullity
        let ns = a.nullspace();
        prop_assert_eq!(ns.len() + a.rank(), a.ncols());
        for v in &ns {
            prop_assert!(a.mul_vec(v).unwrap().iter().all(|c| c == &int(0)));
        }
    }

    #[test]
    fn scale_exponents_composes(exps in prop::collection::vec(small_rat(), 0..5), d1 in 1u32..5, d2 in 1u32..5) {
        let twice = scale_exponents(&scale_exponents(&exps, d1), d2);
        prop_assert_eq!(twice, scale_exponents(&exps, d1 * d2));
    }

    #[test]
    fn rational_roots_recovered(
        roots in prop::collection::btree_map((-20i64..=20, 1i64..=9).prop_map(|(a, b)| rat(a, b)), 1usize..=3, 0..4),
        lead in (1i64..=30).prop_map(int),
    ) {
        let roots: Vec<(Rational, usize)> = roots.into_iter().collect();
        // x^2 + 1 contributes no rational roots
        let p = UPoly::from_roots(&roots).mul(&UPoly::new(vec![int(1), int(0), int(1)])).scale(&lead);
        let (found, rest) = p.rational_roots();
        prop_assert_eq!(found, roots);
        prop_assert_eq!(rest, UPoly::new(vec![int(1), int(0), int(1)]).scale(&lead));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn parallel_matches_sequential(w in prop::collection::vec(1u32..=2, 2..=3), num in 1i64..6, den in 2i64..7) {
        use gm_exponents::arrangements::{lambda_poly, Arrangement};
        let a = Arrangement::new(w).unwrap();
        let p = ProblemInstance::new(lambda_poly(&a).unwrap(), RingElement::one(a.n()), rat(num, den)).unwrap();
        let win = WindowSchedule::default().windows(&p)[0];
        let run = |exec| {
            let o = EngineOptions { exec, ..Default::default() };
            (
                window_estimate(&p, &win, SolverPath::Generic, &o).unwrap(),
                window_estimate(&p, &win, SolverPath::PerDegree, &o).unwrap(),
            )
        };
        prop_assert_eq!(run(ExecMode::Parallel), run(ExecMode::Sequential));
        let items: Vec<i64> = (0..50).collect();
        let sq = |x: i64| x * x;
        prop_assert_eq!(ExecMode::Parallel.map(items.clone(), sq), ExecMode::Sequential.map(items, sq));
    }
}
