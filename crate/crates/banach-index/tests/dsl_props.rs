//! Property tests for the expression language: text round-trips, normalizer
//! idempotence, bidual involution on reflexive subtrees, predual recovery.

use banach_index::dsl::{
    canonical_predual, normalize, parse, structurally_reflexive, AtomKind, SpaceExpr,
};
use proptest::prelude::*;

fn pval() -> impl Strategy<Value = f64> {
    prop_oneof![
        4 => prop_oneof![
            Just(1.0),
            Just(1.5),
            Just(2.0),
            Just(3.0),
            Just(4.0),
            Just(f64::INFINITY)
        ],
        1 => 1.0f64..16.0,
    ]
}

fn finite_pval() -> impl Strategy<Value = f64> {
    prop_oneof![
        4 => prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), Just(4.0)],
        1 => 1.0f64..16.0,
    ]
}

fn rval() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.5), Just(2.0), Just(3.0), Just(10.0), 1.01f64..50.0]
}

fn atom() -> impl Strategy<Value = SpaceExpr> {
    prop_oneof![
        pval().prop_map(|p| SpaceExpr::Atom(AtomKind::Lp(p))),
        Just(SpaceExpr::Atom(AtomKind::C0)),
        pval().prop_map(|p| SpaceExpr::Atom(AtomKind::Lp01(p))),
        Just(SpaceExpr::Atom(AtomKind::C01)),
        Just(SpaceExpr::Atom(AtomKind::CKsplit)),
        rval().prop_map(|r| SpaceExpr::Atom(AtomKind::Xr(r))),
        Just(SpaceExpr::Atom(AtomKind::Gurarii)),
        Just(SpaceExpr::Atom(AtomKind::Reals)),
        (1u32..6u32).prop_map(|n| SpaceExpr::Atom(AtomKind::FiniteDim(n))),
        Just(SpaceExpr::Atom(AtomKind::ReflexiveGeneric)),
    ]
}

fn expr() -> impl Strategy<Value = SpaceExpr> {
    atom().prop_recursive(4, 48, 3, |inner| {
        prop_oneof![
            (pval(), inner.clone(), inner.clone())
                .prop_map(|(p, l, r)| SpaceExpr::sum_p(p, l, r)),
            prop::collection::vec(inner.clone(), 1..4).prop_map(SpaceExpr::C0Sum),
            (finite_pval(), prop::collection::vec(inner.clone(), 1..4))
                .prop_map(|(p, family)| SpaceExpr::LpSum { p, family }),
            inner.prop_map(SpaceExpr::dual),
        ]
    })
}

/// Every dual node remaining after normalization must be irreducible: its
/// inner expression has no representable dual rewrite.
fn duals_are_irreducible(e: &SpaceExpr) -> bool {
    match e {
        SpaceExpr::Atom(_) => true,
        SpaceExpr::SumP { left, right, .. } => {
            duals_are_irreducible(left) && duals_are_irreducible(right)
        }
        SpaceExpr::C0Sum(f) | SpaceExpr::LpSum { family: f, .. } => {
            f.iter().all(duals_are_irreducible)
        }
        SpaceExpr::Dual(inner) => {
            let inner_ok = match &**inner {
                SpaceExpr::Atom(a) => matches!(
                    a,
                    AtomKind::Lp(p) if p.is_infinite()
                ) || matches!(
                    a,
                    AtomKind::Lp01(_)
                        | AtomKind::C01
                        | AtomKind::CKsplit
                        | AtomKind::Xr(_)
                        | AtomKind::Gurarii
                        | AtomKind::ReflexiveGeneric
                ),
                SpaceExpr::LpSum { p, .. } => *p == 1.0,
                SpaceExpr::Dual(x) => !structurally_reflexive(x),
                _ => false,
            };
            inner_ok && duals_are_irreducible(inner)
        }
    }
}

proptest! {
    #[test]
    fn parse_format_round_trip(e in expr()) {
        let text = e.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn normalize_is_idempotent(e in expr()) {
        let once = normalize(&e);
        let twice = normalize(&once);
        prop_assert_eq!(&twice, &once, "input {}", e);
    }

    #[test]
    fn bidual_is_identity_on_reflexive(e in expr()) {
        if structurally_reflexive(&e) {
            let collapsed = normalize(&SpaceExpr::dual(SpaceExpr::dual(e.clone())));
            prop_assert_eq!(collapsed, normalize(&e));
        }
    }

    #[test]
    fn normalize_preserves_reflexivity(e in expr()) {
        prop_assert_eq!(
            structurally_reflexive(&normalize(&e)),
            structurally_reflexive(&e)
        );
    }

    #[test]
    fn normalized_duals_are_irreducible(e in expr()) {
        prop_assert!(duals_are_irreducible(&normalize(&e)));
    }

    #[test]
    fn rewritten_duals_have_recoverable_preduals(e in expr()) {
        let d = normalize(&SpaceExpr::dual(e));
        prop_assert!(canonical_predual(&d).is_some());
    }

    #[test]
    fn parser_total_on_junk(s in "[a-zA-Z0-9(),. ]{0,40}") {
        let _ = parse(&s);
    }
}
