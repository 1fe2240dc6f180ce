//! Canonicalization: duality rewrites, bidual collapse, child ordering.

use super::{AtomKind, SpaceExpr};

/// Conjugate exponent: 1 ↔ ∞, otherwise p/(p-1).
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Structural reflexivity of the space an expression denotes.
///
/// Sums of two spaces are reflexive iff both summands are; a cycled c₀-sum is
/// never reflexive; a cycled ℓ_p-sum is reflexive iff 1 < p < ∞ and every
/// member is; duality preserves reflexivity.
pub fn structurally_reflexive(e: &SpaceExpr) -> bool {
    match e {
        SpaceExpr::Atom(a) => match a {
            AtomKind::Lp(p) | AtomKind::Lp01(p) => *p > 1.0 && p.is_finite(),
            AtomKind::Reals | AtomKind::FiniteDim(_) | AtomKind::ReflexiveGeneric => true,
            _ => false,
        },
        SpaceExpr::SumP { left, right, .. } => {
            structurally_reflexive(left) && structurally_reflexive(right)
        }
        SpaceExpr::C0Sum(_) => false,
        SpaceExpr::LpSum { p, family } => {
            *p > 1.0 && family.iter().all(structurally_reflexive)
        }
        SpaceExpr::Dual(inner) => structurally_reflexive(inner),
    }
}

/// Rewrite the normalized form: eliminate every dual node with a known
/// rewrite, collapse biduals of reflexive subexpressions, and order the
/// children of symmetric constructors canonically. Idempotent.
pub fn normalize(e: &SpaceExpr) -> SpaceExpr {
    match e {
        SpaceExpr::Atom(_) => e.clone(),
        SpaceExpr::SumP { p, left, right } => {
            let mut l = normalize(left);
            let mut r = normalize(right);
            if l > r {
                std::mem::swap(&mut l, &mut r);
            }
            SpaceExpr::sum_p(*p, l, r)
        }
        SpaceExpr::C0Sum(family) => {
            let mut f: Vec<_> = family.iter().map(normalize).collect();
            f.sort();
            SpaceExpr::C0Sum(f)
        }
        SpaceExpr::LpSum { p, family } => {
            let mut f: Vec<_> = family.iter().map(normalize).collect();
            f.sort();
            SpaceExpr::LpSum { p: *p, family: f }
        }
        SpaceExpr::Dual(inner) => {
            // Collapse X** -> X for reflexive X before any conjugate-exponent
            // arithmetic can perturb X's parameters.
            if let SpaceExpr::Dual(x) = &**inner {
                if structurally_reflexive(x) {
                    return normalize(x);
                }
            }
            let ni = normalize(inner);
            match dual_rewrite_step(&ni) {
                Some(rw) => normalize(&rw),
                None => SpaceExpr::dual(ni),
            }
        }
    }
}

/// One dual-elimination step on a normalized inner expression, if its dual
/// has a representable form.
fn dual_rewrite_step(inner: &SpaceExpr) -> Option<SpaceExpr> {
    match inner {
        SpaceExpr::Atom(a) => match a {
            AtomKind::Lp(p) if p.is_finite() => Some(SpaceExpr::Atom(AtomKind::Lp(conjugate(*p)))),
            AtomKind::C0 => Some(SpaceExpr::Atom(AtomKind::Lp(1.0))),
            // Dual of an n-dimensional space is n-dimensional; the scalar
            // field is self-dual.
            AtomKind::Reals => Some(SpaceExpr::Atom(AtomKind::Reals)),
            AtomKind::FiniteDim(n) => Some(SpaceExpr::Atom(AtomKind::FiniteDim(*n))),
            _ => None,
        },
        SpaceExpr::SumP { p, left, right } => Some(SpaceExpr::sum_p(
            conjugate(*p),
            SpaceExpr::dual((**left).clone()),
            SpaceExpr::dual((**right).clone()),
        )),
        SpaceExpr::C0Sum(family) => Some(SpaceExpr::LpSum {
            p: 1.0,
            family: family
                .iter()
                .map(|m| SpaceExpr::dual(m.clone()))
                .collect(),
        }),
        // The dual of an ℓ_1-sum is an ℓ_∞-sum, which the language does not
        // represent; only 1 < p < ∞ rewrites.
        SpaceExpr::LpSum { p, family } if *p > 1.0 => Some(SpaceExpr::LpSum {
            p: conjugate(*p),
            family: family
                .iter()
                .map(|m| SpaceExpr::dual(m.clone()))
                .collect(),
        }),
        SpaceExpr::LpSum { .. } => None,
        SpaceExpr::Dual(x) if structurally_reflexive(x) => Some((**x).clone()),
        SpaceExpr::Dual(_) => None,
    }
}

/// Recover the canonical predual of a normalized expression, when the
/// expression's shape marks it as a dual space with a representable predual.
///
/// For any expression `m`, `canonical_predual(normalize(dual(m)))` is `Some`,
/// which is what lets dual-transfer reasoning fire on rewritten duals.
pub fn canonical_predual(e: &SpaceExpr) -> Option<SpaceExpr> {
    match e {
        SpaceExpr::Atom(a) => match a {
            AtomKind::Lp(p) if *p == 1.0 => Some(SpaceExpr::Atom(AtomKind::C0)),
            AtomKind::Lp(p) => Some(SpaceExpr::Atom(AtomKind::Lp(conjugate(*p)))),
            // L_p[0,1] = (L_q[0,1])* for 1 < p < ∞ and L_1 = (L_∞-predual?);
            // only the reflexive range has a canonical predual here.
            AtomKind::Lp01(p) if *p > 1.0 && p.is_finite() => {
                Some(SpaceExpr::Atom(AtomKind::Lp01(conjugate(*p))))
            }
            AtomKind::Reals => Some(SpaceExpr::Atom(AtomKind::Reals)),
            AtomKind::FiniteDim(n) => Some(SpaceExpr::Atom(AtomKind::FiniteDim(*n))),
            // A reflexive space is the dual of its own dual.
            AtomKind::ReflexiveGeneric => Some(SpaceExpr::dual(SpaceExpr::Atom(
                AtomKind::ReflexiveGeneric,
            ))),
            _ => None,
        },
        SpaceExpr::SumP { p, left, right } => {
            let l = canonical_predual(left)?;
            let r = canonical_predual(right)?;
            Some(SpaceExpr::sum_p(conjugate(*p), l, r))
        }
        SpaceExpr::C0Sum(_) => None,
        SpaceExpr::LpSum { p, family } => {
            let pre: Option<Vec<_>> = family.iter().map(canonical_predual).collect();
            let pre = pre?;
            if *p == 1.0 {
                Some(SpaceExpr::C0Sum(pre))
            } else {
                Some(SpaceExpr::LpSum {
                    p: conjugate(*p),
                    family: pre,
                })
            }
        }
        // A surviving dual node is literally the dual of its inner expression.
        SpaceExpr::Dual(x) => Some((**x).clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::AtomKind::*;
    use crate::dsl::{parse, SpaceExpr::*};

    fn n(text: &str) -> SpaceExpr {
        normalize(&parse(text).unwrap())
    }

    #[test]
    fn textbook_dual_rewrites() {
        assert_eq!(n("dual(c0)"), Atom(Lp(1.0)));
        assert_eq!(n("dual(l(1))"), Atom(Lp(f64::INFINITY)));
        assert_eq!(n("dual(l(2))"), Atom(Lp(2.0)));
        assert_eq!(n("dual(sum(2, l(1), l(1)))"), n("sum(2, l(inf), l(inf))"));
        assert_eq!(n("dual(c0sum(l(2)))"), n("lpsum(1, l(2))"));
        assert_eq!(n("dual(lpsum(3, l(2)))"), n("lpsum(1.5, l(2))"));
        assert_eq!(n("dual(reals)"), Atom(Reals));
    }

    #[test]
    fn irreducible_duals_survive() {
        for text in [
            "dual(xr(2))",
            "dual(gurarii)",
            "dual(cksplit)",
            "dual(c01)",
            "dual(L(2))",
            "dual(reflexive)",
            "dual(l(inf))",
            "dual(lpsum(1, l(2)))",
        ] {
            assert!(matches!(n(text), Dual(_)), "{text} should stay a dual");
        }
    }

    #[test]
    fn bidual_collapses_exactly_on_reflexive_inner() {
        assert_eq!(n("dual(dual(l(3)))"), Atom(Lp(3.0)));
        assert_eq!(n("dual(dual(L(4)))"), Atom(Lp01(4.0)));
        assert_eq!(n("dual(dual(reflexive))"), Atom(ReflexiveGeneric));
        // Non-reflexive inner: rewrite proceeds through the inner dual.
        assert_eq!(n("dual(dual(c0))"), Atom(Lp(f64::INFINITY)));
        assert_eq!(n("dual(dual(l(1)))"), n("dual(l(inf))"));
        assert!(matches!(n("dual(dual(xr(2)))"), Dual(_)));
    }

    #[test]
    fn canonical_ordering_sorts_symmetric_children() {
        assert_eq!(n("sum(2, c0, l(5))"), n("sum(2, l(5), c0)"));
        assert_eq!(n("c0sum(c01, l(2), l(1.5))"), n("c0sum(l(1.5), l(2), c01)"));
    }

    #[test]
    fn idempotent_on_samples() {
        for text in [
            "dual(dual(dual(xr(2))))",
            "dual(c0sum(l(2), xr(3), dual(l(4))))",
            "sum(inf, dual(sum(1, c0, l(1))), lpsum(2, reflexive, findim(2)))",
            "dual(lpsum(1, c0, reals))",
        ] {
            let once = n(text);
            assert_eq!(normalize(&once), once, "normalize not idempotent on {text}");
        }
    }

    #[test]
    fn predual_inverts_dual_rewrites() {
        for text in [
            "c0", "l(1)", "l(2)", "l(inf)", "L(1)", "L(3)", "c01", "cksplit", "xr(2)",
            "gurarii", "reflexive", "reals", "findim(4)", "sum(2, l(1), c0)",
            "sum(inf, c0, reals)", "c0sum(l(2), xr(2))", "lpsum(1, c0, c01)",
            "lpsum(2, l(2), reflexive)", "dual(xr(2))",
        ] {
            let m = parse(text).unwrap();
            let d = normalize(&SpaceExpr::dual(m));
            let p = canonical_predual(&d)
                .unwrap_or_else(|| panic!("no predual recovered for dual({text}) = {d}"));
            assert_eq!(
                normalize(&SpaceExpr::dual(p.clone())),
                d,
                "dual(predual) does not reproduce dual({text})"
            );
        }
        // A collapsed bidual of L_p[0,1] still has a recoverable predual even
        // though that predual's dual is an irreducible dual node.
        let d = n("dual(dual(L(2)))");
        assert_eq!(d, Atom(Lp01(2.0)));
        assert_eq!(canonical_predual(&d), Some(Atom(Lp01(2.0))));
    }

    #[test]
    fn reflexivity_is_preserved_by_normalize() {
        for text in [
            "dual(l(2))",
            "dual(c0)",
            "dual(dual(l(1)))",
            "sum(3, dual(l(4)), reflexive)",
            "c0sum(l(2))",
            "lpsum(2, l(3), l(4))",
            "lpsum(1, reals)",
        ] {
            let e = parse(text).unwrap();
            assert_eq!(
                structurally_reflexive(&normalize(&e)),
                structurally_reflexive(&e),
                "reflexivity changed on {text}"
            );
        }
    }
}
