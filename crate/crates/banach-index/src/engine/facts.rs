//! Tabulated index values and structural flags for atomic spaces.

use crate::dsl::AtomKind;

use super::interval::{IndexInterval, Intervals, Quantity};
use super::report::{BoundKind, Derivation, StructFlags, TriBool};

fn exact(q: Quantity, v: f64, citation: &str) -> Derivation {
    Derivation {
        quantity: q,
        bound: BoundKind::Exact,
        value: v,
        rule_id: "base".to_owned(),
        citation: citation.to_owned(),
        premises: Vec::new(),
    }
}

/// Known exact values for an atom: the starting intervals plus one derivation
/// record per tabulated value. Quantities without a tabulated value start at
/// the uninformative [1,2].
pub(super) fn atom_base(kind: &AtomKind) -> (Intervals, Vec<Derivation>) {
    use Quantity::*;
    let mut iv = Intervals::all_full();
    let mut ds = Vec::new();
    let set = |iv: &mut Intervals, ds: &mut Vec<Derivation>, q: Quantity, v: f64, cite: &str| {
        iv[q] = IndexInterval::exact(v);
        ds.push(exact(q, v, cite));
    };
    match kind {
        AtomKind::Lp(p) if p.is_finite() => {
            let v = 2f64.powf(1.0 / p);
            set(&mut iv, &mut ds, BigT, v, "Whitley");
            set(&mut iv, &mut ds, SmallT, v, "Whitley");
        }
        AtomKind::Lp(_) => {
            set(&mut iv, &mut ds, BigT, 1.0, "Whitley");
            set(&mut iv, &mut ds, SmallT, 2.0, "Whitley");
        }
        AtomKind::C0 => {
            set(&mut iv, &mut ds, BigT, 1.0, "Whitley");
            set(&mut iv, &mut ds, SmallT, 1.0, "Whitley");
        }
        AtomKind::Lp01(p) if p.is_finite() => {
            let v = 2f64.powf(1.0 / p);
            set(&mut iv, &mut ds, BigT, v, "BJ; CPS");
            set(&mut iv, &mut ds, SmallT, v, "BSP; MP; Haller");
        }
        AtomKind::Lp01(_) | AtomKind::C01 => {
            set(&mut iv, &mut ds, BigT, 2.0, "Whitley");
            set(&mut iv, &mut ds, SmallT, 2.0, "Whitley");
        }
        AtomKind::CKsplit => {
            set(&mut iv, &mut ds, BigT, 1.0, "Papini, Example 2");
            set(&mut iv, &mut ds, SmallT, 2.0, "Papini, Example 2");
            set(&mut iv, &mut ds, Mu1, 1.5, "Papini, Example 2");
            set(&mut iv, &mut ds, Mu2, 1.5, "Papini, Example 2");
        }
        AtomKind::Xr(r) => {
            set(&mut iv, &mut ds, SmallT, 1.0 + 1.0 / r, "Proposition 3.6");
        }
        AtomKind::Gurarii => {
            set(&mut iv, &mut ds, BigT, 2.0, "Proposition 3.3");
            set(&mut iv, &mut ds, SmallT, 1.0, "Proposition 3.3");
        }
        AtomKind::Reals | AtomKind::FiniteDim(_) => {
            set(&mut iv, &mut ds, BigT, 1.0, "Section 1");
            set(&mut iv, &mut ds, SmallT, 2.0, "Section 1");
        }
        AtomKind::ReflexiveGeneric => {}
    }
    (iv, ds)
}

/// Structural flags for an atom. `almost_square` and `octahedral` are filled
/// in from the final intervals after analysis, so they start unknown here.
pub(super) fn atom_flags(kind: &AtomKind) -> StructFlags {
    use TriBool::*;
    let infinite_dim = !matches!(kind, AtomKind::Reals | AtomKind::FiniteDim(_));
    let reflexive = match kind {
        AtomKind::Lp(p) | AtomKind::Lp01(p) => TriBool::from_bool(p.is_finite() && *p > 1.0),
        AtomKind::Reals | AtomKind::FiniteDim(_) | AtomKind::ReflexiveGeneric => Yes,
        _ => No,
    };
    let lindenstrauss = match kind {
        AtomKind::C0 | AtomKind::C01 | AtomKind::Gurarii | AtomKind::Xr(_) | AtomKind::Reals => Yes,
        AtomKind::Lp(p) | AtomKind::Lp01(p) => {
            if p.is_finite() {
                No
            } else {
                Yes
            }
        }
        AtomKind::ReflexiveGeneric => No,
        AtomKind::CKsplit | AtomKind::FiniteDim(_) => Unknown,
    };
    let has_extreme_points = match kind {
        AtomKind::Lp(_) | AtomKind::C01 | AtomKind::CKsplit => Yes,
        AtomKind::Lp01(p) => {
            if *p > 1.0 {
                Yes
            } else {
                No
            }
        }
        AtomKind::Reals | AtomKind::FiniteDim(_) | AtomKind::ReflexiveGeneric => Yes,
        AtomKind::C0 | AtomKind::Gurarii => No,
        AtomKind::Xr(_) => Unknown,
    };
    StructFlags {
        infinite_dim,
        reflexive,
        lindenstrauss,
        has_extreme_points,
        almost_square: Unknown,
        octahedral: Unknown,
    }
}
