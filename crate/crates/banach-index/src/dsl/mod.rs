//! Expression language for Banach spaces: atoms, sum constructors, duality.
//!
//! Expressions are immutable trees with a total structural order (used for
//! canonical child ordering and as map keys) and a text form that round-trips
//! through [`parse`].

mod normalize;
mod parser;

pub use normalize::{canonical_predual, conjugate, normalize, structurally_reflexive};
pub use parser::{parse, ParseError};

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Leaf spaces of the expression language.
#[derive(Debug, Clone)]
pub enum AtomKind {
    /// Sequence space ℓ_p, 1 ≤ p ≤ ∞ (p = ∞ is the bounded-sequence space).
    Lp(f64),
    /// Null sequences under the sup norm.
    C0,
    /// Function space L_p[0,1], 1 ≤ p ≤ ∞.
    Lp01(f64),
    /// Continuous functions on [0,1].
    C01,
    /// C(K) for K a split compactum: an isolated point next to an interval.
    CKsplit,
    /// X_r = {f in C[0,1] : f(0) = r f(1)} with r > 1.
    Xr(f64),
    /// The Gurarii space.
    Gurarii,
    /// The scalar field.
    Reals,
    /// An n-dimensional normed space, norm left unspecified.
    FiniteDim(u32),
    /// A generic infinite-dimensional reflexive space.
    ReflexiveGeneric,
}

/// A Banach-space expression.
#[derive(Debug, Clone)]
pub enum SpaceExpr {
    Atom(AtomKind),
    /// Two-summand direct sum with the ℓ_p combination norm, 1 ≤ p ≤ ∞.
    SumP {
        p: f64,
        left: Box<SpaceExpr>,
        right: Box<SpaceExpr>,
    },
    /// c₀-sum of a countable family obtained by cycling the listed members.
    C0Sum(Vec<SpaceExpr>),
    /// ℓ_p-sum (p < ∞) of a countable family obtained by cycling the members.
    LpSum { p: f64, family: Vec<SpaceExpr> },
    Dual(Box<SpaceExpr>),
}

impl SpaceExpr {
    pub fn atom(kind: AtomKind) -> Self {
        SpaceExpr::Atom(kind)
    }

    pub fn sum_p(p: f64, left: SpaceExpr, right: SpaceExpr) -> Self {
        SpaceExpr::SumP {
            p,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn dual(inner: SpaceExpr) -> Self {
        SpaceExpr::Dual(Box::new(inner))
    }
}

fn atom_rank(a: &AtomKind) -> u8 {
    match a {
        AtomKind::Lp(_) => 0,
        AtomKind::C0 => 1,
        AtomKind::Lp01(_) => 2,
        AtomKind::C01 => 3,
        AtomKind::CKsplit => 4,
        AtomKind::Xr(_) => 5,
        AtomKind::Gurarii => 6,
        AtomKind::Reals => 7,
        AtomKind::FiniteDim(_) => 8,
        AtomKind::ReflexiveGeneric => 9,
    }
}

fn atom_cmp(a: &AtomKind, b: &AtomKind) -> Ordering {
    use AtomKind::*;
    atom_rank(a).cmp(&atom_rank(b)).then_with(|| match (a, b) {
        (Lp(x), Lp(y)) | (Lp01(x), Lp01(y)) | (Xr(x), Xr(y)) => x.total_cmp(y),
        (FiniteDim(n), FiniteDim(m)) => n.cmp(m),
        _ => Ordering::Equal,
    })
}

fn expr_rank(e: &SpaceExpr) -> u8 {
    match e {
        SpaceExpr::Atom(_) => 0,
        SpaceExpr::SumP { .. } => 1,
        SpaceExpr::C0Sum(_) => 2,
        SpaceExpr::LpSum { .. } => 3,
        SpaceExpr::Dual(_) => 4,
    }
}

/// Total structural order on expressions; numeric parameters compare by
/// `f64::total_cmp`, so the order is antisymmetric and fit for map keys.
pub fn expr_cmp(a: &SpaceExpr, b: &SpaceExpr) -> Ordering {
    use SpaceExpr::*;
    expr_rank(a).cmp(&expr_rank(b)).then_with(|| match (a, b) {
        (Atom(x), Atom(y)) => atom_cmp(x, y),
        (
            SumP {
                p: pa,
                left: la,
                right: ra,
            },
            SumP {
                p: pb,
                left: lb,
                right: rb,
            },
        ) => pa
            .total_cmp(pb)
            .then_with(|| expr_cmp(la, lb))
            .then_with(|| expr_cmp(ra, rb)),
        (C0Sum(fa), C0Sum(fb)) => family_cmp(fa, fb),
        (LpSum { p: pa, family: fa }, LpSum { p: pb, family: fb }) => {
            pa.total_cmp(pb).then_with(|| family_cmp(fa, fb))
        }
        (Dual(x), Dual(y)) => expr_cmp(x, y),
        _ => unreachable!("ranks equal but variants differ"),
    })
}

fn family_cmp(a: &[SpaceExpr], b: &[SpaceExpr]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let c = expr_cmp(x, y);
        if c != Ordering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

impl PartialEq for SpaceExpr {
    fn eq(&self, other: &Self) -> bool {
        expr_cmp(self, other) == Ordering::Equal
    }
}
impl Eq for SpaceExpr {}
impl PartialOrd for SpaceExpr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(expr_cmp(self, other))
    }
}
impl Ord for SpaceExpr {
    fn cmp(&self, other: &Self) -> Ordering {
        expr_cmp(self, other)
    }
}
impl PartialEq for AtomKind {
    fn eq(&self, other: &Self) -> bool {
        atom_cmp(self, other) == Ordering::Equal
    }
}
impl Eq for AtomKind {}

fn fmt_p(p: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_infinite() {
        write!(f, "inf")
    } else {
        write!(f, "{p}")
    }
}

impl fmt::Display for SpaceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SpaceExpr::*;
        match self {
            Atom(a) => match a {
                AtomKind::Lp(p) => {
                    write!(f, "l(")?;
                    fmt_p(*p, f)?;
                    write!(f, ")")
                }
                AtomKind::C0 => write!(f, "c0"),
                AtomKind::Lp01(p) => {
                    write!(f, "L(")?;
                    fmt_p(*p, f)?;
                    write!(f, ")")
                }
                AtomKind::C01 => write!(f, "c01"),
                AtomKind::CKsplit => write!(f, "cksplit"),
                AtomKind::Xr(r) => write!(f, "xr({r})"),
                AtomKind::Gurarii => write!(f, "gurarii"),
                AtomKind::Reals => write!(f, "reals"),
                AtomKind::FiniteDim(n) => write!(f, "findim({n})"),
                AtomKind::ReflexiveGeneric => write!(f, "reflexive"),
            },
            SumP { p, left, right } => {
                write!(f, "sum(")?;
                fmt_p(*p, f)?;
                write!(f, ", {left}, {right})")
            }
            C0Sum(family) => {
                write!(f, "c0sum(")?;
                for (i, m) in family.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, ")")
            }
            LpSum { p, family } => {
                write!(f, "lpsum(")?;
                fmt_p(*p, f)?;
                for m in family {
                    write!(f, ", {m}")?;
                }
                write!(f, ")")
            }
            Dual(inner) => write!(f, "dual({inner})"),
        }
    }
}

// Expressions cross the JSON boundary in their text form.
impl Serialize for SpaceExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SpaceExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}
