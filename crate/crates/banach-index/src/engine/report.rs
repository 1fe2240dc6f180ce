//! Structural flags, derivation records, and the per-space analysis report.

use serde::{Deserialize, Serialize};

use crate::dsl::SpaceExpr;

use super::interval::{Intervals, Quantity};

/// Three-valued structural knowledge. Absence of a rule is never treated as
/// evidence, so properties that no rule settles stay `Unknown`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriBool {
    Yes,
    No,
    Unknown,
}

impl TriBool {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TriBool::Yes
        } else {
            TriBool::No
        }
    }

    /// Three-valued conjunction.
    pub fn and(self, other: TriBool) -> TriBool {
        match (self, other) {
            (TriBool::No, _) | (_, TriBool::No) => TriBool::No,
            (TriBool::Yes, TriBool::Yes) => TriBool::Yes,
            _ => TriBool::Unknown,
        }
    }
}

/// Structural properties consulted by the rules. `infinite_dim` is always
/// decidable from the expression; the rest may be unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructFlags {
    pub infinite_dim: bool,
    pub reflexive: TriBool,
    pub lindenstrauss: TriBool,
    pub has_extreme_points: TriBool,
    pub almost_square: TriBool,
    pub octahedral: TriBool,
}

impl StructFlags {
    pub fn unknown(infinite_dim: bool) -> Self {
        StructFlags {
            infinite_dim,
            reflexive: TriBool::Unknown,
            lindenstrauss: TriBool::Unknown,
            has_extreme_points: TriBool::Unknown,
            almost_square: TriBool::Unknown,
            octahedral: TriBool::Unknown,
        }
    }
}

/// Which side of an interval a derivation pins down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
}

impl BoundKind {
    pub fn touches_lower(self) -> bool {
        matches!(self, BoundKind::Lower | BoundKind::Exact)
    }

    pub fn touches_upper(self) -> bool {
        matches!(self, BoundKind::Upper | BoundKind::Exact)
    }
}

/// One recorded bound: which quantity, which side, the value, the rule that
/// produced it, its citation, and the child-space derivations it consumed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derivation {
    pub quantity: Quantity,
    pub bound: BoundKind,
    pub value: f64,
    pub rule_id: String,
    pub citation: String,
    pub premises: Vec<Derivation>,
}

/// Full analysis output for one space expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub expr: SpaceExpr,
    pub intervals: Intervals,
    pub flags: StructFlags,
    pub derivations: Vec<Derivation>,
}

impl IndexReport {
    /// Derivations for one quantity, in recorded order.
    pub fn derivations_for(&self, q: Quantity) -> impl Iterator<Item = &Derivation> {
        self.derivations.iter().filter(move |d| d.quantity == q)
    }
}
