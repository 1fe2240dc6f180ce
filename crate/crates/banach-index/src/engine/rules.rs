//! The deduction rule catalog: identifiers, statements, citations, and the
//! per-node tightenings each rule contributes.

use crate::dsl::{AtomKind, SpaceExpr};

use super::interval::{IndexInterval, Quantity};
use super::report::TriBool;
use super::{Analysis, NodeKids};

/// Rule identifiers. `R15` is the structural-flag pass and contributes no
/// interval tightenings; everything else participates in the fixpoint loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleId {
    K1,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
    R14,
    R15,
}

/// Catalog entry: identifier, informal statement, citation tag.
#[derive(Debug, Clone, Copy)]
pub struct RuleInfo {
    pub id: &'static str,
    pub statement: &'static str,
    pub citation: &'static str,
}

/// Every rule in display order.
pub const CATALOG: [RuleInfo; 16] = [
    RuleInfo {
        id: "K1",
        statement: "known value: T(l(1) (+)_2 l(1)) = sqrt(2 + sqrt(2))",
        citation: "CPS, Lemma 2",
    },
    RuleInfo {
        id: "R1",
        statement: "a cyclic c0-sum has t = 1",
        citation: "Lemma 2.3",
    },
    RuleInfo {
        id: "R2",
        statement: "a cyclic c0-sum has T = min over the member values of T",
        citation: "Lemma 2.5",
    },
    RuleInfo {
        id: "R3",
        statement: "t(X (+)_p Y) >= ((s-1)^p + 1)^(1/p) with s = max(t(X), t(Y)), p finite",
        citation: "Proposition 2.9",
    },
    RuleInfo {
        id: "R4",
        statement: "t(X (+)_1 Y) >= max(t(X), t(Y))",
        citation: "Corollary 2.11(i)",
    },
    RuleInfo {
        id: "R5",
        statement: "a cyclic lp-sum obeys the (+)_p lower bound memberwise; a member with t = 2 forces t = 2^(1/p)",
        citation: "Corollary 2.11(ii)",
    },
    RuleInfo {
        id: "R6",
        statement: "t(X (+)_inf Y) = min(t(X), t(Y))",
        citation: "Proposition 2.12",
    },
    RuleInfo {
        id: "R7",
        statement: "t(X) = 1 forces T(X*) = 2",
        citation: "Proposition 2.1",
    },
    RuleInfo {
        id: "R8",
        statement: "t(l(1) (+)_p l(1)) = 2 for every p",
        citation: "Proposition 2.13",
    },
    RuleInfo {
        id: "R9",
        statement: "T(X**) <= T(X) and t(X**) >= t(X)",
        citation: "Proposition 3.1",
    },
    RuleInfo {
        id: "R10",
        statement: "chain closure: 1 <= mu1 <= t <= 2 and 1 <= T <= mu2 <= 2",
        citation: "Section 1",
    },
    RuleInfo {
        id: "R11",
        statement: "T = 2 if and only if mu2 = 2",
        citation: "Papini, Theorem 2.1",
    },
    RuleInfo {
        id: "R12",
        statement: "a reflexive space has t > 1 and T < 2",
        citation: "Section 2",
    },
    RuleInfo {
        id: "R13",
        statement: "X reflexive infinite-dimensional: T(X (+)_inf reals) = 1 and t(X (+)_1 reals) = 2",
        citation: "Proposition 2.8",
    },
    RuleInfo {
        id: "R14",
        statement: "X Lindenstrauss: t(X) = 2 if the ball has an extreme point; T(X*) = 2 and t(X**) = 2 for X infinite-dimensional",
        citation: "Proposition 3.6",
    },
    RuleInfo {
        id: "R15",
        statement: "structural flags propagate through constructors",
        citation: "Section 1",
    },
];

/// The canonical application order for the fixpoint loop. Closure rules run
/// after the structural ones so single-pass application already cascades.
pub const APPLY_ORDER: [RuleId; 15] = [
    RuleId::K1,
    RuleId::R1,
    RuleId::R2,
    RuleId::R3,
    RuleId::R4,
    RuleId::R5,
    RuleId::R6,
    RuleId::R7,
    RuleId::R8,
    RuleId::R9,
    RuleId::R13,
    RuleId::R14,
    RuleId::R10,
    RuleId::R11,
    RuleId::R12,
];

impl RuleId {
    pub fn code(self) -> &'static str {
        self.info().id
    }

    pub fn info(self) -> &'static RuleInfo {
        let idx = match self {
            RuleId::K1 => 0,
            RuleId::R1 => 1,
            RuleId::R2 => 2,
            RuleId::R3 => 3,
            RuleId::R4 => 4,
            RuleId::R5 => 5,
            RuleId::R6 => 6,
            RuleId::R7 => 7,
            RuleId::R8 => 8,
            RuleId::R9 => 9,
            RuleId::R10 => 10,
            RuleId::R11 => 11,
            RuleId::R12 => 12,
            RuleId::R13 => 13,
            RuleId::R14 => 14,
            RuleId::R15 => 15,
        };
        &CATALOG[idx]
    }
}

/// Which side of a premise derivation a rule actually consumed.
#[derive(Debug, Clone, Copy)]
pub(super) enum Side {
    Lower,
    Upper,
    All,
}

/// One candidate tightening produced by a rule at a node. `lo`/`hi` carry
/// (value, strict); premises name (node, quantity, side) triples whose
/// derivations justify the bound.
#[derive(Debug, Clone)]
pub(super) struct Update {
    pub rule: RuleId,
    pub q: Quantity,
    pub lo: Option<(f64, bool)>,
    pub hi: Option<(f64, bool)>,
    pub premises: Vec<(usize, Quantity, Side)>,
}

impl Update {
    fn exact(rule: RuleId, q: Quantity, v: f64, premises: Vec<(usize, Quantity, Side)>) -> Self {
        Update {
            rule,
            q,
            lo: Some((v, false)),
            hi: Some((v, false)),
            premises,
        }
    }
}

const L1_ATOM: SpaceExpr = SpaceExpr::Atom(AtomKind::Lp(1.0));

/// The (+)_p lower-bound transfer ((s-1)^p + 1)^(1/p), defined for s in
/// [1,2] and finite p >= 1. Strictly increasing in s.
fn p_sum_transfer(s: f64, p: f64) -> f64 {
    ((s - 1.0).powf(p) + 1.0).powf(1.0 / p)
}

/// Endpoint combination for a pointwise minimum of intervals. The lower end
/// is attained unless every member achieving it is strict (AND); the upper
/// end is missed if any member achieving it is strict (OR).
fn min_combine(members: &[IndexInterval]) -> ((f64, bool), (f64, bool)) {
    let mut lo = f64::INFINITY;
    let mut lo_strict = true;
    let mut hi = f64::INFINITY;
    let mut hi_strict = false;
    for iv in members {
        if iv.lo < lo {
            lo = iv.lo;
            lo_strict = iv.lo_strict;
        } else if iv.lo == lo {
            lo_strict = lo_strict && iv.lo_strict;
        }
        if iv.hi < hi {
            hi = iv.hi;
            hi_strict = iv.hi_strict;
        } else if iv.hi == hi {
            hi_strict = hi_strict || iv.hi_strict;
        }
    }
    ((lo, lo_strict), (hi, hi_strict))
}

/// All tightenings `rule` contributes at node `id` given the current state.
pub(super) fn rule_updates(rule: RuleId, a: &Analysis, id: usize) -> Vec<Update> {
    use Quantity::{BigT, Mu1, Mu2, SmallT};
    let node = &a.nodes[id];
    let expr = &node.expr;
    let mut out = Vec::new();
    match rule {
        RuleId::K1 => {
            if let SpaceExpr::SumP { p, left, right } = expr {
                if *p == 2.0 && **left == L1_ATOM && **right == L1_ATOM {
                    let v = (2.0 + 2.0_f64.sqrt()).sqrt();
                    out.push(Update::exact(rule, BigT, v, Vec::new()));
                }
            }
        }
        RuleId::R1 => {
            if matches!(expr, SpaceExpr::C0Sum(_)) {
                out.push(Update::exact(rule, SmallT, 1.0, Vec::new()));
            }
        }
        RuleId::R2 => {
            if let (SpaceExpr::C0Sum(_), NodeKids::Family(kids)) = (expr, &node.kids) {
                let ivs: Vec<IndexInterval> =
                    kids.iter().map(|&k| a.nodes[k].intervals[BigT]).collect();
                let (lo, hi) = min_combine(&ivs);
                out.push(Update {
                    rule,
                    q: BigT,
                    lo: Some(lo),
                    hi: Some(hi),
                    premises: kids.iter().map(|&k| (k, BigT, Side::All)).collect(),
                });
            }
        }
        RuleId::R3 => {
            if let (SpaceExpr::SumP { p, .. }, NodeKids::Pair(l, r)) = (expr, &node.kids) {
                if p.is_finite() {
                    for &k in &[*l, *r] {
                        let t = a.nodes[k].intervals[SmallT];
                        out.push(Update {
                            rule,
                            q: SmallT,
                            lo: Some((p_sum_transfer(t.lo, *p), t.lo_strict)),
                            hi: None,
                            premises: vec![(k, SmallT, Side::Lower)],
                        });
                    }
                }
            }
        }
        RuleId::R4 => {
            if let (SpaceExpr::SumP { p, .. }, NodeKids::Pair(l, r)) = (expr, &node.kids) {
                if *p == 1.0 {
                    for &k in &[*l, *r] {
                        let t = a.nodes[k].intervals[SmallT];
                        out.push(Update {
                            rule,
                            q: SmallT,
                            lo: Some((t.lo, t.lo_strict)),
                            hi: None,
                            premises: vec![(k, SmallT, Side::Lower)],
                        });
                    }
                }
            }
        }
        RuleId::R5 => {
            if let (SpaceExpr::LpSum { p, .. }, NodeKids::Family(kids)) = (expr, &node.kids) {
                for &k in kids {
                    let t = a.nodes[k].intervals[SmallT];
                    out.push(Update {
                        rule,
                        q: SmallT,
                        lo: Some((p_sum_transfer(t.lo, *p), t.lo_strict)),
                        hi: None,
                        premises: vec![(k, SmallT, Side::Lower)],
                    });
                    if t.is_exact(2.0) {
                        out.push(Update::exact(
                            rule,
                            SmallT,
                            2f64.powf(1.0 / p),
                            vec![(k, SmallT, Side::All)],
                        ));
                    }
                }
            }
        }
        RuleId::R6 => {
            if let (SpaceExpr::SumP { p, .. }, NodeKids::Pair(l, r)) = (expr, &node.kids) {
                if p.is_infinite() {
                    let ivs = [a.nodes[*l].intervals[SmallT], a.nodes[*r].intervals[SmallT]];
                    let (lo, hi) = min_combine(&ivs);
                    out.push(Update {
                        rule,
                        q: SmallT,
                        lo: Some(lo),
                        hi: Some(hi),
                        premises: vec![(*l, SmallT, Side::All), (*r, SmallT, Side::All)],
                    });
                }
            }
        }
        RuleId::R7 => {
            if let Some(pid) = node.predual {
                if a.nodes[pid].intervals[SmallT].is_exact(1.0) {
                    out.push(Update::exact(
                        rule,
                        BigT,
                        2.0,
                        vec![(pid, SmallT, Side::All)],
                    ));
                }
            }
        }
        RuleId::R8 => {
            if let SpaceExpr::SumP { left, right, .. } = expr {
                if **left == L1_ATOM && **right == L1_ATOM {
                    out.push(Update::exact(rule, SmallT, 2.0, Vec::new()));
                }
            }
        }
        RuleId::R9 => {
            if let (SpaceExpr::Dual(_), NodeKids::Inner(d1)) = (expr, &node.kids) {
                if let (SpaceExpr::Dual(_), NodeKids::Inner(base)) =
                    (&a.nodes[*d1].expr, &a.nodes[*d1].kids)
                {
                    let bt = a.nodes[*base].intervals[BigT];
                    let tt = a.nodes[*base].intervals[SmallT];
                    out.push(Update {
                        rule,
                        q: BigT,
                        lo: None,
                        hi: Some((bt.hi, bt.hi_strict)),
                        premises: vec![(*base, BigT, Side::Upper)],
                    });
                    out.push(Update {
                        rule,
                        q: SmallT,
                        lo: Some((tt.lo, tt.lo_strict)),
                        hi: None,
                        premises: vec![(*base, SmallT, Side::Lower)],
                    });
                }
            }
        }
        RuleId::R10 => {
            let iv = &node.intervals;
            let (t, big_t, mu1, mu2) = (iv[SmallT], iv[BigT], iv[Mu1], iv[Mu2]);
            out.push(Update {
                rule,
                q: SmallT,
                lo: Some((mu1.lo, mu1.lo_strict)),
                hi: None,
                premises: Vec::new(),
            });
            out.push(Update {
                rule,
                q: Mu1,
                lo: None,
                hi: Some((t.hi, t.hi_strict)),
                premises: Vec::new(),
            });
            out.push(Update {
                rule,
                q: Mu2,
                lo: Some((big_t.lo, big_t.lo_strict)),
                hi: None,
                premises: Vec::new(),
            });
            out.push(Update {
                rule,
                q: BigT,
                lo: None,
                hi: Some((mu2.hi, mu2.hi_strict)),
                premises: Vec::new(),
            });
        }
        RuleId::R11 => {
            if node.intervals[BigT].is_exact(2.0) {
                out.push(Update::exact(rule, Mu2, 2.0, Vec::new()));
            }
            if node.intervals[Mu2].is_exact(2.0) {
                out.push(Update::exact(rule, BigT, 2.0, Vec::new()));
            }
        }
        RuleId::R12 => {
            if node.flags.reflexive == TriBool::Yes {
                out.push(Update {
                    rule,
                    q: SmallT,
                    lo: Some((1.0, true)),
                    hi: None,
                    premises: Vec::new(),
                });
                out.push(Update {
                    rule,
                    q: BigT,
                    lo: None,
                    hi: Some((2.0, true)),
                    premises: Vec::new(),
                });
            }
        }
        RuleId::R13 => {
            if let (SpaceExpr::SumP { p, left, right }, NodeKids::Pair(l, r)) = (expr, &node.kids) {
                let reals = SpaceExpr::Atom(AtomKind::Reals);
                let other = if **right == reals {
                    Some(*l)
                } else if **left == reals {
                    Some(*r)
                } else {
                    None
                };
                if let Some(x) = other {
                    let fx = &a.nodes[x].flags;
                    if fx.reflexive == TriBool::Yes && fx.infinite_dim {
                        if p.is_infinite() {
                            out.push(Update::exact(rule, BigT, 1.0, Vec::new()));
                        } else if *p == 1.0 {
                            out.push(Update::exact(rule, SmallT, 2.0, Vec::new()));
                        }
                    }
                }
            }
        }
        RuleId::R14 => {
            let f = &node.flags;
            if f.lindenstrauss == TriBool::Yes && f.has_extreme_points == TriBool::Yes {
                out.push(Update::exact(rule, SmallT, 2.0, Vec::new()));
            }
            if let Some(pid) = node.predual {
                let fp = &a.nodes[pid].flags;
                if fp.lindenstrauss == TriBool::Yes && fp.infinite_dim {
                    out.push(Update::exact(rule, BigT, 2.0, Vec::new()));
                }
                if let Some(pid2) = a.nodes[pid].predual {
                    let fp2 = &a.nodes[pid2].flags;
                    if fp2.lindenstrauss == TriBool::Yes && fp2.infinite_dim {
                        out.push(Update::exact(rule, SmallT, 2.0, Vec::new()));
                    }
                }
            }
        }
        RuleId::R15 => {}
    }
    out
}
