//! Symbolic index engine: assigns each space expression four intervals
//! (T, t, mu1, mu2), tightens them to a fixpoint under the rule catalog, and
//! records a derivation tree for every bound it pins down.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::dsl::{canonical_predual, normalize, SpaceExpr};

mod facts;
pub mod interval;
pub mod report;
mod rules;

pub use interval::{ContradictionError, IndexInterval, Intervals, Quantity};
pub use report::{BoundKind, Derivation, IndexReport, StructFlags, TriBool};
pub use rules::{RuleId, RuleInfo, APPLY_ORDER, CATALOG};

use report::TriBool::{No, Unknown, Yes};
use rules::{Side, Update};

/// How a node's interval state links to the nodes it was built from.
#[derive(Debug, Clone)]
enum NodeKids {
    None,
    Pair(usize, usize),
    Family(Vec<usize>),
    Inner(usize),
}

#[derive(Debug)]
struct NodeState {
    expr: SpaceExpr,
    kids: NodeKids,
    /// Canonical predual, registered as an auxiliary node so dual-transfer
    /// rules can consult its state. Chains are capped at two links; deeper
    /// preduals never influence any bound of the original tree.
    predual: Option<usize>,
    depth: u8,
    intervals: Intervals,
    /// Starting intervals, kept to tell tightened bounds from defaults.
    default: Intervals,
    flags: StructFlags,
    base_derivs: Vec<Derivation>,
}

impl NodeState {
    fn placeholder(expr: SpaceExpr, depth: u8) -> Self {
        NodeState {
            expr,
            kids: NodeKids::None,
            predual: None,
            depth,
            intervals: Intervals::all_full(),
            default: Intervals::all_full(),
            flags: StructFlags::unknown(true),
            base_derivs: Vec::new(),
        }
    }
}

const MAX_PREDUAL_DEPTH: u8 = 2;
const MAX_PASSES: usize = 100;

/// Working state of one analysis: every subexpression plus auxiliary predual
/// nodes, indexed for sharing.
pub(crate) struct Analysis {
    nodes: Vec<NodeState>,
    index: BTreeMap<SpaceExpr, usize>,
    flags_done: Vec<bool>,
}

impl Analysis {
    fn new() -> Self {
        Analysis {
            nodes: Vec::new(),
            index: BTreeMap::new(),
            flags_done: Vec::new(),
        }
    }

    fn register(&mut self, e: &SpaceExpr, depth: u8) -> usize {
        if let Some(&id) = self.index.get(e) {
            if self.nodes[id].depth > depth {
                self.nodes[id].depth = depth;
                if depth < MAX_PREDUAL_DEPTH && self.nodes[id].predual.is_none() {
                    self.register_predual(id, depth);
                }
            }
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(NodeState::placeholder(e.clone(), depth));
        self.index.insert(e.clone(), id);
        let kids = match e {
            SpaceExpr::Atom(_) => NodeKids::None,
            SpaceExpr::SumP { left, right, .. } => {
                NodeKids::Pair(self.register(left, depth), self.register(right, depth))
            }
            SpaceExpr::C0Sum(family) | SpaceExpr::LpSum { family, .. } => {
                NodeKids::Family(family.iter().map(|m| self.register(m, depth)).collect())
            }
            SpaceExpr::Dual(inner) => NodeKids::Inner(self.register(inner, depth)),
        };
        self.nodes[id].kids = kids;
        if depth < MAX_PREDUAL_DEPTH {
            self.register_predual(id, depth);
        }
        id
    }

    fn register_predual(&mut self, id: usize, depth: u8) {
        let expr = self.nodes[id].expr.clone();
        if let Some(p) = canonical_predual(&expr) {
            let p = normalize(&p);
            if p != expr {
                let pid = self.register(&p, depth + 1);
                self.nodes[id].predual = Some(pid);
            }
        }
    }

    fn compute_flags(&mut self, id: usize) {
        if self.flags_done[id] {
            return;
        }
        self.flags_done[id] = true;
        let kids = self.nodes[id].kids.clone();
        match &kids {
            NodeKids::None => {}
            NodeKids::Pair(l, r) => {
                self.compute_flags(*l);
                self.compute_flags(*r);
            }
            NodeKids::Family(v) => {
                for &k in v {
                    self.compute_flags(k);
                }
            }
            NodeKids::Inner(i) => self.compute_flags(*i),
        }
        let flags = match (&self.nodes[id].expr, &kids) {
            (SpaceExpr::Atom(k), _) => facts::atom_flags(k),
            (SpaceExpr::SumP { .. }, NodeKids::Pair(l, r)) => {
                let (fl, fr) = (self.nodes[*l].flags, self.nodes[*r].flags);
                StructFlags {
                    infinite_dim: fl.infinite_dim || fr.infinite_dim,
                    reflexive: fl.reflexive.and(fr.reflexive),
                    ..StructFlags::unknown(true)
                }
            }
            (SpaceExpr::C0Sum(_), _) => StructFlags {
                reflexive: No,
                ..StructFlags::unknown(true)
            },
            (SpaceExpr::LpSum { p, .. }, NodeKids::Family(v)) => {
                let reflexive = if *p > 1.0 {
                    v.iter()
                        .map(|&k| self.nodes[k].flags.reflexive)
                        .fold(Yes, TriBool::and)
                } else {
                    No
                };
                StructFlags {
                    reflexive,
                    ..StructFlags::unknown(true)
                }
            }
            (SpaceExpr::Dual(_), NodeKids::Inner(i)) => {
                let fi = self.nodes[*i].flags;
                StructFlags {
                    infinite_dim: fi.infinite_dim,
                    reflexive: fi.reflexive,
                    ..StructFlags::unknown(true)
                }
            }
            _ => unreachable!("kids shape always matches the expression"),
        };
        self.nodes[id].flags = flags;
    }

    fn init(&mut self) {
        self.flags_done = vec![false; self.nodes.len()];
        for id in 0..self.nodes.len() {
            self.compute_flags(id);
        }
        for node in &mut self.nodes {
            let (iv, ds) = match &node.expr {
                SpaceExpr::Atom(k) => facts::atom_base(k),
                _ if node.flags.infinite_dim => (Intervals::all_full(), Vec::new()),
                // finite-dimensional constructor nodes share the tabulated
                // finite-dimensional values
                _ => facts::atom_base(&crate::dsl::AtomKind::FiniteDim(1)),
            };
            node.intervals = iv;
            node.default = iv;
            node.base_derivs = ds;
        }
    }

    fn contradiction(&self, id: usize, q: Quantity, detail: String) -> ContradictionError {
        ContradictionError {
            expr: self.nodes[id].expr.to_string(),
            quantity: q,
            detail,
        }
    }

    fn apply_update(&mut self, id: usize, u: &Update) -> Result<bool, ContradictionError> {
        let mut changed = false;
        if let Some((v, strict)) = u.lo {
            match self.nodes[id].intervals[u.q].tighten_lo(v, strict) {
                Ok(c) => changed |= c,
                Err(detail) => return Err(self.contradiction(id, u.q, detail)),
            }
        }
        if let Some((v, strict)) = u.hi {
            match self.nodes[id].intervals[u.q].tighten_hi(v, strict) {
                Ok(c) => changed |= c,
                Err(detail) => return Err(self.contradiction(id, u.q, detail)),
            }
        }
        Ok(changed)
    }

    fn run(&mut self, order: &[RuleId]) -> Result<(), ContradictionError> {
        for _ in 0..MAX_PASSES {
            let mut changed = false;
            for &rule in order {
                for id in 0..self.nodes.len() {
                    let updates = rules::rule_updates(rule, self, id);
                    for u in &updates {
                        changed |= self.apply_update(id, u)?;
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
        Ok(())
    }

    /// Fill the two flags that summarize the final intervals.
    fn finalize_flags(&mut self) {
        for id in 0..self.nodes.len() {
            self.finalize_flags_for(id);
        }
    }

    fn finalize_flags_for(&mut self, id: usize) {
        let node = &mut self.nodes[id];
        let t = node.intervals[Quantity::SmallT];
        node.flags.almost_square = if t.is_exact(1.0) {
            Yes
        } else if t.lo > 1.0 || t.lo_strict {
            No
        } else {
            Unknown
        };
        let big_t = node.intervals[Quantity::BigT];
        node.flags.octahedral = if big_t.is_exact(2.0) {
            Yes
        } else if big_t.hi < 2.0 || big_t.hi_strict {
            No
        } else {
            Unknown
        };
    }

    /// Canonical derivation records for a node, computed against the final
    /// interval state. For each quantity and side, the first catalog rule
    /// whose candidate matches the final endpoint (and beats the starting
    /// interval) is recorded; premises pull in the derivations of the nodes
    /// the rule consulted.
    fn derivations(
        &self,
        id: usize,
        memo: &mut Vec<Option<Vec<Derivation>>>,
        active: &mut Vec<bool>,
    ) -> Vec<Derivation> {
        if let Some(d) = &memo[id] {
            return d.clone();
        }
        if active[id] {
            return Vec::new();
        }
        active[id] = true;
        let node = &self.nodes[id];
        let mut out = node.base_derivs.clone();
        let mut have = [[false; 2]; 4];
        for d in &out {
            if d.bound.touches_lower() {
                have[d.quantity.idx()][0] = true;
            }
            if d.bound.touches_upper() {
                have[d.quantity.idx()][1] = true;
            }
        }
        for rule in APPLY_ORDER {
            for u in rules::rule_updates(rule, self, id) {
                let fin = node.intervals[u.q];
                let def = node.default[u.q];
                let lo_hit = !have[u.q.idx()][0]
                    && matches!(u.lo, Some((v, _)) if v == fin.lo && fin.lo > def.lo);
                let hi_hit = !have[u.q.idx()][1]
                    && matches!(u.hi, Some((v, _)) if v == fin.hi && fin.hi < def.hi);
                if !lo_hit && !hi_hit {
                    continue;
                }
                let mut premises = Vec::new();
                for &(nid, pq, side) in &u.premises {
                    for d in self.derivations(nid, memo, active) {
                        let keep = d.quantity == pq
                            && match side {
                                Side::All => true,
                                Side::Lower => d.bound.touches_lower(),
                                Side::Upper => d.bound.touches_upper(),
                            };
                        if keep {
                            premises.push(d);
                        }
                    }
                }
                let info = u.rule.info();
                let mut push = |bound: BoundKind, value: f64, premises: Vec<Derivation>| {
                    out.push(Derivation {
                        quantity: u.q,
                        bound,
                        value,
                        rule_id: info.id.to_owned(),
                        citation: info.citation.to_owned(),
                        premises,
                    });
                };
                let lo_v = u.lo.map(|(v, _)| v);
                let hi_v = u.hi.map(|(v, _)| v);
                if lo_hit && hi_hit && lo_v == hi_v {
                    push(BoundKind::Exact, lo_v.unwrap(), premises);
                    have[u.q.idx()][0] = true;
                    have[u.q.idx()][1] = true;
                } else {
                    if lo_hit {
                        push(BoundKind::Lower, lo_v.unwrap(), premises.clone());
                        have[u.q.idx()][0] = true;
                    }
                    if hi_hit {
                        push(BoundKind::Upper, hi_v.unwrap(), premises);
                        have[u.q.idx()][1] = true;
                    }
                }
            }
        }
        active[id] = false;
        memo[id] = Some(out.clone());
        out
    }

    fn report(&self, id: usize, memo: &mut Vec<Option<Vec<Derivation>>>) -> IndexReport {
        let mut active = vec![false; self.nodes.len()];
        IndexReport {
            expr: self.nodes[id].expr.clone(),
            intervals: self.nodes[id].intervals,
            flags: self.nodes[id].flags,
            derivations: self.derivations(id, memo, &mut active),
        }
    }
}

/// Analyze a space expression: normalize, seed every node with tabulated
/// values, run the rule catalog to a fixpoint, and report the root.
pub fn analyze(expr: &SpaceExpr) -> Result<IndexReport, ContradictionError> {
    analyze_with_rule_order(expr, &APPLY_ORDER)
}

/// `analyze` with an explicit rule application order; the result does not
/// depend on the order, which the test suite exercises directly.
pub fn analyze_with_rule_order(
    expr: &SpaceExpr,
    order: &[RuleId],
) -> Result<IndexReport, ContradictionError> {
    let e = normalize(expr);
    let mut a = Analysis::new();
    let root = a.register(&e, 0);
    a.init();
    a.run(order)?;
    a.finalize_flags();
    let mut memo = vec![None; a.nodes.len()];
    Ok(a.report(root, &mut memo))
}

/// Apply one sequential pass of the rule catalog to `expr` alone, reading
/// child (and predual) state from the supplied reports where their
/// expressions match. Spaces without a supplied report fall back to their
/// tabulated starting values.
pub fn apply_rules(
    expr: &SpaceExpr,
    children: &[IndexReport],
) -> Result<IndexReport, ContradictionError> {
    let e = normalize(expr);
    let mut a = Analysis::new();
    let root = a.register(&e, 0);
    a.init();
    let mut memo: Vec<Option<Vec<Derivation>>> = vec![None; a.nodes.len()];
    for rep in children {
        let key = normalize(&rep.expr);
        match a.index.get(&key) {
            Some(&id) if id != root => {
                a.nodes[id].intervals = rep.intervals;
                a.nodes[id].flags = rep.flags;
                memo[id] = Some(rep.derivations.clone());
            }
            _ => {}
        }
    }
    for rule in APPLY_ORDER {
        let updates = rules::rule_updates(rule, &a, root);
        for u in &updates {
            a.apply_update(root, u)?;
        }
    }
    a.finalize_flags_for(root);
    Ok(a.report(root, &mut memo))
}

/// The rule catalog in display order.
pub fn rule_catalog() -> &'static [RuleInfo] {
    &CATALOG
}

fn fmt_value(v: f64) -> String {
    if v == v.round() && v.abs() < 1e15 {
        format!("{}", v.round() as i64)
    } else {
        crate::format_sig12(v)
    }
}

fn render_derivation(d: &Derivation, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    let op = match d.bound {
        BoundKind::Exact => "=",
        BoundKind::Lower => "≥",
        BoundKind::Upper => "≤",
    };
    let value = fmt_value(d.value);
    if d.rule_id == "base" {
        let _ = writeln!(out, "{indent}{} {op} {} [{}]", d.quantity, value, d.citation);
    } else {
        let _ = writeln!(
            out,
            "{indent}{} {op} {} by {} [{}]",
            d.quantity, value, d.rule_id, d.citation
        );
    }
    for p in &d.premises {
        render_derivation(p, depth + 1, out);
    }
}

/// Human-readable derivation tree for a report.
pub fn explain(report: &IndexReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "indices of {}", report.expr);
    for q in Quantity::ALL {
        let iv = report.intervals[q];
        let open = if iv.lo_strict { '(' } else { '[' };
        let close = if iv.hi_strict { ')' } else { ']' };
        let _ = writeln!(
            s,
            "  {} in {open}{}, {}{close}",
            q.label(),
            fmt_value(iv.lo),
            fmt_value(iv.hi)
        );
    }
    if report.derivations.is_empty() {
        let _ = writeln!(s, "  no derived bounds; defaults [1,2]");
    } else {
        for d in &report.derivations {
            render_derivation(d, 1, &mut s);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn report(text: &str) -> IndexReport {
        analyze(&parse(text).unwrap()).unwrap()
    }

    fn assert_exact(iv: IndexInterval, v: f64) {
        assert!(
            (iv.lo - v).abs() < 1e-12 && (iv.hi - v).abs() < 1e-12,
            "expected exactly {v}, got {iv}"
        );
    }

    #[test]
    fn tabulated_sequence_and_function_spaces() {
        for p in [1.0, 1.5, 2.0, 4.0] {
            let r = report(&format!("l({p})"));
            assert_exact(r.intervals[Quantity::BigT], 2f64.powf(1.0 / p));
            assert_exact(r.intervals[Quantity::SmallT], 2f64.powf(1.0 / p));
            let r = report(&format!("L({p})"));
            assert_exact(r.intervals[Quantity::BigT], 2f64.powf(1.0 / p));
            assert_exact(r.intervals[Quantity::SmallT], 2f64.powf(1.0 / p));
        }
        let r = report("l(inf)");
        assert_exact(r.intervals[Quantity::BigT], 1.0);
        assert_exact(r.intervals[Quantity::SmallT], 2.0);
        for text in ["L(inf)", "c01"] {
            let r = report(text);
            assert_exact(r.intervals[Quantity::BigT], 2.0);
            assert_exact(r.intervals[Quantity::SmallT], 2.0);
        }
    }

    #[test]
    fn c0_report_closes_mu1() {
        let r = report("c0");
        assert_exact(r.intervals[Quantity::BigT], 1.0);
        assert_exact(r.intervals[Quantity::SmallT], 1.0);
        assert_exact(r.intervals[Quantity::Mu1], 1.0);
        let mu2 = r.intervals[Quantity::Mu2];
        assert_eq!((mu2.lo, mu2.hi), (1.0, 2.0));
        assert_eq!(r.flags.almost_square, Yes);
        assert_eq!(r.flags.octahedral, No);
    }

    #[test]
    fn special_atoms() {
        let r = report("cksplit");
        assert_exact(r.intervals[Quantity::BigT], 1.0);
        assert_exact(r.intervals[Quantity::SmallT], 2.0);
        assert_exact(r.intervals[Quantity::Mu1], 1.5);
        assert_exact(r.intervals[Quantity::Mu2], 1.5);
        let r = report("gurarii");
        assert_exact(r.intervals[Quantity::BigT], 2.0);
        assert_exact(r.intervals[Quantity::SmallT], 1.0);
        assert_exact(r.intervals[Quantity::Mu1], 1.0);
        assert_exact(r.intervals[Quantity::Mu2], 2.0);
        for r_param in [2.0, 3.0, 10.0] {
            let r = report(&format!("xr({r_param})"));
            assert_exact(r.intervals[Quantity::SmallT], 1.0 + 1.0 / r_param);
        }
    }

    #[test]
    fn c0_sums() {
        for p in [1.0, 1.5, 2.0, 4.0] {
            let r = report(&format!("c0sum(l({p}))"));
            assert_exact(r.intervals[Quantity::SmallT], 1.0);
            assert_exact(r.intervals[Quantity::BigT], 2f64.powf(1.0 / p));
        }
        let r = report("c0sum(l(2), l(3))");
        assert_exact(r.intervals[Quantity::BigT], 2f64.powf(1.0 / 3.0));
    }

    #[test]
    fn l1_direct_sums_of_l1() {
        for p in ["1", "2", "inf"] {
            let r = report(&format!("sum({p}, l(1), l(1))"));
            assert_exact(r.intervals[Quantity::SmallT], 2.0);
        }
        let r = report("sum(2, l(1), l(1))");
        let v = (2.0 + 2f64.sqrt()).sqrt();
        assert_exact(r.intervals[Quantity::BigT], v);
        let mu2 = r.intervals[Quantity::Mu2];
        assert!((mu2.lo - v).abs() < 1e-12 && mu2.hi == 2.0);
    }

    #[test]
    fn inf_sum_takes_the_min() {
        let r = report("sum(inf, l(2), l(3))");
        assert_exact(r.intervals[Quantity::SmallT], 2f64.powf(1.0 / 3.0));
    }

    #[test]
    fn dual_transfer() {
        let r = report("dual(c0sum(l(2)))");
        assert_exact(r.intervals[Quantity::BigT], 2.0);
        assert_exact(r.intervals[Quantity::Mu2], 2.0);
        let r = report("dual(xr(2))");
        assert_exact(r.intervals[Quantity::BigT], 2.0);
        let r = report("dual(dual(xr(2)))");
        assert_exact(r.intervals[Quantity::SmallT], 2.0);
    }

    #[test]
    fn bidual_monotonicity() {
        let r = report("dual(dual(gurarii))");
        let t = r.intervals[Quantity::SmallT];
        assert_exact(t, 2.0);
        let big_t = r.intervals[Quantity::BigT];
        assert_eq!((big_t.lo, big_t.hi), (1.0, 2.0));
    }

    #[test]
    fn reflexive_strictness_and_default_text() {
        let r = report("reflexive");
        let t = r.intervals[Quantity::SmallT];
        assert!(t.lo == 1.0 && t.lo_strict && t.hi == 2.0 && !t.hi_strict);
        let big_t = r.intervals[Quantity::BigT];
        assert!(big_t.hi == 2.0 && big_t.hi_strict && big_t.lo == 1.0 && !big_t.lo_strict);
        assert!(r.derivations.is_empty());
        assert!(explain(&r).contains("no derived bounds; defaults [1,2]"));
    }

    #[test]
    fn lp_sum_rules() {
        let r = report("lpsum(1, l(1))");
        assert_exact(r.intervals[Quantity::SmallT], 2.0);
        let r = report("lpsum(2, l(1))");
        assert_exact(r.intervals[Quantity::SmallT], 2f64.sqrt());
        let r = report("lpsum(3, reflexive, l(2))");
        let t = r.intervals[Quantity::SmallT];
        let expect = ((2f64.sqrt() - 1.0).powf(3.0) + 1.0).powf(1.0 / 3.0);
        assert!((t.lo - expect).abs() < 1e-12 && !t.lo_strict);
    }

    #[test]
    fn reals_plus_reflexive_collapses() {
        let r = report("sum(inf, l(2), reals)");
        assert_exact(r.intervals[Quantity::BigT], 1.0);
        let r = report("sum(1, l(2), reals)");
        assert_exact(r.intervals[Quantity::SmallT], 2.0);
    }

    #[test]
    fn explain_pins_format() {
        let text = explain(&report("c0sum(l(2))"));
        assert!(text.contains("t ≤ 1 by R1 [Lemma 2.3]"), "{text}");
        assert!(text.contains("T = 1.41421356237 by R2 [Lemma 2.5]"), "{text}");
        assert!(text.contains("T = 1.41421356237 [Whitley]"), "{text}");
        let text = explain(&report("l(1)"));
        assert!(text.contains("T = 2 [Whitley]"), "{text}");
    }

    #[test]
    fn apply_rules_single_pass_cascades() {
        let l1 = report("l(1)");
        let expr = parse("sum(2, l(1), l(1))").unwrap();
        let r = apply_rules(&expr, &[l1]).unwrap();
        let v = (2.0 + 2f64.sqrt()).sqrt();
        assert_exact(r.intervals[Quantity::BigT], v);
        assert_exact(r.intervals[Quantity::SmallT], 2.0);
        assert!((r.intervals[Quantity::Mu2].lo - v).abs() < 1e-12);
        let full = report("sum(2, l(1), l(1))");
        assert_eq!(r.intervals, full.intervals);
    }

    #[test]
    fn rule_order_does_not_matter() {
        let mut reversed = APPLY_ORDER;
        reversed.reverse();
        let swapped = {
            let mut o = APPLY_ORDER;
            o.swap(0, 14);
            o.swap(3, 9);
            o
        };
        for text in [
            "c0sum(l(2))",
            "dual(c0sum(l(2)))",
            "sum(2, l(1), l(1))",
            "dual(dual(xr(2)))",
            "sum(inf, l(2), reals)",
            "lpsum(2, c01, l(1))",
        ] {
            let e = parse(text).unwrap();
            let a = analyze(&e).unwrap();
            let b = analyze_with_rule_order(&e, &reversed).unwrap();
            let c = analyze_with_rule_order(&e, &swapped).unwrap();
            assert_eq!(a, b, "{text}");
            assert_eq!(a, c, "{text}");
        }
    }

    #[test]
    fn chain_consistency_everywhere() {
        for text in [
            "l(1)",
            "l(2)",
            "c0",
            "gurarii",
            "cksplit",
            "xr(3)",
            "dual(gurarii)",
            "sum(2, l(1), l(1))",
            "c0sum(l(1), c01)",
            "lpsum(1, c01)",
            "dual(dual(c01))",
            "sum(inf, reflexive, reals)",
        ] {
            let r = report(text);
            let iv = r.intervals;
            assert!(iv[Quantity::Mu1].lo <= iv[Quantity::SmallT].hi, "{text}");
            assert!(iv[Quantity::BigT].lo <= iv[Quantity::Mu2].hi, "{text}");
            for q in Quantity::ALL {
                assert!(iv[q].lo >= 1.0 && iv[q].hi <= 2.0 && iv[q].lo <= iv[q].hi, "{text}");
            }
        }
    }
}
