//! Rendering layer shared by the `banach-index` binary and its tests:
//! a stable JSON schema for each subcommand plus the text formatting,
//! with every float printed to 12 significant digits.

use serde::{Deserialize, Serialize};

use banach_index::engine::{
    BoundKind, Derivation, IndexInterval, IndexReport, Quantity, StructFlags, TriBool,
};
use banach_index::experiments::ExperimentReport;
use banach_index::format_sig12;
use banach_index::models::FiniteModel;

/// JSON schema of `analyze`: the expression in canonical text form, one
/// interval per index, structural flags, and the derivation records that
/// justify the reported endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOutput {
    pub expr: String,
    #[serde(rename = "T")]
    pub big_t: IndexInterval,
    pub t: IndexInterval,
    pub mu1: IndexInterval,
    pub mu2: IndexInterval,
    pub flags: StructFlags,
    pub derivations: Vec<Derivation>,
}

impl AnalyzeOutput {
    pub fn from_report(report: &IndexReport) -> Self {
        AnalyzeOutput {
            expr: report.expr.to_string(),
            big_t: report.intervals[Quantity::BigT],
            t: report.intervals[Quantity::SmallT],
            mu1: report.intervals[Quantity::Mu1],
            mu2: report.intervals[Quantity::Mu2],
            flags: report.flags,
            derivations: report.derivations.clone(),
        }
    }
}

fn interval_text(iv: IndexInterval) -> String {
    let lo_mark = if iv.lo_strict { " (strict)" } else { "" };
    let hi_mark = if iv.hi_strict { " (strict)" } else { "" };
    if iv.lo == iv.hi && !iv.lo_strict && !iv.hi_strict {
        format!("{} exactly", format_sig12(iv.lo))
    } else {
        format!(
            "[{}{}, {}{}]",
            format_sig12(iv.lo),
            lo_mark,
            format_sig12(iv.hi),
            hi_mark
        )
    }
}

fn tri_text(t: TriBool) -> &'static str {
    match t {
        TriBool::Yes => "yes",
        TriBool::No => "no",
        TriBool::Unknown => "unknown",
    }
}

fn flags_text(f: &StructFlags) -> String {
    format!(
        "infinite-dimensional {}; reflexive {}; lindenstrauss {}; extreme points {}; almost square {}; octahedral {}",
        if f.infinite_dim { "yes" } else { "no" },
        tri_text(f.reflexive),
        tri_text(f.lindenstrauss),
        tri_text(f.has_extreme_points),
        tri_text(f.almost_square),
        tri_text(f.octahedral)
    )
}

fn bound_word(b: BoundKind) -> &'static str {
    match b {
        BoundKind::Exact => "=",
        BoundKind::Lower => ">=",
        BoundKind::Upper => "<=",
    }
}

/// Text form of `analyze`: intervals, flags, then one line per derivation
/// carrying the rule id and its citation.
pub fn render_analyze(out: &AnalyzeOutput) -> String {
    let mut s = String::new();
    s.push_str(&format!("space {}\n", out.expr));
    s.push_str(&format!("T   = {}\n", interval_text(out.big_t)));
    s.push_str(&format!("t   = {}\n", interval_text(out.t)));
    s.push_str(&format!("mu1 = {}\n", interval_text(out.mu1)));
    s.push_str(&format!("mu2 = {}\n", interval_text(out.mu2)));
    s.push_str(&format!("flags: {}\n", flags_text(&out.flags)));
    s.push_str("bounds:\n");
    for d in &out.derivations {
        s.push_str(&format!(
            "  {} {} {}  rule {}  [{}]\n",
            d.quantity.label(),
            bound_word(d.bound),
            format_sig12(d.value),
            d.rule_id,
            d.citation
        ));
    }
    s
}

fn model_text(m: &FiniteModel) -> String {
    match m {
        FiniteModel::LpCoords { p, n, weights } => format!(
            "l_p coordinates (p = {p}, n = {n}{})",
            if weights.is_some() { ", weighted" } else { "" }
        ),
        FiniteModel::PSum { p, parts } => format!(
            "l_p sum (p = {p}) of {} blocks, dimension {}",
            parts.len(),
            m.dim()
        ),
        FiniteModel::GridCk { m: nodes, constraints } => format!(
            "sup-norm grid ({nodes} nodes, {} linear constraints)",
            constraints.len()
        ),
        FiniteModel::RenormMax { base, proj_coords } => format!(
            "max-renormed {} with a {}-coordinate projection",
            model_text(base),
            proj_coords.len()
        ),
    }
}

/// Text form of an experiment report; the JSON form is the report's own
/// serde serialization.
pub fn render_experiment(r: &ExperimentReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("experiment {}\n", r.name));
    if let Some(m) = &r.model {
        s.push_str(&format!("model: {}\n", model_text(m)));
    }
    if let Some(c) = &r.construction {
        s.push_str(&format!("witnesses: {c}\n"));
    }
    s.push_str(&format!(
        "cfg: multistarts {}, max_iters {}, step0 {}, tol {}, seed {}\n",
        r.cfg.multistarts,
        r.cfg.max_iters,
        format_sig12(r.cfg.step0),
        format_sig12(r.cfg.tol),
        r.cfg.seed
    ));
    s.push_str(&format!("value = {}\n", format_sig12(r.value)));
    if let Some([lo, hi]) = r.bracket {
        s.push_str(&format!(
            "bracket = [{}, {}]\n",
            format_sig12(lo),
            format_sig12(hi)
        ));
    }
    s.push_str(&format!("expectation: {}\n", r.threshold));
    s.push_str(&format!("status: {}\n", r.status));
    for d in &r.details {
        s.push_str(&format!("  {d}\n"));
    }
    s
}

/// JSON schema of `list-rules`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleOutput {
    pub id: String,
    pub statement: String,
    pub citation: String,
}

pub fn rule_outputs() -> Vec<RuleOutput> {
    banach_index::engine::rule_catalog()
        .iter()
        .map(|r| RuleOutput {
            id: r.id.to_owned(),
            statement: r.statement.to_owned(),
            citation: r.citation.to_owned(),
        })
        .collect()
}

pub fn render_rules(rules: &[RuleOutput]) -> String {
    let mut s = String::new();
    for r in rules {
        s.push_str(&format!("{:4} {}\n     [{}]\n", r.id, r.statement, r.citation));
    }
    s
}

/// JSON schema of `explain`: the derivation data plus its rendered tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainOutput {
    pub expr: String,
    pub derivations: Vec<Derivation>,
    pub rendered: String,
}
