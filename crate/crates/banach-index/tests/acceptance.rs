//! Release gate: nine end-to-end checks, one test per criterion, each
//! printing a single pass line and enforcing its own runtime budget.
//! Tolerances are pinned as constants next to the checks that use them.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use banach_index::dsl::{parse, AtomKind, SpaceExpr};
use banach_index::engine::{analyze, analyze_with_rule_order, Quantity, APPLY_ORDER};
use banach_index::experiments::{run_experiment, ExperimentParams};
use banach_index::models::{FiniteModel, WitnessFamily};
use banach_index::oracle::{eval_inf_max, renorm_cover_demo, OptConfig};

const TABLE_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-12;
const ANTIPODAL_TOL: f64 = 1e-6;
const COVER_TOL: f64 = 1e-6;

fn finish(n: usize, label: &str, t0: Instant, budget: Duration) {
    let elapsed = t0.elapsed();
    assert!(
        elapsed < budget,
        "criterion {n} overran its budget: {elapsed:?} >= {budget:?}"
    );
    println!("acceptance {n} ({label}): PASS in {elapsed:?}");
}

fn assert_exact(expr: &str, q: Quantity, want: f64) {
    let report = analyze(&parse(expr).unwrap()).unwrap();
    let iv = report.intervals[q];
    assert!(
        (iv.lo - want).abs() <= TABLE_TOL && (iv.hi - want).abs() <= TABLE_TOL,
        "{expr}: {} = [{}, {}], want exactly {want}",
        q.label(),
        iv.lo,
        iv.hi
    );
}

#[test]
fn acceptance_1_golden_index_table() {
    let t0 = Instant::now();
    use Quantity::{BigT, Mu1, Mu2, SmallT};
    let root2 = 2f64.sqrt();
    for p in [1.0, 1.5, 2.0, 4.0] {
        let v = 2f64.powf(1.0 / p);
        assert_exact(&format!("l({p})"), BigT, v);
        assert_exact(&format!("l({p})"), SmallT, v);
        assert_exact(&format!("L({p})"), BigT, v);
        assert_exact(&format!("L({p})"), SmallT, v);
        assert_exact(&format!("c0sum(l({p}))"), SmallT, 1.0);
        assert_exact(&format!("c0sum(l({p}))"), BigT, v);
    }
    assert_exact("c0", BigT, 1.0);
    assert_exact("c0", SmallT, 1.0);
    assert_exact("l(inf)", BigT, 1.0);
    assert_exact("l(inf)", SmallT, 2.0);
    assert_exact("L(inf)", BigT, 2.0);
    assert_exact("L(inf)", SmallT, 2.0);
    assert_exact("c01", BigT, 2.0);
    assert_exact("c01", SmallT, 2.0);
    for p in ["1", "2", "inf"] {
        assert_exact(&format!("sum({p},l(1),l(1))"), SmallT, 2.0);
    }
    assert_exact("sum(2,l(1),l(1))", BigT, (2.0 + root2).sqrt());
    for r in [2.0, 3.0, 10.0] {
        assert_exact(&format!("xr({r})"), SmallT, 1.0 + 1.0 / r);
    }
    assert_exact("gurarii", BigT, 2.0);
    assert_exact("gurarii", SmallT, 1.0);
    assert_exact("cksplit", Mu1, 1.5);
    assert_exact("cksplit", Mu2, 1.5);
    assert_exact("cksplit", BigT, 1.0);
    assert_exact("cksplit", SmallT, 2.0);
    assert_exact("dual(c0sum(l(2)))", BigT, 2.0);
    finish(1, "golden index table", t0, Duration::from_secs(1));
}

#[test]
fn acceptance_2_closed_form_identity_sweep() {
    let t0 = Instant::now();
    let report = run_experiment("f-identity-sweep", &ExperimentParams::default()).unwrap();
    assert!(report.passed(), "threshold: {}", report.threshold);
    assert!(
        report.value <= IDENTITY_TOL,
        "worst deviation {}",
        report.value
    );
    finish(2, "closed-form identity sweep", t0, Duration::from_secs(1));
}

#[test]
fn acceptance_3_sign_family_thinness() {
    let t0 = Instant::now();
    let report = run_experiment("pm-theta-l1sum", &ExperimentParams::default()).unwrap();
    assert!(report.passed(), "threshold: {}", report.threshold);
    assert!(
        report.value >= (4.0f64 - 0.05).sqrt(),
        "value {} below the net threshold",
        report.value
    );
    finish(3, "sign-family thinness", t0, Duration::from_secs(60));
}

#[test]
fn acceptance_4_boundary_coupled_thinness() {
    let t0 = Instant::now();
    let report = run_experiment("xr-thinness", &ExperimentParams::default()).unwrap();
    assert!(report.passed(), "threshold: {}", report.threshold);
    assert!(
        report.value >= 1.45 && report.value <= 1.55,
        "value {} outside [1.45, 1.55]",
        report.value
    );
    let bump_line = report
        .details
        .iter()
        .find(|d| d.contains("penultimate"))
        .expect("bump certificate line");
    assert!(bump_line.contains("1.50"), "certificate line: {bump_line}");
    finish(4, "boundary-coupled thinness", t0, Duration::from_secs(30));
}

#[test]
fn acceptance_5_basis_witness_bracketing() {
    let t0 = Instant::now();
    for p in [1.0, 1.5, 2.0, 4.0] {
        let mut prev = f64::NEG_INFINITY;
        for n in [4usize, 16, 64, 256] {
            let params = ExperimentParams {
                p: Some(p),
                n: Some(n),
                ..Default::default()
            };
            let report = run_experiment("lp-basis-thinness", &params).unwrap();
            assert!(
                report.passed(),
                "p = {p}, n = {n}: value {} vs {}",
                report.value,
                report.threshold
            );
            assert!(
                report.value >= prev,
                "p = {p}: value must not decrease in n ({prev} -> {})",
                report.value
            );
            prev = report.value;
            if p == 1.0 && n == 256 {
                assert!(report.value >= 1.99, "l_1 value {} at n = 256", report.value);
            }
        }
    }
    finish(5, "basis-witness bracketing", t0, Duration::from_secs(120));
}

#[test]
fn acceptance_6_antipodal_exactness() {
    let t0 = Instant::now();
    for p in [1.0, 1.5, 2.0, 3.0] {
        let model = FiniteModel::LpCoords {
            p,
            n: 8,
            weights: None,
        };
        let mut plus = vec![0.0; 8];
        plus[0] = 1.0;
        let mut minus = vec![0.0; 8];
        minus[0] = -1.0;
        let family = WitnessFamily {
            model: model.clone(),
            vectors: vec![plus, minus],
            construction: "antipodal pair".into(),
            citation: "Whitley".into(),
        };
        let out = eval_inf_max(&model, &family, &OptConfig::default()).unwrap();
        let expected = 2f64.powf(1.0 / p);
        assert!(
            (out.value - expected).abs() <= ANTIPODAL_TOL,
            "p = {p}: {} vs {expected}",
            out.value
        );
    }
    finish(6, "antipodal exactness", t0, Duration::from_secs(10));
}

#[test]
fn acceptance_7_two_ball_covering() {
    let t0 = Instant::now();
    let report = run_experiment("linf-two-ball-cover", &ExperimentParams::default()).unwrap();
    assert!(report.passed(), "threshold: {}", report.threshold);
    assert!(
        (report.value - 1.0).abs() <= COVER_TOL,
        "sup-min {}",
        report.value
    );
    let demo = renorm_cover_demo(8, 4).unwrap();
    assert!(demo.covered, "renorm demo report:\n{}", demo.report);
    finish(7, "two-ball covering", t0, Duration::from_secs(30));
}

#[test]
fn acceptance_8_step_witness_bracketing() {
    let t0 = Instant::now();
    for p in [1.0, 2.0] {
        let mut by_n = Vec::new();
        for n in [8usize, 32] {
            let params = ExperimentParams {
                p: Some(p),
                n: Some(n),
                ..Default::default()
            };
            let report = run_experiment("lp01-step-thinness", &params).unwrap();
            assert!(
                report.passed(),
                "p = {p}, n = {n}: value {} vs {}",
                report.value,
                report.threshold
            );
            by_n.push(report.value);
        }
        assert!(
            by_n[1] > by_n[0],
            "p = {p}: value at 32 witnesses ({}) must exceed value at 8 ({})",
            by_n[1],
            by_n[0]
        );
    }
    finish(8, "step-witness bracketing", t0, Duration::from_secs(60));
}

fn random_expr(rng: &mut ChaCha12Rng, depth: usize) -> SpaceExpr {
    let finite_ps = [1.0, 1.5, 2.0, 3.0];
    if depth == 0 || rng.random::<f64>() < 0.35 {
        let atom = match rng.random_range(0..10u32) {
            0 => AtomKind::Lp(finite_ps[rng.random_range(0..4)]),
            1 => AtomKind::Lp(f64::INFINITY),
            2 => AtomKind::C0,
            3 => AtomKind::Lp01(finite_ps[rng.random_range(0..4)]),
            4 => AtomKind::C01,
            5 => AtomKind::CKsplit,
            6 => AtomKind::Xr(if rng.random::<bool>() { 2.0 } else { 3.0 }),
            7 => AtomKind::Gurarii,
            8 => AtomKind::FiniteDim(rng.random_range(1..4)),
            _ => AtomKind::ReflexiveGeneric,
        };
        return SpaceExpr::atom(atom);
    }
    match rng.random_range(0..4u32) {
        0 => {
            let p = if rng.random::<bool>() {
                finite_ps[rng.random_range(0..4)]
            } else {
                f64::INFINITY
            };
            let left = random_expr(rng, depth - 1);
            let right = random_expr(rng, depth - 1);
            SpaceExpr::sum_p(p, left, right)
        }
        1 => {
            let k = rng.random_range(1..3usize);
            SpaceExpr::C0Sum((0..k).map(|_| random_expr(rng, depth - 1)).collect())
        }
        2 => {
            let k = rng.random_range(1..3usize);
            SpaceExpr::LpSum {
                p: finite_ps[rng.random_range(0..4)],
                family: (0..k).map(|_| random_expr(rng, depth - 1)).collect(),
            }
        }
        _ => SpaceExpr::dual(random_expr(rng, depth - 1)),
    }
}

#[test]
fn acceptance_9_engine_property_suite() {
    let t0 = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(9);
    let mut orders = Vec::new();
    for _ in 0..10 {
        let mut order = APPLY_ORDER.to_vec();
        order.shuffle(&mut rng);
        orders.push(order);
    }
    let mut exprs: Vec<SpaceExpr> = (0..50).map(|_| random_expr(&mut rng, 4)).collect();
    // Guaranteed trigger cases for the dual upgrade below.
    exprs.push(SpaceExpr::atom(AtomKind::C0));
    exprs.push(parse("c0sum(l(2))").unwrap());
    let mut dual_upgrades = 0usize;
    for expr in &exprs {
        let base = analyze(expr).unwrap_or_else(|e| panic!("contradiction on {expr}: {e}"));
        for order in &orders {
            let alt = analyze_with_rule_order(expr, order).unwrap();
            assert_eq!(base, alt, "rule order changed the report for {expr}");
        }
        let iv = &base.intervals;
        use Quantity::{BigT, Mu1, Mu2, SmallT};
        assert!(
            iv[Mu1].lo <= iv[SmallT].hi,
            "{expr}: mu1.lo {} > t.hi {}",
            iv[Mu1].lo,
            iv[SmallT].hi
        );
        assert!(
            iv[BigT].lo <= iv[Mu2].hi,
            "{expr}: T.lo {} > mu2.hi {}",
            iv[BigT].lo,
            iv[Mu2].hi
        );
        if iv[SmallT].is_exact(1.0) {
            let dual = analyze(&SpaceExpr::dual(expr.clone())).unwrap();
            let big_t = dual.intervals[BigT];
            assert!(
                big_t.is_exact(2.0),
                "t({expr}) = 1 must force T = 2 in the dual, got [{}, {}]",
                big_t.lo,
                big_t.hi
            );
            dual_upgrades += 1;
        }
    }
    assert!(dual_upgrades >= 2, "expected dual upgrade cases to occur");
    finish(9, "engine property suite", t0, Duration::from_secs(10));
}
