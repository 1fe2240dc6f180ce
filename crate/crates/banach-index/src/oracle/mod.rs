//! Numerical sphere oracles: inf-of-max and sup-of-min distance
//! optimization against witness families, averaged variants, covering
//! verification, and the closed-form two-term identity used by the p-sum
//! thinness argument.

mod dd;
mod opt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{FiniteModel, ModelError, WitnessFamily};

use dd::Dd;
use opt::Goal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub multistarts: usize,
    pub max_iters: usize,
    pub step0: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig {
            multistarts: 16,
            max_iters: 2000,
            step0: 0.1,
            tol: 1e-9,
            seed: 42,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.multistarts == 0 || self.max_iters == 0 {
            return Err(OracleError::Config(
                "multistarts and max_iters must be positive".into(),
            ));
        }
        if !(self.step0 > 0.0) || !(self.tol > 0.0) {
            return Err(OracleError::Config("step0 and tol must be positive".into()));
        }
        if self.tol >= self.step0 {
            return Err(OracleError::Config("tol must be smaller than step0".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStatus {
    Converged,
    IterationCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    pub argpoint: Vec<f64>,
    pub status: OracleStatus,
    pub starts_agreeing: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("witness family does not live on the supplied model")]
    ModelMismatch,
    #[error("optimizer configuration invalid: {0}")]
    Config(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("retraction hit a zero or non-finite norm")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MuMode {
    Inf,
    Sup,
}

/// Best found value of x -> max_i ||x_i - x|| over the model's unit sphere:
/// an upper estimate of the true infimum (thinness certificate).
pub fn eval_inf_max(
    model: &FiniteModel,
    w: &WitnessFamily,
    cfg: &OptConfig,
) -> Result<OracleResult, OracleError> {
    opt::optimize(model, w, Goal::MinOfMax, cfg, &[])
}

/// As eval_inf_max, with extra warm-start candidates; the result never
/// exceeds the objective at any supplied candidate.
pub fn eval_inf_max_with_candidates(
    model: &FiniteModel,
    w: &WitnessFamily,
    cfg: &OptConfig,
    candidates: &[Vec<f64>],
) -> Result<OracleResult, OracleError> {
    opt::optimize(model, w, Goal::MinOfMax, cfg, candidates)
}

/// Best found value of x -> min_i ||x_i - x|| maximized over the sphere:
/// a lower estimate of the true supremum (covering-radius certificate).
pub fn eval_sup_min(
    model: &FiniteModel,
    centers: &WitnessFamily,
    cfg: &OptConfig,
) -> Result<OracleResult, OracleError> {
    opt::optimize(model, centers, Goal::MaxOfMin, cfg, &[])
}

pub fn eval_sup_min_with_candidates(
    model: &FiniteModel,
    centers: &WitnessFamily,
    cfg: &OptConfig,
    candidates: &[Vec<f64>],
) -> Result<OracleResult, OracleError> {
    opt::optimize(model, centers, Goal::MaxOfMin, cfg, candidates)
}

/// Averaged variant: optimizes (1/n) sum_i ||x_i - x|| over the sphere,
/// minimized or maximized per mode.
pub fn eval_mu(
    model: &FiniteModel,
    w: &WitnessFamily,
    mode: MuMode,
    cfg: &OptConfig,
) -> Result<OracleResult, OracleError> {
    eval_mu_with_candidates(model, w, mode, cfg, &[])
}

/// As eval_mu, with extra warm-start candidates. Passing the argpoint of a
/// min-max (resp. max-min) run certifies the averaged value against the
/// worst-case one by dominance instead of relying on two independent
/// optimizations landing on the same point.
pub fn eval_mu_with_candidates(
    model: &FiniteModel,
    w: &WitnessFamily,
    mode: MuMode,
    cfg: &OptConfig,
    candidates: &[Vec<f64>],
) -> Result<OracleResult, OracleError> {
    let goal = match mode {
        MuMode::Inf => Goal::MinOfAvg,
        MuMode::Sup => Goal::MaxOfAvg,
    };
    opt::optimize(model, w, goal, cfg, candidates)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub covered: bool,
    pub worst_value: f64,
    pub worst_point: Vec<f64>,
}

/// Samples random unit and ball points, runs local ascent on min-distance
/// from the worst ones, and reports whether every probe stayed within
/// `radius` of some center.
pub fn verify_cover(
    model: &FiniteModel,
    centers: &WitnessFamily,
    radius: f64,
    samples: usize,
    cfg: &OptConfig,
) -> Result<CoverReport, OracleError> {
    use rand::{Rng, SeedableRng};
    cfg.validate()?;
    if !(radius > 0.0) {
        return Err(OracleError::Domain("radius must be positive".into()));
    }
    if centers.model != *model {
        return Err(OracleError::ModelMismatch);
    }
    centers.validate()?;
    let mut searcher = opt::Searcher::new(model, &centers.vectors)?;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(cfg.seed);
    const TOP_K: usize = 8;
    let mut frontier: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut worst_value = f64::NEG_INFINITY;
    let mut worst_point = Vec::new();
    for i in 0..samples.max(1) {
        let mut x = searcher.random_point(&mut rng);
        searcher.retract_point(&mut x)?;
        if i % 2 == 1 {
            // interior probe: the covering claim extends to the whole ball
            let t: f64 = rng.random();
            x.iter_mut().for_each(|v| *v *= t);
        }
        let value = searcher.objective(&x, Goal::MaxOfMin)?;
        if value > worst_value {
            worst_value = value;
            worst_point = x.clone();
        }
        if frontier.len() < TOP_K || value > frontier.last().map_or(f64::NEG_INFINITY, |f| f.0) {
            frontier.push((value, x));
            frontier.sort_by(|a, b| b.0.total_cmp(&a.0));
            frontier.truncate(TOP_K);
        }
    }
    for (_, start) in &frontier {
        let (value, point) = opt::ascend_min_distance(&mut searcher, start, cfg)?;
        if value > worst_value {
            worst_value = value;
            worst_point = point;
        }
    }
    Ok(CoverReport {
        covered: worst_value <= radius + 1e-9,
        worst_value,
        worst_point,
    })
}

/// Formula value ((cos t)^(2/p) + xi)^p + ((sin t)^(2/p) + (1-xi^p)^(1/p))^p,
/// evaluated in extended precision so the 2^p identity survives to 1e-12
/// in absolute terms even at p = 16.
pub fn f_theta_xi(p: f64, theta: f64, xi: f64) -> Result<f64, OracleError> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(OracleError::Domain(format!(
            "p must be >= 1 and finite, got {p}"
        )));
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(OracleError::Domain(format!(
            "theta must lie in [0, pi/2], got {theta}"
        )));
    }
    if !(0.0..=1.0).contains(&xi) {
        return Err(OracleError::Domain(format!(
            "xi must lie in [0, 1], got {xi}"
        )));
    }
    let (c, s) = dd::cos_sin(theta);
    let pd = Dd::from_f64(p);
    let two_over_p = Dd::from_f64(2.0).div(pd);
    let a = c.pow(two_over_p);
    let b = s.pow(two_over_p);
    let xid = Dd::from_f64(xi);
    let xip = xid.pow(pd);
    let tail = Dd::ONE.sub(xip).pow(Dd::ONE.div(pd));
    let t1 = a.add(xid).pow(pd);
    let t2 = b.add(tail).pow(pd);
    Ok(t1.add(t2).to_f64())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenormDemo {
    pub covered: bool,
    pub report: String,
}

/// Finite-stage demonstration that the max-renormed sup-norm space is
/// covered by the two unit balls around +-e1 at radius 1 while basis
/// witnesses in the projected block leave a fresh coordinate at distance 1.
pub fn renorm_cover_demo(n: usize, proj_size: usize) -> Result<RenormDemo, OracleError> {
    if proj_size == 0 || proj_size >= n {
        return Err(OracleError::Domain(format!(
            "projection size {proj_size} must satisfy 0 < proj_size < n = {n}"
        )));
    }
    let model = FiniteModel::RenormMax {
        base: Box::new(FiniteModel::LpCoords {
            p: f64::INFINITY,
            n,
            weights: None,
        }),
        proj_coords: (0..proj_size).collect(),
    };
    let unit = |i: usize, sign: f64| {
        let mut v = vec![0.0; n];
        v[i] = sign;
        v
    };
    let centers = WitnessFamily {
        model: model.clone(),
        vectors: vec![unit(0, 1.0), unit(0, -1.0)],
        construction: "antipodal pair".into(),
        citation: "Theorem 4.1".into(),
    };
    let cfg = OptConfig::default();
    let cover = verify_cover(&model, &centers, 1.0, 20_000, &cfg)?;
    let witnesses = WitnessFamily {
        model: model.clone(),
        vectors: (0..proj_size).map(|i| unit(i, 1.0)).collect(),
        construction: "projected basis".into(),
        citation: "Theorem 4.1".into(),
    };
    let fresh = unit(n - 1, 1.0);
    let thin = eval_inf_max_with_candidates(&model, &witnesses, &cfg, &[fresh])?;
    let thin_ok = thin.value <= 1.0 + 1e-6;
    let covered = cover.covered && thin_ok;
    let report = format!(
        "two-ball cover at radius 1: worst min-distance {} ({});\n\
         inf-max against {} projected basis witnesses with a fresh coordinate: {} (expected <= 1 + 1e-6: {})",
        crate::format_sig12(cover.worst_value),
        if cover.covered { "covered" } else { "not covered" },
        proj_size,
        crate::format_sig12(thin.value),
        if thin_ok { "yes" } else { "no" },
    );
    Ok(RenormDemo { covered, report })
}
