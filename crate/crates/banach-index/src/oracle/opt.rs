//! Projected subgradient search over a model's unit sphere, shared by the
//! inf-max, sup-min, and averaged objectives. Distances to sparse witness
//! vectors are evaluated incrementally from per-block power sums so the
//! large coordinate-model instances stay cheap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::models::{nullspace_basis, powp, rootp, FiniteModel, WitnessFamily};

use super::{OptConfig, OracleError, OracleResult, OracleStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum Goal {
    MinOfMax,
    MaxOfMin,
    MinOfAvg,
    MaxOfAvg,
}

impl Goal {
    fn is_min(self) -> bool {
        matches!(self, Goal::MinOfMax | Goal::MinOfAvg)
    }

    fn is_avg(self) -> bool {
        matches!(self, Goal::MinOfAvg | Goal::MaxOfAvg)
    }
}

fn better(a: f64, b: f64, goal: Goal) -> bool {
    if goal.is_min() {
        a < b
    } else {
        a > b
    }
}

/// Incremental distance evaluation for coordinate models with finite
/// exponents: per-block power sums of the iterate are corrected on each
/// witness's support instead of re-scanning every coordinate.
struct SparseEval {
    outer_p: f64,
    coord_block: Vec<usize>,
    coord_weight: Vec<f64>,
    block_p: Vec<f64>,
    supports: Vec<Vec<(usize, f64)>>,
    touched: Vec<Vec<usize>>,
    coord_pow: Vec<f64>,
    block_pow: Vec<f64>,
    block_outer: Vec<f64>,
    total: f64,
    adj: Vec<(usize, f64)>,
}

impl SparseEval {
    fn try_new(model: &FiniteModel, witnesses: &[Vec<f64>]) -> Option<SparseEval> {
        let mut blocks: Vec<(f64, usize, Option<Vec<f64>>)> = Vec::new();
        let outer_p = match model {
            FiniteModel::LpCoords { p, n, weights } if p.is_finite() => {
                blocks.push((*p, *n, weights.clone()));
                *p
            }
            FiniteModel::PSum { p, parts } if p.is_finite() => {
                for part in parts {
                    match part {
                        FiniteModel::LpCoords { p, n, weights } if p.is_finite() => {
                            blocks.push((*p, *n, weights.clone()));
                        }
                        _ => return None,
                    }
                }
                *p
            }
            _ => return None,
        };
        let dim: usize = blocks.iter().map(|b| b.1).sum();
        let mut coord_block = Vec::with_capacity(dim);
        let mut coord_weight = Vec::with_capacity(dim);
        let mut block_p = Vec::with_capacity(blocks.len());
        for (bi, (p, n, weights)) in blocks.iter().enumerate() {
            block_p.push(*p);
            for j in 0..*n {
                coord_block.push(bi);
                coord_weight.push(weights.as_ref().map_or(1.0, |w| w[j]));
            }
        }
        let supports: Vec<Vec<(usize, f64)>> = witnesses
            .iter()
            .map(|w| {
                w.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(j, v)| (j, *v))
                    .collect()
            })
            .collect();
        let touched: Vec<Vec<usize>> = supports
            .iter()
            .map(|s| {
                let mut t: Vec<usize> = s.iter().map(|&(j, _)| coord_block[j]).collect();
                t.dedup();
                t.sort_unstable();
                t.dedup();
                t
            })
            .collect();
        let nblocks = blocks.len();
        Some(SparseEval {
            outer_p,
            coord_block,
            coord_weight,
            block_p,
            supports,
            touched,
            coord_pow: vec![0.0; dim],
            block_pow: vec![0.0; nblocks],
            block_outer: vec![0.0; nblocks],
            total: 0.0,
            adj: Vec::with_capacity(4),
        })
    }

    fn to_outer(&self, b: usize, pow_sum: f64) -> f64 {
        let pb = self.block_p[b];
        if pb == self.outer_p {
            pow_sum
        } else {
            powp(rootp(pow_sum, pb), self.outer_p)
        }
    }

    fn rebuild(&mut self, x: &[f64]) {
        self.block_pow.iter_mut().for_each(|b| *b = 0.0);
        for (j, xv) in x.iter().enumerate() {
            let b = self.coord_block[j];
            let c = powp(self.coord_weight[j] * xv.abs(), self.block_p[b]);
            self.coord_pow[j] = c;
            self.block_pow[b] += c;
        }
        self.total = 0.0;
        for b in 0..self.block_pow.len() {
            self.block_outer[b] = self.to_outer(b, self.block_pow[b]);
            self.total += self.block_outer[b];
        }
    }

    /// d(x, witness wi)^outer_p, assuming rebuild(x) ran for this exact x.
    fn dist_pow(&mut self, wi: usize, x: &[f64]) -> f64 {
        let adj = std::mem::take(&mut self.adj);
        let mut adj = adj;
        adj.clear();
        for &b in &self.touched[wi] {
            adj.push((b, self.block_pow[b]));
        }
        for &(j, wv) in &self.supports[wi] {
            let b = self.coord_block[j];
            let delta =
                powp(self.coord_weight[j] * (x[j] - wv).abs(), self.block_p[b]) - self.coord_pow[j];
            for e in adj.iter_mut() {
                if e.0 == b {
                    e.1 += delta;
                    break;
                }
            }
        }
        let mut t = self.total;
        for &(b, s) in &adj {
            t += self.to_outer(b, s.max(0.0)) - self.block_outer[b];
        }
        self.adj = adj;
        t.max(0.0)
    }
}

/// Fills `out` with a subgradient of the model norm at `d` and returns the
/// norm. The nonsmooth cases pick the first attaining coordinate or block.
fn norm_gradient(model: &FiniteModel, d: &[f64], out: &mut [f64]) -> f64 {
    match model {
        FiniteModel::LpCoords { p, weights, .. } => {
            let w = |j: usize| weights.as_ref().map_or(1.0, |v| v[j]);
            if p.is_infinite() {
                out.iter_mut().for_each(|g| *g = 0.0);
                let mut arg = 0;
                let mut nrm = 0.0;
                for (j, dv) in d.iter().enumerate() {
                    let s = w(j) * dv.abs();
                    if s > nrm {
                        nrm = s;
                        arg = j;
                    }
                }
                if nrm > 0.0 {
                    out[arg] = w(arg) * d[arg].signum();
                }
                nrm
            } else if *p == 1.0 {
                let mut nrm = 0.0;
                for (j, dv) in d.iter().enumerate() {
                    nrm += w(j) * dv.abs();
                    out[j] = if *dv == 0.0 { 0.0 } else { w(j) * dv.signum() };
                }
                nrm
            } else {
                let mut sum = 0.0;
                for (j, dv) in d.iter().enumerate() {
                    sum += powp(w(j) * dv.abs(), *p);
                }
                let nrm = rootp(sum, *p);
                if nrm == 0.0 {
                    out.iter_mut().for_each(|g| *g = 0.0);
                    return 0.0;
                }
                let scale = powp(nrm, *p - 1.0).recip();
                for (j, dv) in d.iter().enumerate() {
                    out[j] = if *dv == 0.0 {
                        0.0
                    } else {
                        powp(w(j) * dv.abs(), *p - 1.0) * w(j) * dv.signum() * scale
                    };
                }
                nrm
            }
        }
        FiniteModel::PSum { p, parts } => {
            let mut offset = 0;
            let mut norms = Vec::with_capacity(parts.len());
            for part in parts {
                let dpart = part.dim();
                let nb = norm_gradient(
                    part,
                    &d[offset..offset + dpart],
                    &mut out[offset..offset + dpart],
                );
                norms.push((offset, dpart, nb));
                offset += dpart;
            }
            if p.is_infinite() {
                let mut arg = 0;
                let mut nrm = 0.0;
                for (i, &(_, _, nb)) in norms.iter().enumerate() {
                    if nb > nrm {
                        nrm = nb;
                        arg = i;
                    }
                }
                for (i, &(off, len, _)) in norms.iter().enumerate() {
                    if i != arg {
                        out[off..off + len].iter_mut().for_each(|g| *g = 0.0);
                    }
                }
                if nrm == 0.0 {
                    out.iter_mut().for_each(|g| *g = 0.0);
                }
                nrm
            } else {
                let sum: f64 = norms.iter().map(|&(_, _, nb)| powp(nb, *p)).sum();
                let nrm = rootp(sum, *p);
                if nrm == 0.0 {
                    out.iter_mut().for_each(|g| *g = 0.0);
                    return 0.0;
                }
                let scale = powp(nrm, *p - 1.0).recip();
                for &(off, len, nb) in &norms {
                    let factor = powp(nb, *p - 1.0) * scale;
                    out[off..off + len].iter_mut().for_each(|g| *g *= factor);
                }
                nrm
            }
        }
        FiniteModel::GridCk { .. } => {
            out.iter_mut().for_each(|g| *g = 0.0);
            let mut arg = 0;
            let mut nrm = 0.0;
            for (j, dv) in d.iter().enumerate() {
                if dv.abs() > nrm {
                    nrm = dv.abs();
                    arg = j;
                }
            }
            if nrm > 0.0 {
                out[arg] = d[arg].signum();
            }
            nrm
        }
        FiniteModel::RenormMax { base, proj_coords } => {
            let w = |j: usize| match &**base {
                FiniteModel::LpCoords {
                    weights: Some(v), ..
                } => v[j],
                _ => 1.0,
            };
            let mut in_proj = vec![false; d.len()];
            for &j in proj_coords {
                in_proj[j] = true;
            }
            let side_max = |want: bool| {
                let mut arg = None;
                let mut nrm = 0.0;
                for (j, dv) in d.iter().enumerate() {
                    if in_proj[j] == want && w(j) * dv.abs() > nrm {
                        nrm = w(j) * dv.abs();
                        arg = Some(j);
                    }
                }
                (arg, nrm)
            };
            let (parg, pn) = side_max(true);
            let (carg, cn) = side_max(false);
            out.iter_mut().for_each(|g| *g = 0.0);
            let (arg, nrm) = if pn >= cn { (parg, pn) } else { (carg, cn) };
            if let (Some(j), true) = (arg, nrm > 0.0) {
                out[j] = w(j) * d[j].signum();
            }
            pn.max(cn)
        }
    }
}

struct StartOutcome {
    best_f: f64,
    best_x: Vec<f64>,
    status: OracleStatus,
}

pub(super) struct Searcher {
    model: FiniteModel,
    witnesses: Vec<Vec<f64>>,
    nullspace: Option<Vec<Vec<f64>>>,
    sparse: Option<SparseEval>,
    q: f64,
    dim: usize,
    dist_buf: Vec<f64>,
    diff_buf: Vec<f64>,
    grad_buf: Vec<f64>,
    proj_buf: Vec<f64>,
}

impl Searcher {
    pub(super) fn new(model: &FiniteModel, witnesses: &[Vec<f64>]) -> Result<Searcher, OracleError> {
        model.validate()?;
        let dim = model.dim();
        for w in witnesses {
            if w.len() != dim {
                return Err(OracleError::Model(
                    crate::models::ModelError::DimensionMismatch {
                        expected: dim,
                        got: w.len(),
                    },
                ));
            }
        }
        let nullspace = match &model {
            FiniteModel::GridCk { m, constraints } => Some(nullspace_basis(*m, constraints)),
            _ => None,
        };
        let sparse = SparseEval::try_new(model, witnesses);
        let q = sparse.as_ref().map_or(1.0, |s| s.outer_p);
        Ok(Searcher {
            model: model.clone(),
            witnesses: witnesses.to_vec(),
            nullspace,
            sparse,
            q,
            dim,
            dist_buf: vec![0.0; witnesses.len()],
            diff_buf: vec![0.0; dim],
            grad_buf: vec![0.0; dim],
            proj_buf: vec![0.0; dim],
        })
    }

    /// Project into the constraint nullspace (grids) and scale back to the
    /// unit sphere of the model norm.
    pub(super) fn retract_point(&mut self, x: &mut [f64]) -> Result<(), OracleError> {
        if let Some(basis) = &self.nullspace {
            self.proj_buf.iter_mut().for_each(|v| *v = 0.0);
            for b in basis {
                let dot: f64 = b.iter().zip(x.iter()).map(|(bi, xi)| bi * xi).sum();
                for (pj, bj) in self.proj_buf.iter_mut().zip(b) {
                    *pj += dot * bj;
                }
            }
            x.copy_from_slice(&self.proj_buf);
        }
        let nrm = self.model.norm(x)?;
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(OracleError::Degenerate);
        }
        x.iter_mut().for_each(|xi| *xi /= nrm);
        Ok(())
    }

    /// Distances from x to every witness, stored as d^q in dist_buf.
    fn eval_distances(&mut self, x: &[f64]) -> Result<(), OracleError> {
        if let Some(sp) = &mut self.sparse {
            sp.rebuild(x);
            for i in 0..self.witnesses.len() {
                self.dist_buf[i] = sp.dist_pow(i, x);
            }
            return Ok(());
        }
        for i in 0..self.witnesses.len() {
            for (j, db) in self.diff_buf.iter_mut().enumerate() {
                *db = x[j] - self.witnesses[i][j];
            }
            self.dist_buf[i] = self.model.norm(&self.diff_buf)?;
        }
        Ok(())
    }

    /// Index of the witness attaining the max (MinOfMax) or min (MaxOfMin)
    /// distance; first index wins ties.
    fn attaining(&self, goal: Goal) -> usize {
        let want_max = matches!(goal, Goal::MinOfMax);
        let mut arg = 0;
        for i in 1..self.dist_buf.len() {
            let b = if want_max {
                self.dist_buf[i] > self.dist_buf[arg]
            } else {
                self.dist_buf[i] < self.dist_buf[arg]
            };
            if b {
                arg = i;
            }
        }
        arg
    }

    fn objective_from_buf(&self, goal: Goal) -> f64 {
        if goal.is_avg() {
            let sum: f64 = self.dist_buf.iter().map(|&d| rootp(d, self.q)).sum();
            sum / self.dist_buf.len() as f64
        } else {
            rootp(self.dist_buf[self.attaining(goal)], self.q)
        }
    }

    pub(super) fn objective(&mut self, x: &[f64], goal: Goal) -> Result<f64, OracleError> {
        self.eval_distances(x)?;
        Ok(self.objective_from_buf(goal))
    }

    /// Subgradient direction of the objective at x; dist_buf must already
    /// hold the distances for this x.
    fn direction_from_buf(&mut self, x: &[f64], goal: Goal, out: &mut [f64]) {
        if goal.is_avg() {
            out.iter_mut().for_each(|g| *g = 0.0);
            let wn = self.witnesses.len() as f64;
            for i in 0..self.witnesses.len() {
                for (j, db) in self.diff_buf.iter_mut().enumerate() {
                    *db = x[j] - self.witnesses[i][j];
                }
                norm_gradient(&self.model, &self.diff_buf, &mut self.grad_buf);
                for (o, g) in out.iter_mut().zip(&self.grad_buf) {
                    *o += g / wn;
                }
            }
        } else {
            let arg = self.attaining(goal);
            for (j, db) in self.diff_buf.iter_mut().enumerate() {
                *db = x[j] - self.witnesses[arg][j];
            }
            norm_gradient(&self.model, &self.diff_buf, out);
        }
    }

    fn run_start(
        &mut self,
        start: &[f64],
        goal: Goal,
        cfg: &OptConfig,
    ) -> Result<StartOutcome, OracleError> {
        let mut x = start.to_vec();
        self.retract_point(&mut x)?;
        let mut fx = self.objective(&x, goal)?;
        let mut best_x = x.clone();
        let mut best_f = fx;
        let mut step = cfg.step0;
        let mut stall = 0u32;
        let mut status = OracleStatus::IterationCap;
        let mut dir = vec![0.0; self.dim];
        for _ in 0..cfg.max_iters {
            self.direction_from_buf(&x, goal, &mut dir);
            let gn = dir.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gn == 0.0 {
                status = OracleStatus::Converged;
                break;
            }
            let scale = if goal.is_min() { -step / gn } else { step / gn };
            for (xj, gj) in x.iter_mut().zip(&dir) {
                *xj += scale * gj;
            }
            self.retract_point(&mut x)?;
            fx = self.objective(&x, goal)?;
            if better(fx, best_f, goal) {
                best_f = fx;
                best_x.copy_from_slice(&x);
                stall = 0;
            } else {
                stall += 1;
            }
            step *= 0.999;
            if stall >= 25 {
                step *= 0.5;
                stall = 0;
            }
            if step < cfg.tol {
                status = OracleStatus::Converged;
                break;
            }
        }
        Ok(StartOutcome {
            best_f,
            best_x,
            status,
        })
    }

    fn gaussian(rng: &mut ChaCha12Rng) -> f64 {
        let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Random direction in the feasible set (unnormalized; retraction
    /// happens at the start of each run).
    pub(super) fn random_point(&self, rng: &mut ChaCha12Rng) -> Vec<f64> {
        match &self.nullspace {
            Some(basis) => {
                let mut x = vec![0.0; self.dim];
                for b in basis {
                    let c = Self::gaussian(rng);
                    for (xj, bj) in x.iter_mut().zip(b) {
                        *xj += c * bj;
                    }
                }
                x
            }
            None => (0..self.dim).map(|_| Self::gaussian(rng)).collect(),
        }
    }
}

pub(super) fn optimize(
    model: &FiniteModel,
    family: &WitnessFamily,
    goal: Goal,
    cfg: &OptConfig,
    extra_candidates: &[Vec<f64>],
) -> Result<OracleResult, OracleError> {
    cfg.validate()?;
    if family.model != *model {
        return Err(OracleError::ModelMismatch);
    }
    family.validate()?;
    let mut searcher = Searcher::new(model, &family.vectors)?;
    let mut starts: Vec<Vec<f64>> = Vec::new();
    starts.extend(family.vectors.iter().cloned());
    starts.extend(
        family
            .vectors
            .iter()
            .map(|w| w.iter().map(|v| -v).collect()),
    );
    starts.extend(extra_candidates.iter().cloned());
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.multistarts {
        starts.push(searcher.random_point(&mut rng));
    }
    let mut outcomes = Vec::with_capacity(starts.len());
    for s in &starts {
        outcomes.push(searcher.run_start(s, goal, cfg)?);
    }
    let mut best = 0;
    for i in 1..outcomes.len() {
        if better(outcomes[i].best_f, outcomes[best].best_f, goal) {
            best = i;
        }
    }
    let starts_agreeing = outcomes
        .iter()
        .filter(|o| (o.best_f - outcomes[best].best_f).abs() <= 1e-6)
        .count();
    let value = searcher.objective(&outcomes[best].best_x, goal)?;
    Ok(OracleResult {
        value,
        argpoint: outcomes[best].best_x.clone(),
        status: outcomes[best].status,
        starts_agreeing,
    })
}

/// Local ascent used by the covering check: a single start, maximizing the
/// min distance to the centers.
pub(super) fn ascend_min_distance(
    searcher: &mut Searcher,
    start: &[f64],
    cfg: &OptConfig,
) -> Result<(f64, Vec<f64>), OracleError> {
    let out = searcher.run_start(start, Goal::MaxOfMin, cfg)?;
    Ok((out.best_f, out.best_x))
}
