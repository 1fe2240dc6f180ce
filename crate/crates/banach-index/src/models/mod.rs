//! Finite-dimensional normed models with exact norm evaluation, truncation
//! of space expressions to finite stage, and the classical witness-family
//! constructions used by the sphere oracles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{normalize, AtomKind, SpaceExpr};

/// One homogeneous linear equation sum(c_i * v_i) = 0 over model coordinates,
/// stored sparsely as (index, coefficient) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub coeffs: Vec<(usize, f64)>,
}

/// A concrete finite-dimensional normed space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiniteModel {
    /// Weighted lp coordinates: norm = (sum (w_i |v_i|)^p)^(1/p), sup-type
    /// for p = inf. Weights default to 1.
    LpCoords {
        #[serde(with = "crate::pnum")]
        p: f64,
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    /// lp-combination of the component norms over consecutive blocks.
    PSum {
        #[serde(with = "crate::pnum")]
        p: f64,
        parts: Vec<FiniteModel>,
    },
    /// Grid samples of a continuous function, sup norm, restricted to the
    /// nullspace of the constraint system.
    GridCk {
        m: usize,
        constraints: Vec<LinearConstraint>,
    },
    /// max(norm of the projected part, norm of the complement) over a
    /// sup-norm base.
    RenormMax {
        base: Box<FiniteModel>,
        proj_coords: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dimension mismatch: model has {expected}, vector has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("grid constraint {index} violated (residual {residual:e})")]
    ConstraintViolation { index: usize, residual: f64 },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("witness request needs {requested} vectors but only {available} fit")]
    TooManyWitnesses { requested: usize, available: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

/// The expression has no finite-stage model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{expr} has no finite-stage truncation")]
pub struct UntruncatableError {
    pub expr: String,
}

/// |x|^p for x >= 0 with fast paths for the exponents the experiments use.
pub(crate) fn powp(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else if p == 3.0 {
        x * x * x
    } else if p == 4.0 {
        let s = x * x;
        s * s
    } else if p == 1.5 {
        x * x.sqrt()
    } else {
        x.powf(p)
    }
}

/// x^(1/p) for x >= 0; identity at p = 1, sqrt at p = 2.
pub(crate) fn rootp(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x.sqrt()
    } else {
        x.powf(1.0 / p)
    }
}

impl FiniteModel {
    pub fn dim(&self) -> usize {
        match self {
            FiniteModel::LpCoords { n, .. } => *n,
            FiniteModel::PSum { parts, .. } => parts.iter().map(FiniteModel::dim).sum(),
            FiniteModel::GridCk { m, .. } => *m,
            FiniteModel::RenormMax { base, .. } => base.dim(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::Invalid(msg));
        match self {
            FiniteModel::LpCoords { p, n, weights } => {
                if !(*p >= 1.0) {
                    return bad(format!("exponent p = {p} must be >= 1"));
                }
                if *n == 0 {
                    return bad("dimension must be positive".into());
                }
                if let Some(w) = weights {
                    if w.len() != *n {
                        return bad(format!("{} weights for dimension {n}", w.len()));
                    }
                    if !w.iter().all(|x| x.is_finite() && *x > 0.0) {
                        return bad("weights must be positive and finite".into());
                    }
                }
                Ok(())
            }
            FiniteModel::PSum { p, parts } => {
                if !(*p >= 1.0) {
                    return bad(format!("exponent p = {p} must be >= 1"));
                }
                if parts.is_empty() {
                    return bad("p-sum needs at least one part".into());
                }
                parts.iter().try_for_each(FiniteModel::validate)
            }
            FiniteModel::GridCk { m, constraints } => {
                if *m == 0 {
                    return bad("grid must have at least one node".into());
                }
                for c in constraints {
                    if c.coeffs.iter().any(|(i, x)| *i >= *m || !x.is_finite()) {
                        return bad("constraint references a coordinate outside the grid".into());
                    }
                }
                if nullspace_basis(*m, constraints).is_empty() {
                    return bad("constraint system admits only the zero vector".into());
                }
                Ok(())
            }
            FiniteModel::RenormMax { base, proj_coords } => {
                base.validate()?;
                let sup_base = matches!(**base, FiniteModel::LpCoords { p, .. } if p.is_infinite());
                if !sup_base {
                    return bad("renorm base must be sup-norm coordinates".into());
                }
                let n = base.dim();
                if proj_coords.is_empty() {
                    return bad("projection needs at least one coordinate".into());
                }
                let mut seen = vec![false; n];
                for &i in proj_coords {
                    if i >= n {
                        return bad(format!("projection coordinate {i} outside dimension {n}"));
                    }
                    if seen[i] {
                        return bad(format!("projection coordinate {i} repeated"));
                    }
                    seen[i] = true;
                }
                Ok(())
            }
        }
    }

    /// Exact norm of `v` in this model.
    pub fn norm(&self, v: &[f64]) -> Result<f64, ModelError> {
        let expected = self.dim();
        if v.len() != expected {
            return Err(ModelError::DimensionMismatch {
                expected,
                got: v.len(),
            });
        }
        match self {
            FiniteModel::LpCoords { p, weights, .. } => {
                Ok(lp_norm(*p, v, weights.as_deref()))
            }
            FiniteModel::PSum { p, parts } => {
                let mut offset = 0;
                let mut acc: f64 = 0.0;
                for part in parts {
                    let d = part.dim();
                    let nr = part.norm(&v[offset..offset + d])?;
                    offset += d;
                    if p.is_infinite() {
                        acc = acc.max(nr);
                    } else {
                        acc += powp(nr, *p);
                    }
                }
                Ok(if p.is_infinite() { acc } else { rootp(acc, *p) })
            }
            FiniteModel::GridCk { constraints, .. } => {
                for (index, c) in constraints.iter().enumerate() {
                    let residual: f64 = c.coeffs.iter().map(|&(i, x)| x * v[i]).sum();
                    if residual.abs() > 1e-9 {
                        return Err(ModelError::ConstraintViolation { index, residual });
                    }
                }
                Ok(v.iter().fold(0.0, |m, x| m.max(x.abs())))
            }
            FiniteModel::RenormMax { base, proj_coords } => {
                let mut projected = vec![0.0; v.len()];
                let mut rest = v.to_vec();
                for &i in proj_coords {
                    projected[i] = v[i];
                    rest[i] = 0.0;
                }
                Ok(base.norm(&projected)?.max(base.norm(&rest)?))
            }
        }
    }
}

fn lp_norm(p: f64, v: &[f64], weights: Option<&[f64]>) -> f64 {
    let scaled = |i: usize, x: f64| match weights {
        Some(w) => w[i] * x.abs(),
        None => x.abs(),
    };
    if p.is_infinite() {
        (0..v.len()).fold(0.0, |m, i| m.max(scaled(i, v[i])))
    } else {
        let sum: f64 = (0..v.len()).map(|i| powp(scaled(i, v[i]), p)).sum();
        rootp(sum, p)
    }
}

/// Orthonormal basis of the solution space of the constraint system, via
/// Gaussian elimination followed by Gram-Schmidt. Empty when only the zero
/// vector satisfies the constraints.
pub fn nullspace_basis(m: usize, constraints: &[LinearConstraint]) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = constraints
        .iter()
        .map(|c| {
            let mut row = vec![0.0; m];
            for &(i, x) in &c.coeffs {
                row[i] += x;
            }
            row
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; m];
    let mut rank = 0;
    for col in 0..m {
        let pivot = (rank..rows.len())
            .filter(|&r| rows[r][col].abs() > 1e-12)
            .max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()));
        let Some(pr) = pivot else { continue };
        rows.swap(rank, pr);
        let scale = rows[rank][col];
        for x in &mut rows[rank] {
            *x /= scale;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col].abs() > 0.0 {
                let factor = rows[r][col];
                for c in 0..m {
                    let v = rows[rank][c];
                    rows[r][c] -= factor * v;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..m {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut x = vec![0.0; m];
        x[free] = 1.0;
        for col in 0..m {
            if let Some(r) = pivot_of_col[col] {
                x[col] = -rows[r][free];
            }
        }
        basis.push(x);
    }
    // Gram-Schmidt; the vectors are independent by construction, so no basis
    // vector collapses.
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for mut x in basis {
        for b in &ortho {
            let dot: f64 = x.iter().zip(b).map(|(a, c)| a * c).sum();
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= dot * bi;
            }
        }
        let nrm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nrm > 1e-12 {
            for xi in &mut x {
                *xi /= nrm;
            }
            ortho.push(x);
        }
    }
    ortho
}

/// Finite-stage model of a space expression: coordinates, grids, and block
/// sums of size `n`. The expression is normalized first, so duals that
/// rewrite to concrete spaces truncate fine; irreducible duals do not.
pub fn truncate(expr: &SpaceExpr, n: usize) -> Result<FiniteModel, UntruncatableError> {
    assert!(n >= 1, "truncation size must be positive");
    truncate_normalized(&normalize(expr), n)
}

fn truncate_normalized(expr: &SpaceExpr, n: usize) -> Result<FiniteModel, UntruncatableError> {
    let untrunc = || UntruncatableError {
        expr: expr.to_string(),
    };
    match expr {
        SpaceExpr::Atom(AtomKind::Lp(p)) => Ok(FiniteModel::LpCoords {
            p: *p,
            n,
            weights: None,
        }),
        SpaceExpr::Atom(AtomKind::C0) => Ok(FiniteModel::LpCoords {
            p: f64::INFINITY,
            n,
            weights: None,
        }),
        SpaceExpr::Atom(AtomKind::Lp01(p)) => {
            let w = rootp(1.0 / n as f64, *p);
            Ok(FiniteModel::LpCoords {
                p: *p,
                n,
                weights: Some(vec![w; n]),
            })
        }
        SpaceExpr::Atom(AtomKind::Xr(r)) => {
            assert!(n >= 2, "a grid model of xr needs at least two nodes");
            Ok(FiniteModel::GridCk {
                m: n,
                constraints: vec![LinearConstraint {
                    coeffs: vec![(0, 1.0), (n - 1, -*r)],
                }],
            })
        }
        SpaceExpr::SumP { p, left, right } => Ok(FiniteModel::PSum {
            p: *p,
            parts: vec![
                truncate_normalized(left, n)?,
                truncate_normalized(right, n)?,
            ],
        }),
        SpaceExpr::C0Sum(family) => Ok(FiniteModel::PSum {
            p: f64::INFINITY,
            parts: cycle_truncate(family, n)?,
        }),
        SpaceExpr::LpSum { p, family } => Ok(FiniteModel::PSum {
            p: *p,
            parts: cycle_truncate(family, n)?,
        }),
        _ => Err(untrunc()),
    }
}

fn cycle_truncate(family: &[SpaceExpr], n: usize) -> Result<Vec<FiniteModel>, UntruncatableError> {
    (0..n)
        .map(|j| truncate_normalized(&family[j % family.len()], n))
        .collect()
}

/// A finite set of unit vectors in a model, tagged with the construction
/// that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessFamily {
    pub model: FiniteModel,
    pub vectors: Vec<Vec<f64>>,
    pub construction: String,
    pub citation: String,
}

impl WitnessFamily {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.vectors.is_empty() {
            return Err(ModelError::EmptyInput("witness family"));
        }
        for v in &self.vectors {
            let nrm = self.model.norm(v)?;
            if (nrm - 1.0).abs() > 1e-12 {
                return Err(ModelError::Invalid(format!(
                    "witness has norm {nrm}, expected 1"
                )));
            }
        }
        Ok(())
    }

    fn checked(
        model: FiniteModel,
        vectors: Vec<Vec<f64>>,
        construction: &str,
        citation: &str,
    ) -> Result<Self, ModelError> {
        let family = WitnessFamily {
            model,
            vectors,
            construction: construction.to_owned(),
            citation: citation.to_owned(),
        };
        family.validate()?;
        Ok(family)
    }
}

/// The first k coordinate vectors, scaled to unit norm under the model's
/// weights. The classical nearly-disjoint family of the sequence-space
/// thinness arguments.
pub fn basis_witnesses(model: &FiniteModel, k: usize) -> Result<WitnessFamily, ModelError> {
    let FiniteModel::LpCoords { n, weights, .. } = model else {
        return Err(ModelError::Invalid(
            "basis witnesses need a coordinate model".into(),
        ));
    };
    if k == 0 {
        return Err(ModelError::EmptyInput("witness count"));
    }
    if k > *n {
        return Err(ModelError::TooManyWitnesses {
            requested: k,
            available: *n,
        });
    }
    let vectors = (0..k)
        .map(|i| {
            let mut v = vec![0.0; *n];
            v[i] = match weights {
                Some(w) => 1.0 / w[i],
                None => 1.0,
            };
            v
        })
        .collect();
    WitnessFamily::checked(model.clone(), vectors, "basis", "Whitley")
}

/// The two-block sign family (+-a e1, +-b e1) with a = (cos theta)^(2/p),
/// b = (sin theta)^(2/p), four vectors per theta, on an lp-sum of two
/// l1-blocks of dimension `block_dim`.
pub fn pm_theta_witnesses(
    p: f64,
    thetas: &[f64],
    block_dim: usize,
) -> Result<WitnessFamily, ModelError> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(ModelError::Invalid(format!(
            "the sign family needs finite p > 1, got {p}"
        )));
    }
    if thetas.is_empty() {
        return Err(ModelError::EmptyInput("theta list"));
    }
    if block_dim == 0 {
        return Err(ModelError::Invalid("block dimension must be positive".into()));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let block = FiniteModel::LpCoords {
        p: 1.0,
        n: block_dim,
        weights: None,
    };
    let model = FiniteModel::PSum {
        p,
        parts: vec![block.clone(), block],
    };
    let dim = 2 * block_dim;
    let mut vectors = Vec::with_capacity(4 * thetas.len());
    for &theta in thetas {
        if !(0.0..=half_pi + 1e-12).contains(&theta) {
            return Err(ModelError::Invalid(format!(
                "theta = {theta} outside [0, pi/2]"
            )));
        }
        let a = theta.cos().max(0.0).powf(2.0 / p);
        let b = theta.sin().max(0.0).powf(2.0 / p);
        for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let mut v = vec![0.0; dim];
            v[0] = sa * a;
            v[block_dim] = sb * b;
            vectors.push(v);
        }
    }
    WitnessFamily::checked(model, vectors, "pm_theta", "Proposition 2.13")
}

/// Grid samples of f1(x) = (1-x) + x/r and its negative: the two-element
/// family pinning the thinness of the boundary-coupled function space.
pub fn xr_witnesses(r: f64, m: usize) -> Result<WitnessFamily, ModelError> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(ModelError::Invalid(format!("r = {r} must be > 1")));
    }
    if m < 2 {
        return Err(ModelError::Invalid("grid needs at least two nodes".into()));
    }
    let model = FiniteModel::GridCk {
        m,
        constraints: vec![LinearConstraint {
            coeffs: vec![(0, 1.0), (m - 1, -r)],
        }],
    };
    let f1: Vec<f64> = (0..m)
        .map(|j| {
            let x = j as f64 / (m - 1) as f64;
            (1.0 - x) + x / r
        })
        .collect();
    let f2: Vec<f64> = f1.iter().map(|v| -v).collect();
    WitnessFamily::checked(model, vec![f1, f2], "xr", "Proposition 3.6")
}
