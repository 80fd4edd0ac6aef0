//! Finitely generated max-plus cones and slice spaces.
//!
//! The slice space of a square matrix `Q` between thresholds `alpha <= beta`
//! is the set of finite vectors `x` with `alpha + x <= Q ⊗ x <= beta + x`.
//! When `alpha <= lambda*(Q)` and `beta >= lambda_max(Q)` the supereigenspace
//! side is all of `R^n`, so the slice space is the finite part of the column
//! span of the Kleene star of `Q` normalised by `beta`; those star columns
//! are the generators carried here. Inclusion of the image of a slice space
//! under a max-plus linear map in another slice space is decided on the
//! generators: the map distributes over ⊕ and scalar shifts, and the slice
//! predicate is closed under both, so generator images decide the whole span.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{residual, MpMatrix, MpVector};
use crate::scalar::DEFAULT_TOL;

use crate::spectral::{kleene_star, lambda_star, max_cycle_mean};

/// A slice space `S_alpha^beta(Q)`, optionally carrying a finite generator
/// matrix for its intersection with `R^n`. `alpha = None` encodes an
/// unbounded lower threshold (the subeigenspace / bounded-buffer cone case).
#[derive(Debug, Clone, Serialize)]
pub struct SliceSpace {
    q: MpMatrix,
    alpha: Option<f64>,
    beta: f64,
    generators: Option<MpMatrix>,
}

/// A finitely generated max-plus cone given by generator columns.
#[derive(Debug, Clone)]
pub struct Cone {
    generators: MpMatrix,
}

/// Outcome of an image-inclusion check, with a witness on failure.
#[derive(Debug, Clone)]
pub enum MapInclusion {
    Holds,
    Fails(InclusionFailure),
}

/// Which generator image left the target slice space, and how.
#[derive(Debug, Clone)]
pub struct InclusionFailure {
    /// 0-based generator column index in the source slice space.
    pub generator: usize,
    pub image: MpVector,
    pub reason: String,
}

impl MapInclusion {
    pub fn holds(&self) -> bool {
        matches!(self, MapInclusion::Holds)
    }
}

impl SliceSpace {
    /// Predicate-only slice space; no generator construction is attempted.
    pub fn predicate_only(q: MpMatrix, alpha: f64, beta: f64) -> Result<Self> {
        q.require_square()?;
        if alpha > beta {
            return Err(Error::InvalidThresholds { alpha, beta });
        }
        Ok(SliceSpace { q, alpha: Some(alpha), beta, generators: None })
    }

    /// Builds the slice space of `Q` for `alpha <= beta`, attaching the star
    /// generators when the thresholds fall in the supported region
    /// `alpha <= lambda*(Q)`, `beta >= lambda_max(Q)`. `Q` must have a finite
    /// diagonal. Outside the supported region the result is predicate-only.
    pub fn build(q: MpMatrix, alpha: f64, beta: f64) -> Result<Self> {
        q.require_square()?;
        if alpha > beta {
            return Err(Error::InvalidThresholds { alpha, beta });
        }
        let lam_star = lambda_star(&q)?;
        let Some(lam_star) = lam_star.as_f64() else {
            return Err(Error::Argument(
                "slice-space construction requires a finite diagonal".into(),
            ));
        };
        let lam_max = max_cycle_mean(&q)?
            .as_f64()
            .expect("finite diagonal implies at least one cycle");
        let generators = if alpha <= lam_star + DEFAULT_TOL && beta >= lam_max - DEFAULT_TOL {
            // In this region the star of Q_beta cannot diverge.
            Some(kleene_star(&q.normalize(beta))?)
        } else {
            None
        };
        Ok(SliceSpace { q, alpha: Some(alpha), beta, generators })
    }

    /// The subeigenspace `S_{-inf}^beta(Q)` with generators `(Q_beta)^star`
    /// when the star exists.
    pub fn subeigenspace(q: MpMatrix, beta: f64) -> Result<Self> {
        q.require_square()?;
        let lam_max = max_cycle_mean(&q)?.as_f64();
        let generators = match lam_max {
            Some(lam) if lam > beta + DEFAULT_TOL => None,
            _ => Some(kleene_star(&q.normalize(beta))?),
        };
        Ok(SliceSpace { q, alpha: None, beta, generators })
    }

    pub fn q(&self) -> &MpMatrix {
        &self.q
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    pub fn generators(&self) -> Option<&MpMatrix> {
        self.generators.as_ref()
    }

    /// Evaluates the defining inequalities `alpha + x <= Q ⊗ x <= beta + x`.
    /// Slice spaces live in `R^n`, so epsilon entries in `x` are a domain error.
    /// Comparisons carry the default absolute tolerance; on integer data the
    /// margins are whole numbers, so the slack never changes a verdict there.
    pub fn contains(&self, x: &MpVector) -> Result<bool> {
        self.contains_with_tol(x, DEFAULT_TOL)
    }

    pub fn contains_with_tol(&self, x: &MpVector, tol: f64) -> Result<bool> {
        if x.len() != self.q.cols() {
            return Err(Error::DimensionMismatch(format!(
                "membership of length-{} vector in a dimension-{} slice space",
                x.len(),
                self.q.cols()
            )));
        }
        if !x.is_finite() {
            return Err(Error::EpsilonEntry("slice spaces contain finite vectors only".into()));
        }
        let image = self.q.otimes_vec(x)?;
        for i in 0..x.len() {
            let xi = x.get(i).as_f64().unwrap();
            let Some(gi) = image.get(i).as_f64() else {
                // A row of Q without finite entries maps x out of R^n, so the
                // lower bound can never hold (and without one, epsilon <= beta+x).
                if self.alpha.is_some() {
                    return Ok(false);
                }
                continue;
            };
            if let Some(alpha) = self.alpha {
                if alpha + xi > gi + tol {
                    return Ok(false);
                }
            }
            if gi > self.beta + xi + tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Projective-norm bound on the whole slice space, when the generators
    /// exist and are fully finite: every member is a max-combination of the
    /// generator columns, so its spread is at most the largest column spread.
    pub fn projective_bound(&self) -> Option<f64> {
        let g = self.generators.as_ref()?;
        g.projective_norm().ok()
    }

    /// For two-dimensional slice spaces with finite generators, the bounds
    /// `(lo, hi)` of the half-space form `x_1 + lo <= x_2 <= x_1 + hi`.
    pub fn halfspace_form(&self) -> Option<(f64, f64)> {
        halfspace_of_generators(self.generators.as_ref()?)
    }
}

/// Half-space form of a two-dimensional finite generator span: the members
/// are exactly the vectors with `x_2 - x_1` between the smallest and largest
/// column difference.
pub fn halfspace_of_generators(g: &MpMatrix) -> Option<(f64, f64)> {
    if g.rows() != 2 || !g.is_finite() {
        return None;
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in 0..g.cols() {
        let d = g.get(1, j).as_f64().unwrap() - g.get(0, j).as_f64().unwrap();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Some((lo, hi))
}

impl Cone {
    /// Wraps generator columns; every column must generate something.
    pub fn new(generators: MpMatrix) -> Result<Self> {
        for j in 0..generators.cols() {
            if (0..generators.rows()).all(|i| generators.get(i, j).is_epsilon()) {
                return Err(Error::DegenerateColumn(j));
            }
        }
        Ok(Cone { generators })
    }

    pub fn generators(&self) -> &MpMatrix {
        &self.generators
    }

    /// Membership by residuation: `x` is in the span exactly when the
    /// greatest subsolution reproduces it.
    pub fn contains(&self, x: &MpVector) -> Result<bool> {
        let lambda = residual(&self.generators, x)?;
        Ok(self.generators.otimes_vec(&lambda)? == *x)
    }
}

/// Does `A` map `src` into `dst`? Decided on the generators of `src`; sound
/// and complete for the finite span because `A ⊗ ·` distributes over ⊕ and
/// scalar shifts and the slice predicate is closed under both. A generator
/// image with an epsilon entry leaves `R^n` and is reported as a failure.
pub fn map_inclusion(a: &MpMatrix, src: &SliceSpace, dst: &SliceSpace) -> Result<MapInclusion> {
    let gens = src.generators().ok_or_else(|| {
        Error::Argument("map_inclusion needs a source slice space with generators".into())
    })?;
    if a.cols() != gens.rows() || a.rows() != dst.dim() {
        return Err(Error::DimensionMismatch(format!(
            "inclusion of {}x{} map between dimension-{} and dimension-{} slice spaces",
            a.rows(),
            a.cols(),
            gens.rows(),
            dst.dim()
        )));
    }
    for (j, g) in gens.columns().enumerate() {
        let image = a.otimes_vec(&g)?;
        if !image.is_finite() {
            return Ok(MapInclusion::Fails(InclusionFailure {
                generator: j,
                image,
                reason: "image has an epsilon entry and leaves R^n".into(),
            }));
        }
        if !dst.contains(&image)? {
            return Ok(MapInclusion::Fails(InclusionFailure {
                generator: j,
                image,
                reason: "image violates the target slice inequalities".into(),
            }));
        }
    }
    Ok(MapInclusion::Holds)
}

/// Entrywise minimum of the images `Q^(j) ⊗ x`: the min-of-max-plus-linear
/// generating function. Monotone and homogeneous in `x`.
pub fn min_mpl_apply(qs: &[MpMatrix], x: &MpVector) -> Result<MpVector> {
    if qs.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if !x.is_finite() {
        return Err(Error::EpsilonEntry("min-of-linear is applied to finite vectors".into()));
    }
    let mut acc: Option<Vec<f64>> = None;
    for q in qs {
        let image = q.otimes_vec(x)?;
        let image = image.as_finite().ok_or_else(|| {
            Error::EpsilonEntry("an image under the min-of family left R^n".into())
        })?;
        acc = Some(match acc {
            None => image,
            Some(cur) => cur.into_iter().zip(image).map(|(a, b)| a.min(b)).collect(),
        });
    }
    Ok(MpVector::from_finite(&acc.unwrap()))
}
