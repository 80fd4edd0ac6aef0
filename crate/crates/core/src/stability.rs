//! Certificate-producing stability checkers for switching max-plus linear
//! systems.
//!
//! All certificates are sufficient conditions. The uniform checker looks for
//! a single slice space invariant under every mode; the path-complete checker
//! works with a family of slice spaces and the inclusion relation
//! `R = {(i, l, j) | A^(l) S_i ⊆ S_j}`, certifying either arbitrary switching
//! (a non-empty sub-family closed under every mode, computed as a greatest
//! fixed point) or switching constrained by an automaton (a greatest-fixed-
//! point simulation between automaton states and cones). The strong checker
//! certifies confinement to the cone `{x | Q ⊗ x <= x}`.
//!
//! Cone and mode indices in certificates are 1-based, matching the usual
//! presentation of inclusion triples `(i, l, j)`.

use serde::{Deserialize, Serialize};

use crate::cones::{map_inclusion, min_mpl_apply, MapInclusion, SliceSpace};
use crate::error::{Error, Result};
use crate::matrix::{MpMatrix, MpVector};
use crate::scalar::DEFAULT_TOL;
use crate::smpl::SmplSystem;
use crate::spectral::{eigenvector, is_irreducible, lambda_star, max_cycle_mean};
use crate::switching::SwitchingAutomaton;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    NotCertified,
    UnsupportedRegion,
}

impl Verdict {
    /// Process exit code contract: 0 certified, 1 not certified, 2 unsupported.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Certified => 0,
            Verdict::NotCertified => 1,
            Verdict::UnsupportedRegion => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Notion {
    UniformLipschitz,
    UniformWeakBounded,
    PathCompleteLipschitz,
    PathCompleteWeakBounded,
    StrongBounded,
}

/// A cone as recorded in a certificate. `generating` is a single matrix for
/// ordinary slice spaces and the whole family for the min-of-linear
/// generating function; `alpha = None` encodes an unbounded lower threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeRecord {
    pub generating: Vec<MpMatrix>,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub generators: Option<MpMatrix>,
}

impl ConeRecord {
    fn from_slice(s: &SliceSpace) -> Self {
        ConeRecord {
            generating: vec![s.q().clone()],
            alpha: s.alpha(),
            beta: s.beta(),
            generators: s.generators().cloned(),
        }
    }

    /// Membership predicate of the recorded cone. Non-finite vectors are
    /// outside by convention (members live in R^n).
    pub fn contains(&self, x: &MpVector) -> Result<bool> {
        if !x.is_finite() {
            return Ok(false);
        }
        let image = if self.generating.len() == 1 {
            let img = self.generating[0].otimes_vec(x)?;
            match img.as_finite() {
                Some(v) => v,
                // A row without finite entries: no lower bound can hold.
                None if self.alpha.is_some() => return Ok(false),
                None => {
                    // Upper bounds hold vacuously on epsilon coordinates.
                    let xs = x.as_finite().unwrap();
                    return Ok(img
                        .iter()
                        .zip(&xs)
                        .all(|(gi, &xi)| gi.as_f64().is_none_or(|g| g <= self.beta + xi)));
                }
            }
        } else {
            match min_mpl_apply(&self.generating, x) {
                Ok(img) => img.as_finite().unwrap(),
                Err(Error::EpsilonEntry(_)) => return Ok(false),
                Err(e) => return Err(e),
            }
        };
        let xs = x.as_finite().unwrap();
        Ok(image.iter().zip(&xs).all(|(&gi, &xi)| {
            self.alpha.is_none_or(|a| a + xi <= gi + DEFAULT_TOL)
                && gi <= self.beta + xi + DEFAULT_TOL
        }))
    }
}

/// The outcome of a stability check: the verdict, the notion it concerns,
/// the cones and verified inclusion edges backing it, and numeric bounds
/// where the theory provides them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub verdict: Verdict,
    pub notion: Notion,
    pub cones: Vec<ConeRecord>,
    /// Verified inclusion triples `(i, l, j)`: mode `l` maps cone `i` into
    /// cone `j`. All indices 1-based.
    pub edges: Vec<(usize, usize, usize)>,
    /// Projective-norm bound on every trajectory started inside a certified cone.
    pub proj_bound: Option<f64>,
    /// Conservative interval bounds on the first difference `x(k) - x(k-1)`.
    pub lipschitz_bounds: Option<(f64, f64)>,
    pub diagnostics: Vec<String>,
}

/// The generating function handed to the generic invariance checker.
pub enum GeneratingFunction<'a> {
    Single(&'a MpMatrix),
    MinOf(&'a [MpMatrix]),
}

fn spectral_range(q: &MpMatrix) -> Result<(f64, f64)> {
    let star = lambda_star(q)?.as_f64().ok_or_else(|| {
        Error::Argument("the generating matrix must have finite diagonal entries".into())
    })?;
    let max = max_cycle_mean(q)?
        .as_f64()
        .expect("a finite diagonal guarantees a cycle");
    Ok((star, max))
}

// Interval bound on first differences for trajectories inside a cone of
// projective spread at most `delta`: with entries normalised to [0, delta],
// (A ⊗ x)_i - x_i lies within maxrow_i(A) ± delta.
fn lipschitz_interval(sys: &SmplSystem, delta: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for a in sys.modes() {
        for i in 0..a.rows() {
            let maxrow = (0..a.cols())
                .filter_map(|j| a.get(i, j).as_f64())
                .fold(f64::NEG_INFINITY, f64::max);
            lo = lo.min(maxrow - delta);
            hi = hi.max(maxrow + delta);
        }
    }
    (lo, hi)
}

/// Checks uniform stability with the candidate generating matrix `Q`
/// (commonly the ⊕-sum of the mode matrices). Thresholds default to
/// `lambda*(Q)` and `lambda_max(Q)`. Outside the supported threshold region
/// the slice space has no generator representation and the verdict is
/// `UnsupportedRegion`.
pub fn check_uniform(
    sys: &SmplSystem,
    q: &MpMatrix,
    alpha: Option<f64>,
    beta: Option<f64>,
) -> Result<StabilityCertificate> {
    q.require_square()?;
    if q.rows() != sys.dim() {
        return Err(Error::DimensionMismatch(format!(
            "generating matrix is {}x{} but the system dimension is {}",
            q.rows(),
            q.cols(),
            sys.dim()
        )));
    }
    let (lam_star, lam_max) = spectral_range(q)?;
    let alpha = alpha.unwrap_or(lam_star);
    let beta = beta.unwrap_or(lam_max);
    if alpha > beta {
        return Err(Error::InvalidThresholds { alpha, beta });
    }

    if alpha > lam_star + DEFAULT_TOL || beta < lam_max - DEFAULT_TOL {
        let s = SliceSpace::predicate_only(q.clone(), alpha, beta)?;
        return Ok(StabilityCertificate {
            verdict: Verdict::UnsupportedRegion,
            notion: Notion::UniformLipschitz,
            cones: vec![ConeRecord::from_slice(&s)],
            edges: vec![],
            proj_bound: None,
            lipschitz_bounds: None,
            diagnostics: vec![format!(
                "thresholds alpha={alpha}, beta={beta} leave the generator-backed region \
                 alpha <= lambda*={lam_star}, beta >= lambda_max={lam_max}; \
                 the slice space is predicate-only and certification is refused"
            )],
        });
    }

    let s = SliceSpace::build(q.clone(), alpha, beta)?;
    let mut diagnostics = Vec::new();
    let mut ok = true;

    match eigenvector(q)? {
        Some(z) => {
            if !s.contains(&z)? {
                ok = false;
                diagnostics.push(format!("eigenvector {z} escapes the slice space"));
            }
        }
        None => {
            ok = false;
            diagnostics.push(
                "no finite eigenvector of Q exists; the slice space may be empty of \
                 stable schedules"
                    .to_string(),
            );
        }
    }

    let mut edges = Vec::new();
    for l in 1..=sys.n_modes() {
        match map_inclusion(sys.mode(l)?, &s, &s)? {
            MapInclusion::Holds => edges.push((1, l, 1)),
            MapInclusion::Fails(w) => {
                ok = false;
                diagnostics.push(format!(
                    "mode {l}: image {} of generator {} is not in the slice space ({})",
                    w.image, w.generator, w.reason
                ));
            }
        }
    }

    let bound = if ok && is_irreducible(q)? { s.projective_bound() } else { None };
    let notion = if bound.is_some() { Notion::UniformWeakBounded } else { Notion::UniformLipschitz };
    Ok(StabilityCertificate {
        verdict: if ok { Verdict::Certified } else { Verdict::NotCertified },
        notion,
        cones: vec![ConeRecord::from_slice(&s)],
        edges,
        proj_bound: bound,
        lipschitz_bounds: bound.map(|d| lipschitz_interval(sys, d)),
        diagnostics,
    })
}

/// The full inclusion relation `{(i, l, j) | A^(l) S_i ⊆ S_j}` over a family
/// of generator-backed slice spaces, in lexicographic order, 1-based.
/// Triple checks are independent and run in parallel when the `parallel`
/// feature is enabled; the result is identical either way.
#[cfg(feature = "parallel")]
pub fn inclusion_relation(
    sys: &SmplSystem,
    slices: &[SliceSpace],
) -> Result<Vec<(usize, usize, usize)>> {
    use rayon::prelude::*;
    let triples = all_triples(slices.len(), sys.n_modes());
    let flags = triples
        .par_iter()
        .map(|&(i, l, j)| {
            Ok(map_inclusion(sys.mode(l)?, &slices[i - 1], &slices[j - 1])?.holds())
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(triples.into_iter().zip(flags).filter_map(|(t, ok)| ok.then_some(t)).collect())
}

#[cfg(not(feature = "parallel"))]
pub fn inclusion_relation(
    sys: &SmplSystem,
    slices: &[SliceSpace],
) -> Result<Vec<(usize, usize, usize)>> {
    inclusion_relation_seq(sys, slices)
}

/// Sequential reference implementation of [`inclusion_relation`].
pub fn inclusion_relation_seq(
    sys: &SmplSystem,
    slices: &[SliceSpace],
) -> Result<Vec<(usize, usize, usize)>> {
    let mut out = Vec::new();
    for (i, l, j) in all_triples(slices.len(), sys.n_modes()) {
        if map_inclusion(sys.mode(l)?, &slices[i - 1], &slices[j - 1])?.holds() {
            out.push((i, l, j));
        }
    }
    Ok(out)
}

fn all_triples(r: usize, n_modes: usize) -> Vec<(usize, usize, usize)> {
    let mut v = Vec::with_capacity(r * n_modes * r);
    for i in 1..=r {
        for l in 1..=n_modes {
            for j in 1..=r {
                v.push((i, l, j));
            }
        }
    }
    v
}

/// Checks path-complete stability over a family of candidate matrices.
///
/// Without a constraint the check asks for a non-empty sub-family of cones
/// closed under every mode (greatest fixed point); with a constraint
/// automaton it asks for a simulation of the automaton by the cone graph.
pub fn check_path_complete(
    sys: &SmplSystem,
    qs: &[MpMatrix],
    alpha: f64,
    beta: f64,
    constraint: Option<&SwitchingAutomaton>,
) -> Result<StabilityCertificate> {
    if qs.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if alpha > beta {
        return Err(Error::InvalidThresholds { alpha, beta });
    }
    let mut min_star = f64::INFINITY;
    let mut max_mean = f64::NEG_INFINITY;
    for q in qs {
        q.require_square()?;
        if q.rows() != sys.dim() {
            return Err(Error::DimensionMismatch(
                "candidate matrix dimension differs from the system dimension".into(),
            ));
        }
        let (star, mean) = spectral_range(q)?;
        min_star = min_star.min(star);
        max_mean = max_mean.max(mean);
    }

    let notion_base = Notion::PathCompleteLipschitz;
    if alpha > min_star + DEFAULT_TOL || beta < max_mean - DEFAULT_TOL {
        let cones = qs
            .iter()
            .map(|q| SliceSpace::predicate_only(q.clone(), alpha, beta).map(|s| ConeRecord::from_slice(&s)))
            .collect::<Result<Vec<_>>>()?;
        return Ok(StabilityCertificate {
            verdict: Verdict::UnsupportedRegion,
            notion: notion_base,
            cones,
            edges: vec![],
            proj_bound: None,
            lipschitz_bounds: None,
            diagnostics: vec![format!(
                "thresholds alpha={alpha}, beta={beta} must satisfy alpha <= {min_star} and \
                 beta >= {max_mean} for every family member to have star generators"
            )],
        });
    }

    let slices = qs
        .iter()
        .map(|q| SliceSpace::build(q.clone(), alpha, beta))
        .collect::<Result<Vec<_>>>()?;

    let mut diagnostics = Vec::new();
    let mut ok = true;
    for (j, (q, s)) in qs.iter().zip(&slices).enumerate() {
        match eigenvector(q)? {
            Some(z) if s.contains(&z)? => {}
            Some(z) => {
                ok = false;
                diagnostics.push(format!("cone {}: eigenvector {z} escapes its slice space", j + 1));
            }
            None => {
                ok = false;
                diagnostics.push(format!("cone {}: no finite eigenvector", j + 1));
            }
        }
    }

    let relation = inclusion_relation(sys, &slices)?;
    let r = slices.len();
    let has_edge = |i: usize, l: usize, j: usize| relation.contains(&(i, l, j));

    let mut edges = Vec::new();
    if ok {
        match constraint {
            None => {
                // Greatest fixed point: drop any cone that lacks a successor
                // inside the surviving set for some mode.
                let mut alive: Vec<bool> = vec![true; r];
                loop {
                    let mut removed = None;
                    'scan: for i in 1..=r {
                        if !alive[i - 1] {
                            continue;
                        }
                        for l in 1..=sys.n_modes() {
                            if !(1..=r).any(|j| alive[j - 1] && has_edge(i, l, j)) {
                                removed = Some((i, l));
                                break 'scan;
                            }
                        }
                    }
                    match removed {
                        Some((i, l)) => {
                            alive[i - 1] = false;
                            diagnostics.push(format!(
                                "cone {i} removed: no mode-{l} successor among the surviving cones"
                            ));
                        }
                        None => break,
                    }
                }
                if alive.iter().any(|&a| a) {
                    for i in 1..=r {
                        if !alive[i - 1] {
                            continue;
                        }
                        for l in 1..=sys.n_modes() {
                            let j = (1..=r)
                                .find(|&j| alive[j - 1] && has_edge(i, l, j))
                                .expect("fixed point guarantees a successor");
                            edges.push((i, l, j));
                        }
                    }
                } else {
                    ok = false;
                    diagnostics.push(
                        "no non-empty sub-family of cones is closed under every mode; \
                         arbitrary switching cannot be certified"
                            .to_string(),
                    );
                }
            }
            Some(aut) => {
                // Simulation between automaton states and cones: a pair
                // (state, cone) survives while every outgoing transition can
                // be matched by an inclusion edge into a surviving pair.
                let reachable = aut.reachable_states();
                let mut sim = vec![vec![true; r]; aut.n_states()];
                for q in 0..aut.n_states() {
                    if !reachable.contains(&q) {
                        sim[q] = vec![false; r];
                    }
                }
                loop {
                    let mut changed = false;
                    for &q in &reachable {
                        for i in 1..=r {
                            if !sim[q][i - 1] {
                                continue;
                            }
                            let supported = aut.transitions_from(q).iter().all(|&(l, q2)| {
                                (1..=r).any(|j| sim[q2][j - 1] && has_edge(i, l, j))
                            });
                            if !supported {
                                sim[q][i - 1] = false;
                                changed = true;
                            }
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                let mut uncovered: Vec<&str> = Vec::new();
                for &q in &reachable {
                    if !sim[q].iter().any(|&b| b) {
                        uncovered.push(aut.state_name(q));
                    }
                }
                if uncovered.is_empty() {
                    for &q in &reachable {
                        for &(l, q2) in aut.transitions_from(q) {
                            for i in 1..=r {
                                if !sim[q][i - 1] {
                                    continue;
                                }
                                for j in 1..=r {
                                    if sim[q2][j - 1] && has_edge(i, l, j) {
                                        edges.push((i, l, j));
                                    }
                                }
                            }
                        }
                    }
                    edges.sort_unstable();
                    edges.dedup();
                } else {
                    ok = false;
                    diagnostics.push(format!(
                        "automaton states without a simulating cone: {}",
                        uncovered.join(", ")
                    ));
                }
            }
        }
    }

    let mut bound = None;
    if ok {
        let mut worst: Option<f64> = None;
        let mut all_irreducible = true;
        for (q, s) in qs.iter().zip(&slices) {
            all_irreducible &= is_irreducible(q)?;
            match s.projective_bound() {
                Some(d) => worst = Some(worst.map_or(d, |w: f64| w.max(d))),
                None => worst = None,
            }
            if worst.is_none() {
                break;
            }
        }
        if all_irreducible {
            bound = worst;
        }
    }
    let notion =
        if bound.is_some() { Notion::PathCompleteWeakBounded } else { notion_base };

    Ok(StabilityCertificate {
        verdict: if ok { Verdict::Certified } else { Verdict::NotCertified },
        notion,
        cones: slices.iter().map(ConeRecord::from_slice).collect(),
        edges,
        proj_bound: bound,
        lipschitz_bounds: bound.map(|d| lipschitz_interval(sys, d)),
        diagnostics,
    })
}

/// Checks strong bounded-buffer stability: confinement to the cone
/// `{x | Q ⊗ x <= x}`. The cone is empty when the maximum cycle mean of `Q`
/// exceeds the unit (error); its generator representation `Q^star` needs an
/// irreducible `Q`, otherwise the verdict is `UnsupportedRegion`.
pub fn check_strong_bounded(sys: &SmplSystem, q: &MpMatrix) -> Result<StabilityCertificate> {
    q.require_square()?;
    if q.rows() != sys.dim() {
        return Err(Error::DimensionMismatch(
            "cone matrix dimension differs from the system dimension".into(),
        ));
    }
    if let Some(lam) = max_cycle_mean(q)?.as_f64() {
        if lam > DEFAULT_TOL {
            return Err(Error::EmptyCone { lambda: lam });
        }
    }
    let cone = SliceSpace::subeigenspace(q.clone(), 0.0)?;
    if !is_irreducible(q)? {
        return Ok(StabilityCertificate {
            verdict: Verdict::UnsupportedRegion,
            notion: Notion::StrongBounded,
            cones: vec![ConeRecord::from_slice(&cone)],
            edges: vec![],
            proj_bound: None,
            lipschitz_bounds: None,
            diagnostics: vec![
                "the bounded-buffer cone is finitely generated only for irreducible Q; \
                 certification is refused for reducible matrices"
                    .to_string(),
            ],
        });
    }

    let mut diagnostics = Vec::new();
    let mut ok = true;
    let mut edges = Vec::new();
    for l in 1..=sys.n_modes() {
        match map_inclusion(sys.mode(l)?, &cone, &cone)? {
            MapInclusion::Holds => edges.push((1, l, 1)),
            MapInclusion::Fails(w) => {
                ok = false;
                diagnostics.push(format!(
                    "mode {l}: image {} of generator {} leaves the cone ({})",
                    w.image, w.generator, w.reason
                ));
            }
        }
    }

    let bound = if ok { cone.projective_bound() } else { None };
    if let (Some(d), Ok(qnorm)) = (bound, q.projective_norm()) {
        // The strong notion implies the weak one; record the consistency of
        // the pairwise-delay data in Q with the trajectory bound.
        diagnostics.push(format!(
            "consistency: ||Q||_P = {qnorm} <= projective bound {d} on every trajectory"
        ));
    }

    Ok(StabilityCertificate {
        verdict: if ok { Verdict::Certified } else { Verdict::NotCertified },
        notion: Notion::StrongBounded,
        cones: vec![ConeRecord::from_slice(&cone)],
        edges,
        proj_bound: bound,
        lipschitz_bounds: bound.map(|d| lipschitz_interval(sys, d)),
        diagnostics,
    })
}

/// Generic invariance check for a monotone homogeneous generating function.
///
/// A single matrix delegates to [`check_uniform`]. For the min-of-linear
/// family the slice space of the min function has no explicit generator set;
/// invariance is checked on the union of the per-matrix star generators
/// (all members of the min slice space in the supported threshold region),
/// and a finite eigenvector of the min function is exhibited by testing the
/// per-matrix eigenvectors.
pub fn check_proposition1(
    sys: &SmplSystem,
    g: GeneratingFunction<'_>,
    alpha: f64,
    beta: f64,
) -> Result<StabilityCertificate> {
    let qs = match g {
        GeneratingFunction::Single(q) => {
            return check_uniform(sys, q, Some(alpha), Some(beta));
        }
        GeneratingFunction::MinOf(qs) => qs,
    };
    if qs.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if alpha > beta {
        return Err(Error::InvalidThresholds { alpha, beta });
    }
    let mut min_star = f64::INFINITY;
    let mut max_mean = f64::NEG_INFINITY;
    for q in qs {
        q.require_square()?;
        let (star, mean) = spectral_range(q)?;
        min_star = min_star.min(star);
        max_mean = max_mean.max(mean);
    }

    let record = |generators: Option<MpMatrix>| ConeRecord {
        generating: qs.to_vec(),
        alpha: Some(alpha),
        beta,
        generators,
    };

    if alpha > min_star + DEFAULT_TOL || beta < max_mean - DEFAULT_TOL {
        return Ok(StabilityCertificate {
            verdict: Verdict::UnsupportedRegion,
            notion: Notion::UniformLipschitz,
            cones: vec![record(None)],
            edges: vec![],
            proj_bound: None,
            lipschitz_bounds: None,
            diagnostics: vec![format!(
                "thresholds alpha={alpha}, beta={beta} must satisfy alpha <= {min_star} and \
                 beta >= {max_mean} for the min-of family"
            )],
        });
    }

    let slices = qs
        .iter()
        .map(|q| SliceSpace::build(q.clone(), alpha, beta))
        .collect::<Result<Vec<_>>>()?;
    let mut delta: f64 = 0.0;
    let mut union_cols: Vec<MpVector> = Vec::new();
    for s in &slices {
        let gens = s.generators().expect("supported region");
        if !gens.is_finite() {
            return Ok(StabilityCertificate {
                verdict: Verdict::UnsupportedRegion,
                notion: Notion::UniformLipschitz,
                cones: vec![record(None)],
                edges: vec![],
                proj_bound: None,
                lipschitz_bounds: None,
                diagnostics: vec![
                    "a family member has non-finite star generators (reducible matrix); \
                     the min-of construction is not supported there"
                        .to_string(),
                ],
            });
        }
        delta = delta.max(gens.projective_norm()?);
        for col in gens.columns() {
            if !union_cols.contains(&col) {
                union_cols.push(col);
            }
        }
    }

    let mut diagnostics = Vec::new();
    let mut ok = true;

    // Exhibit a finite eigenvector of the min function among the per-matrix
    // eigenvectors: g(z) must be a uniform shift of z with shift in [alpha, beta].
    let mut found = None;
    for q in qs {
        let Some(z) = eigenvector(q)? else { continue };
        let image = min_mpl_apply(qs, &z)?;
        let zs = z.as_finite().unwrap();
        let gs = image.as_finite().unwrap();
        let lambda = gs[0] - zs[0];
        let uniform = gs.iter().zip(&zs).all(|(&g, &x)| (g - x - lambda).abs() <= DEFAULT_TOL);
        if uniform && lambda >= alpha - DEFAULT_TOL && lambda <= beta + DEFAULT_TOL {
            found = Some((z, lambda));
            break;
        }
    }
    match found {
        Some((z, lambda)) => {
            diagnostics.push(format!("eigenvector of the min function: {z} with shift {lambda}"));
        }
        None => {
            ok = false;
            diagnostics.push(
                "no finite eigenvector of the min-of generating function was exhibited".to_string(),
            );
        }
    }

    let min_member = |x: &MpVector| -> Result<bool> {
        let image = min_mpl_apply(qs, x)?;
        let xs = x.as_finite().unwrap();
        let gs = image.as_finite().unwrap();
        Ok(gs.iter().zip(&xs).all(|(&g, &xi)| {
            alpha + xi <= g + DEFAULT_TOL && g <= beta + xi + DEFAULT_TOL
        }))
    };

    if ok {
        for (gidx, u) in union_cols.iter().enumerate() {
            if !min_member(u)? {
                ok = false;
                diagnostics.push(format!(
                    "generator {gidx} ({u}) is outside the min slice space"
                ));
            }
        }
    }
    if ok {
        'modes: for l in 1..=sys.n_modes() {
            let a = sys.mode(l)?;
            for (gidx, u) in union_cols.iter().enumerate() {
                let y = a.otimes_vec(u)?;
                if !y.is_finite() || !min_member(&y)? {
                    ok = false;
                    diagnostics.push(format!(
                        "mode {l}: image {y} of generator {gidx} leaves the min slice space"
                    ));
                    continue 'modes;
                }
            }
        }
    }

    let n = sys.dim();
    let mut union = MpMatrix::eps(n, union_cols.len());
    for (j, col) in union_cols.iter().enumerate() {
        for i in 0..n {
            union.set(i, j, col.get(i));
        }
    }
    let edges = if ok { (1..=sys.n_modes()).map(|l| (1, l, 1)).collect() } else { vec![] };
    let bound = ok.then_some(delta);
    Ok(StabilityCertificate {
        verdict: if ok { Verdict::Certified } else { Verdict::NotCertified },
        notion: if ok { Notion::UniformWeakBounded } else { Notion::UniformLipschitz },
        cones: vec![record(Some(union))],
        edges,
        proj_bound: bound,
        lipschitz_bounds: bound.map(|d| lipschitz_interval(sys, d)),
        diagnostics,
    })
}

/// Re-verifies every edge of a certificate from scratch: each generator of
/// the source cone must map into the target cone under the edge's mode.
pub fn verify_certificate_edges(sys: &SmplSystem, cert: &StabilityCertificate) -> Result<bool> {
    for &(i, l, j) in &cert.edges {
        let src = cert
            .cones
            .get(i - 1)
            .and_then(|c| c.generators.as_ref())
            .ok_or_else(|| Error::Argument(format!("edge source cone {i} has no generators")))?;
        let dst = cert
            .cones
            .get(j - 1)
            .ok_or_else(|| Error::Argument(format!("edge target cone {j} is missing")))?;
        let a = sys.mode(l)?;
        for g in src.columns() {
            let image = a.otimes_vec(&g)?;
            if !dst.contains(&image)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NEG_INF: f64 = f64::NEG_INFINITY;

    fn m(rows: &[&[f64]]) -> MpMatrix {
        MpMatrix::from_extended_rows(rows).unwrap()
    }

    fn v(entries: &[f64]) -> MpVector {
        MpVector::from_extended(entries).unwrap()
    }

    fn system_one() -> SmplSystem {
        SmplSystem::new(vec![
            m(&[&[4.0, NEG_INF], &[1.0, 1.0]]),
            m(&[&[3.0, 3.0], &[NEG_INF, 6.0]]),
        ])
        .unwrap()
    }

    fn system_two() -> SmplSystem {
        SmplSystem::new(vec![
            m(&[&[4.0, NEG_INF], &[1.0, 1.0]]),
            m(&[&[3.0, NEG_INF], &[NEG_INF, 6.0]]),
        ])
        .unwrap()
    }

    fn family_two() -> Vec<MpMatrix> {
        vec![m(&[&[4.0, 3.0], &[1.0, 1.0]]), m(&[&[4.0, 0.0], &[0.0, 4.0]])]
    }

    fn fig5_automaton() -> SwitchingAutomaton {
        SwitchingAutomaton::new(
            vec!["c1".into(), "c2".into()],
            vec![],
            &[(0, 1, 0), (0, 2, 1), (1, 1, 0)],
            2,
        )
        .unwrap()
    }

    #[test]
    fn uniform_certifies_the_common_cone_example() {
        let sys = system_one();
        let q = sys.mode_sum();
        assert_eq!(q, m(&[&[4.0, 3.0], &[1.0, 6.0]]));
        let cert = check_uniform(&sys, &q, Some(4.0), Some(6.0)).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(cert.notion, Notion::UniformWeakBounded);
        assert_eq!(cert.proj_bound, Some(5.0));
        assert_eq!(cert.edges, vec![(1, 1, 1), (1, 2, 1)]);
        assert_eq!(
            cert.cones[0].generators.as_ref().unwrap(),
            &m(&[&[0.0, -3.0], &[-5.0, 0.0]])
        );
        assert!(verify_certificate_edges(&sys, &cert).unwrap());
    }

    #[test]
    fn uniform_defaults_match_the_spectral_range() {
        let sys = system_one();
        let q = sys.mode_sum();
        let defaulted = check_uniform(&sys, &q, None, None).unwrap();
        let explicit = check_uniform(&sys, &q, Some(4.0), Some(6.0)).unwrap();
        assert_eq!(defaulted.verdict, explicit.verdict);
        assert_eq!(defaulted.cones[0].alpha, Some(4.0));
        assert_eq!(defaulted.cones[0].beta, 6.0);
    }

    #[test]
    fn uniform_refuses_reducible_candidates_honestly() {
        // Mode-sum of the second system: reducible, no finite eigenvector.
        let sys = system_two();
        let q = sys.mode_sum();
        assert_eq!(q, m(&[&[4.0, NEG_INF], &[1.0, 6.0]]));
        let cert = check_uniform(&sys, &q, None, None).unwrap();
        assert_eq!(cert.verdict, Verdict::NotCertified);
        assert!(cert.diagnostics.iter().any(|d| d.contains("no finite eigenvector")));

        // Single-mode system generated by its own reducible matrix: the star
        // has an epsilon generator whose image leaves R^n.
        let a = m(&[&[4.0, NEG_INF], &[1.0, 1.0]]);
        let solo = SmplSystem::new(vec![a.clone()]).unwrap();
        let cert = check_uniform(&solo, &a, None, None).unwrap();
        assert_eq!(cert.verdict, Verdict::NotCertified);
        assert!(cert.diagnostics.iter().any(|d| d.contains("epsilon")));
    }

    #[test]
    fn uniform_reports_inclusion_witnesses() {
        // Q^(1) of the second family certifies mode 1 but not mode 2: the
        // image of generator (-1, 0) under mode 2 is (2, 6), spread 4 > 1.
        let sys = system_two();
        let q1 = m(&[&[4.0, 3.0], &[1.0, 1.0]]);
        let cert = check_uniform(&sys, &q1, Some(0.0), Some(4.0)).unwrap();
        assert_eq!(cert.verdict, Verdict::NotCertified);
        assert_eq!(cert.edges, vec![(1, 1, 1)]);
        assert!(cert.diagnostics.iter().any(|d| d.contains("mode 2") && d.contains("(2, 6)")));
    }

    #[test]
    fn uniform_unsupported_region_verdict() {
        let sys = system_one();
        let q = sys.mode_sum();
        let cert = check_uniform(&sys, &q, Some(5.0), Some(6.0)).unwrap();
        assert_eq!(cert.verdict, Verdict::UnsupportedRegion);
        assert_eq!(cert.verdict.exit_code(), 2);
        assert!(check_uniform(&sys, &q, Some(7.0), Some(6.0)).is_err());
        // An epsilon diagonal entry violates the argument contract.
        let bad = m(&[&[4.0, NEG_INF], &[1.0, NEG_INF]]);
        assert!(check_uniform(&sys, &bad, None, None).is_err());
    }

    #[test]
    fn path_complete_golden_relation_and_automaton() {
        let sys = system_two();
        let qs = family_two();
        let slices: Vec<SliceSpace> =
            qs.iter().map(|q| SliceSpace::build(q.clone(), 0.0, 4.0).unwrap()).collect();
        let relation = inclusion_relation(&sys, &slices).unwrap();
        // The published triples, rewritten from (l, i, j) to (i, l, j).
        for t in [(1, 1, 1), (1, 2, 2), (2, 1, 1)] {
            assert!(relation.contains(&t), "missing {t:?}");
        }
        // Cone 2 has no mode-2 edge at all.
        assert!(!relation.iter().any(|&(i, l, _)| i == 2 && l == 2));

        let constrained =
            check_path_complete(&sys, &qs, 0.0, 4.0, Some(&fig5_automaton())).unwrap();
        assert_eq!(constrained.verdict, Verdict::Certified);
        assert_eq!(constrained.notion, Notion::PathCompleteWeakBounded);
        assert_eq!(constrained.edges, vec![(1, 1, 1), (1, 2, 2), (2, 1, 1)]);
        assert!(verify_certificate_edges(&sys, &constrained).unwrap());

        let arbitrary = check_path_complete(&sys, &qs, 0.0, 4.0, None).unwrap();
        assert_eq!(arbitrary.verdict, Verdict::NotCertified);
        assert!(arbitrary.diagnostics.iter().any(|d| d.contains("cone 2 removed")));
    }

    #[test]
    fn path_complete_singleton_reduces_to_uniform() {
        let sys = system_one();
        let q = sys.mode_sum();
        let uni = check_uniform(&sys, &q, Some(4.0), Some(6.0)).unwrap();
        let path = check_path_complete(&sys, std::slice::from_ref(&q), 4.0, 6.0, None).unwrap();
        assert_eq!(path.verdict, uni.verdict);
        assert_eq!(path.proj_bound, uni.proj_bound);
        assert_eq!(path.edges, uni.edges);
    }

    #[test]
    fn strong_bounded_examples() {
        // Identity dynamics preserve every cone.
        let id_sys = SmplSystem::new(vec![MpMatrix::identity(2)]).unwrap();
        let q = m(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        let cert = check_strong_bounded(&id_sys, &q).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(cert.notion, Notion::StrongBounded);

        // A positive eigenvalue empties the cone.
        let hot = m(&[&[1.0, NEG_INF], &[NEG_INF, 0.0]]);
        assert!(matches!(
            check_strong_bounded(&id_sys, &hot),
            Err(Error::EmptyCone { lambda }) if lambda == 1.0
        ));

        // The uniform example shifted by its eigenvalue: same arithmetic.
        let sys6 = SmplSystem::new(vec![
            m(&[&[-2.0, NEG_INF], &[-5.0, -5.0]]),
            m(&[&[-3.0, -3.0], &[NEG_INF, 0.0]]),
        ])
        .unwrap();
        let q6 = m(&[&[-2.0, -3.0], &[-5.0, 0.0]]);
        let cert = check_strong_bounded(&sys6, &q6).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(
            cert.cones[0].generators.as_ref().unwrap(),
            &m(&[&[0.0, -3.0], &[-5.0, 0.0]])
        );
        assert!(cert.diagnostics.iter().any(|d| d.contains("||Q||_P")));
    }

    #[test]
    fn strong_bounded_requires_irreducibility_for_generators() {
        let id_sys = SmplSystem::new(vec![MpMatrix::identity(2)]).unwrap();
        let reducible = m(&[&[-1.0, NEG_INF], &[0.0, -1.0]]);
        let cert = check_strong_bounded(&id_sys, &reducible).unwrap();
        assert_eq!(cert.verdict, Verdict::UnsupportedRegion);
    }

    #[test]
    fn proposition1_single_matrix_delegates() {
        let sys = system_one();
        let q = sys.mode_sum();
        let direct = check_uniform(&sys, &q, Some(4.0), Some(6.0)).unwrap();
        let generic =
            check_proposition1(&sys, GeneratingFunction::Single(&q), 4.0, 6.0).unwrap();
        assert_eq!(generic.verdict, direct.verdict);
        assert_eq!(generic.proj_bound, direct.proj_bound);
        assert_eq!(generic.edges, direct.edges);
    }

    #[test]
    fn proposition1_min_of_family() {
        let sys = system_two();
        let qs = family_two();
        let cert =
            check_proposition1(&sys, GeneratingFunction::MinOf(&qs), 0.0, 4.0).unwrap();
        // The min predicate holds on (0,0): min image is (4,1), within shifts [0,4].
        assert!(cert.cones[0].contains(&v(&[0.0, 0.0])).unwrap());
        assert!(cert.diagnostics.iter().any(|d| d.contains("eigenvector of the min function")));
        // Mode 2 throws the diagonal-cone generator (-4, 0) to (-1, 6), which
        // leaves the min slice space, so invariance of the min cone fails.
        assert_eq!(cert.verdict, Verdict::NotCertified);
        assert!(cert.diagnostics.iter().any(|d| d.contains("mode 2")));
    }

    #[test]
    fn proposition1_degenerate_eigenspace() {
        // alpha = beta = eigenvalue: the slice space is the eigenspace.
        let sys = SmplSystem::new(vec![MpMatrix::identity(2)]).unwrap();
        let q = m(&[&[0.0, -1.0], &[-1.0, 0.0]]);
        let cert = check_proposition1(&sys, GeneratingFunction::Single(&q), 0.0, 0.0).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(cert.proj_bound, Some(1.0));
    }

    #[test]
    fn certificate_serialization_is_deterministic() {
        let sys = system_one();
        let cert = check_uniform(&sys, &sys.mode_sum(), Some(4.0), Some(6.0)).unwrap();
        let json = serde_json::to_string_pretty(&cert).unwrap();
        assert!(json.contains("\"verdict\": \"certified\""));
        assert!(json.contains("\"notion\": \"uniform-weak-bounded\""));
        let back: StabilityCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back.verdict, cert.verdict);
        assert_eq!(back.edges, cert.edges);
        assert_eq!(serde_json::to_string(&back).unwrap(), serde_json::to_string(&cert).unwrap());
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn relation_matches_sequential_reference() {
        let sys = system_two();
        let slices: Vec<SliceSpace> = family_two()
            .iter()
            .map(|q| SliceSpace::build(q.clone(), 0.0, 4.0).unwrap())
            .collect();
        assert_eq!(
            inclusion_relation(&sys, &slices).unwrap(),
            inclusion_relation_seq(&sys, &slices).unwrap()
        );
    }
}
