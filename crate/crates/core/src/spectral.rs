//! Max-plus spectral theory.
//!
//! The precedence graph of a square matrix `A` has an edge `j -> i` of weight
//! `A_ij` whenever the entry is not epsilon. The largest max-plus eigenvalue
//! equals the maximum cycle mean of that graph; it is computed with Karp's
//! algorithm run per strongly connected component, which is exact on integer
//! data. The Kleene star is an all-pairs longest-path closure and exists
//! exactly when the maximum cycle mean is at most the max-plus unit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{MpMatrix, MpVector};
use crate::scalar::{MpScalar, DEFAULT_TOL};

/// Spectral summary of a square max-plus matrix.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralData {
    /// Maximum cycle mean; epsilon when the precedence graph is acyclic.
    pub lambda_max: MpScalar,
    /// Minimum diagonal entry.
    pub lambda_star: MpScalar,
    pub irreducible: bool,
    /// A finite eigenvector for `lambda_max`, when one exists.
    pub eigenvector: Option<MpVector>,
    /// Nodes on a critical cycle (0-based, ascending).
    pub critical_nodes: Vec<usize>,
}

/// Partition of node indices into strongly connected components of the
/// precedence graph, in topological order (sources first). The matrix is
/// irreducible exactly when one component covers every node.
pub fn precedence_scc(a: &MpMatrix) -> Result<Vec<Vec<usize>>> {
    a.require_square()?;
    let n = a.rows();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if !a.get(i, j).is_epsilon() {
                adj[j].push(i);
            }
        }
    }
    Ok(tarjan(&adj))
}

pub fn is_irreducible(a: &MpMatrix) -> Result<bool> {
    Ok(precedence_scc(a)?.len() == 1)
}

// Iterative Tarjan; components come out in reverse topological order.
fn tarjan(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next = 0usize;
    let mut comps: Vec<Vec<usize>> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        let mut dfs: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(frame) = dfs.last_mut() {
            let v = frame.0;
            if frame.1 < adj[v].len() {
                let w = adj[v][frame.1];
                frame.1 += 1;
                if index[w] == UNVISITED {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    dfs.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                dfs.pop();
                if let Some(parent) = dfs.last() {
                    let u = parent.0;
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    topological_components(adj, comps)
}

// Canonical order for the condensation: topological, ties broken by the
// smallest node index so independent components come out ascending.
fn topological_components(adj: &[Vec<usize>], comps: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let n = adj.len();
    let mut comp_of = vec![0usize; n];
    for (c, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = c;
        }
    }
    let mut indegree = vec![0usize; comps.len()];
    let mut dag = vec![Vec::new(); comps.len()];
    for (v, outs) in adj.iter().enumerate() {
        for &w in outs {
            let (a, b) = (comp_of[v], comp_of[w]);
            if a != b && !dag[a].contains(&b) {
                dag[a].push(b);
                indegree[b] += 1;
            }
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..comps.len())
        .filter(|&c| indegree[c] == 0)
        .map(|c| Reverse((comps[c][0], c)))
        .collect();
    let mut order = Vec::with_capacity(comps.len());
    while let Some(Reverse((_, c))) = heap.pop() {
        order.push(comps[c].clone());
        for &b in &dag[c] {
            indegree[b] -= 1;
            if indegree[b] == 0 {
                heap.push(Reverse((comps[b][0], b)));
            }
        }
    }
    order
}

/// Maximum cycle mean of the precedence graph; epsilon if acyclic.
///
/// Karp's formula `max_v min_k (F_n(v) - F_k(v)) / (n - k)` is evaluated on
/// each strongly connected component separately and the results maximised.
pub fn max_cycle_mean(a: &MpMatrix) -> Result<MpScalar> {
    let comps = precedence_scc(a)?;
    let mut best = MpScalar::Epsilon;
    for comp in &comps {
        if let Some(mean) = karp_component_max_mean(a, comp) {
            best = best.oplus(MpScalar::finite(mean));
        }
    }
    Ok(best)
}

// Maximum cycle mean within one strongly connected component, or None when
// the component carries no cycle (a singleton without a self-loop).
fn karp_component_max_mean(a: &MpMatrix, comp: &[usize]) -> Option<f64> {
    let m = comp.len();
    // F[k][v] = max weight of a walk with exactly k edges from comp[0] to comp[v],
    // restricted to the component. Unreachable combinations are -inf.
    let mut f = vec![vec![f64::NEG_INFINITY; m]; m + 1];
    f[0][0] = 0.0;
    for k in 1..=m {
        for u in 0..m {
            let base = f[k - 1][u];
            if base == f64::NEG_INFINITY {
                continue;
            }
            // edge comp[u] -> comp[w] has weight A[comp[w]][comp[u]]
            for w in 0..m {
                if let Some(weight) = a.get(comp[w], comp[u]).as_f64() {
                    let cand = base + weight;
                    if cand > f[k][w] {
                        f[k][w] = cand;
                    }
                }
            }
        }
    }
    let mut best: Option<f64> = None;
    for v in 0..m {
        if f[m][v] == f64::NEG_INFINITY {
            continue;
        }
        let mut worst: Option<f64> = None;
        for k in 0..m {
            if f[k][v] == f64::NEG_INFINITY {
                continue;
            }
            let cand = (f[m][v] - f[k][v]) / (m - k) as f64;
            worst = Some(worst.map_or(cand, |w: f64| w.min(cand)));
        }
        if let Some(w) = worst {
            best = Some(best.map_or(w, |b: f64| b.max(w)));
        }
    }
    best
}

/// The minimum diagonal entry. Finiteness is the caller's concern: the
/// supereigenspace arguments need it, reporting does not.
pub fn lambda_star(a: &MpMatrix) -> Result<MpScalar> {
    a.require_square()?;
    Ok(a.diagonal().into_iter().min().expect("square matrix has a diagonal"))
}

/// Kleene star `I ⊕ A ⊕ A^⊗2 ⊕ ...`, which collapses to the sum of the first
/// `n` terms whenever the maximum cycle mean is at most 0. A positive cycle
/// mean makes the series diverge and is reported as an error.
pub fn kleene_star(a: &MpMatrix) -> Result<MpMatrix> {
    kleene_star_with_tol(a, DEFAULT_TOL)
}

pub fn kleene_star_with_tol(a: &MpMatrix, tol: f64) -> Result<MpMatrix> {
    a.require_square()?;
    if let Some(lam) = max_cycle_mean(a)?.as_f64() {
        if lam > tol {
            return Err(Error::StarDivergence { lambda: lam });
        }
    }
    Ok(closure_star(a, tol))
}

// Floyd-Warshall longest-path closure followed by ⊕ with the identity.
// The caller guarantees no strictly positive cycle; the closure diagonal is
// asserted against that as an independent divergence detector.
fn closure_star(a: &MpMatrix, tol: f64) -> MpMatrix {
    let n = a.rows();
    let mut d = a.clone();
    for k in 0..n {
        for i in 0..n {
            let dik = d.get(i, k);
            if dik.is_epsilon() {
                continue;
            }
            for j in 0..n {
                let via = dik.otimes(d.get(k, j));
                d.set(i, j, d.get(i, j).oplus(via));
            }
        }
    }
    for i in 0..n {
        if let Some(v) = d.get(i, i).as_f64() {
            assert!(
                v <= n as f64 * tol,
                "closure found a positive cycle (weight {v} through node {i}) that the \
                 cycle-mean precheck missed"
            );
        }
    }
    MpMatrix::identity(n).oplus(&d).expect("same dimensions")
}

/// A finite eigenvector for the maximum cycle mean, when one exists.
///
/// The matrix is normalised by the eigenvalue, its star is formed, and the
/// critical nodes are read off the diagonal of `A_lam ⊗ A_lam^star`. The
/// returned vector is the star column of the smallest-indexed critical node
/// that is fully finite; if no single critical column is finite, the ⊕-sum of
/// all critical columns is tried (eigenvectors for a fixed eigenvalue are
/// closed under ⊕, and the sum covers reducible cases such as the identity
/// matrix). `None` means no finite eigenvector was found, which can only
/// happen for reducible matrices.
pub fn eigenvector(a: &MpMatrix) -> Result<Option<MpVector>> {
    Ok(eigen_parts(a)?.map(|(z, _)| z))
}

/// Full spectral summary.
pub fn spectral_data(a: &MpMatrix) -> Result<SpectralData> {
    let lambda_max = max_cycle_mean(a)?;
    let lambda_star = lambda_star(a)?;
    let irreducible = is_irreducible(a)?;
    let (eigenvector, critical_nodes) = match eigen_parts(a)? {
        Some((z, crit)) => (Some(z), crit),
        None => (None, critical_nodes_only(a)?),
    };
    Ok(SpectralData { lambda_max, lambda_star, irreducible, eigenvector, critical_nodes })
}

fn critical_nodes_only(a: &MpMatrix) -> Result<Vec<usize>> {
    let Some(lam) = max_cycle_mean(a)?.as_f64() else {
        return Ok(Vec::new());
    };
    let (scale, shift) = integer_scaling(a, lam);
    Ok(critical_of_normalized(&scale_and_shift(a, scale, shift)))
}

// Eigenvector plus the critical node set, sharing one normalisation pass.
fn eigen_parts(a: &MpMatrix) -> Result<Option<(MpVector, Vec<usize>)>> {
    a.require_square()?;
    let Some(lam) = max_cycle_mean(a)?.as_f64() else {
        return Ok(None);
    };
    // When the data is integer-valued the eigenvalue is a rational p/q with
    // q <= n. Working on q*A - p keeps the whole closure in exact integer
    // arithmetic; the final division by q is a single correctly-rounded step.
    let (scale, shift) = integer_scaling(a, lam);
    let b = scale_and_shift(a, scale, shift);
    let star = closure_star(&b, DEFAULT_TOL * scale);
    let critical = critical_from_star(&b, &star);
    debug_assert!(!critical.is_empty(), "a finite cycle mean implies a critical node");

    let mut choice: Option<MpVector> = None;
    for &i in &critical {
        let col = star.column(i);
        if col.is_finite() {
            choice = Some(col);
            break;
        }
    }
    if choice.is_none() {
        let mut acc = MpVector::eps(a.rows());
        for &i in &critical {
            acc = acc.oplus(&star.column(i))?;
        }
        if acc.is_finite() {
            choice = Some(acc);
        }
    }
    let z = choice.map(|col| {
        MpVector::new(
            col.iter()
                .map(|e| match e {
                    MpScalar::Finite(v) => MpScalar::finite(v / scale),
                    MpScalar::Epsilon => MpScalar::Epsilon,
                })
                .collect(),
        )
    });
    Ok(z.map(|z| (z, critical)))
}

// Critical nodes of the normalised matrix: indices whose diagonal entry of
// B ⊗ B^star is the unit (tolerance only matters for non-integer data).
fn critical_of_normalized(b: &MpMatrix) -> Vec<usize> {
    let star = closure_star(b, DEFAULT_TOL);
    critical_from_star(b, &star)
}

fn critical_from_star(b: &MpMatrix, star: &MpMatrix) -> Vec<usize> {
    let plus = b.otimes(star).expect("square");
    let tol = DEFAULT_TOL * b.rows() as f64;
    (0..b.rows())
        .filter(|&i| matches!(plus.get(i, i).as_f64(), Some(v) if v.abs() <= tol))
        .collect()
}

// Chooses (scale, shift) so that entry -> scale*entry - shift sends the
// eigenvalue to exactly 0. Integer matrices get scale = denominator of the
// eigenvalue so all arithmetic stays on exact integers; otherwise scale = 1.
fn integer_scaling(a: &MpMatrix, lam: f64) -> (f64, f64) {
    let integral = a.entries().iter().all(|e| match e.as_f64() {
        Some(v) => v.fract() == 0.0,
        None => true,
    });
    if integral {
        let n = a.rows() as u32;
        for q in 1..=n {
            let p = (lam * q as f64).round();
            if (p / q as f64 - lam).abs() < DEFAULT_TOL {
                return (q as f64, p);
            }
        }
    }
    (1.0, lam)
}

fn scale_and_shift(a: &MpMatrix, scale: f64, shift: f64) -> MpMatrix {
    let mut out = MpMatrix::eps(a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if let Some(v) = a.get(i, j).as_f64() {
                out.set(i, j, MpScalar::finite(scale * v - shift));
            }
        }
    }
    out
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

    #[test]
    fn scc_partition_and_irreducibility() {
        let full = m(&[&[4.0, 3.0], &[1.0, 6.0]]);
        assert_eq!(precedence_scc(&full).unwrap(), vec![vec![0, 1]]);
        assert!(is_irreducible(&full).unwrap());

        // Node 0 is unreachable from node 1: two components, source first.
        let tri = m(&[&[4.0, NEG_INF], &[1.0, 1.0]]);
        assert_eq!(precedence_scc(&tri).unwrap(), vec![vec![0], vec![1]]);
        assert!(!is_irreducible(&tri).unwrap());

        assert_eq!(precedence_scc(&MpMatrix::eps(2, 2)).unwrap(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn max_cycle_mean_small_cases() {
        // Self-loops 4 and 6 beat the 2-cycle of mean (3+1)/2.
        assert_eq!(max_cycle_mean(&m(&[&[4.0, 3.0], &[1.0, 6.0]])).unwrap(), MpScalar::finite(6.0));
        assert_eq!(
            max_cycle_mean(&m(&[&[4.0, NEG_INF], &[1.0, 1.0]])).unwrap(),
            MpScalar::finite(4.0)
        );
        assert_eq!(max_cycle_mean(&MpMatrix::identity(3)).unwrap(), MpScalar::ONE);
        assert_eq!(max_cycle_mean(&MpMatrix::eps(3, 3)).unwrap(), MpScalar::Epsilon);
        // A pure 2-cycle exercises the fractional path.
        assert_eq!(
            max_cycle_mean(&m(&[&[NEG_INF, 3.0], &[2.0, NEG_INF]])).unwrap(),
            MpScalar::finite(2.5)
        );
    }

    #[test]
    fn lambda_star_reads_min_diagonal() {
        assert_eq!(lambda_star(&m(&[&[4.0, 3.0], &[1.0, 6.0]])).unwrap(), MpScalar::finite(4.0));
        assert_eq!(lambda_star(&m(&[&[4.0, 3.0], &[1.0, 1.0]])).unwrap(), MpScalar::finite(1.0));
        assert_eq!(
            lambda_star(&m(&[&[4.0, NEG_INF], &[1.0, 1.0]])).unwrap(),
            MpScalar::finite(1.0)
        );
        assert_eq!(lambda_star(&m(&[&[4.0, 3.0], &[1.0, NEG_INF]])).unwrap(), MpScalar::Epsilon);
    }

    #[test]
    fn kleene_star_of_normalized_example() {
        let q6 = m(&[&[-2.0, -3.0], &[-5.0, 0.0]]);
        assert_eq!(kleene_star(&q6).unwrap(), m(&[&[0.0, -3.0], &[-5.0, 0.0]]));
        assert_eq!(kleene_star(&MpMatrix::eps(2, 2)).unwrap(), MpMatrix::identity(2));
        assert!(matches!(
            kleene_star(&m(&[&[1.0]])),
            Err(Error::StarDivergence { lambda }) if lambda == 1.0
        ));
    }

    #[test]
    fn star_fixed_point_law() {
        let a = m(&[&[-1.0, -3.0], &[0.0, -2.0]]);
        let star = kleene_star(&a).unwrap();
        let lhs = a.otimes(&star).unwrap().oplus(&MpMatrix::identity(2)).unwrap();
        assert_eq!(lhs, star);
    }

    #[test]
    fn eigenvector_examples() {
        // Critical node is the second one; its star column is the eigenvector.
        let q = m(&[&[4.0, 3.0], &[1.0, 6.0]]);
        let z = eigenvector(&q).unwrap().unwrap();
        assert_eq!(z, v(&[-3.0, 0.0]));
        assert_eq!(q.otimes_vec(&z).unwrap(), v(&[3.0, 6.0]));

        // Identity: every node is critical, single columns are not finite,
        // the ⊕-sum of the critical columns is the all-zero eigenvector.
        let z = eigenvector(&MpMatrix::identity(3)).unwrap().unwrap();
        assert_eq!(z, v(&[0.0, 0.0, 0.0]));

        let a = m(&[&[4.0, NEG_INF], &[1.0, 1.0]]);
        let z = eigenvector(&a).unwrap().unwrap();
        assert_eq!(z, v(&[0.0, -3.0]));
        assert_eq!(a.otimes_vec(&z).unwrap(), v(&[4.0, 1.0]));

        // Reducible with the critical class cut off from the top node.
        let bad = m(&[&[4.0, NEG_INF], &[1.0, 6.0]]);
        assert!(eigenvector(&bad).unwrap().is_none());
    }

    #[test]
    fn spectral_data_summary() {
        let q = m(&[&[4.0, 3.0], &[1.0, 6.0]]);
        let data = spectral_data(&q).unwrap();
        assert_eq!(data.lambda_max, MpScalar::finite(6.0));
        assert_eq!(data.lambda_star, MpScalar::finite(4.0));
        assert!(data.irreducible);
        assert_eq!(data.critical_nodes, vec![1]);
        assert_eq!(data.eigenvector.unwrap(), v(&[-3.0, 0.0]));
    }

    #[test]
    fn fractional_eigenvalue_keeps_eigen_equation_exact_in_rationals() {
        // Pure 3-cycle with weight sum 7: eigenvalue 7/3.
        let a = m(&[
            &[NEG_INF, NEG_INF, 3.0],
            &[2.0, NEG_INF, NEG_INF],
            &[NEG_INF, 2.0, NEG_INF],
        ]);
        let lam = max_cycle_mean(&a).unwrap().as_f64().unwrap();
        assert_eq!(lam, 7.0 / 3.0);
        let z = eigenvector(&a).unwrap().unwrap();
        // Verify A ⊗ z = lam ⊗ z on the scaled integer lattice (denominator 3).
        let az = a.otimes_vec(&z).unwrap();
        for i in 0..3 {
            let lhs = (az.get(i).as_f64().unwrap() * 3.0).round();
            let rhs = (z.get(i).as_f64().unwrap() * 3.0).round() + 7.0;
            assert_eq!(lhs, rhs);
        }
    }
}
