//! Shared helpers and independent oracles for the integration tests.
//!
//! The oracles here deliberately avoid the library's algorithms: the cycle
//! mean is checked by exhaustive elementary-cycle enumeration and the Kleene
//! star by the truncated power sum, both built from first principles.

#![allow(dead_code)]

use maxplus::{MpMatrix, MpScalar, MpVector, SplitMix64};

pub const NEG_INF: f64 = f64::NEG_INFINITY;

pub fn m(rows: &[&[f64]]) -> MpMatrix {
    MpMatrix::from_extended_rows(rows).unwrap()
}

pub fn v(entries: &[f64]) -> MpVector {
    MpVector::from_extended(entries).unwrap()
}

/// Maximum cycle mean by exhaustive enumeration of elementary cycles.
/// Each cycle is anchored at its smallest node, so every directed elementary
/// cycle is visited exactly once. Returns `None` for acyclic graphs.
pub fn enumerate_max_cycle_mean(a: &MpMatrix) -> Option<f64> {
    let n = a.rows();
    // Edge u -> w carries weight A[w][u].
    let weight = |u: usize, w: usize| a.get(w, u).as_f64();
    let mut best: Option<f64> = None;
    for s in 0..n {
        let mut stack: Vec<(usize, f64, usize, u32)> = vec![(s, 0.0, 0, 1 << s)];
        while let Some((u, wsum, len, mask)) = stack.pop() {
            for w in s..n {
                let Some(edge) = weight(u, w) else { continue };
                if w == s {
                    let mean = (wsum + edge) / (len + 1) as f64;
                    best = Some(best.map_or(mean, |b: f64| b.max(mean)));
                } else if mask & (1 << w) == 0 {
                    stack.push((w, wsum + edge, len + 1, mask | (1 << w)));
                }
            }
        }
    }
    best
}

/// Kleene star oracle: the truncated sum `I ⊕ A ⊕ ... ⊕ A^(n-1)` computed by
/// repeated max-plus products, valid whenever the cycle means are <= 0.
pub fn truncated_star_sum(a: &MpMatrix) -> MpMatrix {
    let n = a.rows();
    let mut acc = MpMatrix::identity(n);
    let mut power = MpMatrix::identity(n);
    for _ in 1..n.max(2) {
        power = power.otimes(a).unwrap();
        acc = acc.oplus(&power).unwrap();
    }
    acc
}

/// Random square matrix with integer entries in `[lo, hi]`; each entry is
/// epsilon with probability `eps_pct` percent.
pub fn random_matrix(rng: &mut SplitMix64, n: usize, eps_pct: u64, lo: i64, hi: i64) -> MpMatrix {
    let data = (0..n * n)
        .map(|_| {
            if rng.next_below(100) < eps_pct {
                MpScalar::Epsilon
            } else {
                MpScalar::finite(random_int(rng, lo, hi) as f64)
            }
        })
        .collect();
    MpMatrix::new(n, n, data).unwrap()
}

/// Random matrix where every row keeps at least one finite entry.
pub fn random_finite_row_matrix(rng: &mut SplitMix64, n: usize) -> MpMatrix {
    let mut a = random_matrix(rng, n, 40, -9, 9);
    for i in 0..n {
        if (0..n).all(|j| a.get(i, j).is_epsilon()) {
            let j = rng.next_below(n as u64) as usize;
            a.set(i, j, MpScalar::finite(random_int(rng, -9, 9) as f64));
        }
    }
    a
}

/// Random irreducible matrix: a finite Hamiltonian cycle is forced, then
/// extra finite entries are sprinkled on top.
pub fn random_irreducible(rng: &mut SplitMix64, n: usize) -> MpMatrix {
    let mut a = random_matrix(rng, n, 60, -9, 9);
    for u in 0..n {
        let w = (u + 1) % n;
        // edge u -> w
        a.set(w, u, MpScalar::finite(random_int(rng, -9, 9) as f64));
    }
    a
}

pub fn random_finite_vec(rng: &mut SplitMix64, n: usize, lo: i64, hi: i64) -> MpVector {
    MpVector::from_finite(
        &(0..n).map(|_| random_int(rng, lo, hi) as f64).collect::<Vec<_>>(),
    )
}

pub fn random_int(rng: &mut SplitMix64, lo: i64, hi: i64) -> i64 {
    lo + rng.next_below((hi - lo + 1) as u64) as i64
}

/// Random max-plus combination of the generator columns with integer
/// coefficients; always a member of the generated cone.
pub fn random_cone_member(rng: &mut SplitMix64, generators: &MpMatrix) -> MpVector {
    let mut acc = MpVector::eps(generators.rows());
    for col in generators.columns() {
        let coeff = MpScalar::finite(random_int(rng, -5, 5) as f64);
        acc = acc.oplus(&col.scale(coeff)).unwrap();
    }
    acc
}

/// Conventional entrywise subtraction of finite vectors.
pub fn sub(x: &MpVector, y: &MpVector) -> Vec<f64> {
    let xs = x.as_finite().unwrap();
    let ys = y.as_finite().unwrap();
    xs.iter().zip(&ys).map(|(a, b)| a - b).collect()
}

/// Spread (max minus min) of a plain real vector.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}
