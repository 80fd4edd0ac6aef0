//! Dense max-plus matrices and vectors.
//!
//! Storage is row-major and dense; the systems this library targets are
//! small (tens of events), so closure algorithms stay simple and exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::MpScalar;

/// Dense rectangular max-plus matrix.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<MpScalar>>", into = "Vec<Vec<MpScalar>>")]
pub struct MpMatrix {
    rows: usize,
    cols: usize,
    data: Vec<MpScalar>,
}

/// Max-plus column vector (the `cols = 1` matrix case, split out for API clarity).
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MpVector {
    data: Vec<MpScalar>,
}

impl MpMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<MpScalar>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Argument("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(MpMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<MpScalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Builds from extended reals, mapping `-inf` to epsilon.
    pub fn from_extended_rows(rows: &[&[f64]]) -> Result<Self> {
        let converted = rows
            .iter()
            .map(|row| row.iter().map(|&v| MpScalar::from_extended(v)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(converted)
    }

    /// The all-epsilon matrix (the max-plus zero matrix).
    pub fn eps(rows: usize, cols: usize) -> Self {
        MpMatrix { rows, cols, data: vec![MpScalar::Epsilon; rows * cols] }
    }

    /// The max-plus identity: unit on the diagonal, epsilon elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::eps(n, n);
        for i in 0..n {
            m.set(i, i, MpScalar::ONE);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> MpScalar {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: MpScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[MpScalar] {
        &self.data
    }

    pub fn column(&self, j: usize) -> MpVector {
        MpVector::new((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn columns(&self) -> impl Iterator<Item = MpVector> + '_ {
        (0..self.cols).map(|j| self.column(j))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|e| e.is_finite())
    }

    pub fn diagonal(&self) -> Vec<MpScalar> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Entrywise max-plus sum.
    pub fn oplus(&self, rhs: &MpMatrix) -> Result<MpMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "oplus of {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.oplus(*b)).collect();
        Ok(MpMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// Max-plus matrix product: `(A ⊗ B)_ij = max_k (A_ik + B_kj)`.
    pub fn otimes(&self, rhs: &MpMatrix) -> Result<MpMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "otimes of {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = MpMatrix::eps(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik.is_epsilon() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let term = aik.otimes(rhs.get(k, j));
                    out.set(i, j, out.get(i, j).oplus(term));
                }
            }
        }
        Ok(out)
    }

    /// k-fold max-plus power, `k >= 1`.
    pub fn mp_pow(&self, k: usize) -> Result<MpMatrix> {
        self.require_square()?;
        if k == 0 {
            return Err(Error::Argument("matrix power requires k >= 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.otimes(self)?;
        }
        Ok(acc)
    }

    pub fn otimes_vec(&self, x: &MpVector) -> Result<MpVector> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} matrix and length-{} vector",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut out = vec![MpScalar::Epsilon; self.rows];
        for i in 0..self.rows {
            for (k, xk) in x.iter().enumerate() {
                out[i] = out[i].oplus(self.get(i, k).otimes(xk));
            }
        }
        Ok(MpVector::new(out))
    }

    /// Subtracts a finite scalar from every finite entry; epsilon stays epsilon.
    pub fn normalize(&self, mu: f64) -> MpMatrix {
        assert!(mu.is_finite(), "normalization constant must be finite");
        let data = self
            .data
            .iter()
            .map(|e| match e {
                MpScalar::Epsilon => MpScalar::Epsilon,
                MpScalar::Finite(v) => MpScalar::finite(v - mu),
            })
            .collect();
        MpMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Hilbert projective norm of a matrix: the largest column norm.
    /// Defined only for fully finite matrices.
    pub fn projective_norm(&self) -> Result<f64> {
        (0..self.cols)
            .map(|j| self.column(j).projective_norm())
            .try_fold(0.0_f64, |acc, n| Ok(acc.max(n?)))
    }
}

impl From<MpMatrix> for Vec<Vec<MpScalar>> {
    fn from(m: MpMatrix) -> Self {
        (0..m.rows).map(|i| (0..m.cols).map(|j| m.get(i, j)).collect()).collect()
    }
}

impl TryFrom<Vec<Vec<MpScalar>>> for MpMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<MpScalar>>) -> Result<Self> {
        MpMatrix::from_rows(rows)
    }
}

impl fmt::Debug for MpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MpMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl MpVector {
    pub fn new(data: Vec<MpScalar>) -> Self {
        MpVector { data }
    }

    pub fn from_extended(values: &[f64]) -> Result<Self> {
        Ok(MpVector::new(values.iter().map(|&v| MpScalar::from_extended(v)).collect::<Result<_>>()?))
    }

    pub fn from_finite(values: &[f64]) -> Self {
        MpVector::new(values.iter().map(|&v| MpScalar::finite(v)).collect())
    }

    pub fn eps(n: usize) -> Self {
        MpVector::new(vec![MpScalar::Epsilon; n])
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> MpScalar {
        self.data[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = MpScalar> + '_ {
        self.data.iter().copied()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|e| e.is_finite())
    }

    /// Finite entries as plain reals; `None` if any entry is epsilon.
    pub fn as_finite(&self) -> Option<Vec<f64>> {
        self.data.iter().map(|e| e.as_f64()).collect()
    }

    pub fn oplus(&self, rhs: &MpVector) -> Result<MpVector> {
        if self.len() != rhs.len() {
            return Err(Error::DimensionMismatch("oplus of vectors of different length".into()));
        }
        Ok(MpVector::new(self.iter().zip(rhs.iter()).map(|(a, b)| a.oplus(b)).collect()))
    }

    /// Max-plus scalar multiplication: adds `lambda` to every entry.
    pub fn scale(&self, lambda: MpScalar) -> MpVector {
        MpVector::new(self.iter().map(|e| e.otimes(lambda)).collect())
    }

    /// The partial order: `x <= y` iff `x ⊕ y = y` iff every entry compares.
    pub fn leq(&self, rhs: &MpVector) -> Result<bool> {
        if self.len() != rhs.len() {
            return Err(Error::DimensionMismatch("order on vectors of different length".into()));
        }
        Ok(self.iter().zip(rhs.iter()).all(|(a, b)| a <= b))
    }

    /// The max-plus sup norm: the largest entry.
    pub fn sup_norm(&self) -> MpScalar {
        self.iter().fold(MpScalar::Epsilon, MpScalar::oplus)
    }

    /// Hilbert projective norm `max_i x_i - min_i x_i`. Only defined on
    /// fully finite vectors; the spread is invariant under uniform shifts.
    pub fn projective_norm(&self) -> Result<f64> {
        let mut max = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        for e in self.iter() {
            match e {
                MpScalar::Finite(v) => {
                    max = max.max(v);
                    min = min.min(v);
                }
                MpScalar::Epsilon => {
                    return Err(Error::EpsilonEntry(
                        "projective norm is defined on finite vectors only".into(),
                    ))
                }
            }
        }
        if self.is_empty() {
            return Err(Error::Argument("projective norm of an empty vector".into()));
        }
        Ok(max - min)
    }
}

impl fmt::Debug for MpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row: Vec<String> = self.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", row.join(", "))
    }
}

impl fmt::Display for MpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row: Vec<String> = self.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", row.join(", "))
    }
}

/// Greatest solution of `G ⊗ lambda <= x` (max-plus residuation):
/// `lambda_j = min over i with finite G_ij of (x_i - G_ij)`.
///
/// Epsilon generator entries are skipped rather than mapped to +inf, which
/// keeps the result inside the carrier; a column with no finite entry
/// generates nothing and is rejected. `G ⊗ residual(G, x) <= x` always holds,
/// with equality exactly when `x` lies in the column span of `G`.
pub fn residual(g: &MpMatrix, x: &MpVector) -> Result<MpVector> {
    if g.rows() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "residual of {}x{} generators against length-{} vector",
            g.rows(),
            g.cols(),
            x.len()
        )));
    }
    let mut lambda = Vec::with_capacity(g.cols());
    for j in 0..g.cols() {
        let mut best: Option<MpScalar> = None;
        for i in 0..g.rows() {
            let gij = match g.get(i, j) {
                MpScalar::Epsilon => continue,
                MpScalar::Finite(v) => v,
            };
            let quot = match x.get(i) {
                MpScalar::Epsilon => MpScalar::Epsilon,
                MpScalar::Finite(xi) => MpScalar::finite(xi - gij),
            };
            best = Some(match best {
                None => quot,
                Some(b) => b.min(quot),
            });
        }
        match best {
            None => return Err(Error::DegenerateColumn(j)),
            Some(b) => lambda.push(b),
        }
    }
    Ok(MpVector::new(lambda))
}
