use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result, StateVector, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Square sparse matrix in compressed-row form.
///
/// Entries are sorted by `(row, col)`, duplicates are summed on construction
/// and exact zeros are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

impl SparseOperator {
    pub fn zero(dim: usize) -> Self {
        Self { dim, row_start: vec![0; dim + 1], cols: Vec::new(), values: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let dim = values.len();
        let triplets = values.iter().enumerate().map(|(i, &v)| (i, i, v));
        Self::from_triplets(dim, triplets).expect("diagonal indices are in range")
    }

    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut t: Vec<(usize, usize, C64)> = Vec::new();
        for (row, col, v) in triplets {
            if row >= dim || col >= dim {
                return Err(Error::IndexOutOfRange { row, col, dim });
            }
            t.push((row, col, v));
        }
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != ZERO);

        let mut row_start = vec![0; dim + 1];
        for &(r, _, _) in &merged {
            row_start[r + 1] += 1;
        }
        for i in 0..dim {
            row_start[i + 1] += row_start[i];
        }
        Ok(Self {
            dim,
            row_start,
            cols: merged.iter().map(|e| e.1).collect(),
            values: merged.iter().map(|e| e.2).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// All stored entries as `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_start[r]..self.row_start[r + 1]).map(move |k| (r, self.cols[k], self.values[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let range = self.row_start[row]..self.row_start[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.values[range.start + k],
            Err(_) => ZERO,
        }
    }

    /// `out = self * x`.
    pub fn apply_into(&self, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_start[r]..self.row_start[r + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    /// `out += factor * self * x`.
    pub fn apply_add(&self, factor: C64, x: &[C64], out: &mut [C64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_start[r]..self.row_start[r + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *o += factor * acc;
        }
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        let mut out = StateVector::zeros(self.dim);
        self.apply_into(psi.amplitudes(), out.amplitudes_mut());
        out
    }

    /// `<bra| self |ket>`.
    pub fn matrix_element(&self, bra: &StateVector, ket: &StateVector) -> C64 {
        bra.inner(&self.apply(ket))
    }

    pub fn expectation(&self, psi: &StateVector) -> C64 {
        self.matrix_element(psi, psi)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(r, c, v)| (c, r, v.conj())))
            .expect("adjoint preserves index range")
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(r, c, v)| (r, c, v * factor)))
            .expect("scaling preserves index range")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Self::from_triplets(self.dim, self.entries().chain(other.entries()))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut triplets = Vec::new();
        for (r, k, a) in self.entries() {
            for j in other.row_start[k]..other.row_start[k + 1] {
                triplets.push((r, other.cols[j], a * other.values[j]));
            }
        }
        Self::from_triplets(self.dim, triplets)
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.add(&other.mul(self)?.scaled(C64::new(-1.0, 0.0)))
    }

    /// Largest `|A_ij - conj(A_ji)|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries().map(|(r, c, v)| (v - self.get(c, r).conj()).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<C64> {
        let mut m = vec![ZERO; self.dim * self.dim];
        for (r, c, v) in self.entries() {
            m[r * self.dim + c] = v;
        }
        m
    }
}
