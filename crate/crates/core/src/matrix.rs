//! Dense exact matrices over ℚ(i) and the linear-algebra kernel.
//!
//! Matrices act on column vectors: entry `(i, j)` is the coefficient of basis
//! vector `i` in the image of basis vector `j`.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::GaussianRational;

pub type Scalar = GaussianRational;
pub type Vector = Vec<GaussianRational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<GaussianRational>,
}

/// Reduced row-echelon form together with its pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: ExactMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Columns that are not pivots, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.reduced.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.reduced.cols).filter(|&c| !is_pivot[c]).collect()
    }
}

/// Why a matrix failed the positivity test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsdWitness {
    /// `M[row][col] != conj(M[col][row])`.
    NonHermitian { row: usize, col: usize },
    /// A vector with `v* M v = value < 0`.
    NegativeDirection { vector: Vector, value: GaussianRational },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsdReport {
    pub is_hermitian: bool,
    pub is_psd: bool,
    pub witness: Option<PsdWitness>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, entries: vec![GaussianRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, GaussianRational::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> GaussianRational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ExactMatrix { rows, cols, entries }
    }

    pub fn from_rows(rows: Vec<Vector>) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::DimensionMismatch("ragged rows".into()));
        }
        let n = rows.len();
        Ok(ExactMatrix { rows: n, cols, entries: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column {j} has wrong length");
            for (i, x) in c.iter().enumerate() {
                if !x.is_zero() {
                    m.set(i, j, x.clone());
                }
            }
        }
        m
    }

    pub fn diagonal(values: &[GaussianRational]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, v.clone());
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

    pub fn get(&self, i: usize, j: usize) -> &GaussianRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: GaussianRational) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn add_at(&mut self, i: usize, j: usize, value: &GaussianRational) {
        self.entries[i * self.cols + j] += value;
    }

    pub fn row(&self, i: usize) -> &[GaussianRational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// First `(row, col)` where the two matrices differ.
    pub fn first_difference(&self, other: &ExactMatrix) -> Option<(usize, usize)> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .position(|(a, b)| a != b)
            .map(|k| (k / self.cols, k % self.cols))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn conj(&self) -> Self {
        ExactMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|x| x.conj()).collect() }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        ExactMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, other: &ExactMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &ExactMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    fn nonzero_rows(&self) -> Vec<Vec<(usize, &GaussianRational)>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
            .collect()
    }

    /// Matrix product; zero entries on either side are skipped.
    pub fn mul(&self, other: &ExactMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let rhs = other.nonzero_rows();
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for (k, a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for &(j, b) in &rhs[k] {
                    out.entries[i * other.cols + j] += &(a * b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[GaussianRational]) -> Vector {
        assert_eq!(self.cols, v.len(), "shape mismatch in mul_vec");
        let nz: Vec<(usize, &GaussianRational)> = v.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
        (0..self.rows)
            .map(|i| {
                let mut acc = GaussianRational::zero();
                for &(j, x) in &nz {
                    let a = self.get(i, j);
                    if !a.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    /// Rows `[self; other]`.
    pub fn vstack(&self, other: &ExactMatrix) -> Self {
        assert_eq!(self.cols, other.cols, "shape mismatch in vstack");
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        ExactMatrix { rows: self.rows + other.rows, cols: self.cols, entries }
    }

    /// Columns `[self | other]`.
    pub fn hstack(&self, other: &ExactMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "shape mismatch in hstack");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for j in c..m.cols {
                let x = m.get(r, j);
                if !x.is_zero() {
                    let y = x * &inv;
                    m.set(r, j, y);
                }
            }
            let pivot_row: Vec<(usize, GaussianRational)> = (c..m.cols)
                .filter_map(|j| {
                    let x = m.get(r, j);
                    (!x.is_zero()).then(|| (j, x.clone()))
                })
                .collect();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for (j, x) in &pivot_row {
                    let delta = &f * x;
                    m.entries[i * m.cols + j] -= &delta;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { reduced: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Basis of the null space, one vector per free column of the echelon form.
    pub fn kernel_basis(&self) -> Vec<Vector> {
        let rref = self.rref();
        kernel_from_rref(&rref)
    }

    /// Some `x` with `self · x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[GaussianRational]) -> Result<Option<Vector>, MatrixError> {
        if b.len() != self.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let aug = self.hstack(&ExactMatrix::from_columns(self.rows, &[b.to_vec()]));
        let rref = aug.rref();
        if rref.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![GaussianRational::zero(); self.cols];
        for (r, &p) in rref.pivots.iter().enumerate() {
            x[p] = rref.reduced.get(r, self.cols).clone();
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<Self, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let rref = self.hstack(&ExactMatrix::identity(n)).rref();
        if rref.pivots.len() < n || rref.pivots[n - 1] != n - 1 {
            return Err(MatrixError::Singular);
        }
        Ok(Self::from_fn(n, n, |i, j| rref.reduced.get(i, n + j).clone()))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect().is_none()
    }

    fn hermitian_defect(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if *self.get(i, j) != self.get(j, i).conj() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// `v* M v`.
    pub fn quadratic_form(&self, v: &[GaussianRational]) -> GaussianRational {
        let mv = self.mul_vec(v);
        v.iter().zip(&mv).map(|(a, b)| &a.conj() * b).sum()
    }

    /// Exact positive-semidefiniteness test by symmetric pivoting.
    ///
    /// The working matrix is kept congruent to the input, `W = T* M T`, so a
    /// bad direction `w` for `W` gives the witness `T w` for `M`.
    pub fn hermitian_psd(&self) -> Result<PsdReport, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NonSquare { rows: self.rows, cols: self.cols });
        }
        if let Some((row, col)) = self.hermitian_defect() {
            return Ok(PsdReport {
                is_hermitian: false,
                is_psd: false,
                witness: Some(PsdWitness::NonHermitian { row, col }),
            });
        }
        let n = self.rows;
        let mut w = self.clone();
        let mut t = ExactMatrix::identity(n);
        let not_psd = |t: &ExactMatrix, local: Vector| {
            let vector = t.mul_vec(&local);
            let value = self.quadratic_form(&vector);
            debug_assert!(value.real_sign() == Some(std::cmp::Ordering::Less));
            PsdReport {
                is_hermitian: true,
                is_psd: false,
                witness: Some(PsdWitness::NegativeDirection { vector, value }),
            }
        };
        for k in 0..n {
            let d = w.get(k, k).clone();
            let d_re = d.re().clone();
            if d_re.is_negative() {
                let mut e = vec![GaussianRational::zero(); n];
                e[k] = GaussianRational::one();
                return Ok(not_psd(&t, e));
            }
            if d_re.is_zero() {
                let Some(j) = (k + 1..n).find(|&j| !w.get(k, j).is_zero()) else {
                    continue;
                };
                // v = c·m·e_k + e_j gives v*Wv = 2c|m|² + W[j][j]; pick c to make it ≤ −1
                let m = w.get(k, j).clone();
                let wjj = w.get(j, j).re().clone();
                let c = -(wjj.abs() + BigRational::one()) / (BigRational::from_integer(2.into()) * m.norm_sqr());
                let mut e = vec![GaussianRational::zero(); n];
                e[k] = &GaussianRational::real(c) * &m;
                e[j] = GaussianRational::one();
                return Ok(not_psd(&t, e));
            }
            let inv = d.inv().expect("positive pivot");
            let factors: Vec<(usize, GaussianRational)> = (k + 1..n)
                .filter_map(|j| {
                    let x = w.get(k, j);
                    (!x.is_zero()).then(|| (j, x * &inv))
                })
                .collect();
            for (j, l) in &factors {
                // column j -= l·column k, row j -= conj(l)·row k
                for a in k..n {
                    let x = w.get(a, k).clone();
                    if !x.is_zero() {
                        w.entries[a * n + j] -= &(&x * l);
                    }
                }
                let lc = l.conj();
                for b in k..n {
                    let x = w.get(k, b).clone();
                    if !x.is_zero() {
                        w.entries[*j * n + b] -= &(&lc * &x);
                    }
                }
                for a in 0..n {
                    let x = t.get(a, k).clone();
                    if !x.is_zero() {
                        t.entries[a * n + j] -= &(&x * l);
                    }
                }
            }
        }
        Ok(PsdReport { is_hermitian: true, is_psd: true, witness: None })
    }
}

/// Null-space basis read off an echelon form.
pub fn kernel_from_rref(rref: &Rref) -> Vec<Vector> {
    let cols = rref.reduced.cols();
    rref.free_columns()
        .into_iter()
        .map(|f| {
            let mut v = vec![GaussianRational::zero(); cols];
            v[f] = GaussianRational::one();
            for (r, &p) in rref.pivots.iter().enumerate() {
                v[p] = -rref.reduced.get(r, f);
            }
            v
        })
        .collect()
}

/// Rank of a list of vectors of common length `dim`.
pub fn span_rank(dim: usize, vectors: &[Vector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    ExactMatrix::from_columns(dim, vectors).rank()
}

/// Whether `v` lies in the span of `vectors`.
pub fn in_span(dim: usize, vectors: &[Vector], v: &[GaussianRational]) -> bool {
    if v.iter().all(Zero::is_zero) {
        return true;
    }
    if vectors.is_empty() {
        return false;
    }
    let m = ExactMatrix::from_columns(dim, vectors);
    matches!(m.solve(v), Ok(Some(_)))
}

pub fn is_zero_vector(v: &[GaussianRational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn vec_add(a: &[GaussianRational], b: &[GaussianRational]) -> Vector {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[GaussianRational], b: &[GaussianRational]) -> Vector {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[GaussianRational], c: &GaussianRational) -> Vector {
    a.iter().map(|x| x * c).collect()
}

pub fn unit_vector(dim: usize, k: usize) -> Vector {
    let mut v = vec![GaussianRational::zero(); dim];
    v[k] = GaussianRational::one();
    v
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::gr;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| gr(x, 0)).collect()).collect()).unwrap()
    }

    #[test]
    fn rref_identity_and_zero() {
        let r = ExactMatrix::identity(3).rref();
        assert_eq!(r.pivots, vec![0, 1, 2]);
        let r = ExactMatrix::zeros(2, 5).rref();
        assert_eq!(r.rank(), 0);
        assert!(r.pivots.is_empty());
    }

    #[test]
    fn kernel_of_single_equation() {
        let a = ExactMatrix::from_rows(vec![vec![gr(1, 0), gr(0, 1)]]).unwrap();
        let k = a.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![gr(0, -1), gr(1, 0)]);
        assert!(ExactMatrix::identity(4).kernel_basis().is_empty());
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), ExactMatrix::identity(2));
        let x = a.solve(&[gr(3, 0), gr(4, 0)]).unwrap().unwrap();
        assert_eq!(x, vec![gr(1, 0), gr(1, 0)]);
        let singular = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(singular.inverse(), Err(MatrixError::Singular));
        assert_eq!(singular.solve(&[gr(1, 0), gr(0, 0)]).unwrap(), None);
    }

    #[test]
    fn psd_diagonal_cases() {
        let ok = ExactMatrix::diagonal(&[gr(1, 0), gr(0, 0), gr(2, 0)]).hermitian_psd().unwrap();
        assert!(ok.is_psd && ok.is_hermitian && ok.witness.is_none());
        let bad = ExactMatrix::diagonal(&[gr(1, 0), gr(-1, 0)]).hermitian_psd().unwrap();
        assert!(!bad.is_psd);
        match bad.witness {
            Some(PsdWitness::NegativeDirection { vector, value }) => {
                assert_eq!(vector, vec![gr(0, 0), gr(1, 0)]);
                assert_eq!(value, gr(-1, 0));
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn psd_zero_pivot_with_coupling() {
        let a = m(&[&[0, 1], &[1, 0]]);
        let r = a.hermitian_psd().unwrap();
        let Some(PsdWitness::NegativeDirection { vector, value }) = r.witness else { panic!() };
        assert_eq!(a.quadratic_form(&vector), value);
        assert_eq!(value.real_sign(), Some(std::cmp::Ordering::Less));
    }

    #[test]
    fn psd_detects_non_hermitian() {
        let a = ExactMatrix::from_rows(vec![vec![gr(1, 0), gr(0, 1)], vec![gr(0, 1), gr(1, 0)]]).unwrap();
        let r = a.hermitian_psd().unwrap();
        assert!(!r.is_hermitian && !r.is_psd);
        assert_eq!(r.witness, Some(PsdWitness::NonHermitian { row: 0, col: 1 }));
        assert!(ExactMatrix::zeros(2, 3).hermitian_psd().is_err());
    }

    #[test]
    fn psd_indefinite_after_elimination() {
        // positive leading pivot hides a negative Schur complement
        let a = m(&[&[1, 2], &[2, 1]]);
        let r = a.hermitian_psd().unwrap();
        let Some(PsdWitness::NegativeDirection { vector, value }) = r.witness else { panic!() };
        assert_eq!(a.quadratic_form(&vector), value);
        assert_eq!(value.real_sign(), Some(std::cmp::Ordering::Less));
    }

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ExactMatrix> {
        proptest::collection::vec((-3i64..=3, -3i64..=3), rows * cols)
            .prop_map(move |v| ExactMatrix::from_fn(rows, cols, |i, j| gr(v[i * cols + j].0, v[i * cols + j].1)))
    }

    proptest! {
        #[test]
        fn kernel_is_exact(a in (1usize..6, 1usize..7).prop_flat_map(|(r, c)| arb_matrix(r, c))) {
            let k = a.kernel_basis();
            for v in &k {
                prop_assert!(is_zero_vector(&a.mul_vec(v)));
            }
            prop_assert_eq!(a.rank() + k.len(), a.cols());
            prop_assert_eq!(span_rank(a.cols(), &k), k.len());
        }

        #[test]
        fn gram_matrices_are_psd(n in arb_matrix(4, 5)) {
            let g = n.conj_transpose().mul(&n);
            let r = g.hermitian_psd().unwrap();
            prop_assert!(r.is_hermitian && r.is_psd);
        }

        #[test]
        fn negated_gram_witness_is_exact(n in arb_matrix(3, 4)) {
            let g = n.conj_transpose().mul(&n).scale(&gr(-1, 0));
            let r = g.hermitian_psd().unwrap();
            if g.is_zero() {
                prop_assert!(r.is_psd);
            } else {
                prop_assert!(!r.is_psd);
                let Some(PsdWitness::NegativeDirection { vector, value }) = r.witness else {
                    return Err(TestCaseError::fail("missing witness"));
                };
                prop_assert_eq!(g.quadratic_form(&vector), value.clone());
                prop_assert_eq!(value.real_sign(), Some(std::cmp::Ordering::Less));
            }
        }
    }
}
