//! Exact rational arithmetic: scalars, sparse vectors, dense matrices,
//! bilinear forms and sparse tensors.
//!
//! Everything here is zero-tolerance. Iteration orders are sorted so that
//! every report built on top of these types is reproducible.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("bilinear form is degenerate")]
    DegenerateForm,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index {index:?} out of bounds for shape {shape:?}")]
    IndexOutOfBounds { index: Vec<usize>, shape: Vec<usize> },
    #[error("cannot parse rational literal {0:?}")]
    ParseScalar(String),
}

/// An exact rational number in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    /// `p/q`; panics if `q == 0`.
    pub fn frac(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `(-1)^k`.
    pub fn sign_pow(k: usize) -> Self {
        if k % 2 == 0 {
            Self::one()
        } else {
            Self::from_int(-1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Scalar(self.0.recip()))
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// Integer value if this scalar is an integer fitting in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        use num::ToPrimitive;
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Scalar {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExactError::ParseScalar(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            Some((p, q)) => {
                let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
                let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar(BigRational::new(p, q)))
            }
            None => {
                let p = BigInt::from_str(t).map_err(|_| bad())?;
                Ok(Scalar(BigRational::from_integer(p)))
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Scalar::from_str(&s).map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(&self.0 $op &rhs.0)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0 $op rhs.0)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(self.0 $op &rhs.0)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(&self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

/// A sparse coordinate vector: entries sorted by index, no stored zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    /// The basis vector `e_i`.
    pub fn basis(i: usize) -> Self {
        SparseVec { entries: vec![(i, Scalar::one())] }
    }

    pub fn single(i: usize, c: Scalar) -> Self {
        if c.is_zero() {
            Self::new()
        } else {
            SparseVec { entries: vec![(i, c)] }
        }
    }

    /// Builds a vector from arbitrary (index, value) pairs, summing repeats.
    pub fn from_pairs(mut pairs: Vec<(usize, Scalar)>) -> Self {
        pairs.sort_by_key(|(i, _)| *i);
        let mut entries: Vec<(usize, Scalar)> = Vec::with_capacity(pairs.len());
        for (i, c) in pairs {
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc += &c,
                _ => entries.push((i, c)),
            }
        }
        entries.retain(|(_, c)| !c.is_zero());
        SparseVec { entries }
    }

    pub fn from_dense(v: &[Scalar]) -> Self {
        SparseVec {
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); dim];
        for (i, c) in &self.entries {
            out[*i] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(i, c)| (*i, c))
    }

    pub fn get(&self, i: usize) -> Scalar {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect(),
        }
    }

    pub fn add(&self, other: &SparseVec) -> Self {
        self.add_scaled(other, &Scalar::one())
    }

    pub fn sub(&self, other: &SparseVec) -> Self {
        self.add_scaled(other, &Scalar::from_int(-1))
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, other: &SparseVec, c: &Scalar) -> Self {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() || b < other.entries.len() {
            let ia = self.entries.get(a).map(|e| e.0);
            let ib = other.entries.get(b).map(|e| e.0);
            match (ia, ib) {
                (Some(x), Some(y)) if x == y => {
                    let v = &self.entries[a].1 + &(&other.entries[b].1 * c);
                    if !v.is_zero() {
                        out.push((x, v));
                    }
                    a += 1;
                    b += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    out.push(self.entries[a].clone());
                    a += 1;
                }
                (Some(_), None) => {
                    out.push(self.entries[a].clone());
                    a += 1;
                }
                (_, Some(y)) => {
                    out.push((y, &other.entries[b].1 * c));
                    b += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        SparseVec { entries: out }
    }

    pub fn dot(&self, other: &SparseVec) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, c) in &self.entries {
            let d = other.get(*i);
            if !d.is_zero() {
                acc += &(c * &d);
            }
        }
        acc
    }

    /// Maps each index through `f`, summing collisions.
    pub fn reindex(&self, f: impl Fn(usize) -> usize) -> Self {
        Self::from_pairs(self.entries.iter().map(|(i, c)| (f(*i), c.clone())).collect())
    }

    /// If `self = c·other` for some scalar `c`, returns `c`.
    pub fn ratio_to(&self, other: &SparseVec) -> Option<Scalar> {
        if other.is_zero() {
            return if self.is_zero() { Some(Scalar::zero()) } else { None };
        }
        let (i0, c0) = &other.entries[0];
        let c = &self.get(*i0) / c0;
        if *self == other.scaled(&c) {
            Some(c)
        } else {
            None
        }
    }
}

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (i, c)) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{i}: {c}")?;
        }
        f.write_str("}")
    }
}

/// Accumulates contributions into a sparse vector.
#[derive(Default)]
pub struct Accumulator {
    map: BTreeMap<usize, Scalar>,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, i: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.map.get_mut(&i) {
            Some(v) => *v += c,
            None => {
                self.map.insert(i, c.clone());
            }
        }
    }

    pub fn add_vec(&mut self, v: &SparseVec, c: &Scalar) {
        for (i, x) in v.iter() {
            self.add(i, &(x * c));
        }
    }

    pub fn finish(self) -> SparseVec {
        SparseVec {
            entries: self.map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

/// A dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
    }

    /// Builds the matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(nrows: usize, cols: &[SparseVec]) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, c) in col.iter() {
                m.set(i, j, c.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, ExactError> {
        if self.cols != other.rows {
            return Err(ExactError::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, ExactError> {
        if v.len() != self.cols {
            return Err(ExactError::ShapeMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn trace(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for i in 0..self.rows.min(self.cols) {
            acc += self.get(i, i);
        }
        acc
    }

    /// Reduced row-echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
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
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let rv = m.get(r, j);
                    if rv.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &(&f * rv);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `{x : self·x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Matrix, ExactError> {
        if self.rows != self.cols {
            return Err(ExactError::ShapeMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(ExactError::SingularMatrix);
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }
}

/// Solves `matrix·x = rhs` exactly.
pub fn solve_linear(matrix: &Matrix, rhs: &[Scalar]) -> Result<Vec<Scalar>, ExactError> {
    if matrix.rows() != matrix.cols() || rhs.len() != matrix.rows() {
        return Err(ExactError::ShapeMismatch(format!(
            "system {}x{} with rhs of length {}",
            matrix.rows(),
            matrix.cols(),
            rhs.len()
        )));
    }
    let n = matrix.rows();
    let mut aug = Matrix::zeros(n, n + 1);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, matrix.get(i, j).clone());
        }
        aug.set(i, n, rhs[i].clone());
    }
    let (r, pivots) = aug.rref();
    if pivots.len() < n || pivots[..n] != (0..n).collect::<Vec<_>>()[..] {
        return Err(ExactError::SingularMatrix);
    }
    Ok((0..n).map(|i| r.get(i, n).clone()).collect())
}

/// A bilinear form given by its Gram matrix `form(e_i, e_j) = matrix[i][j]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BilinearForm {
    matrix: Matrix,
}

impl BilinearForm {
    pub fn new(matrix: Matrix) -> Result<Self, ExactError> {
        if matrix.rows() != matrix.cols() {
            return Err(ExactError::ShapeMismatch("bilinear form must be square".into()));
        }
        Ok(BilinearForm { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        self.matrix.get(i, j)
    }

    pub fn eval(&self, x: &SparseVec, y: &SparseVec) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let m = self.matrix.get(i, j);
                if !m.is_zero() {
                    acc += &(&(a * m) * b);
                }
            }
        }
        acc
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.matrix.rank() == self.dim()
    }

    /// Columns `ě_j` with `form(e_i, ě_j) = δ_ij`.
    pub fn dual_basis(&self) -> Result<Matrix, ExactError> {
        self.matrix.inverse().map_err(|_| ExactError::DegenerateForm)
    }
}

/// Free-function form of [`BilinearForm::dual_basis`].
pub fn dual_basis(form: &BilinearForm) -> Result<Matrix, ExactError> {
    form.dual_basis()
}

/// A sparse tensor with sorted multi-index storage.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseTensor {
    shape: Vec<usize>,
    entries: BTreeMap<Vec<usize>, Scalar>,
}

impl SparseTensor {
    pub fn new(shape: Vec<usize>) -> Self {
        SparseTensor { shape, entries: BTreeMap::new() }
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        let mut t = Self::new(vec![m.rows(), m.cols()]);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                t.add(&[i, j], m.get(i, j)).expect("in bounds");
            }
        }
        t
    }

    pub fn from_vec(dim: usize, v: &SparseVec) -> Self {
        let mut t = Self::new(vec![dim]);
        for (i, c) in v.iter() {
            t.add(&[i], c).expect("in bounds");
        }
        t
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: &[usize]) -> Scalar {
        self.entries.get(index).cloned().unwrap_or_else(Scalar::zero)
    }

    fn check(&self, index: &[usize]) -> Result<(), ExactError> {
        if index.len() != self.shape.len() || index.iter().zip(&self.shape).any(|(i, d)| i >= d) {
            return Err(ExactError::IndexOutOfBounds {
                index: index.to_vec(),
                shape: self.shape.clone(),
            });
        }
        Ok(())
    }

    /// Adds `c` to the entry at `index`, dropping it if it cancels.
    pub fn add(&mut self, index: &[usize], c: &Scalar) -> Result<(), ExactError> {
        self.check(index)?;
        if c.is_zero() {
            return Ok(());
        }
        let v = self.get(index) + c;
        if v.is_zero() {
            self.entries.remove(index);
        } else {
            self.entries.insert(index.to_vec(), v);
        }
        Ok(())
    }

    /// The tensor product `self ⊗ other`; axes of `other` follow those of `self`.
    pub fn outer(&self, other: &SparseTensor) -> SparseTensor {
        let mut shape = self.shape.clone();
        shape.extend_from_slice(&other.shape);
        let mut out = SparseTensor::new(shape);
        for (a, x) in &self.entries {
            for (b, y) in &other.entries {
                let mut idx = a.clone();
                idx.extend_from_slice(b);
                out.entries.insert(idx, x * y);
            }
        }
        out
    }

    /// Sums over each listed pair of axes set equal; the remaining axes keep
    /// their relative order.
    pub fn contract(&self, pairs: &[(usize, usize)]) -> Result<SparseTensor, ExactError> {
        let rank = self.shape.len();
        let mut used = vec![false; rank];
        for &(a, b) in pairs {
            if a >= rank || b >= rank || a == b || used[a] || used[b] {
                return Err(ExactError::ShapeMismatch(format!("bad axis pair ({a},{b})")));
            }
            if self.shape[a] != self.shape[b] {
                return Err(ExactError::ShapeMismatch(format!(
                    "axis {a} has dim {} but axis {b} has dim {}",
                    self.shape[a], self.shape[b]
                )));
            }
            used[a] = true;
            used[b] = true;
        }
        let free: Vec<usize> = (0..rank).filter(|&i| !used[i]).collect();
        let mut out = SparseTensor::new(free.iter().map(|&i| self.shape[i]).collect());
        for (idx, c) in &self.entries {
            if pairs.iter().all(|&(a, b)| idx[a] == idx[b]) {
                let key: Vec<usize> = free.iter().map(|&i| idx[i]).collect();
                out.add(&key, c)?;
            }
        }
        Ok(out)
    }
}

/// Free-function form of [`SparseTensor::contract`].
pub fn contract(t: &SparseTensor, pairs: &[(usize, usize)]) -> Result<SparseTensor, ExactError> {
    t.contract(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64) -> Scalar {
        Scalar::frac(p, q)
    }

    #[test]
    fn scalar_round_trips_through_text() {
        for lit in ["0", "7", "-3/4", "1/3"] {
            assert_eq!(lit.parse::<Scalar>().unwrap().to_string(), lit);
        }
        assert_eq!("6/8".parse::<Scalar>().unwrap(), s(3, 4));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("x".parse::<Scalar>().is_err());
    }

    #[test]
    fn solve_identity_and_swap() {
        let id = Matrix::identity(2);
        assert_eq!(solve_linear(&id, &[s(1, 1), s(2, 1)]).unwrap(), vec![s(1, 1), s(2, 1)]);
        let swap = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(solve_linear(&swap, &[s(5, 1), s(-7, 2)]).unwrap(), vec![s(-7, 2), s(5, 1)]);
    }

    #[test]
    fn solve_hilbert_three() {
        let h = Matrix::from_rows(
            (0..3).map(|i| (0..3).map(|j| s(1, i + j + 1)).collect()).collect(),
        );
        let rhs = vec![s(1, 1), s(0, 1), s(0, 1)];
        let x = solve_linear(&h, &rhs).unwrap();
        // first column of the inverse Hilbert matrix
        assert_eq!(x, vec![s(9, 1), s(-36, 1), s(30, 1)]);
        assert_eq!(h.mul_vec(&x).unwrap(), rhs);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(solve_linear(&m, &[s(1, 1), s(1, 1)]), Err(ExactError::SingularMatrix));
    }

    #[test]
    fn dual_bases() {
        let id = BilinearForm::new(Matrix::identity(3)).unwrap();
        assert_eq!(id.dual_basis().unwrap(), Matrix::identity(3));
        let hyp = BilinearForm::new(Matrix::from_i64(&[&[0, 1], &[1, 0]])).unwrap();
        let d = hyp.dual_basis().unwrap();
        assert_eq!(d.column(0), vec![s(0, 1), s(1, 1)]);
        let deg = BilinearForm::new(Matrix::from_i64(&[&[1, 0], &[0, 0]])).unwrap();
        assert_eq!(deg.dual_basis(), Err(ExactError::DegenerateForm));
    }

    #[test]
    fn contraction_examples() {
        let id = SparseTensor::from_matrix(&Matrix::identity(4));
        let tr = id.contract(&[(0, 1)]).unwrap();
        assert_eq!(tr.get(&[]), Scalar::from_int(4));
        let bad = SparseTensor::new(vec![2, 3]);
        assert!(matches!(bad.contract(&[(0, 1)]), Err(ExactError::ShapeMismatch(_))));
    }

    #[test]
    fn sparse_vector_arithmetic_cancels() {
        let a = SparseVec::from_pairs(vec![(3, s(1, 2)), (1, s(1, 1)), (3, s(1, 2))]);
        assert_eq!(a.get(3), s(1, 1));
        let z = a.sub(&a);
        assert!(z.is_zero());
        assert_eq!(a.scaled(&s(2, 1)).ratio_to(&a), Some(s(2, 1)));
        assert_eq!(a.ratio_to(&SparseVec::basis(1)), None);
    }
}
