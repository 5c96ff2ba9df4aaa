//! Finite-dimensional graded Frobenius algebras.
//!
//! An algebra is stored by its products of basis vectors, a unit vector and
//! the Gram matrix of the metric `η`. The counit is `ε(x) = η(x, 1)`.
//! Comultiplication, dual bases and the Euler class are derived on first use
//! and cached.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{Accumulator, BilinearForm, ExactError, Matrix, Scalar, SparseTensor, SparseVec};
use crate::report::{locate_json, Check, Report};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrobeniusError {
    #[error("elements belong to different algebras")]
    ParentMismatch,
    #[error("metric is degenerate")]
    DegenerateForm,
    #[error("derivative has no isolated zero at the origin: {0}")]
    NotIsolated(String),
    #[error("invalid algebra data in field `{field}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Invalid { field: String, line: Option<usize>, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("algebra is not graded")]
    NotGraded,
}

impl From<ExactError> for FrobeniusError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::DegenerateForm | ExactError::SingularMatrix => FrobeniusError::DegenerateForm,
            other => FrobeniusError::Invalid { field: "data".into(), line: None, message: other.to_string() },
        }
    }
}

fn invalid(field: &str, message: impl Into<String>) -> FrobeniusError {
    FrobeniusError::Invalid { field: field.into(), line: None, message: message.into() }
}

#[derive(Debug)]
struct Derived {
    /// Left duals: column `j` is `ě_j` with `η(ě_j, e_i) = δ_ij`.
    left_dual: Matrix,
    /// `Δ(e_i)` over pair indices `j·dim + k`.
    coproducts: Vec<SparseVec>,
    euler: SparseVec,
}

/// A finite-dimensional Frobenius algebra over the rationals.
#[derive(Debug)]
pub struct FrobeniusAlgebra {
    name: String,
    labels: Vec<String>,
    products: Vec<SparseVec>,
    unit: SparseVec,
    metric: BilinearForm,
    degrees: Option<Vec<Scalar>>,
    top_degree: Option<Scalar>,
    parity: Vec<u8>,
    derived: OnceLock<Result<Derived, FrobeniusError>>,
}

impl Clone for FrobeniusAlgebra {
    fn clone(&self) -> Self {
        FrobeniusAlgebra {
            name: self.name.clone(),
            labels: self.labels.clone(),
            products: self.products.clone(),
            unit: self.unit.clone(),
            metric: self.metric.clone(),
            degrees: self.degrees.clone(),
            top_degree: self.top_degree.clone(),
            parity: self.parity.clone(),
            derived: OnceLock::new(),
        }
    }
}

impl PartialEq for FrobeniusAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.products == other.products
            && self.unit == other.unit
            && self.metric == other.metric
            && self.degrees == other.degrees
            && self.top_degree == other.top_degree
            && self.parity == other.parity
    }
}

/// Raw ingredients of an algebra, before structural validation.
#[derive(Clone, Debug)]
pub struct AlgebraParts {
    pub name: String,
    pub labels: Vec<String>,
    /// `products[i·dim + j] = e_i · e_j`.
    pub products: Vec<SparseVec>,
    pub unit: SparseVec,
    pub metric: Matrix,
    pub degrees: Option<Vec<Scalar>>,
    pub top_degree: Option<Scalar>,
    pub parity: Vec<u8>,
}

impl FrobeniusAlgebra {
    /// Validates shapes and index bounds. Axioms are checked separately by
    /// [`verify_frobenius`].
    pub fn from_parts(parts: AlgebraParts) -> Result<Self, FrobeniusError> {
        let dim = parts.labels.len();
        if dim == 0 {
            return Err(invalid("dim", "dimension must be positive"));
        }
        if parts.products.len() != dim * dim {
            return Err(invalid("mult", format!("expected {} products", dim * dim)));
        }
        if parts.products.iter().chain([&parts.unit]).any(|v| v.max_index().is_some_and(|m| m >= dim)) {
            return Err(invalid("mult", "basis index out of range"));
        }
        if parts.metric.rows() != dim || parts.metric.cols() != dim {
            return Err(invalid("metric", "metric must be dim x dim"));
        }
        if parts.degrees.as_ref().is_some_and(|d| d.len() != dim) {
            return Err(invalid("degrees", "one degree per basis element"));
        }
        if parts.parity.len() != dim || parts.parity.iter().any(|&p| p > 1) {
            return Err(invalid("parity", "one parity in {0,1} per basis element"));
        }
        Ok(FrobeniusAlgebra {
            name: parts.name,
            labels: parts.labels,
            products: parts.products,
            unit: parts.unit,
            metric: BilinearForm::new(parts.metric)?,
            degrees: parts.degrees,
            top_degree: parts.top_degree,
            parity: parts.parity,
            derived: OnceLock::new(),
        })
    }

    pub fn parts(&self) -> AlgebraParts {
        AlgebraParts {
            name: self.name.clone(),
            labels: self.labels.clone(),
            products: self.products.clone(),
            unit: self.unit.clone(),
            metric: self.metric.matrix().clone(),
            degrees: self.degrees.clone(),
            top_degree: self.top_degree.clone(),
            parity: self.parity.clone(),
        }
    }

    /// The ground field `k` with `η(1,1) = 1`.
    pub fn point() -> Self {
        Self::from_parts(AlgebraParts {
            name: "pt".into(),
            labels: vec!["1".into()],
            products: vec![SparseVec::basis(0)],
            unit: SparseVec::basis(0),
            metric: Matrix::identity(1),
            degrees: Some(vec![Scalar::zero()]),
            top_degree: Some(Scalar::zero()),
            parity: vec![0],
        })
        .expect("point algebra is well formed")
    }

    /// `k[z]/(z^m)` with basis `1, z, …, z^{m−1}`, `deg z = 1` and
    /// `ε(z^{m−1}) = top`.
    pub fn truncated_with(m: usize, top: Scalar) -> Self {
        assert!(m >= 1 && !top.is_zero());
        let mut products = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                products.push(if i + j < m { SparseVec::basis(i + j) } else { SparseVec::new() });
            }
        }
        let mut metric = Matrix::zeros(m, m);
        for i in 0..m {
            metric.set(i, m - 1 - i, top.clone());
        }
        let labels = (0..m)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "z".to_string(),
                _ => format!("z^{i}"),
            })
            .collect();
        Self::from_parts(AlgebraParts {
            name: format!("k[z]/(z^{m})"),
            labels,
            products,
            unit: SparseVec::basis(0),
            metric,
            degrees: Some((0..m).map(|i| Scalar::from_int(i as i64)).collect()),
            top_degree: Some(Scalar::from_int(m as i64 - 1)),
            parity: vec![0; m],
        })
        .expect("truncated polynomial algebra is well formed")
    }

    /// `k[z]/(z^m)` with `ε(z^{m−1}) = 1`.
    pub fn truncated(m: usize) -> Self {
        Self::truncated_with(m, Scalar::one())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> &SparseVec {
        &self.unit
    }

    pub fn metric(&self) -> &BilinearForm {
        &self.metric
    }

    pub fn degrees(&self) -> Option<&[Scalar]> {
        self.degrees.as_deref()
    }

    pub fn top_degree(&self) -> Option<&Scalar> {
        self.top_degree.as_ref()
    }

    pub fn parity(&self) -> &[u8] {
        &self.parity
    }

    pub fn is_even(&self) -> bool {
        self.parity.iter().all(|&p| p == 0)
    }

    /// `e_i · e_j`.
    pub fn product_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.products[i * self.dim() + j]
    }

    pub fn multiply(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                acc.add_vec(self.product_basis(i, j), &(x * y));
            }
        }
        acc.finish()
    }

    /// The structure-constant tensor `c_{ij}^k` with shape `[dim, dim, dim]`.
    pub fn mult_tensor(&self) -> SparseTensor {
        let d = self.dim();
        let mut t = SparseTensor::new(vec![d, d, d]);
        for i in 0..d {
            for j in 0..d {
                for (k, c) in self.product_basis(i, j).iter() {
                    t.add(&[i, j, k], c).expect("in bounds");
                }
            }
        }
        t
    }

    pub fn pairing(&self, a: &SparseVec, b: &SparseVec) -> Scalar {
        self.metric.eval(a, b)
    }

    /// `ε(x) = η(x, 1)`.
    pub fn counit(&self, a: &SparseVec) -> Scalar {
        self.metric.eval(a, &self.unit)
    }

    fn derived(&self) -> Result<&Derived, FrobeniusError> {
        self.derived
            .get_or_init(|| self.compute_derived())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn compute_derived(&self) -> Result<Derived, FrobeniusError> {
        let d = self.dim();
        let left_dual = self.metric.matrix().transpose().inverse().map_err(|_| FrobeniusError::DegenerateForm)?;
        let duals: Vec<SparseVec> = (0..d).map(|j| SparseVec::from_dense(&left_dual.column(j))).collect();
        let mut coproducts = Vec::with_capacity(d);
        for i in 0..d {
            let ei = SparseVec::basis(i);
            let mut acc = Accumulator::new();
            for j in 0..d {
                for k in 0..d {
                    let c = self.pairing(&ei, self.product_basis(j, k));
                    if c.is_zero() {
                        continue;
                    }
                    for (a, x) in duals[j].iter() {
                        for (b, y) in duals[k].iter() {
                            acc.add(a * d + b, &(&c * &(x * y)));
                        }
                    }
                }
            }
            coproducts.push(acc.finish());
        }
        let mut euler = Accumulator::new();
        for (i, c) in self.unit.iter() {
            for (pair, x) in coproducts[i].iter() {
                euler.add_vec(self.product_basis(pair / d, pair % d), &(c * x));
            }
        }
        Ok(Derived { left_dual, coproducts, euler: euler.finish() })
    }

    /// Columns `ě_j` with `η(e_i, ě_j) = δ_ij`.
    pub fn dual_basis(&self) -> Result<Matrix, FrobeniusError> {
        Ok(self.metric.dual_basis()?)
    }

    /// `ρ`, the element with `η(ρ, e_i) = δ_{i,u}` where `1 = e_u`; `None`
    /// if the unit is not a basis vector.
    pub fn rho(&self) -> Result<Option<SparseVec>, FrobeniusError> {
        let der = self.derived()?;
        let mut it = self.unit.iter();
        match (it.next(), it.next()) {
            (Some((u, c)), None) if c.is_one() => Ok(Some(SparseVec::from_dense(&der.left_dual.column(u)))),
            _ => Ok(None),
        }
    }

    /// `Δ(a)` over pair indices `j·dim + k`.
    pub fn comultiply(&self, a: &SparseVec) -> Result<SparseVec, FrobeniusError> {
        let der = self.derived()?;
        let mut acc = Accumulator::new();
        for (i, c) in a.iter() {
            acc.add_vec(&der.coproducts[i], c);
        }
        Ok(acc.finish())
    }

    /// `Δ(e_i)` over pair indices.
    pub fn coproduct_basis(&self, i: usize) -> Result<&SparseVec, FrobeniusError> {
        Ok(&self.derived()?.coproducts[i])
    }

    /// `e = μ(Δ(1))`.
    pub fn euler_class(&self) -> Result<SparseVec, FrobeniusError> {
        Ok(self.derived()?.euler.clone())
    }

    /// `a^k` with `a^0 = 1`.
    pub fn power(&self, a: &SparseVec, k: u64) -> SparseVec {
        let mut out = self.unit.clone();
        for _ in 0..k {
            out = self.multiply(&out, a);
        }
        out
    }

    pub fn is_commutative(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (i + 1..d).all(|j| self.product_basis(i, j) == self.product_basis(j, i)))
    }

    /// Degree-0 part spanned by `1`, all degrees nonnegative.
    pub fn is_graded_connected(&self) -> bool {
        let Some(deg) = &self.degrees else { return false };
        if deg.iter().any(Scalar::is_negative) {
            return false;
        }
        let zero: Vec<usize> = (0..self.dim()).filter(|&i| deg[i].is_zero()).collect();
        zero.len() == 1 && self.unit == SparseVec::basis(zero[0]).scaled(&self.unit.get(zero[0]))
    }

    /// Degree of a homogeneous vector; `None` if ungraded or inhomogeneous.
    pub fn degree_of(&self, v: &SparseVec) -> Option<Scalar> {
        let deg = self.degrees.as_ref()?;
        let mut it = v.iter().map(|(i, _)| &deg[i]);
        let first = it.next()?.clone();
        it.all(|d| *d == first).then_some(first)
    }
}

/// Coordinates of a pure tensor given by one sparse vector per factor,
/// with the first factor most significant.
pub fn outer_product(factors: &[&SparseVec], dims: &[usize]) -> SparseVec {
    let mut acc: Vec<(usize, Scalar)> = vec![(0, Scalar::one())];
    for (v, &d) in factors.iter().zip(dims) {
        let mut next = Vec::with_capacity(acc.len() * v.nnz());
        for (idx, c) in &acc {
            for (i, x) in v.iter() {
                next.push((idx * d + i, c * x));
            }
        }
        acc = next;
    }
    SparseVec::from_pairs(acc)
}

/// Mixed-radix digits of `idx` for `n` factors of size `d`, most significant first.
pub fn multi_index(mut idx: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = idx % d;
        idx /= d;
    }
    out
}

pub fn flat_index(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &i| acc * d + i)
}

fn koszul(pa: &[u8], pb: &[u8]) -> usize {
    let mut s = 0usize;
    for i in 0..pa.len() {
        for j in 0..i {
            s += (pa[i] * pb[j]) as usize;
        }
    }
    s
}

/// `A^{⊗n}` with lexicographic multi-index basis and Koszul signs; `n = 0`
/// gives the ground field.
pub fn tensor_power(a: &FrobeniusAlgebra, n: usize) -> FrobeniusAlgebra {
    let d = a.dim();
    let total = d.pow(n as u32);
    let digits: Vec<Vec<usize>> = (0..total).map(|i| multi_index(i, d, n)).collect();
    let par: Vec<Vec<u8>> = digits.iter().map(|ix| ix.iter().map(|&i| a.parity[i]).collect()).collect();
    let mut products = Vec::with_capacity(total * total);
    for x in 0..total {
        for y in 0..total {
            let factors: Vec<&SparseVec> = (0..n).map(|k| a.product_basis(digits[x][k], digits[y][k])).collect();
            let v = outer_product(&factors, &vec![d; n]);
            products.push(v.scaled(&Scalar::sign_pow(koszul(&par[x], &par[y]))));
        }
    }
    let mut metric = Matrix::zeros(total, total);
    for x in 0..total {
        for y in 0..total {
            let mut c = Scalar::sign_pow(koszul(&par[x], &par[y]));
            for k in 0..n {
                c = &c * a.metric.entry(digits[x][k], digits[y][k]);
                if c.is_zero() {
                    break;
                }
            }
            metric.set(x, y, c);
        }
    }
    let unit = outer_product(&vec![&a.unit; n], &vec![d; n]);
    let labels = digits
        .iter()
        .map(|ix| {
            if n == 0 {
                "1".to_string()
            } else {
                ix.iter().map(|&i| a.labels[i].as_str()).collect::<Vec<_>>().join("⊗")
            }
        })
        .collect();
    let degrees = a.degrees.as_ref().map(|deg| {
        digits
            .iter()
            .map(|ix| ix.iter().fold(Scalar::zero(), |acc, &i| acc + &deg[i]))
            .collect()
    });
    let top = a.top_degree.as_ref().map(|t| t * &Scalar::from_int(n as i64));
    FrobeniusAlgebra::from_parts(AlgebraParts {
        name: format!("({})^{n}", a.name),
        labels,
        products,
        unit,
        metric,
        degrees,
        top_degree: top,
        parity: par.iter().map(|p| p.iter().sum::<u8>() % 2).collect(),
    })
    .expect("tensor power is well formed")
}

/// The local Milnor ring at the origin of a one-variable polynomial, given by
/// coefficients `f_coeffs[i]` of `z^i`.
///
/// If `f′ = c·z^m + (higher terms)` with `c ≠ 0`, the local algebra is
/// `k[z]/(z^m)` and the residue normalization gives `ε(z^{m−1}) = 1/c`.
pub fn milnor_univariate(f_coeffs: &[Scalar]) -> Result<FrobeniusAlgebra, FrobeniusError> {
    let deriv: Vec<Scalar> = f_coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * &Scalar::from_int(i as i64))
        .collect();
    let Some(m) = deriv.iter().position(|c| !c.is_zero()) else {
        return Err(FrobeniusError::NotIsolated("f′ vanishes identically".into()));
    };
    if m == 0 {
        return Err(FrobeniusError::NotIsolated("f′(0) ≠ 0, the origin is not critical".into()));
    }
    let top = deriv[m].inv().expect("nonzero");
    let name = format!("Milnor ring of f = {}", poly_to_string(f_coeffs));
    Ok(FrobeniusAlgebra::truncated_with(m, top).with_name(name))
}

fn poly_to_string(c: &[Scalar]) -> String {
    let terms: Vec<String> = c
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| match i {
            0 => x.to_string(),
            1 => format!("{x}z"),
            _ => format!("{x}z^{i}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn basis_name(a: &FrobeniusAlgebra, i: usize) -> String {
    format!("{}#{}", a.labels[i], i)
}

/// Checks associativity, unit laws, metric invariance, nondegeneracy and
/// grading, reporting a basis witness for each failure.
pub fn verify_frobenius(a: &FrobeniusAlgebra) -> Report {
    let d = a.dim();
    let mut report = Report::new(format!("Frobenius axioms for {}", a.name));
    let e = |i| SparseVec::basis(i);

    let mut witness = None;
    'assoc: for i in 0..d {
        for j in 0..d {
            let ij = a.product_basis(i, j);
            for k in 0..d {
                let left = a.multiply(ij, &e(k));
                let right = a.multiply(&e(i), a.product_basis(j, k));
                if left != right {
                    witness = Some(format!(
                        "(e_i,e_j,e_k) = ({}, {}, {}): (ab)c = {:?}, a(bc) = {:?}",
                        basis_name(a, i),
                        basis_name(a, j),
                        basis_name(a, k),
                        left,
                        right
                    ));
                    break 'assoc;
                }
            }
        }
    }
    report.push(Check::new("associativity", (d * d * d) as u64, witness));

    let mut witness = None;
    for i in 0..d {
        let l = a.multiply(&a.unit, &e(i));
        let r = a.multiply(&e(i), &a.unit);
        if l != e(i) || r != e(i) {
            witness = Some(format!("a = {}: 1·a = {l:?}, a·1 = {r:?}", basis_name(a, i)));
            break;
        }
    }
    report.push(Check::new("unit", d as u64, witness));

    let mut witness = None;
    'inv: for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let l = a.pairing(a.product_basis(i, j), &e(k));
                let r = a.pairing(&e(i), a.product_basis(j, k));
                if l != r {
                    witness = Some(format!(
                        "(a,b,c) = ({}, {}, {}): η(ab,c) = {l}, η(a,bc) = {r}",
                        basis_name(a, i),
                        basis_name(a, j),
                        basis_name(a, k)
                    ));
                    break 'inv;
                }
            }
        }
    }
    report.push(Check::new("metric invariance", (d * d * d) as u64, witness));

    let rank = a.metric.matrix().rank();
    let witness = (rank < d).then(|| format!("metric has rank {rank} < {d}"));
    report.push(Check::new("nondegeneracy", 1, witness));

    let mut witness = None;
    let mut count = 0u64;
    match (&a.degrees, &a.top_degree) {
        (Some(deg), Some(top)) => {
            'grade: for i in 0..d {
                for j in 0..d {
                    count += 1;
                    for (k, _) in a.product_basis(i, j).iter() {
                        if deg[k] != &deg[i] + &deg[j] || a.parity[k] != (a.parity[i] + a.parity[j]) % 2 {
                            witness = Some(format!(
                                "e_i·e_j for ({}, {}) has component {} of the wrong degree or parity",
                                basis_name(a, i),
                                basis_name(a, j),
                                basis_name(a, k)
                            ));
                            break 'grade;
                        }
                    }
                    let m = a.metric.entry(i, j);
                    if !m.is_zero() && (&deg[i] + &deg[j] != *top || a.parity[i] != a.parity[j]) {
                        witness = Some(format!(
                            "η({}, {}) = {m} but degrees sum to {} ≠ d = {top}",
                            basis_name(a, i),
                            basis_name(a, j),
                            &deg[i] + &deg[j]
                        ));
                        break 'grade;
                    }
                }
            }
            if witness.is_none() && a.degree_of(&a.unit).is_some_and(|u| !u.is_zero()) {
                witness = Some("unit is not of degree 0".into());
            }
        }
        _ => return report,
    }
    report.push(Check::new("grading homogeneity", count, witness));
    report
}

/// On-disk form of an algebra definition.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub name: String,
    pub dim: usize,
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_degree: Option<Scalar>,
    pub unit: Vec<Scalar>,
    pub mult: Vec<(usize, usize, usize, Scalar)>,
    pub metric: Vec<(usize, usize, Scalar)>,
    #[serde(default)]
    pub parity: Vec<u8>,
}

impl AlgebraFile {
    pub fn from_algebra(a: &FrobeniusAlgebra) -> Self {
        let d = a.dim();
        let mut mult = Vec::new();
        for i in 0..d {
            for j in 0..d {
                for (k, c) in a.product_basis(i, j).iter() {
                    mult.push((i, j, k, c.clone()));
                }
            }
        }
        let mut metric = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let c = a.metric.entry(i, j);
                if !c.is_zero() {
                    metric.push((i, j, c.clone()));
                }
            }
        }
        AlgebraFile {
            name: a.name.clone(),
            dim: d,
            labels: a.labels.clone(),
            degrees: a.degrees.clone(),
            top_degree: a.top_degree.clone(),
            unit: a.unit.to_dense(d),
            mult,
            metric,
            parity: a.parity.clone(),
        }
    }

    /// Builds the algebra; `src` is used only to attach line numbers.
    pub fn into_algebra(self, src: Option<&str>) -> Result<FrobeniusAlgebra, FrobeniusError> {
        let line = |field: &str, index: Option<usize>| src.and_then(|s| locate_json(s, field, index));
        let err = |field: &str, index: Option<usize>, message: String| FrobeniusError::Invalid {
            field: match index {
                Some(i) => format!("{field}[{i}]"),
                None => field.to_string(),
            },
            line: line(field, index),
            message,
        };
        let d = self.dim;
        if d == 0 {
            return Err(err("dim", None, "dimension must be positive".into()));
        }
        if self.labels.len() != d {
            return Err(err("labels", None, format!("{} labels for dim {d}", self.labels.len())));
        }
        if self.unit.len() != d {
            return Err(err("unit", None, format!("{} coordinates for dim {d}", self.unit.len())));
        }
        let mut products = vec![Vec::new(); d * d];
        let mut seen = std::collections::BTreeSet::new();
        for (idx, (i, j, k, c)) in self.mult.iter().enumerate() {
            if *i >= d || *j >= d || *k >= d {
                return Err(err("mult", Some(idx), format!("index out of range for dim {d}")));
            }
            if !seen.insert((*i, *j, *k)) {
                return Err(err("mult", Some(idx), "duplicate entry".into()));
            }
            products[i * d + j].push((*k, c.clone()));
        }
        let mut metric = Matrix::zeros(d, d);
        let mut seen = std::collections::BTreeSet::new();
        for (idx, (i, j, c)) in self.metric.iter().enumerate() {
            if *i >= d || *j >= d {
                return Err(err("metric", Some(idx), format!("index out of range for dim {d}")));
            }
            if !seen.insert((*i, *j)) {
                return Err(err("metric", Some(idx), "duplicate entry".into()));
            }
            metric.set(*i, *j, c.clone());
        }
        if let Some(deg) = &self.degrees {
            if deg.len() != d {
                return Err(err("degrees", None, format!("{} degrees for dim {d}", deg.len())));
            }
        }
        let parity = if self.parity.is_empty() { vec![0; d] } else { self.parity.clone() };
        if parity.len() != d || parity.iter().any(|&p| p > 1) {
            return Err(err("parity", None, "expected one entry in {0,1} per basis element".into()));
        }
        let top_degree = match (&self.top_degree, &self.degrees) {
            (Some(t), _) => Some(t.clone()),
            (None, Some(deg)) => deg.iter().max().cloned(),
            _ => None,
        };
        FrobeniusAlgebra::from_parts(AlgebraParts {
            name: self.name,
            labels: self.labels,
            products: products.into_iter().map(SparseVec::from_pairs).collect(),
            unit: SparseVec::from_dense(&self.unit),
            metric,
            degrees: self.degrees,
            top_degree,
            parity,
        })
    }
}

/// Parses an algebra definition, reporting JSON syntax errors by position and
/// structural errors by field and line.
pub fn read_algebra(src: &str) -> Result<FrobeniusAlgebra, FrobeniusError> {
    let file: AlgebraFile = serde_json::from_str(src).map_err(|e| FrobeniusError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.into_algebra(Some(src))
}

/// Serializes with entries in sorted order.
pub fn write_algebra(a: &FrobeniusAlgebra) -> String {
    let file = AlgebraFile::from_algebra(a);
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"name\": {},\n", serde_json::to_string(&file.name).unwrap()));
    out.push_str(&format!("  \"dim\": {},\n", file.dim));
    out.push_str(&format!("  \"labels\": {},\n", serde_json::to_string(&file.labels).unwrap()));
    if let Some(d) = &file.degrees {
        out.push_str(&format!("  \"degrees\": {},\n", serde_json::to_string(d).unwrap()));
    }
    if let Some(t) = &file.top_degree {
        out.push_str(&format!("  \"top_degree\": {},\n", serde_json::to_string(t).unwrap()));
    }
    out.push_str(&format!("  \"unit\": {},\n", serde_json::to_string(&file.unit).unwrap()));
    let rows = |items: Vec<String>| {
        if items.is_empty() {
            "[]".to_string()
        } else {
            format!("[\n    {}\n  ]", items.join(",\n    "))
        }
    };
    out.push_str(&format!(
        "  \"mult\": {},\n",
        rows(file.mult.iter().map(|e| serde_json::to_string(e).unwrap()).collect())
    ));
    out.push_str(&format!(
        "  \"metric\": {},\n",
        rows(file.metric.iter().map(|e| serde_json::to_string(e).unwrap()).collect())
    ));
    out.push_str(&format!("  \"parity\": {}\n}}\n", serde_json::to_string(&file.parity).unwrap()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> FrobeniusAlgebra {
        FrobeniusAlgebra::truncated(2)
    }

    #[test]
    fn multiplication_in_dual_numbers() {
        let a = z2();
        let one = SparseVec::basis(0);
        let z = SparseVec::basis(1);
        assert_eq!(a.multiply(&one, &z), z);
        assert!(a.multiply(&z, &z).is_zero());
        let a2 = tensor_power(&a, 2);
        // basis order 1⊗1, 1⊗z, z⊗1, z⊗z
        assert_eq!(a2.multiply(&SparseVec::basis(1), &SparseVec::basis(2)), SparseVec::basis(3));
    }

    #[test]
    fn counit_and_pairing() {
        let a = z2();
        let z = SparseVec::basis(1);
        assert_eq!(a.counit(&z), Scalar::one());
        assert!(a.pairing(&z, &z).is_zero());
        let rho = a.rho().unwrap().unwrap();
        assert_eq!(a.pairing(a.unit(), &rho), Scalar::one());
        assert_eq!(rho, z);
    }

    #[test]
    fn comultiplication_and_euler_class() {
        let a = z2();
        // pair indices: (0,1) = 1, (1,0) = 2, (1,1) = 3
        let d1 = a.comultiply(&SparseVec::basis(0)).unwrap();
        assert_eq!(d1, SparseVec::from_pairs(vec![(1, Scalar::one()), (2, Scalar::one())]));
        assert_eq!(a.comultiply(&SparseVec::basis(1)).unwrap(), SparseVec::basis(3));
        assert_eq!(a.euler_class().unwrap(), SparseVec::single(1, Scalar::from_int(2)));
        let pt = FrobeniusAlgebra::point();
        assert_eq!(pt.comultiply(&SparseVec::basis(0)).unwrap(), SparseVec::basis(0));
        assert_eq!(pt.euler_class().unwrap(), SparseVec::basis(0));
    }

    #[test]
    fn milnor_examples() {
        let cubic = milnor_univariate(&[0, 0, 0, 1].map(Scalar::from_int)).unwrap();
        assert_eq!(cubic.dim(), 2);
        assert_eq!(*cubic.metric().entry(0, 1), Scalar::frac(1, 3));
        assert!(cubic.multiply(&SparseVec::basis(1), &SparseVec::basis(1)).is_zero());
        let quad = milnor_univariate(&[0, 0, 1].map(Scalar::from_int)).unwrap();
        assert_eq!(quad.dim(), 1);
        let a4 = milnor_univariate(&[0, 0, 0, 0, 0, 1].map(Scalar::from_int)).unwrap();
        assert_eq!(a4.dim(), 4);
        assert!(matches!(
            milnor_univariate(&[0, 1].map(Scalar::from_int)),
            Err(FrobeniusError::NotIsolated(_))
        ));
        assert!(matches!(milnor_univariate(&[Scalar::from_int(5)]), Err(FrobeniusError::NotIsolated(_))));
    }

    #[test]
    fn broken_structure_constant_is_caught() {
        let mut parts = z2().parts();
        // z·1 := 1 + z gives (z·1)·z = z but z·(1·z) = 0
        parts.products[2] = SparseVec::from_pairs(vec![(0, Scalar::one()), (1, Scalar::one())]);
        let broken = FrobeniusAlgebra::from_parts(parts).unwrap();
        let r = verify_frobenius(&broken);
        assert!(!r.get("associativity").unwrap().passed());
        assert!(r.get("associativity").unwrap().witness.is_some());
    }

    #[test]
    fn file_round_trip_and_diagnostics() {
        let a = FrobeniusAlgebra::truncated(3);
        let text = write_algebra(&a);
        let b = read_algebra(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(write_algebra(&b), text);
        let broken = text.replace("[0,2,2,\"1\"]", "[0,2,7,\"1\"]");
        match read_algebra(&broken) {
            Err(FrobeniusError::Invalid { field, line: Some(_), .. }) => assert!(field.starts_with("mult[")),
            other => panic!("unexpected {other:?}"),
        }
        let garbage = text.replace("\"1/1\"", "\"x\"").replace("[0,0,0,\"1\"]", "[0,0,0,\"q\"]");
        assert!(matches!(read_algebra(&garbage), Err(FrobeniusError::Parse { .. })));
    }
}
