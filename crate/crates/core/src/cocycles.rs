//! Finite group tables, 2-cocycles, nonabelian cocycles, super gradings,
//! twisted group rings, the Pin-lift Schur cocycle of S_n and the
//! normalization procedures for S_n cocycles.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{Scalar, SparseVec};
use crate::symgroup::{all_permutations, minimal_factorization, transpositions, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CocycleError {
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("cocycle identity fails: {0}")]
    NotACocycle(String),
    #[error("not a homomorphism to Z/2: {0}")]
    NotAHomomorphism(String),
    #[error("rescaling must satisfy λ_e = 1 and λ_g ≠ 0: {0}")]
    BadUnitScaling(String),
    #[error("not normalizable: {0}")]
    NotNormalizable(String),
    #[error("operation needs a symmetric group")]
    NotSymmetric,
    #[error("tables belong to different groups")]
    GroupMismatch,
    #[error("invalid cocycle file: {0}")]
    Parse(String),
}

/// A finite group given by its multiplication table.
#[derive(Debug, Clone)]
pub struct FiniteGroupTable {
    name: String,
    labels: Vec<String>,
    mult: Vec<usize>,
    inverse: Vec<usize>,
    identity: usize,
    perms: Option<Vec<Permutation>>,
    perm_index: HashMap<Permutation, usize>,
}

impl PartialEq for FiniteGroupTable {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.mult == other.mult
    }
}

impl FiniteGroupTable {
    /// Validates closure, associativity, identity and inverses.
    pub fn from_table(name: impl Into<String>, labels: Vec<String>, mult: Vec<Vec<usize>>) -> Result<Self, CocycleError> {
        let n = labels.len();
        if n == 0 || mult.len() != n || mult.iter().any(|r| r.len() != n) {
            return Err(CocycleError::NotAGroup("table must be square with one row per element".into()));
        }
        if mult.iter().flatten().any(|&x| x >= n) {
            return Err(CocycleError::NotAGroup("entry out of range".into()));
        }
        let flat: Vec<usize> = mult.into_iter().flatten().collect();
        let m = |a: usize, b: usize| flat[a * n + b];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return Err(CocycleError::NotAGroup(format!(
                            "associativity fails for ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| m(e, a) == a && m(a, e) == a))
            .ok_or_else(|| CocycleError::NotAGroup("no identity".into()))?;
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| m(a, b) == identity && m(b, a) == identity)
                .ok_or_else(|| CocycleError::NotAGroup(format!("{} has no inverse", labels[a])))?;
        }
        Ok(FiniteGroupTable {
            name: name.into(),
            labels,
            mult: flat,
            inverse,
            identity,
            perms: None,
            perm_index: HashMap::new(),
        })
    }

    /// S_n with elements in lexicographic image order; the identity is first.
    pub fn symmetric(n: usize) -> Self {
        let perms = all_permutations(n);
        let perm_index: HashMap<Permutation, usize> =
            perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let k = perms.len();
        let mut mult = vec![0; k * k];
        let mut inverse = vec![0; k];
        for (a, pa) in perms.iter().enumerate() {
            inverse[a] = perm_index[&pa.inverse()];
            for (b, pb) in perms.iter().enumerate() {
                mult[a * k + b] = perm_index[&pa.compose(pb)];
            }
        }
        FiniteGroupTable {
            name: format!("S{n}"),
            labels: perms.iter().map(|p| p.to_string()).collect(),
            mult,
            inverse,
            identity: 0,
            perms: Some(perms),
            perm_index,
        }
    }

    /// Z/m with elements `0, …, m−1`.
    pub fn cyclic(m: usize) -> Self {
        let labels = (0..m).map(|i| i.to_string()).collect();
        let mult = (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect();
        Self::from_table(format!("Z{m}"), labels, mult).expect("cyclic group")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order() + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `g h g⁻¹`.
    pub fn conj(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    /// `[g,h] = g h g⁻¹ h⁻¹`.
    pub fn commutator(&self, g: usize, h: usize) -> usize {
        self.mul(self.conj(g, h), self.inv(h))
    }

    pub fn commute(&self, g: usize, h: usize) -> bool {
        self.mul(g, h) == self.mul(h, g)
    }

    pub fn perm(&self, g: usize) -> Option<&Permutation> {
        self.perms.as_ref().map(|p| &p[g])
    }

    pub fn is_symmetric(&self) -> bool {
        self.perms.is_some()
    }

    /// Degree `n` for S_n.
    pub fn degree(&self) -> Option<usize> {
        self.perms.as_ref().map(|p| p[0].n())
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.perm_index.get(p).copied()
    }

    /// `|g|` for S_n.
    pub fn length(&self, g: usize) -> usize {
        self.perm(g).map_or(0, Permutation::length)
    }

    /// Resolves an element from its label, or for S_n from any accepted
    /// permutation notation.
    pub fn parse_element(&self, text: &str) -> Option<usize> {
        if let Some(i) = self.labels.iter().position(|l| l == text.trim()) {
            return Some(i);
        }
        let n = self.degree()?;
        Permutation::parse(n, text).ok().and_then(|p| self.index_of(&p))
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order()];
        let mut out = Vec::new();
        for h in 0..self.order() {
            if seen[h] {
                continue;
            }
            let mut class: Vec<usize> = (0..self.order()).map(|g| self.conj(g, h)).collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                seen[c] = true;
            }
            out.push(class);
        }
        out
    }

    /// A generating set, chosen greedily in element order.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![self.identity];
        let mut inside = vec![false; self.order()];
        inside[self.identity] = true;
        for g in 0..self.order() {
            if inside[g] {
                continue;
            }
            gens.push(g);
            let mut queue: VecDeque<usize> = span.iter().copied().collect();
            while let Some(x) = queue.pop_front() {
                for &s in &gens {
                    let y = self.mul(s, x);
                    if !inside[y] {
                        inside[y] = true;
                        span.push(y);
                        queue.push_back(y);
                    }
                }
            }
        }
        gens
    }
}

pub type Group = Arc<FiniteGroupTable>;

fn pair_label(g: &FiniteGroupTable, a: usize, b: usize) -> String {
    format!("({}, {})", g.label(a), g.label(b))
}

/// A normalized 2-cocycle `α: G × G → k*`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoCocycle {
    group: Group,
    values: Vec<Scalar>,
}

impl TwoCocycle {
    /// Validates nonvanishing, normalization and the cocycle identity.
    pub fn new(group: Group, values: Vec<Scalar>) -> Result<Self, CocycleError> {
        let c = Self::new_unchecked(group, values);
        match c.violation() {
            Some(w) => Err(CocycleError::NotACocycle(w)),
            None => Ok(c),
        }
    }

    pub fn new_unchecked(group: Group, values: Vec<Scalar>) -> Self {
        assert_eq!(values.len(), group.order() * group.order());
        TwoCocycle { group, values }
    }

    pub fn trivial(group: Group) -> Self {
        let n = group.order();
        TwoCocycle { group, values: vec![Scalar::one(); n * n] }
    }

    pub fn from_fn(group: Group, f: impl Fn(usize, usize) -> Scalar) -> Result<Self, CocycleError> {
        let n = group.order();
        let values = (0..n * n).map(|i| f(i / n, i % n)).collect();
        Self::new(group, values)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn get(&self, g: usize, h: usize) -> &Scalar {
        &self.values[g * self.group.order() + h]
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    /// First violated condition, if any.
    pub fn violation(&self) -> Option<String> {
        let g = &self.group;
        let n = g.order();
        let e = g.identity();
        if let Some(i) = self.values.iter().position(Scalar::is_zero) {
            return Some(format!("α{} = 0", pair_label(g, i / n, i % n)));
        }
        for a in 0..n {
            if !self.get(a, e).is_one() || !self.get(e, a).is_one() {
                return Some(format!("α is not normalized at {}", g.label(a)));
            }
        }
        (0..n)
            .into_par_iter()
            .map(|a| {
                for b in 0..n {
                    for c in 0..n {
                        let l = self.get(a, b) * self.get(g.mul(a, b), c);
                        let r = self.get(a, g.mul(b, c)) * self.get(b, c);
                        if l != r {
                            return Some(format!(
                                "(g,h,k) = ({}, {}, {}): α(g,h)α(gh,k) = {l}, α(g,hk)α(h,k) = {r}",
                                g.label(a),
                                g.label(b),
                                g.label(c)
                            ));
                        }
                    }
                }
                None
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .next()
    }

    pub fn inverse(&self) -> Self {
        TwoCocycle {
            group: self.group.clone(),
            values: self.values.iter().map(|v| v.inv().expect("nonzero")).collect(),
        }
    }

    pub fn product(&self, other: &TwoCocycle) -> Result<Self, CocycleError> {
        if *self.group != *other.group {
            return Err(CocycleError::GroupMismatch);
        }
        Ok(TwoCocycle {
            group: self.group.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    /// `α(g,h)·λ_gλ_h/λ_{gh}`.
    pub fn rescaled(&self, lambda: &[Scalar]) -> Result<Self, CocycleError> {
        check_lambda(&self.group, lambda)?;
        let g = &self.group;
        let n = g.order();
        let values = (0..n * n)
            .map(|i| {
                let (a, b) = (i / n, i % n);
                &(&(self.get(a, b) * &lambda[a]) * &lambda[b]) / &lambda[g.mul(a, b)]
            })
            .collect();
        Ok(TwoCocycle { group: g.clone(), values })
    }

    /// `ε(g,h) = α(g,h)/α(ghg⁻¹,g)`.
    pub fn epsilon(&self, g: usize, h: usize) -> Scalar {
        let c = self.group.conj(g, h);
        self.get(g, h) / self.get(c, g)
    }

    /// The table of `ε` as a nonabelian cocycle.
    pub fn epsilon_table(&self) -> NonabelianCocycle {
        let n = self.group.order();
        NonabelianCocycle {
            group: self.group.clone(),
            values: (0..n * n).map(|i| self.epsilon(i / n, i % n)).collect(),
        }
    }
}

/// `epsilon_of(α)(g,h)`.
pub fn epsilon_of(alpha: &TwoCocycle, g: usize, h: usize) -> Scalar {
    alpha.epsilon(g, h)
}

/// A nonabelian cocycle `φ` with `φ_g(1_h) = φ_{g,h}·1_{ghg⁻¹}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonabelianCocycle {
    group: Group,
    values: Vec<Scalar>,
}

impl NonabelianCocycle {
    pub fn new(group: Group, values: Vec<Scalar>) -> Result<Self, CocycleError> {
        let c = Self::new_unchecked(group, values);
        match c.violation() {
            Some(w) => Err(CocycleError::NotACocycle(w)),
            None => Ok(c),
        }
    }

    pub fn new_unchecked(group: Group, values: Vec<Scalar>) -> Self {
        assert_eq!(values.len(), group.order() * group.order());
        NonabelianCocycle { group, values }
    }

    pub fn trivial(group: Group) -> Self {
        let n = group.order();
        NonabelianCocycle { group, values: vec![Scalar::one(); n * n] }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn get(&self, g: usize, h: usize) -> &Scalar {
        &self.values[g * self.group.order() + h]
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    /// Checks `φ_{gh,k} = φ_{g,hkh⁻¹}φ_{h,k}` and `φ_{e,g} = φ_{g,e} = 1`.
    pub fn violation(&self) -> Option<String> {
        let g = &self.group;
        let n = g.order();
        let e = g.identity();
        if let Some(i) = self.values.iter().position(Scalar::is_zero) {
            return Some(format!("φ{} = 0", pair_label(g, i / n, i % n)));
        }
        for a in 0..n {
            if !self.get(a, e).is_one() || !self.get(e, a).is_one() {
                return Some(format!("φ is not normalized at {}", g.label(a)));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let l = self.get(g.mul(a, b), c);
                    let r = self.get(a, g.conj(b, c)) * self.get(b, c);
                    if *l != r {
                        return Some(format!(
                            "(g,h,k) = ({}, {}, {}): φ_(gh,k) = {l}, φ_(g,hkh⁻¹)φ_(h,k) = {r}",
                            g.label(a),
                            g.label(b),
                            g.label(c)
                        ));
                    }
                }
            }
        }
        None
    }

    /// The same identity in the 1-cocycle form `φ_{gh} = s(g)φ_h · φ_g`,
    /// with `φ_g = Σ_h φ_{g,h}·(ghg⁻¹) ∈ k*[G]` under the diagonal product
    /// and the conjugation action `s`.
    pub fn one_cocycle_violation(&self) -> Option<String> {
        let g = &self.group;
        let n = g.order();
        let as_element = |a: usize| -> Vec<Scalar> {
            let mut v = vec![Scalar::zero(); n];
            for h in 0..n {
                v[g.conj(a, h)] = self.get(a, h).clone();
            }
            v
        };
        let act = |a: usize, v: &[Scalar]| -> Vec<Scalar> {
            let mut w = vec![Scalar::zero(); n];
            for (k, x) in v.iter().enumerate() {
                w[g.conj(a, k)] = x.clone();
            }
            w
        };
        for a in 0..n {
            let fa = as_element(a);
            for b in 0..n {
                let lhs = as_element(g.mul(a, b));
                let rhs: Vec<Scalar> = act(a, &as_element(b)).iter().zip(&fa).map(|(x, y)| x * y).collect();
                if lhs != rhs {
                    return Some(format!("φ_(gh) ≠ s(g)φ_h·φ_g at {}", pair_label(g, a, b)));
                }
            }
        }
        None
    }

    /// `φ_{g,h}·λ_h/λ_{ghg⁻¹}`.
    pub fn rescaled(&self, lambda: &[Scalar]) -> Result<Self, CocycleError> {
        check_lambda(&self.group, lambda)?;
        let g = &self.group;
        let n = g.order();
        let values = (0..n * n)
            .map(|i| {
                let (a, b) = (i / n, i % n);
                &(self.get(a, b) * &lambda[b]) / &lambda[g.conj(a, b)]
            })
            .collect();
        Ok(NonabelianCocycle { group: g.clone(), values })
    }
}

/// A homomorphism `G → Z/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperGrading {
    group: Group,
    values: Vec<u8>,
}

impl SuperGrading {
    pub fn new(group: Group, values: Vec<u8>) -> Result<Self, CocycleError> {
        if values.len() != group.order() || values.iter().any(|&v| v > 1) {
            return Err(CocycleError::NotAHomomorphism("one value in {0,1} per element".into()));
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                if values[group.mul(a, b)] != (values[a] + values[b]) % 2 {
                    return Err(CocycleError::NotAHomomorphism(pair_label(&group, a, b)));
                }
            }
        }
        Ok(SuperGrading { group, values })
    }

    pub fn trivial(group: Group) -> Self {
        let n = group.order();
        SuperGrading { group, values: vec![0; n] }
    }

    /// `|σ| mod 2` on S_n, scaled by `p`.
    pub fn sign(group: Group, p: u8) -> Result<Self, CocycleError> {
        if !group.is_symmetric() {
            return Err(CocycleError::NotSymmetric);
        }
        let values = (0..group.order()).map(|g| (p * (group.length(g) % 2) as u8) % 2).collect();
        Ok(SuperGrading { group, values })
    }

    pub fn get(&self, g: usize) -> u8 {
        self.values[g]
    }

    pub fn group(&self) -> &Group {
        &self.group
    }
}

fn check_lambda(group: &FiniteGroupTable, lambda: &[Scalar]) -> Result<(), CocycleError> {
    if lambda.len() != group.order() {
        return Err(CocycleError::BadUnitScaling("one value per element required".into()));
    }
    if !lambda[group.identity()].is_one() {
        return Err(CocycleError::BadUnitScaling(format!("λ_e = {}", lambda[group.identity()])));
    }
    if let Some(g) = lambda.iter().position(Scalar::is_zero) {
        return Err(CocycleError::BadUnitScaling(format!("λ_{} = 0", group.label(g))));
    }
    Ok(())
}

/// Values that can be multiplied by a scalar.
pub trait Scalable: Clone {
    fn scale(&self, c: &Scalar) -> Self;
}

impl Scalable for Scalar {
    fn scale(&self, c: &Scalar) -> Self {
        self * c
    }
}

impl Scalable for SparseVec {
    fn scale(&self, c: &Scalar) -> Self {
        self.scaled(c)
    }
}

/// Applies `γ_{g,h} ↦ λ_gλ_h/λ_{gh}·γ_{g,h}` and
/// `φ_{g,h} ↦ λ_h/λ_{ghg⁻¹}·φ_{g,h}`; `gamma` is indexed `g·|G| + h`.
pub fn rescale_pair<T: Scalable>(
    gamma: &[T],
    phi: &NonabelianCocycle,
    lambda: &[Scalar],
) -> Result<(Vec<T>, NonabelianCocycle), CocycleError> {
    let g = phi.group();
    check_lambda(g, lambda)?;
    let n = g.order();
    let gamma = (0..n * n)
        .map(|i| {
            let (a, b) = (i / n, i % n);
            gamma[i].scale(&(&(&lambda[a] * &lambda[b]) / &lambda[g.mul(a, b)]))
        })
        .collect();
    Ok((gamma, phi.rescaled(lambda)?))
}

#[derive(Clone, Debug, PartialEq)]
struct Clifford {
    terms: BTreeMap<u32, i64>,
}

impl Clifford {
    fn one() -> Self {
        Clifford { terms: BTreeMap::from([(0, 1)]) }
    }

    fn vector(i: usize, j: usize) -> Self {
        Clifford { terms: BTreeMap::from([(1 << i, 1), (1 << j, -1)]) }
    }

    fn mul(&self, other: &Clifford, square: i64) -> Clifford {
        let mut terms = BTreeMap::new();
        for (&a, &x) in &self.terms {
            for (&b, &y) in &other.terms {
                let mut swaps = 0;
                let mut rest = b;
                while rest != 0 {
                    let j = rest.trailing_zeros();
                    swaps += (a >> (j + 1)).count_ones();
                    rest &= rest - 1;
                }
                let mut c = x * y * if swaps % 2 == 0 { 1 } else { -1 };
                c *= square.pow((a & b).count_ones());
                *terms.entry(a ^ b).or_insert(0) += c;
            }
        }
        terms.retain(|_, v| *v != 0);
        Clifford { terms }
    }

    fn ratio_to(&self, other: &Clifford) -> Option<Scalar> {
        let (&m, &c) = other.terms.iter().next()?;
        let x = *self.terms.get(&m)?;
        let r = Scalar::frac(x, c);
        let consistent = self.terms.len() == other.terms.len()
            && other.terms.iter().all(|(k, v)| self.terms.get(k).is_some_and(|s| Scalar::from_int(*s) == &r * &Scalar::from_int(*v)));
        consistent.then_some(r)
    }
}

/// The cocycle of S_n obtained from Pin lifts in the rational Clifford
/// algebra with `e_i² = square` (±1): `(ij) ↦ e_i − e_j`, and
/// `L(σ)L(σ′) = 2^k·α(σ,σ′)·L(σσ′)`.
pub fn pin_cocycle_sn(n: usize, square: i64) -> Result<TwoCocycle, CocycleError> {
    assert!(square == 1 || square == -1, "square must be ±1");
    assert!(n <= 20, "Clifford monomials are stored as 32-bit masks");
    let group: Group = Arc::new(FiniteGroupTable::symmetric(n));
    let k = group.order();
    let lifts: Vec<Clifford> = (0..k)
        .map(|g| {
            minimal_factorization(group.perm(g).unwrap()).iter().fold(Clifford::one(), |acc, t| {
                let pts: Vec<usize> = (0..n).filter(|&i| t.apply(i) != i).collect();
                acc.mul(&Clifford::vector(pts[0], pts[1]), square)
            })
        })
        .collect();
    let values: Vec<Scalar> = (0..k * k)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (i / k, i % k);
            let ab = group.mul(a, b);
            let prod = lifts[a].mul(&lifts[b], square);
            let twice = group.length(a) + group.length(b) - group.length(ab);
            let ratio = prod.ratio_to(&lifts[ab]).expect("Pin lifts are proportional");
            ratio / Scalar::from_int(1 << (twice / 2))
        })
        .collect();
    TwoCocycle::new(group, values)
}

/// The Schur cocycle of S_n: Pin lifts with `e_i² = 1`, so `α(τ,τ) = 1`.
pub fn schur_cocycle_sn(n: usize) -> Result<TwoCocycle, CocycleError> {
    pin_cocycle_sn(n, 1)
}

/// Computes `λ` with `λ_e = λ_τ = 1` and `λ_σ = λ_{σ′}·c(σ′,τ′)` over every
/// splitting `σ = σ′τ′` with `|σ′| = |σ| − 1`, and checks that all splittings
/// agree. `coeff(σ′, τ′)` returns the scalar carried by the product of
/// generators, or an error message when it is not a scalar.
pub fn transversal_normalization(
    group: &FiniteGroupTable,
    coeff: impl Fn(usize, usize) -> Result<Scalar, String>,
) -> Result<Vec<Scalar>, CocycleError> {
    let n = group.degree().ok_or(CocycleError::NotSymmetric)?;
    let taus: Vec<usize> = transpositions(n).iter().map(|t| group.index_of(t).unwrap()).collect();
    let mut order: Vec<usize> = (0..group.order()).collect();
    order.sort_by_key(|&g| (group.length(g), g));
    let mut lambda: Vec<Option<Scalar>> = vec![None; group.order()];
    for g in order {
        let len = group.length(g);
        if len <= 1 {
            lambda[g] = Some(Scalar::one());
            continue;
        }
        let mut value: Option<(Scalar, usize, usize)> = None;
        for &t in &taus {
            let prev = group.mul(g, t);
            if group.length(prev) + 1 != len {
                continue;
            }
            let c = coeff(prev, t).map_err(CocycleError::NotNormalizable)?;
            if c.is_zero() {
                return Err(CocycleError::NotNormalizable(format!(
                    "product for transversal pair {} vanishes",
                    pair_label(group, prev, t)
                )));
            }
            let cand = lambda[prev].as_ref().expect("shorter elements first") * &c;
            match &value {
                None => value = Some((cand, prev, t)),
                Some((v, p0, t0)) if *v != cand => {
                    return Err(CocycleError::NotNormalizable(format!(
                        "splittings of {} disagree: via {} gives {v}, via {} gives {cand}",
                        group.label(g),
                        pair_label(group, *p0, *t0),
                        pair_label(group, prev, t)
                    )));
                }
                _ => {}
            }
        }
        let (v, _, _) = value.expect("every nontrivial permutation has a splitting");
        lambda[g] = Some(v);
    }
    Ok(lambda.into_iter().map(Option::unwrap).collect())
}

/// Rescales a scalar S_n cocycle so that `α(σ,τ) = 1` on every transversal
/// pair with `τ` a transposition.
pub fn normalize_scalar_cocycle_sn(alpha: &TwoCocycle) -> Result<(Vec<Scalar>, TwoCocycle), CocycleError> {
    let lambda = transversal_normalization(alpha.group(), |a, b| Ok(alpha.get(a, b).clone()))?;
    let out = alpha.rescaled(&lambda)?;
    Ok((lambda, out))
}

/// The sign-twist class of S_n with `α(τ,τ) = −1` on every transposition,
/// realized by Pin lifts with `e_i² = −1`.
pub fn sign_torsion_sn(n: usize) -> Result<TwoCocycle, CocycleError> {
    pin_cocycle_sn(n, -1)
}

/// Result of normalizing a nonabelian S_n cocycle.
#[derive(Debug, Clone)]
pub struct NonabelianNormalization {
    pub lambda: Vec<Scalar>,
    pub phi: NonabelianCocycle,
    pub p: u8,
}

/// Rescales `φ` to `φ_{σ,σ′} = (−1)^{p|σ||σ′|}`: first the transposition
/// class, stage by stage over `S_m ⊂ S_{m+1}`, then the remaining
/// conjugacy classes.
pub fn normalize_nonabelian_sn(phi: &NonabelianCocycle) -> Result<NonabelianNormalization, CocycleError> {
    let group = phi.group().clone();
    let n = group.degree().ok_or(CocycleError::NotSymmetric)?;
    let k = group.order();
    let one = Scalar::one();
    let minus = Scalar::from_int(-1);
    let t = |i: usize, j: usize| group.index_of(&Permutation::transposition(n, i, j)).unwrap();
    let taus = transpositions(n);
    let tau_idx: Vec<usize> = taus.iter().map(|p| group.index_of(p).unwrap()).collect();

    let p = if n < 2 {
        0
    } else {
        let v = phi.get(tau_idx[0], tau_idx[0]);
        let p = if *v == one {
            0
        } else if *v == minus {
            1
        } else {
            return Err(CocycleError::NotNormalizable(format!("φ_(τ,τ) = {v} is not ±1")));
        };
        for &a in &tau_idx {
            if phi.get(a, a) != v {
                return Err(CocycleError::NotNormalizable(format!(
                    "φ_(τ,τ) is not constant: {} at {}",
                    phi.get(a, a),
                    group.label(a)
                )));
            }
        }
        p
    };
    let sign_p = Scalar::sign_pow(p as usize);
    for (x, &a) in taus.iter().zip(&tau_idx) {
        for (y, &b) in taus.iter().zip(&tau_idx) {
            let disjoint = (0..n).all(|i| x.apply(i) == i || y.apply(i) == i);
            if disjoint && a != b && *phi.get(a, b) != sign_p {
                return Err(CocycleError::NotNormalizable(format!(
                    "φ{} = {} on disjoint transpositions but φ_(τ,τ) = {sign_p}",
                    pair_label(&group, a, b),
                    phi.get(a, b)
                )));
            }
        }
    }

    let mut current = phi.clone();
    let mut total = vec![one.clone(); k];
    // stage m: transpositions of S_m already normalized, extend to S_{m+1}
    for m in 2..n {
        let (new, last) = (m, m - 1);
        let mut lambda = vec![one.clone(); k];
        let c = &sign_p * current.get(t(last - 1, new), t(last, new));
        for i in 0..m {
            for j in i + 1..m {
                lambda[t(i, j)] = c.clone();
            }
        }
        for i in 0..last {
            lambda[t(i, new)] = &sign_p * current.get(t(i, last), t(last, new));
        }
        current = current.rescaled(&lambda)?;
        for (x, y) in total.iter_mut().zip(&lambda) {
            *x = &*x * y;
        }
        for i in 0..=new {
            for j in i + 1..=new {
                for a in 0..=new {
                    for b in a + 1..=new {
                        let v = current.get(t(i, j), t(a, b));
                        if *v != sign_p {
                            return Err(CocycleError::NotNormalizable(format!(
                                "after stage {} φ{} = {v}",
                                m + 1,
                                pair_label(&group, t(i, j), t(a, b))
                            )));
                        }
                    }
                }
            }
        }
    }

    let target = |a: usize, b: usize| Scalar::sign_pow(p as usize * group.length(a) * group.length(b));
    let mut lambda = vec![one.clone(); k];
    let mut fixed = vec![false; k];
    fixed[group.identity()] = true;
    for &a in &tau_idx {
        fixed[a] = true;
    }
    for h0 in 0..k {
        if fixed[h0] {
            continue;
        }
        fixed[h0] = true;
        let mut queue = VecDeque::from([h0]);
        while let Some(h) = queue.pop_front() {
            for g in 0..k {
                let c = group.conj(g, h);
                if !fixed[c] {
                    lambda[c] = &(&lambda[h] * current.get(g, h)) / &target(g, h);
                    fixed[c] = true;
                    queue.push_back(c);
                }
            }
        }
    }
    current = current.rescaled(&lambda)?;
    for (x, y) in total.iter_mut().zip(&lambda) {
        *x = &*x * y;
    }
    for a in 0..k {
        for b in 0..k {
            if *current.get(a, b) != target(a, b) {
                return Err(CocycleError::NotNormalizable(format!(
                    "φ{} = {} cannot be brought to {}",
                    pair_label(&group, a, b),
                    current.get(a, b),
                    target(a, b)
                )));
            }
        }
    }
    Ok(NonabelianNormalization { lambda: total, phi: current, p })
}

/// On-disk form of a cocycle table.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CocycleFile {
    pub group: String,
    pub values: Vec<(String, String, Scalar)>,
}

impl CocycleFile {
    pub fn from_cocycle(alpha: &TwoCocycle) -> Self {
        let g = alpha.group();
        let n = g.order();
        CocycleFile {
            group: g.name().to_string(),
            values: (0..n * n)
                .map(|i| (g.label(i / n).to_string(), g.label(i % n).to_string(), alpha.values[i].clone()))
                .collect(),
        }
    }

    /// Resolves the table against S_n for a group named `S<n>`.
    pub fn into_cocycle(self) -> Result<TwoCocycle, CocycleError> {
        let n: usize = self
            .group
            .strip_prefix('S')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CocycleError::Parse(format!("unsupported group {:?}", self.group)))?;
        let group: Group = Arc::new(FiniteGroupTable::symmetric(n));
        let k = group.order();
        let mut values: Vec<Option<Scalar>> = vec![None; k * k];
        for (a, b, v) in self.values {
            let ia = group.parse_element(&a).ok_or_else(|| CocycleError::Parse(format!("unknown element {a:?}")))?;
            let ib = group.parse_element(&b).ok_or_else(|| CocycleError::Parse(format!("unknown element {b:?}")))?;
            if values[ia * k + ib].replace(v).is_some() {
                return Err(CocycleError::Parse(format!("duplicate entry ({a}, {b})")));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| CocycleError::Parse(format!("missing entry {}", pair_label(&group, i / k, i % k)))))
            .collect::<Result<Vec<_>, _>>()?;
        TwoCocycle::new(group, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> Group {
        Arc::new(FiniteGroupTable::symmetric(3))
    }

    #[test]
    fn symmetric_group_table_is_a_group() {
        let g = FiniteGroupTable::symmetric(3);
        let labels = g.labels().to_vec();
        let mult: Vec<Vec<usize>> = (0..6).map(|a| (0..6).map(|b| g.mul(a, b)).collect()).collect();
        assert!(FiniteGroupTable::from_table("S3", labels, mult).is_ok());
        assert_eq!(g.conjugacy_classes().len(), 3);
        assert_eq!(g.label(0), "()");
    }

    #[test]
    fn bad_table_rejected() {
        let r = FiniteGroupTable::from_table("x", vec!["a".into(), "b".into()], vec![vec![0, 0], vec![0, 1]]);
        assert!(r.is_err());
    }

    #[test]
    fn trivial_cocycle_has_trivial_epsilon() {
        let a = TwoCocycle::trivial(s3());
        assert!(a.epsilon_table().values().iter().all(Scalar::is_one));
    }

    #[test]
    fn schur_cocycle_on_transpositions() {
        let alpha = schur_cocycle_sn(4).unwrap();
        let g = alpha.group().clone();
        let t12 = g.parse_element("(1 2)").unwrap();
        let t34 = g.parse_element("(3 4)").unwrap();
        assert!(alpha.get(t12, t12).is_one());
        assert_eq!(alpha.epsilon(t12, t34), Scalar::from_int(-1));
        assert!(alpha.epsilon(t12, t12).is_one());
    }

    #[test]
    fn minus_signature_squares_to_minus_one() {
        let alpha = sign_torsion_sn(4).unwrap();
        let g = alpha.group().clone();
        let t = g.parse_element("(2 3)").unwrap();
        assert_eq!(*alpha.get(t, t), Scalar::from_int(-1));
        assert!(matches!(normalize_scalar_cocycle_sn(&alpha), Err(CocycleError::NotNormalizable(_))));
    }

    #[test]
    fn bad_lambda_rejected() {
        let g = s3();
        let phi = NonabelianCocycle::trivial(g.clone());
        let mut lambda = vec![Scalar::one(); 6];
        lambda[0] = Scalar::from_int(2);
        let gamma = vec![Scalar::one(); 36];
        assert!(matches!(rescale_pair(&gamma, &phi, &lambda), Err(CocycleError::BadUnitScaling(_))));
    }

    #[test]
    fn non_homomorphism_rejected() {
        let g = s3();
        assert!(SuperGrading::new(g, vec![0, 1, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn cocycle_file_round_trip() {
        let alpha = schur_cocycle_sn(3).unwrap();
        let text = serde_json::to_string(&CocycleFile::from_cocycle(&alpha)).unwrap();
        let back: CocycleFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_cocycle().unwrap(), alpha);
    }
}
