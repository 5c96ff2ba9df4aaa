//! G-twisted Frobenius algebras: the sector-graded data structure, the
//! axiom verifier in even and super form, tensor products, torsion and super
//! twists, invariants, and the special-structure analysis that extracts the
//! cocycle data `γ`, `φ` from a choice of cyclic generators.
//!
//! A structure over a group `G` stores, for every `g`, a sector `A_g` with
//! its own basis. Multiplication blocks `A_g ⊗ A_h → A_{gh}` are indexed by
//! `g·|G| + h` and hold the products of basis vectors in row-major order;
//! the action block `(g, h)` holds `φ_g(e_j)` for the basis of `A_h`, a
//! vector of `A_{ghg⁻¹}`; the metric block `g` is the Gram matrix of
//! `η: A_g × A_{g⁻¹} → k`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cocycles::{
    transversal_normalization, CocycleError, FiniteGroupTable, Group, NonabelianCocycle, SuperGrading, TwoCocycle,
};
use crate::exact::{Accumulator, ExactError, Matrix, Scalar, SparseVec};
use crate::report::{merge, Check, Report};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GFrobError {
    #[error("inconsistent structure data: {0}")]
    Shape(String),
    #[error("structures are defined over different groups")]
    GroupMismatch,
    #[error("sector {sector} is not cyclic over the untwisted sector")]
    NotCyclic { sector: String },
    #[error("the action does not map generators to multiples of generators: {0}")]
    GeneratorNotPreserved(String),
    #[error("not normalizable: {0}")]
    NotNormalizable(String),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },
}

/// Basis data of one sector `A_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    pub labels: Vec<String>,
    pub parity: Vec<u8>,
    /// Unshifted degrees of the basis vectors.
    pub degrees: Option<Vec<Scalar>>,
    /// `d_g`, the degree of the sector's own top class.
    pub top_degree: Option<Scalar>,
    pub shift_plus: Option<Scalar>,
    pub shift_minus: Option<Scalar>,
}

impl Sector {
    /// An even, ungraded sector of the given dimension.
    pub fn plain(labels: Vec<String>) -> Self {
        let dim = labels.len();
        Sector { labels, parity: vec![0; dim], degrees: None, top_degree: None, shift_plus: None, shift_minus: None }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// `s_g = (s⁺ + s⁻)/2`, zero when no shifts are recorded.
    pub fn shift(&self) -> Scalar {
        match (&self.shift_plus, &self.shift_minus) {
            (None, None) => Scalar::zero(),
            (p, m) => {
                let sum = p.clone().unwrap_or_default() + m.clone().unwrap_or_default();
                sum / Scalar::from_int(2)
            }
        }
    }

    /// Degree of basis vector `i` after the sector shift.
    pub fn shifted_degree(&self, i: usize) -> Option<Scalar> {
        self.degrees.as_ref().map(|d| &d[i] + &self.shift())
    }
}

/// Raw tables of a G-twisted Frobenius algebra.
#[derive(Debug, Clone)]
pub struct GFrobParts {
    pub name: String,
    pub group: Group,
    pub sectors: Vec<Sector>,
    pub unit: SparseVec,
    pub mult: Vec<Vec<SparseVec>>,
    pub action: Vec<Vec<SparseVec>>,
    pub character: Vec<Scalar>,
    pub metric: Vec<Matrix>,
}

/// A G-twisted Frobenius algebra with exact rational structure constants.
#[derive(Debug, Clone)]
pub struct GFrobeniusAlgebra {
    name: String,
    group: Group,
    sectors: Vec<Sector>,
    unit: SparseVec,
    mult: Vec<Vec<SparseVec>>,
    action: Vec<Vec<SparseVec>>,
    character: Vec<Scalar>,
    metric: Vec<Matrix>,
}

impl GFrobeniusAlgebra {
    /// Checks that every table has the right shape and that every product
    /// and action image lies in the correct sector.
    pub fn from_parts(p: GFrobParts) -> Result<Self, GFrobError> {
        let g = &p.group;
        let n = g.order();
        let bad = |m: String| Err(GFrobError::Shape(m));
        if p.sectors.len() != n || p.character.len() != n || p.metric.len() != n {
            return bad(format!("expected {n} sectors, characters and metric blocks"));
        }
        if p.mult.len() != n * n || p.action.len() != n * n {
            return bad(format!("expected {} multiplication and action blocks", n * n));
        }
        for (a, s) in p.sectors.iter().enumerate() {
            if s.parity.len() != s.dim() || s.parity.iter().any(|&x| x > 1) {
                return bad(format!("sector {}: parity list must hold one 0/1 per basis vector", g.label(a)));
            }
            if s.degrees.as_ref().is_some_and(|d| d.len() != s.dim()) {
                return bad(format!("sector {}: one degree per basis vector required", g.label(a)));
            }
        }
        if let Some(c) = p.character.iter().position(Scalar::is_zero) {
            return bad(format!("χ vanishes at {}", g.label(c)));
        }
        let dim = |a: usize| p.sectors[a].dim();
        if p.unit.max_index().is_some_and(|i| i >= dim(g.identity())) {
            return bad("unit lies outside the untwisted sector".into());
        }
        for a in 0..n {
            let m = &p.metric[a];
            if m.rows() != dim(a) || m.cols() != dim(g.inv(a)) {
                return bad(format!("metric block {} has the wrong shape", g.label(a)));
            }
            for b in 0..n {
                let block = &p.mult[a * n + b];
                if block.len() != dim(a) * dim(b) {
                    return bad(format!("multiplication block ({}, {}) has the wrong size", g.label(a), g.label(b)));
                }
                let target = dim(g.mul(a, b));
                if block.iter().any(|v| v.max_index().is_some_and(|i| i >= target)) {
                    return bad(format!("product of sectors ({}, {}) leaves A_gh", g.label(a), g.label(b)));
                }
                let block = &p.action[a * n + b];
                if block.len() != dim(b) {
                    return bad(format!("action block ({}, {}) has the wrong size", g.label(a), g.label(b)));
                }
                let target = dim(g.conj(a, b));
                if block.iter().any(|v| v.max_index().is_some_and(|i| i >= target)) {
                    return bad(format!("φ_{} maps A_{} outside A_ghg⁻¹", g.label(a), g.label(b)));
                }
            }
        }
        Ok(GFrobeniusAlgebra {
            name: p.name,
            group: p.group,
            sectors: p.sectors,
            unit: p.unit,
            mult: p.mult,
            action: p.action,
            character: p.character,
            metric: p.metric,
        })
    }

    pub fn into_parts(self) -> GFrobParts {
        GFrobParts {
            name: self.name,
            group: self.group,
            sectors: self.sectors,
            unit: self.unit,
            mult: self.mult,
            action: self.action,
            character: self.character,
            metric: self.metric,
        }
    }

    pub fn parts(&self) -> GFrobParts {
        self.clone().into_parts()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn sector(&self, g: usize) -> &Sector {
        &self.sectors[g]
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn dim(&self, g: usize) -> usize {
        self.sectors[g].dim()
    }

    pub fn total_dim(&self) -> usize {
        self.sectors.iter().map(Sector::dim).sum()
    }

    /// Position of sector `g` in the global basis.
    pub fn offset(&self, g: usize) -> usize {
        self.sectors[..g].iter().map(Sector::dim).sum()
    }

    pub fn unit(&self) -> &SparseVec {
        &self.unit
    }

    pub fn character(&self, g: usize) -> &Scalar {
        &self.character[g]
    }

    pub fn metric(&self, g: usize) -> &Matrix {
        &self.metric[g]
    }

    fn block(&self, g: usize, h: usize) -> usize {
        g * self.group.order() + h
    }

    /// `e_i ∘ e_j` for `e_i ∈ A_g`, `e_j ∈ A_h`.
    pub fn mult_basis(&self, g: usize, h: usize, i: usize, j: usize) -> &SparseVec {
        &self.mult[self.block(g, h)][i * self.dim(h) + j]
    }

    /// `φ_g(e_j)` for `e_j ∈ A_h`.
    pub fn action_basis(&self, g: usize, h: usize, j: usize) -> &SparseVec {
        &self.action[self.block(g, h)][j]
    }

    pub fn multiply(&self, g: usize, a: &SparseVec, h: usize, b: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                acc.add_vec(self.mult_basis(g, h, i, j), &(x * y));
            }
        }
        acc.finish()
    }

    /// `φ_g(v)` for `v ∈ A_h`, a vector of `A_{ghg⁻¹}`.
    pub fn act(&self, g: usize, h: usize, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (j, x) in v.iter() {
            acc.add_vec(self.action_basis(g, h, j), x);
        }
        acc.finish()
    }

    /// `η(a, b)` for `a ∈ A_g`, `b ∈ A_{g⁻¹}`.
    pub fn pair(&self, g: usize, a: &SparseVec, b: &SparseVec) -> Scalar {
        let m = &self.metric[g];
        let mut s = Scalar::zero();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                let e = m.get(i, j);
                if !e.is_zero() {
                    s += &(&(x * y) * e);
                }
            }
        }
        s
    }

    /// `ε(x) = η(x, 1)` on `A_e`.
    pub fn counit(&self, x: &SparseVec) -> Scalar {
        self.pair(self.group.identity(), x, &self.unit)
    }

    /// Sector components of a global vector.
    pub fn split(&self, v: &SparseVec) -> Vec<(usize, SparseVec)> {
        let mut out: Vec<(usize, Vec<(usize, Scalar)>)> = Vec::new();
        let mut offsets = Vec::with_capacity(self.sectors.len() + 1);
        let mut acc = 0;
        for s in &self.sectors {
            offsets.push(acc);
            acc += s.dim();
        }
        offsets.push(acc);
        for (i, c) in v.iter() {
            let g = offsets.partition_point(|&o| o <= i) - 1;
            match out.last_mut() {
                Some((h, list)) if *h == g => list.push((i - offsets[g], c.clone())),
                _ => out.push((g, vec![(i - offsets[g], c.clone())])),
            }
        }
        out.into_iter().map(|(g, l)| (g, SparseVec::from_pairs(l))).collect()
    }

    /// Embeds a sector vector into the global basis.
    pub fn embed(&self, g: usize, v: &SparseVec) -> SparseVec {
        let o = self.offset(g);
        v.reindex(|i| i + o)
    }

    /// Product of two global vectors.
    pub fn global_multiply(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (g, x) in self.split(a) {
            for (h, y) in self.split(b) {
                let gh = self.group.mul(g, h);
                acc.add_vec(&self.embed(gh, &self.multiply(g, &x, h, &y)), &Scalar::one());
            }
        }
        acc.finish()
    }

    /// `φ_g` applied to a global vector.
    pub fn global_act(&self, g: usize, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (h, x) in self.split(v) {
            acc.add_vec(&self.embed(self.group.conj(g, h), &self.act(g, h, &x)), &Scalar::one());
        }
        acc.finish()
    }

    /// Metric extended to global vectors by `η(A_g, A_h) = 0` unless `gh = e`.
    pub fn global_pair(&self, a: &SparseVec, b: &SparseVec) -> Scalar {
        let parts_b = self.split(b);
        let mut s = Scalar::zero();
        for (g, x) in self.split(a) {
            let gi = self.group.inv(g);
            if let Some((_, y)) = parts_b.iter().find(|(h, _)| *h == gi) {
                s += &self.pair(g, &x, y);
            }
        }
        s
    }

    /// First difference between the structure tables of two algebras,
    /// ignoring names and basis labels.
    pub fn table_difference(&self, other: &GFrobeniusAlgebra) -> Option<String> {
        if *self.group != *other.group {
            return Some("groups differ".into());
        }
        let g = &self.group;
        for a in 0..g.order() {
            let (s, t) = (&self.sectors[a], &other.sectors[a]);
            if s.dim() != t.dim() {
                return Some(format!("dim A_{} differs", g.label(a)));
            }
            if s.parity != t.parity {
                return Some(format!("parity of A_{} differs", g.label(a)));
            }
            if s.degrees != t.degrees || s.top_degree != t.top_degree {
                return Some(format!("degrees of A_{} differ", g.label(a)));
            }
            if s.shift() != t.shift() {
                return Some(format!("shift of A_{} differs", g.label(a)));
            }
            if self.character[a] != other.character[a] {
                return Some(format!("χ_{} differs", g.label(a)));
            }
            if self.metric[a] != other.metric[a] {
                return Some(format!("metric block {} differs", g.label(a)));
            }
        }
        if self.unit != other.unit {
            return Some("units differ".into());
        }
        for a in 0..g.order() {
            for b in 0..g.order() {
                let k = self.block(a, b);
                if let Some(i) = (0..self.mult[k].len()).find(|&i| self.mult[k][i] != other.mult[k][i]) {
                    let db = self.dim(b);
                    return Some(format!(
                        "product e_{}·e_{} in sectors ({}, {}) differs: {:?} vs {:?}",
                        i / db,
                        i % db,
                        g.label(a),
                        g.label(b),
                        self.mult[k][i],
                        other.mult[k][i]
                    ));
                }
                if let Some(j) = (0..self.action[k].len()).find(|&j| self.action[k][j] != other.action[k][j]) {
                    return Some(format!(
                        "φ_{}(e_{}) on A_{} differs: {:?} vs {:?}",
                        g.label(a),
                        j,
                        g.label(b),
                        self.action[k][j],
                        other.action[k][j]
                    ));
                }
            }
        }
        None
    }

    /// Rewrites the structure in the basis `e′ = λ_g·e` of each sector.
    pub fn rescale_sectors(&self, lambda: &[Scalar]) -> Result<GFrobeniusAlgebra, GFrobError> {
        let g = &self.group;
        let n = g.order();
        if lambda.len() != n || !lambda[g.identity()].is_one() || lambda.iter().any(Scalar::is_zero) {
            return Err(CocycleError::BadUnitScaling("need λ_e = 1 and λ_g ≠ 0".into()).into());
        }
        let mut p = self.parts();
        for a in 0..n {
            for b in 0..n {
                let k = a * n + b;
                let c = &(&lambda[a] * &lambda[b]) / &lambda[g.mul(a, b)];
                p.mult[k] = p.mult[k].iter().map(|v| v.scaled(&c)).collect();
                let c = &lambda[b] / &lambda[g.conj(a, b)];
                p.action[k] = p.action[k].iter().map(|v| v.scaled(&c)).collect();
            }
            p.metric[a] = scale_matrix(&p.metric[a], &(&lambda[a] * &lambda[g.inv(a)]));
        }
        GFrobeniusAlgebra::from_parts(p)
    }
}

fn scale_matrix(m: &Matrix, c: &Scalar) -> Matrix {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, m.get(i, j) * c);
        }
    }
    out
}

fn scan<F>(count: usize, f: F) -> (u64, Option<String>)
where
    F: Fn(usize) -> (u64, Option<String>) + Sync + Send,
{
    merge((0..count).into_par_iter().map(f).collect())
}

fn koszul(super_mode: bool, p: u8, q: u8) -> Scalar {
    if super_mode && p * q % 2 == 1 {
        Scalar::from_int(-1)
    } else {
        Scalar::one()
    }
}

/// Runs every axiom over full bases. In super mode the commutativity and
/// trace axioms carry Koszul signs and parity preservation is checked.
pub fn verify_axioms(a: &GFrobeniusAlgebra, super_mode: bool) -> Report {
    let mode = if super_mode { "super" } else { "even" };
    let mut r = Report::new(format!("G-Frobenius axioms for {} ({mode})", a.name));
    r.push(check_grading(a));
    r.push(check_associativity(a));
    r.push(check_commutativity(a, super_mode));
    r.push(check_unit(a));
    r.push(check_metric_invariance(a));
    r.push(check_nondegeneracy(a));
    r.push(check_self_invariance(a));
    r.push(check_mult_invariance(a));
    r.push(check_metric_equivariance(a));
    r.push(check_trace(a, super_mode));
    r.push(check_homomorphism(a));
    if super_mode {
        r.push(check_parity(a));
    }
    if a.sectors.iter().all(|s| s.degrees.is_some()) {
        r.push(check_degrees(a));
    }
    if a.sectors.iter().any(|s| s.shift_plus.is_some()) {
        r.push(check_shifts(a));
    }
    r
}

fn check_grading(a: &GFrobeniusAlgebra) -> Check {
    let g = &a.group;
    let n = g.order();
    let mut count = 0u64;
    for x in 0..n {
        for y in 0..n {
            count += a.mult[a.block(x, y)].len() as u64;
            let target = a.dim(g.mul(x, y));
            if a.mult[a.block(x, y)].iter().any(|v| v.max_index().is_some_and(|i| i >= target)) {
                return Check::new("grading of multiplication", count, Some(format!("A_{}·A_{}", g.label(x), g.label(y))));
            }
        }
    }
    Check::new("grading of multiplication", count, None)
}

fn check_associativity(a: &GFrobeniusAlgebra) -> Check {
    let g = &a.group;
    let n = g.order();
    let (count, w) = scan(n * n, |xy| {
        let (x, y) = (xy / n, xy % n);
        let xy_ = g.mul(x, y);
        let mut count = 0;
        for z in 0..n {
            let yz = g.mul(y, z);
            for i in 0..a.dim(x) {
                for j in 0..a.dim(y) {
                    let ij = a.mult_basis(x, y, i, j);
                    for l in 0..a.dim(z) {
                        count += 1;
                        let lhs = a.multiply(xy_, ij, z, &SparseVec::basis(l));
                        let rhs = a.multiply(x, &SparseVec::basis(i), yz, a.mult_basis(y, z, j, l));
                        if lhs != rhs {
                            return (
                                count,
                                Some(format!(
                                    "(e{i}∈A_{})·(e{j}∈A_{})·(e{l}∈A_{}): {lhs:?} vs {rhs:?}",
                                    g.label(x),
                                    g.label(y),
                                    g.label(z)
                                )),
                            );
                        }
                    }
                }
            }
        }
        (count, None)
    });
    Check::new("associativity (a)", count, w)
}

fn check_commutativity(a: &GFrobeniusAlgebra, super_mode: bool) -> Check {
    let g = &a.group;
    let n = g.order();
    let name = if super_mode { "twisted supercommutativity (b^σ)" } else { "twisted commutativity (b)" };
    let (count, w) = scan(n, |x| {
        let mut count = 0;
        for y in 0..n {
            let c = g.conj(x, y);
            for i in 0..a.dim(x) {
                for j in 0..a.dim(y) {
                    count += 1;
                    let lhs = a.mult_basis(x, y, i, j);
                    let s = koszul(super_mode, a.sectors[x].parity[i], a.sectors[y].parity[j]);
                    let rhs = a.multiply(c, a.action_basis(x, y, j), x, &SparseVec::basis(i)).scaled(&s);
                    if *lhs != rhs {
                        return (
                            count,
                            Some(format!(
                                "e{i}∈A_{}, e{j}∈A_{}: a∘b = {lhs:?}, ±φ_g(b)∘a = {rhs:?}",
                                g.label(x),
                                g.label(y)
                            )),
                        );
                    }
                }
            }
        }
        (count, None)
    });
    Check::new(name, count, w)
}

fn check_unit(a: &GFrobeniusAlgebra) -> Check {
    let g = &a.group;
    let e = g.identity();
    let mut count = 0;
    for h in 0..g.order() {
        for j in 0..a.dim(h) {
            count += 2;
            let b = SparseVec::basis(j);
            if a.multiply(e, &a.unit, h, &b) != b || a.multiply(h, &b, e, &a.unit) != b {
                return Check::new("G-invariant unit (c)", count, Some(format!("1·e{j} ≠ e{j} in A_{}", g.label(h))));
            }
        }
        count += 1;
        if a.act(h, e, &a.unit) != a.unit {
            return Check::new("G-invariant unit (c)", count, Some(format!("φ_{}(1) ≠ 1", g.label(h))));
        }
    }
    Check::new("G-invariant unit (c)", count, None)
}

fn check_metric_invariance(a: &GFrobeniusAlgebra) -> Check {
    let g = &a.group;
    let n = g.order();
    let (count, w) = scan(n, |x| {
        let mut count = 0;
        for y in 0..n {
            let xy = g.mul(x, y);
            let z = g.inv(xy);
            let yz = g.mul(y, z);
            for i in 0..a.dim(x) {
                for j in 0..a.dim(y) {
                    let ij = a.mult_basis(x, y, i, j);
                    for l in 0..a.dim(z) {
                        count += 1;
                        let el = SparseVec::basis(l);
                        let lhs = a.pair(xy, ij, &el);
                        let rhs = a.pair(x, &SparseVec::basis(i), a.mult_basis(y, z, j, l));
                        if lhs != rhs {
                            return (
                                count,
                                Some(format!(
                                    "η(e{i}e{j}, e{l}) = {lhs} but η(e{i}, e{j}e{l}) = {rhs} in sectors ({}, {}, {})",
                                    g.label(x),
                                    g.label(y),
                                    g.label(z)
                                )),
                            );
                        }
                    }
                }
            }
            let _ = yz;
        }
        (count, None)
    });
    Check::new("metric invariance (d)", count, w)
}

fn check_nondegeneracy(a: &GFrobeniusAlgebra) -> Check {
    let g = &a.group;
    let mut count = 0;
    for x in 0..g.order() {
        let xi = g.inv(x);
        count += 2;
        let m = &a.metric[x];
        if m.rows() != m.cols() || m.rank() != m.rows() {
            return Check::new("nondegeneracy", count, Some(format!("η on A_{} × A_{} is degenerate", g.label(x), g.label(xi))));
        }
        let mut p = Matrix::zeros(a.dim(x), a.dim(xi));
        for i in 0..a.dim(x) {
            for j in 0..a.dim(xi) {
                p.set(i, j, a.counit(a.mult_basis(x, xi, i, j)));
            }
        }
        if p.rank() != a.dim(x) {
            return Check::new(
                "nondegeneracy",
                count,
                Some(format!("ε(a∘b) on A_{} × A_{} is degenerate", g.label(x), g.label(xi))),
            );
        }
    }
    Check::new("nondegeneracy", count, None)
}

fn check_self_invariance(a: &GFrobeniusAlgebra) -> Check {
    let g = &a.group;
    let mut count = 0;
    for x in 0..g.order() {
        let c = a.character[x].inv().expect("nonzero character");
        for i in 0..a.dim(x) {
            count += 1;
            let v = a.action_basis(x, x, i);
            if *v != SparseVec::single(i, c.clone()) {
                return Check::new(
                    "self-invariance (i)",
                    count,
                    Some(format!("φ_g(e{i}) = {v:?} ≠ χ_g⁻¹·e{i} for g = {}", g.label(x))),
                );
            }
        }
    }
    Check::new("self-invariance (i)", count, None)
}

fn check_mult_invariance(a: &GFrobeniusAlgebra) -> Check {
    let g = &a.group;
    let n = g.order();
    let (count, w) = scan(n, |k| {
        let mut count = 0;
        for x in 0..n {
            for y in 0..n {
                let (kx, ky) = (g.conj(k, x), g.conj(k, y));
                for i in 0..a.dim(x) {
                    let fi = a.action_basis(k, x, i);
                    for j in 0..a.dim(y) {
                        count += 1;
                        let lhs = a.act(k, g.mul(x, y), a.mult_basis(x, y, i, j));
                        let rhs = a.multiply(kx, fi, ky, a.action_basis(k, y, j));
                        if lhs != rhs {
                            return (
                                count,
                                Some(format!(
                                    "φ_{}(e{i}e{j}) ≠ φ(e{i})φ(e{j}) for sectors ({}, {})",
                                    g.label(k),
                                    g.label(x),
                                    g.label(y)
                                )),
                            );
                        }
                    }
                }
            }
        }
        (count, None)
    });
    Check::new("invariance of multiplication (ii)", count, w)
}

fn check_metric_equivariance(a: &GFrobeniusAlgebra) -> Check {
    let g = &a.group;
    let n = g.order();
    let (count, w) = scan(n, |k| {
        let mut count = 0;
        let c = a.character[k].inv().expect("nonzero").pow(2);
        for x in 0..n {
            let xi = g.inv(x);
            for i in 0..a.dim(x) {
                for j in 0..a.dim(xi) {
                    count += 1;
                    let lhs = a.pair(g.conj(k, x), a.action_basis(k, x, i), a.action_basis(k, xi, j));
                    let rhs = a.metric[x].get(i, j) * &c;
                    if lhs != rhs {
                        return (
                            count,
                            Some(format!(
                                "η(φ_{k}e{i}, φ_{k}e{j}) = {lhs} ≠ χ⁻²η = {rhs} on A_{}",
                                g.label(x),
                                k = g.label(k)
                            )),
                        );
                    }
                }
            }
        }
        (count, None)
    });
    Check::new("invariance of metric (iii)", count, w)
}

fn check_trace(a: &GFrobeniusAlgebra, super_mode: bool) -> Check {
    let g = &a.group;
    let n = g.order();
    let name = if super_mode { "supertrace axiom (iv^σ)" } else { "trace axiom (iv)" };
    let sgn = |s: usize, i: usize| koszul(super_mode, a.sectors[s].parity[i], 1);
    let (count, w) = scan(n * n, |xy| {
        let (x, y) = (xy / n, xy % n);
        let c_sec = g.commutator(x, y);
        let yxy = g.conj(y, x);
        let xinv = g.inv(x);
        let cy = g.mul(c_sec, y);
        let mut count = 0;
        for c in 0..a.dim(c_sec) {
            count += 1;
            let cv = SparseVec::basis(c);
            let mut lhs = Scalar::zero();
            for i in 0..a.dim(x) {
                let v = a.multiply(c_sec, &cv, yxy, a.action_basis(y, x, i));
                lhs += &(&v.get(i) * &sgn(x, i));
            }
            let lhs = &lhs * &a.character[y];
            let mut rhs = Scalar::zero();
            for j in 0..a.dim(y) {
                let v = a.act(xinv, cy, a.mult_basis(c_sec, y, c, j));
                rhs += &(&v.get(j) * &sgn(y, j));
            }
            let rhs = &rhs * &a.character[xinv];
            if lhs != rhs {
                return (
                    count,
                    Some(format!(
                        "g = {}, h = {}, c = e{c}∈A_[g,h]: χ_h·Tr(l_c φ_h) = {lhs}, χ_g⁻¹·Tr(φ_g⁻¹ l_c) = {rhs}",
                        g.label(x),
                        g.label(y)
                    )),
                );
            }
        }
        (count, None)
    });
    Check::new(name, count, w)
}

fn check_homomorphism(a: &GFrobeniusAlgebra) -> Check {
    let g = &a.group;
    let n = g.order();
    let e = g.identity();
    let (count, w) = scan(n, |x| {
        let mut count = 0;
        for y in 0..n {
            let xy = g.mul(x, y);
            for h in 0..n {
                for j in 0..a.dim(h) {
                    count += 1;
                    let lhs = a.act(x, g.conj(y, h), a.action_basis(y, h, j));
                    if lhs != *a.action_basis(xy, h, j) {
                        return (
                            count,
                            Some(format!("φ_{}φ_{} ≠ φ_gh on e{j}∈A_{}", g.label(x), g.label(y), g.label(h))),
                        );
                    }
                }
            }
        }
        if x == e {
            for h in 0..n {
                for j in 0..a.dim(h) {
                    if *a.action_basis(e, h, j) != SparseVec::basis(j) {
                        return (count, Some(format!("φ_e ≠ id on A_{}", g.label(h))));
                    }
                }
            }
        }
        (count, None)
    });
    Check::new("action homomorphism", count, w)
}

fn check_parity(a: &GFrobeniusAlgebra) -> Check {
    let g = &a.group;
    let n = g.order();
    let par = |s: usize, i: usize| a.sectors[s].parity[i];
    let mut count = 0;
    for x in 0..n {
        for y in 0..n {
            let xy = g.mul(x, y);
            let c = g.conj(x, y);
            for i in 0..a.dim(x) {
                for j in 0..a.dim(y) {
                    count += 1;
                    if let Some((m, _)) = a.mult_basis(x, y, i, j).iter().find(|(m, _)| par(xy, *m) != (par(x, i) + par(y, j)) % 2) {
                        return Check::new(
                            "parity",
                            count,
                            Some(format!("e{i}∈A_{}·e{j}∈A_{} has a component on e{m} of the wrong parity", g.label(x), g.label(y))),
                        );
                    }
                }
            }
            for j in 0..a.dim(y) {
                count += 1;
                if a.action_basis(x, y, j).iter().any(|(m, _)| par(c, m) != par(y, j)) {
                    return Check::new("parity", count, Some(format!("φ_{} changes the parity of e{j}∈A_{}", g.label(x), g.label(y))));
                }
            }
        }
        let xi = g.inv(x);
        for i in 0..a.dim(x) {
            for j in 0..a.dim(xi) {
                count += 1;
                if !a.metric[x].get(i, j).is_zero() && par(x, i) != par(xi, j) {
                    return Check::new("parity", count, Some(format!("η pairs e{i}∈A_{} with an element of opposite parity", g.label(x))));
                }
            }
        }
    }
    Check::new("parity", count, None)
}

fn check_degrees(a: &GFrobeniusAlgebra) -> Check {
    let g = &a.group;
    let n = g.order();
    let e = g.identity();
    let Some(d) = a.sectors[e].top_degree.clone() else {
        return Check::new("degree grading", 0, Some("untwisted sector has no top degree".into()));
    };
    let deg = |s: usize, i: usize| a.sectors[s].shifted_degree(i).expect("graded");
    let mut count = 0;
    for x in 0..n {
        for y in 0..n {
            let xy = g.mul(x, y);
            let c = g.conj(x, y);
            for i in 0..a.dim(x) {
                for j in 0..a.dim(y) {
                    count += 1;
                    let want = &deg(x, i) + &deg(y, j);
                    if a.mult_basis(x, y, i, j).iter().any(|(m, _)| deg(xy, m) != want) {
                        return Check::new(
                            "degree grading",
                            count,
                            Some(format!("e{i}∈A_{}·e{j}∈A_{} is not homogeneous of degree {want}", g.label(x), g.label(y))),
                        );
                    }
                }
            }
            for j in 0..a.dim(y) {
                count += 1;
                if a.action_basis(x, y, j).iter().any(|(m, _)| deg(c, m) != deg(y, j)) {
                    return Check::new("degree grading", count, Some(format!("φ_{} changes the degree of e{j}∈A_{}", g.label(x), g.label(y))));
                }
            }
        }
        let xi = g.inv(x);
        for i in 0..a.dim(x) {
            for j in 0..a.dim(xi) {
                count += 1;
                if !a.metric[x].get(i, j).is_zero() && &deg(x, i) + &deg(xi, j) != d {
                    return Check::new(
                        "degree grading",
                        count,
                        Some(format!("η(e{i}, e{j}) ≠ 0 on A_{} but degrees do not sum to {d}", g.label(x))),
                    );
                }
            }
        }
    }
    Check::new("degree grading", count, None)
}

fn check_shifts(a: &GFrobeniusAlgebra) -> Check {
    let g = &a.group;
    let Some(d) = a.sectors[g.identity()].top_degree.clone() else {
        return Check::new("shift consistency", 0, Some("untwisted sector has no top degree".into()));
    };
    let mut count = 0;
    for x in 0..g.order() {
        let s = &a.sectors[x];
        if let (Some(sp), Some(dg)) = (&s.shift_plus, &s.top_degree) {
            count += 1;
            if *sp != &d - dg {
                return Check::new("shift consistency", count, Some(format!("s⁺_{} = {sp} but d − d_g = {}", g.label(x), &d - dg)));
            }
        }
    }
    Check::new("shift consistency", count, None)
}

/// The G-graded tensor product `⊕_g A_g ⊗ B_g` with Koszul signs.
pub fn tensor_hat(a: &GFrobeniusAlgebra, b: &GFrobeniusAlgebra) -> Result<GFrobeniusAlgebra, GFrobError> {
    if *a.group != *b.group {
        return Err(GFrobError::GroupMismatch);
    }
    let g = &a.group;
    let n = g.order();
    let pair_vec = |x: &SparseVec, y: &SparseVec, db: usize| -> SparseVec {
        let mut pairs = Vec::with_capacity(x.nnz() * y.nnz());
        for (i, c) in x.iter() {
            for (j, d) in y.iter() {
                pairs.push((i * db + j, c * d));
            }
        }
        SparseVec::from_pairs(pairs)
    };
    let sectors: Vec<Sector> = (0..n)
        .map(|x| {
            let (s, t) = (&a.sectors[x], &b.sectors[x]);
            let mut labels = Vec::new();
            let mut parity = Vec::new();
            let mut degrees = Vec::new();
            for i in 0..s.dim() {
                for j in 0..t.dim() {
                    labels.push(format!("{}⊗{}", s.labels[i], t.labels[j]));
                    parity.push((s.parity[i] + t.parity[j]) % 2);
                    if let (Some(p), Some(q)) = (&s.degrees, &t.degrees) {
                        degrees.push(&p[i] + &q[j]);
                    }
                }
            }
            let sum = |p: &Option<Scalar>, q: &Option<Scalar>| match (p, q) {
                (Some(p), Some(q)) => Some(p + q),
                _ => None,
            };
            Sector {
                labels,
                parity,
                degrees: (s.degrees.is_some() && t.degrees.is_some()).then_some(degrees),
                top_degree: sum(&s.top_degree, &t.top_degree),
                shift_plus: sum(&s.shift_plus, &t.shift_plus),
                shift_minus: sum(&s.shift_minus, &t.shift_minus),
            }
        })
        .collect();
    let mut mult = Vec::with_capacity(n * n);
    let mut action = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let xy = g.mul(x, y);
            let dby = b.dim(y);
            let mut block = Vec::with_capacity(a.dim(x) * b.dim(x) * a.dim(y) * dby);
            for i in 0..a.dim(x) {
                for u in 0..b.dim(x) {
                    for j in 0..a.dim(y) {
                        for v in 0..dby {
                            let s = koszul(true, b.sectors[x].parity[u], a.sectors[y].parity[j]);
                            block.push(pair_vec(a.mult_basis(x, y, i, j), b.mult_basis(x, y, u, v), b.dim(xy)).scaled(&s));
                        }
                    }
                }
            }
            mult.push(block);
            let c = g.conj(x, y);
            let mut block = Vec::with_capacity(a.dim(y) * dby);
            for j in 0..a.dim(y) {
                for v in 0..dby {
                    block.push(pair_vec(a.action_basis(x, y, j), b.action_basis(x, y, v), b.dim(c)));
                }
            }
            action.push(block);
        }
    }
    let metric = (0..n)
        .map(|x| {
            let xi = g.inv(x);
            let (da, db) = (b.dim(x), b.dim(xi));
            let mut m = Matrix::zeros(a.dim(x) * da, a.dim(xi) * db);
            for i in 0..a.dim(x) {
                for u in 0..da {
                    for j in 0..a.dim(xi) {
                        for v in 0..db {
                            let s = koszul(true, b.sectors[x].parity[u], a.sectors[xi].parity[j]);
                            m.set(i * da + u, j * db + v, &(a.metric[x].get(i, j) * b.metric[x].get(u, v)) * &s);
                        }
                    }
                }
            }
            m
        })
        .collect();
    let e = g.identity();
    GFrobeniusAlgebra::from_parts(GFrobParts {
        name: format!("{} ⊗̂ {}", a.name, b.name),
        group: g.clone(),
        sectors,
        unit: pair_vec(&a.unit, &b.unit, b.dim(e)),
        mult,
        action,
        character: a.character.iter().zip(&b.character).map(|(x, y)| x * y).collect(),
        metric,
    })
}

/// Rescales by a 2-cocycle: products by `α(g,h)`, `φ_g|A_h` by `ε(g,h)`,
/// and `η_g` by `α(g,g⁻¹)`.
pub fn twist_by_torsion(a: &GFrobeniusAlgebra, alpha: &TwoCocycle) -> Result<GFrobeniusAlgebra, GFrobError> {
    if **alpha.group() != *a.group {
        return Err(GFrobError::GroupMismatch);
    }
    let g = a.group.clone();
    let n = g.order();
    let mut p = a.parts();
    for x in 0..n {
        for y in 0..n {
            let k = x * n + y;
            let c = alpha.get(x, y);
            p.mult[k] = p.mult[k].iter().map(|v| v.scaled(c)).collect();
            let c = alpha.epsilon(x, y);
            p.action[k] = p.action[k].iter().map(|v| v.scaled(&c)).collect();
        }
        p.metric[x] = scale_matrix(&p.metric[x], alpha.get(x, g.inv(x)));
    }
    p.name = format!("{}^α", a.name);
    GFrobeniusAlgebra::from_parts(p)
}

/// Twists by a homomorphism `σ: G → Z/2`, shifting sector parities by `σ(g)`.
pub fn super_twist(a: &GFrobeniusAlgebra, sigma: &SuperGrading) -> Result<GFrobeniusAlgebra, GFrobError> {
    if **sigma.group() != *a.group {
        return Err(GFrobError::GroupMismatch);
    }
    let g = a.group.clone();
    let n = g.order();
    let mut p = a.parts();
    for x in 0..n {
        let sx = sigma.get(x) as usize;
        for y in 0..n {
            let sy = sigma.get(y) as usize;
            let k = x * n + y;
            let dy = a.dim(y);
            p.mult[k] = p.mult[k]
                .iter()
                .enumerate()
                .map(|(ij, v)| v.scaled(&Scalar::sign_pow(a.sectors[x].parity[ij / dy] as usize * sy)))
                .collect();
            let c = Scalar::sign_pow(sx * sy);
            p.action[k] = p.action[k].iter().map(|v| v.scaled(&c)).collect();
        }
        let mut m = p.metric[x].clone();
        for i in 0..m.rows() {
            let c = Scalar::sign_pow(a.sectors[x].parity[i] as usize * sx);
            for j in 0..m.cols() {
                let v = m.get(i, j) * &c;
                m.set(i, j, v);
            }
        }
        p.metric[x] = m;
        p.character[x] = &p.character[x] * &Scalar::sign_pow(sx);
        for q in &mut p.sectors[x].parity {
            *q = (*q + sigma.get(x)) % 2;
        }
    }
    p.name = format!("{}^σ", a.name);
    GFrobeniusAlgebra::from_parts(p)
}

/// `k^{α,σ}[G]`: one-dimensional sectors spanned by `ĝ` with
/// `ĝ∘ĥ = α(g,h)·(gh)^`, `φ_{g,h} = (−1)^{σ(g)σ(h)}ε(g,h)`,
/// `η(ĝ, (g⁻¹)^) = α(g,g⁻¹)` and `χ_g = (−1)^{σ(g)}`.
pub fn twisted_group_ring(alpha: &TwoCocycle, sigma: &SuperGrading) -> Result<GFrobeniusAlgebra, GFrobError> {
    let g = alpha.group().clone();
    if **sigma.group() != *g {
        return Err(GFrobError::GroupMismatch);
    }
    let n = g.order();
    let sectors = (0..n)
        .map(|x| Sector {
            labels: vec![format!("^{}", g.label(x))],
            parity: vec![sigma.get(x)],
            degrees: Some(vec![Scalar::zero()]),
            top_degree: Some(Scalar::zero()),
            shift_plus: Some(Scalar::zero()),
            shift_minus: Some(Scalar::zero()),
        })
        .collect();
    let mut mult = Vec::with_capacity(n * n);
    let mut action = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            mult.push(vec![SparseVec::single(0, alpha.get(x, y).clone())]);
            let s = Scalar::sign_pow(sigma.get(x) as usize * sigma.get(y) as usize);
            action.push(vec![SparseVec::single(0, &s * &alpha.epsilon(x, y))]);
        }
    }
    let metric = (0..n).map(|x| Matrix::from_rows(vec![vec![alpha.get(x, g.inv(x)).clone()]])).collect();
    let character = (0..n).map(|x| Scalar::sign_pow(sigma.get(x) as usize)).collect();
    GFrobeniusAlgebra::from_parts(GFrobParts {
        name: format!("k^α[{}]", g.name()),
        group: g,
        sectors,
        unit: SparseVec::basis(0),
        mult,
        action,
        character,
        metric,
    })
}

/// The fixed subspace of the action, with its induced product and pairing.
#[derive(Debug, Clone)]
pub struct Invariants {
    /// Basis in global coordinates; each vector is homogeneous in parity
    /// and (when graded) in shifted degree.
    pub basis: Vec<SparseVec>,
    pub degrees: Vec<Option<Scalar>>,
    pub parity: Vec<u8>,
    pub closure: Check,
    pub commutativity: Check,
    pub pairing_rank: usize,
}

impl Invariants {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn pairing_nondegenerate(&self) -> bool {
        self.pairing_rank == self.basis.len()
    }

    /// Dimension per shifted degree, in increasing degree.
    pub fn poincare(&self) -> Vec<(Scalar, usize)> {
        let mut out: Vec<(Scalar, usize)> = Vec::new();
        let mut degs: Vec<Scalar> = self.degrees.iter().flatten().cloned().collect();
        degs.sort();
        for d in degs {
            match out.last_mut() {
                Some((e, c)) if *e == d => *c += 1,
                _ => out.push((d, 1)),
            }
        }
        out
    }
}

/// Fixed vectors of all `φ_g`, computed per conjugacy class, parity and
/// shifted degree.
pub fn invariant_subspace(a: &GFrobeniusAlgebra) -> (Vec<SparseVec>, Vec<Option<Scalar>>, Vec<u8>) {
    let g = &a.group;
    let gens = g.generators();
    let classes = g.conjugacy_classes();
    let parts: Vec<Vec<(SparseVec, Option<Scalar>, u8)>> = classes
        .par_iter()
        .map(|class| {
            let mut coords: Vec<(usize, usize)> = Vec::new();
            for &x in class {
                for i in 0..a.dim(x) {
                    coords.push((x, i));
                }
            }
            let position = |x: usize, i: usize| coords.iter().position(|&c| c == (x, i)).expect("in class");
            let mut keys: Vec<(Option<Scalar>, u8)> =
                coords.iter().map(|&(x, i)| (a.sectors[x].shifted_degree(i), a.sectors[x].parity[i])).collect();
            keys.sort();
            keys.dedup();
            let mut out = Vec::new();
            for key in keys {
                let cols: Vec<usize> = (0..coords.len())
                    .filter(|&c| {
                        let (x, i) = coords[c];
                        (a.sectors[x].shifted_degree(i), a.sectors[x].parity[i]) == key
                    })
                    .collect();
                let mut rows: Vec<Vec<Scalar>> = Vec::new();
                for &s in &gens {
                    let mut block = vec![vec![Scalar::zero(); cols.len()]; coords.len()];
                    for (k, &c) in cols.iter().enumerate() {
                        let (x, i) = coords[c];
                        for (m, v) in a.action_basis(s, x, i).iter() {
                            block[position(g.conj(s, x), m)][k] += v;
                        }
                        block[c][k] -= &Scalar::one();
                    }
                    rows.extend(block);
                }
                let kernel = if rows.is_empty() {
                    (0..cols.len()).map(|k| {
                        let mut v = vec![Scalar::zero(); cols.len()];
                        v[k] = Scalar::one();
                        v
                    }).collect()
                } else {
                    Matrix::from_rows(rows).nullspace()
                };
                for v in kernel {
                    let global = SparseVec::from_pairs(
                        v.iter()
                            .enumerate()
                            .map(|(k, c)| {
                                let (x, i) = coords[cols[k]];
                                (a.offset(x) + i, c.clone())
                            })
                            .collect(),
                    );
                    out.push((global, key.0.clone(), key.1));
                }
            }
            out
        })
        .collect();
    let mut basis = Vec::new();
    let mut degrees = Vec::new();
    let mut parity = Vec::new();
    for (v, d, p) in parts.into_iter().flatten() {
        basis.push(v);
        degrees.push(d);
        parity.push(p);
    }
    (basis, degrees, parity)
}

/// Invariants with closure, (super)commutativity and pairing rank.
pub fn invariants(a: &GFrobeniusAlgebra) -> Invariants {
    let (basis, degrees, parity) = invariant_subspace(a);
    let g = &a.group;
    let gens = g.generators();
    let k = basis.len();
    let mut closure = None;
    let mut commutativity = None;
    let mut count = 0;
    'outer: for i in 0..k {
        for j in 0..k {
            count += 1;
            let ab = a.global_multiply(&basis[i], &basis[j]);
            if closure.is_none() && gens.iter().any(|&s| a.global_act(s, &ab) != ab) {
                closure = Some(format!("product of invariants {i} and {j} is not invariant"));
            }
            let ba = a.global_multiply(&basis[j], &basis[i]);
            let s = koszul(true, parity[i], parity[j]);
            if commutativity.is_none() && ab != ba.scaled(&s) {
                commutativity = Some(format!("invariants {i} and {j} do not supercommute"));
            }
            if closure.is_some() && commutativity.is_some() {
                break 'outer;
            }
        }
    }
    let mut pm = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            pm.set(i, j, a.global_pair(&basis[i], &basis[j]));
        }
    }
    Invariants {
        pairing_rank: pm.rank(),
        closure: Check::new("invariants closed under product", count, closure),
        commutativity: Check::new("invariants supercommute", count, commutativity),
        basis,
        degrees,
        parity,
    }
}

/// Which complement of `I_g` the section `i_g` lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionChoice {
    Pivot,
    ReversedPivot,
}

/// Cocycle data read off from a choice of cyclic generators `1_g`.
#[derive(Debug, Clone)]
pub struct SpecialStructure {
    pub generators: Vec<SparseVec>,
    /// `r_g`, a `dim A_g × dim A_e` matrix with columns `e_j·1_g`.
    pub restriction: Vec<Matrix>,
    /// `i_g`, a `dim A_e × dim A_g` right inverse of `r_g`.
    pub section: Vec<Matrix>,
    /// Basis of `I_g = ker r_g`.
    pub ideal: Vec<Vec<SparseVec>>,
    /// `γ_{g,h} = i_{gh}(1_g·1_h)`, indexed `g·|G| + h`.
    pub gamma: Vec<SparseVec>,
    pub phi: NonabelianCocycle,
}

fn apply(m: &Matrix, v: &SparseVec) -> SparseVec {
    let mut acc = Accumulator::new();
    for (j, x) in v.iter() {
        for i in 0..m.rows() {
            let c = m.get(i, j);
            if !c.is_zero() {
                acc.add(i, &(c * x));
            }
        }
    }
    acc.finish()
}

impl SpecialStructure {
    pub fn restrict(&self, g: usize, x: &SparseVec) -> SparseVec {
        apply(&self.restriction[g], x)
    }

    pub fn lift(&self, g: usize, y: &SparseVec) -> SparseVec {
        apply(&self.section[g], y)
    }

    /// `π_g = i_g ∘ r_g`.
    pub fn project(&self, g: usize, x: &SparseVec) -> SparseVec {
        self.lift(g, &self.restrict(g, x))
    }

    pub fn gamma(&self, g: usize, h: usize) -> &SparseVec {
        &self.gamma[g * self.phi.group().order() + h]
    }
}

/// The default generators: the first basis vector of every sector.
pub fn default_generators(a: &GFrobeniusAlgebra) -> Vec<SparseVec> {
    (0..a.group.order()).map(|_| SparseVec::basis(0)).collect()
}

/// Computes `r_g`, `I_g`, `i_g`, `γ` and `φ` for the given generators.
pub fn extract_special(
    a: &GFrobeniusAlgebra,
    generators: &[SparseVec],
    choice: SectionChoice,
) -> Result<SpecialStructure, GFrobError> {
    let g = &a.group;
    let n = g.order();
    let e = g.identity();
    let de = a.dim(e);
    if generators.len() != n {
        return Err(GFrobError::Shape("one generator per sector required".into()));
    }
    let mut restriction = Vec::with_capacity(n);
    let mut section = Vec::with_capacity(n);
    let mut ideal = Vec::with_capacity(n);
    for x in 0..n {
        let cols: Vec<SparseVec> = (0..de).map(|j| a.multiply(e, &SparseVec::basis(j), x, &generators[x])).collect();
        let r = Matrix::from_columns(a.dim(x), &cols);
        let order: Vec<usize> = match choice {
            SectionChoice::Pivot => (0..de).collect(),
            SectionChoice::ReversedPivot => (0..de).rev().collect(),
        };
        let permuted = Matrix::from_columns(a.dim(x), &order.iter().map(|&j| cols[j].clone()).collect::<Vec<_>>());
        let (_, pivots) = permuted.rref();
        if pivots.len() != a.dim(x) {
            return Err(GFrobError::NotCyclic { sector: g.label(x).to_string() });
        }
        let pivots: Vec<usize> = pivots.iter().map(|&p| order[p]).collect();
        let square = Matrix::from_columns(a.dim(x), &pivots.iter().map(|&j| cols[j].clone()).collect::<Vec<_>>());
        let inv = square.inverse()?;
        let mut s = Matrix::zeros(de, a.dim(x));
        for (k, &p) in pivots.iter().enumerate() {
            for y in 0..a.dim(x) {
                s.set(p, y, inv.get(k, y).clone());
            }
        }
        ideal.push(r.nullspace().iter().map(|v| SparseVec::from_dense(v)).collect());
        restriction.push(r);
        section.push(s);
    }
    let mut gamma = Vec::with_capacity(n * n);
    let mut phi = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let p = a.multiply(x, &generators[x], y, &generators[y]);
            gamma.push(apply(&section[g.mul(x, y)], &p));
            let image = a.act(x, y, &generators[y]);
            let c = image.ratio_to(&generators[g.conj(x, y)]).filter(|c| !c.is_zero()).ok_or_else(|| {
                GFrobError::GeneratorNotPreserved(format!("φ_{}(1_{}) = {image:?}", g.label(x), g.label(y)))
            })?;
            phi.push(c);
        }
    }
    Ok(SpecialStructure {
        generators: generators.to_vec(),
        restriction,
        section,
        ideal,
        gamma,
        phi: NonabelianCocycle::new_unchecked(g.clone(), phi),
    })
}

/// Runs the identities a special structure must satisfy.
pub fn check_special(a: &GFrobeniusAlgebra, s: &SpecialStructure, super_mode: bool) -> Report {
    let g = a.group.clone();
    let n = g.order();
    let e = g.identity();
    let de = a.dim(e);
    let mut r = Report::new(format!("special structure of {}", a.name));
    let par = |x: usize| -> usize {
        let gen = &s.generators[x];
        gen.iter().next().map_or(0, |(i, _)| a.sectors[x].parity[i] as usize)
    };
    let sign = |x: usize, y: usize| if super_mode { Scalar::sign_pow(par(x) * par(y)) } else { Scalar::one() };
    let mul_e = |x: &SparseVec, y: &SparseVec| a.multiply(e, x, e, y);

    // r_g surjective, r_g(1) = 1_g, r_e = id
    let mut w = None;
    for x in 0..n {
        if s.restriction[x].rank() != a.dim(x) {
            w = Some(format!("r_{} is not surjective", g.label(x)));
            break;
        }
        if s.restrict(x, &a.unit) != s.generators[x] {
            w = Some(format!("r_{}(1) ≠ 1_g", g.label(x)));
            break;
        }
    }
    if w.is_none() && (s.restriction[e] != Matrix::identity(de)) {
        w = Some("r_e ≠ id".into());
    }
    r.push(Check::new("restriction maps", n as u64, w));

    let (count, w) = scan(n, |x| {
        let mut count = 0;
        for y in 0..n {
            for z in 0..n {
                count += 1;
                let xyz = g.mul(g.mul(x, y), z);
                let lhs = s.restrict(xyz, &mul_e(s.gamma(x, y), s.gamma(g.mul(x, y), z)));
                let rhs = s.restrict(xyz, &mul_e(s.gamma(x, g.mul(y, z)), s.gamma(y, z)));
                if lhs != rhs {
                    return (count, Some(format!("γ cocycle fails mod I at ({}, {}, {})", g.label(x), g.label(y), g.label(z))));
                }
            }
        }
        (count, None)
    });
    r.push(Check::new("γ cocycle mod I", count, w));

    let (count, w) = scan(n, |x| {
        let mut count = 0;
        for y in 0..n {
            let xy = g.mul(x, y);
            for v in s.ideal[x].iter().chain(&s.ideal[y]) {
                count += 1;
                if !s.restrict(xy, &mul_e(v, s.gamma(x, y))).is_zero() {
                    return (count, Some(format!("(I_g + I_h)γ ⊄ I_gh at ({}, {})", g.label(x), g.label(y))));
                }
            }
        }
        (count, None)
    });
    r.push(Check::new("section independence", count, w));

    let mut count = 0;
    let mut w = None;
    'metric: for x in 0..n {
        let xi = g.inv(x);
        for j in 0..de {
            count += 1;
            let b = SparseVec::basis(j);
            let lhs = a.pair(e, s.gamma(x, xi), &b);
            let rhs = a.pair(x, &s.restrict(x, &b), &s.generators[xi]);
            if lhs != rhs {
                w = Some(format!("η(γ_(g,g⁻¹), e{j}) = {lhs} but η(r_g(e{j}), 1_g⁻¹) = {rhs} for g = {}", g.label(x)));
                break 'metric;
            }
        }
    }
    r.push(Check::new("metric compatibility", count, w));

    let mut count = 0;
    let mut w = None;
    'compat: for x in 0..n {
        for y in 0..n {
            count += 1;
            let xy = g.mul(x, y);
            let lhs = s.restrict(xy, s.gamma(x, y));
            let rhs = s.restrict(xy, s.gamma(g.conj(x, y), x)).scaled(&(s.phi.get(x, y) * &sign(x, y)));
            if lhs != rhs {
                w = Some(format!("γ_(g,h) ≠ ±φ_(g,h)γ_(ghg⁻¹,g) mod I at ({}, {})", g.label(x), g.label(y)));
                break 'compat;
            }
        }
    }
    r.push(Check::new("γ–φ compatibility", count, w));

    let (count, w) = scan(n, |k| {
        let mut count = 0;
        for x in 0..n {
            for y in 0..n {
                count += 1;
                let target = g.conj(k, g.mul(x, y));
                let lhs = s.restrict(target, &a.act(k, e, s.gamma(x, y)).scaled(s.phi.get(k, g.mul(x, y))));
                let rhs = s
                    .restrict(target, s.gamma(g.conj(k, x), g.conj(k, y)))
                    .scaled(&(s.phi.get(k, x) * s.phi.get(k, y)));
                if lhs != rhs {
                    return (
                        count,
                        Some(format!("φ_k(γ_(g,h))φ_(k,gh) ≠ φ_(k,g)φ_(k,h)γ at k = {}, ({}, {})", g.label(k), g.label(x), g.label(y))),
                    );
                }
            }
        }
        (count, None)
    });
    r.push(Check::new("action on γ", count, w));

    let mut count = 0;
    let mut w = None;
    'dual: for x in 0..n {
        let xi = g.inv(x);
        for y in 0..a.dim(x) {
            let lifted = mul_e(&s.lift(x, &SparseVec::basis(y)), s.gamma(x, xi));
            for j in 0..de {
                count += 1;
                let b = SparseVec::basis(j);
                let lhs = a.pair(e, &lifted, &b);
                let rhs = a.pair(x, &SparseVec::basis(y), &s.restrict(xi, &b));
                if lhs != rhs {
                    w = Some(format!("η(i_g(e{y})γ_(g,g⁻¹), e{j}) = {lhs} ≠ η(e{y}, r_g⁻¹(e{j})) = {rhs} for g = {}", g.label(x)));
                    break 'dual;
                }
            }
        }
    }
    r.push(Check::new("duality of sections", count, w));

    let mut count = 0;
    let mut w = None;
    'zero: for x in 0..n {
        for y in 0..n {
            let xy = g.mul(x, y);
            if !s.restrict(xy, s.gamma(x, y)).is_zero() {
                continue;
            }
            count += 1;
            if !s.restrict(y, s.gamma(x, g.inv(x))).is_zero() || !s.restrict(x, s.gamma(y, g.inv(y))).is_zero() {
                w = Some(format!("γ_(g,h) ≡ 0 but π_h(γ_(g,g⁻¹)) ≠ 0 at ({}, {})", g.label(x), g.label(y)));
                break 'zero;
            }
        }
    }
    r.push(Check::new("zero check", count, w));

    let mut count = 0;
    let mut w = None;
    'dc: for x in 0..n {
        for y in 0..n {
            if !g.commute(x, y) {
                continue;
            }
            for k in 0..n {
                count += 1;
                if s.phi.get(x, y) != s.phi.get(g.conj(k, x), g.conj(k, y)) {
                    w = Some(format!("φ_(g,h) ≠ φ_(kgk⁻¹,khk⁻¹) at g = {}, h = {}, k = {}", g.label(x), g.label(y), g.label(k)));
                    break 'dc;
                }
            }
        }
    }
    r.push(Check::new("double conjugation", count, w));

    r.push(Check::new("nonabelian cocycle identity", (n * n * n) as u64, s.phi.violation()));
    r
}

/// Extracts with both section choices, checks each, and confirms that
/// `γ` agrees modulo the ideals.
pub fn verify_special(a: &GFrobeniusAlgebra, generators: &[SparseVec], super_mode: bool) -> Result<Report, GFrobError> {
    let s1 = extract_special(a, generators, SectionChoice::Pivot)?;
    let s2 = extract_special(a, generators, SectionChoice::ReversedPivot)?;
    let mut r = check_special(a, &s1, super_mode);
    for mut c in check_special(a, &s2, super_mode).checks {
        c.axiom = format!("{} [reversed section]", c.axiom);
        r.push(c);
    }
    let g = &a.group;
    let n = g.order();
    let w = (0..n * n).find_map(|k| {
        let (x, y) = (k / n, k % n);
        let xy = g.mul(x, y);
        (s1.restrict(xy, &s1.gamma[k]) != s2.restrict(xy, &s2.gamma[k]))
            .then(|| format!("γ_({}, {}) depends on the section", g.label(x), g.label(y)))
    });
    r.push(Check::new("γ independent of section", (n * n) as u64, w));
    Ok(r)
}

/// Result of normalizing `γ` on S_n.
#[derive(Debug, Clone)]
pub struct GammaNormalization {
    pub lambda: Vec<Scalar>,
    pub structure: SpecialStructure,
    pub report: Report,
}

/// Rescales the generators `1_σ ↦ λ_σ 1_σ` so that `γ_{σ,τ} = 1` on all
/// transversal pairs, checking every one-transposition splitting.
pub fn normalize_gamma(a: &GFrobeniusAlgebra, s: &SpecialStructure) -> Result<GammaNormalization, GFrobError> {
    let g = a.group.clone();
    let n = g.degree().ok_or(CocycleError::NotSymmetric)?;
    let lambda = transversal_normalization(&g, |x, t| {
        let xt = g.mul(x, t);
        let p = a.multiply(x, &s.generators[x], t, &s.generators[t]);
        p.ratio_to(&s.generators[xt]).ok_or_else(|| {
            format!("1_{}·1_{} = {p:?} is not a multiple of 1_{}", g.label(x), g.label(t), g.label(xt))
        })
    })
    .map_err(|e| match e {
        CocycleError::NotNormalizable(m) => GFrobError::NotNormalizable(m),
        other => other.into(),
    })?;
    let generators: Vec<SparseVec> = s.generators.iter().zip(&lambda).map(|(v, l)| v.scaled(l)).collect();
    let choice = if s.section == extract_special(a, &s.generators, SectionChoice::Pivot)?.section {
        SectionChoice::Pivot
    } else {
        SectionChoice::ReversedPivot
    };
    let structure = extract_special(a, &generators, choice)?;
    let mut report = Report::new("γ normalization");
    let (gamma, phi) = crate::cocycles::rescale_pair(&s.gamma, &s.phi, &lambda)?;
    let k = g.order();
    let w = (0..k * k).find_map(|i| {
        let xy = g.mul(i / k, i % k);
        (structure.restrict(xy, &structure.gamma[i]) != structure.restrict(xy, &gamma[i]))
            .then(|| format!("rescaled γ_({}, {}) disagrees with re-extraction", g.label(i / k), g.label(i % k)))
    });
    report.push(Check::new("rescaling formula for γ", (k * k) as u64, w));
    let w = (phi != structure.phi).then(|| "rescaled φ disagrees with re-extraction".to_string());
    report.push(Check::new("rescaling formula for φ", (k * k) as u64, w));
    let mut count = 0;
    let mut w = None;
    for x in 0..k {
        for y in 0..k {
            let xy = g.mul(x, y);
            if g.length(x) + g.length(y) != g.length(xy) {
                continue;
            }
            count += 1;
            if structure.restrict(xy, structure.gamma(x, y)) != structure.generators[xy] && w.is_none() {
                w = Some(format!("γ_({}, {}) ≠ 1 on a transversal pair", g.label(x), g.label(y)));
            }
        }
    }
    report.push(Check::new("γ = 1 on transversal pairs", count, w));
    let _ = n;
    Ok(GammaNormalization { lambda, structure, report })
}

/// On-disk form of a G-Frobenius algebra.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GFrobFile {
    pub name: String,
    pub group: GroupSpec,
    pub character: Vec<(String, Scalar)>,
    pub unit: Vec<(usize, Scalar)>,
    pub sectors: Vec<SectorFile>,
    pub mult: Vec<MultBlock>,
    pub action: Vec<ActionBlock>,
    pub metric: Vec<MetricBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum GroupSpec {
    Symmetric { symmetric: usize },
    Table { name: String, elements: Vec<String>, table: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SectorFile {
    pub element: String,
    pub labels: Vec<String>,
    pub parity: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_degree: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_plus: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_minus: Option<Scalar>,
}

/// Products `e_i·e_j = Σ c·e_k` for `e_i ∈ A_g`, `e_j ∈ A_h`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MultBlock {
    pub g: String,
    pub h: String,
    pub entries: Vec<(usize, usize, usize, Scalar)>,
}

/// `φ_g(e_j) = Σ c·e_k` for `e_j ∈ A_h`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ActionBlock {
    pub g: String,
    pub h: String,
    pub entries: Vec<(usize, usize, Scalar)>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MetricBlock {
    pub g: String,
    pub entries: Vec<(usize, usize, Scalar)>,
}

impl GFrobFile {
    pub fn from_algebra(a: &GFrobeniusAlgebra) -> Self {
        let g = &a.group;
        let n = g.order();
        let group = match g.degree() {
            Some(d) => GroupSpec::Symmetric { symmetric: d },
            None => GroupSpec::Table {
                name: g.name().to_string(),
                elements: g.labels().to_vec(),
                table: (0..n).map(|x| (0..n).map(|y| g.mul(x, y)).collect()).collect(),
            },
        };
        let mut mult = Vec::new();
        let mut action = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let dy = a.dim(y);
                let entries: Vec<_> = a.mult[a.block(x, y)]
                    .iter()
                    .enumerate()
                    .flat_map(|(ij, v)| v.iter().map(move |(k, c)| (ij / dy, ij % dy, k, c.clone())).collect::<Vec<_>>())
                    .collect();
                if !entries.is_empty() {
                    mult.push(MultBlock { g: g.label(x).into(), h: g.label(y).into(), entries });
                }
                let entries: Vec<_> = a.action[a.block(x, y)]
                    .iter()
                    .enumerate()
                    .flat_map(|(j, v)| v.iter().map(move |(k, c)| (j, k, c.clone())).collect::<Vec<_>>())
                    .collect();
                if !entries.is_empty() {
                    action.push(ActionBlock { g: g.label(x).into(), h: g.label(y).into(), entries });
                }
            }
        }
        let metric = (0..n)
            .map(|x| {
                let m = &a.metric[x];
                let mut entries = Vec::new();
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        if !m.get(i, j).is_zero() {
                            entries.push((i, j, m.get(i, j).clone()));
                        }
                    }
                }
                MetricBlock { g: g.label(x).into(), entries }
            })
            .filter(|b| !b.entries.is_empty())
            .collect();
        GFrobFile {
            name: a.name.clone(),
            group,
            character: (0..n).map(|x| (g.label(x).to_string(), a.character[x].clone())).collect(),
            unit: a.unit.iter().map(|(i, c)| (i, c.clone())).collect(),
            sectors: (0..n)
                .map(|x| {
                    let s = &a.sectors[x];
                    SectorFile {
                        element: g.label(x).into(),
                        labels: s.labels.clone(),
                        parity: s.parity.clone(),
                        degrees: s.degrees.clone(),
                        top_degree: s.top_degree.clone(),
                        shift_plus: s.shift_plus.clone(),
                        shift_minus: s.shift_minus.clone(),
                    }
                })
                .collect(),
            mult,
            action,
            metric,
        }
    }

    pub fn into_algebra(self) -> Result<GFrobeniusAlgebra, GFrobError> {
        let perr = |m: String| GFrobError::Parse { line: None, message: m };
        let group: Group = match self.group {
            GroupSpec::Symmetric { symmetric } => Arc::new(FiniteGroupTable::symmetric(symmetric)),
            GroupSpec::Table { name, elements, table } => Arc::new(FiniteGroupTable::from_table(name, elements, table)?),
        };
        let n = group.order();
        let elem = |s: &str| group.parse_element(s).ok_or_else(|| perr(format!("unknown group element {s:?}")));
        let mut sectors: Vec<Option<Sector>> = vec![None; n];
        for s in self.sectors {
            let x = elem(&s.element)?;
            if sectors[x].is_some() {
                return Err(perr(format!("sector {} listed twice", s.element)));
            }
            sectors[x] = Some(Sector {
                labels: s.labels,
                parity: s.parity,
                degrees: s.degrees,
                top_degree: s.top_degree,
                shift_plus: s.shift_plus,
                shift_minus: s.shift_minus,
            });
        }
        let sectors: Vec<Sector> = sectors
            .into_iter()
            .enumerate()
            .map(|(x, s)| s.ok_or_else(|| perr(format!("sector {} missing", group.label(x)))))
            .collect::<Result<_, _>>()?;
        let dim = |x: usize| sectors[x].dim();
        let mut character = vec![None; n];
        for (l, c) in self.character {
            character[elem(&l)?] = Some(c);
        }
        let character: Vec<Scalar> = character
            .into_iter()
            .enumerate()
            .map(|(x, c)| c.ok_or_else(|| perr(format!("χ missing for {}", group.label(x)))))
            .collect::<Result<_, _>>()?;
        let mut mult: Vec<Vec<Vec<(usize, Scalar)>>> =
            (0..n * n).map(|k| vec![Vec::new(); dim(k / n) * dim(k % n)]).collect();
        for b in self.mult {
            let (x, y) = (elem(&b.g)?, elem(&b.h)?);
            for (i, j, k, c) in b.entries {
                if i >= dim(x) || j >= dim(y) {
                    return Err(perr(format!("product index ({i}, {j}) out of range in block ({}, {})", b.g, b.h)));
                }
                mult[x * n + y][i * dim(y) + j].push((k, c));
            }
        }
        let mut action: Vec<Vec<Vec<(usize, Scalar)>>> = (0..n * n).map(|k| vec![Vec::new(); dim(k % n)]).collect();
        for b in self.action {
            let (x, y) = (elem(&b.g)?, elem(&b.h)?);
            for (j, k, c) in b.entries {
                if j >= dim(y) {
                    return Err(perr(format!("action index {j} out of range in block ({}, {})", b.g, b.h)));
                }
                action[x * n + y][j].push((k, c));
            }
        }
        let mut metric: Vec<Matrix> = (0..n).map(|x| Matrix::zeros(dim(x), dim(group.inv(x)))).collect();
        for b in self.metric {
            let x = elem(&b.g)?;
            for (i, j, c) in b.entries {
                if i >= metric[x].rows() || j >= metric[x].cols() {
                    return Err(perr(format!("metric index ({i}, {j}) out of range in block {}", b.g)));
                }
                metric[x].set(i, j, c);
            }
        }
        let vecs = |blocks: Vec<Vec<Vec<(usize, Scalar)>>>| -> Vec<Vec<SparseVec>> {
            blocks.into_iter().map(|b| b.into_iter().map(SparseVec::from_pairs).collect()).collect()
        };
        GFrobeniusAlgebra::from_parts(GFrobParts {
            name: self.name,
            group,
            sectors,
            unit: SparseVec::from_pairs(self.unit),
            mult: vecs(mult),
            action: vecs(action),
            character,
            metric,
        })
    }
}

pub fn read_gfrob(src: &str) -> Result<GFrobeniusAlgebra, GFrobError> {
    let file: GFrobFile =
        serde_json::from_str(src).map_err(|e| GFrobError::Parse { line: Some(e.line()), message: e.to_string() })?;
    file.into_algebra()
}

pub fn write_gfrob(a: &GFrobeniusAlgebra) -> String {
    serde_json::to_string(&GFrobFile::from_algebra(a)).expect("structure serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycles::schur_cocycle_sn;

    fn group_ring(n: usize) -> GFrobeniusAlgebra {
        let g: Group = Arc::new(FiniteGroupTable::symmetric(n));
        twisted_group_ring(&TwoCocycle::trivial(g.clone()), &SuperGrading::trivial(g)).unwrap()
    }

    #[test]
    fn plain_group_ring_passes() {
        let a = group_ring(3);
        let r = verify_axioms(&a, false);
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn plain_group_ring_invariants_are_class_functions() {
        let inv = invariants(&group_ring(3));
        assert_eq!(inv.dim(), 3);
        assert!(inv.closure.passed() && inv.commutativity.passed());
    }

    #[test]
    fn sign_graded_group_ring_passes_super_axioms() {
        let g: Group = Arc::new(FiniteGroupTable::symmetric(3));
        let a = twisted_group_ring(&TwoCocycle::trivial(g.clone()), &SuperGrading::sign(g, 1).unwrap()).unwrap();
        let r = verify_axioms(&a, true);
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn schur_twisted_group_ring_passes() {
        let alpha = schur_cocycle_sn(4).unwrap();
        let a = twisted_group_ring(&alpha, &SuperGrading::trivial(alpha.group().clone())).unwrap();
        let r = verify_axioms(&a, false);
        assert!(r.passed(), "{}", r.to_text());
        let s = extract_special(&a, &default_generators(&a), SectionChoice::Pivot).unwrap();
        assert_eq!(s.phi, alpha.epsilon_table());
        for (k, v) in s.gamma.iter().enumerate() {
            assert_eq!(*v, SparseVec::single(0, alpha.values()[k].clone()));
        }
        assert!(check_special(&a, &s, false).passed());
    }

    #[test]
    fn corrupted_action_sign_is_caught() {
        let mut p = group_ring(3).into_parts();
        p.action[3 * 6 + 1][0] = p.action[3 * 6 + 1][0].scaled(&Scalar::from_int(-1));
        let a = GFrobeniusAlgebra::from_parts(p).unwrap();
        assert!(!verify_axioms(&a, false).passed());
    }

    #[test]
    fn file_round_trip() {
        let alpha = schur_cocycle_sn(3).unwrap();
        let a = twisted_group_ring(&alpha, &SuperGrading::trivial(alpha.group().clone())).unwrap();
        let b = read_gfrob(&write_gfrob(&a)).unwrap();
        assert_eq!(a.table_difference(&b), None);
    }

    #[test]
    fn misplaced_product_rejected() {
        let mut p = group_ring(2).into_parts();
        p.mult[1] = vec![SparseVec::basis(3)];
        assert!(matches!(GFrobeniusAlgebra::from_parts(p), Err(GFrobError::Shape(_))));
    }
}
