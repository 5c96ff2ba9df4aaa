//! Second quantization: the S_n-twisted Frobenius algebra on `A^{⊗n}`.
//!
//! The sector of `σ` is `A^{⊗l(σ)}` with one tensor factor per orbit of
//! `σ`, orbits taken in order of their minimal element. Products are built
//! from three maps between tensor powers indexed by orbit partitions:
//!
//! * restriction multiplies the factors of a finer partition that lie in one
//!   block of a coarser one,
//! * the section places each factor on the minimum of its orbit and fills
//!   the remaining positions with the unit,
//! * the pushforward from a coarse partition to a finer one applies the
//!   iterated comultiplication `Δ^{(r)}` to each block containing `r`
//!   sub-blocks.
//!
//! For `a ∈ A_σ` and `b ∈ A_{σ′}` the product is the pushforward from the
//! joint orbits of `⟨σ,σ′⟩` to the orbits of `σσ′` of
//! `r(a)·r(b)·⊗_B e^{g(σ,σ′;B)}`, where `e` is the Euler class and `g` the
//! graph defect. The action relabels tensor factors along `σ` and carries
//! the sign `(−1)^{p|σ||σ′|}`; a torsion twist is applied last.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::cocycles::{sign_torsion_sn, CocycleError, FiniteGroupTable, Group, TwoCocycle};
use crate::exact::{Accumulator, Matrix, Scalar, SparseVec};
use crate::frobenius::{multi_index, outer_product, verify_frobenius, FrobeniusAlgebra, FrobeniusError};
use crate::gfrob::{
    invariant_subspace, twist_by_torsion, verify_axioms, GFrobError, GFrobParts, GFrobeniusAlgebra, Sector,
};
use crate::report::{Check, Report};
use crate::symgroup::{graph_defect, joint_orbits, minimal_factorization, OrbitPartition, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SympowError {
    #[error("base algebra is not eligible: {0}")]
    BaseNotEligible(String),
    #[error("refusing to build: total dimension {size} exceeds the cap {cap}")]
    FeasibilityRefused { size: u128, cap: u128 },
    #[error(transparent)]
    Frobenius(#[from] FrobeniusError),
    #[error(transparent)]
    GFrob(#[from] GFrobError),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
}

/// `Σ_{σ∈S_n} D^{l(σ)} = D(D+1)⋯(D+n−1)`.
pub fn total_dimension(d: usize, n: usize) -> u128 {
    (0..n).map(|k| (d + k) as u128).product()
}

/// Requires a Frobenius algebra that is commutative, purely even and
/// graded-connected.
pub fn check_eligible(a: &FrobeniusAlgebra) -> Result<(), SympowError> {
    let r = verify_frobenius(a);
    if let Some(c) = r.failures().next() {
        return Err(SympowError::BaseNotEligible(format!(
            "{} fails ({})",
            c.axiom,
            c.witness.clone().unwrap_or_default()
        )));
    }
    if !a.is_even() {
        return Err(SympowError::BaseNotEligible("odd basis elements present".into()));
    }
    if !a.is_commutative() {
        return Err(SympowError::BaseNotEligible("multiplication is not commutative".into()));
    }
    if a.top_degree().is_none() || !a.is_graded_connected() {
        return Err(SympowError::BaseNotEligible("not graded-connected".into()));
    }
    Ok(())
}

/// A sector label: `σ` and its orbits in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorIndex {
    pub sigma: Permutation,
    pub orbits: OrbitPartition,
}

/// Tensor-power maps for a fixed base algebra.
#[derive(Debug)]
pub struct TensorCalculus {
    base: FrobeniusAlgebra,
    /// `coproducts[r][i] = Δ^{(r)}(e_i)` for `r ≥ 1`.
    coproducts: Vec<Vec<SparseVec>>,
    euler: SparseVec,
}

impl TensorCalculus {
    pub fn new(base: FrobeniusAlgebra, max_factors: usize) -> Result<Self, SympowError> {
        let d = base.dim();
        let mut coproducts = vec![Vec::new(), (0..d).map(SparseVec::basis).collect::<Vec<_>>()];
        for r in 2..=max_factors.max(1) {
            let prev = &coproducts[r - 1];
            let mut level = Vec::with_capacity(d);
            for v in prev {
                let mut acc = Accumulator::new();
                for (idx, c) in v.iter() {
                    let (prefix, last) = (idx / d, idx % d);
                    for (pair, x) in base.coproduct_basis(last)?.iter() {
                        acc.add(prefix * d * d + pair, &(c * x));
                    }
                }
                level.push(acc.finish());
            }
            coproducts.push(level);
        }
        let euler = base.euler_class()?;
        Ok(TensorCalculus { base, coproducts, euler })
    }

    pub fn base(&self) -> &FrobeniusAlgebra {
        &self.base
    }

    pub fn euler(&self) -> &SparseVec {
        &self.euler
    }

    fn dims(&self, m: usize) -> Vec<usize> {
        vec![self.base.dim(); m]
    }

    /// `1^{⊗m}`.
    pub fn unit_power(&self, m: usize) -> SparseVec {
        outer_product(&vec![self.base.unit(); m], &self.dims(m))
    }

    /// Factorwise product in `A^{⊗m}`.
    pub fn tensor_mul(&self, m: usize, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let d = self.base.dim();
        let mut acc = Accumulator::new();
        for (u, a) in x.iter() {
            let du = multi_index(u, d, m);
            for (v, b) in y.iter() {
                let dv = multi_index(v, d, m);
                let factors: Vec<&SparseVec> = (0..m).map(|k| self.base.product_basis(du[k], dv[k])).collect();
                acc.add_vec(&outer_product(&factors, &self.dims(m)), &(a * b));
            }
        }
        acc.finish()
    }

    /// Restriction of a basis tensor from `fine` to `coarse`.
    pub fn restrict_basis(&self, fine: &OrbitPartition, coarse: &OrbitPartition, idx: usize) -> SparseVec {
        let d = self.base.dim();
        let digits = multi_index(idx, d, fine.len());
        let factors: Vec<SparseVec> = fine
            .sub_blocks(coarse)
            .iter()
            .map(|bs| {
                bs.iter()
                    .fold(self.base.unit().clone(), |acc, &b| self.base.multiply(&acc, &SparseVec::basis(digits[b])))
            })
            .collect();
        let refs: Vec<&SparseVec> = factors.iter().collect();
        outer_product(&refs, &self.dims(coarse.len()))
    }

    pub fn restrict(&self, fine: &OrbitPartition, coarse: &OrbitPartition, x: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (i, c) in x.iter() {
            acc.add_vec(&self.restrict_basis(fine, coarse, i), c);
        }
        acc.finish()
    }

    /// Pushforward of a basis tensor from `coarse` to the finer `fine`.
    pub fn pushforward_basis(&self, coarse: &OrbitPartition, fine: &OrbitPartition, idx: usize) -> SparseVec {
        let d = self.base.dim();
        let digits = multi_index(idx, d, coarse.len());
        let subs = fine.sub_blocks(coarse);
        let mut terms: Vec<(Vec<usize>, Scalar)> = vec![(vec![0; fine.len()], Scalar::one())];
        for (q, bs) in subs.iter().enumerate() {
            let r = bs.len();
            let image = &self.coproducts[r][digits[q]];
            let mut next = Vec::with_capacity(terms.len() * image.nnz());
            for (fd, c) in &terms {
                for (m, x) in image.iter() {
                    let md = multi_index(m, d, r);
                    let mut nd = fd.clone();
                    for (k, &b) in bs.iter().enumerate() {
                        nd[b] = md[k];
                    }
                    next.push((nd, c * x));
                }
            }
            terms = next;
        }
        SparseVec::from_pairs(terms.into_iter().map(|(fd, c)| (crate::frobenius::flat_index(&fd, d), c)).collect())
    }

    pub fn pushforward(&self, coarse: &OrbitPartition, fine: &OrbitPartition, z: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (i, c) in z.iter() {
            acc.add_vec(&self.pushforward_basis(coarse, fine, i), c);
        }
        acc.finish()
    }

    /// Places factor `k` of `y` on the minimum of block `k` of `p` and the
    /// unit elsewhere.
    pub fn section(&self, p: &OrbitPartition, y: &SparseVec) -> SparseVec {
        let d = self.base.dim();
        let n = p.n();
        let mut acc = Accumulator::new();
        for (idx, c) in y.iter() {
            let digits = multi_index(idx, d, p.len());
            let mut factors: Vec<SparseVec> = vec![self.base.unit().clone(); n];
            for (k, &dig) in digits.iter().enumerate() {
                factors[p.block(k)[0]] = SparseVec::basis(dig);
            }
            let refs: Vec<&SparseVec> = factors.iter().collect();
            acc.add_vec(&outer_product(&refs, &self.dims(n)), c);
        }
        acc.finish()
    }

    /// `⊗_B e^{k_B}` over the blocks of a partition.
    pub fn euler_powers(&self, exponents: &[u64]) -> SparseVec {
        let powers: Vec<SparseVec> = exponents.iter().map(|&k| self.base.power(&self.euler, k)).collect();
        let refs: Vec<&SparseVec> = powers.iter().collect();
        outer_product(&refs, &self.dims(exponents.len()))
    }

    /// `Δ(1)` placed on positions `i < j` of `A^{⊗n}`.
    pub fn diagonal_insertion(&self, n: usize, i: usize, j: usize) -> Result<SparseVec, SympowError> {
        let d = self.base.dim();
        let delta = self.base.comultiply(self.base.unit())?;
        let mut acc = Accumulator::new();
        for (pair, c) in delta.iter() {
            let mut factors: Vec<SparseVec> = vec![self.base.unit().clone(); n];
            factors[i] = SparseVec::basis(pair / d);
            factors[j] = SparseVec::basis(pair % d);
            let refs: Vec<&SparseVec> = factors.iter().collect();
            acc.add_vec(&outer_product(&refs, &self.dims(n)), c);
        }
        Ok(acc.finish())
    }
}

/// The second-quantized S_n-twisted Frobenius algebra of a base algebra.
#[derive(Debug)]
pub struct SymmetricPowerAlgebra {
    calc: TensorCalculus,
    n: usize,
    p: u8,
    torsion: Option<TwoCocycle>,
    group: Group,
    sectors: Vec<SectorIndex>,
    untwisted: GFrobeniusAlgebra,
    algebra: GFrobeniusAlgebra,
}

fn sector_labels(base: &FrobeniusAlgebra, m: usize) -> Vec<String> {
    let d = base.dim();
    (0..d.pow(m as u32))
        .map(|idx| {
            if m == 0 {
                "1".to_string()
            } else {
                multi_index(idx, d, m).iter().map(|&i| base.labels()[i].as_str()).collect::<Vec<_>>().join("⊗")
            }
        })
        .collect()
}

fn kron_power(m: &Matrix, k: usize) -> Matrix {
    let mut out = Matrix::identity(1);
    for _ in 0..k {
        let mut next = Matrix::zeros(out.rows() * m.rows(), out.cols() * m.cols());
        for i in 0..out.rows() {
            for j in 0..out.cols() {
                let a = out.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for u in 0..m.rows() {
                    for v in 0..m.cols() {
                        next.set(i * m.rows() + u, j * m.cols() + v, a * m.get(u, v));
                    }
                }
            }
        }
        out = next;
    }
    out
}

impl SymmetricPowerAlgebra {
    /// Assembles all sector products, the action, character and metric.
    pub fn build(base: &FrobeniusAlgebra, n: usize, p: u8, torsion: Option<TwoCocycle>) -> Result<Self, SympowError> {
        check_eligible(base)?;
        if p > 1 {
            return Err(SympowError::BaseNotEligible(format!("parity must be 0 or 1, got {p}")));
        }
        let calc = TensorCalculus::new(base.clone(), n)?;
        let group: Group = Arc::new(FiniteGroupTable::symmetric(n));
        let k = group.order();
        let d = base.dim();
        let top = base.top_degree().expect("eligible").clone();
        let sectors: Vec<SectorIndex> = (0..k)
            .map(|g| {
                let sigma = group.perm(g).unwrap().clone();
                let orbits = sigma.orbits();
                SectorIndex { sigma, orbits }
            })
            .collect();
        let sector_data: Vec<Sector> = sectors
            .iter()
            .map(|s| {
                let l = s.orbits.len();
                let len = s.sigma.length();
                let degs = base.degrees().expect("eligible");
                let degrees = (0..d.pow(l as u32))
                    .map(|idx| multi_index(idx, d, l).iter().fold(Scalar::zero(), |acc, &i| acc + &degs[i]))
                    .collect();
                Sector {
                    labels: sector_labels(base, l),
                    parity: vec![(p as usize * len % 2) as u8; d.pow(l as u32)],
                    degrees: Some(degrees),
                    top_degree: Some(&top * &Scalar::from_int(l as i64)),
                    shift_plus: Some(&top * &Scalar::from_int(len as i64)),
                    shift_minus: Some(Scalar::zero()),
                }
            })
            .collect();

        let mult: Vec<Vec<SparseVec>> = (0..k * k)
            .into_par_iter()
            .map(|ij| {
                let (a, b) = (ij / k, ij % k);
                let (sa, sb) = (&sectors[a], &sectors[b]);
                let ab = group.mul(a, b);
                let joint = joint_orbits(n, &[&sa.sigma, &sb.sigma]).expect("same degree");
                let exps: Vec<u64> = joint
                    .blocks()
                    .iter()
                    .map(|bl| graph_defect(&sa.sigma, &sb.sigma, bl).expect("joint orbit"))
                    .collect();
                let euler = calc.euler_powers(&exps);
                let ra: Vec<SparseVec> =
                    (0..d.pow(sa.orbits.len() as u32)).map(|i| calc.restrict_basis(&sa.orbits, &joint, i)).collect();
                let rb: Vec<SparseVec> =
                    (0..d.pow(sb.orbits.len() as u32)).map(|j| calc.restrict_basis(&sb.orbits, &joint, j)).collect();
                let target = &sectors[ab].orbits;
                let mut push: Vec<Option<SparseVec>> = vec![None; d.pow(joint.len() as u32)];
                let mut block = Vec::with_capacity(ra.len() * rb.len());
                for x in &ra {
                    for y in &rb {
                        let z = calc.tensor_mul(joint.len(), &calc.tensor_mul(joint.len(), x, y), &euler);
                        let mut acc = Accumulator::new();
                        for (u, c) in z.iter() {
                            let v = push[u].get_or_insert_with(|| calc.pushforward_basis(&joint, target, u));
                            acc.add_vec(v, c);
                        }
                        block.push(acc.finish());
                    }
                }
                block
            })
            .collect();

        let action: Vec<Vec<SparseVec>> = (0..k * k)
            .into_par_iter()
            .map(|ij| {
                let (a, b) = (ij / k, ij % k);
                let sigma = &sectors[a].sigma;
                let src = &sectors[b].orbits;
                let dst = &sectors[group.conj(a, b)].orbits;
                let pi: Vec<usize> = src
                    .blocks()
                    .iter()
                    .map(|bl| {
                        let image: Vec<usize> = bl.iter().map(|&i| sigma.apply(i)).collect();
                        dst.find_block(&image).expect("σ maps orbits to orbits")
                    })
                    .collect();
                let sign = Scalar::sign_pow(p as usize * sigma.length() * sectors[b].sigma.length());
                let l = src.len();
                (0..d.pow(l as u32))
                    .map(|idx| {
                        let digits = multi_index(idx, d, l);
                        let mut out = vec![0; l];
                        for (kk, &dig) in digits.iter().enumerate() {
                            out[pi[kk]] = dig;
                        }
                        SparseVec::single(crate::frobenius::flat_index(&out, d), sign.clone())
                    })
                    .collect()
            })
            .collect();

        let base_metric = base.metric().matrix().clone();
        let metric = sectors.iter().map(|s| kron_power(&base_metric, s.orbits.len())).collect();
        let character = sectors.iter().map(|s| Scalar::sign_pow(p as usize * s.sigma.length())).collect();
        let untwisted = GFrobeniusAlgebra::from_parts(GFrobParts {
            name: format!("Sym^{n}({}) p={p}", base.name()),
            group: group.clone(),
            sectors: sector_data,
            unit: calc.unit_power(n),
            mult,
            action,
            character,
            metric,
        })?;
        let algebra = match &torsion {
            Some(alpha) => twist_by_torsion(&untwisted, alpha)?,
            None => untwisted.clone(),
        };
        Ok(SymmetricPowerAlgebra { calc, n, p, torsion, group, sectors, untwisted, algebra })
    }

    /// The same construction with a torsion twist installed in place of any
    /// previous one.
    pub fn with_torsion(&self, alpha: Option<TwoCocycle>) -> Result<Self, SympowError> {
        let algebra = match &alpha {
            Some(a) => twist_by_torsion(&self.untwisted, a)?,
            None => self.untwisted.clone(),
        };
        Ok(SymmetricPowerAlgebra {
            calc: TensorCalculus::new(self.calc.base.clone(), self.n)?,
            n: self.n,
            p: self.p,
            torsion: alpha,
            group: self.group.clone(),
            sectors: self.sectors.clone(),
            untwisted: self.untwisted.clone(),
            algebra,
        })
    }

    pub fn base(&self) -> &FrobeniusAlgebra {
        &self.calc.base
    }

    pub fn calculus(&self) -> &TensorCalculus {
        &self.calc
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parity(&self) -> u8 {
        self.p
    }

    pub fn torsion(&self) -> Option<&TwoCocycle> {
        self.torsion.as_ref()
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn sector_index(&self, g: usize) -> &SectorIndex {
        &self.sectors[g]
    }

    /// The assembled structure, including any torsion twist.
    pub fn algebra(&self) -> &GFrobeniusAlgebra {
        &self.algebra
    }

    pub fn untwisted(&self) -> &GFrobeniusAlgebra {
        &self.untwisted
    }

    pub fn element(&self, text: &str) -> Option<usize> {
        self.group.parse_element(text)
    }

    /// The generators `1_σ = 1^{⊗l(σ)}`.
    pub fn generators(&self) -> Vec<SparseVec> {
        self.sectors.iter().map(|s| self.calc.unit_power(s.orbits.len())).collect()
    }

    /// `r_σ: A^{⊗n} → A_σ`.
    pub fn restriction(&self, g: usize, x: &SparseVec) -> SparseVec {
        self.calc.restrict(&OrbitPartition::finest(self.n), &self.sectors[g].orbits, x)
    }

    /// `j_σ: A_σ → A^{⊗n}`.
    pub fn section(&self, g: usize, y: &SparseVec) -> SparseVec {
        self.calc.section(&self.sectors[g].orbits, y)
    }

    /// Pushforward from the joint orbits of `⟨σ,σ′⟩` to the orbits of `σσ′`.
    pub fn pushforward(&self, a: usize, b: usize, z: &SparseVec) -> SparseVec {
        let joint = self.joint(a, b);
        self.calc.pushforward(&joint, &self.sectors[self.group.mul(a, b)].orbits, z)
    }

    pub fn joint(&self, a: usize, b: usize) -> OrbitPartition {
        joint_orbits(self.n, &[&self.sectors[a].sigma, &self.sectors[b].sigma]).expect("same degree")
    }

    pub fn multiply(&self, a: usize, x: &SparseVec, b: usize, y: &SparseVec) -> SparseVec {
        self.algebra.multiply(a, x, b, y)
    }

    pub fn act(&self, a: usize, b: usize, y: &SparseVec) -> SparseVec {
        self.algebra.act(a, b, y)
    }

    /// The full axiom suite, in super mode iff `p = 1`.
    pub fn verify(&self) -> Report {
        verify_axioms(&self.algebra, self.p == 1)
    }

    /// Installs the class with `α(τ,τ) = −1` on transpositions.
    pub fn k3_sign_twist(&self) -> Result<Self, SympowError> {
        self.with_torsion(Some(sign_torsion_sn(self.n)?))
    }

    fn len(&self, g: usize) -> usize {
        self.sectors[g].sigma.length()
    }

    /// Trace values on commuting pairs, the derived `ε`, `T`, and the
    /// discrete-torsion laws.
    pub fn trace_report(&self) -> TraceReport {
        let g = &self.group;
        let k = g.order();
        let a = &self.algebra;
        let p = self.p as usize;
        let d = self.base().dim() as i64;
        let mut rows = Vec::new();
        let mut witness = None;
        let mut factor_witness = None;
        for x in 0..k {
            for y in 0..k {
                if !g.commute(x, y) {
                    continue;
                }
                let mut str_ = Scalar::zero();
                for j in 0..a.dim(y) {
                    let s = Scalar::sign_pow(a.sector(y).parity[j] as usize);
                    str_ += &(&a.action_basis(x, y, j).get(j) * &s);
                }
                let lhs = a.character(x) * &str_;
                let joint = self.joint(x, y);
                let dim_joint = Scalar::from_int(d.pow(joint.len() as u32));
                let (lx, ly) = (self.len(x), self.len(y));
                let mut rhs = &Scalar::sign_pow(p * (lx * ly + lx + ly)) * &dim_joint;
                if let Some(alpha) = &self.torsion {
                    rhs = &rhs * &alpha.epsilon(x, y);
                }
                if lhs != rhs && witness.is_none() {
                    witness = Some(format!("σ = {}, σ′ = {}: {lhs} ≠ {rhs}", g.label(x), g.label(y)));
                }
                let mut factored = &self.algebraic_epsilon(x, y) * &self.t_value(x, y);
                if let Some(alpha) = &self.torsion {
                    factored = &factored * &alpha.epsilon(x, y);
                }
                if lhs != factored && factor_witness.is_none() {
                    factor_witness = Some(format!("σ = {}, σ′ = {}: {lhs} ≠ ε·T = {factored}", g.label(x), g.label(y)));
                }
                rows.push(TraceRow {
                    sigma: g.label(x).to_string(),
                    sigma_prime: g.label(y).to_string(),
                    lhs,
                    rhs,
                    epsilon: self.algebraic_epsilon(x, y),
                    t: self.t_value(x, y),
                });
            }
        }
        let mut report = Report::new(format!("trace values for {}", a.name()));
        report.push(Check::new("trace value", rows.len() as u64, witness));
        report.push(Check::new("trace = ε·T", rows.len() as u64, factor_witness));
        report.extend(self.torsion_laws());
        TraceReport { rows, report }
    }

    /// `ε(σ,σ′) = (−1)^{p(|σ||σ′| + |σ| + |σ,σ′| − |σ′|)}` on commuting pairs.
    pub fn algebraic_epsilon(&self, x: usize, y: usize) -> Scalar {
        let codim = self.joint(x, y).codim();
        let (lx, ly) = (self.len(x), self.len(y));
        Scalar::sign_pow(self.p as usize * (lx * ly + lx + codim - ly))
    }

    /// `T(σ,σ′) = (−1)^{p·ν}·dim A_{σ,σ′}` with `ν = codim V_{σ,σ′} = |σ,σ′|`.
    pub fn t_value(&self, x: usize, y: usize) -> Scalar {
        let joint = self.joint(x, y);
        let dim = Scalar::from_int((self.base().dim() as i64).pow(joint.len() as u32));
        &Scalar::sign_pow(self.p as usize * joint.codim()) * &dim
    }

    fn torsion_laws(&self) -> Report {
        let g = &self.group;
        let k = g.order();
        let eps = |x: usize, y: usize| self.algebraic_epsilon(x, y);
        let mut r = Report::new("discrete torsion laws");
        let (mut c1, mut w1) = (0, None);
        let (mut c2, mut w2) = (0, None);
        let (mut c3, mut w3) = (0, None);
        let (mut c4, mut w4) = (0, None);
        for h in 0..k {
            c2 += 1;
            if !eps(h, h).is_one() && w2.is_none() {
                w2 = Some(format!("ε({0}, {0}) ≠ 1", g.label(h)));
            }
            for x in 0..k {
                if !g.commute(x, h) {
                    continue;
                }
                c1 += 1;
                if eps(x, h) != eps(g.inv(h), x) && w1.is_none() {
                    w1 = Some(format!("ε(g,h) ≠ ε(h⁻¹,g) at ({}, {})", g.label(x), g.label(h)));
                }
                c4 += 1;
                let t = self.t_value(h, x);
                let sym = [self.t_value(x, h), self.t_value(g.mul(x, h), h), self.t_value(g.inv(x), h)];
                if sym.iter().any(|v| *v != t) && w4.is_none() {
                    w4 = Some(format!("T not symmetric at ({}, {})", g.label(x), g.label(h)));
                }
                for y in 0..k {
                    if !g.commute(y, h) {
                        continue;
                    }
                    c3 += 1;
                    if eps(g.mul(x, y), h) != &eps(x, h) * &eps(y, h) && w3.is_none() {
                        w3 = Some(format!("ε(g₁g₂,h) ≠ ε(g₁,h)ε(g₂,h) at ({}, {}, {})", g.label(x), g.label(y), g.label(h)));
                    }
                }
            }
        }
        r.push(Check::new("ε(g,h) = ε(h⁻¹,g)", c1, w1));
        r.push(Check::new("ε(g,g) = 1", c2, w2));
        r.push(Check::new("ε multiplicative", c3, w3));
        r.push(Check::new("T(g,h) = T(h,g) = T(gh,h) = T(g⁻¹,h)", c4, w4));
        r
    }

    /// Recomputes every product of generators by accumulating `Δ(1)`
    /// insertions along a minimal factorization of `σ′`, and compares with
    /// the Euler-class route; also checks the factorization of all sector
    /// products through sections and the Euler exponents per joint orbit.
    pub fn ls_compare(&self) -> Result<Report, SympowError> {
        let g = &self.group;
        let k = g.order();
        let n = self.n;
        let a = &self.untwisted;
        let gens = self.generators();
        let finest = OrbitPartition::finest(n);
        let calc = &self.calc;
        let d = self.base().degrees().expect("graded");
        let top = self.base().top_degree().expect("graded").clone();
        type Row = (u64, [Option<String>; 5]);
        let rows: Vec<Row> = (0..k * k)
            .into_par_iter()
            .map(|ij| -> Row {
                let (x, y) = (ij / k, ij % k);
                let mut w: [Option<String>; 5] = Default::default();
                let xy = g.mul(x, y);
                let target = &self.sectors[xy].orbits;
                let label = format!("({}, {})", g.label(x), g.label(y));
                let mut gamma = calc.unit_power(n);
                let mut edges = Vec::new();
                let mut rho = x;
                for t in minimal_factorization(&self.sectors[y].sigma) {
                    let ti = g.index_of(&t).unwrap();
                    let next = g.mul(rho, ti);
                    if self.len(next) + 1 == self.len(rho) {
                        let pts: Vec<usize> = (0..n).filter(|&i| t.apply(i) != i).collect();
                        let ins = calc.diagonal_insertion(n, pts[0], pts[1]).expect("Frobenius base");
                        gamma = calc.tensor_mul(n, &gamma, &ins);
                        edges.push((target.block_of(pts[0]), target.block_of(pts[1])));
                    }
                    rho = next;
                }
                let route2 = calc.restrict(&finest, target, &gamma);
                let route1 = a.multiply(x, &gens[x], y, &gens[y]);
                if route1 != route2 {
                    w[0] = Some(format!("{label}: Euler route {route1:?}, transposition route {route2:?}"));
                }
                let joint = self.joint(x, y);
                let mut count = 0u64;
                'full: for i in 0..a.dim(x) {
                    let ji = self.section(x, &SparseVec::basis(i));
                    for j in 0..a.dim(y) {
                        count += 1;
                        let jj = self.section(y, &SparseVec::basis(j));
                        let via = calc.restrict(&finest, target, &calc.tensor_mul(n, &calc.tensor_mul(n, &ji, &jj), &gamma));
                        if via != *a.mult_basis(x, y, i, j) {
                            w[1] = Some(format!("{label}: e{i}·e{j} ≠ r(j(e{i})j(e{j})γ)"));
                            break 'full;
                        }
                    }
                }
                let mut root: Vec<usize> = (0..target.len()).collect();
                fn find(root: &mut [usize], i: usize) -> usize {
                    let mut i = i;
                    while root[i] != i {
                        root[i] = root[root[i]];
                        i = root[i];
                    }
                    i
                }
                for &(u, v) in &edges {
                    let (ru, rv) = (find(&mut root, u), find(&mut root, v));
                    root[ru] = rv;
                }
                for bl in joint.blocks() {
                    let gd = graph_defect(&self.sectors[x].sigma, &self.sectors[y].sigma, bl).expect("joint orbit");
                    let verts: Vec<usize> =
                        (0..target.len()).filter(|&q| bl.contains(&target.block(q)[0])).collect();
                    let e = edges.iter().filter(|(u, _)| verts.contains(u)).count() as u64;
                    if e != gd + verts.len() as u64 - 1 && w[2].is_none() {
                        w[2] = Some(format!(
                            "{label}: block {:?} has {e} insertions, defect {gd}, {} orbits",
                            one_based(bl),
                            verts.len()
                        ));
                    }
                    let r0 = find(&mut root, verts[0]);
                    if verts.iter().any(|&q| find(&mut root, q) != r0) && w[3].is_none() {
                        w[3] = Some(format!("{label}: insertion graph on block {:?} is disconnected", one_based(bl)));
                    }
                }
                let twice = self.len(x) + self.len(y) - self.len(xy);
                let want = &(&top * &Scalar::from_int(twice as i64)) * &Scalar::frac(1, 2);
                let ok = route2.iter().all(|(u, _)| {
                    multi_index(u, self.base().dim(), target.len()).iter().fold(Scalar::zero(), |acc, &i| acc + &d[i]) == want
                });
                if !ok {
                    w[4] = Some(format!("{label}: γ is not homogeneous of degree {want}"));
                }
                (count, w)
            })
            .collect();
        let names = [
            "two routes agree",
            "product factors through sections",
            "insertions per joint orbit = g + orbits − 1",
            "insertion graph connected on each joint orbit",
            "deg γ = d(|σ|+|σ′|−|σσ′|)/2",
        ];
        let mut r = Report::new(format!("two-route comparison for {}", a.name()));
        for (c, name) in names.iter().enumerate() {
            let instances = if c == 1 { rows.iter().map(|(n, _)| *n).sum() } else { (k * k) as u64 };
            let w = rows.iter().find_map(|(_, w)| w[c].clone());
            r.push(Check::new(*name, instances, w));
        }
        let mut count = 0;
        let mut w = None;
        for x in 0..k {
            for y in 0..k {
                if self.len(g.mul(x, y)) == self.len(x) + self.len(y) {
                    count += 1;
                    if a.multiply(x, &gens[x], y, &gens[y]) != gens[g.mul(x, y)] && w.is_none() {
                        w = Some(format!("γ_({}, {}) ≠ 1", g.label(x), g.label(y)));
                    }
                }
            }
        }
        r.push(Check::new("γ = 1 on transversal pairs", count, w));
        Ok(r)
    }

    /// `(1_σ1_σ′)1_σ″` against the pushforward from the joint orbits of all
    /// three of `⊗_B e^{g̃_B}` with
    /// `2g̃_B = |σ|_B + |σ′|_B + |σ″|_B + |σσ′σ″|_B − 2|σ,σ′,σ″|_B`.
    pub fn triple_check(&self) -> Report {
        let g = &self.group;
        let k = g.order();
        let n = self.n;
        let a = &self.untwisted;
        let gens = self.generators();
        let rows: Vec<(u64, Option<String>, Option<String>)> = (0..k)
            .into_par_iter()
            .map(|x| {
                let mut w_int = None;
                let mut w_eq = None;
                let mut count = 0;
                for y in 0..k {
                    let xy = a.multiply(x, &gens[x], y, &gens[y]);
                    let gxy = g.mul(x, y);
                    for z in 0..k {
                        count += 1;
                        let (sx, sy, sz) = (&self.sectors[x].sigma, &self.sectors[y].sigma, &self.sectors[z].sigma);
                        let xyz = g.mul(gxy, z);
                        let prod = &self.sectors[xyz].sigma;
                        let joint = joint_orbits(n, &[sx, sy, sz]).unwrap();
                        let mut exps = Vec::new();
                        for bl in joint.blocks() {
                            let codim = |p: &Permutation| (bl.len() - p.orbits().count_in(bl)) as i64;
                            let twice = codim(sx) + codim(sy) + codim(sz) + codim(prod) - 2 * (bl.len() as i64 - 1);
                            if (twice < 0 || twice % 2 != 0) && w_int.is_none() {
                                w_int = Some(format!(
                                    "({}, {}, {}) block {:?}: 2g̃ = {twice}",
                                    g.label(x),
                                    g.label(y),
                                    g.label(z),
                                    one_based(bl)
                                ));
                            }
                            exps.push((twice.max(0) / 2) as u64);
                        }
                        let lhs = a.multiply(gxy, &xy, z, &gens[z]);
                        let rhs = self.calc.pushforward(&joint, &self.sectors[xyz].orbits, &self.calc.euler_powers(&exps));
                        if lhs != rhs && w_eq.is_none() {
                            w_eq = Some(format!("({}, {}, {}): {lhs:?} vs {rhs:?}", g.label(x), g.label(y), g.label(z)));
                        }
                    }
                }
                (count, w_int, w_eq)
            })
            .collect();
        let count = rows.iter().map(|r| r.0).sum();
        let mut r = Report::new(format!("triple intersections for {}", a.name()));
        r.push(Check::new("triple defect is a nonnegative integer", count, rows.iter().find_map(|r| r.1.clone())));
        r.push(Check::new("triple product = pushforward of Euler powers", count, rows.iter().find_map(|r| r.2.clone())));
        r
    }

    /// Rows `(σ, σ′, B, g)` for every pair and joint orbit, 1-based.
    pub fn defect_table_csv(n: usize) -> String {
        defect_table_csv(n)
    }
}

fn one_based(b: &[usize]) -> Vec<usize> {
    b.iter().map(|i| i + 1).collect()
}

/// Graph defects of all pairs in S_n as CSV.
pub fn defect_table_csv(n: usize) -> String {
    let perms = crate::symgroup::all_permutations(n);
    let mut out = String::from("sigma,sigma_prime,block,defect\n");
    for a in &perms {
        for b in &perms {
            let joint = joint_orbits(n, &[a, b]).expect("same degree");
            for bl in joint.blocks() {
                let block = one_based(bl).iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
                let gd = graph_defect(a, b, bl).expect("joint orbit");
                let _ = writeln!(out, "\"{a}\",\"{b}\",\"{block}\",{gd}");
            }
        }
    }
    out
}

/// One commuting pair in a trace report.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub sigma: String,
    pub sigma_prime: String,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub epsilon: Scalar,
    pub t: Scalar,
}

#[derive(Debug, Clone)]
pub struct TraceReport {
    pub rows: Vec<TraceRow>,
    pub report: Report,
}

impl TraceReport {
    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "sigma": r.sigma,
                    "sigma_prime": r.sigma_prime,
                    "lhs": r.lhs.to_string(),
                    "rhs": r.rhs.to_string(),
                    "epsilon": r.epsilon.to_string(),
                    "T": r.t.to_string(),
                })
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({ "rows": rows, "report": self.report })).expect("serializes")
    }
}

/// Coefficients of `∏_{m≥1} (1−q^m)^{−D}` up to `q^{max}`.
pub fn product_formula(d: usize, max: usize) -> Vec<u128> {
    let mut series = vec![0u128; max + 1];
    series[0] = 1;
    for m in 1..=max {
        // multiply by (1 − q^m)^{−D} = Σ_k C(D+k−1, k) q^{mk}
        let mut next = vec![0u128; max + 1];
        for (i, &c) in series.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut k = 0;
            let mut binom: u128 = 1;
            while i + m * k <= max {
                next[i + m * k] += c * binom;
                k += 1;
                binom = binom * (d as u128 + k as u128 - 1) / k as u128;
            }
        }
        series = next;
    }
    series
}

/// One level of the second-quantization series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesLevel {
    pub n: usize,
    pub total_dim: usize,
    pub invariant_dim: usize,
    /// Invariant dimension per shifted degree.
    pub poincare: Vec<(Scalar, usize)>,
}

#[derive(Debug, Clone)]
pub struct SeriesReport {
    pub base: String,
    pub parity: u8,
    pub levels: Vec<SeriesLevel>,
    /// Product-formula coefficients, present for `p = 0`.
    pub expected: Option<Vec<u128>>,
}

impl SeriesReport {
    pub fn coefficients(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.invariant_dim).collect()
    }

    pub fn matches(&self) -> Option<bool> {
        self.expected
            .as_ref()
            .map(|e| e.iter().zip(self.coefficients()).all(|(a, b)| *a == b as u128))
    }

    pub fn to_json(&self) -> String {
        let levels: Vec<serde_json::Value> = self
            .levels
            .iter()
            .map(|l| {
                serde_json::json!({
                    "n": l.n,
                    "total_dim": l.total_dim,
                    "invariant_dim": l.invariant_dim,
                    "poincare": l.poincare.iter().map(|(d, c)| serde_json::json!([d.to_string(), c])).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "base": self.base,
            "parity": self.parity,
            "coefficients": self.coefficients(),
            "product_formula": self.expected.as_ref().map(|e| e.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
            "verdict": match self.matches() { Some(true) => "MATCH", Some(false) => "MISMATCH", None => "n/a" },
            "levels": levels,
        }))
        .expect("serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("second quantization of {} (p = {})\n", self.base, self.parity);
        for l in &self.levels {
            let poly: Vec<String> = l.poincare.iter().map(|(d, c)| format!("{c}·t^{d}")).collect();
            let _ = writeln!(
                out,
                "  n = {}: total dim {}, invariants {} [{}]",
                l.n,
                l.total_dim,
                l.invariant_dim,
                poly.join(" + ")
            );
        }
        let _ = writeln!(out, "  coefficients: {:?}", self.coefficients());
        if let Some(e) = &self.expected {
            let verdict = if self.matches() == Some(true) { "MATCH" } else { "MISMATCH" };
            let _ = writeln!(out, "  product formula: {e:?} => {verdict}");
        }
        out
    }
}

/// Builds levels `0..=max_n` and records invariant dimensions.
pub fn second_quantization(
    base: &FrobeniusAlgebra,
    max_n: usize,
    p: u8,
    cap: Option<u128>,
) -> Result<SeriesReport, SympowError> {
    check_eligible(base)?;
    if let Some(cap) = cap {
        let size = total_dimension(base.dim(), max_n);
        if size > cap {
            return Err(SympowError::FeasibilityRefused { size, cap });
        }
    }
    let mut levels = Vec::new();
    for n in 0..=max_n {
        let s = SymmetricPowerAlgebra::build(base, n, p, None)?;
        let (basis, degrees, _) = invariant_subspace(s.algebra());
        let mut poincare: Vec<(Scalar, usize)> = Vec::new();
        let mut degs: Vec<Scalar> = degrees.into_iter().flatten().collect();
        degs.sort();
        for d in degs {
            match poincare.last_mut() {
                Some((e, c)) if *e == d => *c += 1,
                _ => poincare.push((d, 1)),
            }
        }
        levels.push(SeriesLevel { n, total_dim: s.algebra().total_dim(), invariant_dim: basis.len(), poincare });
    }
    Ok(SeriesReport {
        base: base.name().to_string(),
        parity: p,
        levels,
        expected: (p == 0).then(|| product_formula(base.dim(), max_n)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Scalar;

    fn a2() -> FrobeniusAlgebra {
        FrobeniusAlgebra::truncated(2)
    }

    #[test]
    fn transposition_square_is_diagonal() {
        let s = SymmetricPowerAlgebra::build(&a2(), 2, 0, None).unwrap();
        let t = s.element("(1 2)").unwrap();
        let one = SparseVec::basis(0);
        // A⊗A basis: 1⊗1, 1⊗z, z⊗1, z⊗z
        let expected = SparseVec::from_pairs(vec![(1, Scalar::one()), (2, Scalar::one())]);
        assert_eq!(s.multiply(t, &one, t, &one), expected);
        let z = SparseVec::basis(1);
        assert!(s.multiply(t, &z, t, &z).is_zero());
        assert_eq!(s.multiply(t, &one, t, &z), SparseVec::basis(3));
        assert_eq!(s.algebra().total_dim(), 6);
    }

    #[test]
    fn three_cycle_square_carries_euler_class() {
        let s = SymmetricPowerAlgebra::build(&a2(), 3, 0, None).unwrap();
        let c = s.element("(1 2 3)").unwrap();
        let c2 = s.element("(1 3 2)").unwrap();
        let one = SparseVec::basis(0);
        let prod = s.multiply(c, &one, c, &one);
        // e = 2z for k[z]/(z²)
        assert_eq!(prod, SparseVec::single(1, Scalar::from_int(2)));
        assert_eq!(s.group().mul(c, c), c2);
    }

    #[test]
    fn restriction_and_section() {
        let a = FrobeniusAlgebra::truncated(3);
        let s = SymmetricPowerAlgebra::build(&a, 4, 0, None).unwrap();
        let g = s.element("(1 3)(2 4)").unwrap();
        // section of z⊗z² lands at positions 1 and 2
        let y = SparseVec::basis(3 + 2);
        let x = s.section(g, &y);
        let want = outer_product(
            &[&SparseVec::basis(1), &SparseVec::basis(2), &SparseVec::basis(0), &SparseVec::basis(0)],
            &[3, 3, 3, 3],
        );
        assert_eq!(x, want);
        assert_eq!(s.restriction(g, &x), y);
    }

    #[test]
    fn small_structures_pass() {
        for p in 0..2 {
            let s = SymmetricPowerAlgebra::build(&a2(), 2, p, None).unwrap();
            let r = s.verify();
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn product_formula_values() {
        assert_eq!(product_formula(1, 5), vec![1, 1, 2, 3, 5, 7]);
        assert_eq!(product_formula(2, 4), vec![1, 2, 5, 10, 20]);
        assert_eq!(product_formula(3, 4), vec![1, 3, 9, 22, 51]);
    }

    #[test]
    fn rising_factorial() {
        assert_eq!(total_dimension(2, 4), 120);
        assert_eq!(total_dimension(3, 0), 1);
    }

    #[test]
    fn ineligible_base_rejected() {
        let mut parts = a2().parts();
        parts.parity = vec![0, 1];
        let odd = FrobeniusAlgebra::from_parts(parts).unwrap();
        assert!(matches!(SymmetricPowerAlgebra::build(&odd, 2, 0, None), Err(SympowError::BaseNotEligible(_))));
    }
}
