//! Permutations, orbit partitions and the codimension calculus on S_n.
//!
//! Points are stored 0-based and printed 1-based. The product `σ.compose(τ)`
//! applies `τ` first, then `σ`.

use std::fmt;

use itertools::Itertools;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("permutations act on different sets: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("block {0:?} is not a joint orbit")]
    NotAJointOrbit(Vec<usize>),
    #[error("invalid permutation: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// From 0-based images; rejects non-bijections.
    pub fn from_images(images: Vec<usize>) -> Result<Self, SymError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(SymError::Parse(format!("{images:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// From 1-based cycles, e.g. `&[&[1, 2], &[3, 4]]`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, SymError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a == 0 || a > n || seen[a - 1] {
                    return Err(SymError::Parse(format!("bad cycle {cycle:?} in S_{n}")));
                }
                seen[a - 1] = true;
                images[a - 1] = cycle[(k + 1) % cycle.len()] - 1;
            }
        }
        Ok(Permutation { images })
    }

    /// The transposition of the 0-based points `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Permutation { images }
    }

    /// Parses cycle notation `"(1 2)(3 4)"` or a 1-based image array `"[2,1,4,3]"`.
    pub fn parse(n: usize, text: &str) -> Result<Self, SymError> {
        let t = text.trim();
        if t.starts_with('[') {
            let inner = t
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| SymError::Parse(t.to_string()))?;
            let images: Vec<usize> = inner
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| SymError::Parse(t.to_string()))?;
            if images.len() != n {
                return Err(SymError::SizeMismatch(images.len(), n));
            }
            return Self::from_images(images);
        }
        if t.is_empty() || t == "e" || t == "id" || t == "()" {
            return Ok(Self::identity(n));
        }
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            let open = rest.strip_prefix('(').ok_or_else(|| SymError::Parse(t.to_string()))?;
            let close = open.find(')').ok_or_else(|| SymError::Parse(t.to_string()))?;
            let cycle: Vec<usize> = open[..close]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| SymError::Parse(t.to_string()))?;
            cycles.push(cycle);
            rest = open[close + 1..].trim_start();
        }
        let refs: Vec<&[usize]> = cycles.iter().map(|c| c.as_slice()).collect();
        Self::from_cycles(n, &refs)
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n(), other.n(), "size mismatch in composition");
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// `g ∘ self ∘ g⁻¹`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        g.compose(self).compose(&g.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// All cycles including fixed points, each starting at its minimum,
    /// ordered by minimum.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for start in 0..self.n() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut j = self.images[start];
            while j != start {
                seen[j] = true;
                cycle.push(j);
                j = self.images[j];
            }
            out.push(cycle);
        }
        out
    }

    pub fn orbits(&self) -> OrbitPartition {
        OrbitPartition::from_blocks(self.n(), self.cycles())
    }

    pub fn num_orbits(&self) -> usize {
        self.cycles().len()
    }

    /// The minimal number of transpositions, `n − l(σ)`.
    pub fn length(&self) -> usize {
        self.n() - self.num_orbits()
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.compose(other) == other.compose(self)
    }

    pub fn cycle_notation(&self) -> String {
        let parts: Vec<String> = self
            .cycles()
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| format!("({})", c.iter().map(|i| i + 1).join(" ")))
            .collect();
        if parts.is_empty() {
            "()".to_string()
        } else {
            parts.concat()
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_notation())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_notation())
    }
}

/// A partition of {0,…,n−1}: blocks sorted, ordered by minimum.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OrbitPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl OrbitPartition {
    pub fn from_blocks(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort_by_key(|b| b[0]);
        let mut block_of = vec![usize::MAX; n];
        for (k, b) in blocks.iter().enumerate() {
            for &i in b {
                assert_eq!(block_of[i], usize::MAX, "point {i} appears twice");
                block_of[i] = k;
            }
        }
        assert!(block_of.iter().all(|&k| k != usize::MAX), "blocks do not cover");
        OrbitPartition { n, blocks, block_of }
    }

    pub fn finest(n: usize) -> Self {
        Self::from_blocks(n, (0..n).map(|i| vec![i]).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &[usize] {
        &self.blocks[k]
    }

    /// Index of the block containing point `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }

    /// Index of the block equal to `b`, if any.
    pub fn find_block(&self, b: &[usize]) -> Option<usize> {
        let first = *b.first()?;
        if first >= self.n {
            return None;
        }
        let k = self.block_of[first];
        let mut sorted = b.to_vec();
        sorted.sort_unstable();
        (self.blocks[k] == sorted).then_some(k)
    }

    /// True if every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &OrbitPartition) -> bool {
        self.n == coarser.n
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&i| coarser.block_of(i) == coarser.block_of(b[0])))
    }

    /// For each block of `coarser`, the indices of the blocks of `self` inside
    /// it, in canonical order.
    pub fn sub_blocks(&self, coarser: &OrbitPartition) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); coarser.len()];
        for (k, b) in self.blocks.iter().enumerate() {
            out[coarser.block_of(b[0])].push(k);
        }
        out
    }

    /// Number of blocks of `self` meeting the point set `b`.
    pub fn count_in(&self, b: &[usize]) -> usize {
        b.iter().map(|&i| self.block_of[i]).unique().count()
    }

    /// `n − #blocks`.
    pub fn codim(&self) -> usize {
        self.n - self.blocks.len()
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().map(|i| i + 1).collect()).collect()
    }
}

impl fmt::Display for OrbitPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(|i| i + 1).join(" ")))
            .collect();
        write!(f, "{}", parts.join(""))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleData {
    pub cycles: OrbitPartition,
    /// Number of orbits.
    pub l: usize,
    /// `|σ| = n − l`.
    pub length: usize,
}

pub fn cycle_data(sigma: &Permutation) -> CycleData {
    let cycles = sigma.orbits();
    let l = cycles.len();
    CycleData { length: sigma.n() - l, cycles, l }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Orbits of the subgroup generated by `perms`.
pub fn joint_orbits(n: usize, perms: &[&Permutation]) -> Result<OrbitPartition, SymError> {
    let mut uf = UnionFind::new(n);
    for p in perms {
        if p.n() != n {
            return Err(SymError::SizeMismatch(p.n(), n));
        }
        for i in 0..n {
            uf.union(i, p.apply(i));
        }
    }
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = uf.find(i);
        blocks[r].push(i);
    }
    Ok(OrbitPartition::from_blocks(n, blocks))
}

/// `|σ₁,…,σ_m| = n − #joint orbits`.
pub fn joint_codim(n: usize, perms: &[&Permutation]) -> Result<usize, SymError> {
    Ok(joint_orbits(n, perms)?.codim())
}

/// `|σσ′| = |σ| + |σ′|`.
pub fn is_transversal(a: &Permutation, b: &Permutation) -> bool {
    a.compose(b).length() == a.length() + b.length()
}

/// `(a₁a₂)(a₂a₃)…(a_{k−1}a_k)` per cycle, cycles ordered by minimum.
pub fn minimal_factorization(sigma: &Permutation) -> Vec<Permutation> {
    let n = sigma.n();
    let mut out = Vec::with_capacity(sigma.length());
    for cycle in sigma.cycles() {
        for w in cycle.windows(2) {
            out.push(Permutation::transposition(n, w[0], w[1]));
        }
    }
    out
}

fn check_joint_orbit(a: &Permutation, b: &Permutation, block: &[usize]) -> Result<(), SymError> {
    if a.n() != b.n() {
        return Err(SymError::SizeMismatch(a.n(), b.n()));
    }
    let joint = joint_orbits(a.n(), &[a, b])?;
    match joint.find_block(block) {
        Some(_) => Ok(()),
        None => Err(SymError::NotAJointOrbit(block.iter().map(|i| i + 1).collect())),
    }
}

/// `2·g(σ,σ′;B)` in the codimension form
/// `|σ|_B + |σ′|_B + |σσ′|_B − 2|σ,σ′|_B`.
pub fn graph_defect_twice(a: &Permutation, b: &Permutation, block: &[usize]) -> Result<i64, SymError> {
    check_joint_orbit(a, b, block)?;
    let size = block.len() as i64;
    let codim_on = |p: &Permutation| size - p.orbits().count_in(block) as i64;
    let ab = a.compose(b);
    Ok(codim_on(a) + codim_on(b) + codim_on(&ab) - 2 * (size - 1))
}

/// `2·g(σ,σ′;B)` in the orbit-count form `|B| + 2 − o_σ − o_σ′ − o_σσ′`.
pub fn graph_defect_twice_orbit_form(
    a: &Permutation,
    b: &Permutation,
    block: &[usize],
) -> Result<i64, SymError> {
    check_joint_orbit(a, b, block)?;
    let count = |p: &Permutation| p.orbits().count_in(block) as i64;
    Ok(block.len() as i64 + 2 - count(a) - count(b) - count(&a.compose(b)))
}

/// The graph defect `g(σ,σ′;B)`.
pub fn graph_defect(a: &Permutation, b: &Permutation, block: &[usize]) -> Result<u64, SymError> {
    let twice = graph_defect_twice(a, b, block)?;
    assert!(twice >= 0 && twice % 2 == 0, "graph defect numerator {twice} for {a}, {b}");
    Ok((twice / 2) as u64)
}

/// Generators of the centralizer of `σ`: every nontrivial cycle of `σ`, and
/// for consecutive cycles of equal length the blockwise swap.
pub fn centralizer_generators(sigma: &Permutation) -> Vec<Permutation> {
    let n = sigma.n();
    let cycles = sigma.cycles();
    let mut out = Vec::new();
    for c in cycles.iter().filter(|c| c.len() > 1) {
        let mut images: Vec<usize> = (0..n).collect();
        for (k, &a) in c.iter().enumerate() {
            images[a] = c[(k + 1) % c.len()];
        }
        out.push(Permutation { images });
    }
    let mut lengths: Vec<usize> = cycles.iter().map(|c| c.len()).collect();
    lengths.sort_unstable();
    lengths.dedup();
    for k in lengths {
        let same: Vec<&Vec<usize>> = cycles.iter().filter(|c| c.len() == k).collect();
        for w in same.windows(2) {
            let mut images: Vec<usize> = (0..n).collect();
            for (&a, &b) in w[0].iter().zip(w[1].iter()) {
                images[a] = b;
                images[b] = a;
            }
            out.push(Permutation { images });
        }
    }
    out
}

/// All of S_n, in lexicographic order of image arrays (identity first).
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    if n == 0 {
        return vec![Permutation::identity(0)];
    }
    (0..n)
        .permutations(n)
        .map(|images| Permutation { images })
        .collect()
}

/// All transpositions of S_n in lexicographic order of their points.
pub fn transpositions(n: usize) -> Vec<Permutation> {
    (0..n)
        .tuple_combinations()
        .map(|(i, j)| Permutation::transposition(n, i, j))
        .collect()
}

/// The subgroup generated by `gens`, sorted.
pub fn generated_subgroup(n: usize, gens: &[Permutation]) -> Vec<Permutation> {
    let mut elems = std::collections::BTreeSet::new();
    elems.insert(Permutation::identity(n));
    let mut frontier = vec![Permutation::identity(n)];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = g.compose(&x);
            if elems.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    elems.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &str) -> Permutation {
        Permutation::parse(n, s).unwrap()
    }

    #[test]
    fn cycle_data_examples() {
        let id = cycle_data(&Permutation::identity(4));
        assert_eq!((id.l, id.length), (4, 0));
        let d = cycle_data(&p(4, "(1 2)(3 4)"));
        assert_eq!((d.l, d.length), (2, 2));
        let c = cycle_data(&p(3, "(1 2 3)"));
        assert_eq!((c.l, c.length), (1, 2));
    }

    #[test]
    fn composition_applies_right_factor_first() {
        let prod = p(3, "(1 2)").compose(&p(3, "(2 3)"));
        assert_eq!(prod, p(3, "(1 2 3)"));
    }

    #[test]
    fn minimal_factorization_examples() {
        assert_eq!(minimal_factorization(&p(3, "(1 2 3)")), vec![p(3, "(1 2)"), p(3, "(2 3)")]);
        assert_eq!(minimal_factorization(&p(4, "(2 4)")), vec![p(4, "(2 4)")]);
        assert!(minimal_factorization(&Permutation::identity(5)).is_empty());
    }

    #[test]
    fn joint_orbit_examples() {
        let a = p(4, "(1 2)");
        let b = p(4, "(3 4)");
        assert_eq!(joint_orbits(4, &[&a, &b]).unwrap().to_one_based(), vec![vec![1, 2], vec![3, 4]]);
        let c = p(3, "(1 2)");
        let d = p(3, "(2 3)");
        assert_eq!(joint_orbits(3, &[&c, &d]).unwrap().to_one_based(), vec![vec![1, 2, 3]]);
        assert_eq!(joint_orbits(3, &[&a]), Err(SymError::SizeMismatch(4, 3)));
    }

    #[test]
    fn transversality_examples() {
        assert!(is_transversal(&p(4, "(1 2)"), &p(4, "(3 4)")));
        assert!(!is_transversal(&p(4, "(1 2)"), &p(4, "(1 2)")));
        assert!(is_transversal(&p(3, "(1 2)"), &p(3, "(2 3)")));
    }

    #[test]
    fn graph_defect_examples() {
        let t = p(2, "(1 2)");
        assert_eq!(graph_defect(&t, &t, &[0, 1]).unwrap(), 0);
        let c = p(3, "(1 2 3)");
        assert_eq!(graph_defect(&c, &c, &[0, 1, 2]).unwrap(), 1);
        assert_eq!(
            graph_defect(&c, &c, &[0, 1]),
            Err(SymError::NotAJointOrbit(vec![1, 2]))
        );
    }

    #[test]
    fn centralizer_generator_examples() {
        let gens = centralizer_generators(&p(4, "(1 2)(3 4)"));
        assert!(gens.contains(&p(4, "(1 2)")));
        assert!(gens.contains(&p(4, "(1 3)(2 4)")));
        let cyc = p(5, "(1 2 3 4 5)");
        assert_eq!(centralizer_generators(&cyc), vec![cyc.clone()]);
    }

    #[test]
    fn parse_accepts_images_and_rejects_garbage() {
        assert_eq!(p(3, "[2,3,1]"), p(3, "(1 2 3)"));
        assert_eq!(p(3, "()"), Permutation::identity(3));
        assert!(Permutation::parse(3, "(1 4)").is_err());
        assert!(Permutation::parse(3, "(1 1)").is_err());
        assert!(Permutation::parse(3, "[1,1,2]").is_err());
        assert_eq!(p(4, "(1 2)(3 4)").to_string(), "(1 2)(3 4)");
    }
}
