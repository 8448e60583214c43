//! Finite-dimensional von Neumann algebras in standard position.
//!
//! An algebra is a direct sum of full matrix blocks `M_{n_1} ⊕ … ⊕ M_{n_k}`,
//! and block `i` carries the basis labels `(i,1) … (i,n_i)`. Projections are
//! diagonal, i.e. sets of labels; partial isometries are partial permutations
//! of labels that never leave their block; abelian subalgebras are partitions
//! of a label set into atoms (their minimal projections).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("block sizes must be positive and the block list non-empty, got {0:?}")]
    InvalidBlocks(Vec<u32>),
    #[error("label {0} is not a basis label of the ambient algebra")]
    LabelOutOfRange(Label),
    #[error("ambient algebras differ: {0} vs {1}")]
    AmbientMismatch(BlockAlgebra, BlockAlgebra),
    #[error("rank tuple {ranks:?} does not fit block sizes {blocks:?}")]
    RankOutOfRange { ranks: Vec<u32>, blocks: Vec<u32> },
    #[error("capacity exceeded in block {block}: need {needed}, have {available}")]
    CapacityExceeded {
        block: usize,
        needed: u32,
        available: u32,
    },
    #[error("{0} is not a subprojection of {1}")]
    NotSubprojection(StandardProjection, StandardProjection),
    #[error("label map is not an injective block-preserving partial permutation")]
    InvalidIsometry,
    #[error("atoms must be non-empty and pairwise disjoint")]
    InvalidAtoms,
    #[error("subalgebras are not orthogonal")]
    NotOrthogonal,
}

/// Block-size vector `(n_1, …, n_k)` of a finite-dimensional von Neumann algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockAlgebra {
    blocks: Vec<u32>,
}

impl BlockAlgebra {
    pub fn new(blocks: Vec<u32>) -> Result<Self, AlgebraError> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(AlgebraError::InvalidBlocks(blocks));
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn total_labels(&self) -> usize {
        self.blocks.iter().map(|&n| n as usize).sum()
    }

    /// All basis labels, block by block.
    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(block, &n)| (0..n).map(move |index| Label { block, index }))
    }

    pub fn contains(&self, label: Label) -> bool {
        self.blocks
            .get(label.block)
            .is_some_and(|&n| label.index < n)
    }

    pub fn full_projection(&self) -> StandardProjection {
        StandardProjection {
            ambient: self.clone(),
            selected: self.labels().collect(),
        }
    }

    pub fn zero_projection(&self) -> StandardProjection {
        StandardProjection {
            ambient: self.clone(),
            selected: BTreeSet::new(),
        }
    }

    fn ensure_same(&self, other: &BlockAlgebra) -> Result<(), AlgebraError> {
        if self == other {
            Ok(())
        } else {
            Err(AlgebraError::AmbientMismatch(self.clone(), other.clone()))
        }
    }
}

impl fmt::Display for BlockAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, n) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "]")
    }
}

/// Basis label `(block, index)`, zero-based internally and printed one-based
/// as `block.index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub block: usize,
    pub index: u32,
}

impl Label {
    pub fn new(block: usize, index: u32) -> Self {
        Self { block, index }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.block + 1, self.index + 1)
    }
}

fn write_label_set<'a>(
    f: &mut fmt::Formatter<'_>,
    labels: impl IntoIterator<Item = &'a Label>,
) -> fmt::Result {
    for (i, l) in labels.into_iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

/// Murray–von Neumann class of a projection: its per-block ranks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankTuple {
    ranks: Vec<u32>,
    capacities: Vec<u32>,
}

impl RankTuple {
    pub fn new(ambient: &BlockAlgebra, ranks: Vec<u32>) -> Result<Self, AlgebraError> {
        Self::with_capacities(ambient.blocks().to_vec(), ranks)
    }

    /// Rank tuple bounded by arbitrary capacities (e.g. the rank of a
    /// generator projection rather than the full block sizes).
    pub fn with_capacities(capacities: Vec<u32>, ranks: Vec<u32>) -> Result<Self, AlgebraError> {
        if ranks.len() != capacities.len() || ranks.iter().zip(&capacities).any(|(r, n)| r > n) {
            return Err(AlgebraError::RankOutOfRange {
                ranks,
                blocks: capacities,
            });
        }
        Ok(Self { ranks, capacities })
    }

    pub fn zero(capacities: Vec<u32>) -> Self {
        Self {
            ranks: vec![0; capacities.len()],
            capacities,
        }
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn capacities(&self) -> &[u32] {
        &self.capacities
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    pub fn total(&self) -> u32 {
        self.ranks.iter().sum()
    }

    fn ensure_compatible(&self, other: &RankTuple) -> Result<(), AlgebraError> {
        if self.capacities == other.capacities {
            Ok(())
        } else {
            Err(AlgebraError::RankOutOfRange {
                ranks: other.ranks.clone(),
                blocks: self.capacities.clone(),
            })
        }
    }

    /// Componentwise sum, `None` when some block overflows its capacity.
    pub fn checked_add(&self, other: &RankTuple) -> Option<RankTuple> {
        if self.capacities != other.capacities {
            return None;
        }
        let ranks: Vec<u32> = self
            .ranks
            .iter()
            .zip(&other.ranks)
            .map(|(a, b)| a + b)
            .collect();
        if ranks.iter().zip(&self.capacities).any(|(r, n)| r > n) {
            return None;
        }
        Some(RankTuple {
            ranks,
            capacities: self.capacities.clone(),
        })
    }

    pub fn checked_sub(&self, other: &RankTuple) -> Option<RankTuple> {
        if self.capacities != other.capacities {
            return None;
        }
        let ranks = self
            .ranks
            .iter()
            .zip(&other.ranks)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()?;
        Some(RankTuple {
            ranks,
            capacities: self.capacities.clone(),
        })
    }

    pub fn le(&self, other: &RankTuple) -> bool {
        self.capacities == other.capacities
            && self.ranks.iter().zip(&other.ranks).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for RankTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.ranks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// Diagonal projection: a set of selected basis labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StandardProjection {
    ambient: BlockAlgebra,
    selected: BTreeSet<Label>,
}

impl StandardProjection {
    pub fn new(
        ambient: &BlockAlgebra,
        labels: impl IntoIterator<Item = Label>,
    ) -> Result<Self, AlgebraError> {
        let selected: BTreeSet<Label> = labels.into_iter().collect();
        if let Some(bad) = selected.iter().find(|l| !ambient.contains(**l)) {
            return Err(AlgebraError::LabelOutOfRange(*bad));
        }
        Ok(Self {
            ambient: ambient.clone(),
            selected,
        })
    }

    /// The projection selecting the first `ranks[i]` labels of each block.
    pub fn leading(ambient: &BlockAlgebra, ranks: &[u32]) -> Result<Self, AlgebraError> {
        let rank = RankTuple::new(ambient, ranks.to_vec())?;
        let selected = rank
            .ranks()
            .iter()
            .enumerate()
            .flat_map(|(block, &r)| (0..r).map(move |index| Label { block, index }))
            .collect();
        Ok(Self {
            ambient: ambient.clone(),
            selected,
        })
    }

    pub fn ambient(&self) -> &BlockAlgebra {
        &self.ambient
    }

    pub fn labels(&self) -> &BTreeSet<Label> {
        &self.selected
    }

    pub fn is_zero(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn rank(&self) -> RankTuple {
        let mut ranks = vec![0; self.ambient.block_count()];
        for l in &self.selected {
            ranks[l.block] += 1;
        }
        RankTuple {
            ranks,
            capacities: self.ambient.blocks.clone(),
        }
    }

    /// `self ≤ other` in the projection order.
    pub fn is_sub(&self, other: &StandardProjection) -> bool {
        self.ambient == other.ambient && self.selected.is_subset(&other.selected)
    }

    pub fn is_orthogonal(&self, other: &StandardProjection) -> bool {
        self.ambient == other.ambient && self.selected.is_disjoint(&other.selected)
    }

    pub fn union(&self, other: &StandardProjection) -> StandardProjection {
        StandardProjection {
            ambient: self.ambient.clone(),
            selected: self.selected.union(&other.selected).copied().collect(),
        }
    }

    pub fn difference(&self, other: &StandardProjection) -> StandardProjection {
        StandardProjection {
            ambient: self.ambient.clone(),
            selected: self.selected.difference(&other.selected).copied().collect(),
        }
    }

    /// Every standard subprojection of `self`, the zero projection first.
    pub fn subprojections(&self) -> Vec<StandardProjection> {
        let labels: Vec<Label> = self.selected.iter().copied().collect();
        assert!(
            labels.len() < 32,
            "too many labels to enumerate subprojections"
        );
        (0u32..(1 << labels.len()))
            .map(|mask| StandardProjection {
                ambient: self.ambient.clone(),
                selected: labels
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, l)| *l)
                    .collect(),
            })
            .collect()
    }
}

impl fmt::Display for StandardProjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        write_label_set(f, &self.selected)?;
        write!(f, "}}")
    }
}

pub fn rank_of(p: &StandardProjection) -> RankTuple {
    p.rank()
}

/// Murray–von Neumann equivalence of standard projections.
pub fn equivalent(p: &StandardProjection, q: &StandardProjection) -> Result<bool, AlgebraError> {
    p.ambient.ensure_same(&q.ambient)?;
    Ok(p.rank() == q.rank())
}

/// Whether projections of classes `a` and `b` can be placed orthogonally.
pub fn orthogonalizable(a: &RankTuple, b: &RankTuple) -> Result<bool, AlgebraError> {
    a.ensure_compatible(b)?;
    Ok(a.checked_add(b).is_some())
}

/// Places a projection of class `r` inside `p`, orthogonal to `q`, using the
/// lowest free labels of each block.
pub fn move_orthogonal(
    q: &StandardProjection,
    r: &RankTuple,
    inside: &StandardProjection,
) -> Result<StandardProjection, AlgebraError> {
    q.ambient.ensure_same(&inside.ambient)?;
    if !q.is_sub(inside) {
        return Err(AlgebraError::NotSubprojection(q.clone(), inside.clone()));
    }
    if r.capacities() != q.ambient.blocks() {
        return Err(AlgebraError::RankOutOfRange {
            ranks: r.ranks().to_vec(),
            blocks: q.ambient.blocks().to_vec(),
        });
    }
    let free = inside.difference(q);
    let free_rank = free.rank();
    let mut selected = BTreeSet::new();
    for (block, (&need, &have)) in r.ranks().iter().zip(free_rank.ranks()).enumerate() {
        if need > have {
            return Err(AlgebraError::CapacityExceeded {
                block,
                needed: need + q.rank().ranks()[block],
                available: inside.rank().ranks()[block],
            });
        }
        selected.extend(
            free.selected
                .iter()
                .filter(|l| l.block == block)
                .take(need as usize)
                .copied(),
        );
    }
    Ok(StandardProjection {
        ambient: q.ambient.clone(),
        selected,
    })
}

/// Partial isometry given by a block-preserving partial permutation of labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialPermIsometry {
    ambient: BlockAlgebra,
    map: BTreeMap<Label, Label>,
}

impl PartialPermIsometry {
    pub fn new(
        ambient: &BlockAlgebra,
        pairs: impl IntoIterator<Item = (Label, Label)>,
    ) -> Result<Self, AlgebraError> {
        let mut map = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (from, to) in pairs {
            if !ambient.contains(from) {
                return Err(AlgebraError::LabelOutOfRange(from));
            }
            if !ambient.contains(to) {
                return Err(AlgebraError::LabelOutOfRange(to));
            }
            if from.block != to.block || !seen.insert(to) || map.insert(from, to).is_some() {
                return Err(AlgebraError::InvalidIsometry);
            }
        }
        Ok(Self {
            ambient: ambient.clone(),
            map,
        })
    }

    /// The projection `p` itself, viewed as a partial isometry.
    pub fn identity(p: &StandardProjection) -> Self {
        Self {
            ambient: p.ambient.clone(),
            map: p.selected.iter().map(|&l| (l, l)).collect(),
        }
    }

    /// The order-preserving block-by-block bijection from `p` onto `q`.
    pub fn standard_bijection(
        p: &StandardProjection,
        q: &StandardProjection,
    ) -> Result<Self, AlgebraError> {
        if !equivalent(p, q)? {
            return Err(AlgebraError::InvalidIsometry);
        }
        let mut map = BTreeMap::new();
        for block in 0..p.ambient.block_count() {
            let from = p.selected.iter().filter(|l| l.block == block);
            let to = q.selected.iter().filter(|l| l.block == block);
            map.extend(from.copied().zip(to.copied()));
        }
        Ok(Self {
            ambient: p.ambient.clone(),
            map,
        })
    }

    pub fn ambient(&self) -> &BlockAlgebra {
        &self.ambient
    }

    pub fn apply(&self, label: Label) -> Option<Label> {
        self.map.get(&label).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Label, Label)> + '_ {
        self.map.iter().map(|(a, b)| (*a, *b))
    }

    /// Initial projection `u*u`.
    pub fn initial(&self) -> StandardProjection {
        StandardProjection {
            ambient: self.ambient.clone(),
            selected: self.map.keys().copied().collect(),
        }
    }

    /// Final projection `uu*`.
    pub fn final_projection(&self) -> StandardProjection {
        StandardProjection {
            ambient: self.ambient.clone(),
            selected: self.map.values().copied().collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            ambient: self.ambient.clone(),
            map: self.map.iter().map(|(a, b)| (*b, *a)).collect(),
        }
    }

    /// Operator product `self · first` (apply `first`, then `self`).
    pub fn after(&self, first: &PartialPermIsometry) -> Self {
        Self {
            ambient: self.ambient.clone(),
            map: first
                .map
                .iter()
                .filter_map(|(a, b)| self.map.get(b).map(|c| (*a, *c)))
                .collect(),
        }
    }
}

impl fmt::Display for PartialPermIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (a, b)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}->{b}")?;
        }
        write!(f, "]")
    }
}

/// Abelian subalgebra generated by commuting standard projections, stored as
/// the partition of its support into atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StandardSubalgebra {
    ambient: BlockAlgebra,
    atoms: Vec<BTreeSet<Label>>,
}

impl StandardSubalgebra {
    pub fn new(
        ambient: &BlockAlgebra,
        atoms: impl IntoIterator<Item = BTreeSet<Label>>,
    ) -> Result<Self, AlgebraError> {
        let mut atoms: Vec<BTreeSet<Label>> = atoms.into_iter().collect();
        let mut seen = BTreeSet::new();
        for atom in &atoms {
            if atom.is_empty() {
                return Err(AlgebraError::InvalidAtoms);
            }
            for l in atom {
                if !ambient.contains(*l) {
                    return Err(AlgebraError::LabelOutOfRange(*l));
                }
                if !seen.insert(*l) {
                    return Err(AlgebraError::InvalidAtoms);
                }
            }
        }
        atoms.sort();
        Ok(Self {
            ambient: ambient.clone(),
            atoms,
        })
    }

    pub fn zero(ambient: &BlockAlgebra) -> Self {
        Self {
            ambient: ambient.clone(),
            atoms: Vec::new(),
        }
    }

    /// `ℂp`, or the zero algebra when `p = 0`.
    pub fn scalar(p: &StandardProjection) -> Self {
        let atoms = if p.is_zero() {
            Vec::new()
        } else {
            vec![p.selected.clone()]
        };
        Self {
            ambient: p.ambient.clone(),
            atoms,
        }
    }

    /// `ℂq ⊕ ℂ(p−q)` for `q ≤ p`.
    pub fn cut(p: &StandardProjection, q: &StandardProjection) -> Result<Self, AlgebraError> {
        if !q.is_sub(p) {
            return Err(AlgebraError::NotSubprojection(q.clone(), p.clone()));
        }
        let rest = p.difference(q);
        Self::new(
            &p.ambient,
            [q.selected.clone(), rest.selected]
                .into_iter()
                .filter(|a| !a.is_empty()),
        )
    }

    pub fn ambient(&self) -> &BlockAlgebra {
        &self.ambient
    }

    pub fn atoms(&self) -> &[BTreeSet<Label>] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Supporting projection `1_A`.
    pub fn support(&self) -> StandardProjection {
        StandardProjection {
            ambient: self.ambient.clone(),
            selected: self.atoms.iter().flatten().copied().collect(),
        }
    }

    pub fn atom_of(&self, label: Label) -> Option<usize> {
        self.atoms.iter().position(|a| a.contains(&label))
    }

    /// Algebra generated by two subalgebras with the same support: the common
    /// refinement of their atom partitions.
    pub fn join(&self, other: &StandardSubalgebra) -> Option<StandardSubalgebra> {
        if self.support() != other.support() {
            return None;
        }
        let atoms = self
            .atoms
            .iter()
            .flat_map(|a| other.atoms.iter().map(move |b| a & b))
            .filter(|c| !c.is_empty());
        Self::new(&self.ambient, atoms).ok()
    }

    pub fn is_orthogonal(&self, other: &StandardSubalgebra) -> bool {
        self.support().is_orthogonal(&other.support())
    }

    pub fn direct_sum(&self, other: &StandardSubalgebra) -> Result<Self, AlgebraError> {
        self.ambient.ensure_same(&other.ambient)?;
        if !self.is_orthogonal(other) {
            return Err(AlgebraError::NotOrthogonal);
        }
        Self::new(
            &self.ambient,
            self.atoms.iter().chain(&other.atoms).cloned(),
        )
    }

    /// Whether `other ⊆ self` as algebras: every atom of `other` is a sum of
    /// atoms of `self`.
    pub fn contains_algebra(&self, other: &StandardSubalgebra) -> bool {
        self.ambient == other.ambient
            && other
                .atoms
                .iter()
                .all(|a| is_union_of_atoms(a, &self.atoms))
    }
}

fn is_union_of_atoms(set: &BTreeSet<Label>, atoms: &[BTreeSet<Label>]) -> bool {
    let mut covered = 0;
    for atom in atoms {
        if !atom.is_disjoint(set) {
            if !atom.is_subset(set) {
                return false;
            }
            covered += atom.len();
        }
    }
    covered == set.len()
}

impl fmt::Display for StandardSubalgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write_label_set(f, atom)?;
        }
        write!(f, ">")
    }
}

/// Outcome of testing the three morphism conditions of the subalgebra category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MorphismCheck {
    /// `u*u = 1_A`.
    pub initial_is_support: bool,
    /// `uu* ≤ 1_B`.
    pub final_dominated: bool,
    /// `uAu* ⊆ B`.
    pub conjugates_into: bool,
}

impl MorphismCheck {
    pub fn passes(&self) -> bool {
        self.initial_is_support && self.final_dominated && self.conjugates_into
    }

    pub fn diagnostic(&self) -> String {
        let mut failed = Vec::new();
        if !self.initial_is_support {
            failed.push("initial space differs from 1_A");
        }
        if !self.final_dominated {
            failed.push("final space not dominated by 1_B");
        }
        if !self.conjugates_into {
            failed.push("u A u* not contained in B");
        }
        if failed.is_empty() {
            "ok".to_owned()
        } else {
            failed.join("; ")
        }
    }
}

pub fn check_morphism(
    u: &PartialPermIsometry,
    a: &StandardSubalgebra,
    b: &StandardSubalgebra,
) -> MorphismCheck {
    let same_ambient = u.ambient == a.ambient && u.ambient == b.ambient;
    let initial_is_support = same_ambient && u.initial() == a.support();
    let final_dominated = same_ambient && u.final_projection().is_sub(&b.support());
    let conjugates_into = initial_is_support
        && final_dominated
        && a.atoms.iter().all(|atom| {
            let image: BTreeSet<Label> = atom.iter().filter_map(|l| u.apply(*l)).collect();
            is_union_of_atoms(&image, &b.atoms)
        });
    MorphismCheck {
        initial_is_support,
        final_dominated,
        conjugates_into,
    }
}

/// Whether `u: A → B` is a pseudoisomorphism: a morphism whose final space is
/// all of `1_B`.
pub fn is_pseudoisomorphism(
    u: &PartialPermIsometry,
    a: &StandardSubalgebra,
    b: &StandardSubalgebra,
) -> bool {
    check_morphism(u, a, b).passes() && u.final_projection() == b.support()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(blocks: &[u32]) -> BlockAlgebra {
        BlockAlgebra::new(blocks.to_vec()).unwrap()
    }

    fn proj(m: &BlockAlgebra, labels: &[(usize, u32)]) -> StandardProjection {
        StandardProjection::new(m, labels.iter().map(|&(b, i)| Label::new(b, i))).unwrap()
    }

    #[test]
    fn block_algebra_rejects_empty_and_zero_blocks() {
        assert!(BlockAlgebra::new(vec![]).is_err());
        assert!(BlockAlgebra::new(vec![2, 0]).is_err());
        assert_eq!(alg(&[2, 3]).total_labels(), 5);
    }

    #[test]
    fn rank_examples() {
        let m = alg(&[2, 3]);
        assert_eq!(rank_of(&proj(&m, &[(0, 0)])).ranks(), &[1, 0]);
        assert_eq!(rank_of(&m.full_projection()).ranks(), &[2, 3]);
        let m4 = alg(&[4]);
        assert_eq!(rank_of(&proj(&m4, &[(0, 1), (0, 3)])).ranks(), &[2]);
    }

    #[test]
    fn equivalence_examples() {
        let m = alg(&[2, 3]);
        let p = proj(&m, &[(0, 0)]);
        assert!(equivalent(&p, &proj(&m, &[(0, 1)])).unwrap());
        assert!(!equivalent(&p, &proj(&m, &[(1, 0)])).unwrap());
        assert!(equivalent(&m.full_projection(), &m.full_projection()).unwrap());
        let other = alg(&[2, 2]);
        assert!(matches!(
            equivalent(&p, &other.full_projection()),
            Err(AlgebraError::AmbientMismatch(..))
        ));
    }

    #[test]
    fn orthogonalizable_examples() {
        let m = alg(&[2, 3]);
        let r = |v: &[u32]| RankTuple::new(&m, v.to_vec()).unwrap();
        assert!(orthogonalizable(&r(&[1, 1]), &r(&[1, 1])).unwrap());
        assert!(!orthogonalizable(&r(&[2, 0]), &r(&[1, 0])).unwrap());
        for a in [[0, 0], [2, 3], [1, 2]] {
            assert!(orthogonalizable(&r(&a), &r(&[0, 0])).unwrap());
        }
        let other = RankTuple::new(&alg(&[2]), vec![1]).unwrap();
        assert!(orthogonalizable(&r(&[1, 1]), &other).is_err());
    }

    #[test]
    fn morphism_examples() {
        let m = alg(&[2, 3]);
        let p = proj(&m, &[(0, 0), (0, 1)]);
        let cp = StandardSubalgebra::scalar(&p);
        assert!(check_morphism(&PartialPermIsometry::identity(&p), &cp, &cp).passes());

        // ℂq → ℂp with q a proper subprojection: the first two conditions hold
        // but ℂ(uqu*) is not inside ℂp.
        let q = proj(&m, &[(0, 0)]);
        let cq = StandardSubalgebra::scalar(&q);
        let u = PartialPermIsometry::new(&m, [(Label::new(0, 0), Label::new(0, 1))]).unwrap();
        let check = check_morphism(&u, &cq, &cp);
        assert!(check.initial_is_support && check.final_dominated);
        assert!(!check.conjugates_into);
        // Into the cut algebra containing the image as an atom it is a morphism.
        let cut = StandardSubalgebra::cut(&p, &proj(&m, &[(0, 1)])).unwrap();
        assert!(check_morphism(&u, &cq, &cut).passes());

        let small = PartialPermIsometry::identity(&q);
        let check = check_morphism(&small, &cp, &cp);
        assert!(!check.initial_is_support);
        assert!(check.diagnostic().contains("initial"));
    }

    #[test]
    fn move_orthogonal_examples() {
        let m = alg(&[2, 3]);
        let p = m.full_projection();
        let q = proj(&m, &[(0, 0)]);
        let r = RankTuple::new(&m, vec![1, 1]).unwrap();
        let moved = move_orthogonal(&q, &r, &p).unwrap();
        assert_eq!(moved.rank(), r);
        assert!(moved.is_orthogonal(&q) && moved.is_sub(&p));

        let zero = RankTuple::zero(vec![2, 3]);
        assert!(move_orthogonal(&q, &zero, &p).unwrap().is_zero());

        let q2 = proj(&m, &[(0, 0), (0, 1)]);
        let r1 = RankTuple::new(&m, vec![1, 0]).unwrap();
        assert!(matches!(
            move_orthogonal(&q2, &r1, &p),
            Err(AlgebraError::CapacityExceeded { block: 0, .. })
        ));
    }

    #[test]
    fn isometry_rejects_block_mixing_and_collisions() {
        let m = alg(&[2, 3]);
        assert!(PartialPermIsometry::new(&m, [(Label::new(0, 0), Label::new(1, 0))]).is_err());
        assert!(PartialPermIsometry::new(
            &m,
            [
                (Label::new(0, 0), Label::new(0, 1)),
                (Label::new(0, 1), Label::new(0, 1))
            ]
        )
        .is_err());
    }

    #[test]
    fn subalgebra_join_and_containment() {
        let m = alg(&[4]);
        let p = m.full_projection();
        let a = StandardSubalgebra::cut(&p, &proj(&m, &[(0, 0), (0, 1)])).unwrap();
        let b = StandardSubalgebra::cut(&p, &proj(&m, &[(0, 0), (0, 2)])).unwrap();
        let j = a.join(&b).unwrap();
        assert_eq!(j.atoms().len(), 4);
        assert!(j.contains_algebra(&a) && j.contains_algebra(&b));
        assert!(a.contains_algebra(&StandardSubalgebra::scalar(&p)));
        assert!(!a.contains_algebra(&b));
        assert!(a.contains_algebra(&StandardSubalgebra::zero(&m)));
    }
}
