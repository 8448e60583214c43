//! The sheaf of standard-position homomorphisms.
//!
//! A unital homomorphism `N → 1_A M 1_A` commuting with an abelian `A` is, in
//! standard position, a family of disjoint label tuples: each copy of the
//! block `M_{m_j}` of `N` is placed on an ordered tuple of `m_j` labels inside
//! one block of `M`, and commuting with `A` means each tuple stays inside one
//! atom of `A`. Elements of `F(A)` are these concrete groupings; classes only
//! appear in the moduli monoid.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::algebra::{BlockAlgebra, Label, PartialPermIsometry, RankTuple, StandardSubalgebra};
use crate::sketch::{ArrowId, ObjId, PresheafTable, TruncatedSketch};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomError {
    #[error("partial isometry is not an arrow {0}")]
    InvalidArrow(String),
    #[error("range of the partial isometry does not commute with the image: {0}")]
    NotCompatible(String),
}

/// One copy of the `source_block`-th block of `N`, placed on ordered labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomTuple {
    pub source_block: usize,
    pub labels: Vec<Label>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StandardHom {
    source: BlockAlgebra,
    target: StandardSubalgebra,
    tuples: Vec<HomTuple>,
}

impl StandardHom {
    /// Validates the unitality and commutation invariants.
    pub fn new(
        source: &BlockAlgebra,
        target: &StandardSubalgebra,
        mut tuples: Vec<HomTuple>,
    ) -> Option<Self> {
        let mut covered = BTreeSet::new();
        for t in &tuples {
            let m = *source.blocks().get(t.source_block)?;
            if t.labels.len() != m as usize {
                return None;
            }
            let atom = target.atom_of(*t.labels.first()?)?;
            let block = t.labels[0].block;
            for l in &t.labels {
                if l.block != block || target.atom_of(*l) != Some(atom) || !covered.insert(*l) {
                    return None;
                }
            }
        }
        if covered != *target.support().labels() {
            return None;
        }
        tuples.sort();
        Some(Self {
            source: source.clone(),
            target: target.clone(),
            tuples,
        })
    }

    pub fn source(&self) -> &BlockAlgebra {
        &self.source
    }

    pub fn target(&self) -> &StandardSubalgebra {
        &self.target
    }

    pub fn tuples(&self) -> &[HomTuple] {
        &self.tuples
    }
}

impl fmt::Display for StandardHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.tuples.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}:(", t.source_block + 1)?;
            for (k, l) in t.labels.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{l}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

/// Number of copies of each block of `N` inside each block of `M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiplicityMatrix {
    target_blocks: Vec<u32>,
    source_blocks: Vec<u32>,
    /// Row-major, rows indexed by `M`-blocks.
    entries: Vec<u32>,
}

impl MultiplicityMatrix {
    /// Builds a matrix from rows; `None` unless `Σ_j c_ij m_j ≤ n_i`.
    pub fn from_rows(m: &BlockAlgebra, n: &BlockAlgebra, rows: &[Vec<u32>]) -> Option<Self> {
        if rows.len() != m.block_count() || rows.iter().any(|r| r.len() != n.block_count()) {
            return None;
        }
        let matrix = Self {
            target_blocks: m.blocks().to_vec(),
            source_blocks: n.blocks().to_vec(),
            entries: rows.concat(),
        };
        matrix.fits().then_some(matrix)
    }

    pub fn zero(m: &BlockAlgebra, n: &BlockAlgebra) -> Self {
        Self {
            target_blocks: m.blocks().to_vec(),
            source_blocks: n.blocks().to_vec(),
            entries: vec![0; m.block_count() * n.block_count()],
        }
    }

    fn fits(&self) -> bool {
        (0..self.rows()).all(|i| self.row_weight(i) <= self.target_blocks[i])
    }

    pub fn rows(&self) -> usize {
        self.target_blocks.len()
    }

    pub fn cols(&self) -> usize {
        self.source_blocks.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols() + j]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    fn row_weight(&self, i: usize) -> u32 {
        (0..self.cols())
            .map(|j| self.get(i, j) * self.source_blocks[j])
            .sum()
    }

    /// Support rank `(Σ_j c_ij m_j)_i`.
    pub fn support(&self) -> RankTuple {
        RankTuple::with_capacities(
            self.target_blocks.clone(),
            (0..self.rows()).map(|i| self.row_weight(i)).collect(),
        )
        .expect("matrix fits its ambient")
    }

    fn zip_with(&self, other: &Self, op: impl Fn(u32, u32) -> Option<u32>) -> Option<Self> {
        if self.target_blocks != other.target_blocks || self.source_blocks != other.source_blocks {
            return None;
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| op(*a, *b))
            .collect::<Option<Vec<_>>>()?;
        let out = Self {
            target_blocks: self.target_blocks.clone(),
            source_blocks: self.source_blocks.clone(),
            entries,
        };
        out.fits().then_some(out)
    }

    /// Entrywise sum when the result still fits in `M`.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        self.zip_with(other, |a, b| Some(a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.zip_with(other, u32::checked_sub)
    }

    pub fn entrywise_min(&self, other: &Self) -> Option<Self> {
        self.zip_with(other, |a, b| Some(a.min(b)))
    }

    pub fn entrywise_max(&self, other: &Self) -> Option<Self> {
        self.zip_with(other, |a, b| Some(a.max(b)))
    }

    pub fn entrywise_le(&self, other: &Self) -> bool {
        self.target_blocks == other.target_blocks
            && self.source_blocks == other.source_blocks
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&c| c == 0)
    }

    /// Graded lexicographic key: total number of copies first, then entries
    /// in descending lexicographic order.
    pub fn graded_key(&self) -> (u32, Vec<std::cmp::Reverse<u32>>) {
        (
            self.entries.iter().sum(),
            self.entries.iter().map(|&c| std::cmp::Reverse(c)).collect(),
        )
    }
}

/// Printed as `(row,row,…)` with the entries of a row joined by `:`, so a
/// single-block `N` prints like a rank tuple.
impl fmt::Display for MultiplicityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.rows() {
            if i > 0 {
                write!(f, ",")?;
            }
            for j in 0..self.cols() {
                if j > 0 {
                    write!(f, ":")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, ")")
    }
}

pub fn multiplicity_of(phi: &StandardHom) -> MultiplicityMatrix {
    let m = phi.target.ambient();
    let mut c = MultiplicityMatrix::zero(m, &phi.source);
    let cols = c.cols();
    for t in &phi.tuples {
        c.entries[t.labels[0].block * cols + t.source_block] += 1;
    }
    c
}

/// All ways to cover `labels` (one block of one atom) by disjoint ordered tuples.
fn tuple_partitions(n: &BlockAlgebra, labels: &[Label]) -> Vec<Vec<HomTuple>> {
    let Some((&first, rest)) = labels.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for (j, &m) in n.blocks().iter().enumerate() {
        let m = m as usize;
        if m > labels.len() {
            continue;
        }
        for companions in combinations(rest, m - 1) {
            let remaining: Vec<Label> = rest
                .iter()
                .filter(|l| !companions.contains(l))
                .copied()
                .collect();
            let tails = tuple_partitions(n, &remaining);
            let mut members = companions.clone();
            members.push(first);
            for ordering in permutations(&members) {
                for tail in &tails {
                    let mut tuples = Vec::with_capacity(tail.len() + 1);
                    tuples.push(HomTuple {
                        source_block: j,
                        labels: ordering.clone(),
                    });
                    tuples.extend(tail.iter().cloned());
                    out.push(tuples);
                }
            }
        }
    }
    out
}

fn combinations<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, item) in items.iter().enumerate() {
        for mut tail in combinations(&items[i + 1..], k - 1) {
            tail.insert(0, item.clone());
            out.push(tail);
        }
    }
    out
}

fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// Every standard homomorphism `N → 1_A M 1_A` commuting with `A`, sorted.
pub fn enumerate_homs(n: &BlockAlgebra, a: &StandardSubalgebra) -> Vec<StandardHom> {
    let mut partial: Vec<Vec<HomTuple>> = vec![Vec::new()];
    for atom in a.atoms() {
        for block in 0..a.ambient().block_count() {
            let labels: Vec<Label> = atom.iter().filter(|l| l.block == block).copied().collect();
            if labels.is_empty() {
                continue;
            }
            let options = tuple_partitions(n, &labels);
            partial = partial
                .iter()
                .flat_map(|prefix| {
                    options.iter().map(move |o| {
                        let mut v = prefix.clone();
                        v.extend(o.iter().cloned());
                        v
                    })
                })
                .collect();
            if partial.is_empty() {
                return Vec::new();
            }
        }
    }
    let mut homs: Vec<StandardHom> = partial
        .into_iter()
        .map(|tuples| StandardHom::new(n, a, tuples).expect("enumerated groupings are valid"))
        .collect();
    homs.sort();
    homs
}

/// Restriction of `φ ∈ F(B)` along `u: A → B`, acting as `x ↦ u* φ(x) u`.
pub fn restrict(
    phi: &StandardHom,
    u: &PartialPermIsometry,
    a: &StandardSubalgebra,
) -> Result<StandardHom, HomError> {
    let b = &phi.target;
    if u.initial() != a.support() {
        return Err(HomError::InvalidArrow(format!(
            "{u}: initial space is not 1_A"
        )));
    }
    if !u.final_projection().is_sub(&b.support()) {
        return Err(HomError::InvalidArrow(format!(
            "{u}: final space exceeds 1_B"
        )));
    }
    let adjoint = u.adjoint();
    let mut tuples = Vec::new();
    for t in &phi.tuples {
        let pulled: Vec<Label> = t.labels.iter().filter_map(|l| adjoint.apply(*l)).collect();
        if pulled.is_empty() {
            continue;
        }
        if pulled.len() != t.labels.len() {
            return Err(HomError::NotCompatible(format!(
                "range of {u} cuts a tuple of {phi}"
            )));
        }
        let atom = a.atom_of(pulled[0]);
        if pulled.iter().any(|l| a.atom_of(*l) != atom) {
            return Err(HomError::NotCompatible(format!(
                "pulled tuple straddles atoms of {a}"
            )));
        }
        tuples.push(HomTuple {
            source_block: t.source_block,
            labels: pulled,
        });
    }
    StandardHom::new(&phi.source, a, tuples)
        .ok_or_else(|| HomError::NotCompatible(format!("restriction of {phi} is not unital")))
}

/// The hom-sheaf tabulated over a truncated sketch.
#[derive(Debug, Clone)]
pub struct HomPresheaf {
    source: BlockAlgebra,
    sections: Vec<Vec<StandardHom>>,
    table: PresheafTable,
    dropped: Vec<ArrowId>,
}

impl HomPresheaf {
    pub fn source(&self) -> &BlockAlgebra {
        &self.source
    }

    pub fn table(&self) -> &PresheafTable {
        &self.table
    }

    pub fn sections(&self, obj: ObjId) -> &[StandardHom] {
        &self.sections[obj.0]
    }

    pub fn index_of(&self, obj: ObjId, phi: &StandardHom) -> Option<usize> {
        self.sections[obj.0].binary_search(phi).ok()
    }

    /// Arrows removed because restriction was not total on them.
    pub fn dropped_arrows(&self) -> &[ArrowId] {
        &self.dropped
    }
}

pub fn as_presheaf(n: &BlockAlgebra, sketch: &TruncatedSketch) -> HomPresheaf {
    let cat = sketch.category();
    let sections: Vec<Vec<StandardHom>> = sketch
        .objects()
        .iter()
        .map(|a| enumerate_homs(n, a))
        .collect();
    let mut dropped = Vec::new();
    let along = cat
        .arrows()
        .iter()
        .enumerate()
        .map(|(i, arrow)| {
            let u = sketch.isometry(ArrowId(i));
            let a = sketch.object(arrow.source);
            let table: Option<Vec<usize>> = sections[arrow.target.0]
                .iter()
                .map(|phi| {
                    let psi = restrict(phi, &u, a).ok()?;
                    sections[arrow.source.0].binary_search(&psi).ok()
                })
                .collect();
            if table.is_none() {
                dropped.push(ArrowId(i));
            }
            table
        })
        .collect();
    let names = sections
        .iter()
        .map(|s| s.iter().map(|phi| phi.to_string()).collect())
        .collect();
    let sizes = sections.iter().map(Vec::len).collect();
    HomPresheaf {
        source: n.clone(),
        table: PresheafTable::new(cat, sizes, along, names),
        sections,
        dropped,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::algebra::StandardProjection;

    fn alg(blocks: &[u32]) -> BlockAlgebra {
        BlockAlgebra::new(blocks.to_vec()).unwrap()
    }

    fn scalar(m: &BlockAlgebra, ranks: &[u32]) -> StandardSubalgebra {
        StandardSubalgebra::scalar(&StandardProjection::leading(m, ranks).unwrap())
    }

    /// Brute force: read tuples consecutively off every permutation of each
    /// atom-block and every sequence of source blocks, collecting distinct
    /// groupings.
    fn oracle_count(n: &BlockAlgebra, a: &StandardSubalgebra) -> usize {
        let mut per_part: Vec<HashSet<Vec<HomTuple>>> = Vec::new();
        for atom in a.atoms() {
            for block in 0..a.ambient().block_count() {
                let labels: Vec<Label> =
                    atom.iter().filter(|l| l.block == block).copied().collect();
                if labels.is_empty() {
                    continue;
                }
                let mut found = HashSet::new();
                for perm in permutations(&labels) {
                    let mut stack = vec![(0usize, Vec::<HomTuple>::new())];
                    while let Some((pos, acc)) = stack.pop() {
                        if pos == perm.len() {
                            let mut g = acc.clone();
                            g.sort();
                            found.insert(g);
                            continue;
                        }
                        for (j, &m) in n.blocks().iter().enumerate() {
                            let end = pos + m as usize;
                            if end <= perm.len() {
                                let mut next = acc.clone();
                                next.push(HomTuple {
                                    source_block: j,
                                    labels: perm[pos..end].to_vec(),
                                });
                                stack.push((end, next));
                            }
                        }
                    }
                }
                per_part.push(found);
            }
        }
        per_part.iter().map(HashSet::len).product()
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let m = alg(&[4, 3]);
        let p = m.full_projection();
        let cut = StandardSubalgebra::cut(&p, &StandardProjection::leading(&m, &[2, 1]).unwrap())
            .unwrap();
        for n in [alg(&[1]), alg(&[2]), alg(&[1, 1]), alg(&[1, 2]), alg(&[3])] {
            for a in [
                StandardSubalgebra::scalar(&p),
                cut.clone(),
                scalar(&m, &[2, 2]),
            ] {
                assert_eq!(
                    enumerate_homs(&n, &a).len(),
                    oracle_count(&n, &a),
                    "N={n} A={a}"
                );
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        let m = alg(&[2, 3]);
        let homs = enumerate_homs(&alg(&[1]), &scalar(&m, &[2, 0]));
        assert_eq!(homs.len(), 1);
        assert_eq!(multiplicity_of(&homs[0]).to_string(), "(2,0)");

        assert!(enumerate_homs(&alg(&[2]), &scalar(&m, &[1, 0])).is_empty());

        let zero = enumerate_homs(&alg(&[1]), &StandardSubalgebra::zero(&m));
        assert_eq!(zero.len(), 1);
        assert!(zero[0].tuples().is_empty());
    }

    #[test]
    fn multiplicity_examples() {
        let m = alg(&[2, 3]);
        let phi = &enumerate_homs(&alg(&[1]), &scalar(&m, &[2, 2]))[0];
        let c = multiplicity_of(phi);
        assert_eq!((c.get(0, 0), c.get(1, 0)), (2, 2));

        let n = alg(&[1, 1]);
        let a = scalar(&m, &[2, 0]);
        let phi = enumerate_homs(&n, &a)
            .into_iter()
            .find(|h| {
                h.tuples()
                    .iter()
                    .map(|t| t.source_block)
                    .collect::<Vec<_>>()
                    == [0, 1]
            })
            .unwrap();
        let c = multiplicity_of(&phi);
        assert_eq!(c.entries(), &[1, 1, 0, 0]);
        assert_eq!(c.support().ranks(), &[2, 0]);
        assert_eq!(c.to_string(), "(1:1,0:0)");

        let empty = &enumerate_homs(&n, &StandardSubalgebra::zero(&m))[0];
        assert!(multiplicity_of(empty).is_zero());
    }

    #[test]
    fn restriction_along_identity_is_identity() {
        let m = alg(&[2, 3]);
        let a = scalar(&m, &[2, 2]);
        let u = PartialPermIsometry::identity(&a.support());
        for phi in enumerate_homs(&alg(&[1, 1]), &a) {
            assert_eq!(restrict(&phi, &u, &a).unwrap(), phi);
        }
    }

    #[test]
    fn singleton_tuples_always_restrict() {
        let m = alg(&[2, 3]);
        let b = scalar(&m, &[2, 3]);
        let phi = &enumerate_homs(&alg(&[1]), &b)[0];
        let q = StandardProjection::new(&m, [Label::new(0, 1), Label::new(1, 2)]).unwrap();
        let a = StandardSubalgebra::scalar(&q);
        let u = PartialPermIsometry::identity(&q);
        let psi = restrict(phi, &u, &a).unwrap();
        assert_eq!(multiplicity_of(&psi).support(), q.rank());
    }

    #[test]
    fn cutting_a_tuple_is_not_compatible() {
        let m = alg(&[2]);
        let b = scalar(&m, &[2]);
        let phi = &enumerate_homs(&alg(&[2]), &b)[0];
        let q = StandardProjection::new(&m, [Label::new(0, 0)]).unwrap();
        let u = PartialPermIsometry::new(&m, [(Label::new(0, 0), Label::new(0, 1))]).unwrap();
        let a = StandardSubalgebra::scalar(&q);
        assert!(matches!(
            restrict(phi, &u, &a),
            Err(HomError::NotCompatible(_))
        ));
    }

    #[test]
    fn restriction_is_functorial_on_chains() {
        let m = alg(&[4]);
        let p = m.full_projection();
        let q = StandardProjection::leading(&m, &[2]).unwrap();
        let big = StandardSubalgebra::cut(&p, &q).unwrap();
        let mid = StandardSubalgebra::scalar(&q);
        // v swaps the labels of q, w includes ℂq into the cut.
        let v = PartialPermIsometry::new(
            &m,
            [
                (Label::new(0, 0), Label::new(0, 1)),
                (Label::new(0, 1), Label::new(0, 0)),
            ],
        )
        .unwrap();
        let w = PartialPermIsometry::identity(&q);
        let n = alg(&[1, 1]);
        for phi in enumerate_homs(&n, &big) {
            let once = restrict(&phi, &w.after(&v), &mid).unwrap();
            let twice = restrict(&restrict(&phi, &w, &mid).unwrap(), &v, &mid).unwrap();
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn pseudoisomorphic_homs_share_multiplicities() {
        // Witness search over all block-preserving bijections between
        // equal-rank scalar objects.
        let m = alg(&[2, 2]);
        let n = alg(&[1, 1]);
        let p = StandardProjection::leading(&m, &[2, 1]).unwrap();
        let q = StandardProjection::new(&m, [Label::new(0, 0), Label::new(0, 1), Label::new(1, 1)])
            .unwrap();
        let (cp, cq) = (
            StandardSubalgebra::scalar(&p),
            StandardSubalgebra::scalar(&q),
        );
        let p_labels: Vec<Label> = p.labels().iter().copied().collect();
        let q_labels: Vec<Label> = q.labels().iter().copied().collect();
        let bijections: Vec<PartialPermIsometry> = permutations(&q_labels)
            .into_iter()
            .filter_map(|img| PartialPermIsometry::new(&m, p_labels.iter().copied().zip(img)).ok())
            .collect();
        assert_eq!(bijections.len(), 2);
        for x in enumerate_homs(&n, &cp) {
            for y in enumerate_homs(&n, &cq) {
                let related = bijections
                    .iter()
                    .any(|u| restrict(&y, u, &cp).as_ref() == Ok(&x));
                assert_eq!(
                    related,
                    multiplicity_of(&x) == multiplicity_of(&y),
                    "{x} vs {y}"
                );
            }
        }
    }
}
