//! The moduli space `π(F)`: classes of sections under pseudoisomorphism, with
//! the partial addition of orthogonal supports, its order, meets and joins.

mod checks;
mod orbit;
mod order;
mod sampler;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::RankTuple;
use crate::hom::{multiplicity_of, HomPresheaf, MultiplicityMatrix};
use crate::sketch::{ObjId, TruncatedSketch};

pub use checks::{
    check_join_formula, check_leq_fast, check_meet_fast, check_monoid, check_wedge_vee,
    compare_modes,
};
pub use order::{check_dedekind, check_poset, Order};
pub use sampler::{bounded_subsets, SubsetSampler};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuliError {
    #[error("orbit search exceeded its budget of {budget} witnesses")]
    Timeout { budget: usize },
    #[error("the moduli monoid needs exactly one generator, got {0}")]
    UnsupportedGenerators(usize),
    #[error("{x} is not below {y}")]
    NotDominated { x: String, y: String },
    #[error("empty set of elements")]
    EmptySet,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Invariant {
    Multiplicity(MultiplicityMatrix),
    Class(usize),
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invariant::Multiplicity(c) => write!(f, "{c}"),
            Invariant::Class(k) => write!(f, "[{k}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuliElement {
    pub invariant: Invariant,
    pub support: RankTuple,
    /// A section of the class, as (object, index into its sections).
    pub representative: Option<(ObjId, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildMode {
    Canonical,
    OrbitSearch { witness_budget: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinOutcome {
    Join(ElemId),
    NoUpperBound,
}

/// A finite partial abelian monoid stored as a full addition table.
#[derive(Debug, Clone)]
pub struct ModuliMonoid {
    elements: Vec<ModuliElement>,
    capacities: Vec<u32>,
    zero: ElemId,
    add: Vec<Option<ElemId>>,
    order: Order,
    by_name: HashMap<String, ElemId>,
}

impl ModuliMonoid {
    /// Builds the monoid from its addition table, deriving `≤` from the
    /// existential definition.
    pub fn from_table(
        elements: Vec<ModuliElement>,
        capacities: Vec<u32>,
        zero: ElemId,
        add: Vec<Option<ElemId>>,
    ) -> Self {
        let n = elements.len();
        assert_eq!(add.len(), n * n);
        let mut le = vec![false; n * n];
        for (k, sum) in add.iter().enumerate() {
            if let Some(y) = sum {
                le[(k / n) * n + y.0] = true;
            }
        }
        let names: Vec<String> = elements.iter().map(|e| e.invariant.to_string()).collect();
        let by_name = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), ElemId(i)))
            .collect();
        let order = Order::from_relation(names, |x, y| le[x * n + y]);
        Self {
            elements,
            capacities,
            zero,
            add,
            order,
            by_name,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ElemId> {
        (0..self.len()).map(ElemId)
    }

    pub fn elements(&self) -> &[ModuliElement] {
        &self.elements
    }

    pub fn element(&self, x: ElemId) -> &ModuliElement {
        &self.elements[x.0]
    }

    pub fn name(&self, x: ElemId) -> &str {
        self.order.name(x.0)
    }

    /// Looks an element up by its printed invariant; outer parentheses are
    /// optional.
    pub fn lookup(&self, text: &str) -> Option<ElemId> {
        let text = text.trim();
        self.by_name
            .get(text)
            .or_else(|| self.by_name.get(&format!("({text})")))
            .copied()
    }

    pub fn capacities(&self) -> &[u32] {
        &self.capacities
    }

    pub fn zero(&self) -> ElemId {
        self.zero
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn multiplicity(&self, x: ElemId) -> Option<&MultiplicityMatrix> {
        match &self.element(x).invariant {
            Invariant::Multiplicity(c) => Some(c),
            Invariant::Class(_) => None,
        }
    }

    pub fn find_matrix(&self, c: &MultiplicityMatrix) -> Option<ElemId> {
        self.lookup(&c.to_string())
    }

    pub fn support(&self, x: ElemId) -> &RankTuple {
        &self.element(x).support
    }

    pub fn add(&self, x: ElemId, y: ElemId) -> Option<ElemId> {
        self.add[x.0 * self.len() + y.0]
    }

    /// Overwrites one entry of the addition table (used to build mutants).
    pub fn set_add(&mut self, x: ElemId, y: ElemId, value: Option<ElemId>) {
        let n = self.len();
        self.add[x.0 * n + y.0] = value;
    }

    /// `x ≤ y` iff `x + z = y` for some `z`.
    pub fn leq(&self, x: ElemId, y: ElemId) -> bool {
        self.order.le(x.0, y.0)
    }

    /// Entrywise comparison of multiplicity matrices.
    pub fn leq_fast(&self, x: ElemId, y: ElemId) -> Option<bool> {
        Some(self.multiplicity(x)?.entrywise_le(self.multiplicity(y)?))
    }

    /// The unique `z` with `x + z = y`.
    pub fn subtract(&self, y: ElemId, x: ElemId) -> Result<ElemId, ModuliError> {
        self.ids()
            .find(|&z| self.add(x, z) == Some(y))
            .ok_or_else(|| ModuliError::NotDominated {
                x: self.name(x).to_string(),
                y: self.name(y).to_string(),
            })
    }

    fn raw(set: &[ElemId]) -> Vec<usize> {
        set.iter().map(|x| x.0).collect()
    }

    pub fn lower_bounds(&self, set: &[ElemId]) -> Vec<ElemId> {
        self.order
            .lower_bounds(&Self::raw(set))
            .into_iter()
            .map(ElemId)
            .collect()
    }

    pub fn upper_bounds(&self, set: &[ElemId]) -> Vec<ElemId> {
        self.order
            .upper_bounds(&Self::raw(set))
            .into_iter()
            .map(ElemId)
            .collect()
    }

    /// Greatest lower bound by enumerating all lower bounds; `None` only when
    /// no lower bound is greatest.
    pub fn meet(&self, set: &[ElemId]) -> Result<Option<ElemId>, ModuliError> {
        if set.is_empty() {
            return Err(ModuliError::EmptySet);
        }
        Ok(self.order.glb(&Self::raw(set)).map(ElemId))
    }

    /// Entrywise minimum of multiplicity matrices.
    pub fn meet_fast(&self, set: &[ElemId]) -> Option<ElemId> {
        let (first, rest) = set.split_first()?;
        let mut acc = self.multiplicity(*first)?.clone();
        for x in rest {
            acc = acc.entrywise_min(self.multiplicity(*x)?)?;
        }
        self.find_matrix(&acc)
    }

    /// `x − meet{x − s}` for a chosen upper bound `x`; `None` when `x` is not
    /// an upper bound of the set.
    pub fn join_via(&self, set: &[ElemId], x: ElemId) -> Option<ElemId> {
        let gaps = set
            .iter()
            .map(|&s| self.subtract(x, s).ok())
            .collect::<Option<Vec<_>>>()?;
        let m = self.meet(&gaps).ok()??;
        self.subtract(x, m).ok()
    }

    pub fn join(&self, set: &[ElemId]) -> Result<JoinOutcome, ModuliError> {
        if set.is_empty() {
            return Err(ModuliError::EmptySet);
        }
        let Some(&x) = self.upper_bounds(set).first() else {
            return Ok(JoinOutcome::NoUpperBound);
        };
        Ok(self
            .join_via(set, x)
            .map_or(JoinOutcome::NoUpperBound, JoinOutcome::Join))
    }

    /// Some `h` with `h + h = x`, searched exhaustively.
    pub fn halves(&self, x: ElemId) -> Vec<ElemId> {
        self.ids().filter(|&h| self.add(h, h) == Some(x)).collect()
    }
}

/// Whether projections of classes `a` and `b` fit orthogonally under a
/// generator of rank `capacities`.
fn fits(a: &RankTuple, b: &RankTuple, capacities: &[u32]) -> bool {
    a.ranks()
        .iter()
        .zip(b.ranks())
        .zip(capacities)
        .all(|((x, y), c)| x + y <= *c)
}

/// Builds `π(F)` for the hom-sheaf over a single-generator sketch.
pub fn build_moduli(
    f: &HomPresheaf,
    sketch: &TruncatedSketch,
    mode: BuildMode,
) -> Result<ModuliMonoid, ModuliError> {
    let [generator] = sketch.generators() else {
        return Err(ModuliError::UnsupportedGenerators(
            sketch.generators().len(),
        ));
    };
    let capacities = generator.rank().ranks().to_vec();
    match mode {
        BuildMode::Canonical => Ok(build_canonical(f, sketch, capacities)),
        BuildMode::OrbitSearch { witness_budget } => {
            orbit::build_orbit(f, sketch, generator, capacities, witness_budget)
        }
    }
}

fn build_canonical(
    f: &HomPresheaf,
    sketch: &TruncatedSketch,
    capacities: Vec<u32>,
) -> ModuliMonoid {
    let mut seen: HashMap<MultiplicityMatrix, (ObjId, usize)> = HashMap::new();
    for obj in (0..sketch.objects().len()).map(ObjId) {
        for (i, phi) in f.sections(obj).iter().enumerate() {
            seen.entry(multiplicity_of(phi)).or_insert((obj, i));
        }
    }
    let mut classes: Vec<(MultiplicityMatrix, (ObjId, usize))> = seen.into_iter().collect();
    classes.sort_by_key(|(c, _)| c.graded_key());
    let elements: Vec<ModuliElement> = classes
        .into_iter()
        .map(|(c, rep)| ModuliElement {
            support: c.support(),
            invariant: Invariant::Multiplicity(c),
            representative: Some(rep),
        })
        .collect();
    let index: HashMap<&MultiplicityMatrix, ElemId> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| match &e.invariant {
            Invariant::Multiplicity(c) => (c, ElemId(i)),
            Invariant::Class(_) => unreachable!(),
        })
        .collect();
    let zero = elements
        .iter()
        .position(|e| e.support.is_zero())
        .map(ElemId)
        .expect("the zero object carries the empty hom");
    let n = elements.len();
    let mut add = vec![None; n * n];
    for (x, ex) in elements.iter().enumerate() {
        for (y, ey) in elements.iter().enumerate() {
            if !fits(&ex.support, &ey.support, &capacities) {
                continue;
            }
            let (Invariant::Multiplicity(cx), Invariant::Multiplicity(cy)) =
                (&ex.invariant, &ey.invariant)
            else {
                unreachable!()
            };
            add[x * n + y] = cx.checked_add(cy).and_then(|s| index.get(&s).copied());
        }
    }
    ModuliMonoid::from_table(elements, capacities, zero, add)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BlockAlgebra;
    use crate::hom::as_presheaf;
    use crate::sketch::build_truncated_sketch;

    pub(crate) fn monoid(m: &[u32], n: &[u32]) -> ModuliMonoid {
        let m = BlockAlgebra::new(m.to_vec()).unwrap();
        let sketch = build_truncated_sketch(&m, &[m.full_projection()], 1).unwrap();
        let f = as_presheaf(&BlockAlgebra::new(n.to_vec()).unwrap(), &sketch);
        build_moduli(&f, &sketch, BuildMode::Canonical).unwrap()
    }

    /// Lattice points `c ≥ 0` with `Σ_j c_ij m_j ≤ n_i`, counted directly.
    fn oracle_count(m: &[u32], n: &[u32]) -> usize {
        m.iter()
            .map(|&cap| {
                let mut count = 0;
                let mut stack = vec![(0usize, 0u32)];
                while let Some((j, used)) = stack.pop() {
                    if j == n.len() {
                        count += 1;
                        continue;
                    }
                    let mut c = 0;
                    while used + c * n[j] <= cap {
                        stack.push((j + 1, used + c * n[j]));
                        c += 1;
                    }
                }
                count
            })
            .product()
    }

    fn e(x: &ModuliMonoid, name: &str) -> ElemId {
        x.lookup(name)
            .unwrap_or_else(|| panic!("no element {name}"))
    }

    #[test]
    fn cardinalities_match_lattice_points() {
        for (m, n) in [
            (&[2, 3][..], &[1][..]),
            (&[2, 3], &[1, 1]),
            (&[2, 3], &[2]),
            (&[3], &[1, 2]),
            (&[2, 2], &[3]),
        ] {
            assert_eq!(monoid(m, n).len(), oracle_count(m, n), "M={m:?} N={n:?}");
        }
        assert_eq!(oracle_count(&[2, 3], &[1]), 12);
        assert_eq!(oracle_count(&[2, 3], &[1, 1]), 60);
        assert_eq!(monoid(&[2, 2], &[3]).len(), 1);
    }

    #[test]
    fn addition_examples() {
        let x = monoid(&[2, 3], &[1]);
        assert_eq!(x.add(e(&x, "1,1"), e(&x, "1,1")), Some(e(&x, "2,2")));
        assert_eq!(x.add(e(&x, "2,0"), e(&x, "1,0")), None);
        for a in x.ids() {
            assert_eq!(x.add(x.zero(), a), Some(a));
        }
    }

    #[test]
    fn order_examples() {
        let x = monoid(&[2, 3], &[1]);
        assert!(x.leq(e(&x, "1,0"), e(&x, "2,2")));
        assert_eq!(x.add(e(&x, "1,0"), e(&x, "1,2")), Some(e(&x, "2,2")));
        assert!(!x.leq(e(&x, "2,0"), e(&x, "1,3")));
        assert!(x.ids().all(|a| x.leq(a, a)));
    }

    #[test]
    fn subtraction_examples() {
        let x = monoid(&[2, 3], &[1]);
        assert_eq!(x.subtract(e(&x, "2,2"), e(&x, "1,0")), Ok(e(&x, "1,2")));
        for a in x.ids() {
            assert_eq!(x.subtract(a, a), Ok(x.zero()));
        }
        assert!(matches!(
            x.subtract(e(&x, "1,0"), e(&x, "2,0")),
            Err(ModuliError::NotDominated { .. })
        ));
    }

    #[test]
    fn meet_and_join_examples() {
        let x = monoid(&[2, 3], &[1]);
        let (a, b) = (e(&x, "2,1"), e(&x, "1,3"));
        assert_eq!(x.meet(&[a, b]).unwrap(), Some(e(&x, "1,1")));
        assert_eq!(x.meet_fast(&[a, b]), Some(e(&x, "1,1")));
        assert_eq!(x.meet(&[a]).unwrap(), Some(a));
        assert_eq!(x.meet(&[a, x.zero()]).unwrap(), Some(x.zero()));
        assert_eq!(x.meet(&[]), Err(ModuliError::EmptySet));

        let top = e(&x, "2,3");
        assert_eq!(x.subtract(top, a), Ok(e(&x, "0,2")));
        assert_eq!(x.subtract(top, b), Ok(e(&x, "1,0")));
        assert_eq!(x.join_via(&[a, b], top), Some(top));
        assert_eq!(
            x.join(&[e(&x, "2,0"), e(&x, "0,3")]),
            Ok(JoinOutcome::Join(top))
        );
        assert_eq!(
            x.join(&[e(&x, "2,0"), e(&x, "1,0")]),
            Ok(JoinOutcome::Join(e(&x, "2,0")))
        );
    }

    #[test]
    fn joins_can_fail_to_exist() {
        let x = monoid(&[3, 3], &[2]);
        let (a, b) = (e(&x, "1,0"), e(&x, "0,1"));
        assert_eq!(x.join(&[a, b]), Ok(JoinOutcome::Join(e(&x, "1,1"))));
        let y = monoid(&[3], &[1, 2]);
        let (p, q) = (e(&y, "3:0"), e(&y, "1:1"));
        assert_eq!(y.join(&[p, q]), Ok(JoinOutcome::NoUpperBound));
    }

    #[test]
    fn support_examples() {
        let x = monoid(&[2, 3], &[1, 1]);
        assert_eq!(x.support(e(&x, "1:1,0:0")).ranks(), &[2, 0]);
        assert!(x.support(x.zero()).is_zero());
        let y = monoid(&[2, 3], &[2]);
        assert_eq!(y.support(e(&y, "1,1")).ranks(), &[2, 2]);
    }

    #[test]
    fn generic_order_agrees_with_entrywise() {
        let x = monoid(&[2, 3], &[1, 1]);
        for a in x.ids() {
            for b in x.ids() {
                assert_eq!(Some(x.leq(a, b)), x.leq_fast(a, b));
            }
        }
    }
}
