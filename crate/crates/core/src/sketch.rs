//! Finite sketches (categories with distinguished cocones), presheaves given
//! by tables, and the sheaf-condition checker.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::algebra::{
    BlockAlgebra, Label, PartialPermIsometry, StandardProjection, StandardSubalgebra,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SketchError {
    #[error("depth must be at least 1")]
    InvalidDepth,
    #[error("generator {0} lives in a different ambient algebra")]
    ForeignGenerator(StandardProjection),
    #[error("truncation exceeds the object cap of {cap}")]
    SizeLimitExceeded { cap: usize },
    #[error("ambient algebra has {0} labels; at most 64 are supported")]
    TooManyLabels(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrow {
    pub source: ObjId,
    pub target: ObjId,
}

#[derive(Debug, Clone)]
enum Composition {
    /// Explicit table keyed by `(first, second)`.
    Table(HashMap<(ArrowId, ArrowId), ArrowId>),
    /// At most one arrow between any two objects.
    Thin(HashMap<(ObjId, ObjId), ArrowId>),
}

/// A finite category: objects, arrows, identities and a total composition on
/// composable pairs.
#[derive(Debug, Clone)]
pub struct FiniteCategory {
    object_names: Vec<String>,
    arrows: Vec<Arrow>,
    identities: Vec<ArrowId>,
    outgoing: Vec<Vec<ArrowId>>,
    composition: Composition,
}

impl FiniteCategory {
    /// Builds a category from explicit data. `arrows` must already contain
    /// one identity per object, listed in `identities`; `composition` maps
    /// `(first, second)` to the composite `second ∘ first`.
    pub fn from_table(
        object_names: Vec<String>,
        arrows: Vec<Arrow>,
        identities: Vec<ArrowId>,
        composition: HashMap<(ArrowId, ArrowId), ArrowId>,
    ) -> Self {
        let outgoing = outgoing_index(object_names.len(), &arrows);
        Self {
            object_names,
            arrows,
            identities,
            outgoing,
            composition: Composition::Table(composition),
        }
    }

    /// Builds a thin category (a preorder) from a list of non-identity arrows;
    /// identities are appended.
    pub fn thin(object_names: Vec<String>, relations: &[(ObjId, ObjId)]) -> Self {
        let n = object_names.len();
        let mut arrows: Vec<Arrow> = (0..n)
            .map(|i| Arrow {
                source: ObjId(i),
                target: ObjId(i),
            })
            .collect();
        let identities = (0..n).map(ArrowId).collect();
        let mut hom = HashMap::new();
        for i in 0..n {
            hom.insert((ObjId(i), ObjId(i)), ArrowId(i));
        }
        for &(source, target) in relations {
            if source != target && !hom.contains_key(&(source, target)) {
                hom.insert((source, target), ArrowId(arrows.len()));
                arrows.push(Arrow { source, target });
            }
        }
        let outgoing = outgoing_index(n, &arrows);
        Self {
            object_names,
            arrows,
            identities,
            outgoing,
            composition: Composition::Thin(hom),
        }
    }

    pub fn object_count(&self) -> usize {
        self.object_names.len()
    }

    pub fn object_name(&self, obj: ObjId) -> &str {
        &self.object_names[obj.0]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, id: ArrowId) -> Arrow {
        self.arrows[id.0]
    }

    pub fn identity(&self, obj: ObjId) -> ArrowId {
        self.identities[obj.0]
    }

    pub fn outgoing(&self, obj: ObjId) -> &[ArrowId] {
        &self.outgoing[obj.0]
    }

    /// The arrow `source → target` of a thin category.
    pub fn hom(&self, source: ObjId, target: ObjId) -> Option<ArrowId> {
        match &self.composition {
            Composition::Thin(hom) => hom.get(&(source, target)).copied(),
            Composition::Table(_) => self
                .outgoing(source)
                .iter()
                .copied()
                .find(|a| self.arrow(*a).target == target),
        }
    }

    /// `second ∘ first`, or `None` when not composable or missing from the table.
    pub fn compose(&self, first: ArrowId, second: ArrowId) -> Option<ArrowId> {
        let f = self.arrow(first);
        let g = self.arrow(second);
        if f.target != g.source {
            return None;
        }
        match &self.composition {
            Composition::Table(t) => t.get(&(first, second)).copied(),
            Composition::Thin(hom) => hom.get(&(f.source, g.target)).copied(),
        }
    }

    /// All composable pairs `(f, g)` with `g ∘ f` defined.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (ArrowId, ArrowId)> + '_ {
        (0..self.arrows.len()).flat_map(move |f| {
            let target = self.arrows[f].target;
            self.outgoing(target).iter().map(move |&g| (ArrowId(f), g))
        })
    }

    /// Verifies identity and associativity laws; returns the first violation.
    pub fn check_laws(&self) -> Result<(), String> {
        for (f, arrow) in self.arrows.iter().enumerate() {
            let f = ArrowId(f);
            if self.compose(self.identity(arrow.source), f) != Some(f)
                || self.compose(f, self.identity(arrow.target)) != Some(f)
            {
                return Err(format!("identity law fails at arrow {}", f.0));
            }
        }
        for (f, g) in self.composable_pairs() {
            let gf = self
                .compose(f, g)
                .ok_or_else(|| format!("composite of {} and {} missing", f.0, g.0))?;
            for &h in self.outgoing(self.arrow(g).target) {
                let left = self.compose(gf, h);
                let right = self.compose(g, h).and_then(|hg| self.compose(f, hg));
                if left != right || left.is_none() {
                    return Err(format!(
                        "associativity fails at ({}, {}, {})",
                        f.0, g.0, h.0
                    ));
                }
            }
        }
        Ok(())
    }
}

fn outgoing_index(n: usize, arrows: &[Arrow]) -> Vec<Vec<ArrowId>> {
    let mut outgoing = vec![Vec::new(); n];
    for (i, a) in arrows.iter().enumerate() {
        outgoing[a.source.0].push(ArrowId(i));
    }
    outgoing
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoconeKind {
    Pushout,
    Coproduct,
}

/// A non-identity arrow of a cocone's diagram, with its endpoints given as
/// positions in the diagram's object list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagramArrow {
    pub arrow: ArrowId,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone)]
pub struct Cocone {
    pub name: String,
    pub kind: CoconeKind,
    pub objects: Vec<ObjId>,
    pub arrows: Vec<DiagramArrow>,
    pub apex: ObjId,
    /// One leg per diagram object, parallel to `objects`.
    pub legs: Vec<ArrowId>,
}

/// Checks that every triangle of the cocone commutes and that legs and
/// diagram arrows have the declared endpoints.
pub fn check_cocone(c: &Cocone, cat: &FiniteCategory) -> bool {
    if c.legs.len() != c.objects.len() {
        return false;
    }
    let legs_ok = c.objects.iter().zip(&c.legs).all(|(d, leg)| {
        let a = cat.arrow(*leg);
        a.source == *d && a.target == c.apex
    });
    legs_ok
        && c.arrows.iter().all(|da| {
            let a = cat.arrow(da.arrow);
            a.source == c.objects[da.from]
                && a.target == c.objects[da.to]
                && cat.compose(da.arrow, c.legs[da.to]) == Some(c.legs[da.from])
        })
}

/// Finite fragment of the subalgebra category of `M`.
///
/// Objects are the abelian subalgebras supported under some generator with at
/// most `2^(depth+1)` atoms, i.e. joins of up to `depth + 1` cuts; arrows are
/// the inclusions between them (the partial isometry is `1_A`).
#[derive(Debug, Clone)]
pub struct TruncatedSketch {
    ambient: BlockAlgebra,
    generators: Vec<StandardProjection>,
    depth: usize,
    objects: Vec<StandardSubalgebra>,
    index: HashMap<StandardSubalgebra, ObjId>,
    category: FiniteCategory,
    cocones: Vec<Cocone>,
}

pub const DEFAULT_OBJECT_CAP: usize = 20_000;

pub fn build_truncated_sketch(
    ambient: &BlockAlgebra,
    generators: &[StandardProjection],
    depth: usize,
) -> Result<TruncatedSketch, SketchError> {
    build_truncated_sketch_capped(ambient, generators, depth, DEFAULT_OBJECT_CAP)
}

pub fn build_truncated_sketch_capped(
    ambient: &BlockAlgebra,
    generators: &[StandardProjection],
    depth: usize,
    max_objects: usize,
) -> Result<TruncatedSketch, SketchError> {
    if depth == 0 {
        return Err(SketchError::InvalidDepth);
    }
    if ambient.total_labels() > 64 {
        return Err(SketchError::TooManyLabels(ambient.total_labels()));
    }
    if let Some(g) = generators.iter().find(|g| g.ambient() != ambient) {
        return Err(SketchError::ForeignGenerator(g.clone()));
    }
    let max_atoms = 1usize
        .checked_shl(depth as u32 + 1)
        .unwrap_or(usize::MAX)
        .min(64);

    let mut objects: Vec<StandardSubalgebra> = vec![StandardSubalgebra::zero(ambient)];
    let mut seen: HashSet<StandardSubalgebra> = objects.iter().cloned().collect();
    for g in generators {
        for sub in g.subprojections() {
            let labels: Vec<Label> = sub.labels().iter().copied().collect();
            for partition in set_partitions(&labels, max_atoms) {
                let obj = StandardSubalgebra::new(
                    ambient,
                    partition.into_iter().map(|cell| cell.into_iter().collect()),
                )
                .expect("partition cells are disjoint labels of the ambient");
                if seen.insert(obj.clone()) {
                    objects.push(obj);
                    if objects.len() > max_objects {
                        return Err(SketchError::SizeLimitExceeded { cap: max_objects });
                    }
                }
            }
        }
    }
    objects.sort_by(|a, b| {
        let la = a.support().labels().len();
        let lb = b.support().labels().len();
        la.cmp(&lb).then_with(|| a.cmp(b))
    });
    let index: HashMap<StandardSubalgebra, ObjId> = objects
        .iter()
        .enumerate()
        .map(|(i, o)| (o.clone(), ObjId(i)))
        .collect();

    // Bitmask form of each object for the quadratic inclusion scan.
    let bit: BTreeMap<Label, u32> = ambient
        .labels()
        .enumerate()
        .map(|(i, l)| (l, i as u32))
        .collect();
    let masks: Vec<(u64, Vec<u64>)> = objects
        .iter()
        .map(|o| {
            let atoms: Vec<u64> = o
                .atoms()
                .iter()
                .map(|a| a.iter().fold(0u64, |m, l| m | (1 << bit[l])))
                .collect();
            (atoms.iter().fold(0, |m, a| m | a), atoms)
        })
        .collect();
    let mut relations = Vec::new();
    for (i, (sup_a, atoms_a)) in masks.iter().enumerate() {
        for (j, (sup_b, atoms_b)) in masks.iter().enumerate() {
            if i == j || sup_a & !sup_b != 0 {
                continue;
            }
            let inside = atoms_a
                .iter()
                .all(|&am| atoms_b.iter().all(|&bm| bm & am == 0 || bm & !am == 0));
            if inside {
                relations.push((ObjId(i), ObjId(j)));
            }
        }
    }
    let names = objects.iter().map(|o| o.to_string()).collect();
    let category = FiniteCategory::thin(names, &relations);

    let mut sketch = TruncatedSketch {
        ambient: ambient.clone(),
        generators: generators.to_vec(),
        depth,
        objects,
        index,
        category,
        cocones: Vec::new(),
    };
    sketch.cocones = sketch.generate_cocones();
    Ok(sketch)
}

impl TruncatedSketch {
    pub fn ambient(&self) -> &BlockAlgebra {
        &self.ambient
    }

    pub fn generators(&self) -> &[StandardProjection] {
        &self.generators
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn category(&self) -> &FiniteCategory {
        &self.category
    }

    pub fn cocones(&self) -> &[Cocone] {
        &self.cocones
    }

    pub fn objects(&self) -> &[StandardSubalgebra] {
        &self.objects
    }

    pub fn object(&self, id: ObjId) -> &StandardSubalgebra {
        &self.objects[id.0]
    }

    pub fn object_id(&self, obj: &StandardSubalgebra) -> Option<ObjId> {
        self.index.get(obj).copied()
    }

    pub fn zero_object(&self) -> ObjId {
        self.object_id(&StandardSubalgebra::zero(&self.ambient))
            .expect("the zero algebra is always present")
    }

    /// Underlying partial isometry of an arrow: the support of its source.
    pub fn isometry(&self, arrow: ArrowId) -> PartialPermIsometry {
        let a = self.category.arrow(arrow);
        PartialPermIsometry::identity(&self.object(a.source).support())
    }

    pub fn inclusion(&self, from: ObjId, to: ObjId) -> Option<ArrowId> {
        self.category.hom(from, to)
    }

    fn generate_cocones(&self) -> Vec<Cocone> {
        let mut cocones = Vec::new();
        let zero = self.zero_object();
        cocones.push(Cocone {
            name: "coproduct () -> <>".to_owned(),
            kind: CoconeKind::Coproduct,
            objects: Vec::new(),
            arrows: Vec::new(),
            apex: zero,
            legs: Vec::new(),
        });

        // Pushout-type: ℂp with two distinct nontrivial cuts, into their join.
        for (pid, obj) in self.objects.iter().enumerate() {
            if obj.atoms().len() != 1 {
                continue;
            }
            let p = obj.support();
            let first = *p.labels().iter().next().expect("non-empty atom");
            let cuts: Vec<(StandardSubalgebra, ObjId)> = p
                .subprojections()
                .into_iter()
                .filter(|q| q.labels().contains(&first) && *q != p)
                .filter_map(|q| {
                    let cut = StandardSubalgebra::cut(&p, &q).expect("q ≤ p");
                    let id = self.object_id(&cut)?;
                    Some((cut, id))
                })
                .collect();
            let pid = ObjId(pid);
            for (i, (c1, id1)) in cuts.iter().enumerate() {
                for (c2, id2) in &cuts[i + 1..] {
                    let Some(apex) = c1.join(c2).and_then(|j| self.object_id(&j)) else {
                        continue;
                    };
                    let arrow = |a, b| self.inclusion(a, b).expect("inclusion exists");
                    cocones.push(Cocone {
                        name: format!("pushout at {obj} cuts {c1},{c2} -> {}", self.object(apex)),
                        kind: CoconeKind::Pushout,
                        objects: vec![pid, *id1, *id2],
                        arrows: vec![
                            DiagramArrow {
                                arrow: arrow(pid, *id1),
                                from: 0,
                                to: 1,
                            },
                            DiagramArrow {
                                arrow: arrow(pid, *id2),
                                from: 0,
                                to: 2,
                            },
                        ],
                        apex,
                        legs: vec![arrow(pid, apex), arrow(*id1, apex), arrow(*id2, apex)],
                    });
                }
            }
        }

        // Coproduct-type: groupings of an object's atoms into ≥ 2 summands.
        for (did, obj) in self.objects.iter().enumerate() {
            let atoms = obj.atoms();
            if atoms.len() < 2 {
                continue;
            }
            let apex = ObjId(did);
            for grouping in set_partitions(atoms, atoms.len()) {
                if grouping.len() < 2 {
                    continue;
                }
                let summands: Option<Vec<ObjId>> = grouping
                    .into_iter()
                    .map(|cells| {
                        let sub = StandardSubalgebra::new(&self.ambient, cells)
                            .expect("atoms are disjoint");
                        self.object_id(&sub)
                    })
                    .collect();
                let Some(summands) = summands else { continue };
                let names: Vec<String> = summands
                    .iter()
                    .map(|s| self.object(*s).to_string())
                    .collect();
                let legs = summands
                    .iter()
                    .map(|s| self.inclusion(*s, apex).expect("summand includes"))
                    .collect();
                cocones.push(Cocone {
                    name: format!("coproduct ({}) -> {obj}", names.join(" + ")),
                    kind: CoconeKind::Coproduct,
                    objects: summands,
                    arrows: Vec::new(),
                    apex,
                    legs,
                });
            }
        }
        cocones
    }
}

/// All set partitions of `items` into at most `max_blocks` blocks, in
/// restricted-growth order.
pub(crate) fn set_partitions<T: Clone>(items: &[T], max_blocks: usize) -> Vec<Vec<Vec<T>>> {
    fn go<T: Clone>(
        items: &[T],
        i: usize,
        max_blocks: usize,
        current: &mut Vec<Vec<T>>,
        out: &mut Vec<Vec<Vec<T>>>,
    ) {
        if i == items.len() {
            out.push(current.clone());
            return;
        }
        for b in 0..current.len() {
            current[b].push(items[i].clone());
            go(items, i + 1, max_blocks, current, out);
            current[b].pop();
        }
        if current.len() < max_blocks {
            current.push(vec![items[i].clone()]);
            go(items, i + 1, max_blocks, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    if items.is_empty() {
        out.push(Vec::new());
        return out;
    }
    if max_blocks > 0 {
        go(items, 0, max_blocks, &mut Vec::new(), &mut out);
    }
    out
}

/// A contravariant functor into finite sets, given by tables.
///
/// Elements of `F(A)` are the indices `0..size(A)`. An arrow `f: A → B` acts
/// as a function `F(B) → F(A)` stored as a vector indexed by `F(B)`. Arrows
/// on which the functor is not total are recorded as dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresheafTable {
    sizes: Vec<usize>,
    arrows: Vec<Arrow>,
    along: Vec<Option<Vec<usize>>>,
    names: Vec<Vec<String>>,
}

impl PresheafTable {
    pub fn new(
        cat: &FiniteCategory,
        sizes: Vec<usize>,
        along: Vec<Option<Vec<usize>>>,
        names: Vec<Vec<String>>,
    ) -> Self {
        assert_eq!(sizes.len(), cat.object_count());
        assert_eq!(along.len(), cat.arrows().len());
        assert_eq!(names.len(), sizes.len());
        Self {
            sizes,
            arrows: cat.arrows().to_vec(),
            along,
            names,
        }
    }

    /// The presheaf with `F(A)` of size `size` for every object; arrows act by
    /// the identity-like map when `size ≤ 1`, and by index for larger sizes.
    pub fn constant(cat: &FiniteCategory, size: usize) -> Self {
        Self {
            sizes: vec![size; cat.object_count()],
            arrows: cat.arrows().to_vec(),
            along: vec![Some((0..size).collect()); cat.arrows().len()],
            names: vec![(0..size).map(|i| i.to_string()).collect(); cat.object_count()],
        }
    }

    pub fn size(&self, obj: ObjId) -> usize {
        self.sizes[obj.0]
    }

    pub fn total_size(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn along(&self, arrow: ArrowId) -> Option<&[usize]> {
        self.along[arrow.0].as_deref()
    }

    pub fn element_name(&self, obj: ObjId, idx: usize) -> &str {
        &self.names[obj.0][idx]
    }

    pub fn dropped_arrows(&self) -> usize {
        self.along.iter().filter(|a| a.is_none()).count()
    }

    /// Overwrites one entry of an arrow's table (used to build mutants).
    pub fn set_along(&mut self, arrow: ArrowId, element: usize, value: usize) {
        if let Some(table) = self.along[arrow.0].as_mut() {
            table[element] = value;
        }
    }

    /// Removes element `idx` of `F(obj)`, together with every element that
    /// restricts onto a removed element, so the result is still a functor.
    /// Returns the number of elements removed.
    pub fn delete_element(&mut self, obj: ObjId, idx: usize) -> usize {
        let mut doomed: Vec<HashSet<usize>> = vec![HashSet::new(); self.sizes.len()];
        let mut work = vec![(obj, idx)];
        doomed[obj.0].insert(idx);
        while let Some((o, x)) = work.pop() {
            for (a, arrow) in self.arrows.iter().enumerate() {
                if arrow.source != o || arrow.target == o {
                    continue;
                }
                let Some(table) = &self.along[a] else {
                    continue;
                };
                for (y, &img) in table.iter().enumerate() {
                    if img == x && doomed[arrow.target.0].insert(y) {
                        work.push((arrow.target, y));
                    }
                }
            }
        }
        let remap: Vec<Vec<Option<usize>>> = doomed
            .iter()
            .zip(&self.sizes)
            .map(|(gone, &n)| {
                let mut next = 0;
                (0..n)
                    .map(|i| {
                        if gone.contains(&i) {
                            None
                        } else {
                            next += 1;
                            Some(next - 1)
                        }
                    })
                    .collect()
            })
            .collect();
        for (a, arrow) in self.arrows.iter().enumerate() {
            if let Some(table) = &self.along[a] {
                let rebuilt: Vec<usize> = table
                    .iter()
                    .enumerate()
                    .filter(|(y, _)| remap[arrow.target.0][*y].is_some())
                    .map(|(_, &x)| remap[arrow.source.0][x].expect("closed under restriction"))
                    .collect();
                self.along[a] = Some(rebuilt);
            }
        }
        for (o, gone) in doomed.iter().enumerate() {
            let mut i = 0;
            self.names[o].retain(|_| {
                i += 1;
                !gone.contains(&(i - 1))
            });
            self.sizes[o] -= gone.len();
        }
        doomed.iter().map(HashSet::len).sum()
    }
}

/// Result of testing one cocone against a presheaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitCheck {
    pub passed: bool,
    pub apex_size: usize,
    pub families: usize,
    pub injective: bool,
}

/// Checks that `F` sends the cocone to a limiting cone: the canonical map from
/// `F(apex)` to the set of compatible families over the diagram is a bijection.
/// Returns `None` when some arrow involved was dropped from the table.
pub fn check_is_limit(f: &PresheafTable, c: &Cocone) -> Option<LimitCheck> {
    let legs: Vec<&[usize]> = c.legs.iter().map(|l| f.along(*l)).collect::<Option<_>>()?;
    let arrows: Vec<(&[usize], usize, usize)> = c
        .arrows
        .iter()
        .map(|da| f.along(da.arrow).map(|t| (t, da.from, da.to)))
        .collect::<Option<_>>()?;
    let sizes: Vec<usize> = c.objects.iter().map(|o| f.size(*o)).collect();

    let compatible = |family: &[usize]| {
        arrows
            .iter()
            .all(|(t, from, to)| t[family[*to]] == family[*from])
    };

    let families = count_families(&sizes, &arrows);
    let apex_size = f.size(c.apex);
    let mut images = HashSet::with_capacity(apex_size);
    let mut all_compatible = true;
    for x in 0..apex_size {
        let family: Vec<usize> = legs.iter().map(|leg| leg[x]).collect();
        all_compatible &= compatible(&family);
        images.insert(family);
    }
    let injective = images.len() == apex_size;
    Some(LimitCheck {
        passed: injective && all_compatible && families == apex_size,
        apex_size,
        families,
        injective,
    })
}

/// Number of tuples `(x_d)` with `t(x_to) = x_from` for every diagram arrow.
fn count_families(sizes: &[usize], arrows: &[(&[usize], usize, usize)]) -> usize {
    fn go(
        i: usize,
        sizes: &[usize],
        arrows: &[(&[usize], usize, usize)],
        family: &mut Vec<usize>,
    ) -> usize {
        if i == sizes.len() {
            return 1;
        }
        let mut total = 0;
        for x in 0..sizes[i] {
            family.push(x);
            let ok = arrows.iter().all(|(t, from, to)| {
                let (from, to) = (*from, *to);
                from.max(to) != i || t[family[to]] == family[from]
            });
            if ok {
                total += go(i + 1, sizes, arrows, family);
            }
            family.pop();
        }
        total
    }
    go(0, sizes, arrows, &mut Vec::with_capacity(sizes.len()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoconeStatus {
    Pass,
    Fail { apex_size: usize, families: usize },
    Skipped,
}

#[derive(Debug, Clone)]
pub struct SheafReport {
    pub functoriality_failures: Vec<String>,
    pub dropped_arrows: usize,
    pub cocones: Vec<(String, CoconeStatus)>,
}

impl SheafReport {
    pub fn functorial(&self) -> bool {
        self.functoriality_failures.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.functorial() && self.first_failure().is_none()
    }

    pub fn checked(&self) -> usize {
        self.cocones
            .iter()
            .filter(|(_, s)| *s != CoconeStatus::Skipped)
            .count()
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.cocones
            .iter()
            .find(|(_, s)| matches!(s, CoconeStatus::Fail { .. }))
            .map(|(n, _)| n.as_str())
    }
}

impl fmt::Display for SheafReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.functorial() {
            writeln!(f, "functoriality: ok")?;
        } else {
            writeln!(
                f,
                "functoriality: {} failures",
                self.functoriality_failures.len()
            )?;
            for msg in self.functoriality_failures.iter().take(5) {
                writeln!(f, "  {msg}")?;
            }
        }
        let failed: Vec<_> = self
            .cocones
            .iter()
            .filter(|(_, s)| matches!(s, CoconeStatus::Fail { .. }))
            .collect();
        write!(
            f,
            "cocones: {} checked, {} failed, {} dropped arrows",
            self.checked(),
            failed.len(),
            self.dropped_arrows
        )?;
        for (name, status) in failed.iter().take(5) {
            write!(f, "\n  {name}: {status:?}")?;
        }
        Ok(())
    }
}

/// Checks functoriality (identities and composites, reported first) and then
/// the limit condition on every distinguished cocone.
pub fn check_sheaf(f: &PresheafTable, sketch: &TruncatedSketch) -> SheafReport {
    check_sheaf_on(f, sketch.category(), sketch.cocones())
}

pub fn check_sheaf_on(f: &PresheafTable, cat: &FiniteCategory, cocones: &[Cocone]) -> SheafReport {
    let mut failures = Vec::new();
    for obj in 0..cat.object_count() {
        let id = cat.identity(ObjId(obj));
        if let Some(t) = f.along(id) {
            if t.iter().enumerate().any(|(i, &x)| i != x) {
                failures.push(format!(
                    "identity at {} acts non-trivially",
                    cat.object_name(ObjId(obj))
                ));
            }
        }
    }
    for (first, second) in cat.composable_pairs() {
        let Some(composite) = cat.compose(first, second) else {
            failures.push(format!(
                "composite of arrows {} and {} missing",
                first.0, second.0
            ));
            continue;
        };
        let (Some(tf), Some(tg), Some(th)) = (f.along(first), f.along(second), f.along(composite))
        else {
            continue;
        };
        if th.len() != tg.len() || th.iter().zip(tg).any(|(&h, &g)| tf.get(g) != Some(&h)) {
            let a = cat.arrow(first);
            let b = cat.arrow(second);
            failures.push(format!(
                "F({} -> {} -> {}) differs from the composite of restrictions",
                cat.object_name(a.source),
                cat.object_name(a.target),
                cat.object_name(b.target)
            ));
        }
    }
    let cocones = cocones
        .iter()
        .map(|c| {
            let status = match check_is_limit(f, c) {
                None => CoconeStatus::Skipped,
                Some(r) if r.passed => CoconeStatus::Pass,
                Some(r) => CoconeStatus::Fail {
                    apex_size: r.apex_size,
                    families: r.families,
                },
            };
            (c.name.clone(), status)
        })
        .collect();
    SheafReport {
        functoriality_failures: failures,
        dropped_arrows: f.dropped_arrows(),
        cocones,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(blocks: &[u32]) -> BlockAlgebra {
        BlockAlgebra::new(blocks.to_vec()).unwrap()
    }

    #[test]
    fn set_partitions_match_bell_numbers() {
        let items: Vec<u8> = (0..5).collect();
        assert_eq!(set_partitions(&items, 5).len(), 52);
        // Stirling numbers: S(5,1)+S(5,2)+S(5,3)+S(5,4) = 1+15+25+10.
        assert_eq!(set_partitions(&items, 4).len(), 51);
        assert_eq!(set_partitions::<u8>(&[], 3).len(), 1);
    }

    #[test]
    fn two_label_sketch_has_hand_counted_objects() {
        let m = alg(&[2]);
        let s = build_truncated_sketch(&m, &[m.full_projection()], 1).unwrap();
        // 0, ℂ{1.1}, ℂ{1.2}, ℂ{1.1,1.2}, ℂ{1.1}⊕ℂ{1.2}
        assert_eq!(s.objects().len(), 5);
        let names: Vec<String> = s.objects().iter().map(|o| o.to_string()).collect();
        assert!(names.contains(&"<1.1,1.2>".to_owned()));
        assert!(names.contains(&"<1.1|1.2>".to_owned()));
        let empty = &s.cocones()[0];
        assert!(empty.objects.is_empty() && empty.apex == s.zero_object());
        s.category().check_laws().unwrap();
    }

    #[test]
    fn empty_generator_list_gives_zero_sketch() {
        let m = alg(&[2, 3]);
        let s = build_truncated_sketch(&m, &[], 1).unwrap();
        assert_eq!(s.objects().len(), 1);
        assert_eq!(s.cocones().len(), 1);
        assert_eq!(s.cocones()[0].kind, CoconeKind::Coproduct);
    }

    #[test]
    fn full_generator_cocones_commute() {
        let m = alg(&[2, 3]);
        let s = build_truncated_sketch(&m, &[m.full_projection()], 1).unwrap();
        // Bell(6) = 203 abelian subalgebras, minus the 5-atom one.
        assert_eq!(s.objects().len(), 202);
        assert!(s.cocones().iter().any(|c| c.kind == CoconeKind::Pushout));
        for c in s.cocones() {
            assert!(check_cocone(c, s.category()), "{}", c.name);
        }
    }

    #[test]
    fn broken_leg_fails_cocone_check() {
        let m = alg(&[2, 3]);
        let s = build_truncated_sketch(&m, &[m.full_projection()], 1).unwrap();
        let mut c = s
            .cocones()
            .iter()
            .find(|c| c.kind == CoconeKind::Pushout)
            .unwrap()
            .clone();
        c.legs[1] = c.legs[0];
        assert!(!check_cocone(&c, s.category()));
    }

    #[test]
    fn size_cap_and_depth_are_enforced() {
        let m = alg(&[2, 3]);
        assert_eq!(
            build_truncated_sketch_capped(&m, &[m.full_projection()], 1, 10).unwrap_err(),
            SketchError::SizeLimitExceeded { cap: 10 }
        );
        assert_eq!(
            build_truncated_sketch(&m, &[], 0).unwrap_err(),
            SketchError::InvalidDepth
        );
    }

    #[test]
    fn single_object_identity_cocone_is_limit() {
        let cat = FiniteCategory::thin(vec!["d".into()], &[]);
        let c = Cocone {
            name: "id".into(),
            kind: CoconeKind::Coproduct,
            objects: vec![ObjId(0)],
            arrows: vec![],
            apex: ObjId(0),
            legs: vec![cat.identity(ObjId(0))],
        };
        assert!(check_cocone(&c, &cat));
        let f = PresheafTable::constant(&cat, 3);
        assert!(check_is_limit(&f, &c).unwrap().passed);
    }

    #[test]
    fn empty_coproduct_needs_singleton() {
        let cat = FiniteCategory::thin(vec!["0".into()], &[]);
        let c = Cocone {
            name: "empty".into(),
            kind: CoconeKind::Coproduct,
            objects: vec![],
            arrows: vec![],
            apex: ObjId(0),
            legs: vec![],
        };
        assert!(
            check_is_limit(&PresheafTable::constant(&cat, 1), &c)
                .unwrap()
                .passed
        );
        assert!(
            !check_is_limit(&PresheafTable::constant(&cat, 2), &c)
                .unwrap()
                .passed
        );
        assert!(
            !check_is_limit(&PresheafTable::constant(&cat, 0), &c)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn table_category_laws() {
        // Two objects, one non-identity arrow a: 0 → 1.
        let arrows = vec![
            Arrow {
                source: ObjId(0),
                target: ObjId(0),
            },
            Arrow {
                source: ObjId(1),
                target: ObjId(1),
            },
            Arrow {
                source: ObjId(0),
                target: ObjId(1),
            },
        ];
        let mut comp = HashMap::new();
        comp.insert((ArrowId(0), ArrowId(0)), ArrowId(0));
        comp.insert((ArrowId(1), ArrowId(1)), ArrowId(1));
        comp.insert((ArrowId(0), ArrowId(2)), ArrowId(2));
        comp.insert((ArrowId(2), ArrowId(1)), ArrowId(2));
        let cat = FiniteCategory::from_table(
            vec!["x".into(), "y".into()],
            arrows,
            vec![ArrowId(0), ArrowId(1)],
            comp.clone(),
        );
        cat.check_laws().unwrap();
        comp.remove(&(ArrowId(2), ArrowId(1)));
        let broken = FiniteCategory::from_table(
            vec!["x".into(), "y".into()],
            cat.arrows().to_vec(),
            vec![ArrowId(0), ArrowId(1)],
            comp,
        );
        assert!(broken.check_laws().is_err());
    }

    #[test]
    fn constant_singleton_is_a_sheaf_and_mutants_are_caught() {
        let m = alg(&[2]);
        let s = build_truncated_sketch(&m, &[m.full_projection()], 1).unwrap();
        let f = PresheafTable::constant(s.category(), 1);
        let report = check_sheaf(&f, &s);
        assert!(report.passed(), "{report}");

        let mut two = PresheafTable::constant(s.category(), 2);
        let by_name = |n: &str| ObjId(s.objects().iter().position(|o| o.to_string() == n).unwrap());
        let arrow = s.inclusion(by_name("<1.1>"), by_name("<1.1|1.2>")).unwrap();
        two.set_along(arrow, 0, 1);
        let report = check_sheaf(&two, &s);
        assert!(!report.functorial());
    }
}
