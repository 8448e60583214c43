//! Moduli classes found by searching pseudoisomorphism witnesses directly,
//! without using the multiplicity invariant.

use petgraph::unionfind::UnionFind;

use crate::algebra::{
    move_orthogonal, PartialPermIsometry, StandardProjection, StandardSubalgebra,
};
use crate::hom::{restrict, HomPresheaf};
use crate::sketch::{ObjId, TruncatedSketch};

use super::{fits, ElemId, Invariant, ModuliElement, ModuliError, ModuliMonoid};

struct Search<'a> {
    f: &'a HomPresheaf,
    sketch: &'a TruncatedSketch,
    offsets: Vec<usize>,
    classes: UnionFind<usize>,
    spent: usize,
    budget: usize,
}

impl Search<'_> {
    fn node(&self, obj: ObjId, idx: usize) -> usize {
        self.offsets[obj.0] + idx
    }

    fn spend(&mut self) -> Result<(), ModuliError> {
        self.spent += 1;
        if self.spent > self.budget {
            Err(ModuliError::Timeout {
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }

    /// Relates every `y ∈ F(B)` with its restriction along the
    /// pseudoisomorphism `u: A → B`.
    fn relate_along(
        &mut self,
        u: &PartialPermIsometry,
        a: ObjId,
        b: ObjId,
    ) -> Result<(), ModuliError> {
        let target = self.sketch.object(a);
        for (j, y) in self.f.sections(b).iter().enumerate() {
            self.spend()?;
            let x = restrict(y, u, target).expect("pseudoisomorphisms restrict totally");
            let i = self
                .f
                .index_of(a, &x)
                .expect("restriction lands in the sections");
            let (p, q) = (self.node(a, i), self.node(b, j));
            self.classes.union(p, q);
        }
        Ok(())
    }
}

fn scalar_object(sketch: &TruncatedSketch, p: &StandardProjection) -> ObjId {
    sketch
        .object_id(&StandardSubalgebra::scalar(p))
        .expect("scalar subalgebras under the generator are objects")
}

fn transposition(p: &StandardProjection, a: usize, b: usize) -> PartialPermIsometry {
    let labels: Vec<_> = p.labels().iter().copied().collect();
    let mut images = labels.clone();
    images.swap(a, b);
    PartialPermIsometry::new(p.ambient(), labels.into_iter().zip(images))
        .expect("same-block transposition")
}

pub(super) fn build_orbit(
    f: &HomPresheaf,
    sketch: &TruncatedSketch,
    generator: &StandardProjection,
    capacities: Vec<u32>,
    budget: usize,
) -> Result<ModuliMonoid, ModuliError> {
    let objects = sketch.objects();
    let mut offsets = Vec::with_capacity(objects.len());
    let mut total = 0;
    for o in 0..objects.len() {
        offsets.push(total);
        total += f.sections(ObjId(o)).len();
    }
    let mut search = Search {
        f,
        sketch,
        offsets,
        classes: UnionFind::new(total),
        spent: 0,
        budget,
    };

    // Inclusions with equal supports are pseudoisomorphisms inside the sketch.
    let cat = sketch.category();
    for (k, arrow) in cat.arrows().iter().enumerate() {
        let same_support = objects[arrow.source.0].support() == objects[arrow.target.0].support();
        if arrow.source != arrow.target && same_support {
            let u = sketch.isometry(crate::sketch::ArrowId(k));
            search.relate_along(&u, arrow.source, arrow.target)?;
        }
    }

    // Scalar objects of equal rank are related through the lowest-label
    // representative, which is in turn related to itself by transpositions.
    let zero = generator.ambient().zero_projection();
    let mut canonical = Vec::new();
    for (o, a) in objects.iter().enumerate() {
        if a.atoms().len() != 1 {
            continue;
        }
        let p = a.support();
        let c = move_orthogonal(&zero, &p.rank(), generator).expect("rank fits the generator");
        let co = scalar_object(sketch, &c);
        if co.0 == o {
            canonical.push(c);
            continue;
        }
        let u = PartialPermIsometry::standard_bijection(&p, &c).expect("equal ranks");
        search.relate_along(&u, ObjId(o), co)?;
    }
    for c in &canonical {
        let co = scalar_object(sketch, c);
        let labels: Vec<_> = c.labels().iter().copied().collect();
        for i in 1..labels.len() {
            if labels[i - 1].block == labels[i].block {
                search.relate_along(&transposition(c, i - 1, i), co, co)?;
            }
        }
    }

    // One representative per class, taken at a scalar (or zero) object.
    let mut rep_of_root: std::collections::BTreeMap<usize, (ObjId, usize)> = Default::default();
    for (o, a) in objects.iter().enumerate() {
        if a.atoms().len() > 1 {
            continue;
        }
        for i in 0..f.sections(ObjId(o)).len() {
            let root = search.classes.find(search.node(ObjId(o), i));
            rep_of_root.entry(root).or_insert((ObjId(o), i));
        }
    }
    let mut reps: Vec<(ObjId, usize)> = rep_of_root.values().copied().collect();
    reps.sort_by_key(|&(o, i)| {
        let rank = objects[o.0].support().rank();
        (rank.total(), std::cmp::Reverse(rank.ranks().to_vec()), o, i)
    });
    let class_of = |obj: ObjId, idx: usize| -> usize {
        let root = search.classes.find(search.node(obj, idx));
        let rep = rep_of_root[&root];
        reps.iter()
            .position(|&r| r == rep)
            .expect("every class has a representative")
    };

    let elements: Vec<ModuliElement> = reps
        .iter()
        .enumerate()
        .map(|(k, &(o, i))| ModuliElement {
            invariant: Invariant::Class(k),
            support: objects[o.0].support().rank(),
            representative: Some((o, i)),
        })
        .collect();
    let zero_class = elements
        .iter()
        .position(|e| e.support.is_zero())
        .map(ElemId)
        .expect("the zero object carries a section");

    let n = elements.len();
    let mut add = vec![None; n * n];
    for (a, &(po, pi)) in reps.iter().enumerate() {
        for (b, &(qo, qi)) in reps.iter().enumerate() {
            if !fits(&elements[a].support, &elements[b].support, &capacities) {
                continue;
            }
            add[a * n + b] = sum_class(f, sketch, generator, (po, pi), (qo, qi))
                .map(|(o, i)| ElemId(class_of(o, i)));
        }
    }
    Ok(ModuliMonoid::from_table(
        elements, capacities, zero_class, add,
    ))
}

/// The section of `F(ℂp ⊕ ℂq')` restricting to `x` and to `y` moved onto
/// `q'`, where `q'` is `q` moved orthogonally to `p` inside the generator.
fn sum_class(
    f: &HomPresheaf,
    sketch: &TruncatedSketch,
    generator: &StandardProjection,
    (po, pi): (ObjId, usize),
    (qo, qi): (ObjId, usize),
) -> Option<(ObjId, usize)> {
    let p = sketch.object(po).support();
    let q = sketch.object(qo).support();
    if p.is_zero() {
        return Some((qo, qi));
    }
    if q.is_zero() {
        return Some((po, pi));
    }
    let moved = move_orthogonal(&p, &q.rank(), generator).ok()?;
    let mo = scalar_object(sketch, &moved);
    let v = PartialPermIsometry::standard_bijection(&moved, &q).ok()?;
    let y = restrict(&f.sections(qo)[qi], &v, sketch.object(mo)).ok()?;
    let yi = f.index_of(mo, &y)?;
    let sum = StandardSubalgebra::scalar(&p)
        .direct_sum(&StandardSubalgebra::scalar(&moved))
        .ok()?;
    let so = sketch.object_id(&sum)?;
    let left = f.table().along(sketch.inclusion(po, so)?)?;
    let right = f.table().along(sketch.inclusion(mo, so)?)?;
    let z = (0..left.len()).find(|&z| left[z] == pi && right[z] == yi)?;
    Some((so, z))
}
