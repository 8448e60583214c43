use vnlab_core::algebra::{BlockAlgebra, StandardProjection, StandardSubalgebra};
use vnlab_core::hom::{as_presheaf, enumerate_homs, HomPresheaf};
use vnlab_core::sketch::{
    build_truncated_sketch, check_cocone, check_is_limit, check_sheaf, Cocone, CoconeKind,
    DiagramArrow, ObjId, TruncatedSketch,
};

fn alg(blocks: &[u32]) -> BlockAlgebra {
    BlockAlgebra::new(blocks.to_vec()).unwrap()
}

fn full_sketch(m: &BlockAlgebra) -> TruncatedSketch {
    build_truncated_sketch(m, &[m.full_projection()], 1).unwrap()
}

fn object_named(sketch: &TruncatedSketch, name: &str) -> ObjId {
    (0..sketch.objects().len())
        .map(ObjId)
        .find(|&o| sketch.object(o).to_string() == name)
        .unwrap_or_else(|| panic!("no object {name}"))
}

fn assert_sheaf(m: &[u32], n: &[u32]) -> HomPresheaf {
    let m = alg(m);
    let sketch = full_sketch(&m);
    let f = as_presheaf(&alg(n), &sketch);
    let report = check_sheaf(f.table(), &sketch);
    assert!(report.passed(), "M={m} N={n:?}\n{report}");
    f
}

#[test]
fn single_block_pushout_is_limiting() {
    // Both standard cuts of p=(2) give the same algebra, so the pushout of
    // ℂp along its two diagonal cuts has the cut algebra as apex.
    let m = alg(&[2]);
    let sketch = full_sketch(&m);
    let f = as_presheaf(&alg(&[1]), &sketch);
    let scalar = object_named(&sketch, "<1.1,1.2>");
    let cut = object_named(&sketch, "<1.1|1.2>");
    let into = sketch.inclusion(scalar, cut).unwrap();
    let id = sketch.category().identity(cut);
    let cocone = Cocone {
        name: "diagonal pushout".into(),
        kind: CoconeKind::Pushout,
        objects: vec![scalar, cut, cut],
        arrows: vec![
            DiagramArrow {
                arrow: into,
                from: 0,
                to: 1,
            },
            DiagramArrow {
                arrow: into,
                from: 0,
                to: 2,
            },
        ],
        apex: cut,
        legs: vec![into, id, id],
    };
    assert!(check_cocone(&cocone, sketch.category()));
    let check = check_is_limit(f.table(), &cocone).unwrap();
    assert!(check.passed);
    assert_eq!((check.apex_size, check.families), (1, 1));

    let m = alg(&[2, 3]);
    let sketch = full_sketch(&m);
    let f = as_presheaf(&alg(&[1]), &sketch);
    let mut pushouts = 0;
    for c in sketch
        .cocones()
        .iter()
        .filter(|c| c.kind == CoconeKind::Pushout)
    {
        assert!(check_is_limit(f.table(), c).unwrap().passed, "{}", c.name);
        pushouts += 1;
    }
    assert!(pushouts > 0);
}

#[test]
fn unit_source_is_a_sheaf() {
    assert_sheaf(&[2], &[1]);
    let f = assert_sheaf(&[2, 3], &[1]);
    assert!(f.dropped_arrows().is_empty());
}

#[test]
fn larger_sources_are_sheaves() {
    assert_sheaf(&[2, 3], &[1, 1]);
    assert_sheaf(&[2, 3], &[2]);
}

#[test]
fn empty_sections_still_satisfy_limits() {
    let m = alg(&[2]);
    let sketch = full_sketch(&m);
    let f = assert_sheaf(&[2], &[3]);
    let p = StandardProjection::leading(&m, &[1]).unwrap();
    let obj = sketch.object_id(&StandardSubalgebra::scalar(&p)).unwrap();
    assert_eq!(f.table().size(obj), 0);
}

#[test]
fn deleting_a_section_breaks_a_coproduct() {
    let m = alg(&[2]);
    let sketch = full_sketch(&m);
    let f = as_presheaf(&alg(&[1]), &sketch);
    let mut table = f.table().clone();
    let scalar = object_named(&sketch, "<1.1,1.2>");
    assert_eq!(table.size(scalar), 1);
    table.delete_element(scalar, 0);
    let report = check_sheaf(&table, &sketch);
    assert!(report.functorial());
    assert_eq!(
        report.first_failure(),
        Some("coproduct (<1.1> + <1.2>) -> <1.1|1.2>")
    );
}

#[test]
fn deletion_mutant_fails_on_two_blocks() {
    let m = alg(&[2, 3]);
    let sketch = full_sketch(&m);
    let f = as_presheaf(&alg(&[1]), &sketch);
    let mut table = f.table().clone();
    let target = object_named(&sketch, "<1.1,2.1>");
    table.delete_element(target, 0);
    let report = check_sheaf(&table, &sketch);
    assert!(report.functorial());
    let name = report.first_failure().expect("mutant must fail");
    assert!(
        name.starts_with("coproduct") || name.starts_with("pushout"),
        "{name}"
    );
}

fn partitions(total: u32, max: u32) -> Vec<Vec<u32>> {
    if total == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=max.min(total)).rev() {
        for mut rest in partitions(total - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[test]
fn every_small_configuration_is_a_sheaf() {
    let sources = [alg(&[1]), alg(&[2]), alg(&[1, 1])];
    let mut configurations = 0;
    for total in 1..=6 {
        for blocks in partitions(total, total) {
            let m = alg(&blocks);
            let full = m.full_projection();
            let mut generator_sets = vec![vec![full.clone()]];
            if blocks.len() > 1 {
                let first = StandardProjection::new(
                    &m,
                    full.labels().iter().copied().filter(|l| l.block == 0),
                )
                .unwrap();
                generator_sets.push(vec![first.clone(), full.difference(&first)]);
            }
            for generators in generator_sets {
                let sketch = build_truncated_sketch(&m, &generators, 1).unwrap();
                for n in &sources {
                    let f = as_presheaf(n, &sketch);
                    let report = check_sheaf(f.table(), &sketch);
                    assert!(report.passed(), "M={m} N={n}\n{report}");
                    configurations += 1;
                }
            }
        }
    }
    assert!(configurations > 0);
}

#[test]
fn sections_sit_over_every_object() {
    let m = alg(&[2, 3]);
    let sketch = full_sketch(&m);
    let n = alg(&[1]);
    let f = as_presheaf(&n, &sketch);
    for (i, a) in sketch.objects().iter().enumerate() {
        assert_eq!(f.sections(ObjId(i)), enumerate_homs(&n, a).as_slice());
    }
}
