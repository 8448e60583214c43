use crate::report::CheckReport;

use super::{ElemId, JoinOutcome, ModuliMonoid};

fn names(x: &ModuliMonoid, set: &[ElemId]) -> String {
    let parts: Vec<&str> = set.iter().map(|&e| x.name(e)).collect();
    format!("{{{}}}", parts.join(" "))
}

/// Zero law, commutativity, associativity, cancellation, positivity and
/// additivity of supports, each over all elements, pairs or triples.
pub fn check_monoid(x: &ModuliMonoid) -> CheckReport {
    let mut report = CheckReport::new();
    let zero = x.zero();
    for a in x.ids() {
        report.record(x.add(zero, a) == Some(a), || {
            format!("0 + {} != {}", x.name(a), x.name(a))
        });
    }
    for a in x.ids() {
        for b in x.ids() {
            report.record(x.add(a, b) == x.add(b, a), || {
                format!("{} + {} is not commutative", x.name(a), x.name(b))
            });
            if let Some(s) = x.add(a, b) {
                let additive =
                    x.support(a).checked_add(x.support(b)).as_ref() == Some(x.support(s));
                report.record(additive, || {
                    format!("support of {} + {} is not additive", x.name(a), x.name(b))
                });
                if s == zero {
                    report.record(a == zero && b == zero, || {
                        format!("{} + {} = 0 with a nonzero summand", x.name(a), x.name(b))
                    });
                }
            }
        }
    }
    for a in x.ids() {
        for b in x.ids() {
            let ab = x.add(a, b);
            for c in x.ids() {
                let left = ab.and_then(|s| x.add(s, c));
                let right = x.add(b, c).and_then(|s| x.add(a, s));
                report.record(left == right, || {
                    format!(
                        "({0} + {1}) + {2} != {0} + ({1} + {2})",
                        x.name(a),
                        x.name(b),
                        x.name(c)
                    )
                });
                if c > b {
                    if let (Some(s), Some(t)) = (ab, x.add(a, c)) {
                        report.record(s != t, || {
                            format!("{0} + {1} = {0} + {2}", x.name(a), x.name(b), x.name(c))
                        });
                    }
                }
            }
        }
    }
    report
}

/// `y∨z − y = z − y∧z` for every pair with a common upper bound, and
/// `y∧z = 0 ⇒ y∨z = y + z`.
pub fn check_wedge_vee(x: &ModuliMonoid) -> CheckReport {
    let mut report = CheckReport::new();
    for y in x.ids() {
        for z in x.ids() {
            let Ok(JoinOutcome::Join(j)) = x.join(&[y, z]) else {
                continue;
            };
            let m = x.meet(&[y, z]).ok().flatten();
            let left = x.subtract(j, y).ok();
            let right = m.and_then(|m| x.subtract(z, m).ok());
            report.record(left.is_some() && left == right, || {
                format!("wedge-vee fails at y={} z={}", x.name(y), x.name(z))
            });
            if m == Some(x.zero()) {
                report.record(x.add(y, z) == Some(j), || {
                    format!(
                        "{} and {} have meet 0 but their join is not their sum",
                        x.name(y),
                        x.name(z)
                    )
                });
            }
        }
    }
    report
}

/// For each bounded set, `x − meet{x − s}` is the same for every upper bound
/// `x` and is the least upper bound.
pub fn check_join_formula(x: &ModuliMonoid, sets: &[Vec<usize>]) -> CheckReport {
    let mut report = CheckReport::new();
    for raw in sets {
        let set: Vec<ElemId> = raw.iter().map(|&i| ElemId(i)).collect();
        let uppers = x.upper_bounds(&set);
        let values: Vec<Option<ElemId>> = uppers.iter().map(|&u| x.join_via(&set, u)).collect();
        let lub = x.order().lub(raw).map(ElemId);
        let ok = !uppers.is_empty() && values.iter().all(|v| v.is_some() && *v == lub);
        report.record(ok, || {
            format!("join of {} depends on the upper bound", names(x, &set))
        });
    }
    report
}

/// Entrywise-minimum meets against lower-bound enumeration on the given sets.
pub fn check_meet_fast(
    x: &ModuliMonoid,
    sets: impl IntoIterator<Item = Vec<usize>>,
) -> CheckReport {
    let mut report = CheckReport::new();
    for raw in sets {
        let set: Vec<ElemId> = raw.iter().map(|&i| ElemId(i)).collect();
        let generic = x.meet(&set).ok().flatten();
        report.record(generic.is_some() && generic == x.meet_fast(&set), || {
            format!(
                "meet of {} disagrees with the entrywise minimum",
                names(x, &set)
            )
        });
    }
    report
}

/// Entrywise comparison against the existential order on all pairs.
pub fn check_leq_fast(x: &ModuliMonoid) -> CheckReport {
    let mut report = CheckReport::new();
    for a in x.ids() {
        for b in x.ids() {
            report.record(x.leq_fast(a, b) == Some(x.leq(a, b)), || {
                format!("order disagrees at {} <= {}", x.name(a), x.name(b))
            });
        }
    }
    report
}

/// Canonical and orbit-search monoids are the same once each orbit class is
/// replaced by the multiplicity of its representative.
pub fn compare_modes(
    canonical: &ModuliMonoid,
    orbit: &ModuliMonoid,
    multiplicity_of_class: impl Fn(ElemId) -> ElemId,
) -> CheckReport {
    let mut report = CheckReport::new();
    report.record(canonical.len() == orbit.len(), || {
        format!(
            "{} canonical elements but {} orbit classes",
            canonical.len(),
            orbit.len()
        )
    });
    if canonical.len() != orbit.len() {
        return report;
    }
    let map: Vec<ElemId> = orbit.ids().map(&multiplicity_of_class).collect();
    let mut hit = vec![false; canonical.len()];
    for &c in &map {
        hit[c.0] = true;
    }
    report.record(hit.iter().all(|&h| h), || {
        "classes do not biject onto matrices".into()
    });
    report.record(map[orbit.zero().0] == canonical.zero(), || {
        "zero classes differ".into()
    });
    for a in orbit.ids() {
        for b in orbit.ids() {
            let via_orbit = orbit.add(a, b).map(|s| map[s.0]);
            let via_canonical = canonical.add(map[a.0], map[b.0]);
            report.record(via_orbit == via_canonical, || {
                format!("sums differ at {} + {}", orbit.name(a), orbit.name(b))
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::super::tests::monoid;
    use super::super::SubsetSampler;
    use super::*;

    #[test]
    fn unit_monoid_passes_every_check() {
        let x = monoid(&[2, 3], &[1]);
        assert!(check_monoid(&x).passed());
        assert!(check_wedge_vee(&x).passed());
        assert!(check_leq_fast(&x).passed());
        let sampler = SubsetSampler::new(1 << 20, 0, 0);
        assert!(check_meet_fast(&x, sampler.subsets(x.len())).passed());
    }

    #[test]
    fn wedge_vee_examples() {
        let x = monoid(&[2, 3], &[1]);
        let (y, z) = (x.lookup("2,1").unwrap(), x.lookup("1,3").unwrap());
        let Ok(JoinOutcome::Join(j)) = x.join(&[y, z]) else {
            panic!()
        };
        let m = x.meet(&[y, z]).unwrap().unwrap();
        assert_eq!(x.subtract(j, y), x.subtract(z, m));
        assert_eq!(x.name(x.subtract(j, y).unwrap()), "(0,2)");

        let (y, z) = (x.lookup("1,0").unwrap(), x.lookup("0,1").unwrap());
        assert_eq!(x.meet(&[y, z]).unwrap(), Some(x.zero()));
        assert_eq!(
            x.join(&[y, z]),
            Ok(JoinOutcome::Join(x.lookup("1,1").unwrap()))
        );
    }

    #[test]
    fn broken_cancellation_is_detected() {
        let mut x = monoid(&[2, 3], &[1]);
        let (a, b, c) = (
            x.lookup("1,0").unwrap(),
            x.lookup("0,1").unwrap(),
            x.lookup("0,2").unwrap(),
        );
        let target = x.add(a, c);
        x.set_add(a, b, target);
        x.set_add(b, a, target);
        let report = check_monoid(&x);
        assert!(!report.passed());
    }
}
