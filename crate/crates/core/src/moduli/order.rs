//! Finite partial orders given by their relation matrix.

use crate::report::CheckReport;

use super::sampler::SubsetSampler;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Order {
    names: Vec<String>,
    le: Vec<bool>,
}

impl Order {
    pub fn from_relation(names: Vec<String>, le: impl Fn(usize, usize) -> bool) -> Self {
        let n = names.len();
        let le = (0..n * n).map(|k| le(k / n, k % n)).collect();
        Self { names, le }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        self.le[x * self.len() + y]
    }

    pub fn set_le(&mut self, x: usize, y: usize, value: bool) {
        let n = self.len();
        self.le[x * n + y] = value;
    }

    pub fn lower_bounds(&self, set: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| set.iter().all(|&s| self.le(y, s)))
            .collect()
    }

    pub fn upper_bounds(&self, set: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| set.iter().all(|&s| self.le(s, y)))
            .collect()
    }

    pub fn greatest(&self, set: &[usize]) -> Option<usize> {
        set.iter()
            .copied()
            .find(|&g| set.iter().all(|&y| self.le(y, g)))
    }

    pub fn least(&self, set: &[usize]) -> Option<usize> {
        set.iter()
            .copied()
            .find(|&g| set.iter().all(|&y| self.le(g, y)))
    }

    pub fn glb(&self, set: &[usize]) -> Option<usize> {
        self.greatest(&self.lower_bounds(set))
    }

    pub fn lub(&self, set: &[usize]) -> Option<usize> {
        self.least(&self.upper_bounds(set))
    }

    fn describe(&self, set: &[usize]) -> String {
        let names: Vec<&str> = set.iter().map(|&x| self.name(x)).collect();
        format!("{{{}}}", names.join(" "))
    }
}

/// Reflexivity, antisymmetry and transitivity, exhaustively.
pub fn check_poset(order: &Order) -> CheckReport {
    let n = order.len();
    let mut report = CheckReport::new();
    for x in 0..n {
        report.record(order.le(x, x), || {
            format!("reflexivity fails at {}", order.name(x))
        });
    }
    for x in 0..n {
        for y in 0..n {
            if x != y {
                report.record(!(order.le(x, y) && order.le(y, x)), || {
                    format!(
                        "antisymmetry fails: {} <= {} <= {}",
                        order.name(x),
                        order.name(y),
                        order.name(x)
                    )
                });
            }
        }
    }
    for x in 0..n {
        for y in (0..n).filter(|&y| order.le(x, y)) {
            for z in 0..n {
                if order.le(y, z) {
                    report.record(order.le(x, z), || {
                        format!(
                            "transitivity fails: {} <= {} <= {}",
                            order.name(x),
                            order.name(y),
                            order.name(z)
                        )
                    });
                }
            }
        }
    }
    report
}

/// Every sampled non-empty subset bounded below has a greatest lower bound,
/// and every one bounded above has a least upper bound. One instance per
/// subset.
pub fn check_dedekind(order: &Order, sampler: &SubsetSampler) -> CheckReport {
    let mut report = CheckReport::new();
    for set in sampler.subsets(order.len()) {
        let lower = order.lower_bounds(&set);
        let upper = order.upper_bounds(&set);
        let glb_ok = lower.is_empty() || order.greatest(&lower).is_some();
        let lub_ok = upper.is_empty() || order.least(&upper).is_some();
        report.record(glb_ok && lub_ok, || {
            let which = if glb_ok {
                "least upper"
            } else {
                "greatest lower"
            };
            format!("{} has no {which} bound", order.describe(&set))
        });
    }
    report
}
