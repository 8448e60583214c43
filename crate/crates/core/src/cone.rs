//! Divisibility, unique halves and dyadic cone structures on finite windows of
//! partial abelian monoids.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use crate::moduli::{ElemId, ModuliMonoid};
use crate::report::CheckReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("{0} has no half")]
    NoHalf(String),
    #[error("internal consistency failure: {x} has {count} distinct halves")]
    HalfNotUnique { x: String, count: usize },
    #[error("{t}·{x} needs a half that does not exist")]
    NotRepresentable { t: String, x: String },
    #[error("not divisible: {witness} has no half")]
    NotDivisible { witness: String },
    #[error("alternative table violates the cone axioms: {0}")]
    AxiomsViolated(String),
    #[error("invalid trace monoid: {0}")]
    InvalidTrace(String),
}

/// A dyadic rational `num / 2^exp` in `[0, 1]`, kept with `num` odd unless
/// `exp = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicScalar {
    num: u64,
    exp: u32,
}

impl DyadicScalar {
    pub const ZERO: Self = Self { num: 0, exp: 0 };
    pub const ONE: Self = Self { num: 1, exp: 0 };

    pub fn new(num: u64, exp: u32) -> Option<Self> {
        if exp >= 63 || num > 1u64 << exp {
            return None;
        }
        Some(Self::normalized(num, exp))
    }

    fn normalized(mut num: u64, mut exp: u32) -> Self {
        if num == 0 {
            return Self::ZERO;
        }
        let shift = num.trailing_zeros().min(exp);
        num >>= shift;
        exp -= shift;
        Self { num, exp }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn exp(self) -> u32 {
        self.exp
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// All `j / 2^resolution` for `j = 0..=2^resolution`.
    pub fn grid(resolution: u32) -> Vec<Self> {
        (0..=1u64 << resolution)
            .map(|j| Self::normalized(j, resolution))
            .collect()
    }

    fn aligned(self, other: Self) -> (u128, u128, u32) {
        let e = self.exp.max(other.exp);
        (
            (self.num as u128) << (e - self.exp),
            (other.num as u128) << (e - other.exp),
            e,
        )
    }

    pub fn checked_add(self, other: Self) -> Option<Self> {
        let (a, b, e) = self.aligned(other);
        let s = a + b;
        (s <= 1u128 << e).then(|| Self::normalized(s as u64, e))
    }

    pub fn checked_sub(self, other: Self) -> Option<Self> {
        let (a, b, e) = self.aligned(other);
        a.checked_sub(b).map(|d| Self::normalized(d as u64, e))
    }

    pub fn checked_mul(self, other: Self) -> Option<Self> {
        let exp = self.exp + other.exp;
        let num = self.num.checked_mul(other.num)?;
        Self::new(num, exp)
    }

    pub fn half(self) -> Option<Self> {
        Self::new(self.num, self.exp + 1)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.exp) as f64
    }
}

impl PartialOrd for DyadicScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

impl fmt::Display for DyadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.exp)
        }
    }
}

/// A partial abelian monoid with a finite window of elements to quantify over.
pub trait PartialMonoid {
    type Elem: Clone + Eq + Hash;

    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;
    /// The elements checks quantify over, in a fixed order.
    fn elements(&self) -> Vec<Self::Elem>;
    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    /// A finite set guaranteed to contain every `h` with `h + h = x`.
    fn half_candidates(&self, x: &Self::Elem) -> Vec<Self::Elem>;
    fn describe(&self, x: &Self::Elem) -> String;
}

impl PartialMonoid for ModuliMonoid {
    type Elem = ElemId;

    fn zero(&self) -> ElemId {
        ModuliMonoid::zero(self)
    }

    fn add(&self, a: &ElemId, b: &ElemId) -> Option<ElemId> {
        ModuliMonoid::add(self, *a, *b)
    }

    fn elements(&self) -> Vec<ElemId> {
        self.ids().collect()
    }

    fn leq(&self, a: &ElemId, b: &ElemId) -> bool {
        ModuliMonoid::leq(self, *a, *b)
    }

    fn half_candidates(&self, _x: &ElemId) -> Vec<ElemId> {
        self.ids().collect()
    }

    fn describe(&self, x: &ElemId) -> String {
        self.name(*x).to_string()
    }
}

/// Dyadic numbers in `[0, T]` under addition, defined when the sum stays
/// below `T`. The monoid itself contains every dyadic in range; `K` only fixes
/// the window `k / 2^K` that checks quantify over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceMonoid {
    resolution: u32,
    cap: DyadicScalar,
}

impl TraceMonoid {
    pub fn new(resolution: u32, cap: DyadicScalar) -> Result<Self, ConeError> {
        if resolution > 24 {
            return Err(ConeError::InvalidTrace(format!(
                "resolution {resolution} is too large"
            )));
        }
        if cap.exp() > resolution {
            return Err(ConeError::InvalidTrace(format!(
                "cap {cap} is not on the 1/{} grid",
                1u64 << resolution
            )));
        }
        Ok(Self { resolution, cap })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn cap(&self) -> DyadicScalar {
        self.cap
    }
}

impl PartialMonoid for TraceMonoid {
    type Elem = DyadicScalar;

    fn zero(&self) -> DyadicScalar {
        DyadicScalar::ZERO
    }

    fn add(&self, a: &DyadicScalar, b: &DyadicScalar) -> Option<DyadicScalar> {
        a.checked_add(*b).filter(|s| *s <= self.cap)
    }

    fn elements(&self) -> Vec<DyadicScalar> {
        DyadicScalar::grid(self.resolution)
            .into_iter()
            .filter(|v| *v <= self.cap)
            .collect()
    }

    fn leq(&self, a: &DyadicScalar, b: &DyadicScalar) -> bool {
        a <= b
    }

    /// The grid one step finer than both `x` and the window, up to `x`.
    fn half_candidates(&self, x: &DyadicScalar) -> Vec<DyadicScalar> {
        let e = self.resolution.max(x.exp()) + 1;
        let top = x.num() << (e - x.exp());
        (0..=top).map(|k| DyadicScalar::normalized(k, e)).collect()
    }

    fn describe(&self, x: &DyadicScalar) -> String {
        x.to_string()
    }
}

/// Halving and dyadic scaling with memoised halves.
pub struct Scaler<'a, M: PartialMonoid> {
    monoid: &'a M,
    halves: HashMap<M::Elem, Result<M::Elem, ConeError>>,
}

impl<'a, M: PartialMonoid> Scaler<'a, M> {
    pub fn new(monoid: &'a M) -> Self {
        Self {
            monoid,
            halves: HashMap::new(),
        }
    }

    /// The unique `h` with `h + h = x`, found by exhaustive search.
    pub fn half(&mut self, x: &M::Elem) -> Result<M::Elem, ConeError> {
        if let Some(h) = self.halves.get(x) {
            return h.clone();
        }
        let m = self.monoid;
        let found: Vec<M::Elem> = m
            .half_candidates(x)
            .into_iter()
            .filter(|h| m.add(h, h).as_ref() == Some(x))
            .collect();
        let result = match found.len() {
            0 => Err(ConeError::NoHalf(m.describe(x))),
            1 => Ok(found[0].clone()),
            count => Err(ConeError::HalfNotUnique {
                x: m.describe(x),
                count,
            }),
        };
        self.halves.insert(x.clone(), result.clone());
        result
    }

    /// `t·x` from the binary expansion of `t`: the sum of `x / 2^i` over the
    /// set bits.
    pub fn scale(&mut self, t: DyadicScalar, x: &M::Elem) -> Result<M::Elem, ConeError> {
        let m = self.monoid;
        if t == DyadicScalar::ONE {
            return Ok(x.clone());
        }
        let missing = |e: ConeError| match e {
            ConeError::NoHalf(_) => ConeError::NotRepresentable {
                t: t.to_string(),
                x: m.describe(x),
            },
            other => other,
        };
        let mut acc = m.zero();
        let mut part = x.clone();
        for i in 1..=t.exp() {
            part = self.half(&part).map_err(missing)?;
            if t.num() >> (t.exp() - i) & 1 == 1 {
                acc = m
                    .add(&acc, &part)
                    .ok_or_else(|| ConeError::NotRepresentable {
                        t: t.to_string(),
                        x: m.describe(x),
                    })?;
            }
        }
        Ok(acc)
    }
}

pub fn half<M: PartialMonoid>(monoid: &M, x: &M::Elem) -> Result<M::Elem, ConeError> {
    Scaler::new(monoid).half(x)
}

pub fn dyadic_scale<M: PartialMonoid>(
    monoid: &M,
    t: DyadicScalar,
    x: &M::Elem,
) -> Result<M::Elem, ConeError> {
    Scaler::new(monoid).scale(t, x)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divisibility<E> {
    pub divisible: bool,
    pub checked: usize,
    /// The first element of the window without a half.
    pub witness: Option<E>,
}

pub fn is_divisible<M: PartialMonoid>(monoid: &M) -> Result<Divisibility<M::Elem>, ConeError> {
    let mut scaler = Scaler::new(monoid);
    let elements = monoid.elements();
    for x in &elements {
        match scaler.half(x) {
            Ok(_) => {}
            Err(ConeError::NoHalf(_)) => {
                return Ok(Divisibility {
                    divisible: false,
                    checked: elements.len(),
                    witness: Some(x.clone()),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Divisibility {
        divisible: true,
        checked: elements.len(),
        witness: None,
    })
}

/// Values of `t·x` for `t` on the `1/2^resolution` grid and `x` in the
/// monoid's window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingTable<E: Clone + Eq + Hash> {
    resolution: u32,
    scalars: Vec<DyadicScalar>,
    elements: Vec<E>,
    values: Vec<E>,
    element_index: HashMap<E, usize>,
}

impl<E: Clone + Eq + Hash> ScalingTable<E> {
    pub fn from_fn(
        resolution: u32,
        elements: Vec<E>,
        mut value: impl FnMut(DyadicScalar, &E) -> Result<E, ConeError>,
    ) -> Result<Self, ConeError> {
        let scalars = DyadicScalar::grid(resolution);
        let mut values = Vec::with_capacity(scalars.len() * elements.len());
        for &t in &scalars {
            for x in &elements {
                values.push(value(t, x)?);
            }
        }
        Ok(Self {
            resolution,
            element_index: elements
                .iter()
                .enumerate()
                .map(|(i, x)| (x.clone(), i))
                .collect(),
            scalars,
            elements,
            values,
        })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn scalars(&self) -> &[DyadicScalar] {
        &self.scalars
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Position of `t` on the grid.
    pub fn scalar_pos(&self, t: DyadicScalar) -> Option<usize> {
        (t.exp() <= self.resolution).then(|| (t.num() << (self.resolution - t.exp())) as usize)
    }

    pub fn element_pos(&self, x: &E) -> Option<usize> {
        self.element_index.get(x).copied()
    }

    pub fn value(&self, scalar_pos: usize, element_pos: usize) -> &E {
        &self.values[scalar_pos * self.elements.len() + element_pos]
    }

    pub fn get(&self, t: DyadicScalar, x: &E) -> Option<&E> {
        Some(self.value(self.scalar_pos(t)?, self.element_pos(x)?))
    }

    /// Entry by position, `entry / elements.len()` indexing the scalar.
    pub fn entry(&self, entry: usize) -> (DyadicScalar, &E, &E) {
        let n = self.elements.len();
        (
            self.scalars[entry / n],
            &self.elements[entry % n],
            &self.values[entry],
        )
    }

    pub fn set_entry(&mut self, entry: usize, value: E) {
        self.values[entry] = value;
    }
}

/// The table of `dyadic_scale` values, or the first element without a half.
pub fn canonical_cone<M: PartialMonoid>(
    monoid: &M,
    resolution: u32,
) -> Result<ScalingTable<M::Elem>, ConeError> {
    let div = is_divisible(monoid)?;
    if let Some(w) = div.witness {
        return Err(ConeError::NotDivisible {
            witness: monoid.describe(&w),
        });
    }
    let mut scaler = Scaler::new(monoid);
    ScalingTable::from_fn(resolution, monoid.elements(), |t, x| scaler.scale(t, x))
}

/// `(j/2^R)·x` as `j` copies of `x/2^R`, a different evaluation order from
/// [`canonical_cone`].
pub fn repeated_sum_cone<M: PartialMonoid>(
    monoid: &M,
    resolution: u32,
) -> Result<ScalingTable<M::Elem>, ConeError> {
    let mut scaler = Scaler::new(monoid);
    let mut finest: HashMap<M::Elem, M::Elem> = HashMap::new();
    for x in monoid.elements() {
        let mut h = x.clone();
        for _ in 0..resolution {
            h = scaler.half(&h)?;
        }
        finest.insert(x, h);
    }
    ScalingTable::from_fn(resolution, monoid.elements(), |t, x| {
        let copies = t.num() << (resolution - t.exp());
        let step = &finest[x];
        let mut acc = monoid.zero();
        for _ in 0..copies {
            acc = monoid
                .add(&acc, step)
                .ok_or_else(|| ConeError::NotRepresentable {
                    t: t.to_string(),
                    x: monoid.describe(x),
                })?;
        }
        Ok(acc)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    All,
    FirstViolation,
}

/// Axioms (a)–(e) over every scalar on the table's grid and every element of
/// the window. (c) is checked whenever `g + h` exists; (e) whenever `st` and
/// `tg` are in the table.
pub fn check_cone_axioms<M: PartialMonoid>(
    monoid: &M,
    table: &ScalingTable<M::Elem>,
    mode: CheckMode,
) -> CheckReport {
    let mut report = CheckReport::new();
    let done = |r: &CheckReport| mode == CheckMode::FirstViolation && !r.passed();
    let d = |x: &M::Elem| monoid.describe(x);
    let zero = monoid.zero();
    let elements = table.elements();
    let scalars = table.scalars();
    let (Some(zero_pos), Some(one_pos)) = (
        table.scalar_pos(DyadicScalar::ZERO),
        table.scalar_pos(DyadicScalar::ONE),
    ) else {
        unreachable!("the grid contains 0 and 1")
    };
    let v = |si: usize, gi: usize| table.value(si, gi);

    for (gi, g) in elements.iter().enumerate() {
        report.record(*v(zero_pos, gi) == zero, || {
            format!("(a) fails: 0·{} != 0", d(g))
        });
        report.record(v(one_pos, gi) == g, || {
            format!("(b) fails: 1·{} != {}", d(g), d(g))
        });
        if done(&report) {
            return report;
        }
    }
    let sums: Vec<Vec<(usize, usize)>> = elements
        .iter()
        .enumerate()
        .map(|(gi, g)| {
            elements
                .iter()
                .enumerate()
                .skip(gi)
                .filter_map(|(hi, h)| Some((hi, table.element_pos(&monoid.add(g, h)?)?)))
                .collect()
        })
        .collect();
    for (si, s) in scalars.iter().enumerate() {
        for (gi, g) in elements.iter().enumerate() {
            for &(hi, ki) in &sums[gi] {
                let right = monoid.add(v(si, gi), v(si, hi));
                report.record(right.as_ref() == Some(v(si, ki)), || {
                    let h = &elements[hi];
                    format!(
                        "(c) fails: {s}·({} + {}) != {s}·{} + {s}·{}",
                        d(g),
                        d(h),
                        d(g),
                        d(h)
                    )
                });
            }
            if done(&report) {
                return report;
            }
        }
    }
    for (gi, g) in elements.iter().enumerate() {
        for (si, &s) in scalars.iter().enumerate() {
            for (ti, &t) in scalars.iter().enumerate().skip(si) {
                let Some(sti) = s.checked_add(t).and_then(|st| table.scalar_pos(st)) else {
                    continue;
                };
                let right = monoid.add(v(si, gi), v(ti, gi));
                report.record(right.as_ref() == Some(v(sti, gi)), || {
                    format!(
                        "(d) fails: ({s} + {t})·{} != {s}·{} + {t}·{}",
                        d(g),
                        d(g),
                        d(g)
                    )
                });
            }
            if done(&report) {
                return report;
            }
        }
    }
    let scaled: Vec<Option<usize>> = (0..scalars.len() * elements.len())
        .map(|k| table.element_pos(v(k / elements.len(), k % elements.len())))
        .collect();
    for (gi, g) in elements.iter().enumerate() {
        for (si, &s) in scalars.iter().enumerate() {
            for (ti, &t) in scalars.iter().enumerate() {
                let Some(sti) = s.checked_mul(t).and_then(|st| table.scalar_pos(st)) else {
                    continue;
                };
                let Some(tgi) = scaled[ti * elements.len() + gi] else {
                    continue;
                };
                report.record(v(sti, gi) == v(si, tgi), || {
                    format!("(e) fails: ({s}·{t})·{} != {s}·({t}·{})", d(g), d(g))
                });
            }
            if done(&report) {
                return report;
            }
        }
    }
    report
}

/// Compares an axiom-satisfying table with the canonical one entry by entry.
/// A disagreement contradicts the uniqueness of cone structures and is
/// reported as an internal-consistency failure.
pub fn check_uniqueness<M: PartialMonoid>(
    monoid: &M,
    alt: &ScalingTable<M::Elem>,
) -> Result<CheckReport, ConeError> {
    let axioms = check_cone_axioms(monoid, alt, CheckMode::FirstViolation);
    if !axioms.passed() {
        return Err(ConeError::AxiomsViolated(
            axioms.first_violation.unwrap_or_default(),
        ));
    }
    let canonical = canonical_cone(monoid, alt.resolution())?;
    let mut report = CheckReport::new();
    for k in 0..alt.len() {
        let (t, x, v) = alt.entry(k);
        let expected = canonical.get(t, x);
        report.record(expected == Some(v), || {
            format!(
                "internal consistency failure: {t}·{} is {} but the canonical value is {}",
                monoid.describe(x),
                monoid.describe(v),
                expected.map_or("missing".into(), |e| monoid.describe(e))
            )
        });
    }
    Ok(report)
}

/// The dyadic chain `x/2^n` for `n = 1..=n_max` has meet `x/2^n_max`; every
/// lower bound `y` of the chain in the window satisfies `y ≤ x/2^n_max` and
/// `y + y ≤ x/2^(n_max-1)`; and `0` is the only such `y` with `y + y ≤ y`.
pub fn glb_dyadic_check<M: PartialMonoid>(monoid: &M, x: &M::Elem, n_max: u32) -> CheckReport {
    let mut report = CheckReport::new();
    let d = |e: &M::Elem| monoid.describe(e);
    let mut scaler = Scaler::new(monoid);
    let mut chain = vec![x.clone()];
    for n in 1..=n_max {
        match scaler.half(&chain[chain.len() - 1]) {
            Ok(h) => chain.push(h),
            Err(e) => {
                report.record(false, || format!("x/2^{n} does not exist: {e}"));
                return report;
            }
        }
    }
    let members = &chain[1..];
    let Some(last) = members.last() else {
        return report;
    };
    for c in members {
        report.record(monoid.leq(last, c), || {
            format!("x/2^{n_max} = {} is not below {}", d(last), d(c))
        });
    }
    let previous = &chain[chain.len() - 2];
    for y in monoid.elements() {
        if !members.iter().all(|c| monoid.leq(&y, c)) {
            continue;
        }
        report.record(monoid.leq(&y, last), || {
            format!("lower bound {} is not below the meet {}", d(&y), d(last))
        });
        let double = monoid.add(&y, &y);
        report.record(
            double.as_ref().is_some_and(|s| monoid.leq(s, previous)),
            || format!("{} + {} is not below {}", d(&y), d(&y), d(previous)),
        );
        if double.as_ref().is_some_and(|s| monoid.leq(s, &y)) {
            report.record(y == monoid.zero(), || {
                format!("nonzero lower bound {} satisfies y + y <= y", d(&y))
            });
        }
    }
    report
}
