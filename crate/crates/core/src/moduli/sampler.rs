//! Subset enumeration: exhaustive under a budget, seeded otherwise.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::order::Order;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsetSampler {
    pub budget: u64,
    pub count: usize,
    pub seed: u64,
}

impl SubsetSampler {
    pub fn new(budget: u64, count: usize, seed: u64) -> Self {
        Self {
            budget,
            count,
            seed,
        }
    }

    /// True when all `2^n` subsets fit in the budget.
    pub fn is_exhaustive(&self, n: usize) -> bool {
        n < 64 && (1u64 << n) <= self.budget
    }

    /// Non-empty subsets of `0..n`: all of them in mask order when exhaustive,
    /// otherwise `count` random ones whose size is uniform in `1..=n`.
    pub fn subsets(&self, n: usize) -> Box<dyn Iterator<Item = Vec<usize>>> {
        if n == 0 {
            return Box::new(std::iter::empty());
        }
        if self.is_exhaustive(n) {
            return Box::new(
                (1u64..1 << n).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect()),
            );
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Box::new((0..self.count).map(move |_| {
            let k = rng.gen_range(1..=n);
            let mut set = sample(&mut rng, n, k).into_vec();
            set.sort_unstable();
            set
        }))
    }
}

/// `count` seeded subsets that have an upper bound: pick a random element
/// and a random non-empty part of its down-set.
pub fn bounded_subsets(order: &Order, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let n = order.len();
    if n == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let top = rng.gen_range(0..n);
            let down: Vec<usize> = (0..n).filter(|&y| order.le(y, top)).collect();
            let k = rng.gen_range(1..=down.len());
            let mut set: Vec<usize> = sample(&mut rng, down.len(), k)
                .into_iter()
                .map(|i| down[i])
                .collect();
            set.sort_unstable();
            set
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_under_budget() {
        let s = SubsetSampler::new(4096, 5, 0);
        assert!(s.is_exhaustive(12));
        assert!(!s.is_exhaustive(13));
        assert_eq!(s.subsets(12).count(), 4095);
    }

    #[test]
    fn random_subsets_are_seeded() {
        let s = SubsetSampler::new(16, 100, 7);
        let a: Vec<_> = s.subsets(60).collect();
        let b: Vec<_> = s.subsets(60).collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        assert!(a
            .iter()
            .all(|set| !set.is_empty() && set.iter().all(|&x| x < 60)));
        let other: Vec<_> = SubsetSampler::new(16, 100, 8).subsets(60).collect();
        assert_ne!(a, other);
    }

    #[test]
    fn bounded_subsets_have_upper_bounds() {
        let order = Order::from_relation((0..6).map(|i| i.to_string()).collect(), |x, y| {
            x == y || x == 0 || (x < 3 && y >= 3)
        });
        for set in bounded_subsets(&order, 50, 1) {
            assert!(!order.upper_bounds(&set).is_empty());
        }
    }
}
