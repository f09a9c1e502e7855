//! Monotone radix heap over `u128` keys.
//!
//! Valid only while every pushed key is at least the last popped key, which
//! holds for the extremum-cancellation queue: cancelling the smallest gap
//! `g` joins two neighbours whose gap is at least `g`. Bucket `i > 0` holds
//! keys whose highest bit differing from the last popped key is bit `i - 1`;
//! each key moves down at most 128 times, and every move is a sequential scan.

const BUCKETS: usize = 129;

#[derive(Debug)]
pub(crate) struct RadixHeap {
    last: u128,
    len: usize,
    buckets: Vec<Vec<u128>>,
}

fn bucket(key: u128, last: u128) -> usize {
    (128 - (key ^ last).leading_zeros()) as usize
}

impl RadixHeap {
    pub(crate) fn new() -> Self {
        Self { last: 0, len: 0, buckets: vec![Vec::new(); BUCKETS] }
    }

    pub(crate) fn push(&mut self, key: u128) {
        debug_assert!(key >= self.last, "radix heap keys must not decrease");
        self.buckets[bucket(key, self.last)].push(key);
        self.len += 1;
    }

    pub(crate) fn pop(&mut self) -> Option<u128> {
        if self.len == 0 {
            return None;
        }
        if self.buckets[0].is_empty() {
            let i = self.buckets.iter().position(|b| !b.is_empty()).expect("len > 0");
            let moved = std::mem::take(&mut self.buckets[i]);
            self.last = *moved.iter().min().expect("non-empty bucket");
            for &k in &moved {
                self.buckets[bucket(k, self.last)].push(k);
            }
            // keep the allocation for later refills
            let mut moved = moved;
            moved.clear();
            self.buckets[i] = moved;
        }
        self.len -= 1;
        self.buckets[0].pop()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn pops_in_order_under_monotone_pushes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut heap = RadixHeap::new();
        let mut reference = std::collections::BinaryHeap::new();
        for _ in 0..1000 {
            let k = rng.gen_range(0..1u128 << 100);
            heap.push(k);
            reference.push(std::cmp::Reverse(k));
        }
        let mut last = 0;
        while let Some(k) = heap.pop() {
            assert_eq!(Some(std::cmp::Reverse(k)), reference.pop());
            assert!(k >= last);
            last = k;
            if rng.gen_bool(0.3) {
                let extra = k + rng.gen_range(0..1u128 << 90);
                heap.push(extra);
                reference.push(std::cmp::Reverse(extra));
            }
        }
        assert!(reference.is_empty());
    }

    #[test]
    fn duplicates_and_empty() {
        let mut heap = RadixHeap::new();
        assert_eq!(heap.pop(), None);
        for k in [5, 5, 3, 5] {
            heap.push(k);
        }
        assert_eq!((heap.pop(), heap.pop(), heap.pop(), heap.pop(), heap.pop()), (Some(3), Some(5), Some(5), Some(5), None));
    }
}
