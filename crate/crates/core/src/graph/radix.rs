//! Monotone priority queue for Dijkstra over nonnegative `f64` keys.
//!
//! Keys are ordered by their IEEE bit patterns, which agree with numeric
//! order for nonnegative floats. Every pushed key must be at least the last
//! popped key. Entries with equal keys pop in unspecified order.

pub(crate) struct RadixHeap<T> {
    last: u64,
    len: usize,
    buckets: Vec<Vec<(u64, T)>>,
}

#[inline]
fn bits(key: f64) -> u64 {
    // -0.0 would otherwise sort after every positive value.
    (key + 0.0).to_bits()
}

#[inline]
fn bucket(key: u64, last: u64) -> usize {
    (64 - (key ^ last).leading_zeros()) as usize
}

impl<T: Copy> RadixHeap<T> {
    pub(crate) fn new() -> Self {
        Self {
            last: 0,
            len: 0,
            buckets: (0..65).map(|_| Vec::new()).collect(),
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, key: f64, value: T) {
        let k = bits(key);
        debug_assert!(k >= self.last, "radix heap keys must be monotone");
        self.buckets[bucket(k, self.last)].push((k, value));
        self.len += 1;
    }

    pub(crate) fn pop(&mut self) -> Option<(f64, T)> {
        if self.len == 0 {
            return None;
        }
        if self.buckets[0].is_empty() {
            let i = (1..65)
                .find(|&i| !self.buckets[i].is_empty())
                .expect("len > 0");
            let items = std::mem::take(&mut self.buckets[i]);
            self.last = items.iter().map(|e| e.0).min().expect("nonempty bucket");
            for &(k, v) in &items {
                self.buckets[bucket(k, self.last)].push((k, v));
            }
            // Hand the allocation back for reuse.
            let mut items = items;
            items.clear();
            if self.buckets[i].is_empty() {
                self.buckets[i] = items;
            }
        }
        self.len -= 1;
        self.buckets[0].pop().map(|(k, v)| (f64::from_bits(k), v))
    }
}
