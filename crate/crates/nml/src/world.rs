//! Sets of worlds as bitmasks.
//!
//! Every frame in this crate indexes its worlds 0..n in declared order, so a
//! set of worlds fits in a `u64`. All set operations are O(1); iteration
//! yields indices in ascending (= declared) order, which is what makes
//! witness selection deterministic everywhere else.

use std::fmt;

/// Upper bound on frame size imposed by the bitmask representation.
pub const MAX_WORLDS: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct WorldSet(u64);

impl WorldSet {
    pub const EMPTY: WorldSet = WorldSet(0);

    pub fn singleton(w: usize) -> Self {
        debug_assert!(w < MAX_WORLDS);
        WorldSet(1 << w)
    }

    /// All of 0..n.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_WORLDS);
        if n == MAX_WORLDS {
            WorldSet(u64::MAX)
        } else {
            WorldSet((1u64 << n) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        WorldSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, w: usize) -> bool {
        w < MAX_WORLDS && self.0 >> w & 1 == 1
    }

    pub fn insert(&mut self, w: usize) {
        debug_assert!(w < MAX_WORLDS);
        self.0 |= 1 << w;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: WorldSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: WorldSet) -> WorldSet {
        WorldSet(self.0 | other.0)
    }

    pub fn intersection(self, other: WorldSet) -> WorldSet {
        WorldSet(self.0 & other.0)
    }

    /// Complement relative to the n-world universe.
    pub fn complement(self, n: usize) -> WorldSet {
        WorldSet(!self.0 & Self::full(n).0)
    }

    pub fn intersects(self, other: WorldSet) -> bool {
        self.0 & other.0 != 0
    }

    /// World indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let w = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w)
            }
        })
    }

    /// First world index, if any.
    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }
}

impl FromIterator<usize> for WorldSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = WorldSet::EMPTY;
        for w in iter {
            s.insert(w);
        }
        s
    }
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// All subsets of 0..n, in binary order of their masks. The order matters:
/// frame and valuation enumeration are defined in terms of it.
pub fn subsets(n: usize) -> impl Iterator<Item = WorldSet> {
    debug_assert!(n <= 32, "powerset iteration over {n} worlds");
    (0..1u64 << n).map(WorldSet::from_bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a: WorldSet = [0, 2].into_iter().collect();
        let b: WorldSet = [2, 3].into_iter().collect();
        assert!(a.contains(0) && a.contains(2) && !a.contains(1));
        assert_eq!(a.union(b), [0, 2, 3].into_iter().collect());
        assert_eq!(a.intersection(b), WorldSet::singleton(2));
        assert!(WorldSet::singleton(2).is_subset(a));
        assert!(!a.is_subset(b));
        assert_eq!(a.complement(4), [1, 3].into_iter().collect());
        assert_eq!(a.len(), 2);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn subsets_are_in_binary_order() {
        let all: Vec<WorldSet> = subsets(2).collect();
        assert_eq!(all.len(), 4);
        assert_eq!(all[0], WorldSet::EMPTY);
        assert_eq!(all[1], WorldSet::singleton(0));
        assert_eq!(all[2], WorldSet::singleton(1));
        assert_eq!(all[3], WorldSet::full(2));
    }

    #[test]
    fn full_at_the_bitmask_limit() {
        assert_eq!(WorldSet::full(64).len(), 64);
        assert!(WorldSet::full(64).contains(63));
    }
}
