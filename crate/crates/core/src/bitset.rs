//! Fixed-size bit set over `0..len` backed by 64-bit words.
//!
//! Set identities elsewhere in the crate (symmetric differences of
//! exceptional sets) reduce to word-wise XOR on this representation, so
//! equality checks are exact and branch-free.

/// Bit set over the universe `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Symmetric difference, word-wise XOR. Both sets must share a universe.
    pub fn symmetric_difference(&self, other: &BitSet) -> BitSet {
        assert_eq!(self.len, other.len, "bit sets over different universes");
        BitSet {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    /// Indices of set bits, ascending.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// True when no bit is set in `lo..hi` (clamped to the universe).
    pub fn range_is_clear(&self, lo: usize, hi: usize) -> bool {
        let hi = hi.min(self.len);
        (lo..hi).all(|i| !self.contains(i))
    }
}
