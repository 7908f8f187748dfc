//! Events as bit-sets over the world indices `0..n_worlds`.

use std::fmt;

const WORD_BITS: usize = 64;

/// A subset of a finite world set.
///
/// Every event remembers the size of its ambient world set so that
/// complements and validity checks need no extra context. Bits at or above
/// `n_worlds` are never set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Event {
    n_worlds: usize,
    words: Vec<u64>,
}

fn word_count(n_worlds: usize) -> usize {
    n_worlds.div_ceil(WORD_BITS)
}

impl Event {
    pub fn empty(n_worlds: usize) -> Self {
        Self {
            n_worlds,
            words: vec![0; word_count(n_worlds)],
        }
    }

    pub fn full(n_worlds: usize) -> Self {
        let mut event = Self {
            n_worlds,
            words: vec![u64::MAX; word_count(n_worlds)],
        };
        event.clear_tail();
        event
    }

    pub fn singleton(n_worlds: usize, world: usize) -> Self {
        let mut event = Self::empty(n_worlds);
        event.insert(world);
        event
    }

    /// Builds an event from world indices. Panics if an index is out of range.
    pub fn from_worlds<I: IntoIterator<Item = usize>>(n_worlds: usize, worlds: I) -> Self {
        let mut event = Self::empty(n_worlds);
        for w in worlds {
            event.insert(w);
        }
        event
    }

    /// Builds an event from the low `n_worlds` bits of `mask`; higher bits are dropped.
    pub fn from_mask(n_worlds: usize, mask: u64) -> Self {
        let mut event = Self::empty(n_worlds);
        if let Some(first) = event.words.first_mut() {
            *first = mask;
        }
        event.clear_tail();
        event
    }

    fn clear_tail(&mut self) {
        let rem = self.n_worlds % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn n_worlds(&self) -> usize {
        self.n_worlds
    }

    #[inline]
    pub fn contains(&self, world: usize) -> bool {
        world < self.n_worlds && self.words[world / WORD_BITS] >> (world % WORD_BITS) & 1 == 1
    }

    pub fn insert(&mut self, world: usize) {
        assert!(
            world < self.n_worlds,
            "world {world} out of range for {} worlds",
            self.n_worlds
        );
        self.words[world / WORD_BITS] |= 1 << (world % WORD_BITS);
    }

    pub fn remove(&mut self, world: usize) {
        if world < self.n_worlds {
            self.words[world / WORD_BITS] &= !(1 << (world % WORD_BITS));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n_worlds
    }

    fn check_universe(&self, other: &Event) {
        assert_eq!(
            self.n_worlds, other.n_worlds,
            "events over different world sets"
        );
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        self.check_universe(other);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Event) -> bool {
        self.check_universe(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersection(&self, other: &Event) -> Event {
        self.check_universe(other);
        Event {
            n_worlds: self.n_worlds,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn union(&self, other: &Event) -> Event {
        self.check_universe(other);
        Event {
            n_worlds: self.n_worlds,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn difference(&self, other: &Event) -> Event {
        self.check_universe(other);
        Event {
            n_worlds: self.n_worlds,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    pub fn complement(&self) -> Event {
        let mut event = Event {
            n_worlds: self.n_worlds,
            words: self.words.iter().map(|w| !w).collect(),
        };
        event.clear_tail();
        event
    }

    pub fn intersect_with(&mut self, other: &Event) {
        self.check_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &Event) {
        self.check_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Smallest world in the event.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    /// Iterates over member worlds in increasing order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD_BITS + bit);
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

impl<'a> IntoIterator for &'a Event {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, w) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "}}")
    }
}

impl serde::Serialize for Event {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}
