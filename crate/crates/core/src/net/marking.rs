use std::fmt;

/// Set of marked places, stored as a bitset sized for one net.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Marking {
    words: Vec<u64>,
}

impl Marking {
    pub fn empty(places: usize) -> Self {
        Self {
            words: vec![0; places.div_ceil(64)],
        }
    }

    pub fn from_places(places: usize, marked: impl IntoIterator<Item = usize>) -> Self {
        let mut m = Self::empty(places);
        for p in marked {
            m.insert(p);
        }
        m
    }

    pub fn contains(&self, p: usize) -> bool {
        self.words
            .get(p / 64)
            .is_some_and(|w| w & (1 << (p % 64)) != 0)
    }

    pub fn insert(&mut self, p: usize) -> bool {
        let fresh = !self.contains(p);
        self.words[p / 64] |= 1 << (p % 64);
        fresh
    }

    pub fn remove(&mut self, p: usize) -> bool {
        let was = self.contains(p);
        self.words[p / 64] &= !(1 << (p % 64));
        was
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &Marking) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Marked places in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| w & (1 << b) != 0)
                .map(move |b| i * 64 + b)
        })
    }
}

impl fmt::Debug for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
