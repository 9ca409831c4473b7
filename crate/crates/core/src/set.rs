//! Small growable bit set over PoI indices.

use alloc::vec::Vec;

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PoiSet {
    words: Vec<u64>,
}

impl PoiSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, poi: usize) -> bool {
        self.words
            .get(poi / 64)
            .is_some_and(|w| w & (1 << (poi % 64)) != 0)
    }

    /// Inserts `poi`, returning `false` if it was already present.
    pub fn insert(&mut self, poi: usize) -> bool {
        let word = poi / 64;
        if self.words.len() <= word {
            self.words.resize(word + 1, 0);
        }
        let mask = 1 << (poi % 64);
        let fresh = self.words[word] & mask == 0;
        self.words[word] |= mask;
        fresh
    }

    pub fn remove(&mut self, poi: usize) {
        if let Some(w) = self.words.get_mut(poi / 64) {
            *w &= !(1 << (poi % 64));
        }
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_disjoint(&self, other: &PoiSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |bit| w & (1 << bit) != 0).map(move |bit| i * 64 + bit)
        })
    }
}

impl FromIterator<usize> for PoiSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = PoiSet::new();
        for p in iter {
            set.insert(p);
        }
        set
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_remove_normalizes() {
        let mut a = PoiSet::new();
        assert!(a.insert(70));
        assert!(!a.insert(70));
        a.insert(3);
        assert_eq!(a.iter().collect::<Vec<_>>(), [3, 70]);
        a.remove(70);
        let b: PoiSet = [3].into_iter().collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 1);
        assert!(!a.is_disjoint(&b));
        assert!(a.is_disjoint(&[4].into_iter().collect()));
    }
}
