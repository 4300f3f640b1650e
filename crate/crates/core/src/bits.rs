//! Fixed-width bitsets backing the graph adjacency and the clique solver.

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn intersection(&self, other: &Bits) -> Bits {
        let mut out = self.clone();
        out.and_assign(other);
        out
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter_ones(&self) -> OnesIter<'_> {
        OnesIter {
            bits: self,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }
}

pub struct OnesIter<'a> {
    bits: &'a Bits,
    word_idx: usize,
    current: u64,
}

impl Iterator for OnesIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_idx * 64 + tz);
            }
            self.word_idx += 1;
            if self.word_idx >= self.bits.words.len() {
                return None;
            }
            self.current = self.bits.words[self.word_idx];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_iter() {
        let mut b = Bits::new(130);
        for i in [0, 63, 64, 65, 129] {
            b.set(i);
        }
        assert_eq!(b.count(), 5);
        assert!(b.get(64));
        assert!(!b.get(1));
        let ones: Vec<_> = b.iter_ones().collect();
        assert_eq!(ones, vec![0, 63, 64, 65, 129]);
        b.clear(64);
        assert_eq!(b.count(), 4);
    }

    #[test]
    fn intersection() {
        let mut a = Bits::new(10);
        let mut b = Bits::new(10);
        a.set(1);
        a.set(5);
        b.set(5);
        b.set(9);
        let c = a.intersection(&b);
        assert_eq!(c.iter_ones().collect::<Vec<_>>(), vec![5]);
    }
}
