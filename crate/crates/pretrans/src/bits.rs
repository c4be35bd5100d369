//! Dense bit sets and square boolean matrices.
//!
//! These back world sets and accessibility relations. Sizes stay small (a few
//! dozen worlds), so everything is a flat `Vec<u64>` with the unused tail bits
//! of the last word kept at zero.

use std::fmt;

const WORD_BITS: usize = 64;

fn words_for(nbits: usize) -> usize {
    nbits.div_ceil(WORD_BITS)
}

/// Mask selecting the valid bits of the last word of an `nbits`-bit vector.
fn tail_mask(nbits: usize) -> u64 {
    match nbits % WORD_BITS {
        0 => !0,
        r => (1u64 << r) - 1,
    }
}

/// A subset of `{0, …, universe-1}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitSet {
    nbits: usize,
    words: Vec<u64>,
}

impl BitSet {
    /// The empty subset of a `nbits`-element universe.
    pub fn new(nbits: usize) -> Self {
        BitSet { nbits, words: vec![0; words_for(nbits)] }
    }

    /// The full universe `{0, …, nbits-1}`.
    pub fn full(nbits: usize) -> Self {
        let mut s = BitSet { nbits, words: vec![!0u64; words_for(nbits)] };
        if let Some(last) = s.words.last_mut() {
            *last &= tail_mask(nbits);
        }
        s
    }

    pub fn singleton(nbits: usize, i: usize) -> Self {
        let mut s = Self::new(nbits);
        s.insert(i);
        s
    }

    pub fn from_indices(nbits: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::new(nbits);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Size of the universe (not the number of elements).
    pub fn universe(&self) -> usize {
        self.nbits
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.nbits && self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.nbits, "index {i} out of range for universe {}", self.nbits);
        self.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.nbits {
            self.words[i / WORD_BITS] &= !(1 << (i % WORD_BITS));
        }
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    fn check_same_universe(&self, other: &Self) {
        assert_eq!(self.nbits, other.nbits, "bit sets over different universes");
    }

    pub fn union_with(&mut self, other: &Self) {
        self.check_same_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &Self) {
        self.check_same_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn subtract(&mut self, other: &Self) {
        self.check_same_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    /// Complement within the universe.
    pub fn complement(&mut self) {
        for w in &mut self.words {
            *w = !*w;
        }
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.nbits);
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.check_same_universe(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint_from(&self, other: &Self) -> bool {
        self.check_same_universe(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        !self.is_disjoint_from(other)
    }

    /// Smallest element, if any.
    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            std::iter::successors(Some(w), |&w| Some(w & w.wrapping_sub(1)))
                .take_while(|&w| w != 0)
                .map(move |w| wi * WORD_BITS + w.trailing_zeros() as usize)
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// A square boolean matrix, i.e. a binary relation on `{0, …, n-1}`.
///
/// Row `i` holds the successor set of `i`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitMatrix {
    n: usize,
    wpr: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    /// The empty relation on `n` points.
    pub fn new(n: usize) -> Self {
        let wpr = words_for(n);
        BitMatrix { n, wpr, words: vec![0; n * wpr] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n);
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut m = Self::new(n);
        for (u, v) in edges {
            m.set(u, v);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n && j < self.n);
        self.words[i * self.wpr + j / WORD_BITS] >> (j % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize) {
        assert!(i < self.n && j < self.n, "edge ({i},{j}) out of range for size {}", self.n);
        self.words[i * self.wpr + j / WORD_BITS] |= 1 << (j % WORD_BITS);
    }

    pub fn unset(&mut self, i: usize, j: usize) {
        assert!(i < self.n && j < self.n);
        self.words[i * self.wpr + j / WORD_BITS] &= !(1 << (j % WORD_BITS));
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.wpr..(i + 1) * self.wpr]
    }

    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.words[i * self.wpr..(i + 1) * self.wpr]
    }

    /// Successor set of `i` as a fresh `BitSet`.
    pub fn row(&self, i: usize) -> BitSet {
        BitSet { nbits: self.n, words: self.row_words(i).to_vec() }
    }

    /// Does row `i` intersect `set`?
    pub fn row_intersects(&self, i: usize, set: &BitSet) -> bool {
        debug_assert_eq!(set.nbits, self.n);
        self.row_words(i).iter().zip(&set.words).any(|(a, b)| a & b != 0)
    }

    pub fn row_is_empty(&self, i: usize) -> bool {
        self.row_words(i).iter().all(|&w| w == 0)
    }

    /// Boolean matrix product: `(self · other)(i,k)` iff `∃j: self(i,j) ∧ other(j,k)`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::new(self.n);
        for i in 0..self.n {
            for j in self.row(i).iter() {
                let src = other.row_words(j).to_vec();
                for (a, b) in out.row_words_mut(i).iter_mut().zip(src) {
                    *a |= b;
                }
            }
        }
        out
    }

    /// `k`-th relational power; `k = 0` is the identity.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn union_with(&mut self, other: &Self) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        assert_eq!(self.n, other.n);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::new(self.n);
        for i in 0..self.n {
            for j in self.row(i).iter() {
                out.set(j, i);
            }
        }
        out
    }

    /// Transitive closure `R⁺` via bit-parallel Floyd–Warshall.
    pub fn transitive_closure(&self) -> Self {
        let mut c = self.clone();
        for k in 0..self.n {
            let krow = c.row_words(k).to_vec();
            for i in 0..self.n {
                if c.get(i, k) {
                    for (a, b) in c.row_words_mut(i).iter_mut().zip(&krow) {
                        *a |= b;
                    }
                }
            }
        }
        c
    }

    pub fn reflexive_closure(&self) -> Self {
        self.union(&Self::identity(self.n))
    }

    /// No point is related to itself.
    pub fn diagonal_empty(&self) -> bool {
        (0..self.n).all(|i| !self.get(i, i))
    }

    /// Every point is related to itself.
    pub fn diagonal_full(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self == &self.transpose()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// All edges in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in self.row(i).iter() {
                out.push((i, j));
            }
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix({}x{}):", self.n, self.n)?;
        for i in 0..self.n {
            for j in 0..self.n {
                write!(f, "{}", if self.get(i, j) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_basics() {
        let mut s = BitSet::new(70);
        assert!(s.is_empty());
        s.insert(0);
        s.insert(69);
        assert!(s.contains(0) && s.contains(69) && !s.contains(35));
        assert_eq!(s.count(), 2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 69]);
        assert_eq!(s.first(), Some(0));
        s.remove(0);
        assert_eq!(s.first(), Some(69));
    }

    #[test]
    fn complement_respects_universe() {
        let mut s = BitSet::singleton(5, 2);
        s.complement();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 1, 3, 4]);
        assert_eq!(s, {
            let mut t = BitSet::full(5);
            t.remove(2);
            t
        });
    }

    #[test]
    fn set_algebra() {
        let a = BitSet::from_indices(6, [0, 2, 4]);
        let b = BitSet::from_indices(6, [2, 3]);
        let mut u = a.clone();
        u.union_with(&b);
        assert_eq!(u, BitSet::from_indices(6, [0, 2, 3, 4]));
        let mut i = a.clone();
        i.intersect_with(&b);
        assert_eq!(i, BitSet::singleton(6, 2));
        assert!(i.is_subset_of(&a) && i.is_subset_of(&b));
        assert!(a.intersects(&b));
        assert!(BitSet::singleton(6, 1).is_disjoint_from(&a));
    }

    #[test]
    fn matrix_product_and_powers() {
        // 3-cycle: 0→1→2→0.
        let c3 = BitMatrix::from_edges(3, [(0, 1), (1, 2), (2, 0)]);
        assert_eq!(c3.pow(3), BitMatrix::identity(3));
        assert_eq!(c3.pow(4), c3);
        assert_eq!(c3.mul(&c3), BitMatrix::from_edges(3, [(0, 2), (1, 0), (2, 1)]));
        assert_eq!(c3.pow(0), BitMatrix::identity(3));
    }

    #[test]
    fn closure_of_chain() {
        let chain = BitMatrix::from_edges(3, [(0, 1), (1, 2)]);
        let plus = chain.transitive_closure();
        assert_eq!(plus, BitMatrix::from_edges(3, [(0, 1), (0, 2), (1, 2)]));
        assert!(plus.diagonal_empty());
        let cyc = BitMatrix::from_edges(2, [(0, 1), (1, 0)]);
        assert_eq!(cyc.transitive_closure(), BitMatrix::from_edges(2, [(0, 1), (1, 0), (0, 0), (1, 1)]));
    }

    #[test]
    fn symmetry_and_diagonal() {
        let m = BitMatrix::from_edges(3, [(0, 1), (1, 0), (2, 2)]);
        assert!(m.is_symmetric());
        assert!(!m.diagonal_empty());
        assert!(!m.diagonal_full());
        assert!(m.reflexive_closure().diagonal_full());
        assert_eq!(m.edges(), vec![(0, 1), (1, 0), (2, 2)]);
    }

    #[test]
    fn transpose_involution() {
        let m = BitMatrix::from_edges(4, [(0, 3), (2, 1), (3, 3)]);
        assert_eq!(m.transpose().transpose(), m);
        assert!(m.row_intersects(0, &BitSet::singleton(4, 3)));
        assert!(!m.row_intersects(0, &BitSet::singleton(4, 1)));
    }
}
