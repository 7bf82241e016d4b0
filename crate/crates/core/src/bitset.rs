//! Fixed-width dense bit vectors with word-parallel shifted unions.
//!
//! This is the computational kernel behind the dilated sumset and the
//! residue-set algebra: a sumset `S + T` over a bounded window is the union of
//! copies of one operand's bit pattern shifted by each element of the other.

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// `dst |= src << shift`, dropping bits that fall past the end of `dst`.
///
/// Bits beyond the logical width of `dst` are not masked here; callers that
/// track a width use [`BitVec`], which masks the tail itself.
pub fn or_shifted_left(dst: &mut [u64], src: &[u64], shift: usize) {
    let word_shift = shift / WORD;
    let bit_shift = shift % WORD;
    if word_shift >= dst.len() {
        return;
    }
    let usable = (dst.len() - word_shift).min(src.len());
    if bit_shift == 0 {
        for (d, &s) in dst[word_shift..word_shift + usable].iter_mut().zip(src) {
            *d |= s;
        }
        return;
    }
    for (i, &s) in src.iter().enumerate().take(usable) {
        dst[i + word_shift] |= s << bit_shift;
        if let Some(next) = dst.get_mut(i + word_shift + 1) {
            *next |= s >> (WORD - bit_shift);
        }
    }
}

/// `dst |= src >> shift`.
pub fn or_shifted_right(dst: &mut [u64], src: &[u64], shift: usize) {
    let word_shift = shift / WORD;
    let bit_shift = shift % WORD;
    if word_shift >= src.len() {
        return;
    }
    for (i, d) in dst.iter_mut().enumerate() {
        let lo_idx = i + word_shift;
        if lo_idx >= src.len() {
            break;
        }
        let mut w = src[lo_idx] >> bit_shift;
        if bit_shift != 0 {
            if let Some(&hi) = src.get(lo_idx + 1) {
                w |= hi << (WORD - bit_shift);
            }
        }
        *d |= w;
    }
}

/// A dense bit vector of fixed logical width.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector of width `len` with the given positions set.
    ///
    /// Panics if a position is out of range.
    pub fn from_positions(len: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut bv = Self::zeros(len);
        for p in positions {
            bv.set(p);
        }
        bv
    }

    /// Width in bits.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for width {}", self.len);
        self.words[i / WORD] |= 1u64 << (i % WORD);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len && (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn none(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// `self |= other << shift`, truncated to this vector's width.
    pub fn or_shifted(&mut self, other: &BitVec, shift: usize) {
        or_shifted_left(&mut self.words, &other.words, shift);
        self.mask_tail();
    }

    pub fn union_with(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn difference_with(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
    }

    pub fn is_subset(&self, other: &BitVec) -> bool {
        self.len == other.len
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// Cyclic rotation within the logical width: bit `i` moves to `(i + t) mod len`.
    pub fn rotate_left(&self, t: usize) -> BitVec {
        if self.len == 0 {
            return self.clone();
        }
        let t = t % self.len;
        if t == 0 {
            return self.clone();
        }
        let mut out = BitVec::zeros(self.len);
        or_shifted_left(&mut out.words, &self.words, t);
        out.mask_tail();
        or_shifted_right(&mut out.words, &self.words, self.len - t);
        out
    }
}
