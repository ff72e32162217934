use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::word::{Letter, Word};
use crate::error::{Error, Result};

/// Largest window we are willing to materialize.
pub const MAX_WINDOW_WORDS: usize = 1 << 20;

const NONE: u32 = u32::MAX;

/// The ball `W_d(k)` of reduced words of length at most `k`, in
/// length-then-lexicographic order.
///
/// Because of that order, `W_d(j)` is an index prefix of `W_d(k)` for
/// `j ≤ k`, so a set over a larger window restricts by truncation.
#[derive(Clone, Debug)]
pub struct Window {
    d: usize,
    k: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    // append[i * 2d + slot] = index of words[i]·letter, if it is in the window
    append: Vec<u32>,
    // offsets[j] = number of words of length < j
    offsets: Vec<usize>,
}

/// `1 + Σ_{j=1..k} 2d(2d−1)^{j−1}`, or `None` on overflow.
pub fn window_size(d: usize, k: usize) -> Option<usize> {
    if d == 0 {
        return Some(1);
    }
    let mut total: usize = 1;
    let mut layer: usize = 2 * d;
    for _ in 0..k {
        total = total.checked_add(layer)?;
        layer = layer.checked_mul(2 * d - 1)?;
    }
    Some(total)
}

impl Window {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Mismatch("free group needs d ≥ 1".into()));
        }
        let size = window_size(d, k)
            .filter(|&s| s <= MAX_WINDOW_WORDS)
            .ok_or(Error::CapExceeded { what: format!("window W_{d}({k})"), cap: MAX_WINDOW_WORDS })?;
        let mut words = Vec::with_capacity(size);
        let mut offsets = vec![0];
        words.push(Word::identity());
        let mut layer_start = 0;
        for _ in 0..k {
            let layer_end = words.len();
            offsets.push(layer_end);
            for i in layer_start..layer_end {
                let w = words[i].clone();
                for l in Letter::all(d) {
                    if w.letters().last() == Some(&l.inv()) {
                        continue;
                    }
                    let mut v = w.letters().to_vec();
                    v.push(l);
                    words.push(Word::reduce(v));
                }
            }
            layer_start = layer_end;
        }
        offsets.push(words.len());
        // each layer was produced from a sorted layer by appending letters in
        // order, which keeps it sorted; sort anyway to pin the invariant
        words.sort();
        debug_assert_eq!(words.len(), size);
        let index: HashMap<Word, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut append = vec![NONE; words.len() * 2 * d];
        for (i, w) in words.iter().enumerate() {
            for l in Letter::all(d) {
                if w.letters().last() == Some(&l.inv()) || w.len() == k {
                    continue;
                }
                let mut v = w.letters().to_vec();
                v.push(l);
                append[i * 2 * d + l.slot(d)] = index[&Word::reduce(v)] as u32;
            }
        }
        Ok(Window { d, k, words, index, append, offsets })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Number of words of length `≤ j` (the index prefix that is `W_d(j)`).
    pub fn prefix_len(&self, j: usize) -> usize {
        if j >= self.k {
            self.words.len()
        } else {
            self.offsets[j + 1]
        }
    }

    /// Index of `words[i]·l` when that reduced word is in the window and
    /// the product does not cancel.
    pub fn append(&self, i: usize, l: Letter) -> Option<usize> {
        let v = self.append[i * 2 * self.d + l.slot(self.d)];
        (v != NONE).then_some(v as usize)
    }

    /// Inverse index for every word.
    pub fn inverse_table(&self) -> Vec<usize> {
        self.words.iter().map(|w| self.index[&w.inverse()]).collect()
    }

    /// Empty set over this window.
    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.len())
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    /// Builds a set from words; errors if a word lies outside the window.
    pub fn set_of<'a>(&self, words: impl IntoIterator<Item = &'a Word>) -> Result<FixedBitSet> {
        let mut s = self.empty_set();
        for w in words {
            let i = self
                .index_of(w)
                .ok_or_else(|| Error::InvalidWord(format!("{w} is not in W_{}({})", self.d, self.k)))?;
            s.insert(i);
        }
        Ok(s)
    }

    pub fn words_of<'a>(&'a self, set: &'a FixedBitSet) -> impl Iterator<Item = &'a Word> + 'a {
        set.ones().map(move |i| &self.words[i])
    }
}
