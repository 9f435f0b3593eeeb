//! Packed bit buffer, LSB-first within each 64-bit word.

use serde::{Deserialize, Serialize};

/// Bit index b lives in `words[b / 64]` at position `b % 64`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn new() -> Self {
        Self {
            words: Vec::new(),
            len: 0,
        }
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> Self {
        assert!(len <= words.len() * 64);
        let mut b = Self { words, len };
        b.mask_tail();
        b
    }

    fn mask_tail(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    /// Append the low `n` bits of `value` (n <= 64), LSB first.
    #[inline]
    pub fn push_low_bits(&mut self, value: u64, n: usize) {
        debug_assert!(n <= 64);
        if n == 0 {
            return;
        }
        let offset = self.len % 64;
        let value = if n == 64 { value } else { value & ((1u64 << n) - 1) };
        if offset == 0 {
            self.words.push(value);
        } else {
            *self.words.last_mut().unwrap() |= value << offset;
            if offset + n > 64 {
                self.words.push(value >> (64 - offset));
            }
        }
        self.len += n;
    }

    pub fn push_bit(&mut self, v: bool) {
        self.push_low_bits(u64::from(v), 1);
    }

    /// Append all of `other`.
    pub fn extend_bits(&mut self, other: &Bits) {
        for (k, &w) in other.words.iter().enumerate() {
            let remaining = other.len - k * 64;
            self.push_low_bits(w, remaining.min(64));
        }
    }

    /// Copy `len` bits starting at `start` into a new buffer.
    pub fn slice(&self, start: usize, len: usize) -> Bits {
        assert!(start + len <= self.len);
        let mut out = Bits::with_capacity(len);
        let mut pos = start;
        let mut left = len;
        while left > 0 {
            let word = self.words[pos / 64];
            let offset = pos % 64;
            let take = (64 - offset).min(left);
            out.push_low_bits(word >> offset, take);
            pos += take;
            left -= take;
        }
        out
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// XOR with a buffer of identical length.
    pub fn xor_with(&mut self, other: &Bits) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Pack into bytes, LSB-first; the final partial byte is zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        let mut out = Vec::with_capacity(nbytes);
        for k in 0..nbytes {
            let word = self.words[k / 8];
            out.push((word >> (8 * (k % 8))) as u8);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Self {
        assert!(len <= bytes.len() * 8);
        let mut b = Bits::with_capacity(len);
        for (k, &byte) in bytes.iter().enumerate() {
            let take = (len - 8 * k).min(8);
            b.push_low_bits(byte as u64, take);
            if 8 * (k + 1) >= len {
                break;
            }
        }
        b
    }
}

impl Default for Bits {
    fn default() -> Self {
        Self::new()
    }
}
