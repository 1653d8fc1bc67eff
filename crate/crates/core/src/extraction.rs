//! Bit extraction from ADC codes.
//!
//! The final bits are the parities of the mod-256 differences of disjoint
//! code pairs, `(c[2j+1] − c[2j]) mod 256`. Because
//! `LSB((a − b) mod 256) = LSB(a) ⊕ LSB(b)`, each final bit is the XOR of two
//! independent raw parities and a raw bias `ε` drops to `2ε²`.
//!
//! # Bit files
//!
//! A packed bit file is a headerless byte stream. Bit 0 of the sequence is the
//! most significant bit of byte 0; pad bits after the last bit are zero. The
//! bit length is not stored in the file.

use std::fs;
use std::path::Path;

use crate::acquisition::SampleBlock;
use crate::error::{invalid_input, invalid_param, Error, Result};

/// Packed, MSB-first bit sequence with an exact bit length.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitSequence {
    bytes: Vec<u8>,
    bit_len: usize,
}

impl BitSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            bit_len: 0,
        }
    }

    /// Takes `bit_len` bits from packed bytes; pad bits beyond `bit_len` are cleared.
    pub fn from_bytes(mut bytes: Vec<u8>, bit_len: usize) -> Result<Self> {
        let need = bit_len.div_ceil(8);
        if bytes.len() < need {
            return Err(invalid_input(format!(
                "{bit_len} bits need {need} bytes, only {} available",
                bytes.len()
            )));
        }
        bytes.truncate(need);
        if bit_len % 8 != 0 {
            let last = bytes.last_mut().expect("need > 0");
            *last &= 0xffu8 << (8 - bit_len % 8);
        }
        Ok(Self { bytes, bit_len })
    }

    pub fn len(&self) -> usize {
        self.bit_len
    }

    pub fn is_empty(&self) -> bool {
        self.bit_len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.bit_len).then(|| self.bytes[i / 8] >> (7 - i % 8) & 1 == 1)
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let off = self.bit_len % 8;
        if off == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> off;
        }
        self.bit_len += 1;
    }

    pub fn extend(&mut self, other: &BitSequence) {
        if self.bit_len % 8 == 0 {
            self.bytes.extend_from_slice(&other.bytes);
            self.bit_len += other.bit_len;
        } else {
            other.iter().for_each(|b| self.push(b));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.bit_len).map(move |i| self.bytes[i / 8] >> (7 - i % 8) & 1 == 1)
    }

    pub fn count_ones(&self) -> u64 {
        self.bytes.iter().map(|b| b.count_ones() as u64).sum()
    }

    /// One byte (0 or 1) per bit.
    pub fn to_bit_vec(&self) -> Vec<u8> {
        unpack_bits(self)
    }

    /// Bits `start..start + len` as a new sequence.
    pub fn slice(&self, start: usize, len: usize) -> BitSequence {
        assert!(start + len <= self.bit_len, "slice out of range");
        if start % 8 == 0 {
            let bytes = self.bytes[start / 8..(start + len).div_ceil(8)].to_vec();
            return BitSequence::from_bytes(bytes, len).expect("length checked");
        }
        let mut out = BitSequence::with_capacity(len);
        for i in start..start + len {
            out.push(self.get(i).unwrap());
        }
        out
    }
}

impl FromIterator<bool> for BitSequence {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut s = BitSequence::new();
        iter.into_iter().for_each(|b| s.push(b));
        s
    }
}

/// Packs 0/1 values (any nonzero byte counts as 1).
pub fn pack_bits(bits: &[u8]) -> BitSequence {
    let bytes = bits
        .chunks(8)
        .map(|c| {
            c.iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | (((b != 0) as u8) << (7 - i)))
        })
        .collect();
    BitSequence {
        bytes,
        bit_len: bits.len(),
    }
}

pub fn unpack_bits(seq: &BitSequence) -> Vec<u8> {
    let mut out = Vec::with_capacity(seq.bit_len);
    for &byte in &seq.bytes {
        for k in (0..8).rev() {
            out.push(byte >> k & 1);
        }
    }
    out.truncate(seq.bit_len);
    out
}

/// Parity of each code: even or odd bin.
pub fn lsb_extract(block: &SampleBlock) -> BitSequence {
    block.codes.iter().map(|&c| c & 1 == 1).collect()
}

/// Disjoint-pair differences `(c[2j+1] − c[2j]) mod 256`; an odd trailing code
/// is dropped.
pub fn pairwise_subtract(block: &SampleBlock) -> SampleBlock {
    let codes = block
        .codes
        .chunks_exact(2)
        .map(|p| p[1].wrapping_sub(p[0]))
        .collect();
    SampleBlock::new(codes, block.sample_rate_hz / 2.0)
}

/// Final random bits: `lsb_extract(pairwise_subtract(block))`, one per code pair.
pub fn final_bits(block: &SampleBlock) -> BitSequence {
    let mut out = BitSequence::with_capacity(block.len() / 2);
    append_final_bits(&block.codes, &mut out);
    out
}

/// Appends the final bits of `codes` to `out`. Pairs never straddle calls, so
/// callers streaming in chunks must pass even-length chunks.
pub(crate) fn append_final_bits(codes: &[u8], out: &mut BitSequence) {
    for p in codes.chunks_exact(2) {
        out.push(p[1].wrapping_sub(p[0]) & 1 == 1);
    }
}

/// The `k` low-order bits of every code, most significant of the `k` first.
pub fn k_lsb_extract(block: &SampleBlock, k: u32) -> Result<BitSequence> {
    if !(1..=8).contains(&k) {
        return Err(invalid_param(format!("k must be in 1..=8, got {k}")));
    }
    let mut out = BitSequence::with_capacity(block.len() * k as usize);
    for &c in &block.codes {
        for j in (0..k).rev() {
            out.push(c >> j & 1 == 1);
        }
    }
    Ok(out)
}

pub fn write_bits(bits: &BitSequence, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, bits.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Reads the first `bit_len` bits of a packed bit file.
pub fn read_bits(path: impl AsRef<Path>, bit_len: usize) -> Result<BitSequence> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    BitSequence::from_bytes(bytes, bit_len).map_err(|e| match e {
        Error::InvalidInput(msg) => {
            Error::InvalidInput(format!("{}: truncated bit file: {msg}", path.display()))
        }
        e => e,
    })
}
