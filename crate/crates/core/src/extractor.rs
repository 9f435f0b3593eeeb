//! Seeded Toeplitz-matrix hashing over GF(2), sized from the randomness
//! budget through the leftover-hash penalty.
//!
//! Matrix layout (fixed, all test vectors depend on it): for an L-bit input
//! and m-bit output, the seed is `m + L - 1` bits and
//! `T[r][c] = seed[r + (L - 1 - c)]`, so the first row read left-to-right is
//! `seed[L-1] .. seed[0]` and the first column read top-down is
//! `seed[L-1] .. seed[L+m-2]`.
//!
//! The product `y = T·x` equals the middle coefficients `L-1 .. L+m-2` of
//! the carry-less polynomial product of the input and the seed, so the fast
//! path is a word-level carry-less multiply that only accumulates the
//! product words overlapping that window (PCLMULQDQ where available, a
//! masked-integer-multiply fallback elsewhere).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::bits::Bits;
use crate::entropy::RandomnessBudget;
use crate::error::{Error, Result};
use crate::quantizer::QuantizerConfig;

/// A fully specified Toeplitz hash instance.
#[derive(Debug, Clone)]
pub struct ToeplitzSpec {
    input_len: usize,
    output_len: usize,
    seed: Bits,
}

impl ToeplitzSpec {
    /// Seed must hold exactly `output_len + input_len - 1` bits.
    pub fn new(input_len: usize, output_len: usize, seed: Bits) -> Result<Self> {
        if input_len == 0 || output_len == 0 || output_len > input_len {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= m <= L, got L = {input_len}, m = {output_len}"
            )));
        }
        let need = output_len + input_len - 1;
        if seed.len() != need {
            return Err(Error::LengthMismatch(format!(
                "seed holds {} bits, spec needs {need}",
                seed.len()
            )));
        }
        Ok(Self {
            input_len,
            output_len,
            seed,
        })
    }

    /// Build from raw seed bytes (LSB-first); extra trailing bits are ignored.
    pub fn from_seed_bytes(input_len: usize, output_len: usize, bytes: &[u8]) -> Result<Self> {
        let need = output_len + input_len.saturating_sub(1);
        if bytes.len() * 8 < need {
            return Err(Error::LengthMismatch(format!(
                "seed file holds {} bits, spec needs {need}",
                bytes.len() * 8
            )));
        }
        Self::new(input_len, output_len, Bits::from_bytes(bytes, need))
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn output_len(&self) -> usize {
        self.output_len
    }

    /// Matrix entry T[row][col] under the documented layout.
    pub fn entry(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.output_len && col < self.input_len);
        self.seed.get(row + (self.input_len - 1 - col))
    }
}

#[cfg(target_arch = "x86_64")]
mod clmul {
    use std::sync::LazyLock;

    pub static HAVE_PCLMUL: LazyLock<bool> =
        LazyLock::new(|| std::arch::is_x86_feature_detected!("pclmulqdq"));

    #[inline]
    #[target_feature(enable = "pclmulqdq")]
    unsafe fn clmul64_hw(a: u64, b: u64) -> u128 {
        use std::arch::x86_64::*;
        let va = _mm_set_epi64x(0, a as i64);
        let vb = _mm_set_epi64x(0, b as i64);
        std::mem::transmute(_mm_clmulepi64_si128(va, vb, 0x00))
    }

    /// Whole-loop hardware path: keeping the double loop inside one
    /// target-feature region lets the intrinsic inline and pipeline.
    #[target_feature(enable = "pclmulqdq")]
    pub unsafe fn middle_product_hw(x: &[u64], s: &[u64], prod: &mut [u64], base: usize, whi: usize) {
        super::middle_product_body(x, s, prod, base, whi, |a, b| unsafe { clmul64_hw(a, b) });
    }

    /// Word-level entry point, used by the equivalence tests.
    #[cfg_attr(not(test), allow(dead_code))]
    #[inline]
    pub fn clmul64(a: u64, b: u64) -> u128 {
        if *HAVE_PCLMUL {
            unsafe { clmul64_hw(a, b) }
        } else {
            super::clmul64_soft(a, b)
        }
    }
}

#[cfg(not(target_arch = "x86_64"))]
mod clmul {
    #[inline]
    pub fn clmul64(a: u64, b: u64) -> u128 {
        super::clmul64_soft(a, b)
    }
}

/// Accumulate the product words of `x`·`s` with word indices in
/// [base, whi+1] into `prod` (indexed from `base`).
#[inline(always)]
fn middle_product_body(
    x: &[u64],
    s: &[u64],
    prod: &mut [u64],
    base: usize,
    whi: usize,
    mul: impl Fn(u64, u64) -> u128,
) {
    for (i, &xw) in x.iter().enumerate() {
        if xw == 0 {
            continue;
        }
        let j_lo = base.saturating_sub(i);
        if j_lo >= s.len() || i > whi {
            continue;
        }
        let j_hi = (whi - i).min(s.len() - 1);
        let seeds = &s[j_lo..=j_hi];
        let out = &mut prod[i + j_lo - base..i + j_hi - base + 2];
        // fold the high product half into the next word through a running
        // carry so each iteration touches memory once
        let mut carry = 0u64;
        for (acc, &sw) in out.iter_mut().zip(seeds) {
            let r = mul(xw, sw);
            *acc ^= (r as u64) ^ carry;
            carry = (r >> 64) as u64;
        }
        out[seeds.len()] ^= carry;
    }
}

fn middle_product(x: &[u64], s: &[u64], prod: &mut [u64], base: usize, whi: usize) {
    #[cfg(target_arch = "x86_64")]
    if *clmul::HAVE_PCLMUL {
        unsafe { clmul::middle_product_hw(x, s, prod, base, whi) };
        return;
    }
    middle_product_body(x, s, prod, base, whi, clmul64_soft);
}

/// Carry-less 32x32 multiply through masked integer multiplies. Each masked
/// stream has at most 8 aligned partial products per column, so carries
/// never reach the next 4-bit-spaced lane.
fn clmul32_soft(a: u32, b: u32) -> u64 {
    const M: [u64; 4] = [
        0x1111_1111,
        0x2222_2222,
        0x4444_4444,
        0x8888_8888,
    ];
    const R: [u64; 4] = [
        0x1111_1111_1111_1111,
        0x2222_2222_2222_2222,
        0x4444_4444_4444_4444,
        0x8888_8888_8888_8888,
    ];
    let a = a as u64;
    let b = b as u64;
    let mut out = 0u64;
    for i in 0..4 {
        let ai = a & M[i];
        for j in 0..4 {
            let bj = b & M[j];
            out ^= ai.wrapping_mul(bj) & R[(i + j) % 4];
        }
    }
    out
}

fn clmul64_soft(a: u64, b: u64) -> u128 {
    let (al, ah) = (a as u32, (a >> 32) as u32);
    let (bl, bh) = (b as u32, (b >> 32) as u32);
    let ll = clmul32_soft(al, bl) as u128;
    let hh = clmul32_soft(ah, bh) as u128;
    let mid = (clmul32_soft(al, bh) ^ clmul32_soft(ah, bl)) as u128;
    ll ^ (mid << 32) ^ (hh << 64)
}

/// y = T·x over GF(2) via the middle product of the carry-less polynomial
/// multiply; deterministic and linear in x for a fixed seed.
pub fn toeplitz_extract(input: &Bits, spec: &ToeplitzSpec) -> Result<Bits> {
    if input.len() != spec.input_len {
        return Err(Error::LengthMismatch(format!(
            "input holds {} bits, spec expects {}",
            input.len(),
            spec.input_len
        )));
    }
    let l = spec.input_len;
    let m = spec.output_len;
    let x = input.words();
    let s = spec.seed.words();
    // product words overlapping the coefficient window [L-1, L+m-2]
    let wlo = (l - 1) / 64;
    let whi = (l - 1 + m - 1) / 64;
    let base = wlo.saturating_sub(1);
    let mut prod = vec![0u64; whi - base + 2];
    middle_product(x, s, &mut prod, base, whi);
    let offset = (l - 1) - 64 * base;
    let nbits = prod.len() * 64;
    Ok(Bits::from_words(prod, nbits).slice(offset, m))
}

/// How a trailing partial block is handled by [`extract_stream`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartialBlock {
    Discard,
    Error,
}

/// Block geometry and leftover-hash sizing for streaming extraction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExtractionPlan {
    pub samples_per_block: usize,
    pub bits_per_sample: u32,
    /// L = samples_per_block · bits_per_sample.
    pub input_len: usize,
    /// Security parameter of the leftover hash, e.g. 2^-50.
    pub security_eps: f64,
    /// m = ⌊samples_per_block · r_sec − 2·log2(1/eps)⌋.
    pub output_len: usize,
}

/// Size the per-block output from the certified rate. Refuses plans that
/// cannot emit at least one bit per block.
pub fn plan_extraction(
    budget: &RandomnessBudget,
    samples_per_block: usize,
    bits_per_sample: u32,
    security_eps: f64,
) -> Result<ExtractionPlan> {
    plan_from_rate(budget.r_sec, samples_per_block, bits_per_sample, security_eps)
}

pub fn plan_from_rate(
    r_sec: f64,
    samples_per_block: usize,
    bits_per_sample: u32,
    security_eps: f64,
) -> Result<ExtractionPlan> {
    if r_sec <= 0.0 {
        return Err(Error::NoCertifiableRandomness { rate: r_sec });
    }
    if samples_per_block == 0 || bits_per_sample == 0 {
        return Err(Error::InvalidParameter(
            "block must contain at least one sample and one bit".into(),
        ));
    }
    if !(security_eps > 0.0 && security_eps <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "security parameter must lie in (0, 1], got {security_eps}"
        )));
    }
    let input_len = samples_per_block * bits_per_sample as usize;
    let penalty = 2.0 * (1.0 / security_eps).log2();
    let m = (samples_per_block as f64 * r_sec - penalty).floor();
    if m < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "block yields m = {m} < 1 output bits; enlarge the block"
        )));
    }
    let output_len = (m as usize).min(input_len);
    Ok(ExtractionPlan {
        samples_per_block,
        bits_per_sample,
        input_len,
        security_eps,
        output_len,
    })
}

/// Throughput accounting for a streaming extraction run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThroughputReport {
    pub input_bits: u64,
    pub output_bits: u64,
    pub blocks: u64,
    pub elapsed_secs: f64,
    pub input_bits_per_sec: f64,
}

/// Pack a block of bin indices into its L-bit buffer: each sample
/// contributes `bits_per_sample` bits of its offset-binary code
/// (`i - i_min`), LSB first.
fn pack_block(samples: &[i64], cfg: &QuantizerConfig) -> Bits {
    let n = cfg.bits as usize;
    let i_min = cfg.i_min();
    let mut bits = Bits::with_capacity(samples.len() * n);
    for &s in samples {
        bits.push_low_bits((s - i_min) as u64, n);
    }
    bits
}

/// Extract a full sample stream block by block with one reused seed.
/// Blocks are processed in parallel but reassembled in stream order, so the
/// output is identical for any worker count.
pub fn extract_stream(
    samples: &[i64],
    cfg: &QuantizerConfig,
    plan: &ExtractionPlan,
    spec: &ToeplitzSpec,
    partial: PartialBlock,
) -> Result<(Bits, ThroughputReport)> {
    if plan.bits_per_sample != cfg.bits {
        return Err(Error::ConfigMismatch);
    }
    if spec.input_len != plan.input_len || spec.output_len != plan.output_len {
        return Err(Error::LengthMismatch(
            "Toeplitz spec does not match the extraction plan".into(),
        ));
    }
    let spb = plan.samples_per_block;
    let remainder = samples.len() % spb;
    if remainder != 0 && partial == PartialBlock::Error {
        return Err(Error::PartialBlock {
            got: remainder * plan.bits_per_sample as usize,
            expected: plan.input_len,
        });
    }
    let whole = &samples[..samples.len() - remainder];
    let start = Instant::now();
    let blocks: Vec<Bits> = whole
        .par_chunks_exact(spb)
        .map(|chunk| toeplitz_extract(&pack_block(chunk, cfg), spec))
        .collect::<Result<_>>()?;
    let mut out = Bits::with_capacity(blocks.len() * plan.output_len);
    for b in &blocks {
        out.extend_bits(b);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let input_bits = (whole.len() * plan.bits_per_sample as usize) as u64;
    let report = ThroughputReport {
        input_bits,
        output_bits: out.len() as u64,
        blocks: blocks.len() as u64,
        elapsed_secs: elapsed,
        input_bits_per_sec: input_bits as f64 / elapsed.max(1e-12),
    };
    Ok((out, report))
}
