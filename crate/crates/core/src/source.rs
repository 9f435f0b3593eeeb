//! Synthetic quadrature data for vacuum, thermal and squeezed sources, and
//! the seeded selection of check instants.
//!
//! Generation is deterministic for a fixed seed. Gaussian sampling uses a
//! seeded ChaCha stream; the X and P quadratures draw from distinct stream
//! ids so their sequences are independent under the same seed. Partitioned
//! generation assigns one stream id per chunk, so merging a fixed partition
//! plan reproduces the same data regardless of execution order.

use std::collections::{BTreeSet, HashMap};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::entropy::SourceModel;
use crate::error::{Error, Result};
use crate::quantizer::Quadrature;

fn quadrature_stream(quadrature: Quadrature) -> u64 {
    match quadrature {
        Quadrature::X => 0,
        Quadrature::P => 1,
    }
}

fn model_variance(model: &SourceModel, quadrature: Quadrature) -> f64 {
    match quadrature {
        Quadrature::X => model.vx,
        Quadrature::P => model.vp,
    }
}

/// Draw `count` i.i.d. zero-mean Gaussian samples of the chosen quadrature,
/// in SNU. A zero-variance model yields a degenerate all-zero stream.
pub fn sample_quadrature(
    model: &SourceModel,
    quadrature: Quadrature,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    sample_quadrature_chunk(model, quadrature, count, seed, 0)
}

/// Chunked variant: chunk `k` of a partition plan draws from its own stream,
/// so disjoint chunks can be produced concurrently and concatenated.
pub fn sample_quadrature_chunk(
    model: &SourceModel,
    quadrature: Quadrature,
    count: usize,
    seed: u64,
    chunk: u64,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::EmptyInput);
    }
    let variance = model_variance(model, quadrature);
    if !variance.is_finite() || variance < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "quadrature variance must be non-negative, got {variance}"
        )));
    }
    if variance == 0.0 {
        return Ok(vec![0.0; count]);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(quadrature_stream(quadrature) | (chunk << 1));
    let normal = Normal::new(0.0, variance.sqrt())
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok((0..count).map(|_| normal.sample(&mut rng)).collect())
}

/// Bit source driving check-instant selection. Either an unbounded seeded
/// stream or a finite bit buffer that errors on exhaustion.
pub enum SeedStream {
    Seeded { rng: ChaCha12Rng, bits_consumed: u64 },
    Finite { words: Vec<u64>, pos: usize, bits_consumed: u64 },
}

impl SeedStream {
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(u32::MAX)); // keep clear of sample streams
        SeedStream::Seeded {
            rng,
            bits_consumed: 0,
        }
    }

    pub fn from_words(words: Vec<u64>) -> Self {
        SeedStream::Finite {
            words,
            pos: 0,
            bits_consumed: 0,
        }
    }

    fn next_u64(&mut self) -> Result<u64> {
        match self {
            SeedStream::Seeded { rng, bits_consumed } => {
                *bits_consumed += 64;
                Ok(rng.next_u64())
            }
            SeedStream::Finite {
                words,
                pos,
                bits_consumed,
            } => {
                if *pos >= words.len() {
                    return Err(Error::SeedExhausted);
                }
                let w = words[*pos];
                *pos += 1;
                *bits_consumed += 64;
                Ok(w)
            }
        }
    }

    pub fn bits_consumed(&self) -> u64 {
        match self {
            SeedStream::Seeded { bits_consumed, .. } => *bits_consumed,
            SeedStream::Finite { bits_consumed, .. } => *bits_consumed,
        }
    }
}

/// Which of the `n_tot` measurement slots are spent on checking, and how many
/// seed bits the selection actually consumed.
#[derive(Debug, Clone)]
pub struct MeasurementSchedule {
    pub n_tot: u64,
    pub n_c: u64,
    pub check_positions: BTreeSet<u64>,
    pub seed_bits_consumed: u64,
}

impl MeasurementSchedule {
    pub fn is_check(&self, index: u64) -> bool {
        self.check_positions.contains(&index)
    }
}

/// Choose a uniform n_c-subset of [0, n_tot) by a Fisher-Yates prefix over a
/// sparse index map. The seed stream drives every swap; the selection is
/// reproducible for a fixed stream.
pub fn build_schedule(n_tot: u64, n_c: u64, seed: &mut SeedStream) -> Result<MeasurementSchedule> {
    if n_c > n_tot {
        return Err(Error::InvalidParameter(format!(
            "n_c = {n_c} exceeds n_tot = {n_tot}"
        )));
    }
    let mut sparse: HashMap<u64, u64> = HashMap::new();
    let mut positions = BTreeSet::new();
    for j in 0..n_c {
        let span = n_tot - j;
        // multiply-shift range reduction: no rejection loop, bias < 2^-64
        let offset = ((seed.next_u64()? as u128 * span as u128) >> 64) as u64;
        let k = j + offset;
        let picked = *sparse.get(&k).unwrap_or(&k);
        let at_j = *sparse.get(&j).unwrap_or(&j);
        sparse.insert(k, at_j);
        sparse.insert(j, picked);
        positions.insert(picked);
    }
    Ok(MeasurementSchedule {
        n_tot,
        n_c,
        check_positions: positions,
        seed_bits_consumed: seed.bits_consumed(),
    })
}
