//! Online sanity checks on extracted output. These are coarse statistical
//! alarms, not a certification; the security claim rests on the entropy
//! accounting upstream.

use crate::bits::Bits;
use crate::error::{Error, Result};

/// z-statistic of the one-proportion test on the fraction of ones.
/// Under uniformity it is asymptotically standard normal.
pub fn monobit_z(bits: &Bits) -> Result<f64> {
    let n = bits.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let ones = bits.count_ones() as f64;
    let n = n as f64;
    Ok((2.0 * ones - n) / n.sqrt())
}

/// z-statistic of the Wald-Wolfowitz runs test against the observed
/// one-fraction. Degenerate (constant) streams are reported as an error
/// rather than a statistic.
pub fn runs_z(bits: &Bits) -> Result<f64> {
    let n = bits.len();
    if n < 2 {
        return Err(Error::EmptyInput);
    }
    let ones = bits.count_ones() as f64;
    let pi = ones / n as f64;
    if pi == 0.0 || pi == 1.0 {
        return Err(Error::InvalidParameter(
            "constant bit stream has no runs statistic".into(),
        ));
    }
    let mut runs = 1u64;
    for i in 1..n {
        if bits.get(i) != bits.get(i - 1) {
            runs += 1;
        }
    }
    let n = n as f64;
    let mean = 2.0 * n * pi * (1.0 - pi);
    let sd = 2.0 * (2.0 * n).sqrt() * pi * (1.0 - pi);
    Ok((runs as f64 - mean) / sd)
}

/// Result of the default alarm battery.
#[derive(Debug, Clone, Copy)]
pub struct HealthReport {
    pub monobit_z: f64,
    pub runs_z: f64,
    pub pass: bool,
}

/// Both statistics must stay inside ±`threshold` (4.0 is the usual alarm
/// level: false-alarm probability ≈ 6e-5 per test).
pub fn health_check(bits: &Bits, threshold: f64) -> Result<HealthReport> {
    let m = monobit_z(bits)?;
    let r = runs_z(bits)?;
    Ok(HealthReport {
        monobit_z: m,
        runs_z: r,
        pass: m.abs() < threshold && r.abs() < threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_bits(seed: u64, len: usize) -> Bits {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut b = Bits::with_capacity(len);
        let mut left = len;
        while left > 0 {
            let take = left.min(64);
            b.push_low_bits(rng.next_u64(), take);
            left -= take;
        }
        b
    }

    #[test]
    fn uniform_stream_passes() {
        let b = random_bits(1, 1 << 20);
        let r = health_check(&b, 4.0).unwrap();
        assert!(r.pass, "monobit = {}, runs = {}", r.monobit_z, r.runs_z);
    }

    #[test]
    fn biased_stream_trips_monobit() {
        // 60% ones
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let mut b = Bits::with_capacity(100_000);
        for _ in 0..100_000 {
            b.push_bit(rng.next_u64() % 10 < 6);
        }
        let r = health_check(&b, 4.0).unwrap();
        assert!(!r.pass);
        assert!(monobit_z(&b).unwrap() > 4.0);
    }

    #[test]
    fn alternating_stream_trips_runs() {
        let mut b = Bits::with_capacity(100_000);
        for k in 0..100_000usize {
            b.push_bit(k % 2 == 0);
        }
        // balanced, so monobit is quiet; runs is far out
        assert!(monobit_z(&b).unwrap().abs() < 1.0);
        assert!(runs_z(&b).unwrap() > 100.0);
        assert!(!health_check(&b, 4.0).unwrap().pass);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(monobit_z(&Bits::new()).is_err());
        let mut b = Bits::new();
        b.push_low_bits(u64::MAX, 64);
        assert!(runs_z(&b).is_err());
    }

    #[test]
    fn monobit_exact_value() {
        // 3 ones in 4 bits: z = (6 - 4)/2 = 1
        let mut b = Bits::new();
        b.push_low_bits(0b0111, 4);
        assert!((monobit_z(&b).unwrap() - 1.0).abs() < 1e-12);
    }
}
