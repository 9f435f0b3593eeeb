//! Ideal-homodyne measurement followed by a finite-range, finite-resolution ADC.
//!
//! The continuous quadrature value `a` (in shot-noise units) is digitized over
//! `2^n` bins of width `Δ = N / 2^(n-1)`, with the central bin centered at
//! zero. The covered interval is asymmetric, `[-N + Δ/2, N - 3Δ/2)`; anything
//! below saturates to the lowest code, anything at or above the top boundary
//! saturates to the highest code. Bin boundaries are lower-closed, upper-open.

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};

use crate::error::{Error, Result};

/// Probabilities smaller than this are flushed to zero before entropy
/// evaluation; with `0·log 0 := 0` this keeps far-tail erfc masses from
/// polluting sums with denormals.
pub const PROB_FLUSH: f64 = 1e-300;

/// Tolerance on `Σ p_i = 1` for a valid discrete distribution.
pub const NORM_TOL: f64 = 1e-12;

/// Which quadrature a sample stream belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    X,
    P,
}

impl std::fmt::Display for Quadrature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quadrature::X => write!(f, "X"),
            Quadrature::P => write!(f, "P"),
        }
    }
}

/// ADC geometry: sampling range `N` (SNU) and resolution `n` bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerConfig {
    /// Sampling range N in shot-noise units.
    #[serde(rename = "N")]
    pub range: f64,
    /// Resolution n in bits; the ADC has 2^n codes.
    #[serde(rename = "n")]
    pub bits: u32,
}

impl QuantizerConfig {
    pub fn new(range: f64, bits: u32) -> Result<Self> {
        if !range.is_finite() || range <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "range N must be finite and positive, got {range}"
            )));
        }
        if bits < 1 || bits > 26 {
            return Err(Error::InvalidConfig(format!(
                "resolution n must be in 1..=26, got {bits}"
            )));
        }
        Ok(Self { range, bits })
    }

    /// Bin width Δ = N / 2^(n-1).
    pub fn bin_width(&self) -> f64 {
        self.range / (1u64 << (self.bits - 1)) as f64
    }

    /// Lowest bin index, -2^(n-1).
    pub fn i_min(&self) -> i64 {
        -(1i64 << (self.bits - 1))
    }

    /// Highest bin index, 2^(n-1) - 1.
    pub fn i_max(&self) -> i64 {
        (1i64 << (self.bits - 1)) - 1
    }

    /// Total number of bins, 2^n.
    pub fn num_bins(&self) -> usize {
        1usize << self.bits
    }

    /// Lower saturation boundary, -N + Δ/2.
    pub fn saturation_low(&self) -> f64 {
        -self.range + 0.5 * self.bin_width()
    }

    /// Upper saturation boundary, N - 3Δ/2.
    pub fn saturation_high(&self) -> f64 {
        self.range - 1.5 * self.bin_width()
    }

    fn check_index(&self, i: i64) -> Result<()> {
        if i < self.i_min() || i > self.i_max() {
            return Err(Error::IndexOutOfRange {
                index: i,
                min: self.i_min(),
                max: self.i_max(),
            });
        }
        Ok(())
    }
}

/// Digitize a continuous quadrature value (SNU) into its bin index.
///
/// Saturating branches take precedence: everything below `-N + Δ/2` maps to
/// `i_min`, everything at or above `N - 3Δ/2` maps to `i_max`. Interior bin
/// `i` covers `[iΔ - Δ/2, iΔ + Δ/2)`.
pub fn quantize(a: f64, cfg: &QuantizerConfig) -> Result<i64> {
    if !a.is_finite() {
        return Err(Error::NonFiniteSample);
    }
    if a < cfg.saturation_low() {
        return Ok(cfg.i_min());
    }
    if a >= cfg.saturation_high() {
        return Ok(cfg.i_max());
    }
    let i = (a / cfg.bin_width() + 0.5).floor() as i64;
    // guard against boundary rounding
    Ok(i.clamp(cfg.i_min(), cfg.i_max()))
}

/// Center of bin `i`: `iΔ`, so `i_min ↦ -N` and `i_max ↦ N - Δ`.
pub fn bin_center(i: i64, cfg: &QuantizerConfig) -> Result<f64> {
    cfg.check_index(i)?;
    Ok(i as f64 * cfg.bin_width())
}

fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Analytic or empirical probability over the 2^n ADC bins.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    /// Probabilities indexed from i_min to i_max.
    pub probabilities: Vec<f64>,
    pub config: QuantizerConfig,
}

impl DiscreteDistribution {
    pub fn new(probabilities: Vec<f64>, config: QuantizerConfig) -> Result<Self> {
        if probabilities.len() != config.num_bins() {
            return Err(Error::InvalidConfig(format!(
                "expected {} probabilities, got {}",
                config.num_bins(),
                probabilities.len()
            )));
        }
        if probabilities.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidParameter(
                "probabilities must lie in [0, 1]".into(),
            ));
        }
        let sum = kahan_sum(probabilities.iter().copied());
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self {
            probabilities,
            config,
        })
    }

    /// Probability mass of bin `i`.
    pub fn prob(&self, i: i64) -> f64 {
        self.probabilities[(i - self.config.i_min()) as usize]
    }

    /// Shannon entropy in bits, with 0·log 0 = 0.
    pub fn shannon_entropy(&self) -> f64 {
        -kahan_sum(
            self.probabilities
                .iter()
                .filter(|&&p| p > PROB_FLUSH)
                .map(|&p| p * p.log2()),
        )
    }

    /// Iterate over (bin index, bin center, probability).
    pub fn iter_bins(&self) -> impl Iterator<Item = (i64, f64, f64)> + '_ {
        let i_min = self.config.i_min();
        let width = self.config.bin_width();
        self.probabilities
            .iter()
            .enumerate()
            .map(move |(k, &p)| (i_min + k as i64, (i_min + k as i64) as f64 * width, p))
    }
}

/// Discretized zero-mean Gaussian: the exact bin masses of a Gaussian with
/// standard deviation `sigma` pushed through the ADC model.
///
/// Interior bins are erf differences; the two saturating bins carry the erfc
/// tail masses. erfc is used directly for both edges and far-interior bins so
/// that masses down to ~1e-300 survive without cancellation (at N ≈ 20σ the
/// edge mass is ~1e-89).
pub fn analytic_pdis(sigma: f64, cfg: &QuantizerConfig) -> Result<DiscreteDistribution> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let width = cfg.bin_width();
    let scale = 1.0 / (std::f64::consts::SQRT_2 * sigma);
    let mut probs = vec![0.0f64; cfg.num_bins()];
    for i in (cfg.i_min() + 1)..cfg.i_max() {
        let lo = (i as f64 - 0.5) * width * scale;
        let hi = (i as f64 + 0.5) * width * scale;
        let p = if lo >= 0.0 {
            0.5 * (erfc(lo) - erfc(hi))
        } else if hi <= 0.0 {
            0.5 * (erfc(-hi) - erfc(-lo))
        } else {
            0.5 * (erf(hi) - erf(lo))
        };
        probs[(i - cfg.i_min()) as usize] = if p > PROB_FLUSH { p } else { 0.0 };
    }
    let low_edge = 0.5 * erfc((cfg.range - 0.5 * width) * scale);
    let high_edge = 0.5 * erfc((cfg.range - 1.5 * width) * scale);
    probs[0] = if low_edge > PROB_FLUSH { low_edge } else { 0.0 };
    let last = probs.len() - 1;
    probs[last] = if high_edge > PROB_FLUSH { high_edge } else { 0.0 };
    DiscreteDistribution::new(probs, *cfg)
}

/// Raw bin counts from a digitized sample stream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleHistogram {
    pub config: QuantizerConfig,
    pub label: Quadrature,
    /// Counts indexed from i_min to i_max.
    pub counts: Vec<u64>,
    pub total: u64,
}

impl SampleHistogram {
    pub fn empty(config: QuantizerConfig, label: Quadrature) -> Self {
        Self {
            counts: vec![0; config.num_bins()],
            total: 0,
            config,
            label,
        }
    }

    /// Count each sample into its bin. Errors on an empty stream or any
    /// non-finite value.
    pub fn from_samples(
        samples: impl IntoIterator<Item = f64>,
        config: QuantizerConfig,
        label: Quadrature,
    ) -> Result<Self> {
        let mut hist = Self::empty(config, label);
        for a in samples {
            hist.push(a)?;
        }
        if hist.total == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(hist)
    }

    pub fn push(&mut self, a: f64) -> Result<()> {
        let i = quantize(a, &self.config)?;
        self.counts[(i - self.config.i_min()) as usize] += 1;
        self.total += 1;
        Ok(())
    }

    /// Merge counts from another histogram over the same config; partitioned
    /// streams accumulate this way.
    pub fn merge(&mut self, other: &SampleHistogram) -> Result<()> {
        if self.config != other.config || self.label != other.label {
            return Err(Error::ConfigMismatch);
        }
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        self.total += other.total;
        Ok(())
    }

    /// Mean of bin centers weighted by counts, in SNU.
    pub fn sample_mean(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let width = self.config.bin_width();
        let i_min = self.config.i_min();
        let s: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * (i_min + k as i64) as f64 * width)
            .sum();
        s / self.total as f64
    }

    /// Empirical frequencies as a normalized distribution.
    pub fn to_distribution(&self) -> Result<DiscreteDistribution> {
        if self.total == 0 {
            return Err(Error::EmptyInput);
        }
        let t = self.total as f64;
        let probs = self.counts.iter().map(|&c| c as f64 / t).collect();
        DiscreteDistribution::new(probs, self.config)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let hist: SampleHistogram = serde_json::from_str(s)?;
        if hist.counts.len() != hist.config.num_bins() {
            return Err(Error::InvalidConfig(format!(
                "histogram has {} counts for a {}-bin config",
                hist.counts.len(),
                hist.config.num_bins()
            )));
        }
        if hist.counts.iter().sum::<u64>() != hist.total {
            return Err(Error::InvalidParameter(
                "histogram total does not match counts".into(),
            ));
        }
        Ok(hist)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(range: f64, bits: u32) -> QuantizerConfig {
        QuantizerConfig::new(range, bits).unwrap()
    }

    /// Independent oracle: walk the full piecewise table row by row.
    fn quantize_oracle(a: f64, cfg: &QuantizerConfig) -> i64 {
        let d = cfg.bin_width();
        if a < -cfg.range + 0.5 * d {
            return cfg.i_min();
        }
        for i in (cfg.i_min() + 1)..cfg.i_max() {
            let lo = i as f64 * d - 0.5 * d;
            let hi = i as f64 * d + 0.5 * d;
            if a >= lo && a < hi {
                return i;
            }
        }
        cfg.i_max()
    }

    #[test]
    fn quantize_center_is_zero() {
        for c in [cfg(2.0, 2), cfg(5.0, 8), cfg(21.2098, 12)] {
            assert_eq!(quantize(0.0, &c).unwrap(), 0);
        }
    }

    #[test]
    fn quantize_matches_piecewise_table() {
        // N=2, n=2: Δ=1, bins {-2,-1,0,1}, saturation at -1.5 and 0.5
        let c = cfg(2.0, 2);
        assert_eq!(c.bin_width(), 1.0);
        assert_eq!(quantize(-1.6, &c).unwrap(), -2);
        assert_eq!(quantize(-1.1, &c).unwrap(), -1);
        assert_eq!(quantize(0.99, &c).unwrap(), 1); // >= N - 3Δ/2 = 0.5
        assert_eq!(quantize(1.0, &c).unwrap(), 1);
        assert_eq!(quantize(0.49, &c).unwrap(), 0);
        // brute force over boundary-straddling points for several configs
        for c in [cfg(2.0, 2), cfg(5.0, 4), cfg(3.7, 6)] {
            let d = cfg_step(&c);
            let mut a = -c.range - d;
            while a < c.range + d {
                assert_eq!(
                    quantize(a, &c).unwrap(),
                    quantize_oracle(a, &c),
                    "a={a} cfg={c:?}"
                );
                a += d / 3.0;
            }
        }
    }

    fn cfg_step(c: &QuantizerConfig) -> f64 {
        c.bin_width()
    }

    #[test]
    fn quantize_rejects_non_finite() {
        let c = cfg(5.0, 8);
        assert!(quantize(f64::NAN, &c).is_err());
        assert!(quantize(f64::INFINITY, &c).is_err());
    }

    #[test]
    fn bin_center_endpoints() {
        let c = cfg(2.0, 2);
        assert_eq!(bin_center(0, &c).unwrap(), 0.0);
        assert_eq!(bin_center(c.i_min(), &c).unwrap(), -2.0); // -N
        assert_eq!(bin_center(c.i_max(), &c).unwrap(), 1.0); // N - Δ
        assert!(bin_center(2, &c).is_err());
        assert!(bin_center(-3, &c).is_err());
    }

    #[test]
    fn config_geometry() {
        let c = cfg(21.2098, 12);
        assert_eq!(c.i_max() - c.i_min() + 1, 4096);
        assert!(c.bin_width() > 0.0);
        assert!(QuantizerConfig::new(-1.0, 8).is_err());
        assert!(QuantizerConfig::new(1.0, 0).is_err());
    }

    #[test]
    fn pdis_normalization() {
        for (s, n, b) in [(1.0552, 21.2098, 12), (1.0488, 5.0, 8), (0.3, 2.0, 4)] {
            let d = analytic_pdis(s, &cfg(n, b)).unwrap();
            let sum: f64 = d.probabilities.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "sum={sum}");
        }
    }

    #[test]
    fn pdis_degenerate_concentration() {
        let c = cfg(5.0, 8);
        let d = analytic_pdis(c.bin_width() / 100.0, &c).unwrap();
        assert!(d.prob(0) > 1.0 - 1e-12);
        assert!(d.shannon_entropy() < 1e-9);
    }

    #[test]
    fn pdis_matches_quadrature_oracle() {
        // numerically integrate the Gaussian density over each bin (Simpson)
        let c = cfg(5.0, 8);
        let sigma = 1.0;
        let d = analytic_pdis(sigma, &c).unwrap();
        let pdf = |x: f64| (-x * x / (2.0 * sigma * sigma)).exp()
            / ((2.0 * std::f64::consts::PI).sqrt() * sigma);
        let simpson = |lo: f64, hi: f64| {
            let steps = 64;
            let h = (hi - lo) / steps as f64;
            let mut s = pdf(lo) + pdf(hi);
            for k in 1..steps {
                let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                s += w * pdf(lo + k as f64 * h);
            }
            s * h / 3.0
        };
        let w = c.bin_width();
        for i in (c.i_min() + 1)..c.i_max() {
            let expect = simpson((i as f64 - 0.5) * w, (i as f64 + 0.5) * w);
            assert!(
                (d.prob(i) - expect).abs() < 1e-10,
                "bin {i}: {} vs {}",
                d.prob(i),
                expect
            );
        }
    }

    #[test]
    fn pdis_interior_symmetry_and_edge_asymmetry() {
        let c = cfg(5.0, 8);
        let d = analytic_pdis(1.0488, &c).unwrap();
        for i in 1..c.i_max() {
            let rel = (d.prob(i) - d.prob(-i)).abs() / d.prob(i).max(1e-300);
            assert!(rel < 1e-12, "i={i}");
        }
        // the covered range is asymmetric: the top bin starts saturating a
        // full bin earlier, so it carries more tail mass
        assert!(d.prob(c.i_max()) > d.prob(c.i_min()));
    }

    #[test]
    fn pdis_range_extension_consistency() {
        // doubling range and resolution together keeps the bin width, so
        // every interior bin of the narrow config reappears bit-exactly in
        // the wide one (mid-rise bins do not nest across resolutions, but
        // they are invariant under range extension)
        let narrow_cfg = cfg(5.0, 7);
        let wide_cfg = cfg(10.0, 8);
        assert_eq!(narrow_cfg.bin_width(), wide_cfg.bin_width());
        let narrow = analytic_pdis(1.1, &narrow_cfg).unwrap();
        let wide = analytic_pdis(1.1, &wide_cfg).unwrap();
        for i in (narrow_cfg.i_min() + 1)..narrow_cfg.i_max() {
            assert_eq!(narrow.prob(i), wide.prob(i), "i={i}");
        }
        // and the narrow edge bins absorb exactly the mass the wide config
        // spreads past them
        let low_tail: f64 = (wide_cfg.i_min()..=narrow_cfg.i_min())
            .map(|i| wide.prob(i))
            .sum();
        assert!((narrow.prob(narrow_cfg.i_min()) - low_tail).abs() < 1e-15);
    }

    #[test]
    fn pdis_monotone_saturation() {
        let sigma = 1.05;
        let mut prev = f64::INFINITY;
        for range in [2.0, 3.0, 4.0, 6.0, 8.0] {
            let c = cfg(range, 8);
            let d = analytic_pdis(sigma, &c).unwrap();
            let edge = d.prob(c.i_min()) + d.prob(c.i_max());
            assert!(edge <= prev + 1e-15);
            prev = edge;
        }
    }

    #[test]
    fn quantize_round_trip() {
        let c = cfg(5.0, 8);
        let w = c.bin_width();
        for i in (c.i_min() + 1)..c.i_max() {
            let center = bin_center(i, &c).unwrap();
            for delta in [-0.49 * w, -0.1 * w, 0.0, 0.1 * w, 0.49 * w] {
                assert_eq!(quantize(center + delta, &c).unwrap(), i);
            }
        }
        // edge bins are one-sided
        assert_eq!(quantize(bin_center(c.i_min(), &c).unwrap() - w, &c).unwrap(), c.i_min());
        assert_eq!(quantize(bin_center(c.i_max(), &c).unwrap() + w, &c).unwrap(), c.i_max());
    }

    #[test]
    fn histogram_basics() {
        let c = cfg(5.0, 8);
        let h = SampleHistogram::from_samples([0.0, 0.0, 0.0], c, Quadrature::X).unwrap();
        assert_eq!(h.total, 3);
        assert_eq!(h.counts[(0 - c.i_min()) as usize], 3);
        assert!(SampleHistogram::from_samples(std::iter::empty(), c, Quadrature::X).is_err());
        // single saturating sample
        let h = SampleHistogram::from_samples([1000.0], c, Quadrature::X).unwrap();
        assert_eq!(h.counts[(c.i_max() - c.i_min()) as usize], 1);
    }

    #[test]
    fn histogram_merge_adds_counts() {
        let c = cfg(5.0, 8);
        let mut a = SampleHistogram::from_samples([0.0, 1.0], c, Quadrature::X).unwrap();
        let b = SampleHistogram::from_samples([-1.0, 0.5], c, Quadrature::X).unwrap();
        a.merge(&b).unwrap();
        assert_eq!(a.total, 4);
        let whole =
            SampleHistogram::from_samples([0.0, 1.0, -1.0, 0.5], c, Quadrature::X).unwrap();
        assert_eq!(a.counts, whole.counts);
    }

    #[test]
    fn histogram_json_round_trip() {
        let c = cfg(5.0, 8);
        let h = SampleHistogram::from_samples([0.0, 1.0, -2.3], c, Quadrature::P).unwrap();
        let s = h.to_json().unwrap();
        let back = SampleHistogram::from_json(&s).unwrap();
        assert_eq!(back.counts, h.counts);
        assert_eq!(back.total, 3);
        assert_eq!(back.label, Quadrature::P);
    }
}
