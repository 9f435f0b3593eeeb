//! Security-analysis quantities: Shannon entropy of the digitized data,
//! covariance upper bounds estimated from digitized results, the Gaussian
//! von Neumann entropy bound on the eavesdropper's information, extractable
//! randomness and the secure rate with seed-cost accounting.
//!
//! All entropies are in bits (log base 2) and all variances in shot-noise
//! units.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quantizer::DiscreteDistribution;

/// Quadrature covariance matrix of the input state, in SNU.
///
/// The cross term `c` is carried for completeness; the security bound always
/// sets it to zero, which maximizes the symplectic eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub vx: f64,
    pub vp: f64,
    pub c: f64,
}

impl SourceModel {
    /// Symmetric (thermal / vacuum-plus-excess-noise) state: Vx = Vp = 1 + ε.
    pub fn symmetric(epsilon: f64) -> Self {
        Self {
            vx: 1.0 + epsilon,
            vp: 1.0 + epsilon,
            c: 0.0,
        }
    }

    /// Squeezed state with squeeze factor `r`: Vx = e^(-2r) + ε is the
    /// squeezed quadrature, Vp = e^(2r) + ε the anti-squeezed one.
    pub fn squeezed(r: f64, epsilon: f64) -> Self {
        Self {
            vx: (-2.0 * r).exp() + epsilon,
            vp: (2.0 * r).exp() + epsilon,
            c: 0.0,
        }
    }

    /// Symplectic eigenvalue sqrt(VxVp - c^2).
    pub fn symplectic_eigenvalue(&self) -> f64 {
        (self.vx * self.vp - self.c * self.c).sqrt()
    }

    /// Heisenberg bound VxVp - c^2 >= 1 for a physical state.
    pub fn is_physical(&self) -> bool {
        self.vx >= 0.0 && self.vp >= 0.0 && self.vx * self.vp - self.c * self.c >= 1.0 - 1e-12
    }
}

/// Estimated upper bounds on the quadrature variances and the resulting
/// symplectic eigenvalue, with the energy bound used for the edge bins.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CovarianceBound {
    #[serde(rename = "vx_bar_snu")]
    pub vx_bar: f64,
    #[serde(rename = "vp_bar_snu")]
    pub vp_bar: f64,
    pub lambda_bar: f64,
    #[serde(rename = "a_lim_snu")]
    pub a_lim: f64,
}

/// Full per-sample randomness accounting.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RandomnessBudget {
    #[serde(rename = "shannon_entropy_bits_per_sample")]
    pub shannon_h: f64,
    #[serde(rename = "holevo_bound_bits_per_sample")]
    pub holevo_s: f64,
    #[serde(rename = "r_dis_bits_per_sample")]
    pub r_dis: f64,
    pub n_tot: u64,
    pub n_c: u64,
    #[serde(rename = "seed_bits")]
    pub seed_t: u64,
    #[serde(rename = "r_sec_bits_per_sample")]
    pub r_sec: f64,
}

impl RandomnessBudget {
    /// Assemble the budget from the entropy pair and the block bookkeeping.
    /// `n_c` defaults to ⌊√n_tot⌋ when not given.
    pub fn compute(shannon_h: f64, holevo_s: f64, n_tot: u64, n_c: Option<u64>) -> Result<Self> {
        let n_c = n_c.unwrap_or_else(|| default_check_count(n_tot));
        let seed_t = seed_length(n_tot, n_c)?;
        let r_dis = extractable_randomness(shannon_h, holevo_s)?;
        let r_sec = secure_rate(r_dis, n_tot, n_c, seed_t)?;
        Ok(Self {
            shannon_h,
            holevo_s,
            r_dis,
            n_tot,
            n_c,
            seed_t,
            r_sec,
        })
    }

    /// Negative rates are reported, not clamped; they signal abort.
    pub fn is_abort(&self) -> bool {
        self.r_sec <= 0.0
    }
}

/// Shannon entropy of a normalized distribution, in bits.
pub fn shannon_entropy(dist: &DiscreteDistribution) -> f64 {
    dist.shannon_entropy()
}

/// Von Neumann entropy g(λ) of a single-mode Gaussian state with symplectic
/// eigenvalue λ, in bits:
/// g(λ) = ((λ+1)/2)·log2((λ+1)/2) - ((λ-1)/2)·log2((λ-1)/2).
pub fn gaussian_von_neumann(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda < 1.0 {
        return Err(Error::UnphysicalEigenvalue(lambda));
    }
    let hi = (lambda + 1.0) / 2.0;
    let lo = (lambda - 1.0) / 2.0;
    let low_term = if lo > 0.0 { lo * lo.log2() } else { 0.0 };
    Ok(hi * hi.log2() - low_term)
}

/// Infinite-range, infinite-resolution bound on Eve's information for a
/// symmetric state with excess noise ε: g(1 + ε).
pub fn ideal_holevo(epsilon: f64) -> Result<f64> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "excess noise must be non-negative, got {epsilon}"
        )));
    }
    gaussian_von_neumann(1.0 + epsilon)
}

/// Conservative variance bound from a digitized distribution: every bin's
/// unknown continuous value is replaced by its worst-case position. Interior
/// bins are pushed half a bin away from the mean; the two saturating bins are
/// placed at ±a_lim (the energy bound).
pub fn upper_variance(dist: &DiscreteDistribution, a_lim: f64) -> Result<f64> {
    let cfg = &dist.config;
    if a_lim < cfg.range {
        return Err(Error::EnergyBoundTooSmall {
            a_lim,
            range: cfg.range,
        });
    }
    let half = 0.5 * cfg.bin_width();
    let mean: f64 = dist.iter_bins().map(|(_, a, p)| p * a).sum();
    let mut v = dist.prob(cfg.i_min()) * (-a_lim - mean).powi(2)
        + dist.prob(cfg.i_max()) * (a_lim - mean).powi(2);
    for (i, a, p) in dist.iter_bins() {
        if i == cfg.i_min() || i == cfg.i_max() {
            continue;
        }
        let d = a - mean;
        let worst = if d <= 0.0 { d - half } else { d + half };
        v += p * worst * worst;
    }
    Ok(v)
}

/// Estimate the covariance upper bound from both quadrature distributions,
/// with a shared energy bound `a_lim`. λ̄ is clamped to ≥ 1 so the entropy
/// bound stays defined when finite statistics produce a sub-vacuum product.
pub fn estimate_cm_upper(
    dist_x: &DiscreteDistribution,
    dist_p: &DiscreteDistribution,
    a_lim: f64,
) -> Result<CovarianceBound> {
    estimate_cm_upper_asym(dist_x, a_lim, dist_p, a_lim)
}

/// Per-quadrature energy bounds; used when the two quadratures are sampled
/// with different ranges (squeezed-state analysis).
pub fn estimate_cm_upper_asym(
    dist_x: &DiscreteDistribution,
    a_lim_x: f64,
    dist_p: &DiscreteDistribution,
    a_lim_p: f64,
) -> Result<CovarianceBound> {
    let vx_bar = upper_variance(dist_x, a_lim_x)?;
    let vp_bar = upper_variance(dist_p, a_lim_p)?;
    let lambda_bar = (vx_bar * vp_bar).sqrt().max(1.0);
    Ok(CovarianceBound {
        vx_bar,
        vp_bar,
        lambda_bar,
        a_lim: a_lim_x.max(a_lim_p),
    })
}

/// Eve's information bound g(λ̄) for an estimated covariance bound.
pub fn holevo_bound(cov: &CovarianceBound) -> Result<f64> {
    gaussian_von_neumann(cov.lambda_bar)
}

/// R_dis = H - S, bits per sample. A negative result is returned as-is so
/// sweeps can locate zero crossings; callers abort on it.
pub fn extractable_randomness(shannon_h: f64, holevo_s: f64) -> Result<f64> {
    if shannon_h < 0.0 || holevo_s < 0.0 {
        return Err(Error::InvalidParameter(
            "entropies must be non-negative".into(),
        ));
    }
    Ok(shannon_h - holevo_s)
}

/// Default check-sample policy: n_c = ⌊√n_tot⌋.
pub fn default_check_count(n_tot: u64) -> u64 {
    (n_tot as f64).sqrt().floor() as u64
}

/// Seed cost t = ⌈log2 C(n_tot, n_c)⌉ bits, evaluated through log-gamma so
/// the binomial never overflows.
pub fn seed_length(n_tot: u64, n_c: u64) -> Result<u64> {
    if n_c > n_tot {
        return Err(Error::InvalidParameter(format!(
            "n_c = {n_c} exceeds n_tot = {n_tot}"
        )));
    }
    if n_c == 0 || n_c == n_tot {
        return Ok(0);
    }
    let log2_binom = (ln_gamma(n_tot as f64 + 1.0)
        - ln_gamma(n_c as f64 + 1.0)
        - ln_gamma((n_tot - n_c) as f64 + 1.0))
        / std::f64::consts::LN_2;
    // snap to the nearest integer before ceiling so log-gamma rounding noise
    // cannot bump an exact power of two up by one bit
    let nearest = log2_binom.round();
    if (log2_binom - nearest).abs() < 1e-9 * log2_binom.abs().max(1.0) {
        Ok(nearest as u64)
    } else {
        Ok(log2_binom.ceil() as u64)
    }
}

/// Secure rate per measurement: R_sec = [(n_tot - n_c)·R_dis - t] / n_tot.
pub fn secure_rate(r_dis: f64, n_tot: u64, n_c: u64, seed_t: u64) -> Result<f64> {
    if n_c > n_tot || n_tot == 0 {
        return Err(Error::InvalidParameter(format!(
            "invalid counts n_tot = {n_tot}, n_c = {n_c}"
        )));
    }
    Ok(((n_tot - n_c) as f64 * r_dis - seed_t as f64) / n_tot as f64)
}

/// QCNR in dB from excess noise: 10·log10(1/ε).
pub fn qcnr_from_epsilon(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "excess noise must be positive for QCNR, got {epsilon}"
        )));
    }
    Ok(10.0 * (1.0 / epsilon).log10())
}

/// Inverse of [`qcnr_from_epsilon`].
pub fn epsilon_from_qcnr(qcnr_db: f64) -> f64 {
    10f64.powf(-qcnr_db / 10.0)
}
