//! Parameter studies over the full analysis pipeline: entropy and rate
//! versus sampling range, resolution, excess noise / QCNR and squeezing,
//! plus the optimal-range search and the bin-width zero-crossing analysis.
//!
//! Every row is produced by the same path as a real analysis run:
//! discretized Gaussian → Shannon entropy, digitized covariance upper bound
//! → von Neumann bound → extractable randomness. Sweeps are deterministic
//! and rows that fail carry the failure reason instead of aborting the
//! whole table.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{
    epsilon_from_qcnr, estimate_cm_upper_asym, extractable_randomness, holevo_bound, ideal_holevo,
    CovarianceBound,
};
use crate::error::{Error, Result};
use crate::quantizer::{analytic_pdis, QuantizerConfig, Quadrature};

/// Energy bound used when the operator does not supply one: generous enough
/// that the edge-bin penalty stays negligible, never below the sampling
/// range itself.
pub fn default_energy_bound(range: f64, sigma2: f64) -> f64 {
    range.max(10.0 * sigma2.sqrt())
}

/// One fully resolved operating point of the analysis pipeline.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PipelineParams {
    pub sigma2_x: f64,
    pub sigma2_p: f64,
    /// Sampling range per quadrature, absolute SNU.
    pub range_x: f64,
    pub range_p: f64,
    pub bits: u32,
    pub a_lim_x: f64,
    pub a_lim_p: f64,
    /// Quadrature whose digitized entropy feeds the generation rate.
    pub generate_from: Quadrature,
}

impl PipelineParams {
    /// Symmetric state: both quadratures share variance and range.
    pub fn symmetric(sigma2: f64, range: f64, bits: u32) -> Self {
        let a_lim = default_energy_bound(range, sigma2);
        Self {
            sigma2_x: sigma2,
            sigma2_p: sigma2,
            range_x: range,
            range_p: range,
            bits,
            a_lim_x: a_lim,
            a_lim_p: a_lim,
            generate_from: Quadrature::X,
        }
    }

    /// Squeezed input with per-quadrature ranges of `range_sigmas`·σ_q;
    /// generation reads the anti-squeezed quadrature.
    pub fn squeezed(r: f64, epsilon: f64, bits: u32, range_sigmas: f64) -> Self {
        let sigma2_x = (-2.0 * r).exp() + epsilon;
        let sigma2_p = (2.0 * r).exp() + epsilon;
        let range_x = range_sigmas * sigma2_x.sqrt();
        let range_p = range_sigmas * sigma2_p.sqrt();
        Self {
            sigma2_x,
            sigma2_p,
            range_x,
            range_p,
            bits,
            a_lim_x: default_energy_bound(range_x, sigma2_x),
            a_lim_p: default_energy_bound(range_p, sigma2_p),
            generate_from: Quadrature::P,
        }
    }
}

/// Entropy accounting at one operating point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PipelineEval {
    pub h: f64,
    pub s: f64,
    pub r_dis: f64,
    pub cov: CovarianceBound,
}

/// Full analytic pipeline at one operating point.
pub fn evaluate_pipeline(params: &PipelineParams) -> Result<PipelineEval> {
    let cfg_x = QuantizerConfig::new(params.range_x, params.bits)?;
    let cfg_p = QuantizerConfig::new(params.range_p, params.bits)?;
    let dist_x = analytic_pdis(params.sigma2_x.sqrt(), &cfg_x)?;
    let dist_p = analytic_pdis(params.sigma2_p.sqrt(), &cfg_p)?;
    let h = match params.generate_from {
        Quadrature::X => dist_x.shannon_entropy(),
        Quadrature::P => dist_p.shannon_entropy(),
    };
    let cov = estimate_cm_upper_asym(&dist_x, params.a_lim_x, &dist_p, params.a_lim_p)?;
    let s = holevo_bound(&cov)?;
    let r_dis = extractable_randomness(h, s)?;
    Ok(PipelineEval { h, s, r_dis, cov })
}

/// Axis of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParameter {
    /// Sampling range N, absolute SNU.
    RangeN,
    /// ADC resolution n (integer-valued grid).
    ResolutionN,
    /// Excess noise ε.
    Epsilon,
    /// QCNR in dB (mapped to ε = 10^(-q/10)).
    QcnrDb,
    /// Squeeze factor r.
    SqueezeR,
    /// Zero-crossing axis k = Δ·σ (bin width Δ = k/σ).
    KDeltaSigma,
}

/// Context held fixed while one parameter runs over the grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FixedContext {
    pub epsilon: f64,
    pub bits: u32,
    /// Sampling range; in σ units when `range_in_sigmas`, else SNU.
    pub range: f64,
    pub range_in_sigmas: bool,
    /// Non-zero switches the pipeline to the squeezed-input variant.
    pub squeeze_r: f64,
    /// Per-quadrature range for the squeezed variant, in σ_q units.
    pub squeezed_range_sigmas: f64,
    /// k-sweeps only: take the covariance estimate as ideal.
    pub ignore_cm_digitization: bool,
}

impl Default for FixedContext {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            bits: 12,
            range: 5.0,
            range_in_sigmas: false,
            squeeze_r: 0.0,
            squeezed_range_sigmas: 3.0,
            ignore_cm_digitization: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub swept: SweptParameter,
    pub grid: Vec<f64>,
    #[serde(default)]
    pub fixed: FixedContext,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter("sweep grid is empty".into()));
        }
        if !self.grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "sweep grid must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// One grid point; `error` is set (and the values absent) when the pipeline
/// rejected that point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub h: Option<f64>,
    pub s: Option<f64>,
    pub r_dis: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

fn integer_bits(value: f64) -> Result<u32> {
    let rounded = value.round();
    if (value - rounded).abs() > 1e-9 || !(1.0..=26.0).contains(&rounded) {
        return Err(Error::InvalidParameter(format!(
            "resolution grid value {value} is not a valid bit count"
        )));
    }
    Ok(rounded as u32)
}

/// Pipeline at bin width Δ = k/σ for the symmetric measured state (the
/// crossing axis is k = Δ·σ, which tracks the squeezed-adversary bin
/// count); the flag replaces the digitized covariance estimate with the
/// ideal one.
fn eval_k_point(
    bits: u32,
    epsilon: f64,
    k: f64,
    ignore_cm_digitization: bool,
) -> Result<PipelineEval> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bin width must be positive, got k = {k}"
        )));
    }
    let sigma2 = 1.0 + epsilon;
    let range = k / sigma2.sqrt() * f64::from(1u32 << (bits - 1));
    if ignore_cm_digitization {
        let cfg = QuantizerConfig::new(range, bits)?;
        let dist = analytic_pdis(sigma2.sqrt(), &cfg)?;
        let h = dist.shannon_entropy();
        let s = ideal_holevo(epsilon)?;
        let lambda = 1.0 + epsilon;
        Ok(PipelineEval {
            h,
            s,
            r_dis: h - s,
            cov: CovarianceBound {
                vx_bar: lambda,
                vp_bar: lambda,
                lambda_bar: lambda,
                a_lim: f64::INFINITY,
            },
        })
    } else {
        evaluate_pipeline(&PipelineParams::symmetric(sigma2, range, bits))
    }
}

fn eval_point(spec: &SweepSpec, value: f64) -> Result<PipelineEval> {
    let f = &spec.fixed;
    let mut epsilon = f.epsilon;
    let mut bits = f.bits;
    let mut range = f.range;
    let mut range_in_sigmas = f.range_in_sigmas;
    let mut squeeze_r = f.squeeze_r;
    match spec.swept {
        SweptParameter::RangeN => {
            range = value;
            range_in_sigmas = false;
        }
        SweptParameter::ResolutionN => bits = integer_bits(value)?,
        SweptParameter::Epsilon => epsilon = value,
        SweptParameter::QcnrDb => epsilon = epsilon_from_qcnr(value),
        SweptParameter::SqueezeR => squeeze_r = value,
        SweptParameter::KDeltaSigma => {
            return eval_k_point(bits, epsilon, value, f.ignore_cm_digitization)
        }
    }
    if squeeze_r != 0.0 {
        evaluate_pipeline(&PipelineParams::squeezed(
            squeeze_r,
            epsilon,
            bits,
            f.squeezed_range_sigmas,
        ))
    } else {
        let sigma2 = 1.0 + epsilon;
        let abs_range = if range_in_sigmas {
            range * sigma2.sqrt()
        } else {
            range
        };
        evaluate_pipeline(&PipelineParams::symmetric(sigma2, abs_range, bits))
    }
}

/// Evaluate every grid point; failed points become rows carrying the reason.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let rows = spec
        .grid
        .par_iter()
        .map(|&value| match eval_point(spec, value) {
            Ok(eval) => SweepRow {
                value,
                h: Some(eval.h),
                s: Some(eval.s),
                r_dis: Some(eval.r_dis),
                error: None,
            },
            Err(e) => SweepRow {
                value,
                h: None,
                s: None,
                r_dis: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(SweepTable {
        spec: spec.clone(),
        rows,
    })
}

/// Result of the sampling-range optimization, in σ units.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OptimalRange {
    pub n_star_sigma: f64,
    pub r_dis: f64,
    /// Objective was flat over the interval; the midpoint was returned.
    pub flat: bool,
}

/// Maximize R_dis over the sampling range N ∈ [lo, hi]·σ: coarse grid to
/// bracket the peak, then golden-section refinement to 1e-3 σ.
pub fn optimal_range(epsilon: f64, bits: u32, lo_sigma: f64, hi_sigma: f64) -> Result<OptimalRange> {
    if !(lo_sigma > 0.0 && hi_sigma > lo_sigma) {
        return Err(Error::InvalidParameter(format!(
            "bad search interval [{lo_sigma}, {hi_sigma}]"
        )));
    }
    let sigma2 = 1.0 + epsilon;
    let sigma = sigma2.sqrt();
    let objective = |nsig: f64| -> Result<f64> {
        Ok(evaluate_pipeline(&PipelineParams::symmetric(sigma2, nsig * sigma, bits))?.r_dis)
    };
    const COARSE: usize = 48;
    let step = (hi_sigma - lo_sigma) / (COARSE - 1) as f64;
    let grid: Vec<f64> = (0..COARSE).map(|i| lo_sigma + i as f64 * step).collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&x| objective(x))
        .collect::<Result<_>>()?;
    let (best, &best_val) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let worst = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if best_val - worst < 1e-9 {
        return Ok(OptimalRange {
            n_star_sigma: 0.5 * (lo_sigma + hi_sigma),
            r_dis: best_val,
            flat: true,
        });
    }
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(COARSE - 1)];
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INVPHI * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    while b - a > 1e-3 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = objective(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INVPHI * (b - a);
            f1 = objective(x1)?;
        }
    }
    let n_star = 0.5 * (a + b);
    Ok(OptimalRange {
        n_star_sigma: n_star,
        r_dis: objective(n_star)?,
        flat: false,
    })
}

/// Zero crossing of R_dis as the bin width grows, per QCNR.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ZeroCrossing {
    pub qcnr_db: f64,
    /// k = Δ_max·σ at the crossing; `None` when no crossing exists in the
    /// searched window (flagged rather than fabricated).
    pub k: Option<f64>,
    pub delta_max_snu: Option<f64>,
    /// The coarse "at least two or three bins across the distribution"
    /// design rule, reported alongside the numerical value.
    pub heuristic_k: f64,
}

const K_SEARCH_LO: f64 = 0.5;
const K_SEARCH_HI: f64 = 8.0;

/// Locate the largest usable bin width: R_dis(k) is scanned for its peak
/// and the descending branch is bisected to 1e-4 in k. With the flag set
/// the covariance estimate is taken as ideal; without it the digitized
/// estimate is used and the crossing moves to smaller k.
pub fn zero_crossing_k(
    bits: u32,
    qcnr_db: &[f64],
    ignore_cm_digitization: bool,
) -> Result<Vec<ZeroCrossing>> {
    if ![8, 12, 16].contains(&bits) {
        return Err(Error::InvalidParameter(format!(
            "crossing analysis is defined for n in {{8, 12, 16}}, got {bits}"
        )));
    }
    qcnr_db
        .par_iter()
        .map(|&q| {
            let epsilon = epsilon_from_qcnr(q);
            let r_at = |k: f64| -> Result<f64> {
                Ok(eval_k_point(bits, epsilon, k, ignore_cm_digitization)?.r_dis)
            };
            const STEPS: usize = 151;
            let step = (K_SEARCH_HI - K_SEARCH_LO) / (STEPS - 1) as f64;
            let mut scan = Vec::with_capacity(STEPS);
            for i in 0..STEPS {
                let k = K_SEARCH_LO + i as f64 * step;
                scan.push((k, r_at(k)?));
            }
            let peak = scan
                .iter()
                .enumerate()
                .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
                .map(|(i, _)| i)
                .unwrap();
            // the rate must go positive somewhere, and come back down
            let cross = (peak..STEPS - 1).find(|&i| scan[i].1 > 0.0 && scan[i + 1].1 <= 0.0);
            let k = match cross {
                None => None,
                Some(i) => {
                    let (mut lo, mut hi) = (scan[i].0, scan[i + 1].0);
                    while hi - lo > 1e-4 {
                        let mid = 0.5 * (lo + hi);
                        if r_at(mid)? > 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    Some(0.5 * (lo + hi))
                }
            };
            Ok(ZeroCrossing {
                qcnr_db: q,
                k,
                delta_max_snu: k.map(|k| k / (1.0 + epsilon).sqrt()),
                heuristic_k: 3.0,
            })
        })
        .collect()
}

/// Canonical reproduction table for one of the published parameter studies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FigureTable {
    pub figure: u8,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Fixed-parameter sidecar, one JSON object per table.
    pub fixed: serde_json::Value,
}

impl FigureTable {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.9e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + i as f64 * step).collect()
}

fn sweep_rows_ok(spec: &SweepSpec) -> Result<Vec<(f64, f64, f64, f64)>> {
    let table = run_sweep(spec)?;
    table
        .rows
        .into_iter()
        .map(|r| match (r.h, r.s, r.r_dis, r.error) {
            (Some(h), Some(s), Some(rd), None) => Ok((r.value, h, s, rd)),
            (_, _, _, reason) => Err(Error::InvalidParameter(format!(
                "grid point {} failed: {}",
                r.value,
                reason.unwrap_or_default()
            ))),
        })
        .collect()
}

/// The fixed grids behind `--figure {2..8}`.
pub fn figure_table(figure: u8) -> Result<FigureTable> {
    match figure {
        // rate vs sampling range, one curve per resolution
        2 => {
            let mut rows = Vec::new();
            for bits in [2u32, 4, 8, 12, 16] {
                let spec = SweepSpec {
                    swept: SweptParameter::RangeN,
                    grid: linspace(0.5, 10.0, 39),
                    fixed: FixedContext {
                        bits,
                        ..FixedContext::default()
                    },
                };
                for (n, h, s, r) in sweep_rows_ok(&spec)? {
                    rows.push(vec![n, f64::from(bits), h, s, r]);
                }
            }
            Ok(FigureTable {
                figure,
                columns: str_cols(&["range_snu", "bits", "h", "s", "r_dis"]),
                rows,
                fixed: serde_json::json!({"epsilon": 0.1}),
            })
        }
        // rate vs resolution
        3 => {
            let spec = SweepSpec {
                swept: SweptParameter::ResolutionN,
                grid: (2..=16).map(f64::from).collect(),
                fixed: FixedContext::default(),
            };
            let rows = sweep_rows_ok(&spec)?
                .into_iter()
                .map(|(n, h, s, r)| vec![n, h, s, r])
                .collect();
            Ok(FigureTable {
                figure,
                columns: str_cols(&["bits", "h", "s", "r_dis"]),
                rows,
                fixed: serde_json::json!({"epsilon": 0.1, "range_snu": 5.0}),
            })
        }
        // rate vs excess noise (log grid)
        4 => {
            let grid: Vec<f64> = linspace(-3.0, 0.0, 31)
                .into_iter()
                .map(|e| 10f64.powf(e))
                .collect();
            let spec = SweepSpec {
                swept: SweptParameter::Epsilon,
                grid,
                fixed: FixedContext::default(),
            };
            let rows = sweep_rows_ok(&spec)?
                .into_iter()
                .map(|(e, h, s, r)| vec![e, h, s, r])
                .collect();
            Ok(FigureTable {
                figure,
                columns: str_cols(&["epsilon", "h", "s", "r_dis"]),
                rows,
                fixed: serde_json::json!({"bits": 12, "range_snu": 5.0}),
            })
        }
        // rate vs QCNR
        5 => {
            let spec = SweepSpec {
                swept: SweptParameter::QcnrDb,
                grid: linspace(0.0, 30.0, 31),
                fixed: FixedContext::default(),
            };
            let rows = sweep_rows_ok(&spec)?
                .into_iter()
                .map(|(q, h, s, r)| vec![q, h, s, r])
                .collect();
            Ok(FigureTable {
                figure,
                columns: str_cols(&["qcnr_db", "h", "s", "r_dis"]),
                rows,
                fixed: serde_json::json!({"bits": 12, "range_snu": 5.0}),
            })
        }
        // optimal sampling range vs resolution
        6 => {
            let rows = (2u32..=16)
                .into_par_iter()
                .map(|bits| {
                    let opt = optimal_range(0.1, bits, 0.5, 8.0)?;
                    Ok(vec![
                        f64::from(bits),
                        opt.n_star_sigma,
                        opt.r_dis,
                        f64::from(u8::from(opt.flat)),
                    ])
                })
                .collect::<Result<_>>()?;
            Ok(FigureTable {
                figure,
                columns: str_cols(&["bits", "n_star_sigma", "r_dis", "flat"]),
                rows,
                fixed: serde_json::json!({"epsilon": 0.1, "search_sigma": [0.5, 8.0]}),
            })
        }
        // max bin width vs QCNR, ideal covariance estimate
        7 => {
            let qcnrs = [-10.0, -20.0, -30.0];
            let rows = zero_crossing_k(16, &qcnrs, true)?
                .into_iter()
                .map(|z| {
                    vec![
                        z.qcnr_db,
                        z.k.unwrap_or(f64::NAN),
                        z.delta_max_snu.unwrap_or(f64::NAN),
                        z.heuristic_k,
                    ]
                })
                .collect();
            Ok(FigureTable {
                figure,
                columns: str_cols(&["qcnr_db", "k", "delta_max_snu", "heuristic_k"]),
                rows,
                fixed: serde_json::json!({"bits": 16, "ignore_cm_digitization": true}),
            })
        }
        // squeezed vs symmetric input, rate vs resolution
        8 => {
            let e2r: f64 = 20.0;
            let r = e2r.ln() / 2.0;
            let mut rows = Vec::new();
            for bits in 2u32..=16 {
                let sym = evaluate_pipeline(&PipelineParams::symmetric(
                    1.1,
                    3.0 * 1.1f64.sqrt(),
                    bits,
                ))?;
                let sq = evaluate_pipeline(&PipelineParams::squeezed(r, 0.1, bits, 3.0))?;
                rows.push(vec![f64::from(bits), sym.r_dis, sq.r_dis]);
            }
            Ok(FigureTable {
                figure,
                columns: str_cols(&["bits", "r_dis_symmetric", "r_dis_squeezed"]),
                rows,
                fixed: serde_json::json!({"epsilon": 0.1, "e_2r": e2r, "range_sigmas": 3.0}),
            })
        }
        other => Err(Error::InvalidParameter(format!(
            "no figure preset {other}; valid figures are 2..=8"
        ))),
    }
}

fn str_cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
