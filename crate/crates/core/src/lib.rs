//! Source-independent continuous-variable QRNG analysis pipeline.
//!
//! The library covers the full chain from raw homodyne captures to certified
//! random bits:
//!
//! * [`quantizer`] — the ADC model: mid-rise quantization with saturating
//!   edge bins, the discretized Gaussian distribution and sample histograms.
//! * [`calib`] — shot-noise calibration from LO-off/LO-on captures, raw
//!   capture I/O and the energy test.
//! * [`entropy`] — Shannon entropy of the digitized data, the digitized
//!   covariance upper bound, the Gaussian von Neumann bound on the
//!   eavesdropper's information, and seed/rate accounting.
//! * [`source`] — seeded synthetic quadrature data and check-instant
//!   scheduling.
//! * [`extractor`] — Toeplitz hashing sized by the leftover hash lemma,
//!   with a carry-less-multiply fast path.
//! * [`sweep`] — parameter studies, the optimal-range search and the
//!   bin-width zero-crossing analysis.
//! * [`health`] — monobit/runs sanity alarms on extracted output.
//!
//! Variances are in shot-noise units (SNU) and entropies in bits throughout.

pub mod bits;
pub mod calib;
pub mod entropy;
pub mod error;
pub mod extractor;
pub mod health;
pub mod quantizer;
pub mod source;
pub mod sweep;

pub use bits::Bits;
pub use calib::{
    calibrate, energy_test, export, ingest, to_snu, CalibrationRecord, CaptureHeader, RawCapture,
    VarianceAccumulator,
};
pub use entropy::{
    default_check_count, epsilon_from_qcnr, estimate_cm_upper, estimate_cm_upper_asym,
    extractable_randomness, gaussian_von_neumann, holevo_bound, ideal_holevo, qcnr_from_epsilon,
    secure_rate, seed_length, shannon_entropy, upper_variance, CovarianceBound, RandomnessBudget,
    SourceModel,
};
pub use error::{Error, Result};
pub use extractor::{
    extract_stream, plan_extraction, plan_from_rate, toeplitz_extract, ExtractionPlan,
    PartialBlock, ThroughputReport, ToeplitzSpec,
};
pub use health::{health_check, monobit_z, runs_z, HealthReport};
pub use quantizer::{
    analytic_pdis, bin_center, quantize, DiscreteDistribution, Quadrature, QuantizerConfig,
    SampleHistogram,
};
pub use source::{
    build_schedule, sample_quadrature, sample_quadrature_chunk, MeasurementSchedule, SeedStream,
};
pub use sweep::{
    evaluate_pipeline, figure_table, optimal_range, run_sweep, zero_crossing_k, FigureTable,
    FixedContext, OptimalRange, PipelineEval, PipelineParams, SweepRow, SweepSpec, SweepTable,
    SweptParameter, ZeroCrossing,
};
