//! Raw ADC capture ingestion, LO-on/LO-off shot-noise calibration, and the
//! block-level energy test.
//!
//! Capture file layout: one JSON header line (format, bits, endianness,
//! label, LO state, optional sample rate) terminated by `\n`, followed by the
//! codes as 16-bit little-endian words. Codes narrower than 16 bits are
//! stored zero-padded (not sign-extended); ingestion sign-extends them.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantizer::Quadrature;

/// Scalar LO-on/LO-off calibration mapping ADC codes to shot-noise units.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CalibrationRecord {
    /// Electronic (LO off) noise variance, V².
    pub v_elec: f64,
    /// Shot-noise variance, V² (LO-on total minus electronic).
    pub v_shot: f64,
    /// Total measured variance in SNU: 1 + ε.
    pub sigma2_snu: f64,
    /// Excess noise ε = v_elec / v_shot.
    pub epsilon: f64,
    pub qcnr_db: f64,
    /// ADC transfer scale; a free calibration input, default 1.
    pub adc_volts_per_code: f64,
    /// SNU normalization, 1/√v_shot.
    pub snu_per_volt: f64,
}

/// Derive a calibration record from the LO-off variance and the LO-on total
/// variance, both in V². The classical (electronic) noise is attributed to
/// the eavesdropper, so ε = v_elec / v_shot.
pub fn calibrate(v_elec: f64, v_on_total: f64) -> Result<CalibrationRecord> {
    if !(v_elec > 0.0) || !v_on_total.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "variances must be positive, got v_elec = {v_elec}, v_on = {v_on_total}"
        )));
    }
    if v_on_total <= v_elec {
        return Err(Error::NoShotNoiseClearance {
            v_on: v_on_total,
            v_elec,
        });
    }
    let v_shot = v_on_total - v_elec;
    let epsilon = v_elec / v_shot;
    Ok(CalibrationRecord {
        v_elec,
        v_shot,
        sigma2_snu: 1.0 + epsilon,
        epsilon,
        qcnr_db: 10.0 * (1.0 / epsilon).log10(),
        adc_volts_per_code: 1.0,
        snu_per_volt: 1.0 / v_shot.sqrt(),
    })
}

impl CalibrationRecord {
    pub fn with_adc_scale(mut self, volts_per_code: f64) -> Self {
        self.adc_volts_per_code = volts_per_code;
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaptureHeader {
    pub format: String,
    pub bits: u32,
    pub endianness: String,
    pub label: Quadrature,
    pub lo_on: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_rate_sps: Option<f64>,
}

/// A raw ADC capture: signed codes plus acquisition metadata.
#[derive(Debug, Clone)]
pub struct RawCapture {
    pub codes: Vec<i32>,
    pub bits_per_code: u32,
    pub label: Quadrature,
    pub lo_on: bool,
    pub sample_rate_sps: Option<f64>,
}

impl RawCapture {
    pub fn new(codes: Vec<i32>, bits_per_code: u32, label: Quadrature) -> Result<Self> {
        let limit = 1i32 << (bits_per_code - 1);
        if let Some(&c) = codes.iter().find(|&&c| c < -limit || c >= limit) {
            return Err(Error::InvalidParameter(format!(
                "code {c} out of {bits_per_code}-bit range"
            )));
        }
        Ok(Self {
            codes,
            bits_per_code,
            label,
            lo_on: true,
            sample_rate_sps: None,
        })
    }
}

const CAPTURE_FORMAT: &str = "cvqrng-capture-v1";

/// Parse a capture stream: JSON header line, then 16-bit LE code words.
/// Truncated payloads and out-of-range codes are reported with their byte
/// offset.
pub fn ingest(reader: &mut impl Read) -> Result<RawCapture> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Parse {
            offset: bytes.len(),
            message: "missing header line".into(),
        })?;
    let header: CaptureHeader =
        serde_json::from_slice(&bytes[..newline]).map_err(|e| Error::Parse {
            offset: 0,
            message: format!("bad header: {e}"),
        })?;
    if header.format != CAPTURE_FORMAT {
        return Err(Error::Parse {
            offset: 0,
            message: format!("unknown format {:?}", header.format),
        });
    }
    if header.endianness != "le" {
        return Err(Error::Parse {
            offset: 0,
            message: format!("unsupported endianness {:?}", header.endianness),
        });
    }
    if header.bits < 2 || header.bits > 16 {
        return Err(Error::Parse {
            offset: 0,
            message: format!("unsupported code width {}", header.bits),
        });
    }
    let payload = &bytes[newline + 1..];
    if payload.len() % 2 != 0 {
        return Err(Error::Parse {
            offset: newline + 1 + payload.len() - 1,
            message: "truncated 16-bit code word".into(),
        });
    }
    let sign_bit = 1u16 << (header.bits - 1);
    let value_mask = if header.bits == 16 {
        u16::MAX
    } else {
        (1u16 << header.bits) - 1
    };
    let mut codes = Vec::with_capacity(payload.len() / 2);
    for (k, pair) in payload.chunks_exact(2).enumerate() {
        let word = u16::from_le_bytes([pair[0], pair[1]]);
        if word & !value_mask != 0 {
            return Err(Error::Parse {
                offset: newline + 1 + 2 * k,
                message: format!("code word {word:#06x} exceeds {}-bit range", header.bits),
            });
        }
        let code = if word & sign_bit != 0 {
            word as i32 - (1i32 << header.bits)
        } else {
            word as i32
        };
        codes.push(code);
    }
    Ok(RawCapture {
        codes,
        bits_per_code: header.bits,
        label: header.label,
        lo_on: header.lo_on,
        sample_rate_sps: header.sample_rate_sps,
    })
}

/// Serialize a capture in the documented layout; `ingest(export(c)) == c`.
pub fn export(capture: &RawCapture, writer: &mut impl Write) -> Result<()> {
    let header = CaptureHeader {
        format: CAPTURE_FORMAT.into(),
        bits: capture.bits_per_code,
        endianness: "le".into(),
        label: capture.label,
        lo_on: capture.lo_on,
        sample_rate_sps: capture.sample_rate_sps,
    };
    serde_json::to_writer(&mut *writer, &header)?;
    writer.write_all(b"\n")?;
    let mask = if capture.bits_per_code == 16 {
        u16::MAX
    } else {
        (1u16 << capture.bits_per_code) - 1
    };
    for &code in &capture.codes {
        let word = (code as u16) & mask;
        writer.write_all(&word.to_le_bytes())?;
    }
    Ok(())
}

/// Convert codes to shot-noise units: a = code · volts_per_code / √v_shot.
pub fn to_snu(capture: &RawCapture, cal: &CalibrationRecord) -> Vec<f64> {
    let scale = cal.adc_volts_per_code * cal.snu_per_volt;
    capture.codes.iter().map(|&c| c as f64 * scale).collect()
}

/// Block energy test: fails as soon as a single sample exceeds the bound in
/// magnitude.
pub fn energy_test(samples: &[f64], bound: f64) -> Result<bool> {
    if !(bound > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "energy bound must be positive, got {bound}"
        )));
    }
    Ok(samples.iter().all(|&a| a.abs() <= bound))
}

/// Streaming mean/variance with Welford updates and a stable pairwise merge,
/// for chunked parallel accumulation over large captures.
#[derive(Debug, Clone, Copy, Default)]
pub struct VarianceAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl VarianceAccumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &VarianceAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 += other.m2
            + delta * delta * self.count as f64 * other.count as f64 / total as f64;
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.m2 / self.count as f64
        }
    }
}
