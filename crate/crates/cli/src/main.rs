//! Command-line front end: calibrate, simulate, analyze, sweep, extract.
//!
//! Every run writes a manifest with the fully resolved parameters next to
//! its outputs, so any result can be reproduced from the manifest alone.
//! Exit codes: 0 ok, 1 usage/validation, 2 no certifiable randomness,
//! 3 energy-test failure, 4 I/O.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use serde_json::json;

use cvqrng::bits::Bits;
use cvqrng::*;

#[derive(Parser)]
#[command(name = "cvqrng", version, about = "CV source-independent QRNG analysis pipeline")]
struct Cli {
    /// Seed for all internal randomness (simulation, seed material).
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads (default: one per CPU).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory receiving output files and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Derive the shot-noise calibration from LO-off/LO-on variances.
    Calibrate(CalibrateArgs),
    /// Generate seeded synthetic quadrature data (capture + histogram).
    Simulate(SimulateArgs),
    /// Compute the randomness budget from a histogram or raw capture.
    Analyze(AnalyzeArgs),
    /// Reproduce a published parameter study or run a custom grid.
    Sweep(SweepArgs),
    /// Toeplitz-extract random bits from a quantized capture.
    Extract(ExtractArgs),
}

#[derive(Args)]
struct CalibrateArgs {
    /// Electronic (LO off) noise variance, V².
    #[arg(long)]
    v_elec: f64,
    /// Total LO-on variance, V².
    #[arg(long)]
    v_on: f64,
    /// ADC transfer scale, volts per code.
    #[arg(long, default_value_t = 1.0)]
    adc_volts_per_code: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Excess noise ε in SNU.
    #[arg(long, conflicts_with = "qcnr_db")]
    epsilon: Option<f64>,
    /// Alternative noise spec: QCNR in dB.
    #[arg(long, allow_hyphen_values = true)]
    qcnr_db: Option<f64>,
    /// Squeeze factor r (0 = symmetric state).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    squeeze_r: f64,
    /// Number of samples; scientific notation accepted.
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    count: u64,
    /// Sampling range N in SNU (default 20σ).
    #[arg(long)]
    range: Option<f64>,
    #[arg(long, default_value_t = 12)]
    bits: u32,
    #[arg(long, value_enum, default_value_t = QuadArg::X)]
    quadrature: QuadArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QuadArg {
    X,
    P,
}

impl From<QuadArg> for Quadrature {
    fn from(q: QuadArg) -> Self {
        match q {
            QuadArg::X => Quadrature::X,
            QuadArg::P => Quadrature::P,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Histogram JSON for the generation quadrature.
    #[arg(long, required_unless_present = "capture", conflicts_with = "capture")]
    histogram: Option<PathBuf>,
    /// Optional second-quadrature histogram for the covariance estimate.
    #[arg(long, requires = "histogram")]
    histogram_p: Option<PathBuf>,
    /// Raw capture path (requires --calibration).
    #[arg(long, requires = "calibration")]
    capture: Option<PathBuf>,
    /// Calibration record JSON from `calibrate`.
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Total measurements in the accounting block (default: sample count).
    #[arg(long, value_parser = parse_count)]
    n_tot: Option<u64>,
    /// Check measurements (default ⌊√n_tot⌋).
    #[arg(long, value_parser = parse_count)]
    n_c: Option<u64>,
    /// Energy bound a_lim in SNU for the covariance estimate
    /// (default max(N, 10σ)).
    #[arg(long)]
    a_lim: Option<f64>,
    /// Pre-test bound in SNU; any |a| above it aborts with exit 3.
    #[arg(long)]
    energy_bound: Option<f64>,
    /// Sampling rate used for per-second figures.
    #[arg(long, default_value_t = 1.8e9)]
    sample_rate: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Published parameter study to reproduce (2–8).
    #[arg(long, conflicts_with = "custom")]
    figure: Option<u8>,
    /// Custom sweep spec JSON.
    #[arg(long, required_unless_present = "figure")]
    custom: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    /// Quantized capture to extract from.
    #[arg(long)]
    capture: PathBuf,
    /// Certified rate in bits/sample.
    #[arg(long, conflicts_with = "budget")]
    r_sec: Option<f64>,
    /// Randomness budget JSON from `analyze` (uses its r_sec).
    #[arg(long, required_unless_present = "r_sec")]
    budget: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    block_samples: usize,
    /// Leftover-hash security parameter.
    #[arg(long, default_value_t = 2f64.powi(-50))]
    eps: f64,
    /// Raw Toeplitz seed bits (LSB-first bytes); default: derived from --seed.
    #[arg(long)]
    seed_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PartialArg::Discard)]
    partial_block: PartialArg,
    /// Output bit-stream file name.
    #[arg(long, default_value = "extracted.bits")]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PartialArg {
    Discard,
    Error,
}

fn parse_count(s: &str) -> std::result::Result<u64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !(v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64) {
        return Err(format!("not a non-negative integer: {s}"));
    }
    Ok(v as u64)
}

/// Round to 10 significant digits for emitted numerics.
fn sig10(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.9e}").parse().unwrap()
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NoCertifiableRandomness { .. } => 2,
            Error::Io(_) | Error::Json(_) | Error::Parse { .. } => 4,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

#[derive(Serialize)]
struct RunManifest {
    tool: String,
    subcommand: String,
    seed: u64,
    parameters: serde_json::Value,
    inputs: Vec<String>,
    outputs: Vec<String>,
    wall_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    throughput: Option<serde_json::Value>,
}

struct Run {
    started: Instant,
    output_dir: PathBuf,
    seed: u64,
    subcommand: &'static str,
    inputs: Vec<String>,
    outputs: Vec<String>,
    throughput: Option<serde_json::Value>,
}

impl Run {
    fn new(cli: &Cli, subcommand: &'static str) -> std::result::Result<Self, Failure> {
        fs::create_dir_all(&cli.output_dir)
            .map_err(|e| Failure::new(4, format!("cannot create output dir: {e}")))?;
        Ok(Self {
            started: Instant::now(),
            output_dir: cli.output_dir.clone(),
            seed: cli.seed,
            subcommand,
            inputs: Vec::new(),
            outputs: Vec::new(),
            throughput: None,
        })
    }

    fn input(&mut self, p: &Path) {
        self.inputs.push(p.display().to_string());
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> std::result::Result<PathBuf, Failure> {
        let path = self.output_dir.join(name);
        fs::write(&path, bytes).map_err(|e| Failure::new(4, format!("{}: {e}", path.display())))?;
        self.outputs.push(path.display().to_string());
        Ok(path)
    }

    fn finish(self, parameters: serde_json::Value) -> std::result::Result<(), Failure> {
        let manifest = RunManifest {
            tool: format!("cvqrng {}", env!("CARGO_PKG_VERSION")),
            subcommand: self.subcommand.to_string(),
            seed: self.seed,
            parameters,
            inputs: self.inputs,
            outputs: self.outputs,
            wall_secs: self.started.elapsed().as_secs_f64(),
            throughput: self.throughput,
        };
        let path = self
            .output_dir
            .join(format!("manifest-{}.json", self.subcommand));
        fs::write(&path, serde_json::to_vec_pretty(&manifest).unwrap())
            .map_err(|e| Failure::new(4, format!("{}: {e}", path.display())))?;
        Ok(())
    }
}

fn read_file(path: &Path) -> std::result::Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::new(4, format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let usage_ok =
                matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if usage_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    if let Some(n) = cli.threads {
        // ignore the error if a pool already exists (tests call main twice)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = match &cli.cmd {
        Cmd::Calibrate(a) => cmd_calibrate(&cli, a),
        Cmd::Simulate(a) => cmd_simulate(&cli, a),
        Cmd::Analyze(a) => cmd_analyze(&cli, a),
        Cmd::Sweep(a) => cmd_sweep(&cli, a),
        Cmd::Extract(a) => cmd_extract(&cli, a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_calibrate(cli: &Cli, a: &CalibrateArgs) -> std::result::Result<(), Failure> {
    let mut run = Run::new(cli, "calibrate")?;
    let cal = calibrate(a.v_elec, a.v_on).map_err(|e| {
        let code = if matches!(e, Error::NoShotNoiseClearance { .. }) {
            3
        } else {
            1
        };
        Failure::new(code, e.to_string())
    })?;
    let cal = cal.with_adc_scale(a.adc_volts_per_code);
    let json = serde_json::to_vec_pretty(&cal).unwrap();
    run.write("calibration.json", &json)?;
    println!("{}", serde_json::to_string(&cal).unwrap());
    eprintln!(
        "shot noise {:.6e} V², excess noise ε = {:.6}, QCNR {:.2} dB",
        cal.v_shot, cal.epsilon, cal.qcnr_db
    );
    run.finish(json!({
        "v_elec": a.v_elec,
        "v_on": a.v_on,
        "adc_volts_per_code": a.adc_volts_per_code,
    }))
}

fn cmd_simulate(cli: &Cli, a: &SimulateArgs) -> std::result::Result<(), Failure> {
    let mut run = Run::new(cli, "simulate")?;
    let epsilon = match (a.epsilon, a.qcnr_db) {
        (Some(e), _) => e,
        (None, Some(q)) => epsilon_from_qcnr(q),
        (None, None) => 0.1135,
    };
    let model = if a.squeeze_r != 0.0 {
        SourceModel::squeezed(a.squeeze_r, epsilon)
    } else {
        SourceModel::symmetric(epsilon)
    };
    let quad: Quadrature = a.quadrature.into();
    let sigma2 = match quad {
        Quadrature::X => model.vx,
        Quadrature::P => model.vp,
    };
    let range = a.range.unwrap_or(20.0 * sigma2.sqrt());
    let cfg = QuantizerConfig::new(range, a.bits)?;
    let samples = sample_quadrature(&model, quad, a.count as usize, cli.seed)?;
    let mut hist = SampleHistogram::empty(cfg, quad);
    let mut codes = Vec::with_capacity(samples.len());
    for &s in &samples {
        hist.push(s)?;
        codes.push(quantize(s, &cfg)? as i32);
    }
    let capture = RawCapture::new(codes, a.bits, quad)?;
    let mut buf = Vec::new();
    export(&capture, &mut buf)?;
    let label = match quad {
        Quadrature::X => "x",
        Quadrature::P => "p",
    };
    run.write(&format!("histogram-{label}.json"), hist.to_json()?.as_bytes())?;
    run.write(&format!("capture-{label}.bin"), &buf)?;
    eprintln!(
        "simulated {} samples, σ² = {} SNU, N = {} SNU, n = {}",
        a.count,
        sig10(sigma2),
        sig10(range),
        a.bits
    );
    run.finish(json!({
        "epsilon": epsilon,
        "squeeze_r": a.squeeze_r,
        "count": a.count,
        "range_snu": range,
        "bits": a.bits,
        "quadrature": label,
    }))
}

fn load_histogram(path: &Path) -> std::result::Result<SampleHistogram, Failure> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|e| Failure::new(4, format!("{}: {e}", path.display())))?;
    SampleHistogram::from_json(&text).map_err(Failure::from)
}

fn cmd_analyze(cli: &Cli, a: &AnalyzeArgs) -> std::result::Result<(), Failure> {
    let mut run = Run::new(cli, "analyze")?;
    // assemble the generation histogram (and the covariance pair) from
    // either input form
    let (hist_gen, hist_x, hist_p) = if let Some(hpath) = &a.histogram {
        run.input(hpath);
        let h = load_histogram(hpath)?;
        match &a.histogram_p {
            Some(ppath) => {
                run.input(ppath);
                // generation reads the second (anti-squeezed) quadrature
                let p = load_histogram(ppath)?;
                (p.clone(), h, p)
            }
            None => (h.clone(), h.clone(), h),
        }
    } else {
        let cpath = a.capture.as_ref().unwrap();
        let calpath = a.calibration.as_ref().unwrap();
        run.input(cpath);
        run.input(calpath);
        let capture = ingest(&mut read_file(cpath)?.as_slice())?;
        let cal: CalibrationRecord = serde_json::from_slice(&read_file(calpath)?)
            .map_err(|e| Failure::new(4, format!("{}: {e}", calpath.display())))?;
        let snu = to_snu(&capture, &cal);
        if let Some(bound) = a.energy_bound {
            if !energy_test(&snu, bound)? {
                return Err(Failure::new(
                    3,
                    format!("energy test failed: |a| exceeded {bound} SNU"),
                ));
            }
        }
        let delta_snu = cal.adc_volts_per_code * cal.snu_per_volt;
        let range = delta_snu * f64::from(1u32 << (capture.bits_per_code - 1));
        let cfg = QuantizerConfig::new(range, capture.bits_per_code)?;
        let h = SampleHistogram::from_samples(snu.into_iter(), cfg, capture.label)?;
        (h.clone(), h.clone(), h)
    };

    let dist_gen = hist_gen.to_distribution()?;
    let dist_x = hist_x.to_distribution()?;
    let dist_p = hist_p.to_distribution()?;
    let a_lim_for = |d: &DiscreteDistribution| {
        let mean: f64 = d.iter_bins().map(|(_, a, p)| p * a).sum();
        let var: f64 = d.iter_bins().map(|(_, a, p)| p * (a - mean).powi(2)).sum();
        d.config.range.max(10.0 * var.sqrt())
    };
    let (ax, ap) = match a.a_lim {
        Some(v) => (v, v),
        None => (a_lim_for(&dist_x), a_lim_for(&dist_p)),
    };
    let h = dist_gen.shannon_entropy();
    let cov = estimate_cm_upper_asym(&dist_x, ax, &dist_p, ap)?;
    let s = holevo_bound(&cov)?;
    let n_tot = a.n_tot.unwrap_or(hist_gen.total);
    let budget = RandomnessBudget::compute(h, s, n_tot, a.n_c)?;

    let report = json!({
        "shannon_entropy_bits_per_sample": sig10(budget.shannon_h),
        "holevo_bound_bits_per_sample": sig10(budget.holevo_s),
        "r_dis_bits_per_sample": sig10(budget.r_dis),
        "n_tot": budget.n_tot,
        "n_c": budget.n_c,
        "seed_bits": budget.seed_t,
        "r_sec_bits_per_sample": sig10(budget.r_sec),
        "sample_rate_sps": sig10(a.sample_rate),
        "r_sec_bits_per_sec": sig10(budget.r_sec * a.sample_rate),
        "vx_bar_snu": sig10(cov.vx_bar),
        "vp_bar_snu": sig10(cov.vp_bar),
        "lambda_bar": sig10(cov.lambda_bar),
        "a_lim_snu": sig10(cov.a_lim),
    });
    run.write("budget.json", serde_json::to_string_pretty(&report).unwrap().as_bytes())?;
    println!("{report}");
    eprintln!(
        "H = {} bits, S ≤ {} bits, R_dis = {} bits/sample",
        sig10(budget.shannon_h),
        sig10(budget.holevo_s),
        sig10(budget.r_dis)
    );
    eprintln!(
        "t = {} seed bits, R_sec = {} bits/sample ({} Gbit/s at {} SPS)",
        budget.seed_t,
        sig10(budget.r_sec),
        sig10(budget.r_sec * a.sample_rate / 1e9),
        sig10(a.sample_rate)
    );
    run.finish(json!({
        "n_tot": n_tot,
        "n_c": budget.n_c,
        "a_lim_snu": [sig10(ax), sig10(ap)],
        "energy_bound_snu": a.energy_bound,
        "sample_rate_sps": a.sample_rate,
    }))?;
    if budget.is_abort() {
        return Err(Failure::new(
            2,
            format!(
                "abort: no certifiable randomness (R_sec = {} bits/sample)",
                sig10(budget.r_sec)
            ),
        ));
    }
    Ok(())
}

fn cmd_sweep(cli: &Cli, a: &SweepArgs) -> std::result::Result<(), Failure> {
    let mut run = Run::new(cli, "sweep")?;
    if let Some(fig) = a.figure {
        let table = figure_table(fig)?;
        if cli.format == Format::Csv {
            run.write(&format!("fig{fig}.csv"), table.to_csv().as_bytes())?;
            run.write(
                &format!("fig{fig}.params.json"),
                serde_json::to_string_pretty(&table.fixed).unwrap().as_bytes(),
            )?;
        } else {
            run.write(
                &format!("fig{fig}.json"),
                serde_json::to_string_pretty(&table).unwrap().as_bytes(),
            )?;
        }
        print!("{}", table.to_csv());
        eprintln!("figure {fig}: {} rows", table.rows.len());
        run.finish(json!({"figure": fig, "format": if cli.format == Format::Csv { "csv" } else { "json" }}))
    } else {
        let spath = a.custom.as_ref().unwrap();
        run.input(spath);
        let spec: SweepSpec = serde_json::from_slice(&read_file(spath)?)
            .map_err(|e| Failure::new(1, format!("bad sweep spec: {e}")))?;
        let table = run_sweep(&spec)?;
        let mut csv = String::from("value,h,s,r_dis,error\n");
        for r in &table.rows {
            let cell = |v: Option<f64>| v.map(|v| format!("{:.9e}", v)).unwrap_or_default();
            csv.push_str(&format!(
                "{:.9e},{},{},{},{}\n",
                r.value,
                cell(r.h),
                cell(r.s),
                cell(r.r_dis),
                r.error.clone().unwrap_or_default()
            ));
        }
        if cli.format == Format::Csv {
            run.write("sweep.csv", csv.as_bytes())?;
            run.write(
                "sweep.params.json",
                serde_json::to_string_pretty(&table.spec).unwrap().as_bytes(),
            )?;
        } else {
            run.write(
                "sweep.json",
                serde_json::to_string_pretty(&table).unwrap().as_bytes(),
            )?;
        }
        print!("{csv}");
        run.finish(json!({"custom": spath.display().to_string()}))
    }
}

fn cmd_extract(cli: &Cli, a: &ExtractArgs) -> std::result::Result<(), Failure> {
    let mut run = Run::new(cli, "extract")?;
    run.input(&a.capture);
    let capture = ingest(&mut read_file(&a.capture)?.as_slice())?;
    let r_sec = match (a.r_sec, &a.budget) {
        (Some(r), _) => r,
        (None, Some(bpath)) => {
            run.input(bpath);
            let v: serde_json::Value = serde_json::from_slice(&read_file(bpath)?)
                .map_err(|e| Failure::new(4, format!("{}: {e}", bpath.display())))?;
            v.get("r_sec_bits_per_sample")
                .and_then(|x| x.as_f64())
                .ok_or_else(|| Failure::new(1, "budget file lacks r_sec_bits_per_sample"))?
        }
        (None, None) => unreachable!("clap enforces one of --r-sec/--budget"),
    };
    let bits = capture.bits_per_code;
    // packing only cares about bits and the index offset; use the unit-width
    // config
    let cfg = QuantizerConfig::new(f64::from(1u32 << (bits - 1)), bits)?;
    let plan = plan_from_rate(r_sec, a.block_samples, bits, a.eps)?;
    let seed_bits_needed = plan.output_len + plan.input_len - 1;
    let spec = match &a.seed_file {
        Some(spath) => {
            run.input(spath);
            ToeplitzSpec::from_seed_bytes(plan.input_len, plan.output_len, &read_file(spath)?)?
        }
        None => {
            let mut rng = ChaCha12Rng::seed_from_u64(cli.seed);
            rng.set_stream(u64::from(u32::MAX) + 1); // clear of sample streams
            let mut seed = Bits::with_capacity(seed_bits_needed);
            let mut left = seed_bits_needed;
            while left > 0 {
                let take = left.min(64);
                seed.push_low_bits(rng.next_u64(), take);
                left -= take;
            }
            ToeplitzSpec::new(plan.input_len, plan.output_len, seed)?
        }
    };
    let samples: Vec<i64> = capture.codes.iter().map(|&c| i64::from(c)).collect();
    let partial = match a.partial_block {
        PartialArg::Discard => PartialBlock::Discard,
        PartialArg::Error => PartialBlock::Error,
    };
    let (out, report) = extract_stream(&samples, &cfg, &plan, &spec, partial)?;
    let name = a.output.to_string_lossy();
    run.write(name.as_ref(), &out.to_bytes())?;
    if !out.is_empty() {
        let health = health_check(&out, 4.0)?;
        eprintln!(
            "health: monobit z = {:.2}, runs z = {:.2} ({})",
            health.monobit_z,
            health.runs_z,
            if health.pass { "ok" } else { "ALARM" }
        );
    }
    eprintln!(
        "extracted {} bits from {} samples in {} blocks ({} Gbit/s input)",
        report.output_bits,
        capture.codes.len(),
        report.blocks,
        sig10(report.input_bits_per_sec / 1e9)
    );
    run.throughput = Some(json!({
        "input_bits": report.input_bits,
        "output_bits": report.output_bits,
        "blocks": report.blocks,
        "elapsed_secs": report.elapsed_secs,
        "input_bits_per_sec": sig10(report.input_bits_per_sec),
    }));
    run.finish(json!({
        "r_sec_bits_per_sample": r_sec,
        "block_samples": a.block_samples,
        "security_eps": a.eps,
        "bits_per_sample": bits,
        "output_len_bits_per_block": plan.output_len,
        "seed_bits": seed_bits_needed,
        "seed_source": a.seed_file.as_ref().map(|p| p.display().to_string())
            .unwrap_or_else(|| format!("derived from --seed {}", cli.seed)),
        "partial_block": match a.partial_block { PartialArg::Discard => "discard", PartialArg::Error => "error" },
    }))?;
    // flush the summary before a possibly piped stdout consumer sees EOF
    std::io::stderr().flush().ok();
    Ok(())
}
