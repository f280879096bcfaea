//! Experiment harness: synthetic low-rank tensors, phase-transition grids,
//! and diagnostics sweeps.
//!
//! A phase grid runs the completion solver over a rank × sampling-rate
//! lattice of independent trials and aggregates recovery rates, mirroring
//! the classic phase-transition plots for low-rank recovery. Every cell's
//! seeds are derived deterministically from the base seed and the cell's
//! indices, so results never depend on scheduling: rerunning the same
//! configuration reproduces the CSV byte for byte at any thread count.
//!
//! Outputs are a CSV (the canonical record, one row per trial) and two
//! 8-bit grayscale PGM heatmaps: recovery rate (white = always recovered,
//! black = never) and mean relative error (white = 0, black = 1 or worse).

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::completion::{complete_entrywise, complete_tubal, rse, SolverConfig};
use crate::diagnostics::{certificate_report, golfing_certificate, incoherence};
use crate::error::{Error, Result};
use crate::io::{csv_export, read_text};
use crate::sampling::{bernoulli_mask, tubal_mask, TangentSpace};
use crate::tensor::{check_dims, Tensor3};
use crate::tsvd::t_svd_reduced;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Finalizer of the splitmix64 generator, used as a 64-bit mixing function.
fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a base seed and a path of indices.
///
/// The derivation folds each part into the running state with a splitmix64
/// step, so distinct paths give statistically independent streams while
/// identical paths always reproduce the same seed. This is the scheduling
/// independence contract: every unit of randomized work owns a seed that
/// depends only on the configuration, never on execution order.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut state = mix64(base);
    for &p in parts {
        state = mix64(state ^ p);
    }
    state
}

/// Draws a tensor with independent standard normal entries.
fn gaussian_tensor(n1: usize, n2: usize, n3: usize, seed: u64) -> Tensor3 {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Tensor3::from_fn(n1, n2, n3, |_, _, _| rng.sample(StandardNormal))
}

/// Generates a random tensor of exact tubal rank `r`.
///
/// Draws an i.i.d. Gaussian tensor, factorizes it, keeps the `r` leading
/// singular tubes, and multiplies the truncation back together. For a
/// Gaussian draw the kept tubes are nonzero in every transform slice, so
/// the output has tubal rank exactly `r`. With `r = min(n1, n2)` nothing
/// is truncated and the output equals the draw up to factorization
/// round-off.
pub fn generate_low_tubal_rank(
    n1: usize,
    n2: usize,
    n3: usize,
    r: usize,
    seed: u64,
) -> Result<Tensor3> {
    check_dims(n1, n2, n3)?;
    let g = gaussian_tensor(n1, n2, n3, seed);
    t_svd_reduced(&g, r)?.reconstruct()
}

/// How a phase-grid cell samples its observations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplingMode {
    /// Independent Bernoulli observations of single entries.
    Entrywise,
    /// Independent Bernoulli observations of whole tubes.
    Tubal,
}

impl SamplingMode {
    /// Lowercase name used in configs and reports.
    pub fn label(self) -> &'static str {
        match self {
            SamplingMode::Entrywise => "entrywise",
            SamplingMode::Tubal => "tubal",
        }
    }

    /// Parses a mode name as written in a config file.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "entrywise" => Ok(SamplingMode::Entrywise),
            "tubal" => Ok(SamplingMode::Tubal),
            other => Err(Error::Config(format!(
                "unknown sampling mode {other:?} (expected \"entrywise\" or \"tubal\")"
            ))),
        }
    }
}

/// Configuration of a phase-transition grid run.
#[derive(Clone, Debug)]
pub struct PhaseGridConfig {
    /// Rows of each tensor.
    pub n1: usize,
    /// Columns of each tensor.
    pub n2: usize,
    /// Tube length of each tensor.
    pub n3: usize,
    /// Tubal ranks of the generated tensors, one grid row per rank.
    pub ranks: Vec<usize>,
    /// Sampling rates, one grid column per rate, each in `(0, 1]`.
    pub rates: Vec<f64>,
    /// Independent trials per (rank, rate) cell.
    pub trials: usize,
    /// A trial counts as recovered when its relative error is at most this.
    pub success_threshold: f64,
    /// Base seed; all per-cell seeds derive from it.
    pub base_seed: u64,
    /// Solver settings shared by every cell.
    pub solver: SolverConfig,
    /// Observation model for every cell.
    pub mode: SamplingMode,
}

impl Default for PhaseGridConfig {
    fn default() -> Self {
        Self {
            n1: 30,
            n2: 30,
            n3: 20,
            ranks: (1..=8).collect(),
            rates: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            trials: 20,
            success_threshold: 1e-3,
            base_seed: 0,
            solver: SolverConfig::default(),
            mode: SamplingMode::Entrywise,
        }
    }
}

/// Parses one value, naming the key in the error.
fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::Config(format!("cannot parse {key} from {value:?}")))
}

/// Parses a comma-separated list, naming the key in the error.
fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|part| parse_value(key, part.trim()))
        .collect()
}

/// Splits a flat `key = value` config text into pairs.
///
/// Blank lines and lines starting with `#` are skipped; everything before
/// the first `=` is the key, everything after is the value, both trimmed.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {} has no '=': {line:?}",
                idx + 1
            )));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

impl PhaseGridConfig {
    /// Applies one `key = value` override.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n1" => self.n1 = parse_value(key, value)?,
            "n2" => self.n2 = parse_value(key, value)?,
            "n3" => self.n3 = parse_value(key, value)?,
            "ranks" => self.ranks = parse_list(key, value)?,
            "rates" => self.rates = parse_list(key, value)?,
            "trials" => self.trials = parse_value(key, value)?,
            "success_threshold" => self.success_threshold = parse_value(key, value)?,
            "base_seed" => self.base_seed = parse_value(key, value)?,
            "mode" => self.mode = SamplingMode::parse(value)?,
            "rho" => {
                self.solver.rho = if value == "auto" {
                    None
                } else {
                    Some(parse_value(key, value)?)
                }
            }
            "max_iters" => self.solver.max_iters = parse_value(key, value)?,
            "tol_primal" => self.solver.tol_primal = parse_value(key, value)?,
            "tol_dual" => self.solver.tol_dual = parse_value(key, value)?,
            other => {
                return Err(Error::Config(format!("unknown phase-grid key {other:?}")));
            }
        }
        Ok(())
    }

    /// Builds a configuration from defaults plus `key = value` text.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (key, value) in parse_kv(text)? {
            cfg.apply_kv(&key, &value)?;
        }
        Ok(cfg)
    }

    /// Checks every field; run entry points call this first.
    pub fn validate(&self) -> Result<()> {
        check_dims(self.n1, self.n2, self.n3)?;
        if self.ranks.is_empty() {
            return Err(Error::Config("ranks must not be empty".to_string()));
        }
        let max = self.n1.min(self.n2);
        for &r in &self.ranks {
            if r == 0 || r > max {
                return Err(Error::InvalidRank { got: r, max });
            }
        }
        if self.rates.is_empty() {
            return Err(Error::Config("rates must not be empty".to_string()));
        }
        for &p in &self.rates {
            if !(p.is_finite() && p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidProbability(p));
            }
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".to_string()));
        }
        if !(self.success_threshold.is_finite() && self.success_threshold > 0.0) {
            return Err(Error::Config(format!(
                "success_threshold must be finite and positive, got {}",
                self.success_threshold
            )));
        }
        self.solver.validate()
    }
}

/// Outcome of a single phase-grid trial.
#[derive(Clone, Debug)]
pub struct CellResult {
    /// Tubal rank of the generated tensor.
    pub rank: usize,
    /// Sampling rate of the drawn mask.
    pub rate: f64,
    /// Trial index within the cell, from 0.
    pub trial: usize,
    /// Relative recovery error; `NaN` records a solver error for this row.
    pub rse: f64,
    /// Whether `rse` met the success threshold.
    pub success: bool,
    /// Solver iterations (0 when the solver returned an error).
    pub iterations: usize,
    /// Seed of this trial; the tensor and mask seeds derive from it.
    pub seed: u64,
}

/// Aggregated result of a phase-grid run.
#[derive(Clone, Debug)]
pub struct PhaseGrid {
    ranks: Vec<usize>,
    rates: Vec<f64>,
    /// Row-major `|ranks| × |rates|` recovery rates in `[0, 1]`.
    recovery: Vec<f64>,
    /// Row-major mean relative error over trials with a finite error;
    /// `NaN` when every trial of a cell errored.
    mean_rse: Vec<f64>,
    cells: Vec<CellResult>,
}

/// Header of the per-trial CSV record.
pub const GRID_CSV_HEADER: &str = "rank,rate,trial,rse,success,iterations,seed";

impl PhaseGrid {
    /// Grid rows: the configured ranks.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Grid columns: the configured sampling rates.
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Every trial outcome in fixed (rank, rate, trial) order.
    pub fn cells(&self) -> &[CellResult] {
        &self.cells
    }

    /// Fraction of recovered trials for the cell at (rank index, rate index).
    pub fn recovery_rate(&self, rank_idx: usize, rate_idx: usize) -> f64 {
        self.recovery[rank_idx * self.rates.len() + rate_idx]
    }

    /// Mean relative error for the cell at (rank index, rate index).
    pub fn mean_rse(&self, rank_idx: usize, rate_idx: usize) -> f64 {
        self.mean_rse[rank_idx * self.rates.len() + rate_idx]
    }

    /// Aggregates trial rows into a grid. Rows must be grouped so that
    /// every (rank, rate) pair forms one contiguous cell; the row order is
    /// preserved verbatim for re-serialization.
    pub(crate) fn from_cells(cells: Vec<CellResult>) -> Self {
        let mut ranks: Vec<usize> = Vec::new();
        for c in &cells {
            if !ranks.contains(&c.rank) {
                ranks.push(c.rank);
            }
        }
        let mut rates: Vec<f64> = Vec::new();
        for c in &cells {
            if !rates.iter().any(|r| r.to_bits() == c.rate.to_bits()) {
                rates.push(c.rate);
            }
        }
        let mut recovery = vec![0.0; ranks.len() * rates.len()];
        let mut rse_sum = vec![0.0; ranks.len() * rates.len()];
        let mut rse_count = vec![0usize; ranks.len() * rates.len()];
        let mut trial_count = vec![0usize; ranks.len() * rates.len()];
        for c in &cells {
            let ri = ranks.iter().position(|&r| r == c.rank).unwrap();
            let pi = rates
                .iter()
                .position(|r| r.to_bits() == c.rate.to_bits())
                .unwrap();
            let idx = ri * rates.len() + pi;
            trial_count[idx] += 1;
            if c.success {
                recovery[idx] += 1.0;
            }
            if c.rse.is_finite() {
                rse_sum[idx] += c.rse;
                rse_count[idx] += 1;
            }
        }
        let mean_rse: Vec<f64> = rse_sum
            .iter()
            .zip(&rse_count)
            .map(|(&s, &n)| if n == 0 { f64::NAN } else { s / n as f64 })
            .collect();
        for (r, &n) in recovery.iter_mut().zip(&trial_count) {
            if n > 0 {
                *r /= n as f64;
            }
        }
        Self {
            ranks,
            rates,
            recovery,
            mean_rse,
            cells,
        }
    }

    /// Serializes all trial rows as CSV, one line per trial plus a header.
    ///
    /// Numbers print in Rust's shortest round-trip form and lines end with
    /// `\n`, so the bytes are a pure function of the grid contents.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(GRID_CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.rank,
                c.rate,
                c.trial,
                c.rse,
                u8::from(c.success),
                c.iterations,
                c.seed
            )
            .expect("writing to a String cannot fail");
        }
        out
    }

    /// Writes the trial rows as a CSV file.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let rows: Vec<String> = self
            .to_csv_string()
            .lines()
            .skip(1)
            .map(str::to_string)
            .collect();
        csv_export(path, GRID_CSV_HEADER, &rows)
    }

    /// Reads a CSV written by [`PhaseGrid::write_csv`] and re-aggregates it.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let text = read_text(path)?;
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == GRID_CSV_HEADER => {}
            other => {
                return Err(Error::FileFormat(format!(
                    "expected header {GRID_CSV_HEADER:?}, found {other:?}"
                )));
            }
        }
        let mut cells = Vec::new();
        for (idx, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(Error::FileFormat(format!(
                    "row {} has {} fields, expected 7",
                    idx + 2,
                    fields.len()
                )));
            }
            let success = match fields[4] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::FileFormat(format!(
                        "row {} has success {other:?}, expected 0 or 1",
                        idx + 2
                    )));
                }
            };
            cells.push(CellResult {
                rank: parse_value("rank", fields[0])?,
                rate: parse_value("rate", fields[1])?,
                trial: parse_value("trial", fields[2])?,
                rse: parse_value("rse", fields[3])?,
                success,
                iterations: parse_value("iterations", fields[5])?,
                seed: parse_value("seed", fields[6])?,
            });
        }
        if cells.is_empty() {
            return Err(Error::FileFormat("grid CSV has no rows".to_string()));
        }
        Ok(Self::from_cells(cells))
    }

    /// Writes the recovery-rate heatmap as a binary 8-bit PGM.
    ///
    /// One pixel per cell, ranks top to bottom and rates left to right;
    /// pixel value `round(255·recovery_rate)`, so white means every trial
    /// recovered and black means none did.
    pub fn write_recovery_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_pgm(path, |idx| {
            (255.0 * self.recovery[idx]).round() as u8
        })
    }

    /// Writes the mean-error heatmap as a binary 8-bit PGM.
    ///
    /// Pixel value `round(255·(1 − min(rse, 1)))`: white is zero error,
    /// black is error 1 or worse. Cells whose every trial errored (mean
    /// `NaN`) render black.
    pub fn write_rse_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_pgm(path, |idx| {
            let rse = self.mean_rse[idx];
            if rse.is_finite() {
                (255.0 * (1.0 - rse.min(1.0))).round() as u8
            } else {
                0
            }
        })
    }

    fn write_pgm(&self, path: impl AsRef<Path>, pixel: impl Fn(usize) -> u8) -> Result<()> {
        let width = self.rates.len();
        let height = self.ranks.len();
        let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
        out.extend((0..width * height).map(pixel));
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Runs one phase-grid trial; solver errors come back as a `NaN` row.
fn run_cell(cfg: &PhaseGridConfig, rank_idx: usize, rate_idx: usize, trial: usize) -> CellResult {
    let rank = cfg.ranks[rank_idx];
    let rate = cfg.rates[rate_idx];
    let seed = derive_seed(
        cfg.base_seed,
        &[rank_idx as u64, rate_idx as u64, trial as u64],
    );
    let tensor_seed = derive_seed(seed, &[0]);
    let mask_seed = derive_seed(seed, &[1]);
    let outcome = (|| -> Result<(f64, usize)> {
        let truth = generate_low_tubal_rank(cfg.n1, cfg.n2, cfg.n3, rank, tensor_seed)?;
        let (recovered, iterations) = match cfg.mode {
            SamplingMode::Entrywise => {
                let mask = bernoulli_mask(cfg.n1, cfg.n2, cfg.n3, rate, mask_seed)?;
                let (z, report) = complete_entrywise(&truth, &mask, &cfg.solver)?;
                (z, report.iterations)
            }
            SamplingMode::Tubal => {
                let mask = tubal_mask(cfg.n1, cfg.n2, cfg.n3, rate, mask_seed)?;
                let (z, report) = complete_tubal(&truth, &mask, &cfg.solver)?;
                (z, report.iterations)
            }
        };
        Ok((rse(&recovered, &truth)?, iterations))
    })();
    let (rse_value, iterations) = outcome.unwrap_or((f64::NAN, 0));
    CellResult {
        rank,
        rate,
        trial,
        rse: rse_value,
        success: rse_value <= cfg.success_threshold,
        iterations,
        seed,
    }
}

/// Runs a full phase-transition grid.
///
/// Cells are independent and run on the global thread pool; each draws its
/// seeds from the configuration alone, so identical configurations yield
/// identical grids (and identical CSV bytes) at any parallelism level.
/// A solver error in one cell is recorded in that cell's rows as `NaN`
/// error with zero iterations; the run continues.
pub fn run_phase_grid(cfg: &PhaseGridConfig) -> Result<PhaseGrid> {
    cfg.validate()?;
    let mut jobs = Vec::with_capacity(cfg.ranks.len() * cfg.rates.len() * cfg.trials);
    for rank_idx in 0..cfg.ranks.len() {
        for rate_idx in 0..cfg.rates.len() {
            for trial in 0..cfg.trials {
                jobs.push((rank_idx, rate_idx, trial));
            }
        }
    }
    let cells: Vec<CellResult> = jobs
        .par_iter()
        .map(|&(rank_idx, rate_idx, trial)| run_cell(cfg, rank_idx, rate_idx, trial))
        .collect();
    Ok(PhaseGrid::from_cells(cells))
}

/// Configuration of a diagnostics sweep.
#[derive(Clone, Debug)]
pub struct DiagnosticsSweepConfig {
    /// Rows of each tensor.
    pub n1: usize,
    /// Columns of each tensor.
    pub n2: usize,
    /// Tube length of each tensor.
    pub n3: usize,
    /// Tubal rank of the generated tensors.
    pub rank: usize,
    /// Entrywise sampling rate under test.
    pub rate: f64,
    /// Independent trials.
    pub trials: usize,
    /// Base seed; per-trial seeds derive from it.
    pub base_seed: u64,
}

impl Default for DiagnosticsSweepConfig {
    fn default() -> Self {
        Self {
            n1: 30,
            n2: 30,
            n3: 20,
            rank: 2,
            rate: 0.5,
            trials: 20,
            base_seed: 0,
        }
    }
}

impl DiagnosticsSweepConfig {
    /// Applies one `key = value` override.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n1" => self.n1 = parse_value(key, value)?,
            "n2" => self.n2 = parse_value(key, value)?,
            "n3" => self.n3 = parse_value(key, value)?,
            "rank" => self.rank = parse_value(key, value)?,
            "rate" => self.rate = parse_value(key, value)?,
            "trials" => self.trials = parse_value(key, value)?,
            "base_seed" => self.base_seed = parse_value(key, value)?,
            other => {
                return Err(Error::Config(format!("unknown sweep key {other:?}")));
            }
        }
        Ok(())
    }

    /// Builds a configuration from defaults plus `key = value` text.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (key, value) in parse_kv(text)? {
            cfg.apply_kv(&key, &value)?;
        }
        Ok(cfg)
    }

    /// Checks every field; [`run_diagnostics_sweep`] calls this first.
    pub fn validate(&self) -> Result<()> {
        check_dims(self.n1, self.n2, self.n3)?;
        let max = self.n1.min(self.n2);
        if self.rank == 0 || self.rank > max {
            return Err(Error::InvalidRank {
                got: self.rank,
                max,
            });
        }
        if !(self.rate.is_finite() && self.rate > 0.0 && self.rate <= 1.0) {
            return Err(Error::InvalidProbability(self.rate));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".to_string()));
        }
        Ok(())
    }
}

/// One trial of a diagnostics sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    /// Trial index, from 0.
    pub trial: usize,
    /// Seed of this trial; tensor, mask, and correction seeds derive from it.
    pub seed: u64,
    /// Incoherence of the generated tensor's factors.
    pub mu0: f64,
    /// Estimated deviation of the sampled tangent-space operator.
    pub tangent_deviation: f64,
    /// Distance of the corrected candidate from the factor product on the
    /// tangent space.
    pub tangent_fit: f64,
    /// Spectral norm of the candidate outside the tangent space.
    pub complement_leakage: f64,
    /// Verdict under the strict fit threshold.
    pub passed: bool,
    /// Verdict under the loose fit threshold.
    pub passed_loose: bool,
}

impl SweepRow {
    /// Header of the sweep CSV record.
    pub fn csv_header() -> &'static str {
        "trial,seed,mu0,tangent_deviation,tangent_fit,complement_leakage,passed,passed_loose"
    }

    /// One CSV line matching [`SweepRow::csv_header`].
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.trial,
            self.seed,
            self.mu0,
            self.tangent_deviation,
            self.tangent_fit,
            self.complement_leakage,
            u8::from(self.passed),
            u8::from(self.passed_loose)
        )
    }
}

/// Runs the certificate diagnostics over independent trials.
///
/// Each trial generates a low-tubal-rank tensor, measures its incoherence,
/// draws an entrywise mask at the configured rate, builds the iterative
/// correction for the tensor's tangent space, and evaluates the full
/// certificate report. Trials run in parallel with per-trial seeds, so the
/// row set is a deterministic function of the configuration. Errors abort
/// the sweep; they indicate a misconfiguration rather than a failed trial.
pub fn run_diagnostics_sweep(cfg: &DiagnosticsSweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = derive_seed(cfg.base_seed, &[trial as u64]);
            let tensor_seed = derive_seed(seed, &[0]);
            let mask_seed = derive_seed(seed, &[1]);
            let correction_seed = derive_seed(seed, &[2]);
            let truth = generate_low_tubal_rank(cfg.n1, cfg.n2, cfg.n3, cfg.rank, tensor_seed)?;
            let factors = t_svd_reduced(&truth, cfg.rank)?;
            let mu0 = incoherence(&factors)?.mu0;
            let tangent = TangentSpace::new(&factors)?;
            let mask = bernoulli_mask(cfg.n1, cfg.n2, cfg.n3, cfg.rate, mask_seed)?;
            let (candidate, _batches) = golfing_certificate(&tangent, cfg.rate, correction_seed)?;
            let report = certificate_report(&candidate, &tangent, &mask, cfg.rate)?;
            Ok(SweepRow {
                trial,
                seed,
                mu0,
                tangent_deviation: report.tangent_deviation,
                tangent_fit: report.tangent_fit,
                complement_leakage: report.complement_leakage,
                passed: report.passed,
                passed_loose: report.passed_loose,
            })
        })
        .collect()
}

/// Writes sweep rows as a CSV file.
pub fn write_sweep_csv(path: impl AsRef<Path>, rows: &[SweepRow]) -> Result<()> {
    let lines: Vec<String> = rows.iter().map(SweepRow::csv_row).collect();
    csv_export(path, SweepRow::csv_header(), &lines)
}
