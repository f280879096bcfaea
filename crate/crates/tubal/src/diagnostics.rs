//! Exact-recovery diagnostics: incoherence measurement, sample-complexity
//! estimates, and a numerical dual certificate for completion instances.
//!
//! The central question these tools answer is "should nuclear-norm
//! completion recover this tensor from this mask?". Incoherence quantifies
//! how spread out the factors are; the sample-complexity bound turns that
//! into a sampling rate; and the certificate machinery checks, on a
//! concrete instance, the operator conditions that drive exact-recovery
//! proofs: near-isometry of sampling on the tangent space, and existence of
//! a supported dual tensor close to `U∗Vᵀ` with small complement leakage.
//! The dual tensor is built by the golfing scheme: the sampling budget is
//! split into independent batches, each correcting the residual left by the
//! last.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::sampling::{
    bernoulli_mask, p_omega, p_t, p_t_perp, MaskKind, SampleMask, TangentSpace,
    ORTHOGONALITY_TOL,
};
use crate::tensor::{fft3, linf_2star, Tensor3};
use crate::tsvd::{spectral_norm, TsvdFactors};

/// Convergence tolerance of the operator-norm power iteration.
pub const POWER_TOL: f64 = 1e-8;

/// Power-iteration budget used inside [`certificate_report`]. Generous,
/// because the deviation estimate approaches the operator norm from below
/// and an under-converged value would flatter the verdict.
pub const CERTIFICATE_POWER_ITERS: usize = 1000;

/// Fixed start seed used inside [`certificate_report`], so that reports are
/// deterministic functions of their inputs.
const CERTIFICATE_POWER_SEED: u64 = 0x5eed_cafe;

/// Incoherence measurements of a factor pair.
///
/// `mu0` is the tensor incoherence parameter: with factors of width `r`,
///
/// ```text
/// mu0 = max( (n1/r) · max_i ‖Uᵀ∗ė_i‖²,  (n2/r) · max_j ‖Vᵀ∗ė_j‖² )
/// ```
///
/// where `‖·‖` is the tube-average column norm (the `2*` norm). It ranges
/// from 1 (perfectly flat factors) to `min(n1, n2)/r` (factors containing a
/// standard basis column). `mu0_slices` holds the analogous per-transform-
/// slice measurement, whose maximum always dominates `mu0`.
#[derive(Clone, Debug)]
pub struct IncoherenceReport {
    /// Tensor incoherence parameter (the larger of the two sides).
    pub mu0: f64,
    /// Row-space side, `(n1/r) · max_i ‖Uᵀ∗ė_i‖²`.
    pub mu0_u: f64,
    /// Column-space side, `(n2/r) · max_j ‖Vᵀ∗ė_j‖²`.
    pub mu0_v: f64,
    /// Per-transform-slice incoherence, `n3` entries.
    pub mu0_slices: Vec<f64>,
    /// Lateral index attaining `mu0_u` and its column norm `‖Uᵀ∗ė_i‖`.
    pub max_col_u: (usize, f64),
    /// Lateral index attaining `mu0_v` and its column norm `‖Vᵀ∗ė_j‖`.
    pub max_col_v: (usize, f64),
    /// Factor width the parameters are normalized by.
    pub rank: usize,
}

impl IncoherenceReport {
    /// Serializes the report as `key=value` lines.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("mu0={}\n", self.mu0));
        out.push_str(&format!("mu0_u={}\n", self.mu0_u));
        out.push_str(&format!("mu0_v={}\n", self.mu0_v));
        out.push_str(&format!("rank={}\n", self.rank));
        out.push_str(&format!("max_col_u_index={}\n", self.max_col_u.0));
        out.push_str(&format!("max_col_u_norm={}\n", self.max_col_u.1));
        out.push_str(&format!("max_col_v_index={}\n", self.max_col_v.0));
        out.push_str(&format!("max_col_v_norm={}\n", self.max_col_v.1));
        for (k, m) in self.mu0_slices.iter().enumerate() {
            out.push_str(&format!("mu0_slice_{k}={m}\n"));
        }
        out
    }

    /// CSV column names matching [`IncoherenceReport::csv_row`].
    pub fn csv_header() -> &'static str {
        "mu0,mu0_u,mu0_v,rank,max_mu0_slice"
    }

    /// One CSV row of the headline numbers (per-slice values stay in kv).
    pub fn csv_row(&self) -> String {
        let max_slice = self.mu0_slices.iter().copied().fold(0.0, f64::max);
        format!(
            "{},{},{},{},{}",
            self.mu0, self.mu0_u, self.mu0_v, self.rank, max_slice
        )
    }
}

/// Measures the incoherence of a factor pair (see [`IncoherenceReport`]).
///
/// The factors must have orthonormal lateral columns, as produced by the
/// tensor SVD; callers normally pass thin (width-`r`) factors of a rank-`r`
/// tensor.
pub fn incoherence(f: &TsvdFactors) -> Result<IncoherenceReport> {
    let (n1, r, n3) = f.u.dims();
    let (n2, rv, n3v) = f.v.dims();
    if rv != r || n3v != n3 {
        return Err(Error::DimensionMismatch(format!(
            "factors {n1}x{r}x{n3} and {n2}x{rv}x{n3v} do not share width and depth"
        )));
    }
    let uf = fft3(&f.u);
    let vf = fft3(&f.v);
    let defect = slice_orthogonality_defect(uf.slices()).max(slice_orthogonality_defect(vf.slices()));
    if defect > ORTHOGONALITY_TOL {
        return Err(Error::NotOrthogonal(defect));
    }

    let (u_avg, u_slice_max) = row_energy_stats(uf.slices(), n1);
    let (v_avg, v_slice_max) = row_energy_stats(vf.slices(), n2);

    let (u_idx, u_max) = argmax(&u_avg);
    let (v_idx, v_max) = argmax(&v_avg);
    let mu0_u = n1 as f64 / r as f64 * u_max;
    let mu0_v = n2 as f64 / r as f64 * v_max;
    let mu0_slices: Vec<f64> = (0..n3)
        .map(|k| {
            let mu = n1 as f64 / r as f64 * u_slice_max[k];
            let mv = n2 as f64 / r as f64 * v_slice_max[k];
            mu.max(mv)
        })
        .collect();

    Ok(IncoherenceReport {
        mu0: mu0_u.max(mu0_v),
        mu0_u,
        mu0_v,
        mu0_slices,
        max_col_u: (u_idx, u_max.sqrt()),
        max_col_v: (v_idx, v_max.sqrt()),
        rank: r,
    })
}

fn slice_orthogonality_defect(slices: &[DMatrix<Complex64>]) -> f64 {
    slices
        .iter()
        .map(|s| {
            let mut gram = s.adjoint() * s;
            for c in 0..gram.nrows() {
                gram[(c, c)] -= Complex64::new(1.0, 0.0);
            }
            gram.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max)
}

/// Per-row transform energies: returns the tube-averaged squared row norms
/// (length `rows`) and the per-slice maxima (length `n3`).
fn row_energy_stats(slices: &[DMatrix<Complex64>], rows: usize) -> (Vec<f64>, Vec<f64>) {
    let n3 = slices.len();
    let mut avg = vec![0.0; rows];
    let mut per_slice_max = Vec::with_capacity(n3);
    for s in slices {
        let mut slice_max: f64 = 0.0;
        for i in 0..rows {
            let e: f64 = s.row(i).iter().map(|z| z.norm_sqr()).sum();
            avg[i] += e;
            slice_max = slice_max.max(e);
        }
        per_slice_max.push(slice_max);
    }
    for a in avg.iter_mut() {
        *a /= n3 as f64;
    }
    (avg, per_slice_max)
}

fn argmax(values: &[f64]) -> (usize, f64) {
    let mut idx = 0;
    let mut best = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            idx = i;
        }
    }
    (idx, best)
}

/// Sampling rate suggested by the recovery theory: `c0·mu0·r·ln(n3(n1+n2))
/// / min(n1,n2)`, clamped to 1. Rates at the clamp mean full sampling is
/// required at these dimensions.
pub fn sample_complexity_bound(
    n1: usize,
    n2: usize,
    n3: usize,
    r: usize,
    mu0: f64,
    c0: f64,
) -> f64 {
    let n = n1.min(n2) as f64;
    let bound = c0 * mu0 * r as f64 * ((n3 * (n1 + n2)) as f64).ln() / n;
    bound.min(1.0)
}

/// Estimates `‖P_T R_Ω P_T − P_T‖_op`, the deviation of the rescaled
/// sampling operator from the identity on the tangent space, by power
/// iteration on the self-adjoint operator
///
/// ```text
/// Z ↦ P_T((1/p)·P_Ω(P_T(Z))) − P_T(Z)
/// ```
///
/// A value well below 1/2 certifies that the mask samples the tangent space
/// nearly isometrically, the first ingredient of exact-recovery arguments.
/// The iterate's norm-growth factor estimates the operator norm (the
/// operator is indefinite, so plain Rayleigh quotients would oscillate);
/// the estimate converges to [`POWER_TOL`] or stops after `iters` steps,
/// and is deterministic given `seed`.
pub fn tangent_sampling_deviation(
    t: &TangentSpace,
    mask: &SampleMask,
    p: f64,
    iters: usize,
    seed: u64,
) -> Result<f64> {
    if mask.kind() != MaskKind::Entrywise {
        return Err(Error::WrongMaskKind {
            expected: MaskKind::Entrywise.label(),
            got: mask.kind().label(),
        });
    }
    if mask.dims() != t.dims() {
        let (m1, m2, m3) = mask.dims();
        let (n1, n2, n3) = t.dims();
        return Err(Error::DimensionMismatch(format!(
            "mask is {m1}x{m2}x{m3} but the tangent space expects {n1}x{n2}x{n3}"
        )));
    }
    if !(p.is_finite() && p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    if iters == 0 {
        return Err(Error::Config(
            "power iteration needs at least one step".to_string(),
        ));
    }

    let (n1, n2, n3) = t.dims();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n1 * n2 * n3)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let mut v = Tensor3::new(n1, n2, n3, data)?;
    let norm = v.frobenius();
    v = v.scale(1.0 / norm);

    let apply = |z: &Tensor3| -> Result<Tensor3> {
        let tz = p_t(z, t)?;
        let sampled = p_omega(&tz, mask)?.scale(1.0 / p);
        Ok(&p_t(&sampled, t)? - &tz)
    };

    let mut estimate = 0.0;
    let mut prev_diff = f64::INFINITY;
    for _ in 0..iters {
        let w = apply(&v)?;
        // The norm of A(v) for a unit iterate is the square root of the
        // Rayleigh quotient of A², which power iteration drives to the
        // operator norm even though A itself is indefinite. The sequence
        // increases monotonically, so once successive increments decay at
        // ratio rho < 1 the remaining error is at most diff·rho/(1−rho).
        let growth = w.frobenius();
        if growth == 0.0 {
            return Ok(0.0);
        }
        v = w.scale(1.0 / growth);
        let diff = (growth - estimate).abs();
        if diff == 0.0 {
            return Ok(growth);
        }
        if prev_diff.is_finite() && diff < prev_diff {
            let rho = diff / prev_diff;
            if diff * rho / (1.0 - rho) <= POWER_TOL * growth.max(1.0) {
                return Ok(growth);
            }
        }
        prev_diff = diff;
        estimate = growth;
    }
    Ok(estimate)
}

/// Batch count used by the golfing scheme at these dimensions:
/// `⌈20·ln(min(n1,n2)·n3)⌉`, at least 1.
pub fn default_batch_count(n1: usize, n2: usize, n3: usize) -> usize {
    let n = n1.min(n2) * n3;
    ((20.0 * (n as f64).ln()).ceil() as usize).max(1)
}

/// Runs the golfing recursion over the given batch masks:
///
/// ```text
/// W_0 = 0,   W_t = W_{t−1} + R_{Ω_t}( P_T( U∗Vᵀ − P_T(W_{t−1}) ) )
/// ```
///
/// Each batch observes the current tangent-space residual on fresh samples
/// and adds the rescaled correction, so the candidate stays supported on
/// the union of the batches while its tangent part is golfed toward
/// `U∗Vᵀ`. Returns the final candidate together with the residual trace
/// `‖U∗Vᵀ − P_T(W_t)‖_F` for `t = 0..batches.len()` (so the trace has one
/// more entry than there are batches).
pub fn golfing_run(t: &TangentSpace, batches: &[SampleMask]) -> Result<(Tensor3, Vec<f64>)> {
    let (n1, n2, n3) = t.dims();
    let uvt = uv_product(t)?;
    let mut w = Tensor3::zeros(n1, n2, n3);
    let mut trace = Vec::with_capacity(batches.len() + 1);
    trace.push(uvt.frobenius());
    for batch in batches {
        if batch.kind() != MaskKind::Entrywise {
            return Err(Error::WrongMaskKind {
                expected: MaskKind::Entrywise.label(),
                got: batch.kind().label(),
            });
        }
        let residual = p_t(&(&uvt - &p_t(&w, t)?), t)?;
        let correction = p_omega(&residual, batch)?.scale(1.0 / batch.p());
        w = &w + &correction;
        trace.push((&uvt - &p_t(&w, t)?).frobenius());
    }
    Ok((w, trace))
}

/// Builds a dual-certificate candidate for sampling rate `p` by the golfing
/// scheme: the rate is split into `t0 = ` [`default_batch_count`]
/// independent Bernoulli batches of rate `q = 1 − (1−p)^(1/t0)` (so their
/// union observes entries with probability exactly `p`), and the recursion
/// of [`golfing_run`] is driven over them. Returns the candidate and the
/// batch masks; the candidate is supported on the union of the batches.
pub fn golfing_certificate(
    t: &TangentSpace,
    p: f64,
    seed: u64,
) -> Result<(Tensor3, Vec<SampleMask>)> {
    if !(p.is_finite() && p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    let (n1, n2, n3) = t.dims();
    let t0 = default_batch_count(n1, n2, n3);
    let q = 1.0 - (1.0 - p).powf(1.0 / t0 as f64);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let batches: Vec<SampleMask> = (0..t0)
        .map(|_| bernoulli_mask(n1, n2, n3, q, rng.random::<u64>()))
        .collect::<Result<_>>()?;
    let (y, _) = golfing_run(t, &batches)?;
    Ok((y, batches))
}

/// The product `U∗Vᵀ` of a tangent space's factors.
fn uv_product(t: &TangentSpace) -> Result<Tensor3> {
    let n3 = t.dims().2;
    let unique: Vec<DMatrix<Complex64>> = (0..crate::tsvd::unique_slices(n3))
        .map(|k| &t.u_slices()[k] * t.v_slices()[k].adjoint())
        .collect();
    crate::tsvd::assemble_factor(&unique, n3)
}

/// Numerical verdict on a dual-certificate candidate.
///
/// The three measurements are the exact-recovery conditions for a sampled
/// instance: the tangent-space sampling deviation must stay below 1/2, the
/// candidate's tangent part must fit `U∗Vᵀ` to `1/(4·n·n3²)` (with
/// `n = min(n1, n2)`), and its complement part must have spectral norm at
/// most 1/2. The fit threshold is demanding; `threshold_fit_loose` and
/// `passed_loose` report the same verdict against the weaker `1/(4·n·n3)`
/// used by intermediate steps of recovery arguments.
#[derive(Clone, Debug)]
pub struct CertificateReport {
    /// Estimated `‖P_T R_Ω P_T − P_T‖_op` for the full mask.
    pub tangent_deviation: f64,
    /// `‖P_T(Y) − U∗Vᵀ‖_F`.
    pub tangent_fit: f64,
    /// `‖P_{T⊥}(Y)‖` (spectral).
    pub complement_leakage: f64,
    /// Batch count the golfing scheme uses at these dimensions.
    pub t0: usize,
    /// Strict fit threshold `1/(4·n·n3²)`.
    pub threshold_fit: f64,
    /// Loose fit threshold `1/(4·n·n3)`.
    pub threshold_fit_loose: f64,
    /// `deviation ≤ 1/2 ∧ fit ≤ threshold_fit ∧ leakage ≤ 1/2`.
    pub passed: bool,
    /// Same verdict with the loose fit threshold.
    pub passed_loose: bool,
    /// Slack of each condition: `(1/2 − deviation, threshold_fit − fit,
    /// 1/2 − leakage)`; negative entries are the failing ones.
    pub margins: (f64, f64, f64),
}

impl CertificateReport {
    /// Serializes the report as `key=value` lines.
    pub fn to_kv(&self) -> String {
        format!(
            "tangent_deviation={}\ntangent_fit={}\ncomplement_leakage={}\nt0={}\n\
             threshold_fit={}\nthreshold_fit_loose={}\nmargin_deviation={}\n\
             margin_fit={}\nmargin_leakage={}\npassed={}\npassed_loose={}\n",
            self.tangent_deviation,
            self.tangent_fit,
            self.complement_leakage,
            self.t0,
            self.threshold_fit,
            self.threshold_fit_loose,
            self.margins.0,
            self.margins.1,
            self.margins.2,
            self.passed,
            self.passed_loose,
        )
    }

    /// CSV column names matching [`CertificateReport::csv_row`].
    pub fn csv_header() -> &'static str {
        "tangent_deviation,tangent_fit,complement_leakage,t0,passed,passed_loose"
    }

    /// One CSV row of the headline numbers.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.tangent_deviation,
            self.tangent_fit,
            self.complement_leakage,
            self.t0,
            u8::from(self.passed),
            u8::from(self.passed_loose),
        )
    }
}

/// Evaluates the certificate conditions for a candidate `y` against the
/// tangent space and the mask it should certify. The deviation estimate
/// runs a fixed, seeded power-iteration budget so the report is a
/// deterministic function of its inputs.
pub fn certificate_report(
    y: &Tensor3,
    t: &TangentSpace,
    mask: &SampleMask,
    p: f64,
) -> Result<CertificateReport> {
    let (n1, n2, n3) = t.dims();
    if y.dims() != (n1, n2, n3) {
        let (a, b, c) = y.dims();
        return Err(Error::DimensionMismatch(format!(
            "candidate is {a}x{b}x{c} but the tangent space expects {n1}x{n2}x{n3}"
        )));
    }
    let tangent_deviation = tangent_sampling_deviation(
        t,
        mask,
        p,
        CERTIFICATE_POWER_ITERS,
        CERTIFICATE_POWER_SEED,
    )?;
    let uvt = uv_product(t)?;
    let tangent_fit = (&p_t(y, t)? - &uvt).frobenius();
    let complement_leakage = spectral_norm(&p_t_perp(y, t)?);

    let n = n1.min(n2) as f64;
    let n3f = n3 as f64;
    let threshold_fit = 1.0 / (4.0 * n * n3f * n3f);
    let threshold_fit_loose = 1.0 / (4.0 * n * n3f);
    let deviation_ok = tangent_deviation <= 0.5;
    let leakage_ok = complement_leakage <= 0.5;
    Ok(CertificateReport {
        tangent_deviation,
        tangent_fit,
        complement_leakage,
        t0: default_batch_count(n1, n2, n3),
        threshold_fit,
        threshold_fit_loose,
        passed: deviation_ok && tangent_fit <= threshold_fit && leakage_ok,
        passed_loose: deviation_ok && tangent_fit <= threshold_fit_loose && leakage_ok,
        margins: (
            0.5 - tangent_deviation,
            threshold_fit - tangent_fit,
            0.5 - complement_leakage,
        ),
    })
}

/// Measured norms of the factor product: `(‖U∗Vᵀ‖_∞, ‖U∗Vᵀ‖_{∞,2*})`.
///
/// Incoherence caps both: the entrywise norm by `mu0·r/n` and the largest
/// tube norm by `√(mu0·r/n)` with `n = min(n1, n2)`. Comparing the measured
/// values against those caps is a quick coherence sanity check on a factor
/// pair. Factors of width zero cannot be represented, so the degenerate
/// empty case is rejected by construction.
pub fn uv_product_norms(t: &TangentSpace) -> Result<(f64, f64)> {
    let uvt = uv_product(t)?;
    Ok((uvt.infinity(), linf_2star(&uvt)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::unit_tensor;
    use crate::tsvd::t_svd_reduced;
    use approx::assert_relative_eq;

    fn random_tensor(n1: usize, n2: usize, n3: usize, seed: u64) -> Tensor3 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..n1 * n2 * n3)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        Tensor3::new(n1, n2, n3, data).unwrap()
    }

    fn random_factors(n1: usize, n2: usize, n3: usize, r: usize, seed: u64) -> TsvdFactors {
        t_svd_reduced(&random_tensor(n1, n2, n3, seed), r).unwrap()
    }

    /// Factors whose transform slices are all equal to the first `r`
    /// columns of the normalized 4x4 Hadamard matrix: perfectly flat rows,
    /// so the incoherence parameter is exactly 1.
    fn hadamard_factor(r: usize, n3: usize) -> Tensor3 {
        let h = [
            [0.5, 0.5, 0.5, 0.5],
            [0.5, -0.5, 0.5, -0.5],
            [0.5, 0.5, -0.5, -0.5],
            [0.5, -0.5, -0.5, 0.5],
        ];
        Tensor3::from_fn(4, r, n3, |i, j, k| if k == 0 { h[i][j] } else { 0.0 })
    }

    /// Factors holding the first `r` standard basis columns: maximally
    /// concentrated, attaining the upper incoherence bound `n/r`.
    fn basis_factor(n: usize, r: usize, n3: usize) -> Tensor3 {
        Tensor3::from_fn(n, r, n3, |i, j, k| if k == 0 && i == j { 1.0 } else { 0.0 })
    }

    #[test]
    fn flat_factors_attain_the_minimum_incoherence() {
        let f = TsvdFactors {
            u: hadamard_factor(2, 3),
            s: Tensor3::zeros(2, 2, 3),
            v: hadamard_factor(2, 3),
            r: 2,
        };
        let report = incoherence(&f).unwrap();
        assert_relative_eq!(report.mu0, 1.0, max_relative = 1e-12);
        for m in &report.mu0_slices {
            assert_relative_eq!(*m, 1.0, max_relative = 1e-12);
        }
        assert_eq!(report.rank, 2);
    }

    #[test]
    fn basis_factors_attain_the_maximum_incoherence() {
        let f = TsvdFactors {
            u: basis_factor(6, 2, 3),
            s: Tensor3::zeros(2, 2, 3),
            v: basis_factor(4, 2, 3),
            r: 2,
        };
        let report = incoherence(&f).unwrap();
        assert_relative_eq!(report.mu0_u, 3.0, max_relative = 1e-12);
        assert_relative_eq!(report.mu0_v, 2.0, max_relative = 1e-12);
        assert_relative_eq!(report.mu0, 3.0, max_relative = 1e-12);
        // The attaining column is one of the basis columns with norm 1.
        assert!(report.max_col_u.0 < 2);
        assert_relative_eq!(report.max_col_u.1, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn incoherence_respects_range_and_slice_domination() {
        for seed in 0..10 {
            let f = random_factors(30, 2, 20, 2, 100 + seed);
            let report = incoherence(&f).unwrap();
            assert!(report.mu0 >= 1.0 - 1e-9, "mu0 {} below 1", report.mu0);
            // Each side is capped by its own dimension over the width, so
            // the parameter cannot exceed 30/2 here.
            assert!(report.mu0 <= 15.0 + 1e-9, "mu0 {} above n1/r", report.mu0);
            let max_slice = report
                .mu0_slices
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                report.mu0 <= max_slice + 1e-9,
                "tensor parameter {} exceeds slice maximum {}",
                report.mu0,
                max_slice
            );
        }
        for seed in 0..10 {
            let f = random_factors(12, 9, 5, 3, 200 + seed);
            let report = incoherence(&f).unwrap();
            assert!(report.mu0 >= 1.0 - 1e-9);
            assert!(report.mu0 <= 3.0 + 1e-9);
        }
    }

    #[test]
    fn incoherence_rejects_non_orthogonal_factors() {
        let f = TsvdFactors {
            u: random_tensor(6, 2, 3, 300),
            s: Tensor3::zeros(2, 2, 3),
            v: random_tensor(5, 2, 3, 301),
            r: 2,
        };
        assert!(matches!(incoherence(&f), Err(Error::NotOrthogonal(_))));
    }

    #[test]
    fn complexity_bound_is_linear_in_rank_and_clamped() {
        let b1 = sample_complexity_bound(500, 500, 5, 1, 1.0, 1.0);
        let b2 = sample_complexity_bound(500, 500, 5, 2, 1.0, 1.0);
        assert!(b1 < 1.0 && b2 < 1.0);
        assert_relative_eq!(b2 / b1, 2.0, max_relative = 1e-15);

        // Square case written out directly.
        let direct = 1.0 * 1.0 * 3.0 * ((5.0 * (2.0 * 500.0)) as f64).ln() / 500.0;
        assert_relative_eq!(
            sample_complexity_bound(500, 500, 5, 3, 1.0, 1.0),
            direct,
            max_relative = 1e-15
        );

        assert_eq!(sample_complexity_bound(10, 10, 3, 5, 10.0, 100.0), 1.0);
    }

    #[test]
    fn sampling_deviation_vanishes_on_the_full_mask() {
        let t = TangentSpace::new(&random_factors(10, 9, 4, 2, 400)).unwrap();
        let mask = bernoulli_mask(10, 9, 4, 1.0, 401).unwrap();
        let dev = tangent_sampling_deviation(&t, &mask, 1.0, 100, 7).unwrap();
        assert!(dev <= 1e-8, "deviation {dev} should vanish");
    }

    #[test]
    fn sampling_deviation_reaches_one_on_an_empty_mask() {
        let t = TangentSpace::new(&random_factors(8, 8, 3, 2, 410)).unwrap();
        let empty = bernoulli_mask(8, 8, 3, 1e-12, 411).unwrap();
        assert_eq!(empty.observed_count(), 0);
        let dev = tangent_sampling_deviation(&t, &empty, 0.5, 100, 7).unwrap();
        assert_relative_eq!(dev, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn sampling_deviation_is_start_vector_invariant() {
        let t = TangentSpace::new(&random_factors(16, 16, 8, 2, 420)).unwrap();
        let mask = bernoulli_mask(16, 16, 8, 0.5, 421).unwrap();
        let a = tangent_sampling_deviation(&t, &mask, 0.5, 3000, 1).unwrap();
        let b = tangent_sampling_deviation(&t, &mask, 0.5, 3000, 2).unwrap();
        assert!(
            (a - b).abs() <= 1e-6 * a.max(1.0),
            "estimates {a} and {b} disagree"
        );
    }

    #[test]
    fn golfing_candidate_is_supported_on_the_batch_union() {
        let t = TangentSpace::new(&random_factors(9, 8, 4, 2, 430)).unwrap();
        let (y, batches) = golfing_certificate(&t, 0.4, 431).unwrap();
        assert_eq!(batches.len(), default_batch_count(9, 8, 4));
        let union = batches
            .iter()
            .skip(1)
            .fold(batches[0].clone(), |acc, b| acc.union(b).unwrap());
        for i in 0..9 {
            for j in 0..8 {
                for k in 0..4 {
                    if !union.contains(i, j, k) {
                        assert_eq!(y.get(i, j, k), 0.0, "leak outside support");
                    }
                }
            }
        }
        // Union of the batch rates reproduces the requested rate.
        assert_relative_eq!(union.p(), 0.4, max_relative = 1e-10);
    }

    #[test]
    fn one_full_batch_recovers_the_factor_product_exactly() {
        let f = random_factors(7, 6, 3, 2, 440);
        let t = TangentSpace::new(&f).unwrap();
        let full = bernoulli_mask(7, 6, 3, 1.0, 441).unwrap();
        let (y, trace) = golfing_run(&t, std::slice::from_ref(&full)).unwrap();
        let uvt = uv_product(&t).unwrap();
        assert!((&y - &uvt).frobenius() <= 1e-12 * uvt.frobenius());
        assert_eq!(trace.len(), 2);
        assert!(trace[1] <= 1e-12);

        let report = certificate_report(&y, &t, &full, 1.0).unwrap();
        assert!(report.passed, "full-mask certificate must pass");
        assert!(report.tangent_deviation <= 1e-8);
        assert!(report.complement_leakage <= 1e-10);
    }

    #[test]
    fn zero_candidate_misfits_by_sqrt_rank() {
        let f = random_factors(8, 7, 5, 3, 450);
        let t = TangentSpace::new(&f).unwrap();
        let mask = bernoulli_mask(8, 7, 5, 0.5, 451).unwrap();
        let zero = Tensor3::zeros(8, 7, 5);
        let report = certificate_report(&zero, &t, &mask, 0.5).unwrap();
        assert_relative_eq!(report.tangent_fit, 3.0_f64.sqrt(), max_relative = 1e-12);
        assert!(!report.passed);
        assert!(report.margins.1 < 0.0);
    }

    #[test]
    fn golfing_contracts_when_batches_sample_well() {
        let t = TangentSpace::new(&random_factors(10, 10, 4, 1, 460)).unwrap();
        let q = 0.9;
        let batches: Vec<SampleMask> = (0..6)
            .map(|i| bernoulli_mask(10, 10, 4, q, 461 + i).unwrap())
            .collect();
        let (_, trace) = golfing_run(&t, &batches).unwrap();
        for (idx, batch) in batches.iter().enumerate() {
            let dev = tangent_sampling_deviation(&t, batch, q, 200, 99).unwrap();
            if dev < 0.5 {
                assert!(
                    trace[idx + 1] <= (dev * 1.05 + 1e-12) * trace[idx],
                    "batch {idx}: residual {} -> {} did not contract at rate {dev}",
                    trace[idx],
                    trace[idx + 1]
                );
            }
        }
    }

    #[test]
    fn unit_tensor_tangent_energy_is_bounded_by_incoherence() {
        let f = random_factors(8, 6, 4, 2, 470);
        let t = TangentSpace::new(&f).unwrap();
        let report = incoherence(&f).unwrap();
        let bound = 2.0 * report.mu0 * 2.0 / 6.0;
        for i in 0..8 {
            for j in 0..6 {
                for k in 0..4 {
                    let e = unit_tensor(i, j, k, 8, 6, 4).unwrap();
                    let energy = p_t(&e, &t).unwrap().frobenius().powi(2);
                    assert!(
                        energy <= bound + 1e-9,
                        "tangent energy {energy} at ({i},{j},{k}) beats bound {bound}"
                    );
                }
            }
        }
    }

    #[test]
    fn factor_product_norms_match_coherence_caps() {
        // Identity-like factors: the product has a one at its largest entry
        // and the incoherence caps are tight.
        let f = TsvdFactors {
            u: basis_factor(6, 2, 4),
            s: Tensor3::zeros(2, 2, 4),
            v: basis_factor(6, 2, 4),
            r: 2,
        };
        let t = TangentSpace::new(&f).unwrap();
        let (linf, ltube) = uv_product_norms(&t).unwrap();
        assert_relative_eq!(linf, 1.0, max_relative = 1e-12);
        assert_relative_eq!(ltube, 1.0, max_relative = 1e-12);
        let report = incoherence(&f).unwrap();
        assert_relative_eq!(report.mu0 * 2.0 / 6.0, 1.0, max_relative = 1e-12);

        // Random factors respect the caps with room to spare.
        for seed in 0..10 {
            let f = random_factors(12, 12, 5, 2, 480 + seed);
            let t = TangentSpace::new(&f).unwrap();
            let report = incoherence(&f).unwrap();
            let cap = report.mu0 * 2.0 / 12.0;
            let (linf, ltube) = uv_product_norms(&t).unwrap();
            assert!(linf <= cap + 1e-9, "entry norm {linf} beats cap {cap}");
            assert!(
                ltube <= cap.sqrt() + 1e-9,
                "tube norm {ltube} beats cap {}",
                cap.sqrt()
            );
        }
    }

    #[test]
    fn reports_serialize_to_stable_kv_text() {
        let report = IncoherenceReport {
            mu0: 1.5,
            mu0_u: 1.5,
            mu0_v: 1.25,
            mu0_slices: vec![1.0, 2.0],
            max_col_u: (3, 0.5),
            max_col_v: (1, 0.25),
            rank: 2,
        };
        assert_eq!(
            report.to_kv(),
            "mu0=1.5\nmu0_u=1.5\nmu0_v=1.25\nrank=2\nmax_col_u_index=3\nmax_col_u_norm=0.5\n\
             max_col_v_index=1\nmax_col_v_norm=0.25\nmu0_slice_0=1\nmu0_slice_1=2\n"
        );
        assert_eq!(report.csv_row(), "1.5,1.5,1.25,2,2");

        let cert = CertificateReport {
            tangent_deviation: 0.25,
            tangent_fit: 0.5,
            complement_leakage: 0.125,
            t0: 74,
            threshold_fit: 0.0025,
            threshold_fit_loose: 0.025,
            passed: false,
            passed_loose: false,
            margins: (0.25, -0.4975, 0.375),
        };
        let kv = cert.to_kv();
        assert!(kv.contains("tangent_deviation=0.25\n"));
        assert!(kv.contains("passed=false\n"));
        assert!(kv.contains("margin_fit=-0.4975\n"));
        assert_eq!(cert.csv_row(), "0.25,0.5,0.125,74,0,0");
    }
}
