//! Nuclear-norm tensor completion from partial observations.
//!
//! [`complete_entrywise`] recovers a tensor from entrywise samples by
//! minimizing the tensor nuclear norm subject to agreement with the data,
//! solved with ADMM: the splitting `Z = X` alternates a singular value
//! shrinkage step on `Z` with re-clamping the observed entries of `X`. For
//! tube sampling the problem decouples, and [`complete_tubal`] solves one
//! complex matrix completion per transform slice (see
//! [`complete_fourier_slice`]) before transforming back.
//!
//! All solves are deterministic for a fixed mask and configuration,
//! regardless of thread count.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sampling::{p_omega, MaskKind, SampleMask};
use crate::tensor::{fft3, Tensor3};
use crate::tsvd::{assemble_factor, shrink_slice, slice_weight, tnn, unique_slices};

/// How many solver iterations may reuse cached spectral state before the
/// decomposition restarts cold, bounding roundoff carried across warm starts.
const WARM_RESET_PERIOD: usize = 64;

/// Tuning knobs for the ADMM completion solvers.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// ADMM penalty. `None` picks `1 / std(observed values)`, falling back
    /// to `1.0` when the observations have zero spread.
    pub rho: Option<f64>,
    /// Iteration cap; the solver reports `converged = false` when reached.
    pub max_iters: usize,
    /// Relative primal residual tolerance, `‖X − Z‖ / max(‖X‖, ‖Z‖)`.
    pub tol_primal: f64,
    /// Relative dual residual tolerance, `ρ‖Z − Z_prev‖ / ‖dual‖`.
    pub tol_dual: f64,
    /// Log residuals to stderr every 25 iterations.
    pub verbose: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rho: None,
            max_iters: 500,
            tol_primal: 1e-7,
            tol_dual: 1e-7,
            verbose: false,
        }
    }
}

impl SolverConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if let Some(rho) = self.rho {
            if !(rho.is_finite() && rho > 0.0) {
                return Err(Error::Config(format!(
                    "penalty rho must be finite and positive, got {rho}"
                )));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".to_string()));
        }
        if !(self.tol_primal > 0.0 && self.tol_dual > 0.0) {
            return Err(Error::Config(format!(
                "tolerances must be positive, got primal {} and dual {}",
                self.tol_primal, self.tol_dual
            )));
        }
        Ok(())
    }
}

/// Convergence record of one completion solve.
#[derive(Clone, Debug)]
pub struct SolveReport {
    /// Iterations actually run.
    pub iterations: usize,
    /// Relative primal residual per iteration (`iterations` entries).
    pub primal_residuals: Vec<f64>,
    /// Relative dual residual per iteration (`iterations` entries).
    pub dual_residuals: Vec<f64>,
    /// Objective (nuclear norm of the shrinkage iterate) per iteration.
    pub objective_trace: Vec<f64>,
    /// Relative error of the final shrinkage iterate against the data on
    /// the observed support, measured before the output clamp.
    pub observed_rse: f64,
    /// Whether both residuals met their tolerances within `max_iters`.
    pub converged: bool,
}

/// Convergence record of a tubal completion: one matrix solve per unique
/// transform slice, plus aggregate statistics.
#[derive(Clone, Debug)]
pub struct TubalReport {
    /// Per-slice reports, indexed by unique slice `0..=n3/2`; conjugate
    /// mirror slices share the corresponding entry.
    pub slices: Vec<SolveReport>,
    /// Largest per-slice iteration count.
    pub iterations: usize,
    /// Whether every slice converged.
    pub converged: bool,
    /// Relative error on the observed tubes before the output clamp.
    pub observed_rse: f64,
}

/// Relative squared error `‖X − M‖_F / ‖M‖_F` of a reconstruction `X`
/// against a reference `M`.
pub fn rse(x: &Tensor3, m: &Tensor3) -> Result<f64> {
    if x.dims() != m.dims() {
        let (a, b, c) = x.dims();
        let (d, e, f) = m.dims();
        return Err(Error::DimensionMismatch(format!(
            "reconstruction is {a}x{b}x{c} but reference is {d}x{e}x{f}"
        )));
    }
    let scale = m.frobenius();
    if scale == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((x - m).frobenius() / scale)
}

fn check_mask_kind(mask: &SampleMask, expected: MaskKind) -> Result<()> {
    if mask.kind() != expected {
        return Err(Error::WrongMaskKind {
            expected: expected.label(),
            got: mask.kind().label(),
        });
    }
    Ok(())
}

fn check_sample_budget(mask: &SampleMask) -> Result<()> {
    let (n1, n2, _) = mask.dims();
    let observed = mask.observed_count();
    if observed == 0 {
        return Err(Error::EmptyMask);
    }
    // Require at least one observation per tube on average; sparser masks
    // make the program vacuous.
    let required = n1 * n2;
    if observed < required {
        return Err(Error::TooFewSamples { observed, required });
    }
    Ok(())
}

/// Penalty default: the reciprocal spread of the observed values.
fn resolve_rho(cfg: &SolverConfig, observed: &Tensor3, mask: &SampleMask) -> f64 {
    if let Some(rho) = cfg.rho {
        return rho;
    }
    let (n1, n2, n3) = observed.dims();
    let mut values = Vec::with_capacity(mask.observed_count());
    for k in 0..n3 {
        for i in 0..n1 {
            for j in 0..n2 {
                if mask.contains(i, j, k) {
                    values.push(observed.get(i, j, k));
                }
            }
        }
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std > 0.0 {
        1.0 / std
    } else {
        1.0
    }
}

/// Completes a tensor from entrywise observations by TNN minimization.
///
/// `observed` carries the data on the mask's support (entries off the
/// support are ignored and treated as zero). The returned tensor matches
/// the data exactly on the observed entries; `SolveReport::observed_rse`
/// records how far the unclamped optimizer iterate was from the data, which
/// is the honest measure of solver accuracy.
pub fn complete_entrywise(
    observed: &Tensor3,
    mask: &SampleMask,
    cfg: &SolverConfig,
) -> Result<(Tensor3, SolveReport)> {
    cfg.validate()?;
    check_mask_kind(mask, MaskKind::Entrywise)?;
    let observed = p_omega(observed, mask)?;
    check_sample_budget(mask)?;
    let (n1, n2, n3) = observed.dims();

    if mask.is_full() {
        // Fully observed data leaves nothing to complete.
        return Ok((
            observed.clone(),
            SolveReport {
                iterations: 1,
                primal_residuals: vec![0.0],
                dual_residuals: vec![0.0],
                objective_trace: vec![tnn(&observed)],
                observed_rse: 0.0,
                converged: true,
            },
        ));
    }

    let rho = resolve_rho(cfg, &observed, mask);
    let tau = n3 as f64 / rho;
    let uniq = unique_slices(n3);

    let mut x = observed.clone();
    let mut z = observed.clone();
    let mut u = Tensor3::zeros(n1, n2, n3);
    let mut states: Vec<Option<Vec<Complex64>>> = vec![None; uniq];

    let mut primal_residuals = Vec::new();
    let mut dual_residuals = Vec::new();
    let mut objective_trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..cfg.max_iters {
        if iter % WARM_RESET_PERIOD == 0 {
            states.iter_mut().for_each(|s| *s = None);
        }
        let z_prev = z;

        // Z-update: proximal step on the nuclear norm at X + U.
        let target = fft3(&(&x + &u));
        let parts: Vec<Result<(DMatrix<Complex64>, f64)>> = states
            .par_iter_mut()
            .enumerate()
            .map(|(k, state)| shrink_slice(target.slice(k), tau, k, state))
            .collect();
        let mut slices = Vec::with_capacity(uniq);
        let mut objective = 0.0;
        for (k, part) in parts.into_iter().enumerate() {
            let (slice, nuclear) = part?;
            objective += slice_weight(k, n3) * nuclear;
            slices.push(slice);
        }
        z = assemble_factor(&slices, n3)?;

        // X-update: pull toward Z − U, then restore the observed data.
        x = &z - &u;
        clamp_observed(&mut x, &observed, mask);

        // Dual ascent.
        u = &u + &(&x - &z);

        let x_norm = x.frobenius();
        let z_norm = z.frobenius();
        let denom = x_norm.max(z_norm);
        let primal = if denom > 0.0 {
            (&x - &z).frobenius() / denom
        } else {
            0.0
        };
        let z_change = rho * (&z - &z_prev).frobenius();
        let u_norm = u.frobenius();
        let dual = if z_change == 0.0 {
            0.0
        } else if u_norm > 0.0 {
            z_change / u_norm
        } else {
            f64::INFINITY
        };

        primal_residuals.push(primal);
        dual_residuals.push(dual);
        objective_trace.push(objective);
        iterations = iter + 1;
        if cfg.verbose && iterations % 25 == 0 {
            eprintln!(
                "iter {iterations}: primal {primal:.3e} dual {dual:.3e} objective {objective:.6e}"
            );
        }
        if primal <= cfg.tol_primal && dual <= cfg.tol_dual {
            converged = true;
            break;
        }
    }

    let clamped_rse = observed_support_rse(&z, &observed, mask);
    let mut out = z;
    clamp_observed(&mut out, &observed, mask);
    Ok((
        out,
        SolveReport {
            iterations,
            primal_residuals,
            dual_residuals,
            objective_trace,
            observed_rse: clamped_rse,
            converged,
        },
    ))
}

fn clamp_observed(x: &mut Tensor3, observed: &Tensor3, mask: &SampleMask) {
    let (n1, n2, n3) = x.dims();
    for k in 0..n3 {
        for i in 0..n1 {
            for j in 0..n2 {
                if mask.contains(i, j, k) {
                    x.set(i, j, k, observed.get(i, j, k));
                }
            }
        }
    }
}

fn observed_support_rse(z: &Tensor3, observed: &Tensor3, mask: &SampleMask) -> f64 {
    let (n1, n2, n3) = z.dims();
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..n3 {
        for i in 0..n1 {
            for j in 0..n2 {
                if mask.contains(i, j, k) {
                    let d = z.get(i, j, k) - observed.get(i, j, k);
                    num += d * d;
                    den += observed.get(i, j, k) * observed.get(i, j, k);
                }
            }
        }
    }
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        0.0
    }
}

/// Completes one transform slice from tube observations by matrix nuclear
/// norm minimization.
///
/// `observed` is the slice with unobserved positions zero; membership comes
/// from the tubal `mask`'s `(i, j)` tube set. `rho` is the explicit ADMM
/// penalty, taken as an argument (rather than from `cfg.rho`) so that
/// callers solving many slices of one tensor share a penalty resolved once
/// from the spatial-domain data.
pub fn complete_fourier_slice(
    observed: &DMatrix<Complex64>,
    mask: &SampleMask,
    rho: f64,
    cfg: &SolverConfig,
) -> Result<(DMatrix<Complex64>, SolveReport)> {
    cfg.validate()?;
    check_mask_kind(mask, MaskKind::Tubal)?;
    let (n1, n2, _) = mask.dims();
    if observed.nrows() != n1 || observed.ncols() != n2 {
        return Err(Error::DimensionMismatch(format!(
            "slice is {}x{} but mask tubes are {}x{}",
            observed.nrows(),
            observed.ncols(),
            n1,
            n2
        )));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Config(format!(
            "penalty rho must be finite and positive, got {rho}"
        )));
    }
    check_sample_budget(mask)?;
    let observed = mask_slice(observed, mask);

    if mask.is_full() {
        let objective = nuclear_norm(&observed)?;
        return Ok((
            observed,
            SolveReport {
                iterations: 1,
                primal_residuals: vec![0.0],
                dual_residuals: vec![0.0],
                objective_trace: vec![objective],
                observed_rse: 0.0,
                converged: true,
            },
        ));
    }

    let tau = 1.0 / rho;
    let mut x = observed.clone();
    let mut z = observed.clone();
    let mut u = DMatrix::<Complex64>::zeros(n1, n2);
    let mut state: Option<Vec<Complex64>> = None;

    let mut primal_residuals = Vec::new();
    let mut dual_residuals = Vec::new();
    let mut objective_trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..cfg.max_iters {
        if iter % WARM_RESET_PERIOD == 0 {
            state = None;
        }
        let z_prev = z;

        let (z_new, objective) = shrink_slice(&(&x + &u), tau, 0, &mut state)?;
        z = z_new;

        x = &z - &u;
        for i in 0..n1 {
            for j in 0..n2 {
                if mask.contains_tube(i, j) {
                    x[(i, j)] = observed[(i, j)];
                }
            }
        }

        u += &x - &z;

        let denom = frob(&x).max(frob(&z));
        let primal = if denom > 0.0 {
            frob(&(&x - &z)) / denom
        } else {
            0.0
        };
        let z_change = rho * frob(&(&z - &z_prev));
        let u_norm = frob(&u);
        let dual = if z_change == 0.0 {
            0.0
        } else if u_norm > 0.0 {
            z_change / u_norm
        } else {
            f64::INFINITY
        };

        primal_residuals.push(primal);
        dual_residuals.push(dual);
        objective_trace.push(objective);
        iterations = iter + 1;
        if primal <= cfg.tol_primal && dual <= cfg.tol_dual {
            converged = true;
            break;
        }
    }

    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n1 {
        for j in 0..n2 {
            if mask.contains_tube(i, j) {
                num += (z[(i, j)] - observed[(i, j)]).norm_sqr();
                den += observed[(i, j)].norm_sqr();
            }
        }
    }
    let observed_rse = if den > 0.0 { (num / den).sqrt() } else { 0.0 };

    let mut out = z;
    for i in 0..n1 {
        for j in 0..n2 {
            if mask.contains_tube(i, j) {
                out[(i, j)] = observed[(i, j)];
            }
        }
    }
    Ok((
        out,
        SolveReport {
            iterations,
            primal_residuals,
            dual_residuals,
            objective_trace,
            observed_rse,
            converged,
        },
    ))
}

fn mask_slice(slice: &DMatrix<Complex64>, mask: &SampleMask) -> DMatrix<Complex64> {
    DMatrix::from_fn(slice.nrows(), slice.ncols(), |i, j| {
        if mask.contains_tube(i, j) {
            slice[(i, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn frob(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn nuclear_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    // Shrinking by zero reports the untouched spectrum's nuclear norm.
    Ok(shrink_slice(m, 0.0, 0, &mut None)?.1)
}

/// Completes a tensor from tube observations.
///
/// Because whole tubes are sampled, the transform decouples the program
/// into independent matrix completions, one per transform slice, all
/// sharing the same `(i, j)` membership. Conjugate mirror slices reuse the
/// solution of their partner, so only `n3/2 + 1` solves run, and the
/// recombined tensor is exactly real.
pub fn complete_tubal(
    observed: &Tensor3,
    mask: &SampleMask,
    cfg: &SolverConfig,
) -> Result<(Tensor3, TubalReport)> {
    cfg.validate()?;
    check_mask_kind(mask, MaskKind::Tubal)?;
    let observed = p_omega(observed, mask)?;
    check_sample_budget(mask)?;
    let n3 = observed.n3();

    let rho = resolve_rho(cfg, &observed, mask);
    let f = fft3(&observed);
    let solves: Vec<Result<(DMatrix<Complex64>, SolveReport)>> = (0..unique_slices(n3))
        .into_par_iter()
        .map(|k| complete_fourier_slice(f.slice(k), mask, rho, cfg))
        .collect();

    let mut slices = Vec::with_capacity(unique_slices(n3));
    let mut reports = Vec::with_capacity(unique_slices(n3));
    for part in solves {
        let (slice, report) = part?;
        slices.push(slice);
        reports.push(report);
    }
    let recombined = assemble_factor(&slices, n3)?;

    let observed_rse = observed_support_rse(&recombined, &observed, mask);
    let mut out = recombined;
    clamp_observed(&mut out, &observed, mask);

    let report = TubalReport {
        iterations: reports.iter().map(|r| r.iterations).max().unwrap_or(0),
        converged: reports.iter().all(|r| r.converged),
        observed_rse,
        slices: reports,
    };
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{bernoulli_mask, tubal_mask};
    use crate::tensor::{ifft3, FourierTensor};
    use crate::tsvd::t_svd_reduced;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_tensor(n1: usize, n2: usize, n3: usize, seed: u64) -> Tensor3 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..n1 * n2 * n3)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        Tensor3::new(n1, n2, n3, data).unwrap()
    }

    fn low_rank_tensor(n1: usize, n2: usize, n3: usize, r: usize, seed: u64) -> Tensor3 {
        t_svd_reduced(&random_tensor(n1, n2, n3, seed), r)
            .unwrap()
            .reconstruct()
            .unwrap()
    }

    #[test]
    fn full_masks_return_the_observations_in_one_iteration() {
        let m = random_tensor(5, 4, 3, 1);
        let mask = bernoulli_mask(5, 4, 3, 1.0, 2).unwrap();
        let (x, report) = complete_entrywise(&m, &mask, &SolverConfig::default()).unwrap();
        assert_eq!(x.data(), m.data());
        assert_eq!(report.iterations, 1);
        assert!(report.converged);
        assert_eq!(report.primal_residuals.len(), report.iterations);

        let tmask = tubal_mask(5, 4, 3, 1.0, 2).unwrap();
        let (x, report) = complete_tubal(&m, &tmask, &SolverConfig::default()).unwrap();
        assert!(rse(&x, &m).unwrap() < 1e-12);
        assert!(report.converged);
        assert_eq!(report.iterations, 1);
    }

    #[test]
    fn recovers_a_rank_two_tensor_from_half_the_entries() {
        let m = low_rank_tensor(30, 30, 20, 2, 7);
        let mask = bernoulli_mask(30, 30, 20, 0.5, 8).unwrap();
        let observed = p_omega(&m, &mask).unwrap();
        let (x, report) = complete_entrywise(&observed, &mask, &SolverConfig::default()).unwrap();
        assert!(report.converged, "solver did not converge");
        let err = rse(&x, &m).unwrap();
        assert!(err <= 1e-3, "recovery error {err} too large");
        assert!(report.observed_rse < 1e-6);
    }

    #[test]
    fn fails_in_the_undersampled_high_rank_regime() {
        let m = low_rank_tensor(30, 30, 20, 10, 11);
        // This probability leaves barely one sample per tube on average, far
        // below what rank 10 needs; the seed is chosen so the draw clears the
        // solver's minimum-budget gate.
        let mask = bernoulli_mask(30, 30, 20, 0.055, 12).unwrap();
        assert!(mask.observed_count() >= 900);
        let (x, _) = complete_entrywise(&m, &mask, &SolverConfig::default()).unwrap();
        let err = rse(&x, &m).unwrap();
        assert!(err > 0.1, "recovery unexpectedly succeeded with rse {err}");
    }

    #[test]
    fn output_matches_observations_exactly() {
        let m = low_rank_tensor(8, 8, 4, 2, 21);
        let mask = bernoulli_mask(8, 8, 4, 0.6, 22).unwrap();
        let observed = p_omega(&m, &mask).unwrap();
        let (x, _) = complete_entrywise(&observed, &mask, &SolverConfig::default()).unwrap();
        assert_eq!(
            p_omega(&x, &mask).unwrap().data(),
            observed.data(),
            "observed entries must be reproduced bit for bit"
        );
    }

    #[test]
    fn objective_trend_is_monotone_after_burn_in() {
        let m = low_rank_tensor(12, 12, 6, 2, 31);
        let mask = bernoulli_mask(12, 12, 6, 0.6, 32).unwrap();
        let observed = p_omega(&m, &mask).unwrap();
        let cfg = SolverConfig {
            max_iters: 150,
            tol_primal: 1e-14,
            tol_dual: 1e-14,
            ..SolverConfig::default()
        };
        let (_, report) = complete_entrywise(&observed, &mask, &cfg).unwrap();
        let trace = &report.objective_trace;
        assert!(trace.len() >= 130, "expected a long trace for the trend");
        // Windowed means after 10 burn-in iterations must not increase, up to
        // a small relative slack for ADMM oscillation.
        let window = 20;
        let means: Vec<f64> = trace[10..]
            .chunks_exact(window)
            .map(|w| w.iter().sum::<f64>() / window as f64)
            .collect();
        for pair in means.windows(2) {
            assert!(
                pair[1] <= pair[0] * (1.0 + 1e-3),
                "objective trend increased: {} -> {}",
                pair[0],
                pair[1]
            );
        }
    }

    #[test]
    fn admm_matches_a_projected_subgradient_reference() {
        // Tiny instance solved independently by projected subgradient
        // descent on the objective itself: step along a subgradient of the
        // nuclear norm, then restore the observed entries. Slow but
        // dependable, which makes it a trustworthy reference.
        let m = low_rank_tensor(4, 4, 2, 1, 41);
        let mask = bernoulli_mask(4, 4, 2, 0.7, 42).unwrap();
        let observed = p_omega(&m, &mask).unwrap();

        let mut y = observed.clone();
        let mut best = tnn(&y);
        let step0 = 0.05 * best.max(1.0);
        let iters = 120_000;
        for t in 0..iters {
            let grad = tnn_subgradient(&y);
            let gnorm = grad.frobenius().max(1e-12);
            let step = step0 / (gnorm * ((t + 1) as f64).sqrt());
            y = &y - &grad.scale(step);
            clamp_observed(&mut y, &observed, &mask);
            best = best.min(tnn(&y));
        }

        let cfg = SolverConfig {
            max_iters: 20_000,
            tol_primal: 1e-10,
            tol_dual: 1e-10,
            ..SolverConfig::default()
        };
        let (x, report) = complete_entrywise(&observed, &mask, &cfg).unwrap();
        assert!(report.converged);
        let admm_tnn = tnn(&x);
        let gap = (admm_tnn - best).abs() / best;
        assert!(
            gap <= 1e-4,
            "objective gap {gap} between ADMM ({admm_tnn}) and reference ({best})"
        );
    }

    /// A subgradient of the tensor nuclear norm at `y`: per transform
    /// slice, the product of the singular vectors of the nonzero spectrum,
    /// scaled by `n3` for the inner-product normalization.
    fn tnn_subgradient(y: &Tensor3) -> Tensor3 {
        let (n1, n2, n3) = y.dims();
        let f = fft3(y);
        let tol = crate::tsvd::default_rank_tol(n1, n2);
        let slices: Vec<DMatrix<Complex64>> = (0..unique_slices(n3))
            .map(|k| {
                let (u, s, v) = crate::tsvd::jacobi_svd(f.slice(k));
                let top = s.first().copied().unwrap_or(0.0);
                let mut g = DMatrix::<Complex64>::zeros(n1, n2);
                for (c, &sv) in s.iter().enumerate() {
                    if sv > tol * top {
                        g += u.column(c) * v.column(c).adjoint();
                    }
                }
                g
            })
            .collect();
        assemble_factor(&slices, n3)
            .unwrap()
            .scale(n3 as f64)
    }

    #[test]
    fn tubal_completion_equals_independent_slice_solves() {
        let m = low_rank_tensor(10, 8, 5, 2, 51);
        let mask = tubal_mask(10, 8, 5, 0.7, 52).unwrap();
        let observed = p_omega(&m, &mask).unwrap();
        let cfg = SolverConfig::default();
        let (joint, _) = complete_tubal(&observed, &mask, &cfg).unwrap();

        // Independent path: solve every slice separately (mirrors included,
        // no conjugate shortcut) and recombine.
        let rho = resolve_rho(&cfg, &observed, &mask);
        let f = fft3(&observed);
        let slices: Vec<DMatrix<Complex64>> = (0..5)
            .map(|k| complete_fourier_slice(f.slice(k), &mask, rho, &cfg).unwrap().0)
            .collect();
        let mut recombined = ifft3(&FourierTensor::from_slices(slices).unwrap()).unwrap();
        clamp_observed(&mut recombined, &observed, &mask);

        let diff = (&joint - &recombined).frobenius() / m.frobenius();
        assert!(diff <= 1e-9, "paths disagree by {diff}");

        // And the joint path is deterministic.
        let (again, _) = complete_tubal(&observed, &mask, &cfg).unwrap();
        assert_eq!(joint.data(), again.data());
    }

    #[test]
    fn tubal_completion_recovers_rank_two_from_sixty_percent_of_tubes() {
        let m = low_rank_tensor(30, 30, 20, 2, 61);
        let mask = tubal_mask(30, 30, 20, 0.6, 62).unwrap();
        let observed = p_omega(&m, &mask).unwrap();
        let (x, report) = complete_tubal(&observed, &mask, &SolverConfig::default()).unwrap();
        assert!(report.converged);
        let err = rse(&x, &m).unwrap();
        assert!(err <= 1e-3, "recovery error {err} too large");
        assert_eq!(report.slices.len(), 11);
    }

    #[test]
    fn rse_matches_hand_values() {
        let m = random_tensor(4, 3, 2, 71);
        assert_eq!(rse(&m, &m).unwrap(), 0.0);
        let zero = Tensor3::zeros(4, 3, 2);
        assert_relative_eq!(rse(&zero, &m).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            rse(&m.scale(1.01), &m).unwrap(),
            0.01,
            max_relative = 1e-10
        );
        assert!(matches!(rse(&m, &zero), Err(Error::ZeroReference)));
        let other = random_tensor(3, 3, 2, 72);
        assert!(matches!(rse(&other, &m), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let m = random_tensor(4, 4, 2, 81);
        let cfg = SolverConfig::default();

        // A probability this small observes nothing at these dimensions.
        let empty = bernoulli_mask(4, 4, 2, 1e-12, 82).unwrap();
        assert_eq!(empty.observed_count(), 0);
        assert!(matches!(
            complete_entrywise(&m, &empty, &cfg),
            Err(Error::EmptyMask)
        ));

        // Nonempty but below one sample per tube on average.
        let sparse = bernoulli_mask(4, 4, 2, 0.2, 83).unwrap();
        assert!(sparse.observed_count() > 0 && sparse.observed_count() < 16);
        assert!(matches!(
            complete_entrywise(&m, &sparse, &cfg),
            Err(Error::TooFewSamples { .. })
        ));

        let tmask = tubal_mask(4, 4, 2, 0.5, 84).unwrap();
        assert!(matches!(
            complete_entrywise(&m, &tmask, &cfg),
            Err(Error::WrongMaskKind { .. })
        ));
        let emask = bernoulli_mask(4, 4, 2, 0.5, 85).unwrap();
        assert!(matches!(
            complete_tubal(&m, &emask, &cfg),
            Err(Error::WrongMaskKind { .. })
        ));

        let wrong_dims = bernoulli_mask(3, 4, 2, 0.5, 86).unwrap();
        assert!(matches!(
            complete_entrywise(&m, &wrong_dims, &cfg),
            Err(Error::DimensionMismatch(_))
        ));

        for bad in [
            SolverConfig {
                rho: Some(0.0),
                ..SolverConfig::default()
            },
            SolverConfig {
                max_iters: 0,
                ..SolverConfig::default()
            },
            SolverConfig {
                tol_primal: 0.0,
                ..SolverConfig::default()
            },
        ] {
            assert!(matches!(
                complete_entrywise(&m, &emask, &bad),
                Err(Error::Config(_))
            ));
        }
    }
}
