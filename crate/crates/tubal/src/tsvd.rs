//! Tensor singular value decomposition under the tubal product.
//!
//! Every real `n1 x n2 x n3` tensor factors as
//!
//! ```text
//! M = U * S * t_transpose(V)
//! ```
//!
//! where `*` is the tubal product, `U` and `V` have orthonormal tensor
//! columns (`t_transpose(U) * U` is the identity tensor), and `S` is
//! f-diagonal: every frontal slice of `S` is a diagonal matrix, so `S` is a
//! diagonal stack of "singular tubes". The factorization is computed one
//! transform slice at a time: slice `k` of `fft3(M)` gets an ordinary complex
//! SVD, and the factors are transformed back.
//!
//! Implementation notes that matter for exactness:
//!
//! - Only slices `k = 0, ..., floor(n3 / 2)` are decomposed. The remaining
//!   slices are conjugate mirrors of those, which keeps the factor transforms
//!   exactly conjugate-symmetric and therefore the spatial factors exactly
//!   real. Decomposing mirrored slices independently would break this:
//!   singular vectors are only defined up to a unit phase, and two
//!   independent runs need not pick conjugate phases.
//! - Within each slice the singular triplets are sorted by non-increasing
//!   singular value, and each left singular vector is rotated so that its
//!   first nonzero coordinate is real and positive (the right vector is
//!   co-rotated). This canonical form makes repeated factorizations of the
//!   same tensor bitwise identical.
//! - [`t_svd`] returns square `U` (`n1 x n1 x n3`) and `V` (`n2 x n2 x n3`).
//!   The thin slice factors are completed to full unitary matrices by
//!   modified Gram-Schmidt over standard basis vectors, choosing the
//!   candidate with the largest residual first, which is deterministic.
//!
//! Rank notions derived from the factorization:
//!
//! ```text
//! multi rank   rank of each transform slice (vector of length n3)
//! tubal rank   max over slices of the multi rank
//! tnn          sum over slices of the slice nuclear norms
//! spectral     max over slices of the largest singular value
//! ```
//!
//! `tnn` and the spectral norm are dual to each other, and `tnn` relates to
//! the Frobenius norm by `tnn(M) >= sqrt(n3) * frobenius(M)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::{fft3, ifft3, t_product, t_transpose, FourierTensor, Tensor3};

/// Singular vectors with modulus below this have no meaningful phase and are
/// skipped when choosing the canonical rotation anchor.
const PHASE_ANCHOR_TOL: f64 = 1e-12;

/// Relative off-diagonal mass at which a column pair counts as orthogonal in
/// the Jacobi sweep. Comfortably below every tolerance in the crate while
/// saving a sweep or two over the machine-precision target.
const JACOBI_TOL: f64 = 1e-13;

/// Cyclic Jacobi converges quadratically; this cap only guards against
/// pathological non-termination.
const JACOBI_MAX_SWEEPS: usize = 60;

/// Thin SVD of a complex matrix by one-sided (Hestenes) Jacobi
/// orthogonalization: `a = u * diag(sigma) * v^H` with `u` of shape
/// `n1 x min`, `v` of shape `n2 x min`, and `sigma` sorted non-increasing.
///
/// One-sided Jacobi is used instead of a bidiagonalization SVD because it
/// stays accurate on rank-deficient input (singular values near zero keep
/// relatively accurate singular vectors, and exact zeros are handled
/// explicitly), it is deterministic, and conjugating the input conjugates
/// the output bitwise. Columns whose singular value is exactly zero get
/// orthonormal left vectors from the deterministic basis completion.
pub(crate) fn jacobi_svd(a: &DMatrix<Complex64>) -> (DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>) {
    jacobi_svd_with_state(a, &mut None)
}

/// [`jacobi_svd`] with an optional warm start. `state` carries the flat
/// column-major right factor from a previous decomposition of a nearby
/// matrix; starting from `w = a * v0` usually converges in one or two sweeps
/// instead of a full cold run, which is what iterative solvers calling this
/// once per iteration care about. On return the state holds this call's
/// right factor. Callers should drop the state periodically (every few dozen
/// iterations) so unitarity roundoff cannot accumulate across calls.
pub(crate) fn jacobi_svd_with_state(
    a: &DMatrix<Complex64>,
    state: &mut Option<Vec<Complex64>>,
) -> (DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>) {
    let (n1, n2) = (a.nrows(), a.ncols());
    if n1 < n2 {
        let (u, s, v) = jacobi_svd_with_state(&a.adjoint(), state);
        return (v, s, u);
    }
    let m = n2;
    // Column-contiguous working copies: column c of the data matrix lives at
    // w[c * n1 .. (c + 1) * n1], likewise for the accumulated right factor.
    let mut w: Vec<Complex64>;
    let mut v: Vec<Complex64>;
    match state {
        Some(v0) if v0.len() == m * m => {
            // Warm start: w = a * v0 keeps the defining invariant
            // a * v == w exact while starting near a fixed point.
            w = vec![Complex64::default(); n1 * m];
            for c in 0..m {
                let wc = &mut w[c * n1..(c + 1) * n1];
                for s_ in 0..m {
                    let coef = v0[c * m + s_];
                    if coef.re == 0.0 && coef.im == 0.0 {
                        continue;
                    }
                    let ac = a.column(s_);
                    for (t, x) in wc.iter_mut().enumerate() {
                        *x += ac[t] * coef;
                    }
                }
            }
            v = v0.clone();
        }
        _ => {
            w = Vec::with_capacity(n1 * m);
            for c in 0..m {
                w.extend(a.column(c).iter().copied());
            }
            v = vec![Complex64::default(); m * m];
            for c in 0..m {
                v[c * m + c] = Complex64::new(1.0, 0.0);
            }
        }
    }

    // Column energies drive the skip tests. They are refreshed exactly at
    // the top of every sweep and updated incrementally inside it (the
    // annihilating rotation moves exactly t * |g| of energy across a pair);
    // the returned singular values are always recomputed exactly.
    let col_energy = |w: &[Complex64], c: usize| -> f64 {
        w[c * n1..(c + 1) * n1].iter().map(|z| z.norm_sqr()).sum()
    };
    let mut col_sq: Vec<f64> = (0..m).map(|c| col_energy(&w, c)).collect();
    // Columns whose energy falls below this are numerically zero: they are
    // frozen during sweeps and reported as exact zeros, with their left
    // vectors supplied by the basis completion. This keeps rank-deficient
    // input from wasting sweeps orthogonalizing roundoff noise.
    let tiny_sq = col_sq.iter().fold(0.0f64, |a, &b| a.max(b))
        * (f64::EPSILON * f64::EPSILON * n1 as f64);
    for sweep in 0..JACOBI_MAX_SWEEPS {
        if sweep > 0 {
            for c in 0..m {
                col_sq[c] = col_energy(&w, c);
            }
        }
        let mut rotated = false;
        for p in 0..m.saturating_sub(1) {
            for q in (p + 1)..m {
                let alpha = col_sq[p];
                let beta = col_sq[q];
                if alpha <= tiny_sq || beta <= tiny_sq {
                    continue;
                }
                let g = {
                    let cp = &w[p * n1..(p + 1) * n1];
                    let cq = &w[q * n1..(q + 1) * n1];
                    let mut gre = 0.0;
                    let mut gim = 0.0;
                    for (x, y) in cp.iter().zip(cq) {
                        gre += x.re * y.re + x.im * y.im;
                        gim += x.re * y.im - x.im * y.re;
                    }
                    Complex64::new(gre, gim)
                };
                let gn = g.norm();
                if gn <= JACOBI_TOL * (alpha * beta).sqrt() || gn == 0.0 {
                    continue;
                }
                rotated = true;
                // Rotate column q by the Gram phase so the pair Gram matrix
                // becomes real symmetric [[alpha, gn], [gn, beta]], then
                // apply the classical 2x2 rotation that diagonalizes it.
                let phase = (g / gn).conj();
                let tau = (beta - alpha) / (2.0 * gn);
                let t_ = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c_ = 1.0 / (1.0 + t_ * t_).sqrt();
                let s_ = c_ * t_;
                rotate_pair(&mut w, n1, p, q, c_, s_, phase);
                rotate_pair(&mut v, m, p, q, c_, s_, phase);
                col_sq[p] = (alpha - t_ * gn).max(0.0);
                col_sq[q] = beta + t_ * gn;
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..m)
        .map(|c| {
            let e = col_energy(&w, c);
            if e <= tiny_sq {
                0.0
            } else {
                e.sqrt()
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| {
        norms[y]
            .partial_cmp(&norms[x])
            .expect("column norms are finite")
            .then(x.cmp(&y))
    });

    let mut u = DMatrix::zeros(n1, m);
    let mut v_sorted = DMatrix::zeros(m, m);
    let mut sigma = Vec::with_capacity(m);
    let mut zero_from = m;
    for (dst, &src) in order.iter().enumerate() {
        let norm = norms[src];
        sigma.push(norm);
        for t in 0..m {
            v_sorted[(t, dst)] = v[src * m + t];
        }
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for t in 0..n1 {
                u[(t, dst)] = w[src * n1 + t] * inv;
            }
        } else {
            zero_from = zero_from.min(dst);
        }
    }
    if zero_from < m {
        // Exactly-zero singular values carry no direction; fill their left
        // vectors from the deterministic orthonormal completion.
        let base = u.columns(0, zero_from).into_owned();
        let full = complete_unitary(&base);
        for dst in zero_from..m {
            u.set_column(dst, &full.column(dst));
        }
    }
    let mut flat = vec![Complex64::default(); m * m];
    for c in 0..m {
        for t in 0..m {
            flat[c * m + t] = v_sorted[(t, c)];
        }
    }
    *state = Some(flat);
    (u, sigma, v_sorted)
}

/// Applies the phase-aligned plane rotation to columns `p < q` of a
/// column-contiguous buffer with column height `n`.
#[inline]
fn rotate_pair(data: &mut [Complex64], n: usize, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    let (head, tail) = data.split_at_mut(q * n);
    let cp = &mut head[p * n..(p + 1) * n];
    let cq = &mut tail[..n];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let wp = *x;
        let wq = Complex64::new(
            y.re * phase.re - y.im * phase.im,
            y.re * phase.im + y.im * phase.re,
        );
        x.re = wp.re * c - wq.re * s;
        x.im = wp.im * c - wq.im * s;
        y.re = wp.re * s + wq.re * c;
        y.im = wp.im * s + wq.im * c;
    }
}

/// Orthogonal factors and singular tubes of a tensor.
#[derive(Debug, Clone)]
pub struct TsvdFactors {
    /// Left factor with orthonormal tensor columns.
    pub u: Tensor3,
    /// F-diagonal tensor of singular tubes, non-increasing along the
    /// diagonal in every transform slice.
    pub s: Tensor3,
    /// Right factor with orthonormal tensor columns.
    pub v: Tensor3,
    /// Tubal rank of the represented tensor, measured at the default
    /// tolerance of [`default_rank_tol`].
    pub r: usize,
}

impl TsvdFactors {
    /// Multiplies the factors back together: `U * S * t_transpose(V)`.
    pub fn reconstruct(&self) -> Result<Tensor3> {
        t_product(&t_product(&self.u, &self.s)?, &t_transpose(&self.v))
    }

    /// Width of the factors: the number of tensor columns kept in `U`/`V`.
    /// Equals `r` unless the factorization was truncated below the rank.
    pub fn width(&self) -> usize {
        self.u.n2()
    }
}

/// Default relative rank tolerance: singular values at or below
/// `max(n1, n2) * eps` times the largest singular value of their slice are
/// treated as zero.
pub fn default_rank_tol(n1: usize, n2: usize) -> f64 {
    n1.max(n2) as f64 * f64::EPSILON
}

struct SliceSvd {
    u: DMatrix<Complex64>,
    s: Vec<f64>,
    v: DMatrix<Complex64>,
}

/// Thin SVD of one transform slice, with triplets sorted by non-increasing
/// singular value and phases canonicalized as described at module level.
///
/// The slice index `k` only labels the error if a non-finite value slips in.
fn svd_slice(a: &DMatrix<Complex64>, k: usize) -> Result<SliceSvd> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SvdFailure(k));
    }
    let (mut u, s, mut v) = jacobi_svd(a);
    for c in 0..s.len() {
        let rot = u
            .column(c)
            .iter()
            .find(|z| z.norm() > PHASE_ANCHOR_TOL)
            .map(|z| (z / z.norm()).conj())
            .unwrap_or_else(|| Complex64::new(1.0, 0.0));
        for t in 0..u.nrows() {
            u[(t, c)] *= rot;
        }
        for t in 0..v.nrows() {
            v[(t, c)] *= rot;
        }
    }
    Ok(SliceSvd { u, s, v })
}

/// Extends a matrix with orthonormal columns to a square unitary matrix by
/// modified Gram-Schmidt over standard basis vectors, appending at each step
/// the candidate with the largest orthogonal residual (ties broken by lowest
/// index). Returns the input unchanged when it is already square.
fn complete_unitary(q: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = q.nrows();
    let m = q.ncols();
    if m >= n {
        return q.clone();
    }
    let mut full = DMatrix::zeros(n, n);
    full.view_mut((0, 0), (n, m)).copy_from(q);
    let mut have = m;
    let mut used = vec![false; n];
    while have < n {
        let mut best: Option<(usize, f64, DVector<Complex64>)> = None;
        for c in 0..n {
            if used[c] {
                continue;
            }
            let mut cand = DVector::zeros(n);
            cand[c] = Complex64::new(1.0, 0.0);
            // Two orthogonalization passes keep the completion orthonormal
            // even when the candidate is nearly inside the current span.
            for _ in 0..2 {
                for b in 0..have {
                    let col = full.column(b);
                    let coef = col.dotc(&cand);
                    cand.iter_mut()
                        .zip(col.iter())
                        .for_each(|(x, y)| *x -= coef * y);
                }
            }
            let norm = cand.norm();
            if best.as_ref().is_none_or(|(_, bn, _)| norm > *bn) {
                best = Some((c, norm, cand));
            }
        }
        let (c, norm, cand) = best.expect("unused candidates remain");
        used[c] = true;
        full.set_column(have, &cand.unscale(norm));
        have += 1;
    }
    full
}

/// Number of transform slices that must be decomposed explicitly; the rest
/// are conjugate mirrors.
pub(crate) fn unique_slices(n3: usize) -> usize {
    n3 / 2 + 1
}

/// Expands quantities computed on unique slices `0..=n3/2` to all `n3`
/// slices, mirroring slice `k` into slice `n3 - k`.
fn mirror_index(k: usize, n3: usize) -> usize {
    if k <= n3 / 2 {
        k
    } else {
        n3 - k
    }
}

fn measured_rank(s: &[f64], tol: f64) -> usize {
    let top = s.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol * top).count()
}

pub(crate) fn assemble_factor(
    unique: &[DMatrix<Complex64>],
    n3: usize,
) -> Result<Tensor3> {
    let slices: Vec<DMatrix<Complex64>> = (0..n3)
        .map(|k| {
            let src = &unique[mirror_index(k, n3)];
            if k <= n3 / 2 {
                src.clone()
            } else {
                src.map(|z| z.conj())
            }
        })
        .collect();
    ifft3(&FourierTensor::from_slices(slices)?)
}

/// Full tensor SVD: returns square orthogonal `U` (`n1 x n1 x n3`) and `V`
/// (`n2 x n2 x n3`) with an `n1 x n2 x n3` f-diagonal `S` such that
/// `U * S * t_transpose(V)` reconstructs the input to near machine
/// precision.
pub fn t_svd(m: &Tensor3) -> Result<TsvdFactors> {
    let (n1, n2, n3) = m.dims();
    let mut f = fft3(m);
    f.strip_self_conjugate_imag();
    let tol = default_rank_tol(n1, n2);
    let parts: Vec<Result<(DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>)>> = (0..unique_slices(n3))
        .into_par_iter()
        .map(|k| {
            let SliceSvd { u, s, v } = svd_slice(f.slice(k), k)?;
            Ok((complete_unitary(&u), s, complete_unitary(&v)))
        })
        .collect();

    let mut u_slices = Vec::with_capacity(unique_slices(n3));
    let mut v_slices = Vec::with_capacity(unique_slices(n3));
    let mut s_slices = Vec::with_capacity(unique_slices(n3));
    let mut rank = 0usize;
    for part in parts {
        let (u, s, v) = part?;
        rank = rank.max(measured_rank(&s, tol));
        let mut sm = DMatrix::zeros(n1, n2);
        for (d, &sv) in s.iter().enumerate() {
            sm[(d, d)] = Complex64::new(sv, 0.0);
        }
        u_slices.push(u);
        s_slices.push(sm);
        v_slices.push(v);
    }

    Ok(TsvdFactors {
        u: assemble_factor(&u_slices, n3)?,
        s: assemble_factor(&s_slices, n3)?,
        v: assemble_factor(&v_slices, n3)?,
        r: rank,
    })
}

/// Truncated tensor SVD keeping the `r` leading singular triplets of every
/// transform slice: `U` is `n1 x r x n3`, `S` is `r x r x n3`, `V` is
/// `n2 x r x n3`. Requires `1 <= r <= min(n1, n2)`.
///
/// The reconstruction `U * S * t_transpose(V)` is the best tubal-rank-`r`
/// approximation of the input in the Frobenius norm, and equals the input
/// exactly when the input already has tubal rank at most `r`.
pub fn t_svd_reduced(m: &Tensor3, r: usize) -> Result<TsvdFactors> {
    let (n1, n2, n3) = m.dims();
    let max = n1.min(n2);
    if r == 0 || r > max {
        return Err(Error::InvalidRank { got: r, max });
    }
    let mut f = fft3(m);
    f.strip_self_conjugate_imag();
    let tol = default_rank_tol(n1, n2);
    let parts: Vec<Result<SliceSvd>> = (0..unique_slices(n3))
        .into_par_iter()
        .map(|k| svd_slice(f.slice(k), k))
        .collect();

    let mut u_slices = Vec::with_capacity(unique_slices(n3));
    let mut v_slices = Vec::with_capacity(unique_slices(n3));
    let mut s_slices = Vec::with_capacity(unique_slices(n3));
    let mut rank = 0usize;
    for part in parts {
        let SliceSvd { u, s, v } = part?;
        rank = rank.max(measured_rank(&s[..r], tol));
        let mut sm = DMatrix::zeros(r, r);
        for d in 0..r {
            sm[(d, d)] = Complex64::new(s[d], 0.0);
        }
        u_slices.push(u.columns(0, r).into_owned());
        s_slices.push(sm);
        v_slices.push(v.columns(0, r).into_owned());
    }

    Ok(TsvdFactors {
        u: assemble_factor(&u_slices, n3)?,
        s: assemble_factor(&s_slices, n3)?,
        v: assemble_factor(&v_slices, n3)?,
        r: rank,
    })
}

fn singular_values_per_unique_slice(m: &Tensor3) -> Vec<Vec<f64>> {
    let mut f = fft3(m);
    f.strip_self_conjugate_imag();
    (0..unique_slices(m.n3()))
        .into_par_iter()
        .map(|k| jacobi_svd(f.slice(k)).1)
        .collect()
}

/// Rank of every transform slice. Singular values at or below
/// `tol * sigma_max(slice)` count as zero; `None` uses
/// [`default_rank_tol`].
pub fn multi_rank(m: &Tensor3, tol: Option<f64>) -> Vec<usize> {
    let tol = tol.unwrap_or_else(|| default_rank_tol(m.n1(), m.n2()));
    let per_unique: Vec<usize> = singular_values_per_unique_slice(m)
        .iter()
        .map(|s| measured_rank(s, tol))
        .collect();
    (0..m.n3())
        .map(|k| per_unique[mirror_index(k, m.n3())])
        .collect()
}

/// Largest slice rank: the tubal rank. See [`multi_rank`] for `tol`.
pub fn tubal_rank(m: &Tensor3, tol: Option<f64>) -> usize {
    multi_rank(m, tol).into_iter().max().unwrap_or(0)
}

/// Tensor nuclear norm: the sum over all transform slices of their matrix
/// nuclear norms. Dual to [`spectral_norm`]; satisfies
/// `tnn(M) >= sqrt(n3) * frobenius(M)`.
pub fn tnn(m: &Tensor3) -> f64 {
    let n3 = m.n3();
    singular_values_per_unique_slice(m)
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let weight = slice_weight(k, n3);
            weight * s.iter().sum::<f64>()
        })
        .sum()
}

/// Tensor spectral norm: the largest singular value over all transform
/// slices.
pub fn spectral_norm(m: &Tensor3) -> f64 {
    singular_values_per_unique_slice(m)
        .iter()
        .map(|s| s.first().copied().unwrap_or(0.0))
        .fold(0.0, f64::max)
}

/// How many of the `n3` slices a unique slice index stands for.
pub(crate) fn slice_weight(k: usize, n3: usize) -> f64 {
    if k == 0 || (n3 % 2 == 0 && k == n3 / 2) {
        1.0
    } else {
        2.0
    }
}

/// Tubal singular value thresholding: shrinks every singular value of every
/// transform slice by `tau`, clamping at zero. This is the proximal operator
/// of the scaled nuclear norm: the unique minimizer of
///
/// ```text
/// (tau / n3) * tnn(X) + (1/2) * frobenius(X - M)^2
/// ```
///
/// `tau = 0` returns the input unchanged (exactly), and any
/// `tau >= spectral_norm(M)` returns the zero tensor (exactly).
pub fn t_svt(m: &Tensor3, tau: f64) -> Result<Tensor3> {
    Ok(t_svt_with_tnn(m, tau)?.0)
}

/// [`t_svt`] plus the nuclear norm of the shrunk result, which falls out of
/// the slice decompositions for free.
pub(crate) fn t_svt_with_tnn(m: &Tensor3, tau: f64) -> Result<(Tensor3, f64)> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::Config(format!(
            "shrinkage threshold must be finite and nonnegative, got {tau}"
        )));
    }
    if tau == 0.0 {
        return Ok((m.clone(), tnn(m)));
    }
    let n3 = m.n3();
    let mut f = fft3(m);
    f.strip_self_conjugate_imag();
    let parts: Vec<Result<(DMatrix<Complex64>, f64)>> = (0..unique_slices(n3))
        .into_par_iter()
        .map(|k| shrink_slice(f.slice(k), tau, k, &mut None))
        .collect();

    let mut slices = Vec::with_capacity(unique_slices(n3));
    let mut shrunk_tnn = 0.0;
    for (k, part) in parts.into_iter().enumerate() {
        let (slice, nuclear) = part?;
        shrunk_tnn += slice_weight(k, n3) * nuclear;
        slices.push(slice);
    }
    Ok((assemble_factor(&slices, n3)?, shrunk_tnn))
}

/// Singular value shrinkage of one transform slice: every singular value is
/// reduced by `tau` and clamped at zero, and the slice is rebuilt from the
/// surviving directions. Returns the shrunk slice together with the nuclear
/// norm of its new spectrum. `k` only labels the slice in errors; `state`
/// optionally warm-starts the decomposition (see [`jacobi_svd_with_state`]).
pub(crate) fn shrink_slice(
    a: &DMatrix<Complex64>,
    tau: f64,
    k: usize,
    state: &mut Option<Vec<Complex64>>,
) -> Result<(DMatrix<Complex64>, f64)> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SvdFailure(k));
    }
    let (n1, n2) = (a.nrows(), a.ncols());
    let (u, s, v) = jacobi_svd_with_state(a, state);
    let kept: Vec<(usize, f64)> = s
        .iter()
        .enumerate()
        .filter_map(|(c, &sv)| {
            let shrunk = sv - tau;
            (shrunk > 0.0).then_some((c, shrunk))
        })
        .collect();
    if kept.is_empty() {
        return Ok((DMatrix::zeros(n1, n2), 0.0));
    }
    let mut scaled = DMatrix::zeros(n1, kept.len());
    let mut vk = DMatrix::zeros(n2, kept.len());
    let mut nuclear = 0.0;
    for (dst, &(c, shrunk)) in kept.iter().enumerate() {
        nuclear += shrunk;
        for t in 0..n1 {
            scaled[(t, dst)] = u[(t, c)] * shrunk;
        }
        for t in 0..n2 {
            vk[(t, dst)] = v[(t, c)];
        }
    }
    Ok((&scaled * vk.adjoint(), nuclear))
}
