//! Dense third-order tensors and the tubal product.
//!
//! A tensor `A` of shape `n1 x n2 x n3` is stored as `n3` frontal slices of
//! shape `n1 x n2`, each row-major, with slice `k` starting at offset
//! `k * n1 * n2`:
//!
//! ```text
//! A(i, j, k) = data[k * n1 * n2 + i * n2 + j]
//! ```
//!
//! The tubal product `A * B` of shapes `n1 x n2 x n3` and `n2 x n4 x n3`
//! treats every mode-3 fiber (a "tube") as an element of the ring of length
//! `n3` sequences under circular convolution, and multiplies the two tensors
//! like matrices over that ring. The unnormalized discrete Fourier transform
//! along tubes diagonalizes circular convolution, so the product reduces to
//! one complex matrix product per transform slice:
//!
//! ```text
//! fft3:   Ahat(i, j, k) = sum_t A(i, j, t) exp(-2 pi sqrt(-1) k t / n3)
//! ifft3:  inverse of fft3, scaled by 1 / n3
//! (A * B)hat_k = Ahat_k Bhat_k          for k = 0, ..., n3 - 1
//! ```
//!
//! Under this convention `A.frobenius() == Ahat.frobenius() / sqrt(n3)`.
//! Transforms of real tensors are conjugate-symmetric, slice `k` pairing with
//! slice `n3 - k`; every routine that returns to the real domain checks that
//! the imaginary residue is below [`IM_TOL`] (`1e-10`) relative to the result
//! magnitude and reports [`Error::ImaginaryResidue`] otherwise, rather than
//! silently discarding a large imaginary part.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Relative imaginary mass tolerated when casting transform output back to
/// the reals. Anything above it is treated as evidence of a broken
/// conjugate-symmetry invariant and reported as an error.
pub const IM_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Tensor3
// ---------------------------------------------------------------------------

/// A dense real tensor of order three.
///
/// All constructors reject empty dimensions and non-finite entries, so a
/// `Tensor3` always holds finite data.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n1: usize,
    n2: usize,
    n3: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    /// Wraps a data vector laid out as documented at module level.
    pub fn new(n1: usize, n2: usize, n3: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(n1, n2, n3)?;
        if data.len() != n1 * n2 * n3 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {}x{}x{} tensor, got {}",
                n1 * n2 * n3,
                n1,
                n2,
                n3,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { n1, n2, n3, data })
    }

    /// The all-zero tensor.
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Self {
        check_dims(n1, n2, n3).expect("tensor dimensions must be positive");
        Self {
            n1,
            n2,
            n3,
            data: vec![0.0; n1 * n2 * n3],
        }
    }

    /// Builds a tensor entry by entry.
    ///
    /// Panics if `f` produces a non-finite value; use [`Tensor3::new`] when
    /// the data comes from an untrusted source.
    pub fn from_fn(n1: usize, n2: usize, n3: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        check_dims(n1, n2, n3).expect("tensor dimensions must be positive");
        let mut data = Vec::with_capacity(n1 * n2 * n3);
        for k in 0..n3 {
            for i in 0..n1 {
                for j in 0..n2 {
                    let v = f(i, j, k);
                    assert!(v.is_finite(), "from_fn produced a non-finite entry at ({i}, {j}, {k})");
                    data.push(v);
                }
            }
        }
        Self { n1, n2, n3, data }
    }

    /// Shape as `(n1, n2, n3)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    /// Rows per frontal slice.
    pub fn n1(&self) -> usize {
        self.n1
    }

    /// Columns per frontal slice.
    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Number of frontal slices (tube length).
    pub fn n3(&self) -> usize {
        self.n3
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.n1 && j < self.n2 && k < self.n3);
        k * self.n1 * self.n2 + i * self.n2 + j
    }

    /// Entry accessor; panics on out-of-range indices.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        assert!(
            i < self.n1 && j < self.n2 && k < self.n3,
            "index ({i}, {j}, {k}) out of range for {}x{}x{}",
            self.n1,
            self.n2,
            self.n3
        );
        self.data[self.offset(i, j, k)]
    }

    /// Entry mutator; panics on out-of-range indices.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        assert!(
            i < self.n1 && j < self.n2 && k < self.n3,
            "index ({i}, {j}, {k}) out of range for {}x{}x{}",
            self.n1,
            self.n2,
            self.n3
        );
        let at = self.offset(i, j, k);
        self.data[at] = value;
    }

    /// Raw storage in the documented layout.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Square root of the sum of squared entries.
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn infinity(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Entrywise scaling by a constant.
    pub fn scale(&self, c: f64) -> Tensor3 {
        assert!(c.is_finite(), "scale factor must be finite");
        Tensor3 {
            n1: self.n1,
            n2: self.n2,
            n3: self.n3,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// True when `other` has the same shape.
    pub fn same_dims(&self, other: &Tensor3) -> bool {
        self.dims() == other.dims()
    }
}

impl fmt::Display for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor3({}x{}x{})", self.n1, self.n2, self.n3)
    }
}

pub(crate) fn check_dims(n1: usize, n2: usize, n3: usize) -> Result<()> {
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(Error::DimensionMismatch(format!(
            "dimensions must be positive, got {n1}x{n2}x{n3}"
        )));
    }
    Ok(())
}

fn assert_same_dims(a: &Tensor3, b: &Tensor3, op: &str) {
    assert!(
        a.same_dims(b),
        "{op}: shape {}x{}x{} does not match {}x{}x{}",
        a.n1,
        a.n2,
        a.n3,
        b.n1,
        b.n2,
        b.n3
    );
}

impl Add for &Tensor3 {
    type Output = Tensor3;

    fn add(self, rhs: &Tensor3) -> Tensor3 {
        assert_same_dims(self, rhs, "add");
        Tensor3 {
            n1: self.n1,
            n2: self.n2,
            n3: self.n3,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Tensor3 {
    type Output = Tensor3;

    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        assert_same_dims(self, rhs, "sub");
        Tensor3 {
            n1: self.n1,
            n2: self.n2,
            n3: self.n3,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Tensor3 {
    type Output = Tensor3;

    fn neg(self) -> Tensor3 {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Tensor3 {
    type Output = Tensor3;

    fn mul(self, rhs: f64) -> Tensor3 {
        self.scale(rhs)
    }
}

// ---------------------------------------------------------------------------
// Tensor columns and tubes
// ---------------------------------------------------------------------------

/// An `n1 x 1 x n3` tensor stored as `data[k * n1 + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorColumn {
    n1: usize,
    n3: usize,
    data: Vec<f64>,
}

impl TensorColumn {
    /// Wraps column data; same validation rules as [`Tensor3::new`].
    pub fn new(n1: usize, n3: usize, data: Vec<f64>) -> Result<Self> {
        let t = Tensor3::new(n1, 1, n3, data)?;
        Ok(Self {
            n1,
            n3,
            data: t.data,
        })
    }

    /// Reinterprets an `n1 x 1 x n3` tensor as a column.
    pub fn from_tensor(t: &Tensor3) -> Result<Self> {
        if t.n2 != 1 {
            return Err(Error::DimensionMismatch(format!(
                "a tensor column must have middle dimension 1, got {}",
                t.n2
            )));
        }
        Ok(Self {
            n1: t.n1,
            n3: t.n3,
            data: t.data.clone(),
        })
    }

    /// The column as a full `n1 x 1 x n3` tensor.
    pub fn to_tensor(&self) -> Tensor3 {
        Tensor3 {
            n1: self.n1,
            n2: 1,
            n3: self.n3,
            data: self.data.clone(),
        }
    }

    /// Shape as `(n1, n3)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.n1, self.n3)
    }

    /// Entry `x(i, 0, k)`.
    pub fn get(&self, i: usize, k: usize) -> f64 {
        assert!(i < self.n1 && k < self.n3, "column index out of range");
        self.data[k * self.n1 + i]
    }

    /// Column energy norm: the square root of the sum of squares of every
    /// entry in the column (all rows, all tubes).
    pub fn l2star(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// A `1 x 1 x n3` tensor: a single tube.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorTube {
    data: Vec<f64>,
}

impl TensorTube {
    /// Wraps tube data; rejects empty or non-finite input.
    pub fn new(data: Vec<f64>) -> Result<Self> {
        let t = Tensor3::new(1, 1, data.len().max(1), data)?;
        Ok(Self { data: t.data })
    }

    /// Reinterprets a `1 x 1 x n3` tensor as a tube.
    pub fn from_tensor(t: &Tensor3) -> Result<Self> {
        if t.n1 != 1 || t.n2 != 1 {
            return Err(Error::DimensionMismatch(format!(
                "a tube must be 1x1xn3, got {}x{}x{}",
                t.n1, t.n2, t.n3
            )));
        }
        Ok(Self {
            data: t.data.clone(),
        })
    }

    /// The tube as a full `1 x 1 x n3` tensor.
    pub fn to_tensor(&self) -> Tensor3 {
        Tensor3 {
            n1: 1,
            n2: 1,
            n3: self.data.len(),
            data: self.data.clone(),
        }
    }

    /// Tube length `n3`.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// Always false: constructors reject empty tubes.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Tube entries in mode-3 order.
    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// The `i`-th standard tensor column: entry `(i, 0, 0)` is one, all else zero.
pub fn column_basis(i: usize, n1: usize, n3: usize) -> Result<TensorColumn> {
    check_dims(n1, 1, n3)?;
    if i >= n1 {
        return Err(Error::IndexOutOfRange(format!(
            "column basis index {i} out of range for n1 = {n1}"
        )));
    }
    let mut data = vec![0.0; n1 * n3];
    data[i] = 1.0;
    Ok(TensorColumn { n1, n3, data })
}

/// The `k`-th standard tube: entry `(0, 0, k)` is one, all else zero.
pub fn tube_basis(k: usize, n3: usize) -> Result<TensorTube> {
    check_dims(1, 1, n3)?;
    if k >= n3 {
        return Err(Error::IndexOutOfRange(format!(
            "tube basis index {k} out of range for n3 = {n3}"
        )));
    }
    let mut data = vec![0.0; n3];
    data[k] = 1.0;
    Ok(TensorTube { data })
}

/// The standard unit tensor with a single one at `(i, j, k)`.
pub fn unit_tensor(i: usize, j: usize, k: usize, n1: usize, n2: usize, n3: usize) -> Result<Tensor3> {
    check_dims(n1, n2, n3)?;
    if i >= n1 || j >= n2 || k >= n3 {
        return Err(Error::IndexOutOfRange(format!(
            "unit tensor index ({i}, {j}, {k}) out of range for {n1}x{n2}x{n3}"
        )));
    }
    let mut t = Tensor3::zeros(n1, n2, n3);
    t.set(i, j, k, 1.0);
    Ok(t)
}

// ---------------------------------------------------------------------------
// Fourier-domain representation
// ---------------------------------------------------------------------------

/// A tensor carried in the transform domain: one complex `n1 x n2` matrix per
/// frontal slice, produced by [`fft3`].
#[derive(Debug, Clone)]
pub struct FourierTensor {
    n1: usize,
    n2: usize,
    n3: usize,
    slices: Vec<DMatrix<Complex64>>,
}

impl FourierTensor {
    /// Assembles a transform-domain tensor from explicit slices.
    ///
    /// The caller is responsible for conjugate symmetry if the tensor is
    /// meant to be real; [`ifft3`] verifies it on the way back.
    pub fn from_slices(slices: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let n3 = slices.len();
        if n3 == 0 {
            return Err(Error::DimensionMismatch("no slices supplied".into()));
        }
        let (n1, n2) = (slices[0].nrows(), slices[0].ncols());
        check_dims(n1, n2, n3)?;
        for (k, s) in slices.iter().enumerate() {
            if s.nrows() != n1 || s.ncols() != n2 {
                return Err(Error::DimensionMismatch(format!(
                    "slice {k} is {}x{}, expected {n1}x{n2}",
                    s.nrows(),
                    s.ncols()
                )));
            }
        }
        Ok(Self { n1, n2, n3, slices })
    }

    /// Shape as `(n1, n2, n3)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    /// Slice `k` of the transform.
    pub fn slice(&self, k: usize) -> &DMatrix<Complex64> {
        &self.slices[k]
    }

    /// All slices in order.
    pub fn slices(&self) -> &[DMatrix<Complex64>] {
        &self.slices
    }

    #[cfg(test)]
    pub(crate) fn slices_mut(&mut self) -> &mut [DMatrix<Complex64>] {
        &mut self.slices
    }

    /// Zeroes the imaginary parts of the self-conjugate slices (index 0
    /// and, for even `n3`, index `n3 / 2`). For the transform of a real
    /// tensor those slices are real in exact arithmetic, so what this drops
    /// is forward-transform roundoff. Decompositions that normalize
    /// near-zero directions to unit length must start from exactly real
    /// slices there: normalization would otherwise blow that roundoff up
    /// into order-one complex factors, and the assembled factor tensors
    /// would fail the conjugate-symmetry check in [`ifft3`].
    pub(crate) fn strip_self_conjugate_imag(&mut self) {
        let n3 = self.n3;
        let mut fix = |k: usize| {
            for z in self.slices[k].iter_mut() {
                z.im = 0.0;
            }
        };
        fix(0);
        if n3 % 2 == 0 && n3 > 1 {
            fix(n3 / 2);
        }
    }

    /// Slice-wise matrix product; this is the transform-domain image of the
    /// tubal product.
    pub fn mul(&self, rhs: &FourierTensor) -> Result<FourierTensor> {
        if self.n2 != rhs.n1 || self.n3 != rhs.n3 {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{}x{} by {}x{}x{}",
                self.n1, self.n2, self.n3, rhs.n1, rhs.n2, rhs.n3
            )));
        }
        let slices = self
            .slices
            .iter()
            .zip(&rhs.slices)
            .map(|(a, b)| a * b)
            .collect();
        Ok(FourierTensor {
            n1: self.n1,
            n2: rhs.n2,
            n3: self.n3,
            slices,
        })
    }

    /// Square root of the summed squared moduli over all slices. For the
    /// transform of a real tensor `A` this equals `sqrt(n3) * A.frobenius()`.
    pub fn frobenius(&self) -> f64 {
        self.slices
            .iter()
            .map(|s| s.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest deviation from conjugate symmetry, `max_k || slice(k) -
    /// conj(slice(n3 - k)) ||_F`. Zero (up to roundoff) for transforms of
    /// real tensors.
    pub fn conj_symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..self.n3 {
            let mirror = (self.n3 - k) % self.n3;
            let mut acc = 0.0;
            for (a, b) in self.slices[k].iter().zip(self.slices[mirror].iter()) {
                let d = *a - b.conj();
                acc += d.norm_sqr();
            }
            worst = worst.max(acc.sqrt());
        }
        worst
    }

    /// Returns to the real domain via [`ifft3`].
    pub fn to_tensor(&self) -> Result<Tensor3> {
        ifft3(self)
    }
}

// ---------------------------------------------------------------------------
// FFT plumbing
// ---------------------------------------------------------------------------

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn fft_plans(n: usize) -> PlanPair {
    static PLANS: OnceLock<Mutex<HashMap<usize, PlanPair>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().expect("fft plan cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Unnormalized forward transform along every tube.
pub fn fft3(a: &Tensor3) -> FourierTensor {
    let (n1, n2, n3) = a.dims();
    let (forward, _) = fft_plans(n3);
    // Gather tubes contiguously so one batched call transforms all of them.
    let mut buf = vec![Complex64::default(); n1 * n2 * n3];
    for k in 0..n3 {
        let base = k * n1 * n2;
        for i in 0..n1 {
            for j in 0..n2 {
                buf[(i * n2 + j) * n3 + k] = Complex64::new(a.data[base + i * n2 + j], 0.0);
            }
        }
    }
    forward.process(&mut buf);
    let slices = (0..n3)
        .map(|k| DMatrix::from_fn(n1, n2, |i, j| buf[(i * n2 + j) * n3 + k]))
        .collect();
    FourierTensor { n1, n2, n3, slices }
}

/// Inverse transform along every tube, scaled by `1 / n3`, with a check that
/// the result is real to within [`IM_TOL`].
pub fn ifft3(f: &FourierTensor) -> Result<Tensor3> {
    let (n1, n2, n3) = f.dims();
    let (_, inverse) = fft_plans(n3);
    let mut buf = vec![Complex64::default(); n1 * n2 * n3];
    for k in 0..n3 {
        let s = &f.slices[k];
        for i in 0..n1 {
            for j in 0..n2 {
                buf[(i * n2 + j) * n3 + k] = s[(i, j)];
            }
        }
    }
    inverse.process(&mut buf);
    let scale = 1.0 / n3 as f64;
    let mut re_sq = 0.0;
    let mut im_sq = 0.0;
    for z in &buf {
        re_sq += z.re * z.re;
        im_sq += z.im * z.im;
    }
    let total = (re_sq + im_sq).sqrt() * scale;
    let residue = im_sq.sqrt() * scale;
    if residue > IM_TOL * total {
        return Err(Error::ImaginaryResidue {
            residue,
            scale: total,
            tolerance: IM_TOL,
        });
    }
    let mut data = vec![0.0; n1 * n2 * n3];
    for k in 0..n3 {
        let base = k * n1 * n2;
        for i in 0..n1 {
            for j in 0..n2 {
                data[base + i * n2 + j] = buf[(i * n2 + j) * n3 + k].re * scale;
            }
        }
    }
    Ok(Tensor3 { n1, n2, n3, data })
}

// ---------------------------------------------------------------------------
// Tubal-product algebra
// ---------------------------------------------------------------------------

/// The tubal product `A * B`: matrix multiplication over the ring of tubes
/// under circular convolution, computed slice-wise in the transform domain.
///
/// # Examples
///
/// ```
/// use tubal::{t_product, Tensor3};
///
/// // 1x1 tensors multiply by circular convolution of their tubes:
/// // (1, 2) conv (3, 4) = (1*3 + 2*4, 1*4 + 2*3) = (11, 10).
/// let a = Tensor3::new(1, 1, 2, vec![1.0, 2.0]).unwrap();
/// let b = Tensor3::new(1, 1, 2, vec![3.0, 4.0]).unwrap();
/// let c = t_product(&a, &b).unwrap();
/// assert!((c.get(0, 0, 0) - 11.0).abs() < 1e-12);
/// assert!((c.get(0, 0, 1) - 10.0).abs() < 1e-12);
/// ```
pub fn t_product(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    if a.n2 != b.n1 || a.n3 != b.n3 {
        return Err(Error::DimensionMismatch(format!(
            "cannot t-multiply {}x{}x{} by {}x{}x{}",
            a.n1, a.n2, a.n3, b.n1, b.n2, b.n3
        )));
    }
    ifft3(&fft3(a).mul(&fft3(b))?)
}

/// The tubal transpose: every frontal slice is transposed and the order of
/// slices `1..n3` is reversed, so that `fft3(t_transpose(A))` equals the
/// slice-wise conjugate transpose of `fft3(A)`. This makes the transpose an
/// anti-homomorphism: `t_transpose(A * B) = t_transpose(B) * t_transpose(A)`.
pub fn t_transpose(a: &Tensor3) -> Tensor3 {
    let (n1, n2, n3) = a.dims();
    Tensor3::from_fn(n2, n1, n3, |j, i, k| {
        let src = if k == 0 { 0 } else { n3 - k };
        a.get(i, j, src)
    })
}

/// The identity element for the tubal product: frontal slice zero is the
/// `n x n` identity matrix and all other slices are zero.
pub fn identity_tensor(n: usize, n3: usize) -> Tensor3 {
    Tensor3::from_fn(n, n, n3, |i, j, k| if k == 0 && i == j { 1.0 } else { 0.0 })
}

/// Euclidean inner product of two same-shape tensors, evaluated in the
/// transform domain as `(1 / n3) * sum_k trace(Bhat_k^H Ahat_k)` and checked
/// for a negligible imaginary part. Equals the entrywise sum of products.
pub fn inner_product(a: &Tensor3, b: &Tensor3) -> Result<f64> {
    if !a.same_dims(b) {
        return Err(Error::DimensionMismatch(format!(
            "inner product of {}x{}x{} with {}x{}x{}",
            a.n1, a.n2, a.n3, b.n1, b.n2, b.n3
        )));
    }
    let fa = fft3(a);
    let fb = fft3(b);
    let mut acc = Complex64::default();
    for k in 0..a.n3 {
        for (x, y) in fa.slices[k].iter().zip(fb.slices[k].iter()) {
            acc += x * y.conj();
        }
    }
    let value = acc / a.n3 as f64;
    let magnitude = a.frobenius() * b.frobenius();
    if value.im.abs() > IM_TOL * magnitude.max(f64::MIN_POSITIVE) {
        return Err(Error::ImaginaryResidue {
            residue: value.im.abs(),
            scale: magnitude,
            tolerance: IM_TOL,
        });
    }
    Ok(value.re)
}

/// The largest row or column energy of a tensor:
///
/// ```text
/// max( max_i sqrt(sum_{j,k} A(i,j,k)^2), max_j sqrt(sum_{i,k} A(i,j,k)^2) )
/// ```
///
/// Rows and columns are taken through all frontal slices at once.
pub fn linf_2star(a: &Tensor3) -> f64 {
    let (n1, n2, n3) = a.dims();
    let mut row_sq = vec![0.0f64; n1];
    let mut col_sq = vec![0.0f64; n2];
    for k in 0..n3 {
        for i in 0..n1 {
            for j in 0..n2 {
                let v = a.get(i, j, k);
                row_sq[i] += v * v;
                col_sq[j] += v * v;
            }
        }
    }
    let rows = row_sq.iter().fold(0.0f64, |m, v| m.max(*v));
    let cols = col_sq.iter().fold(0.0f64, |m, v| m.max(*v));
    rows.max(cols).sqrt()
}
