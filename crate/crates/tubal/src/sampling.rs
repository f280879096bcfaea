//! Random observation masks and the projection operators built on them.
//!
//! Two sampling models are supported. An *entrywise* mask observes each
//! entry `(i, j, k)` independently with probability `p`; a *tubal* mask
//! observes each tube `(i, j, :)` independently with probability `p`, so a
//! selected position is visible in every frontal slice at once. Masks are
//! generated by a seeded, portable RNG (ChaCha12) and are immutable after
//! creation, which makes experiments replayable across platforms and safe
//! to share between threads.
//!
//! On top of masks this module provides the observation projection
//! [`p_omega`], its rescaled unbiased cousin [`r_omega`], and the tangent
//! space of a factor pair with its orthogonal projections [`p_t`] and
//! [`p_t_perp`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::tensor::{check_dims, fft3, FourierTensor, Tensor3};
use crate::tsvd::TsvdFactors;

/// Which objects a mask samples: single entries or whole mode-3 tubes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaskKind {
    /// Each entry `(i, j, k)` is observed independently.
    Entrywise,
    /// Each tube `(i, j, :)` is observed as a whole.
    Tubal,
}

impl MaskKind {
    pub(crate) fn label(self) -> &'static str {
        match self {
            MaskKind::Entrywise => "entrywise",
            MaskKind::Tubal => "tubal",
        }
    }
}

/// A fixed set of observed positions in an `n1 x n2 x n3` tensor, together
/// with the probability and seed that generated it.
///
/// Membership is stored as a packed bitset: one bit per entry for
/// [`MaskKind::Entrywise`] (in tensor layout order, so bit index
/// `k * n1 * n2 + i * n2 + j`) or one bit per tube for [`MaskKind::Tubal`]
/// (bit index `i * n2 + j`). Bits are packed least significant first.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleMask {
    kind: MaskKind,
    n1: usize,
    n2: usize,
    n3: usize,
    p: f64,
    seed: u64,
    bits: Vec<u8>,
}

impl SampleMask {
    /// Builds a mask from raw parts, validating the bitset length and that
    /// any padding bits in the final byte are zero. Used by deserialization
    /// and by mask partitioners; random generation goes through
    /// [`bernoulli_mask`] and [`tubal_mask`].
    pub(crate) fn from_parts(
        kind: MaskKind,
        n1: usize,
        n2: usize,
        n3: usize,
        p: f64,
        seed: u64,
        bits: Vec<u8>,
    ) -> Result<Self> {
        check_dims(n1, n2, n3)?;
        check_probability(p)?;
        let nbits = match kind {
            MaskKind::Entrywise => n1 * n2 * n3,
            MaskKind::Tubal => n1 * n2,
        };
        let nbytes = nbits.div_ceil(8);
        if bits.len() != nbytes {
            return Err(Error::FileFormat(format!(
                "mask bitset holds {} bytes but {} bits need {} bytes",
                bits.len(),
                nbits,
                nbytes
            )));
        }
        if nbits % 8 != 0 {
            let pad = bits[nbytes - 1] >> (nbits % 8);
            if pad != 0 {
                return Err(Error::FileFormat(
                    "mask bitset has nonzero padding bits".to_string(),
                ));
            }
        }
        Ok(Self {
            kind,
            n1,
            n2,
            n3,
            p,
            seed,
            bits,
        })
    }

    pub fn kind(&self) -> MaskKind {
        self.kind
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    /// The sampling probability this mask was generated with.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// The RNG seed this mask was generated with. For derived masks (see
    /// [`SampleMask::union`]) this is provenance metadata only.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[cfg(test)]
    pub(crate) fn bit_len(&self) -> usize {
        match self.kind {
            MaskKind::Entrywise => self.n1 * self.n2 * self.n3,
            MaskKind::Tubal => self.n1 * self.n2,
        }
    }

    pub(crate) fn bytes(&self) -> &[u8] {
        &self.bits
    }

    fn bit(&self, idx: usize) -> bool {
        self.bits[idx / 8] >> (idx % 8) & 1 == 1
    }

    /// Whether entry `(i, j, k)` is observed. For tubal masks this ignores
    /// `k` beyond bounds checking, since whole tubes are kept.
    pub fn contains(&self, i: usize, j: usize, k: usize) -> bool {
        assert!(
            i < self.n1 && j < self.n2 && k < self.n3,
            "mask index ({i}, {j}, {k}) out of range for {}x{}x{}",
            self.n1,
            self.n2,
            self.n3
        );
        match self.kind {
            MaskKind::Entrywise => self.bit(k * self.n1 * self.n2 + i * self.n2 + j),
            MaskKind::Tubal => self.bit(i * self.n2 + j),
        }
    }

    /// Whether tube `(i, j, :)` is observed in full.
    pub fn contains_tube(&self, i: usize, j: usize) -> bool {
        assert!(
            i < self.n1 && j < self.n2,
            "tube index ({i}, {j}) out of range for {}x{}",
            self.n1,
            self.n2
        );
        match self.kind {
            MaskKind::Entrywise => (0..self.n3).all(|k| self.contains(i, j, k)),
            MaskKind::Tubal => self.bit(i * self.n2 + j),
        }
    }

    /// Number of observed tensor entries (tubal masks count every entry of
    /// each observed tube).
    pub fn observed_count(&self) -> usize {
        let ones: usize = self.bits.iter().map(|b| b.count_ones() as usize).sum();
        match self.kind {
            MaskKind::Entrywise => ones,
            MaskKind::Tubal => ones * self.n3,
        }
    }

    /// Whether every entry is observed.
    pub fn is_full(&self) -> bool {
        self.observed_count() == self.n1 * self.n2 * self.n3
    }

    /// Positionwise union of two masks of the same kind and dimensions. The
    /// result's probability is the inclusion probability of the union of two
    /// independent draws, `1 - (1 - p1)(1 - p2)`, and the seed is inherited
    /// from `self` as provenance.
    pub fn union(&self, other: &SampleMask) -> Result<SampleMask> {
        if self.kind != other.kind {
            return Err(Error::WrongMaskKind {
                expected: self.kind.label(),
                got: other.kind.label(),
            });
        }
        if (self.n1, self.n2, self.n3) != (other.n1, other.n2, other.n3) {
            return Err(Error::DimensionMismatch(format!(
                "mask union needs matching dimensions, got {}x{}x{} and {}x{}x{}",
                self.n1, self.n2, self.n3, other.n1, other.n2, other.n3
            )));
        }
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a | b)
            .collect();
        Ok(SampleMask {
            kind: self.kind,
            n1: self.n1,
            n2: self.n2,
            n3: self.n3,
            p: 1.0 - (1.0 - self.p) * (1.0 - other.p),
            seed: self.seed,
            bits,
        })
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

fn draw_mask(
    kind: MaskKind,
    n1: usize,
    n2: usize,
    n3: usize,
    p: f64,
    seed: u64,
) -> Result<SampleMask> {
    check_dims(n1, n2, n3)?;
    check_probability(p)?;
    let nbits = match kind {
        MaskKind::Entrywise => n1 * n2 * n3,
        MaskKind::Tubal => n1 * n2,
    };
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut bits = vec![0u8; nbits.div_ceil(8)];
    // One uniform draw per bit, in bit index order; this order is part of
    // the reproducibility contract.
    for idx in 0..nbits {
        if rng.random::<f64>() < p {
            bits[idx / 8] |= 1 << (idx % 8);
        }
    }
    Ok(SampleMask {
        kind,
        n1,
        n2,
        n3,
        p,
        seed,
        bits,
    })
}

/// Draws an entrywise Bernoulli mask: each entry is observed independently
/// with probability `p`. Deterministic in `seed`.
pub fn bernoulli_mask(n1: usize, n2: usize, n3: usize, p: f64, seed: u64) -> Result<SampleMask> {
    draw_mask(MaskKind::Entrywise, n1, n2, n3, p, seed)
}

/// Draws a tubal Bernoulli mask: each tube `(i, j, :)` is observed as a
/// whole, independently with probability `p`. Deterministic in `seed`.
pub fn tubal_mask(n1: usize, n2: usize, n3: usize, p: f64, seed: u64) -> Result<SampleMask> {
    draw_mask(MaskKind::Tubal, n1, n2, n3, p, seed)
}

/// Observation projection: keeps observed entries, zeros the rest.
pub fn p_omega(z: &Tensor3, m: &SampleMask) -> Result<Tensor3> {
    if z.dims() != m.dims() {
        let (n1, n2, n3) = z.dims();
        let (m1, m2, m3) = m.dims();
        return Err(Error::DimensionMismatch(format!(
            "tensor is {n1}x{n2}x{n3} but mask is {m1}x{m2}x{m3}"
        )));
    }
    let (n1, n2, n3) = z.dims();
    let mut out = Tensor3::zeros(n1, n2, n3);
    for k in 0..n3 {
        for i in 0..n1 {
            for j in 0..n2 {
                if m.contains(i, j, k) {
                    out.set(i, j, k, z.get(i, j, k));
                }
            }
        }
    }
    Ok(out)
}

/// Rescaled sampling operator `(1/p) * p_omega`. Averaged over fresh masks
/// it reproduces the input, which is what makes it useful as an unbiased
/// surrogate for the identity in sampling analyses.
pub fn r_omega(z: &Tensor3, m: &SampleMask) -> Result<Tensor3> {
    Ok(p_omega(z, m)?.scale(1.0 / m.p()))
}

/// Tolerance on `‖Uᵀ∗U − I‖` (per transform slice, Frobenius) accepted when
/// building a [`TangentSpace`] from factors.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// The tangent space of a factor pair `(U, V)` with orthonormal lateral
/// columns, holding their transform-domain slices for fast application of
/// the projections [`p_t`] and [`p_t_perp`].
///
/// With `P = U∗Uᵀ` and `Q = V∗Vᵀ`,
///
/// ```text
/// p_t(Z)      = P∗Z + Z∗Q − P∗Z∗Q
/// p_t_perp(Z) = (I − P)∗Z∗(I − Q)
/// ```
///
/// and both are applied slice by slice in the transform domain using the
/// thin factors, which costs `O(r·n1·n2)` per slice instead of forming the
/// projector matrices.
pub struct TangentSpace {
    n1: usize,
    n2: usize,
    n3: usize,
    r: usize,
    uf: Vec<DMatrix<Complex64>>,
    vf: Vec<DMatrix<Complex64>>,
}

impl TangentSpace {
    /// Builds the tangent space of a factorization's `(U, V)` pair.
    pub fn new(f: &TsvdFactors) -> Result<Self> {
        Self::from_parts(&f.u, &f.v)
    }

    /// Builds the tangent space from explicit factors of shapes
    /// `n1 x r x n3` and `n2 x r x n3`. Fails with [`Error::NotOrthogonal`]
    /// if either factor's transform slices deviate from orthonormal columns
    /// by more than [`ORTHOGONALITY_TOL`].
    pub fn from_parts(u: &Tensor3, v: &Tensor3) -> Result<Self> {
        let (n1, r, n3) = u.dims();
        let (n2, rv, n3v) = v.dims();
        if rv != r || n3v != n3 {
            return Err(Error::DimensionMismatch(format!(
                "factors {n1}x{r}x{n3} and {n2}x{rv}x{n3v} do not share width and depth"
            )));
        }
        // The self-conjugate slices of real factors are real in exact
        // arithmetic; stripping their transform roundoff keeps every
        // projection of those slices exactly real, so projections that
        // cancel to roundoff still inverse-transform cleanly.
        let mut fu = fft3(u);
        fu.strip_self_conjugate_imag();
        let mut fv = fft3(v);
        fv.strip_self_conjugate_imag();
        let uf = collect_slices(&fu);
        let vf = collect_slices(&fv);
        let defect = orthogonality_defect(&uf).max(orthogonality_defect(&vf));
        if defect > ORTHOGONALITY_TOL {
            return Err(Error::NotOrthogonal(defect));
        }
        Ok(Self {
            n1,
            n2,
            n3,
            r,
            uf,
            vf,
        })
    }

    /// Width of the factors spanning this tangent space.
    pub fn rank(&self) -> usize {
        self.r
    }

    /// Dimensions of the tensors this space projects.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    pub(crate) fn u_slices(&self) -> &[DMatrix<Complex64>] {
        &self.uf
    }

    pub(crate) fn v_slices(&self) -> &[DMatrix<Complex64>] {
        &self.vf
    }

    fn check_dims(&self, z: &Tensor3) -> Result<()> {
        if z.dims() != (self.n1, self.n2, self.n3) {
            let (n1, n2, n3) = z.dims();
            return Err(Error::DimensionMismatch(format!(
                "tensor is {n1}x{n2}x{n3} but the tangent space expects {}x{}x{}",
                self.n1, self.n2, self.n3
            )));
        }
        Ok(())
    }

    /// Applies the tangent projection to one transform slice.
    pub(crate) fn project_slice(&self, k: usize, z: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let u = &self.uf[k];
        let v = &self.vf[k];
        let a = u.adjoint() * z;
        let b = z * v;
        // P z + z Q − P z Q = u (a − (a v) vᴴ) + b vᴴ
        let av = &a * v;
        u * (a - av * v.adjoint()) + b * v.adjoint()
    }

    /// Applies the complementary projection to one transform slice.
    pub(crate) fn reject_slice(&self, k: usize, z: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let u = &self.uf[k];
        let v = &self.vf[k];
        let w = z - u * (u.adjoint() * z);
        &w - (&w * v) * v.adjoint()
    }
}

fn collect_slices(f: &FourierTensor) -> Vec<DMatrix<Complex64>> {
    f.slices().to_vec()
}

fn orthogonality_defect(slices: &[DMatrix<Complex64>]) -> f64 {
    slices
        .iter()
        .map(|s| {
            let r = s.ncols();
            let mut gram = s.adjoint() * s;
            for c in 0..r {
                gram[(c, c)] -= Complex64::new(1.0, 0.0);
            }
            gram.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max)
}

fn apply_slicewise(
    z: &Tensor3,
    t: &TangentSpace,
    op: impl Fn(usize, &DMatrix<Complex64>) -> DMatrix<Complex64>,
) -> Result<Tensor3> {
    t.check_dims(z)?;
    let mut f = fft3(z);
    f.strip_self_conjugate_imag();
    // Only the unique slices are computed; mirrors are their conjugates by
    // construction. Projections of tensors near the operator's kernel
    // cancel to roundoff, where independently computed mirrors would no
    // longer be conjugates of each other relative to the tiny result.
    let unique: Vec<DMatrix<Complex64>> = (0..crate::tsvd::unique_slices(t.n3))
        .map(|k| op(k, f.slice(k)))
        .collect();
    crate::tsvd::assemble_factor(&unique, t.n3)
}

/// Projects onto the tangent space: `P∗Z + Z∗Q − P∗Z∗Q` with `P = U∗Uᵀ`,
/// `Q = V∗Vᵀ`.
pub fn p_t(z: &Tensor3, t: &TangentSpace) -> Result<Tensor3> {
    apply_slicewise(z, t, |k, s| t.project_slice(k, s))
}

/// Projects onto the orthogonal complement of the tangent space:
/// `(I − P)∗Z∗(I − Q)`.
pub fn p_t_perp(z: &Tensor3, t: &TangentSpace) -> Result<Tensor3> {
    apply_slicewise(z, t, |k, s| t.reject_slice(k, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{inner_product, t_product, t_transpose};
    use crate::tsvd::t_svd_reduced;
    use approx::assert_relative_eq;
    use rand_distr::{Distribution, StandardNormal};

    fn random_tensor(n1: usize, n2: usize, n3: usize, seed: u64) -> Tensor3 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..n1 * n2 * n3)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        Tensor3::new(n1, n2, n3, data).unwrap()
    }

    fn random_tangent(n1: usize, n2: usize, n3: usize, r: usize, seed: u64) -> TangentSpace {
        let f = t_svd_reduced(&random_tensor(n1, n2, n3, seed), r).unwrap();
        TangentSpace::new(&f).unwrap()
    }

    #[test]
    fn full_probability_masks_observe_everything() {
        for mask in [
            bernoulli_mask(4, 3, 5, 1.0, 9).unwrap(),
            tubal_mask(4, 3, 5, 1.0, 9).unwrap(),
        ] {
            assert!(mask.is_full());
            assert_eq!(mask.observed_count(), 60);
            for i in 0..4 {
                for j in 0..3 {
                    assert!(mask.contains_tube(i, j));
                    for k in 0..5 {
                        assert!(mask.contains(i, j, k));
                    }
                }
            }
            let z = random_tensor(4, 3, 5, 1);
            assert_eq!(p_omega(&z, &mask).unwrap().data(), z.data());
            assert_eq!(r_omega(&z, &mask).unwrap().data(), z.data());
        }
    }

    #[test]
    fn masks_are_deterministic_in_the_seed() {
        let a = bernoulli_mask(6, 5, 4, 0.5, 1234).unwrap();
        let b = bernoulli_mask(6, 5, 4, 0.5, 1234).unwrap();
        assert_eq!(a, b);
        let c = bernoulli_mask(6, 5, 4, 0.5, 1235).unwrap();
        assert_ne!(a, c);

        let ta = tubal_mask(6, 5, 4, 0.5, 77).unwrap();
        let tb = tubal_mask(6, 5, 4, 0.5, 77).unwrap();
        assert_eq!(ta, tb);
    }

    #[test]
    fn inclusion_rate_stays_within_binomial_bounds() {
        // 10^4 masks of 30x30x20 at p = 1/2: the pooled observation count is
        // Binomial(1.8e8, 1/2), whose 3-sigma band for the empirical rate is
        // 1/2 +/- 3 * 0.5 / sqrt(1.8e8) = 1/2 +/- 1.1180e-4.
        let trials = 10_000u64;
        let mut total: u64 = 0;
        for seed in 0..trials {
            total += bernoulli_mask(30, 30, 20, 0.5, seed).unwrap().observed_count() as u64;
        }
        let rate = total as f64 / (trials as f64 * 18_000.0);
        assert!(
            (rate - 0.5).abs() < 1.1180e-4,
            "pooled inclusion rate {rate} strays from 0.5"
        );

        // Per-position rate across masks, same band at n = 10^4 draws:
        // 1/2 +/- 3 * 0.5 / 100 = 1/2 +/- 0.015.
        let mut hits = 0u64;
        for seed in 0..trials {
            if tubal_mask(5, 4, 3, 0.5, seed).unwrap().contains(3, 2, 0) {
                hits += 1;
            }
        }
        let rate = hits as f64 / trials as f64;
        assert!(
            (rate - 0.5).abs() < 0.015,
            "per-tube inclusion rate {rate} strays from 0.5"
        );
    }

    #[test]
    fn invalid_probabilities_are_rejected() {
        for p in [0.0, -0.25, 1.5, f64::NAN] {
            assert!(matches!(
                bernoulli_mask(3, 3, 3, p, 0),
                Err(Error::InvalidProbability(_))
            ));
            assert!(matches!(
                tubal_mask(3, 3, 3, p, 0),
                Err(Error::InvalidProbability(_))
            ));
        }
    }

    #[test]
    fn p_omega_keeps_exactly_the_observed_entries() {
        let z = random_tensor(6, 5, 4, 3);
        let mask = bernoulli_mask(6, 5, 4, 0.4, 11).unwrap();
        let projected = p_omega(&z, &mask).unwrap();
        let mut observed = 0;
        for i in 0..6 {
            for j in 0..5 {
                for k in 0..4 {
                    if mask.contains(i, j, k) {
                        assert_eq!(projected.get(i, j, k), z.get(i, j, k));
                        observed += 1;
                    } else {
                        assert_eq!(projected.get(i, j, k), 0.0);
                    }
                }
            }
        }
        assert_eq!(observed, mask.observed_count());

        let twice = p_omega(&projected, &mask).unwrap();
        assert_eq!(twice.data(), projected.data());

        let wrong = random_tensor(5, 5, 4, 3);
        assert!(matches!(
            p_omega(&wrong, &mask),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn r_omega_is_unbiased_over_fresh_masks() {
        let z = random_tensor(5, 4, 3, 21);
        let trials = 10_000;
        let p = 0.3;
        let mut avg = Tensor3::zeros(5, 4, 3);
        for seed in 0..trials {
            avg = &avg + &r_omega(&z, &bernoulli_mask(5, 4, 3, p, seed).unwrap()).unwrap();
        }
        let avg = avg.scale(1.0 / trials as f64);
        // Each entry of the average has standard deviation
        // |z_ijk| * sqrt((1-p)/p) / sqrt(trials), so the deviation norm
        // concentrates near sqrt((1-p)/(p * trials)) * |z| ~ 0.0153 * |z|.
        let dev = (&avg - &z).frobenius();
        assert!(
            dev < 0.05 * z.frobenius(),
            "Monte-Carlo mean deviates by {dev}"
        );
    }

    #[test]
    fn tubal_masks_commute_with_the_tube_transform() {
        let z = random_tensor(6, 5, 4, 8);
        let mask = tubal_mask(6, 5, 4, 0.4, 5).unwrap();
        let masked_then_fft = fft3(&p_omega(&z, &mask).unwrap());
        let ff = fft3(&z);
        for k in 0..4 {
            for i in 0..6 {
                for j in 0..5 {
                    let want = if mask.contains_tube(i, j) {
                        ff.slice(k)[(i, j)]
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    let got = masked_then_fft.slice(k)[(i, j)];
                    assert!(
                        (got - want).norm() < 1e-12,
                        "slice {k} entry ({i}, {j}) differs"
                    );
                }
            }
        }
    }

    #[test]
    fn union_merges_membership_and_probabilities() {
        let a = bernoulli_mask(4, 3, 2, 0.3, 1).unwrap();
        let b = bernoulli_mask(4, 3, 2, 0.4, 2).unwrap();
        let u = a.union(&b).unwrap();
        assert_relative_eq!(u.p(), 1.0 - 0.7 * 0.6, max_relative = 1e-15);
        assert_eq!(u.seed(), a.seed());
        for i in 0..4 {
            for j in 0..3 {
                for k in 0..2 {
                    assert_eq!(
                        u.contains(i, j, k),
                        a.contains(i, j, k) || b.contains(i, j, k)
                    );
                }
            }
        }

        let t = tubal_mask(4, 3, 2, 0.5, 3).unwrap();
        assert!(matches!(
            a.union(&t),
            Err(Error::WrongMaskKind {
                expected: "entrywise",
                got: "tubal"
            })
        ));
        let small = bernoulli_mask(3, 3, 2, 0.3, 1).unwrap();
        assert!(matches!(
            a.union(&small),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn tangent_projections_are_complementary_orthogonal_projections() {
        let t = random_tangent(8, 7, 5, 3, 31);
        let z = random_tensor(8, 7, 5, 32);
        let a = random_tensor(8, 7, 5, 33);
        let b = random_tensor(8, 7, 5, 34);

        let pz = p_t(&z, &t).unwrap();
        let qz = p_t_perp(&z, &t).unwrap();
        let scale = z.frobenius();

        // Complementary: p_t + p_t_perp = identity.
        assert!((&(&pz + &qz) - &z).frobenius() < 1e-10 * scale);
        // Idempotent.
        assert!((&p_t(&pz, &t).unwrap() - &pz).frobenius() < 1e-10 * scale);
        assert!((&p_t_perp(&qz, &t).unwrap() - &qz).frobenius() < 1e-10 * scale);
        // Mutually annihilating.
        assert!(p_t_perp(&pz, &t).unwrap().frobenius() < 1e-10 * scale);
        // Self-adjoint under the tensor inner product.
        let lhs = inner_product(&p_t(&a, &t).unwrap(), &b).unwrap();
        let rhs = inner_product(&a, &p_t(&b, &t).unwrap()).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
        // Cross terms vanish.
        let cross = inner_product(&p_t(&a, &t).unwrap(), &p_t_perp(&b, &t).unwrap()).unwrap();
        assert!(cross.abs() < 1e-10 * a.frobenius() * b.frobenius());
    }

    #[test]
    fn tangent_space_fixes_its_own_ranges() {
        let f = t_svd_reduced(&random_tensor(8, 7, 5, 41), 3).unwrap();
        let t = TangentSpace::new(&f).unwrap();
        assert_eq!(t.rank(), 3);
        assert_eq!(t.dims(), (8, 7, 5));

        // Anything of the form U * X stays fixed, as does Y * Vᵀ.
        let x = random_tensor(3, 7, 5, 42);
        let ux = t_product(&f.u, &x).unwrap();
        assert!((&p_t(&ux, &t).unwrap() - &ux).frobenius() < 1e-10 * ux.frobenius());

        let y = random_tensor(8, 3, 5, 43);
        let yvt = t_product(&y, &t_transpose(&f.v)).unwrap();
        assert!((&p_t(&yvt, &t).unwrap() - &yvt).frobenius() < 1e-10 * yvt.frobenius());
    }

    #[test]
    fn tangent_space_rejects_non_orthogonal_factors() {
        let u = random_tensor(6, 2, 3, 51);
        let v = random_tensor(5, 2, 3, 52);
        assert!(matches!(
            TangentSpace::from_parts(&u, &v),
            Err(Error::NotOrthogonal(_))
        ));

        let f = t_svd_reduced(&random_tensor(6, 5, 3, 53), 2).unwrap();
        let skinny = random_tensor(5, 3, 3, 54);
        assert!(matches!(
            TangentSpace::from_parts(&f.u, &skinny),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
