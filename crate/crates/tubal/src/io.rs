//! File formats and reshape utilities.
//!
//! Two small binary formats cover the artifacts the solvers exchange:
//!
//! * **Tensor files** start with the magic `TSV3`, a format version, an
//!   element-type code, and the three dimensions, followed by the payload
//!   in the [`Tensor3`] index layout. All multi-byte fields are
//!   little-endian; payloads are `f64`.
//! * **Mask files** start with the magic `TSVM`, a format version, a kind
//!   code (1 = entrywise, 2 = tubal), the dimensions, the sampling
//!   probability, and the generator seed, followed by the packed bitset.
//!
//! Round trips through either format are bit-exact. The module also holds
//! [`reshape_to_3d`]/[`reshape_from_3d`], which fold a higher-order array
//! into a third-order tensor by grouping its leading modes, and a plain
//! CSV writer used by the experiment harness.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sampling::{MaskKind, SampleMask};
use crate::tensor::Tensor3;

/// Magic bytes opening every tensor file.
const TENSOR_MAGIC: [u8; 4] = *b"TSV3";
/// Magic bytes opening every mask file.
const MASK_MAGIC: [u8; 4] = *b"TSVM";
/// Current version of both file formats.
const FORMAT_VERSION: u16 = 1;
/// Element-type code for `f64` payloads, the only type in version 1. The
/// field is kept in the header so future versions can add narrower types
/// without breaking the magic/version handshake.
const DTYPE_F64: u16 = 1;
/// Kind code stored for entrywise masks.
const KIND_ENTRYWISE: u16 = 1;
/// Kind code stored for tubal masks.
const KIND_TUBAL: u16 = 2;

/// Byte length of the fixed tensor-file header.
const TENSOR_HEADER_LEN: usize = 4 + 2 + 2 + 3 * 8;
/// Byte length of the fixed mask-file header.
const MASK_HEADER_LEN: usize = 4 + 2 + 2 + 3 * 8 + 8 + 8;

/// Little-endian field reader that tracks its offset into a byte slice.
struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::FileFormat(format!(
                "file ends inside the {what} field"
            )));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        let b = self.take(2, what)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        let b = self.take(8, what)?;
        Ok(u64::from_le_bytes(b.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let b = self.take(8, what)?;
        Ok(f64::from_le_bytes(b.try_into().unwrap()))
    }

    fn rest(&self) -> &'a [u8] {
        &self.bytes[self.pos..]
    }
}

/// Converts a stored dimension to `usize`, rejecting values that do not fit.
fn dim_from_u64(v: u64, what: &str) -> Result<usize> {
    usize::try_from(v)
        .map_err(|_| Error::FileFormat(format!("{what} = {v} does not fit in memory")))
}

/// Writes `t` to `path` in the tensor file format.
///
/// The written bytes are `TSV3`, version, element-type code, `n1`, `n2`,
/// `n3`, then `n1*n2*n3` values in layout order. [`read_tensor`] restores
/// the tensor bit-for-bit.
pub fn write_tensor(path: impl AsRef<Path>, t: &Tensor3) -> Result<()> {
    let (n1, n2, n3) = t.dims();
    let mut out = Vec::with_capacity(TENSOR_HEADER_LEN + t.data().len() * 8);
    out.extend_from_slice(&TENSOR_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&DTYPE_F64.to_le_bytes());
    out.extend_from_slice(&(n1 as u64).to_le_bytes());
    out.extend_from_slice(&(n2 as u64).to_le_bytes());
    out.extend_from_slice(&(n3 as u64).to_le_bytes());
    for v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a tensor written by [`write_tensor`].
///
/// Validates the magic, version, element type, and that the payload length
/// matches the dimensions; a short or overlong payload is reported as a
/// payload mismatch with both byte counts.
pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor3> {
    let bytes = fs::read(path)?;
    let mut r = Reader::new(&bytes);
    let magic = r.take(4, "magic").map_err(|_| not_a("tensor", &bytes))?;
    if magic != TENSOR_MAGIC {
        return Err(not_a("tensor", &bytes));
    }
    let version = r.u16("version")?;
    if version != FORMAT_VERSION {
        return Err(Error::FileFormat(format!(
            "unsupported tensor file version {version} (expected {FORMAT_VERSION})"
        )));
    }
    let dtype = r.u16("element type")?;
    if dtype != DTYPE_F64 {
        return Err(Error::FileFormat(format!(
            "unsupported element type code {dtype} (expected {DTYPE_F64})"
        )));
    }
    let n1 = dim_from_u64(r.u64("n1")?, "n1")?;
    let n2 = dim_from_u64(r.u64("n2")?, "n2")?;
    let n3 = dim_from_u64(r.u64("n3")?, "n3")?;
    let count = n1
        .checked_mul(n2)
        .and_then(|v| v.checked_mul(n3))
        .ok_or_else(|| {
            Error::FileFormat(format!("dimensions {n1}x{n2}x{n3} overflow the entry count"))
        })?;
    let payload = r.rest();
    let expected = count.checked_mul(8).ok_or_else(|| {
        Error::FileFormat(format!("dimensions {n1}x{n2}x{n3} overflow the payload size"))
    })?;
    if payload.len() != expected {
        return Err(Error::FileFormat(format!(
            "payload mismatch: a {n1}x{n2}x{n3} tensor needs {expected} data bytes, file has {}",
            payload.len()
        )));
    }
    let data: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Tensor3::new(n1, n2, n3, data)
}

/// Builds the "wrong magic" error, distinguishing an empty file.
fn not_a(kind: &str, bytes: &[u8]) -> Error {
    if bytes.len() < 4 {
        Error::FileFormat(format!("not a {kind} file: shorter than the magic"))
    } else {
        Error::FileFormat(format!(
            "not a {kind} file: magic is {:?}",
            &bytes[..4.min(bytes.len())]
        ))
    }
}

/// Writes `m` to `path` in the mask file format.
///
/// The written bytes are `TSVM`, version, kind code, the three dimensions,
/// the sampling probability, the seed, then the packed bitset (one bit per
/// entry for entrywise masks, one per tube for tubal masks, least
/// significant bit first).
pub fn write_mask(path: impl AsRef<Path>, m: &SampleMask) -> Result<()> {
    let (n1, n2, n3) = m.dims();
    let kind_code = match m.kind() {
        MaskKind::Entrywise => KIND_ENTRYWISE,
        MaskKind::Tubal => KIND_TUBAL,
    };
    let mut out = Vec::with_capacity(MASK_HEADER_LEN + m.bytes().len());
    out.extend_from_slice(&MASK_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&kind_code.to_le_bytes());
    out.extend_from_slice(&(n1 as u64).to_le_bytes());
    out.extend_from_slice(&(n2 as u64).to_le_bytes());
    out.extend_from_slice(&(n3 as u64).to_le_bytes());
    out.extend_from_slice(&m.p().to_le_bytes());
    out.extend_from_slice(&m.seed().to_le_bytes());
    out.extend_from_slice(m.bytes());
    fs::write(path, out)?;
    Ok(())
}

/// Reads a mask written by [`write_mask`].
///
/// Validates the magic, version, and kind code; the bitset length and
/// padding bits are checked when the mask is rebuilt.
pub fn read_mask(path: impl AsRef<Path>) -> Result<SampleMask> {
    let bytes = fs::read(path)?;
    let mut r = Reader::new(&bytes);
    let magic = r.take(4, "magic").map_err(|_| not_a("mask", &bytes))?;
    if magic != MASK_MAGIC {
        return Err(not_a("mask", &bytes));
    }
    let version = r.u16("version")?;
    if version != FORMAT_VERSION {
        return Err(Error::FileFormat(format!(
            "unsupported mask file version {version} (expected {FORMAT_VERSION})"
        )));
    }
    let kind = match r.u16("kind")? {
        KIND_ENTRYWISE => MaskKind::Entrywise,
        KIND_TUBAL => MaskKind::Tubal,
        other => {
            return Err(Error::FileFormat(format!("unknown mask kind code {other}")));
        }
    };
    let n1 = dim_from_u64(r.u64("n1")?, "n1")?;
    let n2 = dim_from_u64(r.u64("n2")?, "n2")?;
    let n3 = dim_from_u64(r.u64("n3")?, "n3")?;
    let p = r.f64("probability")?;
    let seed = r.u64("seed")?;
    SampleMask::from_parts(kind, n1, n2, n3, p, seed, r.rest().to_vec())
}

/// Writes a CSV file from a header line and preformatted rows.
///
/// Lines are joined with `\n` and the file ends with a newline, so the
/// bytes depend only on the inputs. Fields are never quoted; callers keep
/// commas out of their values.
pub fn csv_export(path: impl AsRef<Path>, header: &str, rows: &[String]) -> Result<()> {
    let mut out = String::with_capacity(header.len() + rows.iter().map(|r| r.len() + 1).sum::<usize>() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a text file produced by [`csv_export`] (or any text artifact).
pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

/// Checks a reshape grouping and returns the folded dimensions.
///
/// `dims` are the sizes of a K-way array, K ≥ 3, all positive; the split
/// must satisfy `1 ≤ k1 < K−1`. Modes `1..=k1` fold into the first tensor
/// dimension, modes `k1+1..=K−1` into the second, and the last mode becomes
/// the tube axis.
fn reshape_dims(dims: &[usize], k1: usize) -> Result<(usize, usize, usize)> {
    let k = dims.len();
    if k < 3 {
        return Err(Error::DimensionMismatch(format!(
            "reshape needs at least 3 modes, got {k}"
        )));
    }
    if k1 == 0 || k1 >= k - 1 {
        return Err(Error::DimensionMismatch(format!(
            "split {k1} outside 1..{} for {k} modes",
            k - 1
        )));
    }
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::DimensionMismatch(
            "every mode size must be positive".to_string(),
        ));
    }
    let fold = |part: &[usize]| -> Result<usize> {
        part.iter().try_fold(1usize, |acc, &d| {
            acc.checked_mul(d).ok_or_else(|| {
                Error::DimensionMismatch("mode sizes overflow when folded".to_string())
            })
        })
    };
    Ok((fold(&dims[..k1])?, fold(&dims[k1..k - 1])?, dims[k - 1]))
}

/// Folds a K-way array into a third-order tensor by grouping modes.
///
/// The entry at multi-index `(a_1, …, a_K)` lands at
/// `(fold(a_1..a_k1), fold(a_k1+1..a_K-1), a_K)`, where each fold orders
/// its group with the first index slowest. `data` must hold the array in
/// the matching linear layout: the last mode slowest, the leading K−1
/// modes in row-major order within it. That layout generalizes the
/// [`Tensor3`] layout, so the fold preserves flat offsets and this
/// function only reinterprets the buffer.
///
/// [`reshape_from_3d`] with the same `dims` and `k1` restores the array.
pub fn reshape_to_3d(dims: &[usize], k1: usize, data: &[f64]) -> Result<Tensor3> {
    let (n1, n2, n3) = reshape_dims(dims, k1)?;
    let count = n1
        .checked_mul(n2)
        .and_then(|v| v.checked_mul(n3))
        .ok_or_else(|| Error::DimensionMismatch("mode sizes overflow when folded".to_string()))?;
    if data.len() != count {
        return Err(Error::DimensionMismatch(format!(
            "modes {dims:?} describe {count} entries, got {}",
            data.len()
        )));
    }
    Tensor3::new(n1, n2, n3, data.to_vec())
}

/// Unfolds a tensor produced by [`reshape_to_3d`] back to the K-way array.
///
/// `dims` and `k1` must describe the grouping that produced `t`; the
/// returned vector is the original linear layout, bit-for-bit.
pub fn reshape_from_3d(t: &Tensor3, dims: &[usize], k1: usize) -> Result<Vec<f64>> {
    let (n1, n2, n3) = reshape_dims(dims, k1)?;
    if (n1, n2, n3) != t.dims() {
        return Err(Error::DimensionMismatch(format!(
            "modes {dims:?} split at {k1} fold to {n1}x{n2}x{n3}, tensor is {}x{}x{}",
            t.dims().0,
            t.dims().1,
            t.dims().2
        )));
    }
    Ok(t.data().to_vec())
}
