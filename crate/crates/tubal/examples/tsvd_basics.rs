//! Tour of the tubal algebra and the tensor SVD.
//!
//! Builds a small third-order tensor, exercises the product and transpose,
//! factorizes it, and shows how truncation behaves.
//!
//! ```bash
//! cargo run --release --example tsvd_basics
//! ```

use tubal::{
    identity_tensor, multi_rank, t_product, t_svd, t_svd_reduced, t_transpose, tnn, tubal_rank,
    Tensor3,
};

fn main() -> tubal::Result<()> {
    // A smooth synthetic tensor: every tube is a shifted cosine, so the
    // slices are strongly correlated and the spectrum decays quickly.
    let a = Tensor3::from_fn(6, 5, 4, |i, j, k| {
        let phase = 0.7 * i as f64 - 0.4 * j as f64;
        (phase + k as f64).cos() + 0.1 * (i * j) as f64
    });

    // The identity tensor is neutral for the product, and transposing a
    // product swaps and transposes its factors.
    let id = identity_tensor(6, 4);
    let left = t_product(&id, &a)?;
    println!("identity product error   = {:.3e}", (&left - &a).frobenius());

    let b = Tensor3::from_fn(5, 7, 4, |i, j, k| ((i + 2 * j + k) as f64).sin());
    let ab_t = t_transpose(&t_product(&a, &b)?);
    let bt_at = t_product(&t_transpose(&b), &t_transpose(&a))?;
    println!(
        "transpose swap error     = {:.3e}",
        (&ab_t - &bt_at).frobenius()
    );

    // Full factorization: orthogonal factors and an f-diagonal middle.
    let f = t_svd(&a)?;
    let err = (&f.reconstruct()? - &a).frobenius() / a.frobenius();
    println!("reconstruction error     = {err:.3e}");
    println!("tubal rank               = {}", f.r);
    println!("per-slice ranks          = {:?}", multi_rank(&a, None));
    println!("tubal nuclear norm       = {:.6}", tnn(&a));

    // Truncation keeps the leading singular tubes. The discarded energy
    // shows up directly as reconstruction error.
    for r in [1, 2, 4] {
        let g = t_svd_reduced(&a, r)?;
        let rel = (&g.reconstruct()? - &a).frobenius() / a.frobenius();
        println!("rank {r} truncation error  = {rel:.3e}");
    }

    // A product of thin factors has tubal rank bounded by their width.
    let u = Tensor3::from_fn(6, 2, 4, |i, j, k| ((i + j + k) as f64 * 0.9).sin());
    let v = Tensor3::from_fn(5, 2, 4, |i, j, k| ((i * 2 + j + k) as f64 * 0.6).cos());
    let low = t_product(&u, &t_transpose(&v))?;
    println!("constructed rank-2 tensor has tubal rank {}", tubal_rank(&low, None));
    Ok(())
}
