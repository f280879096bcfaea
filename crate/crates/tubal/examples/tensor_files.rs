//! Tensor and mask files, plus reshaping higher-order data.
//!
//! The binary formats are little-endian and bit-exact: what you write is
//! what you read. Reshaping folds a K-way array into a third-order tensor
//! so that tubal methods apply to higher-order data.
//!
//! ```bash
//! cargo run --release --example tensor_files
//! ```

use tubal::{
    bernoulli_mask, generate_low_tubal_rank, read_mask, read_tensor, reshape_from_3d,
    reshape_to_3d, tubal_rank, write_mask, write_tensor,
};

fn main() -> tubal::Result<()> {
    let dir = std::env::temp_dir().join("tubal_files_example");
    std::fs::create_dir_all(&dir)?;

    // Tensor round trip.
    let t = generate_low_tubal_rank(12, 10, 6, 3, 5)?;
    let tensor_path = dir.join("demo.tsv3");
    write_tensor(&tensor_path, &t)?;
    let back = read_tensor(&tensor_path)?;
    let bitwise = back
        .data()
        .iter()
        .zip(t.data())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    println!("tensor round trip bit-exact: {bitwise}");

    // Mask round trip. The file keeps the generator seed, so a stored
    // mask documents how it was drawn.
    let mask = bernoulli_mask(12, 10, 6, 0.4, 77)?;
    let mask_path = dir.join("demo.tsvm");
    write_mask(&mask_path, &mask)?;
    let mask_back = read_mask(&mask_path)?;
    println!(
        "mask round trip: kind {:?}, {} observed, seed {}",
        mask_back.kind(),
        mask_back.observed_count(),
        mask_back.seed()
    );

    // Fold a 4-way array into a third-order tensor. Grouping the first
    // two modes of a 2x3x4x5 array gives a 6x4x5 tensor; unfolding
    // restores the original buffer exactly.
    let dims = [2, 3, 4, 5];
    let data: Vec<f64> = (0..120).map(|i| (i as f64 * 0.37).sin()).collect();
    let folded = reshape_to_3d(&dims, 2, &data)?;
    println!("folded dims: {:?}", folded.dims());
    let unfolded = reshape_from_3d(&folded, &dims, 2)?;
    println!("unfold restores the buffer: {}", unfolded == data);

    // A 4-way array assembled from two separable terms keeps tubal rank
    // at most 2 after folding, which is what makes the fold useful.
    let mut low = vec![0.0; 120];
    for a1 in 0..2 {
        for a2 in 0..3 {
            for a3 in 0..4 {
                for a4 in 0..5 {
                    let offset = a4 * 24 + a1 * 12 + a2 * 4 + a3;
                    let term1 = (a1 as f64 + 1.0) * (a2 as f64 - 1.0) * (a3 as f64 + 0.5)
                        * (a4 as f64 + 2.0);
                    let term2 =
                        ((a1 + a2) as f64).cos() * ((a3 + 2 * a4) as f64).sin();
                    low[offset] = term1 + term2;
                }
            }
        }
    }
    let folded_low = reshape_to_3d(&dims, 2, &low)?;
    println!(
        "separable 4-way construction folds to tubal rank {}",
        tubal_rank(&folded_low, None)
    );
    Ok(())
}
