//! Incoherence of factor tensors and what it predicts about sampling.
//!
//! The incoherence parameter mu0 measures how concentrated the singular
//! factors are on individual rows. Spread-out factors (mu0 near 1) make
//! completion easy; spiky factors push mu0 toward its cap and demand more
//! samples. The required sampling rate grows linearly with mu0.
//!
//! ```bash
//! cargo run --release --example incoherence
//! ```

use tubal::{
    generate_low_tubal_rank, incoherence, sample_complexity_bound, t_svd_reduced, unit_tensor,
    Tensor3,
};

fn main() -> tubal::Result<()> {
    let (n1, n2, n3) = (30, 30, 20);

    // Gaussian tensors are benign: their factors are spread out, so mu0
    // lands near the bottom of its [1, min(n1,n2)/r] range.
    for rank in [1, 2, 5] {
        let t = generate_low_tubal_rank(n1, n2, n3, rank, 42)?;
        let report = incoherence(&t_svd_reduced(&t, rank)?)?;
        println!(
            "rank {rank}: mu0 = {:.3} (row caps {:.3} left, {:.3} right, allowed up to {})",
            report.mu0,
            report.mu0_u,
            report.mu0_v,
            n1.min(n2) / rank,
        );
    }

    // A spiky tensor concentrates a factor on one row and drives mu0 up.
    let rank = 2;
    let spike = {
        let mut t = generate_low_tubal_rank(n1, n2, n3, rank, 43)?;
        t = &t + &unit_tensor(0, 0, 0, n1, n2, n3)?.scale(40.0 * t.infinity());
        t
    };
    let report = incoherence(&t_svd_reduced(&spike, rank)?)?;
    println!("spiked tensor: mu0 = {:.3}", report.mu0);

    // The sample-complexity estimate turns mu0 into a sampling rate. The
    // constant is the theory's unspecified knob; comparing rates across
    // mu0 values is the meaningful reading.
    let smooth = incoherence(&t_svd_reduced(
        &generate_low_tubal_rank(n1, n2, n3, rank, 42)?,
        rank,
    )?)?;
    for (label, mu0) in [("smooth", smooth.mu0), ("spiked", report.mu0)] {
        let rate = sample_complexity_bound(n1, n2, n3, rank, mu0, 1.0);
        println!("{label}: suggested sampling rate {rate:.3}");
    }

    // Per-slice incoherence is available too; the tensor-level mu0 never
    // exceeds the worst slice.
    let slices: Vec<String> = smooth
        .mu0_slices
        .iter()
        .map(|m| format!("{m:.2}"))
        .collect();
    println!("per-slice mu0 (smooth)   = [{}]", slices.join(", "));

    // mu0 = 1 is achieved by perfectly flat factors. Sign-pattern columns
    // (a slice of a Walsh matrix) give every row identical energy, so
    // assembling them into a factorization hits the floor exactly.
    let n = 8;
    let walsh_column = |col: usize, i: usize| {
        let sign = if (i & col).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        sign / (n as f64).sqrt()
    };
    let flat_factor = |cols: [usize; 2]| {
        Tensor3::from_fn(n, 2, 4, |i, j, k| if k == 0 { walsh_column(cols[j], i) } else { 0.0 })
    };
    let factors = tubal::TsvdFactors {
        u: flat_factor([1, 2]),
        s: Tensor3::from_fn(2, 2, 4, |i, j, k| f64::from(i == j && k == 0)),
        v: flat_factor([3, 5]),
        r: 2,
    };
    println!("flat construction: mu0 = {:.6}", incoherence(&factors)?.mu0);
    Ok(())
}
