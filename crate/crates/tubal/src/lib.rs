//! Tubal tensor algebra, factorization, completion, and diagnostics.

pub mod completion;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod sampling;
pub mod tensor;
pub mod tsvd;

pub use completion::{
    complete_entrywise, complete_fourier_slice, complete_tubal, rse, SolveReport, SolverConfig,
    TubalReport,
};
pub use diagnostics::{
    certificate_report, default_batch_count, golfing_certificate, golfing_run, incoherence,
    sample_complexity_bound, tangent_sampling_deviation, uv_product_norms, CertificateReport,
    IncoherenceReport, CERTIFICATE_POWER_ITERS, POWER_TOL,
};
pub use error::{Error, Result};
pub use experiments::{
    derive_seed, generate_low_tubal_rank, parse_kv, run_diagnostics_sweep, run_phase_grid,
    write_sweep_csv, CellResult, DiagnosticsSweepConfig, PhaseGrid, PhaseGridConfig, SamplingMode,
    SweepRow, GRID_CSV_HEADER,
};
pub use io::{
    csv_export, read_mask, read_tensor, read_text, reshape_from_3d, reshape_to_3d, write_mask,
    write_tensor,
};
pub use sampling::{
    bernoulli_mask, p_omega, p_t, p_t_perp, r_omega, tubal_mask, MaskKind, SampleMask,
    TangentSpace, ORTHOGONALITY_TOL,
};
pub use tsvd::{
    default_rank_tol, multi_rank, spectral_norm, t_svd, t_svd_reduced, t_svt, tnn, tubal_rank,
    TsvdFactors,
};
pub use tensor::{
    column_basis, fft3, identity_tensor, ifft3, inner_product, linf_2star, t_product, t_transpose,
    tube_basis, unit_tensor, FourierTensor, Tensor3, TensorColumn, TensorTube, IM_TOL,
};
