//! Command-line front end for the tubal tensor library.
//!
//! Every subcommand is a thin wrapper over a library entry point; file
//! formats and experiment semantics live in the library. Exit codes: 0 on
//! success, 1 when a single completion solve fails to converge, 2 on
//! usage, configuration, or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tubal::{
    bernoulli_mask, certificate_report, complete_entrywise, complete_tubal, derive_seed,
    generate_low_tubal_rank, golfing_certificate, incoherence, multi_rank, parse_kv, read_mask,
    read_tensor, run_diagnostics_sweep, run_phase_grid, spectral_norm, t_svd, t_svd_reduced, tnn,
    tubal_mask, write_mask, write_sweep_csv, write_tensor, DiagnosticsSweepConfig, Error, MaskKind,
    PhaseGridConfig, Result, SamplingMode, SolverConfig, TangentSpace,
};

#[derive(Parser)]
#[command(
    name = "tubal",
    version,
    about = "Tensor factorization, completion, and recovery diagnostics"
)]
struct Cli {
    /// Base seed for randomized work; subcommand seeds derive from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel work (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Directory where output files are written.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic tensor of exact tubal rank.
    Gen {
        /// Rows.
        #[arg(long, default_value_t = 30)]
        n1: usize,
        /// Columns.
        #[arg(long, default_value_t = 30)]
        n2: usize,
        /// Tube length.
        #[arg(long, default_value_t = 20)]
        n3: usize,
        /// Tubal rank of the generated tensor.
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Output file name (under --out-dir).
        #[arg(long, default_value = "tensor.tsv3")]
        out: PathBuf,
    },

    /// Factorize a tensor file and report its ranks and norms.
    Tsvd {
        /// Tensor file to factorize.
        tensor: PathBuf,
        /// Keep only the leading singular tubes.
        #[arg(long)]
        rank: Option<usize>,
        /// Also write the factors as u.tsv3, s.tsv3, v.tsv3.
        #[arg(long)]
        factors: bool,
    },

    /// Draw sampling masks and write them as mask files.
    Sample {
        /// Rows.
        #[arg(long, default_value_t = 30)]
        n1: usize,
        /// Columns.
        #[arg(long, default_value_t = 30)]
        n2: usize,
        /// Tube length.
        #[arg(long, default_value_t = 20)]
        n3: usize,
        /// Observation probability in (0, 1].
        #[arg(long, default_value_t = 0.5)]
        rate: f64,
        /// Observation model: entrywise or tubal.
        #[arg(long, default_value = "entrywise")]
        mode: String,
        /// Number of masks to draw.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Output file name or prefix (under --out-dir).
        #[arg(long, default_value = "mask")]
        out: String,
    },

    /// Recover a tensor from partial observations.
    Complete {
        /// Tensor file holding the observed values.
        tensor: PathBuf,
        /// Mask file marking which values are observed.
        mask: PathBuf,
        /// Output file for the recovered tensor (under --out-dir).
        #[arg(long, default_value = "recovered.tsv3")]
        out: PathBuf,
        /// Flat key=value config file with solver settings.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Inline solver overrides, e.g. --set max_iters=800.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
    },

    /// Run a phase-transition grid and write CSV + PGM heatmaps.
    PhaseGrid {
        /// Flat key=value config file with grid settings.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Inline grid overrides, e.g. --set rates=0.2,0.4,0.6.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        /// Stem of the output files (under --out-dir).
        #[arg(long, default_value = "phase")]
        prefix: String,
    },

    /// Evaluate incoherence and the recovery certificate.
    Diagnose {
        /// Tensor file to diagnose; omit to run a seeded sweep instead.
        tensor: Option<PathBuf>,
        /// Tubal rank of the tensor's factorization (single-run mode).
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Mask file to certify against (single-run mode).
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Observation probability; used to draw a mask when none is given.
        #[arg(long)]
        rate: Option<f64>,
        /// Flat key=value config file with sweep settings (sweep mode).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Inline sweep overrides, e.g. --set trials=10.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        /// Output CSV name for sweep mode (under --out-dir).
        #[arg(long, default_value = "diagnostics.csv")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes (e.g. `tubal tsvd x | head`)
    // instead of panicking on the failed print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Splits one --set argument into its key and value.
fn split_set(arg: &str) -> Result<(&str, &str)> {
    arg.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| Error::Config(format!("--set needs KEY=VALUE, got {arg:?}")))
}

/// Applies a solver key from a config file or --set override.
fn apply_solver_kv(solver: &mut SolverConfig, key: &str, value: &str) -> Result<()> {
    // Reuse the grid config's parser for the solver subset of its schema.
    let mut probe = PhaseGridConfig {
        solver: solver.clone(),
        ..PhaseGridConfig::default()
    };
    match key {
        "rho" | "max_iters" | "tol_primal" | "tol_dual" => probe.apply_kv(key, value)?,
        other => return Err(Error::Config(format!("unknown solver key {other:?}"))),
    }
    *solver = probe.solver;
    Ok(())
}

/// Reads a key=value config file when a path is given.
fn read_config_pairs(path: &Option<PathBuf>) -> Result<Vec<(String, String)>> {
    match path {
        Some(p) => parse_kv(&std::fs::read_to_string(p)?),
        None => Ok(Vec::new()),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::Config("--threads must be at least 1".to_string()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    std::fs::create_dir_all(&cli.out_dir)?;
    let seed = cli.seed.unwrap_or(0);
    let out_dir = cli.out_dir.clone();

    match cli.cmd {
        Command::Gen {
            n1,
            n2,
            n3,
            rank,
            out,
        } => {
            let t = generate_low_tubal_rank(n1, n2, n3, rank, seed)?;
            let path = out_dir.join(out);
            write_tensor(&path, &t)?;
            println!(
                "wrote {n1}x{n2}x{n3} tensor of tubal rank {rank} (seed {seed}) to {}",
                path.display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Tsvd {
            tensor,
            rank,
            factors,
        } => {
            let t = read_tensor(&tensor)?;
            let f = match rank {
                Some(r) => t_svd_reduced(&t, r)?,
                None => t_svd(&t)?,
            };
            let ranks = multi_rank(&t, None);
            println!("dims = {}x{}x{}", t.n1(), t.n2(), t.n3());
            println!("tubal_rank = {}", f.r);
            println!(
                "slice_ranks = {}",
                ranks
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            );
            println!("tubal_nuclear_norm = {}", tnn(&t));
            println!("spectral_norm = {}", spectral_norm(&t));
            if factors {
                for (name, part) in [("u", &f.u), ("s", &f.s), ("v", &f.v)] {
                    let path = out_dir.join(format!("{name}.tsv3"));
                    write_tensor(&path, part)?;
                    println!("wrote {}", path.display());
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Sample {
            n1,
            n2,
            n3,
            rate,
            mode,
            count,
            out,
        } => {
            let mode = SamplingMode::parse(&mode)?;
            for i in 0..count {
                let mask_seed = if count == 1 {
                    seed
                } else {
                    derive_seed(seed, &[i as u64])
                };
                let mask = match mode {
                    SamplingMode::Entrywise => bernoulli_mask(n1, n2, n3, rate, mask_seed)?,
                    SamplingMode::Tubal => tubal_mask(n1, n2, n3, rate, mask_seed)?,
                };
                let name = if count == 1 {
                    format!("{out}.tsvm")
                } else {
                    format!("{out}_{i}.tsvm")
                };
                let path = out_dir.join(name);
                write_mask(&path, &mask)?;
                println!(
                    "wrote {} mask ({} of {} observed, seed {mask_seed}) to {}",
                    mode.label(),
                    mask.observed_count(),
                    n1 * n2 * n3,
                    path.display()
                );
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Complete {
            tensor,
            mask,
            out,
            config,
            sets,
        } => {
            let observed = read_tensor(&tensor)?;
            let mask = read_mask(&mask)?;
            let mut solver = SolverConfig::default();
            for (k, v) in read_config_pairs(&config)? {
                apply_solver_kv(&mut solver, &k, &v)?;
            }
            for s in &sets {
                let (k, v) = split_set(s)?;
                apply_solver_kv(&mut solver, k, v)?;
            }
            let (recovered, iterations, converged, observed_rse) = match mask.kind() {
                MaskKind::Entrywise => {
                    let (z, r) = complete_entrywise(&observed, &mask, &solver)?;
                    (z, r.iterations, r.converged, r.observed_rse)
                }
                MaskKind::Tubal => {
                    let (z, r) = complete_tubal(&observed, &mask, &solver)?;
                    (z, r.iterations, r.converged, r.observed_rse)
                }
            };
            let path = out_dir.join(out);
            write_tensor(&path, &recovered)?;
            println!("iterations = {iterations}");
            println!("converged = {converged}");
            println!("observed_rse = {observed_rse}");
            println!("wrote {}", path.display());
            if converged {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("solver did not converge within the iteration cap");
                Ok(ExitCode::from(1))
            }
        }

        Command::PhaseGrid {
            config,
            sets,
            prefix,
        } => {
            let mut cfg = PhaseGridConfig::default();
            for (k, v) in read_config_pairs(&config)? {
                cfg.apply_kv(&k, &v)?;
            }
            for s in &sets {
                let (k, v) = split_set(s)?;
                cfg.apply_kv(k, v)?;
            }
            if let Some(seed) = cli.seed {
                cfg.base_seed = seed;
            }
            let grid = run_phase_grid(&cfg)?;
            let csv = out_dir.join(format!("{prefix}.csv"));
            let rec = out_dir.join(format!("{prefix}_recovery.pgm"));
            let err = out_dir.join(format!("{prefix}_rse.pgm"));
            grid.write_csv(&csv)?;
            grid.write_recovery_pgm(&rec)?;
            grid.write_rse_pgm(&err)?;
            let cells = grid.cells();
            let recovered = cells.iter().filter(|c| c.success).count();
            println!(
                "ran {} trials over {} ranks x {} rates ({} mode): {recovered} recovered",
                cells.len(),
                grid.ranks().len(),
                grid.rates().len(),
                cfg.mode.label()
            );
            for path in [&csv, &rec, &err] {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Diagnose {
            tensor,
            rank,
            mask,
            rate,
            config,
            sets,
            out,
        } => match tensor {
            Some(tensor) => {
                let t = read_tensor(&tensor)?;
                let f = t_svd_reduced(&t, rank)?;
                let inc = incoherence(&f)?;
                print!("{}", inc.to_kv());
                let mask = match (mask, rate) {
                    (Some(path), _) => read_mask(&path)?,
                    (None, Some(p)) => bernoulli_mask(t.n1(), t.n2(), t.n3(), p, seed)?,
                    (None, None) => {
                        println!("certificate skipped: pass --mask or --rate to evaluate it");
                        return Ok(ExitCode::SUCCESS);
                    }
                };
                let tangent = TangentSpace::new(&f)?;
                let p = mask.p();
                let (candidate, _) =
                    golfing_certificate(&tangent, p, derive_seed(mask.seed(), &[2]))?;
                let report = certificate_report(&candidate, &tangent, &mask, p)?;
                print!("{}", report.to_kv());
                Ok(ExitCode::SUCCESS)
            }
            None => {
                let mut cfg = DiagnosticsSweepConfig::default();
                for (k, v) in read_config_pairs(&config)? {
                    cfg.apply_kv(&k, &v)?;
                }
                for s in &sets {
                    let (k, v) = split_set(s)?;
                    cfg.apply_kv(k, v)?;
                }
                if let Some(seed) = cli.seed {
                    cfg.base_seed = seed;
                }
                if let Some(rate) = rate {
                    cfg.rate = rate;
                }
                let rows = run_diagnostics_sweep(&cfg)?;
                let path = out_dir.join(out);
                write_sweep_csv(&path, &rows)?;
                let passed = rows.iter().filter(|r| r.passed).count();
                let passed_loose = rows.iter().filter(|r| r.passed_loose).count();
                println!(
                    "{} trials at rank {} rate {}: {passed} passed strict, {passed_loose} passed loose",
                    rows.len(),
                    cfg.rank,
                    cfg.rate
                );
                println!("wrote {}", path.display());
                Ok(ExitCode::SUCCESS)
            }
        },
    }
}
