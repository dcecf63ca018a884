//! Recovery of missing samples in discrete sequences by optimal
//! approximation with band-limited processes.
//!
//! Given samples on an observed set `D` and a finite missing set `M`, the
//! band-limited sequence closest to the data on `D` (optionally with a
//! Tikhonov penalty `ρ‖x‖²`) has its values on `M` given by the solution of
//!
//! ```text
//! (1 + ρ) y = A y + a(x),    A = 𝕀_M P 𝕀_M,    a(x) = 𝕀_M P ν(x)
//! ```
//!
//! where `P` is convolution with the ideal low-pass kernel
//! `h(t) = Ω sinc(Ω t) / π`. The system is `|M| × |M|`, symmetric, and
//! positive definite for every `ρ >= 0` when `M` is finite.
//!
//! ```
//! use bandfill::{make_mask, recover, BandLimit, IndexWindow, RecoveryProblem, Series};
//!
//! let band = BandLimit::from_fraction_of_pi(0.25)?;
//! let window = IndexWindow::symmetric(200)?;
//! let x = Series::from_fn(window, |t| band.kernel(t - 3));
//! let mask = make_mask(window, [0, 1, 2])?;
//! let sol = recover(&RecoveryProblem::new(x, mask, band))?;
//! assert!((sol.get(1).unwrap() - band.kernel(-2)).abs() < 1e-2);
//! # Ok::<(), bandfill::Error>(())
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod forecast;
pub mod io;
pub mod kernel;
pub mod lab;
pub mod lattice;
pub mod linalg;
pub mod masks;
pub mod operator;
pub mod recover;
pub mod series;
pub mod solver;
pub mod warning;

pub use config::{parse_run_config, RunConfig};
pub use error::{Error, ErrorCategory, Result};
pub use forecast::{dummy_sensitivity, forecast, ForecastResult, ForecastSpec, SensitivityReport};
pub use io::{read_series_csv, write_series_csv, LoadedSeries, SeriesFile};
pub use kernel::{lowpass_kernel, lowpass_kernel_2d, sinc, Band, BandLimit, BandLimit2};
pub use lattice::Lattice;
pub use masks::{apply_mask, make_mask, parse_missing, IndexWindow, MissingSet, ObservationMask};
pub use operator::{
    assemble, assemble_operator, assemble_rhs, diagnostics, truncate_operator, GapOperator,
    OperatorDiagnostics,
};
pub use recover::{recover, recover_2d, recover_single_value, RecoveryProblem, RecoverySolution};
pub use series::Series;
pub use solver::{
    error_bound, solve, solve_direct, solve_neumann, Method, SolveReport, SolverConfig,
};
pub use warning::Warning;

/// Crate version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
