//! Test-signal synthesis, perturbation, an independent brute-force oracle,
//! and a seeded Monte Carlo harness.

mod experiment;
mod oracle;
mod signal;

pub use experiment::{
    run_experiment, write_report_csv, Aggregate, ExperimentConfig, ExperimentReport, FixedParams,
    SignalFamily, Sweep, TrialRow, RNG_ALGORITHM,
};
pub use oracle::{gauss_legendre, oracle_recover, OracleSolution, ORACLE_REFINEMENT_TOL};
pub use signal::{add_noise, gen_bandlimited, NoisySeries, SignalKind, SignalSpec};
