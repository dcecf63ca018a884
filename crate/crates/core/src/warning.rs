use serde::Serialize;

/// Non-fatal conditions attached to solver and recovery results.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// `1 + ρ − ‖A‖` fell below the configured threshold.
    IllConditioned { margin: f64, threshold: f64 },
    /// The observed set contains no half-line, so the band-limited extension
    /// is not known to be unique. The finite system still solves.
    NoObservedHalfLine,
    /// All observed samples were zero; the solve was skipped.
    ZeroInput,
    /// Forecast sensitivity rose from one gap size to the next.
    SensitivityIncrease {
        gap: usize,
        previous: f64,
        current: f64,
    },
}
