//! Parsing, the solving pipeline, certificates and the brute-force oracle.

pub mod cert;
pub mod dsl;
pub mod oracle;
pub mod pipeline;

pub use cert::{verify_certificate, CertCheck, Certificate};
pub use dsl::{parse, ParseError, Parsed};
pub use oracle::{brute_oracle, OracleOutcome};
pub use pipeline::{prepare, solve, solve_prepared, Prepared, SolveConfig, SolveError, Status, Verdict};
