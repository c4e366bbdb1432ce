//! Command-line companion to `noma-mec-core`: single-instance solving,
//! deterministic parameter sweeps rendered as CSV, and randomized
//! closed-form-versus-brute-force verification campaigns.
//!
//! Everything here is a pure function of the flags (and the seed), so every
//! subcommand's output is byte-identical across runs — the library layer
//! returns strings and rows, and the thin binary in `main.rs` maps errors
//! onto the documented process exit codes.

pub mod rng;
pub mod sweep;
pub mod verify;
