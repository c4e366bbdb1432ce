//! Energy-minimal transmit-power scheduling for a two-user uplink in which a
//! delay-tolerant user offloads computation to an edge server over
//! non-orthogonal multiple access (NOMA).
//!
//! Two users share the uplink. User m is delay-sensitive and must finish its
//! own transmission within a short deadline `d_m`; user n has `n_nats` of
//! task data to offload and a longer deadline `d_n`. During the first `d_m`
//! seconds the two signals are superimposed and the base station applies
//! successive interference cancellation (SIC); for the remaining window of
//! up to `d_n - d_m` seconds user n transmits alone. The crate answers one
//! question: how should user n split its transmit power between the two
//! phases, and which SIC decoding order should the base station use, so that
//! user n's energy bill is minimal while both deadlines hold?
//!
//! Modules:
//!
//! - [`model`]: scenario types, achievable rates, energy accounting, and the
//!   power thresholds that separate the solution regimes.
//! - [`closed_form`]: exact solutions for both decoding orders and the
//!   selector that picks the cheaper one per scenario.
//! - [`oracle`]: an independent brute-force minimizer plus optimality
//!   certificates (KKT residuals), used to audit the closed forms.
//!
//! The crate is `no_std`-compatible: disable the default `std` feature and
//! enable `libm` to route the scalar math through software implementations.
//!
//! # Quick start
//!
//! ```
//! use noma_mec_core::closed_form::solve_hybrid_sic;
//! use noma_mec_core::model::{DecodingOrder, Scenario, StrategyKind};
//!
//! // 20 nats to offload; deadlines 40 s and 80 s; unit gains; user m
//! // transmits at 1 W.
//! let s = Scenario::from_parts(20.0, 40.0, 80.0, 1.0, 1.0, 1.0)?;
//! let best = solve_hybrid_sic(&s);
//! let a = best.allocation().expect("this scenario is feasible");
//!
//! // Cancelling user m first and spending equal power in both phases is
//! // cheapest here.
//! assert_eq!(a.order, DecodingOrder::UmFirst);
//! assert_eq!(a.kind, StrategyKind::HybridEqualPower);
//! assert!((best.energy_or_inf() - 22.72203333501932).abs() < 1e-9);
//! # Ok::<(), noma_mec_core::model::ModelError>(())
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("enable at least one of the `std` or `libm` features");

pub mod closed_form;
mod math;
pub mod model;
pub mod oracle;
