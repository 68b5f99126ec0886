//! Analytic models for heralded microwave-optical Bell pair generation with
//! diamond color centers.
//!
//! The crate is organised by physical subsystem:
//!
//! * [`qed`]: cavity reflection spectra and the three spin-photon entangling
//!   schemes (amplitude carving, on-off and push-pull phase schemes), plus
//!   waveform distortion of finite photon pulses.
//! * [`circuit`]: zero-point current fluctuations of a lumped microwave
//!   resonator, from closed form and from sampled frequency responses.
//! * [`spin`]: color-center catalog, optical and magnetic dipoles, and the
//!   spin-resonator coupling rate.
//! * [`lambda`]: three-level Λ-system master equation and the resulting
//!   effective reflectivity for emitters with a small Debye-Waller factor.
//! * [`retrieval`]: Purcell retrieval, Kraus channels and the entanglement
//!   fidelity of the heralded Bell state.
//! * [`protocol`]: overall probability, heralding rate and detection-time
//!   optimisation.
//! * [`optical`]: mode volume, optical coupling and cooperativity from
//!   field-profile grids.
//!
//! All internal arithmetic is in SI units with angular frequencies in rad/s.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod constants;
pub mod error;
pub mod io;
pub mod lambda;
pub mod numeric;
pub mod optical;
pub mod presets;
pub mod protocol;
pub mod qed;
pub mod report;
pub mod retrieval;
pub mod spin;

pub use error::{Error, Result};
pub use num_complex::Complex64;
