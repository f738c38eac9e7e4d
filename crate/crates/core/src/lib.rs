//! Fast coherent-state transport in harmonic traps.
//!
//! Builds bang-bang (BB), bang-bang-bang (BBB) and squeezed BBB schedules from
//! closed-form timings, evolves Gaussian states through them exactly, and
//! checks the delivered state with a closed-form overlap and a split-operator
//! wavefunction integrator.
//!
//! ```
//! use coherent_transport::protocols::{bbb_schedule, BbbParams};
//! use coherent_transport::frame::evolve_from_ground;
//!
//! let schedule = bbb_schedule(&BbbParams::new(6.0, 6.0, 1.0).unwrap()).unwrap();
//! let end = evolve_from_ground(&schedule).unwrap().final_state;
//! assert!((end.x() - 6.0).abs() < 1e-9 && end.p().abs() < 1e-9);
//! ```

pub mod error;
pub mod frame;
pub mod oracle;
pub mod protocols;
pub mod qsl;
pub mod squeeze;

pub use error::{Error, Result};
pub use frame::{evolve_schedule, evolve_segment, rotate_about, Frame, GaussianState, Schedule, Segment};
