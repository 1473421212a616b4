//! Two-level pre/post-selected interferometry.
//!
//! * [`state`]: pure states, Bloch vectors, Pancharatnam phases and signed
//!   geodesic-triangle solid angles.
//! * [`operator`]: Hermitian observables, expectation and weak values, and the
//!   momentum-conditioned evolution `exp(-i G p A / hbar)`.
//! * [`eraser`]: two-path quantum eraser fringes and the phase shifts caused
//!   by labelling and by post-selection.
//! * [`probe`]: Gaussian pointer simulation of a weak measurement, checked
//!   against the closed-form displacement `G Re<A>_w`.
//! * [`experiment`]: configuration, CSV result tables and the runners behind
//!   the command-line tool.

pub mod eraser;
pub mod error;
pub mod experiment;
pub mod operator;
pub mod probe;
pub mod state;

pub use error::{Error, Result};
