//! Feedback stabilization of Lie-Poisson systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: Lie algebras, coadjoint actions, linear maps between algebras and duals.
//! * [`kaluza`]: Kaluza-Klein metric data and the free Lie-Poisson field.
//! * [`gains`]: controlled-Lagrangian matching and the Euler-Poincaré local form.
//! * [`closed_loop`]: double-bracket dissipation, IDA-PBC structure maps and the closed-loop fields.
//! * [`analysis`]: energy-Casimir variations and Lyapunov functions.
//! * [`dynamics`]: fixed-step integrators with monitor series.
//! * [`satellite`] and [`mhd2d`]: the two worked systems.
//! * [`verify`]: seeded structural checks and threshold sweeps.
//!
//! Dual elements and algebra elements are plain [`Vector`]s. The pairing is the
//! Euclidean dot product in the chosen coordinates; the fluid model picks its
//! coordinates so that this holds (see [`mhd2d`]).

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod analysis;
pub mod closed_loop;
pub mod dynamics;
pub mod error;
pub mod gains;
pub mod kaluza;
pub mod mhd2d;
pub mod report;
pub mod satellite;
pub mod verify;

pub use algebra::{LieAlgebra, LinearMap, Operator, ProductAlgebra, StructureConstants};
pub use closed_loop::{Chart, ControlledSystem, Mode, Observable, State};
pub use error::{Error, Result};
pub use gains::{EpData, GainSet, MatchFailure, MatchedStructure};
pub use kaluza::{KaluzaKlein, Orientation};
pub use report::{ScenarioReport, Verdict};

/// Dense column vector used for algebra elements and dual elements alike.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix.
pub type Matrix = nalgebra::DMatrix<f64>;
