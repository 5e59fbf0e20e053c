//! Lifting solutions of polynomial matrix equations `F(B_1, ..., B_m) = A` from the
//! residue field `F_p` to the truncated local rings `Z/p^l` and `F_p[u]/(u^l)`.
//!
//! The lifting engine ([`lift`]) works for cyclic `A` in the coordinates of its
//! centralizer ([`centralizer`]); the [`search`] module provides brute-force oracles
//! that the engine is checked against.

pub mod centralizer;
pub mod error;
pub mod lift;
pub mod matrix;
pub mod polynomial;
pub mod random;
pub mod ring;
pub mod search;
pub mod wire;

pub use centralizer::{find_cyclic_frame, is_cyclic, min_poly_residue, CentralizerCoords, CyclicFrame};
pub use error::{Error, Result};
pub use lift::{lift_to_length, stream_levels, validate_hypotheses, DerivativeProfile, LiftProblem, LiftTranscript};
pub use matrix::{Matrix, UniPoly};
pub use polynomial::MultiPoly;
pub use ring::{Family, RingElement, RingSpec};
