//! Exact verification toolkit for segment-indexed averaging idempotents.
//!
//! A *segment* `m..n` of integers indexes a congruence subgroup (an Eichler
//! order unit group) and hence an averaging idempotent `e_ℓ` acting on any
//! module the group acts on.  This crate implements the calculus of those
//! idempotents in four independent realizations and cross-checks them:
//!
//! * [`finite`] — the subgroups realized inside `SL2(Z/p^L)`, with the
//!   idempotents as exact rational matrices on a coset module;
//! * [`tree`] — the conditioned-resampling avatar on non-backtracking paths
//!   of the `(q+1)`-regular tree, with exact rational distributions;
//! * [`kirillov`] — spherical coefficient sequences, Gram-matrix models and
//!   the diagonal newvector model;
//! * [`classical`] — the downstream combinators: newform trace formula,
//!   newspace dimensions and the Petersson formula for newforms.
//!
//! [`seg`] houses the segment arithmetic every other module indexes by.

pub mod classical;
pub mod error;
pub mod finite;
pub mod kirillov;
pub mod seg;
pub mod tree;

pub use error::{Error, Result};
pub use seg::{Composition, Segment, SignedSegmentCombo};
