//! Classical combinators over cubefull levels: the newform trace formula,
//! newspace dimensions, and the Petersson formula for newforms, with the
//! Eichler-Selberg and Petersson machinery underneath.

pub mod arith;
pub mod bessel;
pub mod class_number;
pub mod kloosterman;
pub mod petersson;
pub mod trace;

pub use arith::{is_cubefull, mobius_pairs, squarefree_divisors, MobiusPair};
pub use bessel::bessel_j;
pub use class_number::hurwitz_class_number;
pub use kloosterman::kloosterman;
pub use petersson::{petersson_delta, petersson_delta_new, PeterssonValue};
pub use trace::{
    dim_cusp, dim_new, dim_new_inversion_oracle, trace_hecke, trace_hecke_new, LevelWeight,
};
