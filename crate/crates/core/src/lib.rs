//! Numerical witnesses for disjoint universality of families of Taylor-type
//! partial-sum operators.

pub mod bw;
pub mod constructor;
pub mod func;
pub mod gaps;
pub mod geometry;
pub mod lsq;
pub mod mp;
pub mod poly;
pub mod potential;
pub mod seq;

pub use num_complex::Complex64;
