//! Tropical R maps for the A and D geometric crystals, their bilinear
//! (tau-function) form, free-fermion solutions, the vertex-model picture and
//! the ultradiscrete limit.

pub mod bilinear;
pub mod crystal;
pub mod error;
pub mod fermion;
pub mod gen;
pub mod lax;
pub mod numerics;
pub mod tropical_r;
pub mod tropicalizer;
pub mod vertex;

pub use error::{Error, Result};
pub use numerics::{BigC, BigReal, GaussRat, Rat, TropVal};
