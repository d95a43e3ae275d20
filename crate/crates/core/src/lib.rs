//! Rigorous dual lower bounds for the Cohn-Elkies sphere packing linear
//! program, obtained from the finite LP over `Z_m^d`.
//!
//! The pipeline: enumerate orbit representatives of `Z_m^d` under the
//! hyperoctahedral group ([`orbits`]), build the symmetrized Fourier matrix
//! ([`symdft`]), solve the radialized dual LP in floating point with a
//! positivity buffer ([`lp`]), round to an exact rational certificate and
//! verify it with exact cyclotomic arithmetic ([`certify`]). Closed-form
//! certificates for `m = 4` live in [`closedform`].

pub mod certify;
pub mod closedform;
pub mod exactnum;
pub mod lp;
pub mod orbits;
pub mod pipeline;
pub mod reduction;
pub mod symdft;

pub use orbits::{OrbitIndex, Params, Rep};
