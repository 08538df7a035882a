//! Test ideals of principal pairs over finite fields, computed through the
//! Frobenius trace map, and exact checks of Bertini-type statements for them.

pub mod bertini;
pub mod ff;
pub mod frobenius;
pub mod groebner;
pub mod poly;
