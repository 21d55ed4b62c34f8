//! Modular matrix arithmetic and the finite quotients `G_n = SL_d(Z/nZ)`.

mod arith;
mod finite;
mod generators;
mod matrix;

pub use arith::{factorize, smallest_prime_factor};
pub use finite::{crt_check, CrtFactor, CrtReport, FiniteGroup, GroupJson, Subgroup, DEFAULT_ENUMERATION_BUDGET};
pub use generators::GeneratorSet;
pub use matrix::{IntMatrix, ModMatrix};
