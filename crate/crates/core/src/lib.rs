//! Exact construction of twisted Zhu algebras A_g(V), the twisted
//! bimodule A_{g₁g₂,g₂}(M¹), and fusion-rule upper bounds, on a rank-1
//! free-boson orbifold backend, with machine verification of the
//! algebraic identities these objects satisfy.
//!
//! Everything is computed over the cyclotomic field ℚ(ζ_{2T}) with
//! arbitrary-precision rationals; there is no floating point anywhere.

pub mod scalar;

pub mod fock;
pub mod products;
pub mod echelon;
pub mod zhu;
pub mod bimodule;
pub mod intertwiner;
pub mod fusion;
pub mod oracle;
pub mod scenario;
pub mod report;
pub mod runner;
