//! Exact verification of the order theory of moduli spaces of sheaves on the
//! subalgebra sketch of a finite-dimensional von Neumann algebra.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: block algebras, standard projections, partial permutations
//!   and the morphisms of the subalgebra category.
//! * [`sketch`]: finite categories with distinguished cocones, presheaf tables
//!   and the sheaf-condition checker.
//! * [`hom`]: the sheaf of standard-position homomorphisms `N → 1_A M 1_A`.
//! * [`moduli`]: the moduli monoid, its order, meets, joins and the
//!   completeness checks.
//! * [`cone`]: divisibility, unique halves and dyadic cone structures.
//! * [`config`] and [`runner`]: the run configuration format and the suite
//!   orchestration behind the `vnlab` binary.

pub mod algebra;
pub mod cone;
pub mod config;
pub mod hom;
pub mod moduli;
pub mod report;
pub mod runner;
pub mod sketch;
