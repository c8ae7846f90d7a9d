//! Numerical verification toolkit for cycle-integral identities attached to
//! even Maass cusp forms on SL(2,ℤ).
//!
//! The library computes, at double precision and desk scale, every quantity
//! appearing in the chain that links half-integral-weight Fourier coefficients
//! to twisted central L-values:
//!
//! * special functions: complex Γ, K-Bessel with complex order, J/I-Bessel,
//!   Whittaker M, completed ζ ([`numerics`]);
//! * exponential sums: Kloosterman sums, their half-integral-weight variants
//!   K⁺, and Gauss sums attached to Kronecker characters ([`arithmetic`]);
//! * integral binary quadratic forms of square discriminant, genus characters
//!   and the associated geodesic cycles ([`quadforms`]);
//! * Hecke–Maass cusp forms located by Hejhal's collocation method
//!   ([`maassforms`]);
//! * Dirichlet and twisted L-functions, including central values by an
//!   approximate functional equation ([`lfunctions`]);
//! * Eisenstein and Niebur–Poincaré series in both lattice-sum and Fourier
//!   form ([`poincare`]);
//! * the cycle integrals themselves together with closed-form right-hand
//!   sides ([`cycles`]);
//! * a verification harness and CLI that packages identity checks into
//!   machine-readable reports ([`harness`]).
//!
//! Everything is pure Rust with no external numerical libraries; each
//! nontrivial routine carries an independent cross-check in its test module.

pub mod arithmetic;
pub mod cycles;
pub mod harness;
pub mod lfunctions;
pub mod maassforms;
pub mod numerics;
pub mod poincare;
pub mod quadforms;

pub use num_complex::Complex64;
