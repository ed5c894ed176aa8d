//! Exact computation of exponents of Gauss-Manin type systems attached to
//! `f in k[x, g^-1]`, via truncated cokernels over `k((t))[x, g^-1]`.

pub mod arrangements;
pub mod koszul;
pub mod linalg;
pub mod operators;
pub mod par;
pub mod rational;
pub mod reduction;
pub mod ring;
pub mod upoly;

pub use koszul::{
    exponent_test, exponent_test_with, generic_system, koszul_cohomology, EngineError, EngineOptions, ExponentReport,
    ProblemInstance, SolverPath, Verdict, WindowSchedule,
};
pub use par::ExecMode;
pub use rational::Rational;
pub use ring::{DegreeWindow, Monomial, RingElement};
