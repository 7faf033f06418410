//! Weighted shift operators on two-sided and one-sided sequence spaces:
//! classification of shadowing and expansivity, pseudotrajectory
//! shadowing with certified bounds, and the conjugacy with Lipschitz
//! perturbations.
//!
//! The core is generic over the scalar type; see [`Scalar`] and [`Real`].

pub mod classify;
pub mod conjugacy;
pub mod error;
pub mod io;
pub mod scalar;
pub mod shadowing;
pub mod spaces;
pub mod weights;

pub use classify::{
    classify_shadowing, classify_shadowing_with, classify_unilateral, fhc_check, stable_set_member,
    uniform_expansivity_class, ClassificationReport, ExpansivityClass, ShadowingClass, UnilateralClass, Verdict,
};
pub use conjugacy::{
    conjugacy_residual, conjugate_forward, conjugate_inverse, epsilon_budget, extend_lipschitz, f_inverse_eval,
    ConjugacyResult, PerturbationMap,
};
pub use error::{Error, Result};
pub use scalar::{powi, ArithmeticMode, Real, Scalar, ScalarField};
pub use shadowing::{
    adversarial_pseudotrajectory, oracle_best_shadow, random_pseudotrajectory, shadow_bilateral, shadow_positive,
    verify_shadow, AdversarialKind, AdversarialParams, OracleResult, PseudoTrajectory, ShadowResult,
};
pub use spaces::{norm, Direction, SeqVector, ShiftOperator, SpaceSpec, UnilateralShift};
pub use weights::{UnilateralWeights, WeightSequence};

pub use num_complex::Complex;
pub use num_traits;
pub use num_rational::BigRational;

pub type Rational = BigRational;
pub type Complex64 = Complex<f64>;

pub type WeightsF64 = WeightSequence<f64>;
pub type WeightsF32 = WeightSequence<f32>;
pub type WeightsQ = WeightSequence<Rational>;
pub type WeightsC64 = WeightSequence<Complex64>;
pub type VectorF64 = SeqVector<f64>;
pub type VectorQ = SeqVector<Rational>;
pub type VectorC64 = SeqVector<Complex64>;
