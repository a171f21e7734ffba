//! Finite-scale twisted groupoid convolution algebras over `F = R, C`:
//! exact scalars and matrices, weighted ℓ^p spaces with certified
//! p-operator norms, finite meet-semilattices and inverse semigroups,
//! finite étale groupoids with 2-cocycle twists, the convolution
//! *-algebra with its four norms and the projective-norm linear program,
//! spatial partial isometries and the regular representation with
//! integration/disintegration of covariant representations, crossed
//! products by twisted partial group actions, and graph algebras with
//! Leavitt normal forms.

pub mod algebra;
pub mod error;
pub mod graph;
pub mod groupoid;
pub mod matrix;
pub mod opnorm;
pub mod partial_action;
pub mod reps;
pub mod scalar;
pub mod semigroup;
pub mod semilattice;
pub mod simplex;
pub mod space;
pub mod twist;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use opnorm::{opnorm_bracket, opnorm_exact, NormBracket};
pub use scalar::{p_dual, Exponent, Rational, Scalar};
pub use space::{weighted_conjugate, WeightedSpace};
