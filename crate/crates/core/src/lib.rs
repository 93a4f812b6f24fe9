//! Exact slope calculus for filtered vector spaces over trivially valued
//! fields, graded linear series with their Okounkov bodies and concave
//! transforms, and chi-volumes of toric adelic divisors.

pub mod adelic;
pub mod axioms;
pub mod error;
pub mod filtration;
pub mod graded;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod pl;
pub mod polytope;
pub mod rational;
pub mod toric;

pub use error::{Error, Result};
pub use filtration::{FilteredSpace, SlopeProfile};
pub use rational::{ExtRational, Rational};
pub use adelic::{AdelicCurveSpec, DiagonalAdelicBundle};
pub use graded::MonomialSeries;
pub use pl::ConcavePLFunction;
pub use polytope::LatticePolytope;
pub use toric::ToricAdelicDivisor;
