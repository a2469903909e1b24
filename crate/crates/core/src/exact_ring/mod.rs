//! Exact arithmetic: `Q(q)` scalars, Laurent polynomials over them,
//! symmetrization, exact linear algebra and iterated residues.

pub mod laurent;
pub mod linalg;
pub mod residue;
pub mod scalar;
pub mod series;
pub mod sym;
pub mod upoly;

pub use laurent::{LaurentPoly, VarIndex};
pub use residue::{Factor, RationalExpr, ResidueKernel};
pub use scalar::Scalar;
pub use series::IteratedSeries;
pub use upoly::UPoly;
