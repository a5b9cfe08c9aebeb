//! Exact numeric bedrock: cyclotomic field elements, guaranteed real
//! enclosures, rational/field linear algebra, and integer lattice forms.

pub mod cyclotomic;
pub mod hnf;
pub mod interval;
pub mod mat;

pub use cyclotomic::FieldElement;
pub use hnf::{hnf, integer_kernel, rational_kernel_over_q, IntegerLatticeBasis};
pub use interval::RealInterval;
pub use mat::{dot, FeMat, Mat, QMat, Scalar};
