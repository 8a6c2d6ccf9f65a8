//! The four LWMY families and the transformations built on them.

mod function;
mod transform;

pub use function::{BarConjugate, Family, LwmyFunction};
pub use transform::Transform;
