//! Parameter synthesis for bounded parametric timed automata using parametric
//! extrapolation and integer hulls.

pub mod poly;

pub type Rational = num_rational::BigRational;
pub mod model;
pub mod symbolic;
pub mod synthesis;
pub mod oracle;
