pub mod archimedean;
pub mod choice;
pub mod cone;
pub mod error;
pub mod exec;
pub mod functional;
pub mod lottery;
pub mod lp;
pub mod numeric;

pub use cone::{Background, DesirCone, OptionSpace};
pub use error::{Error, Result};
pub use exec::Exec;
pub use functional::{Functional, LinearF, SuperlinF};
pub use numeric::{Rational, Vector};
