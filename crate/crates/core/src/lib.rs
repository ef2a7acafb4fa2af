pub mod asymptotics;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod logcomplex;
pub mod oracles;
pub mod quadrature;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};
pub use logcomplex::LogComplex;
pub use rng::{RngStream, StreamKey};
