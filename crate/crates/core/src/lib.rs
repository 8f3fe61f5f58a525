pub mod algebra;
pub mod averaging;
pub mod chain;
pub mod error;
pub mod frame;
pub mod homology;
pub mod homotopy;
pub mod linalg;
pub mod norms;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Q;
