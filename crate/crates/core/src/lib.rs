pub mod atoms;
pub mod cli;
pub mod corpus;
pub mod decompose;
pub mod error;
pub mod func_repr;
pub mod functionals;
pub mod geometry;
pub mod maximal;
pub mod measure;
pub mod special;

pub use error::{Error, Result};
