pub mod address;
pub mod codes;
pub mod concat;
pub mod css;
pub mod designed;
pub mod error;
pub mod gates;
pub mod gf;
pub mod ortho;
pub mod tri_t;
pub mod verify;

pub use error::{Error, Result};
pub use gf::{Elem, FieldCtx, SelfDualBasis};
