//! File formats, the end-to-end pipeline and the `xslit` command line on top
//! of [`xslit_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod pipeline;
pub mod recipes;

pub use error::{Error, ErrorKind, Result};
pub use xslit_core;
