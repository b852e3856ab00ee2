pub mod bounds;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod inference;
pub mod panel;
pub mod simlab;
