//! Least-privilege tooling for a CommonJS-style module language.

pub mod check;
pub mod cli;
pub mod corpus;
pub mod infer;
pub mod lang;
pub mod par;
pub mod perm;
pub mod quant;
pub mod resolve;
pub mod runtime;
