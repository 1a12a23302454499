//! Library surface of the command-line front end, shared with the
//! integration and acceptance suites.

pub mod analyses;
pub mod report;
pub mod spec;
