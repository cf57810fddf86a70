//! File formats, randomized verification suites and the command-line front end
//! for [`subbary_core`].

pub mod cli;
pub mod io;
pub mod verifier;
