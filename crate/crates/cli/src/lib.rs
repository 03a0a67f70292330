//! Batch front-end for the exact-category toolkit: JSON instance
//! documents in, machine-readable reports out, plus the registered
//! brute-force oracle suites.

pub mod instance;
pub mod oracle;
pub mod report;
pub mod run;
