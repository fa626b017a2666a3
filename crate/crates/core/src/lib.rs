pub mod coderiv;
pub mod cohomology;
pub mod deform;
pub mod error;
pub mod graded;
pub mod basealg;
pub mod harrison;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod structure;
pub mod versal;
pub mod scalar;
