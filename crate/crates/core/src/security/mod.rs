//! Attack-side tooling: ISD cost models, a small Stern search and the
//! weak-key demonstration against the LDPC half.

pub mod attack;
pub mod isd;
pub mod stern;
