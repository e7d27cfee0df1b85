pub mod bitflip;
pub mod bitvec;
pub mod circulant;
pub mod dfr;
pub mod error;
pub mod params;
pub mod pke;
pub mod qc;
pub mod rng;
pub mod security;
pub mod wire;
