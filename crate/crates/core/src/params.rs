//! Scheme parameters and the named parameter sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qc::{Flavor, QcParams};

/// Parameters of the concatenated scheme. Both component codes share
/// `n0` and `r`; `w1`/`t1` belong to the MDPC code, `w2`/`t2` to the LDPC code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchemeParams {
    pub n0: usize,
    pub r: usize,
    pub w1: usize,
    pub w2: usize,
    pub t1: usize,
    pub t2: usize,
}

impl SchemeParams {
    pub fn new(n0: usize, r: usize, w1: usize, w2: usize, t1: usize, t2: usize) -> Result<Self> {
        let p = SchemeParams { n0, r, w1, w2, t1, t2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "r = {} must be odd (r odd is required by key generation)",
                self.r
            )));
        }
        self.mdpc().validate()?;
        self.ldpc().validate()?;
        if self.t1 > self.n() || self.t2 > self.n() {
            return Err(Error::Parameter(format!(
                "error weights ({}, {}) exceed n = {}",
                self.t1,
                self.t2,
                self.n()
            )));
        }
        Ok(())
    }

    pub fn mdpc(&self) -> QcParams {
        QcParams {
            n0: self.n0,
            r: self.r,
            w: self.w1,
            flavor: Flavor::Mdpc,
        }
    }

    pub fn ldpc(&self) -> QcParams {
        QcParams {
            n0: self.n0,
            r: self.r,
            w: self.w2,
            flavor: Flavor::Ldpc,
        }
    }

    pub fn n(&self) -> usize {
        self.n0 * self.r
    }

    pub fn k0(&self) -> usize {
        self.n0 - 1
    }

    pub fn k(&self) -> usize {
        self.k0() * self.r
    }

    pub fn plaintext_bits(&self) -> usize {
        2 * self.k()
    }

    pub fn ciphertext_bits(&self) -> usize {
        2 * self.n()
    }

    /// Compact public key: circulant rows of `S G_1` and `S G_2`,
    /// `2 (n0 - 1) n0 r` bits.
    pub fn public_key_bits(&self) -> usize {
        2 * self.k0() * self.n0 * self.r
    }

    /// Size a CCA2-converted key of `2 r` bits would take. Reported only; no
    /// such conversion is implemented.
    pub fn cca2_public_key_bits(&self) -> usize {
        2 * self.r
    }
}

/// Kilobytes (1024 bytes) taken by `bits` bits.
pub fn kbytes(bits: usize) -> f64 {
    bits as f64 / 8.0 / 1024.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    pub security_bits: u32,
    pub params: SchemeParams,
}

/// Toy LDPC error weight, from `select_t_for_dfr` on (n0 = 2, r = 523, w = 8)
/// with the default LDPC decoder, target 1e-3, budget 10^4, seed `T_SELECTION_SEED`.
pub const TOY_T2: usize = 4;
/// Toy MDPC error weight, from `select_t_for_dfr` on (n0 = 2, r = 523, w = 30)
/// with the default MDPC decoder, target 1e-3, budget 10^4, seed `T_SELECTION_SEED`.
pub const TOY_T1: usize = 12;
/// Seed byte (repeated 32 times) used to derive every stored error weight.
pub const T_SELECTION_SEED: u8 = 0x5e;

const fn p(r: usize, w1: usize, w2: usize, t1: usize, t2: usize) -> SchemeParams {
    SchemeParams { n0: 2, r, w1, w2, t1, t2 }
}

/// Named parameter sets. The LDPC error weights of the full-size sets come
/// from `select_t_strided` (stride 16) with the default LDPC decoder, target
/// 2^-7, budget 1280 and seed `T_SELECTION_SEED`.
pub const PRESETS: &[Preset] = &[
    Preset { name: "cca128", security_bits: 128, params: p(11779, 142, 14, 134, 464) },
    Preset { name: "cpa128", security_bits: 128, params: p(10163, 142, 14, 134, 380) },
    Preset { name: "cca192", security_bits: 192, params: p(24821, 206, 15, 199, 969) },
    Preset { name: "cpa192", security_bits: 192, params: p(19853, 206, 15, 199, 731) },
    Preset { name: "cca256", security_bits: 256, params: p(40597, 274, 15, 264, 1516) },
    Preset { name: "cpa256", security_bits: 256, params: p(32749, 274, 15, 264, 1165) },
    Preset { name: "toy", security_bits: 0, params: p(523, 30, 8, TOY_T1, TOY_T2) },
];

pub fn preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for p in PRESETS {
            p.params.validate().unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }

    #[test]
    fn key_size_arithmetic() {
        let p = preset("cca128").unwrap().params;
        assert_eq!(p.n(), 23558);
        assert_eq!(p.k(), 11779);
        assert_eq!(p.public_key_bits(), 47_116);
        assert_eq!(p.cca2_public_key_bits(), 23_558);
        assert!((kbytes(47_116) - 5.751).abs() < 5e-4);
        assert!((kbytes(23_558) - 2.876).abs() < 5e-4);
    }

    #[test]
    fn even_r_is_rejected_with_reason() {
        let err = SchemeParams::new(2, 524, 30, 8, 10, 2).unwrap_err();
        assert!(err.to_string().contains("odd"));
    }
}
