//! Salted, memory-hard password hashing (Argon2id) over the canonical form.

use std::fmt;
use std::str::FromStr;

use argon2::{Algorithm, Argon2, Block, Params, Version};
use rand::TryRngCore;
use serde::{Deserialize, Serialize};
use subtle::ConstantTimeEq;
use thiserror::Error;

use crate::codec::CanonicalForm;
use crate::placement::Placement;

pub const SALT_LEN: usize = 16;
pub const HASH_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KdfError {
    #[error("invalid KDF parameters: {0}")]
    Params(String),
    #[error("unknown KDF {0:?}")]
    UnknownKdf(String),
    #[error("unknown KDF profile {0:?} (expected test, interactive or moderate)")]
    UnknownProfile(String),
    #[error("KDF failure: {0}")]
    Hash(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KdfId {
    Argon2id,
}

impl KdfId {
    pub fn as_str(self) -> &'static str {
        match self {
            KdfId::Argon2id => "argon2id",
        }
    }

    pub fn hash_len(self) -> usize {
        HASH_LEN
    }
}

impl fmt::Display for KdfId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KdfId {
    type Err = KdfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "argon2id" => Ok(KdfId::Argon2id),
            other => Err(KdfError::UnknownKdf(other.to_string())),
        }
    }
}

/// Memory (KiB), iteration and lane counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KdfParams {
    pub memory_kib: u32,
    pub iterations: u32,
    pub parallelism: u32,
}

impl KdfParams {
    /// Smallest legal Argon2id cost. Only for tests and fixtures.
    pub const TEST: KdfParams = KdfParams {
        memory_kib: 8,
        iterations: 1,
        parallelism: 1,
    };

    pub const INTERACTIVE: KdfParams = KdfParams {
        memory_kib: 19 * 1024,
        iterations: 2,
        parallelism: 1,
    };

    pub const MODERATE: KdfParams = KdfParams {
        memory_kib: 64 * 1024,
        iterations: 3,
        parallelism: 1,
    };

    pub fn profile(name: &str) -> Result<KdfParams, KdfError> {
        match name {
            "test" => Ok(Self::TEST),
            "interactive" | "default" => Ok(Self::INTERACTIVE),
            "moderate" => Ok(Self::MODERATE),
            other => Err(KdfError::UnknownProfile(other.to_string())),
        }
    }

    fn argon2_params(self) -> Result<Params, KdfError> {
        Params::new(
            self.memory_kib,
            self.iterations,
            self.parallelism,
            Some(HASH_LEN),
        )
        .map_err(|e| KdfError::Params(e.to_string()))
    }
}

impl Default for KdfParams {
    fn default() -> Self {
        Self::INTERACTIVE
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Salt(pub [u8; SALT_LEN]);

impl Salt {
    /// Fresh salt from the operating system RNG.
    pub fn random() -> Salt {
        let mut bytes = [0u8; SALT_LEN];
        rand::rngs::OsRng
            .try_fill_bytes(&mut bytes)
            .expect("operating system RNG unavailable");
        Salt(bytes)
    }
}

impl fmt::Debug for Salt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Salt(")?;
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Digest(pub [u8; HASH_LEN]);

impl Digest {
    /// Constant-time equality.
    pub fn ct_eq(&self, other: &Digest) -> bool {
        self.0.ct_eq(&other.0).into()
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest(")?;
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

/// A configured KDF. Cheap to clone.
#[derive(Clone)]
pub struct Kdf {
    params: KdfParams,
    argon: Argon2<'static>,
}

impl fmt::Debug for Kdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kdf").field("params", &self.params).finish()
    }
}

impl Kdf {
    pub fn new(params: KdfParams) -> Result<Kdf, KdfError> {
        let argon = Argon2::new(Algorithm::Argon2id, Version::V0x13, params.argon2_params()?);
        Ok(Kdf { params, argon })
    }

    pub fn params(&self) -> KdfParams {
        self.params
    }

    pub fn hash(&self, input: &[u8], salt: &Salt) -> Result<Digest, KdfError> {
        let mut out = [0u8; HASH_LEN];
        self.argon
            .hash_password_into(input, &salt.0, &mut out)
            .map_err(|e| KdfError::Hash(e.to_string()))?;
        Ok(Digest(out))
    }

    /// A hasher that keeps its working memory between calls.
    pub fn worker(&self) -> KdfWorker<'_> {
        let blocks = self.argon.params().block_count();
        KdfWorker {
            kdf: self,
            memory: vec![Block::default(); blocks],
        }
    }
}

pub struct KdfWorker<'a> {
    kdf: &'a Kdf,
    memory: Vec<Block>,
}

impl KdfWorker<'_> {
    pub fn hash(&mut self, input: &[u8], salt: &Salt) -> Result<Digest, KdfError> {
        let mut out = [0u8; HASH_LEN];
        self.kdf
            .argon
            .hash_password_into_with_memory(input, &salt.0, &mut out, &mut self.memory)
            .map_err(|e| KdfError::Hash(e.to_string()))?;
        Ok(Digest(out))
    }
}

pub fn hash_canonical(
    canonical: &CanonicalForm,
    salt: &Salt,
    params: &KdfParams,
) -> Result<Digest, KdfError> {
    Kdf::new(*params)?.hash(canonical.as_bytes(), salt)
}

/// KDF over the UTF-8 bytes of the placement's canonical form.
pub fn hash_password(p: &Placement, salt: &Salt, params: &KdfParams) -> Result<Digest, KdfError> {
    hash_canonical(&p.to_canonical(), salt, params)
}
