//! Two-dimensional grid passwords.
//!
//! A password is a set of characters together with the grid cell each one
//! occupies. This crate covers the entry mechanics ([`grid`]), the canonical
//! and coordinate-tagged encodings ([`codec`]), salted hashing and credential
//! storage ([`kdf`], [`credential`]), entropy and password-space arithmetic
//! ([`entropy`]), shape classification ([`shape`]) and a dictionary-expansion
//! cracker ([`crack`]).

pub mod codec;
pub mod color;
pub mod corpus;
pub mod crack;
pub mod credential;
pub mod entropy;
pub mod exec;
pub mod grid;
pub mod kdf;
pub mod placement;
pub mod shape;

pub use codec::{CanonicalForm, CodecError, TaggedForm};
pub use color::{colorize, seed_from_username, Colorization};
pub use credential::{CredentialRecord, CredentialStore, GridSummary};
pub use exec::{Execution, Executor};
pub use grid::{advance, Alphabet, Coord, Dims, Direction, EntrySession, GridError, GridSpec};
pub use kdf::{hash_password, KdfParams, Salt};
pub use placement::Placement;
pub use shape::{classify, ShapeClass};
