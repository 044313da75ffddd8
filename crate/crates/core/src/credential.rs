//! Stored verifiers and the line-oriented credential store.
//!
//! One record per line:
//!
//! ```text
//! username:kdf_id:memory,iterations,parallelism:salt_b64:hash_b64:rows,cols,palette,seed
//! ```

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use thiserror::Error;

use crate::grid::{Alphabet, Dims, GridError, GridSpec};
use crate::kdf::{hash_password, Digest, KdfError, KdfId, KdfParams, Salt, HASH_LEN, SALT_LEN};
use crate::placement::Placement;

#[derive(Debug, Error)]
pub enum CredentialError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("invalid username {0:?}")]
    BadUsername(String),
    #[error("username {0:?} already registered")]
    Duplicate(String),
    #[error(transparent)]
    Kdf(#[from] KdfError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// The grid parameters needed to rebuild a user's grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSummary {
    pub dims: Dims,
    pub palette_size: u8,
    pub color_seed: u64,
}

impl GridSummary {
    pub fn of(grid: &GridSpec) -> Self {
        GridSummary {
            dims: grid.dims(),
            palette_size: grid.palette_size(),
            color_seed: grid.color_seed(),
        }
    }

    /// The grid with the default printable alphabet.
    pub fn grid(&self) -> GridSpec {
        GridSpec::new(
            self.dims,
            Alphabet::printable(),
            self.palette_size,
            self.color_seed,
        )
        .expect("summary palette is non-zero")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CredentialRecord {
    pub username: String,
    pub kdf: KdfId,
    pub params: KdfParams,
    pub salt: Salt,
    pub hash: Digest,
    pub grid: GridSummary,
}

pub fn check_username(username: &str) -> Result<(), CredentialError> {
    if username.is_empty() || username.contains([':', '\n', '\r']) {
        return Err(CredentialError::BadUsername(username.to_string()));
    }
    Ok(())
}

impl CredentialRecord {
    /// Hashes `p` under a fresh random salt.
    pub fn register(
        username: &str,
        p: &Placement,
        grid: &GridSpec,
        params: KdfParams,
    ) -> Result<Self, CredentialError> {
        Self::register_with_salt(username, p, grid, params, Salt::random())
    }

    pub fn register_with_salt(
        username: &str,
        p: &Placement,
        grid: &GridSpec,
        params: KdfParams,
        salt: Salt,
    ) -> Result<Self, CredentialError> {
        check_username(username)?;
        let hash = hash_password(p, &salt, &params)?;
        Ok(CredentialRecord {
            username: username.to_string(),
            kdf: KdfId::Argon2id,
            params,
            salt,
            hash,
            grid: GridSummary::of(grid),
        })
    }

    /// Recomputes the hash of `p` and compares in constant time. A KDF
    /// failure counts as a mismatch.
    pub fn verify(&self, p: &Placement) -> bool {
        match hash_password(p, &self.salt, &self.params) {
            Ok(d) => d.ct_eq(&self.hash),
            Err(_) => false,
        }
    }

    pub fn to_line(&self) -> String {
        let KdfParams {
            memory_kib,
            iterations,
            parallelism,
        } = self.params;
        format!(
            "{}:{}:{memory_kib},{iterations},{parallelism}:{}:{}:{},{},{},{}",
            self.username,
            self.kdf,
            B64.encode(self.salt.0),
            B64.encode(self.hash.0),
            self.grid.dims.rows(),
            self.grid.dims.cols(),
            self.grid.palette_size,
            self.grid.color_seed,
        )
    }

    /// Parses one store line; `line_no` is only used in error messages.
    pub fn parse_line(line: &str, line_no: usize) -> Result<Self, CredentialError> {
        let bad = |reason: &str| CredentialError::Malformed {
            line: line_no,
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = line.split(':').collect();
        let [username, kdf, params, salt, hash, grid] = fields[..] else {
            return Err(bad("expected 6 colon-separated fields"));
        };
        check_username(username).map_err(|_| bad("empty username"))?;
        let kdf: KdfId = kdf.parse().map_err(|_| bad("unknown kdf"))?;

        let nums = |s: &str, n: usize, what: &str| -> Result<Vec<u64>, CredentialError> {
            let v: Vec<u64> = s
                .split(',')
                .map(|x| x.parse::<u64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad(what))?;
            if v.len() != n {
                return Err(bad(what));
            }
            Ok(v)
        };
        let p = nums(params, 3, "bad kdf parameters")?;
        let to_u32 = |x: u64| u32::try_from(x).map_err(|_| bad("bad kdf parameters"));
        let params = KdfParams {
            memory_kib: to_u32(p[0])?,
            iterations: to_u32(p[1])?,
            parallelism: to_u32(p[2])?,
        };

        let salt: [u8; SALT_LEN] = B64
            .decode(salt)
            .ok()
            .and_then(|v| v.try_into().ok())
            .ok_or_else(|| bad("salt must be 16 base64 bytes"))?;
        let hash: [u8; HASH_LEN] = B64
            .decode(hash)
            .ok()
            .and_then(|v| v.try_into().ok())
            .ok_or_else(|| bad("hash has the wrong length"))?;

        let g = nums(grid, 4, "bad grid summary")?;
        let dims = Dims::new(g[0] as usize, g[1] as usize).map_err(|_| bad("bad grid size"))?;
        let palette_size = u8::try_from(g[2])
            .ok()
            .filter(|&p| p > 0)
            .ok_or_else(|| bad("bad palette size"))?;

        Ok(CredentialRecord {
            username: username.to_string(),
            kdf,
            params,
            salt: Salt(salt),
            hash: Digest(hash),
            grid: GridSummary {
                dims,
                palette_size,
                color_seed: g[3],
            },
        })
    }
}

/// Parses a whole store. Blank lines and lines starting with `#` are skipped.
pub fn parse_store(text: &str) -> Result<Vec<CredentialRecord>, CredentialError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| CredentialRecord::parse_line(l, i + 1))
        .collect()
}

/// Append-only file of credential records, indexed by username.
#[derive(Debug)]
pub struct CredentialStore {
    path: PathBuf,
    records: Vec<CredentialRecord>,
    by_name: HashMap<String, usize>,
}

impl CredentialStore {
    /// Loads `path`, creating an empty store if it does not exist.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, CredentialError> {
        let path = path.as_ref().to_path_buf();
        let mut store = CredentialStore {
            path: path.clone(),
            records: Vec::new(),
            by_name: HashMap::new(),
        };
        match File::open(&path) {
            Ok(f) => {
                for (i, line) in BufReader::new(f).lines().enumerate() {
                    let line = line?;
                    if line.trim().is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let rec = CredentialRecord::parse_line(&line, i + 1)?;
                    store.index(rec)?;
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e.into()),
        }
        Ok(store)
    }

    fn index(&mut self, rec: CredentialRecord) -> Result<(), CredentialError> {
        if self.by_name.contains_key(&rec.username) {
            return Err(CredentialError::Duplicate(rec.username));
        }
        self.by_name
            .insert(rec.username.clone(), self.records.len());
        self.records.push(rec);
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, username: &str) -> Option<&CredentialRecord> {
        self.by_name.get(username).map(|&i| &self.records[i])
    }

    pub fn contains(&self, username: &str) -> bool {
        self.by_name.contains_key(username)
    }

    pub fn records(&self) -> &[CredentialRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Writes the record to disk (fsync'd) before it becomes visible.
    pub fn append(&mut self, rec: CredentialRecord) -> Result<(), CredentialError> {
        if self.contains(&rec.username) {
            return Err(CredentialError::Duplicate(rec.username));
        }
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        writeln!(f, "{}", rec.to_line())?;
        f.sync_data()?;
        self.index(rec)
    }
}
