//! Password-space and entropy arithmetic.
//!
//! Two kinds of estimate live here. Space sizes for random passwords are
//! exact counts (`alphabet^length`, times the number of ordered cell choices
//! for grid passwords), reported as log2. Estimates for human-chosen
//! passwords use fixed per-position schedules: one for characters and one
//! for grid cells.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error("password length {length} exceeds {cells} grid cells")]
    LengthExceedsCells { length: u64, cells: u64 },
    #[error("cannot choose {k} of {n}")]
    KExceedsN { n: u64, k: u64 },
    #[error("alphabet needs at least 2 symbols, got {0}")]
    AlphabetTooSmall(u64),
    #[error("dictionary size must be at least 1")]
    EmptySpace,
    #[error("likelihood must be in (0, 1], got {0}")]
    BadLikelihood(f64),
}

/// Number of ordered selections of `k` items from `n`: `n! / (n-k)!`.
pub fn perm_count(n: u64, k: u64) -> Result<BigUint, EntropyError> {
    if k > n {
        return Err(EntropyError::KExceedsN { n, k });
    }
    Ok(((n - k + 1)..=n).fold(BigUint::one(), |acc, f| acc * f))
}

/// log2 of an arbitrary-size positive integer, accurate to f64 precision.
pub fn log2_big(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits in f64").log2();
    }
    let shift = bits - 64;
    let top: BigUint = v >> shift;
    top.to_f64().expect("64-bit value").log2() + shift as f64
}

/// `length * log2(alphabet_size)`.
pub fn linear_space_bits(alphabet_size: u64, length: u64) -> Result<f64, EntropyError> {
    if alphabet_size < 2 {
        return Err(EntropyError::AlphabetTooSmall(alphabet_size));
    }
    Ok(length as f64 * (alphabet_size as f64).log2())
}

/// Text space plus log2 of the ordered cell choices, `perm(cells, length)`.
pub fn spartan_space_bits(
    alphabet_size: u64,
    length: u64,
    cells: u64,
) -> Result<f64, EntropyError> {
    if length > cells {
        return Err(EntropyError::LengthExceedsCells { length, cells });
    }
    let text = linear_space_bits(alphabet_size, length)?;
    Ok(text + log2_big(&perm_count(cells, length)?))
}

/// Random-password entropy: a linear space, or a grid space when `cells` is
/// given.
pub fn random_entropy(
    alphabet_size: u64,
    length: u64,
    cells: Option<u64>,
) -> Result<f64, EntropyError> {
    match cells {
        Some(cells) => spartan_space_bits(alphabet_size, length, cells),
        None => linear_space_bits(alphabet_size, length),
    }
}

/// Per-character schedule for human-chosen text: 4 bits for the first
/// character, 2 for characters 2-8, 1.5 for 9-20, then 1 each.
pub fn char_bits(position: u64) -> f64 {
    match position {
        0 => 0.0,
        1 => 4.0,
        2..=8 => 2.0,
        9..=20 => 1.5,
        _ => 1.0,
    }
}

/// Per-cell schedule for human-chosen locations: 5 bits for the first cell,
/// 2.5 for the second, 1 for cells 3-12, nothing after that.
pub fn cell_bits(position: u64) -> f64 {
    match position {
        1 => 5.0,
        2 => 2.5,
        3..=12 => 1.0,
        _ => 0.0,
    }
}

/// Largest total the cell schedule can contribute.
pub const CELL_BITS_CAP: f64 = 17.5;

pub fn user_linear_entropy(length: u64) -> f64 {
    (1..=length).map(char_bits).sum()
}

pub fn cell_entropy(cells: u64) -> f64 {
    (1..=cells.min(12)).map(cell_bits).sum()
}

/// Text schedule plus cell schedule over the same count.
pub fn user_spartan_entropy(length: u64) -> f64 {
    user_linear_entropy(length) + cell_entropy(length)
}

/// Dictionary size `S` and the likelihood `L` that a password lies in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackModel {
    space: f64,
    likelihood: f64,
}

impl AttackModel {
    pub fn new(space: f64, likelihood: f64) -> Result<Self, EntropyError> {
        if space.is_nan() || space < 1.0 {
            return Err(EntropyError::EmptySpace);
        }
        if !(likelihood > 0.0 && likelihood <= 1.0) {
            return Err(EntropyError::BadLikelihood(likelihood));
        }
        Ok(AttackModel { space, likelihood })
    }

    pub fn space(&self) -> f64 {
        self.space
    }

    pub fn likelihood(&self) -> f64 {
        self.likelihood
    }

    /// `log2(S / 2L)`.
    pub fn entropy(&self) -> f64 {
        (self.space / (2.0 * self.likelihood)).log2()
    }
}

/// Round half up to an integer.
pub fn round_half_up(bits: f64) -> i64 {
    (bits + 0.5).floor() as i64
}

/// Two-decimal rendering used in all text output.
pub fn fmt_bits(bits: f64) -> String {
    format!("{bits:.2}")
}

/// Scientific notation with `sig` significant figures, rounded half up on the
/// exact decimal digits: `2.78E+21`.
pub fn fmt_sci(v: &BigUint, sig: usize) -> String {
    let sig = sig.max(1);
    let digits = v.to_string();
    let mut exp = digits.len() - 1;
    let mut head: BigUint = digits[..sig.min(digits.len())]
        .parse()
        .expect("decimal digits");
    if digits.len() > sig && digits.as_bytes()[sig] >= b'5' {
        head += 1u32;
    }
    let mut head = head.to_string();
    if head.len() > sig.min(digits.len()) {
        head.pop();
        exp += 1;
    }
    while head.len() < sig {
        head.push('0');
    }
    let (int, frac) = head.split_at(1);
    if frac.is_empty() {
        format!("{int}E+{exp}")
    } else {
        format!("{int}.{frac}E+{exp}")
    }
}

/// Parameters for the random-password series of [`entropy_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveConfig {
    pub random_alphabet: u64,
    pub cells: u64,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig {
            random_alphabet: 95,
            cells: 144,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub length: u64,
    pub user_linear: f64,
    pub user_spartan: f64,
    pub random_linear: f64,
    pub random_spartan: f64,
}

pub const CURVE_HEADER: &str = "length,user_linear,user_spartan,random_linear,random_spartan";

impl fmt::Display for CurveRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{:.2},{:.2},{:.2},{:.2}",
            self.length,
            self.user_linear,
            self.user_spartan,
            self.random_linear,
            self.random_spartan
        )
    }
}

/// The four entropy series for lengths `1..=max_length`.
pub fn entropy_curve(max_length: u64, cfg: CurveConfig) -> Result<Vec<CurveRow>, EntropyError> {
    (1..=max_length)
        .map(|n| {
            Ok(CurveRow {
                length: n,
                user_linear: user_linear_entropy(n),
                user_spartan: user_spartan_entropy(n),
                random_linear: random_entropy(cfg.random_alphabet, n, None)?,
                random_spartan: random_entropy(cfg.random_alphabet, n, Some(cfg.cells))?,
            })
        })
        .collect()
}

pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}
