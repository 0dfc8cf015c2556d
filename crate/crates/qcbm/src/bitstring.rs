//! Fixed-width bitstrings doubling as computational-basis indices.
//!
//! Bit j of the stored value is the state of qubit j, and the printed form
//! puts qubit 0 leftmost. So `"110"` parses to value 0b011: qubits 0 and 1
//! set, qubit 2 clear. Both directions are exercised by a round-trip test.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_WIDTH: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bitstring {
    value: u32,
    width: u8,
}

impl Bitstring {
    pub fn new(value: u32, width: usize) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::InvalidBitWidth(width));
        }
        if width < 32 && value >> width != 0 {
            return Err(Error::ValueOutOfRange {
                value: value as u64,
                width,
            });
        }
        Ok(Self {
            value,
            width: width as u8,
        })
    }

    /// Same as `new` but for basis indices coming out of the simulator,
    /// which are already known to fit.
    pub(crate) fn from_index_unchecked(index: usize, width: usize) -> Self {
        debug_assert!(width >= 1 && width <= MAX_WIDTH);
        debug_assert!(width == 32 || index >> width == 0);
        Self {
            value: index as u32,
            width: width as u8,
        }
    }

    pub fn index(self) -> usize {
        self.value as usize
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn bit(self, position: usize) -> bool {
        debug_assert!(position < self.width());
        (self.value >> position) & 1 == 1
    }

    pub fn count_ones(self) -> u32 {
        self.value.count_ones()
    }

    /// Qubit positions holding a 1, in ascending order.
    pub fn one_positions(self) -> impl Iterator<Item = usize> {
        let value = self.value;
        (0..self.width()).filter(move |&j| (value >> j) & 1 == 1)
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.width() {
            f.write_str(if self.bit(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_WIDTH {
            return Err(Error::MalformedBitstring(s.to_owned()));
        }
        let mut value = 0u32;
        for (j, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => value |= 1 << j,
                _ => return Err(Error::MalformedBitstring(s.to_owned())),
            }
        }
        Ok(Self {
            value,
            width: s.len() as u8,
        })
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
