//! Instance strings, the `D#Q` pair encoding and `@` packing.
//!
//! An [`Instance`] is a byte string. Three bytes are reserved: `#` separates
//! the data and query halves of an encoded pair, `@` separates the front and
//! back of a packed instance, and `\` introduces an escape sequence:
//!
//! | sequence | payload byte |
//! |----------|--------------|
//! | `\h`     | `#`          |
//! | `\a`     | `@`          |
//! | `\\`     | `\`          |
//!
//! Each delimiter only escapes itself and the escape byte, so packing an
//! instance that contains `#` with `@` costs exactly one extra symbol. Decoding
//! accepts all three sequences everywhere.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const PAIR_DELIMITER: u8 = b'#';
pub const PACK_DELIMITER: u8 = b'@';
pub const ESCAPE: u8 = b'\\';

/// A finite symbol string. Cheap to clone; clones share storage.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instance(Arc<[u8]>);

impl Instance {
    pub fn empty() -> Self {
        Instance(Arc::from(&[][..]))
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        Instance(Arc::from(bytes))
    }

    /// Length in symbols.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Whether `self` and `other` are clones of the same allocation.
    pub fn shares_storage(&self, other: &Instance) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn to_text_lossy(&self) -> String {
        String::from_utf8_lossy(&self.0).into_owned()
    }

    pub fn as_str(&self) -> Option<&str> {
        std::str::from_utf8(&self.0).ok()
    }

    /// Number of bytes that would be escaped when this instance is placed on
    /// one side of `delimiter`.
    pub fn escape_overhead(&self, delimiter: u8) -> usize {
        self.0
            .iter()
            .filter(|&&b| b == delimiter || b == ESCAPE)
            .count()
    }

    pub fn concat(&self, other: &Instance) -> Instance {
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.0);
        out.extend_from_slice(&other.0);
        Instance::from(out)
    }
}

impl Default for Instance {
    fn default() -> Self {
        Instance::empty()
    }
}

impl From<Vec<u8>> for Instance {
    fn from(v: Vec<u8>) -> Self {
        Instance(Arc::from(v))
    }
}

impl From<&[u8]> for Instance {
    fn from(v: &[u8]) -> Self {
        Instance::from_bytes(v)
    }
}

impl From<&str> for Instance {
    fn from(s: &str) -> Self {
        Instance::from_bytes(s.as_bytes())
    }
}

impl From<String> for Instance {
    fn from(s: String) -> Self {
        Instance::from(s.into_bytes())
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_text_lossy())
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text_lossy())
    }
}

impl Serialize for Instance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text_lossy())
    }
}

/// A data part `D` and a query part `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub struct DataQueryPair {
    pub data: Instance,
    pub query: Instance,
}

impl DataQueryPair {
    pub fn new(data: impl Into<Instance>, query: impl Into<Instance>) -> Self {
        DataQueryPair {
            data: data.into(),
            query: query.into(),
        }
    }
}

fn escape_sequence(byte: u8) -> Option<u8> {
    match byte {
        PAIR_DELIMITER => Some(b'h'),
        PACK_DELIMITER => Some(b'a'),
        ESCAPE => Some(ESCAPE),
        _ => None,
    }
}

fn escape_into(out: &mut Vec<u8>, payload: &[u8], delimiter: u8) {
    for &b in payload {
        if b == delimiter || b == ESCAPE {
            out.push(ESCAPE);
            out.push(escape_sequence(b).expect("reserved byte"));
        } else {
            out.push(b);
        }
    }
}

/// Escapes `payload` so that it contains no raw `delimiter`.
pub fn escape(payload: &[u8], delimiter: u8) -> Vec<u8> {
    let mut out = Vec::with_capacity(payload.len());
    escape_into(&mut out, payload, delimiter);
    out
}

/// Inverse of [`escape`] for either delimiter.
pub fn unescape(text: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(text.len());
    let mut bytes = text.iter().enumerate();
    while let Some((i, &b)) = bytes.next() {
        if b != ESCAPE {
            out.push(b);
            continue;
        }
        match bytes.next() {
            Some((_, b'h')) => out.push(PAIR_DELIMITER),
            Some((_, b'a')) => out.push(PACK_DELIMITER),
            Some((_, &ESCAPE)) => out.push(ESCAPE),
            Some((_, &other)) => {
                return Err(Error::malformed(format!(
                    "unknown escape sequence \\{} at offset {i}",
                    other as char
                )))
            }
            None => return Err(Error::malformed("dangling escape at end of instance")),
        }
    }
    Ok(out)
}

fn join(left: &Instance, right: &Instance, delimiter: u8) -> Instance {
    let mut out = Vec::with_capacity(left.len() + right.len() + 1);
    escape_into(&mut out, left.as_bytes(), delimiter);
    out.push(delimiter);
    escape_into(&mut out, right.as_bytes(), delimiter);
    Instance::from(out)
}

fn split(z: &Instance, delimiter: u8) -> Result<(Instance, Instance)> {
    let bytes = z.as_bytes();
    let mut positions = bytes.iter().enumerate().filter(|(_, &b)| b == delimiter);
    let at = match (positions.next(), positions.next()) {
        (Some((at, _)), None) => at,
        (None, _) => {
            return Err(Error::malformed(format!(
                "no unescaped '{}' in instance",
                delimiter as char
            )))
        }
        (Some(_), Some(_)) => {
            return Err(Error::malformed(format!(
                "more than one unescaped '{}' in instance",
                delimiter as char
            )))
        }
    };
    let left = unescape(&bytes[..at])?;
    let right = unescape(&bytes[at + 1..])?;
    Ok((Instance::from(left), Instance::from(right)))
}

/// `D#Q`, escaping `#` in both halves.
pub fn encode_pair(pair: &DataQueryPair) -> Instance {
    join(&pair.data, &pair.query, PAIR_DELIMITER)
}

pub fn decode_pair(x: &Instance) -> Result<DataQueryPair> {
    let (data, query) = split(x, PAIR_DELIMITER)?;
    Ok(DataQueryPair { data, query })
}

/// `x1@x2`, escaping `@` in both halves.
pub fn pack_at(x1: &Instance, x2: &Instance) -> Instance {
    join(x1, x2, PACK_DELIMITER)
}

pub fn unpack_at(z: &Instance) -> Result<(Instance, Instance)> {
    split(z, PACK_DELIMITER)
}

/// The part before the single unescaped `@`.
pub fn front(z: &Instance) -> Result<Instance> {
    unpack_at(z).map(|(f, _)| f)
}

/// The part after the single unescaped `@`.
pub fn back(z: &Instance) -> Result<Instance> {
    unpack_at(z).map(|(_, b)| b)
}
