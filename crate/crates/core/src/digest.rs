use sha2::{Digest, Sha256};

use crate::model::Value;

pub fn hex_sha256(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in hash.iter() {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Encodes `⊥` as `0xffff` and `v_i` as `i`, both little endian.
pub fn encode_values(values: &[Value]) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(values.len() * 2);
    for v in values {
        let code = match v {
            Value::Bottom => u16::MAX,
            Value::V(i) => *i,
        };
        bytes.extend_from_slice(&code.to_le_bytes());
    }
    bytes
}

/// First 16 hex digits of the SHA-256 of a value snapshot.
pub fn payload_digest(values: &[Value]) -> String {
    let mut h = hex_sha256(&encode_values(values));
    h.truncate(16);
    h
}
