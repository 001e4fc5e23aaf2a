//! Grammar selection masks on the command line: bitstrings or hex.
//!
//! The canonical form is a bitstring, candidate index 0 first. The
//! compact form is `0x`-prefixed hex of the bits packed little-endian
//! within each byte (bit `i` of the mask is bit `i % 8` of byte `i / 8`).

use anyhow::{bail, Result};

/// Parses either form into exactly `len` bits.
pub fn parse_mask(text: &str, len: usize) -> Result<Vec<bool>> {
    let text = text.trim();
    if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        return parse_hex(hex, len);
    }
    if text.len() == len && text.chars().all(|c| c == '0' || c == '1') {
        return Ok(text.chars().map(|c| c == '1').collect());
    }
    bail!(
        "mask must be a {len}-character bitstring or 0x-prefixed hex, got {:?}",
        text
    )
}

fn parse_hex(hex: &str, len: usize) -> Result<Vec<bool>> {
    let expected_bytes = len.div_ceil(8);
    if hex.len() != expected_bytes * 2 {
        bail!(
            "hex mask must encode {expected_bytes} bytes ({} hex digits) for {len} candidates",
            expected_bytes * 2
        );
    }
    let mut bytes = Vec::with_capacity(expected_bytes);
    for i in 0..expected_bytes {
        let pair = &hex[i * 2..i * 2 + 2];
        bytes.push(u8::from_str_radix(pair, 16).map_err(|_| {
            anyhow::anyhow!("invalid hex digits {pair:?} in mask")
        })?);
    }
    let bits: Vec<bool> = (0..len).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect();
    for i in len..expected_bytes * 8 {
        if bytes[i / 8] >> (i % 8) & 1 == 1 {
            bail!("hex mask sets padding bit {i} beyond the {len} candidates");
        }
    }
    Ok(bits)
}

/// Formats bits as `0x`-prefixed hex.
pub fn to_hex(bits: &[bool]) -> String {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (i, &bit) in bits.iter().enumerate() {
        if bit {
            bytes[i / 8] |= 1 << (i % 8);
        }
    }
    let mut out = String::with_capacity(2 + bytes.len() * 2);
    out.push_str("0x");
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
