//! JSON serialization helpers shared by the on-disk formats.
//!
//! All floats are written with 17 significant digits so that values
//! round-trip exactly; the writer is otherwise plain serde_json, which
//! keeps struct field order fixed and output byte-stable.

use serde::Serialize;

use crate::error::Result;

struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        // 1 leading + 16 fractional digits = 17 significant digits,
        // enough to reproduce any f64 bit pattern on parse.
        write!(writer, "{:.16e}", value)
    }
}

/// Serializes to a JSON string with full-precision floats.
pub fn to_json_string_full<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits utf8"))
}
