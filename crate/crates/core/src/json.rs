//! JSON output with every floating-point number written to 17 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::{Error, Result};

/// Compact formatter that prints `f64` as `d.dddddddddddddddde±x`, which
/// round-trips every finite double exactly. Non-finite values become `null`.
#[derive(Debug, Default, Clone, Copy)]
pub struct SigDigitsFormatter;

impl Formatter for SigDigitsFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_writer<W: io::Write, T: Serialize + ?Sized>(writer: W, value: &T) -> Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(writer, SigDigitsFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Io(format!("json serialisation: {e}")))
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    to_writer(&mut buf, value)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}
