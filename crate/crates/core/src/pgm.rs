//! Binary PGM (P5) reader and writer.
//!
//! Only 8-bit files are handled; a maxval above 255 is reported as
//! unsupported rather than silently rescaled. Loading keeps the raw sample
//! values as floats in [0, 255]. Saving clamps to [0, 255], rounds, and
//! always emits the canonical header `P5\n<w> <h>\n255\n`, so a file written
//! by [`save_pgm`] survives a load/save round trip byte for byte.

use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::ImageTensor;

pub fn load_pgm(path: impl AsRef<Path>) -> Result<ImageTensor> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io { path: path.into(), source })?;
    decode(&bytes)
}

pub fn save_pgm(x: &ImageTensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(x)?;
    std::fs::write(path, bytes).map_err(|source| Error::Io { path: path.into(), source })
}

pub fn decode(bytes: &[u8]) -> Result<ImageTensor> {
    let mut p = Parser { bytes, pos: 0 };
    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        return Err(p.fail("expected magic \"P5\""));
    }
    p.pos = 2;
    let width = p.number("width")?;
    let height = p.number("height")?;
    let maxval = p.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(p.fail("zero dimension"));
    }
    if maxval > 255 {
        return Err(Error::Unsupported(format!("pgm maxval {maxval} (only 8-bit handled)")));
    }
    if maxval == 0 {
        return Err(p.fail("maxval must be >= 1"));
    }
    // single whitespace byte separates the header from the raster
    match p.peek() {
        Some(b) if b.is_ascii_whitespace() => p.pos += 1,
        _ => return Err(p.fail("expected single whitespace before raster")),
    }
    let need = width * height;
    let have = p.bytes.len() - p.pos;
    if have < need {
        p.pos = p.bytes.len();
        return Err(p.fail(&format!("raster truncated: need {need} bytes, have {have}")));
    }
    if have > need {
        p.pos += need;
        return Err(p.fail(&format!("{} trailing bytes after raster", have - need)));
    }
    let data = p.bytes[p.pos..].iter().map(|&b| f64::from(b)).collect();
    ImageTensor::gray(height, width, data)
}

pub fn encode(x: &ImageTensor) -> Result<Vec<u8>> {
    if x.channels() != 1 {
        return Err(Error::Unsupported(format!(
            "pgm holds one channel, tensor has {}",
            x.channels()
        )));
    }
    let mut out = format!("P5\n{} {}\n255\n", x.width(), x.height()).into_bytes();
    out.extend(x.as_slice().iter().map(|&v| v.clamp(0.0, 255.0).round() as u8));
    Ok(out)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn fail(&self, message: &str) -> Error {
        Error::PgmParse { offset: self.pos, message: message.into() }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Skips whitespace and `#` comments, then reads a decimal token.
    fn number(&mut self, what: &str) -> Result<usize> {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while let Some(b) = self.peek() {
                        self.pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let start = self.pos;
        let mut value: usize = 0;
        while let Some(b) = self.peek() {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as usize))
                .ok_or_else(|| self.fail(&format!("{what} out of range")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.fail(&format!("expected {what}")));
        }
        Ok(value)
    }
}
