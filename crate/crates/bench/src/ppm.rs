//! Binary PPM (P6) reading and writing.
//!
//! The only supported format is `P6` with maxval 255. The reader accepts
//! arbitrary whitespace and `#` comments in the header (comments are
//! consumed and not re-emitted); the writer always produces the canonical
//! header `P6\n<w> <h>\n255\n`, so a comment-free canonical file round-trips
//! byte-identically.

use crate::error::{BenchError, Result};

/// An 8-bit RGB image, pixels row-major and interleaved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpmImage {
    pub width: usize,
    pub height: usize,
    /// `3 * width * height` bytes, RGB interleaved.
    pub data: Vec<u8>,
}

impl PpmImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(BenchError::Config("image dimensions must be >= 1".into()));
        }
        if data.len() != 3 * width * height {
            return Err(BenchError::Config(format!(
                "pixel buffer holds {} bytes, expected {}",
                data.len(),
                3 * width * height
            )));
        }
        Ok(PpmImage {
            width,
            height,
            data,
        })
    }

    /// One channel (0 = R, 1 = G, 2 = B) as floats in [0, 255].
    pub fn channel(&self, index: usize) -> Vec<f64> {
        self.data
            .iter()
            .skip(index)
            .step_by(3)
            .map(|&b| b as f64)
            .collect()
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a str,
}

impl<'a> Cursor<'a> {
    fn fail<T>(&self, message: &str) -> Result<T> {
        Err(BenchError::Format {
            path: self.path.to_string(),
            offset: self.pos,
            message: message.to_string(),
        })
    }

    fn next(&mut self) -> Option<u8> {
        let b = self.bytes.get(self.pos).copied();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    /// Skip whitespace and `#` comments (to end of line).
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read_number(&mut self, what: &str) -> Result<usize> {
        self.skip_separators();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_digit() {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return self.fail(&format!("expected {what}"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(())
            .or_else(|_| self.fail(&format!("invalid {what}")))
    }
}

/// Parse a P6 image; errors carry the byte offset of the problem.
pub fn read_ppm(bytes: &[u8], path: &str) -> Result<PpmImage> {
    let mut cur = Cursor {
        bytes,
        pos: 0,
        path,
    };
    if cur.next() != Some(b'P') || cur.next() != Some(b'6') {
        cur.pos = 0;
        return cur.fail("not a P6 ppm (bad magic)");
    }
    let width = cur.read_number("width")?;
    let height = cur.read_number("height")?;
    let maxval = cur.read_number("maxval")?;
    if maxval != 255 {
        // point at the start of the offending value
        cur.pos -= maxval.to_string().len();
        return cur.fail("maxval must be 255");
    }
    // Exactly one whitespace byte separates the header from pixel data.
    match cur.next() {
        Some(b) if b.is_ascii_whitespace() => {}
        _ => {
            cur.pos = cur.pos.saturating_sub(1);
            return cur.fail("expected single whitespace before pixel data");
        }
    }
    let need = 3 * width * height;
    let have = bytes.len() - cur.pos;
    if have < need {
        cur.pos = bytes.len();
        return cur.fail(&format!("pixel data truncated: need {need} bytes, have {have}"));
    }
    if have > need {
        cur.pos += need;
        return cur.fail(&format!("trailing bytes after pixel data ({} extra)", have - need));
    }
    PpmImage::new(width, height, bytes[cur.pos..].to_vec())
}

/// Serialize to the canonical P6 byte layout.
pub fn write_ppm(img: &PpmImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}
