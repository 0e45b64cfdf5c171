use super::Pixmap;
use crate::error::{PgmError, Result};

struct Header {
    binary: bool,
    width: usize,
    height: usize,
    maxval: u32,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    /// Skips whitespace and `#` comments running to end of line.
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_separators();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, field: &'static str) -> Result<u32, PgmError> {
        let tok = self.token().ok_or(PgmError::MissingField(field))?;
        std::str::from_utf8(tok)
            .ok()
            .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| PgmError::BadNumber {
                field,
                token: String::from_utf8_lossy(tok).into_owned(),
            })
    }
}

fn parse_header(cur: &mut Cursor<'_>) -> Result<Header, PgmError> {
    let binary = match cur.bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        other => {
            let shown = other.unwrap_or(cur.bytes);
            return Err(PgmError::BadMagic(String::from_utf8_lossy(shown).into_owned()));
        }
    };
    cur.pos = 2;
    match cur.bytes.get(2) {
        None => return Err(PgmError::MissingField("width")),
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        Some(_) => {
            let end = cur.bytes.len().min(8);
            return Err(PgmError::BadMagic(String::from_utf8_lossy(&cur.bytes[..end]).into_owned()));
        }
    }

    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 {
        return Err(PgmError::Zero("width"));
    }
    if height == 0 {
        return Err(PgmError::Zero("height"));
    }
    if maxval == 0 {
        return Err(PgmError::Zero("maxval"));
    }
    if maxval > 255 {
        return Err(PgmError::MaxvalTooLarge(maxval));
    }
    Ok(Header { binary, width: width as usize, height: height as usize, maxval })
}

/// Parses a binary (P5) or ASCII (P2) graymap with maxval at most 255.
///
/// Samples are returned as stored; no rescaling to 255 is applied.
pub fn read_pgm(bytes: &[u8]) -> Result<Pixmap> {
    let mut cur = Cursor { bytes, pos: 0 };
    let header = parse_header(&mut cur)?;
    let count = header.width * header.height;

    let pixels = if header.binary {
        // exactly one whitespace byte separates maxval from the raster
        let start = cur.pos + 1;
        let avail = bytes.len().saturating_sub(start);
        if avail < count {
            return Err(PgmError::Truncated { expected: count, found: avail }.into());
        }
        bytes[start..start + count].to_vec()
    } else {
        let mut pixels = Vec::with_capacity(count);
        for index in 0..count {
            let value = match cur.number("sample") {
                Ok(v) => v,
                Err(PgmError::MissingField(_)) => {
                    return Err(PgmError::Truncated { expected: count, found: index }.into())
                }
                Err(e) => return Err(e.into()),
            };
            pixels.push(value);
        }
        let mut out = Vec::with_capacity(count);
        for (index, &value) in pixels.iter().enumerate() {
            if value > header.maxval {
                return Err(PgmError::SampleOutOfRange { index, value, maxval: header.maxval }.into());
            }
            out.push(value as u8);
        }
        out
    };

    if header.binary {
        if let Some((index, &value)) =
            pixels.iter().enumerate().find(|(_, &v)| u32::from(v) > header.maxval)
        {
            return Err(PgmError::SampleOutOfRange {
                index,
                value: value.into(),
                maxval: header.maxval,
            }
            .into());
        }
    }

    Pixmap::new(header.width, header.height, pixels)
}

/// Serializes as P5 with maxval 255.
pub fn write_pgm(p: &Pixmap) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", p.width(), p.height());
    let mut out = Vec::with_capacity(header.len() + p.pixels().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(p.pixels());
    out
}
