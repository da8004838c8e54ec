//! Netpbm graymap (PGM) reading and writing.
//!
//! Reads ASCII (`P2`) and binary (`P5`) files with any maxval up to 65535,
//! normalizing samples to `sample / maxval`. Writes binary `P5` at maxval 255.

use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    Binary,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Pgm {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value * 10 + u64::from(b - b'0');
            if value > u64::from(u32::MAX) {
                return Err(Error::Pgm {
                    offset: start,
                    message: format!("{what} is too large"),
                });
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(match self.bytes.get(self.pos) {
                None => self.err(format!("unexpected end of data while reading {what}")),
                Some(_) => self.err(format!("expected a decimal {what}")),
            });
        }
        Ok(value as u32)
    }
}

/// Parses a PGM file held in memory.
pub fn read_pgm<T: Real>(bytes: &[u8]) -> Result<Image<T>> {
    let mut cur = Cursor { bytes, pos: 0 };
    let encoding = match bytes.get(..2) {
        Some(b"P2") => Encoding::Ascii,
        Some(b"P5") => Encoding::Binary,
        _ => return Err(cur.err("expected magic number P2 or P5")),
    };
    cur.pos = 2;

    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    cur.skip_whitespace_and_comments();
    let maxval_offset = cur.pos;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Pgm {
            offset: 2,
            message: format!("image dimensions must be positive, got {width}x{height}"),
        });
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Pgm {
            offset: maxval_offset,
            message: format!("maxval must be in 1..=65535, got {maxval}"),
        });
    }

    let count = width
        .checked_mul(height)
        .ok_or_else(|| cur.err("image dimensions overflow"))?;
    let scale = T::lit(f64::from(maxval));
    let mut data = Vec::with_capacity(count.min(1 << 24));

    match encoding {
        Encoding::Ascii => {
            for _ in 0..count {
                cur.skip_whitespace_and_comments();
                let offset = cur.pos;
                let v = cur.number("sample")?;
                if v > maxval {
                    return Err(Error::Pgm {
                        offset,
                        message: format!("sample {v} exceeds maxval {maxval}"),
                    });
                }
                data.push(T::lit(f64::from(v)) / scale);
            }
        }
        Encoding::Binary => {
            match bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                Some(_) => return Err(cur.err("expected a single whitespace byte after maxval")),
                None => return Err(cur.err("unexpected end of data before pixel payload")),
            }
            let bytes_per_sample = if maxval < 256 { 1 } else { 2 };
            let needed = count
                .checked_mul(bytes_per_sample)
                .ok_or_else(|| cur.err("image dimensions overflow"))?;
            let payload = bytes
                .get(cur.pos..cur.pos + needed)
                .ok_or_else(|| Error::Pgm {
                    offset: bytes.len(),
                    message: format!(
                        "truncated payload: expected {needed} bytes, found {}",
                        bytes.len() - cur.pos
                    ),
                })?;
            for (k, chunk) in payload.chunks_exact(bytes_per_sample).enumerate() {
                let v = match *chunk {
                    [b] => u32::from(b),
                    [hi, lo] => u32::from(u16::from_be_bytes([hi, lo])),
                    _ => unreachable!(),
                };
                if v > maxval {
                    return Err(Error::Pgm {
                        offset: cur.pos + k * bytes_per_sample,
                        message: format!("sample {v} exceeds maxval {maxval}"),
                    });
                }
                data.push(T::lit(f64::from(v)) / scale);
            }
        }
    }

    Image::new(width, height, data)
}

/// Quantizes an amplitude to 8 bits, rounding half away from zero.
#[inline]
pub fn quantize_u8<T: Real>(a: T) -> u8 {
    (a.as_f64() * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Encodes as binary `P5` with maxval 255.
pub fn write_pgm<T: Real>(img: &Image<T>) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.data().len());
    out.extend_from_slice(header.as_bytes());
    out.extend(img.data().iter().map(|&a| quantize_u8(a)));
    out
}

pub fn load_pgm<T: Real>(path: impl AsRef<Path>) -> Result<Image<T>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_pgm(&bytes)
}

pub fn save_pgm<T: Real>(img: &Image<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_pgm(img)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ascii_single_pixel() {
        let img: Image<f64> = read_pgm(b"P2\n1 1\n255\n128\n").unwrap();
        assert_eq!(img.data(), &[128.0 / 255.0]);
        assert!((img.get(0, 0) - 0.50196).abs() < 1e-5);
    }

    #[test]
    fn ascii_with_comments() {
        let img: Image<f64> = read_pgm(b"P2 # magic\n# size next\n2 1 # w h\n4\n0 4").unwrap();
        assert_eq!(img.data(), &[0.0, 1.0]);
    }

    #[test]
    fn sixteen_bit_full_scale() {
        let mut bytes = b"P5\n2 1\n65535\n".to_vec();
        bytes.extend_from_slice(&[0xff, 0xff, 0x80, 0x00]);
        let img: Image<f64> = read_pgm(&bytes).unwrap();
        assert_eq!(img.get(0, 0), 1.0);
        assert_eq!(img.get(0, 1), 32768.0 / 65535.0);
    }

    #[test]
    fn writes_p5_header_and_rounds_half_away() {
        let img = Image::new(3, 1, vec![0.5, 1.0, 0.0]).unwrap();
        let bytes = write_pgm(&img);
        assert_eq!(&bytes[..11], b"P5\n3 1\n255\n");
        assert_eq!(&bytes[11..], &[128, 255, 0]);
    }

    fn offset_of(err: Error) -> usize {
        match err {
            Error::Pgm { offset, .. } => offset,
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn errors_name_offsets() {
        assert_eq!(
            offset_of(read_pgm::<f64>(b"P6\n1 1\n255\n\0").unwrap_err()),
            0
        );
        assert_eq!(
            offset_of(read_pgm::<f64>(b"P5\n1 1\n0\n\0").unwrap_err()),
            7
        );
        assert_eq!(
            offset_of(read_pgm::<f64>(b"P5\n2 2\n255\n\0\0").unwrap_err()),
            13
        );
        assert_eq!(offset_of(read_pgm::<f64>(b"P2\n1 x\n").unwrap_err()), 5);
        assert_eq!(offset_of(read_pgm::<f64>(b"P2\n1 1\n3\n4").unwrap_err()), 9);
        assert_eq!(offset_of(read_pgm::<f64>(b"P2\n1 1\n3\n").unwrap_err()), 9);
        assert!(read_pgm::<f64>(b"P5\n1 1\n70000\n\0").is_err());
    }

    proptest! {
        #[test]
        fn eight_bit_payload_round_trips(
            (w, h, payload) in (1usize..12, 1usize..12)
                .prop_flat_map(|(w, h)| (Just(w), Just(h), proptest::collection::vec(any::<u8>(), w * h)))
        ) {
            let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
            bytes.extend_from_slice(&payload);
            let img: Image<f64> = read_pgm(&bytes).unwrap();
            prop_assert_eq!(write_pgm(&img), bytes.clone());
            let img32: Image<f32> = read_pgm(&bytes).unwrap();
            prop_assert_eq!(write_pgm(&img32), bytes);
        }
    }
}
