//! Binary Netpbm images: P6 colour (maxval 255) and P5 grey (8 or 16 bit).
//!
//! Writers emit the minimal header `P6\n<w> <h>\n255\n` or
//! `P5\n<w> <h>\n65535\n`, with 16-bit samples big-endian. Readers also accept
//! comments and arbitrary whitespace in the header.

use std::path::Path;

use xslit_core::scene::{Pixels, RasterImage};

use super::fs::{read_bytes, write_atomic};
use crate::error::{Error, Result};

fn invalid(msg: impl Into<String>) -> Error {
    Error::validation("invalid_image", msg)
}

pub fn encode_ppm(image: &RasterImage) -> Result<Vec<u8>> {
    let Pixels::Rgb8(data) = image.pixels() else {
        return Err(invalid("PPM output needs an RGB image"));
    };
    let mut out = format!("P6\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(data);
    Ok(out)
}

pub fn encode_pgm16(width: usize, height: usize, samples: &[u16]) -> Result<Vec<u8>> {
    if samples.len() != width * height {
        return Err(invalid("sample count does not match dimensions"));
    }
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    out.reserve(2 * samples.len());
    for s in samples {
        out.extend_from_slice(&s.to_be_bytes());
    }
    Ok(out)
}

struct Header {
    magic: [u8; 2],
    width: usize,
    height: usize,
    maxval: u32,
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(invalid("missing Netpbm magic number"));
    }
    let magic = [bytes[0], bytes[1]];
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for field in &mut fields {
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(invalid("truncated header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(invalid("expected a number in the header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| invalid("header number out of range"))?;
    }
    // exactly one whitespace byte separates the header from the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(invalid("missing whitespace after maxval"));
    }
    let [w, h, maxval] = fields;
    if w == 0 || h == 0 {
        return Err(invalid("image dimensions must be positive"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(invalid(format!("maxval {maxval} outside 1..=65535")));
    }
    Ok(Header {
        magic,
        width: usize::try_from(w).map_err(|_| invalid("width too large"))?,
        height: usize::try_from(h).map_err(|_| invalid("height too large"))?,
        maxval: maxval as u32,
        data_start: pos + 1,
    })
}

fn raster<'a>(bytes: &'a [u8], h: &Header, bytes_per_pixel: usize) -> Result<&'a [u8]> {
    let need = h
        .width
        .checked_mul(h.height)
        .and_then(|n| n.checked_mul(bytes_per_pixel))
        .ok_or_else(|| invalid("image too large"))?;
    bytes
        .get(h.data_start..h.data_start + need)
        .ok_or_else(|| invalid(format!("raster truncated: need {need} bytes")))
}

/// Decodes P6 into RGB, or P5 into 16-bit grey (8-bit samples scaled by 257).
pub fn decode(bytes: &[u8]) -> Result<RasterImage> {
    let h = parse_header(bytes)?;
    match &h.magic {
        b"P6" => {
            if h.maxval != 255 {
                return Err(invalid("only 8-bit PPM (maxval 255) is supported"));
            }
            let data = raster(bytes, &h, 3)?.to_vec();
            Ok(RasterImage::from_rgb(h.width, h.height, data)?)
        }
        b"P5" => {
            let samples: Vec<u16> = if h.maxval < 256 {
                raster(bytes, &h, 1)?
                    .iter()
                    .map(|&b| (b as u32 * 65535 / h.maxval) as u16)
                    .collect()
            } else {
                raster(bytes, &h, 2)?
                    .chunks_exact(2)
                    .map(|c| {
                        let v = u16::from_be_bytes([c[0], c[1]]) as u32;
                        (v.min(h.maxval) * 65535 / h.maxval) as u16
                    })
                    .collect()
            };
            Ok(RasterImage::gray16(h.width, h.height, samples)?)
        }
        m => Err(invalid(format!(
            "unsupported Netpbm type {}",
            String::from_utf8_lossy(m)
        ))),
    }
}

/// Raw 16-bit samples of a P5 file, without rescaling to the full range.
pub fn decode_pgm16_raw(bytes: &[u8]) -> Result<(usize, usize, Vec<u16>)> {
    let h = parse_header(bytes)?;
    if &h.magic != b"P5" || h.maxval < 256 {
        return Err(invalid("expected a 16-bit PGM"));
    }
    let samples = raster(bytes, &h, 2)?
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]))
        .collect();
    Ok((h.width, h.height, samples))
}

pub fn read_image(path: &Path) -> Result<RasterImage> {
    decode(&read_bytes(path)?).map_err(|e| Error {
        message: format!("{}: {}", path.display(), e.message),
        ..e
    })
}

pub fn write_ppm(path: &Path, image: &RasterImage) -> Result<()> {
    write_atomic(path, &encode_ppm(image)?)
}

pub fn write_pgm16(path: &Path, width: usize, height: usize, samples: &[u16]) -> Result<()> {
    write_atomic(path, &encode_pgm16(width, height, samples)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_golden_bytes() {
        let mut img = RasterImage::rgb(2, 1, [1, 2, 3]);
        img.put_rgb(1, 0, [250, 251, 252]);
        let bytes = encode_ppm(&img).unwrap();
        assert_eq!(bytes, b"P6\n2 1\n255\n\x01\x02\x03\xfa\xfb\xfc");
        assert_eq!(decode(&bytes).unwrap(), img);
    }

    #[test]
    fn pgm16_golden_bytes() {
        let bytes = encode_pgm16(3, 1, &[0, 258, 65535]).unwrap();
        assert_eq!(bytes, b"P5\n3 1\n65535\n\x00\x00\x01\x02\xff\xff");
        assert_eq!(decode_pgm16_raw(&bytes).unwrap(), (3, 1, vec![0, 258, 65535]));
    }

    #[test]
    fn header_comments_and_eight_bit_grey() {
        let bytes = b"P5 # comment\n2 # w\n 1\n255\n\x00\xff";
        let img = decode(bytes).unwrap();
        assert_eq!(img.pixels(), &Pixels::Gray16(vec![0, 65535]));
    }

    #[test]
    fn malformed_inputs_fail() {
        for bad in [
            &b""[..],
            b"P3\n1 1\n255\n0 0 0",
            b"P6\n1 1\n255\n\x00",
            b"P6\n0 1\n255\n",
            b"P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00",
            b"P6\n1 1",
        ] {
            assert!(decode(bad).is_err(), "{:?}", String::from_utf8_lossy(bad));
        }
    }
}
