//! Image and table files.
//!
//! Images are written as 16-bit binary PGM (`P5`), max-scaled to 65535, with
//! the scale `max / 65535` stored in a `<file>.scale` sidecar so that gray
//! values times scale recover intensities.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Result, SpiralError};
use crate::signal::Signal;

const MAXVAL: u16 = 65535;

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".scale");
    PathBuf::from(name)
}

/// PGM bytes for a nonnegative image, and the per-gray-level scale.
pub fn encode_pgm(image: &Signal) -> Result<(Vec<u8>, f64)> {
    image.check_feasible()?;
    let (rows, cols) = image
        .shape()
        .ok_or_else(|| SpiralError::InvalidShape("PGM output needs a 2D image".into()))?;
    let max = image.values().iter().copied().fold(0.0, f64::max);
    let scale = if max > 0.0 { max / MAXVAL as f64 } else { 1.0 };
    let mut out = format!("P5\n{cols} {rows}\n{MAXVAL}\n").into_bytes();
    for &v in image.values() {
        let g = (v / scale).round().min(MAXVAL as f64) as u16;
        out.extend_from_slice(&g.to_be_bytes());
    }
    Ok((out, scale))
}

pub fn write_pgm(path: &Path, image: &Signal) -> Result<()> {
    let (bytes, scale) = encode_pgm(image)?;
    std::fs::write(path, bytes)?;
    std::fs::write(sidecar(path), format!("{scale:e}\n"))?;
    Ok(())
}

/// Parses `P2` or `P5` PGM (8 or 16 bit) into gray values.
pub fn decode_pgm(bytes: &[u8]) -> Result<Signal> {
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(SpiralError::Parse("truncated PGM header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token()?;
    let num = |s: String| {
        s.parse::<usize>()
            .map_err(|_| SpiralError::Parse(format!("bad PGM header field {s:?}")))
    };
    let cols = num(token()?)?;
    let rows = num(token()?)?;
    let maxval = num(token()?)?;
    if maxval == 0 || maxval > 65535 {
        return Err(SpiralError::Parse(format!("bad PGM maxval {maxval}")));
    }
    let n = rows * cols;
    let values = match magic.as_str() {
        "P2" => (0..n)
            .map(|_| {
                let t = token()?;
                t.parse::<f64>()
                    .map_err(|_| SpiralError::Parse(format!("bad PGM sample {t:?}")))
            })
            .collect::<Result<Vec<f64>>>()?,
        "P5" => {
            // Exactly one whitespace byte separates the header from the raster.
            let data = bytes.get(pos + 1..).unwrap_or(&[]);
            let width = if maxval > 255 { 2 } else { 1 };
            if data.len() < n * width {
                return Err(SpiralError::Parse("truncated PGM raster".into()));
            }
            (0..n)
                .map(|i| {
                    if width == 2 {
                        u16::from_be_bytes([data[2 * i], data[2 * i + 1]]) as f64
                    } else {
                        data[i] as f64
                    }
                })
                .collect()
        }
        other => {
            return Err(SpiralError::Parse(format!(
                "unsupported PGM magic {other:?}"
            )))
        }
    };
    Signal::image(rows, cols, values)
}

/// Reads a PGM; if a `.scale` sidecar exists, gray values are multiplied by it.
pub fn read_pgm(path: &Path) -> Result<Signal> {
    let image = decode_pgm(&std::fs::read(path)?)?;
    match std::fs::read_to_string(sidecar(path)) {
        Ok(text) => {
            let scale: f64 = text
                .trim()
                .parse()
                .map_err(|_| SpiralError::Parse(format!("bad scale sidecar {text:?}")))?;
            image.with_values(image.values().iter().map(|v| v * scale).collect())
        }
        Err(_) => Ok(image),
    }
}

/// One image row per line, comma separated.
pub fn image_csv(image: &Signal) -> Result<String> {
    let (rows, cols) = image
        .shape()
        .ok_or_else(|| SpiralError::InvalidShape("CSV image output needs a 2D image".into()))?;
    let mut out = String::new();
    for r in 0..rows {
        let row = &image.values()[r * cols..(r + 1) * cols];
        for (c, v) in row.iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_image_csv(text: &str) -> Result<Signal> {
    let mut values = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let row = line
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| SpiralError::Parse(format!("bad CSV value {t:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(SpiralError::Parse(format!(
                    "row {rows} has {} values, expected {c}",
                    row.len()
                )))
            }
            _ => {}
        }
        values.extend(row);
        rows += 1;
    }
    Signal::image(rows, cols.unwrap_or(0), values)
}

/// Reads `.csv` as a comma-separated image and anything else as PGM.
pub fn read_image(path: &Path) -> Result<Signal> {
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        parse_image_csv(&std::fs::read_to_string(path)?)
    } else {
        read_pgm(path)
    }
}

pub fn write_image(path: &Path, image: &Signal) -> Result<()> {
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        std::fs::write(path, image_csv(image)?)?;
        Ok(())
    } else {
        write_pgm(path, image)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip_within_quantization() {
        let img = Signal::image(2, 3, vec![0.0, 1.0, 2.5, 3.0, 0.25, 7.0]).unwrap();
        let (bytes, scale) = encode_pgm(&img).unwrap();
        assert!(bytes.starts_with(b"P5\n3 2\n65535\n"));
        let back = decode_pgm(&bytes).unwrap();
        for (a, b) in back.values().iter().zip(img.values()) {
            assert!((a * scale - b).abs() <= scale);
        }
    }

    #[test]
    fn ascii_pgm_with_comments() {
        let text = b"P2\n# comment\n2 2\n255\n0 10\n20 255\n";
        let img = decode_pgm(text).unwrap();
        assert_eq!(img.values(), &[0.0, 10.0, 20.0, 255.0]);
        assert_eq!(img.shape(), Some((2, 2)));
    }

    #[test]
    fn csv_round_trip() {
        let img = Signal::image(2, 2, vec![0.5, 1.0, 2.0, 0.0]).unwrap();
        assert_eq!(parse_image_csv(&image_csv(&img).unwrap()).unwrap(), img);
        assert!(parse_image_csv("1,2\n3\n").is_err());
    }

    #[test]
    fn negative_images_refused() {
        let img = Signal::image(1, 2, vec![-1.0, 1.0]).unwrap();
        assert!(encode_pgm(&img).is_err());
    }
}
