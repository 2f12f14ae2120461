//! Plain-text vertex files: one point per line, whitespace-separated
//! decimals, generators only (negations are implicit). Blank lines and
//! `#` comment lines are skipped.

use std::io::{BufRead, Write};

use crate::{Error, Result};

pub fn read_generators<R: BufRead>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::InvalidArgument(format!("read error: {e}")))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let point: Vec<f64> = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| {
                    Error::InvalidArgument(format!(
                        "line {}: cannot parse '{tok}' as a decimal",
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<_>>()?;
        if let Some(first) = out.first() {
            if point.len() != first.len() {
                return Err(Error::InvalidArgument(format!(
                    "line {}: point has {} coordinates, expected {}",
                    lineno + 1,
                    point.len(),
                    first.len()
                )));
            }
        }
        out.push(point);
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("vertex file holds no points".into()));
    }
    Ok(out)
}

/// 17-significant-digit decimal form that round-trips any finite f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_points<W: Write>(mut writer: W, points: &[Vec<f64>]) -> std::io::Result<()> {
    for point in points {
        let line: Vec<String> = point.iter().map(|&c| fmt_f64(c)).collect();
        writeln!(writer, "{}", line.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let pts = vec![vec![0.1, -2.5e-3], vec![1.0 / 3.0, 7.25]];
        let mut buf = Vec::new();
        write_points(&mut buf, &pts).unwrap();
        let back = read_generators(buf.as_slice()).unwrap();
        assert_eq!(pts, back);
    }

    #[test]
    fn skips_blanks_and_comments() {
        let text = "# cross-polytope generators\n1 0\n\n0 1\n";
        let pts = read_generators(text.as_bytes()).unwrap();
        assert_eq!(pts, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn rejects_ragged_and_garbage() {
        assert!(read_generators("1 2\n3\n".as_bytes()).is_err());
        assert!(read_generators("1 x\n".as_bytes()).is_err());
        assert!(read_generators("".as_bytes()).is_err());
    }
}
