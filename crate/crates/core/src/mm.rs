//! Matrix Market reader and writer for square real matrices with general
//! symmetry, in either coordinate or array layout.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MmLayout {
    /// Column-major listing of every entry.
    #[default]
    Array,
    /// `i j value` triples for the nonzero entries.
    Coordinate,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::MatrixMarket(msg.into())
}

pub fn read_matrix_market<R: Read>(reader: R) -> Result<Matrix> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines.next().ok_or_else(|| bad("empty input"))??;
    let fields: Vec<String> = header.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(bad(format!("bad header `{header}`")));
    }
    let layout = match fields[2].as_str() {
        "array" => MmLayout::Array,
        "coordinate" => MmLayout::Coordinate,
        other => return Err(bad(format!("unknown layout `{other}`"))),
    };
    if fields[3] != "real" && fields[3] != "double" {
        return Err(bad(format!("only real matrices are supported, got `{}`", fields[3])));
    }
    if fields[4] != "general" {
        return Err(bad(format!("only general symmetry is supported, got `{}`", fields[4])));
    }

    let mut body = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        body.push(t.to_string());
    }
    let mut rows = body.into_iter();
    let size_line = rows.next().ok_or_else(|| bad("missing size line"))?;
    let size: Vec<usize> = size_line
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| bad(format!("bad size line `{size_line}`"))))
        .collect::<Result<_>>()?;
    let (nr, nc) = match (layout, size.as_slice()) {
        (MmLayout::Array, [r, c]) | (MmLayout::Coordinate, [r, c, _]) => (*r, *c),
        _ => return Err(bad(format!("bad size line `{size_line}`"))),
    };
    if nr != nc || nr == 0 {
        return Err(Error::NotSquare { rows: nr, cols: nc });
    }
    let n = nr;
    let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| bad(format!("`{s}` is not a number"))) };
    let mut m = Matrix::zeros(n);
    match layout {
        MmLayout::Array => {
            let values: Vec<f64> = rows
                .flat_map(|l| l.split_whitespace().map(str::to_string).collect::<Vec<_>>())
                .map(|s| num(&s))
                .collect::<Result<_>>()?;
            if values.len() != n * n {
                return Err(bad(format!("expected {} values, found {}", n * n, values.len())));
            }
            for (k, v) in values.into_iter().enumerate() {
                m[(k % n, k / n)] = v;
            }
        }
        MmLayout::Coordinate => {
            let nnz = size[2];
            let mut seen = std::collections::HashSet::new();
            let mut count = 0;
            for l in rows {
                let parts: Vec<&str> = l.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(bad(format!("bad entry line `{l}`")));
                }
                let idx = |s: &str| -> Result<usize> {
                    match s.parse::<usize>() {
                        Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
                        _ => Err(bad(format!("index `{s}` out of range 1..={n}"))),
                    }
                };
                let (i, j) = (idx(parts[0])?, idx(parts[1])?);
                if !seen.insert((i, j)) {
                    return Err(bad(format!("duplicate entry ({}, {})", i + 1, j + 1)));
                }
                m[(i, j)] = num(parts[2])?;
                count += 1;
            }
            if count != nnz {
                return Err(bad(format!("header declares {nnz} entries, found {count}")));
            }
        }
    }
    Matrix::new(n, m.as_slice().to_vec())
}

pub fn write_matrix_market<W: Write>(mut w: W, m: &Matrix, layout: MmLayout) -> Result<()> {
    let n = m.order();
    match layout {
        MmLayout::Array => {
            writeln!(w, "%%MatrixMarket matrix array real general")?;
            writeln!(w, "{n} {n}")?;
            for j in 0..n {
                for i in 0..n {
                    writeln!(w, "{:e}", m[(i, j)])?;
                }
            }
        }
        MmLayout::Coordinate => {
            let nnz = m.as_slice().iter().filter(|v| **v != 0.0).count();
            writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
            writeln!(w, "{n} {n} {nnz}")?;
            for i in 0..n {
                for j in 0..n {
                    if m[(i, j)] != 0.0 {
                        writeln!(w, "{} {} {:e}", i + 1, j + 1, m[(i, j)])?;
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    read_matrix_market(File::open(path)?)
}

pub fn save_matrix(path: impl AsRef<Path>, m: &Matrix, layout: MmLayout) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix_market(&mut w, m, layout)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Matrix {
        Matrix::from_rows(&[[1.0, -0.25, 0.0], [0.0, 1.0, -1.0 / 3.0], [-0.5, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn round_trip_both_layouts() {
        for layout in [MmLayout::Array, MmLayout::Coordinate] {
            let mut buf = Vec::new();
            write_matrix_market(&mut buf, &sample(), layout).unwrap();
            let back = read_matrix_market(buf.as_slice()).unwrap();
            assert_eq!(back, sample(), "{layout:?}");
        }
    }

    #[test]
    fn array_is_column_major() {
        let text = "%%MatrixMarket matrix array real general\n% comment\n2 2\n1\n2\n3\n4\n";
        let m = read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(m.rows(), vec![vec![1.0, 3.0], vec![2.0, 4.0]]);
    }

    #[test]
    fn rejects_unsupported_inputs() {
        for text in [
            "",
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 1\n",
            "%%MatrixMarket matrix coordinate complex general\n2 2 1\n1 1 1 0\n",
            "%%MatrixMarket matrix array real general\n2 3\n1\n2\n3\n4\n5\n6\n",
            "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n",
            "%%MatrixMarket matrix array real general\n1 1\nnan\n",
        ] {
            assert!(read_matrix_market(text.as_bytes()).is_err(), "{text}");
        }
    }
}
