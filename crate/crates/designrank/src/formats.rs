//! Text formats.
//!
//! Sparse matrix: `b v nnz`, then one `row col` line per incidence,
//! 1-indexed and sorted row-major. Difference set: `v k lambda`, then the
//! sorted residues on one line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use designrank_core::diffsets::DifferenceSet;
use designrank_core::IncidenceMatrix;

use crate::error::{CliError, Result};

pub fn write_matrix<W: Write>(m: &IncidenceMatrix, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, row) in m.rows().enumerate() {
        for &c in row {
            writeln!(w, "{} {}", i + 1, c + 1)?;
        }
    }
    w.flush()
}

fn numbers(line: &str, lineno: usize, want: usize) -> Result<Vec<u64>> {
    let nums = line
        .split_ascii_whitespace()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| CliError::format(lineno, format!("not a number: {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if nums.len() != want {
        return Err(CliError::format(
            lineno,
            format!("expected {want} fields, found {}", nums.len()),
        ));
    }
    Ok(nums)
}

pub fn read_matrix<R: BufRead>(r: R) -> Result<IncidenceMatrix> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| CliError::format(1, "empty input"))?;
    let header = header.map_err(|e| CliError::format(1, e.to_string()))?;
    let h = numbers(&header, 1, 3)?;
    let (b, v, nnz) = (h[0] as usize, h[1] as usize, h[2] as usize);
    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); b];
    let mut prev = (0u64, 0u64);
    let mut seen = 0usize;
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.map_err(|e| CliError::format(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rc = numbers(&line, lineno, 2)?;
        let (row, col) = (rc[0], rc[1]);
        if row == 0 || col == 0 || row as usize > b || col as usize > v {
            return Err(CliError::format(
                lineno,
                format!("entry ({row}, {col}) outside {b} x {v}"),
            ));
        }
        if (row, col) <= prev {
            return Err(CliError::format(lineno, "entries not sorted row-major"));
        }
        prev = (row, col);
        rows[row as usize - 1].push(col as u32 - 1);
        seen += 1;
    }
    if seen != nnz {
        return Err(CliError::format(
            1,
            format!("header announces {nnz} entries, found {seen}"),
        ));
    }
    Ok(IncidenceMatrix::from_rows(v, rows)?)
}

pub fn write_difference_set<W: Write>(d: &DifferenceSet, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{} {} {}", d.v(), d.k(), d.lambda())?;
    let els: Vec<String> = d.elements().iter().map(|x| x.to_string()).collect();
    writeln!(w, "{}", els.join(" "))?;
    w.flush()
}

pub fn read_difference_set<R: BufRead>(r: R) -> Result<DifferenceSet> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::format(1, "empty input"))?
        .map_err(|e| CliError::format(1, e.to_string()))?;
    let h = numbers(&header, 1, 3)?;
    let body = lines
        .next()
        .ok_or_else(|| CliError::format(2, "missing residues"))?
        .map_err(|e| CliError::format(2, e.to_string()))?;
    let els = numbers(&body, 2, h[1] as usize)?;
    if els.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::format(2, "residues not strictly increasing"));
    }
    Ok(DifferenceSet::new(h[0], h[1], h[2], els)?)
}

/// Contents of an input file, chosen by extension (`.ds` for difference sets).
pub enum Input {
    Matrix(IncidenceMatrix),
    DifferenceSet(DifferenceSet),
}

pub fn is_difference_set_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "ds")
}

pub fn read_input(path: &Path) -> Result<Input> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    let r = BufReader::new(f);
    if is_difference_set_path(path) {
        Ok(Input::DifferenceSet(read_difference_set(r)?))
    } else {
        Ok(Input::Matrix(read_matrix(r)?))
    }
}

/// Opens `path` for writing, or stdout when absent.
pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use designrank_core::diffsets::singer;
    use designrank_core::geometry::incidence_pg;

    #[test]
    fn matrix_round_trip() {
        let m = incidence_pg(2, 2, 2).unwrap();
        let mut buf = Vec::new();
        write_matrix(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("7 7 21\n"));
        assert_eq!(text.lines().count(), 22);
        assert_eq!(read_matrix(&buf[..]).unwrap(), m);
    }

    #[test]
    fn matrix_errors() {
        assert!(read_matrix(&b"2 2 2\n1 1\n1 3\n"[..]).is_err());
        assert!(read_matrix(&b"2 2 2\n2 1\n1 1\n"[..]).is_err());
        assert!(read_matrix(&b"2 2 3\n1 1\n2 2\n"[..]).is_err());
        assert!(read_matrix(&b"2 2\n"[..]).is_err());
        assert!(read_matrix(&b""[..]).is_err());
    }

    #[test]
    fn difference_set_round_trip() {
        let d = singer(2, 3).unwrap();
        let mut buf = Vec::new();
        write_difference_set(&d, &mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("13 4 1\n"));
        assert_eq!(read_difference_set(&buf[..]).unwrap(), d);
        assert!(read_difference_set(&b"7 3 1\n1 2 3\n"[..]).is_err());
        assert!(read_difference_set(&b"7 3 1\n4 2 1\n"[..]).is_err());
    }
}
