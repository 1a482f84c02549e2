//! File formats: dense numeric CSV (optional header auto-detected), sparse
//! triplet files, and single-column vectors.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a write
//! followed by a read reproduces every value bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use isee_core::{LdaClass, Mat, Vector};

use crate::error::{CliError, CliResult};

fn read_to_string(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))
}

fn parse_field(tok: &str, row: usize, col: usize, path: &Path) -> CliResult<f64> {
    let v: f64 = tok.trim().parse().map_err(|_| {
        CliError::validation(format!(
            "{}: row {row}, column {col}: cannot parse '{}' as a number",
            path.display(),
            tok.trim()
        ))
    })?;
    if !v.is_finite() {
        return Err(CliError::validation(format!(
            "{}: row {row}, column {col}: non-finite value",
            path.display()
        )));
    }
    Ok(v)
}

/// Reads a dense matrix from CSV. A first line whose fields do not all parse
/// as numbers is treated as a header and skipped. Rows are observations.
pub fn read_matrix_csv(path: &Path) -> CliResult<Mat> {
    let text = read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    let mut first_data_line = true;
    for (idx, line) in text.lines().enumerate() {
        let row_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if first_data_line {
            let is_header = fields.iter().any(|f| f.trim().parse::<f64>().is_err());
            first_data_line = false;
            if is_header {
                continue;
            }
        }
        let mut row = Vec::with_capacity(fields.len());
        for (c, tok) in fields.iter().enumerate() {
            row.push(parse_field(tok, row_no, c + 1, path)?);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(CliError::validation(format!(
                    "{}: row {row_no} has {} fields, expected {w}",
                    path.display(),
                    row.len()
                )));
            }
            _ => {}
        }
        rows.push(row);
    }
    let width = width.ok_or_else(|| {
        CliError::validation(format!("{}: no data rows found", path.display()))
    })?;
    let mut m = Mat::zeros(rows.len(), width);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

pub fn write_matrix_csv(path: &Path, m: &Mat) -> CliResult<()> {
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", m[(i, j)]);
        }
        out.push('\n');
    }
    std::fs::write(path, out)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

/// Reads a single-column (or single-row) vector from CSV.
pub fn read_vector_csv(path: &Path) -> CliResult<Vector> {
    let m = read_matrix_csv(path)?;
    if m.ncols() == 1 {
        Ok(Vector::from_column_slice(m.as_slice()))
    } else if m.nrows() == 1 {
        Ok(m.row(0).transpose())
    } else {
        Err(CliError::validation(format!(
            "{}: expected a vector, found a {}x{} matrix",
            path.display(),
            m.nrows(),
            m.ncols()
        )))
    }
}

pub fn write_vector_csv(path: &Path, v: &Vector) -> CliResult<()> {
    let mut out = String::new();
    for x in v.iter() {
        let _ = writeln!(out, "{x}");
    }
    std::fs::write(path, out)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

/// Class labels: one value per line, 1 for class one and 2 for class two.
pub fn read_labels_csv(path: &Path) -> CliResult<Vec<LdaClass>> {
    let text = read_to_string(path)?;
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        match t {
            "1" => labels.push(LdaClass::One),
            "2" => labels.push(LdaClass::Two),
            other => {
                return Err(CliError::validation(format!(
                    "{}: line {}: label '{other}' is not 1 or 2",
                    path.display(),
                    idx + 1
                )));
            }
        }
    }
    if labels.is_empty() {
        return Err(CliError::validation(format!(
            "{}: no labels found",
            path.display()
        )));
    }
    Ok(labels)
}

pub fn write_labels_csv(path: &Path, labels: &[LdaClass]) -> CliResult<()> {
    let mut out = String::new();
    for l in labels {
        out.push(match l {
            LdaClass::One => '1',
            LdaClass::Two => '2',
        });
        out.push('\n');
    }
    std::fs::write(path, out)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

/// Writes the nonzero entries of a symmetric matrix as triplet lines
/// `i,j,value` with `i <= j`, 1-based, preceded by a `p=<p>` header.
pub fn write_triplet(path: &Path, m: &Mat) -> CliResult<()> {
    let p = m.nrows();
    let mut out = String::new();
    let _ = writeln!(out, "p={p}");
    for i in 0..p {
        for j in i..p {
            let v = m[(i, j)];
            if v != 0.0 {
                let _ = writeln!(out, "{},{},{}", i + 1, j + 1, v);
            }
        }
    }
    std::fs::write(path, out)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

/// Reads a triplet file back into a dense symmetric matrix.
pub fn read_triplet(path: &Path) -> CliResult<Mat> {
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| {
        CliError::validation(format!("{}: empty triplet file", path.display()))
    })?;
    let p: usize = header
        .trim()
        .strip_prefix("p=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| {
            CliError::validation(format!(
                "{}: first line must be 'p=<node count>', found '{header}'",
                path.display()
            ))
        })?;
    let mut m = Mat::zeros(p, p);
    for (idx, line) in lines {
        let row_no = idx + 1;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let fields: Vec<&str> = t.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::validation(format!(
                "{}: line {row_no}: expected 'i,j,value'",
                path.display()
            )));
        }
        let parse_idx = |tok: &str, what: &str| -> CliResult<usize> {
            let v: usize = tok.trim().parse().map_err(|_| {
                CliError::validation(format!(
                    "{}: line {row_no}: bad {what} index '{}'",
                    path.display(),
                    tok.trim()
                ))
            })?;
            if v < 1 || v > p {
                return Err(CliError::validation(format!(
                    "{}: line {row_no}: {what} index {v} outside 1..={p}",
                    path.display()
                )));
            }
            Ok(v)
        };
        let i = parse_idx(fields[0], "row")?;
        let j = parse_idx(fields[1], "column")?;
        if i > j {
            return Err(CliError::validation(format!(
                "{}: line {row_no}: requires i <= j",
                path.display()
            )));
        }
        let v = parse_field(fields[2], row_no, 3, path)?;
        m[(i - 1, j - 1)] = v;
        m[(j - 1, i - 1)] = v;
    }
    Ok(m)
}

/// Distinguishes a triplet file (first line `p=<n>`) from a dense CSV.
pub fn read_matrix_any(path: &Path) -> CliResult<Mat> {
    let text = read_to_string(path)?;
    if text.trim_start().starts_with("p=") {
        read_triplet(path)
    } else {
        read_matrix_csv(path)
    }
}

/// Off-diagonal support pairs (0-based, i < j) of a matrix's nonzeros.
pub fn support_pairs(m: &Mat) -> Vec<(usize, usize)> {
    let p = m.nrows();
    let mut pairs = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            if m[(i, j)] != 0.0 {
                pairs.push((i, j));
            }
        }
    }
    pairs
}
