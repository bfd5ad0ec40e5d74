//! Matrix and chain file formats: Matrix Market (array and coordinate,
//! real/integer/complex fields) and a JSON schema with complex numbers as
//! [re, im] pairs.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::chain::{ChainError, ChainSide, JordanChain};
use crate::matrix::{ComplexMatrix, ComplexVector, MatrixError};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("JSON error: {0}")]
    Json(String),
    #[error("unknown matrix format {0:?} (expected \"matrix-market\" or \"json\")")]
    UnknownFormat(String),
    #[error("cannot infer format from path {0:?}; pass --format")]
    UnknownExtension(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    MatrixMarket,
    Json,
}

impl FromStr for MatrixFormat {
    type Err = IoError;
    fn from_str(s: &str) -> Result<Self, IoError> {
        match s.to_ascii_lowercase().as_str() {
            "matrix-market" | "matrixmarket" | "mm" | "mtx" => Ok(Self::MatrixMarket),
            "json" => Ok(Self::Json),
            other => Err(IoError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for MatrixFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MatrixMarket => write!(f, "matrix-market"),
            Self::Json => write!(f, "json"),
        }
    }
}

/// Infers the format from the file extension (.mtx/.mm vs .json).
pub fn format_for_path(path: &Path) -> Result<MatrixFormat, IoError> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
        Some(ext) if ext == "mtx" || ext == "mm" => Ok(MatrixFormat::MatrixMarket),
        Some(ext) if ext == "json" => Ok(MatrixFormat::Json),
        _ => Err(IoError::UnknownExtension(path.display().to_string())),
    }
}

pub fn read_matrix(path: &Path, format: MatrixFormat) -> Result<ComplexMatrix, IoError> {
    let text = fs::read_to_string(path)
        .map_err(|source| IoError::Read { path: path.display().to_string(), source })?;
    match format {
        MatrixFormat::MatrixMarket => parse_matrix_market(&text),
        MatrixFormat::Json => parse_matrix_json(&text),
    }
}

pub fn write_matrix(path: &Path, format: MatrixFormat, m: &ComplexMatrix) -> Result<(), IoError> {
    let text = match format {
        MatrixFormat::MatrixMarket => matrix_market_string(m),
        MatrixFormat::Json => matrix_json_string(m),
    };
    fs::write(path, text)
        .map_err(|source| IoError::Write { path: path.display().to_string(), source })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum MmLayout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum MmField {
    Real,
    Integer,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum MmSymmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

fn parse_error(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse { line, message: message.into() }
}

/// Parses Matrix Market text: array and coordinate layouts; real, integer,
/// and complex fields; general, symmetric, skew-symmetric, and hermitian
/// symmetries.
pub fn parse_matrix_market(text: &str) -> Result<ComplexMatrix, IoError> {
    let mut lines = text.lines().enumerate();
    let (banner_line, banner) = lines
        .next()
        .ok_or_else(|| parse_error(1, "empty file"))?;
    let tokens: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_error(
            banner_line + 1,
            "expected banner \"%%MatrixMarket matrix <format> <field> <symmetry>\"",
        ));
    }
    let layout = match tokens[2].as_str() {
        "array" => MmLayout::Array,
        "coordinate" => MmLayout::Coordinate,
        other => return Err(parse_error(banner_line + 1, format!("unsupported format {other:?}"))),
    };
    let field = match tokens[3].as_str() {
        "real" => MmField::Real,
        "integer" => MmField::Integer,
        "complex" => MmField::Complex,
        "pattern" => {
            return Err(parse_error(
                banner_line + 1,
                "pattern matrices carry no values; use real, integer, or complex",
            ))
        }
        other => return Err(parse_error(banner_line + 1, format!("unsupported field {other:?}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        "skew-symmetric" => MmSymmetry::SkewSymmetric,
        "hermitian" => MmSymmetry::Hermitian,
        other => {
            return Err(parse_error(banner_line + 1, format!("unsupported symmetry {other:?}")))
        }
    };

    // skip comments and blank lines up to the size line
    let mut size_line = None;
    for (idx, raw) in lines.by_ref() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        size_line = Some((idx, trimmed.to_string()));
        break;
    }
    let (size_idx, size_text) =
        size_line.ok_or_else(|| parse_error(banner_line + 2, "missing size line"))?;
    let sizes: Vec<usize> = size_text
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| parse_error(size_idx + 1, format!("bad size token {t:?}")))
        })
        .collect::<Result<_, _>>()?;

    let values_per_entry = match field {
        MmField::Complex => 2,
        _ => 1,
    };
    let parse_value = |tokens: &[&str], line: usize| -> Result<Complex64, IoError> {
        let re: f64 = tokens[0]
            .parse()
            .map_err(|_| parse_error(line, format!("bad numeric token {:?}", tokens[0])))?;
        let im: f64 = if values_per_entry == 2 {
            tokens[1]
                .parse()
                .map_err(|_| parse_error(line, format!("bad numeric token {:?}", tokens[1])))?
        } else {
            0.0
        };
        Ok(Complex64::new(re, im))
    };

    match layout {
        MmLayout::Array => {
            if sizes.len() != 2 {
                return Err(parse_error(size_idx + 1, "array size line must be \"rows cols\""));
            }
            let (rows, cols) = (sizes[0], sizes[1]);
            if rows == 0 || cols == 0 {
                return Err(parse_error(size_idx + 1, "dimensions must be positive"));
            }
            if symmetry != MmSymmetry::General && rows != cols {
                return Err(parse_error(size_idx + 1, "symmetric layouts require a square matrix"));
            }
            // array data is column-major; non-general symmetries store only
            // the lower triangle
            let mut positions: Vec<(usize, usize)> = Vec::new();
            for j in 0..cols {
                let start = if symmetry == MmSymmetry::General { 0 } else { j };
                for i in start..rows {
                    positions.push((i, j));
                }
            }
            let mut matrix = ComplexMatrix::zeros(rows, cols);
            let mut cursor = 0;
            for (idx, raw) in lines.by_ref() {
                let trimmed = raw.trim();
                if trimmed.is_empty() || trimmed.starts_with('%') {
                    continue;
                }
                let tokens: Vec<&str> = trimmed.split_whitespace().collect();
                if tokens.len() != values_per_entry {
                    return Err(parse_error(
                        idx + 1,
                        format!("expected {values_per_entry} value(s) per line"),
                    ));
                }
                if cursor >= positions.len() {
                    return Err(parse_error(idx + 1, "more entries than the size line allows"));
                }
                let value = parse_value(&tokens, idx + 1)?;
                let (i, j) = positions[cursor];
                matrix[(i, j)] = value;
                if i != j {
                    match symmetry {
                        MmSymmetry::General => {}
                        MmSymmetry::Symmetric => matrix[(j, i)] = value,
                        MmSymmetry::SkewSymmetric => matrix[(j, i)] = -value,
                        MmSymmetry::Hermitian => matrix[(j, i)] = value.conj(),
                    }
                }
                cursor += 1;
            }
            if cursor != positions.len() {
                return Err(parse_error(
                    size_idx + 1,
                    format!("expected {} entries, found {cursor}", positions.len()),
                ));
            }
            Ok(matrix)
        }
        MmLayout::Coordinate => {
            if sizes.len() != 3 {
                return Err(parse_error(size_idx + 1, "coordinate size line must be \"rows cols nnz\""));
            }
            let (rows, cols, nnz) = (sizes[0], sizes[1], sizes[2]);
            if rows == 0 || cols == 0 {
                return Err(parse_error(size_idx + 1, "dimensions must be positive"));
            }
            let mut matrix = ComplexMatrix::zeros(rows, cols);
            let mut seen = vec![false; rows * cols];
            let mut count = 0;
            for (idx, raw) in lines.by_ref() {
                let trimmed = raw.trim();
                if trimmed.is_empty() || trimmed.starts_with('%') {
                    continue;
                }
                let tokens: Vec<&str> = trimmed.split_whitespace().collect();
                if tokens.len() != 2 + values_per_entry {
                    return Err(parse_error(
                        idx + 1,
                        format!("expected \"i j\" plus {values_per_entry} value(s)"),
                    ));
                }
                let i: usize = tokens[0]
                    .parse()
                    .map_err(|_| parse_error(idx + 1, format!("bad row index {:?}", tokens[0])))?;
                let j: usize = tokens[1]
                    .parse()
                    .map_err(|_| parse_error(idx + 1, format!("bad column index {:?}", tokens[1])))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_error(
                        idx + 1,
                        format!("index ({i}, {j}) out of range for {rows}x{cols}"),
                    ));
                }
                let (i, j) = (i - 1, j - 1);
                if seen[i * cols + j] {
                    return Err(parse_error(idx + 1, format!("duplicate entry at ({}, {})", i + 1, j + 1)));
                }
                seen[i * cols + j] = true;
                let value = parse_value(&tokens[2..], idx + 1)?;
                matrix[(i, j)] = value;
                if i != j {
                    match symmetry {
                        MmSymmetry::General => {}
                        MmSymmetry::Symmetric => matrix[(j, i)] = value,
                        MmSymmetry::SkewSymmetric => matrix[(j, i)] = -value,
                        MmSymmetry::Hermitian => matrix[(j, i)] = value.conj(),
                    }
                }
                count += 1;
                if count > nnz {
                    return Err(parse_error(idx + 1, "more entries than the size line allows"));
                }
            }
            if count != nnz {
                return Err(parse_error(
                    size_idx + 1,
                    format!("expected {nnz} entries, found {count}"),
                ));
            }
            Ok(matrix)
        }
    }
}

/// Serializes in Matrix Market array/complex/general form with 17
/// significant digits, enough to round-trip every f64.
pub fn matrix_market_string(m: &ComplexMatrix) -> String {
    let mut out = String::from("%%MatrixMarket matrix array complex general\n");
    out.push_str(&format!("{} {}\n", m.rows(), m.cols()));
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let z = m[(i, j)];
            out.push_str(&format!("{:.16e} {:.16e}\n", z.re, z.im));
        }
    }
    out
}

#[derive(serde::Serialize, serde::Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<(f64, f64)>,
}

/// Parses the JSON matrix schema {"rows": n, "cols": n,
/// "entries": [[re, im], ...]} with entries in row-major order.
pub fn parse_matrix_json(text: &str) -> Result<ComplexMatrix, IoError> {
    let parsed: MatrixJson =
        serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    if parsed.entries.len() != parsed.rows * parsed.cols {
        return Err(IoError::Json(format!(
            "entries length {} does not equal rows*cols = {}",
            parsed.entries.len(),
            parsed.rows * parsed.cols
        )));
    }
    Ok(ComplexMatrix::new(
        parsed.rows,
        parsed.cols,
        parsed
            .entries
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect(),
    )?)
}

pub fn matrix_json_string(m: &ComplexMatrix) -> String {
    let value = MatrixJson {
        rows: m.rows(),
        cols: m.cols(),
        entries: m.entries().iter().map(|z| (z.re, z.im)).collect(),
    };
    serde_json::to_string_pretty(&value).expect("matrix serializes")
}

#[derive(serde::Serialize, serde::Deserialize)]
struct ChainJson {
    side: ChainSide,
    eigenvalue: (f64, f64),
    vectors: Vec<Vec<(f64, f64)>>,
}

/// Parses a Jordan chain from JSON: {"side": "right"|"left",
/// "eigenvalue": [re, im], "vectors": [[[re, im], ...], ...]}.
pub fn parse_chain_json(text: &str) -> Result<JordanChain, IoError> {
    let parsed: ChainJson = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    let vectors: Vec<ComplexVector> = parsed
        .vectors
        .into_iter()
        .map(|v| ComplexVector::new(v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()))
        .collect();
    Ok(JordanChain::new(
        parsed.side,
        Complex64::new(parsed.eigenvalue.0, parsed.eigenvalue.1),
        vectors,
    )?)
}

pub fn chain_json_string(chain: &JordanChain) -> String {
    let value = ChainJson {
        side: chain.side(),
        eigenvalue: (chain.eigenvalue().re, chain.eigenvalue().im),
        vectors: chain
            .vectors()
            .iter()
            .map(|v| v.entries().iter().map(|z| (z.re, z.im)).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&value).expect("chain serializes")
}

pub fn read_chain(path: &Path) -> Result<JordanChain, IoError> {
    let text = fs::read_to_string(path)
        .map_err(|source| IoError::Read { path: path.display().to_string(), source })?;
    parse_chain_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn array_identity_round_trip() {
        let text = "%%MatrixMarket matrix array real general\n2 2\n1.0\n0.0\n0.0\n1.0\n";
        let m = parse_matrix_market(text).unwrap();
        assert!(m.entrywise_close(&ComplexMatrix::identity(2), 0.0));
    }

    #[test]
    fn coordinate_with_comments() {
        let text = "%%MatrixMarket matrix coordinate real general\n% a comment\n2 2 2\n1 2 3.5\n2 1 -1.0\n";
        let m = parse_matrix_market(text).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(3.5, 0.0));
        assert_eq!(m[(1, 0)], Complex64::new(-1.0, 0.0));
        assert_eq!(m[(0, 0)], Complex64::ZERO);
    }

    #[test]
    fn coordinate_complex_and_symmetric() {
        let text = "%%MatrixMarket matrix coordinate complex hermitian\n2 2 2\n1 1 1.0 0.0\n2 1 2.0 1.0\n";
        let m = parse_matrix_market(text).unwrap();
        assert_eq!(m[(1, 0)], Complex64::new(2.0, 1.0));
        assert_eq!(m[(0, 1)], Complex64::new(2.0, -1.0));
    }

    #[test]
    fn banner_and_count_errors_carry_lines() {
        let err = parse_matrix_market("%%MatrixMarket matrix weird real general\n1 1\n1\n")
            .unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 1, .. }));

        let err =
            parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n")
                .unwrap_err();
        assert!(matches!(err, IoError::Parse { .. }));

        let err = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 1 2.0\n",
        )
        .unwrap_err();
        let text = err.to_string();
        assert!(text.contains("duplicate"), "{text}");
    }

    #[test]
    fn json_entry_count_is_checked() {
        let err =
            parse_matrix_json(r#"{"rows": 2, "cols": 2, "entries": [[1.0, 0.0]]}"#).unwrap_err();
        assert!(matches!(err, IoError::Json(_)));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(1.0 / 3.0, -2.0 / 7.0),
                Complex64::new(f64::MIN_POSITIVE, 1e300),
                Complex64::new(-0.0, 0.1 + 0.2),
                Complex64::new(std::f64::consts::PI, -std::f64::consts::E),
            ],
        )
        .unwrap();
        let round = parse_matrix_json(&matrix_json_string(&m)).unwrap();
        for (a, b) in m.entries().iter().zip(round.entries()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn matrix_market_round_trip_is_bit_exact() {
        let m = ComplexMatrix::new(
            2,
            1,
            vec![Complex64::new(1.0 / 3.0, -2.0 / 7.0), Complex64::new(1e-300, 2.0)],
        )
        .unwrap();
        let round = parse_matrix_market(&matrix_market_string(&m)).unwrap();
        for (a, b) in m.entries().iter().zip(round.entries()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn chain_json_round_trip() {
        let chain = JordanChain::new(
            ChainSide::Left,
            Complex64::new(0.5, -0.25),
            vec![ComplexVector::from_real(&[1.0, 2.0]), ComplexVector::from_real(&[3.0, 4.0])],
        )
        .unwrap();
        let round = parse_chain_json(&chain_json_string(&chain)).unwrap();
        assert_eq!(round, chain);
    }
}
