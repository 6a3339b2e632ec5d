//! Text formats: code files (TOML), basis files (one line per pair) and
//! concatenation lists (one code reference per line).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use crate::basis::SymplecticBasis;
use crate::code::{builtin, CodeError, SelfDualCssCode};
use crate::gf2::{BitMatrix, BitVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Syntax(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Code(#[from] CodeError),
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCode {
    name: Option<String>,
    n: usize,
    d: Option<usize>,
    rows: Vec<Spanned<String>>,
    coset_reps: Option<Vec<Spanned<String>>>,
    basis: Option<Vec<RawPair>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    x: Spanned<String>,
    z: Spanned<String>,
}

#[derive(Serialize)]
struct OutCode<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<&'a str>,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    rows: Vec<String>,
    coset_reps: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    basis: Vec<OutPair>,
}

#[derive(Serialize)]
struct OutPair {
    x: String,
    z: String,
}

/// Contents of a code file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeFile {
    pub code: SelfDualCssCode,
    pub reference_basis: Option<SymplecticBasis>,
}

fn parse_bits(text: &str, s: &Spanned<String>, n: usize, what: &str) -> Result<BitVector, FormatError> {
    let line = line_of(text, s.span().start);
    let v: BitVector = s.get_ref().parse().map_err(|e| FormatError::Line {
        line,
        message: format!("{what}: {e}"),
    })?;
    if v.len() != n {
        return Err(FormatError::Line {
            line,
            message: format!("{what} has length {}, expected n = {n}", v.len()),
        });
    }
    Ok(v)
}

pub fn parse_code_file(text: &str) -> Result<CodeFile, FormatError> {
    let raw: RawCode = toml::from_str(text).map_err(|e| match e.span() {
        Some(span) => FormatError::Line {
            line: line_of(text, span.start),
            message: e.message().to_string(),
        },
        None => FormatError::Syntax(e.message().to_string()),
    })?;
    let n = raw.n;
    let rows = raw
        .rows
        .iter()
        .enumerate()
        .map(|(i, s)| parse_bits(text, s, n, &format!("row {}", i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let h = BitMatrix::from_rows(n, rows).map_err(CodeError::from)?;
    let reps = match &raw.coset_reps {
        None => None,
        Some(list) => {
            let v = list
                .iter()
                .enumerate()
                .map(|(i, s)| parse_bits(text, s, n, &format!("coset_reps entry {}", i + 1)))
                .collect::<Result<Vec<_>, _>>()?;
            Some(BitMatrix::from_rows(n, v).map_err(CodeError::from)?)
        }
    };
    let mut code = SelfDualCssCode::from_check_matrix(&h, reps.as_ref())?;
    if let Some(name) = raw.name {
        code = code.with_name(name);
    }
    if let Some(d) = raw.d {
        code = code.with_distance_label(d);
    }
    let reference_basis = match &raw.basis {
        None => None,
        Some(pairs) => Some(SymplecticBasis::from_pairs(
            pairs
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    Ok((
                        parse_bits(text, &p.x, n, &format!("basis pair {} x", j + 1))?,
                        parse_bits(text, &p.z, n, &format!("basis pair {} z", j + 1))?,
                    ))
                })
                .collect::<Result<Vec<_>, FormatError>>()?,
        )),
    };
    Ok(CodeFile { code, reference_basis })
}

pub fn write_code_file(code: &SelfDualCssCode, basis: Option<&SymplecticBasis>) -> String {
    let out = OutCode {
        name: code.name(),
        n: code.n(),
        d: code.distance_label(),
        rows: code.check().rows().iter().map(ToString::to_string).collect(),
        coset_reps: code.coset_reps().rows().iter().map(ToString::to_string).collect(),
        basis: basis
            .map(|b| {
                b.pairs()
                    .iter()
                    .map(|(x, z)| OutPair {
                        x: x.to_string(),
                        z: z.to_string(),
                    })
                    .collect()
            })
            .unwrap_or_default(),
    };
    toml::to_string(&out).expect("plain strings and integers serialize")
}

pub fn read_code_file(path: &Path) -> Result<CodeFile, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_code_file(&text)
}

/// One line per pair: `X: <bits>  Z: <bits>  class: <class>`.
pub fn write_basis_file(basis: &SymplecticBasis) -> String {
    basis
        .pairs()
        .iter()
        .zip(basis.structure())
        .map(|((x, z), c)| format!("X: {x}  Z: {z}  class: {c}\n"))
        .collect()
}

/// Parses a basis file. Blank lines and `#` comments are skipped; a stated
/// class must match the class derived from the supports.
pub fn parse_basis_file(text: &str) -> Result<SymplecticBasis, FormatError> {
    let mut pairs = Vec::new();
    let mut stated = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| FormatError::Line { line, message };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let mut field = |key: &str| -> Result<String, FormatError> {
            match (tokens.next(), tokens.next()) {
                (Some(k), Some(v)) if k == key => Ok(v.to_string()),
                _ => Err(err(format!("expected `{key} <value>`"))),
            }
        };
        let x: BitVector = field("X:")?.parse().map_err(|e| err(format!("X part: {e}")))?;
        let z: BitVector = field("Z:")?.parse().map_err(|e| err(format!("Z part: {e}")))?;
        let class = match tokens.next() {
            None => None,
            Some("class:") => Some(tokens.next().ok_or_else(|| err("missing class".into()))?.to_string()),
            Some(other) => return Err(err(format!("unexpected {other:?}"))),
        };
        if let Some(extra) = tokens.next() {
            return Err(err(format!("unexpected {extra:?}")));
        }
        if x.len() != z.len() || pairs.first().is_some_and(|(x0, _): &(BitVector, BitVector)| x0.len() != x.len()) {
            return Err(err("pair lengths disagree".into()));
        }
        pairs.push((x, z));
        stated.push((line, class));
    }
    let basis = SymplecticBasis::from_pairs(pairs);
    for ((line, class), actual) in stated.iter().zip(basis.structure()) {
        if let Some(c) = class {
            if *c != actual.to_string() {
                return Err(FormatError::Line {
                    line: *line,
                    message: format!("declared class {c} but supports give {actual}"),
                });
            }
        }
    }
    Ok(basis)
}

pub fn read_basis_file(path: &Path) -> Result<SymplecticBasis, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_basis_file(&text)
}

/// Entry in a concatenation list, innermost code first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeRef {
    Builtin(String),
    File(PathBuf),
}

/// Lines are `builtin:NAME` or a path relative to `base`; blank lines and
/// `#` comments are skipped.
pub fn parse_concat_list(text: &str, base: &Path) -> Result<Vec<CodeRef>, FormatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix("builtin:") {
            let name = name.trim();
            if name.is_empty() {
                return Err(FormatError::Line {
                    line: i + 1,
                    message: "missing builtin name".into(),
                });
            }
            out.push(CodeRef::Builtin(name.to_string()));
        } else {
            out.push(CodeRef::File(base.join(body)));
        }
    }
    if out.is_empty() {
        return Err(FormatError::Syntax("concatenation list names no codes".into()));
    }
    Ok(out)
}

pub fn load_code_ref(r: &CodeRef) -> Result<CodeFile, FormatError> {
    match r {
        CodeRef::Builtin(name) => {
            let entry = builtin(name)?;
            Ok(CodeFile {
                code: entry.code,
                reference_basis: entry.reference_basis,
            })
        }
        CodeRef::File(path) => read_code_file(path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_compatible_basis;

    #[test]
    fn code_file_round_trip() {
        for name in crate::code::CATALOG_NAMES {
            let entry = builtin(name).unwrap();
            let text = write_code_file(&entry.code, entry.reference_basis.as_ref());
            let back = parse_code_file(&text).unwrap();
            assert_eq!(back.code, entry.code, "{name}");
            assert_eq!(back.reference_basis, entry.reference_basis, "{name}");
        }
    }

    #[test]
    fn bad_row_reports_line() {
        let text = "name = \"bad\"\nn = 6\nrows = [\n  \"110011\",\n  \"00111\",\n]\n";
        match parse_code_file(text) {
            Err(FormatError::Line { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("length 5"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_code_file("n = 4\nrows = [\"1111\"\nx"), Err(FormatError::Line { .. })));
        assert!(matches!(parse_code_file("n = 4\nrows = [\"1121\"]\n"), Err(FormatError::Line { line: 2, .. })));
    }

    #[test]
    fn basis_file_round_trip() {
        let entry = builtin("qhamming15").unwrap();
        for basis in [entry.gauge_basis.unwrap(), build_compatible_basis(&entry.code).unwrap()] {
            let text = write_basis_file(&basis);
            assert_eq!(parse_basis_file(&text).unwrap(), basis);
        }
        let bad = "X: 101010  Z: 101010  class: crossed(2)\n";
        assert!(matches!(parse_basis_file(bad), Err(FormatError::Line { line: 1, .. })));
    }

    #[test]
    fn concat_list() {
        let refs = parse_concat_list("# inner first\nbuiltin:qhamming15\ncodes/c622.toml\n", Path::new("/tmp/x")).unwrap();
        assert_eq!(
            refs,
            vec![
                CodeRef::Builtin("qhamming15".into()),
                CodeRef::File(PathBuf::from("/tmp/x/codes/c622.toml"))
            ]
        );
        assert!(parse_concat_list("\n# nothing\n", Path::new(".")).is_err());
    }
}
