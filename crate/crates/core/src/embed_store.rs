//! Pretrained word-embedding tables in word2vec text and binary layouts,
//! cosine similarity, and character n-gram composition for unknown words.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed header: {0}")]
    Header(String),
    #[error("row {row}: expected {expected} components, found {found}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: duplicate token {token:?}")]
    DuplicateToken { row: usize, token: String },
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("header announced {expected} entries, file holds {found}")]
    Count { expected: usize, found: usize },
    #[error("dimension must be positive")]
    ZeroDim,
}

#[derive(Debug, Error, PartialEq)]
pub enum VectorError {
    #[error("vector lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("zero-norm vector")]
    ZeroNorm,
}

#[derive(Debug, Error, PartialEq)]
pub enum NgramError {
    #[error("word {word:?} has fewer than {n} characters")]
    TooShort { word: String, n: usize },
    #[error("none of the {windows} {n}-grams of {word:?} is in the table")]
    NoMatch { word: String, n: usize, windows: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Binary,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" | "txt" => Ok(Format::Text),
            "binary" | "bin" => Ok(Format::Binary),
            other => Err(format!("unknown embedding format {other:?}")),
        }
    }
}

/// A token to vector map with fixed dimensionality.
///
/// Vectors live in one contiguous buffer in insertion order; the table is
/// never mutated after loading, so shared references can be handed to any
/// number of readers.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    name: String,
    dim: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f32>,
}

impl EmbeddingTable {
    pub fn new(name: impl Into<String>, dim: usize) -> Result<Self, EmbedError> {
        if dim == 0 {
            return Err(EmbedError::ZeroDim);
        }
        Ok(EmbeddingTable {
            name: name.into(),
            dim,
            tokens: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
        })
    }

    /// Adds an entry. `row` is only used for error reporting.
    fn push_row(&mut self, row: usize, token: String, vector: &[f32]) -> Result<(), EmbedError> {
        if vector.len() != self.dim {
            return Err(EmbedError::DimensionMismatch {
                row,
                expected: self.dim,
                found: vector.len(),
            });
        }
        if self.index.contains_key(&token) {
            return Err(EmbedError::DuplicateToken { row, token });
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.data.extend_from_slice(vector);
        Ok(())
    }

    pub fn insert(&mut self, token: impl Into<String>, vector: &[f32]) -> Result<(), EmbedError> {
        let row = self.tokens.len();
        self.push_row(row, token.into(), vector)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Exact, case-sensitive lookup. Absence is what makes a word OOV.
    pub fn lookup(&self, token: &str) -> Option<&[f32]> {
        self.index
            .get(token)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Entries in insertion (file) order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.tokens
            .iter()
            .zip(self.data.chunks_exact(self.dim))
            .map(|(t, v)| (t.as_str(), v))
    }

    pub fn load(path: impl AsRef<Path>, format: Format) -> Result<Self, EmbedError> {
        let path = path.as_ref();
        let mut reader = BufReader::new(File::open(path)?);
        let mut table = match format {
            Format::Text => Self::read_text(&mut reader)?,
            Format::Binary => Self::read_binary(&mut reader)?,
        };
        if let Some(stem) = path.file_stem() {
            table.name = stem.to_string_lossy().into_owned();
        }
        Ok(table)
    }

    pub fn save(&self, path: impl AsRef<Path>, format: Format) -> Result<(), EmbedError> {
        let mut w = BufWriter::new(File::create(path)?);
        match format {
            Format::Text => self.write_text(&mut w)?,
            Format::Binary => self.write_binary(&mut w)?,
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_text<R: BufRead>(reader: &mut R) -> Result<Self, EmbedError> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| EmbedError::Header("empty file".into()))??;
        let (count, dim) = parse_header(&header)?;
        let mut table = EmbeddingTable::new("", dim)?;
        let mut vector = Vec::with_capacity(dim);
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(' ').filter(|f| !f.is_empty());
            let token = fields.next().unwrap_or_default().to_owned();
            vector.clear();
            for f in fields {
                let v = f.parse::<f32>().map_err(|e| EmbedError::Row {
                    row,
                    message: format!("bad float {f:?}: {e}"),
                })?;
                vector.push(v);
            }
            table.push_row(row, token, &vector)?;
        }
        if table.len() != count {
            return Err(EmbedError::Count {
                expected: count,
                found: table.len(),
            });
        }
        Ok(table)
    }

    /// Reads the canonical word2vec binary layout: a `"<count> <dim>\n"`
    /// header, then for each entry the token, one space and `dim`
    /// little-endian f32 values. A newline after the floats is tolerated.
    pub fn read_binary<R: BufRead>(reader: &mut R) -> Result<Self, EmbedError> {
        let mut header = Vec::new();
        reader.read_until(b'\n', &mut header)?;
        let header =
            String::from_utf8(header).map_err(|_| EmbedError::Header("header is not utf-8".into()))?;
        let (count, dim) = parse_header(header.trim_end())?;
        let mut table = EmbeddingTable::new("", dim)?;
        let mut vector = vec![0f32; dim];
        let mut token = Vec::new();
        for row in 0..count {
            token.clear();
            reader.read_until(b' ', &mut token)?;
            if token.last() != Some(&b' ') {
                return Err(EmbedError::Count {
                    expected: count,
                    found: row,
                });
            }
            token.pop();
            if token.first() == Some(&b'\n') {
                token.remove(0);
            }
            let token = String::from_utf8(std::mem::take(&mut token)).map_err(|_| EmbedError::Row {
                row,
                message: "token is not utf-8".into(),
            })?;
            reader
                .read_f32_into::<LittleEndian>(&mut vector)
                .map_err(|e| match e.kind() {
                    io::ErrorKind::UnexpectedEof => EmbedError::Row {
                        row,
                        message: "truncated vector".into(),
                    },
                    _ => EmbedError::Io(e),
                })?;
            table.push_row(row, token, &vector)?;
        }
        let mut rest = Vec::new();
        reader.read_to_end(&mut rest)?;
        if rest.iter().any(|b| !b.is_ascii_whitespace()) {
            return Err(EmbedError::Header(format!("trailing data after {count} entries")));
        }
        Ok(table)
    }

    pub fn write_text<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{} {}", self.len(), self.dim)?;
        for (token, vector) in self.iter() {
            w.write_all(token.as_bytes())?;
            for v in vector {
                // `{:?}` prints the shortest string that round-trips exactly
                write!(w, " {v:?}")?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn write_binary<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{} {}", self.len(), self.dim)?;
        for (token, vector) in self.iter() {
            w.write_all(token.as_bytes())?;
            w.write_all(b" ")?;
            for &v in vector {
                w.write_f32::<LittleEndian>(v)?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

fn parse_header(line: &str) -> Result<(usize, usize), EmbedError> {
    let mut it = line.split_whitespace();
    let (Some(count), Some(dim), None) = (it.next(), it.next(), it.next()) else {
        return Err(EmbedError::Header(format!(
            "expected \"<count> <dim>\", got {line:?}"
        )));
    };
    let count = count
        .parse::<usize>()
        .map_err(|e| EmbedError::Header(format!("count {count:?}: {e}")))?;
    let dim = dim
        .parse::<usize>()
        .map_err(|e| EmbedError::Header(format!("dim {dim:?}: {e}")))?;
    if dim == 0 {
        return Err(EmbedError::ZeroDim);
    }
    Ok((count, dim))
}

pub fn dot<T: Copy + Into<f64>>(a: &[T], b: &[T]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x.into() * y.into()).sum()
}

pub fn norm<T: Copy + Into<f64>>(a: &[T]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine similarity accumulated in f64.
pub fn cosine<T: Copy + Into<f64>>(a: &[T], b: &[T]) -> Result<f64, VectorError> {
    if a.len() != b.len() {
        return Err(VectorError::LengthMismatch(a.len(), b.len()));
    }
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return Err(VectorError::ZeroNorm);
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Sums character n-gram vectors into a vector for a word the word table
/// does not cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NgramComposer {
    pub n: usize,
    /// Wrap the word in `<` and `>` before windowing.
    pub boundary_markers: bool,
}

impl Default for NgramComposer {
    fn default() -> Self {
        NgramComposer {
            n: 3,
            boundary_markers: false,
        }
    }
}

impl NgramComposer {
    /// All length-`n` character windows of the (optionally wrapped) word,
    /// in order, duplicates included.
    pub fn windows(&self, word: &str) -> Result<Vec<String>, NgramError> {
        let mut chars: Vec<char> = Vec::with_capacity(word.len() + 2);
        if self.boundary_markers {
            chars.push('<');
        }
        chars.extend(word.chars());
        if self.boundary_markers {
            chars.push('>');
        }
        if self.n == 0 || chars.len() < self.n {
            return Err(NgramError::TooShort {
                word: word.to_owned(),
                n: self.n,
            });
        }
        Ok(chars.windows(self.n).map(|w| w.iter().collect()).collect())
    }

    pub fn compose(&self, ngrams: &EmbeddingTable, word: &str) -> Result<Vec<f32>, NgramError> {
        let windows = self.windows(word)?;
        let mut sum = vec![0f64; ngrams.dim()];
        let mut matched = 0usize;
        for gram in &windows {
            if let Some(v) = ngrams.lookup(gram) {
                matched += 1;
                for (s, &x) in sum.iter_mut().zip(v) {
                    *s += f64::from(x);
                }
            }
        }
        if matched == 0 {
            return Err(NgramError::NoMatch {
                word: word.to_owned(),
                n: self.n,
                windows: windows.len(),
            });
        }
        Ok(sum.into_iter().map(|x| x as f32).collect())
    }
}

/// Three-gram composition with markers off.
pub fn ngram_compose(ngrams: &EmbeddingTable, word: &str, n: usize) -> Result<Vec<f32>, NgramError> {
    NgramComposer {
        n,
        boundary_markers: false,
    }
    .compose(ngrams, word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn small() -> EmbeddingTable {
        let text = "2 3\ndog 1 2 3\ncat -1 0.5 0.25\n";
        EmbeddingTable::read_text(&mut Cursor::new(text)).unwrap()
    }

    #[test]
    fn reads_text_file() {
        let t = small();
        assert_eq!(t.len(), 2);
        assert_eq!(t.dim(), 3);
        assert_eq!(t.lookup("cat"), Some(&[-1.0f32, 0.5, 0.25][..]));
    }

    #[test]
    fn binary_matches_text() {
        let t = small();
        let mut buf = Vec::new();
        t.write_binary(&mut buf).unwrap();
        let b = EmbeddingTable::read_binary(&mut Cursor::new(buf)).unwrap();
        assert_eq!(t, b);
    }

    #[test]
    fn binary_without_trailing_newlines() {
        let mut buf = b"2 2\n".to_vec();
        for (tok, v) in [("a", [1.0f32, 2.0]), ("b", [3.0, 4.0])] {
            buf.extend_from_slice(tok.as_bytes());
            buf.push(b' ');
            for x in v {
                buf.extend_from_slice(&x.to_le_bytes());
            }
        }
        let t = EmbeddingTable::read_binary(&mut Cursor::new(buf)).unwrap();
        assert_eq!(t.lookup("b"), Some(&[3.0f32, 4.0][..]));
    }

    #[test]
    fn row_with_extra_float_is_rejected() {
        let text = "2 3\ndog 1 2 3\ncat 1 2 3 4\n";
        match EmbeddingTable::read_text(&mut Cursor::new(text)) {
            Err(EmbedError::DimensionMismatch { row, expected, found }) => {
                assert_eq!((row, expected, found), (1, 3, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_token_is_rejected() {
        let text = "2 1\ndog 1\ndog 2\n";
        assert!(matches!(
            EmbeddingTable::read_text(&mut Cursor::new(text)),
            Err(EmbedError::DuplicateToken { row: 1, .. })
        ));
    }

    #[test]
    fn malformed_headers() {
        for h in ["", "3\n", "a b\n", "2 0\n", "1 2 3\n"] {
            assert!(EmbeddingTable::read_text(&mut Cursor::new(h)).is_err(), "{h:?}");
        }
    }

    #[test]
    fn count_mismatch() {
        let text = "3 1\na 1\nb 2\n";
        assert!(matches!(
            EmbeddingTable::read_text(&mut Cursor::new(text)),
            Err(EmbedError::Count {
                expected: 3,
                found: 2
            })
        ));
        let mut short = Vec::new();
        small().write_binary(&mut short).unwrap();
        short.truncate(short.len() - 6);
        assert!(EmbeddingTable::read_binary(&mut Cursor::new(short)).is_err());
    }

    #[test]
    fn lookup_is_case_sensitive() {
        let t = small();
        assert!(t.lookup("dog").is_some());
        assert!(t.lookup("Dog").is_none());
        assert!(t.lookup("wolf").is_none());
    }

    #[test]
    fn cosine_basics() {
        let v = [0.3f64, -1.2, 2.0];
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        assert!((cosine(&v, &v).unwrap() - 1.0).abs() < 1e-15);
        assert!((cosine(&v, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[1.0f64, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(cosine(&[0.0f64, 0.0], &[0.0, 1.0]), Err(VectorError::ZeroNorm));
        assert_eq!(
            cosine(&[1.0f64], &[0.0, 1.0]),
            Err(VectorError::LengthMismatch(1, 2))
        );
    }

    fn gram_table() -> EmbeddingTable {
        let mut t = EmbeddingTable::new("grams", 2).unwrap();
        t.insert("abc", &[1.0, 2.0]).unwrap();
        t.insert("bcd", &[10.0, 20.0]).unwrap();
        t
    }

    #[test]
    fn compose_single_window() {
        assert_eq!(ngram_compose(&gram_table(), "abc", 3).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn compose_two_windows() {
        // hand sum of rows "abc" and "bcd"
        assert_eq!(ngram_compose(&gram_table(), "abcd", 3).unwrap(), vec![11.0, 22.0]);
    }

    #[test]
    fn compose_errors() {
        assert!(matches!(
            ngram_compose(&gram_table(), "ab", 3),
            Err(NgramError::TooShort { .. })
        ));
        assert!(matches!(
            ngram_compose(&gram_table(), "xyzw", 3),
            Err(NgramError::NoMatch { windows: 2, .. })
        ));
    }

    #[test]
    fn cheerlessness_has_eleven_windows() {
        let w = NgramComposer::default().windows("cheerlessness").unwrap();
        assert_eq!(w.len(), 11);
        assert_eq!(w.first().map(String::as_str), Some("che"));
        assert_eq!(w.get(1).map(String::as_str), Some("hee"));
        assert_eq!(w.last().map(String::as_str), Some("ess"));
    }

    #[test]
    fn markers_wrap_the_word() {
        let c = NgramComposer {
            n: 3,
            boundary_markers: true,
        };
        assert_eq!(c.windows("ab").unwrap(), vec!["<ab", "ab>"]);
    }
}
