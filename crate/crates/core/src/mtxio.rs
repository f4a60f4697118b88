//! MeatAxe text format, the data manifest, and cache-first file retrieval.

use std::fmt::Write as _;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::actions::Perm;
use crate::fields::Field;
use crate::linalg::DenseMatrix;

#[derive(Debug, Error)]
pub enum MtxError {
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("entry {value} out of range at row {row}, column {col}")]
    EntryOutOfRange { row: usize, col: usize, value: u32 },
    #[error("payload truncated: expected {expected} entries, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("payload has {extra} entries beyond the header")]
    ExcessPayload { extra: usize },
    #[error("field GF({0}) cannot be written in mode 1")]
    UnsupportedField(u32),
    #[error("invalid permutation image list")]
    BadPermutation,
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("digest mismatch for {file}: expected {expected}, found {found}; moved to {quarantined}")]
    DigestMismatch { file: String, expected: String, found: String, quarantined: PathBuf },
    #[error("{0} is not cached and offline mode is on")]
    OfflineCacheMiss(String),
    #[error("download of {file} failed after {attempts} attempts: {message}")]
    TransportError { file: String, attempts: u32, message: String },
    #[error("group label {0} is not in the manifest")]
    UnknownLabel(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeatAxeObject {
    Matrix(DenseMatrix),
    Permutation(Perm),
}

impl MeatAxeObject {
    pub fn into_matrix(self) -> Option<DenseMatrix> {
        match self {
            MeatAxeObject::Matrix(m) => Some(m),
            MeatAxeObject::Permutation(_) => None,
        }
    }

    pub fn into_perm(self) -> Option<Perm> {
        match self {
            MeatAxeObject::Permutation(p) => Some(p),
            MeatAxeObject::Matrix(_) => None,
        }
    }
}

fn header_int(tok: Option<&str>, what: &str) -> Result<usize, MtxError> {
    tok.ok_or_else(|| MtxError::BadHeader(format!("missing {what}")))?
        .parse()
        .map_err(|_| MtxError::BadHeader(format!("{what} is not an integer")))
}

pub fn parse_meataxe(text: &str) -> Result<MeatAxeObject, MtxError> {
    let (header, body) = text.split_once('\n').unwrap_or((text, ""));
    let header = header.trim();
    if let Some(rest) = header.strip_prefix("matrix") {
        return parse_named(rest, body);
    }
    let toks: Vec<&str> = header.split_whitespace().collect();
    if !(3..=4).contains(&toks.len()) {
        return Err(MtxError::BadHeader(format!("expected 3 or 4 integers, got {:?}", header)));
    }
    let mode = header_int(toks.first().copied(), "mode")?;
    match mode {
        1 => {
            let q = header_int(toks.get(1).copied(), "field")?;
            let rows = header_int(toks.get(2).copied(), "rows")?;
            let cols = header_int(toks.get(3).copied(), "cols")?;
            if q > 9 {
                return Err(MtxError::UnsupportedField(q as u32));
            }
            let field = Field::from_order(q as u32).map_err(|e| MtxError::BadHeader(e.to_string()))?;
            let digits: Vec<u32> = body
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| c.to_digit(10).ok_or_else(|| MtxError::BadHeader(format!("non-digit {c:?} in payload"))))
                .collect::<Result<_, _>>()?;
            build_matrix(field, rows, cols, &digits)
        }
        12 => {
            let degree = header_int(toks.get(2).copied(), "degree")?;
            let count = toks.get(3).map_or(Ok(1), |t| header_int(Some(t), "count"))?;
            if count != 1 {
                return Err(MtxError::BadHeader("only single permutations are supported".into()));
            }
            let images: Vec<usize> = body
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| MtxError::BadHeader(format!("bad image {t:?}"))))
                .collect::<Result<_, _>>()?;
            check_count(degree, images.len())?;
            let zero_based = images
                .iter()
                .map(|&i| i.checked_sub(1).ok_or(MtxError::BadPermutation))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(MeatAxeObject::Permutation(Perm::from_images(zero_based).map_err(|_| MtxError::BadPermutation)?))
        }
        other => Err(MtxError::BadHeader(format!("unsupported mode {other}"))),
    }
}

fn parse_named(rest: &str, body: &str) -> Result<MeatAxeObject, MtxError> {
    let mut q = None;
    let mut rows = None;
    let mut cols = None;
    for kv in rest.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| MtxError::BadHeader(format!("expected key=value, got {kv:?}")))?;
        let v: usize = v.parse().map_err(|_| MtxError::BadHeader(format!("{k} is not an integer")))?;
        match k {
            "field" => q = Some(v),
            "rows" => rows = Some(v),
            "cols" => cols = Some(v),
            _ => return Err(MtxError::BadHeader(format!("unknown key {k:?}"))),
        }
    }
    let (q, rows, cols) = match (q, rows, cols) {
        (Some(q), Some(r), Some(c)) => (q, r, c),
        _ => return Err(MtxError::BadHeader("named header needs field, rows and cols".into())),
    };
    let field = Field::from_order(q as u32).map_err(|e| MtxError::BadHeader(e.to_string()))?;
    let entries: Vec<u32> = body
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| MtxError::BadHeader(format!("bad entry {t:?}"))))
        .collect::<Result<_, _>>()?;
    build_matrix(field, rows, cols, &entries)
}

fn check_count(expected: usize, found: usize) -> Result<(), MtxError> {
    if found < expected {
        return Err(MtxError::TruncatedPayload { expected, found });
    }
    if found > expected {
        return Err(MtxError::ExcessPayload { extra: found - expected });
    }
    Ok(())
}

fn build_matrix(field: Field, rows: usize, cols: usize, entries: &[u32]) -> Result<MeatAxeObject, MtxError> {
    check_count(rows * cols, entries.len())?;
    let q = field.order();
    let mut m = DenseMatrix::zero(field, rows, cols);
    for (k, &v) in entries.iter().enumerate() {
        let (row, col) = (k / cols.max(1), k % cols.max(1));
        if v >= q {
            return Err(MtxError::EntryOutOfRange { row, col, value: v });
        }
        m.set(row, col, v as u16);
    }
    Ok(MeatAxeObject::Matrix(m))
}

/// Mode 1 for fields of order at most 7, the named header otherwise; mode 12 for permutations.
pub fn write_meataxe(obj: &MeatAxeObject) -> Result<String, MtxError> {
    let mut out = String::new();
    match obj {
        MeatAxeObject::Matrix(m) => {
            let q = m.field().order();
            let mode1 = q <= 7;
            if mode1 {
                writeln!(out, "1 {} {} {}", q, m.rows(), m.cols()).expect("write to string");
                for row in m.to_rows() {
                    let line: String = row.iter().map(|&x| char::from_digit(x as u32, 10).expect("digit")).collect();
                    writeln!(out, "{line}").expect("write to string");
                }
            } else {
                writeln!(out, "matrix field={} rows={} cols={}", q, m.rows(), m.cols()).expect("write to string");
                for row in m.to_rows() {
                    let line: Vec<String> = row.iter().map(u16::to_string).collect();
                    writeln!(out, "{}", line.join(" ")).expect("write to string");
                }
            }
        }
        MeatAxeObject::Permutation(p) => {
            writeln!(out, "12 1 {} 1", p.degree()).expect("write to string");
            for i in p.images() {
                writeln!(out, "{}", i + 1).expect("write to string");
            }
        }
    }
    Ok(out)
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix, MtxError> {
    let text = fs::read_to_string(path).map_err(|e| MtxError::BadHeader(format!("{}: {e}", path.display())))?;
    parse_meataxe(&text)?
        .into_matrix()
        .ok_or_else(|| MtxError::BadHeader(format!("{} holds a permutation, not a matrix", path.display())))
}

#[derive(Clone, Debug, Deserialize)]
pub struct ManifestFile {
    pub name: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ManifestEntry {
    pub label: String,
    pub representation: String,
    #[serde(default)]
    pub url_template: Option<String>,
    #[serde(default)]
    pub vendored: Option<String>,
    pub files: Vec<ManifestFile>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct DataManifest {
    #[serde(rename = "group")]
    pub entries: Vec<ManifestEntry>,
}

impl DataManifest {
    pub fn parse(text: &str) -> Result<DataManifest, FetchError> {
        let m: DataManifest = toml::from_str(text).map_err(|e| FetchError::Manifest(e.to_string()))?;
        let mut labels = std::collections::BTreeSet::new();
        for e in &m.entries {
            if !labels.insert(e.label.as_str()) {
                return Err(FetchError::Manifest(format!("duplicate label {}", e.label)));
            }
            if e.files.is_empty() {
                return Err(FetchError::Manifest(format!("{} lists no files", e.label)));
            }
            for f in &e.files {
                if f.sha256.len() != 64 || !f.sha256.bytes().all(|b| b.is_ascii_hexdigit()) {
                    return Err(FetchError::Manifest(format!("{} has no valid digest", f.name)));
                }
            }
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<DataManifest, FetchError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// The manifest checked in next to the vendored generator files.
    pub fn shipped() -> DataManifest {
        Self::parse(include_str!("../../../data/manifest.toml")).expect("shipped manifest is valid")
    }

    pub fn entry(&self, label: &str) -> Result<&ManifestEntry, FetchError> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .ok_or_else(|| FetchError::UnknownLabel(label.to_string()))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Paths of an entry's files already in the cache, if all are present and verified.
pub fn cached_files(entry: &ManifestEntry, cache_dir: &Path) -> Option<Vec<PathBuf>> {
    entry
        .files
        .iter()
        .map(|f| {
            let path = cache_dir.join(&entry.label).join(&f.name);
            let bytes = fs::read(&path).ok()?;
            (sha256_hex(&bytes) == f.sha256).then_some(path)
        })
        .collect()
}

/// Network access used by [`fetch_generators`]; implemented outside the library.
pub trait Transport {
    fn get(&self, url: &str) -> Result<Vec<u8>, String>;
}

/// Where fetched files come from and go to.
#[derive(Clone, Debug)]
pub struct FetchOptions {
    pub cache_dir: PathBuf,
    pub data_root: Option<PathBuf>,
    pub base_url: String,
    pub offline: bool,
    pub retries: u32,
}

struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

fn acquire_lock(path: &Path) -> Result<LockGuard, FetchError> {
    let lock = path.with_extension("lock");
    for _ in 0..600 {
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(_) => return Ok(LockGuard(lock)),
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => std::thread::sleep(std::time::Duration::from_millis(50)),
            Err(e) => return Err(e.into()),
        }
    }
    Err(FetchError::Io(io::Error::new(io::ErrorKind::TimedOut, format!("lock {} held too long", lock.display()))))
}

fn quarantine(path: &Path, file: &str, expected: &str, found: String) -> FetchError {
    let target = path.with_extension(format!("quarantine-{}", &found[..12]));
    let quarantined = match fs::rename(path, &target) {
        Ok(()) => target,
        Err(_) => path.to_path_buf(),
    };
    FetchError::DigestMismatch { file: file.to_string(), expected: expected.to_string(), found, quarantined }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), FetchError> {
    let tmp = path.with_extension("partial");
    let mut f = File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Cache-first retrieval of every file in a manifest entry; returned paths are digest-verified.
pub fn fetch_generators(
    entry: &ManifestEntry,
    opts: &FetchOptions,
    transport: Option<&dyn Transport>,
) -> Result<Vec<PathBuf>, FetchError> {
    let dir = opts.cache_dir.join(&entry.label);
    fs::create_dir_all(&dir)?;
    entry.files.iter().map(|f| fetch_one(entry, f, &dir, opts, transport)).collect()
}

fn fetch_one(
    entry: &ManifestEntry,
    file: &ManifestFile,
    dir: &Path,
    opts: &FetchOptions,
    transport: Option<&dyn Transport>,
) -> Result<PathBuf, FetchError> {
    let target = dir.join(&file.name);
    let _lock = acquire_lock(&target)?;
    if target.exists() {
        let found = sha256_hex(&fs::read(&target)?);
        if found == file.sha256 {
            return Ok(target);
        }
        return Err(quarantine(&target, &file.name, &file.sha256, found));
    }
    if let (Some(root), Some(vendored)) = (&opts.data_root, &entry.vendored) {
        let source = root.join(vendored).join(&file.name);
        if let Ok(bytes) = fs::read(&source) {
            let found = sha256_hex(&bytes);
            if found != file.sha256 {
                return Err(FetchError::DigestMismatch {
                    file: file.name.clone(),
                    expected: file.sha256.clone(),
                    found,
                    quarantined: source,
                });
            }
            write_atomic(&target, &bytes)?;
            return Ok(target);
        }
    }
    if opts.offline {
        return Err(FetchError::OfflineCacheMiss(file.name.clone()));
    }
    let (Some(transport), Some(template)) = (transport, &entry.url_template) else {
        return Err(FetchError::TransportError {
            file: file.name.clone(),
            attempts: 0,
            message: "no download source configured".into(),
        });
    };
    let url = template.replace("{base}", opts.base_url.trim_end_matches('/')).replace("{file}", &file.name);
    let attempts = opts.retries.max(1);
    let mut last = String::new();
    for _ in 0..attempts {
        match transport.get(&url) {
            Ok(bytes) => {
                let found = sha256_hex(&bytes);
                if found != file.sha256 {
                    write_atomic(&target, &bytes)?;
                    return Err(quarantine(&target, &file.name, &file.sha256, found));
                }
                write_atomic(&target, &bytes)?;
                return Ok(target);
            }
            Err(e) => last = e,
        }
    }
    Err(FetchError::TransportError { file: file.name.clone(), attempts, message: last })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_cycle() {
        let id = parse_meataxe("1 2 2 2\n10\n01\n").unwrap().into_matrix().unwrap();
        assert!(id.is_identity_matrix());
        let p = parse_meataxe("12 1 3 1\n2\n3\n1\n").unwrap().into_perm().unwrap();
        assert_eq!(p, Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap());
    }

    #[test]
    fn wrapped_rows_and_errors() {
        let m = parse_meataxe("1 3 2 3\n012\n2\n10\n").unwrap().into_matrix().unwrap();
        assert_eq!(m.to_rows(), vec![vec![0, 1, 2], vec![2, 1, 0]]);
        assert!(matches!(parse_meataxe("1 2 2 2\n10\n0\n"), Err(MtxError::TruncatedPayload { .. })));
        assert!(matches!(parse_meataxe("1 2 2 2\n10\n011\n"), Err(MtxError::ExcessPayload { .. })));
        assert!(matches!(parse_meataxe("1 2 1 1\n2\n"), Err(MtxError::EntryOutOfRange { .. })));
        assert!(matches!(parse_meataxe("7 2 1\n"), Err(MtxError::BadHeader(_))));
    }

    #[test]
    fn gf8_uses_named_header() {
        let f = Field::from_order(8).unwrap();
        let m = DenseMatrix::from_rows(f, &[vec![7, 1], vec![0, 3]]).unwrap();
        let text = write_meataxe(&MeatAxeObject::Matrix(m.clone())).unwrap();
        assert!(text.starts_with("matrix field=8 rows=2 cols=2"));
        assert_eq!(parse_meataxe(&text).unwrap(), MeatAxeObject::Matrix(m));
    }
}
