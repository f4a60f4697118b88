mod common;

use std::cell::Cell;
use std::fs;
use std::path::{Path, PathBuf};

use amalgamkit::fields::Field;
use amalgamkit::linalg::DenseMatrix;
use amalgamkit::mtxio::{
    cached_files, fetch_generators, parse_meataxe, read_matrix, sha256_hex, write_meataxe, DataManifest, FetchError,
    FetchOptions, ManifestEntry, MeatAxeObject, MtxError, Transport,
};
use proptest::prelude::*;

fn shipped_data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn options(cache: &Path, data_root: Option<PathBuf>, offline: bool) -> FetchOptions {
    FetchOptions { cache_dir: cache.to_path_buf(), data_root, base_url: "http://mirror.invalid".into(), offline, retries: 2 }
}

/// Serves the vendored files and counts requests.
struct Mirror {
    calls: Cell<u32>,
    fail_first: Cell<u32>,
}

impl Mirror {
    fn new(fail_first: u32) -> Self {
        Mirror { calls: Cell::new(0), fail_first: Cell::new(fail_first) }
    }
}

impl Transport for Mirror {
    fn get(&self, url: &str) -> Result<Vec<u8>, String> {
        self.calls.set(self.calls.get() + 1);
        if self.fail_first.get() > 0 {
            self.fail_first.set(self.fail_first.get() - 1);
            return Err("connection reset".into());
        }
        let name = url.rsplit('/').next().unwrap();
        fs::read(shipped_data().join("co1").join(name)).map_err(|e| e.to_string())
    }
}

fn co1(manifest: &DataManifest) -> &ManifestEntry {
    manifest.entry("co1-f2r24").unwrap()
}

#[test]
fn header_examples() {
    let m = parse_meataxe("1 2 2 2\n10\n01\n").unwrap().into_matrix().unwrap();
    assert!(m.is_identity_matrix());
    let p = parse_meataxe("12 1 3 1\n2\n3\n1\n").unwrap().into_perm().unwrap();
    assert_eq!(p.images(), vec![1, 2, 0]);
    assert!(matches!(parse_meataxe("1 2 2 2\n12\n01\n"), Err(MtxError::EntryOutOfRange { .. })));
    assert!(matches!(parse_meataxe("7 2 2 2\n10\n01\n"), Err(MtxError::BadHeader(_))));
}

#[test]
fn shipped_co1_generators_are_24_dimensional() {
    let manifest = DataManifest::shipped();
    assert_eq!(co1(&manifest).files.len(), 2);
    for f in &co1(&manifest).files {
        let m = read_matrix(&shipped_data().join("co1").join(&f.name)).unwrap();
        assert_eq!((m.rows(), m.cols(), m.field()), (24, 24, Field::gf2()));
    }
}

#[test]
fn manifest_rejects_duplicate_labels() {
    let text = fs::read_to_string(shipped_data().join("manifest.toml")).unwrap();
    let first = text.split("[[group]]").nth(1).unwrap();
    let doubled = format!("{text}\n[[group]]{first}");
    assert!(matches!(DataManifest::parse(&doubled), Err(FetchError::Manifest(_))));
}

#[test]
fn second_fetch_is_a_pure_cache_hit() {
    let cache = tempfile::tempdir().unwrap();
    let manifest = DataManifest::shipped();
    let mirror = Mirror::new(0);
    let opts = options(cache.path(), None, false);
    let first = fetch_generators(co1(&manifest), &opts, Some(&mirror)).unwrap();
    assert_eq!(mirror.calls.get(), 2);
    let second = fetch_generators(co1(&manifest), &opts, Some(&mirror)).unwrap();
    assert_eq!(mirror.calls.get(), 2);
    assert_eq!(first, second);
    let offline = fetch_generators(co1(&manifest), &options(cache.path(), None, true), None).unwrap();
    assert_eq!(offline, first);
}

#[test]
fn transient_failures_are_retried() {
    let cache = tempfile::tempdir().unwrap();
    let manifest = DataManifest::shipped();
    let mirror = Mirror::new(1);
    fetch_generators(co1(&manifest), &options(cache.path(), None, false), Some(&mirror)).unwrap();
    assert_eq!(mirror.calls.get(), 3);

    let cache = tempfile::tempdir().unwrap();
    let mirror = Mirror::new(10);
    match fetch_generators(co1(&manifest), &options(cache.path(), None, false), Some(&mirror)) {
        Err(FetchError::TransportError { attempts, .. }) => assert_eq!(attempts, 2),
        other => panic!("expected a transport error, got {other:?}"),
    }
}

#[test]
fn corrupted_cache_file_is_quarantined() {
    let cache = tempfile::tempdir().unwrap();
    let manifest = DataManifest::shipped();
    let opts = options(cache.path(), Some(shipped_data()), true);
    let paths = fetch_generators(co1(&manifest), &opts, None).unwrap();
    let mut bytes = fs::read(&paths[0]).unwrap();
    let k = bytes.iter().position(|&b| b == b'0').unwrap();
    bytes[k] = b'1';
    fs::write(&paths[0], &bytes).unwrap();
    match fetch_generators(co1(&manifest), &opts, None) {
        Err(FetchError::DigestMismatch { quarantined, .. }) => {
            assert!(quarantined.exists());
            assert!(!paths[0].exists());
        }
        other => panic!("expected a digest mismatch, got {other:?}"),
    }
    assert!(cached_files(co1(&manifest), cache.path()).is_none());
    fetch_generators(co1(&manifest), &opts, None).unwrap();
    assert!(cached_files(co1(&manifest), cache.path()).is_some());
}

#[test]
fn offline_without_sources_misses() {
    let cache = tempfile::tempdir().unwrap();
    let manifest = DataManifest::shipped();
    let result = fetch_generators(co1(&manifest), &options(cache.path(), None, true), None);
    assert!(matches!(result, Err(FetchError::OfflineCacheMiss(_))));
}

#[test]
fn returned_paths_always_match_their_digests() {
    let cache = tempfile::tempdir().unwrap();
    let manifest = DataManifest::shipped();
    for entry in &manifest.entries {
        let paths = fetch_generators(entry, &options(cache.path(), Some(shipped_data()), true), None).unwrap();
        for (p, f) in paths.iter().zip(&entry.files) {
            assert_eq!(sha256_hex(&fs::read(p).unwrap()), f.sha256);
        }
    }
}

fn matrix_object() -> impl Strategy<Value = MeatAxeObject> {
    (proptest::sample::select(vec![2u32, 3, 4, 5, 7, 8]), 1usize..=24, 1usize..=24).prop_flat_map(|(q, r, c)| {
        proptest::collection::vec(0..q as u16, r * c).prop_map(move |e| {
            let rows: Vec<Vec<u16>> = e.chunks(c).map(<[u16]>::to_vec).collect();
            MeatAxeObject::Matrix(DenseMatrix::from_rows(Field::from_order(q).unwrap(), &rows).unwrap())
        })
    })
}

fn any_object() -> impl Strategy<Value = MeatAxeObject> {
    prop_oneof![matrix_object(), (1usize..200).prop_flat_map(common::perm).prop_map(MeatAxeObject::Permutation)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn write_then_parse_is_identity(obj in any_object()) {
        let text = write_meataxe(&obj).unwrap();
        prop_assert_eq!(parse_meataxe(&text).unwrap(), obj);
    }

    #[test]
    fn one_entry_more_or_less_is_rejected(obj in matrix_object()) {
        let text = write_meataxe(&obj).unwrap();
        let named = text.starts_with("matrix");
        let trimmed = text.trim_end();
        let cut = if named { trimmed.rfind(char::is_whitespace).unwrap() } else { trimmed.len() - 1 };
        let long = if named { format!("{trimmed} 0") } else { format!("{trimmed}0") };
        let truncated = matches!(parse_meataxe(&trimmed[..cut]), Err(MtxError::TruncatedPayload { .. }));
        let excess = matches!(parse_meataxe(&long), Err(MtxError::ExcessPayload { extra: 1 }));
        prop_assert!(truncated);
        prop_assert!(excess);
    }
}
