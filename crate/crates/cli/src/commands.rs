use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use amalgamkit::actions::{action_on_points, projective_points, schreier_sims, Perm};
use amalgamkit::fields::{field_make, poly_factor_gf2, BinaryField, Field};
use amalgamkit::group::{GroupElement, DEFAULT_ORDER_BOUND};
use amalgamkit::linalg::{element_order, extend_field, min_poly, split_homogeneous, DenseMatrix};
use amalgamkit::mtxio::{fetch_generators, parse_meataxe, DataManifest, FetchOptions, MeatAxeObject, Transport};
use amalgamkit::scenarios::{verify_all, ScenarioConfig, ScenarioId};
use amalgamkit::words::{parse_word, run_script, ElementScript, Env, OrderReport, TagFilter};
use serde::Serialize;

use crate::config::Settings;
use crate::{Failure, Format};

const MATRIX_ORDER_BOUND: u64 = 1 << 48;

fn config_err(e: impl ToString) -> Failure {
    Failure::Config(e.to_string())
}

fn emit<T: Serialize>(format: Format, value: &T, table: impl FnOnce() -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("output serializes")),
        Format::Table => print!("{}", table()),
    }
}

struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    fn new() -> Self {
        UreqTransport { agent: ureq::AgentBuilder::new().timeout(Duration::from_secs(60)).build() }
    }
}

impl Transport for UreqTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>, String> {
        let resp = self.agent.get(url).call().map_err(|e| e.to_string())?;
        let mut bytes = Vec::new();
        resp.into_reader().read_to_end(&mut bytes).map_err(|e| e.to_string())?;
        Ok(bytes)
    }
}

fn fetch_options(s: &Settings) -> FetchOptions {
    FetchOptions {
        cache_dir: s.cache_dir.clone(),
        data_root: s.data_root.clone(),
        base_url: s.base_url.clone(),
        offline: s.offline,
        retries: s.retries,
    }
}

#[derive(Serialize)]
struct FetchRow {
    label: String,
    files: Vec<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn fetch_all(settings: &Settings, labels: &[String]) -> Result<Vec<FetchRow>, Failure> {
    let manifest = DataManifest::shipped();
    let opts = fetch_options(settings);
    let transport = (!settings.offline).then(UreqTransport::new);
    labels
        .iter()
        .map(|label| {
            let entry = manifest.entry(label).map_err(config_err)?;
            Ok(match fetch_generators(entry, &opts, transport.as_ref().map(|t| t as &dyn Transport)) {
                Ok(files) => FetchRow { label: label.clone(), files, error: None },
                Err(e) => FetchRow { label: label.clone(), files: Vec::new(), error: Some(e.to_string()) },
            })
        })
        .collect()
}

pub fn fetch(settings: &Settings, group: Option<&str>, all: bool, format: Format) -> Result<(), Failure> {
    let labels: Vec<String> = match (group, all) {
        (Some(g), _) => vec![g.to_string()],
        (None, true) => DataManifest::shipped().entries.iter().map(|e| e.label.clone()).collect(),
        (None, false) => return Err(config_err("fetch needs --group LABEL or --all")),
    };
    let rows = fetch_all(settings, &labels)?;
    emit(format, &rows, || {
        let mut out = String::new();
        for r in &rows {
            match &r.error {
                None => writeln!(out, "{}  {} file(s) verified in {}", r.label, r.files.len(), settings.cache_dir.join(&r.label).display()),
                Some(e) => writeln!(out, "{}  failed: {e}", r.label),
            }
            .expect("write to string");
        }
        out
    });
    match rows.iter().find_map(|r| r.error.clone()) {
        Some(e) => Err(config_err(e)),
        None => Ok(()),
    }
}

/// Generators read from MeatAxe files, all matrices or all permutations.
enum Generators {
    Matrices(Env<DenseMatrix>),
    Perms(Env<Perm>),
}

fn load_generators(specs: &[String]) -> Result<Generators, Failure> {
    let mut objects = Vec::new();
    for (k, spec) in specs.iter().enumerate() {
        let (name, path) = match spec.split_once('=') {
            Some((n, p)) => (n.trim().to_string(), p.trim().to_string()),
            None if k < 26 => (char::from(b'a' + k as u8).to_string(), spec.clone()),
            None => return Err(config_err("more than 26 unnamed generators; use NAME=PATH")),
        };
        let text = fs::read_to_string(&path).map_err(|e| config_err(format!("{path}: {e}")))?;
        let obj = parse_meataxe(&text).map_err(|e| config_err(format!("{path}: {e}")))?;
        objects.push((name, obj));
    }
    if objects.iter().all(|(_, o)| matches!(o, MeatAxeObject::Matrix(_))) {
        let pairs = objects.into_iter().filter_map(|(n, o)| o.into_matrix().map(|m| (n, m)));
        Ok(Generators::Matrices(Env::from_pairs(pairs)))
    } else if objects.iter().all(|(_, o)| matches!(o, MeatAxeObject::Permutation(_))) {
        let pairs = objects.into_iter().filter_map(|(n, o)| o.into_perm().map(|p| (n, p)));
        Ok(Generators::Perms(Env::from_pairs(pairs)))
    } else {
        Err(config_err("generators mix matrices and permutations"))
    }
}

enum Element {
    Matrix(DenseMatrix),
    Perm(Perm),
}

fn evaluate(specs: &[String], word: &str) -> Result<Element, Failure> {
    let w = parse_word(word).map_err(config_err)?;
    match load_generators(specs)? {
        Generators::Matrices(env) => env.eval(&w).map(Element::Matrix).map_err(config_err),
        Generators::Perms(env) => env.eval(&w).map(Element::Perm).map_err(config_err),
    }
}

fn perm_order(p: &Perm) -> u64 {
    p.cycle_type().into_iter().fold(1u64, |acc, c| {
        let (mut a, mut b) = (acc, c as u64);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        acc / a * c as u64
    })
}

fn matrix_order(m: &DenseMatrix) -> Result<u64, Failure> {
    let bound = if m.field().binary().is_some() { MATRIX_ORDER_BOUND } else { DEFAULT_ORDER_BOUND };
    element_order(m, bound).map_err(config_err)
}

#[derive(Serialize)]
struct Summary {
    word: String,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    size: usize,
    order: u64,
    digest: String,
}

fn summarize(word: &str, x: &Element) -> Result<Summary, Failure> {
    Ok(match x {
        Element::Matrix(m) => Summary {
            word: word.to_string(),
            kind: "matrix",
            field: Some(m.field().to_string()),
            size: m.rows(),
            order: matrix_order(m)?,
            digest: m.digest(),
        },
        Element::Perm(p) => Summary {
            word: word.to_string(),
            kind: "permutation",
            field: None,
            size: p.degree(),
            order: perm_order(p),
            digest: p.digest(),
        },
    })
}

pub fn eval(specs: &[String], word: Option<&str>, script: Option<&Path>, all_tags: bool, format: Format) -> Result<(), Failure> {
    if let Some(word) = word {
        let s = summarize(word, &evaluate(specs, word)?)?;
        emit(format, &s, || {
            let field = s.field.as_deref().map_or(String::new(), |f| format!(" over {f}"));
            format!("{}: {} of size {}{field}\norder {}\ndigest {}\n", s.word, s.kind, s.size, s.order, s.digest)
        });
        return Ok(());
    }
    let path = script.ok_or_else(|| config_err("eval needs --word or --script"))?;
    let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let script = ElementScript::parse(&text).map_err(config_err)?;
    let filter = if all_tags { TagFilter::All } else { TagFilter::Co1Exact };
    let reports: Vec<OrderReport> = match load_generators(specs)? {
        Generators::Matrices(env) => run_script(&script, &env, filter).map_err(config_err)?.1,
        Generators::Perms(env) => run_script(&script, &env, filter).map_err(config_err)?.1,
    };
    let show = |o: Option<u64>| o.map_or("-".to_string(), |n| n.to_string());
    emit(format, &reports, || {
        let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0);
        reports
            .iter()
            .map(|r| format!("{:width$}  expected {:>4}  computed {:>4}  {}\n", r.name, show(r.expected), show(r.computed), r.word))
            .collect()
    });
    Ok(())
}

pub fn order(specs: &[String], word: &str, format: Format) -> Result<(), Failure> {
    let s = summarize(word, &evaluate(specs, word)?)?;
    emit(format, &serde_json::json!({ "word": s.word, "order": s.order }), || format!("{}\n", s.order));
    Ok(())
}

fn matrix_of(specs: &[String], word: &str) -> Result<DenseMatrix, Failure> {
    match evaluate(specs, word)? {
        Element::Matrix(m) => Ok(m),
        Element::Perm(_) => Err(config_err("this command needs matrix generators")),
    }
}

pub fn minpoly(specs: &[String], word: &str, format: Format) -> Result<(), Failure> {
    let m = matrix_of(specs, word)?;
    let p = min_poly(&m).map_err(config_err)?;
    let factors = poly_factor_gf2(&p).map_err(config_err)?;
    let shown: Vec<String> =
        factors.iter().map(|(f, e)| if *e == 1 { format!("({f})") } else { format!("({f})^{e}") }).collect();
    emit(
        format,
        &serde_json::json!({
            "word": word,
            "minpoly": p.to_string(),
            "factors": factors.iter().map(|(f, e)| serde_json::json!({ "factor": f.to_string(), "multiplicity": e })).collect::<Vec<_>>(),
        }),
        || format!("{p}\n= {}\n", shown.join(" ")),
    );
    Ok(())
}

pub fn split(specs: &[String], word: &str, format: Format) -> Result<(), Failure> {
    let m = matrix_of(specs, word)?;
    let (u, v) = split_homogeneous(&m).map_err(config_err)?;
    let invariant = u.is_invariant(&m) && v.is_invariant(&m);
    emit(
        format,
        &serde_json::json!({ "word": word, "dims": [u.dim(), v.dim()], "invariant": invariant }),
        || format!("x^3+x^2+1 component: dim {}\nx^3+x+1 component: dim {}\ninvariant: {invariant}\n", u.dim(), v.dim()),
    );
    Ok(())
}

#[derive(Serialize)]
struct OrbitRow {
    size: usize,
    representative: Vec<u16>,
    stabiliser_order: u128,
}

#[derive(Serialize)]
struct OrbitsOutput {
    field: String,
    dimension: usize,
    points: usize,
    group_order: u128,
    orbits: Vec<OrbitRow>,
}

pub fn orbits(files: &[PathBuf], extend_to: Option<u32>, format: Format) -> Result<(), Failure> {
    let mut mats = Vec::new();
    for path in files {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let m = parse_meataxe(&text)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))?
            .into_matrix()
            .ok_or_else(|| config_err(format!("{} is not a matrix", path.display())))?;
        mats.push(m);
    }
    let first = &mats[0];
    let (n, source) = (first.rows(), first.field());
    if mats.iter().any(|m| !m.is_square() || m.rows() != n || m.field() != source) {
        return Err(config_err("generators must be square matrices of one size over one field"));
    }
    let field: BinaryField = match extend_to {
        Some(q) => {
            if !q.is_power_of_two() || q < 2 {
                return Err(config_err(format!("--extend-to {q} is not a power of two")));
            }
            if !source.is_gf2() {
                return Err(config_err(format!("--extend-to needs GF(2) matrices, found {source}")));
            }
            field_make(q.trailing_zeros(), None).map_err(config_err)?
        }
        None => match source {
            Field::Binary(f) => f,
            Field::Prime(_) => return Err(config_err(format!("orbits on one-spaces need a binary field, found {source}"))),
        },
    };
    let mats = if field.degree() > 1 && source.is_gf2() {
        mats.iter().map(|m| extend_field(m, field)).collect::<Result<Vec<_>, _>>().map_err(config_err)?
    } else {
        mats
    };
    let pts = projective_points(&field, n);
    let perms = action_on_points(&mats, &pts).map_err(config_err)?;
    let group = schreier_sims(&perms, pts.len()).map_err(config_err)?;
    let part = amalgamkit::actions::orbits(&perms, pts.len()).map_err(config_err)?;
    let mut rows: Vec<OrbitRow> = part
        .sizes
        .iter()
        .zip(&part.representatives)
        .map(|(&size, &rep)| OrbitRow {
            size,
            representative: pts.point(rep).clone(),
            stabiliser_order: group.order() / size as u128,
        })
        .collect();
    rows.sort_by(|a, b| a.size.cmp(&b.size).then_with(|| a.representative.cmp(&b.representative)));
    let out = OrbitsOutput {
        field: Field::Binary(field).to_string(),
        dimension: n,
        points: pts.len(),
        group_order: group.order(),
        orbits: rows,
    };
    emit(format, &out, || {
        let mut s = format!(
            "{} one-spaces of {}^{}; group image of order {}; {} orbit(s)\n",
            out.points,
            out.field,
            out.dimension,
            out.group_order,
            out.orbits.len()
        );
        for r in &out.orbits {
            writeln!(s, "size {:>5}  stabiliser {:>8}  rep {:?}", r.size, r.stabiliser_order, r.representative).expect("write to string");
        }
        s
    });
    Ok(())
}

pub fn scenario(settings: &Settings, ids: &[String], all: bool, timing: bool, format: Format) -> Result<(), Failure> {
    let scenarios: Vec<ScenarioId> = if all || ids.is_empty() {
        ScenarioId::ALL.to_vec()
    } else {
        ids.iter().map(|s| s.parse()).collect::<Result<_, _>>().map_err(config_err)?
    };
    let labels: Vec<String> = DataManifest::shipped().entries.iter().map(|e| e.label.clone()).collect();
    let needs_data = scenarios.iter().any(|&s| s != ScenarioId::S4);
    if needs_data {
        for row in fetch_all(settings, &labels)? {
            if let Some(e) = row.error {
                eprintln!("note: {}: {e}", row.label);
            }
        }
    }
    let cfg = ScenarioConfig {
        data_dir: needs_data.then(|| settings.cache_dir.clone()),
        offline: settings.offline,
        scenarios,
        threads: settings.threads,
        ..ScenarioConfig::default()
    };
    let report = verify_all(&cfg).map_err(config_err)?;
    match format {
        Format::Json => println!("{}", report.to_json(timing)),
        Format::Table => print!("{}", report.table()),
    }
    match report.failures() {
        0 => Ok(()),
        n => Err(Failure::Claims(n)),
    }
}
