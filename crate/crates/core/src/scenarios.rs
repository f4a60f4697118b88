//! Claim reproductions S0 to S4, judged against the checked-in claim table.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::actions::{
    action_on_points, conj_orbits, conjugacy_class_with_words, coxeter_word, fano_group,
    gl42_clique_action, gl42_cliques, involutions_of_type, is_perfect, letter_action, letters_from_transpositions,
    orbits, projective_points, seven_cycle, stabilizer, two_plane_stabilizer, Bsgs, Perm, PointSet,
};
use crate::fields::{poly_factor_gf2, BinaryField, Field, FieldElement, Poly2};
use crate::group::{GroupElement, DEFAULT_ORDER_BOUND};
use crate::linalg::{element_order, extend_field, min_poly, nullspace, rebase_as_gf8, split_homogeneous, DenseMatrix};
use crate::mtxio::{cached_files, read_matrix, DataManifest};
use crate::words::{parse_word, run_script, ElementScript, Env, TagFilter};

pub const CO1_LABEL: &str = "co1-f2r24";
pub const A7_LABEL: &str = "a7-f2r4";
pub const COVER_LABELS: [&str; 2] = ["2s7-f7r8", "2s7-f3r8"];

const PREAMBLE: &str = "Desk-scale reproduction. The exhaustive test of the inverting involutions \
inside the Monster needs its 196882-dimensional representation and is not attempted; these claims \
cover the structural inputs to that test and the validity of its order-3 criterion.";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario {0:?}; expected one of S0..S4")]
    UnknownScenario(String),
    #[error("no scenarios selected")]
    NothingSelected,
    #[error("claim table: {0}")]
    ClaimTable(String),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// A typed expected or computed value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Ints(Vec<i64>),
    Text(String),
    Texts(Vec<String>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Ints(v) => write!(f, "{v:?}"),
            Value::Text(s) => write!(f, "{s}"),
            Value::Texts(v) => write!(f, "{}", v.join(", ")),
        }
    }
}

fn ints<T: Copy + TryInto<i64>>(v: &[T]) -> Value {
    Value::Ints(v.iter().map(|&x| x.try_into().unwrap_or(i64::MAX)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    SkippedNoData,
    DivisorAmbiguous,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::SkippedNoData => "skipped-no-data",
            Status::DivisorAmbiguous => "divisor-ambiguous",
        })
    }
}

/// One row of the claim table.
#[derive(Clone, Debug, Deserialize)]
pub struct Claim {
    pub id: String,
    pub topic: String,
    pub statement: String,
    pub expected: Value,
    pub origin: String,
}

#[derive(Deserialize)]
struct ClaimFile {
    claim: Vec<Claim>,
}

#[derive(Clone, Debug)]
pub struct ClaimTable {
    claims: Vec<Claim>,
}

impl ClaimTable {
    pub fn parse(text: &str) -> Result<ClaimTable, ScenarioError> {
        let file: ClaimFile = toml::from_str(text).map_err(|e| ScenarioError::ClaimTable(e.to_string()))?;
        Ok(ClaimTable { claims: file.claim })
    }

    pub fn shipped() -> ClaimTable {
        Self::parse(include_str!("../claims.toml")).expect("claim table is validated at build time")
    }

    pub fn get(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn claims(&self) -> &[Claim] {
        &self.claims
    }

    fn position(&self, id: &str) -> usize {
        self.claims.iter().position(|c| c.id == id).unwrap_or(usize::MAX)
    }

    fn ids_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.claims.iter().map(|c| c.id.as_str()).filter(move |id| id.starts_with(prefix))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Anchor {
    pub topic: String,
    pub statement: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimReport {
    pub id: String,
    pub anchor: Anchor,
    pub expected: Value,
    pub computed: Option<Value>,
    pub status: Status,
    pub ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ScenarioId {
    S0,
    S1,
    S2,
    S3,
    S4,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 5] = [ScenarioId::S0, ScenarioId::S1, ScenarioId::S2, ScenarioId::S3, ScenarioId::S4];

    fn prefix(self) -> &'static str {
        match self {
            ScenarioId::S0 => "S0.",
            ScenarioId::S1 => "S1.",
            ScenarioId::S2 => "S2.",
            ScenarioId::S3 => "S3.",
            ScenarioId::S4 => "S4.",
        }
    }
}

impl FromStr for ScenarioId {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| format!("{id:?}").eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ScenarioError::UnknownScenario(s.to_string()))
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioConfig {
    /// Cache directory holding one subdirectory per manifest label.
    pub data_dir: Option<PathBuf>,
    pub offline: bool,
    pub scenarios: Vec<ScenarioId>,
    pub threads: usize,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig { data_dir: None, offline: false, scenarios: ScenarioId::ALL.to_vec(), threads: 0, seed: 7 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub run_id: String,
    pub preamble: String,
    pub config: ScenarioConfig,
    pub claims: Vec<ClaimReport>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.claims.iter().filter(|c| c.status == Status::Fail).count()
    }

    pub fn count(&self, status: Status) -> usize {
        self.claims.iter().filter(|c| c.status == status).count()
    }

    pub fn claim(&self, id: &str) -> Option<&ClaimReport> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self, timing: bool) -> String {
        let mut r = self.clone();
        if !timing {
            r.claims.iter_mut().for_each(|c| c.ms = 0);
        }
        serde_json::to_string_pretty(&r).expect("report serializes")
    }

    pub fn table(&self) -> String {
        let mut out = format!("{PREAMBLE}\nrun {}\n", self.run_id);
        let width = self.claims.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.claims {
            let computed = c.computed.as_ref().map_or("-".to_string(), Value::to_string);
            out.push_str(&format!("{:width$}  {:17}  expected {}  computed {}", c.id, c.status.to_string(), c.expected, computed));
            if let Some(n) = &c.note {
                out.push_str(&format!("  ({n})"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{} pass, {} fail, {} skipped, {} divisor-ambiguous\n",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::SkippedNoData),
            self.count(Status::DivisorAmbiguous)
        ));
        out
    }
}

struct Recorder<'a> {
    table: &'a ClaimTable,
    out: Vec<ClaimReport>,
    clock: Instant,
}

impl<'a> Recorder<'a> {
    fn new(table: &'a ClaimTable) -> Self {
        Recorder { table, out: Vec::new(), clock: Instant::now() }
    }

    fn push(&mut self, id: &str, computed: Option<Value>, status: impl FnOnce(&Value, Option<&Value>) -> Status, note: Option<String>) {
        let claim = self.table.get(id).unwrap_or_else(|| panic!("claim {id} missing from the claim table"));
        let ms = self.clock.elapsed().as_millis() as u64;
        self.clock = Instant::now();
        let status = status(&claim.expected, computed.as_ref());
        self.out.push(ClaimReport {
            id: id.to_string(),
            anchor: Anchor { topic: claim.topic.clone(), statement: claim.statement.clone() },
            expected: claim.expected.clone(),
            computed,
            status,
            ms,
            note,
        });
    }

    fn check(&mut self, id: &str, computed: Result<Value, String>) {
        match computed {
            Ok(v) => self.push(id, Some(v), |e, c| if Some(e) == c { Status::Pass } else { Status::Fail }, None),
            Err(msg) => self.push(id, None, |_, _| Status::Fail, Some(msg)),
        }
    }

    fn check_order(&mut self, id: &str, computed: Option<u64>) {
        let Some(n) = computed else {
            return self.push(id, None, |_, _| Status::Fail, Some("order above bound".into()));
        };
        self.push(
            id,
            Some(Value::Int(n as i64)),
            |e, c| match (e, c) {
                (Value::Int(e), Some(Value::Int(c))) if e == c => Status::Pass,
                (Value::Int(e), Some(Value::Int(c))) if *c > 0 && e % c == 0 => Status::DivisorAmbiguous,
                _ => Status::Fail,
            },
            None,
        );
    }

    fn skip_prefix(&mut self, prefix: &str, why: &str) {
        let ids: Vec<String> = self.table.ids_with_prefix(prefix).map(str::to_string).collect();
        for id in ids {
            if !self.out.iter().any(|r| r.id == id) {
                self.push(&id, None, |_, _| Status::SkippedNoData, Some(why.to_string()));
            }
        }
    }

    fn fail_prefix(&mut self, prefix: &str, why: &str) {
        let ids: Vec<String> = self.table.ids_with_prefix(prefix).map(str::to_string).collect();
        for id in ids {
            if !self.out.iter().any(|r| r.id == id) {
                self.push(&id, None, |_, _| Status::Fail, Some(why.to_string()));
            }
        }
    }
}

struct Data {
    dir: Option<PathBuf>,
    manifest: DataManifest,
}

impl Data {
    fn matrices(&self, label: &str) -> Option<Result<Vec<DenseMatrix>, String>> {
        let dir = self.dir.as_ref()?;
        let entry = self.manifest.entry(label).ok()?;
        let paths = cached_files(entry, dir)?;
        Some(paths.iter().map(|p| read_matrix(p).map_err(|e| e.to_string())).collect())
    }
}

pub fn shipped_script() -> ElementScript {
    ElementScript::parse(include_str!("../../../data/elements.script")).expect("shipped script is valid")
}

fn co1_env(mats: &[DenseMatrix]) -> Result<Env<DenseMatrix>, String> {
    let [a, b] = mats else { return Err(format!("expected 2 generators, found {}", mats.len())) };
    let env = Env::from_pairs([("a", a.clone()), ("b", b.clone())]);
    let (env, _) = run_script(&shipped_script(), &env, TagFilter::Co1Exact).map_err(|e| e.to_string())?;
    Ok(env)
}

fn get(env: &Env<DenseMatrix>, name: &str) -> Result<DenseMatrix, String> {
    env.get(name).cloned().ok_or_else(|| format!("{name} is not defined"))
}

fn phi7() -> Poly2 {
    "x^6+x^5+x^4+x^3+x^2+x+1".parse().expect("valid polynomial")
}

pub fn s0_word_orders(cfg: &ScenarioConfig, table: &ClaimTable) -> Vec<ClaimReport> {
    let data = Data { dir: cfg.data_dir.clone(), manifest: DataManifest::shipped() };
    let mut rec = Recorder::new(table);
    let g = Perm::from_cycles(3, &[&[0, 1, 2]]).expect("3-cycle");
    let sanity = parse_word("aa^-1")
        .map_err(|e| e.to_string())
        .and_then(|w| Env::from_pairs([("a", g)]).eval(&w).map_err(|e| e.to_string()));
    match sanity {
        Ok(x) => rec.check_order("S0.sanity", x.order(DEFAULT_ORDER_BOUND)),
        Err(e) => rec.check("S0.sanity", Err(e)),
    }
    match data.matrices(CO1_LABEL) {
        None => rec.skip_prefix("S0.", "Co1 generators not available"),
        Some(Err(e)) => rec.fail_prefix("S0.", &e),
        Some(Ok(mats)) => {
            let [a, b] = &mats[..] else { return fail_all(rec, "S0.", "expected 2 generators") };
            let env = Env::from_pairs([("a", a.clone()), ("b", b.clone())]);
            match run_script(&shipped_script(), &env, TagFilter::Co1Exact) {
                Err(e) => rec.fail_prefix("S0.", &e.to_string()),
                Ok((_, reports)) => {
                    for r in reports {
                        rec.check_order(&format!("S0.order.{}", r.name), r.computed);
                    }
                }
            }
        }
    }
    rec.fail_prefix("S0.", "not evaluated");
    rec.out
}

fn fail_all(mut rec: Recorder<'_>, prefix: &str, why: &str) -> Vec<ClaimReport> {
    rec.fail_prefix(prefix, why);
    rec.out
}

pub fn s1_split(cfg: &ScenarioConfig, table: &ClaimTable) -> Vec<ClaimReport> {
    let data = Data { dir: cfg.data_dir.clone(), manifest: DataManifest::shipped() };
    let mut rec = Recorder::new(table);
    let factors = poly_factor_gf2(&phi7())
        .map(|fs| Value::Texts(fs.iter().flat_map(|(p, m)| std::iter::repeat(p.to_string()).take(*m as usize)).collect()))
        .map_err(|e| e.to_string());
    rec.check("S1.phi7.factors", factors);
    let control = DenseMatrix::companion(&phi7());
    rec.check("S1.control.minpoly", min_poly(&control).map(|p| Value::Text(p.to_string())).map_err(|e| e.to_string()));
    rec.check(
        "S1.control.dims",
        split_homogeneous(&control).map(|(u, v)| ints(&[u.dim(), v.dim()])).map_err(|e| e.to_string()),
    );
    match data.matrices(CO1_LABEL) {
        None => rec.skip_prefix("S1.co1.", "Co1 generators not available"),
        Some(Err(e)) => rec.fail_prefix("S1.co1.", &e),
        Some(Ok(mats)) => match co1_env(&mats).and_then(|env| get(&env, "i7")) {
            Err(e) => rec.fail_prefix("S1.co1.", &e),
            Ok(i7) => {
                let m = i7.pow(2);
                let err = |e: crate::linalg::LinalgError| e.to_string();
                rec.check("S1.co1.order", element_order(&m, DEFAULT_ORDER_BOUND).map(|n| Value::Int(n as i64)).map_err(err));
                rec.check("S1.co1.minpoly", min_poly(&m).map(|p| Value::Text(p.to_string())).map_err(err));
                let fixed = m.add(&DenseMatrix::identity(m.field(), m.rows())).map(|d| nullspace(&d).dim());
                rec.check("S1.co1.fixed", fixed.map(|d| Value::Int(d as i64)).map_err(err));
                let split = split_homogeneous(&m);
                rec.check("S1.co1.dims", split.as_ref().map(|(u, v)| ints(&[u.dim(), v.dim()])).map_err(|e| e.to_string()));
                rec.check(
                    "S1.co1.invariant",
                    split.map(|(u, v)| Value::Bool(u.is_invariant(&m) && v.is_invariant(&m))).map_err(err),
                );
            }
        },
    }
    rec.fail_prefix("S1.", "not evaluated");
    rec.out
}

/// Orbit census of an A7 acting on the 585 points, with a compatible action on 7 letters.
pub struct Census {
    pub image_order: u128,
    pub sizes: Vec<usize>,
    pub stabiliser_orders: Vec<u128>,
    pub smallest_perfect: bool,
    pub letter_stabilisers: Vec<Vec<Perm>>,
}

pub fn census(points: &[Perm], letters: &[Perm]) -> Result<Census, String> {
    let n = points.first().ok_or("no generators")?.degree();
    let image = Bsgs::new(n, points).map_err(|e| e.to_string())?;
    let union: Vec<Perm> = points.iter().zip(letters).map(|(p, l)| p.direct_sum(l)).collect();
    let degree = n + letters.first().ok_or("no letter action")?.degree();
    let joint = Bsgs::new(degree, &union).map_err(|e| e.to_string())?;
    if joint.order() != image.order() {
        return Err(format!("letter action is not compatible: {} vs {}", joint.order(), image.order()));
    }
    let part = orbits(points, n).map_err(|e| e.to_string())?;
    let mut by_size: Vec<(usize, usize)> = part.sizes.iter().copied().zip(part.representatives.iter().copied()).collect();
    by_size.sort_unstable();
    let mut stabiliser_orders = Vec::new();
    let mut letter_stabilisers = Vec::new();
    let mut smallest_perfect = false;
    for (k, &(_, rep)) in by_size.iter().enumerate() {
        let (gens, order) = stabilizer(&joint, rep).map_err(|e| e.to_string())?;
        if k == 0 {
            smallest_perfect = is_perfect(&gens, degree).map_err(|e| e.to_string())?;
        }
        stabiliser_orders.push(order);
        letter_stabilisers.push(gens.iter().map(|g| g.restrict(n..degree)).collect::<Result<_, _>>().map_err(|e| e.to_string())?);
    }
    Ok(Census {
        image_order: image.order(),
        sizes: by_size.iter().map(|p| p.0).collect(),
        stabiliser_orders,
        smallest_perfect,
        letter_stabilisers,
    })
}

fn record_census(rec: &mut Recorder<'_>, prefix: &str, c: &Result<Census, String>) {
    let field = |f: fn(&Census) -> Value| c.as_ref().map(f).map_err(Clone::clone);
    rec.check(&format!("{prefix}.order"), field(|c| Value::Int(c.image_order as i64)));
    rec.check(&format!("{prefix}.orbits"), field(|c| ints(&c.sizes)));
    rec.check(&format!("{prefix}.stabilisers"), field(|c| ints(&c.stabiliser_orders)));
    rec.check(&format!("{prefix}.perfect"), field(|c| Value::Bool(c.smallest_perfect)));
}

/// The symmetric group on 7 letters inside Co1, with its class of transpositions and letters.
struct Sym7 {
    transpositions: PointSet<DenseMatrix>,
    letters: Vec<Vec<usize>>,
}

impl Sym7 {
    fn new(gens: &[DenseMatrix]) -> Result<Sym7, String> {
        let mut elements = vec![gens[0].identity_like()];
        let mut seen: HashSet<DenseMatrix> = elements.iter().cloned().collect();
        let mut k = 0;
        while k < elements.len() {
            for g in gens {
                let y = elements[k].op(g);
                if seen.insert(y.clone()) {
                    elements.push(y);
                    if elements.len() > 5040 {
                        return Err("generated group is larger than Sym(7)".into());
                    }
                }
            }
            k += 1;
        }
        let mut covered: HashSet<DenseMatrix> = HashSet::new();
        for x in &elements {
            if x.is_identity() || !x.op(x).is_identity() || covered.contains(x) {
                continue;
            }
            let (class, _) = conjugacy_class_with_words(x, gens, &["g"; 4]);
            if class.len() == 21 {
                let letters = letters_from_transpositions(class.points()).map_err(|e| e.to_string())?;
                return Ok(Sym7 { transpositions: class, letters });
            }
            covered.extend(class.points().iter().cloned());
        }
        Err("no class of 21 involutions".into())
    }

    fn letters_of(&self, g: &DenseMatrix) -> Result<Perm, String> {
        letter_action(g, &self.transpositions, &self.letters).map_err(|e| e.to_string())
    }
}

fn co1_s7(env: &Env<DenseMatrix>) -> Result<Sym7, String> {
    let gens = ["t3", "t5", "i5", "i0"].iter().map(|n| get(env, n)).collect::<Result<Vec<_>, _>>()?;
    Sym7::new(&gens)
}

fn co1_census(env: &Env<DenseMatrix>, s7: &Sym7, component: usize) -> Result<Census, String> {
    let i7 = get(env, "i7")?;
    let m = i7.pow(2);
    let (c1, c2) = split_homogeneous(&m).map_err(|e| e.to_string())?;
    let comp = if component == 0 { c1 } else { c2 };
    let st = rebase_as_gf8(&m, &comp).map_err(|e| e.to_string())?;
    let gens = ["t3", "t5", "i5"].iter().map(|n| get(env, n)).collect::<Result<Vec<_>, _>>()?;
    let small = gens.iter().map(|g| st.restrict(g)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let pts = projective_points(&BinaryField::gf8(), 4);
    let perms = action_on_points(&small, &pts).map_err(|e| e.to_string())?;
    let letters = gens.iter().map(|g| s7.letters_of(g)).collect::<Result<Vec<_>, _>>()?;
    census(&perms, &letters)
}

/// Drop the common fixed point of an action on 8 points.
fn drop_fixed_point(perms: &[Perm]) -> Result<Vec<Perm>, String> {
    let n = perms[0].degree();
    let fixed = (0..n).find(|&p| perms.iter().all(|g| g.image(p) == p)).ok_or("no common fixed clique")?;
    let relabel = |p: usize| if p > fixed { p - 1 } else { p };
    perms
        .iter()
        .map(|g| Perm::from_images((0..n).filter(|&p| p != fixed).map(|p| relabel(g.image(p))).collect()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())
}

fn a7_census(mats: &[DenseMatrix]) -> Result<Census, String> {
    let big = mats.iter().map(|m| extend_field(m, BinaryField::gf8())).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let pts = projective_points(&BinaryField::gf8(), 4);
    let perms = action_on_points(&big, &pts).map_err(|e| e.to_string())?;
    let (nonsing, cliques) = gl42_cliques();
    let on8 = mats.iter().map(|m| gl42_clique_action(m, &nonsing, &cliques)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    census(&perms, &drop_fixed_point(&on8)?)
}

pub fn s2_orbit_census(cfg: &ScenarioConfig, table: &ClaimTable) -> Vec<ClaimReport> {
    let data = Data { dir: cfg.data_dir.clone(), manifest: DataManifest::shipped() };
    let mut rec = Recorder::new(table);
    rec.check("S2.points", Ok(Value::Int(projective_points(&BinaryField::gf8(), 4).len() as i64)));
    let mut multisets: Vec<Vec<usize>> = Vec::new();
    match data.matrices(CO1_LABEL) {
        None => rec.skip_prefix("S2.co1.", "Co1 generators not available"),
        Some(Err(e)) => rec.fail_prefix("S2.co1.", &e),
        Some(Ok(mats)) => match co1_env(&mats).and_then(|env| co1_s7(&env).map(|s7| (env, s7))) {
            Err(e) => rec.fail_prefix("S2.co1.", &e),
            Ok((env, s7)) => {
                for (k, prefix) in ["S2.co1.c1", "S2.co1.c2"].iter().enumerate() {
                    let c = co1_census(&env, &s7, k);
                    if let Ok(c) = &c {
                        multisets.push(c.sizes.clone());
                    }
                    record_census(&mut rec, prefix, &c);
                }
            }
        },
    }
    match data.matrices(A7_LABEL) {
        None => rec.skip_prefix("S2.a7.", "A7 generators not available"),
        Some(Err(e)) => rec.fail_prefix("S2.a7.", &e),
        Some(Ok(mats)) => {
            let c = a7_census(&mats);
            if let Ok(c) = &c {
                multisets.push(c.sizes.clone());
            }
            record_census(&mut rec, "S2.a7", &c);
        }
    }
    if multisets.len() >= 2 {
        rec.check("S2.agree", Ok(Value::Bool(multisets.windows(2).all(|w| w[0] == w[1]))));
    } else {
        rec.skip_prefix("S2.agree", "fewer than two censuses available");
    }
    rec.fail_prefix("S2.", "not evaluated");
    rec.out
}

fn involution_orbits(invols: &PointSet<Perm>, actors: &[Perm]) -> Result<Vec<usize>, String> {
    let actors: Vec<Perm> = if actors.is_empty() { vec![Perm::identity(7)] } else { actors.to_vec() };
    conj_orbits(invols, &actors).map(|p| p.sorted_sizes()).map_err(|e| e.to_string())
}

fn group_order(gens: &[Perm], degree: usize) -> u128 {
    Bsgs::new(degree, gens).map(|b| b.order()).unwrap_or(0)
}

fn record_stabilisers(rec: &mut Recorder<'_>, prefix: &str, invols: &PointSet<Perm>, l32: &[Perm], a4: &[Perm], c7: &[Perm]) {
    rec.check(&format!("{prefix}.l32"), involution_orbits(invols, l32).map(|s| ints(&s)));
    rec.check(&format!("{prefix}.a4"), involution_orbits(invols, a4).map(|s| ints(&s)));
    rec.check(&format!("{prefix}.c7"), involution_orbits(invols, c7).map(|s| ints(&s)));
    rec.check(&format!("{prefix}.orders"), Ok(ints(&[group_order(l32, 7), group_order(a4, 7), group_order(c7, 7)])));
}

/// Lift of a permutation of 7 letters to the double cover, up to sign.
fn lift(p: &Perm, ts: &[DenseMatrix]) -> DenseMatrix {
    coxeter_word(p).iter().fold(ts[0].identity_like(), |acc, &j| acc.op(&ts[j]))
}

struct Cover {
    field: Field,
    class: PointSet<DenseMatrix>,
    ts: Vec<DenseMatrix>,
}

fn select_cover(data: &Data, base: &Perm) -> Option<Result<Cover, String>> {
    let mut any = false;
    for label in COVER_LABELS {
        let Some(mats) = data.matrices(label) else { continue };
        any = true;
        let ts = match mats {
            Ok(ts) if ts.len() == 6 => ts,
            Ok(ts) => return Some(Err(format!("{label}: expected 6 generators, found {}", ts.len()))),
            Err(e) => return Some(Err(e)),
        };
        let x = lift(base, &ts);
        let (class, _) = conjugacy_class_with_words(&x, &ts, &["t"; 6]);
        if class.len() == 210 && class.points().iter().all(|y| y.op(y).is_identity()) {
            return Some(Ok(Cover { field: ts[0].field(), class, ts }));
        }
    }
    any.then(|| Err("no double cover with 210 involutions over the base class".to_string()))
}

fn cover_orbits(cover: &Cover, actors: &[Perm]) -> Result<(Vec<usize>, crate::actions::OrbitPartition), String> {
    let lifted: Vec<DenseMatrix> = actors.iter().map(|p| lift(p, &cover.ts)).collect();
    let part = conj_orbits(&cover.class, &lifted).map_err(|e| e.to_string())?;
    Ok((part.sorted_sizes(), part))
}

struct Co1Stabilisers {
    base: Perm,
    l32: Vec<Perm>,
    a4: Vec<Perm>,
    c7: Vec<Perm>,
    conjugators: Vec<(String, Perm)>,
}

fn co1_stabilisers(mats: &[DenseMatrix]) -> Result<Co1Stabilisers, String> {
    let env = co1_env(mats)?;
    let s7 = co1_s7(&env)?;
    let p = |n: &str| get(&env, n).and_then(|g| s7.letters_of(&g));
    let conjugators = (0..63)
        .filter(|k| !(4..10).contains(k))
        .map(|k| {
            let name = format!("o{k}");
            p(&name).map(|g| (name, g))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Co1Stabilisers {
        base: p("i0p")?,
        l32: vec![p("t9")?, p("t10")?],
        a4: vec![p("t9")?, p("t11")?],
        c7: vec![p("t10")?],
        conjugators,
    })
}

pub fn s3_involution_census(cfg: &ScenarioConfig, table: &ClaimTable) -> Vec<ClaimReport> {
    let data = Data { dir: cfg.data_dir.clone(), manifest: DataManifest::shipped() };
    let mut rec = Recorder::new(table);
    let invols = involutions_of_type(7, &[2, 2, 2, 1]).expect("valid cycle type");
    rec.check("S3.base.count", Ok(Value::Int(invols.len() as i64)));
    let (l32, a4, c7) = (fano_group(), two_plane_stabilizer(), seven_cycle());
    record_stabilisers(&mut rec, "S3.base", &invols, &l32, &a4, &c7);

    let co1 = match data.matrices(CO1_LABEL) {
        None => {
            rec.skip_prefix("S3.co1.", "Co1 generators not available");
            None
        }
        Some(Err(e)) => {
            rec.fail_prefix("S3.co1.", &e);
            None
        }
        Some(Ok(mats)) => match co1_stabilisers(&mats) {
            Err(e) => {
                rec.fail_prefix("S3.co1.", &e);
                None
            }
            Ok(st) => {
                record_stabilisers(&mut rec, "S3.co1", &invols, &st.l32, &st.a4, &st.c7);
                rec.check("S3.co1.base_type", Ok(ints(&st.base.cycle_type())));
                Some(st)
            }
        },
    };

    match data.matrices(A7_LABEL) {
        None => rec.skip_prefix("S3.a7.", "A7 generators not available"),
        Some(Err(e)) => rec.fail_prefix("S3.a7.", &e),
        Some(Ok(mats)) => match a7_census(&mats) {
            Err(e) => rec.fail_prefix("S3.a7.", &e),
            Ok(c) => {
                let s = &c.letter_stabilisers;
                record_stabilisers(&mut rec, "S3.a7", &invols, &s[0], &s[1], &s[2]);
            }
        },
    }

    let base = co1.as_ref().map_or_else(
        || Perm::from_cycles(7, &[&[0, 1], &[2, 3], &[4, 5]]).expect("involution"),
        |st| st.base.clone(),
    );
    match select_cover(&data, &base) {
        None => rec.skip_prefix("S3.cover.", "double cover generators not available"),
        Some(Err(e)) => rec.fail_prefix("S3.cover.", &e),
        Some(Ok(cover)) => {
            rec.check("S3.cover.field", Ok(Value::Text(cover.field.to_string())));
            rec.check("S3.cover.class", Ok(Value::Int(cover.class.len() as i64)));
            let orders: BTreeSet<u64> = cover.class.points().iter().filter_map(|y| y.order(DEFAULT_ORDER_BOUND)).collect();
            rec.check("S3.cover.orders", Ok(ints(&orders.into_iter().collect::<Vec<_>>())));
            let l = cover_orbits(&cover, &l32);
            let c = cover_orbits(&cover, &c7);
            let a = cover_orbits(&cover, &a4);
            rec.check("S3.cover.l32", l.as_ref().map(|x| ints(&x.0)).map_err(Clone::clone));
            rec.check("S3.cover.c7", c.as_ref().map(|x| ints(&x.0)).map_err(Clone::clone));
            rec.check("S3.cover.a4_count", a.as_ref().map(|x| Value::Int(x.0.len() as i64)).map_err(Clone::clone));
            let total = match (&l, &c, &a) {
                (Ok(l), Ok(c), Ok(a)) => Ok(Value::Int((l.0.len() + c.0.len() + a.0.len()) as i64)),
                _ => Err("an orbit count failed".to_string()),
            };
            rec.check("S3.cover.representatives", total);
            match &co1 {
                None => rec.skip_prefix("S3.cover.conjugators.", "Co1 generators not available"),
                Some(st) => {
                    for (key, actors, range) in [("l32", &st.l32, 0..4), ("c7", &st.c7, 10..40), ("a4", &st.a4, 40..63)] {
                        let hits = conjugators_hit_all_orbits(&cover, st, actors, range);
                        rec.check(&format!("S3.cover.conjugators.{key}"), hits.map(Value::Bool));
                    }
                }
            }
        }
    }
    rec.fail_prefix("S3.", "not evaluated");
    rec.out
}

/// Whether the conjugating elements numbered in `range` send the base
/// involution to one representative of every orbit of `actors` on the lifts.
fn conjugators_hit_all_orbits(
    cover: &Cover,
    st: &Co1Stabilisers,
    actors: &[Perm],
    range: std::ops::Range<usize>,
) -> Result<bool, String> {
    let x = lift(&st.base, &cover.ts);
    let (_, part) = cover_orbits(cover, actors)?;
    let mut hit = BTreeSet::new();
    for (name, g) in &st.conjugators {
        let k: usize = name[1..].parse().expect("numbered conjugator");
        if !range.contains(&k) {
            continue;
        }
        let y = x.conjugate_by(&lift(g, &cover.ts));
        let idx = cover.class.index_of(&y).ok_or("conjugate left the class")?;
        hit.insert(part.orbit_of[idx]);
    }
    Ok(hit.len() == part.len() && hit.len() == range.len())
}

/// PSL(2,8) on the projective line `GF(8) ∪ {∞}`, with `∞` as point 8.
pub struct ProjectiveLine {
    pub translations: Vec<Perm>,
    pub s: Perm,
    pub generators: Vec<Perm>,
}

pub fn psl28() -> ProjectiveLine {
    let f = BinaryField::gf8();
    let inf = 8;
    let on_line = |g: &dyn Fn(u16) -> usize| {
        Perm::from_images((0..9).map(|x| if x == inf { g(u16::MAX) } else { g(x as u16) }).collect()).expect("bijection")
    };
    let translations: Vec<Perm> =
        (0..8u16).map(|c| on_line(&|x| if x == u16::MAX { inf } else { (x ^ c) as usize })).collect();
    let s = on_line(&|x| if x == u16::MAX { inf } else { f.mul(FieldElement(x), FieldElement(2)).0 as usize });
    let r = on_line(&|x| match x {
        u16::MAX => 0,
        0 => inf,
        _ => f.inv(FieldElement(x)).expect("nonzero").0 as usize,
    });
    let generators = vec![translations[1].clone(), s.clone(), r];
    ProjectiveLine { translations, s, generators }
}

fn inverts(t: &Perm, s: &Perm) -> bool {
    t.op(t).is_identity() && !t.is_identity() && s.conjugate_by(t) == s.inverse()
}

fn criterion(line: &ProjectiveLine, t: &Perm) -> bool {
    line.translations.iter().skip(1).any(|m| m.op(t).order(DEFAULT_ORDER_BOUND) == Some(3))
}

fn generated(line: &ProjectiveLine, t: &Perm) -> Bsgs {
    let mut gens: Vec<Perm> = line.translations.iter().skip(1).cloned().collect();
    gens.push(line.s.clone());
    gens.push(t.clone());
    Bsgs::new(9, &gens).expect("degree 9")
}

pub fn s4_amalgam_criterion(_cfg: &ScenarioConfig, table: &ClaimTable) -> Vec<ClaimReport> {
    let mut rec = Recorder::new(table);
    let line = psl28();
    let psl = Bsgs::new(9, &line.generators).expect("degree 9");
    rec.check("S4.psl28.order", Ok(Value::Int(psl.order() as i64)));
    let inv: Vec<Perm> = psl.elements().filter(|t| inverts(t, &line.s)).collect();
    rec.check("S4.psl28.inverting", Ok(Value::Int(inv.len() as i64)));
    let all_a = inv.iter().all(|t| criterion(&line, t) && generated(&line, t).order() == 504);
    rec.check("S4.psl28.criterion", Ok(Value::Bool(all_a)));

    let a9 = Bsgs::new(9, &[Perm::from_cycles(9, &[&[0, 1, 2]]).expect("cycle"), Perm::from_cycles(9, &[&[0, 1, 2, 3, 4, 5, 6, 7, 8]]).expect("cycle")])
        .expect("degree 9");
    rec.check("S4.a9.order", Ok(Value::Int(a9.order() as i64)));
    let inv9: Vec<Perm> = (0..a9.order())
        .into_par_iter()
        .map(|k| a9.element_at(k))
        .filter(|t| inverts(t, &line.s))
        .collect();
    rec.check("S4.a9.inverting", Ok(Value::Int(inv9.len() as i64)));
    let equivalent = inv9.iter().all(|t| {
        let g = generated(&line, t);
        let is_psl = g.order() == 504 && line.generators.iter().all(|x| g.contains(x));
        criterion(&line, t) == is_psl
    });
    rec.check("S4.a9.biconditional", Ok(Value::Bool(equivalent)));
    rec.fail_prefix("S4.", "not evaluated");
    rec.out
}

fn run_id(cfg: &ScenarioConfig, table: &ClaimTable) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(cfg).expect("config serializes"));
    for c in table.claims() {
        if cfg.scenarios.iter().any(|s| c.id.starts_with(s.prefix())) {
            h.update(c.id.as_bytes());
            h.update([0]);
        }
    }
    hex::encode(&h.finalize()[..8])
}

pub fn run_scenario(id: ScenarioId, cfg: &ScenarioConfig, table: &ClaimTable) -> Vec<ClaimReport> {
    match id {
        ScenarioId::S0 => s0_word_orders(cfg, table),
        ScenarioId::S1 => s1_split(cfg, table),
        ScenarioId::S2 => s2_orbit_census(cfg, table),
        ScenarioId::S3 => s3_involution_census(cfg, table),
        ScenarioId::S4 => s4_amalgam_criterion(cfg, table),
    }
}

/// Run the selected scenarios in parallel and merge their claims in table order.
pub fn verify_all(cfg: &ScenarioConfig) -> Result<Report, ScenarioError> {
    if cfg.scenarios.is_empty() {
        return Err(ScenarioError::NothingSelected);
    }
    let table = ClaimTable::shipped();
    let mut ids = cfg.scenarios.clone();
    ids.sort_unstable();
    ids.dedup();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| ScenarioError::Pool(e.to_string()))?;
    let mut claims: Vec<ClaimReport> =
        pool.install(|| ids.par_iter().flat_map_iter(|&id| run_scenario(id, cfg, &table)).collect());
    claims.sort_by_key(|c| table.position(&c.id));
    let config = ScenarioConfig { scenarios: ids, ..cfg.clone() };
    Ok(Report { run_id: run_id(&config, &table), preamble: PREAMBLE.to_string(), config, claims })
}
