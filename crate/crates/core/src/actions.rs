//! Permutation actions: projective points, conjugation on classes, orbits,
//! and base-and-strong-generating-set computations.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fields::{BinaryField, Field, FieldElement};
use crate::group::GroupElement;
use crate::linalg::DenseMatrix;
use crate::words::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error("image list is not a permutation of 0..{0}")]
    NotBijective(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("matrix does not map the point set to itself")]
    PointNotClosed,
    #[error("point {0} out of range for degree {1}")]
    IndexOutOfRange(usize, usize),
    #[error("cycle type {0:?} is not an involution type of degree {1}")]
    BadCycleType(Vec<usize>, usize),
    #[error("conjugation leaves the target set")]
    NotClosed,
    #[error("matrix dimension {0} does not match point dimension {1}")]
    DimensionMismatch(usize, usize),
    #[error("{0}")]
    Structure(String),
}

/// Permutation of `0..n`, acting on the right: `i^(gh) = (i^g)^h`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm { images: (0..n as u32).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm, ActionError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(ActionError::NotBijective(n));
            }
        }
        Ok(Perm { images: images.into_iter().map(|i| i as u32).collect() })
    }

    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Perm, ActionError> {
        let mut images: Vec<usize> = (0..n).collect();
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                if a >= n || b >= n {
                    return Err(ActionError::IndexOutOfRange(a.max(b), n));
                }
                images[a] = b;
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize).collect()
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut j = self.image(start);
            while j != start {
                seen[j] = true;
                cycle.push(j);
                j = self.image(j);
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle lengths in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    pub fn first_moved(&self) -> Option<usize> {
        (0..self.degree()).find(|&i| self.image(i) != i)
    }

    /// The permutation induced on `range`, renumbered from zero.
    pub fn restrict(&self, range: std::ops::Range<usize>) -> Result<Perm, ActionError> {
        let start = range.start;
        let images: Vec<usize> = range
            .clone()
            .map(|i| self.image(i).checked_sub(start).filter(|&j| j < range.len()))
            .collect::<Option<_>>()
            .ok_or(ActionError::NotClosed)?;
        Perm::from_images(images)
    }

    /// Disjoint union acting on `0..n+m`.
    pub fn direct_sum(&self, other: &Perm) -> Perm {
        let n = self.degree() as u32;
        let mut images = self.images.clone();
        images.extend(other.images.iter().map(|&i| i + n));
        Perm { images }
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|i| i.to_string()).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

impl GroupElement for Perm {
    fn op(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "permutation degrees differ");
        Perm { images: self.images.iter().map(|&i| other.images[i as usize]).collect() }
    }

    fn inverse(&self) -> Self {
        let mut images = vec![0u32; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Perm { images }
    }

    fn identity_like(&self) -> Self {
        Perm::identity(self.degree())
    }

    fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    fn canonical_bytes(&self) -> Vec<u8> {
        self.images.iter().flat_map(|i| i.to_le_bytes()).collect()
    }

    fn order(&self, bound: u64) -> Option<u64> {
        let order = self
            .cycles()
            .iter()
            .fold(1u64, |acc, c| acc / gcd(acc, c.len() as u64) * c.len() as u64);
        (order <= bound).then_some(order)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Canonically indexed list of distinct points.
#[derive(Clone, Debug)]
pub struct PointSet<T: Eq + Hash + Clone> {
    points: Vec<T>,
    index: HashMap<T, usize>,
}

impl<T: Eq + Hash + Clone> PointSet<T> {
    pub fn new(points: Vec<T>) -> Self {
        let index = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect::<HashMap<_, _>>();
        assert_eq!(index.len(), points.len(), "points must be distinct");
        PointSet { points, index }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &T {
        &self.points[i]
    }

    pub fn index_of(&self, p: &T) -> Option<usize> {
        self.index.get(p).copied()
    }
}

/// Scale a nonzero vector so its first nonzero coordinate is 1.
pub fn normalize(field: &BinaryField, v: &[u16]) -> Vec<u16> {
    let lead = *v.iter().find(|&&x| x != 0).expect("nonzero vector");
    let inv = field.inv(FieldElement(lead)).expect("nonzero lead");
    v.iter().map(|&x| field.mul(FieldElement(x), inv).0).collect()
}

/// All 1-spaces of `F^d`, normalized and in lexicographic order.
pub fn projective_points(field: &BinaryField, d: usize) -> PointSet<Vec<u16>> {
    let q = field.size() as u16;
    let mut points = Vec::new();
    for lead in 0..d {
        let free = d - lead - 1;
        let count = (q as usize).pow(free as u32);
        for mut k in 0..count {
            let mut v = vec![0u16; d];
            v[lead] = 1;
            for j in (lead + 1..d).rev() {
                v[j] = (k % q as usize) as u16;
                k /= q as usize;
            }
            points.push(v);
        }
    }
    points.sort();
    PointSet::new(points)
}

/// The permutations induced by invertible matrices on projective points.
pub fn action_on_points(gens: &[DenseMatrix], pts: &PointSet<Vec<u16>>) -> Result<Vec<Perm>, ActionError> {
    gens.iter().map(|m| point_permutation(m, pts)).collect()
}

fn point_permutation(m: &DenseMatrix, pts: &PointSet<Vec<u16>>) -> Result<Perm, ActionError> {
    let field = match m.field() {
        Field::Binary(f) => f,
        other => return Err(ActionError::Structure(format!("projective action needs a binary field, got {other}"))),
    };
    let d = pts.point(0).len();
    if m.rows() != d || m.cols() != d {
        return Err(ActionError::DimensionMismatch(m.rows(), d));
    }
    let rows = m.to_rows();
    let images: Vec<usize> = pts
        .points()
        .par_iter()
        .map(|p| {
            let mut out = vec![0u16; d];
            for (i, &c) in p.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (j, &x) in rows[i].iter().enumerate() {
                    out[j] ^= field.mul(FieldElement(c), FieldElement(x)).0;
                }
            }
            if out.iter().all(|&x| x == 0) {
                return None;
            }
            pts.index_of(&normalize(&field, &out))
        })
        .collect::<Option<_>>()
        .ok_or(ActionError::PointNotClosed)?;
    Perm::from_images(images)
}

/// Orbits of a permutation group, with least-index representatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitPartition {
    pub orbit_of: Vec<usize>,
    pub sizes: Vec<usize>,
    pub representatives: Vec<usize>,
}

impl OrbitPartition {
    pub fn sorted_sizes(&self) -> Vec<usize> {
        let mut s = self.sizes.clone();
        s.sort_unstable();
        s
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn members(&self, orbit: usize) -> Vec<usize> {
        (0..self.orbit_of.len()).filter(|&p| self.orbit_of[p] == orbit).collect()
    }
}

pub fn orbits(gens: &[Perm], degree: usize) -> Result<OrbitPartition, ActionError> {
    for g in gens {
        if g.degree() != degree {
            return Err(ActionError::DegreeMismatch(g.degree(), degree));
        }
    }
    let mut orbit_of = vec![usize::MAX; degree];
    let mut sizes = Vec::new();
    let mut representatives = Vec::new();
    for start in 0..degree {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        orbit_of[start] = id;
        let mut queue = VecDeque::from([start]);
        let mut size = 0;
        while let Some(p) = queue.pop_front() {
            size += 1;
            for g in gens {
                let q = g.image(p);
                if orbit_of[q] == usize::MAX {
                    orbit_of[q] = id;
                    queue.push_back(q);
                }
            }
        }
        sizes.push(size);
        representatives.push(start);
    }
    Ok(OrbitPartition { orbit_of, sizes, representatives })
}

#[derive(Clone, Debug)]
struct Level {
    point: usize,
    gens: Vec<Perm>,
    orbit: Vec<usize>,
    transversal: Vec<Option<Perm>>,
}

impl Level {
    fn new(point: usize, degree: usize) -> Level {
        let mut transversal = vec![None; degree];
        transversal[point] = Some(Perm::identity(degree));
        Level { point, gens: Vec::new(), orbit: vec![point], transversal }
    }
}

/// Stabilizer chain built by incremental Schreier-Sims.
#[derive(Clone, Debug)]
pub struct Bsgs {
    degree: usize,
    levels: Vec<Level>,
}

impl Bsgs {
    pub fn new(degree: usize, gens: &[Perm]) -> Result<Bsgs, ActionError> {
        Self::with_base(degree, gens, &[])
    }

    /// Chain whose base starts with the given points.
    pub fn with_base(degree: usize, gens: &[Perm], prefix: &[usize]) -> Result<Bsgs, ActionError> {
        let mut b = Bsgs { degree, levels: Vec::new() };
        for &p in prefix {
            if p >= degree {
                return Err(ActionError::IndexOutOfRange(p, degree));
            }
            b.levels.push(Level::new(p, degree));
        }
        for g in gens {
            if g.degree() != degree {
                return Err(ActionError::DegreeMismatch(g.degree(), degree));
            }
            b.add_generator(g);
        }
        Ok(b)
    }

    /// Add a generator; returns whether the group grew.
    pub fn add_generator(&mut self, g: &Perm) -> bool {
        let (residue, _) = self.strip(g, 0);
        if residue.is_identity() {
            return false;
        }
        self.extend(0, residue);
        true
    }

    /// Sift `g` from `level` down; returns the residue and the level reached.
    pub fn strip(&self, g: &Perm, level: usize) -> (Perm, usize) {
        let mut h = g.clone();
        for (i, lv) in self.levels.iter().enumerate().skip(level) {
            let b = h.image(lv.point);
            match &lv.transversal[b] {
                None => return (h, i),
                Some(u) => h = h.op(&u.inverse()),
            }
        }
        (h, self.levels.len())
    }

    fn extend(&mut self, level: usize, g: Perm) {
        if level == self.levels.len() {
            let point = g.first_moved().expect("non-identity generator");
            self.levels.push(Level::new(point, self.degree));
        }
        self.levels[level].gens.push(g);
        let new_gen = self.levels[level].gens.len() - 1;
        let old_len = self.levels[level].orbit.len();
        for k in 0..old_len {
            let b = self.levels[level].orbit[k];
            self.process(level, b, new_gen);
        }
        let mut k = old_len;
        while k < self.levels[level].orbit.len() {
            let b = self.levels[level].orbit[k];
            for s in 0..self.levels[level].gens.len() {
                self.process(level, b, s);
            }
            k += 1;
        }
    }

    fn process(&mut self, level: usize, b: usize, s: usize) {
        let lv = &self.levels[level];
        let gen = &lv.gens[s];
        let c = gen.image(b);
        let ub = lv.transversal[b].as_ref().expect("orbit point has a coset representative");
        let ubs = ub.op(gen);
        let schreier = match &lv.transversal[c] {
            None => {
                let lv = &mut self.levels[level];
                lv.transversal[c] = Some(ubs);
                lv.orbit.push(c);
                return;
            }
            Some(uc) => ubs.op(&uc.inverse()),
        };
        let (residue, _) = self.strip(&schreier, level + 1);
        if !residue.is_identity() {
            self.extend(level + 1, residue);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    /// Order of the stabilizer of the first `k` base points.
    pub fn order_from(&self, k: usize) -> u128 {
        self.levels.iter().skip(k).map(|l| l.orbit.len() as u128).product()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.strip(g, 0).0.is_identity()
    }

    pub fn strong_generators(&self) -> Vec<Perm> {
        self.strong_generators_from(0)
    }

    /// Generators of the stabilizer of the first `k` base points.
    pub fn strong_generators_from(&self, k: usize) -> Vec<Perm> {
        let set: BTreeSet<Perm> = self.levels.iter().skip(k).flat_map(|l| l.gens.iter().cloned()).collect();
        set.into_iter().collect()
    }

    /// Every element once, as products of coset representatives.
    pub fn elements(&self) -> BsgsElements<'_> {
        BsgsElements { bsgs: self, counters: vec![0; self.levels.len()], done: false }
    }

    /// The element with the given mixed-radix index.
    pub fn element_at(&self, mut index: u128) -> Perm {
        let mut acc = Perm::identity(self.degree);
        for lv in self.levels.iter().rev() {
            let n = lv.orbit.len() as u128;
            let pick = (index % n) as usize;
            index /= n;
            let u = lv.transversal[lv.orbit[pick]].as_ref().expect("orbit point");
            acc = acc.op(u);
        }
        acc
    }
}

pub struct BsgsElements<'a> {
    bsgs: &'a Bsgs,
    counters: Vec<usize>,
    done: bool,
}

impl Iterator for BsgsElements<'_> {
    type Item = Perm;

    fn next(&mut self) -> Option<Perm> {
        if self.done {
            return None;
        }
        let levels = &self.bsgs.levels;
        let mut acc = Perm::identity(self.bsgs.degree);
        for (lv, &c) in levels.iter().zip(&self.counters).rev() {
            acc = acc.op(lv.transversal[lv.orbit[c]].as_ref().expect("orbit point"));
        }
        let mut i = 0;
        loop {
            if i == levels.len() {
                self.done = true;
                break;
            }
            self.counters[i] += 1;
            if self.counters[i] < levels[i].orbit.len() {
                break;
            }
            self.counters[i] = 0;
            i += 1;
        }
        Some(acc)
    }
}

pub fn schreier_sims(gens: &[Perm], degree: usize) -> Result<Bsgs, ActionError> {
    Bsgs::new(degree, gens)
}

/// Point stabilizer: generators and order, from a fresh chain based at `pt`.
pub fn stabilizer(g: &Bsgs, pt: usize) -> Result<(Vec<Perm>, u128), ActionError> {
    if pt >= g.degree() {
        return Err(ActionError::IndexOutOfRange(pt, g.degree()));
    }
    let chain = Bsgs::with_base(g.degree(), &g.strong_generators(), &[pt])?;
    let order = chain.order_from(1);
    debug_assert_eq!(order * chain.orbit_sizes()[0] as u128, g.order());
    Ok((chain.strong_generators_from(1), order))
}

/// Derived subgroup as the normal closure of generator commutators.
pub fn derived_subgroup(gens: &[Perm], degree: usize) -> Result<Bsgs, ActionError> {
    let mut d = Bsgs::new(degree, &[])?;
    let mut queue: VecDeque<Perm> = VecDeque::new();
    for (i, x) in gens.iter().enumerate() {
        for y in &gens[i + 1..] {
            queue.push_back(x.inverse().op(&y.inverse()).op(x).op(y));
        }
    }
    while let Some(c) = queue.pop_front() {
        if d.add_generator(&c) {
            queue.push_back(c.clone());
            for g in gens {
                queue.push_back(c.conjugate_by(g));
            }
        }
    }
    loop {
        let mut grew = false;
        for s in d.strong_generators() {
            for g in gens {
                grew |= d.add_generator(&s.conjugate_by(g));
            }
        }
        if !grew {
            return Ok(d);
        }
    }
}

pub fn is_perfect(gens: &[Perm], degree: usize) -> Result<bool, ActionError> {
    let g = Bsgs::new(degree, gens)?;
    Ok(derived_subgroup(gens, degree)?.order() == g.order())
}

/// All involutions of the given cycle type (parts 1 and 2) on `0..n`, lexicographic.
pub fn involutions_of_type(n: usize, cycle_type: &[usize]) -> Result<PointSet<Perm>, ActionError> {
    let bad = || ActionError::BadCycleType(cycle_type.to_vec(), n);
    if cycle_type.iter().any(|&p| p != 1 && p != 2) || cycle_type.iter().sum::<usize>() != n {
        return Err(bad());
    }
    let pairs = cycle_type.iter().filter(|&&p| p == 2).count();
    let mut out = Vec::new();
    let mut images: Vec<usize> = (0..n).collect();
    fn rec(i: usize, left: usize, images: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Perm>) {
        let n = images.len();
        let free = (i..n).filter(|&j| !used[j]).count();
        if left == 0 {
            out.push(Perm::from_images(images.clone()).expect("involution"));
            return;
        }
        if i >= n || free < 2 * left {
            return;
        }
        if used[i] {
            return rec(i + 1, left, images, used, out);
        }
        if free > 2 * left {
            used[i] = true;
            rec(i + 1, left, images, used, out);
            used[i] = false;
        }
        for j in i + 1..n {
            if used[j] {
                continue;
            }
            used[i] = true;
            used[j] = true;
            images[i] = j;
            images[j] = i;
            rec(i + 1, left - 1, images, used, out);
            images[i] = i;
            images[j] = j;
            used[i] = false;
            used[j] = false;
        }
    }
    rec(0, pairs, &mut images, &mut vec![false; n], &mut out);
    out.sort_by(|a, b| a.images.cmp(&b.images));
    Ok(PointSet::new(out))
}

/// A conjugacy class reached from `base` under `gens`, with a conjugating word for each member.
pub fn conjugacy_class_with_words<G: GroupElement>(
    base: &G,
    gens: &[G],
    names: &[&str],
) -> (PointSet<G>, Vec<Word>) {
    let mut points = vec![base.clone()];
    let mut index: HashMap<G, usize> = HashMap::from([(base.clone(), 0)]);
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut k = 0;
    while k < points.len() {
        for (gi, g) in gens.iter().enumerate() {
            let y = points[k].conjugate_by(g);
            if !index.contains_key(&y) {
                index.insert(y.clone(), points.len());
                let mut w = words[k].clone();
                w.push(gi);
                words.push(w);
                points.push(y);
            }
        }
        k += 1;
    }
    let words = words.into_iter().map(|w| letters_to_word(&w, names)).collect();
    (PointSet::new(points), words)
}

fn letters_to_word(letters: &[usize], names: &[&str]) -> Word {
    if letters.is_empty() {
        return Word::gen(names[0]).pow(0);
    }
    Word::product(letters.iter().map(|&i| Word::gen(names[i])).collect())
}

/// Orbits of conjugation by `actors` on a target set.
pub fn conj_orbits<G: GroupElement>(targets: &PointSet<G>, actors: &[G]) -> Result<OrbitPartition, ActionError> {
    let perms = actors
        .iter()
        .map(|a| {
            let images = targets
                .points()
                .iter()
                .map(|t| targets.index_of(&t.conjugate_by(a)))
                .collect::<Option<Vec<_>>>()
                .ok_or(ActionError::NotClosed)?;
            Perm::from_images(images)
        })
        .collect::<Result<Vec<_>, _>>()?;
    orbits(&perms, targets.len())
}

/// Per-orbit data for a conjugation census.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub sizes: Vec<usize>,
    pub representatives: Vec<String>,
    pub conjugators: Vec<String>,
}

/// Orbit census on a class built by [`conjugacy_class_with_words`], naming for each
/// orbit a word conjugating the base element to its representative.
pub fn orbit_report<G: GroupElement + fmt::Debug>(
    targets: &PointSet<G>,
    words: &[Word],
    actors: &[G],
    describe: impl Fn(&G) -> String,
) -> Result<OrbitReport, ActionError> {
    let part = conj_orbits(targets, actors)?;
    Ok(OrbitReport {
        sizes: part.sizes.clone(),
        representatives: part.representatives.iter().map(|&i| describe(targets.point(i))).collect(),
        conjugators: part.representatives.iter().map(|&i| words[i].to_string()).collect(),
    })
}

/// Coxeter generators `(i, i+1)` of the symmetric group on `n` letters.
pub fn coxeter_generators(n: usize) -> Vec<Perm> {
    (0..n - 1)
        .map(|i| Perm::from_cycles(n, &[&[i, i + 1]]).expect("valid transposition"))
        .collect()
}

/// Indices `j` with `g = s_{j1} s_{j2} ...` in the Coxeter generators, by bubble sort.
pub fn coxeter_word(g: &Perm) -> Vec<usize> {
    let n = g.degree();
    let mut arr: Vec<usize> = (0..n).map(|i| g.image(i)).collect();
    let mut swaps = Vec::new();
    loop {
        let mut changed = false;
        for j in 0..n.saturating_sub(1) {
            if arr[j] > arr[j + 1] {
                arr.swap(j, j + 1);
                swaps.push(j);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let word = swaps;
    debug_assert!({
        let gens = coxeter_generators(n);
        let prod = word.iter().fold(Perm::identity(n), |acc, &j| acc.op(&gens[j]));
        prod == *g
    });
    word
}

/// Lines `{i, i+1, i+3}` mod 7 of the Fano plane.
pub fn fano_lines() -> Vec<BTreeSet<usize>> {
    (0..7).map(|i| [i % 7, (i + 1) % 7, (i + 3) % 7].into_iter().collect()).collect()
}

fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut arr: Vec<usize> = (0..n).collect();
    fn heap(k: usize, arr: &mut Vec<usize>, out: &mut Vec<Perm>) {
        if k == 1 {
            out.push(Perm::from_images(arr.clone()).expect("permutation"));
            return;
        }
        for i in 0..k {
            heap(k - 1, arr, out);
            let j = if k % 2 == 0 { i } else { 0 };
            arr.swap(j, k - 1);
        }
    }
    heap(n, &mut arr, &mut out);
    out.sort();
    out
}

fn maps_lines(p: &Perm, lines: &[BTreeSet<usize>]) -> bool {
    lines.iter().all(|l| {
        let img: BTreeSet<usize> = l.iter().map(|&x| p.image(x)).collect();
        lines.contains(&img)
    })
}

/// Greedy generators for a listed subgroup.
fn generators_of(elements: &[Perm], degree: usize) -> Vec<Perm> {
    let mut chain = Bsgs::new(degree, &[]).expect("empty chain");
    let mut gens = Vec::new();
    for e in elements {
        if chain.add_generator(e) {
            gens.push(e.clone());
        }
        if chain.order() == elements.len() as u128 {
            break;
        }
    }
    gens
}

/// Generators of the automorphism group of the Fano plane, a PSL(3,2) in Sym(7).
pub fn fano_group() -> Vec<Perm> {
    let lines = fano_lines();
    let elems: Vec<Perm> = all_perms(7).into_iter().filter(|p| maps_lines(p, &lines)).collect();
    generators_of(&elems, 7)
}

/// Generators of the A4 fixing the Fano plane and a second plane in its Alt(7)-orbit.
pub fn two_plane_stabilizer() -> Vec<Perm> {
    let lines = fano_lines();
    let plane_of = |p: &Perm| -> BTreeSet<BTreeSet<usize>> {
        lines.iter().map(|l| l.iter().map(|&x| p.image(x)).collect()).collect()
    };
    let base: BTreeSet<BTreeSet<usize>> = lines.iter().cloned().collect();
    let others: BTreeSet<BTreeSet<BTreeSet<usize>>> =
        all_perms(7).iter().filter(|p| p.is_even()).map(plane_of).filter(|pl| *pl != base).collect();
    let other: Vec<BTreeSet<usize>> = others.into_iter().next().expect("fifteen planes").into_iter().collect();
    let elems: Vec<Perm> = all_perms(7)
        .into_iter()
        .filter(|p| maps_lines(p, &lines) && maps_lines(p, &other))
        .collect();
    generators_of(&elems, 7)
}

pub fn seven_cycle() -> Vec<Perm> {
    vec![Perm::from_cycles(7, &[&[0, 1, 2, 3, 4, 5, 6]]).expect("cycle")]
}

/// The letters of Sym(n) recovered from its class of transpositions: each letter
/// is the set of transpositions moving it, a maximal set of pairwise
/// non-commuting transpositions.  Returns index sets into `transpositions`.
pub fn letters_from_transpositions<G: GroupElement>(transpositions: &[G]) -> Result<Vec<Vec<usize>>, ActionError> {
    let n = transpositions.len();
    let commute: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| transpositions[i].commutes_with(&transpositions[j])).collect())
        .collect();
    let mut letters: BTreeSet<Vec<usize>> = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if commute[i][j] {
                continue;
            }
            let common: Vec<usize> = (0..n).filter(|&k| k != i && k != j && !commute[i][k] && !commute[j][k]).collect();
            let mut star: Vec<usize> = common
                .iter()
                .copied()
                .filter(|&k| common.iter().any(|&l| l != k && !commute[k][l]))
                .collect();
            star.extend([i, j]);
            star.sort_unstable();
            letters.insert(star);
        }
    }
    let letters: Vec<Vec<usize>> = letters.into_iter().collect();
    let size = letters.first().map_or(0, Vec::len);
    let ok = letters.iter().all(|l| l.len() == size)
        && (0..n).all(|t| letters.iter().filter(|l| l.contains(&t)).count() == 2)
        && letters.iter().all(|l| l.iter().all(|&a| l.iter().all(|&b| a == b || !commute[a][b])));
    if !ok {
        return Err(ActionError::Structure("transpositions do not form a symmetric-group class".into()));
    }
    Ok(letters)
}

/// Permutation of the letters induced by conjugation.
pub fn letter_action<G: GroupElement>(
    g: &G,
    transpositions: &PointSet<G>,
    letters: &[Vec<usize>],
) -> Result<Perm, ActionError> {
    let images = letters
        .iter()
        .map(|l| {
            let mut img = l
                .iter()
                .map(|&t| transpositions.index_of(&transpositions.point(t).conjugate_by(g)))
                .collect::<Option<Vec<_>>>()
                .ok_or(ActionError::NotClosed)?;
            img.sort_unstable();
            letters.iter().position(|m| *m == img).ok_or(ActionError::NotClosed)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Perm::from_images(images)
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn wedge2(m: &DenseMatrix) -> [[u8; 6]; 6] {
    let mut out = [[0u8; 6]; 6];
    for (r, &(i, j)) in PAIRS.iter().enumerate() {
        for (c, &(k, l)) in PAIRS.iter().enumerate() {
            let v = (m.get(i, k) * m.get(j, l) + m.get(i, l) * m.get(j, k)) % 2;
            out[r][c] = v as u8;
        }
    }
    out
}

fn pfaffian_form(v: u8) -> u8 {
    let b = |i: usize| (v >> i) & 1;
    (b(0) * b(5) + b(1) * b(4) + b(2) * b(3)) % 2
}

/// The eight maximal sets of pairwise non-orthogonal nonsingular vectors in
/// the exterior square of GF(2)^4, on which GL(4,2) acts as Alt(8).
pub fn gl42_cliques() -> (Vec<u8>, Vec<Vec<usize>>) {
    let nonsing: Vec<u8> = (1u8..64).filter(|&v| pfaffian_form(v) == 1).collect();
    let bil = |u: u8, v: u8| pfaffian_form(u ^ v) ^ pfaffian_form(u) ^ pfaffian_form(v);
    let n = nonsing.len();
    let mut cliques: BTreeSet<Vec<usize>> = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            if bil(nonsing[a], nonsing[b]) != 1 {
                continue;
            }
            let mut clique = vec![a, b];
            for c in 0..n {
                if c != a && c != b && clique.iter().all(|&d| bil(nonsing[c], nonsing[d]) == 1) {
                    clique.push(c);
                }
            }
            if clique.len() == 7 {
                clique.sort_unstable();
                cliques.insert(clique);
            }
        }
    }
    (nonsing, cliques.into_iter().collect())
}

/// The permutation of the eight cliques induced by an element of GL(4,2).
pub fn gl42_clique_action(m: &DenseMatrix, nonsing: &[u8], cliques: &[Vec<usize>]) -> Result<Perm, ActionError> {
    if !m.field().is_gf2() || m.rows() != 4 || m.cols() != 4 {
        return Err(ActionError::DimensionMismatch(m.rows(), 4));
    }
    let w = wedge2(m);
    let apply = |v: u8| -> u8 {
        let mut out = 0u8;
        for (r, row) in w.iter().enumerate() {
            if (v >> r) & 1 == 1 {
                for (c, &x) in row.iter().enumerate() {
                    out ^= x << c;
                }
            }
        }
        out
    };
    let images = cliques
        .iter()
        .map(|cl| {
            let mut img = cl
                .iter()
                .map(|&i| nonsing.iter().position(|&v| v == apply(nonsing[i])))
                .collect::<Option<Vec<_>>>()
                .ok_or(ActionError::NotClosed)?;
            img.sort_unstable();
            cliques.iter().position(|c| *c == img).ok_or(ActionError::NotClosed)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Perm::from_images(images)
}
