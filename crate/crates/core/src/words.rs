//! Words in group generators, their evaluation, and named element scripts.
//!
//! Grammar: juxtaposition is product; `^n`, `^-n` and `^{n}` are powers of
//! the preceding atom; `^name`, `^(word)` and `^{word}` conjugate
//! (`g^h = h^-1 g h`); parentheses group.  A name is a letter, then digits,
//! then any number of `p` marks (primes) that are not followed by a digit,
//! so `t3pt5p` reads as `t3p t5p` and `d12p3` reads as `d12 p3`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupElement, DEFAULT_ORDER_BOUND};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("empty word")]
    EmptyWord,
    #[error("unbound name {0:?}")]
    UnboundName(String),
    #[error("elements of the environment are incompatible: {0}")]
    FieldMismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Word {
    Generator(String),
    Product(Vec<Word>),
    Power(Box<Word>, i64),
    Conjugate(Box<Word>, Box<Word>),
}

impl Word {
    pub fn gen(name: &str) -> Word {
        Word::Generator(name.to_string())
    }

    pub fn product(items: Vec<Word>) -> Word {
        let mut flat = Vec::new();
        for w in items {
            match w {
                Word::Product(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().expect("one item")
        } else {
            Word::Product(flat)
        }
    }

    pub fn pow(self, e: i64) -> Word {
        Word::Power(Box::new(self), e)
    }

    pub fn conj(self, by: Word) -> Word {
        Word::Conjugate(Box::new(self), Box::new(by))
    }

    pub fn inverse(self) -> Word {
        self.pow(-1)
    }

    /// Generator names in order of first appearance.
    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut Vec<String>) {
        match self {
            Word::Generator(n) => {
                if !out.contains(n) {
                    out.push(n.clone())
                }
            }
            Word::Product(items) => items.iter().for_each(|w| w.collect_names(out)),
            Word::Power(b, _) => b.collect_names(out),
            Word::Conjugate(b, h) => {
                b.collect_names(out);
                h.collect_names(out);
            }
        }
    }

    fn is_simple(&self) -> bool {
        self.names().iter().all(|n| n.chars().count() == 1)
    }

    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Generator(n) => write!(f, "{n}"),
            other => write!(f, "({other})"),
        }
    }
}

pub fn is_valid_name(name: &str) -> bool {
    let mut p = Parser::new(name);
    matches!(p.name(), Some(n) if n == name)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Generator(n) => write!(f, "{n}"),
            Word::Product(items) => {
                let texts: Vec<String> = items.iter().map(|w| w.to_string()).collect();
                for (k, text) in texts.iter().enumerate() {
                    if k > 0 {
                        let tight = items[k - 1].is_simple() && items[k].is_simple() && !text.starts_with('p');
                        if !tight {
                            write!(f, " ")?;
                        }
                    }
                    write!(f, "{text}")?;
                }
                Ok(())
            }
            Word::Power(base, e) => {
                base.fmt_atom(f)?;
                write!(f, "^{e}")
            }
            Word::Conjugate(base, by) => {
                base.fmt_atom(f)?;
                write!(f, "^")?;
                by.fmt_atom(f)
            }
        }
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_word(s)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        parse_word(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

pub fn parse_word(text: &str) -> Result<Word, WordError> {
    let mut p = Parser::new(text);
    p.skip_ws();
    if p.at_end() {
        return Err(WordError::EmptyWord);
    }
    let w = p.product()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected character"));
    }
    Ok(w)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { chars: src.chars().collect(), pos: 0, _src: src }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, msg: &str) -> WordError {
        WordError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn expect(&mut self, c: char) -> Result<(), WordError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {c:?}")))
        }
    }

    fn name(&mut self) -> Option<String> {
        let first = self.peek().filter(char::is_ascii_alphabetic)?;
        let mut out = String::from(first);
        self.pos += 1;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            out.push(c);
            self.pos += 1;
        }
        while self.peek() == Some('p') && !self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            out.push('p');
            self.pos += 1;
        }
        Some(out)
    }

    fn product(&mut self) -> Result<Word, WordError> {
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_alphabetic() || c == '(' => items.push(self.factor()?),
                _ => break,
            }
        }
        if items.is_empty() {
            return Err(if self.at_end() { WordError::EmptyWord } else { self.error("expected a name or '('") });
        }
        Ok(Word::product(items))
    }

    fn factor(&mut self) -> Result<Word, WordError> {
        let mut w = self.atom()?;
        loop {
            self.skip_ws();
            if self.peek() != Some('^') {
                return Ok(w);
            }
            self.pos += 1;
            self.skip_ws();
            w = match self.peek() {
                Some(c) if c == '-' || c.is_ascii_digit() => w.pow(self.integer()?),
                Some('(') => {
                    self.pos += 1;
                    let by = self.product()?;
                    self.expect(')')?;
                    w.conj(by)
                }
                Some('{') => {
                    self.pos += 1;
                    self.skip_ws();
                    let next = self.peek();
                    let out = if next == Some('-') || next.is_some_and(|c| c.is_ascii_digit()) {
                        w.pow(self.integer()?)
                    } else {
                        w.conj(self.product()?)
                    };
                    self.expect('}')?;
                    out
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    let by = self.name().expect("letter present");
                    w.conj(Word::Generator(by))
                }
                _ => return Err(self.error("expected exponent or conjugator after '^'")),
            };
        }
    }

    fn integer(&mut self) -> Result<i64, WordError> {
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| WordError::Syntax { pos: start, msg: format!("bad integer {text:?}") })
    }

    fn atom(&mut self) -> Result<Word, WordError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.product()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_alphabetic() => Ok(Word::Generator(self.name().expect("letter present"))),
            _ => Err(self.error("expected a name or '('")),
        }
    }
}

/// Named group elements, all in one representation.
#[derive(Clone, Debug)]
pub struct Env<G> {
    map: BTreeMap<String, G>,
}

impl<G: GroupElement> Default for Env<G> {
    fn default() -> Self {
        Env { map: BTreeMap::new() }
    }
}

impl<G: GroupElement> Env<G> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<S: AsRef<str>, I: IntoIterator<Item = (S, G)>>(pairs: I) -> Self {
        let mut env = Self::new();
        for (k, v) in pairs {
            env.insert(k.as_ref(), v);
        }
        env
    }

    pub fn insert(&mut self, name: &str, value: G) {
        self.map.insert(name.to_string(), value);
    }

    pub fn with(&self, name: &str, value: G) -> Self {
        let mut out = self.clone();
        out.insert(name, value);
        out
    }

    pub fn get(&self, name: &str) -> Option<&G> {
        self.map.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.map.keys()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Evaluate with a fresh subword cache.
    pub fn eval(&self, w: &Word) -> Result<G, WordError> {
        Evaluator::new(self).eval(w)
    }

    pub fn eval_str(&self, text: &str) -> Result<G, WordError> {
        self.eval(&parse_word(text)?)
    }
}

pub fn eval_word<G: GroupElement>(w: &Word, env: &Env<G>) -> Result<G, WordError> {
    env.eval(w)
}

/// Straight-line evaluation with a cache of subwords.
pub struct Evaluator<'a, G> {
    env: &'a Env<G>,
    cache: HashMap<Word, G>,
}

impl<'a, G: GroupElement> Evaluator<'a, G> {
    pub fn new(env: &'a Env<G>) -> Self {
        Evaluator { env, cache: HashMap::new() }
    }

    pub fn eval(&mut self, w: &Word) -> Result<G, WordError> {
        if let Some(v) = self.cache.get(w) {
            return Ok(v.clone());
        }
        let value = match w {
            Word::Generator(n) => self.env.get(n).cloned().ok_or_else(|| WordError::UnboundName(n.clone()))?,
            Word::Product(items) => {
                let mut acc: Option<G> = None;
                for item in items {
                    let v = self.eval(item)?;
                    acc = Some(match acc {
                        None => v,
                        Some(a) => a.op(&v),
                    });
                }
                acc.ok_or(WordError::EmptyWord)?
            }
            Word::Power(base, e) => self.eval(base)?.pow(*e),
            Word::Conjugate(base, by) => {
                let g = self.eval(base)?;
                let h = self.eval(by)?;
                g.conjugate_by(&h)
            }
        };
        self.cache.insert(w.clone(), value.clone());
        Ok(value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContextTag {
    Co1Exact,
    MonsterOnly,
}

impl fmt::Display for ContextTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContextTag::Co1Exact => "co1-exact",
            ContextTag::MonsterOnly => "monster-only",
        })
    }
}

impl FromStr for ContextTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "co1-exact" => Ok(ContextTag::Co1Exact),
            "monster-only" => Ok(ContextTag::MonsterOnly),
            other => Err(format!("unknown context tag {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TagFilter {
    Co1Exact,
    All,
}

impl TagFilter {
    pub fn admits(&self, tag: ContextTag) -> bool {
        match self {
            TagFilter::All => true,
            TagFilter::Co1Exact => tag == ContextTag::Co1Exact,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptEntry {
    pub name: String,
    pub word: Word,
    pub tag: ContextTag,
    pub expected_order: Option<u64>,
    pub line: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScriptError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: name {name:?} defined twice")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: {name:?} is used before its definition")]
    ForwardReference { line: usize, name: String },
    #[error("line {line}: co1-exact entry {name:?} depends on monster-only {dep:?}")]
    TagViolation { line: usize, name: String, dep: String },
    #[error("entry {name:?}: {source}")]
    Entry { name: String, source: WordError },
}

/// Ordered definitions `name = word  # tag [order=N]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ElementScript {
    entries: Vec<ScriptEntry>,
}

impl ElementScript {
    pub fn parse(text: &str) -> Result<Self, ScriptError> {
        let mut entries: Vec<ScriptEntry> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let syntax = |msg: String| ScriptError::Syntax { line, msg };
            let (body, meta) = trimmed
                .split_once('#')
                .ok_or_else(|| syntax("missing '# tag' annotation".into()))?;
            let (name, word_text) = body.split_once('=').ok_or_else(|| syntax("missing '='".into()))?;
            let name = name.trim().to_string();
            if !is_valid_name(&name) {
                return Err(syntax(format!("invalid entry name {name:?}")));
            }
            let word = parse_word(word_text.trim()).map_err(|e| syntax(e.to_string()))?;
            let mut meta_tokens = meta.split_whitespace();
            let tag: ContextTag = meta_tokens
                .next()
                .ok_or_else(|| syntax("missing context tag".into()))?
                .parse()
                .map_err(syntax)?;
            let mut expected_order = None;
            for tok in meta_tokens {
                let value = tok
                    .strip_prefix("order=")
                    .ok_or_else(|| syntax(format!("unexpected annotation {tok:?}")))?;
                expected_order = Some(value.parse().map_err(|_| syntax(format!("bad order {value:?}")))?);
            }
            entries.push(ScriptEntry { name, word, tag, expected_order, line });
        }
        let script = ElementScript { entries };
        script.validate()?;
        Ok(script)
    }

    fn validate(&self) -> Result<(), ScriptError> {
        let all: HashSet<&str> = self.entries.iter().map(|e| e.name.as_str()).collect();
        let mut defined: HashMap<&str, ContextTag> = HashMap::new();
        for e in &self.entries {
            if defined.contains_key(e.name.as_str()) {
                return Err(ScriptError::Duplicate { line: e.line, name: e.name.clone() });
            }
            for dep in e.word.names() {
                match defined.get(dep.as_str()) {
                    Some(ContextTag::MonsterOnly) if e.tag == ContextTag::Co1Exact => {
                        return Err(ScriptError::TagViolation { line: e.line, name: e.name.clone(), dep });
                    }
                    Some(_) => {}
                    None if all.contains(dep.as_str()) => {
                        return Err(ScriptError::ForwardReference { line: e.line, name: dep });
                    }
                    None => {}
                }
            }
            defined.insert(&e.name, e.tag);
        }
        Ok(())
    }

    pub fn entries(&self) -> &[ScriptEntry] {
        &self.entries
    }

    pub fn entry(&self, name: &str) -> Option<&ScriptEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Names referenced but never defined: the inputs the script expects.
    pub fn inputs(&self, filter: TagFilter) -> Vec<String> {
        let defined: HashSet<&str> = self.entries.iter().map(|e| e.name.as_str()).collect();
        let mut out: Vec<String> = Vec::new();
        for e in self.entries.iter().filter(|e| filter.admits(e.tag)) {
            for n in e.word.names() {
                if !defined.contains(n.as_str()) && !out.contains(&n) {
                    out.push(n);
                }
            }
        }
        out
    }
}

impl fmt::Display for ElementScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            write!(f, "{} = {}  # {}", e.name, e.word, e.tag)?;
            if let Some(o) = e.expected_order {
                write!(f, " order={o}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Expected and computed order of one script entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderReport {
    pub name: String,
    pub word: String,
    pub expected: Option<u64>,
    pub computed: Option<u64>,
}

/// Evaluate every admitted entry in order, extending the environment.
pub fn run_script<G: GroupElement>(
    script: &ElementScript,
    env: &Env<G>,
    filter: TagFilter,
) -> Result<(Env<G>, Vec<OrderReport>), ScriptError> {
    let mut out = env.clone();
    let mut reports = Vec::new();
    for e in script.entries.iter().filter(|e| filter.admits(e.tag)) {
        let value = out
            .eval(&e.word)
            .map_err(|source| ScriptError::Entry { name: e.name.clone(), source })?;
        if e.expected_order.is_some() {
            reports.push(OrderReport {
                name: e.name.clone(),
                word: e.word.to_string(),
                expected: e.expected_order,
                computed: value.order(DEFAULT_ORDER_BOUND),
            });
        }
        out.insert(&e.name, value);
    }
    Ok((out, reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    #[test]
    fn parses_grammar_cases() {
        assert_eq!(w("ab^2"), Word::Product(vec![Word::gen("a"), Word::gen("b").pow(2)]));
        assert_eq!(w("(ab)^34"), Word::Product(vec![Word::gen("a"), Word::gen("b")]).pow(34));
        assert_eq!(w("t1^(ab)"), Word::gen("t1").conj(Word::Product(vec![Word::gen("a"), Word::gen("b")])));
        assert_eq!(w("(ab)^{29}"), w("(ab)^29"));
        assert_eq!(w("i0^{t3p}"), Word::gen("i0").conj(Word::gen("t3p")));
        assert_eq!(w("a^-1"), Word::gen("a").pow(-1));
        assert_eq!(w("t3pt5p"), Word::Product(vec![Word::gen("t3p"), Word::gen("t5p")]));
        assert_eq!(w("d12p3"), Word::Product(vec![Word::gen("d12"), Word::gen("p3")]));
        assert_eq!(w("a(bc)d"), w("abcd"));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse_word(""), Err(WordError::EmptyWord));
        assert_eq!(parse_word("   "), Err(WordError::EmptyWord));
        assert!(matches!(parse_word("a^"), Err(WordError::Syntax { .. })));
        assert!(matches!(parse_word("(ab"), Err(WordError::Syntax { .. })));
        assert!(matches!(parse_word("a)"), Err(WordError::Syntax { .. })));
        assert!(matches!(parse_word("a*b"), Err(WordError::Syntax { .. })));
    }

    #[test]
    fn printer_round_trips() {
        for s in [
            "ab^2",
            "(ab)^34(abab^2)^3(ab)^6",
            "i0 i1",
            "t1^((ab^2)^7(ab)^29)",
            "((t6 i7)^2)^((t6 i7 t6 i7^2)^3)",
            "i7 t3 (i7 i7^t3)^3",
            "a p1",
            "d12 p3",
        ] {
            let parsed = w(s);
            assert_eq!(parsed.to_string(), s);
            assert_eq!(w(&parsed.to_string()), parsed);
        }
    }

    #[test]
    fn script_validation() {
        let ok = ElementScript::parse("c = ab  # co1-exact\nd = c^2  # co1-exact order=3\n").unwrap();
        assert_eq!(ok.entries().len(), 2);
        assert_eq!(ok.inputs(TagFilter::All), vec!["a", "b"]);
        assert!(matches!(
            ElementScript::parse("c = d  # co1-exact\nd = a  # co1-exact\n"),
            Err(ScriptError::ForwardReference { .. })
        ));
        assert!(matches!(
            ElementScript::parse("c = a  # co1-exact\nc = b  # co1-exact\n"),
            Err(ScriptError::Duplicate { .. })
        ));
        assert!(matches!(
            ElementScript::parse("w = T  # monster-only\nc = w  # co1-exact\n"),
            Err(ScriptError::TagViolation { .. })
        ));
        assert!(matches!(ElementScript::parse("c = ab\n"), Err(ScriptError::Syntax { .. })));
        assert!(ElementScript::parse("").unwrap().entries().is_empty());
    }
}
