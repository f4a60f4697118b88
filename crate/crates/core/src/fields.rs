//! Finite fields of characteristic two (and small prime fields), plus
//! univariate polynomials over GF(2) with factorization.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is reducible over GF(2)")]
    ReducibleModulus(String),
    #[error("modulus degree {found} does not match field degree {expected}")]
    DegreeMismatch { expected: u32, found: usize },
    #[error("field degree {0} outside 1..=16")]
    DegreeOutOfRange(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero polynomial has no factorization")]
    ZeroPolynomial,
    #[error("cannot parse polynomial {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("unsupported field order {0}")]
    UnsupportedOrder(u32),
}

/// Polynomial over GF(2); bit `i` of the packed words is the coefficient of `x^i`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly2 {
    words: Vec<u64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { words: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_bits(1)
    }

    pub fn x() -> Self {
        Self::from_bits(2)
    }

    pub fn from_bits(bits: u64) -> Self {
        Self::from_words(vec![bits])
    }

    pub fn from_words(words: Vec<u64>) -> Self {
        let mut p = Poly2 { words };
        p.trim();
        p
    }

    pub fn monomial(degree: usize) -> Self {
        let mut p = Self::zero();
        p.flip(degree);
        p
    }

    pub fn from_exponents(exps: &[usize]) -> Self {
        let mut p = Self::zero();
        for &e in exps {
            p.flip(e);
        }
        p
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Packed coefficients when the degree is below 64.
    pub fn bits(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        let top = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn flip(&mut self, i: usize) {
        if self.words.len() <= i / 64 {
            self.words.resize(i / 64 + 1, 0);
        }
        self.words[i / 64] ^= 1 << (i % 64);
        self.trim();
    }

    pub fn exponents(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.words.iter().enumerate() {
            let mut rest = w;
            while rest != 0 {
                out.push(wi * 64 + rest.trailing_zeros() as usize);
                rest &= rest - 1;
            }
        }
        out
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(&short.words) {
            *w ^= s;
        }
        Poly2::from_words(words)
    }

    fn shl_xor_into(acc: &mut Vec<u64>, src: &[u64], shift: usize) {
        let (ws, bs) = (shift / 64, shift % 64);
        let need = src.len() + ws + 1;
        if acc.len() < need {
            acc.resize(need, 0);
        }
        for (i, &w) in src.iter().enumerate() {
            acc[i + ws] ^= w << bs;
            if bs != 0 {
                acc[i + ws + 1] ^= w >> (64 - bs);
            }
        }
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        if self.is_zero() || other.is_zero() {
            return Poly2::zero();
        }
        let mut acc = Vec::with_capacity(self.words.len() + other.words.len() + 1);
        for e in other.exponents() {
            Self::shl_xor_into(&mut acc, &self.words, e);
        }
        Poly2::from_words(acc)
    }

    pub fn square(&self) -> Poly2 {
        let mut out = vec![0u64; self.words.len() * 2];
        for (i, &w) in self.words.iter().enumerate() {
            out[2 * i] = spread(w as u32);
            out[2 * i + 1] = spread((w >> 32) as u32);
        }
        Poly2::from_words(out)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, divisor: &Poly2) -> (Poly2, Poly2) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let mut rem = self.words.clone();
        let mut quot = Poly2::zero();
        loop {
            let r = Poly2::from_words(rem.clone());
            let Some(rd) = r.degree() else { break };
            if rd < dd {
                break;
            }
            quot.flip(rd - dd);
            Self::shl_xor_into(&mut rem, &divisor.words, rd - dd);
            let mut t = Poly2 { words: rem };
            t.trim();
            rem = t.words;
        }
        (quot, Poly2::from_words(rem))
    }

    pub fn rem(&self, divisor: &Poly2) -> Poly2 {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let mut rem = self.clone();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            Self::shl_xor_into(&mut rem.words, &divisor.words, rd - dd);
            rem.trim();
        }
        rem
    }

    pub fn div_exact(&self, divisor: &Poly2) -> Poly2 {
        let (q, r) = self.divrem(divisor);
        debug_assert!(r.is_zero());
        q
    }

    pub fn divides(&self, other: &Poly2) -> bool {
        other.rem(self).is_zero()
    }

    pub fn gcd(&self, other: &Poly2) -> Poly2 {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    pub fn lcm(&self, other: &Poly2) -> Poly2 {
        if self.is_zero() || other.is_zero() {
            return Poly2::zero();
        }
        self.div_exact(&self.gcd(other)).mul(other)
    }

    pub fn mulmod(&self, other: &Poly2, modulus: &Poly2) -> Poly2 {
        self.mul(other).rem(modulus)
    }

    /// `self^e mod modulus` for an exponent given as little-endian u64 limbs.
    pub fn powmod_limbs(&self, exp: &[u64], modulus: &Poly2) -> Poly2 {
        let mut acc = Poly2::one().rem(modulus);
        let base = self.rem(modulus);
        for &limb in exp.iter().rev() {
            for bit in (0..64).rev() {
                acc = acc.square().rem(modulus);
                if (limb >> bit) & 1 == 1 {
                    acc = acc.mulmod(&base, modulus);
                }
            }
        }
        acc
    }

    pub fn powmod(&self, exp: u128, modulus: &Poly2) -> Poly2 {
        self.powmod_limbs(&[exp as u64, (exp >> 64) as u64], modulus)
    }

    pub fn derivative(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for e in self.exponents() {
            if e % 2 == 1 {
                out.flip(e - 1);
            }
        }
        out
    }

    /// Square root of a polynomial whose exponents are all even.
    fn sqrt_even(&self) -> Poly2 {
        Poly2::from_exponents(&self.exponents().iter().map(|e| e / 2).collect::<Vec<_>>())
    }

    pub fn is_irreducible(&self) -> bool {
        match self.degree() {
            None | Some(0) => false,
            Some(d) => {
                let x = Poly2::x();
                let mut h = x.clone();
                for i in 1..=d / 2 {
                    h = h.square().rem(self);
                    if !self.gcd(&h.add(&x)).is_one() {
                        return false;
                    }
                    let _ = i;
                }
                true
            }
        }
    }

    /// Irreducibility by trial division by every polynomial of degree up to half.
    pub fn is_irreducible_trial(&self) -> bool {
        let Some(d) = self.degree() else { return false };
        if d == 0 {
            return false;
        }
        let limit = 1u64 << (d / 2 + 1);
        (2..limit).all(|g| !Poly2::from_bits(g).divides(self))
    }

    pub fn evaluate_bit(&self, at: bool) -> bool {
        if at {
            self.exponents().len() % 2 == 1
        } else {
            self.coeff(0)
        }
    }
}

fn spread(v: u32) -> u64 {
    let mut x = v as u64;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555;
    x
}

impl Ord for Poly2 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words).rev() {
                match a.cmp(b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Poly2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .exponents()
            .into_iter()
            .rev()
            .map(|e| match e {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

impl fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly2({self})")
    }
}

impl FromStr for Poly2 {
    type Err = FieldError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| FieldError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        if compact == "0" {
            return Ok(Poly2::zero());
        }
        let mut p = Poly2::zero();
        for term in compact.split('+') {
            let exp = match term {
                "" => return Err(err("empty term")),
                "1" => 0,
                "x" => 1,
                t => {
                    let digits = t
                        .strip_prefix("x^")
                        .ok_or_else(|| err(&format!("bad term {t:?}")))?;
                    let digits = digits
                        .strip_prefix('{')
                        .and_then(|d| d.strip_suffix('}'))
                        .unwrap_or(digits);
                    digits
                        .parse::<usize>()
                        .map_err(|_| err(&format!("bad exponent in {t:?}")))?
                }
            };
            p.flip(exp);
        }
        Ok(p)
    }
}

impl Serialize for Poly2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Poly2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Irreducible factors with multiplicities, in canonical order.
pub fn poly_factor_gf2(p: &Poly2) -> Result<Vec<(Poly2, u32)>, FieldError> {
    if p.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6632_5f66_6163_746f);
    let mut out: Vec<(Poly2, u32)> = Vec::new();
    for (part, mult) in squarefree(p) {
        for (block, d) in distinct_degree(&part) {
            for factor in equal_degree(&block, d, &mut rng) {
                match out.iter_mut().find(|(f, _)| *f == factor) {
                    Some(entry) => entry.1 += mult,
                    None => out.push((factor, mult)),
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Product of a factor list, each raised to its multiplicity.
pub fn poly_product(factors: &[(Poly2, u32)]) -> Poly2 {
    let mut acc = Poly2::one();
    for (f, m) in factors {
        for _ in 0..*m {
            acc = acc.mul(f);
        }
    }
    acc
}

fn squarefree(f: &Poly2) -> Vec<(Poly2, u32)> {
    if f.degree() == Some(0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_exact(&c);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_exact(&y);
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w);
    }
    if !c.is_one() {
        for (g, m) in squarefree(&c.sqrt_even()) {
            out.push((g, 2 * m));
        }
    }
    out
}

fn distinct_degree(f: &Poly2) -> Vec<(Poly2, usize)> {
    let mut out = Vec::new();
    let x = Poly2::x();
    let mut g = f.clone();
    let mut h = x.rem(&g);
    let mut d = 1;
    while let Some(deg) = g.degree() {
        if deg < 2 * d {
            if deg > 0 {
                out.push((g.clone(), deg));
            }
            break;
        }
        h = h.square().rem(&g);
        let t = g.gcd(&h.add(&x));
        if !t.is_one() {
            g = g.div_exact(&t);
            h = h.rem(&g);
            out.push((t, d));
        }
        d += 1;
    }
    out
}

fn equal_degree(f: &Poly2, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly2> {
    let n = f.degree().unwrap_or(0);
    if n <= d {
        return vec![f.clone()];
    }
    loop {
        let words = n.div_ceil(64);
        let mut a = Poly2::from_words((0..words).map(|_| rng.gen()).collect());
        a = a.rem(f);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let mut trace = a.clone();
        let mut power = a;
        for _ in 1..d {
            power = power.square().rem(f);
            trace = trace.add(&power);
        }
        let g = f.gcd(&trace);
        let gd = g.degree().unwrap_or(0);
        if gd > 0 && gd < n {
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&f.div_exact(&g), d, rng));
            return out;
        }
    }
}

/// Default irreducible moduli for GF(2^k), k = 1..=16, as coefficient bits.
pub const DEFAULT_MODULI: [u32; 16] = [
    0b11,
    0b111,
    0b1011,
    0b1_0011,
    0b10_0101,
    0b100_0011,
    0b1000_0011,
    0b1_0001_1011,
    0b10_0001_0001,
    0b100_0000_1001,
    0b1000_0000_0101,
    0b1_0000_0101_0011,
    0b10_0000_0001_1011,
    0b100_0100_0100_0011,
    0b1000_0000_0000_0011,
    0b1_0001_0000_0000_1011,
];

/// GF(2^k) with an explicit irreducible modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BinaryField {
    degree: u32,
    modulus: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(pub u16);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfOp {
    Add,
    Mul,
    Inv,
    Pow,
}

/// Second operand of [`gf_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfOperand {
    Element(FieldElement),
    Integer(u64),
}

pub fn field_make(k: u32, modulus: Option<&Poly2>) -> Result<BinaryField, FieldError> {
    if !(1..=16).contains(&k) {
        return Err(FieldError::DegreeOutOfRange(k));
    }
    let modulus = match modulus {
        None => return Ok(BinaryField { degree: k, modulus: DEFAULT_MODULI[k as usize - 1] }),
        Some(m) => m,
    };
    let found = modulus.degree().unwrap_or(0);
    if found != k as usize {
        return Err(FieldError::DegreeMismatch { expected: k, found });
    }
    if !modulus.is_irreducible_trial() {
        return Err(FieldError::ReducibleModulus(modulus.to_string()));
    }
    Ok(BinaryField { degree: k, modulus: modulus.bits().unwrap_or(0) as u32 })
}

pub fn gf_arith(
    op: GfOp,
    a: FieldElement,
    b: GfOperand,
    field: &BinaryField,
) -> Result<FieldElement, FieldError> {
    match (op, b) {
        (GfOp::Add, GfOperand::Element(b)) => Ok(field.add(a, b)),
        (GfOp::Mul, GfOperand::Element(b)) => Ok(field.mul(a, b)),
        (GfOp::Inv, _) => field.inv(a),
        (GfOp::Pow, GfOperand::Integer(e)) => Ok(field.pow(a, e)),
        (GfOp::Pow, GfOperand::Element(b)) => Ok(field.pow(a, b.0 as u64)),
        (_, GfOperand::Integer(n)) => Ok(field.mul(a, field.element((n & 1) as u16))),
    }
}

impl BinaryField {
    pub fn gf2() -> Self {
        BinaryField { degree: 1, modulus: DEFAULT_MODULI[0] }
    }

    pub fn gf8() -> Self {
        BinaryField { degree: 3, modulus: DEFAULT_MODULI[2] }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn size(&self) -> u32 {
        1 << self.degree
    }

    pub fn modulus(&self) -> Poly2 {
        Poly2::from_bits(self.modulus as u64)
    }

    pub fn element(&self, bits: u16) -> FieldElement {
        assert!((bits as u32) < self.size(), "element {bits} not reduced in GF({})", self.size());
        FieldElement(bits)
    }

    /// The class of `x`, a generator of the multiplicative group for the default moduli.
    pub fn generator(&self) -> FieldElement {
        if self.degree == 1 {
            FieldElement(1)
        } else {
            FieldElement(2)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.size()).map(|v| FieldElement(v as u16))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (mut a, mut b) = (a.0 as u32, b.0 as u32);
        let mut r = 0u32;
        let top = 1u32 << self.degree;
        while b != 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        FieldElement(r as u16)
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, self.size() as u64 - 2))
    }

    pub fn multiplicative_order(&self, a: FieldElement) -> Option<u64> {
        if a.0 == 0 {
            return None;
        }
        let mut x = a;
        let mut n = 1;
        while x.0 != 1 {
            x = self.mul(x, a);
            n += 1;
        }
        Some(n)
    }

    /// Roots in this field of a polynomial over GF(2).
    pub fn roots_of(&self, p: &Poly2) -> Vec<FieldElement> {
        self.elements()
            .filter(|&z| {
                let mut acc = FieldElement(0);
                for e in p.exponents() {
                    acc = self.add(acc, self.pow(z, e as u64));
                }
                acc.0 == 0
            })
            .collect()
    }
}

/// Coefficient field of a matrix: a binary field, or a small prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Binary(BinaryField),
    Prime(u16),
}

impl Field {
    pub fn gf2() -> Self {
        Field::Binary(BinaryField::gf2())
    }

    /// The field with `q` elements, using default moduli for powers of two.
    pub fn from_order(q: u32) -> Result<Self, FieldError> {
        if q >= 2 && q.is_power_of_two() && q <= 1 << 16 {
            return Ok(Field::Binary(field_make(q.trailing_zeros(), None)?));
        }
        if (3..256).contains(&q) && (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0) {
            return Ok(Field::Prime(q as u16));
        }
        Err(FieldError::UnsupportedOrder(q))
    }

    pub fn order(&self) -> u32 {
        match self {
            Field::Binary(f) => f.size(),
            Field::Prime(p) => *p as u32,
        }
    }

    pub fn is_gf2(&self) -> bool {
        self.order() == 2
    }

    pub fn binary(&self) -> Option<&BinaryField> {
        match self {
            Field::Binary(f) => Some(f),
            Field::Prime(_) => None,
        }
    }

    pub fn add(&self, a: u16, b: u16) -> u16 {
        match self {
            Field::Binary(_) => a ^ b,
            Field::Prime(p) => ((a as u32 + b as u32) % *p as u32) as u16,
        }
    }

    pub fn neg(&self, a: u16) -> u16 {
        match self {
            Field::Binary(_) => a,
            Field::Prime(p) => ((*p - a) % *p) as u16,
        }
    }

    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        match self {
            Field::Binary(f) => f.mul(FieldElement(a), FieldElement(b)).0,
            Field::Prime(p) => ((a as u32 * b as u32) % *p as u32) as u16,
        }
    }

    pub fn inv(&self, a: u16) -> Result<u16, FieldError> {
        match self {
            Field::Binary(f) => f.inv(FieldElement(a)).map(|e| e.0),
            Field::Prime(p) => {
                if a == 0 {
                    return Err(FieldError::DivisionByZero);
                }
                let (p, mut base, mut e, mut acc) = (*p as u32, a as u32, *p as u32 - 2, 1u32);
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc * base % p;
                    }
                    base = base * base % p;
                    e >>= 1;
                }
                Ok(acc as u16)
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.order())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly2 {
        s.parse().unwrap()
    }

    #[test]
    fn default_moduli_are_irreducible() {
        for (i, &m) in DEFAULT_MODULI.iter().enumerate() {
            let poly = Poly2::from_bits(m as u64);
            assert_eq!(poly.degree(), Some(i + 1));
            assert!(poly.is_irreducible_trial(), "{poly}");
        }
    }

    #[test]
    fn gf8_examples() {
        let f = field_make(3, Some(&p("x^3+x+1"))).unwrap();
        let g = f.generator();
        assert_eq!(f.mul(g, f.mul(g, g)), FieldElement(0b011));
        assert_eq!(f.inv(FieldElement(1)).unwrap(), FieldElement(1));
        assert_eq!(f.pow(g, 7), FieldElement(1));
        assert_eq!(f.inv(FieldElement(0)), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn field_make_rejects_bad_moduli() {
        assert!(matches!(
            field_make(3, Some(&p("x^3+x^2+x+1"))),
            Err(FieldError::ReducibleModulus(_))
        ));
        assert!(matches!(
            field_make(3, Some(&p("x^4+x+1"))),
            Err(FieldError::DegreeMismatch { .. })
        ));
        assert!(field_make(17, None).is_err());
        assert_eq!(field_make(1, None).unwrap().size(), 2);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["x^6+x^5+x^4+x^3+x^2+x+1", "x", "1", "0", "x^100+x^64+x^63+1"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("1 + x + x^3").to_string(), "x^3+x+1");
        assert_eq!(p("x+x").to_string(), "0");
        assert!("x^".parse::<Poly2>().is_err());
        assert!("y+1".parse::<Poly2>().is_err());
    }

    #[test]
    fn factor_examples() {
        let phi7 = p("x^6+x^5+x^4+x^3+x^2+x+1");
        let factors = poly_factor_gf2(&phi7).unwrap();
        assert_eq!(factors, vec![(p("x^3+x+1"), 1), (p("x^3+x^2+1"), 1)]);
        assert_eq!(poly_factor_gf2(&p("x^2+1")).unwrap(), vec![(p("x+1"), 2)]);
        assert_eq!(poly_factor_gf2(&p("x^4+x+1")).unwrap(), vec![(p("x^4+x+1"), 1)]);
        assert_eq!(poly_factor_gf2(&Poly2::zero()), Err(FieldError::ZeroPolynomial));
        assert!(poly_factor_gf2(&Poly2::one()).unwrap().is_empty());
    }

    #[test]
    fn factor_high_multiplicity_and_large_degree() {
        let f = p("x^3+x+1");
        let g = p("x^2+x+1");
        let big = p("x^67+x^5+x^2+x+1");
        let input = poly_product(&[(f.clone(), 5), (g.clone(), 3), (Poly2::x(), 2), (big.clone(), 1)]);
        let factors = poly_factor_gf2(&input).unwrap();
        assert_eq!(poly_product(&factors), input);
        for (factor, _) in &factors {
            assert!(factor.is_irreducible());
        }
    }

    #[test]
    fn square_matches_mul() {
        let a = p("x^70+x^33+x^5+1");
        assert_eq!(a.square(), a.mul(&a));
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::from_order(7).unwrap();
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3).unwrap(), 5);
        assert_eq!(f.neg(2), 5);
        assert!(Field::from_order(9).is_err());
        assert_eq!(Field::from_order(8).unwrap(), Field::Binary(BinaryField::gf8()));
    }
}
