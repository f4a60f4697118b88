//! Dense matrices over small finite fields.
//!
//! Vectors are rows and matrices act on the right: `v -> vM`.  Over GF(2)
//! each row is packed into 64-bit words and products use the method of four
//! Russians with 8-bit tables.

use std::collections::HashMap;
use std::fmt;

use num_prime::nt_funcs::factorize64;
use thiserror::Error;

use crate::fields::{poly_factor_gf2, BinaryField, Field, FieldElement, Poly2};
use crate::group::{GroupElement, DEFAULT_ORDER_BOUND};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("matrix is not square ({0}x{1})")]
    NonSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("element order exceeds bound {0}")]
    OrderExceedsBound(u64),
    #[error("element has nonzero fixed vectors")]
    NotFixedPointFree,
    #[error("minimal polynomial {0} does not divide x^7+1")]
    WrongOrder(Poly2),
    #[error("subspace is not invariant under the matrix")]
    NotInvariant,
    #[error("action on the subspace is not scalar over GF(8): minimal polynomial {0}")]
    NotScalarizable(Poly2),
    #[error("matrix does not commute with the scalar action")]
    NotCommuting,
    #[error("operation needs a matrix over GF(2^k), got {0}")]
    UnsupportedField(Field),
    #[error("entry {value} out of range for {field}")]
    EntryOutOfRange { value: u16, field: Field },
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Storage {
    Bits { stride: usize, words: Vec<u64> },
    Wide(Vec<u16>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DenseMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Storage,
}

fn stride_for(cols: usize) -> usize {
    cols.div_ceil(64).max(1)
}

impl DenseMatrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Self {
        let data = if field.is_gf2() {
            let stride = stride_for(cols);
            Storage::Bits { stride, words: vec![0; rows * stride] }
        } else {
            Storage::Wide(vec![0; rows * cols])
        };
        DenseMatrix { field, rows, cols, data }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn scalar(field: Field, n: usize, value: u16) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, value);
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vec<u16>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zero(field, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v as u32 >= field.order() {
                    return Err(LinalgError::EntryOutOfRange { value: v, field });
                }
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    /// Permutation matrix sending basis vector `i` to `images[i]`.
    pub fn permutation(field: Field, images: &[usize]) -> Self {
        let mut m = Self::zero(field, images.len(), images.len());
        for (i, &j) in images.iter().enumerate() {
            m.set(i, j, 1);
        }
        m
    }

    /// Companion matrix of a monic polynomial over GF(2): `e_i -> e_{i+1}`.
    pub fn companion(p: &Poly2) -> Self {
        let d = p.degree().expect("companion of the zero polynomial");
        let mut m = Self::zero(Field::gf2(), d, d);
        for i in 0..d.saturating_sub(1) {
            m.set(i, i + 1, 1);
        }
        for j in 0..d {
            if p.coeff(j) {
                m.set(d - 1, j, 1);
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u16 {
        assert!(i < self.rows && j < self.cols);
        match &self.data {
            Storage::Bits { stride, words } => ((words[i * stride + j / 64] >> (j % 64)) & 1) as u16,
            Storage::Wide(v) => v[i * self.cols + j],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: u16) {
        assert!(i < self.rows && j < self.cols);
        let cols = self.cols;
        match &mut self.data {
            Storage::Bits { stride, words } => {
                let w = &mut words[i * *stride + j / 64];
                let bit = 1u64 << (j % 64);
                if value & 1 == 1 {
                    *w |= bit;
                } else {
                    *w &= !bit;
                }
            }
            Storage::Wide(v) => v[i * cols + j] = value,
        }
    }

    pub fn row(&self, i: usize) -> Vec<u16> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u16>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn row_matrix(&self, i: usize) -> DenseMatrix {
        self.select_rows(&[i])
    }

    pub fn select_rows(&self, idx: &[usize]) -> DenseMatrix {
        let mut out = Self::zero(self.field, idx.len(), self.cols);
        for (r, &i) in idx.iter().enumerate() {
            out.copy_row_from(r, self, i);
        }
        out
    }

    fn copy_row_from(&mut self, dst: usize, src: &DenseMatrix, i: usize) {
        match (&mut self.data, &src.data) {
            (Storage::Bits { stride, words }, Storage::Bits { words: sw, .. }) => {
                let s = *stride;
                words[dst * s..(dst + 1) * s].copy_from_slice(&sw[i * s..(i + 1) * s]);
            }
            (Storage::Wide(v), Storage::Wide(sv)) => {
                let c = src.cols;
                v[dst * c..(dst + 1) * c].copy_from_slice(&sv[i * c..(i + 1) * c]);
            }
            _ => unreachable!("storage kinds agree for one field"),
        }
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "stacking {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut out = Self::zero(self.field, self.rows + other.rows, self.cols);
        for i in 0..self.rows {
            out.copy_row_from(i, self, i);
        }
        for i in 0..other.rows {
            out.copy_row_from(self.rows + i, other, i);
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Storage::Bits { words, .. } => words.iter().all(|&w| w == 0),
            Storage::Wide(v) => v.iter().all(|&x| x == 0),
        }
    }

    pub fn is_identity_matrix(&self) -> bool {
        self.is_square() && *self == Self::identity(self.field, self.rows)
    }

    fn check_field(&self, other: &DenseMatrix) -> Result<(), LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch(self.field, other.field));
        }
        Ok(())
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::ShapeMismatch("addition".into()));
        }
        let data = match (&self.data, &other.data) {
            (Storage::Bits { stride, words }, Storage::Bits { words: ow, .. }) => Storage::Bits {
                stride: *stride,
                words: words.iter().zip(ow).map(|(a, b)| a ^ b).collect(),
            },
            (Storage::Wide(a), Storage::Wide(b)) => {
                Storage::Wide(a.iter().zip(b).map(|(&x, &y)| self.field.add(x, y)).collect())
            }
            _ => unreachable!(),
        };
        Ok(DenseMatrix { data, ..*self })
    }

    pub fn scale(&self, c: u16) -> DenseMatrix {
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.field.mul(c, self.get(i, j)));
            }
        }
        out
    }

    pub fn neg(&self) -> DenseMatrix {
        self.scale(self.field.neg(1))
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = Self::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn trace(&self) -> u16 {
        (0..self.rows.min(self.cols)).fold(0, |acc, i| self.field.add(acc, self.get(i, i)))
    }

    /// Reduced row echelon form; returns the nonzero rows and pivot columns.
    pub fn echelon(&self) -> (DenseMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.reduce_in_place(self.cols);
        let rank = pivots.len();
        (m.select_rows(&(0..rank).collect::<Vec<_>>()), pivots)
    }

    /// Gauss-Jordan on the first `limit` columns; returns pivot columns.
    fn reduce_in_place(&mut self, limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self.field.inv(self.get(r, c)).expect("pivot is nonzero");
            if inv != 1 {
                self.scale_row(r, inv);
            }
            for i in 0..self.rows {
                if i != r {
                    let f = self.get(i, c);
                    if f != 0 {
                        self.axpy_row(i, r, self.field.neg(f));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let cols = self.cols;
        match &mut self.data {
            Storage::Bits { stride, words } => {
                for k in 0..*stride {
                    words.swap(a * *stride + k, b * *stride + k);
                }
            }
            Storage::Wide(v) => {
                for k in 0..cols {
                    v.swap(a * cols + k, b * cols + k);
                }
            }
        }
    }

    fn scale_row(&mut self, i: usize, c: u16) {
        for j in 0..self.cols {
            let v = self.field.mul(c, self.get(i, j));
            self.set(i, j, v);
        }
    }

    /// row[dst] += c * row[src]
    fn axpy_row(&mut self, dst: usize, src: usize, c: u16) {
        let cols = self.cols;
        let field = self.field;
        match &mut self.data {
            Storage::Bits { stride, words } => {
                let s = *stride;
                for k in 0..s {
                    let w = words[src * s + k];
                    words[dst * s + k] ^= w;
                }
            }
            Storage::Wide(v) => {
                for k in 0..cols {
                    let add = field.mul(c, v[src * cols + k]);
                    v[dst * cols + k] = field.add(v[dst * cols + k], add);
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.reduce_in_place(self.cols).len()
    }

    pub fn mat_mul(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(match (&self.data, &other.data) {
            (Storage::Bits { stride: sa, words: wa }, Storage::Bits { stride: sb, words: wb }) => {
                let words = mul_four_russians(wa, *sa, self.rows, self.cols, wb, *sb);
                DenseMatrix {
                    field: self.field,
                    rows: self.rows,
                    cols: other.cols,
                    data: Storage::Bits { stride: *sb, words },
                }
            }
            (Storage::Wide(a), Storage::Wide(b)) => {
                let (n, k, m) = (self.rows, self.cols, other.cols);
                let mut out = vec![0u16; n * m];
                for i in 0..n {
                    for t in 0..k {
                        let x = a[i * k + t];
                        if x == 0 {
                            continue;
                        }
                        for j in 0..m {
                            let y = b[t * m + j];
                            if y != 0 {
                                let cell = &mut out[i * m + j];
                                *cell = self.field.add(*cell, self.field.mul(x, y));
                            }
                        }
                    }
                }
                DenseMatrix { field: self.field, rows: n, cols: m, data: Storage::Wide(out) }
            }
            _ => unreachable!(),
        })
    }

    pub fn mat_inv(&self) -> Result<DenseMatrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NonSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut aug = Self::zero(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let pivots = aug.reduce_in_place(n);
        if pivots.len() < n {
            return Err(LinalgError::Singular);
        }
        let mut out = Self::zero(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j));
            }
        }
        Ok(out)
    }

    pub fn mat_pow(&self, e: i64) -> Result<DenseMatrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NonSquare(self.rows, self.cols));
        }
        let base = if e < 0 { self.mat_inv()? } else { self.clone() };
        Ok(GroupElement::pow(&base, e.abs()))
    }

    /// Over GF(2^k): the same matrix read over GF(2^k) viewed as a kn x kn matrix over GF(2).
    pub fn expand_to_gf2(&self) -> Result<DenseMatrix, LinalgError> {
        let f = *self.field.binary().ok_or(LinalgError::UnsupportedField(self.field))?;
        let k = f.degree() as usize;
        if k == 1 {
            return Ok(self.clone());
        }
        let mut out = Self::zero(Field::gf2(), self.rows * k, self.cols * k);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let m = FieldElement(self.get(i, j));
                if m.0 == 0 {
                    continue;
                }
                for s in 0..k {
                    let prod = f.mul(FieldElement(1 << s), m).0;
                    for t in 0..k {
                        if (prod >> t) & 1 == 1 {
                            out.set(i * k + s, j * k + t, 1);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Nonzero entries of a single-row matrix.
    pub fn support(&self) -> Vec<usize> {
        (0..self.cols).filter(|&j| self.get(0, j) != 0).collect()
    }
}

fn mul_four_russians(
    a: &[u64],
    sa: usize,
    rows: usize,
    inner: usize,
    b: &[u64],
    sb: usize,
) -> Vec<u64> {
    let mut out = vec![0u64; rows * sb];
    if rows == 1 || inner < 16 {
        for i in 0..rows {
            for t in 0..inner {
                if (a[i * sa + t / 64] >> (t % 64)) & 1 == 1 {
                    for k in 0..sb {
                        out[i * sb + k] ^= b[t * sb + k];
                    }
                }
            }
        }
        return out;
    }
    let mut table = vec![0u64; 256 * sb];
    for start in (0..inner).step_by(8) {
        let width = (inner - start).min(8);
        for idx in 1usize..(1 << width) {
            let low = idx.trailing_zeros() as usize;
            let prev = idx & (idx - 1);
            for k in 0..sb {
                table[idx * sb + k] = table[prev * sb + k] ^ b[(start + low) * sb + k];
            }
        }
        let (w, off) = (start / 64, start % 64);
        let mask = (1u64 << width) - 1;
        for i in 0..rows {
            let byte = ((a[i * sa + w] >> off) & mask) as usize;
            if byte != 0 {
                for k in 0..sb {
                    out[i * sb + k] ^= table[byte * sb + k];
                }
            }
        }
    }
    out
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  {}", row.join(if self.field.order() > 9 { " " } else { "" }))?;
        }
        Ok(())
    }
}

impl GroupElement for DenseMatrix {
    fn op(&self, other: &Self) -> Self {
        self.mat_mul(other).expect("matrices share shape and field")
    }

    fn inverse(&self) -> Self {
        self.mat_inv().expect("group elements are invertible")
    }

    fn identity_like(&self) -> Self {
        DenseMatrix::identity(self.field, self.rows)
    }

    fn is_identity(&self) -> bool {
        self.is_identity_matrix()
    }

    fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = format!("{} {} {}\n", self.field.order(), self.rows, self.cols).into_bytes();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.extend_from_slice(&self.get(i, j).to_le_bytes());
            }
        }
        out
    }

    fn order(&self, bound: u64) -> Option<u64> {
        element_order(self, bound).ok()
    }
}

/// Echelonized subspace of a row space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    basis: DenseMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn from_span(field: Field, ambient: usize, rows: &DenseMatrix) -> Subspace {
        assert_eq!(rows.cols(), ambient);
        assert_eq!(rows.field(), field);
        let (basis, pivots) = rows.echelon();
        Subspace { basis, pivots }
    }

    pub fn zero(field: Field, ambient: usize) -> Subspace {
        Subspace { basis: DenseMatrix::zero(field, 0, ambient), pivots: Vec::new() }
    }

    pub fn full(field: Field, ambient: usize) -> Subspace {
        Self::from_span(field, ambient, &DenseMatrix::identity(field, ambient))
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &DenseMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of a row vector in the echelon basis, if it lies in the span.
    pub fn coordinates(&self, v: &DenseMatrix) -> Option<Vec<u16>> {
        let coords: Vec<u16> = self.pivots.iter().map(|&p| v.get(0, p)).collect();
        let mut recon = DenseMatrix::zero(self.basis.field(), 1, self.dim());
        for (k, &c) in coords.iter().enumerate() {
            recon.set(0, k, c);
        }
        let back = recon.mat_mul(&self.basis).ok()?;
        (back == *v).then_some(coords)
    }

    pub fn contains(&self, v: &DenseMatrix) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_invariant(&self, m: &DenseMatrix) -> bool {
        match self.basis.mat_mul(m) {
            Ok(images) => (0..images.rows()).all(|i| self.contains(&images.row_matrix(i))),
            Err(_) => false,
        }
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let stacked = self.basis.stack(&other.basis).expect("same ambient space");
        Subspace::from_span(self.basis.field(), self.ambient(), &stacked)
    }

    pub fn intersection_dim(&self, other: &Subspace) -> usize {
        self.dim() + other.dim() - self.sum(other).dim()
    }
}

/// Left nullspace `{v : vA = 0}`.
pub fn nullspace(a: &DenseMatrix) -> Subspace {
    let (n, m) = (a.rows(), a.cols());
    let mut aug = DenseMatrix::zero(a.field(), n, m + n);
    for i in 0..n {
        for j in 0..m {
            aug.set(i, j, a.get(i, j));
        }
        aug.set(i, m + i, 1);
    }
    let rank = aug.reduce_in_place(m).len();
    let mut kernel = DenseMatrix::zero(a.field(), n - rank, n);
    for (r, i) in (rank..n).enumerate() {
        for j in 0..n {
            kernel.set(r, j, aug.get(i, m + j));
        }
    }
    Subspace::from_span(a.field(), n, &kernel)
}

/// `p(M)` by Horner evaluation.
pub fn poly_eval_at_matrix(p: &Poly2, m: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NonSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    let ident = DenseMatrix::identity(m.field(), n);
    let mut acc = DenseMatrix::zero(m.field(), n, n);
    let Some(d) = p.degree() else { return Ok(acc) };
    for i in (0..=d).rev() {
        acc = acc.mat_mul(m)?;
        if p.coeff(i) {
            acc = acc.add(&ident)?;
        }
    }
    Ok(acc)
}

fn vec_poly_eval(p: &Poly2, v: &DenseMatrix, m: &DenseMatrix) -> DenseMatrix {
    let mut acc = DenseMatrix::zero(v.field(), 1, v.cols());
    let Some(d) = p.degree() else { return acc };
    for i in (0..=d).rev() {
        acc = acc.mat_mul(m).expect("shapes agree");
        if p.coeff(i) {
            acc = acc.add(v).expect("shapes agree");
        }
    }
    acc
}

/// Minimal polynomial over GF(2) of the GF(2)-linear map `v -> vM`.
///
/// For matrices over GF(2^k) this is the minimal polynomial of the
/// `kn x kn` expansion.
pub fn min_poly(m: &DenseMatrix) -> Result<Poly2, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NonSquare(m.rows(), m.cols()));
    }
    let m = m.expand_to_gf2()?;
    let n = m.rows();
    let mut acc = Poly2::one();
    for i in 0..n {
        let mut e = DenseMatrix::zero(Field::gf2(), 1, n);
        e.set(0, i, 1);
        if vec_poly_eval(&acc, &e, &m).is_zero() {
            continue;
        }
        acc = acc.lcm(&vector_annihilator(&e, &m));
    }
    Ok(acc)
}

/// Least-degree monic polynomial `p` with `v p(M) = 0`, over GF(2).
fn vector_annihilator(v: &DenseMatrix, m: &DenseMatrix) -> Poly2 {
    // echelon rows paired with the Krylov combination each one represents
    let mut rows: Vec<(usize, DenseMatrix, Poly2)> = Vec::new();
    let mut w = v.clone();
    for k in 0..=m.rows() {
        let mut cur = w.clone();
        let mut comb = Poly2::monomial(k);
        for (pivot, row, rc) in &rows {
            if cur.get(0, *pivot) != 0 {
                cur = cur.add(row).expect("same shape");
                comb = comb.add(rc);
            }
        }
        match cur.support().first() {
            None => return comb,
            Some(&p) => rows.push((p, cur, comb)),
        }
        w = w.mat_mul(m).expect("square");
    }
    unreachable!("Krylov sequence becomes dependent within n+1 steps")
}

fn check_bound(n: u64, max: u64) -> Result<u64, LinalgError> {
    if n > max {
        Err(LinalgError::OrderExceedsBound(max))
    } else {
        Ok(n)
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

fn lcm_u64(a: u64, b: u64) -> Option<u64> {
    (a / gcd_u64(a, b)).checked_mul(b)
}

/// Multiplicative order of `x` modulo an irreducible `f` other than `x`.
pub fn order_of_x_mod(f: &Poly2, max: u64) -> Result<u64, LinalgError> {
    let d = f.degree().expect("nonzero");
    let x = Poly2::x();
    if d <= 64 {
        let n: u64 = if d == 64 { u64::MAX } else { (1u64 << d) - 1 };
        let mut ord = n;
        for (p, _) in factorize64(n) {
            while ord % p == 0 && x.powmod((ord / p) as u128, f).is_one() {
                ord /= p;
            }
        }
        return check_bound(ord, max);
    }
    // baby-step giant-step over the bound
    let step = (max as f64).sqrt().ceil() as u64 + 1;
    let mut baby = HashMap::new();
    let mut cur = Poly2::one();
    for j in 0..step {
        baby.entry(cur.clone()).or_insert(j);
        cur = cur.mulmod(&x, f);
    }
    let giant = x.powmod(step as u128, f);
    let mut g = giant.clone();
    for i in 1..=step {
        // x^(i*step) = x^j  =>  order divides i*step - j
        if let Some(&j) = baby.get(&g) {
            let mut ord = i * step - j;
            for (p, _) in factorize64(ord) {
                while ord % p == 0 && x.powmod((ord / p) as u128, f).is_one() {
                    ord /= p;
                }
            }
            return check_bound(ord, max);
        }
        g = g.mulmod(&giant, f);
    }
    Err(LinalgError::OrderExceedsBound(max))
}

/// Order of an invertible matrix.
pub fn element_order(m: &DenseMatrix, max: u64) -> Result<u64, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NonSquare(m.rows(), m.cols()));
    }
    if m.field().binary().is_none() {
        return order_by_iteration(m, max);
    }
    let mp = min_poly(m)?;
    if mp.coeff(0) == false {
        return Err(LinalgError::Singular);
    }
    let factors = poly_factor_gf2(&mp).expect("minimal polynomial is nonzero");
    let mut ord = 1u64;
    let mut top_mult = 1u32;
    for (f, e) in &factors {
        let o = if f.degree() == Some(1) { 1 } else { order_of_x_mod(f, max)? };
        ord = lcm_u64(ord, o).ok_or(LinalgError::OrderExceedsBound(max))?;
        top_mult = top_mult.max(*e);
    }
    let two_part = top_mult.next_power_of_two() as u64;
    check_bound(ord.checked_mul(two_part).ok_or(LinalgError::OrderExceedsBound(max))?, max)
}

fn order_by_iteration(m: &DenseMatrix, max: u64) -> Result<u64, LinalgError> {
    if m.rank() < m.rows() {
        return Err(LinalgError::Singular);
    }
    let mut n = 1u64;
    let mut p = m.clone();
    while !p.is_identity_matrix() {
        n += 1;
        if n > max {
            return Err(LinalgError::OrderExceedsBound(max));
        }
        p = p.mat_mul(m)?;
    }
    Ok(n)
}

/// The two homogeneous components of a fixed-point-free element of order 7,
/// nullspaces of `x^3+x^2+1` and `x^3+x+1` evaluated at `M`, in that order.
pub fn split_homogeneous(m: &DenseMatrix) -> Result<(Subspace, Subspace), LinalgError> {
    if !m.field().is_gf2() {
        return Err(LinalgError::UnsupportedField(m.field()));
    }
    let mp = min_poly(m)?;
    let x_plus_1 = Poly2::from_bits(0b11);
    if x_plus_1.divides(&mp) {
        return Err(LinalgError::NotFixedPointFree);
    }
    let x7_plus_1 = Poly2::from_bits(0b1000_0001);
    if !mp.divides(&x7_plus_1) {
        return Err(LinalgError::WrongOrder(mp));
    }
    let first = nullspace(&poly_eval_at_matrix(&Poly2::from_bits(0b1101), m)?);
    let second = nullspace(&poly_eval_at_matrix(&Poly2::from_bits(0b1011), m)?);
    Ok((first, second))
}

/// A component of GF(2)^n viewed as GF(8)^d, on which an order-7 matrix is scalar.
#[derive(Clone, Debug)]
pub struct Gf8Structure {
    component: Subspace,
    cyclic_basis: DenseMatrix,
    basis_inverse: DenseMatrix,
    order7: DenseMatrix,
    scalar: FieldElement,
    cubic: Poly2,
}

impl Gf8Structure {
    pub fn field(&self) -> BinaryField {
        BinaryField::gf8()
    }

    pub fn dim(&self) -> usize {
        self.component.dim() / 3
    }

    pub fn scalar(&self) -> FieldElement {
        self.scalar
    }

    pub fn cubic(&self) -> &Poly2 {
        &self.cubic
    }

    pub fn component(&self) -> &Subspace {
        &self.component
    }

    /// Rows `v_j, v_j M, v_j M^2` for `j = 1..d`.
    pub fn cyclic_basis(&self) -> &DenseMatrix {
        &self.cyclic_basis
    }

    /// GF(8) coordinates of a vector in the component.
    pub fn coordinates(&self, v: &DenseMatrix) -> Result<Vec<FieldElement>, LinalgError> {
        let echelon = self.component.coordinates(v).ok_or(LinalgError::NotInvariant)?;
        let mut row = DenseMatrix::zero(Field::gf2(), 1, echelon.len());
        for (k, &c) in echelon.iter().enumerate() {
            row.set(0, k, c);
        }
        let c = row.mat_mul(&self.basis_inverse)?;
        let f = self.field();
        Ok((0..self.dim())
            .map(|j| {
                (0..3).fold(FieldElement(0), |acc, e| {
                    if c.get(0, 3 * j + e) == 1 {
                        f.add(acc, f.pow(self.scalar, e as u64))
                    } else {
                        acc
                    }
                })
            })
            .collect())
    }

    /// The d x d GF(8) matrix of a GF(2) matrix preserving the component and
    /// commuting with the order-7 element on it.
    pub fn restrict(&self, a: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        let basis = self.component.basis();
        let lhs = basis.mat_mul(a)?.mat_mul(&self.order7)?;
        let rhs = basis.mat_mul(&self.order7)?.mat_mul(a)?;
        if lhs != rhs {
            return Err(LinalgError::NotCommuting);
        }
        let gf8 = Field::Binary(self.field());
        let mut out = DenseMatrix::zero(gf8, self.dim(), self.dim());
        for j in 0..self.dim() {
            let image = self.cyclic_basis.row_matrix(3 * j).mat_mul(a)?;
            for (k, c) in self.coordinates(&image)?.into_iter().enumerate() {
                out.set(j, k, c.0);
            }
        }
        Ok(out)
    }
}

/// Identify an `M`-invariant component as a GF(8)-space with `M` acting as a scalar.
pub fn rebase_as_gf8(m: &DenseMatrix, component: &Subspace) -> Result<Gf8Structure, LinalgError> {
    if !m.field().is_gf2() {
        return Err(LinalgError::UnsupportedField(m.field()));
    }
    if !component.is_invariant(m) {
        return Err(LinalgError::NotInvariant);
    }
    let basis = component.basis();
    let images = basis.mat_mul(m)?;
    let k = component.dim();
    let mut restricted = DenseMatrix::zero(Field::gf2(), k, k);
    for i in 0..k {
        let coords = component.coordinates(&images.row_matrix(i)).ok_or(LinalgError::NotInvariant)?;
        for (j, c) in coords.into_iter().enumerate() {
            restricted.set(i, j, c);
        }
    }
    let cubic = min_poly(&restricted)?;
    if cubic.degree() != Some(3) || !cubic.is_irreducible() {
        return Err(LinalgError::NotScalarizable(cubic));
    }
    let gf8 = BinaryField::gf8();
    let scalar = *gf8.roots_of(&cubic).iter().min().expect("irreducible cubic has roots in GF(8)");

    let mut cyclic = Subspace::zero(Field::gf2(), m.rows());
    let mut rows: Vec<DenseMatrix> = Vec::new();
    for i in 0..k {
        let v = basis.row_matrix(i);
        if cyclic.contains(&v) {
            continue;
        }
        let v1 = v.mat_mul(m)?;
        let v2 = v1.mat_mul(m)?;
        let block = v.stack(&v1)?.stack(&v2)?;
        cyclic = cyclic.sum(&Subspace::from_span(Field::gf2(), m.rows(), &block));
        rows.extend([v, v1, v2]);
    }
    let mut cyclic_basis = DenseMatrix::zero(Field::gf2(), rows.len(), m.rows());
    for (r, row) in rows.iter().enumerate() {
        for j in 0..m.rows() {
            cyclic_basis.set(r, j, row.get(0, j));
        }
    }
    let mut change = DenseMatrix::zero(Field::gf2(), k, k);
    for r in 0..k {
        for (c, &p) in component.pivots().iter().enumerate() {
            change.set(r, c, cyclic_basis.get(r, p));
        }
    }
    let basis_inverse = change.mat_inv()?;
    let structure = Gf8Structure {
        component: component.clone(),
        cyclic_basis,
        basis_inverse,
        order7: m.clone(),
        scalar,
        cubic,
    };
    let image = structure.restrict(m)?;
    let expected = DenseMatrix::scalar(Field::Binary(gf8), structure.dim(), scalar.0);
    debug_assert_eq!(image, expected);
    if image != expected {
        return Err(LinalgError::NotScalarizable(structure.cubic.clone()));
    }
    Ok(structure)
}

/// Read a GF(2) matrix as a matrix over a binary extension field.
pub fn extend_field(m: &DenseMatrix, target: BinaryField) -> Result<DenseMatrix, LinalgError> {
    if !m.field().is_gf2() {
        return Err(LinalgError::UnsupportedField(m.field()));
    }
    let mut out = DenseMatrix::zero(Field::Binary(target), m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, m.get(i, j));
        }
    }
    Ok(out)
}

/// Default order bound re-exported for callers of [`element_order`].
pub const ORDER_BOUND: u64 = DEFAULT_ORDER_BOUND;
