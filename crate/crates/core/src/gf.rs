//! Arithmetic in GF(2^p) and the label groups acting on it.
//!
//! A symbol is identified with the integer whose binary decomposition gives
//! its constituent bits: bit `i` of the integer is `b_i`. Two label groups are
//! supported: the nonzero field elements acting by field multiplication, and
//! invertible `p x p` binary matrices acting on the bit vector.

use std::fmt;
use std::ops::{Add, BitXor};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_P: u8 = 8;

/// Largest extension degree for which the matrix group is enumerated.
pub const MAX_MATRIX_ENUM_P: u8 = 4;

/// An element of GF(2^p), stored as its bit vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol(pub u8);

impl Symbol {
    pub const ZERO: Symbol = Symbol(0);
    pub const ONE: Symbol = Symbol(1);

    #[inline]
    pub fn value(self) -> u8 {
        self.0
    }

    /// Constituent bit `b_i`.
    #[inline]
    pub fn bit(self, i: u8) -> bool {
        (self.0 >> i) & 1 == 1
    }
}

impl Add for Symbol {
    type Output = Symbol;

    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Symbol) -> Symbol {
        Symbol(self.0 ^ rhs.0)
    }
}

impl BitXor for Symbol {
    type Output = Symbol;

    #[inline]
    fn bitxor(self, rhs: Symbol) -> Symbol {
        Symbol(self.0 ^ rhs.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which label group a code uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    /// Nonzero field elements acting by field multiplication.
    Field,
    /// Invertible binary matrices acting on the constituent bits.
    Matrix,
}

impl GroupKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupKind::Field => "field",
            GroupKind::Matrix => "matrix",
        }
    }
}

impl std::str::FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "field" => Ok(GroupKind::Field),
            "matrix" => Ok(GroupKind::Matrix),
            other => Err(Error::Invalid(format!("unknown group kind `{other}` (expected `field` or `matrix`)"))),
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Multiply two polynomials over GF(2) and reduce modulo `poly` (degree `p`).
fn poly_mulmod(mut a: u16, mut b: u16, poly: u16, p: u8) -> u16 {
    let mut acc = 0u16;
    let top = 1u16 << p;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= poly;
        }
    }
    acc
}

fn poly_degree(a: u32) -> i32 {
    31 - a.leading_zeros() as i32
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Irreducibility over GF(2) by trial division with every polynomial of degree
/// at most half the degree of `poly`.
pub fn is_irreducible(poly: u16) -> bool {
    let poly = poly as u32;
    let deg = poly_degree(poly);
    if deg < 1 {
        return false;
    }
    for d in 1..=deg / 2 {
        for low in 0..(1u32 << d) {
            let divisor = (1u32 << d) | low;
            if poly_rem(poly, divisor) == 0 {
                return false;
            }
        }
    }
    true
}

/// The lexicographically smallest irreducible polynomial of degree `p`.
pub fn default_polynomial(p: u8) -> u16 {
    let top = 1u16 << p;
    (0..top)
        .map(|low| top | low)
        .find(|&poly| is_irreducible(poly))
        .expect("an irreducible polynomial exists for every degree")
}

/// Extension degree plus reduction polynomial (including the `x^p` term).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    p: u8,
    poly: u16,
}

impl FieldSpec {
    /// Field with the default reduction polynomial for `p`.
    pub fn new(p: u8) -> Result<Self> {
        if p == 0 || p > MAX_P {
            return Err(Error::Field(format!("extension degree must be in 1..={MAX_P}, got {p}")));
        }
        Ok(FieldSpec { p, poly: default_polynomial(p) })
    }

    pub fn with_polynomial(p: u8, poly: u16) -> Result<Self> {
        if p == 0 || p > MAX_P {
            return Err(Error::Field(format!("extension degree must be in 1..={MAX_P}, got {p}")));
        }
        if poly_degree(poly as u32) != p as i32 {
            return Err(Error::Field(format!("polynomial {poly:#x} does not have degree {p}")));
        }
        if !is_irreducible(poly) {
            return Err(Error::Field(format!("polynomial {poly:#x} is reducible")));
        }
        Ok(FieldSpec { p, poly })
    }

    /// Field with `q = 2^p` elements, default polynomial.
    pub fn from_order(q: usize) -> Result<Self> {
        if !q.is_power_of_two() || q < 2 {
            return Err(Error::Field(format!("field order must be a power of two >= 2, got {q}")));
        }
        Self::new(q.trailing_zeros() as u8)
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.p
    }

    #[inline]
    pub fn q(&self) -> usize {
        1usize << self.p
    }

    #[inline]
    pub fn polynomial(&self) -> u16 {
        self.poly
    }

    pub fn is_default_polynomial(&self) -> bool {
        self.poly == default_polynomial(self.p)
    }

    /// Mask covering all `p` constituent bits.
    #[inline]
    pub fn mask(&self) -> u8 {
        ((1u16 << self.p) - 1) as u8
    }
}

/// A `p x p` matrix over GF(2). Row `i` is stored as a bit pattern whose bit
/// `j` is the entry `(i, j)`; it acts on column bit vectors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinMatrix {
    p: u8,
    rows: [u8; MAX_P as usize],
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinMatrix({})", self.to_bit_string())
    }
}

impl BinMatrix {
    pub fn identity(p: u8) -> Self {
        let mut rows = [0u8; MAX_P as usize];
        for (i, row) in rows.iter_mut().enumerate().take(p as usize) {
            *row = 1 << i;
        }
        BinMatrix { p, rows }
    }

    /// Build from row patterns. Bits above `p` must be clear.
    pub fn from_rows(p: u8, rows: &[u8]) -> Result<Self> {
        if p == 0 || p > MAX_P || rows.len() != p as usize {
            return Err(Error::Label(format!("expected {p} rows for a {p}x{p} matrix")));
        }
        let mask = ((1u16 << p) - 1) as u8;
        let mut out = [0u8; MAX_P as usize];
        for (i, &r) in rows.iter().enumerate() {
            if r & !mask != 0 {
                return Err(Error::Label(format!("row {i} has bits outside the {p}x{p} matrix")));
            }
            out[i] = r;
        }
        Ok(BinMatrix { p, rows: out })
    }

    /// Build from a nested list of 0/1 entries, `entries[i][j]`.
    pub fn from_entries(entries: &[&[u8]]) -> Result<Self> {
        let p = entries.len();
        let mut rows = Vec::with_capacity(p);
        for row in entries {
            if row.len() != p {
                return Err(Error::Label("matrix must be square".into()));
            }
            let mut bits = 0u8;
            for (j, &e) in row.iter().enumerate() {
                match e {
                    0 => {}
                    1 => bits |= 1 << j,
                    _ => return Err(Error::Label("matrix entries must be 0 or 1".into())),
                }
            }
            rows.push(bits);
        }
        Self::from_rows(p as u8, &rows)
    }

    /// The matrix whose columns are `cols[j]`, the images of the unit vectors.
    pub fn from_columns(p: u8, cols: &[u8]) -> Self {
        let mut rows = [0u8; MAX_P as usize];
        for (j, &c) in cols.iter().enumerate().take(p as usize) {
            for (i, row) in rows.iter_mut().enumerate().take(p as usize) {
                if (c >> i) & 1 == 1 {
                    *row |= 1 << j;
                }
            }
        }
        BinMatrix { p, rows }
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn rows(&self) -> &[u8] {
        &self.rows[..self.p as usize]
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    /// Matrix-vector product over GF(2).
    #[inline]
    pub fn apply(&self, s: u8) -> u8 {
        let mut out = 0u8;
        for i in 0..self.p as usize {
            out |= (((self.rows[i] & s).count_ones() & 1) as u8) << i;
        }
        out
    }

    /// Product `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &BinMatrix) -> BinMatrix {
        let cols: Vec<u8> = (0..rhs.p).map(|j| self.apply(rhs.apply(1 << j))).collect();
        BinMatrix::from_columns(self.p, &cols)
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<u8> = self.rows().to_vec();
        let mut rank = 0;
        for bit in 0..self.p {
            if let Some(pos) = (rank..rows.len()).find(|&r| (rows[r] >> bit) & 1 == 1) {
                rows.swap(rank, pos);
                let pivot = rows[rank];
                for (r, row) in rows.iter_mut().enumerate() {
                    if r != rank && (*row >> bit) & 1 == 1 {
                        *row ^= pivot;
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.p as usize
    }

    /// Gauss-Jordan inverse, `None` when singular.
    pub fn inverse(&self) -> Option<BinMatrix> {
        let p = self.p as usize;
        let mut left: Vec<u8> = self.rows().to_vec();
        let mut right: Vec<u8> = (0..p).map(|i| 1u8 << i).collect();
        for col in 0..p {
            let pos = (col..p).find(|&r| (left[r] >> col) & 1 == 1)?;
            left.swap(col, pos);
            right.swap(col, pos);
            for r in 0..p {
                if r != col && (left[r] >> col) & 1 == 1 {
                    left[r] ^= left[col];
                    right[r] ^= right[col];
                }
            }
        }
        Some(BinMatrix::from_rows(self.p, &right).expect("inverse stays in range"))
    }

    /// Row-major `0`/`1` string of length `p*p`.
    pub fn to_bit_string(&self) -> String {
        let mut s = String::with_capacity((self.p as usize).pow(2));
        for i in 0..self.p as usize {
            for j in 0..self.p as usize {
                s.push(if self.entry(i, j) { '1' } else { '0' });
            }
        }
        s
    }

    pub fn from_bit_string(p: u8, s: &str) -> Result<Self> {
        let n = p as usize;
        if p == 0 || p > MAX_P || s.len() != n * n {
            return Err(Error::Label(format!("matrix pattern must have {} characters, got `{s}`", n * n)));
        }
        let bytes = s.as_bytes();
        let mut rows = vec![0u8; n];
        for i in 0..n {
            for j in 0..n {
                match bytes[i * n + j] {
                    b'0' => {}
                    b'1' => rows[i] |= 1 << j,
                    _ => return Err(Error::Label(format!("matrix pattern `{s}` must contain only 0 and 1"))),
                }
            }
        }
        Self::from_rows(p, &rows)
    }
}

/// An element of the label group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    /// Nonzero field element.
    Unit(Symbol),
    /// Invertible binary matrix.
    Matrix(BinMatrix),
}

impl Label {
    pub fn kind(&self) -> GroupKind {
        match self {
            Label::Unit(_) => GroupKind::Field,
            Label::Matrix(_) => GroupKind::Matrix,
        }
    }
}

/// GF(2^p) with precomputed multiplication and inversion tables.
#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    spec: FieldSpec,
    mul: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(GF({}), poly={:#x})", self.spec.q(), self.spec.poly)
    }
}

impl Field {
    pub fn new(spec: FieldSpec) -> Self {
        let q = spec.q();
        let mut mul = vec![0u8; q * q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            for b in 0..q {
                let c = poly_mulmod(a as u16, b as u16, spec.poly, spec.p) as u8;
                mul[a * q + b] = c;
                if c == 1 {
                    inv[a] = b as u8;
                }
            }
        }
        Field { spec, mul, inv }
    }

    /// Field of order `2^p` with the default polynomial.
    pub fn with_degree(p: u8) -> Result<Self> {
        Ok(Self::new(FieldSpec::new(p)?))
    }

    #[inline]
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.spec.p
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.spec.q()
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        a + b
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        Symbol(self.mul[a.0 as usize * self.q() + b.0 as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Symbol) -> Option<Symbol> {
        if a.0 == 0 || a.0 as usize >= self.q() {
            None
        } else {
            Some(Symbol(self.inv[a.0 as usize]))
        }
    }

    pub fn contains(&self, s: Symbol) -> bool {
        (s.0 as usize) < self.q()
    }

    pub fn identity_label(&self, kind: GroupKind) -> Label {
        match kind {
            GroupKind::Field => Label::Unit(Symbol::ONE),
            GroupKind::Matrix => Label::Matrix(BinMatrix::identity(self.p())),
        }
    }

    /// Check that `h` is a valid, invertible label for this field.
    pub fn validate_label(&self, h: &Label) -> Result<()> {
        match h {
            Label::Unit(s) => {
                if s.0 == 0 || !self.contains(*s) {
                    return Err(Error::Label(format!(
                        "field label must be a nonzero element of GF({}), got {}",
                        self.q(),
                        s.0
                    )));
                }
            }
            Label::Matrix(m) => {
                if m.p() != self.p() {
                    return Err(Error::Label(format!(
                        "matrix label is {}x{}, field needs {}x{}",
                        m.p(),
                        m.p(),
                        self.p(),
                        self.p()
                    )));
                }
                if !m.is_invertible() {
                    return Err(Error::Label(format!("matrix label {} is singular", m.to_bit_string())));
                }
            }
        }
        Ok(())
    }

    /// The action `(h, s) -> hs`.
    #[inline]
    pub fn apply(&self, h: &Label, s: Symbol) -> Symbol {
        match h {
            Label::Unit(u) => self.mul(*u, s),
            Label::Matrix(m) => Symbol(m.apply(s.0)),
        }
    }

    pub fn invert_label(&self, h: &Label) -> Label {
        match h {
            Label::Unit(u) => Label::Unit(self.inv(*u).expect("field labels are nonzero")),
            Label::Matrix(m) => Label::Matrix(m.inverse().expect("matrix labels are invertible")),
        }
    }

    /// Group product `h1 * h2` (apply `h2` first). Both labels must share a kind.
    pub fn compose(&self, h1: &Label, h2: &Label) -> Label {
        match (h1, h2) {
            (Label::Unit(a), Label::Unit(b)) => Label::Unit(self.mul(*a, *b)),
            _ => Label::Matrix(self.label_matrix(h1).compose(&self.label_matrix(h2))),
        }
    }

    /// Image of `h` under the morphism into `p x p` binary matrices.
    pub fn label_matrix(&self, h: &Label) -> BinMatrix {
        match h {
            Label::Matrix(m) => *m,
            Label::Unit(_) => {
                let cols: Vec<u8> = (0..self.p()).map(|j| self.apply(h, Symbol(1 << j)).0).collect();
                BinMatrix::from_columns(self.p(), &cols)
            }
        }
    }

    /// Every element of the label group, each exactly once.
    pub fn enumerate_labels(&self, kind: GroupKind) -> Result<Vec<Label>> {
        match kind {
            GroupKind::Field => Ok((1..self.q()).map(|v| Label::Unit(Symbol(v as u8))).collect()),
            GroupKind::Matrix => {
                let p = self.p();
                if p > MAX_MATRIX_ENUM_P {
                    return Err(Error::Capacity(format!(
                        "matrix group enumeration is limited to p <= {MAX_MATRIX_ENUM_P}, got p = {p}"
                    )));
                }
                let q = self.q() as u32;
                let total = q.pow(p as u32);
                let mut out = Vec::new();
                let mut rows = vec![0u8; p as usize];
                for code in 0..total {
                    let mut c = code;
                    for r in rows.iter_mut() {
                        *r = (c % q) as u8;
                        c /= q;
                    }
                    let m = BinMatrix::from_rows(p, &rows)?;
                    if m.is_invertible() {
                        out.push(Label::Matrix(m));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Serialize a label the way code files and pdf flags do: an integer for
    /// field units, a row-major bit pattern for matrices.
    pub fn format_label(&self, h: &Label) -> String {
        match h {
            Label::Unit(s) => s.0.to_string(),
            Label::Matrix(m) => m.to_bit_string(),
        }
    }

    pub fn parse_label(&self, kind: GroupKind, text: &str) -> Result<Label> {
        let label = match kind {
            GroupKind::Field => {
                let v: u16 = text.parse().map_err(|_| Error::Label(format!("`{text}` is not a field element")))?;
                if v as usize >= self.q() {
                    return Err(Error::Label(format!("{v} is outside GF({})", self.q())));
                }
                Label::Unit(Symbol(v as u8))
            }
            GroupKind::Matrix => Label::Matrix(BinMatrix::from_bit_string(self.p(), text)?),
        };
        self.validate_label(&label)?;
        Ok(label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u8) -> Field {
        Field::with_degree(p).unwrap()
    }

    #[test]
    fn default_polynomials() {
        assert_eq!(default_polynomial(2), 0b111);
        assert_eq!(default_polynomial(3), 0b1011);
        assert_eq!(default_polynomial(4), 0b10011);
        assert_eq!(default_polynomial(8), 0x11b);
        assert!(!is_irreducible(0b101));
        assert!(FieldSpec::with_polynomial(2, 0b101).is_err());
        assert!(FieldSpec::with_polynomial(3, 0b1101).is_ok());
    }

    #[test]
    fn addition_examples() {
        let f = gf(3);
        assert_eq!(f.add(Symbol(0), Symbol(6)), Symbol(6));
        assert_eq!(f.add(Symbol(6), Symbol(6)), Symbol(0));
        assert_eq!(f.add(Symbol(5), Symbol(3)), Symbol(6));
    }

    #[test]
    fn gf4_multiplication() {
        let f = gf(2);
        for s in 0..4 {
            assert_eq!(f.mul(Symbol(1), Symbol(s)), Symbol(s));
        }
        assert_eq!(f.mul(Symbol(2), Symbol(2)), Symbol(3));
        assert_eq!(f.mul(Symbol(2), Symbol(3)), Symbol(1));
    }

    #[test]
    fn label_examples() {
        let f4 = gf(2);
        assert_eq!(f4.apply(&Label::Unit(Symbol(2)), Symbol(1)), Symbol(2));
        let swap = Label::Matrix(BinMatrix::from_entries(&[&[0, 1], &[1, 0]]).unwrap());
        assert_eq!(f4.apply(&swap, Symbol(1)), Symbol(2));
        assert_eq!(f4.invert_label(&Label::Unit(Symbol(2))), Label::Unit(Symbol(3)));
        let id = f4.identity_label(GroupKind::Matrix);
        assert_eq!(f4.invert_label(&id), id);

        let f8 = gf(3);
        assert_eq!(f8.invert_label(&Label::Unit(Symbol(2))), Label::Unit(Symbol(5)));
        // brute force
        let h = (1..8).find(|&h| f8.mul(Symbol(2), Symbol(h)) == Symbol(1)).unwrap();
        assert_eq!(h, 5);
    }

    #[test]
    fn group_sizes() {
        assert_eq!(gf(2).enumerate_labels(GroupKind::Field).unwrap().len(), 3);
        assert_eq!(gf(3).enumerate_labels(GroupKind::Field).unwrap().len(), 7);
        assert_eq!(gf(2).enumerate_labels(GroupKind::Matrix).unwrap().len(), 6);
        assert_eq!(gf(3).enumerate_labels(GroupKind::Matrix).unwrap().len(), 168);
        assert_eq!(gf(4).enumerate_labels(GroupKind::Matrix).unwrap().len(), 20160);
        assert!(matches!(gf(5).enumerate_labels(GroupKind::Matrix), Err(Error::Capacity(_))));
    }

    #[test]
    fn field_axioms_exhaustive() {
        for p in 1..=4 {
            let f = gf(p);
            let q = f.q() as u8;
            for a in 0..q {
                let a = Symbol(a);
                if a.0 != 0 {
                    let inv = f.inv(a).unwrap();
                    assert_eq!(f.mul(a, inv), Symbol::ONE);
                    let count = (1..q).filter(|&b| f.mul(a, Symbol(b)) == Symbol::ONE).count();
                    assert_eq!(count, 1);
                }
                for b in 0..q {
                    let b = Symbol(b);
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        let c = Symbol(c);
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                        assert_eq!(f.mul(a, b + c), f.mul(a, b) + f.mul(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn actions_are_linear_bijections() {
        for p in 1..=3 {
            let f = gf(p);
            let q = f.q() as u8;
            for kind in [GroupKind::Field, GroupKind::Matrix] {
                let labels = f.enumerate_labels(kind).unwrap();
                for h in &labels {
                    let hinv = f.invert_label(h);
                    let mut seen = vec![false; q as usize];
                    for s in 0..q {
                        let s = Symbol(s);
                        let hs = f.apply(h, s);
                        seen[hs.0 as usize] = true;
                        assert_eq!(f.apply(&hinv, hs), s);
                        for t in 0..q {
                            let t = Symbol(t);
                            assert_eq!(f.apply(h, s + t), hs + f.apply(h, t));
                        }
                    }
                    assert!(seen.iter().all(|&x| x));
                }
                // closure: composition acts sequentially
                for h1 in labels.iter().take(12) {
                    for h2 in labels.iter().take(12) {
                        let c = f.compose(h1, h2);
                        for s in 0..q {
                            assert_eq!(f.apply(&c, Symbol(s)), f.apply(h1, f.apply(h2, Symbol(s))));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn label_matrix_matches_multiplication() {
        let f = gf(2);
        let m = f.label_matrix(&Label::Unit(Symbol(2)));
        assert_eq!(m.apply(1), 2);
        assert_eq!(m.apply(2), 3);
        assert_eq!(m.to_bit_string(), "0111");
    }

    #[test]
    fn label_text_round_trip() {
        let f = gf(3);
        for kind in [GroupKind::Field, GroupKind::Matrix] {
            for h in f.enumerate_labels(kind).unwrap() {
                let text = f.format_label(&h);
                assert_eq!(f.parse_label(kind, &text).unwrap(), h);
            }
        }
        assert!(f.parse_label(GroupKind::Field, "0").is_err());
        assert!(f.parse_label(GroupKind::Field, "8").is_err());
        assert!(f.parse_label(GroupKind::Matrix, "000000000").is_err());
    }
}
