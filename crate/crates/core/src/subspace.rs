//! Linear and affine GF(2)-subspaces of GF(2^p).
//!
//! Subspaces are kept as a reduced row-echelon basis: rows sorted by
//! decreasing leading bit, and every leading bit cleared in all other rows.
//! That form is unique, so structural equality is set equality. A coset keeps
//! its offset reduced against the basis (zero in every pivot position).

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{BinMatrix, Field, Label, Symbol, MAX_P};

/// Largest extension degree for which the Grassmannian is enumerated.
pub const MAX_GRASSMANNIAN_P: u8 = 4;

#[inline]
fn msb(v: u8) -> u8 {
    7 - v.leading_zeros() as u8
}

/// A GF(2)-linear subspace of GF(2^p).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subspace {
    dim: u8,
    basis: [u8; MAX_P as usize],
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{:?}", self.basis())
    }
}

impl Subspace {
    pub const fn zero() -> Self {
        Subspace { dim: 0, basis: [0; MAX_P as usize] }
    }

    /// The whole space GF(2)^p.
    pub fn full(p: u8) -> Self {
        Self::span((0..p).map(|i| 1u8 << i))
    }

    /// Span of the unit vectors whose bits are set in `mask`.
    pub fn coordinate(mask: u8) -> Self {
        Self::span((0..8).filter(|i| (mask >> i) & 1 == 1).map(|i| 1u8 << i))
    }

    pub fn span<I: IntoIterator<Item = u8>>(vectors: I) -> Self {
        let mut s = Self::zero();
        for v in vectors {
            s.insert(v);
        }
        s
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn cardinality(&self) -> usize {
        1 << self.dim
    }

    #[inline]
    pub fn basis(&self) -> &[u8] {
        &self.basis[..self.dim as usize]
    }

    /// Bits occupied by leading entries.
    pub fn pivot_mask(&self) -> u8 {
        self.basis().iter().fold(0, |m, &r| m | (1 << msb(r)))
    }

    /// Canonical representative of `v + self`.
    #[inline]
    pub fn reduce(&self, mut v: u8) -> u8 {
        for &row in self.basis() {
            if v & (1 << msb(row)) != 0 {
                v ^= row;
            }
        }
        v
    }

    #[inline]
    pub fn contains(&self, v: u8) -> bool {
        self.reduce(v) == 0
    }

    /// Add `v` to the span. Returns whether the dimension grew.
    pub fn insert(&mut self, v: u8) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let pivot = 1u8 << msb(v);
        let n = self.dim as usize;
        for row in self.basis[..n].iter_mut() {
            if *row & pivot != 0 {
                *row ^= v;
            }
        }
        let pos = self.basis[..n].iter().position(|&r| r < v).unwrap_or(n);
        self.basis.copy_within(pos..n, pos + 1);
        self.basis[pos] = v;
        self.dim += 1;
        true
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis().iter().all(|&v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut out = *self;
        for &v in other.basis() {
            out.insert(v);
        }
        out
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        zassenhaus(self, other, None).0
    }

    /// Image under a map that is assumed GF(2)-linear.
    pub fn map<F: Fn(u8) -> u8>(&self, f: F) -> Subspace {
        Self::span(self.basis().iter().map(|&v| f(v)))
    }

    pub fn transform(&self, m: &BinMatrix) -> Subspace {
        self.map(|v| m.apply(v))
    }

    /// All `2^dim` elements, ascending.
    pub fn elements(&self) -> Vec<u8> {
        let mut out: Vec<u8> = (0u32..(1 << self.dim))
            .map(|mask| {
                self.basis().iter().enumerate().filter(|(i, _)| (mask >> i) & 1 == 1).fold(0u8, |acc, (_, &v)| acc ^ v)
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Zassenhaus on rows `(u, u)` and `(w, 0)`: returns `U ∩ W` and, when
/// `target` is given and lies in `U + W`, the `U` component of a split
/// `target = u + w`.
fn zassenhaus(u: &Subspace, w: &Subspace, target: Option<u8>) -> (Subspace, Option<u8>) {
    // pivots[b] holds the row whose high byte has leading bit b
    let mut pivots: [u16; 8] = [0; 8];
    let mut meet = Subspace::zero();
    let rows =
        u.basis().iter().map(|&v| ((v as u16) << 8) | v as u16).chain(w.basis().iter().map(|&v| (v as u16) << 8));
    for mut row in rows {
        loop {
            let high = (row >> 8) as u8;
            if high == 0 {
                meet.insert(row as u8);
                break;
            }
            let b = msb(high) as usize;
            if pivots[b] == 0 {
                pivots[b] = row;
                break;
            }
            row ^= pivots[b];
        }
    }
    let split = target.and_then(|t| {
        let mut row = (t as u16) << 8;
        for b in (0..8).rev() {
            if (row >> (8 + b)) & 1 == 1 {
                if pivots[b] == 0 {
                    return None;
                }
                row ^= pivots[b];
            }
        }
        Some(row as u8)
    });
    (meet, split)
}

/// A nonempty affine subspace `offset + direction`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    offset: u8,
    dir: Subspace,
}

impl fmt::Debug for Coset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {:?}", self.offset, self.dir)
    }
}

impl Coset {
    pub fn new(offset: Symbol, dir: Subspace) -> Self {
        Coset { offset: dir.reduce(offset.0), dir }
    }

    pub fn singleton(s: Symbol) -> Self {
        Coset { offset: s.0, dir: Subspace::zero() }
    }

    pub fn full(p: u8) -> Self {
        Coset { offset: 0, dir: Subspace::full(p) }
    }

    pub fn linear(dir: Subspace) -> Self {
        Coset { offset: 0, dir }
    }

    #[inline]
    pub fn offset(&self) -> Symbol {
        Symbol(self.offset)
    }

    #[inline]
    pub fn direction(&self) -> &Subspace {
        &self.dir
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dir.dim()
    }

    #[inline]
    pub fn cardinality(&self) -> usize {
        self.dir.cardinality()
    }

    /// The only element, if the set is a singleton.
    #[inline]
    pub fn as_singleton(&self) -> Option<Symbol> {
        (self.dir.dim == 0).then_some(Symbol(self.offset))
    }

    #[inline]
    pub fn contains(&self, s: Symbol) -> bool {
        self.dir.reduce(s.0 ^ self.offset) == 0
    }

    pub fn is_linear(&self) -> bool {
        self.offset == 0
    }

    pub fn is_subset_of(&self, other: &Coset) -> bool {
        other.contains(Symbol(self.offset)) && self.dir.is_subspace_of(&other.dir)
    }

    /// `{a + b | a in self, b in other}`.
    #[inline]
    pub fn sum(&self, other: &Coset) -> Coset {
        let dir = self.dir.sum(&other.dir);
        Coset { offset: dir.reduce(self.offset ^ other.offset), dir }
    }

    pub fn intersect(&self, other: &Coset) -> AffineSet {
        let d = self.offset ^ other.offset;
        let (meet, split) = zassenhaus(&self.dir, &other.dir, Some(d));
        match split {
            None => AffineSet::Empty,
            Some(u_part) => AffineSet::Coset(Coset { offset: meet.reduce(self.offset ^ u_part), dir: meet }),
        }
    }

    /// Image under an affine-compatible linear map.
    pub fn map<F: Fn(u8) -> u8>(&self, f: F) -> Coset {
        let dir = self.dir.map(&f);
        Coset { offset: dir.reduce(f(self.offset)), dir }
    }

    #[inline]
    pub fn transform(&self, m: &BinMatrix) -> Coset {
        self.map(|v| m.apply(v))
    }

    /// The set `h·self`.
    pub fn act(&self, field: &Field, h: &Label) -> Coset {
        self.map(|v| field.apply(h, Symbol(v)).0)
    }

    pub fn elements(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self.dir.elements().into_iter().map(|v| Symbol(v ^ self.offset)).collect();
        out.sort_unstable();
        out
    }
}

/// An affine subspace of GF(2^p), possibly empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AffineSet {
    Empty,
    Coset(Coset),
}

impl From<Coset> for AffineSet {
    fn from(c: Coset) -> Self {
        AffineSet::Coset(c)
    }
}

impl AffineSet {
    pub fn full(p: u8) -> Self {
        AffineSet::Coset(Coset::full(p))
    }

    pub fn singleton(s: Symbol) -> Self {
        AffineSet::Coset(Coset::singleton(s))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, AffineSet::Empty)
    }

    pub fn as_coset(&self) -> Option<&Coset> {
        match self {
            AffineSet::Empty => None,
            AffineSet::Coset(c) => Some(c),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.as_coset().map_or(0, Coset::cardinality)
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.as_coset().is_some_and(|c| c.contains(s))
    }

    pub fn sum(&self, other: &AffineSet) -> AffineSet {
        match (self, other) {
            (AffineSet::Coset(a), AffineSet::Coset(b)) => AffineSet::Coset(a.sum(b)),
            _ => AffineSet::Empty,
        }
    }

    pub fn intersect(&self, other: &AffineSet) -> AffineSet {
        match (self, other) {
            (AffineSet::Coset(a), AffineSet::Coset(b)) => a.intersect(b),
            _ => AffineSet::Empty,
        }
    }

    pub fn act(&self, field: &Field, h: &Label) -> AffineSet {
        match self {
            AffineSet::Empty => AffineSet::Empty,
            AffineSet::Coset(c) => AffineSet::Coset(c.act(field, h)),
        }
    }

    pub fn elements(&self) -> Vec<Symbol> {
        self.as_coset().map_or_else(Vec::new, Coset::elements)
    }

    /// Build from an explicit element list; fails unless the list is an
    /// affine subspace.
    pub fn from_elements(elements: &[Symbol]) -> Result<AffineSet> {
        let Some(&first) = elements.first() else {
            return Ok(AffineSet::Empty);
        };
        let dir = Subspace::span(elements.iter().map(|s| s.0 ^ first.0));
        let coset = Coset::new(first, dir);
        let mut sorted: Vec<Symbol> = elements.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if coset.elements() != sorted {
            return Err(Error::Invalid("element list is not an affine subspace".into()));
        }
        Ok(AffineSet::Coset(coset))
    }
}

/// Every linear subspace of GF(2)^p, in a fixed order: by dimension, then by
/// basis encoding. Index 0 is `{0}`, the last index is the whole space.
#[derive(Clone, Debug)]
pub struct Grassmannian {
    p: u8,
    spaces: Vec<Subspace>,
    index: HashMap<Subspace, usize>,
}

impl Grassmannian {
    pub fn enumerate(p: u8) -> Result<Self> {
        if p == 0 || p > MAX_GRASSMANNIAN_P {
            return Err(Error::Capacity(format!(
                "Grassmannian enumeration supports 1 <= p <= {MAX_GRASSMANNIAN_P}, got p = {p}"
            )));
        }
        let q = 1u16 << p;
        let mut seen: HashMap<Subspace, ()> = HashMap::new();
        let mut frontier = vec![Subspace::zero()];
        seen.insert(Subspace::zero(), ());
        while let Some(s) = frontier.pop() {
            for v in 1..q {
                let mut t = s;
                if t.insert(v as u8) && seen.insert(t, ()).is_none() {
                    frontier.push(t);
                }
            }
        }
        let mut spaces: Vec<Subspace> = seen.into_keys().collect();
        spaces.sort_by(|a, b| a.dim.cmp(&b.dim).then(a.basis.cmp(&b.basis)));
        let index = spaces.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Ok(Grassmannian { p, spaces, index })
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    #[inline]
    pub fn spaces(&self) -> &[Subspace] {
        &self.spaces
    }

    #[inline]
    pub fn get(&self, i: usize) -> &Subspace {
        &self.spaces[i]
    }

    #[inline]
    pub fn position(&self, s: &Subspace) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn zero_index(&self) -> usize {
        0
    }

    pub fn full_index(&self) -> usize {
        self.spaces.len() - 1
    }
}

/// Partition of a Grassmannian into classes, e.g. orbits of a label group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl Partition {
    fn from_class_of(class_of: Vec<usize>) -> Self {
        let n = class_of.iter().copied().max().map_or(0, |m| m + 1);
        let mut classes = vec![Vec::new(); n];
        for (i, &c) in class_of.iter().enumerate() {
            classes[c].push(i);
        }
        Partition { classes, class_of }
    }

    /// One class per dimension `0..=p`.
    pub fn by_dimension(g: &Grassmannian) -> Self {
        Self::from_class_of(g.spaces().iter().map(Subspace::dim).collect())
    }

    #[inline]
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    #[inline]
    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Orbits of the Grassmannian under the action of `labels`. Classes are
/// numbered in order of their smallest member.
pub fn conjugation_classes(g: &Grassmannian, field: &Field, labels: &[Label]) -> Partition {
    let matrices: Vec<BinMatrix> = labels.iter().map(|h| field.label_matrix(h)).collect();
    let mut class_of = vec![usize::MAX; g.len()];
    let mut next = 0;
    for start in 0..g.len() {
        if class_of[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        class_of[start] = next;
        while let Some(i) = stack.pop() {
            for m in &matrices {
                let j = g.position(&g.get(i).transform(m)).expect("image of a subspace is a subspace");
                if class_of[j] == usize::MAX {
                    class_of[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    Partition::from_class_of(class_of)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::GroupKind;

    fn set(elems: &[u8]) -> AffineSet {
        AffineSet::from_elements(&elems.iter().map(|&v| Symbol(v)).collect::<Vec<_>>()).unwrap()
    }

    fn elems(a: &AffineSet) -> Vec<u8> {
        a.elements().into_iter().map(Symbol::value).collect()
    }

    #[test]
    fn canonical_form() {
        let a = Subspace::span([3, 1]);
        let b = Subspace::span([2, 3]);
        assert_eq!(a, b);
        assert_eq!(a.basis(), &[2, 1]);
        let c = Coset::new(Symbol(7), Subspace::span([4]));
        assert_eq!(c.offset(), Symbol(3));
        assert_eq!(c, Coset::new(Symbol(3), Subspace::span([4])));
    }

    #[test]
    fn sum_examples() {
        let s = set(&[1, 3, 5, 7]);
        assert_eq!(set(&[0]).sum(&s), s);
        assert_eq!(elems(&set(&[0, 1]).sum(&set(&[0, 2]))), vec![0, 1, 2, 3]);
        // 1 + {0,4} plus {0,2}
        assert_eq!(elems(&set(&[1, 5]).sum(&set(&[0, 2]))), vec![1, 3, 5, 7]);
    }

    #[test]
    fn intersect_examples() {
        let s = set(&[2, 6]);
        assert_eq!(AffineSet::full(3).intersect(&s), s);
        assert_eq!(elems(&set(&[0, 1, 2, 3]).intersect(&set(&[0, 1, 4, 5]))), vec![0, 1]);
        assert!(set(&[1, 3]).intersect(&set(&[0, 2])).is_empty());
    }

    #[test]
    fn act_examples() {
        let f = Field::with_degree(2).unwrap();
        let two = Label::Unit(Symbol(2));
        let s = set(&[1, 3]);
        assert_eq!(s.act(&f, &f.identity_label(GroupKind::Field)), s);
        assert_eq!(elems(&set(&[0, 1]).act(&f, &two)), vec![0, 2]);
        assert_eq!(AffineSet::full(2).act(&f, &two), AffineSet::full(2));
    }

    #[test]
    fn grassmannian_sizes() {
        let sizes: Vec<usize> = (1..=4).map(|p| Grassmannian::enumerate(p).unwrap().len()).collect();
        assert_eq!(sizes, vec![2, 5, 16, 67]);
        assert!(matches!(Grassmannian::enumerate(5), Err(Error::Capacity(_))));
        let g = Grassmannian::enumerate(3).unwrap();
        assert_eq!(*g.get(0), Subspace::zero());
        assert_eq!(*g.get(g.full_index()), Subspace::full(3));
    }

    /// Counts subsets of GF(2)^p containing 0 and closed under XOR.
    fn brute_force_subspace_count(p: u8) -> usize {
        let q = 1usize << p;
        (0u64..(1u64 << q))
            .filter(|&mask| {
                mask & 1 == 1
                    && (0..q).all(|a| {
                        (mask >> a) & 1 == 0 || (0..q).all(|b| (mask >> b) & 1 == 0 || (mask >> (a ^ b)) & 1 == 1)
                    })
            })
            .count()
    }

    #[test]
    fn grassmannian_matches_brute_force() {
        for p in 1..=4 {
            assert_eq!(Grassmannian::enumerate(p).unwrap().len(), brute_force_subspace_count(p), "p = {p}");
        }
    }

    #[test]
    fn conjugation_class_examples() {
        let f = Field::with_degree(2).unwrap();
        let g = Grassmannian::enumerate(2).unwrap();
        let units = f.enumerate_labels(GroupKind::Field).unwrap();
        let part = conjugation_classes(&g, &f, &units);
        assert_eq!(part.classes()[part.class_of(0)], vec![0]);
        let lines: Vec<usize> = (0..g.len()).filter(|&i| g.get(i).dim() == 1).collect();
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|&i| part.class_of(i) == part.class_of(lines[0])));
        assert_eq!(part.len(), 3);

        let gl = f.enumerate_labels(GroupKind::Matrix).unwrap();
        assert_eq!(conjugation_classes(&g, &f, &gl), Partition::by_dimension(&g));
    }

    #[test]
    fn general_linear_orbits_are_dimensions() {
        for p in 1..=3 {
            let f = Field::with_degree(p).unwrap();
            let g = Grassmannian::enumerate(p).unwrap();
            let gl = f.enumerate_labels(GroupKind::Matrix).unwrap();
            assert_eq!(conjugation_classes(&g, &f, &gl), Partition::by_dimension(&g));
        }
    }
}
