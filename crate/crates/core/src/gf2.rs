//! Exact linear algebra over the two-element field.
//!
//! Vectors are packed into a single machine word, so every carrier is capped
//! at [`MAX_DIM`] coordinates. Square classes are written additively: the
//! class of `1` is the zero vector and multiplication of classes is XOR.
//!
//! Bit strings are little-endian: the first character is coordinate 0.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported dimension of a single carrier.
pub const MAX_DIM: usize = 64;

fn mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

fn check_width(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::WidthMismatch { expected, found })
    }
}

/// A vector in `F₂^width`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    width: u8,
    bits: u64,
}

impl BitVec {
    pub fn zero(width: usize) -> Self {
        assert!(width <= MAX_DIM, "dimension {width} exceeds {MAX_DIM}");
        BitVec {
            width: width as u8,
            bits: 0,
        }
    }

    pub fn unit(width: usize, index: usize) -> Self {
        assert!(index < width, "unit index {index} out of range for width {width}");
        let mut v = Self::zero(width);
        v.bits = 1 << index;
        v
    }

    /// Builds a vector from a packed word; bit `i` is coordinate `i`.
    pub fn from_bits(width: usize, bits: u64) -> Self {
        let mut v = Self::zero(width);
        v.bits = bits & mask(width);
        v
    }

    pub fn from_indices(width: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zero(width);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.width(), "index {index} out of range");
        self.bits >> index & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.width(), "index {index} out of range");
        if value {
            self.bits |= 1 << index;
        } else {
            self.bits &= !(1 << index);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Lowest nonzero coordinate.
    pub fn pivot(&self) -> Option<usize> {
        (!self.is_zero()).then(|| self.bits.trailing_zeros() as usize)
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.width, other.width, "dot product width mismatch");
        (self.bits & other.bits).count_ones() % 2 == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width()).filter(move |&i| self.get(i))
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let width = self.width() + other.width();
        BitVec::from_bits(width, self.bits | other.bits << self.width())
    }

    /// Coordinates `offset..offset + len`.
    pub fn slice(&self, offset: usize, len: usize) -> BitVec {
        assert!(offset + len <= self.width(), "slice out of range");
        BitVec::from_bits(len, self.bits >> offset)
    }

    /// Places `self` at `offset` inside a zero vector of `width` coordinates.
    pub fn embed(&self, width: usize, offset: usize) -> BitVec {
        assert!(offset + self.width() <= width, "embedding out of range");
        BitVec::from_bits(width, self.bits << offset)
    }

    /// Every vector of `F₂^width`, in increasing packed order.
    pub fn all(width: usize) -> impl Iterator<Item = BitVec> {
        assert!(width < 32, "refusing to enumerate 2^{width} vectors");
        (0..1u64 << width).map(move |b| BitVec::from_bits(width, b))
    }
}

impl BitXor for BitVec {
    type Output = BitVec;

    fn bitxor(self, rhs: BitVec) -> BitVec {
        assert_eq!(self.width, rhs.width, "vector width mismatch");
        BitVec {
            width: self.width,
            bits: self.bits ^ rhs.bits,
        }
    }
}

impl BitXorAssign for BitVec {
    fn bitxor_assign(&mut self, rhs: BitVec) {
        *self = *self ^ rhs;
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > MAX_DIM {
            return Err(Error::DimensionCap {
                dim: s.len(),
                cap: MAX_DIM,
            });
        }
        let mut v = BitVec::zero(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Error::OutOfRange(format!(
                        "bit strings use only 0 and 1, found {other:?}"
                    )))
                }
            }
        }
        Ok(v)
    }
}

impl Serialize for BitVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A subspace of `F₂^ambient`, stored as a fully reduced row echelon basis.
///
/// Rows are ordered by pivot (lowest set coordinate) and every pivot column
/// is clear in all other rows, so equal subspaces have identical bases.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<BitVec>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        assert!(ambient <= MAX_DIM);
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient).map(|i| BitVec::unit(ambient, i)).collect(),
        }
    }

    pub fn span<'a>(ambient: usize, vectors: impl IntoIterator<Item = &'a BitVec>) -> Result<Self> {
        let mut s = Subspace::zero(ambient);
        for v in vectors {
            check_width(ambient, v.width())?;
            s.insert(*v);
        }
        Ok(s)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVec] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    /// Normal form of `v` modulo the subspace (zero iff `v` is a member).
    pub fn reduce(&self, v: BitVec) -> BitVec {
        let mut v = v;
        for row in &self.basis {
            let p = row.pivot().expect("basis rows are nonzero");
            if v.get(p) {
                v ^= *row;
            }
        }
        v
    }

    /// Adds `v` to the span, returning whether the dimension grew.
    fn insert(&mut self, v: BitVec) -> bool {
        let v = self.reduce(v);
        let Some(p) = v.pivot() else {
            return false;
        };
        for row in &mut self.basis {
            if row.get(p) {
                *row ^= v;
            }
        }
        let at = self
            .basis
            .iter()
            .position(|r| r.pivot().unwrap() > p)
            .unwrap_or(self.basis.len());
        self.basis.insert(at, v);
        true
    }

    pub fn contains(&self, v: &BitVec) -> Result<bool> {
        check_width(self.ambient, v.width())?;
        Ok(self.reduce(*v).is_zero())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        check_width(other.ambient, self.ambient)?;
        Ok(self.basis.iter().all(|v| other.reduce(*v).is_zero()))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        check_width(self.ambient, other.ambient)?;
        let mut s = self.clone();
        for v in &other.basis {
            s.insert(*v);
        }
        Ok(s)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        check_width(self.ambient, other.ambient)?;
        let k = self.dim();
        let columns: Vec<BitVec> = self.basis.iter().chain(&other.basis).copied().collect();
        let stacked = LinMap::new(columns.len(), self.ambient, columns)?;
        let mut out = Subspace::zero(self.ambient);
        for coeffs in stacked.kernel().basis() {
            let mut v = BitVec::zero(self.ambient);
            for i in coeffs.ones().filter(|&i| i < k) {
                v ^= self.basis[i];
            }
            out.insert(v);
        }
        Ok(out)
    }

    /// Every member of the subspace, in a deterministic order.
    pub fn elements(&self) -> impl Iterator<Item = BitVec> + '_ {
        assert!(self.dim() < 32);
        (0..1u64 << self.dim()).map(move |mask| {
            let mut v = BitVec::zero(self.ambient);
            for (i, row) in self.basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    v ^= *row;
                }
            }
            v
        })
    }

    /// Image of the subspace under the inclusion at `offset` into `width` coordinates.
    pub fn embed(&self, width: usize, offset: usize) -> Subspace {
        let mut s = Subspace::zero(width);
        for v in &self.basis {
            s.insert(v.embed(width, offset));
        }
        s
    }

    /// Direct sum `self ⊕ other` in concatenated coordinates.
    pub fn direct_sum(&self, other: &Subspace) -> Subspace {
        let width = self.ambient + other.ambient;
        let mut s = self.embed(width, 0);
        for v in &other.basis {
            s.insert(v.embed(width, self.ambient));
        }
        s
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace<{}>{{", self.ambient)?;
        for (i, v) in self.basis.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Serialized as the list of its echelon basis vectors.
impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.basis.serialize(s)
    }
}

/// Canonical echelon basis of the span of `vectors` inside `F₂^ambient`.
pub fn rref(ambient: usize, vectors: &[BitVec]) -> Result<Subspace> {
    Subspace::span(ambient, vectors)
}

pub fn solve_membership(s: &Subspace, v: &BitVec) -> Result<bool> {
    s.contains(v)
}

/// Extends an independent list to a basis of `F₂^ambient` by appending unit
/// vectors in index order whenever they leave the current span.
pub fn complete_basis(ambient: usize, vectors: &[BitVec]) -> Result<Vec<BitVec>> {
    let mut span = Subspace::zero(ambient);
    for v in vectors {
        check_width(ambient, v.width())?;
        if !span.insert(*v) {
            return Err(Error::Dependent);
        }
    }
    let mut out = vectors.to_vec();
    for i in 0..ambient {
        let u = BitVec::unit(ambient, i);
        if span.insert(u) {
            out.push(u);
        }
    }
    Ok(out)
}

/// A linear map `F₂^src → F₂^dst` given by the images of the unit vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinMap {
    src_dim: usize,
    dst_dim: usize,
    columns: Vec<BitVec>,
}

impl LinMap {
    pub fn new(src_dim: usize, dst_dim: usize, columns: Vec<BitVec>) -> Result<Self> {
        check_width(src_dim, columns.len())?;
        for c in &columns {
            check_width(dst_dim, c.width())?;
        }
        Ok(LinMap {
            src_dim,
            dst_dim,
            columns,
        })
    }

    pub fn zero(src_dim: usize, dst_dim: usize) -> Self {
        LinMap {
            src_dim,
            dst_dim,
            columns: vec![BitVec::zero(dst_dim); src_dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        LinMap {
            src_dim: dim,
            dst_dim: dim,
            columns: (0..dim).map(|i| BitVec::unit(dim, i)).collect(),
        }
    }

    pub fn from_fn(src_dim: usize, dst_dim: usize, f: impl Fn(BitVec) -> BitVec) -> Self {
        let columns = (0..src_dim)
            .map(|i| {
                let img = f(BitVec::unit(src_dim, i));
                assert_eq!(img.width(), dst_dim);
                img
            })
            .collect();
        LinMap {
            src_dim,
            dst_dim,
            columns,
        }
    }

    /// The unique map sending `basis[k]` to `images[k]`; `basis` must be a
    /// basis of the source space.
    pub fn from_basis_images(basis: &[BitVec], images: &[BitVec], dst_dim: usize) -> Result<Self> {
        let src_dim = basis.len();
        check_width(src_dim, images.len())?;
        let mut rows: Vec<(BitVec, BitVec)> = Vec::with_capacity(src_dim);
        for (b, img) in basis.iter().zip(images) {
            check_width(src_dim, b.width())?;
            check_width(dst_dim, img.width())?;
            let (mut b, mut img) = (*b, *img);
            for (rb, ri) in &rows {
                if b.get(rb.pivot().unwrap()) {
                    b ^= *rb;
                    img ^= *ri;
                }
            }
            let Some(p) = b.pivot() else {
                return Err(Error::Dependent);
            };
            for (rb, ri) in &mut rows {
                if rb.get(p) {
                    *rb ^= b;
                    *ri ^= img;
                }
            }
            rows.push((b, img));
        }
        let mut columns = vec![BitVec::zero(dst_dim); src_dim];
        for (b, img) in rows {
            columns[b.pivot().unwrap()] = img;
        }
        Ok(LinMap {
            src_dim,
            dst_dim,
            columns,
        })
    }

    pub fn src_dim(&self) -> usize {
        self.src_dim
    }

    pub fn dst_dim(&self) -> usize {
        self.dst_dim
    }

    pub fn columns(&self) -> &[BitVec] {
        &self.columns
    }

    pub fn column_mut(&mut self, index: usize) -> &mut BitVec {
        &mut self.columns[index]
    }

    pub fn apply(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.width(), self.src_dim, "map applied to a vector of the wrong width");
        let mut out = BitVec::zero(self.dst_dim);
        for i in v.ones() {
            out ^= self.columns[i];
        }
        out
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &LinMap) -> Result<LinMap> {
        check_width(next.src_dim, self.dst_dim)?;
        Ok(LinMap {
            src_dim: self.src_dim,
            dst_dim: next.dst_dim,
            columns: self.columns.iter().map(|c| next.apply(c)).collect(),
        })
    }

    pub fn add(&self, other: &LinMap) -> Result<LinMap> {
        check_width(self.src_dim, other.src_dim)?;
        check_width(self.dst_dim, other.dst_dim)?;
        Ok(LinMap {
            src_dim: self.src_dim,
            dst_dim: self.dst_dim,
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| *a ^ *b).collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(BitVec::is_zero)
    }

    pub fn kernel(&self) -> Subspace {
        let mut pivots: Vec<(BitVec, BitVec)> = Vec::new();
        let mut kernel = Subspace::zero(self.src_dim);
        for (i, col) in self.columns.iter().enumerate() {
            let mut img = *col;
            let mut tag = BitVec::unit(self.src_dim, i);
            for (pi, pt) in &pivots {
                if img.get(pi.pivot().unwrap()) {
                    img ^= *pi;
                    tag ^= *pt;
                }
            }
            if img.is_zero() {
                kernel.insert(tag);
            } else {
                pivots.push((img, tag));
            }
        }
        kernel
    }

    pub fn image(&self) -> Subspace {
        let mut s = Subspace::zero(self.dst_dim);
        for c in &self.columns {
            s.insert(*c);
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.image().dim()
    }

    /// `{v : f(v) ∈ w}`.
    pub fn preimage(&self, w: &Subspace) -> Result<Subspace> {
        check_width(self.dst_dim, w.ambient())?;
        let reduced = LinMap {
            src_dim: self.src_dim,
            dst_dim: self.dst_dim,
            columns: self.columns.iter().map(|c| w.reduce(*c)).collect(),
        };
        Ok(reduced.kernel())
    }

    pub fn image_of(&self, s: &Subspace) -> Result<Subspace> {
        check_width(self.src_dim, s.ambient())?;
        let mut out = Subspace::zero(self.dst_dim);
        for v in s.basis() {
            out.insert(self.apply(v));
        }
        Ok(out)
    }
}

/// Serialized as its column list.
impl Serialize for LinMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.columns.serialize(s)
    }
}

impl fmt::Debug for LinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinMap<{}→{}>[", self.src_dim, self.dst_dim)?;
        for (i, c) in self.columns.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    /// Every element of the span, by enumerating all coefficient choices.
    fn brute_span(width: usize, gens: &[BitVec]) -> Vec<BitVec> {
        let mut out: Vec<BitVec> = (0..1u64 << gens.len())
            .map(|m| {
                gens.iter()
                    .enumerate()
                    .filter(|(i, _)| m >> i & 1 == 1)
                    .fold(BitVec::zero(width), |acc, (_, g)| acc ^ *g)
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn elements_sorted(s: &Subspace) -> Vec<BitVec> {
        let mut e: Vec<_> = s.elements().collect();
        e.sort();
        e
    }

    #[test]
    fn bit_strings_are_little_endian() {
        let v = bv("110");
        assert!(v.get(0) && v.get(1) && !v.get(2));
        assert_eq!(v.to_string(), "110");
        assert_eq!(v.bits(), 0b011);
        assert!("102".parse::<BitVec>().is_err());
    }

    #[test]
    fn rref_of_empty_list_is_zero() {
        let s = rref(3, &[]).unwrap();
        assert_eq!(s.dim(), 0);
        assert!(s.basis().is_empty());
    }

    #[test]
    fn rref_three_dependent_vectors() {
        let gens = [bv("110"), bv("011"), bv("101")];
        let s = rref(3, &gens).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(elements_sorted(&s), brute_span(3, &gens));
        assert_eq!(elements_sorted(&s), brute_span(3, &[bv("110"), bv("011")]));
        // fully reduced: the pivot of the second row is cleared from the first
        assert_eq!(s.basis(), &[bv("101"), bv("011")]);
    }

    #[test]
    fn rref_is_idempotent_on_repeats() {
        let s = rref(3, &[bv("100"), bv("100")]).unwrap();
        assert_eq!(s.basis(), &[bv("100")]);
        assert_eq!(rref(3, s.basis()).unwrap(), s);
    }

    #[test]
    fn rref_rejects_mixed_widths() {
        assert!(matches!(
            rref(3, &[bv("100"), bv("10")]),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn membership_examples() {
        assert!(solve_membership(&Subspace::zero(3), &BitVec::zero(3)).unwrap());
        let s = rref(3, &[bv("110"), bv("011")]).unwrap();
        assert!(solve_membership(&s, &bv("101")).unwrap());
        let t = rref(3, &[bv("110")]).unwrap();
        assert!(!solve_membership(&t, &bv("011")).unwrap());
        assert!(solve_membership(&t, &bv("01")).is_err());
    }

    #[test]
    fn kernel_image_preimage_examples() {
        let id = LinMap::identity(3);
        let w = rref(3, &[bv("110")]).unwrap();
        assert_eq!(id.preimage(&w).unwrap(), w);

        let zero = LinMap::zero(3, 3);
        assert!(zero.preimage(&w).unwrap().is_full());
        assert!(zero.image().is_zero());

        let f = LinMap::new(2, 2, vec![bv("11"), bv("11")]).unwrap();
        let w = rref(2, &[bv("11")]).unwrap();
        // enumerate the 4 inputs: all land in {00, 11}
        for x in BitVec::all(2) {
            assert!(w.contains(&f.apply(&x)).unwrap());
        }
        assert!(f.preimage(&w).unwrap().is_full());
        assert_eq!(f.kernel(), rref(2, &[bv("11")]).unwrap());
        assert!(f.preimage(&Subspace::zero(3)).is_err());
    }

    #[test]
    fn lattice_examples() {
        let s = rref(3, &[bv("100"), bv("010")]).unwrap();
        let t = rref(3, &[bv("010"), bv("001")]).unwrap();
        assert_eq!(s.intersect(&s).unwrap(), s);
        assert_eq!(s.sum(&Subspace::zero(3)).unwrap(), s);
        let expected: Vec<BitVec> = BitVec::all(3)
            .filter(|v| s.contains(v).unwrap() && t.contains(v).unwrap())
            .collect();
        assert_eq!(expected, vec![bv("000"), bv("010")]);
        assert_eq!(s.intersect(&t).unwrap(), rref(3, &[bv("010")]).unwrap());
    }

    #[test]
    fn complete_basis_is_greedy_by_unit_vectors() {
        let b = complete_basis(2, &[bv("11")]).unwrap();
        assert_eq!(b, vec![bv("11"), bv("10")]);
        assert_eq!(rref(2, &b).unwrap().dim(), 2);
        let b = complete_basis(3, &[bv("110")]).unwrap();
        assert_eq!(b, vec![bv("110"), bv("100"), bv("001")]);
        assert_eq!(
            complete_basis(2, &[bv("11"), bv("11")]),
            Err(Error::Dependent)
        );
    }

    #[test]
    fn from_basis_images_solves_for_columns() {
        let basis = [bv("11"), bv("10")];
        let images = [bv("1"), bv("0")];
        let f = LinMap::from_basis_images(&basis, &images, 1).unwrap();
        assert_eq!(f.apply(&bv("11")), bv("1"));
        assert_eq!(f.apply(&bv("10")), bv("0"));
        assert_eq!(f.apply(&bv("01")), bv("1"));
        assert!(LinMap::from_basis_images(&[bv("11"), bv("11")], &images, 1).is_err());
    }

    fn vecs(width: usize, max: usize) -> impl Strategy<Value = Vec<BitVec>> {
        prop::collection::vec(any::<u64>().prop_map(move |b| BitVec::from_bits(width, b)), 0..=max)
    }

    proptest! {
        #[test]
        fn dimension_formula(width in 1usize..=6, a in vecs(6, 6), b in vecs(6, 6)) {
            let a: Vec<_> = a.iter().map(|v| v.slice(0, width)).collect();
            let b: Vec<_> = b.iter().map(|v| v.slice(0, width)).collect();
            let s = rref(width, &a).unwrap();
            let t = rref(width, &b).unwrap();
            let sum = s.sum(&t).unwrap();
            let meet = s.intersect(&t).unwrap();
            prop_assert_eq!(s.dim() + t.dim(), sum.dim() + meet.dim());
            prop_assert!(meet.is_subspace_of(&s).unwrap() && meet.is_subspace_of(&t).unwrap());
        }

        #[test]
        fn equal_spans_give_identical_bases(gens in vecs(6, 6), mix in any::<u64>()) {
            let s = rref(6, &gens).unwrap();
            // a different generating set of the same span
            let mut other: Vec<BitVec> = s.elements().filter(|v| v.bits() & mix != 0).collect();
            other.extend(s.basis().iter().rev().copied());
            let again = rref(6, &other).unwrap();
            prop_assert_eq!(again.basis(), s.basis());
            prop_assert_eq!(elements_sorted(&s), brute_span(6, &gens));
        }

        #[test]
        fn preimage_laws(src in 0usize..=6, cols in vecs(5, 6)) {
            let cols: Vec<_> = cols.into_iter().take(src).collect();
            let f = LinMap::new(cols.len(), 5, cols).unwrap();
            prop_assert!(f.preimage(&f.image()).unwrap().is_full());
            prop_assert!(f.image_of(&f.kernel()).unwrap().is_zero());
            prop_assert_eq!(f.kernel().dim() + f.rank(), f.src_dim());
            let w = rref(5, &f.columns()[..f.src_dim() / 2]).unwrap();
            prop_assert!(f.kernel().is_subspace_of(&f.preimage(&w).unwrap()).unwrap());
        }
    }
}
