//! Isomorphism of square-class structures.
//!
//! An isomorphism `S₁ → S₂` is a pair of invertible maps `φ_V`, `φ_B` with
//! `φ_V(e₁) = e₂` and `q₂(φ_V x, φ_V y) = φ_B q₁(x, y)`. The search assigns
//! images of the unit vectors one at a time and grows `φ_B` as a partial
//! injective map on the span of the pairing values seen so far, so
//! inconsistent branches die as soon as one pairing value disagrees.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gf2::{BitVec, LinMap};
use crate::synth::SquareClassStructure;

/// Largest `dim V` the search accepts.
pub const ISO_MAX_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub phi_v: LinMap,
    /// Acts on the reduced `B` coordinates.
    pub phi_b: LinMap,
}

/// Extra requirements on `φ_V`.
#[derive(Clone, Debug, Default)]
pub struct Constraints<'a> {
    /// `φ_V(x) = y` for every listed pair.
    pub pins: Vec<(BitVec, BitVec)>,
    /// `m₂ ∘ φ_V = m₁` for every listed pair `(m₁, m₂)`.
    pub intertwine: Vec<(&'a LinMap, &'a LinMap)>,
}

/// Per-vector data preserved by every isomorphism.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
struct Signature {
    is_e: bool,
    isotropic: bool,
    pair_rank: u8,
    value_dim: u8,
}

fn signature(s: &SquareClassStructure, x: &BitVec) -> Signature {
    Signature {
        is_e: *x == s.e(),
        isotropic: s.pair(x, x).is_zero(),
        pair_rank: s.pair_with(x).rank() as u8,
        value_dim: s.value_set(x).expect("width matches").dim() as u8,
    }
}

/// A summary that agrees on isomorphic structures; unequal keys rule out an
/// isomorphism without a search.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct IsoKey {
    n: usize,
    b_dim: usize,
    radical_dim: usize,
    signatures: Vec<(Signature, usize)>,
}

pub fn iso_key(s: &SquareClassStructure) -> IsoKey {
    let s = s.reduce();
    let mut counts: HashMap<Signature, usize> = HashMap::new();
    for x in BitVec::all(s.n()) {
        *counts.entry(signature(&s, &x)).or_default() += 1;
    }
    let mut signatures: Vec<_> = counts.into_iter().collect();
    signatures.sort();
    IsoKey {
        n: s.n(),
        b_dim: s.b_dim(),
        radical_dim: s.radical().dim(),
        signatures,
    }
}

pub fn isomorphic(s1: &SquareClassStructure, s2: &SquareClassStructure) -> Result<Option<Isomorphism>> {
    isomorphic_with(s1, s2, &Constraints::default())
}

pub fn isomorphic_with(
    s1: &SquareClassStructure,
    s2: &SquareClassStructure,
    constraints: &Constraints<'_>,
) -> Result<Option<Isomorphism>> {
    for s in [s1, s2] {
        if s.n() > ISO_MAX_DIM {
            return Err(Error::DimensionCap {
                dim: s.n(),
                cap: ISO_MAX_DIM,
            });
        }
    }
    for (x, y) in &constraints.pins {
        if x.width() != s1.n() || y.width() != s2.n() {
            return Err(Error::WidthMismatch {
                expected: s1.n(),
                found: x.width(),
            });
        }
    }
    for (m1, m2) in &constraints.intertwine {
        if m1.src_dim() != s1.n() || m2.src_dim() != s2.n() || m1.dst_dim() != m2.dst_dim() {
            return Err(Error::WidthMismatch {
                expected: s1.n(),
                found: m1.src_dim(),
            });
        }
    }
    let (s1, s2) = (s1.reduce(), s2.reduce());
    if iso_key(&s1) != iso_key(&s2) {
        return Ok(None);
    }
    let mut pins = constraints.pins.clone();
    pins.push((s1.e(), s2.e()));
    if pins.iter().any(|(x, y)| x.is_zero() != y.is_zero()) {
        return Ok(None);
    }
    let mut search = Search::new(&s1, &s2, pins, &constraints.intertwine);
    Ok(search.run())
}

/// Partial injective linear map kept in echelon form on the domain side.
#[derive(Default)]
struct PartialMap {
    rows: Vec<(BitVec, BitVec)>,
    images: Vec<BitVec>,
}

impl PartialMap {
    /// Records `v ↦ w`; false when this contradicts linearity or injectivity.
    fn insert(&mut self, mut v: BitVec, mut w: BitVec) -> bool {
        for (d, i) in &self.rows {
            if v.get(d.pivot().unwrap()) {
                v ^= *d;
                w ^= *i;
            }
        }
        if v.is_zero() {
            return w.is_zero();
        }
        let mut probe = w;
        for r in &self.images {
            if probe.get(r.pivot().unwrap()) {
                probe ^= *r;
            }
        }
        if probe.is_zero() {
            return false;
        }
        self.rows.push((v, w));
        self.images.push(probe);
        true
    }

    fn truncate(&mut self, len: usize) {
        self.rows.truncate(len);
        self.images.truncate(len);
    }
}

struct Search<'s> {
    s1: &'s SquareClassStructure,
    s2: &'s SquareClassStructure,
    pins_by_level: Vec<Vec<(BitVec, BitVec)>>,
    intertwine: &'s [(&'s LinMap, &'s LinMap)],
    candidates: Vec<Vec<BitVec>>,
    images: Vec<BitVec>,
    phi_b: PartialMap,
}

impl<'s> Search<'s> {
    fn new(
        s1: &'s SquareClassStructure,
        s2: &'s SquareClassStructure,
        pins: Vec<(BitVec, BitVec)>,
        intertwine: &'s [(&'s LinMap, &'s LinMap)],
    ) -> Self {
        let n = s1.n();
        let mut by_sig: HashMap<Signature, Vec<BitVec>> = HashMap::new();
        for y in BitVec::all(n) {
            if !y.is_zero() {
                by_sig.entry(signature(s2, &y)).or_default().push(y);
            }
        }
        let candidates = (0..n)
            .map(|i| {
                by_sig
                    .get(&signature(s1, &BitVec::unit(n, i)))
                    .cloned()
                    .unwrap_or_default()
            })
            .collect();
        // A pin can be checked once the highest unit vector in its support has an image.
        let mut pins_by_level = vec![Vec::new(); n];
        for (x, y) in pins {
            if let Some(top) = x.ones().last() {
                pins_by_level[top].push((x, y));
            }
        }
        Search {
            s1,
            s2,
            pins_by_level,
            intertwine,
            candidates,
            images: Vec::with_capacity(n),
            phi_b: PartialMap::default(),
        }
    }

    fn apply(&self, x: &BitVec) -> BitVec {
        let mut out = BitVec::zero(self.s2.n());
        for i in x.ones() {
            out ^= self.images[i];
        }
        out
    }

    fn run(&mut self) -> Option<Isomorphism> {
        let n = self.s1.n();
        if !self.descend(0, &mut Vec::new()) {
            return None;
        }
        let phi_v = LinMap::new(n, n, self.images.clone()).expect("images have width n");
        let (doms, imgs): (Vec<_>, Vec<_>) = self.phi_b.rows.iter().copied().unzip();
        let phi_b = LinMap::from_basis_images(&doms, &imgs, self.s2.b_dim())
            .expect("reduced structures give a full domain");
        Some(Isomorphism { phi_v, phi_b })
    }

    /// `span` holds the echelon rows of the images chosen so far.
    fn descend(&mut self, level: usize, span: &mut Vec<BitVec>) -> bool {
        let n = self.s1.n();
        if level == n {
            return true;
        }
        let x = BitVec::unit(n, level);
        for k in 0..self.candidates[level].len() {
            let y = self.candidates[level][k];
            let mut probe = y;
            for r in span.iter() {
                if probe.get(r.pivot().unwrap()) {
                    probe ^= *r;
                }
            }
            if probe.is_zero() {
                continue;
            }
            if self.intertwine.iter().any(|(m1, m2)| m2.apply(&y) != m1.apply(&x)) {
                continue;
            }
            self.images.push(y);
            let saved = self.phi_b.rows.len();
            if self.consistent(level) {
                span.push(probe);
                if self.descend(level + 1, span) {
                    return true;
                }
                span.pop();
            }
            self.phi_b.truncate(saved);
            self.images.pop();
        }
        false
    }

    fn consistent(&mut self, level: usize) -> bool {
        let n = self.s1.n();
        for i in 0..=level {
            let bi = BitVec::unit(n, i);
            let bl = BitVec::unit(n, level);
            let v = self.s1.pair(&bi, &bl);
            let w = self.s2.pair(&self.images[i], &self.images[level]);
            if !self.phi_b.insert(v, w) {
                return false;
            }
        }
        self.pins_by_level[level]
            .iter()
            .all(|(x, y)| self.apply(x) == *y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprdsl::parse;
    use crate::synth::synthesize;

    fn s(text: &str) -> SquareClassStructure {
        synthesize(&parse(text).unwrap()).unwrap()
    }

    fn check(iso: &Isomorphism, s1: &SquareClassStructure, s2: &SquareClassStructure) {
        assert_eq!(iso.phi_v.apply(&s1.e()), s2.e());
        assert_eq!(iso.phi_v.rank(), s1.n());
        assert_eq!(iso.phi_b.rank(), s1.b_dim());
        for x in BitVec::all(s1.n()) {
            for y in BitVec::all(s1.n()) {
                assert_eq!(
                    s2.pair(&iso.phi_v.apply(&x), &iso.phi_v.apply(&y)),
                    iso.phi_b.apply(&s1.pair(&x, &y))
                );
            }
        }
    }

    #[test]
    fn reflexive() {
        for t in ["F(1)*C2", "Q2", "GR(2,F(1))", "GR(1,C2)*C2", "1"] {
            let a = s(t);
            let iso = isomorphic(&a, &a).unwrap().expect(t);
            check(&iso, &a, &a);
        }
    }

    #[test]
    fn radical_separates() {
        assert!(isomorphic(&s("F(1)*C2"), &s("GR(1,C2)")).unwrap().is_none());
    }

    #[test]
    fn collapsed_group_rings_agree() {
        let a = s("GR(1,GR(1,F(1)))");
        let b = s("GR(2,F(1))");
        check(&isomorphic(&a, &b).unwrap().unwrap(), &a, &b);
    }

    #[test]
    fn reordered_products_agree() {
        let a = s("C2*F(1)*GR(1,C2)");
        let b = s("F(1)*GR(1,C2)*C2");
        check(&isomorphic(&a, &b).unwrap().unwrap(), &a, &b);
    }

    #[test]
    fn class_of_minus_one_matters() {
        assert!(isomorphic(&s("F(2)"), &s("F(2,01)")).unwrap().is_none());
        let a = s("F(2,01)");
        let b = s("F(2,11)");
        check(&isomorphic(&a, &b).unwrap().unwrap(), &a, &b);
    }

    #[test]
    fn pins_are_respected() {
        let a = s("F(2)");
        let c = Constraints {
            pins: vec![("10".parse().unwrap(), "01".parse().unwrap())],
            intertwine: vec![],
        };
        let iso = isomorphic_with(&a, &a, &c).unwrap().unwrap();
        assert_eq!(iso.phi_v.apply(&"10".parse().unwrap()), "01".parse().unwrap());
        let m1 = LinMap::identity(2);
        let c = Constraints {
            pins: vec![("10".parse().unwrap(), "01".parse().unwrap())],
            intertwine: vec![(&m1, &m1)],
        };
        assert!(isomorphic_with(&a, &a, &c).unwrap().is_none());
    }

    #[test]
    fn group_ring_over_one_generator_matches_demushkin() {
        let a = s("GR(1,F(1))");
        let b = s("D(2;01,10;00)");
        check(&isomorphic(&a, &b).unwrap().unwrap(), &a, &b);
        let a = s("GR(1,F(1,1))");
        let b = s("D(2;01,11;10)");
        check(&isomorphic(&a, &b).unwrap().unwrap(), &a, &b);
    }

    #[test]
    fn cap_is_enforced() {
        let big = s("F(9)");
        assert!(matches!(isomorphic(&big, &big), Err(Error::DimensionCap { .. })));
    }
}
