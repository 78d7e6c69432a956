//! Square-class structures and the quantities read off them.
//!
//! A [`SquareClassStructure`] is the finite model `(V, e, B, q)` of a field:
//! `V` is the square-class group, `e` the class of `-1`, `B` the span of the
//! quaternion classes in the 2-torsion of the Brauer group and `q` the
//! quaternion pairing. Two axioms are enforced: `q` is symmetric, and
//! `q(x, x) = q(e, x)` (the algebra `(a, -a)` splits).

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exprdsl::Expr;
use crate::gf2::{BitVec, LinMap, Subspace};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RadicalClass {
    /// `R = V`: the Galois group is free.
    Free,
    /// `R = 0`: the pairing is nondegenerate.
    TrivialRadical,
    /// `0 ≠ R ≠ V`.
    ProperRadical,
}

impl fmt::Display for RadicalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RadicalClass::Free => "FREE",
            RadicalClass::TrivialRadical => "TRIVIAL_RADICAL",
            RadicalClass::ProperRadical => "PROPER_RADICAL",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SquareClassStructure {
    n: usize,
    e: BitVec,
    b_dim: usize,
    gram: Vec<Vec<BitVec>>,
    provenance: String,
}

impl SquareClassStructure {
    /// Builds a structure and checks widths, symmetry and the diagonal law.
    pub fn from_parts(
        n: usize,
        e: BitVec,
        b_dim: usize,
        gram: Vec<Vec<BitVec>>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let s = Self::from_parts_unchecked(n, e, b_dim, gram, provenance)?;
        if let Some(v) = s.axiom_violations().into_iter().next() {
            return Err(Error::Invalid(v));
        }
        Ok(s)
    }

    /// Checks only the shapes; the axioms may fail. Negative-control
    /// fixtures use this to build deliberately broken structures.
    pub fn from_parts_unchecked(
        n: usize,
        e: BitVec,
        b_dim: usize,
        gram: Vec<Vec<BitVec>>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let mismatch = |expected, found| Error::WidthMismatch { expected, found };
        if e.width() != n {
            return Err(mismatch(n, e.width()));
        }
        if gram.len() != n {
            return Err(mismatch(n, gram.len()));
        }
        for row in &gram {
            if row.len() != n {
                return Err(mismatch(n, row.len()));
            }
            if let Some(bad) = row.iter().find(|v| v.width() != b_dim) {
                return Err(mismatch(b_dim, bad.width()));
            }
        }
        Ok(SquareClassStructure {
            n,
            e,
            b_dim,
            gram,
            provenance: provenance.into(),
        })
    }

    /// The quadratically closed field: everything is zero-dimensional.
    pub fn empty() -> Self {
        SquareClassStructure {
            n: 0,
            e: BitVec::zero(0),
            b_dim: 0,
            gram: Vec::new(),
            provenance: "1".into(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn e(&self) -> BitVec {
        self.e
    }

    pub fn b_dim(&self) -> usize {
        self.b_dim
    }

    pub fn gram(&self) -> &[Vec<BitVec>] {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> BitVec {
        self.gram[i][j]
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// Human-readable descriptions of every axiom violation.
    pub fn axiom_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..i {
                if self.gram[i][j] != self.gram[j][i] {
                    out.push(format!(
                        "asymmetric pairing: q(b{i},b{j}) = {} but q(b{j},b{i}) = {}",
                        self.gram[i][j], self.gram[j][i]
                    ));
                }
            }
        }
        for i in 0..self.n {
            let b = BitVec::unit(self.n, i);
            let lhs = self.gram[i][i];
            let rhs = self.pair(&self.e, &b);
            if lhs != rhs {
                out.push(format!(
                    "diagonal law fails at b{i}: q(b,b) = {lhs}, q(e,b) = {rhs}"
                ));
            }
        }
        out
    }

    /// `q(x, y)`.
    pub fn pair(&self, x: &BitVec, y: &BitVec) -> BitVec {
        assert_eq!(x.width(), self.n, "pairing argument of the wrong width");
        assert_eq!(y.width(), self.n, "pairing argument of the wrong width");
        let mut out = BitVec::zero(self.b_dim);
        for i in x.ones() {
            for j in y.ones() {
                out ^= self.gram[i][j];
            }
        }
        out
    }

    /// The linear map `y ↦ q(x, y)` from `V` to `B`.
    pub fn pair_with(&self, x: &BitVec) -> LinMap {
        LinMap::from_fn(self.n, self.b_dim, |y| self.pair(x, &y))
    }

    fn check_vector(&self, x: &BitVec) -> Result<()> {
        if x.width() == self.n {
            Ok(())
        } else {
            Err(Error::WidthMismatch {
                expected: self.n,
                found: x.width(),
            })
        }
    }

    /// `D⟨1, x⟩ = {b : q(b, x + e) = 0}`; `x = 0` encodes `⟨1, 1⟩`.
    pub fn value_set(&self, x: &BitVec) -> Result<Subspace> {
        self.check_vector(x)?;
        Ok(self.pair_with(&(*x ^ self.e)).kernel())
    }

    /// `{a : q(a, b) = 0 for all b}`.
    pub fn radical(&self) -> Subspace {
        let mut r = Subspace::full(self.n);
        for j in 0..self.n {
            let k = self.pair_with(&BitVec::unit(self.n, j)).kernel();
            r = r.intersect(&k).expect("same ambient space");
        }
        r
    }

    /// `a ∉ {0, e}` and `D⟨1, a⟩ = {0, a}`.
    pub fn is_rigid(&self, a: &BitVec) -> Result<bool> {
        self.check_vector(a)?;
        if a.is_zero() || *a == self.e {
            return Ok(false);
        }
        let d = self.value_set(a)?;
        Ok(d.dim() == 1 && d.contains(a)?)
    }

    /// Both `a` and `-a` are rigid.
    pub fn is_birigid(&self, a: &BitVec) -> Result<bool> {
        Ok(self.is_rigid(a)? && self.is_rigid(&(*a ^ self.e))?)
    }

    pub fn rigid_elements(&self) -> Vec<BitVec> {
        BitVec::all(self.n)
            .filter(|a| self.is_rigid(a).expect("width matches"))
            .collect()
    }

    pub fn classify(&self) -> RadicalClass {
        let r = self.radical().dim();
        if r == self.n {
            RadicalClass::Free
        } else if r == 0 {
            RadicalClass::TrivialRadical
        } else {
            RadicalClass::ProperRadical
        }
    }

    /// Whether `B` is spanned by the gram entries.
    pub fn is_reduced(&self) -> bool {
        self.entry_span().dim() == self.b_dim
    }

    fn entry_span(&self) -> Subspace {
        Subspace::span(self.b_dim, self.gram.iter().flatten()).expect("entries have width b_dim")
    }

    /// Drops the coordinates of `B` that no quaternion class reaches.
    pub fn reduce(&self) -> SquareClassStructure {
        let span = self.entry_span();
        if span.dim() == self.b_dim {
            return self.clone();
        }
        let pivots: Vec<usize> = span.basis().iter().map(|r| r.pivot().unwrap()).collect();
        // In echelon coordinates a member of the span is determined by its pivot bits.
        let project = |v: &BitVec| BitVec::from_indices(pivots.len(), (0..pivots.len()).filter(|&k| v.get(pivots[k])));
        SquareClassStructure {
            n: self.n,
            e: self.e,
            b_dim: pivots.len(),
            gram: self.gram.iter().map(|row| row.iter().map(project).collect()).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// The structure of a free product: direct sums of `V`, `e` and `B`
    /// with no cross terms.
    pub fn direct_sum(&self, other: &SquareClassStructure) -> SquareClassStructure {
        let n = self.n + other.n;
        let b_dim = self.b_dim + other.b_dim;
        let mut gram = vec![vec![BitVec::zero(b_dim); n]; n];
        for i in 0..self.n {
            for j in 0..self.n {
                gram[i][j] = self.gram[i][j].embed(b_dim, 0);
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                gram[self.n + i][self.n + j] = other.gram[i][j].embed(b_dim, self.b_dim);
            }
        }
        SquareClassStructure {
            n,
            e: self.e.concat(&other.e),
            b_dim,
            gram,
            provenance: format!("{}*{}", self.provenance, other.provenance),
        }
    }

    /// One cyclotomic semidirect step `Z₂ ⋊ G`: adjoins a uniformizer class
    /// `t` and a copy of `V` inside `B`, with `q(x, t) = (0, x)` and
    /// `q(t, t) = (0, e)`.
    pub fn group_ring_step(&self) -> SquareClassStructure {
        let n0 = self.n;
        let n = n0 + 1;
        let b_dim = self.b_dim + n0;
        let mut gram = vec![vec![BitVec::zero(b_dim); n]; n];
        for i in 0..n0 {
            for j in 0..n0 {
                gram[i][j] = self.gram[i][j].embed(b_dim, 0);
            }
            let residue = BitVec::unit(n0, i).embed(b_dim, self.b_dim);
            gram[i][n0] = residue;
            gram[n0][i] = residue;
        }
        gram[n0][n0] = self.e.embed(b_dim, self.b_dim);
        SquareClassStructure {
            n,
            e: self.e.concat(&BitVec::zero(1)),
            b_dim,
            gram,
            provenance: format!("GR(1,{})", self.provenance),
        }
    }
}

impl Serialize for SquareClassStructure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SquareClassStructure", 5)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("e", &self.e)?;
        st.serialize_field("bDim", &self.b_dim)?;
        st.serialize_field("gram", &self.gram)?;
        st.serialize_field("provenance", &self.provenance)?;
        st.end()
    }
}

/// Builds the square-class structure of an expression, in the coordinates
/// given by its factors in order (a group ring puts the base first, then the
/// uniformizers `t₁ … t_m`).
pub fn synthesize(expr: &Expr) -> Result<SquareClassStructure> {
    expr.validate()?;
    Ok(build(expr).with_provenance(expr.to_string()))
}

fn build(expr: &Expr) -> SquareClassStructure {
    match expr {
        Expr::Trivial => SquareClassStructure::empty(),
        Expr::Free { rank, e } => SquareClassStructure {
            n: *rank,
            e: *e,
            b_dim: 0,
            gram: vec![vec![BitVec::zero(0); *rank]; *rank],
            provenance: String::new(),
        },
        Expr::C2 => SquareClassStructure {
            n: 1,
            e: BitVec::unit(1, 0),
            b_dim: 1,
            gram: vec![vec![BitVec::unit(1, 0)]],
            provenance: String::new(),
        },
        Expr::Demushkin(atom) => {
            let n = atom.n();
            let gram = (0..n)
                .map(|i| (0..n).map(|j| BitVec::from_bits(1, atom.entry(i, j) as u64)).collect())
                .collect();
            SquareClassStructure {
                n,
                e: atom.e(),
                b_dim: 1,
                gram,
                provenance: String::new(),
            }
        }
        Expr::GroupRing { m, base } => {
            let mut s = build(base);
            for _ in 0..*m {
                s = s.group_ring_step();
            }
            s
        }
        Expr::FreeProd(fs) => fs
            .iter()
            .map(build)
            .reduce(|acc, s| acc.direct_sum(&s))
            .unwrap_or_else(SquareClassStructure::empty),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprdsl::parse;

    fn s(text: &str) -> SquareClassStructure {
        synthesize(&parse(text).unwrap().canonicalize()).unwrap()
    }

    fn bv(text: &str) -> BitVec {
        text.parse().unwrap()
    }

    /// Brute-force radical: every `a` pairing to zero with every vector.
    fn brute_radical(st: &SquareClassStructure) -> Vec<BitVec> {
        BitVec::all(st.n())
            .filter(|a| BitVec::all(st.n()).all(|b| st.pair(a, &b).is_zero()))
            .collect()
    }

    fn members(sub: &Subspace) -> Vec<BitVec> {
        let mut v: Vec<_> = sub.elements().collect();
        v.sort();
        v
    }

    #[test]
    fn real_closed_block() {
        let c2 = s("C2");
        assert_eq!((c2.n(), c2.b_dim()), (1, 1));
        assert_eq!(c2.e(), bv("1"));
        assert_eq!(c2.entry(0, 0), bv("1"));
        assert_eq!(c2.classify(), RadicalClass::TrivialRadical);
    }

    #[test]
    fn free_block() {
        let f = s("F(2)");
        assert_eq!((f.n(), f.b_dim()), (2, 0));
        assert!(f.radical().is_full());
        assert_eq!(f.classify(), RadicalClass::Free);
    }

    #[test]
    fn group_ring_over_real_closed() {
        let g = s("GR(1, C2)");
        assert_eq!((g.n(), g.b_dim()), (2, 2));
        let (e0, t) = (bv("10"), bv("01"));
        assert_eq!(g.e(), e0);
        assert_eq!(g.pair(&e0, &e0), bv("10"));
        assert_eq!(g.pair(&e0, &t), bv("01"));
        assert_eq!(g.pair(&t, &t), bv("01"));
        assert!(g.radical().is_zero());
        assert!(brute_radical(&g) == vec![bv("00")]);
    }

    #[test]
    fn q2_block() {
        let q = s("Q2");
        assert_eq!(q.e(), bv("100"));
        let expected = [["1", "0", "0"], ["0", "0", "1"], ["0", "1", "0"]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(q.entry(i, j), bv(expected[i][j]));
            }
        }
        assert_eq!(q.classify(), RadicalClass::TrivialRadical);
        assert!(q.rigid_elements().is_empty());
    }

    #[test]
    fn value_set_examples() {
        let st = s("F(1)*C2");
        let (t, u) = (bv("10"), bv("01"));
        assert_eq!(st.e(), u);
        assert!(st.value_set(&st.e()).unwrap().is_full());
        let brute: Vec<BitVec> = BitVec::all(2)
            .filter(|b| st.pair(b, &(t ^ u)).is_zero())
            .collect();
        assert_eq!(members(&st.value_set(&t).unwrap()), brute);
        assert_eq!(brute, vec![bv("00"), t]);
        assert!(st.value_set(&bv("1")).is_err());

        // Q2 on ([-1],[2],[5]): D⟨1,2⟩ are the norms from Q2(√-2), i.e. {1, 2, -5, -10}
        let q = s("Q2");
        let d = q.value_set(&bv("010")).unwrap();
        assert_eq!(members(&d), vec![bv("000"), bv("010"), bv("101"), bv("111")]);
    }

    #[test]
    fn radical_examples() {
        let st = s("F(1)*C2");
        assert_eq!(members(&st.radical()), brute_radical(&st));
        assert_eq!(members(&st.radical()), vec![bv("00"), bv("10")]);
        let g = s("GR(2, F(1))");
        assert!(g.radical().is_zero());
        assert_eq!(brute_radical(&g), vec![bv("000")]);
    }

    #[test]
    fn rigid_examples() {
        let st = s("F(1)*C2");
        assert!(st.is_rigid(&bv("10")).unwrap());
        assert!(!st.is_rigid(&bv("01")).unwrap());
        assert!(!st.is_rigid(&bv("00")).unwrap());
        assert_eq!(st.rigid_elements(), vec![bv("10")]);
        let g = s("GR(1, F(1))");
        assert!(g.is_birigid(&bv("01")).unwrap());
        assert!(g.radical().is_zero());
    }

    #[test]
    fn classification_examples() {
        assert_eq!(s("F(3)").classify(), RadicalClass::Free);
        assert_eq!(s("Q2").classify(), RadicalClass::TrivialRadical);
        assert_eq!(s("F(1)*C2").classify(), RadicalClass::ProperRadical);
        assert_eq!(SquareClassStructure::empty().classify(), RadicalClass::Free);
    }

    #[test]
    fn reduce_drops_unused_coordinates() {
        let c2 = s("C2");
        let padded = SquareClassStructure::from_parts(
            1,
            bv("1"),
            3,
            vec![vec![bv("010")]],
            "padded",
        )
        .unwrap();
        assert!(!padded.is_reduced());
        let r = padded.reduce();
        assert_eq!(r.b_dim(), 1);
        assert_eq!(r.gram(), c2.gram());
    }

    #[test]
    fn axioms_are_checked() {
        let bad = SquareClassStructure::from_parts(2, bv("00"), 1, vec![vec![bv("1"), bv("0")], vec![bv("0"), bv("0")]], "bad");
        assert!(matches!(bad, Err(Error::Invalid(m)) if m.contains("diagonal")));
        let bad = SquareClassStructure::from_parts(2, bv("00"), 1, vec![vec![bv("0"), bv("1")], vec![bv("0"), bv("0")]], "bad");
        assert!(matches!(bad, Err(Error::Invalid(m)) if m.contains("asymmetric")));
    }

    #[test]
    fn json_layout() {
        let json = serde_json::to_string(&s("C2")).unwrap();
        assert_eq!(json, r#"{"n":1,"e":"1","bDim":1,"gram":[["1"]],"provenance":"C2"}"#);
    }
}
